use std::time::Instant;

use rayon::prelude::*;

use crate::error::Result;

use super::check::{lemma_check, CellConfig, Regime};
use super::spec::ExperimentSpec;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-cell seed: a SplitMix64 chain over `(master_seed, N, ε bits, trial)`.
///
/// Keyed by values rather than list positions, so reordering `N_list` or
/// `epsilon_list` leaves every cell unchanged.
pub fn cell_seed(master_seed: u64, n: usize, epsilon: f64, trial: usize) -> u64 {
    [n as u64, epsilon.to_bits(), trial as u64]
        .into_iter()
        .fold(splitmix64(master_seed), |h, x| splitmix64(h ^ x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellStats {
    pub err_abs_median: f64,
    pub err_abs_mean: f64,
    pub err_abs_max: f64,
    pub err_rel_median: f64,
    pub degree_ratio_mean: f64,
    /// RMS of `r(u) - (1 + ε S(u)/6)`.
    pub degree_ratio_dev: f64,
    /// Mean of `r(u) - 1`.
    pub degree_correction_mean: f64,
    /// `(2/ε) Δf` at vertex 0.
    pub anchor_estimate: f64,
    pub regime: Regime,
    pub self_loop_floor: f64,
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub n: usize,
    pub epsilon: f64,
    pub trial: usize,
    pub seed: u64,
    pub outcome: std::result::Result<CellStats, String>,
    pub wall_ms: f64,
}

impl CellResult {
    pub fn stats(&self) -> Option<&CellStats> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub mode_label: String,
    /// Cells in spec order: N outermost, then ε, then trial.
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }

    /// Bitwise comparison of everything except wall time.
    pub fn same_numbers(&self, other: &ExperimentResult) -> bool {
        fn bits(s: &CellStats) -> [u64; 9] {
            [
                s.err_abs_median.to_bits(),
                s.err_abs_mean.to_bits(),
                s.err_abs_max.to_bits(),
                s.err_rel_median.to_bits(),
                s.degree_ratio_mean.to_bits(),
                s.degree_ratio_dev.to_bits(),
                s.degree_correction_mean.to_bits(),
                s.anchor_estimate.to_bits(),
                s.self_loop_floor.to_bits(),
            ]
        }
        self.cells.len() == other.cells.len()
            && self.cells.iter().zip(&other.cells).all(|(a, b)| {
                a.n == b.n
                    && a.epsilon.to_bits() == b.epsilon.to_bits()
                    && a.trial == b.trial
                    && a.seed == b.seed
                    && match (&a.outcome, &b.outcome) {
                        (Ok(x), Ok(y)) => bits(x) == bits(y) && x.regime == y.regime,
                        (Err(x), Err(y)) => x == y,
                        _ => false,
                    }
            })
    }
}

/// Runs every `(N, ε, trial)` cell of `spec`.
///
/// Spec-level problems (unknown ids, invalid lists) are returned as errors;
/// a failing cell is recorded in its row and the remaining cells still run.
/// Cells execute on the current rayon pool; the output order is the spec
/// order regardless of scheduling.
pub fn sweep(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let resolved = spec.validate()?;
    let mut plan = Vec::new();
    for &n in &spec.n_list {
        for &epsilon in &spec.epsilon_list {
            for trial in 0..spec.trials {
                plan.push(CellConfig {
                    manifold: resolved.manifold,
                    function: resolved.function,
                    n,
                    epsilon,
                    seed: cell_seed(spec.master_seed, n, epsilon, trial),
                    sampling: spec.sampling,
                    storage: resolved.storage,
                    anchor: spec.anchor,
                });
            }
        }
    }
    let trials = spec.trials;
    let cells = plan
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let start = Instant::now();
            let outcome = lemma_check(cfg)
                .map(|r| CellStats {
                    err_abs_median: r.err_abs_median,
                    err_abs_mean: r.err_abs_mean,
                    err_abs_max: r.err_abs_max,
                    err_rel_median: r.err_rel_median,
                    degree_ratio_mean: r.degree.ratio_mean,
                    degree_ratio_dev: r.degree.residual_rms,
                    degree_correction_mean: r.degree.correction_mean,
                    anchor_estimate: r.anchor_estimate(),
                    regime: r.regime,
                    self_loop_floor: r.self_loop_floor,
                })
                .map_err(|e| e.to_string())
                .and_then(|s| {
                    let finite = [
                        s.err_abs_median,
                        s.err_abs_mean,
                        s.err_abs_max,
                        s.err_rel_median,
                        s.degree_ratio_mean,
                        s.degree_ratio_dev,
                    ]
                    .iter()
                    .all(|x| x.is_finite());
                    if finite {
                        Ok(s)
                    } else {
                        Err("non-finite statistics".to_string())
                    }
                });
            if let Err(e) = &outcome {
                log::error!("cell N={} eps={} trial={}: {e}", cfg.n, cfg.epsilon, i % trials);
            }
            CellResult {
                n: cfg.n,
                epsilon: cfg.epsilon,
                trial: i % trials,
                seed: cfg.seed,
                outcome,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    Ok(ExperimentResult {
        spec: spec.clone(),
        mode_label: spec.mode_label(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::spec::{ModeKind, Sampling, StorageMode};
    use crate::manifold::Manifold;

    fn spec(n_list: Vec<usize>, eps: Vec<f64>, trials: usize) -> ExperimentSpec {
        ExperimentSpec {
            manifold: "circle".into(),
            function: "sin_theta".into(),
            n_list,
            epsilon_list: eps,
            trials,
            master_seed: 99,
            mode: ModeKind::Dense,
            tau: None,
            interior_statistic: Default::default(),
            sampling: Sampling::Random,
            anchor: false,
        }
    }

    #[test]
    fn seeds_depend_on_values_not_positions() {
        assert_eq!(cell_seed(1, 100, 0.01, 0), cell_seed(1, 100, 0.01, 0));
        assert_ne!(cell_seed(1, 100, 0.01, 0), cell_seed(1, 100, 0.01, 1));
        assert_ne!(cell_seed(1, 100, 0.01, 0), cell_seed(2, 100, 0.01, 0));
        assert_ne!(cell_seed(1, 100, 0.01, 0), cell_seed(1, 101, 0.01, 0));
    }

    #[test]
    fn cardinality_and_order() {
        let r = sweep(&spec(vec![50, 80, 120], vec![0.1, 0.05], 5)).unwrap();
        assert_eq!(r.cells.len(), 30);
        assert_eq!((r.cells[0].n, r.cells[0].epsilon, r.cells[0].trial), (50, 0.1, 0));
        assert_eq!((r.cells[29].n, r.cells[29].epsilon, r.cells[29].trial), (120, 0.05, 4));
        assert_eq!(r.failed(), 0);
    }

    #[test]
    fn degenerate_sweep_matches_single_check() {
        let s = spec(vec![150], vec![0.05], 1);
        let r = sweep(&s).unwrap();
        let direct = lemma_check(&CellConfig {
            manifold: Manifold::Circle,
            function: "sin_theta",
            n: 150,
            epsilon: 0.05,
            seed: cell_seed(99, 150, 0.05, 0),
            sampling: Sampling::Random,
            storage: StorageMode::Dense,
            anchor: false,
        })
        .unwrap();
        let c = r.cells[0].stats().unwrap();
        assert_eq!(c.err_abs_median.to_bits(), direct.err_abs_median.to_bits());
        assert_eq!(c.err_abs_max.to_bits(), direct.err_abs_max.to_bits());
        assert_eq!(c.degree_ratio_mean.to_bits(), direct.degree.ratio_mean.to_bits());
    }

    #[test]
    fn permuting_n_list_keeps_cells() {
        let a = sweep(&spec(vec![60, 90, 40], vec![0.1], 2)).unwrap();
        let b = sweep(&spec(vec![40, 60, 90], vec![0.1], 2)).unwrap();
        for ca in &a.cells {
            let cb = b
                .cells
                .iter()
                .find(|c| c.n == ca.n && c.trial == ca.trial)
                .unwrap();
            assert_eq!(ca.seed, cb.seed);
            assert_eq!(ca.stats(), cb.stats());
        }
    }

    #[test]
    fn rerun_is_bitwise_identical() {
        let s = spec(vec![70, 140], vec![0.08, 0.02], 3);
        assert!(sweep(&s).unwrap().same_numbers(&sweep(&s).unwrap()));
    }
}
