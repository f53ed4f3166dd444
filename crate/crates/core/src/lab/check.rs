use serde::Serialize;

use crate::calculus::laplacian_apply;
use crate::error::Result;
use crate::graph::{build_weights, degrees, degrees_streaming, DegreeVector, KernelConfig, PointCloud};
use crate::manifold::{eval_pair, Manifold};

use super::spec::{Sampling, StorageMode};

/// One `(manifold, function, N, ε, seed)` evaluation.
#[derive(Clone, Copy, Debug)]
pub struct CellConfig {
    pub manifold: Manifold,
    pub function: &'static str,
    pub n: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub sampling: Sampling,
    pub storage: StorageMode,
    /// Pin vertex 0 at the manifold's anchor point (random sampling only).
    pub anchor: bool,
}

impl CellConfig {
    pub fn cloud(&self) -> Result<PointCloud> {
        match (self.sampling, self.anchor) {
            (Sampling::Grid, _) => self.manifold.grid_sample(self.n),
            (Sampling::Random, false) => self.manifold.sample(self.n, self.seed),
            (Sampling::Random, true) => self.manifold.sample_anchored(self.n, self.seed),
        }
    }
}

/// Which error term of the pointwise expansion dominates a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Kernel-bandwidth bias, `O(ε^{1/2})`.
    Bias,
    /// The self-loop `w(u,u) = 1` is no longer negligible next to the
    /// kernel mass of the other `N - 1` points.
    SelfLoopFloor,
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    /// `(2/ε) Δf(u)` at every vertex.
    pub estimator: Vec<f64>,
    /// `Δ_M f(u)`.
    pub target: Vec<f64>,
    /// `estimator - target`.
    pub errors: Vec<f64>,
    pub err_abs_median: f64,
    pub err_abs_mean: f64,
    pub err_abs_max: f64,
    pub err_rel_median: f64,
    /// `max_u |Δ_M f(u)|`, the relative-error normalizer.
    pub normalizer: f64,
    pub regime: Regime,
    /// `2 vol(M) / ((N-1)(2πε)^{m/2} ε) · max|f|`.
    pub self_loop_floor: f64,
    pub degree: DegreeReport,
}

impl LemmaReport {
    /// Estimator at vertex 0 (the pinned vertex when sampling is anchored).
    pub fn anchor_estimate(&self) -> f64 {
        self.estimator[0]
    }
}

/// Degree normalization `r(u) = d(u) vol(M) / ((N-1)(2πε)^{m/2})` against the
/// curvature prediction `1 + ε S(u)/6`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub ratio_mean: f64,
    pub ratio_std: f64,
    /// Mean of `1 + ε S(u)/6`.
    pub predicted_mean: f64,
    /// Mean of `r(u) - 1`: the fitted constant correction.
    pub correction_mean: f64,
    /// Mean of `r(u) - (1 + ε S(u)/6)`.
    pub residual_mean: f64,
    /// Root mean square of `r(u) - (1 + ε S(u)/6)`.
    pub residual_rms: f64,
    /// `vol(M) / ((N-1)(2πε)^{m/2})`: the share of `r(u)` contributed by the
    /// self-loop alone. When it is comparable to `ε`, the check is measuring
    /// the self-loop, not curvature.
    pub self_loop_term: f64,
}

fn kernel_mass(manifold: Manifold, n: usize, epsilon: f64) -> f64 {
    (n as f64 - 1.0) * (2.0 * std::f64::consts::PI * epsilon).powf(manifold.intrinsic_dim() as f64 / 2.0)
        / manifold.volume()
}

pub fn degree_stats(manifold: Manifold, cloud: &PointCloud, d: &DegreeVector, epsilon: f64) -> DegreeReport {
    let n = cloud.len();
    let scale = kernel_mass(manifold, n, epsilon);
    let mut ratio = Vec::with_capacity(n);
    let mut predicted = Vec::with_capacity(n);
    for (u, p) in cloud.iter().enumerate() {
        ratio.push(d.get(u) / scale);
        predicted.push(1.0 + epsilon * manifold.e_of(p) / 2.0);
    }
    let nf = n as f64;
    let ratio_mean = ratio.iter().sum::<f64>() / nf;
    let ratio_std = (ratio.iter().map(|r| (r - ratio_mean).powi(2)).sum::<f64>() / nf).sqrt();
    let predicted_mean = predicted.iter().sum::<f64>() / nf;
    let residual: Vec<f64> = ratio.iter().zip(&predicted).map(|(r, p)| r - p).collect();
    DegreeReport {
        ratio_mean,
        ratio_std,
        predicted_mean,
        correction_mean: ratio_mean - 1.0,
        residual_mean: residual.iter().sum::<f64>() / nf,
        residual_rms: (residual.iter().map(|x| x * x).sum::<f64>() / nf).sqrt(),
        self_loop_term: 1.0 / scale,
    }
}

/// Median of a slice (mean of the two middle values for even length).
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Builds the graph for `cfg`, forms `L̂f = (2/ε) Δf` and compares it with
/// `Δ_M f` at every vertex.
pub fn lemma_check(cfg: &CellConfig) -> Result<LemmaReport> {
    let cloud = cfg.cloud()?;
    let kernel = cfg.storage.kernel(cfg.epsilon)?;
    let (f, target) = eval_pair(cfg.manifold, cfg.function, &cloud)?;

    let m = cfg.manifold.intrinsic_dim() as f64;
    let neighbours = (2.0 * std::f64::consts::PI * cfg.epsilon).powf(m / 2.0) * cfg.n as f64
        / cfg.manifold.volume();
    if neighbours < 1.0 {
        log::warn!(
            "{} N={} eps={}: expected kernel neighbourhood holds {neighbours:.3} points; the graph is nearly empty",
            cfg.manifold.id(),
            cfg.n,
            cfg.epsilon
        );
    }

    let w = build_weights(&cloud, &kernel)?;
    let d = degrees(&w);
    let lap = laplacian_apply(&f, &w, &d)?;
    drop(w);

    let scale = 2.0 / cfg.epsilon;
    let estimator: Vec<f64> = lap.values().iter().map(|x| scale * x).collect();
    let target = target.into_values();
    let errors: Vec<f64> = estimator.iter().zip(&target).map(|(e, t)| e - t).collect();
    let abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();

    let err_abs_median = median(&abs);
    let err_abs_mean = abs.iter().sum::<f64>() / abs.len() as f64;
    let err_abs_max = abs.iter().copied().fold(0.0, f64::max);
    let normalizer = target.iter().fold(0.0f64, |a, t| a.max(t.abs()));
    // constant functions have Δ_M f ≡ 0; fall back to the absolute error
    let err_rel_median = if normalizer > 0.0 {
        err_abs_median / normalizer
    } else {
        err_abs_median
    };

    let f_max = f.values().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let self_loop_floor = 2.0 / (kernel_mass(cfg.manifold, cfg.n, cfg.epsilon) * cfg.epsilon) * f_max;
    let regime = if self_loop_floor <= cfg.epsilon.sqrt() * f_max {
        Regime::Bias
    } else {
        Regime::SelfLoopFloor
    };

    Ok(LemmaReport {
        degree: degree_stats(cfg.manifold, &cloud, &d, cfg.epsilon),
        estimator,
        target,
        errors,
        err_abs_median,
        err_abs_mean,
        err_abs_max,
        err_rel_median,
        normalizer,
        regime,
        self_loop_floor,
    })
}

/// Degree asymptotics for one cloud, computed without storing `W`.
pub fn degree_check(
    manifold: Manifold,
    n: usize,
    epsilon: f64,
    seed: u64,
    sampling: Sampling,
    tau: f64,
) -> Result<DegreeReport> {
    let cloud = match sampling {
        Sampling::Random => manifold.sample(n, seed)?,
        Sampling::Grid => manifold.grid_sample(n)?,
    };
    let d = degrees_streaming(&cloud, &KernelConfig::new(epsilon, tau)?)?;
    Ok(degree_stats(manifold, &cloud, &d, epsilon))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn circle_grid(n: usize, epsilon: f64, function: &'static str) -> CellConfig {
        CellConfig {
            manifold: Manifold::Circle,
            function,
            n,
            epsilon,
            seed: 0,
            sampling: Sampling::Grid,
            storage: StorageMode::Dense,
            anchor: false,
        }
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn constant_function_on_circle_grid_has_zero_estimator() {
        let r = lemma_check(&circle_grid(500, 0.01, "const")).unwrap();
        assert!(r.estimator.iter().all(|x| x.abs() < 1e-10), "{}", r.err_abs_max);
        assert_eq!(r.normalizer, 0.0);
    }

    // Frozen from an mpmath evaluation of the exact grid sums
    // S_j = Σ_k exp(-(2 sin(kh/2))^2/2ε) cos(jkh), h = 2π/N; the error field is
    // c·sin θ with c = (2/ε)(S_1/S_0 - 1) + 1. For N = 2000, ε = 1e-3 the
    // relative median is |c| · median|sin θ_k| = 1.7695374878153063e-4,
    // i.e. C = 5.5957688665488189e-3 in C·ε^{1/2}.
    #[test]
    fn circle_grid_bias_matches_quadrature_oracle() {
        const C_ORACLE: f64 = 5.5957688665488189e-3;
        let eps = 1e-3;
        let r = lemma_check(&circle_grid(2000, eps, "sin_theta")).unwrap();
        let bound = 1.01 * C_ORACLE * eps.sqrt();
        assert!(r.err_rel_median <= bound, "{} > {bound}", r.err_rel_median);
        assert!((r.err_rel_median - 1.7695374878153063e-4).abs() < 1e-8);
        assert!((r.err_abs_max - 2.5025039143960216e-4).abs() < 1e-8);
    }

    #[test]
    fn circle_grid_degree_ratio_matches_oracle() {
        // N/(N-1) · sqrt(2π/ε) e^{-1/ε} I_0(1/ε) for N = 5000, ε = 1e-3
        const ORACLE: f64 = 1.0003251354129372;
        let r = degree_check(Manifold::Circle, 5000, 1e-3, 0, Sampling::Grid, 0.0).unwrap();
        let delta = (ORACLE - 1.0) * (1.0 + 1e-6);
        assert!((r.ratio_mean - 1.0).abs() <= delta, "{}", r.ratio_mean);
        assert!((r.ratio_mean - ORACLE).abs() < 1e-10);
        assert!(r.ratio_std < 1e-10);
    }

    #[test]
    fn self_loop_dominates_for_tiny_epsilon() {
        // random cloud: E r(u) = 1 + self_loop_term + O(ε); the check reports it
        let r = degree_check(Manifold::Circle, 4000, 1e-5, 3, Sampling::Random, 0.0).unwrap();
        assert!(r.self_loop_term > 0.15);
        assert!((r.ratio_mean - (1.0 + r.self_loop_term)).abs() < 0.02, "{r:?}");

        // grid spacing far wider than the kernel: only the self-loop survives
        let n = 200;
        let eps = 1e-7;
        let r = degree_check(Manifold::Circle, n, eps, 0, Sampling::Grid, 0.0).unwrap();
        assert!((r.ratio_mean - r.self_loop_term).abs() < 1e-9 * r.self_loop_term);
        let cell = lemma_check(&circle_grid(n, eps, "sin_theta")).unwrap();
        assert_eq!(cell.regime, Regime::SelfLoopFloor);
        assert_eq!(lemma_check(&circle_grid(4000, 0.04, "sin_theta")).unwrap().regime, Regime::Bias);
    }

    #[test]
    fn sparse_and_dense_cells_agree_for_tiny_tau() {
        let mut cfg = CellConfig {
            manifold: Manifold::Sphere,
            function: "z",
            n: 400,
            epsilon: 0.05,
            seed: 11,
            sampling: Sampling::Random,
            storage: StorageMode::Dense,
            anchor: false,
        };
        let dense = lemma_check(&cfg).unwrap();
        cfg.storage = StorageMode::Sparse { tau: 1e-12 };
        let sparse = lemma_check(&cfg).unwrap();
        for (a, b) in dense.estimator.iter().zip(&sparse.estimator) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
