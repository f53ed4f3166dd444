use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::fmt_f64;

use super::check::Regime;
use super::rate::{anchor_spread_by_n, fit_power_law, fit_rate, Column, RateFit, SweptAxis};
use super::spec::{ExperimentSpec, Statistic};
use super::sweep::ExperimentResult;

pub const RESULTS_HEADER: &str = "manifold,function,N,epsilon,seed,mode,err_abs_median,err_abs_mean,err_abs_max,err_rel_median,degree_ratio_mean,degree_ratio_dev,wall_ms";

/// Result table as CSV. Failed cells carry `NaN` statistics.
///
/// `wall_ms` is written as `0` unless `timing` is set, which keeps the file
/// byte-identical across reruns.
pub fn results_csv(result: &ExperimentResult, timing: bool) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    let nan = fmt_f64(f64::NAN);
    for c in &result.cells {
        let stats: Vec<String> = match c.stats() {
            Some(s) => [
                s.err_abs_median,
                s.err_abs_mean,
                s.err_abs_max,
                s.err_rel_median,
                s.degree_ratio_mean,
                s.degree_ratio_dev,
            ]
            .iter()
            .map(|&x| fmt_f64(x))
            .collect(),
            None => vec![nan.clone(); 6],
        };
        let wall = if timing { fmt_f64(c.wall_ms) } else { "0".to_string() };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            result.spec.manifold,
            result.spec.function,
            c.n,
            fmt_f64(c.epsilon),
            c.seed,
            result.mode_label,
            stats.join(","),
            wall
        ));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedFit {
    pub name: String,
    /// The value held fixed on the other axis.
    pub fixed: f64,
    pub response: String,
    #[serde(flatten)]
    pub fit: RateFit,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellNote {
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub trial: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_loop_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_correction_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnchorSpread {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub std_dev: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub spec: ExperimentSpec,
    pub mode: String,
    pub cells: usize,
    pub failed_cells: usize,
    pub rate_fits: Vec<NamedFit>,
    pub anchor_spread: Vec<AnchorSpread>,
    pub cell_notes: Vec<CellNote>,
}

fn stat_column(stat: Statistic) -> Column {
    match stat {
        Statistic::Median => Column::ErrAbsMedian,
        Statistic::Mean => Column::ErrAbsMean,
        Statistic::Max => Column::ErrAbsMax,
    }
}

/// JSON summary: per-cell regimes, error-vs-N and error-vs-ε rate fits, and
/// the across-trial spread of the vertex-0 estimator with its N-slope.
/// Fits that lack 3 distinct axis values or positive responses are skipped.
pub fn summarize(result: &ExperimentResult, timing: bool) -> Summary {
    let spec = &result.spec;
    let mut rate_fits = Vec::new();
    let stat = stat_column(spec.interior_statistic);
    for &eps in &spec.epsilon_list {
        let rows = || result.cells.iter().filter(|c| c.epsilon.to_bits() == eps.to_bits());
        for column in [stat, Column::ErrRelMedian] {
            if let Ok(fit) = fit_rate(rows(), SweptAxis::N, column) {
                rate_fits.push(NamedFit {
                    name: format!("{}_vs_N", column.name()),
                    fixed: eps,
                    response: column.name().into(),
                    fit,
                });
            }
        }
    }
    for &n in &spec.n_list {
        let rows = result.cells.iter().filter(|c| c.n == n);
        if let Ok(fit) = fit_rate(rows, SweptAxis::Epsilon, Column::ErrAbsMax) {
            rate_fits.push(NamedFit {
                name: "err_abs_max_vs_epsilon".into(),
                fixed: n as f64,
                response: Column::ErrAbsMax.name().into(),
                fit,
            });
        }
    }
    let mut anchor_spread = Vec::new();
    for &eps in &spec.epsilon_list {
        let spread = anchor_spread_by_n(result, eps);
        let (xs, ys): (Vec<f64>, Vec<f64>) = spread.iter().map(|&(n, s)| (n as f64, s)).unzip();
        if let Ok(fit) = fit_power_law(&xs, &ys, SweptAxis::N) {
            rate_fits.push(NamedFit {
                name: "anchor_std_vs_N".into(),
                fixed: eps,
                response: "anchor_std".into(),
                fit,
            });
        }
        anchor_spread.extend(spread.into_iter().map(|(n, std_dev)| AnchorSpread {
            epsilon: eps,
            n,
            std_dev,
        }));
    }
    let cell_notes = result
        .cells
        .iter()
        .map(|c| {
            let s = c.stats();
            CellNote {
                n: c.n,
                epsilon: c.epsilon,
                trial: c.trial,
                seed: c.seed,
                regime: s.map(|s| s.regime),
                self_loop_floor: s.map(|s| s.self_loop_floor),
                anchor_estimate: s.map(|s| s.anchor_estimate),
                degree_correction_mean: s.map(|s| s.degree_correction_mean),
                error: c.outcome.as_ref().err().cloned(),
                wall_ms: timing.then_some(c.wall_ms),
            }
        })
        .collect();
    Summary {
        spec: spec.clone(),
        mode: result.mode_label.clone(),
        cells: result.cells.len(),
        failed_cells: result.failed(),
        rate_fits,
        anchor_spread,
        cell_notes,
    }
}

/// A CSV file with a header row, kept as strings.
#[derive(Clone, Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Parse {
                path: path.display().to_string(),
                line: 0,
                msg: format!("{other:?}"),
            },
        })?;
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Table { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::{sweep, ModeKind, Sampling};

    #[test]
    fn csv_has_fixed_header_and_one_row_per_cell() {
        let spec = ExperimentSpec {
            manifold: "sphere".into(),
            function: "z".into(),
            n_list: vec![60, 90, 120],
            epsilon_list: vec![0.2],
            trials: 2,
            master_seed: 5,
            mode: ModeKind::Sparse,
            tau: Some(1e-6),
            interior_statistic: Statistic::Mean,
            sampling: Sampling::Random,
            anchor: true,
        };
        let r = sweep(&spec).unwrap();
        let csv = results_csv(&r, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("sphere,z,60,2.0000000000000001e-1,"));
        assert!(lines[1].contains(",sparse(1e-6),"));
        assert!(lines[1].ends_with(",0"));

        let s = summarize(&r, false);
        assert_eq!(s.cells, 6);
        assert!(s.rate_fits.iter().any(|f| f.name == "err_abs_mean_vs_N"));
        assert!(s.rate_fits.iter().any(|f| f.name == "anchor_std_vs_N"));
        assert_eq!(s.anchor_spread.len(), 3);
        let json = serde_json::to_string(&s).unwrap();
        assert!(!json.contains("wall_ms"));
    }
}
