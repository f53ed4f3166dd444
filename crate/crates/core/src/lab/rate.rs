use serde::Serialize;

use crate::error::{Error, Result};

use super::sweep::{CellResult, ExperimentResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweptAxis {
    #[serde(rename = "N")]
    N,
    #[serde(rename = "epsilon")]
    Epsilon,
}

impl SweptAxis {
    pub fn value(self, cell: &CellResult) -> f64 {
        match self {
            SweptAxis::N => cell.n as f64,
            SweptAxis::Epsilon => cell.epsilon,
        }
    }
}

/// Numeric response columns of the result table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    ErrAbsMedian,
    ErrAbsMean,
    ErrAbsMax,
    ErrRelMedian,
    DegreeRatioMean,
    DegreeRatioDev,
}

impl Column {
    pub fn name(self) -> &'static str {
        match self {
            Column::ErrAbsMedian => "err_abs_median",
            Column::ErrAbsMean => "err_abs_mean",
            Column::ErrAbsMax => "err_abs_max",
            Column::ErrRelMedian => "err_rel_median",
            Column::DegreeRatioMean => "degree_ratio_mean",
            Column::DegreeRatioDev => "degree_ratio_dev",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        [
            Column::ErrAbsMedian,
            Column::ErrAbsMean,
            Column::ErrAbsMax,
            Column::ErrRelMedian,
            Column::DegreeRatioMean,
            Column::DegreeRatioDev,
        ]
        .into_iter()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn value(self, cell: &CellResult) -> Option<f64> {
        let s = cell.stats()?;
        Some(match self {
            Column::ErrAbsMedian => s.err_abs_median,
            Column::ErrAbsMean => s.err_abs_mean,
            Column::ErrAbsMax => s.err_abs_max,
            Column::ErrRelMedian => s.err_rel_median,
            Column::DegreeRatioMean => s.degree_ratio_mean,
            Column::DegreeRatioDev => s.degree_ratio_dev,
        })
    }
}

/// Least-squares fit of `log y = slope · log x + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub axis: SweptAxis,
    pub points: usize,
}

/// Ordinary least squares in log–log space.
///
/// Points are sorted before accumulation, so the result does not depend on
/// input order. Needs at least 3 distinct `x` values and strictly positive
/// data.
pub fn fit_power_law(xs: &[f64], ys: &[f64], axis: SweptAxis) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::RateFit(format!("{} x values vs {} responses", xs.len(), ys.len())));
    }
    if let Some(y) = ys.iter().find(|y| !(**y > 0.0 && y.is_finite())) {
        return Err(Error::RateFit(format!("response {y} is not positive")));
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::RateFit(format!("axis value {x} is not positive")));
    }
    let mut pts: Vec<(f64, f64)> = xs.iter().map(|x| x.ln()).zip(ys.iter().map(|y| y.ln())).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut distinct = pts.iter().map(|p| p.0.to_bits()).collect::<Vec<_>>();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::RateFit(format!(
            "need at least 3 distinct axis values, got {}",
            distinct.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - (slope * p.0 + intercept)).powi(2)).sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        axis,
        points: pts.len(),
    })
}

/// Fits `column` against `axis` over the successful rows of `cells`.
pub fn fit_rate<'a>(
    cells: impl IntoIterator<Item = &'a CellResult>,
    axis: SweptAxis,
    column: Column,
) -> Result<RateFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = cells
        .into_iter()
        .filter_map(|c| column.value(c).map(|y| (axis.value(c), y)))
        .unzip();
    fit_power_law(&xs, &ys, axis)
}

/// Across-trial sample standard deviation of the vertex-0 estimator for each
/// N at the given ε, in increasing N.
pub fn anchor_spread_by_n(result: &ExperimentResult, epsilon: f64) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = result.cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .filter_map(|n| {
            let v: Vec<f64> = result
                .cells
                .iter()
                .filter(|c| c.n == n && c.epsilon.to_bits() == epsilon.to_bits())
                .filter_map(|c| c.stats().map(|s| s.anchor_estimate))
                .collect();
            if v.len() < 2 {
                return None;
            }
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            Some((n, var.sqrt()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_laws() {
        let xs = [1.0, 2.0, 4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.sqrt()).collect();
        let fit = fit_power_law(&xs, &ys, SweptAxis::Epsilon).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let ys: Vec<f64> = xs.iter().map(|x| 7.0 / x).collect();
        let fit = fit_power_law(&xs, &ys, SweptAxis::N).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0], SweptAxis::N).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, -1.0, 2.0], SweptAxis::N).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 2.0, 1.0], &[1.0, 2.0, 3.0, 4.0], SweptAxis::N).is_err());
        assert!(Column::parse("nope").is_err());
        assert_eq!(Column::parse("err_abs_max").unwrap(), Column::ErrAbsMax);
    }

    proptest! {
        #[test]
        fn fit_is_order_independent(
            pts in prop::collection::vec((1.0f64..1e4, 1e-6f64..1e3), 3..30),
            seed in any::<u64>(),
        ) {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            prop_assume!({ let mut d = xs.clone(); d.sort_by(f64::total_cmp); d.dedup(); d.len() >= 3 });
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let a = fit_power_law(&xs, &ys, SweptAxis::N).unwrap();
            let mut idx: Vec<usize> = (0..pts.len()).collect();
            idx.rotate_left((seed % pts.len() as u64) as usize);
            idx.reverse();
            let xs2: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
            let ys2: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
            let b = fit_power_law(&xs2, &ys2, SweptAxis::N).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
