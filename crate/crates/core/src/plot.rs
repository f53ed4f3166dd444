//! Reshapes a results table into per-group `(x, y)` series for external
//! plotting tools.

use crate::error::{Error, Result};
use crate::lab::{fit_power_law, RateFit, SweptAxis, Table};

#[derive(Clone, Debug)]
pub struct Series {
    /// Value of the group-by column, as written in the table.
    pub group: String,
    /// Points sorted by x (stable with respect to table order).
    pub points: Vec<(f64, f64)>,
    /// Log–log slope, when the series admits one.
    pub fit: Option<RateFit>,
}

fn parse_cell(table: &Table, row: usize, col: usize) -> Result<f64> {
    let raw = &table.rows[row][col];
    raw.parse::<f64>().map_err(|e| Error::Parse {
        path: "results table".into(),
        line: row + 2,
        msg: format!("column '{}': '{raw}': {e}", table.header[col]),
    })
}

/// Groups rows by `group_by`, in order of first appearance, and extracts
/// `(x, y)` pairs. Rows with a non-finite `y` (failed cells) are skipped.
pub fn plot_series(table: &Table, x: &str, y: &str, group_by: &str) -> Result<Vec<Series>> {
    let xi = table.column_index(x)?;
    let yi = table.column_index(y)?;
    let gi = table.column_index(group_by)?;
    let axis = if x == "epsilon" { SweptAxis::Epsilon } else { SweptAxis::N };
    let mut series: Vec<Series> = Vec::new();
    for r in 0..table.rows.len() {
        let xv = parse_cell(table, r, xi)?;
        let yv = parse_cell(table, r, yi)?;
        if !yv.is_finite() {
            continue;
        }
        let group = &table.rows[r][gi];
        match series.iter_mut().find(|s| &s.group == group) {
            Some(s) => s.points.push((xv, yv)),
            None => series.push(Series {
                group: group.clone(),
                points: vec![(xv, yv)],
                fit: None,
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (xs, ys): (Vec<f64>, Vec<f64>) = s.points.iter().copied().unzip();
        s.fit = fit_power_law(&xs, &ys, axis).ok();
    }
    Ok(series)
}
