//! Empirical verification of the pointwise convergence
//! `(1/ε) Δf(u) -> ½ Δ_M f(u)` and of the degree expansion
//! `d(u) ≈ (N-1)(2πε)^{m/2}/vol(M) [1 + ε S(u)/6]` on the manifolds of
//! [`crate::manifold`].
//!
//! Errors are reported in two regimes: grid sampling removes Monte Carlo
//! noise and exposes the kernel-bandwidth bias, seed ensembles expose the
//! sampling fluctuation.

mod check;
mod output;
mod rate;
mod spec;
mod sweep;

pub use check::{
    degree_check, degree_stats, lemma_check, CellConfig, DegreeReport, LemmaReport, Regime,
};
pub use output::{read_table, results_csv, summarize, Summary, Table, RESULTS_HEADER};
pub use rate::{anchor_spread_by_n, fit_power_law, fit_rate, Column, RateFit, SweptAxis};
pub use spec::{ExperimentSpec, ModeKind, ResolvedSpec, Sampling, Statistic, StorageMode};
pub use sweep::{cell_seed, sweep, CellResult, CellStats, ExperimentResult};
