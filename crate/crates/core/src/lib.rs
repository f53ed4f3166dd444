//! Discrete calculus on Gaussian-kernel graphs built from sampled manifolds.
//!
//! The crate is organised bottom-up:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | point clouds, Gaussian weights `w(u,v) = exp(-|u-v|^2 / 2ε)`, degrees |
//! | [`calculus`] | edge gradient, divergence, normalized Laplacian, inner products |
//! | [`spectral`] | eigen-decomposition of `Id - D^{-1/2} W D^{-1/2}` |
//! | [`manifold`] | circle, sphere and flat torus samplers with closed-form Laplace–Beltrami test functions |
//! | [`lab`] | pointwise convergence checks of `(2/ε)Δf` against `Δ_M f`, degree asymptotics, sweeps and rate fits |
//! | [`verify`] | randomized checks of the exact operator identities |
//! | [`io`] | CSV import/export and atomic file writes |
//! | [`plot`] | per-group series extraction from result tables |
//!
//! Sign convention: [`calculus::laplacian_apply`] computes `Δ = D^{-1/2} W D^{-1/2} - Id`,
//! which is negative semidefinite. The positive semidefinite `L = Id - D^{-1/2} W D^{-1/2}`
//! is available as [`calculus::normalized_laplacian_matrix`].
//!
//! ```
//! use graph_calculus::graph::{build_weights, degrees, KernelConfig, PointCloud};
//! use graph_calculus::calculus::{laplacian_apply, VertexFunction};
//!
//! let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
//! let w = build_weights(&cloud, &KernelConfig::dense(1.0).unwrap()).unwrap();
//! let d = degrees(&w);
//! let sqrt_d = VertexFunction::new(d.values().iter().map(|x| x.sqrt()).collect()).unwrap();
//! let lap = laplacian_apply(&sqrt_d, &w, &d).unwrap();
//! assert!(lap.values().iter().all(|x| x.abs() < 1e-12));
//! ```

pub mod calculus;
pub mod error;
pub mod graph;
pub mod io;
pub mod lab;
pub mod manifold;
pub mod plot;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
