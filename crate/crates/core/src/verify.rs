//! Randomized checks of the exact operator identities: antisymmetry of the
//! gradient, adjointness of gradient and divergence, `∇*∇ = Δ`, the null
//! vector `sqrt(d)`, the Dirichlet identity, linearity and the spectral range
//! of `Id - D^{-1/2} W D^{-1/2}`.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::calculus::{
    divergence, edge_norm_squared, gradient, inner_edge, inner_vertex, laplacian_apply,
    laplacian_matrix, EdgeField, VertexFunction,
};
use crate::error::{Error, Result};
use crate::graph::{build_weights, degrees, KernelConfig, PointCloud, WeightMatrix};
use crate::spectral::normalized_spectrum;

pub const ANTISYMMETRY_TOL: f64 = 1e-14;
pub const ADJOINTNESS_TOL: f64 = 1e-10;
pub const FACTORIZATION_TOL: f64 = 1e-12;
pub const NULL_VECTOR_TOL: f64 = 1e-12;
pub const DIRICHLET_TOL: f64 = 1e-10;
pub const LINEARITY_TOL: f64 = 1e-12;
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Largest N the suite accepts (everything is dense).
pub const MAX_VERIFY_N: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantResult {
    pub name: &'static str,
    /// Worst residual observed.
    pub worst: f64,
    pub tolerance: f64,
}

impl InvariantResult {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub results: Vec<InvariantResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(InvariantResult::passed)
    }

    /// Folds another report in, keeping the worst residual per invariant.
    pub fn merge(&mut self, other: Vec<InvariantResult>) {
        for r in other {
            match self.results.iter_mut().find(|x| x.name == r.name) {
                Some(x) => x.worst = x.worst.max(r.worst),
                None => self.results.push(r),
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub n: usize,
    pub seeds: usize,
    pub master_seed: u64,
    /// Overwrite `W[0][1]` (but not `W[1][0]`) before checking.
    pub inject_asymmetry: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n: 100,
            seeds: 5,
            master_seed: 0,
            inject_asymmetry: false,
        }
    }
}

/// Random Gaussian cloud of `n` points in `R^dim`.
pub fn random_cloud(n: usize, dim: usize, rng: &mut impl Rng) -> Result<PointCloud> {
    PointCloud::from_flat((0..n * dim).map(|_| rng.sample(StandardNormal)).collect(), dim)
}

fn random_vertex(n: usize, rng: &mut impl Rng) -> VertexFunction {
    VertexFunction::new((0..n).map(|_| rng.sample(StandardNormal)).collect()).expect("finite")
}

fn random_field(w: &WeightMatrix, rng: &mut impl Rng) -> EdgeField {
    let n = w.n();
    let vals: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    EdgeField::from_fn(w, |u, v| vals[u * n + v])
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Matrix of `f -> ∇*(∇f)`, assembled column by column from basis vectors.
pub fn div_grad_matrix(w: &WeightMatrix, d: &crate::graph::DegreeVector) -> Result<Array2<f64>> {
    let n = w.n();
    let mut m = Array2::zeros((n, n));
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = divergence(&gradient(&VertexFunction::new(e)?, w, d)?, w, d)?;
        for (i, &x) in col.values().iter().enumerate() {
            m[[i, j]] = x;
        }
    }
    Ok(m)
}

/// Runs every invariant on one cloud.
pub fn check_cloud(
    cloud: &PointCloud,
    epsilon: f64,
    rng: &mut impl Rng,
    inject_asymmetry: bool,
) -> Result<Vec<InvariantResult>> {
    let n = cloud.len();
    let mut w = build_weights(cloud, &KernelConfig::dense(epsilon)?)?;
    if inject_asymmetry {
        let v = w.get(0, 1);
        w.corrupt_entry(0, 1, v + 0.5);
    }
    let d = degrees(&w);
    let f = random_vertex(n, rng);
    let g = random_vertex(n, rng);
    let field = random_field(&w, rng);
    let field2 = random_field(&w, rng);

    let grad = gradient(&f, &w, &d)?;

    let lhs = inner_edge(&grad, &field)?;
    let rhs = -inner_vertex(&f, &divergence(&field, &w, &d)?)?;
    let scale = (edge_norm_squared(&grad) * edge_norm_squared(&field)).sqrt().max(f64::MIN_POSITIVE);
    let adjointness = (lhs - rhs).abs() / scale;

    let lap_m = laplacian_matrix(&w, &d)?;
    let factorization = max_abs_diff(
        div_grad_matrix(&w, &d)?.as_slice().expect("standard layout"),
        lap_m.as_slice().expect("standard layout"),
    );
    let lap_f = laplacian_apply(&f, &w, &d)?;
    let mat_f = lap_m.dot(&ndarray::Array1::from(f.values().to_vec()));
    let apply_vs_matrix =
        max_abs_diff(lap_f.values(), mat_f.as_slice().expect("contiguous")) / max_abs(lap_f.values()).max(1.0);

    let sqrt_d = VertexFunction::new(d.values().iter().map(|x| x.sqrt()).collect())?;
    let null_vector = max_abs(laplacian_apply(&sqrt_d, &w, &d)?.values());

    let energy = edge_norm_squared(&grad);
    let quad = -inner_vertex(&f, &lap_f)?;
    // |<f, Lf>| <= 2 |f|^2, so |f|^2 keeps the ratio meaningful when both sides vanish.
    let dirichlet = (energy - quad).abs() / energy.abs().max(quad.abs()).max(inner_vertex(&f, &f)?);

    let (a, b) = (1.7, -0.6);
    let comb = VertexFunction::new(f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect())?;
    let grad_g = gradient(&g, &w, &d)?;
    let grad_lin = gradient(&comb, &w, &d)?.axpby(1.0, &grad.axpby(a, &grad_g, b)?, -1.0)?;
    let grad_scale = edge_norm_squared(&grad).max(edge_norm_squared(&grad_g)).sqrt().max(1.0);
    let mut linearity = max_abs(grad_lin.to_dense().as_slice().expect("standard layout")) / grad_scale;
    let lap_comb = laplacian_apply(&comb, &w, &d)?;
    let lap_g = laplacian_apply(&g, &w, &d)?;
    let expected: Vec<f64> = lap_f.values().iter().zip(lap_g.values()).map(|(x, y)| a * x + b * y).collect();
    linearity = linearity.max(max_abs_diff(lap_comb.values(), &expected) / max_abs(&expected).max(1.0));
    let div_comb = divergence(&field.axpby(a, &field2, b)?, &w, &d)?;
    let div1 = divergence(&field, &w, &d)?;
    let div2 = divergence(&field2, &w, &d)?;
    let expected: Vec<f64> = div1.values().iter().zip(div2.values()).map(|(x, y)| a * x + b * y).collect();
    linearity = linearity.max(max_abs_diff(div_comb.values(), &expected) / max_abs(&expected).max(1.0));

    let spectrum = normalized_spectrum(&w, &d)?;
    let lo = spectrum.values[0];
    let hi = *spectrum.values.last().expect("n >= 2");
    let spectral_range = (-lo).max(hi - 2.0).max(0.0);
    let spectral_null = lo
        .abs()
        .max(1.0 - spectrum.null_space_cosine(sqrt_d.values(), SPECTRAL_TOL));

    Ok(vec![
        InvariantResult {
            name: "gradient antisymmetry",
            worst: grad.max_antisymmetry_defect(),
            tolerance: ANTISYMMETRY_TOL,
        },
        InvariantResult {
            name: "adjointness <grad f, F> = -<f, div F>",
            worst: adjointness,
            tolerance: ADJOINTNESS_TOL,
        },
        InvariantResult {
            name: "factorization div(grad) = D^-1/2 W D^-1/2 - I",
            worst: factorization,
            tolerance: FACTORIZATION_TOL,
        },
        InvariantResult {
            name: "laplacian_apply = laplacian_matrix * f",
            worst: apply_vs_matrix,
            tolerance: FACTORIZATION_TOL,
        },
        InvariantResult {
            name: "null vector laplacian(sqrt d) = 0",
            worst: null_vector,
            tolerance: NULL_VECTOR_TOL,
        },
        InvariantResult {
            name: "dirichlet identity",
            worst: dirichlet,
            tolerance: DIRICHLET_TOL,
        },
        InvariantResult {
            name: "linearity",
            worst: linearity,
            tolerance: LINEARITY_TOL,
        },
        InvariantResult {
            name: "spectral range [0, 2]",
            worst: spectral_range,
            tolerance: SPECTRAL_TOL,
        },
        InvariantResult {
            name: "spectral null pair (0, sqrt d)",
            worst: spectral_null,
            tolerance: SPECTRAL_TOL,
        },
    ])
}

/// The full suite over `seeds` random clouds of size `n`; ambient dimension
/// cycles through 2, 3, 4 and ε alternates between 0.1 and 1.
pub fn verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.n < 2 || cfg.n > MAX_VERIFY_N {
        return Err(Error::InvalidCloud(format!(
            "verify needs 2 <= N <= {MAX_VERIFY_N}, got {}",
            cfg.n
        )));
    }
    if cfg.seeds == 0 {
        return Err(Error::InvalidSpec("seeds must be >= 1".into()));
    }
    let mut report = VerifyReport::default();
    for s in 0..cfg.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed.wrapping_add(s as u64));
        let dim = 2 + s % 3;
        let eps = if s % 2 == 0 { 0.1 } else { 1.0 };
        let cloud = random_cloud(cfg.n, dim, &mut rng)?;
        report.merge(check_cloud(&cloud, eps, &mut rng, cfg.inject_asymmetry)?);
    }
    Ok(report)
}
