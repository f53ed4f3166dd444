//! Canonical compact manifolds without boundary, with uniform samplers and
//! closed-form Laplace–Beltrami test functions.
//!
//! | id | embedding | m | n | volume | scalar curvature |
//! |----|-----------|---|---|--------|------------------|
//! | `circle` | `(cos θ, sin θ)` | 1 | 2 | 2π | 0 |
//! | `sphere` | unit sphere | 2 | 3 | 4π | 2 |
//! | `torus` | `(cos θ, sin θ, cos φ, sin φ)` | 2 | 4 | 4π² | 0 |
//!
//! Random samplers draw from ChaCha8 seeded with `seed_from_u64`: the circle
//! and torus use uniform angles, the sphere normalizes a standard Gaussian
//! vector in `R^3`. The Laplace–Beltrami operator uses the `div ∘ grad` sign
//! convention, so its spectrum is nonpositive (`Δ sin θ = -sin θ` on the
//! circle). The scalar curvature of the circle is taken to be 0.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::calculus::VertexFunction;
use crate::error::{Error, Result};
use crate::graph::PointCloud;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Manifold {
    Circle,
    Sphere,
    FlatTorus,
}

/// A smooth function on a manifold paired with its Laplace–Beltrami image.
pub struct TestFunction {
    pub id: &'static str,
    pub description: &'static str,
    pub eval: fn(&[f64]) -> f64,
    pub laplace_beltrami: fn(&[f64]) -> f64,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("id", &self.id).finish()
    }
}

const fn tf(
    id: &'static str,
    description: &'static str,
    eval: fn(&[f64]) -> f64,
    laplace_beltrami: fn(&[f64]) -> f64,
) -> TestFunction {
    TestFunction {
        id,
        description,
        eval,
        laplace_beltrami,
    }
}

static CIRCLE_FUNCTIONS: [TestFunction; 5] = [
    tf("const", "1", |_| 1.0, |_| 0.0),
    tf("sin_theta", "sin θ", |p| p[1], |p| -p[1]),
    tf("cos_theta", "cos θ", |p| p[0], |p| -p[0]),
    tf("sin_2theta", "sin 2θ", |p| 2.0 * p[0] * p[1], |p| -8.0 * p[0] * p[1]),
    tf(
        "sin_3theta",
        "sin 3θ",
        |p| 3.0 * p[1] - 4.0 * p[1].powi(3),
        |p| -9.0 * (3.0 * p[1] - 4.0 * p[1].powi(3)),
    ),
];

// spherical harmonics: Δ Y_l = -l(l+1) Y_l
static SPHERE_FUNCTIONS: [TestFunction; 5] = [
    tf("const", "1", |_| 1.0, |_| 0.0),
    tf("z", "z (l = 1)", |p| p[2], |p| -2.0 * p[2]),
    tf("x", "x (l = 1)", |p| p[0], |p| -2.0 * p[0]),
    tf("xy", "xy (l = 2)", |p| p[0] * p[1], |p| -6.0 * p[0] * p[1]),
    tf(
        "z2_minus_third",
        "z² - 1/3 (l = 2)",
        |p| p[2] * p[2] - 1.0 / 3.0,
        |p| -6.0 * (p[2] * p[2] - 1.0 / 3.0),
    ),
];

// flat metric: Δ = ∂²_θ + ∂²_φ
static TORUS_FUNCTIONS: [TestFunction; 5] = [
    tf("const", "1", |_| 1.0, |_| 0.0),
    tf("sin_theta", "sin θ", |p| p[1], |p| -p[1]),
    tf("sin_phi", "sin φ", |p| p[3], |p| -p[3]),
    tf(
        "sin_theta_cos_phi",
        "sin θ cos φ",
        |p| p[1] * p[2],
        |p| -2.0 * p[1] * p[2],
    ),
    tf(
        "cos_2theta",
        "cos 2θ",
        |p| p[0] * p[0] - p[1] * p[1],
        |p| -4.0 * (p[0] * p[0] - p[1] * p[1]),
    ),
];

impl Manifold {
    pub const ALL: [Manifold; 3] = [Manifold::Circle, Manifold::Sphere, Manifold::FlatTorus];

    pub fn id(self) -> &'static str {
        match self {
            Manifold::Circle => "circle",
            Manifold::Sphere => "sphere",
            Manifold::FlatTorus => "torus",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.id() == id)
            .ok_or_else(|| Error::UnknownManifold {
                id: id.to_string(),
                valid: Self::ALL.map(Manifold::id).join(", "),
            })
    }

    pub fn intrinsic_dim(self) -> usize {
        match self {
            Manifold::Circle => 1,
            Manifold::Sphere | Manifold::FlatTorus => 2,
        }
    }

    pub fn ambient_dim(self) -> usize {
        match self {
            Manifold::Circle => 2,
            Manifold::Sphere => 3,
            Manifold::FlatTorus => 4,
        }
    }

    pub fn volume(self) -> f64 {
        match self {
            Manifold::Circle => TAU,
            Manifold::Sphere => 4.0 * PI,
            Manifold::FlatTorus => TAU * TAU,
        }
    }

    pub fn scalar_curvature(self, _point: &[f64]) -> f64 {
        match self {
            Manifold::Sphere => 2.0,
            Manifold::Circle | Manifold::FlatTorus => 0.0,
        }
    }

    /// Degree-expansion correction `E(u) = S(u) / 3`.
    pub fn e_of(self, point: &[f64]) -> f64 {
        self.scalar_curvature(point) / 3.0
    }

    pub fn functions(self) -> &'static [TestFunction] {
        match self {
            Manifold::Circle => &CIRCLE_FUNCTIONS,
            Manifold::Sphere => &SPHERE_FUNCTIONS,
            Manifold::FlatTorus => &TORUS_FUNCTIONS,
        }
    }

    pub fn function(self, id: &str) -> Result<&'static TestFunction> {
        self.functions()
            .iter()
            .find(|f| f.id == id)
            .ok_or_else(|| Error::UnknownFunction {
                id: id.to_string(),
                manifold: self.id().to_string(),
                valid: self
                    .functions()
                    .iter()
                    .map(|f| f.id)
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }

    /// Distance of `point` from the manifold, measured through the defining
    /// equations (`|‖x‖ - 1|` per unit-circle factor).
    pub fn residual(self, point: &[f64]) -> f64 {
        let unit = |a: f64, b: f64| ((a * a + b * b).sqrt() - 1.0).abs();
        match self {
            Manifold::Circle => unit(point[0], point[1]),
            Manifold::Sphere => (point.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs(),
            Manifold::FlatTorus => unit(point[0], point[1]).max(unit(point[2], point[3])),
        }
    }

    /// Fixed reference point where a vertex can be pinned across seeds.
    pub fn anchor_point(self) -> Vec<f64> {
        match self {
            Manifold::Circle => vec![0.0, 1.0],
            Manifold::Sphere => vec![0.0, 0.0, 1.0],
            Manifold::FlatTorus => vec![0.0, 1.0, 1.0, 0.0],
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        match self {
            Manifold::Circle => {
                let t = rng.random::<f64>() * TAU;
                out.extend([t.cos(), t.sin()]);
            }
            Manifold::Sphere => loop {
                let g: [f64; 3] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                if norm > 1e-12 {
                    out.extend(g.map(|x| x / norm));
                    break;
                }
            },
            Manifold::FlatTorus => {
                let t = rng.random::<f64>() * TAU;
                let p = rng.random::<f64>() * TAU;
                out.extend([t.cos(), t.sin(), p.cos(), p.sin()]);
            }
        }
    }

    /// `n` i.i.d. uniform points; deterministic in `(self, n, seed)`.
    pub fn sample(self, n: usize, seed: u64) -> Result<PointCloud> {
        self.sample_with(n, seed, false)
    }

    /// Like [`Manifold::sample`], but vertex 0 is fixed at
    /// [`Manifold::anchor_point`] and the other `n - 1` points are i.i.d.
    pub fn sample_anchored(self, n: usize, seed: u64) -> Result<PointCloud> {
        self.sample_with(n, seed, true)
    }

    fn sample_with(self, n: usize, seed: u64, anchored: bool) -> Result<PointCloud> {
        if n < 2 {
            return Err(Error::InvalidCloud(format!("need at least 2 points, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = Vec::with_capacity(n * self.ambient_dim());
        let mut remaining = n;
        if anchored {
            coords.extend(self.anchor_point());
            remaining -= 1;
        }
        for _ in 0..remaining {
            self.draw(&mut rng, &mut coords);
        }
        PointCloud::from_flat(coords, self.ambient_dim())
    }

    /// Deterministic equispaced points: angles `2πk/N` on the circle, a
    /// `⌈√N⌉ x ⌈√N⌉` angle grid on the torus, and a golden-angle (Fibonacci)
    /// lattice on the sphere.
    pub fn grid_sample(self, n: usize) -> Result<PointCloud> {
        if n < 2 {
            return Err(Error::InvalidCloud(format!("need at least 2 points, got {n}")));
        }
        let mut coords = Vec::new();
        match self {
            Manifold::Circle => {
                for k in 0..n {
                    let t = TAU * k as f64 / n as f64;
                    coords.extend([t.cos(), t.sin()]);
                }
            }
            Manifold::FlatTorus => {
                let side = (n as f64).sqrt().ceil() as usize;
                let side = if side * side < n { side + 1 } else { side };
                for i in 0..side {
                    let t = TAU * i as f64 / side as f64;
                    for j in 0..side {
                        let p = TAU * j as f64 / side as f64;
                        coords.extend([t.cos(), t.sin(), p.cos(), p.sin()]);
                    }
                }
            }
            Manifold::Sphere => {
                let golden = PI * (3.0 - 5f64.sqrt());
                for k in 0..n {
                    let z = 1.0 - (2 * k + 1) as f64 / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64;
                    coords.extend([r * phi.cos(), r * phi.sin(), z]);
                }
            }
        }
        PointCloud::from_flat(coords, self.ambient_dim())
    }

    pub fn descriptor(self) -> ManifoldInfo {
        ManifoldInfo {
            id: self.id(),
            intrinsic_dim: self.intrinsic_dim(),
            ambient_dim: self.ambient_dim(),
            volume: self.volume(),
            scalar_curvature: self.scalar_curvature(&self.anchor_point()),
            functions: self.functions().iter().map(|f| f.id).collect(),
        }
    }
}

/// Serializable registry entry.
#[derive(Clone, Debug, Serialize)]
pub struct ManifoldInfo {
    pub id: &'static str,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
    pub volume: f64,
    pub scalar_curvature: f64,
    pub functions: Vec<&'static str>,
}

/// `(f, Δ_M f)` evaluated at every point of `cloud`.
pub fn eval_pair(
    manifold: Manifold,
    fn_id: &str,
    cloud: &PointCloud,
) -> Result<(VertexFunction, VertexFunction)> {
    let tf = manifold.function(fn_id)?;
    if cloud.dim() != manifold.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: manifold.ambient_dim(),
            found: cloud.dim(),
        });
    }
    let f = cloud.iter().map(tf.eval).collect();
    let lap = cloud.iter().map(tf.laplace_beltrami).collect();
    Ok((VertexFunction::new(f)?, VertexFunction::new(lap)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_weights, degrees, KernelConfig};

    #[test]
    fn samples_lie_on_manifold() {
        for m in Manifold::ALL {
            for cloud in [m.sample(2000, 7).unwrap(), m.grid_sample(500).unwrap(), m.sample_anchored(50, 1).unwrap()] {
                assert_eq!(cloud.dim(), m.ambient_dim());
                for p in cloud.iter() {
                    assert!(m.residual(p) <= 1e-12, "{} {:?}", m.id(), p);
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        for m in Manifold::ALL {
            assert_eq!(m.sample(100, 42).unwrap(), m.sample(100, 42).unwrap());
            assert_ne!(m.sample(100, 42).unwrap(), m.sample(100, 43).unwrap());
        }
    }

    #[test]
    fn sphere_z_mean_within_four_sigma() {
        let n = 10_000;
        let cloud = Manifold::Sphere.sample(n, 2024).unwrap();
        let mean = cloud.iter().map(|p| p[2]).sum::<f64>() / n as f64;
        assert!(mean.abs() <= 4.0 / (3.0 * n as f64).sqrt(), "mean z = {mean}");
    }

    fn ks_uniform(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
            .fold(0.0, f64::max)
    }

    #[test]
    fn circle_angles_pass_ks_at_one_in_a_thousand() {
        let n = 10_000;
        // asymptotic Kolmogorov critical value at alpha = 0.001
        let critical = 1.9495 / (n as f64).sqrt();
        for seed in 0..50 {
            let cloud = Manifold::Circle.sample(n, seed).unwrap();
            let u: Vec<f64> = cloud
                .iter()
                .map(|p| p[1].atan2(p[0]).rem_euclid(TAU) / TAU)
                .collect();
            let d = ks_uniform(u);
            assert!(d < critical, "seed {seed}: D = {d}");
        }
    }

    #[test]
    fn circle_grid_four_points() {
        let c = Manifold::Circle.grid_sample(4).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in c.iter().zip(expect) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn torus_grid_shape() {
        assert_eq!(Manifold::FlatTorus.grid_sample(9).unwrap().len(), 9);
        assert_eq!(Manifold::FlatTorus.grid_sample(10).unwrap().len(), 16);
    }

    #[test]
    fn circle_grid_degrees_are_equal() {
        let cloud = Manifold::Circle.grid_sample(1000).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(0.01).unwrap()).unwrap();
        let d = degrees(&w);
        let (lo, hi) = d
            .values()
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        assert!((hi - lo) / hi <= 1e-10);
    }

    #[test]
    fn closed_form_pairs() {
        let c = Manifold::Circle.sample(50, 3).unwrap();
        let (f, lap) = eval_pair(Manifold::Circle, "sin_2theta", &c).unwrap();
        for (i, p) in c.iter().enumerate() {
            let t = p[1].atan2(p[0]);
            assert!((f.get(i) - (2.0 * t).sin()).abs() < 1e-12);
            assert!((lap.get(i) + 4.0 * (2.0 * t).sin()).abs() < 1e-12);
        }
        let s = Manifold::Sphere.sample(50, 3).unwrap();
        let (f, lap) = eval_pair(Manifold::Sphere, "z", &s).unwrap();
        for i in 0..50 {
            assert_eq!(lap.get(i), -2.0 * f.get(i));
        }
        let t = Manifold::FlatTorus.sample(50, 3).unwrap();
        let (f, lap) = eval_pair(Manifold::FlatTorus, "sin_theta", &t).unwrap();
        assert_eq!(f.values().iter().map(|x| -x).collect::<Vec<_>>(), lap.values());
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let err = Manifold::from_id("klein").unwrap_err().to_string();
        assert!(err.contains("klein") && err.contains("circle, sphere, torus"));
        let c = Manifold::Circle.sample(5, 0).unwrap();
        assert!(matches!(eval_pair(Manifold::Circle, "z", &c), Err(Error::UnknownFunction { .. })));
        assert!(Manifold::Sphere.sample(1, 0).is_err());
    }

    #[test]
    fn anchored_sample_pins_vertex_zero() {
        for m in Manifold::ALL {
            let a = m.sample_anchored(10, 5).unwrap();
            let b = m.sample_anchored(10, 6).unwrap();
            assert_eq!(a.point(0), b.point(0));
            assert_eq!(a.point(0), m.anchor_point().as_slice());
        }
    }
}
