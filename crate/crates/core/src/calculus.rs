//! Gradient, divergence and Laplacian on the weighted graph.
//!
//! With `g(u) = f(u) / sqrt(d(u))` the edge derivative reads
//! `∇f(u,v) = sqrt(w(u,v)/2) (g(v) - g(u))`, and
//!
//! ```text
//! ∇f(u,v)     = sqrt(w/2d(v)) f(v) - sqrt(w/2d(u)) f(u)
//! [∇*F](u)    = Σ_v sqrt(w/2d(u)) (F(u,v) - F(v,u))
//! Δf(u)       = ∇*∇f(u) = Σ_v w/sqrt(d(u)d(v)) f(v) - f(u)
//! ```
//!
//! The adjoint relation is `<∇f, F>_E = -<f, ∇*F>_V`, with the edge sum taken
//! over all ordered pairs.
//!
//! Note the gradient of a constant is *not* zero unless degrees are equal:
//! the derivative is built from `f / sqrt(d)`.

use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DegreeVector, SparsePattern, WeightMatrix};

/// A real function on the vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, u: usize) -> f64 {
        self.values[u]
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(crate::io::read_vector(path.as_ref())?)
    }
}

#[derive(Clone, Debug)]
enum EdgeStorage {
    Dense(Array2<f64>),
    Sparse {
        pattern: Arc<SparsePattern>,
        values: Vec<f64>,
    },
}

/// A real field on ordered edges, `F(u,v)` for the edge `u -> v`.
///
/// Sparse fields share the sparsity pattern of the weight matrix they were
/// built against; entries outside the pattern are zero by definition.
#[derive(Clone, Debug)]
pub struct EdgeField {
    n: usize,
    storage: EdgeStorage,
}

impl EdgeField {
    /// Dense N x N field.
    pub fn dense(values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: c,
            });
        }
        if let Some(index) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self {
            n: r,
            storage: EdgeStorage::Dense(values.as_standard_layout().into_owned()),
        })
    }

    /// Field laid out like `weights`, with `F(u,v) = f(u, v)` on every stored edge.
    pub fn from_fn(weights: &WeightMatrix, f: impl Fn(usize, usize) -> f64) -> Self {
        let n = weights.n();
        let storage = match weights.pattern() {
            None => EdgeStorage::Dense(Array2::from_shape_fn((n, n), |(u, v)| f(u, v))),
            Some(p) => {
                let mut values = Vec::with_capacity(p.nnz());
                for u in 0..n {
                    for k in p.row_range(u) {
                        values.push(f(u, p.col(k)));
                    }
                }
                EdgeStorage::Sparse {
                    pattern: Arc::clone(p),
                    values,
                }
            }
        };
        Self { n, storage }
    }

    /// Copies the entries of `self` onto the layout of `weights`, dropping
    /// entries outside its pattern.
    pub fn restrict_to(&self, weights: &WeightMatrix) -> Result<Self> {
        if self.n != weights.n() {
            return Err(Error::DimensionMismatch {
                expected: weights.n(),
                found: self.n,
            });
        }
        Ok(Self::from_fn(weights, |u, v| self.get(u, v)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, EdgeStorage::Sparse { .. })
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        match &self.storage {
            EdgeStorage::Dense(m) => m[[u, v]],
            EdgeStorage::Sparse { pattern, values } => {
                pattern.find(u, v).map(|k| values[k]).unwrap_or(0.0)
            }
        }
    }

    /// Sum of `g(value)` over all stored ordered edges.
    fn sum_map(&self, g: impl Fn(f64) -> f64) -> f64 {
        match &self.storage {
            EdgeStorage::Dense(m) => m.iter().map(|&x| g(x)).sum(),
            EdgeStorage::Sparse { values, .. } => values.iter().map(|&x| g(x)).sum(),
        }
    }

    /// Stored values of row `u` as `(v, F(u,v))`.
    pub fn row(&self, u: usize) -> Vec<(usize, f64)> {
        match &self.storage {
            EdgeStorage::Dense(m) => m.row(u).iter().copied().enumerate().collect(),
            EdgeStorage::Sparse { pattern, values } => pattern
                .row_range(u)
                .map(|k| (pattern.col(k), values[k]))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            EdgeStorage::Dense(m) => m.clone(),
            EdgeStorage::Sparse { pattern, values } => {
                let mut m = Array2::zeros((self.n, self.n));
                for u in 0..self.n {
                    for k in pattern.row_range(u) {
                        m[[u, pattern.col(k)]] = values[k];
                    }
                }
                m
            }
        }
    }

    /// Largest `|F(u,v) + F(v,u)|`; zero for an antisymmetric field.
    pub fn max_antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        match &self.storage {
            EdgeStorage::Dense(m) => {
                for u in 0..self.n {
                    for v in 0..=u {
                        worst = worst.max((m[[u, v]] + m[[v, u]]).abs());
                    }
                }
            }
            EdgeStorage::Sparse { pattern, values } => {
                for k in 0..values.len() {
                    worst = worst.max((values[k] + values[pattern.mirror(k)]).abs());
                }
            }
        }
        worst
    }

    /// Entrywise linear combination `a*self + b*other`; layouts must match.
    pub fn axpby(&self, a: f64, other: &EdgeField, b: f64) -> Result<EdgeField> {
        let storage = match (&self.storage, &other.storage) {
            (EdgeStorage::Dense(x), EdgeStorage::Dense(y)) if x.dim() == y.dim() => {
                EdgeStorage::Dense(x * a + y * b)
            }
            (
                EdgeStorage::Sparse { pattern, values: x },
                EdgeStorage::Sparse {
                    pattern: q,
                    values: y,
                },
            ) if Arc::ptr_eq(pattern, q) || pattern == q => EdgeStorage::Sparse {
                pattern: Arc::clone(pattern),
                values: x.iter().zip(y).map(|(x, y)| a * x + b * y).collect(),
            },
            _ => return Err(Error::PatternMismatch),
        };
        Ok(EdgeField { n: self.n, storage })
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let rows = crate::io::read_numeric_rows(path.as_ref())?;
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::dense(Array2::from_shape_vec((n, n), flat).expect("square shape checked"))
    }
}

fn check_vertex(f: &VertexFunction, w: &WeightMatrix) -> Result<()> {
    if f.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: f.len(),
        });
    }
    Ok(())
}

fn check_degrees(d: &DegreeVector, w: &WeightMatrix) -> Result<()> {
    if d.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: d.len(),
        });
    }
    if let Some((index, &value)) = d
        .values()
        .iter()
        .enumerate()
        .find(|(_, &x)| !(x > 0.0 && x.is_finite()))
    {
        return Err(Error::NonPositiveDegree { index, value });
    }
    Ok(())
}

fn check_field(field: &EdgeField, w: &WeightMatrix) -> Result<()> {
    if field.n != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: field.n,
        });
    }
    match (&field.storage, w.pattern()) {
        (EdgeStorage::Dense(_), None) => Ok(()),
        (EdgeStorage::Sparse { pattern, .. }, Some(p)) if Arc::ptr_eq(pattern, p) || **pattern == **p => {
            Ok(())
        }
        _ => Err(Error::PatternMismatch),
    }
}

/// Edge gradient `∇f(u,v) = sqrt(w(u,v)/2d(v)) f(v) - sqrt(w(u,v)/2d(u)) f(u)`
/// on every stored ordered edge.
///
/// Both terms are evaluated with the same expression in either orientation,
/// so `∇f(u,v) = -∇f(v,u)` holds exactly and `∇f(u,u) = 0`.
pub fn gradient(f: &VertexFunction, w: &WeightMatrix, d: &DegreeVector) -> Result<EdgeField> {
    check_vertex(f, w)?;
    check_degrees(d, w)?;
    let fv = f.values();
    let dv = d.values();
    let edge = |u: usize, v: usize, wuv: f64| {
        (wuv / (2.0 * dv[v])).sqrt() * fv[v] - (wuv / (2.0 * dv[u])).sqrt() * fv[u]
    };
    let n = w.n();
    let storage = match w.pattern() {
        None => {
            let mut m = Array2::<f64>::zeros((n, n));
            m.as_slice_mut()
                .expect("standard layout")
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(u, out)| {
                    w.row(u).fold((), |_, v, wuv| out[v] = edge(u, v, wuv));
                });
            EdgeStorage::Dense(m)
        }
        Some(p) => {
            let values: Vec<f64> = (0..n)
                .into_par_iter()
                .flat_map_iter(|u| {
                    let mut row = Vec::with_capacity(p.row_range(u).len());
                    w.row(u).fold((), |_, v, wuv| row.push(edge(u, v, wuv)));
                    row
                })
                .collect();
            EdgeStorage::Sparse {
                pattern: Arc::clone(p),
                values,
            }
        }
    };
    Ok(EdgeField { n, storage })
}

/// `||∇f(u)|| = sqrt(Σ_v ∇f(u,v)^2)`.
pub fn gradient_norm_at(g: &EdgeField, u: usize) -> Result<f64> {
    if u >= g.n {
        return Err(Error::VertexOutOfRange { index: u, n: g.n });
    }
    let sq: f64 = match &g.storage {
        EdgeStorage::Dense(m) => m.row(u).iter().map(|x| x * x).sum(),
        EdgeStorage::Sparse { pattern, values } => {
            pattern.row_range(u).map(|k| values[k] * values[k]).sum()
        }
    };
    Ok(sq.sqrt())
}

/// `[∇*F](u) = Σ_v sqrt(w(u,v)/2d(u)) (F(u,v) - F(v,u))`.
pub fn divergence(field: &EdgeField, w: &WeightMatrix, d: &DegreeVector) -> Result<VertexFunction> {
    check_field(field, w)?;
    check_degrees(d, w)?;
    let dv = d.values();
    let values = (0..w.n())
        .into_par_iter()
        .map(|u| {
            let du2 = 2.0 * dv[u];
            match &field.storage {
                EdgeStorage::Dense(m) => w.row(u).fold(0.0, |acc, v, wuv| {
                    acc + (wuv / du2).sqrt() * (m[[u, v]] - m[[v, u]])
                }),
                EdgeStorage::Sparse { pattern, values } => {
                    let mut acc = 0.0;
                    for k in pattern.row_range(u) {
                        let wuv = w_at(w, k);
                        acc += (wuv / du2).sqrt() * (values[k] - values[pattern.mirror(k)]);
                    }
                    acc
                }
            }
        })
        .collect();
    Ok(VertexFunction { values })
}

// Sparse W and F share the pattern, so storage index k addresses both.
#[inline]
fn w_at(w: &WeightMatrix, k: usize) -> f64 {
    w.sparse_value(k)
}

/// `Δf(u) = Σ_v w(u,v)/sqrt(d(u)d(v)) f(v) - f(u)`, evaluated in closed form
/// (the `v = u` term included).
pub fn laplacian_apply(f: &VertexFunction, w: &WeightMatrix, d: &DegreeVector) -> Result<VertexFunction> {
    check_vertex(f, w)?;
    check_degrees(d, w)?;
    let fv = f.values();
    let inv_sqrt: Vec<f64> = d.values().iter().map(|x| 1.0 / x.sqrt()).collect();
    let scaled: Vec<f64> = fv.iter().zip(&inv_sqrt).map(|(f, s)| f * s).collect();
    let values = (0..w.n())
        .into_par_iter()
        .map(|u| inv_sqrt[u] * w.row(u).fold(0.0, |acc, v, wuv| acc + wuv * scaled[v]) - fv[u])
        .collect();
    Ok(VertexFunction { values })
}

/// Dense `Δ = D^{-1/2} W D^{-1/2} - Id` (negative semidefinite).
pub fn laplacian_matrix(w: &WeightMatrix, d: &DegreeVector) -> Result<Array2<f64>> {
    check_degrees(d, w)?;
    let n = w.n();
    let inv_sqrt: Vec<f64> = d.values().iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut m = Array2::<f64>::zeros((n, n));
    for u in 0..n {
        w.row(u).fold((), |_, v, wuv| {
            m[[u, v]] = wuv * (inv_sqrt[u] * inv_sqrt[v]);
        });
        m[[u, u]] -= 1.0;
    }
    Ok(m)
}

/// `L = Id - D^{-1/2} W D^{-1/2} = -Δ`, positive semidefinite with spectrum in `[0, 2]`.
pub fn normalized_laplacian_matrix(w: &WeightMatrix, d: &DegreeVector) -> Result<Array2<f64>> {
    Ok(-laplacian_matrix(w, d)?)
}

/// `<f, g>_V = Σ_u f(u) g(u)`.
pub fn inner_vertex(f: &VertexFunction, g: &VertexFunction) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    Ok(f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum())
}

/// `<F, G>_E = Σ_{(u,v)} F(u,v) G(u,v)` over all ordered edges.
pub fn inner_edge(f: &EdgeField, g: &EdgeField) -> Result<f64> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            found: g.n,
        });
    }
    match (&f.storage, &g.storage) {
        (EdgeStorage::Dense(a), EdgeStorage::Dense(b)) => {
            Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y).sum())
        }
        (
            EdgeStorage::Sparse { pattern: p, values: a },
            EdgeStorage::Sparse { pattern: q, values: b },
        ) if Arc::ptr_eq(p, q) || p == q => Ok(a.iter().zip(b).map(|(x, y)| x * y).sum()),
        _ => Err(Error::PatternMismatch),
    }
}

/// `<F, F>_E`.
pub fn edge_norm_squared(f: &EdgeField) -> f64 {
    f.sum_map(|x| x * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_weights, degrees, KernelConfig, PointCloud};

    const E_INV: f64 = 0.36787944117144233;

    fn two_point() -> (WeightMatrix, DegreeVector) {
        let eps = 0.5;
        let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(eps).unwrap()).unwrap();
        let d = degrees(&w);
        (w, d)
    }

    fn pseudo_random(n: usize, salt: f64) -> Vec<f64> {
        (0..n).map(|i| ((i as f64 + salt) * 12.9898).sin() * 4.0).collect()
    }

    #[test]
    fn two_point_gradient_and_norm() {
        let (w, d) = two_point();
        assert!((w.get(0, 1) - E_INV).abs() < 1e-16);
        let f = VertexFunction::new(vec![0.0, 1.0]).unwrap();
        let g = gradient(&f, &w, &d).unwrap();
        let expected = (E_INV / (2.0 * (1.0 + E_INV))).sqrt();
        assert!((g.get(0, 1) - expected).abs() < 1e-15);
        assert!((g.get(0, 1) - 0.3667).abs() < 1e-4);
        assert_eq!(g.get(0, 0), 0.0);
        assert_eq!(g.get(1, 1), 0.0);
        assert!((gradient_norm_at(&g, 0).unwrap() - expected).abs() < 1e-15);
        assert!(gradient_norm_at(&g, 2).is_err());
    }

    #[test]
    fn two_point_divergence() {
        let (w, d) = two_point();
        let f = EdgeField::dense(ndarray::array![[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let div = divergence(&f, &w, &d).unwrap();
        let expected = 2.0 * (E_INV / (2.0 * (1.0 + E_INV))).sqrt();
        assert!((div.get(0) - expected).abs() < 1e-15);
        assert!((div.get(0) - 0.7334).abs() < 1e-4);
    }

    #[test]
    fn two_point_laplacian() {
        let (w, d) = two_point();
        let f = VertexFunction::new(vec![0.0, 1.0]).unwrap();
        let lap = laplacian_apply(&f, &w, &d).unwrap();
        assert!((lap.get(0) - E_INV / (1.0 + E_INV)).abs() < 1e-15);
        assert!((lap.get(0) - 0.2689).abs() < 1e-4);

        let m = laplacian_matrix(&w, &d).unwrap();
        let dd = 1.0 + E_INV;
        let want = [[1.0 / dd - 1.0, E_INV / dd], [E_INV / dd, 1.0 / dd - 1.0]];
        for u in 0..2 {
            for v in 0..2 {
                assert!((m[[u, v]] - want[u][v]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coincident_points() {
        let n = 5;
        let cloud = PointCloud::new(vec![vec![1.0, 2.0, 3.0]; n]).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(0.2).unwrap()).unwrap();
        let d = degrees(&w);
        let g = gradient(&VertexFunction::constant(n, 3.5), &w, &d).unwrap();
        assert_eq!(edge_norm_squared(&g), 0.0);
        let m = laplacian_matrix(&w, &d).unwrap();
        for u in 0..n {
            for v in 0..n {
                let want = 1.0 / n as f64 - if u == v { 1.0 } else { 0.0 };
                assert!((m[[u, v]] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gradient_of_constant_is_nonzero_with_unequal_degrees() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![0.5], vec![3.0]]).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(0.5).unwrap()).unwrap();
        let d = degrees(&w);
        let g = gradient(&VertexFunction::constant(3, 1.0), &w, &d).unwrap();
        assert!(g.get(0, 2).abs() > 1e-6);
    }

    #[test]
    fn symmetric_or_zero_field_has_zero_divergence() {
        let cloud = PointCloud::from_flat(pseudo_random(30, 0.1), 3).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(1.0).unwrap()).unwrap();
        let d = degrees(&w);
        let sym = EdgeField::from_fn(&w, |u, v| ((u + v) as f64).sin());
        assert!(divergence(&sym, &w, &d).unwrap().values().iter().all(|&x| x == 0.0));
        let zero = EdgeField::from_fn(&w, |_, _| 0.0);
        assert!(divergence(&zero, &w, &d).unwrap().values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sqrt_degree_is_null_vector() {
        for tau in [0.0, 1e-4] {
            let cloud = PointCloud::from_flat(pseudo_random(300, 0.7), 3).unwrap();
            let w = build_weights(&cloud, &KernelConfig::new(0.5, tau).unwrap()).unwrap();
            let d = degrees(&w);
            let f = VertexFunction::new(d.values().iter().map(|x| x.sqrt()).collect()).unwrap();
            let lap = laplacian_apply(&f, &w, &d).unwrap();
            assert!(lap.values().iter().all(|x| x.abs() < 1e-12), "tau={tau}");
        }
    }

    #[test]
    fn inner_products() {
        let ones = VertexFunction::constant(4, 1.0);
        assert_eq!(inner_vertex(&ones, &ones).unwrap(), 4.0);
        let a = VertexFunction::new(vec![1.0, 2.0, -0.5, 3.0]).unwrap();
        let b0 = VertexFunction::new(vec![0.3, -1.0, 2.0, 0.25]).unwrap();
        let proj = inner_vertex(&a, &b0).unwrap() / inner_vertex(&a, &a).unwrap();
        let b = VertexFunction::new(b0.values().iter().zip(a.values()).map(|(b, a)| b - proj * a).collect()).unwrap();
        assert!(inner_vertex(&a, &b).unwrap().abs() < 1e-12);
        assert!(inner_vertex(&a, &VertexFunction::constant(3, 1.0)).is_err());

        let cloud = PointCloud::from_flat(pseudo_random(40, 0.2), 2).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(1.0).unwrap()).unwrap();
        let anti = EdgeField::from_fn(&w, |u, v| u as f64 - v as f64 * 0.5 - (v as f64 - u as f64 * 0.5));
        let sym = EdgeField::from_fn(&w, |u, v| ((u * v) as f64).cos());
        assert!(inner_edge(&anti, &sym).unwrap().abs() < 1e-10);
    }

    #[test]
    fn gradient_energy_equals_sum_of_vertex_norms() {
        let cloud = PointCloud::from_flat(pseudo_random(60, 0.9), 3).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(0.8).unwrap()).unwrap();
        let d = degrees(&w);
        let f = VertexFunction::new(pseudo_random(20, 3.0)).unwrap();
        let g = gradient(&f, &w, &d).unwrap();
        let total: f64 = (0..20).map(|u| gradient_norm_at(&g, u).unwrap().powi(2)).sum();
        assert!((inner_edge(&g, &g).unwrap() - total).abs() < 1e-12 * total);

        let f2 = VertexFunction::new(f.values().iter().map(|x| 2.0 * x).collect()).unwrap();
        let g2 = gradient(&f2, &w, &d).unwrap();
        for u in 0..20 {
            let a = gradient_norm_at(&g, u).unwrap();
            assert!((gradient_norm_at(&g2, u).unwrap() - 2.0 * a).abs() < 1e-14 * (1.0 + a));
        }
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let (w, d) = two_point();
        assert!(gradient(&VertexFunction::constant(3, 1.0), &w, &d).is_err());
        let bad_d = DegreeVector::new(vec![1.0]).unwrap();
        assert!(laplacian_apply(&VertexFunction::constant(2, 1.0), &w, &bad_d).is_err());
        let cloud = PointCloud::from_flat(pseudo_random(20, 0.4), 2).unwrap();
        let sparse = build_weights(&cloud, &KernelConfig::new(1.0, 1e-3).unwrap()).unwrap();
        let ds = degrees(&sparse);
        let dense_field = EdgeField::dense(Array2::zeros((10, 10))).unwrap();
        assert!(matches!(divergence(&dense_field, &sparse, &ds), Err(Error::PatternMismatch)));
        assert!(divergence(&dense_field.restrict_to(&sparse).unwrap(), &sparse, &ds).is_ok());
        assert!(DegreeVector::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn sparse_and_dense_agree_when_nothing_is_dropped() {
        let cloud = PointCloud::from_flat(pseudo_random(50, 1.1), 2).unwrap();
        let dense = build_weights(&cloud, &KernelConfig::dense(0.5).unwrap()).unwrap();
        let sparse = build_weights(&cloud, &KernelConfig::new(0.5, 1e-300).unwrap()).unwrap();
        let (dd, ds) = (degrees(&dense), degrees(&sparse));
        assert_eq!(dd, ds);
        let f = VertexFunction::new(pseudo_random(25, 2.0)).unwrap();
        assert_eq!(
            laplacian_apply(&f, &dense, &dd).unwrap(),
            laplacian_apply(&f, &sparse, &ds).unwrap()
        );
        let gd = gradient(&f, &dense, &dd).unwrap();
        let gs = gradient(&f, &sparse, &ds).unwrap();
        assert_eq!(gd.to_dense(), gs.to_dense());
        assert_eq!(
            divergence(&gd, &dense, &dd).unwrap(),
            divergence(&gs, &sparse, &ds).unwrap()
        );
    }
}
