//! Weighted graph construction: point clouds, the Gaussian kernel, weight
//! matrices and vertex degrees.
//!
//! The edge set is all ordered pairs `V x V`, self-loops included, so every
//! vertex carries `w(u,u) = 1` and its degree is at least one.
//!
//! Distances are ambient (chordal) Euclidean, accumulated as `Σ (u_i - v_i)^2`
//! in coordinate order. Since `(a - b)^2 == (b - a)^2` in IEEE arithmetic, the
//! weight of an unordered pair does not depend on orientation and the weight
//! matrix is symmetric bit for bit.

use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// N points in `R^n`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidCloud(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
        }
        Self::from_flat(points.into_iter().flatten().collect(), dim)
    }

    /// Builds a cloud from row-major coordinates.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCloud("ambient dimension must be >= 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidCloud(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        let n = coords.len() / dim;
        if n < 2 {
            return Err(Error::InvalidCloud(format!("need at least 2 points, got {n}")));
        }
        Ok(Self { coords, dim })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// First point carrying a NaN or infinite coordinate.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.iter().position(|p| p.iter().any(|x| !x.is_finite()))
    }

    /// Loads a cloud from CSV: one point per row, no header. Rows starting
    /// with `#` are skipped.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let rows = crate::io::read_numeric_rows(path.as_ref())?;
        Self::new(rows)
    }
}

/// `Σ_i (a_i - b_i)^2`, summed in coordinate order.
#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        acc += t * t;
    }
    acc
}

/// `exp(-d2 / (2 ε))`.
#[inline]
pub fn gaussian_weight(squared_dist: f64, epsilon: f64) -> f64 {
    (-squared_dist / (2.0 * epsilon)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    epsilon: f64,
    truncation_tau: f64,
}

impl KernelConfig {
    pub fn new(epsilon: f64, truncation_tau: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidKernel(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&truncation_tau) {
            return Err(Error::InvalidKernel(format!(
                "truncation tau must lie in [0, 1), got {truncation_tau}"
            )));
        }
        Ok(Self {
            epsilon,
            truncation_tau,
        })
    }

    /// Exact (untruncated) kernel.
    pub fn dense(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tau(&self) -> f64 {
        self.truncation_tau
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation_tau > 0.0
    }

    /// Truncated weight of a pair at squared distance `d2`: `None` when the
    /// weight falls below tau.
    #[inline]
    pub(crate) fn weight(&self, d2: f64, skip_beyond: f64) -> Option<f64> {
        if d2 > skip_beyond {
            return None;
        }
        let w = gaussian_weight(d2, self.epsilon);
        (w >= self.truncation_tau).then_some(w)
    }

    /// Squared distance past which every weight is certainly below tau.
    pub(crate) fn skip_beyond(&self) -> f64 {
        if self.truncation_tau > 0.0 {
            // a hair beyond the exact cutoff so the exp comparison stays authoritative
            -2.0 * self.epsilon * self.truncation_tau.ln() * (1.0 + 1e-9) + f64::MIN_POSITIVE
        } else {
            f64::INFINITY
        }
    }
}

/// Compressed sparse row pattern with a symmetric structure.
///
/// `mirror[k]` is the storage index of the transposed entry: if entry `k`
/// is `(u, v)` then `mirror[k]` is `(v, u)`.
#[derive(Debug, PartialEq)]
pub struct SparsePattern {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    mirror: Vec<u32>,
}

impl SparsePattern {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn row_range(&self, u: usize) -> std::ops::Range<usize> {
        self.row_ptr[u]..self.row_ptr[u + 1]
    }

    #[inline]
    pub fn col(&self, k: usize) -> usize {
        self.cols[k] as usize
    }

    #[inline]
    pub fn mirror(&self, k: usize) -> usize {
        self.mirror[k] as usize
    }

    /// Storage index of `(u, v)` if it is part of the pattern.
    pub fn find(&self, u: usize, v: usize) -> Option<usize> {
        let r = self.row_range(u);
        self.cols[r.clone()]
            .binary_search(&(v as u32))
            .ok()
            .map(|k| r.start + k)
    }

    /// Builds the pattern from per-row strictly-upper entries `(v, value)`,
    /// sorted by `v`; the diagonal entry is always present.
    fn from_upper(n: usize, upper: &[Vec<(u32, f64)>]) -> (Self, Vec<f64>) {
        let mut lower: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (u, row) in upper.iter().enumerate() {
            for &(v, w) in row {
                lower[v as usize].push((u as u32, w));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let total: usize = upper.iter().map(Vec::len).sum::<usize>() * 2 + n;
        let mut cols = Vec::with_capacity(total);
        let mut vals = Vec::with_capacity(total);
        for u in 0..n {
            for &(v, w) in &lower[u] {
                cols.push(v);
                vals.push(w);
            }
            cols.push(u as u32);
            vals.push(1.0);
            for &(v, w) in &upper[u] {
                cols.push(v);
                vals.push(w);
            }
            row_ptr.push(cols.len());
        }
        drop(lower);
        let mut pattern = SparsePattern {
            n,
            row_ptr,
            cols,
            mirror: Vec::new(),
        };
        let mirror: Vec<u32> = (0..n)
            .into_par_iter()
            .flat_map_iter(|u| {
                let p = &pattern;
                p.row_range(u).map(move |k| {
                    p.find(p.col(k), u)
                        .expect("sparse pattern is structurally symmetric") as u32
                })
            })
            .collect();
        pattern.mirror = mirror;
        (pattern, vals)
    }
}

#[derive(Clone, Debug)]
enum Storage {
    Dense(Array2<f64>),
    Sparse {
        pattern: Arc<SparsePattern>,
        values: Vec<f64>,
    },
}

/// Symmetric nonnegative weight matrix `W_uv = w(u,v)`.
#[derive(Clone, Debug)]
pub struct WeightMatrix {
    kernel: KernelConfig,
    n: usize,
    storage: Storage,
}

/// Nonzero structure of one row, yielding `(column, value)` pairs in
/// increasing column order.
pub enum Row<'a> {
    Dense(&'a [f64]),
    Sparse {
        cols: &'a [u32],
        values: &'a [f64],
    },
}

impl<'a> Row<'a> {
    pub fn iter(&self) -> Box<dyn Iterator<Item = (usize, f64)> + 'a> {
        match *self {
            Row::Dense(vals) => Box::new(vals.iter().copied().enumerate()),
            Row::Sparse { cols, values } => Box::new(
                cols.iter()
                    .zip(values)
                    .map(|(&c, &v)| (c as usize, v)),
            ),
        }
    }

    /// Sequential fold over the row; avoids boxing on hot paths.
    #[inline]
    pub fn fold<B>(&self, init: B, mut f: impl FnMut(B, usize, f64) -> B) -> B {
        match *self {
            Row::Dense(vals) => vals
                .iter()
                .enumerate()
                .fold(init, |acc, (v, &w)| f(acc, v, w)),
            Row::Sparse { cols, values } => cols
                .iter()
                .zip(values)
                .fold(init, |acc, (&c, &w)| f(acc, c as usize, w)),
        }
    }
}

impl WeightMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> KernelConfig {
        self.kernel
    }

    pub fn epsilon(&self) -> f64 {
        self.kernel.epsilon
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse { .. })
    }

    /// Number of stored entries (N² when dense).
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(_) => self.n * self.n,
            Storage::Sparse { values, .. } => values.len(),
        }
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[[u, v]],
            Storage::Sparse { pattern, values } => {
                pattern.find(u, v).map(|k| values[k]).unwrap_or(0.0)
            }
        }
    }

    /// Value at storage index `k` of a sparse matrix.
    #[inline]
    pub(crate) fn sparse_value(&self, k: usize) -> f64 {
        match &self.storage {
            Storage::Sparse { values, .. } => values[k],
            Storage::Dense(_) => unreachable!("storage index on dense matrix"),
        }
    }

    pub fn row(&self, u: usize) -> Row<'_> {
        match &self.storage {
            Storage::Dense(m) => Row::Dense(&m.as_slice().expect("standard layout")[u * self.n..(u + 1) * self.n]),
            Storage::Sparse { pattern, values } => {
                let r = pattern.row_range(u);
                Row::Sparse {
                    cols: &pattern.cols[r.clone()],
                    values: &values[r],
                }
            }
        }
    }

    pub fn pattern(&self) -> Option<&Arc<SparsePattern>> {
        match &self.storage {
            Storage::Dense(_) => None,
            Storage::Sparse { pattern, .. } => Some(pattern),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse { pattern, values } => {
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

    /// Largest `|W_uv - W_vu|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        match &self.storage {
            Storage::Dense(m) => {
                for u in 0..self.n {
                    for v in 0..u {
                        worst = worst.max((m[[u, v]] - m[[v, u]]).abs());
                    }
                }
            }
            Storage::Sparse { pattern, values } => {
                for k in 0..values.len() {
                    worst = worst.max((values[k] - values[pattern.mirror(k)]).abs());
                }
            }
        }
        worst
    }

    /// Overwrites one stored entry without touching its transpose. Only used
    /// for fault injection in the invariant suite.
    #[doc(hidden)]
    pub fn corrupt_entry(&mut self, u: usize, v: usize, value: f64) {
        match &mut self.storage {
            Storage::Dense(m) => m[[u, v]] = value,
            Storage::Sparse { pattern, values } => {
                if let Some(k) = pattern.find(u, v) {
                    values[k] = value;
                }
            }
        }
    }
}

/// Builds `W_uv = exp(-|u-v|^2 / 2ε)`, zeroing weights below tau.
///
/// With `tau = 0` the matrix is stored densely; with `tau > 0` it is stored in
/// a symmetric CSR layout that keeps the diagonal and every weight `>= tau`.
/// Each unordered pair is evaluated once and mirrored.
pub fn build_weights(cloud: &PointCloud, kernel: &KernelConfig) -> Result<WeightMatrix> {
    if let Some(index) = cloud.first_non_finite() {
        return Err(Error::NonFinitePoint { index });
    }
    let n = cloud.len();
    let skip = kernel.skip_beyond();
    let storage = if kernel.is_truncated() {
        let upper: Vec<Vec<(u32, f64)>> = (0..n)
            .into_par_iter()
            .map(|u| {
                let pu = cloud.point(u);
                (u + 1..n)
                    .filter_map(|v| {
                        kernel
                            .weight(squared_distance(pu, cloud.point(v)), skip)
                            .map(|w| (v as u32, w))
                    })
                    .collect()
            })
            .collect();
        let (pattern, values) = SparsePattern::from_upper(n, &upper);
        Storage::Sparse {
            pattern: Arc::new(pattern),
            values,
        }
    } else {
        let mut m = Array2::<f64>::zeros((n, n));
        m.as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(u, row)| {
                let pu = cloud.point(u);
                row[u] = 1.0;
                for (v, slot) in row.iter_mut().enumerate().skip(u + 1) {
                    *slot = gaussian_weight(squared_distance(pu, cloud.point(v)), kernel.epsilon);
                }
            });
        for u in 0..n {
            for v in 0..u {
                m[[u, v]] = m[[v, u]];
            }
        }
        Storage::Dense(m)
    };
    Ok(WeightMatrix {
        kernel: *kernel,
        n,
        storage,
    })
}

/// `d(u) = Σ_v w(u,v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeVector {
    values: Vec<f64>,
}

impl DegreeVector {
    /// Wraps externally computed degrees. Every entry must be finite and positive.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveDegree { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
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
}

/// Row sums of `W`, accumulated in increasing column order.
pub fn degrees(weights: &WeightMatrix) -> DegreeVector {
    let values = (0..weights.n())
        .into_par_iter()
        .map(|u| weights.row(u).fold(0.0, |acc, _, w| acc + w))
        .collect();
    DegreeVector { values }
}

/// Degrees computed straight from the cloud without storing `W`.
///
/// Same truncation rule as [`build_weights`], but each unordered pair is
/// evaluated once and added to both endpoints, which halves the kernel
/// evaluations. Rows are processed in fixed blocks whose partial sums are
/// reduced in block order, so the result does not depend on the thread count;
/// it matches [`degrees`]`(`[`build_weights`]`(..))` to rounding (the
/// summation order differs). Memory is O(N), which is what makes degree
/// studies at large N feasible.
pub fn degrees_streaming(cloud: &PointCloud, kernel: &KernelConfig) -> Result<DegreeVector> {
    const BLOCK: usize = 256;
    if let Some(index) = cloud.first_non_finite() {
        return Err(Error::NonFinitePoint { index });
    }
    let n = cloud.len();
    let skip = kernel.skip_beyond();
    let partials: Vec<Vec<f64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let mut acc = vec![0.0; n];
            for u in lo..(lo + BLOCK).min(n) {
                let pu = cloud.point(u);
                let mut row = 0.0;
                for (v, a) in acc.iter_mut().enumerate().skip(u + 1) {
                    if let Some(w) = kernel.weight(squared_distance(pu, cloud.point(v)), skip) {
                        row += w;
                        *a += w;
                    }
                }
                acc[u] += row;
            }
            acc
        })
        .collect();
    let mut values = vec![1.0; n];
    for p in &partials {
        for (d, x) in values.iter_mut().zip(p) {
            *d += x;
        }
    }
    Ok(DegreeVector { values })
}
