//! Spectrum of the normalized Laplacian `L = Id - D^{-1/2} W D^{-1/2}`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::calculus::normalized_laplacian_matrix;
use crate::error::Result;
use crate::graph::{DegreeVector, WeightMatrix};

/// Eigenpairs of `L`, eigenvalues ascending; `vectors[i]` belongs to `values[i]`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn normalized_spectrum(w: &WeightMatrix, d: &DegreeVector) -> Result<Spectrum> {
    let l = normalized_laplacian_matrix(w, d)?;
    let n = w.n();
    let m = DMatrix::from_fn(n, n, |i, j| l[[i, j]]);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    Ok(Spectrum {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
    })
}

impl Spectrum {
    /// Number of eigenvalues at or below `tol`.
    pub fn null_dimension(&self, tol: f64) -> usize {
        self.values.iter().take_while(|&&l| l <= tol).count()
    }

    /// Cosine between `v` and its projection onto the span of eigenvectors
    /// with eigenvalue `<= tol` (at least the first one).
    ///
    /// On a nearly disconnected graph several eigenvalues round to zero and
    /// the solver may return any orthonormal basis of that cluster; the
    /// projection does not depend on that choice.
    pub fn null_space_cosine(&self, v: &[f64], tol: f64) -> f64 {
        let k = self.null_dimension(tol).max(1);
        let proj_sq: f64 = self.vectors[..k]
            .iter()
            .map(|e| e.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().powi(2))
            .sum();
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        (proj_sq / norm_sq).sqrt().min(1.0)
    }
}

/// `|<a, b>| / (|a| |b|)`.
pub fn abs_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot.abs() / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_weights, degrees, KernelConfig, PointCloud};

    #[test]
    fn coincident_points_spectrum() {
        // W = J, D = N I  =>  L = I - J/N with eigenvalues {0, 1, ..., 1}
        let cloud = PointCloud::new(vec![vec![0.0]; 4]).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(1.0).unwrap()).unwrap();
        let s = normalized_spectrum(&w, &degrees(&w)).unwrap();
        assert!(s.values[0].abs() < 1e-14);
        for &v in &s.values[1..] {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn range_and_null_vector() {
        let coords: Vec<f64> = (0..240).map(|i| ((i * 7919) % 1000) as f64 / 250.0).collect();
        let cloud = PointCloud::from_flat(coords, 3).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(0.3).unwrap()).unwrap();
        let d = degrees(&w);
        let s = normalized_spectrum(&w, &d).unwrap();
        assert!(s.values.iter().all(|&l| (-1e-10..=2.0 + 1e-10).contains(&l)));
        assert!(s.values[0].abs() <= 1e-10);
        let sqrt_d: Vec<f64> = d.values().iter().map(|x| x.sqrt()).collect();
        assert!(abs_cosine(&s.vectors[0], &sqrt_d) >= 1.0 - 1e-10);
        assert_eq!(s.null_dimension(1e-10), 1);
        assert!(s.null_space_cosine(&sqrt_d, 1e-10) >= 1.0 - 1e-10);
    }

    #[test]
    fn disconnected_graph_null_space() {
        // Two far-apart pairs: W is block diagonal up to e^{-5000}, so the
        // zero eigenvalue is double and v0 alone need not align with sqrt(d).
        let cloud = PointCloud::new(vec![vec![0.0], vec![0.5], vec![100.0], vec![100.3]]).unwrap();
        let w = build_weights(&cloud, &KernelConfig::dense(1.0).unwrap()).unwrap();
        let d = degrees(&w);
        let s = normalized_spectrum(&w, &d).unwrap();
        assert_eq!(s.null_dimension(1e-10), 2);
        let sqrt_d: Vec<f64> = d.values().iter().map(|x| x.sqrt()).collect();
        assert!(s.null_space_cosine(&sqrt_d, 1e-10) >= 1.0 - 1e-12);
    }
}
