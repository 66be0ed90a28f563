//! Small dense linear-algebra and distance helpers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Full symmetric matrix of pairwise Euclidean distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_points(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&points[i], &points[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Wraps a row-major `n × n` matrix without validation.
    pub fn from_raw(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "distance matrix must be square");
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// Result of a least-squares fit.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residual_sum_squares: f64,
}

/// Solves `min ‖A c − b‖` by Householder QR with column pivoting.
///
/// The fit is rejected as singular when a diagonal entry of the triangular
/// factor falls below `rank_tol` times the largest one.
pub fn least_squares(a: &DMatrix<f64>, b: &[f64], rank_tol: f64) -> Result<LeastSquares> {
    let (n, m) = a.shape();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    if n < m {
        return Err(Error::InsufficientData(format!(
            "{n} observations for {m} coefficients"
        )));
    }
    // column-major working copy
    let mut w: Vec<f64> = a.as_slice().to_vec();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut diag = vec![0.0; m];
    let mut v = vec![0.0; n];

    for k in 0..m {
        // pivot on the largest remaining column norm
        let (pivot, _) = (k..m)
            .map(|j| {
                let col = &w[j * n + k..(j + 1) * n];
                (j, col.iter().map(|x| x * x).sum::<f64>())
            })
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot != k {
            for r in 0..n {
                w.swap(k * n + r, pivot * n + r);
            }
            perm.swap(k, pivot);
        }

        let col = &w[k * n + k..(k + 1) * n];
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let len = n - k;
        v[..len].copy_from_slice(col);
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            diag[k] = alpha;
            continue;
        }
        for x in &mut v[..len] {
            *x /= vnorm;
        }
        diag[k] = alpha;
        for j in (k + 1)..m {
            let c = &mut w[j * n + k..(j + 1) * n];
            let s: f64 = c.iter().zip(&v[..len]).map(|(x, y)| x * y).sum();
            for (x, y) in c.iter_mut().zip(&v[..len]) {
                *x -= 2.0 * s * y;
            }
        }
        let r = &mut rhs[k..];
        let s: f64 = r.iter().zip(&v[..len]).map(|(x, y)| x * y).sum();
        for (x, y) in r.iter_mut().zip(&v[..len]) {
            *x -= 2.0 * s * y;
        }
    }

    let largest = diag.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    if largest == 0.0 {
        return Err(Error::SingularFit("design matrix is zero".into()));
    }
    if let Some(k) = diag.iter().position(|d| d.abs() < rank_tol * largest) {
        return Err(Error::SingularFit(format!(
            "design matrix has numerical rank {k} < {m} (tolerance {rank_tol:e})"
        )));
    }

    // back substitution on the upper triangle
    let mut z = vec![0.0; m];
    for k in (0..m).rev() {
        let mut acc = rhs[k];
        for j in (k + 1)..m {
            acc -= w[j * n + k] * z[j];
        }
        z[k] = acc / diag[k];
    }
    let mut coefficients = vec![0.0; m];
    for (k, &p) in perm.iter().enumerate() {
        coefficients[p] = z[k];
    }

    let residual_sum_squares = (0..n)
        .map(|r| {
            let fitted: f64 = (0..m).map(|j| a[(r, j)] * coefficients[j]).sum();
            (b[r] - fitted).powi(2)
        })
        .sum();
    Ok(LeastSquares {
        coefficients,
        residual_sum_squares,
    })
}

/// Orthonormalizes the columns of a square matrix. Equivalent to the Q factor
/// of a QR decomposition whose triangular factor has a positive diagonal.
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    let mut q = m.clone();
    for j in 0..cols {
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                for r in 0..rows {
                    let qi = q[(r, i)];
                    q[(r, j)] -= proj * qi;
                }
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).unscale_mut(norm);
    }
    q
}
