//! Complete-linkage agglomerative clustering and classical MDS.

use std::collections::HashMap;
use std::hash::Hash;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DistanceMatrix;

/// Column-wise z-scores with zero-variance columns removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub rows: Vec<Vec<f64>>,
    /// Indices of the input columns that were kept.
    pub kept: Vec<usize>,
    /// Indices of constant input columns.
    pub dropped: Vec<usize>,
}

fn check_matrix(rows: &[Vec<f64>]) -> Result<usize> {
    let width = rows.first().map_or(0, Vec::len);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::DimensionMismatch { expected: width, found: r.len() }
                .context(format!("row {i}")));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(format!("row {i}")));
        }
    }
    Ok(width)
}

/// Z-scores every column with the `n − 1` standard deviation.
pub fn standardize(rows: &[Vec<f64>]) -> Result<Standardized> {
    let width = check_matrix(rows)?;
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "standardization needs at least 2 rows, got {n}"
        )));
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut moments = Vec::new();
    for c in 0..width {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / n as f64;
        let var = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let constant = rows.iter().all(|r| r[c] == rows[0][c]);
        if !constant && var > 0.0 {
            kept.push(c);
            moments.push((mean, var.sqrt()));
        } else {
            dropped.push(c);
        }
    }
    let rows = rows
        .iter()
        .map(|r| kept.iter().zip(&moments).map(|(&c, (m, s))| (r[c] - m) / s).collect())
        .collect();
    Ok(Standardized { rows, kept, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Complete,
}

/// One agglomeration step. Leaves are nodes `0..m`; the merge at position
/// `t` creates node `m + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub linkage: Linkage,
    pub labels: Vec<String>,
    pub merges: Vec<Merge>,
    /// Input columns left out by standardization.
    #[serde(default)]
    pub dropped_columns: Vec<usize>,
}

/// Complete linkage over a precomputed distance matrix.
pub fn complete_linkage(d: &DistanceMatrix) -> Vec<Merge> {
    let m = d.len();
    // slot -> (node id, size); distances between slots kept in `dist`
    let mut nodes: Vec<Option<(usize, usize)>> = (0..m).map(|i| Some((i, 1))).collect();
    let mut dist: Vec<f64> = (0..m * m).map(|k| d.get(k / m, k % m)).collect();
    let mut merges = Vec::with_capacity(m.saturating_sub(1));

    for step in 0..m.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, (usize, usize))> = None;
        for a in 0..m {
            let Some((ida, _)) = nodes[a] else { continue };
            for b in a + 1..m {
                let Some((idb, _)) = nodes[b] else { continue };
                let h = dist[a * m + b];
                let key = (ida.min(idb), ida.max(idb));
                let better = match best {
                    None => true,
                    Some((bh, _, _, bk)) => h < bh || (h == bh && key < bk),
                };
                if better {
                    best = Some((h, a, b, key));
                }
            }
        }
        let (height, a, b, (left, right)) = best.expect("at least two active clusters");
        let size = nodes[a].unwrap().1 + nodes[b].unwrap().1;
        for k in 0..m {
            if nodes[k].is_some() && k != a && k != b {
                let v = dist[a * m + k].max(dist[b * m + k]);
                dist[a * m + k] = v;
                dist[k * m + a] = v;
            }
        }
        nodes[a] = Some((m + step, size));
        nodes[b] = None;
        merges.push(Merge { left, right, height, size });
    }
    merges
}

/// Clusters labelled feature vectors, z-scoring columns first when
/// `standardize` is set.
pub fn hierarchical_cluster(
    vectors: &[Vec<f64>],
    labels: Vec<String>,
    standardize_columns: bool,
) -> Result<Dendrogram> {
    check_matrix(vectors)?;
    if vectors.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "clustering needs at least 2 rows, got {}",
            vectors.len()
        )));
    }
    if labels.len() != vectors.len() {
        return Err(Error::DimensionMismatch { expected: vectors.len(), found: labels.len() }
            .context("row labels"));
    }
    let (rows, dropped) = if standardize_columns {
        let s = standardize(vectors)?;
        (s.rows, s.dropped)
    } else {
        (vectors.to_vec(), Vec::new())
    };
    let merges = complete_linkage(&DistanceMatrix::from_points(&rows));
    Ok(Dendrogram {
        linkage: Linkage::Complete,
        labels,
        merges,
        dropped_columns: dropped,
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
}

impl Dendrogram {
    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_monotone(&self) -> bool {
        self.merges.windows(2).all(|w| w[0].height <= w[1].height)
    }

    /// Leaves under every node, indexed by node id.
    pub fn node_leaves(&self) -> Vec<Vec<usize>> {
        let m = self.leaf_count();
        let mut leaves: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
        for merge in &self.merges {
            let mut joined = [leaves[merge.left].clone(), leaves[merge.right].clone()].concat();
            joined.sort_unstable();
            leaves.push(joined);
        }
        leaves
    }

    /// Whether some node holds exactly these leaves.
    pub fn has_clade(&self, leaves: &[usize]) -> bool {
        let mut want = leaves.to_vec();
        want.sort_unstable();
        want.dedup();
        self.node_leaves().contains(&want)
    }

    /// Flat labels after undoing the `num_clusters − 1` highest merges.
    /// Clusters are numbered by their first leaf.
    pub fn cut(&self, num_clusters: usize) -> Result<Vec<usize>> {
        let m = self.leaf_count();
        if num_clusters == 0 || num_clusters > m {
            return Err(Error::InvalidInput(format!(
                "cannot cut {m} leaves into {num_clusters} clusters"
            )));
        }
        let mut uf = UnionFind((0..2 * m).collect());
        for (t, merge) in self.merges.iter().take(m - num_clusters).enumerate() {
            let node = m + t;
            let l = uf.find(merge.left);
            let r = uf.find(merge.right);
            uf.0[l] = node;
            uf.0[r] = node;
        }
        let mut ids = HashMap::new();
        Ok((0..m)
            .map(|leaf| {
                let root = uf.find(leaf);
                let next = ids.len();
                *ids.entry(root).or_insert(next)
            })
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Fraction of rows whose predicted cluster's majority class matches their
/// own class.
pub fn purity<T: Eq + Hash>(predicted: &[usize], truth: &[T]) -> Result<f64> {
    if predicted.len() != truth.len() || predicted.is_empty() {
        return Err(Error::DimensionMismatch { expected: predicted.len(), found: truth.len() });
    }
    let mut counts: HashMap<usize, HashMap<&T, usize>> = HashMap::new();
    for (p, t) in predicted.iter().zip(truth) {
        *counts.entry(*p).or_default().entry(t).or_default() += 1;
    }
    let majority: usize = counts.values().map(|c| c.values().copied().max().unwrap_or(0)).sum();
    Ok(majority as f64 / predicted.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Embedding {
    /// One row per input point, `k` columns.
    pub coordinates: Vec<Vec<f64>>,
    /// The `k` leading eigenvalues of the centred Gram matrix, descending,
    /// negatives clamped to zero.
    pub eigenvalues: Vec<f64>,
    /// Share of the positive eigenvalue mass carried by the kept axes.
    pub captured_fraction: f64,
    /// Total magnitude of the negative eigenvalues that were clamped.
    pub clamped_mass: f64,
}

fn validate_distances(d: &DistanceMatrix) -> Result<()> {
    let n = d.len();
    let scale = (0..n * n).map(|k| d.get(k / n, k % n).abs()).fold(0.0, f64::max);
    let tol = 1e-12 * scale.max(1.0);
    for i in 0..n {
        if d.get(i, i) != 0.0 {
            return Err(Error::InvalidInput(format!("distance diagonal entry {i} is not zero")));
        }
        for j in 0..n {
            let v = d.get(i, j);
            if !v.is_finite() {
                return Err(Error::NonFiniteInput(format!("distance ({i}, {j})")));
            }
            if v < 0.0 {
                return Err(Error::InvalidInput(format!("negative distance at ({i}, {j})")));
            }
            if (v - d.get(j, i)).abs() > tol {
                return Err(Error::InvalidInput(format!(
                    "distance matrix is asymmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Torgerson scaling of a distance matrix into `k` dimensions.
pub fn classical_mds(d: &DistanceMatrix, k: usize) -> Result<Embedding> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("MDS needs at least 2 points, got {n}")));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("cannot embed {n} points in {k} dimensions")));
    }
    validate_distances(d)?;

    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j).powi(2));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand)
    });
    // exact symmetry for the eigensolver
    let b = (&b + b.transpose()) * 0.5;
    let eig = SymmetricEigen::new(b);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let top = eig.eigenvalues[order[0]].max(0.0);
    // eigenvalues at round-off level relative to the leading one count as zero
    let floor = 1e-12 * n as f64 * top;
    let positive: f64 = eig.eigenvalues.iter().filter(|v| **v > 0.0).sum();
    let clamped_mass: f64 = eig.eigenvalues.iter().filter(|v| **v < 0.0).map(|v| -v).sum();

    let mut coordinates = vec![vec![0.0; k]; n];
    let mut eigenvalues = Vec::with_capacity(k);
    for (axis, &idx) in order.iter().take(k).enumerate() {
        let raw = eig.eigenvalues[idx];
        let lambda = if raw > floor { raw } else { 0.0 };
        eigenvalues.push(lambda);
        let v = eig.eigenvectors.column(idx);
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        let s = lambda.sqrt() * sign;
        for i in 0..n {
            coordinates[i][axis] = v[i] * s;
        }
    }
    let captured_fraction = if positive > 0.0 {
        eigenvalues.iter().sum::<f64>() / positive
    } else {
        0.0
    };
    Ok(Embedding {
        coordinates,
        eigenvalues,
        captured_fraction,
        clamped_mass,
    })
}

pub fn classical_mds_points(points: &[Vec<f64>], k: usize) -> Result<Embedding> {
    check_matrix(points)?;
    classical_mds(&DistanceMatrix::from_points(points), k)
}
