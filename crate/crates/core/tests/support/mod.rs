//! Brute-force reference implementations of the landscape features, written
//! without reusing any library code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use nas_landscape::ela::{
    dispersion_features, distribution_features, fit_meta_model, information_content_features,
    nbc_features, IcSettings, MetaModel, MinimizationSample, TourStart, FEATURE_NAMES,
};

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// Uniform points in `[−5, 5]^d` with one of three response shapes.
pub fn random_instance(seed: u64, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>() * 10.0 - 5.0).collect())
        .collect();
    let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let y = x
        .iter()
        .map(|r| {
            let noise = rng.random::<f64>() * 0.1;
            match seed % 3 {
                0 => r.iter().map(|v| v * v).sum::<f64>() + noise,
                1 => r
                    .iter()
                    .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                    .sum::<f64>(),
                _ => 1.5 + r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + noise,
            }
        })
        .collect();
    (x, y)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

fn cor(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let n = a.len() as f64;
    let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0);
    let (sa, sb) = (sd(a), sd(b));
    if sa == 0.0 || sb == 0.0 {
        None
    } else {
        Some(cov / (sa * sb))
    }
}

fn mean_pair_distance(x: &[Vec<f64>], rows: &[usize]) -> f64 {
    let mut total = 0.0;
    let mut count = 0;
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            total += dist(&x[rows[a]], &x[rows[b]]);
            count += 1;
        }
    }
    total / count as f64
}

/// `(diff_mean, ratio_mean)` for a top share given in percent.
pub fn oracle_dispersion(x: &[Vec<f64>], y: &[f64], percent: usize) -> (f64, f64) {
    let n = x.len();
    let k = (percent * n).div_ceil(100);
    let mut order: Vec<(f64, usize)> = y.iter().copied().zip(0..n).collect();
    order.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let top: Vec<usize> = order[..k].iter().map(|p| p.1).collect();
    let all: Vec<usize> = (0..n).collect();
    let (dt, da) = (mean_pair_distance(x, &top), mean_pair_distance(x, &all));
    (dt - da, dt / da)
}

pub fn oracle_distribution(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let m = mean(y);
    let moment = |r: i32| y.iter().map(|v| (v - m).powi(r)).sum::<f64>() / n;
    let (m2, m3, m4) = (moment(2), moment(3), moment(4));
    (m3 / (m2 * m2.sqrt()), m4 / (m2 * m2) - 3.0)
}

pub fn oracle_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    for i in 0..1000 {
        g.push(10f64.powf(-5.0 + i as f64 * (20.0 / 999.0)));
    }
    g
}

pub fn oracle_tour(x: &[Vec<f64>], start: usize) -> Vec<usize> {
    let n = x.len();
    let mut tour = vec![start];
    let mut used = vec![false; n];
    used[start] = true;
    while tour.len() < n {
        let here = *tour.last().unwrap();
        let mut pick = None;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let dj = dist(&x[here], &x[j]);
            match pick {
                Some((_, best)) if dj >= best => {}
                _ => pick = Some((j, dj)),
            }
        }
        let (j, _) = pick.unwrap();
        used[j] = true;
        tour.push(j);
    }
    tour
}

fn symbols(slopes: &[f64], eps: f64) -> Vec<i8> {
    slopes
        .iter()
        .map(|&s| if s > eps { 1 } else if s < -eps { -1 } else { 0 })
        .collect()
}

pub fn oracle_entropy(s: &[i8]) -> f64 {
    let mut counts: BTreeMap<(i8, i8), usize> = BTreeMap::new();
    for i in 0..s.len() - 1 {
        *counts.entry((s[i], s[i + 1])).or_default() += 1;
    }
    let total = (s.len() - 1) as f64;
    let mut h = 0.0;
    for ((a, b), c) in counts {
        if a != b {
            let p = c as f64 / total;
            h -= p * p.ln() / 6f64.ln();
        }
    }
    h
}

pub fn oracle_partial(s: &[i8]) -> f64 {
    let mut kept: Vec<i8> = s.iter().copied().filter(|&v| v != 0).collect();
    kept.dedup();
    kept.len() as f64 / s.len() as f64
}

/// `[h_max, eps_s, eps_max, eps_ratio, m0]`, or `None` when a threshold is
/// never reached.
pub fn oracle_ic(x: &[Vec<f64>], y: &[f64], start: usize) -> Option<[f64; 5]> {
    let tour = oracle_tour(x, start);
    let slopes: Vec<f64> = (0..tour.len() - 1)
        .map(|i| (y[tour[i + 1]] - y[tour[i]]) / dist(&x[tour[i]], &x[tour[i + 1]]))
        .collect();
    let grid = oracle_grid();
    let h: Vec<f64> = grid.iter().map(|&e| oracle_entropy(&symbols(&slopes, e))).collect();
    let h_max = h.iter().copied().fold(f64::MIN, f64::max);
    let eps_max = grid[h.iter().position(|&v| h_max - v <= 1e-12).unwrap()];
    let first = |level: f64| (1..grid.len()).find(|&i| h[i] < level).map(|i| grid[i].log10());
    Some([
        h_max,
        first(0.05)?,
        eps_max,
        first(0.5 * h_max)?,
        oracle_partial(&symbols(&slopes, 0.0)),
    ])
}

/// `(adj_r2, intercept)` by SVD least squares; `None` when `n ≤ p + 1`.
pub fn oracle_fit(columns: &[Vec<f64>], y: &[f64]) -> Option<(f64, f64)> {
    let n = y.len();
    let p = columns.len();
    if n <= p + 1 {
        return None;
    }
    let a = DMatrix::from_fn(n, p + 1, |r, c| if c == 0 { 1.0 } else { columns[c - 1][r] });
    let b = DVector::from_column_slice(y);
    let beta = a.clone().svd(true, true).solve(&b, 1e-13).unwrap();
    let fitted = &a * &beta;
    let rss: f64 = (0..n).map(|i| (y[i] - fitted[i]).powi(2)).sum();
    let m = mean(y);
    let tss: f64 = y.iter().map(|v| (v - m).powi(2)).sum();
    let r2 = 1.0 - rss / tss;
    Some((1.0 - (1.0 - r2) * (n - 1) as f64 / (n - p - 1) as f64, beta[0]))
}

pub fn oracle_columns(x: &[Vec<f64>], model: &str) -> Vec<Vec<f64>> {
    let d = x[0].len();
    let col = |f: &dyn Fn(&[f64]) -> f64| x.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let mut cols: Vec<Vec<f64>> = (0..d).map(|j| col(&|r| r[j])).collect();
    match model {
        "linear" => {}
        "interact" => {
            for i in 0..d {
                for j in i + 1..d {
                    cols.push(col(&|r| r[i] * r[j]));
                }
            }
        }
        "quad" => {
            for j in 0..d {
                cols.push(col(&|r| r[j] * r[j]));
            }
        }
        _ => unreachable!(),
    }
    cols
}

/// `[sd_ratio, mean_ratio, cor, coeff_var, nb_fitness_cor]`.
pub fn oracle_nbc(x: &[Vec<f64>], y: &[f64]) -> Option<[f64; 5]> {
    let n = x.len();
    let mut nn = vec![f64::INFINITY; n];
    let mut nb = vec![None::<(f64, usize)>; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dij = dist(&x[i], &x[j]);
            nn[i] = nn[i].min(dij);
            if y[j] < y[i] {
                match nb[i] {
                    Some((best, _)) if best <= dij => {}
                    _ => nb[i] = Some((dij, j)),
                }
            }
        }
    }
    let mut indeg = vec![0.0; n];
    let (mut nn_in, mut nb_in) = (Vec::new(), Vec::new());
    for i in 0..n {
        if let Some((dv, j)) = nb[i] {
            indeg[j] += 1.0;
            nn_in.push(nn[i]);
            nb_in.push(dv);
        }
    }
    let ratio: Vec<f64> = nn_in.iter().zip(&nb_in).map(|(a, b)| a / b).collect();
    Some([
        sd(&nn) / sd(&nb_in),
        mean(&nn) / mean(&nb_in),
        cor(&nn_in, &nb_in)?,
        sd(&ratio) / mean(&ratio),
        cor(&indeg, y)?,
    ])
}

/// All 20 features from the oracles; `None` entries mark features the
/// oracle cannot define for this input.
pub fn oracle_features(x: &[Vec<f64>], y: &[f64], start: usize) -> [Option<f64>; 20] {
    let mut out = [None; 20];
    if (2 * x.len()).div_ceil(100) >= 2 {
        let (d2, r2) = oracle_dispersion(x, y, 2);
        let (d5, r5) = oracle_dispersion(x, y, 5);
        out[0] = Some(d2);
        out[1] = Some(d5);
        out[2] = Some(r2);
        out[3] = Some(r5);
    }
    let (s, k) = oracle_distribution(y);
    out[4] = Some(s);
    out[5] = Some(k);
    if let Some(ic) = oracle_ic(x, y, start) {
        for i in 0..5 {
            out[6 + i] = Some(ic[i]);
        }
    }
    if let Some((adj, icpt)) = oracle_fit(&oracle_columns(x, "linear"), y) {
        out[11] = Some(adj);
        out[12] = Some(icpt);
    }
    out[13] = oracle_fit(&oracle_columns(x, "interact"), y).map(|f| f.0);
    out[14] = oracle_fit(&oracle_columns(x, "quad"), y).map(|f| f.0);
    if let Some(v) = oracle_nbc(x, y) {
        for i in 0..5 {
            out[15 + i] = Some(v[i]);
        }
    }
    out
}

/// The same 20 values from the library, family by family, so that an
/// infeasible model does not hide the others.
pub fn library_features(sample: &MinimizationSample, start: usize) -> [Option<f64>; 20] {
    let mut out = [None; 20];
    if let Ok(f) = dispersion_features(sample, &[0.02, 0.05]) {
        let q = &f.per_quantile;
        out[0] = Some(q[0].diff_mean);
        out[1] = Some(q[1].diff_mean);
        out[2] = Some(q[0].ratio_mean);
        out[3] = Some(q[1].ratio_mean);
    }
    if let Ok(f) = distribution_features(sample.y()) {
        out[4] = Some(f.skewness);
        out[5] = Some(f.kurtosis);
    }
    let settings = IcSettings { start: TourStart::Index(start), ..Default::default() };
    if let Ok(f) = information_content_features(sample, &settings) {
        out[6] = Some(f.h_max);
        out[7] = Some(f.eps_s);
        out[8] = Some(f.eps_max);
        out[9] = Some(f.eps_ratio);
        out[10] = Some(f.m0);
    }
    if let Ok(f) = fit_meta_model(sample, MetaModel::Linear) {
        out[11] = Some(f.adj_r2);
        out[12] = Some(f.intercept);
    }
    out[13] = fit_meta_model(sample, MetaModel::LinearInteraction).ok().map(|f| f.adj_r2);
    out[14] = fit_meta_model(sample, MetaModel::Quadratic).ok().map(|f| f.adj_r2);
    if let Ok(f) = nbc_features(sample) {
        out[15] = Some(f.sd_ratio);
        out[16] = Some(f.mean_ratio);
        out[17] = Some(f.cor);
        out[18] = Some(f.dist_ratio_coeff_var);
        out[19] = Some(f.nb_fitness_cor);
    }
    out
}

/// Relative agreement with a tiny absolute floor for values at zero.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-12
}

/// Names of the features on which library and oracle disagree.
pub fn mismatches(lib: &[Option<f64>; 20], oracle: &[Option<f64>; 20], rel: f64) -> Vec<String> {
    (0..20)
        .filter_map(|i| match (lib[i], oracle[i]) {
            (Some(a), Some(b)) if close(a, b, rel) => None,
            (None, None) => None,
            (a, b) => Some(format!("{}: library {a:?} vs oracle {b:?}", FEATURE_NAMES[i])),
        })
        .collect()
}
