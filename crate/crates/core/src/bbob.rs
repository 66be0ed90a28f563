//! The 24 noiseless BBOB functions with seeded instances.
//!
//! Raw function forms and the coordinate maps `T_osz`, `T_asy^β`, `Λ^α` follow
//! the published function definitions. Instance generation (optimum
//! location, optimal value, rotations) uses this crate's own seeded scheme
//! and does not reproduce COCO's instance tables.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::design_space::DesignSpace;
use crate::ela::{compute_all, IcSettings, LandscapeFeatures, MinimizationSample};
use crate::error::{Error, Result};
use crate::linalg::orthonormalize;
use crate::sampling::{derive_seed, lhs_sample, rng_from_seed, DoePlan};

pub const NUM_FUNCTIONS: u32 = 24;

pub fn function_name(fid: u32) -> Option<&'static str> {
    const NAMES: [&str; 24] = [
        "Sphere",
        "Ellipsoidal",
        "Rastrigin",
        "Bueche-Rastrigin",
        "Linear Slope",
        "Attractive Sector",
        "Step Ellipsoidal",
        "Rosenbrock",
        "Rosenbrock rotated",
        "Ellipsoidal rotated",
        "Discus",
        "Bent Cigar",
        "Sharp Ridge",
        "Different Powers",
        "Rastrigin rotated",
        "Weierstrass",
        "Schaffers F7",
        "Schaffers F7 ill-conditioned",
        "Composite Griewank-Rosenbrock",
        "Schwefel",
        "Gallagher 101 peaks",
        "Gallagher 21 peaks",
        "Katsuura",
        "Lunacek bi-Rastrigin",
    ];
    fid.checked_sub(1).and_then(|i| NAMES.get(i as usize).copied())
}

const SCHWEFEL_OPTIMUM: f64 = 4.2096874633;
const SCHWEFEL_CONSTANT: f64 = 4.189828872724339;
const LUNACEK_MU0: f64 = 2.5;

#[derive(Debug, Clone)]
struct Peaks {
    weights: Vec<f64>,
    /// Peak centres mapped through the rotation.
    rotated_centres: Vec<DVector<f64>>,
    /// Diagonal conditioning of each peak, already divided by `α^{1/4}`.
    scales: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
enum Extra {
    None,
    Signs(Vec<f64>),
    Peaks(Peaks),
}

/// One function at one dimension and instance.
#[derive(Debug, Clone)]
pub struct BbobInstance {
    fid: u32,
    instance: u32,
    dim: usize,
    x_opt: Vec<f64>,
    f_opt: f64,
    rotation: DMatrix<f64>,
    second_rotation: DMatrix<f64>,
    extra: Extra,
}

fn random_rotation(rng: &mut impl Rng, dim: usize) -> DMatrix<f64> {
    let gaussian = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    orthonormalize(&gaussian)
}

/// Diagonal of `Λ^α`: `α^{½ (i−1)/(D−1)}`.
fn conditioning(alpha: f64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|i| alpha.powf(0.5 * i as f64 / (dim - 1) as f64))
        .collect()
}

fn t_osz_scalar(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let xh = x.abs().ln();
    let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    x.signum() * (xh + 0.049 * ((c1 * xh).sin() + (c2 * xh).sin())).exp()
}

fn t_osz(v: &mut [f64]) {
    for x in v {
        *x = t_osz_scalar(*x);
    }
}

fn t_asy(v: &mut [f64], beta: f64) {
    let d = v.len();
    for (i, x) in v.iter_mut().enumerate() {
        if *x > 0.0 {
            *x = x.powf(1.0 + beta * i as f64 / (d - 1) as f64 * x.sqrt());
        }
    }
}

fn scale(v: &mut [f64], diag: &[f64]) {
    for (x, s) in v.iter_mut().zip(diag) {
        *x *= s;
    }
}

fn penalty(x: &[f64]) -> f64 {
    x.iter().map(|v| (v.abs() - 5.0).max(0.0).powi(2)).sum()
}

fn rastrigin_raw(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    10.0 * (d - z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>())
        + z.iter().map(|v| v * v).sum::<f64>()
}

fn ellipsoid_raw(z: &[f64]) -> f64 {
    let d = z.len();
    z.iter()
        .enumerate()
        .map(|(i, v)| 10f64.powf(6.0 * i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

/// `z₁² + 10⁶ Σ_{i≥2} zᵢ²`.
pub fn bent_cigar_raw(z: &[f64]) -> f64 {
    z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
}

fn rosenbrock_raw(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

fn schaffer_raw(z: &[f64]) -> f64 {
    let d = z.len();
    let sum: f64 = z
        .windows(2)
        .map(|w| {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            s.sqrt() + s.sqrt() * (50.0 * s.powf(0.2)).sin().powi(2)
        })
        .sum();
    (sum / (d - 1) as f64).powi(2)
}

impl BbobInstance {
    pub fn new(fid: u32, instance: u32, dim: usize) -> Result<Self> {
        if !(1..=NUM_FUNCTIONS).contains(&fid) {
            return Err(Error::UnknownFunction(fid));
        }
        if dim < 2 {
            return Err(Error::InvalidInput(format!("BBOB dimension must be at least 2, got {dim}")));
        }
        if instance == 0 {
            return Err(Error::InvalidInput("BBOB instances are numbered from 1".into()));
        }
        let mut rng = rng_from_seed(derive_seed(derive_seed(0xB0B_F00D, fid as u64), instance as u64));
        let mut x_opt: Vec<f64> = (0..dim).map(|_| rng.random_range(-4.0..=4.0)).collect();
        let f_opt = rng.random_range(-1000.0..=1000.0);
        let rotation = random_rotation(&mut rng, dim);
        let second_rotation = random_rotation(&mut rng, dim);
        let signs: Vec<f64> = x_opt.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
        let rosenbrock_factor = 1f64.max((dim as f64).sqrt() / 8.0);
        let mut extra = Extra::None;

        match fid {
            4 => {
                for v in x_opt.iter_mut().step_by(2) {
                    *v = v.abs();
                }
            }
            5 => x_opt = signs.iter().map(|s| 5.0 * s).collect(),
            8 => x_opt.iter_mut().for_each(|v| *v *= 0.75),
            9 | 19 => {
                let target = DVector::from_element(dim, 0.5 / rosenbrock_factor);
                x_opt = (rotation.transpose() * target).as_slice().to_vec();
            }
            20 => {
                x_opt = signs.iter().map(|s| 0.5 * SCHWEFEL_OPTIMUM * s).collect();
                extra = Extra::Signs(signs);
            }
            21 | 22 => {
                let peaks = Self::make_peaks(&mut rng, fid, dim, &rotation);
                let (centres, peaks) = peaks;
                x_opt = centres;
                extra = Extra::Peaks(peaks);
            }
            24 => {
                x_opt = signs.iter().map(|s| 0.5 * LUNACEK_MU0 * s).collect();
                extra = Extra::Signs(signs);
            }
            _ => {}
        }

        Ok(BbobInstance {
            fid,
            instance,
            dim,
            x_opt,
            f_opt,
            rotation,
            second_rotation,
            extra,
        })
    }

    /// Gallagher peaks; returns the global peak's centre and the peak data.
    fn make_peaks(
        rng: &mut impl Rng,
        fid: u32,
        dim: usize,
        rotation: &DMatrix<f64>,
    ) -> (Vec<f64>, Peaks) {
        let (count, top_alpha, centre_bound, optimum_bound) = if fid == 21 {
            (101usize, 1000.0, 5.0, 4.0)
        } else {
            (21usize, 1000.0 * 1000.0, 4.9, 3.92)
        };
        let others = count - 1;
        let mut weights = vec![10.0];
        weights.extend((0..others).map(|i| 1.1 + 8.0 * i as f64 / (others - 1) as f64));

        let mut alphas = vec![top_alpha];
        let mut pool: Vec<f64> = (0..others)
            .map(|j| 1000f64.powf(2.0 * j as f64 / (others - 1) as f64))
            .collect();
        pool.shuffle(rng);
        alphas.extend(pool);

        let mut centres = Vec::with_capacity(count);
        centres.push(
            (0..dim)
                .map(|_| rng.random_range(-optimum_bound..=optimum_bound))
                .collect::<Vec<f64>>(),
        );
        for _ in 1..count {
            centres.push(
                (0..dim)
                    .map(|_| rng.random_range(-centre_bound..=centre_bound))
                    .collect(),
            );
        }
        let scales = alphas
            .iter()
            .map(|&alpha| {
                let mut diag = conditioning(alpha, dim);
                diag.shuffle(rng);
                let norm = alpha.powf(0.25);
                diag.iter().map(|v| v / norm).collect()
            })
            .collect();
        let rotated_centres = centres
            .iter()
            .map(|c| rotation * DVector::from_column_slice(c))
            .collect();
        let x_opt = centres[0].clone();
        (
            x_opt,
            Peaks {
                weights,
                rotated_centres,
                scales,
            },
        )
    }

    pub fn fid(&self) -> u32 {
        self.fid
    }

    pub fn instance(&self) -> u32 {
        self.instance
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x_opt(&self) -> &[f64] {
        &self.x_opt
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    pub fn rotation(&self) -> &DMatrix<f64> {
        &self.rotation
    }

    pub fn second_rotation(&self) -> &DMatrix<f64> {
        &self.second_rotation
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("evaluation point".into()));
        }
        Ok(self.value(x))
    }

    fn rotate(&self, v: &[f64]) -> Vec<f64> {
        (&self.rotation * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    fn rotate_second(&self, v: &[f64]) -> Vec<f64> {
        (&self.second_rotation * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    fn shifted(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.x_opt).map(|(a, b)| a - b).collect()
    }

    fn signs(&self) -> &[f64] {
        match &self.extra {
            Extra::Signs(s) => s,
            _ => unreachable!("function {} carries no sign vector", self.fid),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        let df = d as f64;
        let raw = match self.fid {
            1 => self.shifted(x).iter().map(|v| v * v).sum(),
            2 => {
                let mut z = self.shifted(x);
                t_osz(&mut z);
                ellipsoid_raw(&z)
            }
            3 => {
                let mut z = self.shifted(x);
                t_osz(&mut z);
                t_asy(&mut z, 0.2);
                scale(&mut z, &conditioning(10.0, d));
                rastrigin_raw(&z)
            }
            4 => {
                let mut z = self.shifted(x);
                t_osz(&mut z);
                let cond = conditioning(10.0, d);
                for (i, v) in z.iter_mut().enumerate() {
                    let boost = if *v > 0.0 && i % 2 == 0 { 10.0 } else { 1.0 };
                    *v *= boost * cond[i];
                }
                rastrigin_raw(&z) + 100.0 * penalty(x)
            }
            5 => {
                let cond = (0..d).map(|i| 10f64.powf(i as f64 / (d - 1) as f64));
                x.iter()
                    .zip(&self.x_opt)
                    .zip(cond)
                    .map(|((&xi, &oi), c)| {
                        let z = if oi * xi < 25.0 { xi } else { oi };
                        let s = oi.signum() * c;
                        5.0 * s.abs() - s * z
                    })
                    .sum()
            }
            6 => {
                let mut z = self.rotate(&self.shifted(x));
                scale(&mut z, &conditioning(10.0, d));
                let z = self.rotate_second(&z);
                let sum: f64 = z
                    .iter()
                    .zip(&self.x_opt)
                    .map(|(&v, &o)| if v * o > 0.0 { (100.0 * v).powi(2) } else { v * v })
                    .sum();
                t_osz_scalar(sum).powf(0.9)
            }
            7 => {
                let mut zh = self.rotate(&self.shifted(x));
                scale(&mut zh, &conditioning(10.0, d));
                let rounded: Vec<f64> = zh
                    .iter()
                    .map(|&v| {
                        if v.abs() > 0.5 {
                            (0.5 + v).floor()
                        } else {
                            (0.5 + 10.0 * v).floor() / 10.0
                        }
                    })
                    .collect();
                let z = self.rotate_second(&rounded);
                let ell: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| 10f64.powf(2.0 * i as f64 / (d - 1) as f64) * v * v)
                    .sum();
                0.1 * (zh[0].abs() / 1e4).max(ell) + penalty(x)
            }
            8 => {
                let c = 1f64.max(df.sqrt() / 8.0);
                let z: Vec<f64> = self.shifted(x).iter().map(|v| c * v + 1.0).collect();
                rosenbrock_raw(&z)
            }
            9 => {
                let c = 1f64.max(df.sqrt() / 8.0);
                let z: Vec<f64> = self.rotate(x).iter().map(|v| c * v + 0.5).collect();
                rosenbrock_raw(&z)
            }
            10 => {
                let mut z = self.rotate(&self.shifted(x));
                t_osz(&mut z);
                ellipsoid_raw(&z)
            }
            11 => {
                let mut z = self.rotate(&self.shifted(x));
                t_osz(&mut z);
                1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
            }
            12 => {
                let mut z = self.rotate(&self.shifted(x));
                t_asy(&mut z, 0.5);
                bent_cigar_raw(&self.rotate(&z))
            }
            13 => {
                let mut z = self.rotate(&self.shifted(x));
                scale(&mut z, &conditioning(10.0, d));
                let z = self.rotate_second(&z);
                z[0] * z[0] + 100.0 * z[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            14 => {
                let z = self.rotate(&self.shifted(x));
                z.iter()
                    .enumerate()
                    .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / (d - 1) as f64))
                    .sum::<f64>()
                    .sqrt()
            }
            15 => {
                let mut z = self.rotate(&self.shifted(x));
                t_osz(&mut z);
                t_asy(&mut z, 0.2);
                let mut z = self.rotate_second(&z);
                scale(&mut z, &conditioning(10.0, d));
                rastrigin_raw(&self.rotate(&z))
            }
            16 => {
                let mut z = self.rotate(&self.shifted(x));
                t_osz(&mut z);
                let mut z = self.rotate_second(&z);
                scale(&mut z, &conditioning(0.01, d));
                let z = self.rotate(&z);
                let terms: Vec<(f64, f64)> =
                    (0..12).map(|k| (0.5f64.powi(k), 3f64.powi(k))).collect();
                let f0: f64 = terms.iter().map(|(a, b)| a * (PI * b).cos()).sum();
                let inner: f64 = z
                    .iter()
                    .map(|v| {
                        terms
                            .iter()
                            .map(|(a, b)| a * (2.0 * PI * b * (v + 0.5)).cos())
                            .sum::<f64>()
                    })
                    .sum();
                10.0 * (inner / df - f0).powi(3) + 10.0 / df * penalty(x)
            }
            17 | 18 => {
                let alpha = if self.fid == 17 { 10.0 } else { 1000.0 };
                let mut z = self.rotate(&self.shifted(x));
                t_asy(&mut z, 0.5);
                let mut z = self.rotate_second(&z);
                scale(&mut z, &conditioning(alpha, d));
                schaffer_raw(&z) + 10.0 * penalty(x)
            }
            19 => {
                let c = 1f64.max(df.sqrt() / 8.0);
                let z: Vec<f64> = self.rotate(x).iter().map(|v| c * v + 0.5).collect();
                let sum: f64 = z
                    .windows(2)
                    .map(|w| {
                        let s = 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2);
                        s / 4000.0 - s.cos()
                    })
                    .sum();
                10.0 * sum / (df - 1.0) + 10.0
            }
            20 => {
                let signs = self.signs();
                let xh: Vec<f64> = x.iter().zip(signs).map(|(v, s)| 2.0 * s * v).collect();
                let two_opt: Vec<f64> = self.x_opt.iter().map(|v| 2.0 * v.abs()).collect();
                let mut zh = xh.clone();
                for i in 1..d {
                    zh[i] = xh[i] + 0.25 * (xh[i - 1] - two_opt[i - 1]);
                }
                let cond = conditioning(10.0, d);
                let z: Vec<f64> = (0..d)
                    .map(|i| 100.0 * (cond[i] * (zh[i] - two_opt[i]) + two_opt[i]))
                    .collect();
                let sum: f64 = z.iter().map(|v| v * v.abs().sqrt().sin()).sum();
                let scaled: Vec<f64> = z.iter().map(|v| v / 100.0).collect();
                -sum / (100.0 * df) + SCHWEFEL_CONSTANT + 100.0 * penalty(&scaled)
            }
            21 | 22 => {
                let Extra::Peaks(peaks) = &self.extra else {
                    unreachable!("Gallagher instance without peaks")
                };
                let z = &self.rotation * DVector::from_column_slice(x);
                let best = peaks
                    .weights
                    .iter()
                    .zip(&peaks.rotated_centres)
                    .zip(&peaks.scales)
                    .map(|((w, c), s)| {
                        let q: f64 = z
                            .iter()
                            .zip(c.iter())
                            .zip(s)
                            .map(|((a, b), s)| s * (a - b) * (a - b))
                            .sum();
                        w * (-q / (2.0 * df)).exp()
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                t_osz_scalar(10.0 - best).powi(2) + penalty(x)
            }
            23 => {
                let mut z = self.rotate(&self.shifted(x));
                scale(&mut z, &conditioning(100.0, d));
                let z = self.rotate_second(&z);
                let exponent = 10.0 / df.powf(1.2);
                let product: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let s: f64 = (1..=32)
                            .map(|j| {
                                let p = 2f64.powi(j);
                                (p * v - (p * v).round()).abs() / p
                            })
                            .sum();
                        (1.0 + (i + 1) as f64 * s).powf(exponent)
                    })
                    .product();
                10.0 / (df * df) * (product - 1.0) + penalty(x)
            }
            24 => {
                let signs = self.signs();
                let mu0 = LUNACEK_MU0;
                let s = 1.0 - 1.0 / (2.0 * (df + 20.0).sqrt() - 8.2);
                let mu1 = -((mu0 * mu0 - 1.0) / s).sqrt();
                let xh: Vec<f64> = x.iter().zip(signs).map(|(v, sg)| 2.0 * sg * v).collect();
                let first: f64 = xh.iter().map(|v| (v - mu0).powi(2)).sum();
                let second: f64 = df + s * xh.iter().map(|v| (v - mu1).powi(2)).sum::<f64>();
                let centred: Vec<f64> = xh.iter().map(|v| v - mu0).collect();
                let mut z = self.rotate(&centred);
                scale(&mut z, &conditioning(100.0, d));
                let z = self.rotate_second(&z);
                let cosines: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum();
                first.min(second) + 10.0 * (df - cosines) + 1e4 * penalty(x)
            }
            _ => unreachable!("fid validated at construction"),
        };
        raw + self.f_opt
    }
}

/// LHS sample of `n` points in `[−5, 5]^dim` evaluated on one instance.
pub fn bbob_sample(inst: &BbobInstance, n: usize, seed: u64) -> Result<MinimizationSample> {
    let space = DesignSpace::real_box(inst.dim(), -5.0, 5.0)?;
    let design = lhs_sample(&DoePlan { space, n, seed })?.design;
    let y = design.iter().map(|x| inst.value(x)).collect();
    MinimizationSample::new(design, y)
}

#[derive(Debug, Clone)]
pub struct BbobTableSettings {
    pub dim: usize,
    pub fids: Vec<u32>,
    pub instances: Vec<u32>,
    pub n: usize,
    pub seed: u64,
}

impl Default for BbobTableSettings {
    fn default() -> Self {
        BbobTableSettings {
            dim: 23,
            fids: (1..=NUM_FUNCTIONS).collect(),
            instances: (1..=20).collect(),
            n: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbobFeatureRow {
    pub fid: u32,
    pub instance: u32,
    pub features: LandscapeFeatures,
}

impl BbobFeatureRow {
    pub fn label(&self) -> String {
        format!("bbob-f{}-i{}", self.fid, self.instance)
    }
}

/// Seeds for the design and the information-content tour of one instance.
pub fn instance_seeds(seed: u64, fid: u32, instance: u32) -> (u64, u64) {
    let base = derive_seed(derive_seed(seed, fid as u64), instance as u64);
    (derive_seed(base, 0), derive_seed(base, 1))
}

/// Features of every `(fid, instance)` pair, ordered by fid then instance.
/// Pairs are computed in parallel; the result does not depend on scheduling.
pub fn bbob_feature_table(settings: &BbobTableSettings) -> Result<Vec<BbobFeatureRow>> {
    let jobs: Vec<(u32, u32)> = settings
        .fids
        .iter()
        .flat_map(|&f| settings.instances.iter().map(move |&i| (f, i)))
        .collect();
    jobs.par_iter()
        .map(|&(fid, instance)| {
            let (design_seed, tour_seed) = instance_seeds(settings.seed, fid, instance);
            let inst = BbobInstance::new(fid, instance, settings.dim)?;
            let sample = bbob_sample(&inst, settings.n, design_seed)?;
            let features = compute_all(&sample, &IcSettings::with_seed(tour_seed))
                .map_err(|e| e.context(format!("BBOB fid {fid}, instance {instance}")))?;
            Ok(BbobFeatureRow { fid, instance, features })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = rng_from_seed(seed);
        (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-5.0..=5.0)).collect())
            .collect()
    }

    #[test]
    fn optimum_value_is_reached() {
        for fid in 1..=NUM_FUNCTIONS {
            for dim in [2, 5, 23] {
                let inst = BbobInstance::new(fid, 1, dim).unwrap();
                let f = inst.evaluate(inst.x_opt()).unwrap();
                let tol = 1e-9 * inst.f_opt().abs().max(1.0);
                assert!((f - inst.f_opt()).abs() <= tol, "f{fid} d{dim}: {f} vs {}", inst.f_opt());
                assert!(inst.x_opt().iter().all(|v| v.abs() <= 5.0));
            }
        }
    }

    #[test]
    fn no_random_point_beats_the_optimum() {
        for fid in 1..=NUM_FUNCTIONS {
            let inst = BbobInstance::new(fid, 3, 5).unwrap();
            let floor = inst.f_opt() - 1e-8 * inst.f_opt().abs().max(1.0);
            for x in random_points(2000, 5, fid as u64) {
                let f = inst.evaluate(&x).unwrap();
                assert!(f.is_finite() && f >= floor, "f{fid}: {f} < {}", inst.f_opt());
            }
        }
    }

    #[test]
    fn rotations_are_orthogonal() {
        let inst = BbobInstance::new(15, 2, 23).unwrap();
        for m in [inst.rotation(), inst.second_rotation()] {
            let err = (m.transpose() * m - DMatrix::identity(23, 23)).abs().max();
            assert!(err <= 1e-10, "{err}");
        }
    }

    #[test]
    fn sphere_is_isotropic() {
        let inst = BbobInstance::new(1, 4, 6).unwrap();
        let mut x = inst.x_opt().to_vec();
        x[0] += 1.0;
        assert!((inst.evaluate(&x).unwrap() - inst.f_opt() - 1.0).abs() < 1e-9);

        let u = [0.6, 0.0, -0.8, 0.0, 0.0, 0.0];
        for t in [0.1, 0.7, 2.0] {
            let x: Vec<f64> = inst.x_opt().iter().zip(u).map(|(o, u)| o + t * u).collect();
            let f = inst.evaluate(&x).unwrap();
            assert!((f - inst.f_opt() - t * t).abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_is_separable() {
        let inst = BbobInstance::new(1, 1, 4).unwrap();
        let x = [1.0, -2.0, 0.5, 3.0];
        let perm = [2, 0, 3, 1];
        let shift: Vec<f64> = x.iter().zip(inst.x_opt()).map(|(a, b)| a - b).collect();
        let permuted_shift: Vec<f64> = perm.iter().map(|&p| shift[p]).collect();
        let permuted_opt: Vec<f64> = perm.iter().map(|&p| inst.x_opt()[p]).collect();
        let xp: Vec<f64> = permuted_shift.iter().zip(&permuted_opt).map(|(a, b)| a + b).collect();
        let a = inst.evaluate(&x).unwrap() - inst.f_opt();
        let b: f64 = xp.iter().zip(&permuted_opt).map(|(a, b)| (a - b).powi(2)).sum();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn bent_cigar_penalizes_non_leading_coordinates() {
        let mut lead = vec![0.0; 23];
        lead[0] = 0.3;
        let mut other = vec![0.0; 23];
        other[7] = 0.3;
        assert!((bent_cigar_raw(&other) / bent_cigar_raw(&lead) - 1e6).abs() < 1e-6);
        assert_eq!(function_name(12), Some("Bent Cigar"));
    }

    #[test]
    fn deterministic_and_validated() {
        let a = BbobInstance::new(21, 7, 10).unwrap();
        let b = BbobInstance::new(21, 7, 10).unwrap();
        let x = random_points(1, 10, 99).pop().unwrap();
        assert_eq!(a.evaluate(&x).unwrap().to_bits(), b.evaluate(&x).unwrap().to_bits());
        assert_ne!(BbobInstance::new(21, 8, 10).unwrap().f_opt(), a.f_opt());
        assert!(matches!(BbobInstance::new(25, 1, 2), Err(Error::UnknownFunction(25))));
        assert!(matches!(BbobInstance::new(0, 1, 2), Err(Error::UnknownFunction(0))));
        assert!(matches!(a.evaluate(&[0.0; 3]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn small_feature_table() {
        let settings = BbobTableSettings {
            dim: 2,
            fids: vec![1, 12],
            instances: vec![1, 2],
            n: 200,
            seed: 5,
        };
        let rows = bbob_feature_table(&settings).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].fid, rows[0].instance), (1, 1));
        assert_eq!((rows[3].fid, rows[3].instance), (12, 2));
        assert!(rows[0].features.quad_simple_adj_r2 >= 0.999);
        assert_eq!(rows, bbob_feature_table(&settings).unwrap());
        assert_eq!(rows[2].label(), "bbob-f12-i1");
    }
}
