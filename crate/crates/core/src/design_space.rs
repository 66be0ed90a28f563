//! The architecture hyper-parameter space: typed, bounded parameters, the two
//! built-in ranges, affine rescaling onto a common box and data-driven range
//! reduction from the best-performing designs.
//!
//! Every range is half-open, `(lo, hi]`. Integer parameters hold integral
//! values inside that interval.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter names in canonical column order.
pub const CANONICAL_NAMES: [&str; 23] = [
    "filters_0",
    "filters_1",
    "filters_2",
    "k_0",
    "k_1",
    "k_2",
    "k_3",
    "k_4",
    "k_5",
    "s_0",
    "s_1",
    "s_2",
    "dense_size_0",
    "dense_size_1",
    "dropout_0",
    "dropout_1",
    "dropout_2",
    "dropout_3",
    "dropout_4",
    "dropout_5",
    "dropout_6",
    "lr",
    "l2",
];

pub const NUM_PARAMETERS: usize = CANONICAL_NAMES.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Integer,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    pub kind: ParamKind,
    /// Exclusive lower bound.
    pub lo: f64,
    /// Inclusive upper bound.
    pub hi: f64,
}

impl ParameterSpec {
    pub fn new(name: impl Into<String>, kind: ParamKind, lo: f64, hi: f64) -> Self {
        ParameterSpec {
            name: name.into(),
            kind,
            lo,
            hi,
        }
    }

    pub fn integer(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self::new(name, ParamKind::Integer, lo, hi)
    }

    pub fn real(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self::new(name, ParamKind::Real, lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Smallest and largest integers inside `(lo, hi]`.
    fn integer_span(&self) -> (f64, f64) {
        (self.lo.floor() + 1.0, self.hi.floor())
    }

    /// Number of integers in `(lo, hi]`.
    pub fn integer_count(&self) -> usize {
        let (first, last) = self.integer_span();
        if last < first {
            0
        } else {
            (last - first) as usize + 1
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        let inside = value > self.lo && value <= self.hi;
        match self.kind {
            ParamKind::Real => inside,
            ParamKind::Integer => inside && value.fract() == 0.0,
        }
    }

    /// Maps a continuous value inside the range onto a legal value of this
    /// parameter. Integers round to nearest and are clamped into `(lo, hi]`.
    pub fn quantize(&self, value: f64) -> f64 {
        match self.kind {
            ParamKind::Real => value,
            ParamKind::Integer => {
                let (first, last) = self.integer_span();
                value.round().clamp(first, last)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidSpace(format!(
                "parameter {} has non-finite bounds",
                self.name
            )));
        }
        if self.lo >= self.hi {
            return Err(Error::InvalidSpace(format!(
                "parameter {} needs lo < hi, got ({}, {}]",
                self.name, self.lo, self.hi
            )));
        }
        if self.kind == ParamKind::Integer && self.integer_count() < 2 {
            return Err(Error::InvalidSpace(format!(
                "integer parameter {} has fewer than two values in ({}, {}]",
                self.name, self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Which column of the built-in range table to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinRange {
    Initial,
    Reduced,
}

impl std::str::FromStr for BuiltinRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "initial" => Ok(BuiltinRange::Initial),
            "reduced" => Ok(BuiltinRange::Reduced),
            other => Err(Error::InvalidInput(format!(
                "unknown built-in space {other:?} (expected initial or reduced)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct DesignSpace {
    parameters: Vec<ParameterSpec>,
}

#[derive(Deserialize)]
struct RawSpace {
    parameters: Vec<ParameterSpec>,
}

impl TryFrom<RawSpace> for DesignSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        DesignSpace::new(raw.parameters)
    }
}

impl DesignSpace {
    /// Builds a space from arbitrary parameters, checking bounds and name
    /// uniqueness. Use [`DesignSpace::require_canonical`] when the 23
    /// architecture parameters are expected.
    pub fn new(parameters: Vec<ParameterSpec>) -> Result<Self> {
        if parameters.is_empty() {
            return Err(Error::InvalidSpace("no parameters".into()));
        }
        let mut seen = HashSet::new();
        for p in &parameters {
            p.validate()?;
            if !seen.insert(p.name.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate parameter {}", p.name)));
            }
        }
        Ok(DesignSpace { parameters })
    }

    /// Box of `dim` real parameters `x0..` over `(lo, hi]`.
    pub fn real_box(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(
            (0..dim)
                .map(|i| ParameterSpec::real(format!("x{i}"), lo, hi))
                .collect(),
        )
    }

    pub fn builtin(which: BuiltinRange) -> Self {
        use BuiltinRange::*;
        let (filters, kernel, stride, dense, dropout, lr, l2) = match which {
            Initial => (
                (10.0, 600.0),
                (1.0, 8.0),
                (1.0, 5.0),
                (0.0, 2000.0),
                (1e-5, 9e-1),
                (1e-5, 1e-2),
                (1e-5, 1e-2),
            ),
            Reduced => (
                (250.0, 400.0),
                (3.0, 7.0),
                (2.0, 5.0),
                (500.0, 1500.0),
                (1e-1, 4e-1),
                (4e-3, 9e-3),
                (5e-4, 3e-3),
            ),
        };
        let parameters = CANONICAL_NAMES
            .iter()
            .map(|&name| {
                let (kind, (lo, hi)) = match name.rsplit_once('_').map_or(name, |(head, _)| head) {
                    "filters" => (ParamKind::Integer, filters),
                    "k" => (ParamKind::Integer, kernel),
                    "s" => (ParamKind::Integer, stride),
                    "dense_size" => (ParamKind::Integer, dense),
                    "dropout" => (ParamKind::Real, dropout),
                    "lr" => (ParamKind::Real, lr),
                    "l2" => (ParamKind::Real, l2),
                    _ => unreachable!("every canonical name has a family"),
                };
                ParameterSpec::new(name, kind, lo, hi)
            })
            .collect();
        DesignSpace { parameters }
    }

    pub fn parameters(&self) -> &[ParameterSpec] {
        &self.parameters
    }

    pub fn dim(&self) -> usize {
        self.parameters.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.parameters.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn is_canonical(&self) -> bool {
        self.parameters.len() == NUM_PARAMETERS
            && self
                .parameters
                .iter()
                .zip(CANONICAL_NAMES)
                .all(|(p, name)| p.name == name)
    }

    pub fn require_canonical(&self) -> Result<()> {
        if self.is_canonical() {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!(
                "expected the {NUM_PARAMETERS} canonical parameters in order, got [{}]",
                self.names().join(", ")
            )))
        }
    }

    /// Every row must lie inside the box; integer columns must be integral.
    pub fn check_rows(&self, rows: &[Vec<f64>]) -> Result<()> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: row.len(),
                });
            }
            for (c, (&value, p)) in row.iter().zip(&self.parameters).enumerate() {
                if !p.contains(value) {
                    return Err(Error::OutOfBounds {
                        row: r,
                        column: c,
                        name: p.name.clone(),
                        value,
                        lo: p.lo,
                        hi: p.hi,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A design matrix together with its measured responses.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedDoe {
    pub x: Vec<Vec<f64>>,
    pub accuracy: Vec<f64>,
    pub cpu_time: Option<Vec<f64>>,
    pub dataset: String,
}

impl EvaluatedDoe {
    pub fn new(
        x: Vec<Vec<f64>>,
        accuracy: Vec<f64>,
        cpu_time: Option<Vec<f64>>,
        dataset: impl Into<String>,
    ) -> Result<Self> {
        if accuracy.len() != x.len() {
            return Err(Error::InvalidInput(format!(
                "{} design rows but {} accuracy values",
                x.len(),
                accuracy.len()
            )));
        }
        if let Some(t) = &cpu_time {
            if t.len() != x.len() {
                return Err(Error::InvalidInput(format!(
                    "{} design rows but {} cpu_time values",
                    x.len(),
                    t.len()
                )));
            }
        }
        Ok(EvaluatedDoe {
            x,
            accuracy,
            cpu_time,
            dataset: dataset.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Checks rows against the space and responses against their ranges.
    pub fn validate(&self, space: &DesignSpace) -> Result<()> {
        space.check_rows(&self.x)?;
        for (r, &a) in self.accuracy.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Schema {
                    row: Some(r),
                    column: Some("accuracy".into()),
                    message: format!("accuracy {a} outside [0, 1]"),
                });
            }
        }
        if let Some(times) = &self.cpu_time {
            for (r, &t) in times.iter().enumerate() {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Schema {
                        row: Some(r),
                        column: Some("cpu_time".into()),
                        message: format!("cpu_time {t} is not a non-negative number"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Row indices ordered from best to worst accuracy; ties keep row order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.accuracy[b].total_cmp(&self.accuracy[a]));
        order
    }

    /// The `k` best rows by accuracy.
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut order = self.ranking();
        order.truncate(k);
        order
    }
}

/// Affine per-column map from the space's box onto `[target_lo, target_hi]`.
pub fn rescale_to_box(
    x: &[Vec<f64>],
    space: &DesignSpace,
    target_lo: f64,
    target_hi: f64,
) -> Result<Vec<Vec<f64>>> {
    let span = target_hi - target_lo;
    x.iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: row.len(),
                });
            }
            row.iter()
                .zip(space.parameters())
                .enumerate()
                .map(|(c, (&v, p))| {
                    if !(v > p.lo && v <= p.hi) {
                        return Err(Error::OutOfBounds {
                            row: r,
                            column: c,
                            name: p.name.clone(),
                            value: v,
                            lo: p.lo,
                            hi: p.hi,
                        });
                    }
                    Ok(target_lo + (v - p.lo) * span / p.width())
                })
                .collect()
        })
        .collect()
}

/// Inverse of [`rescale_to_box`].
pub fn rescale_from_box(
    z: &[Vec<f64>],
    space: &DesignSpace,
    target_lo: f64,
    target_hi: f64,
) -> Vec<Vec<f64>> {
    let span = target_hi - target_lo;
    z.iter()
        .map(|row| {
            row.iter()
                .zip(space.parameters())
                .map(|(&v, p)| p.lo + (v - target_lo) * p.width() / span)
                .collect()
        })
        .collect()
}

/// Narrows every parameter to the observed range over the `k` most accurate
/// rows. Bounds are the empirical minimum and maximum with no widening.
pub fn reduce_range(doe: &EvaluatedDoe, space: &DesignSpace, k: usize) -> Result<DesignSpace> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("top-k size must be at least 2, got {k}")));
    }
    if doe.len() < k {
        return Err(Error::InsufficientData(format!(
            "range reduction needs at least {k} rows, got {}",
            doe.len()
        )));
    }
    let top = doe.top_k(k);
    let parameters = space
        .parameters()
        .iter()
        .enumerate()
        .map(|(c, p)| {
            let (lo, hi) = top.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                let v = doe.x[r][c];
                (lo.min(v), hi.max(v))
            });
            ParameterSpec::new(p.name.clone(), p.kind, lo, hi)
        })
        .collect();
    DesignSpace::new(parameters)
        .map_err(|e| e.context(format!("top-{k} rows do not span a valid space")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_doe() -> (DesignSpace, EvaluatedDoe) {
        let space = DesignSpace::new(vec![
            ParameterSpec::real("dropout_0", 0.0, 1.0),
            ParameterSpec::integer("k_0", 1.0, 8.0),
        ])
        .unwrap();
        let x = vec![
            vec![0.1, 3.0],
            vec![0.9, 8.0],
            vec![0.4, 5.0],
            vec![0.25, 2.0],
            vec![0.7, 7.0],
        ];
        let acc = vec![0.95, 0.2, 0.97, 0.96, 0.5];
        let doe = EvaluatedDoe::new(x, acc, None, "toy").unwrap();
        (space, doe)
    }

    #[test]
    fn builtin_ranges() {
        let initial = DesignSpace::builtin(BuiltinRange::Initial);
        let reduced = DesignSpace::builtin(BuiltinRange::Reduced);
        assert!(initial.is_canonical());
        assert!(reduced.is_canonical());
        assert_eq!(initial.names(), reduced.names());

        let p = &initial.parameters()[0];
        assert_eq!((p.name.as_str(), p.lo, p.hi), ("filters_0", 10.0, 600.0));
        let p = &initial.parameters()[17];
        assert_eq!((p.name.as_str(), p.lo, p.hi), ("dropout_3", 1e-5, 9e-1));
        assert_eq!(p.kind, ParamKind::Real);
        let p = &reduced.parameters()[21];
        assert_eq!((p.name.as_str(), p.lo, p.hi), ("lr", 4e-3, 9e-3));
        let p = &reduced.parameters()[8];
        assert_eq!((p.name.as_str(), p.lo, p.hi), ("k_5", 3.0, 7.0));
        assert_eq!(p.kind, ParamKind::Integer);

        let count = |kind| initial.parameters().iter().filter(|p| p.kind == kind).count();
        assert_eq!(count(ParamKind::Integer), 3 + 6 + 3 + 2);
        assert_eq!(count(ParamKind::Real), 7 + 1 + 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DesignSpace::new(vec![ParameterSpec::real("a", 1.0, 1.0)]).is_err());
        assert!(DesignSpace::new(vec![ParameterSpec::integer("a", 1.0, 2.0)]).is_err());
        assert!(DesignSpace::new(vec![ParameterSpec::integer("a", 1.0, 3.0)]).is_ok());
        assert!(DesignSpace::new(vec![
            ParameterSpec::real("a", 0.0, 1.0),
            ParameterSpec::real("a", 0.0, 2.0)
        ])
        .is_err());
        assert!(DesignSpace::real_box(3, -5.0, 5.0).unwrap().require_canonical().is_err());
    }

    #[test]
    fn quantize_clamps_into_half_open_range() {
        let p = ParameterSpec::integer("k", 1.0, 8.0);
        assert_eq!(p.quantize(1.2), 2.0);
        assert_eq!(p.quantize(4.5), 5.0);
        assert_eq!(p.quantize(8.0), 8.0);
        let p = ParameterSpec::integer("d", 0.0, 2000.0);
        assert_eq!(p.quantize(0.3), 1.0);
    }

    #[test]
    fn rescale_endpoints_and_midpoint() {
        let space = DesignSpace::builtin(BuiltinRange::Initial);
        let his: Vec<f64> = space.parameters().iter().map(|p| p.hi).collect();
        let out = rescale_to_box(&[his], &space, -5.0, 5.0).unwrap();
        assert!(out[0].iter().all(|&v| (v - 5.0).abs() < 1e-12));

        let mids: Vec<f64> = space.parameters().iter().map(|p| 0.5 * (p.lo + p.hi)).collect();
        let out = rescale_to_box(&[mids], &space, -5.0, 5.0).unwrap();
        assert!(out[0].iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn rescale_filters_example() {
        let space = DesignSpace::new(vec![ParameterSpec::integer("filters_0", 10.0, 600.0)]).unwrap();
        let out = rescale_to_box(&[vec![305.0]], &space, -5.0, 5.0).unwrap();
        assert_eq!(out[0][0], 0.0);
    }

    #[test]
    fn rescale_reports_position_of_bad_entry() {
        let space = DesignSpace::real_box(2, 0.0, 1.0).unwrap();
        let err = rescale_to_box(&[vec![0.5, 0.5], vec![0.5, 0.0]], &space, -5.0, 5.0).unwrap_err();
        match err {
            Error::OutOfBounds { row, column, .. } => assert_eq!((row, column), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reduce_range_with_k_equal_n_is_data_range() {
        let (space, doe) = toy_doe();
        let reduced = reduce_range(&doe, &space, doe.len()).unwrap();
        let p = &reduced.parameters()[0];
        assert_eq!((p.lo, p.hi), (0.1, 0.9));
        let p = &reduced.parameters()[1];
        assert_eq!((p.lo, p.hi, p.kind), (2.0, 8.0, ParamKind::Integer));
    }

    #[test]
    fn reduce_range_top_three() {
        let (space, doe) = toy_doe();
        // brute force: the three best accuracies are rows 2, 3, 0
        let reduced = reduce_range(&doe, &space, 3).unwrap();
        let p = &reduced.parameters()[0];
        assert_eq!((p.lo, p.hi), (0.1, 0.4));
        let p = &reduced.parameters()[1];
        assert_eq!((p.lo, p.hi), (2.0, 5.0));
    }

    #[test]
    fn reduce_range_needs_enough_rows() {
        let (space, doe) = toy_doe();
        assert!(matches!(
            reduce_range(&doe, &space, 6),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn ranking_breaks_ties_by_row_index() {
        let doe = EvaluatedDoe::new(
            vec![vec![0.0]; 4],
            vec![0.5, 0.9, 0.5, 0.9],
            None,
            "ties",
        )
        .unwrap();
        assert_eq!(doe.ranking(), vec![1, 3, 0, 2]);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let space = DesignSpace::builtin(BuiltinRange::Reduced);
        let text = space.to_json().unwrap();
        assert!(text.contains("\"kind\": \"integer\""));
        assert_eq!(DesignSpace::from_json(&text).unwrap(), space);
        let bad = r#"{"parameters":[{"name":"a","kind":"real","lo":2.0,"hi":1.0}]}"#;
        assert!(DesignSpace::from_json(bad).is_err());
    }

    #[test]
    fn validate_checks_integrality_and_accuracy() {
        let (space, mut doe) = toy_doe();
        doe.validate(&space).unwrap();
        doe.x[0][1] = 3.5;
        assert!(matches!(doe.validate(&space), Err(Error::OutOfBounds { row: 0, column: 1, .. })));
        doe.x[0][1] = 3.0;
        doe.accuracy[2] = 1.5;
        assert!(matches!(doe.validate(&space), Err(Error::Schema { row: Some(2), .. })));
    }
}
