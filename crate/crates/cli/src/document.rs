//! The JSON input/output document.
//!
//! ```json
//! {
//!   "n": 3,
//!   "points": [[0, 0], [1, 0], [0.5, 0.8660254037844386], "inf"],
//!   "flags": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]],
//!   "config": { "K": 30, "L": 4, "seed": 11, "tol": 0.01,
//!               "eps_schedule": { "kind": "geometric", "initial": 1, "ratio": 0.5 },
//!               "drift": { "kind": "diagonal", "alpha": 0.1 } }
//! }
//! ```
//!
//! Matrices are lists of rows and complex numbers are `[re, im]`. Flags are
//! column-adapted: the first `i` columns span the `i`-dimensional member.

use std::io::Write;

use flagvol::geom::{Flag, ProjectivePoint};
use flagvol::linalg::{CMat, C64};
use flagvol::rigidity::{Drift, EpsSchedule};
use serde::{Deserialize, Serialize};

use crate::output::fmt_num;
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRepr {
    Finite([f64; 2]),
    Named(String),
}

pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointRepr>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub words: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_schedule: Option<EpsRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftRepr>,
    /// Objective evaluations for `maximize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsRepr {
    Zero,
    Halving,
    Constant { value: f64 },
    Geometric { initial: f64, ratio: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftRepr {
    None,
    Diagonal { alpha: f64 },
    Random { scale: f64 },
}

impl From<&EpsRepr> for EpsSchedule {
    fn from(e: &EpsRepr) -> Self {
        match *e {
            EpsRepr::Zero => EpsSchedule::Zero,
            EpsRepr::Halving => EpsSchedule::halving(),
            EpsRepr::Constant { value } => EpsSchedule::Constant(value),
            EpsRepr::Geometric { initial, ratio } => EpsSchedule::Geometric { initial, ratio },
        }
    }
}

impl From<&DriftRepr> for Drift {
    fn from(d: &DriftRepr) -> Self {
        match *d {
            DriftRepr::None => Drift::None,
            DriftRepr::Diagonal { alpha } => Drift::Diagonal(alpha),
            DriftRepr::Random { scale } => Drift::Random { scale },
        }
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::schema(e.to_string()))
    }

    pub fn config(&self) -> ExperimentConfig {
        self.config.clone().unwrap_or_default()
    }

    pub fn projective_points(&self) -> Result<Vec<ProjectivePoint>, CliError> {
        self.points.iter().enumerate().map(|(i, p)| point_from_repr(p, i)).collect()
    }

    pub fn flag_list(&self) -> Result<Vec<Flag>, CliError> {
        let flags: Vec<Flag> = self
            .flags
            .iter()
            .enumerate()
            .map(|(i, m)| flag_from_repr(m, i))
            .collect::<Result<_, _>>()?;
        if let (Some(n), Some(f)) = (self.n, flags.first()) {
            if f.dim() != n {
                return Err(CliError::schema(format!("flags are {}-dimensional but n = {n}", f.dim())));
            }
        }
        Ok(flags)
    }

    /// Serialize with every number printed to 17 significant digits.
    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut ser = serde_json::Serializer::with_formatter(out, SigFigFormatter::default());
        self.serialize(&mut ser).map_err(|e| CliError::io(e.to_string()))
    }
}

pub fn point_to_repr(p: &ProjectivePoint) -> PointRepr {
    match p.to_complex() {
        Some(z) => PointRepr::Finite([z.re, z.im]),
        None => PointRepr::Named("inf".into()),
    }
}

pub fn matrix_to_repr(m: &CMat) -> MatrixRepr {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn point_from_repr(p: &PointRepr, i: usize) -> Result<ProjectivePoint, CliError> {
    match p {
        PointRepr::Finite([re, im]) if re.is_finite() && im.is_finite() => {
            Ok(ProjectivePoint::finite(C64::new(*re, *im)))
        }
        PointRepr::Finite(_) => Err(CliError::schema(format!("points[{i}] is not finite"))),
        PointRepr::Named(s) if s == "inf" => Ok(ProjectivePoint::infinity()),
        PointRepr::Named(s) => Err(CliError::schema(format!("points[{i}]: unknown point {s:?}"))),
    }
}

fn flag_from_repr(m: &MatrixRepr, i: usize) -> Result<Flag, CliError> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(CliError::schema(format!("flags[{i}] is not a nonempty square matrix")));
    }
    let mat = CMat::from_fn(n, n, |r, c| C64::new(m[r][c][0], m[r][c][1]));
    Flag::from_columns(mat).map_err(|e| CliError::module(e).context(format!("flags[{i}]")))
}

/// JSON formatter printing floats with 17 significant digits.
#[derive(Default)]
struct SigFigFormatter {
    inner: serde_json::ser::CompactFormatter,
}

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn write_u64<W: ?Sized + Write>(&mut self, writer: &mut W, value: u64) -> std::io::Result<()> {
        self.inner.write_u64(writer, value)
    }
}
