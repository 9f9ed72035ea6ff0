//! JSON file formats.
//!
//! Matrices are `{"n": 2, "re": [[..],[..]], "im": [[..],[..]]}`; non-square
//! matrices carry `"rows"`/`"cols"` instead of `"n"`. `"im"` may be omitted on
//! input. Writers go through [`to_json_string`], which prints every float with
//! 17 significant digits so output is byte-stable and round-trips exactly.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::{self, DeserializeOwned};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::matrix::{validate_density, ComplexMatrix, DensityState, C64};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

impl From<&ComplexMatrix> for MatrixRepr {
    fn from(m: &ComplexMatrix) -> Self {
        let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        let (n, rows, cols) = if m.is_square() {
            (Some(m.rows()), None, None)
        } else {
            (None, Some(m.rows()), Some(m.cols()))
        };
        Self {
            n,
            rows,
            cols,
            re: part(|z| z.re),
            im: Some(part(|z| z.im)),
        }
    }
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        let rows = r.rows.or(r.n).unwrap_or(r.re.len());
        let cols = r.cols.or(r.n).unwrap_or_else(|| r.re.first().map_or(0, Vec::len));
        let shape_err = |what: &str| Error::Argument(format!("{what} does not match shape {rows}x{cols}"));
        if r.re.len() != rows || r.re.iter().any(|row| row.len() != cols) {
            return Err(shape_err("\"re\""));
        }
        if let Some(im) = &r.im {
            if im.len() != rows || im.iter().any(|row| row.len() != cols) {
                return Err(shape_err("\"im\""));
            }
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let im = r.im.as_ref().map_or(0.0, |m| m[i][j]);
                data.push(C64::new(r.re[i][j], im));
            }
        }
        ComplexMatrix::new(rows, cols, data)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        ComplexMatrix::try_from(r).map_err(de::Error::custom)
    }
}

impl Serialize for DensityState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: &ComplexMatrix = self;
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        validate_density(&m).map_err(de::Error::custom)
    }
}

/// Wraps a serde_json formatter so floats print as `{:.16e}`.
struct FullPrecision<F>(F);

impl<F: Formatter> Formatter for FullPrecision<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn render<T: Serialize + ?Sized, F: Formatter>(value: &T, fmt: F) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(fmt));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Compact JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    render(value, CompactFormatter)
}

/// Indented JSON with 17-significant-digit floats.
pub fn to_json_string_pretty<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    render(value, PrettyFormatter::new())
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut s = to_json_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    read_json(path)
}

/// Reads a matrix file and validates it as a density matrix, reporting every
/// violated invariant.
pub fn read_state(path: impl AsRef<Path>) -> Result<DensityState> {
    let m = read_matrix(path)?;
    validate_density(&m)
}
