//! On-disk formats: JSON for measures, spectral and interior data, CSV for
//! plot series. Floats are written with 17 significant digits so that a
//! write/read cycle is bit-exact.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

use crate::error::{Error, Result};
use crate::forward::{InteriorData, SpectralData};
use crate::measures::{PeakonMeasure, RawPoint};
use crate::tolerances::Tolerances;

/// Compact JSON with every f64 as `d.dddddddddddddddde±x`; non-finite values become null.
struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            CompactFormatter.write_null(w)
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json writes utf-8"))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad {what} JSON: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub points: Vec<RawPoint>,
}

impl From<&PeakonMeasure> for MeasureFile {
    fn from(m: &PeakonMeasure) -> Self {
        MeasureFile { points: m.to_raw() }
    }
}

pub fn read_measure(text: &str, tol: &Tolerances) -> Result<PeakonMeasure> {
    let f: MeasureFile = parse(text, "measure")?;
    PeakonMeasure::validate(&f.points, tol)
}

pub fn measure_json(m: &PeakonMeasure) -> Result<String> {
    to_json(&MeasureFile::from(m))
}

pub fn read_spectral(text: &str) -> Result<SpectralData> {
    let sd: SpectralData = parse(text, "spectral data")?;
    sd.validate()?;
    Ok(sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub lambda: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorFile {
    pub a: f64,
    pub pairs: Vec<Pair>,
}

impl From<&InteriorData> for InteriorFile {
    fn from(d: &InteriorData) -> Self {
        let pairs = d.eigenvalues.iter().zip(&d.phi).map(|(&lambda, &phi)| Pair { lambda, phi }).collect();
        InteriorFile { a: d.a, pairs }
    }
}

impl From<InteriorFile> for InteriorData {
    fn from(f: InteriorFile) -> Self {
        InteriorData {
            a: f.a,
            eigenvalues: f.pairs.iter().map(|p| p.lambda).collect(),
            phi: f.pairs.iter().map(|p| p.phi).collect(),
        }
    }
}

/// Interior data; pairs may come in any order and are sorted by lambda.
pub fn read_interior(text: &str) -> Result<InteriorData> {
    let mut f: InteriorFile = parse(text, "interior data")?;
    f.pairs.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
    let d = InteriorData::from(f);
    d.validate()?;
    Ok(d)
}

pub fn interior_json(d: &InteriorData) -> Result<String> {
    to_json(&InteriorFile::from(d))
}

/// `t,x,u` rows with a fixed header.
pub fn trajectory_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("t,x,u\n");
    for (t, x, u) in rows {
        out.push_str(&format!("{t:.16e},{x:.16e},{u:.16e}\n"));
    }
    out
}
