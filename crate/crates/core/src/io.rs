//! Plain-text file schemas: labeled invariant/stress data and curve CSVs.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;
use crate::training::LabeledSample;

/// Columns of the labeled-data CSV; the deformation-gradient columns are
/// empty when the source gradient is unknown.
pub const LABELED_HEADER: &str =
    "i1,i2,j,c1,c2,c3,s1,s2,s3,f11,f12,f13,f21,f22,f23,f31,f32,f33";

pub fn write_labeled<W: Write>(out: &mut W, data: &[LabeledSample]) -> Result<()> {
    writeln!(out, "{LABELED_HEADER}")?;
    for s in data {
        write!(out, "{},{},{}", s.t.i1, s.t.i2, s.t.j)?;
        for v in s.c_diag.iter().chain(&s.s_diag) {
            write!(out, ",{v}")?;
        }
        match &s.f {
            Some(f) => f.iter().try_for_each(|v| write!(out, ",{v}"))?,
            None => write!(out, "{}", ",".repeat(9))?,
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_labeled<R: BufRead>(input: R) -> Result<Vec<LabeledSample>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != LABELED_HEADER {
        return Err(Error::Parse(format!("unexpected labeled-data header `{header}`")));
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 18 {
            return Err(Error::Parse(format!("line {}: expected 18 fields, got {}", k + 2, fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: `{s}`: {e}", k + 2)));
        let v: Vec<f64> = fields[..9].iter().map(|s| num(s)).collect::<Result<_>>()?;
        let f = if fields[9..].iter().all(|s| s.is_empty()) {
            None
        } else {
            let comps: Vec<f64> = fields[9..].iter().map(|s| num(s)).collect::<Result<_>>()?;
            Some(std::array::from_fn(|i| comps[i]))
        };
        out.push(LabeledSample {
            t: InvariantTriplet::new(v[0], v[1], v[2]),
            c_diag: [v[3], v[4], v[5]],
            s_diag: [v[6], v[7], v[8]],
            f,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_round_trip_is_exact() {
        let a = LabeledSample {
            t: InvariantTriplet::new(3.1, 3.2, 1.0 / 3.0),
            c_diag: [0.1, 0.2, 0.30000000000000004],
            s_diag: [-1e-17, 2.5, 1e300],
            f: Some([1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, std::f64::consts::PI]),
        };
        let b = LabeledSample { f: None, ..a.clone() };
        let mut buf = Vec::new();
        write_labeled(&mut buf, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(read_labeled(buf.as_slice()).unwrap(), vec![a, b]);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(read_labeled("x,y\n".as_bytes()).is_err());
    }
}
