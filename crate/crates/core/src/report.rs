//! CSV/JSON emission shared by the sweep record types.
//!
//! Big integers are written as base-10 strings and floats with 15
//! significant digits, so that identical inputs give byte-identical files.

use std::fmt::Display;
use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::Result;

/// Formats `x` with 15 significant digits in scientific notation.
pub fn fmt_sig15(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_sig15(*x))
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&fmt_sig15(*x)),
        None => s.serialize_str(""),
    }
}

pub fn ser_display<T: Display, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// Writes `records` as CSV with a header row.
pub fn write_csv<T: Serialize, W: Write>(records: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text for `records`; the header row is present even when empty only
/// if `header` is supplied.
pub fn to_csv_string<T: Serialize>(records: &[T], header: &[&str]) -> Result<String> {
    let mut buf = Vec::new();
    if records.is_empty() {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        w.flush()?;
    } else {
        write_csv(records, &mut buf)?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: u32,
        #[serde(serialize_with = "ser_f64")]
        x: f64,
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn sig15() {
        assert_eq!(fmt_sig15(1.0), "1.00000000000000e0");
        assert_eq!(fmt_sig15(-0.000123456789012345678), "-1.23456789012346e-4");
        assert_eq!(fmt_sig15(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_has_header() {
        let s = to_csv_string(&[Row { n: 1, x: 0.5 }], &["n", "x"]).unwrap();
        assert_eq!(s, "n,x\n1,5.00000000000000e-1\n");
        let empty: Vec<Row> = Vec::new();
        assert_eq!(to_csv_string(&empty, &["n", "x"]).unwrap(), "n,x\n");
    }
}
