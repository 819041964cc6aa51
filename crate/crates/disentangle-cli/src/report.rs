//! Deterministic experiment reports.
//!
//! JSON output uses the field order of the structs below and serializes
//! every floating-point value with 17 significant digits, so identical
//! configs and seeds produce byte-identical files. The CSV format is a plain
//! distribution dump for plotting: one row per outcome with the probability
//! from each pipeline.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

/// Common report envelope: `{config, seed, version, results, checks}`.
#[derive(Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub config: C,
    pub seed: u64,
    pub version: String,
    pub results: R,
    pub checks: Vec<Check>,
}

/// One named pass/fail verdict with the deviation that decided it.
#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub deviation: f64,
}

impl Check {
    pub fn new(name: &str, pass: bool, deviation: f64) -> Self {
        Self {
            name: name.to_string(),
            pass,
            deviation,
        }
    }

    /// A check that passes exactly when `deviation <= bound`.
    pub fn bounded(name: &str, deviation: f64, bound: f64) -> Self {
        Self::new(name, deviation <= bound, deviation)
    }
}

/// Pretty JSON formatter that writes every float as `{:.16e}` — a mantissa
/// digit plus 16 fractional digits, i.e. 17 significant digits, enough to
/// round-trip any f64.
struct SignificantDigits {
    inner: PrettyFormatter<'static>,
}

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serializes any report value to pretty JSON with full-precision floats,
/// ending in a newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let formatter = SignificantDigits {
        inner: PrettyFormatter::new(),
    };
    let mut serializer = Serializer::with_formatter(&mut out, formatter);
    value
        .serialize(&mut serializer)
        .expect("reports contain only finite numbers, strings, and booleans");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// CSV dump of the three period-finding pipelines: one row per outcome `r`.
pub fn to_distribution_csv(mixture: &[f64], reduced: &[f64], full: &[f64]) -> String {
    let mut out = String::from("r,measured_mixture,reduced_density,full_state\n");
    for (r, ((m, d), f)) in mixture.iter().zip(reduced).zip(full).enumerate() {
        out.push_str(&format!("{r},{m:.16e},{d:.16e},{f:.16e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        name: &'static str,
        weight: f64,
        flags: Vec<bool>,
    }

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        let s = to_json_string(&Sample {
            name: "x",
            weight: 0.25,
            flags: vec![true],
        });
        assert!(s.contains("2.5000000000000000e-1"), "{s}");
        assert!(s.ends_with("}\n"));
        let reparsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(reparsed["weight"].as_f64(), Some(0.25));
    }

    #[test]
    fn full_precision_round_trips_awkward_values() {
        for v in [1.0 / 3.0, 2.0f64.sqrt(), 1e-17, 1234567.891011_f64] {
            let s = to_json_string(&vec![v]);
            let back: Vec<f64> = serde_json::from_str(&s).unwrap();
            assert_eq!(back[0], v, "{s}");
        }
    }

    #[test]
    fn csv_has_one_row_per_outcome() {
        let csv = to_distribution_csv(&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "r,measured_mixture,reduced_density,full_state");
        assert!(lines[1].starts_with("0,5.0000000000000000e-1,"));
    }
}
