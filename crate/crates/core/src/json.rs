//! JSON output helpers.
//!
//! Every float is written with 17 significant digits so that values
//! round-trip exactly; non-finite values become `null`.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDoc {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexDoc> for Complex64 {
    fn from(z: ComplexDoc) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Compact formatter with fixed 17-significant-digit floats.
#[derive(Debug, Default, Clone, Copy)]
pub struct RoundTripFormatter;

impl RoundTripFormatter {
    fn write_float<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

impl Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write_float(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write_float(writer, value as f64)
    }
}

/// Serialize with [`RoundTripFormatter`].
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTripFormatter);
    value
        .serialize(&mut ser)
        .expect("serializing in-memory documents cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
