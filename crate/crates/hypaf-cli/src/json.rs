//! JSON serialization with every float printed at 17 significant digits,
//! so artifacts round-trip f64 values bit-exactly and identical runs
//! produce identical bytes.

use serde::Serialize;
use serde_json::ser::{PrettyFormatter, Serializer};
use std::io;

struct SigDigits<'a> {
    inner: PrettyFormatter<'a>,
}

impl serde_json::ser::Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no inf/nan literals; stringify them.
            write!(writer, "\"{value}\"")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    // Delegate the structural pieces to the pretty formatter.
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::begin_array(&mut self.inner, w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::end_array(&mut self.inner, w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        serde_json::ser::Formatter::begin_array_value(&mut self.inner, w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::end_array_value(&mut self.inner, w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::begin_object(&mut self.inner, w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::end_object(&mut self.inner, w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        serde_json::ser::Formatter::begin_object_key(&mut self.inner, w, first)
    }
    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::end_object_key(&mut self.inner, w)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::begin_object_value(&mut self.inner, w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        serde_json::ser::Formatter::end_object_value(&mut self.inner, w)
    }
}

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json(value: &impl Serialize) -> String {
    let mut out = Vec::new();
    let formatter = SigDigits {
        inner: PrettyFormatter::new(),
    };
    let mut ser = Serializer::with_formatter(&mut out, formatter);
    value
        .serialize(&mut ser)
        .expect("serialization of report types cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits utf-8")
}
