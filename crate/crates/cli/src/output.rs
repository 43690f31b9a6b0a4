//! Output encoding: JSON with fixed-width floats and the cone CSV layout.

use std::io::{self, Write};

use serde::Serialize;

use qbody_core::cone::ScanPoint;

/// Every float is printed with 17 significant digits (`%.16e`), enough to
/// round-trip any finite `f64` exactly.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize to a JSON string with lossless float formatting.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Write scan rows as CSV: header plus one row per point.
pub fn write_scan_csv<W: Write>(
    writer: W,
    projective: &[ScanPoint],
    povm: &[ScanPoint],
) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["kind", "alpha", "bloch1", "bloch2", "bloch3", "x", "y", "z", "class"])?;
    for (kind, points) in [("projective", projective), ("povm", povm)] {
        for sp in points {
            out.write_record([
                kind.to_string(),
                format_float(sp.alpha),
                format_float(sp.bloch[0]),
                format_float(sp.bloch[1]),
                format_float(sp.bloch[2]),
                format_float(sp.point.x),
                format_float(sp.point.y),
                format_float(sp.point.z),
                sp.class.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
