//! Text output helpers shared by every writer in the crate.

use std::fs;
use std::path::Path;

use crate::error::{RelarmError, Result};
use crate::matrix::Matrix;

/// Formats a float with 17 significant digits, which is enough for any
/// `f64` to survive a text round trip bit for bit.
///
/// Plain positional notation is used for magnitudes in `[1e-5, 1e17)`,
/// scientific notation outside that window.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Writes `header` plus one line per matrix row, each prefixed by its label.
pub fn labeled_matrix_csv(
    label_header: &str,
    column_headers: &[String],
    labels: &[String],
    values: &Matrix,
) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![label_header.to_owned()];
    header.extend(column_headers.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (label, row) in labels.iter().zip(values.rows()) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|&v| format_f64(v)));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| RelarmError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| RelarmError::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| RelarmError::io(path, e))
}

pub fn to_json_pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.5), "0.50000000000000000");
        assert_eq!(format_f64(0.1), "0.10000000000000001");
        assert_eq!(format_f64(-180.9), "-180.90000000000001");
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(1e-300), "1.0000000000000000e-300");
    }

    #[test]
    fn formatted_values_round_trip() {
        let samples = [
            0.1,
            1.0 / 3.0,
            2.0f64.sqrt(),
            1e-5,
            9.999_999_999_999_999e-6,
            123_456_789.123_456_78,
            f64::MIN_POSITIVE,
            f64::MAX,
            -7.25e20,
            0.4634146341463415,
        ];
        for x in samples {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }
}
