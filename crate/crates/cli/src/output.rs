use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// Shortest decimal that parses back to the same `f64`. Negative zero is
/// written as `0.0`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v + 0.0).to_owned()
    } else {
        String::new()
    }
}

/// One CSV cell: a number or empty.
pub fn cell(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Header plus rows, comma separated, LF terminated.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes through a sibling temporary file and renames it into place, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -2.5e-12, 1.0, 1.0 / 3.0, 1e300, std::f64::consts::PI] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(num(-0.0), "0.0");
        assert_eq!(num(f64::NAN), "");
        assert_eq!(cell(None), "");
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            csv(&["a", "b"], vec![vec!["1.0".into(), "".into()]]),
            "a,b\n1.0,\n"
        );
    }
}
