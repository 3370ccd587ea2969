//! Plain-text integer data files.
//!
//! One value per line. Blank lines and lines starting with `#` are skipped,
//! and a single leading `y` header line is accepted. Real values are floored.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedData {
    pub values: Vec<i64>,
    /// Line numbers (1-based) of non-integer values that were floored.
    pub floored_lines: Vec<usize>,
}

pub fn parse_data(text: &str) -> Result<ParsedData> {
    let mut values = Vec::new();
    let mut floored_lines = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        if first && line.eq_ignore_ascii_case("y") {
            continue;
        }
        if let Ok(v) = line.parse::<i64>() {
            values.push(v);
            continue;
        }
        match line.parse::<f64>() {
            Ok(x) if x.is_finite() && x.floor().abs() < 9.0e15 => {
                values.push(x.floor() as i64);
                floored_lines.push(i + 1);
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "line {}: expected an integer, got {line:?}",
                    i + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument(
            "data file contains no values".into(),
        ));
    }
    Ok(ParsedData {
        values,
        floored_lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_header_and_reals() {
        let d = parse_data("# flood\ny\n3\n-2\n\n4.7\n-0.5\n").unwrap();
        assert_eq!(d.values, vec![3, -2, 4, -1]);
        assert_eq!(d.floored_lines, vec![6, 7]);
    }

    #[test]
    fn rejects_garbage_and_empty() {
        assert!(parse_data("1\nabc\n").is_err());
        assert!(parse_data("# nothing\n\n").is_err());
        assert!(parse_data("1\ny\n").is_err());
        assert!(parse_data("nan\n").is_err());
    }
}
