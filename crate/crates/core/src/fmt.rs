//! Locale-independent number formatting for records and CSV output.

/// Formats `x` with 10 significant digits.
///
/// Magnitudes in `[1e-5, 1e15)` print in positional notation with trailing
/// zeros dropped; anything else uses `d.ddddddddde±x` notation.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.9e}");
    let rounded: f64 = sci.parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        sci
    }
}

/// Like [`sig`] but renders `None` as `NA`.
pub fn sig_opt(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_else(|| "NA".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(0.238651218541), "0.2386512185");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(-716.39427), "-716.39427");
        assert_eq!(sig(123456789012.0), "123456789000");
        assert_eq!(sig(1e-300), "1.000000000e-300");
        assert_eq!(sig(2.5e20), "2.500000000e20");
        assert_eq!(sig(f64::NAN), "NaN");
        assert_eq!(sig_opt(None), "NA");
    }

    #[test]
    fn round_trips_to_ten_digits() {
        for x in [
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02214076e23,
            1.602e-19,
            0.99997,
        ] {
            let back: f64 = sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-9);
        }
    }
}
