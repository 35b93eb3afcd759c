//! Number formatting shared by reports and text exports.

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Formats with at most 12 significant digits, in plain notation for
/// ordinary magnitudes and scientific notation otherwise.
pub fn sig12(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        return "0".to_string();
    }
    let mag = r.abs();
    if (1e-6..1e15).contains(&mag) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig12(-1.0), "-1");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(1.5e-9), "1.5e-9");
        assert_eq!(sig12(123456789.1234567), "123456789.123");
    }
}
