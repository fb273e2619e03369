//! Numeric output with nine significant digits.

/// Formats like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let e: i32 = e.parse().expect("integer exponent");
        let sign = if e < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), e.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to nine significant digits, for JSON output.
pub fn round9(x: f64) -> f64 {
    sig9(x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(0.396781006031), "0.396781006");
        assert_eq!(sig9(-9.52274414), "-9.52274414");
        assert_eq!(sig9(0.25), "0.25");
        assert_eq!(sig9(24.0), "24");
        assert_eq!(sig9(0.000239148), "0.000239148");
        assert_eq!(sig9(2.5e-7), "2.5e-07");
        assert_eq!(sig9(1.23456789012e10), "1.23456789e+10");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(9.9999999996), "10");
    }

    #[test]
    fn rounding_keeps_nine_digits() {
        assert_eq!(round9(0.1607472197964169), 0.16074722);
        assert_eq!(round9(1.0 / 3.0), 0.333333333);
    }
}
