//! Float formatting shared by every CSV/TSV artifact.

/// Significant digits written for every float.
pub const SIG_DIGITS: usize = 6;

/// `x` rounded to six significant digits, half to even, in `%g` style:
/// fixed notation for decimal exponents in `[-4, 6)`, otherwise
/// `<mantissa>e<exp>`. Trailing zeros are dropped.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    // std formatting rounds the exact binary value, ties to even
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_range() {
        assert_eq!(fmt_float(1.0), "1");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(-4.673), "-4.673");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666667");
        assert_eq!(fmt_float(123456.0), "123456");
        assert_eq!(fmt_float(0.0001), "0.0001");
        assert_eq!(fmt_float(-0.0), "0");
    }

    #[test]
    fn half_even_on_exact_ties() {
        assert_eq!(fmt_float(123456.5), "123456");
        assert_eq!(fmt_float(123457.5), "123458");
        assert_eq!(fmt_float(0.1234565), "0.123456"); // stored value is just below the tie
        assert_eq!(fmt_float(1234565.0), "1.23456e6");
        assert_eq!(fmt_float(1234575.0), "1.23458e6");
    }

    #[test]
    fn scientific_range() {
        assert_eq!(fmt_float(1e-12), "1e-12");
        assert_eq!(fmt_float(0.00001234567), "1.23457e-5");
        assert_eq!(fmt_float(1e6), "1e6");
        assert_eq!(fmt_float(-2.5e10), "-2.5e10");
    }

    #[test]
    fn non_finite() {
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NAN), "NaN");
    }
}
