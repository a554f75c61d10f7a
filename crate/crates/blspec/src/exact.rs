//! Exact rational arithmetic helpers shared across the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// `x` as an exact rational.
pub fn ri(x: i128) -> Rat {
    Rat::from_integer(Int::from(x))
}

/// `n / d` as an exact rational.
pub fn rq(n: i128, d: i128) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Binomial coefficient `C(n, k)`; zero for `k > n`.
pub fn binom(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for j in 0..k {
        // exact: the running product is C(n, j+1) after each step
        acc = acc * Int::from(n - j) / Int::from(j + 1);
    }
    acc
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Nearest double to an exact rational, correct far beyond the double range.
///
/// Both operands are truncated to 96 significant bits before the division, so
/// the result is accurate to well under one part in 1e-15 even when numerator
/// and denominator each exceed `f64::MAX`.
pub fn to_f64(r: &Rat) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    let neg = r.numer().is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let ns = (num.bits() as i64 - 96).max(0) as u64;
    let ds = (den.bits() as i64 - 96).max(0) as u64;
    let nf = (&num >> ns).to_f64().unwrap_or(f64::MAX);
    let df = (&den >> ds).to_f64().unwrap_or(f64::MAX);
    let shift = (ns as i64 - ds as i64).clamp(-2000, 2000) as i32;
    let v = nf / df * 2f64.powi(shift);
    if neg {
        -v
    } else {
        v
    }
}

/// Formats as `p/q`, omitting a unit denominator.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, a plain decimal (`-0.25`), or an integer, exactly.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: Int = num.trim().parse().ok()?;
        let d: Int = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let i: Int = if int_part.is_empty() || int_part == "-" {
            Int::zero()
        } else {
            int_part.parse().ok()?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let f: Int = frac_part.parse().ok()?;
        let scale = Int::from(10u32).pow(frac_part.len() as u32);
        let frac = Rat::new(f, scale);
        let whole = Rat::from_integer(i);
        return Some(if neg { whole - frac } else { whole + frac });
    }
    s.parse::<Int>().ok().map(Rat::from_integer)
}

/// `r^e` for small non-negative exponents.
pub fn powi(r: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Formats a float with `digits` significant digits, plain decimal notation.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), Int::from(6));
        assert_eq!(binom(16, 4), Int::from(1820));
        assert_eq!(binom(16, 8), Int::from(12870));
        assert_eq!(binom(3, 5), Int::zero());
    }

    #[test]
    fn f64_round_trips() {
        let r = rq(1, 3);
        assert!((to_f64(&r) - 1.0 / 3.0).abs() < 1e-16);
        let tiny = Rat::new(Int::one(), binom(2000, 1000));
        let f = to_f64(&tiny);
        assert!(f >= 0.0 && f < 1e-300);
        // C(2000,1000)/C(2000,999) = 1001/1000 after cancellation
        let big = Rat::new(binom(2000, 1000), binom(2000, 999));
        assert!((to_f64(&big) - 1.001).abs() < 1e-12);
        let exact = from_f64(0.1).unwrap();
        assert_eq!(to_f64(&exact), 0.1);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rat("3/4").unwrap(), rq(3, 4));
        assert_eq!(parse_rat("-0.25").unwrap(), rq(-1, 4));
        assert_eq!(parse_rat("7").unwrap(), ri(7));
        assert_eq!(parse_rat("0.04").unwrap(), rq(1, 25));
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("abc").is_none());
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(1234.5678, 6), "1234.57");
    }
}
