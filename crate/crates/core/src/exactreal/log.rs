//! Natural logarithm enclosures for positive integers and rationals.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactreal::interval::RationalInterval;

fn dyadic(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// `ln m` for rational `m` in `[1, 2]`, absolute error at most `2^-bits`.
///
/// Uses `ln m = 2 atanh z` with `z = (m - 1)/(m + 1) <= 1/3`.
fn ln_small(m: &BigRational, bits: u32) -> RationalInterval {
    let one = BigRational::one();
    if m == &one {
        return RationalInterval::point(BigRational::zero());
    }
    let z = (m - &one) / (m + &one);
    let z2 = &z * &z;
    let target = dyadic(bits + 2);
    let grid = bits + 16;
    let mut power = z.clone();
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    let mut k: u64 = 1;
    loop {
        let term = RationalInterval::point(&power / BigRational::from_integer(BigInt::from(k)))
            .round_outward(grid);
        lo += term.lo();
        hi += term.hi();
        power *= &z2;
        k += 2;
        // remaining terms sum to at most z^k / (k (1 - z^2))
        let tail = &power / (BigRational::from_integer(BigInt::from(k)) * (&one - &z2));
        if tail < target {
            let two = BigRational::from_integer(BigInt::from(2));
            return RationalInterval::new(lo * &two, (hi + tail) * &two).round_outward(bits + 2);
        }
    }
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, RationalInterval>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, RationalInterval>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of `ln 2` with absolute error at most `2^-bits`.
pub fn ln2(bits: u32) -> RationalInterval {
    let bits = bits.max(8);
    let key = (bits + 31) / 32 * 32;
    if let Some(v) = ln2_cache().lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = ln_small(&BigRational::from_integer(BigInt::from(2)), key);
    ln2_cache().lock().unwrap().insert(key, v.clone());
    v
}

/// Enclosure of `ln n` for a positive integer, absolute error at most
/// `2^-bits` (up to a small constant factor).
pub fn ln_int(n: &BigInt, bits: u32) -> Result<RationalInterval> {
    if n.sign() != Sign::Plus {
        return Err(Error::Domain(format!("logarithm of non-positive integer {n}")));
    }
    if n.is_one() {
        return Ok(RationalInterval::point(BigRational::zero()));
    }
    let len = n.bits() as u32;
    // ln n = e ln 2 + ln(n / 2^e), quotient in [1, 2)
    let e = len - 1;
    let ln2_bits = bits + 2 + (32 - e.leading_zeros());
    let keep = bits + 8;
    let head = if e > keep {
        // n in [a 2^s, (a + 1) 2^s]
        let s = e - keep;
        let a: BigInt = n >> s as usize;
        let lo = BigRational::new(a.clone(), BigInt::one() << keep as usize);
        let hi = BigRational::new(a + BigInt::one(), BigInt::one() << keep as usize);
        let l = ln_small(&lo, bits + 2);
        let h = ln_small(&hi, bits + 2);
        RationalInterval::new(l.lo().clone(), h.hi().clone())
    } else {
        let m = BigRational::new(n.clone(), BigInt::one() << e as usize);
        ln_small(&m, bits + 2)
    };
    let scaled = ln2(ln2_bits).scale(&BigRational::from_integer(BigInt::from(e)));
    Ok(scaled + head)
}

/// Enclosure of `ln x` for positive rational `x`.
pub fn ln_rational(x: &BigRational, bits: u32) -> Result<RationalInterval> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("logarithm of non-positive rational {x}")));
    }
    Ok(ln_int(x.numer(), bits + 1)? - ln_int(x.denom(), bits + 1)?)
}

/// Enclosure of `exp x` over an interval, by Taylor series with a rigorous
/// remainder. Intended for moderate arguments (`|x| < 64`).
pub fn exp_interval(x: &RationalInterval, bits: u32) -> RationalInterval {
    let lo = exp_point(x.lo(), bits).lo().clone();
    let hi = exp_point(x.hi(), bits).hi().clone();
    RationalInterval::new(lo, hi)
}

fn exp_point(x: &BigRational, bits: u32) -> RationalInterval {
    // exp x = exp(x / 2^r)^(2^r) with |x / 2^r| <= 1/2
    let mut r = 0u32;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut y = x.clone();
    while y.abs() > half {
        y /= BigRational::from_integer(BigInt::from(2));
        r += 1;
    }
    let target = dyadic(bits + 2 * r + 8);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k = 1u64;
    loop {
        term = term * &y / BigRational::from_integer(BigInt::from(k));
        sum += &term;
        k += 1;
        // |remainder| <= 2 |term|, since |y| <= 1/2
        let bound = term.abs() * BigRational::from_integer(BigInt::from(2));
        if bound < target {
            let mut iv = RationalInterval::new(&sum - &bound, &sum + &bound);
            for _ in 0..r {
                iv = iv.powi(2).round_outward(bits + 2 * r + 8);
            }
            return iv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn close(iv: &RationalInterval, v: f64, tol: f64) -> bool {
        let (a, b) = iv.to_f64_pair();
        a <= v + tol && b >= v - tol && b - a < tol
    }

    #[test]
    fn known_logs() {
        assert!(close(&ln2(64), std::f64::consts::LN_2, 1e-15));
        assert!(close(&ln_int(&BigInt::from(3), 64).unwrap(), 3f64.ln(), 1e-15));
        assert!(close(&ln_int(&BigInt::from(1_000_000_007u64), 64).unwrap(), 1_000_000_007f64.ln(), 1e-12));
        let x = BigRational::new(BigInt::from(3), BigInt::from(4));
        assert!(close(&ln_rational(&x, 64).unwrap(), 0.75f64.ln(), 1e-15));
    }

    #[test]
    fn huge_argument_keeps_width() {
        let n = BigInt::from(3).pow(20_000u32);
        let iv = ln_int(&n, 60).unwrap();
        assert!(iv.width().to_f64().unwrap() < 1e-15);
        let expected = 20_000.0 * 3f64.ln();
        assert!((iv.mid_f64() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn logs_are_additive() {
        let a = ln_int(&BigInt::from(6), 80).unwrap();
        let b = ln_int(&BigInt::from(2), 80).unwrap() + ln_int(&BigInt::from(3), 80).unwrap();
        assert!(a.overlaps(&b));
    }

    #[test]
    fn exp_inverts_log() {
        let l = ln_int(&BigInt::from(10), 80).unwrap();
        let e = exp_interval(&l, 60);
        assert!(e.contains(&BigRational::from_integer(BigInt::from(10))));
    }
}
