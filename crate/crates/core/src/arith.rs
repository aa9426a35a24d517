//! Exact integer primitives: gcd, Bézout certificates, binomials, powers,
//! exact division and modular inverses. Nothing here can overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type Int = BigInt;

/// Output of [`extgcd`]: `a*s + b*t = g` with `g = gcd(s, t) >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BezoutCertificate {
    pub g: Int,
    pub a: Int,
    pub b: Int,
}

/// Nonnegative greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(s: &Int, t: &Int) -> Int {
    s.gcd(t)
}

pub fn is_coprime(s: &Int, t: &Int) -> bool {
    gcd(s, t).is_one()
}

/// Extended Euclid on `|s|`, `|t|`, with the coefficient signs fixed up
/// afterwards. The coefficients are those of the textbook remainder
/// sequence, so the output is fully determined by the inputs.
pub fn extgcd(s: &Int, t: &Int) -> BezoutCertificate {
    let (mut r0, mut r1) = (s.abs(), t.abs());
    let (mut a0, mut a1) = (Int::one(), Int::zero());
    let (mut b0, mut b1) = (Int::zero(), Int::one());
    while !r1.is_zero() {
        let quot = &r0 / &r1;
        let r2 = &r0 - &quot * &r1;
        let a2 = &a0 - &quot * &a1;
        let b2 = &b0 - &quot * &b1;
        r0 = std::mem::replace(&mut r1, r2);
        a0 = std::mem::replace(&mut a1, a2);
        b0 = std::mem::replace(&mut b1, b2);
    }
    if s.is_negative() {
        a0 = -a0;
    }
    if t.is_negative() {
        b0 = -b0;
    }
    BezoutCertificate {
        g: r0,
        a: a0,
        b: b0,
    }
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: i64, k: i64) -> Result<Int> {
    if k < 0 || k > n {
        return Err(Error::BinomialRange { n, k });
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    Ok(acc)
}

/// `C(p, k)` for indices already known to be in range.
pub(crate) fn choose(p: u32, k: u32) -> Int {
    binomial(i64::from(p), i64::from(k)).expect("binomial index in range")
}

/// `base^exp` with `0^0 = 1`.
pub fn ipow(base: &Int, exp: i64) -> Result<Int> {
    let exp = u32::try_from(exp).map_err(|_| {
        if exp < 0 {
            Error::NegativeExponent(exp)
        } else {
            Error::Precondition(format!("exponent {exp} too large"))
        }
    })?;
    Ok(pow(base, exp))
}

pub(crate) fn pow(base: &Int, exp: u32) -> Int {
    Pow::pow(base, exp)
}

/// `num / den`, failing unless `den` divides `num` exactly.
pub fn exact_div(num: &Int, den: &Int) -> Result<Int> {
    if den.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    let (quot, rem) = num.div_rem(den);
    if rem.is_zero() {
        Ok(quot)
    } else {
        Err(Error::NotDivisible {
            num: num.clone(),
            den: den.clone(),
        })
    }
}

/// Inverse of `a` modulo `|q|`, reduced into `[0, |q|)`.
pub fn mod_inverse(a: &Int, q: &Int) -> Result<Int> {
    if q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let modulus = q.abs();
    let cert = extgcd(&a.mod_floor(&modulus), &modulus);
    if !cert.g.is_one() {
        return Err(Error::NotInvertible {
            value: a.clone(),
            modulus,
        });
    }
    Ok(cert.a.mod_floor(&modulus))
}

/// Trial division; adequate for exponents.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
