//! Inverse direction: recover `(e, f, g, l, q, n, r)` from a nonzero,
//! pairwise-coprime solution of `x^p - m*y^p = z*w`.
//!
//! The pipeline is:
//!
//! 1. Bézout pairs `a*x - b*z = 1` and `c*y - d*z = 1` with `a, c != 0`.
//! 2. `h = gcd(a, c)`, `q = a/h`, `u = c/h`, `r = (d - b)/h`, giving the
//!    line `q*x = -z*r + u*y`.
//! 3. `e = (u^p - m*q^p) / z`.
//! 4. `u = e*l + f*q` with `0 <= l < |q|`.
//! 5. `g = (f^p - m) / e`.
//! 6. `n = (y - e^(p-2) l^(p-1) r) / q`.
//!
//! Every division is checked to be exact. Bézout coefficients and the split
//! of `u` are not unique; the canonical choices are the `extgcd` output and
//! the least nonnegative `l`. Any other member of the family
//! `l -> l + q*t, f -> f - e*t` would serve equally well.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::{exact_div, extgcd, gcd, is_coprime, mod_inverse, pow, Int};
use crate::error::{Error, Result};
use crate::parametrization::{generate, is_unit, ParameterTuple, PrimeExp, Solution};

/// Every intermediate of a successful decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecompositionTrace {
    pub a: Int,
    pub b: Int,
    pub c: Int,
    pub d: Int,
    pub h: Int,
    pub u: Int,
    pub q: Int,
    pub r: Int,
    pub e: Int,
    pub l: Int,
    pub f: Int,
    pub g: Int,
    pub n: Int,
}

/// The intermediates available when the pipeline stops at `e = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialTrace {
    pub a: Int,
    pub b: Int,
    pub c: Int,
    pub d: Int,
    pub h: Int,
    pub u: Int,
    pub q: Int,
    pub r: Int,
    pub e: Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineCoeffs {
    pub h: Int,
    pub q: Int,
    pub u: Int,
    pub r: Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub tuple: ParameterTuple,
    pub trace: DecompositionTrace,
}

/// `(a, b)` with `a*v - b*z = 1` and `a != 0`.
pub fn bezout_nonzero(v: &Int, z: &Int) -> Result<(Int, Int)> {
    if z.is_zero() {
        // coprimality forces v = ±1, and a = v works with b = 0
        if !is_unit(v) {
            return Err(Error::NotCoprime(v.clone(), z.clone()));
        }
        return Ok((v.clone(), Int::zero()));
    }
    let cert = extgcd(v, z);
    if cert.g != Int::from(1) {
        return Err(Error::NotCoprime(v.clone(), z.clone()));
    }
    let (mut a, mut b) = (cert.a, -cert.b);
    if a.is_zero() {
        a += z;
        b += v;
    }
    Ok((a, b))
}

/// Splits the two Bézout pairs into the coefficients of `q*x = -z*r + u*y`.
pub fn line_coeffs(a: &Int, b: &Int, c: &Int, d: &Int) -> Result<LineCoeffs> {
    if a.is_zero() || c.is_zero() {
        return Err(Error::Precondition("a and c must be nonzero".into()));
    }
    let h = gcd(a, c);
    Ok(LineCoeffs {
        q: exact_div(a, &h)?,
        u: exact_div(c, &h)?,
        r: exact_div(&(d - b), &h)?,
        h,
    })
}

/// `e = (u^p - m*q^p) / z`
pub fn residual_e(u: &Int, q: &Int, m: &Int, z: &Int, p: PrimeExp) -> Result<Int> {
    let p = p.get();
    exact_div(&(pow(u, p) - m * pow(q, p)), z)
}

/// Writes `u = e*l + f*q` with `0 <= l < |q|` (and `l = 0` when `|q| = 1`).
pub fn split_u(u: &Int, e: &Int, q: &Int) -> Result<(Int, Int)> {
    if q.is_zero() {
        return Err(Error::Precondition("q must be nonzero".into()));
    }
    let modulus = q.abs();
    let l = if is_unit(q) {
        Int::zero()
    } else {
        if e.mod_floor(&modulus).is_zero() {
            return Err(Error::DegenerateE(None));
        }
        let inv = mod_inverse(e, q)?;
        (inv * u).mod_floor(&modulus)
    };
    let f = exact_div(&(u - e * &l), q)?;
    Ok((l, f))
}

/// `g = (f^p - m) / e`
pub fn residual_g(f: &Int, m: &Int, e: &Int, p: PrimeExp) -> Result<Int> {
    if e.is_zero() {
        return Err(Error::DegenerateE(None));
    }
    exact_div(&(pow(f, p.get()) - m), e)
}

/// `n = (y - e^(p-2) l^(p-1) r) / q`
pub fn residual_n(y: &Int, e: &Int, l: &Int, r: &Int, q: &Int, p: PrimeExp) -> Result<Int> {
    let p = p.get();
    exact_div(&(y - pow(e, p - 2) * pow(l, p - 1) * r), q)
}

/// Runs the full pipeline and checks that the recovered tuple regenerates
/// `sol` exactly.
pub fn decompose(sol: &Solution) -> Result<Decomposition> {
    if let Some(reason) = sol.theorem_grade_violation() {
        return Err(Error::NotTheoremGrade(reason));
    }
    let p = sol.p;
    let (a, b) = bezout_nonzero(&sol.x, &sol.z)?;
    let (c, d) = bezout_nonzero(&sol.y, &sol.z)?;
    let LineCoeffs { h, q, u, r } = line_coeffs(&a, &b, &c, &d)?;
    let e = residual_e(&u, &q, &sol.m, &sol.z, p)?;
    if e.is_zero() {
        return Err(Error::DegenerateE(Some(Box::new(PartialTrace {
            a,
            b,
            c,
            d,
            h,
            u,
            q,
            r,
            e,
        }))));
    }
    let (l, f) = split_u(&u, &e, &q)?;
    let g = residual_g(&f, &sol.m, &e, p)?;
    let n = residual_n(&sol.y, &e, &l, &r, &q, p)?;

    let tuple = ParameterTuple {
        p,
        e: e.clone(),
        f: f.clone(),
        g: g.clone(),
        l: l.clone(),
        q: q.clone(),
        n: n.clone(),
        r: r.clone(),
    };
    if !tuple.satisfies_theorem_constraints() {
        return Err(Error::Postcondition(format!(
            "recovered {tuple} violates q != 0, (e,q) = (l,q) = (n,r) = 1"
        )));
    }
    let regenerated = match generate(&tuple) {
        Ok(s) => s,
        Err(Error::ZeroZ) => {
            return Err(Error::Postcondition(format!("recovered {tuple} has z = 0")))
        }
        Err(err) => return Err(err),
    };
    if &regenerated != sol {
        return Err(Error::RoundTripMismatch {
            expected: Box::new(sol.clone()),
            got: Box::new(regenerated),
        });
    }
    let trace = DecompositionTrace {
        a,
        b,
        c,
        d,
        h,
        u,
        q,
        r,
        e,
        l,
        f,
        g,
        n,
    };
    debug_assert!(is_coprime(&trace.u, &trace.q));
    Ok(Decomposition { tuple, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u32) -> PrimeExp {
        PrimeExp::new(v).unwrap()
    }

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn bezout_nonzero_examples() {
        assert_eq!(bezout_nonzero(&int(1), &int(5)).unwrap(), (int(1), int(0)));
        let (a, b) = bezout_nonzero(&int(2), &int(3)).unwrap();
        assert_eq!(int(2) * &a - int(3) * &b, int(1));
        assert!(!a.is_zero());
        assert_eq!(bezout_nonzero(&int(1), &int(0)).unwrap(), (int(1), int(0)));
        assert_eq!(
            bezout_nonzero(&int(-1), &int(0)).unwrap(),
            (int(-1), int(0))
        );
        assert!(matches!(
            bezout_nonzero(&int(4), &int(6)),
            Err(Error::NotCoprime(..))
        ));
        assert!(matches!(
            bezout_nonzero(&int(2), &int(0)),
            Err(Error::NotCoprime(..))
        ));
    }

    #[test]
    fn bezout_nonzero_adjusts_zero_coefficient() {
        // extgcd(5, 1) yields a = 0, b = 1
        let cert = extgcd(&int(5), &int(1));
        assert!(cert.a.is_zero());
        let (a, b) = bezout_nonzero(&int(5), &int(1)).unwrap();
        assert_eq!(int(5) * &a - &b, int(1));
        assert_eq!(a, int(1));
        for v in -30i64..=30 {
            for z in [-1i64, 1] {
                let (a, b) = bezout_nonzero(&int(v), &int(z)).unwrap();
                assert!(!a.is_zero());
                assert_eq!(int(v) * a - b * int(z), int(1));
            }
        }
    }

    #[test]
    fn line_coeffs_examples() {
        let lc = line_coeffs(&int(1), &int(0), &int(1), &int(0)).unwrap();
        assert_eq!((lc.h, lc.q, lc.u, lc.r), (int(1), int(1), int(1), int(0)));
        let lc = line_coeffs(&int(2), &int(1), &int(1), &int(0)).unwrap();
        assert_eq!((lc.h, lc.q, lc.u, lc.r), (int(1), int(2), int(1), int(-1)));
        assert!(matches!(
            line_coeffs(&int(2), &int(0), &int(4), &int(1)),
            Err(Error::NotDivisible { .. })
        ));
        assert!(matches!(
            line_coeffs(&int(0), &int(0), &int(4), &int(1)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn residual_e_examples() {
        assert_eq!(
            residual_e(&int(1), &int(2), &int(-1), &int(5), p(2)).unwrap(),
            int(1)
        );
        assert_eq!(
            residual_e(&int(1), &int(1), &int(0), &int(1), p(3)).unwrap(),
            int(1)
        );
        assert_eq!(
            residual_e(&int(2), &int(1), &int(4), &int(5), p(2)).unwrap(),
            int(0)
        );
        assert!(matches!(
            residual_e(&int(1), &int(1), &int(0), &int(2), p(2)),
            Err(Error::NotDivisible { .. })
        ));
    }

    #[test]
    fn split_u_examples() {
        assert_eq!(
            split_u(&int(1), &int(1), &int(2)).unwrap(),
            (int(1), int(0))
        );
        assert_eq!(
            split_u(&int(7), &int(1), &int(1)).unwrap(),
            (int(0), int(7))
        );
        assert_eq!(
            split_u(&int(7), &int(3), &int(-1)).unwrap(),
            (int(0), int(-7))
        );
        // 3^-1 = 3 mod 4, l = 3*5 mod 4 = 3, f = (5 - 9)/4
        assert_eq!(
            split_u(&int(5), &int(3), &int(4)).unwrap(),
            (int(3), int(-1))
        );
        assert_eq!(
            split_u(&int(5), &int(4), &int(4)),
            Err(Error::DegenerateE(None))
        );
        assert!(matches!(
            split_u(&int(5), &int(2), &int(4)),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn split_u_canonical_range() {
        for q in [-9i64, -4, -2, 2, 3, 7, 10] {
            for e in -12i64..=12 {
                if num_integer::gcd(e, q) != 1 {
                    continue;
                }
                for u in -20i64..=20 {
                    let (l, f) = split_u(&int(u), &int(e), &int(q)).unwrap();
                    assert_eq!(int(e) * &l + f * int(q), int(u));
                    assert!(l >= int(0) && l < int(q.abs()));
                }
            }
        }
    }

    #[test]
    fn residual_g_examples() {
        assert_eq!(
            residual_g(&int(1), &int(-1), &int(1), p(2)).unwrap(),
            int(2)
        );
        assert_eq!(
            residual_g(&int(0), &int(-1), &int(1), p(3)).unwrap(),
            int(1)
        );
        assert_eq!(
            residual_g(&int(2), &int(4), &int(0), p(2)),
            Err(Error::DegenerateE(None))
        );
    }

    #[test]
    fn residual_n_examples() {
        let n = residual_n(&int(2), &int(1), &int(1), &int(1), &int(1), p(2)).unwrap();
        assert_eq!(n, int(1));
        let n = residual_n(&int(5), &int(9), &int(0), &int(3), &int(5), p(3)).unwrap();
        assert_eq!(n, int(1));
        let n = residual_n(&int(3), &int(1), &int(1), &int(1), &int(2), p(2)).unwrap();
        assert_eq!(n, int(1));
    }

    fn check_round_trip(sol: &Solution) -> Decomposition {
        let d = decompose(sol).unwrap();
        assert_eq!(&generate(&d.tuple).unwrap(), sol);
        d
    }

    #[test]
    fn decompose_examples() {
        let sol = Solution::from_i64(p(2), [-1, 2, 5, -1, 1]);
        let d = check_round_trip(&sol);
        // extgcd(1,5) = (1,0), a sign-flipped to -1; extgcd(2,5) = (-2,1)
        assert_eq!(
            [&d.trace.a, &d.trace.b, &d.trace.c, &d.trace.d],
            [&int(-1), &int(0), &int(-2), &int(-1)]
        );
        assert_eq!(
            d.tuple,
            ParameterTuple::from_i64(p(2), [1, 2, 5, 0, -1, -2, -1])
        );

        let sol = Solution::from_i64(p(3), [2, 1, 3, 2, 2]);
        check_round_trip(&sol);
    }

    #[test]
    fn decompose_perfect_square_m() {
        // 9 - 4 = 5: here u^2 = 4 q^2 happens only when |q| = 1 and u = ±2
        let sol = Solution::from_i64(p(2), [3, 1, 5, 4, 1]);
        match decompose(&sol) {
            Ok(d) => assert_eq!(generate(&d.tuple).unwrap(), sol),
            Err(Error::DegenerateE(Some(tr))) => {
                assert!(tr.e.is_zero());
                assert!(is_unit(&tr.q));
            }
            Err(other) => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn decompose_degenerate_e() {
        // m = 1 is a perfect square, so u^2 = m*q^2 is reachable
        let mut saw_degenerate = false;
        for x in -8i64..=8 {
            for y in -8i64..=8 {
                for z in -8i64..=8 {
                    if x == 0 || y == 0 || z == 0 {
                        continue;
                    }
                    let lhs = x * x - y * y;
                    if lhs == 0 || lhs % z != 0 {
                        continue;
                    }
                    let sol = Solution::from_i64(p(2), [x, y, z, 1, lhs / z]);
                    if !sol.pairwise_coprime() {
                        continue;
                    }
                    match decompose(&sol) {
                        Ok(d) => assert_eq!(generate(&d.tuple).unwrap(), sol),
                        Err(Error::DegenerateE(Some(tr))) => {
                            saw_degenerate = true;
                            assert!(is_unit(&tr.q));
                            assert_eq!(pow(&tr.u, 2), pow(&tr.q, 2));
                        }
                        Err(other) => panic!("{sol}: {other}"),
                    }
                }
            }
        }
        assert!(saw_degenerate);
    }

    #[test]
    fn decompose_rejects_non_theorem_grade() {
        let cases = [
            [2, 2, 3, 1, 0],
            [1, 1, 0, 1, 0],
            [1, 2, 5, -1, 2],
            [0, 1, 1, -1, 1],
        ];
        for c in cases {
            let sol = Solution::from_i64(p(2), c);
            assert!(matches!(decompose(&sol), Err(Error::NotTheoremGrade(_))));
        }
    }

    #[test]
    fn decompose_is_deterministic() {
        let sol = Solution::from_i64(p(3), [2, 1, 3, 2, 2]);
        assert_eq!(decompose(&sol).unwrap(), decompose(&sol).unwrap());
    }

    #[test]
    fn decompose_large_p() {
        let t = ParameterTuple::from_i64(p(7), [3, -2, 5, 4, 5, 2, -3]);
        let sol = generate(&t).unwrap();
        if sol.is_theorem_grade() {
            check_round_trip(&sol);
        }
    }
}
