//! Forward direction: evaluate `(x, y, z, m, w)` from a prime `p` and seven
//! integer parameters `(e, f, g, l, q, n, r)`, so that
//! `x^p - m*y^p = z*w` holds exactly.
//!
//! Also carries the two classical closed forms the general formulas reduce
//! to: the quadratic (`p = 2`) parametrization and the Brahmagupta
//! composition of the norm form `a^2 - m*q^2`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{choose, exact_div, gcd, is_coprime, is_prime, pow, Int};
use crate::error::{Error, Result};

/// A prime exponent, validated by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeExp(u32);

impl PrimeExp {
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(u64::from(p)) {
            Ok(PrimeExp(p))
        } else {
            Err(Error::NotPrime(u64::from(p)))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for PrimeExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The seven integer parameters together with the exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParameterTuple {
    pub p: PrimeExp,
    pub e: Int,
    pub f: Int,
    pub g: Int,
    pub l: Int,
    pub q: Int,
    pub n: Int,
    pub r: Int,
}

impl ParameterTuple {
    /// Builds a tuple from `[e, f, g, l, q, n, r]`.
    pub fn new(p: PrimeExp, values: [Int; 7]) -> Self {
        let [e, f, g, l, q, n, r] = values;
        ParameterTuple {
            p,
            e,
            f,
            g,
            l,
            q,
            n,
            r,
        }
    }

    pub fn from_i64(p: PrimeExp, values: [i64; 7]) -> Self {
        Self::new(p, values.map(Int::from))
    }

    /// `[e, f, g, l, q, n, r]`
    pub fn values(&self) -> [&Int; 7] {
        [
            &self.e, &self.f, &self.g, &self.l, &self.q, &self.n, &self.r,
        ]
    }

    /// `u = e*l + f*q`, the line coefficient the tuple encodes.
    pub fn u(&self) -> Int {
        &self.e * &self.l + &self.f * &self.q
    }

    /// The constraints under which [`generate`] is defined:
    /// `q != 0` and `gcd(e, q) = gcd(l, q) = 1`.
    pub fn check_generate_constraints(&self) -> Result<()> {
        if self.q.is_zero() {
            return Err(Error::Precondition("q must be nonzero".into()));
        }
        if !is_coprime(&self.e, &self.q) {
            return Err(Error::Precondition(format!(
                "gcd(e, q) = {} but must be 1",
                gcd(&self.e, &self.q)
            )));
        }
        if !is_coprime(&self.l, &self.q) {
            return Err(Error::Precondition(format!(
                "gcd(l, q) = {} but must be 1",
                gcd(&self.l, &self.q)
            )));
        }
        Ok(())
    }

    /// The full constraint list: generate constraints plus `gcd(n, r) = 1`.
    pub fn satisfies_theorem_constraints(&self) -> bool {
        self.check_generate_constraints().is_ok() && is_coprime(&self.n, &self.r)
    }
}

impl fmt::Display for ParameterTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} (e,f,g,l,q,n,r)=({},{},{},{},{},{},{})",
            self.p, self.e, self.f, self.g, self.l, self.q, self.n, self.r
        )
    }
}

/// An instance of `x^p - m*y^p = z*w`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    pub p: PrimeExp,
    pub x: Int,
    pub y: Int,
    pub z: Int,
    pub m: Int,
    pub w: Int,
}

impl Solution {
    pub fn from_i64(p: PrimeExp, [x, y, z, m, w]: [i64; 5]) -> Self {
        Solution {
            p,
            x: x.into(),
            y: y.into(),
            z: z.into(),
            m: m.into(),
            w: w.into(),
        }
    }

    /// `x^p - m*y^p`
    pub fn lhs(&self) -> Int {
        let p = self.p.get();
        pow(&self.x, p) - &self.m * pow(&self.y, p)
    }

    pub fn identity_holds(&self) -> bool {
        self.lhs() == &self.z * &self.w
    }

    pub fn all_nonzero(&self) -> bool {
        [&self.x, &self.y, &self.z, &self.m, &self.w]
            .iter()
            .all(|v| !v.is_zero())
    }

    pub fn pairwise_coprime(&self) -> bool {
        is_coprime(&self.x, &self.y) && is_coprime(&self.x, &self.z) && is_coprime(&self.y, &self.z)
    }

    /// Why the solution falls outside the theorem's hypotheses, if it does.
    pub fn theorem_grade_violation(&self) -> Option<String> {
        if !self.all_nonzero() {
            return Some("x, y, z, m, w must all be nonzero".into());
        }
        if !self.pairwise_coprime() {
            return Some("x, y, z must be pairwise coprime".into());
        }
        if !self.identity_holds() {
            return Some("x^p - m*y^p != z*w".into());
        }
        None
    }

    pub fn is_theorem_grade(&self) -> bool {
        self.theorem_grade_violation().is_none()
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} (x,y,z,m,w)=({},{},{},{},{})",
            self.p, self.x, self.y, self.z, self.m, self.w
        )
    }
}

/// `y = n*q + e^(p-2) * l^(p-1) * r`
pub fn eval_y(t: &ParameterTuple) -> Int {
    let p = t.p.get();
    &t.n * &t.q + pow(&t.e, p - 2) * pow(&t.l, p - 1) * &t.r
}

/// `m = f^p - e*g`
pub fn eval_m(t: &ParameterTuple) -> Int {
    pow(&t.f, t.p.get()) - &t.e * &t.g
}

/// `z = sum_{k=0}^{p-1} C(p,k) e^(p-k-1) l^(p-k) (f*q)^k + g*q^p`
pub fn eval_z(t: &ParameterTuple) -> Int {
    let p = t.p.get();
    let fq = &t.f * &t.q;
    let sum: Int = (0..p)
        .map(|k| choose(p, k) * pow(&t.e, p - k - 1) * pow(&t.l, p - k) * pow(&fq, k))
        .sum();
    sum + &t.g * pow(&t.q, p)
}

/// `x = e*l*n - (sum_{k=1}^{p-1} C(p,k) e^(p-k-1) l^(p-k) f^k q^(k-1) + g*q^(p-1))*r + f*y`
pub fn eval_x(t: &ParameterTuple, y: &Int) -> Int {
    let p = t.p.get();
    let sum: Int = (1..p)
        .map(|k| {
            choose(p, k) * pow(&t.e, p - k - 1) * pow(&t.l, p - k) * pow(&t.f, k) * pow(&t.q, k - 1)
        })
        .sum();
    let coeff = sum + &t.g * pow(&t.q, p - 1);
    &t.e * &t.l * &t.n - coeff * &t.r + &t.f * y
}

/// The bracket whose quotient by `q^p` is `w`:
/// `sum_{k=0}^{p-1} C(p,k) z^(p-k-1) (-r)^(p-k) ((e*l + f*q)*y)^k + e*y^p`.
pub fn w_bracket(t: &ParameterTuple, z: &Int, y: &Int) -> Int {
    let p = t.p.get();
    let neg_r = -&t.r;
    let uy = t.u() * y;
    let sum: Int = (0..p)
        .map(|k| choose(p, k) * pow(z, p - k - 1) * pow(&neg_r, p - k) * pow(&uy, k))
        .sum();
    sum + &t.e * pow(y, p)
}

/// `w = bracket / q^p`. Exact whenever `gcd(z, q) = 1`, which
/// `gcd(e, q) = gcd(l, q) = 1` guarantees.
pub fn eval_w(t: &ParameterTuple, z: &Int, y: &Int) -> Result<Int> {
    exact_div(&w_bracket(t, z, y), &pow(&t.q, t.p.get()))
}

/// Evaluates all five expressions and checks the identity before returning.
///
/// Outputs may have zero entries or common factors; use
/// [`Solution::is_theorem_grade`] to test the theorem's hypotheses.
pub fn generate(t: &ParameterTuple) -> Result<Solution> {
    t.check_generate_constraints()?;
    let z = eval_z(t);
    if z.is_zero() {
        return Err(Error::ZeroZ);
    }
    let y = eval_y(t);
    let m = eval_m(t);
    let x = eval_x(t, &y);
    let w = eval_w(t, &z, &y)?;
    let sol = Solution {
        p: t.p,
        x,
        y,
        z,
        m,
        w,
    };
    if !sol.identity_holds() {
        return Err(Error::IdentityViolation(Box::new(sol)));
    }
    Ok(sol)
}

/// The quadratic closed forms:
/// `x = eln + fnq - flr - gqr`, `y = nq + lr`, `m = f^2 - eg`,
/// `z = el^2 + 2flq + gq^2`, `w = en^2 - 2fnr + gr^2`.
pub fn dickson_p2(t: &ParameterTuple) -> Result<Solution> {
    if t.p.get() != 2 {
        return Err(Error::WrongExponent(t.p.get()));
    }
    let ParameterTuple {
        e,
        f,
        g,
        l,
        q,
        n,
        r,
        ..
    } = t;
    let two = Int::from(2);
    Ok(Solution {
        p: t.p,
        x: e * l * n + f * n * q - f * l * r - g * q * r,
        y: n * q + l * r,
        m: f * f - e * g,
        z: e * l * l + &two * f * l * q + g * q * q,
        w: e * n * n - &two * f * n * r + g * r * r,
    })
}

/// Selects which of the two composition laws to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionSign {
    Plus,
    Minus,
}

impl CompositionSign {
    pub const BOTH: [CompositionSign; 2] = [CompositionSign::Plus, CompositionSign::Minus];

    fn apply<T: Neg<Output = T>>(self, v: T) -> T {
        match self {
            CompositionSign::Plus => v,
            CompositionSign::Minus => -v,
        }
    }
}

/// Returns `(A, Q) = (ab - s*mqr, ar - s*bq)` for `s = ±1`, so that
/// `(a^2 - m q^2)(b^2 - m r^2) = A^2 - m Q^2`.
///
/// Generic so that exhaustive checks can run on machine integers; with
/// [`Int`] it is exact for all inputs.
pub fn brahmagupta_compose<T>(a: &T, q: &T, b: &T, r: &T, m: &T, sign: CompositionSign) -> (T, T)
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    let big_a = a.clone() * b.clone() - sign.apply(m.clone() * q.clone() * r.clone());
    let big_q = a.clone() * r.clone() - sign.apply(b.clone() * q.clone());
    (big_a, big_q)
}

/// `z mod q`, which equals `e^(p-1) l^p mod q` for every tuple.
pub fn z_residue(t: &ParameterTuple) -> Option<Int> {
    if t.q.is_zero() {
        return None;
    }
    let p = t.p.get();
    let q = &t.q;
    Some((pow(&t.e, p - 1) * pow(&t.l, p)).mod_floor(q))
}

pub(crate) fn is_unit(v: &Int) -> bool {
    v.is_one() || (-v).is_one()
}
