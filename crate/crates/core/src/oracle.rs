//! Brute-force ground truth: exhaustive enumeration of theorem-grade
//! solutions in a box, round-trip sweeps over them, and seeded fuzzing of
//! the forward identities.
//!
//! Enumeration is a plain loop over `m`, `x`, `y`, `z` with no symmetry
//! reductions. Parallel runs split the `m` range into slices, scan each
//! slice independently and concatenate the results in slice order, so the
//! output is identical for every worker count.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;
use rayon::prelude::*;

use crate::arith::{pow, Int};
use crate::decomposition::decompose;
use crate::error::{Error, Result};
use crate::parametrization::{eval_z, generate, w_bracket, ParameterTuple, PrimeExp, Solution};

/// Number of `m` values scanned per worker per batch.
const M_PER_WORKER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBounds {
    pub p: PrimeExp,
    /// Maximum of `|x|`, `|y|`, `|z|`.
    pub bound: u32,
    pub m_min: Int,
    pub m_max: Int,
}

impl SearchBounds {
    pub fn new(p: PrimeExp, bound: u32, m_min: Int, m_max: Int) -> Result<Self> {
        if bound == 0 {
            return Err(Error::Precondition("bound must be at least 1".into()));
        }
        if m_min > m_max {
            return Err(Error::Precondition(format!(
                "empty m range {m_min}..{m_max}"
            )));
        }
        Ok(SearchBounds {
            p,
            bound,
            m_min,
            m_max,
        })
    }

    fn m_values(&self) -> impl Iterator<Item = Int> + '_ {
        let mut next = Some(self.m_min.clone());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            if cur < self.m_max {
                next = Some(&cur + 1);
            }
            Some(cur)
        })
    }

    /// Nonzero values in `[-bound, bound]`, ascending.
    fn coords(&self) -> Vec<i64> {
        let b = i64::from(self.bound);
        (-b..=b).filter(|&v| v != 0).collect()
    }
}

/// What went wrong for one instance in a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    Solution(Solution),
    Tuple(ParameterTuple),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub subject: Subject,
    pub error: Error,
}

/// Counts from an enumeration, round-trip or fuzz run.
///
/// Every found solution lands in exactly one bucket:
/// `decompose_success + degenerate_e + identity_verified + failures.len()
/// == solutions_found`. Round-trip sweeps never touch `identity_verified`
/// and fuzz runs never touch the decomposition buckets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub instances_checked: u64,
    pub solutions_found: u64,
    pub decompose_success: u64,
    pub degenerate_e: u64,
    pub identity_verified: u64,
    /// Candidates rejected only because `m = 0`.
    pub filtered_m_zero: u64,
    /// Candidates rejected only because `w = 0`.
    pub filtered_w_zero: u64,
    /// Sampled tuples whose `z` evaluates to zero.
    pub skipped_zero_z: u64,
    pub failures: Vec<Failure>,
}

impl SearchReport {
    pub fn is_consistent(&self) -> bool {
        self.decompose_success
            + self.degenerate_e
            + self.identity_verified
            + self.failures.len() as u64
            == self.solutions_found
    }

    pub fn merge(&mut self, other: SearchReport) {
        self.instances_checked += other.instances_checked;
        self.solutions_found += other.solutions_found;
        self.decompose_success += other.decompose_success;
        self.degenerate_e += other.degenerate_e;
        self.identity_verified += other.identity_verified;
        self.filtered_m_zero += other.filtered_m_zero;
        self.filtered_w_zero += other.filtered_w_zero;
        self.skipped_zero_z += other.skipped_zero_z;
        self.failures.extend(other.failures);
    }
}

/// The solutions for a single value of `m`, with filter counts.
#[derive(Debug, Clone, Default)]
pub struct SliceScan {
    pub solutions: Vec<Solution>,
    pub instances_checked: u64,
    pub filtered_m_zero: u64,
    pub filtered_w_zero: u64,
}

impl SliceScan {
    fn report(&self) -> SearchReport {
        SearchReport {
            instances_checked: self.instances_checked,
            solutions_found: self.solutions.len() as u64,
            filtered_m_zero: self.filtered_m_zero,
            filtered_w_zero: self.filtered_w_zero,
            ..SearchReport::default()
        }
    }
}

/// All theorem-grade solutions with the given `m`, ordered by `(x, y, z)`.
pub fn scan_m(bounds: &SearchBounds, m: &Int) -> SliceScan {
    let p = bounds.p.get();
    let coords = bounds.coords();
    let powers: Vec<Int> = coords.iter().map(|&v| pow(&Int::from(v), p)).collect();
    let mut out = SliceScan {
        instances_checked: (coords.len() as u64).pow(3),
        ..SliceScan::default()
    };
    for (xi, &x) in coords.iter().enumerate() {
        for (yi, &y) in coords.iter().enumerate() {
            if x.gcd(&y) != 1 {
                continue;
            }
            let lhs = &powers[xi] - m * &powers[yi];
            let small = lhs.to_i128();
            for &z in &coords {
                if x.gcd(&z) != 1 || y.gcd(&z) != 1 {
                    continue;
                }
                let w = match small {
                    Some(v) => {
                        let z = i128::from(z);
                        if v % z != 0 {
                            continue;
                        }
                        Int::from(v / z)
                    }
                    None => {
                        let (w, rem) = lhs.div_rem(&Int::from(z));
                        if !rem.is_zero() {
                            continue;
                        }
                        w
                    }
                };
                if w.is_zero() {
                    out.filtered_w_zero += 1;
                    continue;
                }
                if m.is_zero() {
                    out.filtered_m_zero += 1;
                    continue;
                }
                out.solutions.push(Solution {
                    p: bounds.p,
                    x: x.into(),
                    y: y.into(),
                    z: z.into(),
                    m: m.clone(),
                    w,
                });
            }
        }
    }
    out
}

/// Maps `work` over the `m` range on `jobs` workers, handing results to
/// `sink` in ascending `m` order, one batch at a time.
pub fn for_each_m<T, W, F>(bounds: &SearchBounds, jobs: usize, work: W, mut sink: F) -> Result<()>
where
    T: Send,
    W: Fn(&Int) -> T + Sync,
    F: FnMut(Vec<T>) -> Result<()>,
{
    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start workers: {e}")))?;
    let mut ms = bounds.m_values().peekable();
    while ms.peek().is_some() {
        let batch: Vec<Int> = ms.by_ref().take(jobs * M_PER_WORKER).collect();
        let results = pool.install(|| batch.par_iter().map(&work).collect());
        sink(results)?;
    }
    Ok(())
}

/// All theorem-grade solutions in the box, sorted by `(m, x, y, z)`.
pub fn enumerate_solutions(bounds: &SearchBounds) -> Vec<Solution> {
    bounds
        .m_values()
        .flat_map(|m| scan_m(bounds, &m).solutions)
        .collect()
}

/// Same result as [`enumerate_solutions`], computed on `jobs` workers.
pub fn enumerate_solutions_par(bounds: &SearchBounds, jobs: usize) -> Result<Vec<Solution>> {
    let mut out = Vec::new();
    for_each_m(
        bounds,
        jobs,
        |m| scan_m(bounds, m).solutions,
        |parts| {
            out.extend(parts.into_iter().flatten());
            Ok(())
        },
    )?;
    Ok(out)
}

/// Decomposes one solution and regenerates it, filing the outcome.
pub fn round_trip_one(sol: &Solution, report: &mut SearchReport) {
    let outcome = decompose(sol).and_then(|d| {
        let regenerated = generate(&d.tuple)?;
        if &regenerated == sol {
            Ok(())
        } else {
            Err(Error::RoundTripMismatch {
                expected: Box::new(sol.clone()),
                got: Box::new(regenerated),
            })
        }
    });
    match outcome {
        Ok(()) => report.decompose_success += 1,
        Err(Error::DegenerateE(_)) => report.degenerate_e += 1,
        Err(error) => report.failures.push(Failure {
            subject: Subject::Solution(sol.clone()),
            error,
        }),
    }
}

fn round_trip_slice(slice: &SliceScan) -> SearchReport {
    let mut report = slice.report();
    for sol in &slice.solutions {
        round_trip_one(sol, &mut report);
    }
    report
}

/// Enumerates the box and round-trips every solution through
/// decompose and generate.
pub fn roundtrip_check(bounds: &SearchBounds) -> SearchReport {
    let mut report = SearchReport::default();
    for m in bounds.m_values() {
        report.merge(round_trip_slice(&scan_m(bounds, &m)));
    }
    report
}

pub fn roundtrip_check_par(bounds: &SearchBounds, jobs: usize) -> Result<SearchReport> {
    let mut report = SearchReport::default();
    for_each_m(
        bounds,
        jobs,
        |m| round_trip_slice(&scan_m(bounds, m)),
        |parts| {
            parts.into_iter().for_each(|part| report.merge(part));
            Ok(())
        },
    )?;
    Ok(report)
}

/// Rejection-samples `count` tuples with entries in `[-range, range]`,
/// `q != 0` and `gcd(e,q) = gcd(l,q) = gcd(n,r) = 1`.
///
/// The generator is PCG-XSH-RR 64/32 (64-bit state) seeded through
/// `seed_from_u64`, and entries are drawn in the order `e, f, g, l, q, n, r`.
/// The sequence for a given seed is the same on every platform.
pub fn sample_tuples(p: PrimeExp, range: u32, count: usize, seed: u64) -> Vec<ParameterTuple> {
    let range = i64::from(range.max(1));
    let mut rng = Pcg32::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let vals: [i64; 7] = std::array::from_fn(|_| rng.gen_range(-range..=range));
        let t = ParameterTuple::from_i64(p, vals);
        if t.satisfies_theorem_constraints() {
            out.push(t);
        }
    }
    out
}

/// Checks every forward identity for one tuple: the main identity, the
/// line `q*x + z*r - u*y = 0`, the norm `z*e = u^p - m*q^p`, and exact
/// divisibility of the `w` bracket by `q^p`.
pub fn check_identities(t: &ParameterTuple, report: &mut SearchReport) {
    report.instances_checked += 1;
    if eval_z(t).is_zero() {
        report.skipped_zero_z += 1;
        return;
    }
    report.solutions_found += 1;
    let fail = |report: &mut SearchReport, error: Error| {
        report.failures.push(Failure {
            subject: Subject::Tuple(t.clone()),
            error,
        })
    };
    let sol = match generate(t) {
        Ok(s) => s,
        Err(e) => return fail(report, e),
    };
    let p = t.p.get();
    let u = t.u();
    if !sol.identity_holds() {
        return fail(report, Error::IdentityViolation(Box::new(sol)));
    }
    if !(&t.q * &sol.x + &sol.z * &t.r - &u * &sol.y).is_zero() {
        return fail(
            report,
            Error::Postcondition(format!("line identity fails for {t}")),
        );
    }
    if &sol.z * &t.e != pow(&u, p) - &sol.m * pow(&t.q, p) {
        return fail(
            report,
            Error::Postcondition(format!("norm identity fails for {t}")),
        );
    }
    let bracket = w_bracket(t, &sol.z, &sol.y);
    if !bracket.is_multiple_of(&pow(&t.q, p)) {
        return fail(
            report,
            Error::NotDivisible {
                num: bracket,
                den: pow(&t.q, p),
            },
        );
    }
    report.identity_verified += 1;
}

/// Samples tuples and checks all forward identities on each.
pub fn identity_fuzz(p: PrimeExp, range: u32, count: usize, seed: u64) -> SearchReport {
    let mut report = SearchReport::default();
    for t in sample_tuples(p, range, count, seed) {
        check_identities(&t, &mut report);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn p(v: u32) -> PrimeExp {
        PrimeExp::new(v).unwrap()
    }

    fn bounds(pv: u32, bound: u32, lo: i64, hi: i64) -> SearchBounds {
        SearchBounds::new(p(pv), bound, lo.into(), hi.into()).unwrap()
    }

    #[test]
    fn bounds_validation() {
        assert!(SearchBounds::new(p(2), 0, 0.into(), 0.into()).is_err());
        assert!(SearchBounds::new(p(2), 1, 1.into(), 0.into()).is_err());
        let b = bounds(2, 1, -2, 2);
        assert_eq!(b.m_values().count(), 5);
        assert_eq!(b.coords(), vec![-1, 1]);
    }

    #[test]
    fn enumerate_examples() {
        let sols = enumerate_solutions(&bounds(2, 5, -1, -1));
        assert!(sols.contains(&Solution::from_i64(p(2), [1, 2, 5, -1, 1])));

        let sols = enumerate_solutions(&bounds(3, 3, 2, 2));
        assert!(sols.contains(&Solution::from_i64(p(3), [2, 1, 3, 2, 2])));

        let b = bounds(2, 4, 0, 0);
        assert!(enumerate_solutions(&b).is_empty());
        assert!(scan_m(&b, &Int::zero()).filtered_m_zero > 0);
    }

    #[test]
    fn enumeration_is_sorted_and_sound() {
        let b = bounds(2, 6, -4, 4);
        let sols = enumerate_solutions(&b);
        let keys: Vec<_> = sols
            .iter()
            .map(|s| (s.m.clone(), s.x.clone(), s.y.clone(), s.z.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for s in &sols {
            assert!(s.is_theorem_grade(), "{s}");
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let b = bounds(3, 7, -9, 9);
        let serial = enumerate_solutions(&b);
        for jobs in [1, 2, 3, 8] {
            assert_eq!(enumerate_solutions_par(&b, jobs).unwrap(), serial);
        }
        assert_eq!(roundtrip_check(&b), roundtrip_check_par(&b, 4).unwrap());
    }

    #[test]
    fn roundtrip_boundary() {
        let r = roundtrip_check(&bounds(2, 1, 1, 1));
        assert!(r.is_consistent());
        assert_eq!(r.instances_checked, 8);
        // x, y, z = ±1 and m = 1 give x^2 - y^2 = 0, so w = 0 everywhere
        assert_eq!(r.solutions_found, 0);
        assert_eq!(r.filtered_w_zero, 8);
    }

    #[test]
    fn roundtrip_small_boxes() {
        for pv in [2, 3] {
            let r = roundtrip_check(&bounds(pv, 10, -10, 10));
            assert!(r.failures.is_empty(), "{:?}", r.failures.first());
            assert!(r.is_consistent());
            assert!(r.decompose_success > 0);
        }
    }

    #[test]
    fn sample_tuples_contract() {
        assert!(sample_tuples(p(2), 5, 0, 1).is_empty());
        let a = sample_tuples(p(3), 6, 200, 99);
        assert_eq!(a, sample_tuples(p(3), 6, 200, 99));
        assert_ne!(a, sample_tuples(p(3), 6, 200, 100));
        assert_eq!(a.len(), 200);
        for t in &a {
            assert!(!t.q.is_zero());
            assert!(t.values().iter().all(|v| v.magnitude() <= &6u32.into()));
            assert!(t.e.gcd(&t.q).is_one() && t.l.gcd(&t.q).is_one() && t.n.gcd(&t.r).is_one());
        }
    }

    #[test]
    fn identity_fuzz_small() {
        let r = identity_fuzz(p(2), 20, 2000, 42);
        assert!(r.failures.is_empty());
        assert!(r.is_consistent());
        assert_eq!(r.instances_checked, 2000);
        assert_eq!(r.solutions_found + r.skipped_zero_z, 2000);

        let r = identity_fuzz(p(7), 5, 300, 1);
        assert!(r.failures.is_empty());

        assert_eq!(identity_fuzz(p(5), 3, 0, 7), SearchReport::default());
    }
}
