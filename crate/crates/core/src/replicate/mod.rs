//! Replication relations for a pair of series `c⁻`, `c⁺`.
//!
//! The pair enters through `D(m,n) = sum_{d | (m,n)} x_d(mn/d^2)/d` with `x_d = c⁻` for odd `d`
//! and `c⁺` for even `d`. The product `P = exp(-sum D(m,n) r^m q^n)` must satisfy
//! `[P]_{m+1,n} = [P]_{m,n+1}` whenever `p ∤ mn`.
//!
//! Coefficient lists are indexed by exponent; entry 0 is the constant term and is ignored.

pub(crate) mod solve;
pub(crate) mod system;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::series::{product_from_exponents, BiSeries, Factor, SeriesError};
use solve::{ExactSolver, SolveFailure};
use system::{Mode, RelKind, System};

/// Truncation of the relation region: `r`-degree and largest coefficient index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_r: u32,
    pub max_index: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_r: 5, max_index: 45 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplicateError {
    /// The relations contradict each other at the named position.
    Inconsistent { relation: String },
    /// The available relations do not fix `c⁻(index)`.
    Underdetermined { index: u32 },
    /// The solution is not integral at `index`.
    NonIntegral { index: u32 },
    /// A needed coefficient is missing from the input.
    Missing { which: &'static str, index: u32 },
    /// A linear form was requested where unknowns multiply.
    Nonlinear { m: u32, n: u32 },
    Series(SeriesError),
}

impl fmt::Display for ReplicateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplicateError::Inconsistent { relation } => write!(f, "relations inconsistent at {relation}"),
            ReplicateError::Underdetermined { index } => write!(f, "c-({index}) is not determined"),
            ReplicateError::NonIntegral { index } => write!(f, "c-({index}) is not an integer"),
            ReplicateError::Missing { which, index } => write!(f, "{which}({index}) not supplied"),
            ReplicateError::Nonlinear { m, n } => write!(f, "relation at ({m},{n}) is not linear in the unknowns"),
            ReplicateError::Series(e) => write!(f, "{e}"),
        }
    }
}

impl From<SeriesError> for ReplicateError {
    fn from(e: SeriesError) -> Self {
        ReplicateError::Series(e)
    }
}

pub(crate) fn describe(kind: RelKind) -> String {
    match kind {
        RelKind::Log(m, n) => alloc::format!("log({m},{n})"),
        RelKind::Ladder(m, n) => alloc::format!("ladder({m},{n})"),
    }
}

impl From<SolveFailure> for ReplicateError {
    fn from(e: SolveFailure) -> Self {
        match e {
            SolveFailure::Inconsistent(k) => ReplicateError::Inconsistent { relation: describe(k) },
        }
    }
}

/// A `c⁻` series over `T` together with an exact `c⁺` series.
#[derive(Clone, Debug)]
pub struct CoeffPair<T> {
    pub p: u32,
    pub cplus: Vec<BigInt>,
    pub cminus: Vec<T>,
}

impl<T: crate::series::Coeff> CoeffPair<T> {
    fn minus(&self, k: u32) -> Result<T, ReplicateError> {
        self.cminus.get(k as usize).cloned().ok_or(ReplicateError::Missing { which: "c-", index: k })
    }

    fn plus(&self, k: u32) -> Result<T, ReplicateError> {
        self.cplus.get(k as usize).map(T::from_bigint).ok_or(ReplicateError::Missing { which: "c+", index: k })
    }
}

/// `D(m,n)` for `m, n >= 1`.
pub fn divisor_sum<T: crate::series::Coeff>(pair: &CoeffPair<T>, m: u32, n: u32) -> Result<T, ReplicateError> {
    let g = m.gcd(&n);
    let mut acc = T::zero();
    for d in (1..=g).filter(|d| g.is_multiple_of(*d)) {
        let idx = m * n / (d * d);
        let x = if d % 2 == 1 { pair.minus(idx)? } else { pair.plus(idx)? };
        acc = acc.add(&x.div_int(d as i64).map_err(|_| ReplicateError::NonIntegral { index: idx })?);
    }
    Ok(acc)
}

/// `P = exp(-sum D(m,n) r^m q^n)` over `1 <= m <= max_r`, `1 <= n`, `mn <= max_index`.
pub fn log_coeffs<T: crate::series::Coeff>(pair: &CoeffPair<T>, bounds: Bounds) -> Result<BiSeries<T>, ReplicateError> {
    let (mr, mq) = (bounds.max_r as i32, bounds.max_index as i32);
    let mut g = BiSeries::zero(mr, mq);
    for m in 1..=bounds.max_r {
        for n in 1..=bounds.max_index / m {
            g.set(m as i32, n as i32, divisor_sum(pair, m, n)?.neg())?;
        }
    }
    Ok(g.exp()?)
}

/// `constant + sum linear[k] c⁻(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineValue {
    pub constant: BigRational,
    pub linear: BTreeMap<u32, BigRational>,
}

impl AffineValue {
    pub fn constant(c: BigRational) -> Self {
        AffineValue { constant: c, linear: BTreeMap::new() }
    }

    pub fn unknown(k: u32) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(k, BigRational::one());
        AffineValue { constant: BigRational::zero(), linear }
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut linear = self.linear.clone();
        for (k, v) in &o.linear {
            *linear.entry(*k).or_insert_with(BigRational::zero) += v;
        }
        linear.retain(|_, v| !v.is_zero());
        AffineValue { constant: &self.constant + &o.constant, linear }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return AffineValue::constant(BigRational::zero());
        }
        AffineValue {
            constant: &self.constant * c,
            linear: self.linear.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Product, defined when at least one side is constant.
    pub fn mul(&self, o: &Self) -> Option<Self> {
        if self.is_constant() {
            Some(o.scale(&self.constant))
        } else if o.is_constant() {
            Some(self.scale(&o.constant))
        } else {
            None
        }
    }

    pub fn eval(&self, values: &BTreeMap<u32, BigRational>) -> Option<BigRational> {
        let mut acc = self.constant.clone();
        for (k, v) in &self.linear {
            acc += v * values.get(k)?;
        }
        Some(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// `[P]_{m+1,n} - [P]_{m,n+1} = 0`, read off the product.
    Vanish,
    /// `c_{m+1,n} = c_{m,n+1}` between cells of the logarithmic system.
    Ladder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub m: u32,
    pub n: u32,
}

/// All constraints with `p ∤ mn` inside `bounds`.
pub fn build_constraints(p: u32, bounds: Bounds) -> Vec<Constraint> {
    let mut out = Vec::new();
    for kind in [ConstraintKind::Vanish, ConstraintKind::Ladder] {
        for m in 1..bounds.max_r {
            for n in 1..=bounds.max_index {
                if (m + 1) * n > bounds.max_index || m * (n + 1) > bounds.max_index || (m * n) % p == 0 {
                    continue;
                }
                out.push(Constraint { kind, m, n });
            }
        }
    }
    out
}

impl Constraint {
    /// The constraint as an affine form in the unknown `c⁻(k)` (those absent from `known`).
    pub fn affine(
        &self,
        known: &BTreeMap<u32, BigRational>,
        cplus: &[BigInt],
    ) -> Result<AffineValue, ReplicateError> {
        let (m, n) = (self.m, self.n);
        let x = |d: u32, idx: u32| -> Result<AffineValue, ReplicateError> {
            if d.is_multiple_of(2) {
                let v = cplus.get(idx as usize).ok_or(ReplicateError::Missing { which: "c+", index: idx })?;
                Ok(AffineValue::constant(BigRational::from_integer(v.clone())))
            } else {
                Ok(match known.get(&idx) {
                    Some(v) => AffineValue::constant(v.clone()),
                    None => AffineValue::unknown(idx),
                })
            }
        };
        let d_of = |a: u32, b: u32| -> Result<AffineValue, ReplicateError> {
            let g = a.gcd(&b);
            let mut acc = AffineValue::constant(BigRational::zero());
            for d in (1..=g).filter(|d| g.is_multiple_of(*d)) {
                let inv = BigRational::new(BigInt::one(), BigInt::from(d));
                acc = acc.add(&x(d, a * b / (d * d))?.scale(&inv));
            }
            Ok(acc)
        };
        let (mr, nq) = (m + 1, n + 1);
        // P(a, b) = (1/a) sum a' G(a',b') P(a-a', b-b'), G = -D
        let mut g = vec![vec![AffineValue::constant(BigRational::zero()); nq as usize + 1]; mr as usize + 1];
        for a in 1..=mr {
            for b in 1..=nq {
                g[a as usize][b as usize] = d_of(a, b)?.scale(&-BigRational::one());
            }
        }
        let mut pv = vec![vec![AffineValue::constant(BigRational::zero()); nq as usize + 1]; mr as usize + 1];
        pv[0][0] = AffineValue::constant(BigRational::one());
        for a in 1..=mr as usize {
            for b in 1..=nq as usize {
                let mut acc = AffineValue::constant(BigRational::zero());
                for a1 in 1..=a {
                    for b1 in 1..=b {
                        let rest = &pv[a - a1][b - b1];
                        if rest.is_constant() && rest.constant.is_zero() {
                            continue;
                        }
                        let term = g[a1][b1].mul(rest).ok_or(ReplicateError::Nonlinear { m, n })?;
                        acc = acc.add(&term.scale(&BigRational::from_integer(BigInt::from(a1))));
                    }
                }
                pv[a][b] = acc.scale(&BigRational::new(BigInt::one(), BigInt::from(a)));
            }
        }
        let (m, n) = (m as usize, n as usize);
        Ok(pv[m + 1][n].add(&pv[m][n + 1].scale(&-BigRational::one())))
    }
}

fn to_integers(values: Vec<BigRational>) -> Result<Vec<BigInt>, ReplicateError> {
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| if v.is_integer() { Ok(v.to_integer()) } else { Err(ReplicateError::NonIntegral { index: i as u32 }) })
        .collect()
}

pub(crate) fn solve_series(
    mode: Mode<'_>,
    seeds: &[(u32, BigInt)],
    terms: u32,
    bounds: Bounds,
) -> Result<Vec<BigRational>, ReplicateError> {
    let sys = System::build(mode, bounds.max_r, bounds.max_index);
    let mut solver = ExactSolver::new(&sys);
    for (k, v) in seeds {
        if *k > bounds.max_index {
            return Err(ReplicateError::Missing { which: "c-", index: *k });
        }
        solver.assign(sys.cminus(*k), BigRational::from_integer(v.clone()))?;
    }
    let targets: Vec<_> = (1..=terms.min(bounds.max_index)).map(|k| sys.cminus(k)).collect();
    solver.run(&targets)?;
    let mut out = vec![BigRational::zero()];
    for k in 1..=terms {
        if k > bounds.max_index {
            return Err(ReplicateError::Underdetermined { index: k });
        }
        out.push(solver.value(sys.cminus(k)).cloned().ok_or(ReplicateError::Underdetermined { index: k })?);
    }
    Ok(out)
}

/// Working regions tried in turn; larger regions determine more coefficients.
pub(crate) fn region_ladder(terms: u32, cap: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut n = (2 * terms + 8).max(45).min(cap);
    loop {
        out.push(n);
        if n >= cap {
            break;
        }
        n = (n + n / 2).min(cap);
    }
    out
}

/// `c⁻(1..=terms)` from `c⁻(1), c⁻(2), c⁻(4), c⁻(5)` and the companion `c⁺`.
///
/// `cplus` is indexed by exponent and bounds the working region.
pub fn extend_cminus(seeds: [BigInt; 4], cplus: &[BigInt], p: u32, terms: u32) -> Result<Vec<BigInt>, ReplicateError> {
    let cap = (cplus.len().saturating_sub(1)) as u32;
    let seeds: Vec<(u32, BigInt)> = [1, 2, 4, 5].into_iter().zip(seeds).collect();
    let mut last = ReplicateError::Underdetermined { index: 1 };
    for n in region_ladder(terms, cap) {
        let bounds = Bounds { max_r: 5, max_index: n };
        match solve_series(Mode::Pair { p, cplus }, &seeds, terms, bounds) {
            Ok(v) => return to_integers(v),
            Err(e @ ReplicateError::Underdetermined { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CheckReport {
    /// Nonzero coefficients at positions with `p ∤ mn`.
    pub violations: Vec<(u32, u32, BigRational)>,
    /// Nonzero coefficients at positions with `p | mn`, where nothing is required.
    pub unconstrained: Vec<(u32, u32, BigRational)>,
    pub checked: usize,
}

/// Expand the product directly from the exponents and read off every constraint.
pub fn check_solution(cminus: &[BigInt], cplus: &[BigInt], p: u32, bounds: Bounds) -> Result<CheckReport, ReplicateError> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut factors = vec![Factor::new(1, -1, BigRational::one(), BigRational::zero())];
    for a in 1..=bounds.max_r {
        for b in 1..=bounds.max_index / a {
            let idx = a * b;
            let cm = cminus.get(idx as usize).ok_or(ReplicateError::Missing { which: "c-", index: idx })?;
            let cp = cplus.get(idx as usize).ok_or(ReplicateError::Missing { which: "c+", index: idx })?;
            let cm = BigRational::from_integer(cm.clone());
            let cp = BigRational::from_integer(cp.clone());
            factors.push(Factor::new(a as i32, b as i32, (&cp + &cm) / &two, (&cp - &cm) / &two));
        }
    }
    let prod: BiSeries<BigRational> =
        product_from_exponents(&factors, bounds.max_r as i32 - 1, bounds.max_index as i32)?;
    let mut report = CheckReport::default();
    for m in 1..bounds.max_r {
        for n in 1..=bounds.max_index {
            if (m + 1) * n > bounds.max_index || m * (n + 1) > bounds.max_index {
                continue;
            }
            let v = prod.coeff(m as i32, n as i32).ok_or(ReplicateError::Missing { which: "c-", index: m * n })?;
            report.checked += 1;
            if v.is_zero() {
                continue;
            }
            if (m * n) % p == 0 {
                report.unconstrained.push((m, n, v));
            } else {
                report.violations.push((m, n, v));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
