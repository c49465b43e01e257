//! The modular invariant, Hauptmodul seed rows, and extension of seeds by replication.
//!
//! Series are normalized `q^{-1} + sum_{n >= 1} c(n) q^n` and stored as coefficient lists
//! indexed by exponent, with the constant term fixed at 0.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::replicate::system::Mode;
use crate::replicate::{region_ladder, solve_series, Bounds, ReplicateError};

fn sigma(n: u64, k: u32) -> BigInt {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| BigInt::from(d).pow(k)).sum()
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Power series inverse of `a` with `a[0] = 1`.
fn inverse_unit(a: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut inv = vec![BigInt::zero(); len];
    inv[0] = BigInt::one();
    for n in 1..len {
        let mut s = BigInt::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &inv[n - k];
        }
        inv[n] = -s;
    }
    inv
}

/// `c(0..=terms)` of `j - 744` via Eisenstein series: `j = E4^3 / Δ`, `1728 Δ = E4^3 - E6^2`.
pub fn j_coefficients(terms: u32) -> Vec<BigInt> {
    let len = terms as usize + 2;
    let mut e4 = vec![BigInt::one()];
    let mut e6 = vec![BigInt::one()];
    for n in 1..=len as u64 {
        e4.push(sigma(n, 3) * 240);
        e6.push(sigma(n, 5) * -504);
    }
    let e4c = mul_trunc(&mul_trunc(&e4, &e4, len + 1), &e4, len + 1);
    let e6s = mul_trunc(&e6, &e6, len + 1);
    // Δ/q
    let delta: Vec<BigInt> = (1..=len).map(|n| (&e4c[n] - &e6s[n]) / 1728).collect();
    let a = mul_trunc(&e4c, &inverse_unit(&delta, len), len);
    let mut c: Vec<BigInt> = a[1..].to_vec();
    c[0] = BigInt::zero();
    c.truncate(terms as usize + 1);
    c
}

/// The same coefficients through `Δ = q prod (1 - q^n)^24`.
pub fn j_coefficients_product(terms: u32) -> Vec<BigInt> {
    let len = terms as usize + 2;
    let mut d = vec![BigInt::zero(); len];
    d[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..24 {
            for i in (n..len).rev() {
                let t = d[i - n].clone();
                d[i] -= t;
            }
        }
    }
    let mut e4 = vec![BigInt::one()];
    for n in 1..len as u64 {
        e4.push(sigma(n, 3) * 240);
    }
    let e4c = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
    let a = mul_trunc(&e4c, &inverse_unit(&d, len), len);
    let mut c: Vec<BigInt> = a[1..].to_vec();
    c[0] = BigInt::zero();
    c.truncate(terms as usize + 1);
    c
}

/// A row of the seed table: `c(-1)` and `c(1..=5)` of a normalized Hauptmodul.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HauptSeed {
    pub label: String,
    pub p: u32,
    pub coeffs: BTreeMap<i32, BigInt>,
}

impl HauptSeed {
    pub fn coeff(&self, n: i32) -> BigInt {
        self.coeffs.get(&n).cloned().unwrap_or_else(BigInt::zero)
    }

    /// `c(0..=k)` for the largest `k` available, constant term 0.
    pub fn series(&self) -> Vec<BigInt> {
        let top = self.coeffs.keys().copied().max().unwrap_or(0).max(0);
        (0..=top).map(|n| if n == 0 { BigInt::zero() } else { self.coeff(n) }).collect()
    }

    /// `c(1), c(2), c(4), c(5)`.
    pub fn sieve_seeds(&self) -> [BigInt; 4] {
        [self.coeff(1), self.coeff(2), self.coeff(4), self.coeff(5)]
    }

    /// Short class name: `Γ0(17)+` is `17A`.
    pub fn class_name(&self) -> Option<String> {
        let inner = self.label.strip_prefix("Γ0(")?.strip_suffix(")+")?;
        (inner.parse::<u32>().ok()? == self.p).then(|| alloc::format!("{}A", self.p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SeedParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Parse `label<TAB>p<TAB>c(-1),c(1),c(2),...`; `#` starts a comment line.
pub fn parse_seeds(text: &str) -> Result<Vec<HauptSeed>, SeedParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: &str| SeedParseError { line: i + 1, message: message.to_string() };
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err("expected three tab-separated fields"));
        }
        let p: u32 = fields[1].trim().parse().map_err(|_| err("bad prime field"))?;
        let values: Vec<BigInt> = fields[2]
            .split(',')
            .map(|s| s.trim().parse::<BigInt>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("bad coefficient"))?;
        if values.len() < 2 {
            return Err(err("need c(-1) and at least c(1)"));
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(-1, values[0].clone());
        for (k, v) in values.into_iter().enumerate().skip(1) {
            coeffs.insert(k as i32, v);
        }
        out.push(HauptSeed { label: fields[0].trim().to_string(), p, coeffs });
    }
    Ok(out)
}

/// Find a row by label or short class name.
pub fn find_seed<'a>(seeds: &'a [HauptSeed], name: &str) -> Option<&'a HauptSeed> {
    seeds.iter().find(|s| s.label == name).or_else(|| seeds.iter().find(|s| s.class_name().as_deref() == Some(name)))
}

/// Extend a series whose low replicates all equal itself (`j`, or the `pA` series for `p > 5`).
///
/// Solved from `c(1..=5)` and checked against every relation the region contains.
pub fn extend_class(seed: &HauptSeed, terms: u32) -> Result<Vec<BigInt>, ReplicateError> {
    let seeds: Vec<(u32, BigInt)> = (1..=5u32).map(|k| (k, seed.coeff(k as i32))).collect();
    let mut last = ReplicateError::Underdetermined { index: 1 };
    for n in region_ladder(terms, 4 * terms + 40) {
        match solve_series(Mode::Twin, &seeds, terms, Bounds { max_r: 5, max_index: n }) {
            Ok(v) => {
                return v
                    .into_iter()
                    .enumerate()
                    .map(|(i, x)| {
                        if x.is_integer() {
                            Ok(x.to_integer())
                        } else {
                            Err(ReplicateError::NonIntegral { index: i as u32 })
                        }
                    })
                    .collect()
            }
            Err(e @ ReplicateError::Underdetermined { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
