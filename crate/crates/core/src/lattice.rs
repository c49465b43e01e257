//! Integral lattices given by Gram matrices: exterior powers, determinants, vector counts.
#![allow(clippy::needless_range_loop)]

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    NotSymmetric,
    NotPositiveDefinite,
    TooLarge { size: usize, cap: usize },
    BadPower { n: usize, rank: usize },
    Overflow,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NotSymmetric => write!(f, "Gram matrix is not symmetric"),
            LatticeError::NotPositiveDefinite => write!(f, "form is not positive definite"),
            LatticeError::TooLarge { size, cap } => write!(f, "rank {size} exceeds cap {cap}"),
            LatticeError::BadPower { n, rank } => write!(f, "exterior power {n} of a rank {rank} lattice"),
            LatticeError::Overflow => write!(f, "integer overflow"),
        }
    }
}

pub const DEFAULT_RANK_CAP: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n || (0..n).any(|j| gram[j][i] != row[j]) {
                return Err(LatticeError::NotSymmetric);
            }
        }
        Ok(GramLattice { gram })
    }

    pub fn identity(n: usize) -> Self {
        GramLattice { gram: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn det(&self) -> BigInt {
        let m: Vec<Vec<BigInt>> = self.gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        bareiss(m)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == BigInt::from(1)
    }

    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, r)| r[i] % 2 == 0)
    }

    /// Exact `LDL^T` pivots are all positive.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.rank();
        let mut a: Vec<Vec<BigRational>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        for k in 0..n {
            if !a[k][k].is_positive() {
                return false;
            }
            for i in k + 1..n {
                let f = &a[i][k] / &a[k][k];
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        true
    }

    /// Gram matrix of `U G U^T`.
    pub fn transform(&self, u: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let n = self.rank();
        let mut ug = vec![vec![0i128; n]; u.len()];
        for (i, ur) in u.iter().enumerate() {
            for k in 0..n {
                if ur[k] != 0 {
                    for j in 0..n {
                        ug[i][j] += ur[k] as i128 * self.gram[k][j] as i128;
                    }
                }
            }
        }
        let mut out = vec![vec![0i64; u.len()]; u.len()];
        for i in 0..u.len() {
            for j in 0..u.len() {
                let s: i128 = (0..n).map(|k| ug[i][k] * u[j][k] as i128).sum();
                out[i][j] = s.to_i64().ok_or(LatticeError::Overflow)?;
            }
        }
        GramLattice::new(out)
    }
}

fn bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    m[n - 1][n - 1].clone() * sign
}

/// Gram matrix of `E8` in the simple-root basis (Cartan matrix).
pub fn e8() -> GramLattice {
    // chain 0-1-2-3-4-5-6 with node 7 attached to 4
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    GramLattice { gram: g }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// `Λ^n L`: the `(I, J)` entry is the minor of the Gram matrix on rows `I`, columns `J`.
pub fn exterior_power_lattice(l: &GramLattice, n: usize) -> Result<GramLattice, LatticeError> {
    let r = l.rank();
    if n > r {
        return Err(LatticeError::BadPower { n, rank: r });
    }
    let size = binom(r, n);
    if size > DEFAULT_RANK_CAP {
        return Err(LatticeError::TooLarge { size, cap: DEFAULT_RANK_CAP });
    }
    let basis = subsets(r, n);
    let mut g = vec![vec![0i64; size]; size];
    for (a, ia) in basis.iter().enumerate() {
        for (b, ib) in basis.iter().enumerate().skip(a) {
            let minor: Vec<Vec<BigInt>> =
                ia.iter().map(|&i| ib.iter().map(|&j| BigInt::from(l.gram[i][j])).collect()).collect();
            let d = bareiss(minor).to_i64().ok_or(LatticeError::Overflow)?;
            g[a][b] = d;
            g[b][a] = d;
        }
    }
    Ok(GramLattice { gram: g })
}

fn floor(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) > x {
        t - 1
    } else {
        t
    }
}

fn round(x: f64) -> i64 {
    floor(x + 0.5)
}

/// LLL reduction of the Gram matrix; returns the reduced lattice (same isometry class).
pub fn lll(l: &GramLattice) -> Result<GramLattice, LatticeError> {
    let n = l.rank();
    let mut g: Vec<Vec<i128>> = l.gram.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let gs = |g: &Vec<Vec<i128>>| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut mu = vec![vec![0f64; n]; n];
        let mut bb = vec![0f64; n];
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j] as f64;
                for k in 0..j {
                    s -= mu[j][k] * mu[i][k] * bb[k];
                }
                mu[i][j] = s / bb[j];
            }
            let mut s = g[i][i] as f64;
            for k in 0..i {
                s -= mu[i][k] * mu[i][k] * bb[k];
            }
            bb[i] = s;
        }
        (mu, bb)
    };
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..k).rev() {
            let (mu, _) = gs(&g);
            let r = round(mu[k][j]) as i128;
            if r != 0 {
                // b_k -= r b_j
                let gkj = g[k][j];
                let gjj = g[j][j];
                for i in 0..n {
                    if i != k {
                        g[k][i] -= r * g[j][i];
                        g[i][k] = g[k][i];
                    }
                }
                g[k][k] += -2 * r * gkj + r * r * gjj;
            }
        }
        let (mu, bb) = gs(&g);
        if bb[k] < (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1] {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    let gram = g
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_i64().ok_or(LatticeError::Overflow)).collect())
        .collect::<Result<_, _>>()?;
    GramLattice::new(gram)
}

/// Number of vectors of each norm `(v, v) <= max_norm`, zero vector included.
pub fn theta_counts(l: &GramLattice, max_norm: i64) -> Result<BTreeMap<i64, u64>, LatticeError> {
    if !l.is_positive_definite() {
        return Err(LatticeError::NotPositiveDefinite);
    }
    let red = lll(l)?;
    let n = red.rank();
    let g = &red.gram;
    // q[i][i] = B_i, q[i][j] = mu_{j,i} for j > i
    let mut mu = vec![vec![0f64; n]; n];
    let mut bb = vec![0f64; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * bb[k];
            }
            mu[i][j] = s / bb[j];
        }
        let mut s = g[i][i] as f64;
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * bb[k];
        }
        bb[i] = s;
    }
    let mut counts = BTreeMap::new();
    let bound = max_norm as f64 * (1.0 + 1e-9) + 1e-9;
    let mut x = vec![0i64; n];
    let mut h = vec![0i64; n];
    enumerate(n, g, &mu, &bb, bound, max_norm, 0.0, 0, &mut x, &mut h, &mut counts);
    Ok(counts)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    level: usize,
    g: &[Vec<i64>],
    mu: &[Vec<f64>],
    bb: &[f64],
    bound: f64,
    max_norm: i64,
    partial: f64,
    exact: i64,
    x: &mut [i64],
    h: &mut [i64],
    counts: &mut BTreeMap<i64, u64>,
) {
    if level == 0 {
        if exact <= max_norm {
            *counts.entry(exact).or_insert(0) += 1;
        }
        return;
    }
    let k = level - 1;
    let n = x.len();
    let c: f64 = -(k + 1..n).map(|j| mu[j][k] * x[j] as f64).sum::<f64>();
    let room = bound - partial;
    let centre = round(c);
    let visit = |v: i64, x: &mut [i64], h: &mut [i64], counts: &mut BTreeMap<i64, u64>| -> bool {
        let d = v as f64 - c;
        let add = bb[k] * d * d;
        if add > room {
            return false;
        }
        x[k] = v;
        let e = exact + v * (2 * h[k] + g[k][k] * v);
        if v != 0 {
            for (i, hi) in h.iter_mut().enumerate() {
                *hi += g[i][k] * v;
            }
        }
        enumerate(k, g, mu, bb, bound, max_norm, partial + add, e, x, h, counts);
        if v != 0 {
            for (i, hi) in h.iter_mut().enumerate() {
                *hi -= g[i][k] * v;
            }
        }
        x[k] = 0;
        true
    };
    visit(centre, x, h, counts);
    let mut up = true;
    let mut down = true;
    let mut step = 1;
    while up || down {
        if up {
            up = visit(centre + step, x, h, counts) || (centre + step) as f64 <= c;
        }
        if down {
            down = visit(centre - step, x, h, counts) || (centre - step) as f64 >= c;
        }
        step += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_basics() {
        let e = e8();
        assert_eq!(e.det(), BigInt::from(1));
        assert!(e.is_even() && e.is_positive_definite());
        let t = theta_counts(&e, 4).unwrap();
        assert_eq!(t.get(&0), Some(&1));
        assert_eq!(t.get(&2), Some(&240));
        assert_eq!(t.get(&4), Some(&2160));
        assert_eq!(t.get(&1), None);
    }

    #[test]
    fn identity_powers() {
        for k in 0..=4 {
            let l = exterior_power_lattice(&GramLattice::identity(4), k).unwrap();
            assert_eq!(l, GramLattice::identity(binom(4, k)));
        }
        let t = theta_counts(&GramLattice::identity(3), 2).unwrap();
        assert_eq!(t[&1], 6);
        assert_eq!(t[&2], 12);
    }

    #[test]
    fn rejects_indefinite() {
        let l = GramLattice::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(theta_counts(&l, 2), Err(LatticeError::NotPositiveDefinite));
        assert_eq!(GramLattice::new(vec![vec![1, 2], vec![0, 1]]), Err(LatticeError::NotSymmetric));
        assert!(matches!(exterior_power_lattice(&e8(), 9), Err(LatticeError::BadPower { .. })));
    }

    #[test]
    fn counts_survive_basis_change() {
        let u = vec![vec![1, 2, 0], vec![0, 1, 3], vec![0, 0, 1]];
        let a = GramLattice::new(vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]]).unwrap();
        let b = a.transform(&u).unwrap();
        assert_eq!(a.det(), b.det());
        assert_eq!(theta_counts(&a, 6).unwrap(), theta_counts(&b, 6).unwrap());
    }
}
