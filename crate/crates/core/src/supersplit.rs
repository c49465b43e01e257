//! Graded Tate cohomology of the algebras `h(A)` and `h_ω(A)`, and the ordinary/super split.
//!
//! `h(A)` is generated by `h_n(a)` subject to `h_n(a + b) = sum h_i(a) h_{n-i}(b)`; `ω` sends
//! `h_n(a)` to `(-1)^n h_n(-a)` and `h_ω(A)` is the quotient on which it acts trivially.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::kring::is_odd_prime;
use crate::modrep::{tate_cohomology_local, ModrepError};

/// Degree `d` carries `(ordinary, super)` dimensions, i.e. `(dim Ĥ⁰, dim Ĥ¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedSeries {
    pub dims: Vec<(u64, u64)>,
}

impl BigradedSeries {
    pub fn bound(&self) -> u32 {
        self.dims.len() as u32 - 1
    }

    pub fn get(&self, d: u32) -> Option<(u64, u64)> {
        self.dims.get(d as usize).copied()
    }

    /// Series of a graded tensor product: super times super is ordinary.
    pub fn tensor(&self, o: &Self) -> Self {
        let n = self.dims.len().min(o.dims.len());
        let mut dims = vec![(0u64, 0u64); n];
        for (i, a) in self.dims.iter().enumerate().take(n) {
            for (j, b) in o.dims.iter().enumerate().take(n - i) {
                dims[i + j].0 += a.0 * b.0 + a.1 * b.1;
                dims[i + j].1 += a.0 * b.1 + a.1 * b.0;
            }
        }
        BigradedSeries { dims }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    HRegular,
    HI,
    HOmegaRegular,
    HOmegaI,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::HRegular, Kind::HI, Kind::HOmegaRegular, Kind::HOmegaI];

    pub fn name(self) -> &'static str {
        match self {
            Kind::HRegular => "h_regular",
            Kind::HI => "h_I",
            Kind::HOmegaRegular => "h_omega_regular",
            Kind::HOmegaI => "h_omega_I",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }

    fn module(self) -> Module {
        match self {
            Kind::HRegular | Kind::HOmegaRegular => Module::Regular,
            Kind::HI | Kind::HOmegaI => Module::I,
        }
    }

    fn omega(self) -> bool {
        matches!(self, Kind::HOmegaRegular | Kind::HOmegaI)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Module {
    Regular,
    I,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupersplitError {
    NotOddPrime(u32),
    Cap { p: u32, degree: u32 },
    /// The relations do not span a direct summand modulo `p^K`.
    Torsion { degree: u32 },
    Modrep(ModrepError),
    Parity { n: i32 },
    NotApplicable(u32),
}

impl fmt::Display for SupersplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupersplitError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            SupersplitError::Cap { p, degree } => write!(f, "brute force capped (p = {p}, degree {degree})"),
            SupersplitError::Torsion { degree } => write!(f, "quotient has torsion in degree {degree}"),
            SupersplitError::Modrep(e) => write!(f, "{e}"),
            SupersplitError::Parity { n } => write!(f, "sum of coefficients of q^{n} is odd"),
            SupersplitError::NotApplicable(p) => write!(f, "p = {p}: p - 1 does not divide 12"),
        }
    }
}

impl From<ModrepError> for SupersplitError {
    fn from(e: ModrepError) -> Self {
        SupersplitError::Modrep(e)
    }
}

/// Expand a product of generators: `(degree, super)` pairs; ordinary ones are polynomial,
/// super ones exterior.
fn expand(gens: &[(u32, bool)], bound: u32) -> BigradedSeries {
    let n = bound as usize + 1;
    let mut dims = vec![(0u64, 0u64); n];
    dims[0] = (1, 0);
    for &(deg, sup) in gens {
        let deg = deg as usize;
        if sup {
            for d in (deg..n).rev() {
                let (o, s) = dims[d - deg];
                dims[d].0 += s;
                dims[d].1 += o;
            }
        } else {
            for d in deg..n {
                let (o, s) = dims[d - deg];
                dims[d].0 += o;
                dims[d].1 += s;
            }
        }
    }
    BigradedSeries { dims }
}

/// Closed forms from the generator descriptions.
pub fn cohomology_series(kind: Kind, p: u32, bound: u32) -> Result<BigradedSeries, SupersplitError> {
    if !is_odd_prime(p) {
        return Err(SupersplitError::NotOddPrime(p));
    }
    let gens: Vec<(u32, bool)> = match kind {
        Kind::HRegular => (1..=bound / p).map(|n| (n * p, false)).collect(),
        Kind::HI => (1..=bound).filter(|n| n % p != 0).map(|n| (n, true)).collect(),
        Kind::HOmegaRegular => (1..=bound / p).filter(|n| n % 2 == 1).map(|n| (n * p, false)).collect(),
        Kind::HOmegaI => (1..=bound).filter(|n| n % 2 == 1 && n % p != 0).map(|n| (n, true)).collect(),
    };
    Ok(expand(&gens, bound))
}

const PREC: u32 = 6;
/// Largest monomial basis the brute force will handle in one degree.
pub const BRUTE_FORCE_CAP: usize = 6000;

type Mono = Vec<u8>;
type Poly = BTreeMap<Mono, u64>;

struct Ring {
    p: u32,
    maxdeg: u32,
    modulus: u64,
}

impl Ring {
    fn nvars(&self) -> usize {
        (self.maxdeg * self.p) as usize
    }

    fn var(&self, n: u32, i: u32) -> usize {
        ((n - 1) * self.p + i) as usize
    }

    fn one(&self) -> Mono {
        vec![0; self.nvars()]
    }

    fn x(&self, n: u32, i: u32) -> Poly {
        let mut m = self.one();
        if n > 0 {
            m[self.var(n, i)] = 1;
        }
        let mut out = Poly::new();
        out.insert(m, 1);
        out
    }

    fn add_into(&self, acc: &mut Poly, m: Mono, c: u64) {
        let e = acc.entry(m).or_insert(0);
        *e = (*e + c) % self.modulus;
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = Poly::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let m: Mono = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                self.add_into(&mut out, m, ((*ca as u128 * *cb as u128) % self.modulus as u128) as u64);
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn neg(&self, a: &Poly) -> Poly {
        a.iter().map(|(m, c)| (m.clone(), (self.modulus - c) % self.modulus)).filter(|x| x.1 != 0).collect()
    }

    fn sum(&self, a: &Poly, b: &Poly) -> Poly {
        let mut out = a.clone();
        for (m, c) in b {
            self.add_into(&mut out, m.clone(), *c);
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn degree(&self, m: &Mono) -> u32 {
        m.iter().enumerate().map(|(v, &e)| (v as u32 / self.p + 1) * e as u32).sum()
    }

    fn monomials(&self, d: u32) -> Vec<Mono> {
        fn rec(r: &Ring, v: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            if v == r.nvars() {
                return;
            }
            let w = v as u32 / r.p + 1;
            let mut e = 0;
            while e * w <= left {
                cur[v] = e as u8;
                rec(r, v + 1, left - e * w, cur, out);
                e += 1;
            }
            cur[v] = 0;
        }
        let mut out = Vec::new();
        rec(self, 0, d, &mut self.one(), &mut out);
        out
    }

    /// `g` shifts the index `i` of every `h_n(g_i)`.
    fn shift(&self, m: &Mono) -> Mono {
        let mut out = self.one();
        for n in 1..=self.maxdeg {
            for i in 0..self.p {
                out[self.var(n, (i + 1) % self.p)] = m[self.var(n, i)];
            }
        }
        out
    }

    /// `h_n(g_0 + ... + g_{p-1})`.
    fn h_norm(&self, n: u32) -> Poly {
        let mut acc = self.x(0, 0);
        for i in 0..self.p {
            // multiply by H_{g_i}(t) truncated at t^n, keeping degree-n bookkeeping
            let mut next = Poly::new();
            for k in 0..=n {
                let part = self.mul(&acc, &self.x(k, i));
                next = self.sum(&next, &part);
            }
            next.retain(|m, _| self.degree(m) <= n);
            acc = next;
        }
        acc.retain(|m, _| self.degree(m) == n);
        acc
    }

    /// `x_{n,i} - ω(x_{n,i})` with `ω(h_n(a)) = (-1)^n [1/H_a(t)]_n`.
    fn omega_relation(&self, n: u32, i: u32) -> Poly {
        let mut inv: Vec<Poly> = vec![self.x(0, i)];
        for k in 1..=n {
            let mut s = Poly::new();
            for j in 1..=k {
                s = self.sum(&s, &self.mul(&self.x(j, i), &inv[(k - j) as usize]));
            }
            inv.push(self.neg(&s));
        }
        let e = if n.is_multiple_of(2) { inv[n as usize].clone() } else { self.neg(&inv[n as usize]) };
        self.sum(&self.x(n, i), &self.neg(&e))
    }
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let (g, x) = {
        let e = (a as i128).extended_gcd(&(m as i128));
        (e.gcd, e.x)
    };
    debug_assert_eq!(g, 1);
    x.rem_euclid(m as i128) as u64
}

/// Reduced echelon form of the span of `rows`, pivots on units only.
fn echelon(rows: Vec<BTreeMap<usize, u64>>, p: u64, modulus: u64, degree: u32) -> Result<BTreeMap<usize, BTreeMap<usize, u64>>, SupersplitError> {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    for mut row in rows {
        // reduce by existing pivots
        let hits: Vec<usize> = row.keys().filter(|c| pivots.contains_key(c)).copied().collect();
        for c in hits {
            let Some(&f) = row.get(&c) else { continue };
            for (&j, &v) in &pivots[&c] {
                let e = row.entry(j).or_insert(0);
                *e = ((*e as u128 + modulus as u128 - (f as u128 * v as u128) % modulus as u128) % modulus as u128) as u64;
            }
        }
        row.retain(|_, v| *v != 0);
        if row.is_empty() {
            continue;
        }
        let Some((&c, &v)) = row.iter().rev().find(|(_, &v)| v % p != 0) else {
            return Err(SupersplitError::Torsion { degree });
        };
        let inv = inverse_mod(v, modulus);
        for x in row.values_mut() {
            *x = ((*x as u128 * inv as u128) % modulus as u128) as u64;
        }
        for other in pivots.values_mut() {
            if let Some(&f) = other.get(&c) {
                for (&j, &w) in &row {
                    let e = other.entry(j).or_insert(0);
                    *e = ((*e as u128 + modulus as u128 - (f as u128 * w as u128) % modulus as u128) % modulus as u128)
                        as u64;
                }
                other.retain(|_, x| *x != 0);
            }
        }
        pivots.insert(c, row);
    }
    Ok(pivots)
}

fn components(g: &[Vec<u64>]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Build the graded pieces of `h(A)` (or `h_ω(A)`) as explicit lattices and take Tate cohomology.
pub fn brute_force_h(p: u32, module: Module, omega: bool, max_degree: u32) -> Result<BigradedSeries, SupersplitError> {
    if !is_odd_prime(p) {
        return Err(SupersplitError::NotOddPrime(p));
    }
    let ring = Ring { p, maxdeg: max_degree.max(1), modulus: (p as u64).pow(PREC) };
    let mut relations: Vec<Poly> = Vec::new();
    if module == Module::I {
        relations.extend((1..=max_degree).map(|n| ring.h_norm(n)));
    }
    if omega {
        for n in 2..=max_degree {
            for i in 0..p {
                relations.push(ring.omega_relation(n, i));
            }
        }
    }
    let mut dims = vec![(1u64, 0u64)];
    let mut by_degree: Vec<Vec<Mono>> = vec![vec![ring.one()]];
    for d in 1..=max_degree {
        let monos = ring.monomials(d);
        if monos.len() > BRUTE_FORCE_CAP {
            return Err(SupersplitError::Cap { p, degree: d });
        }
        by_degree.push(monos);
        let monos = &by_degree[d as usize];
        let index: BTreeMap<&Mono, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows = Vec::new();
        for r in &relations {
            let rd = ring.degree(r.keys().next().expect("relations are nonzero"));
            if rd > d {
                continue;
            }
            for m in &by_degree[(d - rd) as usize] {
                let mut row = BTreeMap::new();
                for (rm, c) in r {
                    let prod: Mono = rm.iter().zip(m).map(|(a, b)| a + b).collect();
                    row.insert(index[&prod], *c);
                }
                rows.push(row);
            }
        }
        let piv = echelon(rows, p as u64, ring.modulus, d)?;
        let basis: Vec<usize> = (0..monos.len()).filter(|c| !piv.contains_key(c)).collect();
        let pos: BTreeMap<usize, usize> = basis.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let k = basis.len();
        let mut g = vec![vec![0u64; k]; k];
        for (j, &c) in basis.iter().enumerate() {
            let t = index[&ring.shift(&monos[c])];
            match piv.get(&t) {
                None => g[pos[&t]][j] = 1,
                Some(row) => {
                    for (&col, &v) in row {
                        if col != t {
                            g[pos[&col]][j] = (ring.modulus - v) % ring.modulus;
                        }
                    }
                }
            }
        }
        let mut total = (0u64, 0u64);
        for block in components(&g) {
            let sub: Vec<Vec<u64>> = block.iter().map(|&i| block.iter().map(|&j| g[i][j]).collect()).collect();
            let (h0, h1) = tate_cohomology_local(p, PREC, &sub)?;
            total.0 += h0;
            total.1 += h1;
        }
        dims.push(total);
    }
    Ok(BigradedSeries { dims })
}

/// `brute_force_h` for the module and `ω` flag of `kind`.
pub fn brute_force_kind(kind: Kind, p: u32, max_degree: u32) -> Result<BigradedSeries, SupersplitError> {
    brute_force_h(p, kind.module(), kind.omega(), max_degree)
}

type Series = BTreeMap<i32, BigInt>;

/// Halve `T_σg ± T_g` into the ordinary and super series.
pub fn split(
    t_g: &BTreeMap<i32, BigInt>,
    t_sigma_g: &BTreeMap<i32, BigInt>,
) -> Result<(Series, Series), SupersplitError> {
    let zero = BigInt::zero();
    let keys: alloc::collections::BTreeSet<i32> = t_g.keys().chain(t_sigma_g.keys()).copied().collect();
    let mut ordinary = BTreeMap::new();
    let mut sup = BTreeMap::new();
    for n in keys {
        let a = t_g.get(&n).unwrap_or(&zero);
        let b = t_sigma_g.get(&n).unwrap_or(&zero);
        let s = a + b;
        if s.is_odd() {
            return Err(SupersplitError::Parity { n });
        }
        ordinary.insert(n, s / 2);
        sup.insert(n, (b - a) / 2);
    }
    Ok((ordinary, sup))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtraspecialReport {
    pub p: u32,
    pub divides_twelve: bool,
    pub residue: u64,
    /// `(dim Ĥ⁰, dim Ĥ¹)` implied for the `2^12`-dimensional module.
    pub tate: (u64, u64),
}

/// `(p - 1) | 12` and `2^12 ≡ 1 mod p`, so the module is `Z_p` plus free summands.
pub fn extraspecial_check(p: u32) -> Result<ExtraspecialReport, SupersplitError> {
    if !is_odd_prime(p) || 12 % (p - 1) != 0 {
        return Err(SupersplitError::NotApplicable(p));
    }
    let residue = 4096 % p as u64;
    Ok(ExtraspecialReport { p, divides_twelve: true, residue, tate: if residue == 1 { (1, 0) } else { (0, 0) } })
}
