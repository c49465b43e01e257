//! Concrete `Z_p[G]`-lattices given by the integer matrix of a generator `g`.
//!
//! Tate cohomology is read off from elementary divisors: `im N` has saturation
//! `ker(g-1)` and `im(g-1)` has saturation `ker N`, so the `p`-parts of the
//! elementary divisors of `N` and `g - 1` give `Ĥ⁰` and `Ĥ¹`. The divisors are
//! computed by Smith reduction over `Z/p^K`, which is exact for the valuations
//! below `K` that occur here (Tate groups are killed by `p`).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::kring::is_odd_prime;

pub const DEFAULT_DIM_CAP: usize = 5000;

/// Working precision `p^K` for local Smith reduction.
const LOCAL_K: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModrepError {
    NotOddPrime(u32),
    MismatchedPrime,
    NotSquare,
    NotOrderP,
    Overflow,
    DimensionCap { dim: usize, cap: usize },
    /// The counting rule produced a negative or fractional multiplicity.
    CorruptDecomposition,
    /// Shapes of a complex do not line up.
    Shape,
    /// A split complex with `gcd(k, p) = 1` whose Euler characteristic is not zero.
    EulerCharacteristic,
    Parse { line: usize },
}

impl fmt::Display for ModrepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModrepError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            ModrepError::MismatchedPrime => f.write_str("modules over different primes"),
            ModrepError::NotSquare => f.write_str("matrix is not square"),
            ModrepError::NotOrderP => f.write_str("g^p is not the identity"),
            ModrepError::Overflow => f.write_str("integer overflow in matrix entries"),
            ModrepError::DimensionCap { dim, cap } => write!(f, "dimension {dim} exceeds cap {cap}"),
            ModrepError::CorruptDecomposition => f.write_str("module does not decompose into indecomposables"),
            ModrepError::Shape => f.write_str("map shapes do not match the complex"),
            ModrepError::EulerCharacteristic => f.write_str("alternating sum of a split complex is nonzero"),
            ModrepError::Parse { line } => write!(f, "parse error on line {line}"),
        }
    }
}

/// Dense integer matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, k: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, k);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, ModrepError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(ModrepError::Shape);
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ModrepError> {
        if self.cols != o.rows {
            return Err(ModrepError::Shape);
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as i128;
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j) as i128;
                    if b == 0 {
                        continue;
                    }
                    let v = out.get(i, j) as i128 + a * b;
                    out.set(i, j, i64::try_from(v).map_err(|_| ModrepError::Overflow)?);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self, ModrepError> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(ModrepError::Shape);
        }
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.checked_add(*b).ok_or(ModrepError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Whitespace-separated integer grid, one row per line.
    pub fn to_grid(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| alloc::format!("{}", self.get(i, j))).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_grid(text: &str) -> Result<Self, ModrepError> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ModrepError::Parse { line: ln + 1 })?;
            rows.push(row);
        }
        Self::from_rows(&rows)
    }

    /// Column `j` as a sparse list.
    fn column(&self, j: usize) -> Vec<(usize, i64)> {
        (0..self.rows).filter_map(|i| {
            let v = self.get(i, j);
            (v != 0).then_some((i, v))
        })
        .collect()
    }
}

/// A free `Z`-module of rank `dim` with `g` acting by an integer matrix of order `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteModule {
    p: u32,
    g: IntMatrix,
}

/// Multiplicities of `Z_p`, `Z_p[G]`, `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub n_triv: u64,
    pub n_reg: u64,
    pub n_i: u64,
}

impl ConcreteModule {
    /// Validates `g^p = 1`, which forces `det g = 1` for odd `p`.
    pub fn new(p: u32, g: IntMatrix) -> Result<Self, ModrepError> {
        if !is_odd_prime(p) {
            return Err(ModrepError::NotOddPrime(p));
        }
        if g.rows != g.cols {
            return Err(ModrepError::NotSquare);
        }
        let m = ConcreteModule { p, g };
        let sparse = m.sparse_columns();
        for j in 0..m.dim() {
            let mut v: BTreeMap<usize, i128> = BTreeMap::new();
            v.insert(j, 1);
            for _ in 0..p {
                v = apply_sparse(&sparse, &v)?;
            }
            if v.len() != 1 || v.get(&j) != Some(&1) {
                return Err(ModrepError::NotOrderP);
            }
        }
        Ok(m)
    }

    pub fn trivial(p: u32) -> Result<Self, ModrepError> {
        Self::new(p, IntMatrix::identity(1))
    }

    /// The regular representation: `g` cycles the basis `g^0, ..., g^{p-1}`.
    pub fn regular(p: u32) -> Result<Self, ModrepError> {
        let n = p as usize;
        let mut g = IntMatrix::zeros(n, n);
        for j in 0..n {
            g.set((j + 1) % n, j, 1);
        }
        Self::new(p, g)
    }

    /// `I` as `Z[x]/(1 + x + ... + x^{p-1})` with `g = x`: the companion matrix.
    pub fn augmentation(p: u32) -> Result<Self, ModrepError> {
        let n = p as usize - 1;
        let mut g = IntMatrix::zeros(n, n);
        for j in 0..n - 1 {
            g.set(j + 1, j, 1);
        }
        for i in 0..n {
            g.set(i, n - 1, -1);
        }
        Self::new(p, g)
    }

    /// `I` as the augmentation kernel with basis `g^i - g^0`, `i = 1..p-1`.
    pub fn augmentation_kernel(p: u32) -> Result<Self, ModrepError> {
        let n = p as usize - 1;
        let mut g = IntMatrix::zeros(n, n);
        // g (g^i - 1) = (g^{i+1} - 1) - (g - 1)
        for j in 0..n {
            let i = j + 1;
            if i + 1 < p as usize {
                g.set(i, j, 1);
            }
            g.set(0, j, g.get(0, j) - 1);
        }
        Self::new(p, g)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.g.rows
    }

    pub fn g_matrix(&self) -> &IntMatrix {
        &self.g
    }

    fn sparse_columns(&self) -> Vec<Vec<(usize, i64)>> {
        (0..self.dim()).map(|j| self.g.column(j)).collect()
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|i| self.g.get(i, i)).sum()
    }

    /// `N = 1 + g + ... + g^{p-1}` and `g - 1`, exactly.
    fn norm_and_difference(&self) -> Result<(IntMatrix, IntMatrix), ModrepError> {
        let n = self.dim();
        let sparse = self.sparse_columns();
        let mut norm = IntMatrix::zeros(n, n);
        for j in 0..n {
            let mut v: BTreeMap<usize, i128> = BTreeMap::new();
            v.insert(j, 1);
            let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
            for _ in 0..self.p {
                for (&i, &x) in &v {
                    *acc.entry(i).or_insert(0) += x;
                }
                v = apply_sparse(&sparse, &v)?;
            }
            for (i, x) in acc {
                norm.set(i, j, i64::try_from(x).map_err(|_| ModrepError::Overflow)?);
            }
        }
        let mut diff = self.g.clone();
        for i in 0..n {
            diff.set(i, i, diff.get(i, i) - 1);
        }
        Ok((norm, diff))
    }

    /// `(dim Ĥ⁰, dim Ĥ¹)` over `F_p`.
    pub fn tate_cohomology(&self) -> Result<(u64, u64), ModrepError> {
        let (norm, diff) = self.norm_and_difference()?;
        let p = self.p as u64;
        let (h0, r0) = local_divisors(&reduce(&norm, p), p);
        let (h1, r1) = local_divisors(&reduce(&diff, p), p);
        // rank N + rank (g - 1) = dim over Q; a shortfall means a divisor hid below p^K
        if r0 + r1 != self.dim() {
            return Err(ModrepError::CorruptDecomposition);
        }
        Ok((h0, h1))
    }

    pub fn decompose(&self) -> Result<Decomposition, ModrepError> {
        let (h0, h1) = self.tate_cohomology()?;
        let p = self.p as u64;
        let dim = self.dim() as u64;
        let used = h0 + (p - 1) * h1;
        if used > dim || !(dim - used).is_multiple_of(p) || self.trace() != h0 as i64 - h1 as i64 {
            return Err(ModrepError::CorruptDecomposition);
        }
        Ok(Decomposition { n_triv: h0, n_reg: (dim - used) / p, n_i: h1 })
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self, ModrepError> {
        if self.p != o.p {
            return Err(ModrepError::MismatchedPrime);
        }
        let (a, b) = (self.dim(), o.dim());
        let mut g = IntMatrix::zeros(a + b, a + b);
        for i in 0..a {
            for j in 0..a {
                g.set(i, j, self.g.get(i, j));
            }
        }
        for i in 0..b {
            for j in 0..b {
                g.set(a + i, a + j, o.g.get(i, j));
            }
        }
        Ok(ConcreteModule { p: self.p, g })
    }

    pub fn tensor(&self, o: &Self) -> Result<Self, ModrepError> {
        self.tensor_capped(o, DEFAULT_DIM_CAP)
    }

    pub fn tensor_capped(&self, o: &Self, cap: usize) -> Result<Self, ModrepError> {
        if self.p != o.p {
            return Err(ModrepError::MismatchedPrime);
        }
        let (a, b) = (self.dim(), o.dim());
        let dim = a * b;
        if dim > cap {
            return Err(ModrepError::DimensionCap { dim, cap });
        }
        let mut g = IntMatrix::zeros(dim, dim);
        for i1 in 0..a {
            for j1 in 0..a {
                let x = self.g.get(i1, j1) as i128;
                if x == 0 {
                    continue;
                }
                for i2 in 0..b {
                    for j2 in 0..b {
                        let v = x * o.g.get(i2, j2) as i128;
                        g.set(i1 * b + i2, j1 * b + j2, i64::try_from(v).map_err(|_| ModrepError::Overflow)?);
                    }
                }
            }
        }
        Ok(ConcreteModule { p: self.p, g })
    }

    pub fn exterior_power(&self, n: usize) -> Result<Self, ModrepError> {
        self.exterior_power_capped(n, DEFAULT_DIM_CAP)
    }

    pub fn exterior_power_capped(&self, n: usize, cap: usize) -> Result<Self, ModrepError> {
        let basis = subsets(self.dim(), n, false);
        self.multilinear(basis, cap, true)
    }

    pub fn symmetric_power(&self, n: usize) -> Result<Self, ModrepError> {
        self.symmetric_power_capped(n, DEFAULT_DIM_CAP)
    }

    pub fn symmetric_power_capped(&self, n: usize, cap: usize) -> Result<Self, ModrepError> {
        let count = binomial_usize(self.dim() + n - 1, n);
        if count > cap {
            return Err(ModrepError::DimensionCap { dim: count, cap });
        }
        let basis = subsets(self.dim(), n, true);
        self.multilinear(basis, cap, false)
    }

    /// Matrix of `g` on `Λⁿ` (`alternating`) or `Sⁿ`, basis = sorted multi-indices.
    fn multilinear(&self, basis: Vec<Vec<usize>>, cap: usize, alternating: bool) -> Result<Self, ModrepError> {
        let dim = basis.len();
        if dim > cap {
            return Err(ModrepError::DimensionCap { dim, cap });
        }
        let index: BTreeMap<&[usize], usize> = basis.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
        let cols = self.sparse_columns();
        let mut g = IntMatrix::zeros(dim, dim);
        for (j, idx) in basis.iter().enumerate() {
            let mut acc: BTreeMap<Vec<usize>, i128> = BTreeMap::new();
            acc.insert(Vec::new(), 1);
            for &k in idx {
                let mut next: BTreeMap<Vec<usize>, i128> = BTreeMap::new();
                for (mono, c) in &acc {
                    for &(i, x) in &cols[k] {
                        let pos = mono.partition_point(|&t| t < i);
                        let mut sign = 1i128;
                        if alternating {
                            if mono.get(pos) == Some(&i) {
                                continue;
                            }
                            if (mono.len() - pos) % 2 == 1 {
                                sign = -1;
                            }
                        }
                        let mut m2 = mono.clone();
                        m2.insert(pos, i);
                        let v = c.checked_mul(x as i128 * sign).ok_or(ModrepError::Overflow)?;
                        *next.entry(m2).or_insert(0) += v;
                    }
                }
                next.retain(|_, v| *v != 0);
                acc = next;
            }
            for (mono, c) in acc {
                let i = index[mono.as_slice()];
                g.set(i, j, i64::try_from(c).map_err(|_| ModrepError::Overflow)?);
            }
        }
        Ok(ConcreteModule { p: self.p, g })
    }
}

fn binomial_usize(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    r as usize
}

/// Sorted `n`-subsets (or multisets when `repeat`) of `0..dim`, lexicographic.
fn subsets(dim: usize, n: usize, repeat: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(dim: usize, n: usize, repeat: bool, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, n, repeat, if repeat { i } else { i + 1 }, cur, out);
            cur.pop();
        }
    }
    rec(dim, n, repeat, 0, &mut cur, &mut out);
    out
}

fn apply_sparse(cols: &[Vec<(usize, i64)>], v: &BTreeMap<usize, i128>) -> Result<BTreeMap<usize, i128>, ModrepError> {
    let mut out: BTreeMap<usize, i128> = BTreeMap::new();
    for (&j, &x) in v {
        for &(i, a) in &cols[j] {
            let t = x.checked_mul(a as i128).ok_or(ModrepError::Overflow)?;
            let e = out.entry(i).or_insert(0);
            *e = e.checked_add(t).ok_or(ModrepError::Overflow)?;
        }
    }
    out.retain(|_, x| *x != 0);
    Ok(out)
}

fn reduce(m: &IntMatrix, p: u64) -> Vec<Vec<u64>> {
    let modulus = p.pow(LOCAL_K) as i128;
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| (m.get(i, j) as i128).rem_euclid(modulus) as u64).collect())
        .collect()
}

fn valuation(mut x: u64, p: u64, k: u32) -> u32 {
    if x == 0 {
        return k;
    }
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(m as i128) as u64
}

/// Smith reduction over `Z/p^K`: returns (sum of pivot valuations, number of pivots).
fn local_divisors(m: &[Vec<u64>], p: u64) -> (u64, usize) {
    local_divisors_k(m.to_vec(), p, LOCAL_K)
}

fn local_divisors_k(mut a: Vec<Vec<u64>>, p: u64, k: u32) -> (u64, usize) {
    let modulus = p.pow(k);
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut row_alive: Vec<usize> = (0..rows).collect();
    let mut col_alive: Vec<bool> = vec![true; cols];
    let mut total = 0u64;
    let mut pivots = 0usize;
    loop {
        // pivot of least valuation; units end the scan early
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for (ri, &i) in row_alive.iter().enumerate() {
            for j in 0..cols {
                if !col_alive[j] || a[i][j] == 0 {
                    continue;
                }
                let v = valuation(a[i][j], p, k);
                if best.is_none_or(|b| v < b.0) {
                    best = Some((v, ri, j));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((v, ri, j)) = best else { break };
        let pi = row_alive.swap_remove(ri);
        col_alive[j] = false;
        total += v as u64;
        pivots += 1;
        let pv = p.pow(v);
        let unit_inv = inv_mod(a[pi][j] / pv, modulus);
        let pivot_row = a[pi].clone();
        for &i in &row_alive {
            let x = a[i][j];
            if x == 0 {
                continue;
            }
            let f = ((x / pv) as u128 * unit_inv as u128 % modulus as u128) as u64;
            let row = &mut a[i];
            for c in 0..cols {
                if !col_alive[c] && c != j {
                    continue;
                }
                let s = (f as u128 * pivot_row[c] as u128 % modulus as u128) as u64;
                row[c] = (row[c] + modulus - s) % modulus;
            }
        }
    }
    (total, pivots)
}

/// Tate cohomology of a module given only modulo `p^prec` (`prec >= 2`).
///
/// The valuations involved are at most 1 for `Z_p`-free modules, so any
/// `prec >= 2` suffices; the rank check guards against hidden divisors.
pub fn tate_cohomology_local(p: u32, prec: u32, g: &[Vec<u64>]) -> Result<(u64, u64), ModrepError> {
    if !is_odd_prime(p) {
        return Err(ModrepError::NotOddPrime(p));
    }
    let n = g.len();
    if g.iter().any(|r| r.len() != n) {
        return Err(ModrepError::NotSquare);
    }
    let p64 = p as u64;
    let modulus = p64.pow(prec);
    let mulm = |a: &[Vec<u64>], b: &[Vec<u64>]| -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i][k];
                if x == 0 {
                    continue;
                }
                let row = &b[k];
                let o = &mut out[i];
                for j in 0..n {
                    if row[j] != 0 {
                        o[j] = ((o[j] as u128 + x as u128 * row[j] as u128) % modulus as u128) as u64;
                    }
                }
            }
        }
        out
    };
    let mut power: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    let mut norm = vec![vec![0u64; n]; n];
    for _ in 0..p {
        for i in 0..n {
            for j in 0..n {
                norm[i][j] = (norm[i][j] + power[i][j]) % modulus;
            }
        }
        power = mulm(&power, g);
    }
    let is_identity = (0..n).all(|i| (0..n).all(|j| power[i][j] == u64::from(i == j)));
    if !is_identity {
        return Err(ModrepError::NotOrderP);
    }
    let mut diff: Vec<Vec<u64>> = g.to_vec();
    for (i, row) in diff.iter_mut().enumerate() {
        row[i] = (row[i] + modulus - 1) % modulus;
    }
    let (h0, r0) = local_divisors_k(norm, p64, prec);
    let (h1, r1) = local_divisors_k(diff, p64, prec);
    if r0 + r1 != n {
        return Err(ModrepError::CorruptDecomposition);
    }
    Ok((h0, h1))
}

/// `A_0 -> A_1 -> ... -> A_n` with `d_i: A_i -> A_{i+1}`, `dstar_i: A_{i+1} -> A_i`.
#[derive(Clone, Debug)]
pub struct SplitComplex {
    pub modules: Vec<ConcreteModule>,
    pub d: Vec<IntMatrix>,
    pub dstar: Vec<IntMatrix>,
    pub k: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitVerdict {
    Splits,
    /// Relations hold but `p | k`; carries the alternating sum `(a, b, c)` for information.
    FailsGcd { alternating: (i64, i64, i64) },
    FailsRelations,
}

fn alternating_sum(c: &SplitComplex) -> Result<(i64, i64, i64), ModrepError> {
    let mut s = (0i64, 0i64, 0i64);
    for (i, m) in c.modules.iter().enumerate() {
        let d = m.decompose()?;
        let sign = if i % 2 == 0 { 1 } else { -1 };
        s.0 += sign * d.n_triv as i64;
        s.1 += sign * d.n_reg as i64;
        s.2 += sign * d.n_i as i64;
    }
    Ok(s)
}

pub fn laplace_split_check(c: &SplitComplex) -> Result<SplitVerdict, ModrepError> {
    let n = c.modules.len();
    if n == 0 || c.d.len() + 1 != n || c.dstar.len() + 1 != n {
        return Err(ModrepError::Shape);
    }
    let p = c.modules[0].p;
    if c.modules.iter().any(|m| m.p != p) {
        return Err(ModrepError::MismatchedPrime);
    }
    for i in 0..n - 1 {
        let (a, b) = (c.modules[i].dim(), c.modules[i + 1].dim());
        if (c.d[i].rows, c.d[i].cols) != (b, a) || (c.dstar[i].rows, c.dstar[i].cols) != (a, b) {
            return Err(ModrepError::Shape);
        }
    }
    let ok = (|| -> Result<bool, ModrepError> {
        for i in 0..n - 1 {
            let (ga, gb) = (&c.modules[i].g, &c.modules[i + 1].g);
            if c.d[i].mul(ga)? != gb.mul(&c.d[i])? || c.dstar[i].mul(gb)? != ga.mul(&c.dstar[i])? {
                return Ok(false);
            }
            if i + 1 < n - 1 && (!c.d[i + 1].mul(&c.d[i])?.is_zero() || !c.dstar[i].mul(&c.dstar[i + 1])?.is_zero()) {
                return Ok(false);
            }
        }
        for i in 0..n {
            let dim = c.modules[i].dim();
            let mut lap = IntMatrix::zeros(dim, dim);
            if i > 0 {
                lap = lap.add(&c.d[i - 1].mul(&c.dstar[i - 1])?)?;
            }
            if i + 1 < n {
                lap = lap.add(&c.dstar[i].mul(&c.d[i])?)?;
            }
            if lap != IntMatrix::scalar(dim, c.k) {
                return Ok(false);
            }
        }
        Ok(true)
    })()?;
    if !ok {
        return Ok(SplitVerdict::FailsRelations);
    }
    if c.k.rem_euclid(p as i64) == 0 {
        return Ok(SplitVerdict::FailsGcd { alternating: alternating_sum(c)? });
    }
    if alternating_sum(c)? != (0, 0, 0) {
        return Err(ModrepError::EulerCharacteristic);
    }
    Ok(SplitVerdict::Splits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dec(a: u64, b: u64, c: u64) -> Decomposition {
        Decomposition { n_triv: a, n_reg: b, n_i: c }
    }

    #[test]
    fn indecomposable_cohomology() {
        for p in [3u32, 5, 7, 11] {
            assert_eq!(ConcreteModule::regular(p).unwrap().tate_cohomology().unwrap(), (0, 0));
            assert_eq!(ConcreteModule::trivial(p).unwrap().tate_cohomology().unwrap(), (1, 0));
            assert_eq!(ConcreteModule::augmentation(p).unwrap().tate_cohomology().unwrap(), (0, 1));
            assert_eq!(ConcreteModule::augmentation_kernel(p).unwrap().tate_cohomology().unwrap(), (0, 1));
        }
    }

    #[test]
    fn decompose_examples() {
        let s = ConcreteModule::augmentation(5).unwrap().direct_sum(&ConcreteModule::regular(5).unwrap()).unwrap();
        assert_eq!(s.decompose().unwrap(), dec(0, 1, 1));
        let i = ConcreteModule::augmentation(3).unwrap();
        assert_eq!(i.tensor(&i).unwrap().decompose().unwrap(), dec(1, 1, 0));
        assert_eq!(ConcreteModule::trivial(3).unwrap().decompose().unwrap(), dec(1, 0, 0));
    }

    #[test]
    fn multilinear_examples() {
        let i5 = ConcreteModule::augmentation(5).unwrap();
        assert_eq!(i5.exterior_power(2).unwrap().decompose().unwrap(), dec(1, 1, 0));
        let r3 = ConcreteModule::regular(3).unwrap();
        assert_eq!(r3.symmetric_power(3).unwrap().decompose().unwrap(), dec(1, 3, 0));
        let t = ConcreteModule::trivial(5).unwrap();
        assert_eq!(i5.tensor(&t).unwrap(), i5);
        assert_eq!(i5.exterior_power(0).unwrap().decompose().unwrap(), dec(1, 0, 0));
    }

    #[test]
    fn rejects_bad_matrices() {
        let g = IntMatrix::from_rows(&[vec![2]]).unwrap();
        assert_eq!(ConcreteModule::new(3, g), Err(ModrepError::NotOrderP));
        assert_eq!(ConcreteModule::regular(4).unwrap_err(), ModrepError::NotOddPrime(4));
        let r = ConcreteModule::regular(3).unwrap();
        assert!(matches!(r.symmetric_power_capped(4, 10), Err(ModrepError::DimensionCap { .. })));
    }

    #[test]
    fn local_reduction_agrees_with_exact() {
        let m = ConcreteModule::augmentation(5).unwrap().tensor(&ConcreteModule::regular(5).unwrap()).unwrap();
        let g = reduce(m.g_matrix(), 5);
        let g2: Vec<Vec<u64>> = g.iter().map(|r| r.iter().map(|x| x % 25).collect()).collect();
        assert_eq!(tate_cohomology_local(5, 2, &g2).unwrap(), m.tate_cohomology().unwrap());
    }

    #[test]
    fn permutation_modules_have_no_h1() {
        // cycles of lengths 1, 3, 3 for p = 3
        let mut g = IntMatrix::zeros(7, 7);
        g.set(0, 0, 1);
        for base in [1usize, 4] {
            for t in 0..3 {
                g.set(base + (t + 1) % 3, base + t, 1);
            }
        }
        let m = ConcreteModule::new(3, g).unwrap();
        assert_eq!(m.tate_cohomology().unwrap().1, 0);
        for n in 0..=7 {
            assert_eq!(m.exterior_power(n).unwrap().tate_cohomology().unwrap().1, 0, "n={n}");
        }
    }

    #[test]
    fn grid_round_trip() {
        let g = ConcreteModule::augmentation(5).unwrap();
        let text = g.g_matrix().to_grid();
        assert_eq!(&IntMatrix::parse_grid(&text).unwrap(), g.g_matrix());
        assert_eq!(IntMatrix::parse_grid("1 2\nx 3\n"), Err(ModrepError::Parse { line: 2 }));
    }

    fn augmentation_sequence(p: u32) -> SplitComplex {
        let pi = p as usize;
        let i = ConcreteModule::augmentation_kernel(p).unwrap();
        let r = ConcreteModule::regular(p).unwrap();
        let t = ConcreteModule::trivial(p).unwrap();
        // inclusion I -> Z_p[G]: basis g^i - g^0
        let mut incl = IntMatrix::zeros(pi, pi - 1);
        for j in 0..pi - 1 {
            incl.set(j + 1, j, 1);
            incl.set(0, j, -1);
        }
        let aug = IntMatrix::from_rows(&[vec![1; pi]]).unwrap();
        // Z_p -> Z_p[G], 1 -> N
        let norm = IntMatrix::from_rows(&vec![vec![1]; pi]).unwrap();
        // Z_p[G] -> I, x -> p x - aug(x) N, written in the basis g^i - g^0
        let mut back = IntMatrix::zeros(pi - 1, pi);
        for j in 0..pi {
            for i in 1..pi {
                let coeff = p as i64 * i64::from(i == j) - 1;
                back.set(i - 1, j, coeff);
            }
        }
        SplitComplex { modules: vec![i, r, t], d: vec![incl, aug], dstar: vec![back, norm], k: p as i64 }
    }

    #[test]
    fn laplace_examples() {
        let r = ConcreteModule::regular(5).unwrap();
        let c = SplitComplex {
            modules: vec![r.clone(), r],
            d: vec![IntMatrix::identity(5)],
            dstar: vec![IntMatrix::identity(5)],
            k: 1,
        };
        assert_eq!(laplace_split_check(&c).unwrap(), SplitVerdict::Splits);

        for p in [3u32, 5, 7] {
            match laplace_split_check(&augmentation_sequence(p)).unwrap() {
                SplitVerdict::FailsGcd { alternating } => assert_ne!(alternating, (0, 0, 0)),
                v => panic!("unexpected {v:?}"),
            }
        }

        let t = ConcreteModule::trivial(3).unwrap();
        let bad = SplitComplex {
            modules: vec![t.clone(), t.clone(), t],
            d: vec![IntMatrix::identity(1), IntMatrix::identity(1)],
            dstar: vec![IntMatrix::zeros(1, 1), IntMatrix::zeros(1, 1)],
            k: 1,
        };
        assert_eq!(laplace_split_check(&bad).unwrap(), SplitVerdict::FailsRelations);
    }
}
