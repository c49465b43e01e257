//! The relation system behind the replication identities.
//!
//! Unknowns are the `c⁻(k)` and the coefficients `c_{m,n}` of
//! `1 + sum c_{m,n} r^m q^n = prod (1 - r^m q^n)^...`. Each cell carries the log relation
//! `D(m,n) + [log(1 + C)]_{m,n} = 0`; ladders equate `c_{m+1,n} = c_{m,n+1}`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

pub(crate) type QtyId = usize;

/// How the even-divisor terms of `D(m,n)` are supplied.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Mode<'a> {
    /// `c⁺` known; ladders only where `p ∤ mn`.
    Pair { p: u32, cplus: &'a [BigInt] },
    /// `c⁺ = c⁻` is the unknown series; all ladders.
    Twin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum RelKind {
    Log(u32, u32),
    Ladder(u32, u32),
}

#[derive(Clone, Debug)]
pub(crate) struct Term {
    pub num: i64,
    pub den: i64,
    pub factors: Vec<(QtyId, u32)>,
    /// `(y^3 - y)/3` of the single factor instead of a monomial.
    pub frob: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Relation {
    pub kind: RelKind,
    pub constant: BigRational,
    pub terms: Vec<Term>,
    pub qtys: Vec<QtyId>,
}

#[derive(Clone, Debug)]
pub(crate) struct System {
    pub max_r: u32,
    pub max_index: u32,
    cell_offset: Vec<usize>,
    pub relations: Vec<Relation>,
    pub qty_relations: Vec<Vec<usize>>,
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// Multisets of `k` cells (each `a, b >= 1`) summing to `(m, n)`, parts nonincreasing.
fn cell_partitions(m: u32, n: u32, k: u32) -> Vec<Vec<(u32, u32)>> {
    fn rec(m: u32, n: u32, k: u32, bound: (u32, u32), cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if k == 0 {
            if m == 0 && n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if m < k || n < k {
            return;
        }
        let amax = (m - (k - 1)).min(bound.0);
        for a in (1..=amax).rev() {
            let bmax = if a == bound.0 { bound.1 } else { u32::MAX };
            let bmax = bmax.min(n - (k - 1));
            // remaining k-1 parts have a' <= a, so m - a <= (k-1) a
            if m - a > (k - 1) * a {
                break;
            }
            for b in (1..=bmax).rev() {
                cur.push((a, b));
                rec(m - a, n - b, k - 1, (a, b), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(m, n, k, (u32::MAX, u32::MAX), &mut Vec::new(), &mut out);
    out
}

fn reduce(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den);
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    (n, d)
}

impl System {
    pub fn n_qty(&self) -> usize {
        self.max_index as usize + *self.cell_offset.last().unwrap()
    }

    pub fn cminus(&self, k: u32) -> QtyId {
        debug_assert!(k >= 1 && k <= self.max_index);
        k as usize - 1
    }

    pub fn has_cell(&self, m: u32, n: u32) -> bool {
        m >= 1 && m <= self.max_r && n >= 1 && m * n <= self.max_index
    }

    pub fn cell(&self, m: u32, n: u32) -> QtyId {
        debug_assert!(self.has_cell(m, n));
        self.max_index as usize + self.cell_offset[m as usize - 1] + n as usize - 1
    }

    #[cfg(test)]
    /// Inverse of `cminus`/`cell`: `Ok(k)` for `c⁻(k)`, `Err((m, n))` for a cell.
    pub fn describe(&self, q: QtyId) -> Result<u32, (u32, u32)> {
        if q < self.max_index as usize {
            return Ok(q as u32 + 1);
        }
        let off = q - self.max_index as usize;
        let m = self.cell_offset.partition_point(|&o| o <= off);
        let n = off - self.cell_offset[m - 1] + 1;
        Err((m as u32, n as u32))
    }

    pub fn build(mode: Mode<'_>, max_r: u32, max_index: u32) -> Self {
        let mut cell_offset = vec![0usize];
        for m in 1..=max_r {
            let count = (max_index / m) as usize;
            cell_offset.push(cell_offset.last().unwrap() + count);
        }
        let mut sys = System { max_r, max_index, cell_offset, relations: Vec::new(), qty_relations: Vec::new() };
        for m in 1..=max_r {
            for n in 1..=max_index / m {
                let rel = sys.log_relation(mode, m, n);
                sys.relations.push(rel);
            }
        }
        for m in 1..max_r {
            for n in 1..=max_index {
                if m == n || (m + 1) * n > max_index || m * (n + 1) > max_index {
                    continue;
                }
                if let Mode::Pair { p, .. } = mode {
                    if (m * n) % p == 0 {
                        continue;
                    }
                }
                let terms = vec![
                    Term { num: 1, den: 1, factors: vec![(sys.cell(m + 1, n), 1)], frob: false },
                    Term { num: -1, den: 1, factors: vec![(sys.cell(m, n + 1), 1)], frob: false },
                ];
                sys.relations.push(Relation {
                    kind: RelKind::Ladder(m, n),
                    constant: BigRational::zero(),
                    qtys: vec![sys.cell(m + 1, n), sys.cell(m, n + 1)],
                    terms,
                });
            }
        }
        let mut qty_relations = vec![Vec::new(); sys.n_qty()];
        for (i, r) in sys.relations.iter().enumerate() {
            for &q in &r.qtys {
                qty_relations[q].push(i);
            }
        }
        sys.qty_relations = qty_relations;
        sys
    }

    fn log_relation(&self, mode: Mode<'_>, m: u32, n: u32) -> Relation {
        let mut terms = Vec::new();
        let mut constant = BigRational::zero();
        let g = m.gcd(&n);
        let mut frob_at = None;
        for d in (1..=g).filter(|d| g.is_multiple_of(*d)) {
            let idx = m * n / (d * d);
            let even = d % 2 == 0;
            match (mode, even) {
                (Mode::Pair { cplus, .. }, true) => {
                    let v = cplus.get(idx as usize).cloned().unwrap_or_else(BigInt::zero);
                    constant += BigRational::new(v, BigInt::from(d));
                }
                _ if d == 3 => frob_at = Some(idx),
                _ => terms.push(Term { num: 1, den: d as i64, factors: vec![(self.cminus(idx), 1)], frob: false }),
            }
        }
        for k in 1..=m {
            for parts in cell_partitions(m, n, k) {
                let mut factors: Vec<(QtyId, u32)> = Vec::new();
                for &(a, b) in &parts {
                    let q = self.cell(a, b);
                    match factors.last_mut() {
                        Some(last) if last.0 == q => last.1 += 1,
                        _ => factors.push((q, 1)),
                    }
                }
                if frob_at.is_some() && k == 3 && factors.len() == 1 {
                    // c⁻(n/3)/3 + c_{1,n/3}^3/3 with c⁻(n/3) = -c_{1,n/3}
                    continue;
                }
                let mult = factors.iter().fold(factorial(k), |acc, f| acc / factorial(f.1));
                let sign = if k % 2 == 1 { 1 } else { -1 };
                let (num, den) = reduce(sign * mult, k as i64);
                terms.push(Term { num, den, factors, frob: false });
            }
        }
        if let Some(idx) = frob_at {
            terms.push(Term { num: 1, den: 1, factors: vec![(self.cell(1, idx), 1)], frob: true });
        }
        let mut qtys: Vec<QtyId> = terms.iter().flat_map(|t| t.factors.iter().map(|f| f.0)).collect();
        qtys.sort_unstable();
        qtys.dedup();
        Relation { kind: RelKind::Log(m, n), constant, terms, qtys }
    }
}

/// Rings the relation terms can be evaluated in.
pub(crate) trait RelRing: Clone {
    fn from_rational(x: &BigRational) -> Option<Self>;
    fn small(num: i64, den: i64) -> Option<Self>;
    fn mul(&self, o: &Self) -> Self;
    fn pow(&self, e: u32) -> Self;
    fn frob(&self) -> Option<Self>;
}

impl RelRing for BigRational {
    fn from_rational(x: &BigRational) -> Option<Self> {
        Some(x.clone())
    }
    fn small(num: i64, den: i64) -> Option<Self> {
        Some(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn pow(&self, e: u32) -> Self {
        num_traits::Pow::pow(self, e)
    }
    fn frob(&self) -> Option<Self> {
        Some((self * self * self - self) / BigRational::from_integer(BigInt::from(3)))
    }
}

impl RelRing for crate::series::PadicApprox {
    fn from_rational(x: &BigRational) -> Option<Self> {
        let num = crate::series::Coeff::from_bigint(x.numer());
        let den: i64 = num_traits::ToPrimitive::to_i64(x.denom())?;
        crate::series::PadicApprox::div_int(&num, den).ok()
    }
    fn small(num: i64, den: i64) -> Option<Self> {
        crate::series::PadicApprox::exact(num).div_int(den).ok()
    }
    fn mul(&self, o: &Self) -> Self {
        crate::series::PadicApprox::mul(self, o)
    }
    fn pow(&self, e: u32) -> Self {
        self.pow_sharp(e)
    }
    fn frob(&self) -> Option<Self> {
        self.pow_sharp(3).sub(self).div3().ok()
    }
}

impl Term {
    /// Value of the term given all its factors.
    pub(crate) fn eval<T: RelRing>(&self, value: impl Fn(QtyId) -> T) -> Option<T> {
        let mut acc = T::small(self.num, self.den)?;
        if self.frob {
            return Some(acc.mul(&value(self.factors[0].0).frob()?));
        }
        for &(q, e) in &self.factors {
            acc = acc.mul(&value(q).pow(e));
        }
        Some(acc)
    }
}

impl Relation {
    pub(crate) fn is_unit_linear(&self, t: &Term) -> bool {
        !t.frob && t.factors.len() == 1 && t.factors[0].1 == 1 && t.num.abs() == 1 && t.den % 3 != 0
    }
}
