//! Exact propagation through the relation system, with Gaussian elimination when stuck.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::system::{QtyId, RelKind, RelRing, System};

const POOL_UNKNOWNS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum SolveFailure {
    Inconsistent(RelKind),
}

pub(crate) struct Affine {
    pub constant: BigRational,
    pub linear: BTreeMap<QtyId, BigRational>,
}

pub(crate) struct ExactSolver<'s> {
    sys: &'s System,
    values: Vec<Option<BigRational>>,
    unknown: Vec<usize>,
    done: Vec<bool>,
    queue: VecDeque<usize>,
}

/// Sparse linear part, constant, source relation.
type Row = (Vec<(QtyId, BigRational)>, BigRational, RelKind);

impl<'s> ExactSolver<'s> {
    pub fn new(sys: &'s System) -> Self {
        let unknown: Vec<usize> = sys.relations.iter().map(|r| r.qtys.len()).collect();
        let queue = unknown.iter().enumerate().filter(|(_, &u)| u <= 1).map(|(i, _)| i).collect();
        ExactSolver { sys, values: vec![None; sys.n_qty()], unknown, done: vec![false; sys.relations.len()], queue }
    }

    pub fn value(&self, q: QtyId) -> Option<&BigRational> {
        self.values[q].as_ref()
    }

    /// Record a value; an already known quantity is compared instead.
    pub fn assign(&mut self, q: QtyId, v: BigRational) -> Result<(), SolveFailure> {
        if let Some(old) = &self.values[q] {
            if *old != v {
                let r = self.sys.qty_relations[q].first().copied().unwrap_or(0);
                return Err(SolveFailure::Inconsistent(self.sys.relations[r].kind));
            }
            return Ok(());
        }
        self.values[q] = Some(v);
        for &r in &self.sys.qty_relations[q] {
            self.unknown[r] -= 1;
            if self.unknown[r] <= 1 {
                self.queue.push_back(r);
            }
        }
        Ok(())
    }

    /// Affine form of a relation in its unknowns, `None` if an unknown enters nonlinearly.
    pub fn affine(&self, r: usize) -> Option<Affine> {
        let rel = &self.sys.relations[r];
        let mut constant = rel.constant.clone();
        let mut linear: BTreeMap<QtyId, BigRational> = BTreeMap::new();
        for t in &rel.terms {
            let unknown: Vec<usize> =
                (0..t.factors.len()).filter(|&i| self.values[t.factors[i].0].is_none()).collect();
            match unknown.as_slice() {
                [] => constant += t.eval(|q| self.values[q].clone().unwrap())?,
                [i] if !t.frob && t.factors[*i].1 == 1 => {
                    let q = t.factors[*i].0;
                    let mut c = BigRational::new(BigInt::from(t.num), BigInt::from(t.den));
                    for (j, &(f, e)) in t.factors.iter().enumerate() {
                        if j != *i {
                            c *= RelRing::pow(self.values[f].as_ref().unwrap(), e);
                        }
                    }
                    *linear.entry(q).or_insert_with(BigRational::zero) += c;
                }
                _ => return None,
            }
        }
        linear.retain(|_, c| !c.is_zero());
        Some(Affine { constant, linear })
    }

    fn drain(&mut self) -> Result<bool, SolveFailure> {
        let mut progress = false;
        while let Some(r) = self.queue.pop_front() {
            if self.done[r] {
                continue;
            }
            let Some(a) = self.affine(r) else { continue };
            match a.linear.len() {
                0 if self.unknown[r] == 0 => {
                    if !a.constant.is_zero() {
                        return Err(SolveFailure::Inconsistent(self.sys.relations[r].kind));
                    }
                    self.done[r] = true;
                }
                1 if self.unknown[r] == 1 => {
                    let (&q, c) = a.linear.iter().next().unwrap();
                    let v = -a.constant / c;
                    self.done[r] = true;
                    self.assign(q, v)?;
                    progress = true;
                }
                _ => {}
            }
        }
        Ok(progress)
    }

    /// Eliminate over small relations with several unknowns; returns whether anything was fixed.
    fn eliminate(&mut self) -> Result<bool, SolveFailure> {
        let mut rows: Vec<Row> = Vec::new();
        for r in 0..self.sys.relations.len() {
            if self.done[r] || self.unknown[r] < 2 || self.unknown[r] > POOL_UNKNOWNS {
                continue;
            }
            if let Some(a) = self.affine(r) {
                if a.linear.len() == self.unknown[r] {
                    rows.push((a.linear.into_iter().collect(), a.constant, self.sys.relations[r].kind));
                }
            }
        }
        let mut cols: Vec<QtyId> = rows.iter().flat_map(|r| r.0.iter().map(|x| x.0)).collect();
        cols.sort_unstable();
        cols.dedup();
        if cols.is_empty() {
            return Ok(false);
        }
        let col_of: BTreeMap<QtyId, usize> = cols.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let w = cols.len();
        let mut mat: Vec<Vec<BigRational>> = Vec::new();
        let mut kinds = Vec::new();
        for (lin, c, kind) in rows {
            let mut row = vec![BigRational::zero(); w + 1];
            for (q, v) in lin {
                row[col_of[&q]] = v;
            }
            row[w] = c;
            mat.push(row);
            kinds.push(kind);
        }
        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..w {
            let Some(sel) = (pivot_row..mat.len()).find(|&i| !mat[i][col].is_zero()) else { continue };
            mat.swap(pivot_row, sel);
            kinds.swap(pivot_row, sel);
            let inv = BigRational::one() / &mat[pivot_row][col];
            for x in mat[pivot_row].iter_mut() {
                *x *= &inv;
            }
            let prow = mat[pivot_row].clone();
            for (i, row) in mat.iter_mut().enumerate() {
                if i != pivot_row && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, y) in row.iter_mut().zip(&prow) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        for (i, row) in mat.iter().enumerate().skip(pivot_row) {
            if !row[w].is_zero() {
                return Err(SolveFailure::Inconsistent(kinds[i]));
            }
        }
        let mut progress = false;
        for (i, &col) in pivots.iter().enumerate() {
            let others = (0..w).filter(|&j| j != col && !mat[i][j].is_zero()).count();
            if others == 0 {
                self.assign(cols[col], -mat[i][w].clone())?;
                progress = true;
            }
        }
        Ok(progress)
    }

    /// Propagate until `targets` are all known or nothing more follows.
    pub fn run(&mut self, targets: &[QtyId]) -> Result<(), SolveFailure> {
        loop {
            self.drain()?;
            if targets.iter().all(|&q| self.values[q].is_some()) {
                return Ok(());
            }
            if !self.eliminate()? {
                return Ok(());
            }
        }
    }
}
