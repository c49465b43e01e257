//! Branch-and-prune over the 3-adic digits of `c⁻(1), c⁻(2), c⁻(4), c⁻(5)`.
//!
//! A node fixes the four seeds modulo `3^level`. Everything else in the relation region is
//! derived from them in a fixed order chosen once per prime, and every relation whose
//! quantities are all derived is checked. A check fails when its value is known to be a unit
//! multiple of some `3^k` below its precision.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::replicate::system::{Mode, QtyId, RelRing, System};
use crate::replicate::{describe, extend_cminus, Bounds};
use crate::series::{pow3, PadicApprox, MAX_CAP};

/// Primes the sieve is meant for.
pub const PRIMES: [u32; 10] = [71, 59, 47, 41, 31, 29, 23, 19, 17, 13];

/// Levels of headroom kept below the precision cap for losses along derivations.
pub const SLACK: u8 = 8;

/// Smallest depth at which residues pin down the actual seeds.
pub const ENDGAME_DEPTH: u8 = 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SieveError {
    DepthTooLarge { depth: u8, max: u8 },
    DepthTooSmall { depth: u8, min: u8 },
    NotEnoughCplus { needed: u32 },
}

impl fmt::Display for SieveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SieveError::DepthTooLarge { depth, max } => write!(f, "depth {depth} exceeds the supported maximum {max}"),
            SieveError::DepthTooSmall { depth, min } => {
                write!(f, "depth {depth} is too small for the inequality filter (need at least {min})")
            }
            SieveError::NotEnoughCplus { needed } => write!(f, "c+ series must reach q^{needed}"),
        }
    }
}

/// Four seed residues modulo `3^level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SieveNode {
    pub level: u8,
    pub residues: [u64; 4],
}

impl SieveNode {
    pub fn root() -> Self {
        SieveNode { level: 0, residues: [0; 4] }
    }

    /// The node containing the integers `seeds` at `level`.
    pub fn containing(seeds: &[BigInt; 4], level: u8) -> Self {
        let m = BigInt::from(pow3(level));
        let residues = core::array::from_fn(|i| {
            num_traits::ToPrimitive::to_u64(&num_integer::Integer::mod_floor(&seeds[i], &m)).unwrap()
        });
        SieveNode { level, residues }
    }

    /// The 81 lifts to the next level.
    pub fn children(&self) -> Vec<SieveNode> {
        let step = pow3(self.level);
        let mut out = Vec::with_capacity(81);
        for digits in 0..81u64 {
            let mut residues = self.residues;
            let mut d = digits;
            for r in residues.iter_mut() {
                *r += (d % 3) * step;
                d /= 3;
            }
            out.push(SieveNode { level: self.level + 1, residues });
        }
        out
    }

    pub fn matches(&self, seeds: &[BigInt; 4]) -> bool {
        *self == SieveNode::containing(seeds, self.level)
    }
}

#[derive(Clone, Debug)]
enum Step {
    Solve { rel: usize, target: QtyId, inv: PadicApprox },
    Check { rel: usize },
}

/// A fixed derivation order for one prime and `c⁺` series.
#[derive(Clone, Debug)]
pub struct Schedule {
    p: u32,
    sys: System,
    seeds: [QtyId; 4],
    constants: Vec<PadicApprox>,
    steps: Vec<Step>,
    derived: Vec<Option<u8>>,
}

/// Outcome of evaluating one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Survives,
    Pruned { relation: String },
}

fn unit_rational(x: &BigRational) -> bool {
    let three = BigInt::from(3);
    !(x.numer() % &three).is_zero() && !(x.denom() % &three).is_zero()
}

impl Schedule {
    pub fn new(p: u32, cplus: &[BigInt], bounds: Bounds) -> Result<Self, SieveError> {
        if (cplus.len() as u32) <= bounds.max_index / 4 {
            return Err(SieveError::NotEnoughCplus { needed: bounds.max_index / 4 });
        }
        let sys = System::build(Mode::Pair { p, cplus }, bounds.max_r, bounds.max_index);
        let seeds = [sys.cminus(1), sys.cminus(2), sys.cminus(4), sys.cminus(5)];
        let n = sys.n_qty();
        let mut loss: Vec<Option<u8>> = vec![None; n];
        let mut unknown: Vec<usize> = sys.relations.iter().map(|r| r.qtys.len()).collect();
        let mut used = vec![false; sys.relations.len()];
        let mut steps = Vec::new();
        let mut heap: BinaryHeap<Reverse<(u8, usize, QtyId)>> = BinaryHeap::new();

        let candidate = |r: usize, loss: &[Option<u8>]| -> Option<(u8, QtyId, BigRational)> {
            let rel = &sys.relations[r];
            let q = *rel.qtys.iter().find(|&&q| loss[q].is_none())?;
            let mut coef = BigRational::zero();
            let mut worst = 0u8;
            for t in &rel.terms {
                if t.factors.iter().any(|f| f.0 == q) {
                    if !rel.is_unit_linear(t) {
                        return None;
                    }
                    coef += BigRational::new(BigInt::from(t.num), BigInt::from(t.den));
                } else {
                    let l = t.factors.iter().map(|f| loss[f.0].unwrap()).max().unwrap_or(0);
                    worst = worst.max(l + t.frob as u8);
                }
            }
            unit_rational(&coef).then_some((worst, q, coef))
        };

        let assign = |q: QtyId,
                          l: u8,
                          loss: &mut Vec<Option<u8>>,
                          unknown: &mut Vec<usize>,
                          used: &[bool],
                          steps: &mut Vec<Step>,
                          heap: &mut BinaryHeap<Reverse<(u8, usize, QtyId)>>| {
            loss[q] = Some(l);
            for &r in &sys.qty_relations[q] {
                unknown[r] -= 1;
                match unknown[r] {
                    0 if !used[r] => steps.push(Step::Check { rel: r }),
                    1 => {
                        if let Some((w, t, _)) = candidate(r, loss) {
                            heap.push(Reverse((w, r, t)));
                        }
                    }
                    _ => {}
                }
            }
        };

        for &s in &seeds {
            assign(s, 0, &mut loss, &mut unknown, &used, &mut steps, &mut heap);
        }
        while let Some(Reverse((_, r, q))) = heap.pop() {
            if loss[q].is_some() || used[r] {
                continue;
            }
            // losses may have been recomputed since the push
            let Some((w, t, coef)) = candidate(r, &loss) else { continue };
            debug_assert_eq!(t, q);
            used[r] = true;
            let inv = PadicApprox::from_rational(&(BigRational::from_integer(1.into()) / coef)).unwrap();
            steps.push(Step::Solve { rel: r, target: q, inv });
            assign(q, w, &mut loss, &mut unknown, &used, &mut steps, &mut heap);
        }
        let constants = sys
            .relations
            .iter()
            .map(|r| PadicApprox::from_rational(&r.constant).expect("constants are 3-integral"))
            .collect();
        Ok(Schedule { p, sys, seeds, constants, steps, derived: loss })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Whether `c⁻(k)` is reached from the seeds, and with how many digits lost.
    pub fn derivation_loss(&self, k: u32) -> Option<u8> {
        if k == 0 || k > self.sys.max_index {
            return None;
        }
        self.derived[self.sys.cminus(k)]
    }

    pub fn check_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Check { .. })).count()
    }

    fn eval_node(&self, node: &SieveNode) -> (Verdict, Vec<PadicApprox>) {
        let mut values = vec![PadicApprox::unknown(); self.sys.n_qty()];
        for (i, &q) in self.seeds.iter().enumerate() {
            values[q] = PadicApprox::new(node.residues[i] as i128, node.level);
        }
        for step in &self.steps {
            match step {
                Step::Solve { rel, target, inv } => {
                    let r = &self.sys.relations[*rel];
                    let mut acc = self.constants[*rel];
                    for t in r.terms.iter().filter(|t| t.factors.iter().all(|f| f.0 != *target)) {
                        match t.eval(|q| values[q]) {
                            Some(v) => acc = acc.add(&v),
                            None => return (Verdict::Pruned { relation: describe(r.kind) }, values),
                        }
                    }
                    values[*target] = acc.neg().mul(inv);
                }
                Step::Check { rel } => {
                    let r = &self.sys.relations[*rel];
                    let mut acc = self.constants[*rel];
                    for t in &r.terms {
                        match t.eval(|q| values[q]) {
                            Some(v) => acc = acc.add(&v),
                            None => return (Verdict::Pruned { relation: describe(r.kind) }, values),
                        }
                    }
                    if acc.prec() >= 1 && !acc.admits_zero() {
                        return (Verdict::Pruned { relation: describe(r.kind) }, values);
                    }
                }
            }
        }
        (Verdict::Survives, values)
    }

    pub fn evaluate(&self, node: &SieveNode) -> Verdict {
        self.eval_node(node).0
    }

    /// Derived `c⁻(k)` at a node, for `k` in the region.
    pub fn derived_values(&self, node: &SieveNode) -> Vec<(u32, PadicApprox)> {
        let (_, values) = self.eval_node(node);
        (1..=self.sys.max_index).map(|k| (k, values[self.sys.cminus(k)])).collect()
    }

    /// Surviving children of a node.
    pub fn expand(&self, node: &SieveNode) -> Vec<SieveNode> {
        node.children().into_iter().filter(|c| self.evaluate(c) == Verdict::Survives).collect()
    }
}

pub fn max_depth() -> u8 {
    MAX_CAP - SLACK
}

/// Depth-first search from the root; survivors in sorted order, plus per-level counts.
pub fn run(schedule: &Schedule, depth: u8) -> Result<(Vec<SieveNode>, Vec<usize>), SieveError> {
    if depth > max_depth() {
        return Err(SieveError::DepthTooLarge { depth, max: max_depth() });
    }
    let mut counts = vec![0usize; depth as usize + 1];
    counts[0] = 1;
    let mut out = Vec::new();
    let mut stack = vec![SieveNode::root()];
    while let Some(node) = stack.pop() {
        if node.level == depth {
            out.push(node);
            continue;
        }
        for c in schedule.expand(&node) {
            counts[c.level as usize] += 1;
            stack.push(c);
        }
    }
    out.sort();
    Ok((out, counts))
}

/// The seeds of `node` as least nonnegative integers.
pub fn representatives(node: &SieveNode) -> [BigInt; 4] {
    node.residues.map(BigInt::from)
}

/// Integrality, parity and the dimension inequalities for `n = 1, 2, 4, 5`.
///
/// `cplus` and `j` are coefficient lists indexed by exponent.
pub fn filter_inequalities(
    p: u32,
    survivors: &[SieveNode],
    cplus: &[BigInt],
    j: &[BigInt],
) -> Result<Vec<SieveNode>, SieveError> {
    if j.len() < 6 || cplus.len() < 6 {
        return Err(SieveError::NotEnoughCplus { needed: 5 });
    }
    let mut out = Vec::new();
    for s in survivors {
        if s.level < ENDGAME_DEPTH {
            return Err(SieveError::DepthTooSmall { depth: s.level, min: ENDGAME_DEPTH });
        }
        if inequalities_hold(p, &representatives(s), cplus, j) {
            out.push(*s);
        }
    }
    Ok(out)
}

pub fn inequalities_hold(p: u32, cminus: &[BigInt; 4], cplus: &[BigInt], j: &[BigInt]) -> bool {
    let pb = BigInt::from(p);
    [1usize, 2, 4, 5].iter().zip(cminus).all(|(&n, cm)| {
        let cp = &cplus[n];
        let parity = ((cm - cp) % BigInt::from(2)).is_zero();
        let lower = *cm >= cp.abs();
        let upper = (&pb - 2) * cp + &pb * cm <= BigInt::from(2) * &j[n];
        parity && lower && upper
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conclusion {
    H1Vanishes { caveat: Option<String> },
    Inconclusive { reason: String },
}

/// Decide from the filtered survivors whether `c⁻ = c⁺` is forced.
pub fn conclude(p: u32, filtered: &[SieveNode], cplus: &[BigInt], terms: u32) -> Conclusion {
    let caveat =
        (p == 13).then(|| String::from("for p = 13 further solutions outside the searched residue classes are not excluded"));
    let want = [cplus[1].clone(), cplus[2].clone(), cplus[4].clone(), cplus[5].clone()];
    match filtered {
        [] => Conclusion::Inconclusive { reason: String::from("no survivor passes the inequalities") },
        [only] => {
            if representatives(only) != want {
                return Conclusion::Inconclusive {
                    reason: alloc::format!("unique survivor {:?} differs from the c+ seeds", only.residues),
                };
            }
            match extend_cminus(want, cplus, p, terms) {
                Ok(ext) if ext[..] == cplus[..=terms as usize] => Conclusion::H1Vanishes { caveat },
                Ok(_) => Conclusion::Inconclusive { reason: String::from("extension from the survivor differs from c+") },
                Err(e) => Conclusion::Inconclusive { reason: alloc::format!("extension failed: {e}") },
            }
        }
        many => Conclusion::Inconclusive { reason: alloc::format!("{} survivors pass the inequalities", many.len()) },
    }
}
