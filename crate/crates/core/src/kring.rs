//! The representation ring `K` of `Z_p[G]`, `G` cyclic of odd prime order `p`.
//!
//! `K` has basis `[Z_p]`, `[Z_p[G]]`, `[I]` where `I` is the augmentation kernel.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::series::QSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KringError {
    NotOddPrime(u32),
    MismatchedPrime(u32, u32),
    NonEffective,
    NonIntegral,
    BadDegree,
}

impl fmt::Display for KringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KringError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            KringError::MismatchedPrime(a, b) => write!(f, "elements over p={a} and p={b}"),
            KringError::NonEffective => f.write_str("element is not effective"),
            KringError::NonIntegral => f.write_str("element has non-integral coordinates"),
            KringError::BadDegree => f.write_str("degree must be positive"),
        }
    }
}

pub fn is_odd_prime(p: u32) -> bool {
    p > 2 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The three indecomposable modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indecomposable {
    Trivial,
    Regular,
    Augmentation,
}

/// The ring homomorphisms `K -> Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hom {
    Dim,
    Tr,
    F,
}

/// `a[Z_p] + b[Z_p[G]] + c[I]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KElement {
    p: u32,
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

impl KElement {
    pub fn new(p: u32, a: BigRational, b: BigRational, c: BigRational) -> Result<Self, KringError> {
        if !is_odd_prime(p) {
            return Err(KringError::NotOddPrime(p));
        }
        Ok(KElement { p, a, b, c })
    }

    pub fn from_ints(p: u32, a: i64, b: i64, c: i64) -> Result<Self, KringError> {
        Self::new(p, q(a), q(b), q(c))
    }

    pub fn basis(p: u32, which: Indecomposable) -> Result<Self, KringError> {
        match which {
            Indecomposable::Trivial => Self::from_ints(p, 1, 0, 0),
            Indecomposable::Regular => Self::from_ints(p, 0, 1, 0),
            Indecomposable::Augmentation => Self::from_ints(p, 0, 0, 1),
        }
    }

    pub fn one(p: u32) -> Result<Self, KringError> {
        Self::from_ints(p, 1, 0, 0)
    }

    pub fn zero(p: u32) -> Result<Self, KringError> {
        Self::from_ints(p, 0, 0, 0)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn same(&self, o: &Self) -> Result<(), KringError> {
        if self.p != o.p {
            return Err(KringError::MismatchedPrime(self.p, o.p));
        }
        Ok(())
    }

    fn make(&self, a: BigRational, b: BigRational, c: BigRational) -> Self {
        KElement { p: self.p, a, b, c }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn add(&self, o: &Self) -> Result<Self, KringError> {
        self.same(o)?;
        Ok(self.make(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, KringError> {
        self.same(o)?;
        Ok(self.make(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        self.make(&self.a * k, &self.b * k, &self.c * k)
    }

    pub fn mul(&self, o: &Self) -> Result<Self, KringError> {
        self.same(o)?;
        let p = q(self.p as i64);
        let (a1, b1, c1) = (&self.a, &self.b, &self.c);
        let (a2, b2, c2) = (&o.a, &o.b, &o.c);
        let a = a1 * a2 + c1 * c2;
        let c = a1 * c2 + c1 * a2;
        let b = a1 * b2
            + b1 * a2
            + &p * (b1 * b2)
            + (&p - q(1)) * (b1 * c2 + c1 * b2)
            + (&p - q(2)) * (c1 * c2);
        Ok(self.make(a, b, c))
    }

    pub fn apply_hom(&self, h: Hom) -> BigRational {
        let p = q(self.p as i64);
        match h {
            Hom::Dim => &self.a + &p * &self.b + (&p - q(1)) * &self.c,
            Hom::Tr => &self.a - &self.c,
            Hom::F => &self.a + &self.c,
        }
    }

    pub fn is_effective(&self) -> bool {
        [&self.a, &self.b, &self.c].iter().all(|x| x.is_integer() && !x.is_negative())
    }

    fn int_coords(&self) -> Result<[BigInt; 3], KringError> {
        if ![&self.a, &self.b, &self.c].iter().all(|x| x.is_integer()) {
            return Err(KringError::NonIntegral);
        }
        Ok([self.a.to_integer(), self.b.to_integer(), self.c.to_integer()])
    }

    /// `(dim Ĥ⁰, dim Ĥ¹)`, which are the multiplicities of `[Z_p]` and `[I]`.
    pub fn tate_dims(&self) -> Result<(u64, u64), KringError> {
        if !self.is_effective() {
            return Err(KringError::NonEffective);
        }
        Ok((self.a.to_integer().to_u64().unwrap(), self.c.to_integer().to_u64().unwrap()))
    }

    pub fn lambda_n(&self, n: u32) -> Result<Self, KringError> {
        Ok(self.power_series(n, Kind::Lambda)?.swap_remove(n as usize))
    }

    pub fn sym_n(&self, n: u32) -> Result<Self, KringError> {
        Ok(self.power_series(n, Kind::Sym)?.swap_remove(n as usize))
    }

    /// Coefficients `1, λ¹x, ..., λⁿx` (or the symmetric analogue) from the product
    /// formula over the basis, inverting series for negative multiplicities.
    fn power_series(&self, n: u32, kind: Kind) -> Result<Vec<KElement>, KringError> {
        let coords = self.int_coords()?;
        let mut acc = unit_series(self.p, n);
        for (which, k) in [Indecomposable::Trivial, Indecomposable::Regular, Indecomposable::Augmentation]
            .into_iter()
            .zip(coords.iter())
        {
            if k.is_zero() {
                continue;
            }
            let base: Vec<KElement> = (0..=n).map(|i| closed_form(self.p, which, i, kind)).collect();
            let base = if k.is_negative() { series_inverse(&base) } else { base };
            let e = k.abs().to_u64().expect("multiplicity fits in u64");
            acc = series_mul(&acc, &series_pow(&base, e, n));
        }
        Ok(acc)
    }

    /// ψⁿ, linear in the element; on the basis read off from
    /// `sum (-1)^k λ^k q^k = exp(-sum ψ^k q^k / k)`.
    pub fn adams_n(&self, n: u32) -> Result<Self, KringError> {
        if n == 0 {
            return Err(KringError::BadDegree);
        }
        let mut out = KElement::zero(self.p)?;
        for (which, k) in [
            (Indecomposable::Trivial, &self.a),
            (Indecomposable::Regular, &self.b),
            (Indecomposable::Augmentation, &self.c),
        ] {
            if k.is_zero() {
                continue;
            }
            out = out.add(&adams_basis(self.p, which, n).scale(k))?;
        }
        Ok(out)
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[Z_p] + {}[Z_p[G]] + {}[I]", self.a, self.b, self.c)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Lambda,
    Sym,
}

fn unit_series(p: u32, n: u32) -> Vec<KElement> {
    (0..=n)
        .map(|i| if i == 0 { KElement::one(p).unwrap() } else { KElement::zero(p).unwrap() })
        .collect()
}

fn series_mul(x: &[KElement], y: &[KElement]) -> Vec<KElement> {
    let n = x.len().min(y.len());
    let p = x[0].p;
    let mut out: Vec<KElement> = (0..n).map(|_| KElement::zero(p).unwrap()).collect();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            out[i + j] = out[i + j].add(&x[i].mul(&y[j]).unwrap()).unwrap();
        }
    }
    out
}

fn series_pow(x: &[KElement], mut e: u64, n: u32) -> Vec<KElement> {
    let mut r = unit_series(x[0].p, n);
    let mut b = x.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            r = series_mul(&r, &b);
        }
        e >>= 1;
        if e > 0 {
            b = series_mul(&b, &b);
        }
    }
    r
}

fn series_inverse(x: &[KElement]) -> Vec<KElement> {
    let p = x[0].p;
    let mut out = Vec::with_capacity(x.len());
    out.push(KElement::one(p).unwrap());
    for k in 1..x.len() {
        let mut s = KElement::zero(p).unwrap();
        for i in 1..=k {
            s = s.add(&x[i].mul(&out[k - i]).unwrap()).unwrap();
        }
        out.push(s.scale(&q(-1)));
    }
    out
}

fn elt(p: u32, a: BigInt, b: BigInt, c: BigInt) -> KElement {
    KElement {
        p,
        a: BigRational::from_integer(a),
        b: BigRational::from_integer(b),
        c: BigRational::from_integer(c),
    }
}

/// Closed forms for exterior and symmetric powers of the indecomposables.
fn closed_form(p: u32, which: Indecomposable, n: u32, kind: Kind) -> KElement {
    let (p64, n64) = (p as u64, n as u64);
    let bp = BigInt::from(p);
    let z = BigInt::zero;
    let one = BigInt::one;
    if n == 0 {
        return elt(p, one(), z(), z());
    }
    match (kind, which) {
        (Kind::Lambda, Indecomposable::Trivial) => {
            if n == 1 {
                elt(p, one(), z(), z())
            } else {
                elt(p, z(), z(), z())
            }
        }
        (Kind::Lambda, Indecomposable::Regular) => {
            if n < p {
                elt(p, z(), binom(p64, n64) / &bp, z())
            } else if n == p {
                elt(p, one(), z(), z())
            } else {
                elt(p, z(), z(), z())
            }
        }
        (Kind::Lambda, Indecomposable::Augmentation) => {
            if n >= p {
                elt(p, z(), z(), z())
            } else if n.is_multiple_of(2) {
                elt(p, one(), (binom(p64 - 1, n64) - 1) / &bp, z())
            } else {
                elt(p, z(), (binom(p64 - 1, n64) + 1 - &bp) / &bp, one())
            }
        }
        (Kind::Sym, Indecomposable::Trivial) => elt(p, one(), z(), z()),
        (Kind::Sym, Indecomposable::Regular) => {
            let t = binom(p64 + n64 - 1, n64);
            if n.is_multiple_of(p) {
                elt(p, one(), (t - 1) / &bp, z())
            } else {
                elt(p, z(), t / &bp, z())
            }
        }
        (Kind::Sym, Indecomposable::Augmentation) => {
            let t = binom(p64 + n64 - 2, n64);
            if n.is_multiple_of(p) {
                elt(p, one(), (t - 1) / &bp, z())
            } else if n % p == 1 {
                elt(p, z(), (t + 1 - &bp) / &bp, one())
            } else {
                elt(p, z(), t / &bp, z())
            }
        }
    }
}

fn adams_basis(p: u32, which: Indecomposable, n: u32) -> KElement {
    // f_k = (-1)^k λ^k, d_k = -ψ^k, d_k = k f_k - sum_{i<k} f_i d_{k-i}
    let f: Vec<KElement> = (0..=n)
        .map(|k| {
            let l = closed_form(p, which, k, Kind::Lambda);
            if k % 2 == 1 {
                l.scale(&q(-1))
            } else {
                l
            }
        })
        .collect();
    let mut d: Vec<KElement> = Vec::with_capacity(n as usize + 1);
    d.push(KElement::zero(p).unwrap());
    for k in 1..=n as usize {
        let mut s = f[k].scale(&q(k as i64));
        for i in 1..k {
            s = s.sub(&f[i].mul(&d[k - i]).unwrap()).unwrap();
        }
        d.push(s);
    }
    d[n as usize].scale(&q(-1))
}

/// `sum_n (-1)^n f(λⁿ x) qⁿ` for an indecomposable, `terms` coefficients.
pub fn f_lambda_series(p: u32, which: Indecomposable, terms: u32) -> Result<QSeries<BigRational>, KringError> {
    if !is_odd_prime(p) {
        return Err(KringError::NotOddPrime(p));
    }
    let coeffs = (0..terms)
        .map(|n| {
            let v = closed_form(p, which, n, Kind::Lambda).apply_hom(Hom::F);
            if n % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(QSeries::new(0, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u32, a: i64, b: i64, c: i64) -> KElement {
        KElement::from_ints(p, a, b, c).unwrap()
    }

    #[test]
    fn products() {
        assert_eq!(k(5, 0, 0, 1).mul(&k(5, 0, 0, 1)).unwrap(), k(5, 1, 3, 0));
        assert_eq!(k(7, 1, 0, 0).mul(&k(7, 0, 0, 1)).unwrap(), k(7, 0, 0, 1));
        assert_eq!(k(3, 0, 1, 0).mul(&k(3, 0, 0, 1)).unwrap(), k(3, 0, 2, 0));
        assert_eq!(k(3, 0, 1, 0).mul(&k(5, 0, 1, 0)), Err(KringError::MismatchedPrime(3, 5)));
    }

    #[test]
    fn homomorphisms() {
        assert_eq!(k(5, 0, 1, 0).apply_hom(Hom::F), q(0));
        assert_eq!(k(5, 1, 0, 0).apply_hom(Hom::Tr), q(1));
        let ii = k(7, 0, 0, 1).mul(&k(7, 0, 0, 1)).unwrap();
        assert_eq!(ii.apply_hom(Hom::Dim), q(36));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(k(5, 0, 0, 1).lambda_n(2).unwrap(), k(5, 1, 1, 0));
        assert_eq!(k(5, 0, 0, 1).lambda_n(3).unwrap(), k(5, 0, 0, 1));
        assert_eq!(k(5, 2, 1, 3).lambda_n(0).unwrap(), k(5, 1, 0, 0));
        assert_eq!(k(3, 0, 1, 0).lambda_n(1).unwrap(), k(3, 0, 1, 0));
    }

    #[test]
    fn sym_examples() {
        assert_eq!(k(3, 0, 0, 1).sym_n(3).unwrap(), k(3, 1, 1, 0));
        assert_eq!(k(3, 0, 0, 1).sym_n(4).unwrap(), k(3, 0, 1, 1));
        assert_eq!(k(3, 4, 0, 1).sym_n(0).unwrap(), k(3, 1, 0, 0));
        assert_eq!(k(3, 0, 1, 0).sym_n(3).unwrap(), k(3, 1, 3, 0));
    }

    #[test]
    fn vanishing_ranges() {
        for p in [3u32, 5, 7] {
            for n in p + 1..p + 4 {
                assert!(k(p, 0, 1, 0).lambda_n(n).unwrap().is_zero());
            }
            for n in p..p + 3 {
                assert!(k(p, 0, 0, 1).lambda_n(n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn dimensions_of_powers() {
        for p in [3u32, 5, 7] {
            for x in [k(p, 1, 0, 0), k(p, 0, 1, 0), k(p, 0, 0, 1), k(p, 2, 1, 1), k(p, 0, 2, 3)] {
                let d = x.apply_hom(Hom::Dim).to_integer().to_u64().unwrap();
                for n in 0..7u32 {
                    let l = x.lambda_n(n).unwrap();
                    assert_eq!(l.apply_hom(Hom::Dim).to_integer(), binom(d, n as u64));
                    assert!(l.is_effective());
                    let s = x.sym_n(n).unwrap();
                    assert_eq!(s.apply_hom(Hom::Dim).to_integer(), binom(d + n as u64 - 1, n as u64));
                }
            }
        }
    }

    #[test]
    fn virtual_lambda_inverts() {
        // λ_t(x) λ_t(-x) = 1
        let x = k(5, 1, 2, 1);
        let nx = k(5, -1, -2, -1);
        let a: Vec<_> = (0..6).map(|n| x.lambda_n(n).unwrap()).collect();
        let b: Vec<_> = (0..6).map(|n| nx.lambda_n(n).unwrap()).collect();
        let prod = series_mul(&a, &b);
        assert_eq!(prod[0], k(5, 1, 0, 0));
        assert!(prod[1..].iter().all(|e| e.is_zero()));
    }

    #[test]
    fn adams_examples() {
        for p in [3u32, 5] {
            let x = k(p, 1, 2, 3);
            assert_eq!(x.adams_n(1).unwrap(), x);
            assert_eq!(k(p, 1, 0, 0).adams_n(4).unwrap(), k(p, 1, 0, 0));
        }
        assert_eq!(k(3, 0, 0, 1).adams_n(0), Err(KringError::BadDegree));
    }

    #[test]
    fn adams_is_ring_homomorphism() {
        for p in [3u32, 5, 7] {
            let xs = [k(p, 0, 0, 1), k(p, 0, 1, 0), k(p, 2, 1, 0), k(p, 1, 0, 2)];
            for n in (1..9).filter(|n| n % p != 0) {
                for x in &xs {
                    for y in &xs {
                        let lhs = x.mul(y).unwrap().adams_n(n).unwrap();
                        let rhs = x.adams_n(n).unwrap().mul(&y.adams_n(n).unwrap()).unwrap();
                        assert_eq!(lhs, rhs, "p={p} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn adams_two_of_i_mod_three() {
        // ψ²(I) = I² - 2λ²(I) = (Z + G) - 2·Z = G - Z for p = 3
        assert_eq!(k(3, 0, 0, 1).adams_n(2).unwrap(), k(3, -1, 1, 0));
    }

    #[test]
    fn f_series_closed_forms() {
        let s = f_lambda_series(3, Indecomposable::Augmentation, 4).unwrap();
        // (1 + q^3)/(1 + q) = 1 - q + q^2 exactly
        assert_eq!(s.coeffs(), &[q(1), q(-1), q(1), q(0)]);
        for p in [3u32, 5, 7, 13] {
            let t = 3 * p;
            let z = f_lambda_series(p, Indecomposable::Trivial, t).unwrap();
            let g = f_lambda_series(p, Indecomposable::Regular, t).unwrap();
            let i = f_lambda_series(p, Indecomposable::Augmentation, t).unwrap();
            for n in 0..t as i32 {
                let zn = match n { 0 => 1, 1 => -1, _ => 0 };
                assert_eq!(z.coeff(n).unwrap(), q(zn));
                let gn = if n == 0 { 1 } else if n == p as i32 { -1 } else { 0 };
                assert_eq!(g.coeff(n).unwrap(), q(gn));
                // (1 + q^p)/(1 + q) = sum_{n<p} (-q)^n
                let inn = if n < p as i32 { if n % 2 == 0 { 1 } else { -1 } } else { 0 };
                assert_eq!(i.coeff(n).unwrap(), q(inn));
            }
        }
    }

    #[test]
    fn tate_dims_examples() {
        assert_eq!(k(5, 0, 0, 1).tate_dims().unwrap(), (0, 1));
        assert_eq!(k(5, 0, 1, 0).tate_dims().unwrap(), (0, 0));
        assert_eq!(k(5, 2, 0, 3).tate_dims().unwrap(), (2, 3));
        assert_eq!(k(5, -1, 0, 0).tate_dims(), Err(KringError::NonEffective));
    }

    #[test]
    fn rejects_even_prime() {
        assert_eq!(KElement::from_ints(2, 1, 0, 0), Err(KringError::NotOddPrime(2)));
    }
}
