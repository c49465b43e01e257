use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use super::{binomial, rational_to_int, Coeff, SeriesError};

/// A truncated Laurent series in `r` and `q`.
///
/// Row `m` runs over `-1..=max_r` and holds exponents `n` in `-(m+1)..=max_q`,
/// the support of `r^{-1}` times products of `(1 - r^a q^b)` with `a > 0`, `b >= -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<T> {
    max_r: i32,
    max_q: i32,
    rows: Vec<Vec<T>>,
}

fn n_low(m: i32) -> i32 {
    -(m + 1)
}

impl<T: Coeff> BiSeries<T> {
    pub fn zero(max_r: i32, max_q: i32) -> Self {
        let rows = (-1..=max_r)
            .map(|m| {
                let len = (max_q - n_low(m) + 1).max(0) as usize;
                (0..len).map(|_| T::zero()).collect()
            })
            .collect();
        BiSeries { max_r, max_q, rows }
    }

    pub fn monomial(m: i32, n: i32, c: T, max_r: i32, max_q: i32) -> Result<Self, SeriesError> {
        let mut s = Self::zero(max_r, max_q);
        s.set(m, n, c)?;
        Ok(s)
    }

    pub fn max_r(&self) -> i32 {
        self.max_r
    }

    pub fn max_q(&self) -> i32 {
        self.max_q
    }

    fn in_support(m: i32, n: i32) -> bool {
        m >= -1 && n >= n_low(m)
    }

    /// Coefficient of `r^m q^n`; `None` beyond truncation, zero outside the support.
    pub fn coeff(&self, m: i32, n: i32) -> Option<T> {
        if m > self.max_r || n > self.max_q {
            return None;
        }
        if !Self::in_support(m, n) {
            return Some(T::zero());
        }
        Some(self.rows[(m + 1) as usize][(n - n_low(m)) as usize].clone())
    }

    pub fn set(&mut self, m: i32, n: i32, c: T) -> Result<(), SeriesError> {
        if !Self::in_support(m, n) {
            return Err(SeriesError::Support { m, n });
        }
        if m > self.max_r || n > self.max_q {
            return Ok(());
        }
        self.rows[(m + 1) as usize][(n - n_low(m)) as usize] = c;
        Ok(())
    }

    fn slot(&mut self, m: i32, n: i32) -> &mut T {
        &mut self.rows[(m + 1) as usize][(n - n_low(m)) as usize]
    }

    /// All coefficients that are not exactly zero, in `(m, n)` order.
    pub fn terms(&self) -> Vec<(i32, i32, T)> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let m = i as i32 - 1;
            for (j, c) in row.iter().enumerate() {
                if !c.is_exact_zero() {
                    out.push((m, j as i32 + n_low(m), c.clone()));
                }
            }
        }
        out
    }

    fn cells(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (-1..=self.max_r).flat_map(move |m| (n_low(m)..=self.max_q).map(move |n| (m, n)))
    }

    pub fn truncate(&self, max_r: i32, max_q: i32) -> Self {
        let max_r = max_r.min(self.max_r);
        let max_q = max_q.min(self.max_q);
        let mut out = Self::zero(max_r, max_q);
        for (m, n) in out.cells().collect::<Vec<_>>() {
            *out.slot(m, n) = self.coeff(m, n).unwrap();
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.max_r.min(o.max_r), self.max_q.min(o.max_q));
        for (m, n) in out.cells().collect::<Vec<_>>() {
            *out.slot(m, n) = self.coeff(m, n).unwrap().add(&o.coeff(m, n).unwrap());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.max_r.min(o.max_r), self.max_q.min(o.max_q));
        for (m, n) in out.cells().collect::<Vec<_>>() {
            *out.slot(m, n) = self.coeff(m, n).unwrap().sub(&o.coeff(m, n).unwrap());
        }
        out
    }

    fn min_exponents(&self) -> Option<(i32, i32)> {
        let t = self.terms();
        if t.is_empty() {
            return None;
        }
        let mr = t.iter().map(|x| x.0).min().unwrap();
        let mq = t.iter().map(|x| x.1).min().unwrap();
        Some((mr, mq))
    }

    /// Truncated product; the result is known only where both factors determine it.
    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        let (max_r, max_q) = match (self.min_exponents(), o.min_exponents()) {
            (Some((ar, aq)), Some((br, bq))) => (
                (self.max_r + br).min(o.max_r + ar),
                (self.max_q + bq).min(o.max_q + aq),
            ),
            _ => (self.max_r.min(o.max_r), self.max_q.min(o.max_q)),
        };
        let max_r = max_r.max(-1);
        let mut out = Self::zero(max_r, max_q);
        let bt = o.terms();
        for (am, an, a) in self.terms() {
            for (bm, bn, b) in &bt {
                let (m, n) = (am + bm, an + bn);
                if m > max_r || n > max_q {
                    continue;
                }
                if !Self::in_support(m, n) {
                    return Err(SeriesError::Support { m, n });
                }
                let s = out.slot(m, n);
                *s = s.add(&a.mul(b));
            }
        }
        Ok(out)
    }

    /// Multiply in place by `sum_k coefs[k] (r^m q^n)^k`.
    fn mul_polynomial(&mut self, m: i32, n: i32, coefs: &[T]) {
        let old = core::mem::replace(self, Self::zero(self.max_r, self.max_q));
        for (om, on, c) in old.terms() {
            for (k, e) in coefs.iter().enumerate() {
                if e.is_exact_zero() {
                    continue;
                }
                let k = k as i32;
                let (tm, tn) = (om + k * m, on + k * n);
                if tm > self.max_r {
                    break;
                }
                if tn > self.max_q || !Self::in_support(tm, tn) {
                    continue;
                }
                let s = self.slot(tm, tn);
                *s = s.add(&c.mul(e));
            }
        }
    }

    /// Grading used by log/exp: `m` when every non-constant term has `m >= 1`,
    /// otherwise a positive linear weight that orders all cells.
    fn weight_fn(&self, skip_const: bool) -> Result<impl Fn(i32, i32) -> i64, SeriesError> {
        let terms = self.terms();
        let nonconst: Vec<_> = terms
            .iter()
            .filter(|t| !(skip_const && t.0 == 0 && t.1 == 0))
            .collect();
        let r_graded = nonconst.iter().all(|t| t.0 >= 1);
        let stride = (self.max_q + 2) as i64;
        for t in &nonconst {
            let w = if r_graded { t.0 as i64 } else { stride * t.0 as i64 + t.1 as i64 };
            if t.0 < 0 || w < 1 {
                return Err(SeriesError::Support { m: t.0, n: t.1 });
            }
        }
        Ok(move |m: i32, n: i32| if r_graded { m as i64 } else { stride * m as i64 + n as i64 })
    }

    fn sorted_cells(&self, w: &impl Fn(i32, i32) -> i64) -> Vec<(i32, i32)> {
        let mut cells: Vec<(i32, i32)> =
            self.cells().filter(|&(m, n)| m >= 0 && w(m, n) > 0).collect();
        cells.sort_by_key(|&(m, n)| (w(m, n), m, n));
        cells
    }

    /// `log f` for `f = 1 + (terms of positive weight)`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeff(0, 0).is_some_and(|c| c.is_exact_one()) {
            return Err(SeriesError::NotUnitConstant);
        }
        let w = self.weight_fn(true)?;
        let f = self.terms();
        let mut dl = Self::zero(self.max_r, self.max_q);
        let mut out = Self::zero(self.max_r, self.max_q);
        for (m, n) in self.sorted_cells(&w) {
            let wc = w(m, n);
            let mut s = self.coeff(m, n).unwrap().mul(&T::from_i64(wc));
            for (am, an, a) in &f {
                if (*am, *an) == (0, 0) || w(*am, *an) >= wc {
                    continue;
                }
                if let Some(x) = dl.coeff(m - am, n - an) {
                    if !x.is_exact_zero() {
                        s = s.sub(&a.mul(&x));
                    }
                }
            }
            let v = s.div_int(wc).map_err(|_| SeriesError::NotDivisible { index: m })?;
            *dl.slot(m, n) = s;
            *out.slot(m, n) = v;
        }
        Ok(out)
    }

    /// `exp g` for `g` made of positive-weight terms.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeff(0, 0).is_some_and(|c| c.is_exact_zero()) {
            return Err(SeriesError::NotUnitConstant);
        }
        let w = self.weight_fn(false)?;
        let g = self.terms();
        let mut out = Self::zero(self.max_r, self.max_q);
        *out.slot(0, 0) = T::one();
        for (m, n) in self.sorted_cells(&w) {
            let wc = w(m, n);
            let mut s = T::zero();
            for (am, an, a) in &g {
                let wa = w(*am, *an);
                if wa > wc {
                    continue;
                }
                if let Some(x) = out.coeff(m - am, n - an) {
                    if !x.is_exact_zero() {
                        s = s.add(&a.mul(&T::from_i64(wa)).mul(&x));
                    }
                }
            }
            *out.slot(m, n) = s.div_int(wc).map_err(|_| SeriesError::NotDivisible { index: m })?;
        }
        Ok(out)
    }
}

/// The factor `(1 - r^m q^n)^minus (1 + r^m q^n)^plus`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub m: i32,
    pub n: i32,
    pub minus: BigRational,
    pub plus: BigRational,
}

impl Factor {
    pub fn new(m: i32, n: i32, minus: BigRational, plus: BigRational) -> Self {
        Factor { m, n, minus, plus }
    }
}

/// Expansion of `r^{-1} prod (1 - r^m q^n)^minus (1 + r^m q^n)^plus` to `r^max_r`, `q^max_q`.
pub fn product_from_exponents<T: Coeff>(
    factors: &[Factor],
    max_r: i32,
    max_q: i32,
) -> Result<BiSeries<T>, SeriesError> {
    // negative q powers come with at least as many r powers; pad q so they never read
    // beyond what is known
    let pad = max_r + 1;
    let mut s = BiSeries::monomial(-1, 0, T::one(), max_r, max_q + pad)?;
    for f in factors {
        if f.m < 1 || f.n < -1 {
            return Err(SeriesError::Support { m: f.m, n: f.n });
        }
        if f.n == 0 {
            if f.minus.is_zero() && f.plus.is_zero() {
                continue;
            }
            return Err(SeriesError::Support { m: f.m, n: 0 });
        }
        let kmax = ((max_r + 1) / f.m) as u32;
        if kmax == 0 {
            continue;
        }
        for (e, sign) in [(&f.minus, -1i64), (&f.plus, 1i64)] {
            if e.is_zero() {
                continue;
            }
            let e = rational_to_int(e).ok_or(SeriesError::NonIntegralExponent { m: f.m, n: f.n })?;
            let coefs: Vec<T> = (0..=kmax)
                .map(|k| {
                    let mut b = binomial(&e, k);
                    if sign < 0 && k % 2 == 1 {
                        b = -b;
                    }
                    T::from_bigint(&b)
                })
                .collect();
            s.mul_polynomial(f.m, f.n, &coefs);
        }
    }
    Ok(s.truncate(max_r, max_q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn empty_product_is_r_inverse() {
        let s: BiSeries<BigRational> = product_from_exponents(&[], 3, 3).unwrap();
        assert_eq!(s.terms(), vec![(-1, 0, rat(1))]);
    }

    #[test]
    fn binomial_factor() {
        let f = [Factor::new(1, 1, rat(2), rat(0))];
        let s: BiSeries<BigRational> = product_from_exponents(&f, 2, 2).unwrap();
        assert_eq!(s.terms(), vec![(-1, 0, rat(1)), (0, 1, rat(-2)), (1, 2, rat(1))]);
    }

    #[test]
    fn negative_q_factor_keeps_support() {
        let f = [Factor::new(1, -1, rat(1), rat(0)), Factor::new(1, 1, rat(1), rat(0))];
        let s: BiSeries<BigRational> = product_from_exponents(&f, 2, 2).unwrap();
        // r^{-1} (1 - r/q)(1 - rq) = r^{-1} - q^{-1} - q + r
        assert_eq!(
            s.terms(),
            vec![(-1, 0, rat(1)), (0, -1, rat(-1)), (0, 1, rat(-1)), (1, 0, rat(1))]
        );
    }

    #[test]
    fn rejects_half_integer_exponent() {
        let f = [Factor::new(1, 1, BigRational::new(int(1), int(2)), rat(0))];
        let r: Result<BiSeries<BigRational>, _> = product_from_exponents(&f, 2, 2);
        assert_eq!(r, Err(SeriesError::NonIntegralExponent { m: 1, n: 1 }));
    }

    #[test]
    fn log_exp_round_trip_r_graded() {
        let mut s = BiSeries::<BigRational>::zero(3, 4);
        s.set(0, 0, rat(1)).unwrap();
        s.set(1, 1, rat(-3)).unwrap();
        s.set(1, 2, rat(2)).unwrap();
        s.set(2, 1, rat(5)).unwrap();
        let l = s.log().unwrap();
        assert_eq!(l.exp().unwrap(), s);
    }

    #[test]
    fn log_exp_round_trip_mixed_grading() {
        let mut s = BiSeries::<BigRational>::zero(2, 3);
        s.set(0, 0, rat(1)).unwrap();
        s.set(0, 1, rat(2)).unwrap();
        s.set(1, 0, rat(-1)).unwrap();
        s.set(1, 2, rat(7)).unwrap();
        let l = s.log().unwrap();
        assert_eq!(l.exp().unwrap(), s);
    }

    #[test]
    fn product_truncation_is_monotone() {
        let f: Vec<Factor> = (1..4)
            .flat_map(|m| (1..6).map(move |n| Factor::new(m, n, rat(m as i64 * n as i64 - 2), rat(1))))
            .collect();
        let small: BiSeries<BigRational> = product_from_exponents(&f, 2, 3).unwrap();
        let big: BiSeries<BigRational> = product_from_exponents(&f, 3, 5).unwrap();
        assert_eq!(big.truncate(2, 3), small);
    }
}
