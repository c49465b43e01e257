use alloc::vec::Vec;

use super::{Coeff, SeriesError};

/// A truncated Laurent series `sum_{n = low}^{order} a_n q^n`.
///
/// Coefficients above `order` are unknown, not zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<T> {
    low: i32,
    coeffs: Vec<T>,
}

impl<T: Coeff> QSeries<T> {
    pub fn new(low: i32, coeffs: Vec<T>) -> Self {
        QSeries { low, coeffs }
    }

    /// The zero series known through `order`.
    pub fn zero(order: i32) -> Self {
        let len = (order + 1).max(0) as usize;
        QSeries { low: 0, coeffs: (0..len).map(|_| T::zero()).collect() }
    }

    pub fn one(order: i32) -> Self {
        let mut s = Self::zero(order);
        if !s.coeffs.is_empty() {
            s.coeffs[0] = T::one();
        }
        s
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn order(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `q^n`, or `None` beyond the truncation order.
    pub fn coeff(&self, n: i32) -> Option<T> {
        if n > self.order() {
            None
        } else if n < self.low {
            Some(T::zero())
        } else {
            Some(self.coeffs[(n - self.low) as usize].clone())
        }
    }

    pub fn truncate(&self, order: i32) -> Self {
        let keep = (order - self.low + 1).clamp(0, self.coeffs.len() as i32) as usize;
        QSeries { low: self.low, coeffs: self.coeffs[..keep].to_vec() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        let low = self.low.min(o.low);
        let order = self.order().min(o.order());
        let coeffs = (low..=order)
            .map(|n| f(&self.coeff(n).unwrap(), &o.coeff(n).unwrap()))
            .collect();
        QSeries { low, coeffs }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        QSeries { low: self.low, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, k: &T) -> Self {
        QSeries { low: self.low, coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let low = self.low + o.low;
        let order = (self.low + o.order()).min(o.low + self.order());
        let len = (order - low + 1).max(0) as usize;
        let mut out: Vec<T> = (0..len).map(|_| T::zero()).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() || i >= len {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        QSeries { low, coeffs: out }
    }

    fn check_unit_power_series(&self) -> Result<(), SeriesError> {
        if self.low != 0 || self.coeffs.is_empty() || !self.coeffs[0].is_exact_one() {
            return Err(SeriesError::NotUnitConstant);
        }
        Ok(())
    }

    /// Multiplicative inverse of a power series with constant term 1.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        self.check_unit_power_series()?;
        let len = self.coeffs.len();
        let mut out: Vec<T> = Vec::with_capacity(len);
        out.push(T::one());
        for n in 1..len {
            let mut s = T::zero();
            for k in 1..=n {
                s = s.add(&self.coeffs[k].mul(&out[n - k]));
            }
            out.push(s.neg());
        }
        Ok(QSeries { low: 0, coeffs: out })
    }

    /// `log f` for `f = 1 + O(q)`, via `n l_n = n f_n - sum_k f_k (n-k) l_{n-k}`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        self.check_unit_power_series()?;
        let len = self.coeffs.len();
        let mut d: Vec<T> = (0..len).map(|_| T::zero()).collect();
        let mut out: Vec<T> = (0..len).map(|_| T::zero()).collect();
        for n in 1..len {
            let mut s = self.coeffs[n].mul(&T::from_i64(n as i64));
            for k in 1..n {
                s = s.sub(&self.coeffs[k].mul(&d[n - k]));
            }
            out[n] = s
                .div_int(n as i64)
                .map_err(|_| SeriesError::NotDivisible { index: n as i32 })?;
            d[n] = s;
        }
        Ok(QSeries { low: 0, coeffs: out })
    }

    /// `exp g` for `g = O(q)`, via `n f_n = sum_k k g_k f_{n-k}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.low != 0 || self.coeffs.is_empty() || !self.coeffs[0].is_exact_zero() {
            return Err(SeriesError::NotUnitConstant);
        }
        let len = self.coeffs.len();
        let mut out: Vec<T> = Vec::with_capacity(len);
        out.push(T::one());
        for n in 1..len {
            let mut s = T::zero();
            for k in 1..=n {
                s = s.add(&self.coeffs[k].mul(&T::from_i64(k as i64)).mul(&out[n - k]));
            }
            out.push(
                s.div_int(n as i64)
                    .map_err(|_| SeriesError::NotDivisible { index: n as i32 })?,
            );
        }
        Ok(QSeries { low: 0, coeffs: out })
    }
}
