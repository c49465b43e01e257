use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// Largest supported precision: residues live in a `u64` and products in `u128`.
pub const MAX_CAP: u8 = 40;
pub const DEFAULT_CAP: u8 = 40;

const POW3: [u64; 41] = {
    let mut t = [1u64; 41];
    let mut i = 1;
    while i < 41 {
        t[i] = t[i - 1] * 3;
        i += 1;
    }
    t
};

pub fn pow3(k: u8) -> u64 {
    POW3[k as usize]
}

/// Raised by [`PadicApprox::div3`] when the value is known to be a 3-adic unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotDivisible;

impl fmt::Display for NotDivisible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("value is not divisible by 3")
    }
}

/// A 3-adic integer known modulo `3^prec`.
///
/// `residue` is always reduced into `[0, 3^prec)`. `cap` bounds the precision any
/// derived value can claim; exact integers enter with `prec == cap`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicApprox {
    residue: u64,
    prec: u8,
    cap: u8,
}

impl fmt::Debug for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod 3^{}", self.residue, self.prec)
    }
}

fn v3(mut x: u64) -> u8 {
    let mut v = 0;
    while x != 0 && x.is_multiple_of(3) {
        x /= 3;
        v += 1;
    }
    v
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

impl PadicApprox {
    /// `value mod 3^prec`, with the default cap.
    pub fn new(value: i128, prec: u8) -> Self {
        Self::with_cap(value, prec, DEFAULT_CAP)
    }

    pub fn with_cap(value: i128, prec: u8, cap: u8) -> Self {
        assert!(cap <= MAX_CAP, "cap above {MAX_CAP}");
        let prec = prec.min(cap);
        let m = POW3[prec as usize] as i128;
        PadicApprox { residue: value.rem_euclid(m) as u64, prec, cap }
    }

    pub fn exact(value: i64) -> Self {
        Self::new(value as i128, DEFAULT_CAP)
    }

    pub fn from_bigint(value: &BigInt, prec: u8, cap: u8) -> Self {
        assert!(cap <= MAX_CAP, "cap above {MAX_CAP}");
        let prec = prec.min(cap);
        let m = BigInt::from(POW3[prec as usize]);
        let r = value.mod_floor(&m).to_u64().unwrap();
        PadicApprox { residue: r, prec, cap }
    }

    pub fn unknown() -> Self {
        PadicApprox { residue: 0, prec: 0, cap: DEFAULT_CAP }
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn prec(&self) -> u8 {
        self.prec
    }

    pub fn cap(&self) -> u8 {
        self.cap
    }

    /// Valuation of the residue, capped at `prec`.
    pub fn val(&self) -> u8 {
        if self.residue == 0 {
            self.prec
        } else {
            v3(self.residue)
        }
    }

    /// True when zero is among the values this approximation allows.
    pub fn admits_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn is_exact(&self) -> bool {
        self.prec == self.cap
    }

    /// Whether `x` is congruent to this value modulo `3^prec`.
    pub fn admits(&self, x: &BigInt) -> bool {
        let m = BigInt::from(POW3[self.prec as usize]);
        x.mod_floor(&m) == BigInt::from(self.residue)
    }

    fn build(residue: u64, prec: u8, cap: u8) -> Self {
        PadicApprox { residue: residue % POW3[prec as usize], prec, cap }
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let m = POW3[prec as usize];
        let r = ((self.residue % m) as u128 + (o.residue % m) as u128) % m as u128;
        Self::build(r as u64, prec, self.cap.min(o.cap))
    }

    pub fn neg(&self) -> Self {
        let m = POW3[self.prec as usize];
        Self::build((m - self.residue) % m, self.prec, self.cap)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let prec = (self.prec as u16 + o.val() as u16)
            .min(o.prec as u16 + self.val() as u16)
            .min(cap as u16) as u8;
        let m = POW3[prec as usize];
        Self::build(mulmod(self.residue % m, o.residue % m, m), prec, cap)
    }

    /// `x^e` with the precision gain from the binomial expansion of `(a + 3^prec t)^e`.
    pub fn pow_sharp(&self, e: u32) -> Self {
        assert!(e >= 1, "pow_sharp needs e >= 1");
        if e == 1 {
            return *self;
        }
        let v = self.val() as u32;
        let p = self.prec as u32;
        let gain = if v < p {
            p + v3(e as u64) as u32 + (e - 1) * v
        } else {
            // residue is 0: only x = 3^prec t is known, so x^e = 3^(e prec) t^e
            e.saturating_mul(p)
        };
        let prec = gain.min(self.cap as u32) as u8;
        let m = POW3[prec as usize];
        Self::build(powmod(self.residue, e as u64, m), prec, self.cap)
    }

    /// Exact division by 3. Fails when the value is known to be a unit.
    pub fn div3(&self) -> Result<Self, NotDivisible> {
        if self.prec == 0 {
            return Ok(*self);
        }
        if !self.residue.is_multiple_of(3) {
            return Err(NotDivisible);
        }
        Ok(Self::build(self.residue / 3, self.prec - 1, self.cap))
    }

    /// Division by a nonzero integer: unit part by inversion, each factor of 3 by `div3`.
    pub fn div_int(&self, d: i64) -> Result<Self, NotDivisible> {
        assert!(d != 0, "division by zero");
        let mut u = d.unsigned_abs();
        let mut k = 0;
        while u.is_multiple_of(3) {
            u /= 3;
            k += 1;
        }
        let m = POW3[self.cap as usize];
        let inv = inverse_mod(u % m, m).expect("unit");
        let mut x = self.mul(&PadicApprox { residue: inv, prec: self.cap, cap: self.cap });
        if d < 0 {
            x = x.neg();
        }
        for _ in 0..k {
            x = x.div3()?;
        }
        Ok(x)
    }

    /// Least nonnegative representative as a big integer.
    pub fn to_bigint(&self) -> BigInt {
        BigInt::from(self.residue)
    }

    /// Representative in `(-3^prec/2, 3^prec/2]`.
    pub fn balanced(&self) -> BigInt {
        let m = BigInt::from(POW3[self.prec as usize]);
        let r = BigInt::from(self.residue);
        if r.clone() * 2 > m {
            r - m
        } else {
            r
        }
    }

    pub fn with_prec(&self, prec: u8) -> Self {
        let prec = prec.min(self.prec);
        Self::build(self.residue, prec, self.cap)
    }
}

pub(crate) fn bigint_to_padic(x: &BigInt) -> PadicApprox {
    if let Some(v) = x.to_i128() {
        PadicApprox::new(v, DEFAULT_CAP)
    } else {
        PadicApprox::from_bigint(x, DEFAULT_CAP, DEFAULT_CAP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_takes_min_precision() {
        let x = PadicApprox::new(4, 2).add(&PadicApprox::new(1, 3));
        assert_eq!((x.residue(), x.prec()), (5, 2));
    }

    #[test]
    fn mul_gains_from_valuation() {
        let x = PadicApprox::new(3, 2);
        let y = x.mul(&x);
        assert_eq!((y.residue(), y.prec()), (9, 3));
        for s in 0..3 {
            for t in 0..3 {
                assert_eq!(((3 + 9 * s) * (3 + 9 * t)) % 27, 9);
            }
        }
        let z = x.mul(&PadicApprox::exact(0));
        assert_eq!((z.residue(), z.prec()), (0, DEFAULT_CAP));
    }

    #[test]
    fn pow_sharp_examples() {
        let x = PadicApprox::new(4, 2).pow_sharp(3);
        assert_eq!((x.residue(), x.prec()), (10, 3));
        for t in 0..3i64 {
            assert_eq!((4 + 9 * t).pow(3) % 27, 10);
        }
        let y = PadicApprox::new(3, 2).pow_sharp(2);
        assert_eq!(y.prec(), 3);
        assert_eq!(PadicApprox::new(7, 4).pow_sharp(1), PadicApprox::new(7, 4));
        let z = PadicApprox::new(0, 2).pow_sharp(3);
        assert_eq!((z.residue(), z.prec()), (0, 6));
    }

    #[test]
    fn div3_cases() {
        let x = PadicApprox::new(6, 3).div3().unwrap();
        assert_eq!((x.residue(), x.prec()), (2, 2));
        assert_eq!(PadicApprox::new(1, 2).div3(), Err(NotDivisible));
        let z = PadicApprox::new(0, 1).div3().unwrap();
        assert_eq!((z.residue(), z.prec()), (0, 0));
    }

    #[test]
    fn div_int_by_unit_is_exact() {
        let x = PadicApprox::exact(10).div_int(5).unwrap();
        assert_eq!(x, PadicApprox::exact(2));
        let y = PadicApprox::exact(-18).div_int(-6).unwrap();
        assert_eq!(y.residue(), 3);
        assert_eq!(y.prec(), DEFAULT_CAP - 1);
    }

    #[test]
    fn balanced_representative() {
        assert_eq!(PadicApprox::new(-2, 3).balanced(), BigInt::from(-2));
        assert_eq!(PadicApprox::new(13, 3).balanced(), BigInt::from(13));
    }
}
