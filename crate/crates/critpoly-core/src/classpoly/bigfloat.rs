//! Arbitrary-precision binary floating point.
//!
//! A value is mantissa·2^exp with a signed big-integer mantissa rounded to a
//! per-value precision (half away from zero); every operation rounds its
//! result back to the larger operand precision, and transcendental helpers
//! carry internal guard bits so the returned value is accurate to within a
//! few units in the last place. That is deliberately weaker than correctly
//! rounded arithmetic: callers validate final results exactly (integer
//! rounding with a distance gate) and retry at doubled precision, so the
//! float layer only has to be deterministic and close.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

/// Shifts right by `s` bits rounding half away from zero.
fn round_shr(m: &BigInt, s: u64) -> BigInt {
    if s == 0 || m.is_zero() {
        return m.clone();
    }
    let half = BigUint::from(1u32) << (s - 1) as usize;
    let mag = (m.magnitude() + &half) >> s as usize;
    BigInt::from_biguint(m.sign(), mag)
}

/// mantissa·2^exp rounded to `prec` significant bits.
#[derive(Clone, Debug)]
pub struct BigFloat {
    mantissa: BigInt,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    fn normalized(mut self) -> Self {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return self;
        }
        let target = self.prec as u64;
        let bits = self.mantissa.bits();
        if bits > target {
            let s = bits - target;
            self.mantissa = round_shr(&self.mantissa, s);
            self.exp += s as i64;
            // Rounding can carry into one extra bit (…111 → 1000).
            let bits = self.mantissa.bits();
            if bits > target {
                self.mantissa = round_shr(&self.mantissa, bits - target);
                self.exp += (bits - target) as i64;
            }
        }
        self
    }

    pub fn zero(prec: u32) -> Self {
        BigFloat {
            mantissa: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        BigFloat {
            mantissa: n.clone(),
            exp: 0,
            prec,
        }
        .normalized()
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    /// n/d as a float; d must be nonzero.
    pub fn from_ratio(n: i64, d: i64, prec: u32) -> Self {
        Self::from_i64(n, prec).div(&Self::from_i64(d, prec))
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value re-rounded to (or re-capped at) a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigFloat {
            mantissa: self.mantissa.clone(),
            exp: self.exp,
            prec,
        }
        .normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mantissa: -&self.mantissa,
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mantissa: self.mantissa.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Exact scaling by 2^k.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            mantissa: self.mantissa.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    /// Position of the top bit: the value lies in [2^(b−1), 2^b) up to sign.
    /// `None` for zero.
    pub fn log2_magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.mantissa.bits() as i64)
        }
    }

    pub fn add(&self, rhs: &BigFloat) -> Self {
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return rhs.with_prec(prec);
        }
        if rhs.is_zero() {
            return self.with_prec(prec);
        }
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        // An addend entirely below the rounding horizon cannot move the
        // retained bits; skipping it keeps mantissas bounded.
        let hi_top = hi.exp + hi.mantissa.bits() as i64;
        let lo_top = lo.exp + lo.mantissa.bits() as i64;
        if hi_top - lo_top > prec as i64 + 66 {
            return hi.with_prec(prec);
        }
        let gap = (hi.exp - lo.exp) as u64;
        BigFloat {
            mantissa: (&hi.mantissa << gap as usize) + &lo.mantissa,
            exp: lo.exp,
            prec,
        }
        .normalized()
    }

    pub fn sub(&self, rhs: &BigFloat) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &BigFloat) -> Self {
        BigFloat {
            mantissa: &self.mantissa * &rhs.mantissa,
            exp: self.exp + rhs.exp,
            prec: self.prec.max(rhs.prec),
        }
        .normalized()
    }

    pub fn div(&self, rhs: &BigFloat) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        let prec = self.prec.max(rhs.prec);
        if self.is_zero() {
            return BigFloat::zero(prec);
        }
        // Scale so the quotient keeps prec + 32 significant bits.
        let extra = prec as u64 + 32 + rhs.mantissa.bits();
        BigFloat {
            mantissa: (&self.mantissa << extra as usize) / &rhs.mantissa,
            exp: self.exp - rhs.exp - extra as i64,
            prec,
        }
        .normalized()
    }

    /// Division by a small positive integer.
    pub fn div_u64(&self, d: u64) -> Self {
        assert!(d != 0, "division by zero");
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            mantissa: (&self.mantissa << 96usize) / BigInt::from(d),
            exp: self.exp - 96,
            prec: self.prec,
        }
        .normalized()
    }

    /// Floor square root to working precision; the value must be ≥ 0.
    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of a negative value");
        if self.is_zero() {
            return self.clone();
        }
        let bits = self.mantissa.bits();
        let mut s = (2 * (self.prec as u64 + 16)).saturating_sub(bits);
        if (self.exp - s as i64) % 2 != 0 {
            s += 1;
        }
        BigFloat {
            mantissa: (&self.mantissa << s as usize).sqrt(),
            exp: (self.exp - s as i64) / 2,
            prec: self.prec,
        }
        .normalized()
    }

    /// Floor of the value as an integer.
    pub fn floor_to_integer(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mantissa << self.exp as usize
        } else {
            // Arithmetic shift floors negative values too.
            &self.mantissa >> (-self.exp) as usize
        }
    }

    /// Nearest integer, plus whether the distance to it is strictly below
    /// 1/4 (the gate final results are validated with).
    pub fn round_to_integer(&self) -> (BigInt, bool) {
        if self.exp >= 0 {
            return (&self.mantissa << self.exp as usize, true);
        }
        let s = (-self.exp) as u64;
        let n = round_shr(&self.mantissa, s);
        let rem = &self.mantissa - (&n << s as usize);
        let ok = (rem.magnitude() << 2usize) < (BigUint::from(1u32) << s as usize);
        (n, ok)
    }

    /// Lossy conversion for diagnostics and coarse tests.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let take = bits.min(53);
        let lead: BigInt = &self.mantissa >> (bits - take) as usize;
        let e = (self.exp + (bits - take) as i64)
            .clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        lead.to_f64().unwrap_or(f64::NAN) * 2f64.powi(e)
    }

    /// π by Machin's formula 16·atan(1/5) − 4·atan(1/239).
    pub fn pi(prec: u32) -> Self {
        let s = prec as u64 + 64;
        let v = (atan_inv_fixed(5, s) << 4usize) - (atan_inv_fixed(239, s) << 2usize);
        BigFloat {
            mantissa: v,
            exp: -(s as i64),
            prec,
        }
        .normalized()
    }

    /// e^x for |x| < 2^32, by power-of-two argument reduction and Taylor
    /// summation with guard bits.
    pub fn exp(x: &BigFloat) -> Self {
        let prec = x.prec;
        if x.is_zero() {
            return BigFloat::one(prec);
        }
        assert!(
            x.log2_magnitude().unwrap() < 32,
            "exponent argument out of range"
        );
        let wp = prec + 96;
        let ax = x.abs().with_prec(wp);
        let ln2_bits = wp as u64 + 16;
        let ln2 = BigFloat {
            mantissa: ln2_fixed(ln2_bits),
            exp: -(ln2_bits as i64),
            prec: wp,
        }
        .normalized();
        let n = ax.div(&ln2).floor_to_integer().to_i64().unwrap();
        let r = ax.sub(&BigFloat::from_i64(n, wp).mul(&ln2));
        // e^r with r ∈ [0, ln 2): halve 24 times, sum, square back.
        let k = 24;
        let t = r.shl(-k);
        let mut sum = BigFloat::one(wp);
        let mut term = BigFloat::one(wp);
        let mut i = 1u64;
        loop {
            term = term.mul(&t).div_u64(i);
            if term.log2_magnitude().unwrap_or(i64::MIN) < -(wp as i64 + 16) {
                break;
            }
            sum = sum.add(&term);
            i += 1;
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        sum = sum.shl(n);
        if x.is_negative() {
            sum = BigFloat::one(wp).div(&sum);
        }
        sum.with_prec(prec)
    }

    /// (sin θ, cos θ) for |θ| ≤ 16, by halving 24 times, Taylor summation,
    /// and double-angle recombination.
    pub fn sincos(theta: &BigFloat) -> (Self, Self) {
        let prec = theta.prec;
        let wp = prec + 96;
        if theta.is_zero() {
            return (BigFloat::zero(prec), BigFloat::one(prec));
        }
        assert!(
            theta.log2_magnitude().unwrap() <= 4,
            "angle argument out of range"
        );
        let k = 24;
        let t = theta.with_prec(wp).shl(-k);
        let t2 = t.mul(&t);
        let cutoff = -(wp as i64 + 16);
        let mut sin = t.clone();
        let mut term = t.clone();
        let mut i = 1u64;
        loop {
            term = term.mul(&t2).div_u64((2 * i) * (2 * i + 1)).neg();
            if term.log2_magnitude().unwrap_or(i64::MIN) < cutoff {
                break;
            }
            sin = sin.add(&term);
            i += 1;
        }
        let mut cos = BigFloat::one(wp);
        let mut term = BigFloat::one(wp);
        let mut i = 1u64;
        loop {
            term = term.mul(&t2).div_u64((2 * i - 1) * (2 * i)).neg();
            if term.log2_magnitude().unwrap_or(i64::MIN) < cutoff {
                break;
            }
            cos = cos.add(&term);
            i += 1;
        }
        let one = BigFloat::one(wp);
        for _ in 0..k {
            let s2 = sin.mul(&sin);
            sin = sin.mul(&cos).shl(1);
            cos = one.sub(&s2.shl(1));
        }
        (sin.with_prec(prec), cos.with_prec(prec))
    }
}

/// atan(1/x)·2^s as a fixed-point integer (alternating series; every floor
/// division drops under one unit, far inside the guard bits).
fn atan_inv_fixed(x: u64, s: u64) -> BigInt {
    let xx = BigInt::from(x * x);
    let mut power = (BigInt::from(1) << s as usize) / BigInt::from(x);
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= &xx;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// ln(2)·2^s as a fixed-point integer via 2·atanh(1/3).
fn ln2_fixed(s: u64) -> BigInt {
    let mut power = (BigInt::from(1) << s as usize) / BigInt::from(3);
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power /= BigInt::from(9);
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    sum << 1usize
}

/// Complex value with independent real and imaginary floats.
#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex {
            re: BigFloat::zero(prec),
            im: BigFloat::zero(prec),
        }
    }

    pub fn add(&self, rhs: &BigComplex) -> Self {
        BigComplex {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn add_real(&self, rhs: &BigFloat) -> Self {
        BigComplex {
            re: self.re.add(rhs),
            im: self.im.clone(),
        }
    }

    pub fn mul(&self, rhs: &BigComplex) -> Self {
        BigComplex {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }

    pub fn norm_sqr(&self) -> BigFloat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// 1/z as conj(z)/|z|²; z must be nonzero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        BigComplex {
            re: self.re.div(&n),
            im: self.im.neg().div(&n),
        }
    }
}
