//! Truncated Laurent series with exact rational coefficients.
//!
//! A series is stored as a valuation `val` plus ascending coefficients for
//! `q^val, q^(val+1), ...` and is *known modulo* `q^prec` with
//! `prec = val + coeffs.len()`.  Nonzero series keep a nonzero first
//! coefficient; the zero series is an empty coefficient list whose `val` simply
//! records its precision.  Arithmetic propagates precision the usual way
//! (`min` for addition, `val_a + prec_b` crossings for products).
//!
//! This exact type backs unit tests and the exact small-case relation paths;
//! production multimodular runs use the word-size mirror in `modseries`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    val: i64,
    coeffs: Vec<BigRational>,
}

impl QSeries {
    /// Builds a series from coefficients starting at exponent `val`,
    /// normalizing leading zeros into the valuation.
    pub fn new(val: i64, coeffs: Vec<BigRational>) -> Self {
        let mut s = QSeries { val, coeffs };
        s.normalize();
        s
    }

    pub fn zero_to_prec(prec: i64) -> Self {
        QSeries { val: prec, coeffs: Vec::new() }
    }

    /// The constant 1 known through `q^(prec-1)`.
    pub fn one_to_prec(prec: i64) -> Self {
        assert!(prec > 0);
        let mut coeffs = vec![BigRational::zero(); prec as usize];
        coeffs[0] = BigRational::one();
        QSeries { val: 0, coeffs }
    }

    /// `q^k` known through `q^(prec-1)`.
    pub fn q_pow_to_prec(k: i64, prec: i64) -> Self {
        assert!(prec > k);
        let mut coeffs = vec![BigRational::zero(); (prec - k) as usize];
        coeffs[0] = BigRational::one();
        QSeries { val: k, coeffs }
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation of a nonzero series.
    pub fn val(&self) -> i64 {
        debug_assert!(!self.is_zero(), "valuation of (truncated) zero");
        self.val
    }

    /// Exclusive order of knowledge: the series is known modulo `q^prec`.
    pub fn prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `q^exp`; zero off the stored range (panics above `prec`).
    pub fn coeff_at(&self, exp: i64) -> BigRational {
        assert!(exp < self.prec(), "coefficient beyond known precision");
        if exp < self.val {
            return BigRational::zero();
        }
        self.coeffs[(exp - self.val) as usize].clone()
    }

    pub fn truncate_to(&self, prec: i64) -> QSeries {
        assert!(prec <= self.prec(), "cannot extend precision by truncation");
        if prec <= self.val {
            return QSeries::zero_to_prec(prec);
        }
        QSeries::new(
            self.val,
            self.coeffs[..(prec - self.val) as usize].to_vec(),
        )
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries { val: self.val + k, coeffs: self.coeffs.clone() }
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let prec = self.prec().min(other.prec());
        let val = self.val.min(other.val).min(prec);
        let mut coeffs = vec![BigRational::zero(); (prec - val) as usize];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let e = val + k as i64;
            let mut acc = BigRational::zero();
            if e >= self.val && e < self.prec() {
                acc += &self.coeffs[(e - self.val) as usize];
            }
            if e >= other.val && e < other.prec() {
                acc += &other.coeffs[(e - other.val) as usize];
            }
            *c = acc;
        }
        QSeries::new(val, coeffs)
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        if c.is_zero() {
            return QSeries::zero_to_prec(self.prec());
        }
        QSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        if self.is_zero() || other.is_zero() {
            let prec = (self.prec() + other.val).min(other.prec() + self.val);
            return QSeries::zero_to_prec(prec);
        }
        let out_len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); out_len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= out_len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= out_len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QSeries::new(self.val + other.val, coeffs)
    }

    /// Reciprocal of a series with nonzero leading coefficient, to the same
    /// relative precision.
    pub fn inv(&self) -> QSeries {
        assert!(!self.is_zero(), "inverse of zero series");
        let a0 = &self.coeffs[0];
        let a0_inv = a0.recip();
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n);
        out.push(a0_inv.clone());
        for k in 1..n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[k - j];
                }
            }
            out.push(-acc * &a0_inv);
        }
        QSeries::new(-self.val, out)
    }

    pub fn pow(&self, e: u32) -> QSeries {
        if e == 0 {
            // Relative precision of a unit power matches the operand's length.
            return QSeries::new(
                0,
                std::iter::once(BigRational::one())
                    .chain(std::iter::repeat_with(BigRational::zero).take(
                        self.coeffs.len().saturating_sub(1),
                    ))
                    .collect(),
            );
        }
        let mut acc: Option<QSeries> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// The operator `q d/dq`.
    pub fn q_derivative(&self) -> QSeries {
        QSeries::new(
            self.val,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * BigRational::from(BigInt::from(self.val + k as i64)))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(val: i64, v: &[i64]) -> QSeries {
        QSeries::new(
            val,
            v.iter()
                .map(|&x| BigRational::from(BigInt::from(x)))
                .collect(),
        )
    }

    #[test]
    fn normalization_and_precision() {
        let s = ints(-1, &[0, 0, 3, 4]);
        assert_eq!(s.val(), 1);
        assert_eq!(s.prec(), 3);
        assert_eq!(s.coeff_at(0), BigRational::zero());
        assert_eq!(s.coeff_at(2), BigRational::from(BigInt::from(4)));
    }

    #[test]
    fn geometric_inverse() {
        // (1 - q)^-1 = 1 + q + q^2 + ...
        let one_minus_q = ints(0, &[1, -1, 0, 0, 0, 0]);
        let geo = one_minus_q.inv();
        assert_eq!(geo, ints(0, &[1, 1, 1, 1, 1, 1]));
        // and the product is 1 to available precision
        let prod = geo.mul(&one_minus_q);
        assert_eq!(prod, ints(0, &[1, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn product_precision_rules() {
        // (q^-1 known to q^2) * (q known to q^3): result val 0, 3 terms
        let a = ints(-1, &[1, 2, 3]); // q^-1 + 2 + 3q
        let b = ints(1, &[1, -1]); // q - q^2
        let prod = a.mul(&b);
        assert_eq!(prod.val(), 0);
        assert_eq!(prod.prec(), 2);
        assert_eq!(prod, ints(0, &[1, 1])); // (1) + (2-1) q
    }

    #[test]
    fn laurent_inverse_with_shift() {
        // (q + q^2)^-1 = q^-1 (1+q)^-1 = q^-1 - 1 + q - q^2 + ...
        let s = ints(1, &[1, 1, 0, 0]);
        assert_eq!(s.inv(), ints(-1, &[1, -1, 1, -1]));
    }

    #[test]
    fn pow_and_derivative() {
        let s = ints(0, &[1, 1, 0, 0, 0]); // 1 + q
        assert_eq!(s.pow(4), ints(0, &[1, 4, 6, 4, 1]));
        let j_ish = ints(-1, &[1, 744, 196884]);
        assert_eq!(j_ish.q_derivative(), ints(-1, &[-1, 0, 196884]));
    }

    #[test]
    fn zero_handling() {
        let z = QSeries::zero_to_prec(5);
        assert!(z.is_zero());
        let s = ints(0, &[1, 2, 3, 4, 5]);
        assert!(s.sub(&s).is_zero());
        assert_eq!(s.sub(&s).prec(), 5);
        let prod = z.mul(&s);
        assert!(prod.is_zero());
        assert_eq!(prod.prec(), 5);
    }
}
