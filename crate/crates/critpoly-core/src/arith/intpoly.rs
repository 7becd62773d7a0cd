//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending order with no trailing zeros, so the
//! zero polynomial is the empty vector and `degree()` is `None` for it.
//! Polynomial gcds clear denominators and run a primitive pseudo-remainder
//! sequence over the integers to avoid rational coefficient blow-up.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Polynomial in one variable over Q, dense ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

fn trim(coeffs: &mut Vec<BigRational>) {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::constant(BigRational::one())
    }

    pub fn x() -> Self {
        QPoly::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        let mut coeffs = vec![c];
        trim(&mut coeffs);
        QPoly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        trim(&mut coeffs);
        QPoly { coeffs }
    }

    pub fn from_int_coeffs(coeffs: &[i64]) -> Self {
        QPoly::from_coeffs(
            coeffs
                .iter()
                .map(|&c| BigRational::from(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_bigint_coeffs(coeffs: Vec<BigInt>) -> Self {
        QPoly::from_coeffs(coeffs.into_iter().map(BigRational::from).collect())
    }

    /// `c * x^k`.
    pub fn monomial(k: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        QPoly { coeffs }
    }

    pub fn x_pow(k: usize) -> Self {
        QPoly::monomial(k, BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^k` (zero beyond the stored range).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        QPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - other.coeff(k));
        }
        QPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> QPoly {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        QPoly { coeffs }
    }

    pub fn pow(&self, e: u32) -> QPoly {
        let mut acc = QPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from(BigInt::from(k)))
                .collect(),
        )
    }

    /// Euclidean division; panics on division by zero.
    pub fn divrem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let d_deg = divisor.degree().expect("division by zero polynomial");
        let d_lead_inv = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return (QPoly::zero(), self.clone());
        }
        let q_len = rem.len() - d_deg;
        let mut quot = vec![BigRational::zero(); q_len];
        for k in (0..q_len).rev() {
            let c = &rem[k + d_deg] * &d_lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let t = &c * dc;
                rem[k + j] -= t;
            }
            quot[k] = c;
        }
        (QPoly::from_coeffs(quot), QPoly::from_coeffs(rem))
    }

    /// Exact quotient, or `None` when the remainder is nonzero.
    pub fn exact_div(&self, divisor: &QPoly) -> Option<QPoly> {
        let (q, r) = self.divrem(divisor);
        r.is_zero().then_some(q)
    }

    /// Monic gcd via a primitive pseudo-remainder sequence over Z.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let mut a = integer_primitive(self);
        let mut b = integer_primitive(other);
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = primitive_part(r);
        }
        QPoly::from_bigint_coeffs(a).monic()
    }

    pub fn monic(&self) -> QPoly {
        match self.leading() {
            None => QPoly::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// `x^deg * f(1/x)`: the coefficient list reversed (and re-trimmed).
    pub fn reverse(&self) -> QPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        QPoly::from_coeffs(coeffs)
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    /// Integer coefficient vector (ascending) when the polynomial is integral.
    pub fn to_bigint_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

/// Clears denominators and divides by the integer content: a primitive integer
/// coefficient vector proportional to `f`.
fn integer_primitive(f: &QPoly) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    primitive_part(ints)
}

fn primitive_part(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for c in &mut v {
            *c = &*c / &g;
        }
    }
    v
}

/// Pseudo-remainder of integer polynomials: `lc(b)^(deg a - deg b + 1) * a mod b`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() > db {
        let lr = r.last().unwrap().clone();
        let k = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (j, bc) in b.iter().enumerate() {
            let t = &lr * bc;
            r[k + j] -= t;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
        if r.is_empty() {
            break;
        }
    }
    r
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> QPoly {
        QPoly::from_int_coeffs(coeffs)
    }

    #[test]
    fn construction_trims_and_degree() {
        assert!(QPoly::zero().is_zero());
        assert_eq!(QPoly::zero().degree(), None);
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(QPoly::x_pow(3).degree(), Some(3));
    }

    #[test]
    fn ring_ops() {
        let f = p(&[1, 1]); // 1 + x
        let g = p(&[-1, 1]); // -1 + x
        assert_eq!(f.mul(&g), p(&[-1, 0, 1]));
        assert_eq!(f.add(&g), p(&[0, 2]));
        assert_eq!(f.sub(&g), p(&[2]));
        assert_eq!(f.pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(f.mul(&QPoly::zero()), QPoly::zero());
    }

    #[test]
    fn division_identity_holds() {
        let f = p(&[3, -2, 0, 7, 1, 5]);
        let g = p(&[1, 0, 2]);
        let (q, r) = f.divrem(&g);
        assert!(r.degree() < g.degree());
        assert_eq!(q.mul(&g).add(&r), f);
        assert!(f.exact_div(&g).is_none());
        let prod = f.mul(&g);
        assert_eq!(prod.exact_div(&g).unwrap(), f);
    }

    #[test]
    fn gcd_common_factor() {
        // (x+1)(x^2+2) and (x+1)(x-3)
        let a = p(&[1, 1]).mul(&p(&[2, 0, 1]));
        let b = p(&[1, 1]).mul(&p(&[-3, 1]));
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        // coprime pair
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[-3, 1])), QPoly::one());
        // gcd with zero
        assert_eq!(p(&[2, 4]).gcd(&QPoly::zero()), p(&[1, 2]).monic());
    }

    #[test]
    fn gcd_with_multiplicity_and_big_cofactors() {
        let common = p(&[5, -7, 11, 1]);
        let a = common.mul(&common).mul(&p(&[123456789, 1]));
        let b = common.mul(&p(&[1, 987654321]));
        assert_eq!(a.gcd(&b), common.monic());
    }

    #[test]
    fn eval_derivative_reverse() {
        let f = p(&[0, 2, 0, 1]); // 2x + x^3
        assert_eq!(
            f.eval(&BigRational::from(BigInt::from(3))),
            BigRational::from(BigInt::from(33))
        );
        assert_eq!(f.derivative(), p(&[2, 0, 3]));
        assert_eq!(f.reverse(), p(&[1, 0, 2]));
        assert_eq!(QPoly::zero().reverse(), QPoly::zero());
    }

    #[test]
    fn integrality_helpers() {
        let f = p(&[6, -3]);
        assert!(f.is_integral());
        let half = QPoly::from_coeffs(vec![BigRational::new(
            BigInt::from(1),
            BigInt::from(2),
        )]);
        assert!(!half.is_integral());
        assert_eq!(
            f.to_bigint_coeffs().unwrap(),
            vec![BigInt::from(6), BigInt::from(-3)]
        );
    }
}
