//! Chinese remaindering and rational reconstruction.
//!
//! The multimodular pipeline combines per-prime images of the critical
//! polynomial's coefficients with an incremental CRT, lifts symmetrically to
//! `(-m/2, m/2]`, and recovers rational coefficients whose numerator and
//! denominator are bounded by `sqrt(m/2)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Incrementally combined congruence `value mod modulus`.
#[derive(Clone, Debug)]
pub struct CrtAccumulator {
    modulus: BigInt,
    value: BigInt,
}

impl CrtAccumulator {
    pub fn new() -> Self {
        CrtAccumulator {
            modulus: BigInt::one(),
            value: BigInt::zero(),
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Adds the congruence `x ≡ residue (mod p)`; `p` must be coprime to the
    /// accumulated modulus (distinct primes in practice).
    pub fn push(&mut self, p: u64, residue: u64) {
        let p_big = BigInt::from(p);
        let r_big = BigInt::from(residue);
        if self.modulus.is_one() {
            self.modulus = p_big;
            self.value = r_big;
            return;
        }
        // value' = value + modulus * ((residue - value) / modulus mod p)
        let m_mod_p = self.modulus.mod_floor(&p_big);
        let inv = mod_inverse(&m_mod_p, &p_big).expect("moduli must be coprime");
        let delta = (&r_big - &self.value).mod_floor(&p_big);
        let t = (delta * inv).mod_floor(&p_big);
        self.value = &self.value + &self.modulus * t;
        self.modulus = &self.modulus * p_big;
        debug_assert!(self.value >= BigInt::zero() && self.value < self.modulus);
    }

    /// The unique representative in `(-m/2, m/2]`.
    pub fn symmetric(&self) -> BigInt {
        symmetric_lift(&self.value, &self.modulus)
    }
}

impl Default for CrtAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Symmetric representative of `a mod m` in `(-m/2, m/2]`.
pub fn symmetric_lift(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Inverse of `a` modulo `m` when it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Recovers `n/d` from `a mod m` with `|n|, d <= sqrt(m/2)`, `gcd(d, m) = 1`.
///
/// Runs the half-extended Euclidean algorithm on `(m, a)` and stops at the first
/// remainder below the cutoff; the corresponding cofactor is the denominator.
/// Returns `None` when no admissible pair exists (more primes are needed).
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    assert!(m > &BigInt::zero());
    let bound = (m / BigInt::from(2)).sqrt();
    let mut r0 = m.clone();
    let mut r1 = a.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (mut num, mut den) = (r1, t1);
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    let g = num.gcd(&den);
    if !g.is_one() {
        // A common factor would contradict the uniqueness guarantee; treat as
        // "not yet reconstructible" rather than guessing.
        return None;
    }
    if !den.gcd(m).is_one() {
        return None;
    }
    // Sanity: num ≡ a * den (mod m).
    debug_assert!((&num - a * &den).mod_floor(m).is_zero());
    Some(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp64::{Fp, PrimePool};
    use num_traits::ToPrimitive;

    fn residue_of_rational(num: i64, den: u64, p: u64) -> u64 {
        let fp = Fp::new(p);
        fp.mul(fp.reduce_i64(num), fp.inv(den % p))
    }

    #[test]
    fn crt_matches_direct_computation() {
        // x = 123456789 combined from three primes.
        let primes = [101u64, 103, 107];
        let x = 123_456_789i64;
        let mut acc = CrtAccumulator::new();
        for &p in &primes {
            acc.push(p, (x as u64) % p);
        }
        let m: i64 = primes.iter().map(|&p| p as i64).product();
        let mut expect = x % m;
        if 2 * expect > m {
            expect -= m;
        }
        assert_eq!(acc.symmetric(), BigInt::from(expect));
    }

    #[test]
    fn symmetric_lift_prefers_negative_when_closer() {
        let mut acc = CrtAccumulator::new();
        // x = -5 mod 101 and mod 103.
        acc.push(101, 96);
        acc.push(103, 98);
        assert_eq!(acc.symmetric(), BigInt::from(-5));
    }

    #[test]
    fn rational_reconstruction_small() {
        // Recover -22/7 from its residues modulo a few word-size primes.
        let primes: Vec<u64> = PrimePool::below(1 << 31).take(3).collect();
        let mut acc = CrtAccumulator::new();
        for &p in &primes {
            acc.push(p, residue_of_rational(-22, 7, p));
        }
        let rec = rational_reconstruct(&acc.value, &acc.modulus).unwrap();
        assert_eq!(rec, BigRational::new(BigInt::from(-22), BigInt::from(7)));
    }

    #[test]
    fn rational_reconstruction_large_integer() {
        // A 150-bit integer needs enough primes; with too few the answer is
        // either None or wrong size, with enough it is exact.
        let x: BigInt = BigInt::from(3).pow(95u32); // about 151 bits
        let primes: Vec<u64> = PrimePool::new().take(6).collect();
        let mut acc = CrtAccumulator::new();
        for &p in &primes {
            let r = x.mod_floor(&BigInt::from(p)).to_u64().unwrap();
            acc.push(p, r);
        }
        let rec = rational_reconstruct(&acc.value, &acc.modulus).unwrap();
        assert_eq!(rec, BigRational::from(x));
    }

    #[test]
    fn reconstruction_needs_enough_precision() {
        // 2^200 cannot be recovered from ~124 bits of modulus.
        let x: BigInt = BigInt::from(2).pow(200u32);
        let primes: Vec<u64> = PrimePool::new().take(2).collect();
        let mut acc = CrtAccumulator::new();
        for &p in &primes {
            let r = x.mod_floor(&BigInt::from(p)).to_u64().unwrap();
            acc.push(p, r);
        }
        let rec = rational_reconstruct(&acc.value, &acc.modulus);
        if let Some(r) = rec {
            assert_ne!(r, BigRational::from(x));
        }
    }
}
