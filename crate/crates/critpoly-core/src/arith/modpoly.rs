//! Dense univariate polynomials over a word-size prime field, with complete
//! factorization (squarefree split, distinct-degree split, equal-degree split).
//!
//! Degrees in this crate stay in the hundreds while moduli are ~2^61, so the
//! classical quadratic algorithms are more than fast enough and the
//! equal-degree step can assume `p` is odd and far larger than the degree.

use super::fp64::Fp;
use super::intpoly::QPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Polynomial over `F_p`, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    fp: Fp,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn zero(fp: Fp) -> Self {
        ModPoly { fp, coeffs: Vec::new() }
    }

    pub fn one(fp: Fp) -> Self {
        ModPoly::constant(fp, 1)
    }

    pub fn constant(fp: Fp, c: u64) -> Self {
        let mut poly = ModPoly { fp, coeffs: vec![c % fp.modulus()] };
        poly.trim();
        poly
    }

    pub fn from_coeffs(fp: Fp, coeffs: Vec<u64>) -> Self {
        let p = fp.modulus();
        let mut poly = ModPoly {
            fp,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        };
        poly.trim();
        poly
    }

    pub fn x(fp: Fp) -> Self {
        ModPoly { fp, coeffs: vec![0, 1] }
    }

    pub fn x_pow(fp: Fp, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = 1;
        ModPoly { fp, coeffs }
    }

    /// Reduction of a rational polynomial; `None` if a denominator vanishes mod p.
    pub fn from_qpoly(f: &QPoly, fp: Fp) -> Option<Self> {
        let p = BigInt::from(fp.modulus());
        let mut coeffs = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            let den = c.denom().mod_floor(&p);
            if den.is_zero() {
                return None;
            }
            let den = den.to_u64().unwrap();
            let num = c.numer().mod_floor(&p).to_u64().unwrap();
            coeffs.push(fp.mul(num, fp.inv(den)));
        }
        Some(ModPoly::from_coeffs(fp, coeffs))
    }

    /// Reduction of an integer polynomial (ascending coefficients).
    pub fn from_bigint_coeffs(fp: Fp, coeffs: &[BigInt]) -> Self {
        let p = BigInt::from(fp.modulus());
        let reduced = coeffs
            .iter()
            .map(|c| c.mod_floor(&p).to_u64().unwrap())
            .collect();
        ModPoly::from_coeffs(fp, reduced)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> Fp {
        self.fp
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    pub fn add(&self, other: &ModPoly) -> ModPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.fp.add(self.coeff(k), other.coeff(k)));
        }
        let mut r = ModPoly { fp: self.fp, coeffs };
        r.trim();
        r
    }

    pub fn sub(&self, other: &ModPoly) -> ModPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.fp.sub(self.coeff(k), other.coeff(k)));
        }
        let mut r = ModPoly { fp: self.fp, coeffs };
        r.trim();
        r
    }

    pub fn scale(&self, c: u64) -> ModPoly {
        let mut r = ModPoly {
            fp: self.fp,
            coeffs: self.coeffs.iter().map(|&a| self.fp.mul(a, c)).collect(),
        };
        r.trim();
        r
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        if self.is_zero() || other.is_zero() {
            return ModPoly::zero(self.fp);
        }
        let p = self.fp.modulus() as u128;
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![0u64; n];
        for (k, out) in coeffs.iter_mut().enumerate() {
            let lo = k.saturating_sub(other.coeffs.len() - 1);
            let hi = k.min(self.coeffs.len() - 1);
            let mut acc: u128 = 0;
            let mut pending = 0u32;
            for i in lo..=hi {
                acc += self.coeffs[i] as u128 * other.coeffs[k - i] as u128;
                pending += 1;
                if pending == 8 {
                    acc %= p;
                    pending = 0;
                }
            }
            *out = (acc % p) as u64;
        }
        let mut r = ModPoly { fp: self.fp, coeffs };
        r.trim();
        r
    }

    pub fn monic(&self) -> ModPoly {
        match self.leading() {
            None => self.clone(),
            Some(1) => self.clone(),
            Some(l) => self.scale(self.fp.inv(l)),
        }
    }

    pub fn divrem(&self, divisor: &ModPoly) -> (ModPoly, ModPoly) {
        let d_deg = divisor.degree().expect("division by zero polynomial");
        if self.coeffs.len() <= d_deg {
            return (ModPoly::zero(self.fp), self.clone());
        }
        let fp = self.fp;
        let lead_inv = fp.inv(divisor.leading().unwrap());
        let mut rem = self.coeffs.clone();
        let q_len = rem.len() - d_deg;
        let mut quot = vec![0u64; q_len];
        for k in (0..q_len).rev() {
            let c = fp.mul(rem[k + d_deg], lead_inv);
            if c == 0 {
                continue;
            }
            quot[k] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = fp.sub(rem[k + j], fp.mul(c, dc));
            }
        }
        let mut q = ModPoly { fp, coeffs: quot };
        let mut r = ModPoly { fp, coeffs: rem };
        q.trim();
        r.trim();
        (q, r)
    }

    pub fn rem(&self, divisor: &ModPoly) -> ModPoly {
        self.divrem(divisor).1
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> ModPoly {
        if self.coeffs.len() <= 1 {
            return ModPoly::zero(self.fp);
        }
        let fp = self.fp;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| fp.mul(c, (k as u64) % fp.modulus()))
            .collect();
        let mut r = ModPoly { fp, coeffs };
        r.trim();
        r
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = self.fp.add(self.fp.mul(acc, x), c);
        }
        acc
    }

    /// `self^e mod m` with a word exponent.
    pub fn pow_mod(&self, e: u64, m: &ModPoly) -> ModPoly {
        self.pow_mod_big(&BigInt::from(e), m)
    }

    /// `self^e mod m` with a big exponent (used by equal-degree splitting).
    pub fn pow_mod_big(&self, e: &BigInt, m: &ModPoly) -> ModPoly {
        let mut acc = ModPoly::one(self.fp);
        let mut base = self.rem(m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(m);
            }
        }
        acc
    }

    /// Squarefree decomposition (Yun). Requires `p > deg f`, which holds for all
    /// uses in this crate (word-size primes, small degrees).
    pub fn squarefree_decomposition(&self) -> Vec<(ModPoly, u32)> {
        let f = self.monic();
        let deg = match f.degree() {
            None | Some(0) => return Vec::new(),
            Some(d) => d,
        };
        assert!(
            (deg as u64) < self.fp.modulus(),
            "squarefree split requires p > deg"
        );
        let mut out = Vec::new();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div_unchecked(&a0);
        let mut d = df.exact_div_unchecked(&a0).sub(&b.derivative());
        let mut i = 1u32;
        while b.degree().is_some_and(|deg| deg > 0) {
            let g = b.gcd(&d);
            if g.degree().is_some_and(|deg| deg > 0) {
                out.push((g.clone(), i));
            }
            b = b.exact_div_unchecked(&g);
            d = d.exact_div_unchecked(&g).sub(&b.derivative());
            i += 1;
        }
        out
    }

    fn exact_div_unchecked(&self, divisor: &ModPoly) -> ModPoly {
        let (q, r) = self.divrem(divisor);
        debug_assert!(r.is_zero());
        q
    }

    /// True when the monic polynomial is irreducible over `F_p`.
    pub fn is_irreducible(&self) -> bool {
        match self.degree() {
            None | Some(0) => false,
            Some(1) => true,
            Some(deg) => {
                let f = self.monic();
                if !f.gcd(&f.derivative()).degree().is_some_and(|d| d == 0) {
                    return false; // repeated factor
                }
                let split = f.distinct_degree_split();
                split.len() == 1 && split[0].1 == deg
            }
        }
    }

    /// Distinct-degree split of a squarefree monic polynomial: returns pairs
    /// (product of irreducible factors of degree d, d) in increasing d.
    fn distinct_degree_split(&self) -> Vec<(ModPoly, usize)> {
        let fp = self.fp;
        let p = fp.modulus();
        let mut f = self.monic();
        let mut out = Vec::new();
        let mut frob = ModPoly::x(fp); // x^(p^d) mod f, starting at d = 0
        let mut d = 0usize;
        while f.degree().is_some_and(|deg| deg > 0) {
            d += 1;
            if f.degree().unwrap() < 2 * d {
                // whatever remains is a single irreducible factor
                out.push((f.clone(), f.degree().unwrap()));
                break;
            }
            frob = frob.pow_mod(p, &f);
            let g = f.gcd(&frob.sub(&ModPoly::x(fp)));
            if g.degree().is_some_and(|deg| deg > 0) {
                out.push((g.clone(), d));
                f = f.exact_div_unchecked(&g);
                frob = frob.rem(&f);
            }
        }
        out
    }

    /// Equal-degree split (Cantor–Zassenhaus) of a monic squarefree product of
    /// irreducibles all of degree `d`. Deterministically seeded.
    fn equal_degree_split(&self, d: usize) -> Vec<ModPoly> {
        let deg = self.degree().unwrap();
        if deg == d {
            return vec![self.clone()];
        }
        let fp = self.fp;
        let p = fp.modulus();
        let mut rng = ChaCha8Rng::seed_from_u64(
            p ^ (deg as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ self.coeffs[0],
        );
        let exp = (BigInt::from(p).pow(d as u32) - 1) / 2;
        loop {
            let a = ModPoly::from_coeffs(
                fp,
                (0..deg).map(|_| rng.random_range(0..p)).collect(),
            );
            if a.degree().is_none() || a.degree() == Some(0) {
                continue;
            }
            let g0 = self.gcd(&a);
            if g0.degree().is_some_and(|g| g > 0) && g0.degree() < self.degree() {
                let mut out = g0.equal_degree_split(d);
                out.extend(self.exact_div_unchecked(&g0).equal_degree_split(d));
                return out;
            }
            let b = a.pow_mod_big(&exp, self);
            let g = self.gcd(&b.sub(&ModPoly::one(fp)));
            if g.degree().is_some_and(|g| g > 0) && g.degree() < self.degree() {
                let mut out = g.equal_degree_split(d);
                out.extend(self.exact_div_unchecked(&g).equal_degree_split(d));
                return out;
            }
        }
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted canonically (degree, then coefficient lex order). The constant
    /// leading coefficient is dropped (callers track it separately if needed).
    pub fn factor(&self) -> Vec<(ModPoly, u32)> {
        assert!(self.fp.modulus() > 2, "factorization requires odd p");
        let mut out: Vec<(ModPoly, u32)> = Vec::new();
        for (sqf, mult) in self.squarefree_decomposition() {
            for (prod, d) in sqf.distinct_degree_split() {
                for fac in prod.equal_degree_split(d) {
                    out.push((fac, mult));
                }
            }
        }
        out.sort_by(|a, b| {
            a.0.degree()
                .cmp(&b.0.degree())
                .then_with(|| a.0.coeffs.cmp(&b.0.coeffs))
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp64::PrimePool;

    fn fp101() -> Fp {
        Fp::new(101)
    }

    fn poly(fp: Fp, coeffs: &[u64]) -> ModPoly {
        ModPoly::from_coeffs(fp, coeffs.to_vec())
    }

    #[test]
    fn mul_divrem_roundtrip() {
        let fp = fp101();
        let f = poly(fp, &[3, 99, 0, 7, 1]);
        let g = poly(fp, &[1, 0, 2]);
        let prod = f.mul(&g);
        let (q, r) = prod.divrem(&g);
        assert!(r.is_zero());
        assert_eq!(q, f);
        let (_, r2) = f.divrem(&g);
        assert!(r2.degree() < g.degree());
    }

    #[test]
    fn from_qpoly_reduces_rationals() {
        let fp = fp101();
        // 1/2 mod 101 = 51
        let half = QPoly::from_coeffs(vec![num_rational::BigRational::new(
            1.into(),
            2.into(),
        )]);
        let m = ModPoly::from_qpoly(&half, fp).unwrap();
        assert_eq!(m.coeff(0), 51);
        // Denominator 101 is not invertible.
        let bad = QPoly::from_coeffs(vec![num_rational::BigRational::new(
            1.into(),
            101.into(),
        )]);
        assert!(ModPoly::from_qpoly(&bad, fp).is_none());
    }

    #[test]
    fn factor_split_cubic_with_multiplicity() {
        let fp = fp101();
        // (x-1)(x-2)(x-3)^2
        let f = poly(fp, &[100, 1])
            .mul(&poly(fp, &[99, 1]))
            .mul(&poly(fp, &[98, 1]))
            .mul(&poly(fp, &[98, 1]));
        let factors = f.factor();
        assert_eq!(
            factors,
            vec![
                (poly(fp, &[98, 1]), 2),
                (poly(fp, &[99, 1]), 1),
                (poly(fp, &[100, 1]), 1),
            ]
        );
    }

    #[test]
    fn factor_irreducible_quadratic() {
        let fp = Fp::new(7);
        // x^2 + 1 is irreducible mod 7 (7 = 3 mod 4)
        let f = poly(fp, &[1, 0, 1]);
        let factors = f.factor();
        assert_eq!(factors, vec![(f.clone(), 1)]);
        assert!(f.is_irreducible());
        assert!(!poly(fp, &[6, 0, 1]).is_irreducible()); // x^2 - 1
    }

    #[test]
    fn factor_over_large_prime() {
        let p = PrimePool::new().next().unwrap();
        let fp = Fp::new(p);
        let a = poly(fp, &[p - 5, 1]); // x - 5
        let b = poly(fp, &[p - 7, 1]); // x - 7
        let c = poly(fp, &[3, 0, 1]); // x^2 + 3 (irreducible or split; just check product)
        let f = a.mul(&b).mul(&c);
        let factors = f.factor();
        let mut reassembled = ModPoly::one(fp);
        for (g, e) in &factors {
            assert!(g.leading() == Some(1));
            for _ in 0..*e {
                reassembled = reassembled.mul(g);
            }
        }
        assert_eq!(reassembled, f.monic());
        assert!(factors.len() >= 3);
    }

    #[test]
    fn squarefree_decomposition_shape() {
        let fp = fp101();
        // (x-2)^3 * (x-5)
        let f = poly(fp, &[99, 1])
            .mul(&poly(fp, &[99, 1]))
            .mul(&poly(fp, &[99, 1]))
            .mul(&poly(fp, &[96, 1]));
        let sq = f.squarefree_decomposition();
        assert_eq!(
            sq,
            vec![(poly(fp, &[96, 1]), 1), (poly(fp, &[99, 1]), 3)]
        );
    }

    #[test]
    fn pow_mod_fermat() {
        let fp = fp101();
        let m = poly(fp, &[1, 0, 0, 1]); // x^3 + 1
        let x = ModPoly::x(fp);
        // x^(p^3) = x mod any squarefree product of factors of degree | 3... use
        // a plain identity instead: x^p mod (x^3+1) has degree < 3 and
        // (x^p)^p^2 = x^(p^3); just check pow_mod against repeated squaring.
        let e = 1_000_003u64;
        let direct = x.pow_mod(e, &m);
        let two_step = x.pow_mod(1_000_000, &m).mul(&x.pow_mod(3, &m)).rem(&m);
        assert_eq!(direct, two_step);
    }
}
