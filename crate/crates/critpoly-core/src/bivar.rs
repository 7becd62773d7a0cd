//! Bivariate polynomials P(X, Y) = Σ_i f_i(Y)·X^i with rational coefficients,
//! stored as X-power slices f_i ∈ Q[Y] (ascending, last slice nonzero).
//!
//! A relation between two q-series x(q), y(q) is such a P with
//! P(x(q), y(q)) = 0 to the certifying precision.  The slices are exactly the
//! rows the kernel solver produces: f_0 carries the critical-polynomial data
//! (as a polynomial in Y = 1/j it reverses into a polynomial in j) and the
//! top slice f_top fixes the normalization.  Exact arithmetic here backs unit
//! tests and small-input cross-checks; the per-prime mirror `ModBivar` is what
//! production runs carry.

use crate::arith::{Fp, ModPoly, QPoly};
use crate::qseries::{ModSeries, QSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarPoly {
    slices: Vec<QPoly>,
}

impl BivarPoly {
    /// Builds from X-power slices, trimming zero top slices.
    pub fn new(mut slices: Vec<QPoly>) -> Self {
        while slices.last().is_some_and(|s| s.is_zero()) {
            slices.pop();
        }
        BivarPoly { slices }
    }

    pub fn zero() -> Self {
        BivarPoly { slices: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty()
    }

    /// A single monomial c·X^a·Y^b.
    pub fn monomial(a: usize, b: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut slices = vec![QPoly::zero(); a + 1];
        slices[a] = QPoly::monomial(b, c);
        BivarPoly { slices }
    }

    pub fn deg_x(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.slices.len() - 1)
        }
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.slices.iter().filter_map(|s| s.degree()).max()
    }

    pub fn slices(&self) -> &[QPoly] {
        &self.slices
    }

    /// Slice f_i(Y); zero beyond the stored range.
    pub fn slice(&self, i: usize) -> QPoly {
        self.slices.get(i).cloned().unwrap_or_else(QPoly::zero)
    }

    /// The constant-in-X slice f_0(Y) = P(0, Y).
    pub fn first_slice(&self) -> QPoly {
        self.slice(0)
    }

    /// The leading slice in X (nonzero unless P = 0).
    pub fn top_slice(&self) -> QPoly {
        self.slices.last().cloned().unwrap_or_else(QPoly::zero)
    }

    pub fn neg(&self) -> BivarPoly {
        BivarPoly { slices: self.slices.iter().map(|s| s.neg()).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> BivarPoly {
        if c.is_zero() {
            return Self::zero();
        }
        BivarPoly { slices: self.slices.iter().map(|s| s.scale(c)).collect() }
    }

    /// Multiplies every slice by g(Y), i.e. multiplies P by an element of Q[Y].
    pub fn scale_y(&self, g: &QPoly) -> BivarPoly {
        if g.is_zero() {
            return Self::zero();
        }
        BivarPoly { slices: self.slices.iter().map(|s| s.mul(g)).collect() }
    }

    /// Multiplies by X^k.
    pub fn shift_x(&self, k: usize) -> BivarPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut slices = vec![QPoly::zero(); k];
        slices.extend(self.slices.iter().cloned());
        BivarPoly { slices }
    }

    pub fn add(&self, other: &BivarPoly) -> BivarPoly {
        let n = self.slices.len().max(other.slices.len());
        let slices = (0..n)
            .map(|i| self.slice(i).add(&other.slice(i)))
            .collect();
        BivarPoly::new(slices)
    }

    pub fn sub(&self, other: &BivarPoly) -> BivarPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BivarPoly) -> BivarPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut slices =
            vec![QPoly::zero(); self.slices.len() + other.slices.len() - 1];
        for (i, a) in self.slices.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.slices.iter().enumerate() {
                slices[i + j] = slices[i + j].add(&a.mul(b));
            }
        }
        BivarPoly::new(slices)
    }

    /// Content in X: the gcd of all slices, an element of Q[Y] (monic).
    pub fn content_x(&self) -> QPoly {
        let mut g = QPoly::zero();
        for s in &self.slices {
            g = g.gcd(s);
        }
        g
    }

    /// Divides out the X-content, leaving an X-primitive polynomial.
    pub fn primitive_x(&self) -> BivarPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.content_x();
        BivarPoly {
            slices: self
                .slices
                .iter()
                .map(|s| s.exact_div(&c).expect("content divides every slice"))
                .collect(),
        }
    }

    /// Rescales to integer coefficients with overall content 1 and the top
    /// slice's leading coefficient positive — the canonical representative of
    /// the scalar class a kernel row determines.
    pub fn primitive_normalized(&self) -> BivarPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut denom_lcm = BigInt::one();
        let mut numer_gcd = BigInt::zero();
        for s in &self.slices {
            for c in s.coeffs() {
                if !c.is_zero() {
                    denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
                    numer_gcd = num_integer::gcd(numer_gcd, c.numer().clone());
                }
            }
        }
        let mut scale = BigRational::new(denom_lcm, numer_gcd);
        let top_lead = self
            .top_slice()
            .leading()
            .expect("nonzero top slice")
            .clone();
        if (top_lead * &scale).is_negative() {
            scale = -scale;
        }
        self.scale(&scale)
    }

    /// Evaluates P(x(q), y(q)) exactly: powers of y are cached, each slice is
    /// accumulated over them, and the result is Horner-combined in x.  The
    /// output precision is whatever honest truncated-series tracking yields.
    pub fn eval_series(&self, x: &QSeries, y: &QSeries) -> QSeries {
        let base_prec = x.prec().min(y.prec());
        if self.is_zero() {
            return QSeries::zero_to_prec(base_prec);
        }
        let dy = self.deg_y().unwrap_or(0);
        let mut ypow = Vec::with_capacity(dy + 1);
        ypow.push(QSeries::one_to_prec(base_prec.max(1)));
        for k in 1..=dy {
            ypow.push(ypow[k - 1].mul(y));
        }
        let eval_slice = |s: &QPoly| -> QSeries {
            let mut acc = QSeries::zero_to_prec(base_prec);
            for (k, c) in s.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.add(&ypow[k].scale(c));
                }
            }
            acc
        };
        let mut acc = eval_slice(&self.slices[self.slices.len() - 1]);
        for i in (0..self.slices.len() - 1).rev() {
            acc = acc.mul(x).add(&eval_slice(&self.slices[i]));
        }
        acc
    }

    /// Pseudo-remainder of self by divisor with respect to X: the remainder of
    /// lc(divisor)^(δ+1)·self under X-division, δ = deg_x self − deg_x divisor.
    pub fn pseudo_rem_x(&self, divisor: &BivarPoly) -> BivarPoly {
        let db = divisor.deg_x().expect("division by zero");
        let lead = divisor.top_slice();
        let mut r = self.clone();
        let mut steps = match self.deg_x() {
            Some(da) if da >= db => da - db + 1,
            _ => 0,
        };
        while let Some(dr) = r.deg_x() {
            if dr < db || steps == 0 {
                break;
            }
            let rl = r.top_slice();
            r = r
                .scale_y(&lead)
                .sub(&divisor.shift_x(dr - db).scale_y(&rl));
            debug_assert!(r.deg_x().is_none_or(|d| d < dr));
            steps -= 1;
        }
        // Keep the full lc^(δ+1) factor so the sequence stays in Q[Y][X].
        for _ in 0..steps {
            r = r.scale_y(&lead);
        }
        r
    }

    /// Gcd up to scalars, via a primitive pseudo-remainder sequence in X.
    /// Exponential content growth is irrelevant at the test sizes this serves.
    pub fn gcd(&self, other: &BivarPoly) -> BivarPoly {
        if self.is_zero() {
            return other.primitive_normalized();
        }
        if other.is_zero() {
            return self.primitive_normalized();
        }
        let content = self.content_x().gcd(&other.content_x());
        let (mut a, mut b) = (self.primitive_x(), other.primitive_x());
        if a.deg_x() < b.deg_x() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.deg_x() == Some(0) {
                // Coprime in X: only the Y-content survives.
                a = BivarPoly::new(vec![QPoly::one()]);
                break;
            }
            let r = a.pseudo_rem_x(&b).primitive_x();
            a = b;
            b = r;
        }
        a.scale_y(&content).primitive_normalized()
    }
}

/// The per-prime image of a relation: slices in F_p[Y] (ascending, trimmed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModBivar {
    fp: Fp,
    slices: Vec<Vec<u64>>,
}

fn trim_tail(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl ModBivar {
    pub fn new(fp: Fp, mut slices: Vec<Vec<u64>>) -> Self {
        for s in &mut slices {
            trim_tail(s);
        }
        while slices.last().is_some_and(|s| s.is_empty()) {
            slices.pop();
        }
        ModBivar { fp, slices }
    }

    pub fn field(&self) -> Fp {
        self.fp
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn deg_x(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.slices.len() - 1)
        }
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.slices
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.len() - 1)
            .max()
    }

    pub fn slices(&self) -> &[Vec<u64>] {
        &self.slices
    }

    pub fn slice_poly(&self, i: usize) -> ModPoly {
        ModPoly::from_coeffs(
            self.fp,
            self.slices.get(i).cloned().unwrap_or_default(),
        )
    }

    /// Reduces an exact relation mod p; None if a denominator vanishes mod p.
    pub fn from_exact(fp: Fp, p: &BivarPoly) -> Option<ModBivar> {
        let mut slices = Vec::with_capacity(p.slices().len());
        for s in p.slices() {
            slices.push(ModPoly::from_qpoly(s, fp)?.coeffs().to_vec());
        }
        Some(ModBivar::new(fp, slices))
    }

    /// The canonical scalar representative: scaled so the lowest-degree
    /// coefficient of the lowest nonzero slice is 1.  Two solver runs (or the
    /// same relation reduced from different normalizations) agree exactly
    /// after this.
    pub fn normalized(&self) -> ModBivar {
        let Some(pivot) = self
            .slices
            .iter()
            .flat_map(|s| s.iter())
            .find(|&&c| c != 0)
        else {
            return self.clone();
        };
        let inv = self.fp.inv(*pivot);
        let slices = self
            .slices
            .iter()
            .map(|s| s.iter().map(|&c| self.fp.mul(c, inv)).collect())
            .collect();
        ModBivar { fp: self.fp, slices }
    }

    /// Evaluates P(x(q), y(q)) mod p with a cached table of y-powers.
    pub fn eval_series(&self, x: &ModSeries, y: &ModSeries) -> ModSeries {
        let fp = self.fp;
        let base_prec = x.prec().min(y.prec());
        if self.is_zero() {
            return ModSeries::zero_to_prec(fp, base_prec);
        }
        let dy = self.deg_y().unwrap_or(0);
        let mut ypow = Vec::with_capacity(dy + 1);
        ypow.push(ModSeries::one_to_prec(fp, base_prec.max(1)));
        for k in 1..=dy {
            ypow.push(ypow[k - 1].mul(y));
        }
        let eval_slice = |s: &[u64]| -> ModSeries {
            let mut acc = ModSeries::zero_to_prec(fp, base_prec);
            for (k, &c) in s.iter().enumerate() {
                if c != 0 {
                    acc = acc.add(&ypow[k].scale(c));
                }
            }
            acc
        };
        let mut acc = eval_slice(&self.slices[self.slices.len() - 1]);
        for i in (0..self.slices.len() - 1).rev() {
            acc = acc.mul(x).add(&eval_slice(&self.slices[i]));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    fn xy(a: usize, b: usize, c: i64) -> BivarPoly {
        BivarPoly::monomial(a, b, q(c))
    }

    #[test]
    fn construction_trims_and_degrees_report() {
        let p = BivarPoly::new(vec![
            QPoly::from_int_coeffs(&[1, 2]),
            QPoly::from_int_coeffs(&[0, 0, 3]),
            QPoly::zero(),
        ]);
        assert_eq!(p.deg_x(), Some(1));
        assert_eq!(p.deg_y(), Some(2));
        assert!(BivarPoly::zero().deg_x().is_none());
        assert_eq!(p.first_slice(), QPoly::from_int_coeffs(&[1, 2]));
        assert_eq!(p.top_slice(), QPoly::from_int_coeffs(&[0, 0, 3]));
    }

    #[test]
    fn ring_identities() {
        // (X + Y)(X − Y) = X² − Y²
        let xplusy = xy(1, 0, 1).add(&xy(0, 1, 1));
        let xminusy = xy(1, 0, 1).sub(&xy(0, 1, 1));
        let prod = xplusy.mul(&xminusy);
        assert_eq!(prod, xy(2, 0, 1).sub(&xy(0, 2, 1)));
        // (X + Y)² = X² + 2XY + Y²
        let sq = xplusy.mul(&xplusy);
        let expect = xy(2, 0, 1).add(&xy(1, 1, 2)).add(&xy(0, 2, 1));
        assert_eq!(sq, expect);
    }

    #[test]
    fn normalization_is_integral_primitive_and_sign_fixed() {
        let p = xy(2, 1, 1)
            .add(&xy(0, 0, 1))
            .scale(&BigRational::new(BigInt::from(-6), BigInt::from(35)));
        let n = p.primitive_normalized();
        // Scalar class representative: X²Y + 1 with positive top lead.
        assert_eq!(n, xy(2, 1, 1).add(&xy(0, 0, 1)));
        // Idempotent and scale-invariant.
        assert_eq!(n.primitive_normalized(), n);
        assert_eq!(p.scale(&q(-7)).primitive_normalized(), n);
    }

    #[test]
    fn series_evaluation_annihilates_a_known_relation() {
        // y = q + q² (known through q^11), x = y³: X − Y³ vanishes identically.
        let mut c = vec![q(0); 11];
        (c[0], c[1]) = (q(1), q(1));
        let y = QSeries::new(1, c);
        let x = y.mul(&y).mul(&y);
        let rel = xy(1, 0, 1).sub(&xy(0, 3, 1));
        let e = rel.eval_series(&x, &y);
        assert!(e.is_zero());
        assert!(e.prec() >= 10);
        // A wrong relation does not vanish.
        let bad = xy(1, 0, 1).sub(&xy(0, 2, 1));
        assert!(!bad.eval_series(&x, &y).is_zero());
    }

    #[test]
    fn laurent_evaluation_handles_poles() {
        // x = u⁻¹ + 1, y = u⁻¹ satisfy X − Y − 1 = 0.
        let u = QSeries::new(1, vec![q(1), q(-3), q(2), q(5), q(0), q(1)]);
        let y = u.inv();
        let x = y.add(&QSeries::one_to_prec(y.prec()));
        let rel = xy(1, 0, 1).sub(&xy(0, 1, 1)).sub(&xy(0, 0, 1));
        assert!(rel.eval_series(&x, &y).is_zero());
    }

    #[test]
    fn pseudo_remainder_drops_x_degree() {
        let a = xy(3, 0, 1).add(&xy(0, 1, 1)); // X³ + Y
        let b = xy(1, 1, 1).add(&xy(0, 0, 1)); // XY + 1
        let r = a.pseudo_rem_x(&b);
        // Y³(X³ + Y) = (X²Y² − XY + 1)(XY + 1) + (Y⁴ − 1)
        assert_eq!(r.deg_x(), Some(0));
        assert_eq!(
            r.first_slice(),
            QPoly::from_int_coeffs(&[-1, 0, 0, 0, 1])
        );
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let g = xy(1, 0, 1).add(&xy(0, 1, 1)); // X + Y
        let a = g.mul(&xy(2, 0, 1).add(&xy(0, 1, 1))); // (X+Y)(X²+Y)
        let b = g.mul(&xy(1, 0, 1).sub(&xy(0, 2, 1))); // (X+Y)(X−Y²)
        assert_eq!(a.gcd(&b), g);
        // Coprime inputs: gcd is the unit class.
        let c = xy(1, 0, 1).sub(&xy(0, 1, 1));
        let d = xy(1, 0, 1).add(&xy(0, 0, 5));
        assert_eq!(c.gcd(&d), BivarPoly::new(vec![QPoly::one()]));
        // Common Y-content is preserved.
        let ya = a.scale_y(&QPoly::from_int_coeffs(&[0, 1]));
        let yb = b.scale_y(&QPoly::from_int_coeffs(&[0, 1]));
        assert_eq!(ya.gcd(&yb), g.scale_y(&QPoly::from_int_coeffs(&[0, 1])));
    }

    #[test]
    fn mod_reduction_and_canonical_scaling() {
        let fp = Fp::new(1_000_003);
        let p = xy(2, 1, 7).add(&xy(0, 0, -21));
        let m = ModBivar::from_exact(fp, &p).unwrap();
        assert_eq!(m.deg_x(), Some(2));
        assert_eq!(m.deg_y(), Some(1));
        // Any nonzero rescaling normalizes to the same representative.
        let scaled = ModBivar::from_exact(fp, &p.scale(&q(555))).unwrap();
        assert_eq!(m.normalized(), scaled.normalized());
        // Denominator divisible by p: reduction must refuse.
        let half = p.scale(&BigRational::new(BigInt::from(1), BigInt::from(1_000_003)));
        assert!(ModBivar::from_exact(fp, &half).is_none());
    }

    #[test]
    fn mod_evaluation_matches_exact_evaluation() {
        let fp = Fp::new(999_999_999_999_999_989);
        let y = QSeries::new(1, vec![q(1), q(4), q(-2), q(3), q(1), q(2), q(7), q(1)]);
        let x = y.mul(&y).add(&y.scale(&q(3)));
        let rel = xy(1, 0, 1)
            .sub(&xy(0, 2, 1))
            .sub(&xy(0, 1, 3))
            .add(&xy(2, 1, 5)); // nonvanishing on purpose
        let exact = rel.eval_series(&x, &y);
        let m = ModBivar::from_exact(fp, &rel).unwrap();
        let ym = ModSeries::new(fp, 1, (0..8).map(|k| fp.reduce_i64([1, 4, -2, 3, 1, 2, 7, 1][k])).collect());
        let xm = ym.mul(&ym).add(&ym.scale(3));
        let em = m.eval_series(&xm, &ym);
        assert_eq!(em.val(), exact.val());
        for e in exact.val()..exact.prec().min(em.prec()) {
            let c = exact.coeff_at(e);
            assert!(c.denom().is_one());
            let expect = {
                let r = (c.numer() % BigInt::from(fp.modulus())
                    + BigInt::from(fp.modulus()))
                    % BigInt::from(fp.modulus());
                u64::try_from(&r).unwrap()
            };
            assert_eq!(em.coeff_at(e), expect, "coefficient of q^{e}");
        }
    }
}
