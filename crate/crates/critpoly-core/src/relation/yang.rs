//! Pole-cancellation relation method for a Yang pair: two functions x, y
//! holomorphic away from [∞] with coprime pole orders (m, n) there satisfy
//!
//!   P(x, y) = y^m − x^n + Σ_{a·m + b·n < m·n} c_{a,b} x^a y^b = 0,
//!
//! and the coefficients are recovered greedily.  The running series starts as
//! y^m − x^n, whose leading q^{-mn} terms cancel; at pole depth k < mn the
//! coprimality of (m, n) gives a unique monomial x^a y^b with a·m + b·n = k
//! and 0 ≤ a < n, and subtracting the (monic) expansion of that monomial
//! times the residual's leading coefficient strictly reduces the depth.  A
//! residual that vanishes through positive q-order certifies the relation:
//! P(x, y) is holomorphic away from [∞] and vanishes there, hence is zero.
//!
//! Each input series must carry M = (m+1)(n+1) coefficients, so that every
//! monomial in the triangle is known through q-order m + n + 1 > 0.
//!
//! The critical polynomial in the y-coordinate falls out of the constant
//! slice: F(Y) = Y^{2g−2−m}·P(0, Y), an exact division because every
//! non-critical zero of x (cusps and elliptic fibers) is sent to Y = 0.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{Fp, ModPoly, QPoly};
use crate::bivar::{BivarPoly, ModBivar};
use crate::error::{Error, Result};
use crate::gamma0::gcd_u64;
use crate::qseries::{ModSeries, QSeries};

/// Pole orders (m, n) of a validated pair: both series nonzero with a genuine
/// pole and unit leading coefficient, coprime orders, and the certifying
/// count of M = (m+1)(n+1) coefficients each.
fn validated_poles(
    vals: (Option<i64>, Option<i64>),
    lengths: (i64, i64),
    leads_are_one: bool,
) -> Result<(usize, usize)> {
    let (Some(gv), Some(hv)) = vals else {
        return Err(Error::BadInput("pair series must be nonzero".into()));
    };
    if gv >= 0 || hv >= 0 {
        return Err(Error::BadInput(format!(
            "pair must have poles at [∞]; valuations ({gv}, {hv})"
        )));
    }
    let (m, n) = ((-gv) as u64, (-hv) as u64);
    if gcd_u64(m, n) != 1 {
        return Err(Error::BadInput(format!(
            "pole orders ({m}, {n}) are not coprime"
        )));
    }
    if !leads_are_one {
        return Err(Error::BadInput(
            "pair series must have leading coefficient 1".into(),
        ));
    }
    let need = ((m + 1) * (n + 1)) as i64;
    if lengths.0 < need || lengths.1 < need {
        return Err(Error::Precision(format!(
            "pair series need {need} coefficients each; have {lengths:?}"
        )));
    }
    Ok((m as usize, n as usize))
}

/// `table[k mod n]` = the unique a in [0, n) with a·m ≡ k (mod n).
fn depth_table(m: usize, n: usize) -> Vec<usize> {
    let mut table = vec![0usize; n];
    for a in 0..n {
        table[(a * m) % n] = a;
    }
    table
}

/// Recover the relation P(x, y) for an exact pair (x = g, y = h) with pole
/// orders m = −val(g), n = −val(h).
pub fn yang_relation(g: &QSeries, h: &QSeries) -> Result<BivarPoly> {
    let val = |s: &QSeries| (!s.is_zero()).then(|| s.val());
    let lead = |s: &QSeries| !s.is_zero() && s.coeff_at(s.val()).is_one();
    let (m, n) = validated_poles(
        (val(g), val(h)),
        (g.prec() - val(g).unwrap_or(0), h.prec() - val(h).unwrap_or(0)),
        lead(g) && lead(h),
    )?;
    let one = QSeries::one_to_prec(g.prec().max(h.prec()).max(1));
    let mut xs = vec![one.clone()];
    for _ in 0..n {
        xs.push(xs.last().unwrap().mul(g));
    }
    let mut ys = vec![one];
    for _ in 0..m {
        ys.push(ys.last().unwrap().mul(h));
    }
    let table = depth_table(m, n);
    let mut slices = vec![vec![BigRational::zero(); m + 1]; n + 1];
    slices[0][m] = BigRational::one();
    slices[n][0] = -BigRational::one();
    let mut r = ys[m].sub(&xs[n]);
    for _ in 0..=(m * n + 1) {
        if r.is_zero() {
            debug_assert!(r.prec() >= 1);
            return Ok(BivarPoly::new(
                slices.into_iter().map(QPoly::from_coeffs).collect(),
            ));
        }
        let k = -r.val();
        if k < 0 {
            return Err(Error::Inconsistent(format!(
                "residual fails to vanish: order {} remainder",
                r.val()
            )));
        }
        let k = k as usize;
        debug_assert!(k < m * n);
        let a = table[k % n];
        if a * m > k {
            return Err(Error::NoRelation(format!(
                "pole depth {k} is not a·{m} + b·{n} with 0 ≤ a < {n}"
            )));
        }
        let b = (k - a * m) / n;
        let lead = r.coeff_at(-(k as i64));
        debug_assert!(slices[a][b].is_zero());
        slices[a][b] = -lead.clone();
        let mono = xs[a].mul(&ys[b]);
        r = r.sub(&mono.scale(&lead));
        debug_assert!(r.is_zero() || -r.val() < k as i64);
    }
    Err(Error::Inconsistent(
        "pole cancellation failed to terminate".into(),
    ))
}

/// Mod-p mirror of `yang_relation`; production runs solve per prime and
/// reconstruct the relation's integer coefficients afterwards.
pub fn yang_relation_mod(fp: Fp, g: &ModSeries, h: &ModSeries) -> Result<ModBivar> {
    let val = |s: &ModSeries| (!s.is_zero()).then(|| s.val());
    let lead = |s: &ModSeries| !s.is_zero() && s.coeff_at(s.val()) == 1;
    let (m, n) = validated_poles(
        (val(g), val(h)),
        (g.prec() - val(g).unwrap_or(0), h.prec() - val(h).unwrap_or(0)),
        lead(g) && lead(h),
    )?;
    let one = ModSeries::one_to_prec(fp, g.prec().max(h.prec()).max(1));
    let mut xs = vec![one.clone()];
    for _ in 0..n {
        xs.push(xs.last().unwrap().mul(g));
    }
    let mut ys = vec![one];
    for _ in 0..m {
        ys.push(ys.last().unwrap().mul(h));
    }
    let table = depth_table(m, n);
    let mut slices = vec![vec![0u64; m + 1]; n + 1];
    slices[0][m] = 1;
    slices[n][0] = fp.neg(1);
    let mut r = ys[m].sub(&xs[n]);
    for _ in 0..=(m * n + 1) {
        if r.is_zero() {
            debug_assert!(r.prec() >= 1);
            return Ok(ModBivar::new(fp, slices));
        }
        let k = -r.val();
        if k < 0 {
            return Err(Error::Inconsistent(format!(
                "residual fails to vanish: order {} remainder",
                r.val()
            )));
        }
        let k = k as usize;
        debug_assert!(k < m * n);
        let a = table[k % n];
        if a * m > k {
            return Err(Error::NoRelation(format!(
                "pole depth {k} is not a·{m} + b·{n} with 0 ≤ a < {n}"
            )));
        }
        let b = (k - a * m) / n;
        let lead = r.coeff_at(-(k as i64));
        debug_assert_eq!(slices[a][b], 0);
        slices[a][b] = fp.neg(lead);
        let mono = xs[a].mul(&ys[b]);
        r = r.sub(&mono.scale(lead));
        debug_assert!(r.is_zero() || -r.val() < k as i64);
    }
    Err(Error::Inconsistent(
        "pole cancellation failed to terminate".into(),
    ))
}

/// Extract the critical polynomial in the y-coordinate from a
/// pole-cancellation relation: F(Y) = Y^{2g−2−m}·f_0(Y) where m is the pole
/// order of x.  The constant slice is monic of degree exactly m, and its
/// bottom m − (2g−2) coefficients must vanish.
pub fn assemble_critical_yang_mod(
    rel: &ModBivar,
    pole_x: u64,
    genus: u64,
) -> Result<ModPoly> {
    let m = pole_x as usize;
    let f0 = rel.slice_poly(0);
    if f0.degree() != Some(m) || f0.leading() != Some(1) {
        return Err(Error::Inconsistent(format!(
            "constant slice must be monic of degree {m}; got degree {:?}",
            f0.degree()
        )));
    }
    let target = 2 * genus as i64 - 2;
    let w = m as i64 - target.max(0);
    if w < 0 {
        return Err(Error::Inconsistent(format!(
            "pole order {m} below the output degree {target}"
        )));
    }
    let w = w as usize;
    if f0.coeffs()[..w].iter().any(|&c| c != 0) {
        return Err(Error::Inconsistent(
            "constant slice does not vanish to the expected order at Y = 0".into(),
        ));
    }
    Ok(ModPoly::from_coeffs(rel.field(), f0.coeffs()[w..].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fp64::PrimePool;
    use crate::eta::{build_yang_pair_mod, find_yang_eta};
    use crate::newform::CurveData;
    use num_bigint::BigInt;

    fn prime() -> Fp {
        Fp::new(PrimePool::new().next().unwrap())
    }

    fn laurent(val: i64, coeffs: &[i64], len: usize) -> QSeries {
        let mut v: Vec<BigRational> =
            coeffs.iter().map(|&c| BigRational::from(BigInt::from(c))).collect();
        v.resize(len, BigRational::zero());
        QSeries::new(val, v)
    }

    fn laurent_mod(fp: Fp, val: i64, coeffs: &[i64], len: usize) -> ModSeries {
        let mut v: Vec<u64> = coeffs.iter().map(|&c| fp.reduce_i64(c)).collect();
        v.resize(len, 0);
        ModSeries::new(fp, val, v)
    }

    #[test]
    fn plane_curve_relation_recovered_exactly() {
        // With z = 1/q, the pair x = z² + z, y = z³ on the projective line
        // satisfies y² − x³ + 3xy + y = 0 (checked by hand).
        let g = laurent(-2, &[1, 1], 14);
        let h = laurent(-3, &[1], 15);
        let p = yang_relation(&g, &h).unwrap();
        let want = BivarPoly::new(vec![
            QPoly::from_int_coeffs(&[0, 1, 1]), // y² + y
            QPoly::from_int_coeffs(&[0, 3]),    // 3y·x
            QPoly::zero(),
            QPoly::from_int_coeffs(&[-1]), // −x³
        ]);
        assert_eq!(p, want);
    }

    #[test]
    fn mod_p_run_matches_the_exact_relation() {
        let fp = prime();
        let g = laurent(-2, &[1, 1], 14);
        let h = laurent(-3, &[1], 15);
        let exact = yang_relation(&g, &h).unwrap();
        let gm = laurent_mod(fp, -2, &[1, 1], 14);
        let hm = laurent_mod(fp, -3, &[1], 15);
        let modp = yang_relation_mod(fp, &gm, &hm).unwrap();
        assert_eq!(modp, ModBivar::from_exact(fp, &exact).unwrap());
    }

    #[test]
    fn unreachable_pole_depth_is_rejected() {
        // x = z², y = z³ + q²: the cross term puts the residual at depth 1,
        // the numerical-semigroup gap of ⟨2, 3⟩, so no monomial can cancel it.
        let g = laurent(-2, &[1], 14);
        let mut tail = vec![0i64; 15];
        (tail[0], tail[5]) = (1, 1);
        let h = laurent(-3, &tail, 15);
        let err = yang_relation(&g, &h).unwrap_err();
        assert!(matches!(err, Error::NoRelation(_)), "{err}");
    }

    #[test]
    fn bad_pairs_are_rejected() {
        // Non-coprime pole orders.
        let g = laurent(-2, &[1], 14);
        let h = laurent(-4, &[1], 16);
        assert!(matches!(
            yang_relation(&g, &h).unwrap_err(),
            Error::BadInput(_)
        ));
        // Too few coefficients for the certifying order.
        let g = laurent(-2, &[1, 1], 5);
        let h = laurent(-3, &[1], 6);
        assert!(matches!(
            yang_relation(&g, &h).unwrap_err(),
            Error::Precision(_)
        ));
    }

    #[test]
    fn genus_one_eta_pair_gives_trivial_critical_polynomial() {
        // Conductor 11: the solved pair has pole orders (45, 47); the
        // relation's shape checks out and the y-side critical polynomial is 1.
        let fp = prime();
        let curve = CurveData {
            label: "11a".into(),
            a_invariants: [0, -1, 1, -10, -20],
            conductor: 11,
            analytic_rank: 0,
        };
        let meta = find_yang_eta(11).unwrap();
        assert_eq!((meta.m, meta.n), (45, 47));
        assert_eq!(meta.extra_j, 0);
        let need = ((meta.m + 1) * (meta.n + 1)) as i64;
        let (g, h) = build_yang_pair_mod(fp, &curve, &meta, need - meta.m as i64).unwrap();
        let rel = yang_relation_mod(fp, &g, &h).unwrap();
        assert_eq!(rel.deg_x(), Some(meta.n as usize));
        // Top slice is the constant −1; constant slice is monic of degree m.
        assert_eq!(rel.slice_poly(meta.n as usize).coeffs(), &[fp.neg(1)]);
        let f0 = rel.slice_poly(0);
        assert_eq!(f0.degree(), Some(meta.m as usize));
        let f = assemble_critical_yang_mod(&rel, meta.m, 1).unwrap();
        assert_eq!(f.coeffs(), &[1]);
    }
}
