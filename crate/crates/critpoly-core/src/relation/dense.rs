//! Dense relation algorithm: the minimal bivariate relation between
//! x = r·j^T and y = 1/j, solved per prime in reverted coordinates.
//!
//! With f the curve's weight-2 newform, r = j(j−1728)·f/(q·dj/dq) is a
//! modular function with q-valuation 0 whose divisor combines the
//! ramification divisor of the parametrization with fixed cusp and elliptic
//! contributions. For any exponent T ≥ 0, x = r·j^T and y = 1/j satisfy a
//! relation P(x, y) = Σ_a f_a(y)·x^a with
//!
//! * deg_x P ≤ deg(y) = d (the index of Γ_0(N)), so m = d + 1 slices,
//! * deg_y P ≤ deg(x) ≤ (T+1)d − c (c the cusp count),
//! * certified by vanishing to order M = 2·deg(x)·deg(y) + 1 at [∞], since a
//!   nonzero function of degree ≤ 2·deg(x)·deg(y) cannot vanish that deep.
//!
//! Reversion turns this into a Hermite–Padé problem the order basis solves:
//! with Q(t) the compositional inverse of y(q) and R(t) = x(q(t)), the slices
//! f_a are exactly polynomial multipliers on the inputs R^a·t^s (the uniform
//! shift s = d·T clears the t-pole of order T that x inherits for T > 0),
//! and the order target becomes M + s.
//!
//! The critical polynomial's image mod p is assembled from the constant
//! slice: F = monic[ x^A·f_0(1/x) · (x−1728)^B ] with A = deg f_d − T·d −
//! (d + 2ν₃)/3 and B = −(d + ν₂)/2 ≤ 0, where negative powers are exact
//! divisions (the elliptic-point ramification guarantees the factors).
//!
//! Every pole of x lies over y = 0 (x's poles sit at cusps, where y = 1/j
//! vanishes), at every exponent T. Two consequences drive the small-T paths:
//! the exact gcd of the constant and leading slices is always a pure power
//! of y — nontrivial exactly when the zero divisor of the weight-2 form
//! meets width-1 cusps — and the assembly's coefficient reversal absorbs
//! that power with no formula change. When the degree box has slack (small
//! T, cusp cancellation) the bounded kernel gains dimension; its qualifying
//! basis rows are then y- or x-multiples of the one true relation, which the
//! bivariate gcd fold below recovers exactly.

use crate::arith::{Fp, ModPoly};
use crate::bivar::ModBivar;
use crate::error::{Error, Result};
use crate::gamma0::Gamma0;
use crate::qseries::{form_from_an_mod, j_mod, j_reciprocal_mod, ModSeries};
use crate::relation::orderbasis::minimal_approximant_basis;

/// Solver dimensions for one (level, T) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseParams {
    pub level: u64,
    pub t_exp: u32,
    pub genus: u64,
    pub nu2: u64,
    pub nu3: u64,
    /// deg(y) = index d of Γ_0(N); the x-degree bound of the relation.
    pub deg_u: u64,
    /// deg(x) ≤ (T+1)d − c; the y-degree bound of the relation.
    pub deg_r1: u64,
    /// Number of input series (slices): deg_u + 1.
    pub m: usize,
    /// Certifying order M = 2·deg_r1·deg_u + 1.
    pub order: usize,
    /// Uniform t-shift d·T making every input a power series.
    pub shift: usize,
}

impl DenseParams {
    pub fn new(level: u64, t_exp: u32) -> Result<Self> {
        let g = Gamma0::new(level)?;
        let deg_u = g.index;
        let deg_r1 = (t_exp as u64 + 1) * g.index - g.cusp_count;
        let order = 2 * deg_r1 * deg_u + 1;
        let shift = deg_u * t_exp as u64;
        Ok(DenseParams {
            level,
            t_exp,
            genus: g.genus,
            nu2: g.nu2,
            nu3: g.nu3,
            deg_u,
            deg_r1,
            m: deg_u as usize + 1,
            order: order as usize,
            shift: shift as usize,
        })
    }

    /// Total order the basis runs through (certifying order plus shift).
    pub fn total_order(&self) -> usize {
        self.order + self.shift
    }

    /// Coefficient-operation estimate for one prime: the order-basis loop is
    /// ~m·Σ²/2 word operations and dominates at scale.
    pub fn predicted_work(&self) -> u128 {
        let sigma = self.total_order() as u128;
        self.m as u128 * sigma * sigma / 2
    }
}

/// Result of one per-prime dense solve.
#[derive(Clone, Debug)]
pub struct DenseRelation {
    pub relation: ModBivar,
    /// Dimension of the full degree-bounded kernel (1 when no cusp slack).
    pub kernel_dimension: usize,
}

fn series_to_array(s: &ModSeries, len: usize) -> Vec<u64> {
    assert!(s.is_zero() || s.val() >= 0, "input series must be regular");
    assert!(
        s.prec() >= len as i64,
        "series precision {} below required {len}",
        s.prec()
    );
    let mut v = vec![0u64; len];
    if !s.is_zero() {
        let v0 = s.val() as usize;
        for (k, &c) in s.coeffs().iter().enumerate() {
            if v0 + k >= len {
                break;
            }
            v[v0 + k] = c;
        }
    }
    v
}

/// y-content of a slice list: monic gcd over F_p[y] of the nonzero slices.
fn y_content(fp: Fp, slices: &[ModPoly]) -> ModPoly {
    let mut g = ModPoly::zero(fp);
    for s in slices {
        if s.is_zero() {
            continue;
        }
        g = if g.is_zero() { s.monic() } else { g.gcd(s) };
        if g.degree() == Some(0) {
            break;
        }
    }
    g
}

/// Trims top zero slices, then splits off the y-content.
fn content_and_primitive(
    fp: Fp,
    mut slices: Vec<ModPoly>,
) -> (ModPoly, Vec<ModPoly>) {
    while slices.last().is_some_and(|s| s.is_zero()) {
        slices.pop();
    }
    let g = y_content(fp, &slices);
    if g.degree().is_some_and(|d| d > 0) {
        for s in slices.iter_mut() {
            if !s.is_zero() {
                let (q, r) = s.divrem(&g);
                debug_assert!(r.is_zero());
                *s = q;
            }
        }
    }
    (g, slices)
}

/// Pseudo-remainder in (F_p[y])[x]: repeatedly scales by the divisor's
/// leading slice and subtracts, until deg_x drops below the divisor's.
fn pseudo_rem_x(a: &[ModPoly], b: &[ModPoly]) -> Vec<ModPoly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<ModPoly> = a.to_vec();
    loop {
        while r.last().is_some_and(|s| s.is_zero()) {
            r.pop();
        }
        if r.len() <= db {
            return r;
        }
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for s in r.iter_mut() {
            *s = s.mul(lb);
        }
        for i in 0..=db {
            r[dr - db + i] = r[dr - db + i].sub(&lr.mul(&b[i]));
        }
    }
}

/// Gcd in F_p[x, y]: primitive pseudo-remainder sequence in (F_p[y])[x],
/// times the univariate gcd of the two y-contents.
fn bivar_gcd_mod(a: &ModBivar, b: &ModBivar) -> ModBivar {
    let fp = a.field();
    let slices_of = |m: &ModBivar| -> Vec<ModPoly> {
        match m.deg_x() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| m.slice_poly(i)).collect(),
        }
    };
    let (ca, mut u) = content_and_primitive(fp, slices_of(a));
    let (cb, mut v) = content_and_primitive(fp, slices_of(b));
    if u.is_empty() {
        return b.normalized();
    }
    if v.is_empty() {
        return a.normalized();
    }
    let cg = ca.gcd(&cb);
    if u.len() < v.len() {
        std::mem::swap(&mut u, &mut v);
    }
    while !v.is_empty() {
        let r = pseudo_rem_x(&u, &v);
        u = v;
        v = content_and_primitive(fp, r).1;
    }
    let slices = u.iter().map(|s| s.mul(&cg).coeffs().to_vec()).collect();
    ModBivar::new(fp, slices).normalized()
}

/// Builds the m order-basis inputs R^a·t^(s − aT) for one prime.
fn dense_inputs(fp: Fp, an: &[i64], params: &DenseParams) -> Vec<Vec<u64>> {
    let total = params.total_order();
    let len = (total + 24) as i64;
    let t = params.t_exp;

    let j = j_mod(fp, len);
    let u = j_reciprocal_mod(fp, len);
    let f = form_from_an_mod(fp, an, len);
    let c1728 = ModSeries::one_to_prec(fp, len).scale(fp.reduce_i64(1728));
    let jj = j.mul(&j.sub(&c1728));
    let r = jj.mul(&f).mul(&j.q_derivative().inv());
    assert_eq!(r.val(), 0, "r must have q-valuation zero");
    assert_eq!(r.coeff_at(0), fp.neg(1), "r must have leading coefficient -1");

    // x·q^T = r·(j·q)^T is regular with unit-free leading coefficient.
    let j_hat = j.shift(1);
    let r_hat = r.mul(&j_hat.pow(t as u64));

    // Reverted coordinates: Q(t) with y(Q(t)) = t.
    let big_q = u.revert();
    let out_len = total + 4;
    let r_comp = r_hat.compose(&big_q, out_len);
    let w = if t == 0 {
        r_comp
    } else {
        // R(t)·t^T = (x·q^T)(Q(t)) / (Q(t)/t)^T.
        let q_hat = big_q.shift(-1);
        r_comp.mul(&q_hat.pow(t as u64).inv())
    };
    assert!(w.prec() >= total as i64, "working precision exhausted");

    let mut inputs = Vec::with_capacity(params.m);
    let mut cur = ModSeries::one_to_prec(fp, w.prec());
    for a in 0..params.m {
        let sh = params.shift as i64 - a as i64 * t as i64;
        debug_assert!(sh >= 0);
        inputs.push(series_to_array(&cur.shift(sh), total));
        if a + 1 < params.m {
            cur = cur.mul(&w);
        }
    }
    inputs
}

/// Runs the dense solve for one prime: series preparation, reversion,
/// order basis, and extraction of the relation. With one qualifying row the
/// row is the relation; with several (degree-box slack at small T) their
/// bivariate gcd is, because the qualifying rows generate the bounded kernel
/// and every kernel element is a multiple of the minimal relation.
pub fn dense_relation_mod(
    fp: Fp,
    an: &[i64],
    params: &DenseParams,
) -> Result<DenseRelation> {
    let inputs = dense_inputs(fp, an, params);
    let basis = minimal_approximant_basis(fp, &inputs, params.total_order());
    let max_deg = params.deg_r1 as usize;
    let qualifying = basis.qualifying(max_deg);
    if qualifying.is_empty() {
        return Err(Error::NoRelation(format!(
            "no relation with slice degrees <= {max_deg} at order {} (level {}, T = {})",
            params.total_order(),
            params.level,
            params.t_exp
        )));
    }
    let mut relation: Option<ModBivar> = None;
    for &idx in &qualifying {
        let row = ModBivar::new(fp, basis.rows[idx].components.clone());
        relation = Some(match relation {
            None => row,
            Some(acc) => bivar_gcd_mod(&acc, &row),
        });
    }
    Ok(DenseRelation {
        relation: relation.expect("nonempty qualifying set").normalized(),
        kernel_dimension: basis.kernel_dimension(max_deg),
    })
}

/// Assembles the mod-p image of the critical polynomial from a dense
/// relation's constant slice.
pub fn assemble_critical_mod(
    rel: &ModBivar,
    params: &DenseParams,
) -> Result<ModPoly> {
    let fp = rel.field();
    let bx = params.deg_u as usize;
    if rel.deg_x() != Some(bx) {
        return Err(Error::Inconsistent(format!(
            "relation x-degree {:?} differs from deg(y) = {bx}",
            rel.deg_x()
        )));
    }
    let f0 = rel.slice_poly(0);
    let ftop = rel.slice_poly(bx);
    if f0.is_zero() {
        return Err(Error::Inconsistent("constant slice vanishes".into()));
    }
    // Every pole of x lies over y = 0, so the exact slice gcd is a pure
    // power of y (nontrivial when the form's zero divisor meets width-1
    // cusps); any other shared factor marks a degenerate prime.
    let shared = f0.gcd(&ftop);
    let shared_deg = shared.degree().unwrap_or(0);
    if shared.coeffs()[..shared_deg].iter().any(|&c| c != 0) {
        return Err(Error::Inconsistent(
            "constant and leading slices share a factor besides a power of y"
                .into(),
        ));
    }
    let d = params.deg_u as i64;
    let (nu2, nu3) = (params.nu2 as i64, params.nu3 as i64);
    debug_assert_eq!((d + nu2) % 2, 0);
    debug_assert_eq!((d + 2 * nu3) % 3, 0);
    let a_exp = ftop.degree().unwrap() as i64
        - params.t_exp as i64 * d
        - (d + 2 * nu3) / 3;
    let b_exp = -(d + nu2) / 2;
    let w0 = a_exp - f0.degree().unwrap() as i64;
    if w0 < 0 {
        return Err(Error::Inconsistent(format!(
            "assembly exponent A = {a_exp} below deg f_0 = {}",
            f0.degree().unwrap()
        )));
    }
    // G(x) = x^A·f_0(1/x): reversed coefficients padded by x^(A − deg f_0).
    let mut coeffs = vec![0u64; w0 as usize];
    coeffs.extend(f0.coeffs().iter().rev().copied());
    let mut g_poly = ModPoly::from_coeffs(fp, coeffs);
    let lin = ModPoly::from_coeffs(fp, vec![fp.reduce_i64(-1728), 1]);
    for _ in 0..b_exp.max(0) {
        g_poly = g_poly.mul(&lin);
    }
    for _ in 0..(-b_exp).max(0) {
        let (q, rem) = g_poly.divrem(&lin);
        if !rem.is_zero() {
            return Err(Error::Inconsistent(
                "assembly division by (x - 1728) leaves a remainder".into(),
            ));
        }
        g_poly = q;
    }
    let f = g_poly.monic();
    let deg_bound = 2 * params.genus as i64 - 2;
    if f.degree().unwrap_or(0) as i64 > deg_bound.max(0) {
        return Err(Error::Inconsistent(format!(
            "critical polynomial degree {} exceeds 2g-2 = {deg_bound}",
            f.degree().unwrap_or(0)
        )));
    }
    Ok(f)
}
