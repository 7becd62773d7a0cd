//! Factoring a critical polynomial and deciding the rank-zero criterion.
//!
//! The critical polynomial F of an optimal curve E encodes the non-cuspidal
//! critical points of the modular parametrization φ: X₀(N) → E.  When the
//! analytic rank satisfies r_an(E) ≥ 2, traces of generalized Heegner points
//! are torsion, and the critical subgroup E_crit(Q) has rank zero provided F
//! is well understood in one of two ways:
//!
//!   1. F is irreducible over Q (for any non-constant modular function), or
//!   2. (for the j-line polynomial) F = ∏ H_{D_k}^{s_k} · F₀ where the H_{D_k}
//!      are Hilbert class polynomials of pairwise distinct imaginary quadratic
//!      fields (pairwise distinct squarefree parts of the D_k) and the non-CM
//!      cofactor F₀ is irreducible.
//!
//! The hypothesis r_an(E) ≥ 2 is a trusted input, never recomputed here, and
//! it gates every proved verdict: for r_an ≤ 1 a Heegner point of infinite
//! order may sit among the critical points, so nothing is claimed.  A
//! constant F is the degenerate case — every critical point is a cusp — and
//! is reported under the same gate with nothing left to factor.
//!
//! `extract_cm_factors` computes the (unique) decomposition F = ∏ H_{D_k}^{s_k}·F₀
//! by trial division against class polynomials of discriminant |d| ≤ D_max,
//! `certify_irreducible` proves irreducibility of F₀ from factorizations
//! modulo good primes, and `decide` combines both with the curve's analytic
//! rank into an auditable verdict.  Irreducibility certification is one-sided:
//! `Irreducible` and `Reducible` are proofs, `Inconclusive` is an honest
//! "could not certify" and never an error.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{Fp, ModPoly, PrimePool, QPoly};
use crate::classpoly::{class_number, hilbert_class_poly};
use crate::error::{Error, Result};
use crate::newform::CurveData;
use crate::pipeline::CriticalPolynomial;

/// Number of good primes consulted before irreducibility certification gives up.
pub const DEFAULT_PRIME_BUDGET: usize = 40;

/// Largest CM scan bound accepted by `extract_cm_factors`; class polynomials
/// beyond this are out of reach of the floating-point evaluation anyway.
const MAX_SCAN_BOUND: u64 = 1_000_000;

/// Outcome of the irreducibility certificate for the non-CM cofactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CofactorStatus {
    /// Proved irreducible over Q (or constant, where the condition is vacuous).
    Irreducible,
    /// Proved reducible over Q (rational root, repeated factor, ...).
    Reducible,
    /// Neither proof was found within the prime budget.
    Inconclusive,
}

impl CofactorStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CofactorStatus::Irreducible => "irreducible",
            CofactorStatus::Reducible => "reducible",
            CofactorStatus::Inconclusive => "inconclusive",
        }
    }
}

/// The decomposition F = ∏ H_{D_k}^{s_k} · F₀ of a monic integer polynomial
/// into Hilbert class polynomial factors and a non-CM cofactor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    /// (discriminant, exponent) pairs with strictly decreasing discriminants
    /// (scanned in order of increasing |d|); exponents are maximal.
    pub hilbert: Vec<(i64, u32)>,
    /// Monic cofactor F₀, ascending integer coefficients, no CM factor with
    /// |d| ≤ `scan_bound`.
    pub cofactor: Vec<BigInt>,
    /// Irreducibility status of the cofactor.
    pub cofactor_status: CofactorStatus,
    /// The bound |d| ≤ D_max that was scanned, recorded so a missed class
    /// polynomial beyond it is auditable.
    pub scan_bound: u64,
}

/// Identifier of the decision rule in the stable report vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictRule {
    /// r_an ≥ 2 and F irreducible.
    CondIrreducible,
    /// r_an ≥ 2, pairwise distinct CM fields, irreducible cofactor.
    CondCmPlusIrreducible,
    /// r_an ≥ 2 and F constant: every critical point is a cusp.
    CuspDegenerate,
}

impl VerdictRule {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictRule::CondIrreducible => "thm1-cond-irreducible",
            VerdictRule::CondCmPlusIrreducible => "thm1-cond-cm-plus-irreducible",
            VerdictRule::CuspDegenerate => "cusp-degenerate",
        }
    }
}

/// Verdict on whether rank E_crit(Q) = 0 has been established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub proved: bool,
    /// The rule that fired, when `proved`.
    pub rule: Option<VerdictRule>,
    /// Human-readable justification, or the list of blocking reasons.
    pub explanation: String,
}

fn poly_degree(coeffs: &[BigInt]) -> usize {
    coeffs.len().saturating_sub(1)
}

fn is_monic(coeffs: &[BigInt]) -> bool {
    coeffs.last().map(BigInt::is_one).unwrap_or(false)
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact quotient by a monic divisor, or `None` if the division leaves a
/// remainder.  Synthetic division over Z; no rationals appear.
fn div_exact_monic(num: &[BigInt], div: &[BigInt]) -> Option<Vec<BigInt>> {
    debug_assert!(is_monic(div));
    let dn = poly_degree(num);
    let dd = poly_degree(div);
    if dd > dn {
        return None;
    }
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let lead = std::mem::take(&mut rem[k + dd]);
        if lead.is_zero() {
            continue;
        }
        for (i, di) in div.iter().enumerate().take(dd) {
            rem[k + i] -= &lead * di;
        }
        quot[k] = lead;
    }
    if rem.iter().all(Zero::is_zero) {
        Some(quot)
    } else {
        None
    }
}

/// Process-wide memo for class polynomials: the CM scan asks for the same
/// small discriminants over and over across curves.
fn hilbert_memo(d: i64) -> Result<Vec<BigInt>> {
    static MEMO: Mutex<BTreeMap<i64, Vec<BigInt>>> = Mutex::new(BTreeMap::new());
    if let Some(h) = MEMO.lock().unwrap().get(&d) {
        return Ok(h.clone());
    }
    let h = hilbert_class_poly(d)?;
    MEMO.lock().unwrap().insert(d, h.clone());
    Ok(h)
}

/// Decompose a monic integer polynomial as F = ∏ H_{D_k}^{s_k} · F₀ with the
/// discriminant scan bounded by |d| ≤ `d_max`, and certify the cofactor.
///
/// Discriminants d ≡ 0, 1 (mod 4), d < 0 are scanned in order of increasing
/// |d|; for each, the class number prunes candidates too large to divide, a
/// single word-size prime pre-filters divisibility (H_d is monic, so H_d | F
/// over Z forces H_d | F mod p), and exact division determines the maximal
/// exponent.  The re-multiplied product is checked against the input before
/// returning.
pub fn extract_cm_factors(f: &[BigInt], d_max: u64) -> Result<Factorization> {
    if f.is_empty() || !is_monic(f) {
        return Err(Error::BadInput(
            "CM extraction expects a monic integer polynomial".into(),
        ));
    }
    if d_max > MAX_SCAN_BOUND {
        return Err(Error::Unsupported(format!(
            "CM scan bound {d_max} exceeds the supported maximum {MAX_SCAN_BOUND}"
        )));
    }
    let filter_fp = Fp::new(PrimePool::new().next().expect("prime pool is infinite"));
    let mut cofactor = f.to_vec();
    let mut hilbert = Vec::new();
    for abs_d in 3..=d_max {
        // Negative discriminants are ≡ 0, 1 (mod 4), i.e. |d| ≡ 0, 3 (mod 4).
        if abs_d % 4 != 0 && abs_d % 4 != 3 {
            continue;
        }
        let remaining = poly_degree(&cofactor);
        if remaining == 0 {
            break;
        }
        let d = -(abs_d as i64);
        let h = class_number(d)?;
        if h > remaining {
            continue;
        }
        let hd = hilbert_memo(d)?;
        let cof_bar = ModPoly::from_bigint_coeffs(filter_fp, &cofactor);
        let hd_bar = ModPoly::from_bigint_coeffs(filter_fp, &hd);
        if !cof_bar.rem(&hd_bar).is_zero() {
            continue;
        }
        let mut exponent = 0u32;
        while let Some(quotient) = div_exact_monic(&cofactor, &hd) {
            cofactor = quotient;
            exponent += 1;
        }
        if exponent > 0 {
            hilbert.push((d, exponent));
        }
    }

    // Re-multiply and compare: the decomposition must reproduce the input.
    let mut product = cofactor.clone();
    for &(d, exponent) in &hilbert {
        let hd = hilbert_memo(d)?;
        for _ in 0..exponent {
            product = poly_mul(&product, &hd);
        }
    }
    if product != f {
        return Err(Error::Inconsistent(
            "CM extraction failed to re-multiply to its input".into(),
        ));
    }

    let cofactor_status = if poly_degree(&cofactor) == 0 {
        // Constant cofactor: the irreducibility condition is vacuous.
        CofactorStatus::Irreducible
    } else {
        certify_irreducible(&cofactor, DEFAULT_PRIME_BUDGET)
    };
    Ok(Factorization {
        hilbert,
        cofactor,
        cofactor_status,
        scan_bound: d_max,
    })
}

/// Degrees realizable as subset sums of `degs` (0/1 knapsack: each modular
/// factor is used at most once).
fn achievable_degrees(degs: &[usize], n: usize) -> Vec<bool> {
    let mut dp = vec![false; n + 1];
    dp[0] = true;
    for &d in degs {
        for s in (d..=n).rev() {
            if dp[s - d] {
                dp[s] = true;
            }
        }
    }
    dp
}

/// Search for an integer root of small magnitude (a divisor of the constant
/// term with |r| ≤ 64).  Purely a cheap reducibility witness; missing a large
/// root only costs a `Reducible` downgrade to `Inconclusive`, never soundness.
fn has_small_integer_root(f: &[BigInt]) -> bool {
    let constant = &f[0];
    debug_assert!(!constant.is_zero());
    for r in 1..=64i64 {
        if !(constant % BigInt::from(r)).is_zero() {
            continue;
        }
        for root in [BigInt::from(r), BigInt::from(-r)] {
            let mut value = BigInt::zero();
            for c in f.iter().rev() {
                value = value * &root + c;
            }
            if value.is_zero() {
                return true;
            }
        }
    }
    false
}

/// One-sided irreducibility certificate over Q for a monic integer polynomial.
///
/// Proof paths, in order:
///  - degree ≤ 1 is irreducible (degree 0 vacuously);
///  - a vanishing constant term or a small integer root proves `Reducible`;
///  - a prime p not dividing disc(f) ("good": f mod p squarefree of full
///    degree) with f irreducible mod p proves `Irreducible`;
///  - a rational factor of degree k reduces mod every good p to a subproduct
///    of the modular factors with degrees summing to k, so if the
///    intersection over good primes of the achievable proper subset sums is
///    empty, f is irreducible;
///  - if no scanned prime is good, an exact gcd(f, f′) test can still prove a
///    repeated factor, hence `Reducible`.
///
/// After `prime_budget` good primes (scanning at most 8× that many in total)
/// the result is `Inconclusive` — an honest answer, not an error.  On
/// composite input this function never returns `Irreducible`.
pub fn certify_irreducible(f0: &[BigInt], prime_budget: usize) -> CofactorStatus {
    debug_assert!(is_monic(f0));
    let n = poly_degree(f0);
    if n <= 1 {
        return CofactorStatus::Irreducible;
    }
    if f0[0].is_zero() {
        return CofactorStatus::Reducible; // x divides
    }
    if has_small_integer_root(f0) {
        return CofactorStatus::Reducible;
    }

    let mut pool = PrimePool::new();
    let mut intersection: Option<Vec<bool>> = None;
    let mut good = 0usize;
    let mut scanned = 0usize;
    let mut saw_squarefree_image = false;
    while good < prime_budget && scanned < prime_budget.saturating_mul(8) {
        let p = pool.next().expect("prime pool is infinite");
        scanned += 1;
        let fp = Fp::new(p);
        let f_bar = ModPoly::from_bigint_coeffs(fp, f0);
        debug_assert_eq!(f_bar.degree(), Some(n)); // monic ⇒ degree survives
        if f_bar.gcd(&f_bar.derivative()).degree() != Some(0) {
            continue; // p divides disc(f): factor degrees are unreliable
        }
        saw_squarefree_image = true;
        good += 1;
        let factors = f_bar.factor();
        if factors.len() == 1 {
            return CofactorStatus::Irreducible;
        }
        let degs: Vec<usize> = factors
            .iter()
            .map(|(g, _)| g.degree().expect("factors are nonzero"))
            .collect();
        let achievable = achievable_degrees(&degs, n);
        let merged = match intersection.take() {
            None => achievable,
            Some(prev) => prev
                .iter()
                .zip(achievable.iter())
                .map(|(&a, &b)| a && b)
                .collect(),
        };
        if (1..n).all(|k| !merged[k]) {
            return CofactorStatus::Irreducible;
        }
        intersection = Some(merged);
    }

    if !saw_squarefree_image {
        // Every scanned prime divided the discriminant; settle squarefreeness
        // exactly.  A repeated factor over Q proves reducibility.
        let fq = QPoly::from_bigint_coeffs(f0.to_vec());
        if fq.gcd(&fq.derivative()).degree().unwrap_or(0) > 0 {
            return CofactorStatus::Reducible;
        }
    }
    CofactorStatus::Inconclusive
}

/// Squarefree part of a positive integer by trial division.
fn squarefree_part(n: u64) -> u64 {
    debug_assert!(n > 0);
    let mut m = n;
    let mut part = 1u64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut exponent = 0u32;
            while m % p == 0 {
                m /= p;
                exponent += 1;
            }
            if exponent % 2 == 1 {
                part *= p;
            }
        }
        p += 1;
    }
    part * m
}

/// Upper bound on the number of Galois orbits of non-cuspidal critical
/// points: one per distinct class-polynomial factor plus one for a
/// nonconstant cofactor.
pub fn orbit_bound(factorization: &Factorization) -> usize {
    let cofactor_orbits = usize::from(poly_degree(&factorization.cofactor) > 0);
    factorization.hilbert.len() + cofactor_orbits
}

/// Combine the curve's analytic rank, the critical polynomial, and its CM
/// decomposition into a verdict on rank E_crit(Q) = 0.
///
/// `proved` requires the hypothesis r_an(E) ≥ 2 and one of: F constant
/// (every critical point a cusp); F irreducible; or — for the j-line
/// polynomial — pairwise distinct squarefree parts among the
/// class-polynomial discriminants and an irreducible (or constant) cofactor.
/// Anything else lists its blocking reasons and stays unproved; more
/// evidence can only flip it towards `proved`, never away.
pub fn decide(
    curve: &CurveData,
    critical: &CriticalPolynomial,
    factorization: &Factorization,
) -> Verdict {
    let mut reasons = Vec::new();
    let rank_ok = curve.analytic_rank >= 2;
    if !rank_ok {
        reasons.push(format!(
            "analytic rank is {}, so the hypothesis r_an(E) ≥ 2 of the rank-zero \
             criterion is not met",
            curve.analytic_rank
        ));
    }

    if critical.degree() == 0 {
        if rank_ok {
            return Verdict {
                proved: true,
                rule: Some(VerdictRule::CuspDegenerate),
                explanation: "analytic rank ≥ 2; the critical polynomial is constant: \
                              every critical point of the modular parametrization is a \
                              cusp, and cuspidal divisors map into the torsion subgroup"
                    .into(),
            };
        }
        reasons.push(
            "the critical polynomial is constant (cusp-degenerate), but the \
             analytic-rank hypothesis gates the conclusion"
                .into(),
        );
        return Verdict {
            proved: false,
            rule: None,
            explanation: reasons.join("; "),
        };
    }

    if critical.function_tag == "j" {
        let parts: Vec<u64> = factorization
            .hilbert
            .iter()
            .map(|&(d, _)| squarefree_part(d.unsigned_abs()))
            .collect();
        let mut sorted = parts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let fields_distinct = sorted.len() == parts.len();
        if !fields_distinct {
            reasons.push(format!(
                "class-polynomial discriminants {:?} do not generate pairwise distinct \
                 imaginary quadratic fields",
                factorization
                    .hilbert
                    .iter()
                    .map(|&(d, _)| d)
                    .collect::<Vec<_>>()
            ));
        }
        let cofactor_ok = poly_degree(&factorization.cofactor) == 0
            || factorization.cofactor_status == CofactorStatus::Irreducible;
        if !cofactor_ok {
            reasons.push(format!(
                "the degree-{} non-CM cofactor is {} (scan bound |d| ≤ {})",
                poly_degree(&factorization.cofactor),
                factorization.cofactor_status.as_str(),
                factorization.scan_bound
            ));
        }
        if rank_ok && fields_distinct && cofactor_ok {
            return Verdict {
                proved: true,
                rule: Some(VerdictRule::CondCmPlusIrreducible),
                explanation: format!(
                    "analytic rank ≥ 2; the class-polynomial factors generate pairwise \
                     distinct imaginary quadratic fields and the cofactor is \
                     irreducible (CM scan bound |d| ≤ {})",
                    factorization.scan_bound
                ),
            };
        }
    } else {
        // For the pole-cancellation polynomial the criterion is plain
        // irreducibility of F itself: either nothing CM split off and the
        // cofactor (= F) is certified, or F is a single class polynomial.
        let f_irreducible = match (factorization.hilbert.as_slice(), poly_degree(&factorization.cofactor)) {
            ([], _) => factorization.cofactor_status == CofactorStatus::Irreducible,
            ([(_, 1)], 0) => true, // one class polynomial, multiplicity one
            _ => false,
        };
        if rank_ok && f_irreducible {
            return Verdict {
                proved: true,
                rule: Some(VerdictRule::CondIrreducible),
                explanation: "analytic rank ≥ 2 and the critical polynomial is \
                              irreducible over Q"
                    .into(),
            };
        }
        if !f_irreducible {
            reasons.push(format!(
                "the critical polynomial is not certified irreducible \
                 (CM factors: {:?}, cofactor status: {})",
                factorization.hilbert,
                factorization.cofactor_status.as_str()
            ));
        }
    }

    Verdict {
        proved: false,
        rule: None,
        explanation: reasons.join("; "),
    }
}
