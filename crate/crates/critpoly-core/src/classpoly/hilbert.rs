//! Hilbert class polynomials by high-precision evaluation of j.
//!
//! H_d(x) = ∏ (x − j(τ_form)) over the reduced primitive forms (a, b, c) of
//! discriminant d, with τ = (−b + √d)/(2a). Each singular modulus is
//! evaluated through the integral q-expansion of j at q = e^{2πiτ}, whose
//! modulus e^{−π√|d|/a} ≤ e^{−π√3} makes the series converge geometrically;
//! the truncation length is chosen so the tail (coefficients of j grow
//! slower than e^{4π√n}) sits below the target accuracy. Forms with ±b give
//! complex-conjugate roots and are folded into one real quadratic factor,
//! ambiguous forms give real roots, so the product has real coefficients
//! throughout. The working precision starts at
//! π√|d|·Σ(1/a)/ln 2 + 32·h(d) + 64 bits; after the product is expanded,
//! every coefficient must round to an integer with distance below 1/4, and
//! otherwise the whole computation retries at doubled precision up to a
//! configurable ceiling. The result is monic with integer coefficients and
//! deterministic for a given discriminant.

use std::f64::consts::{LN_2, PI};
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::classpoly::bigfloat::{BigComplex, BigFloat};
use crate::classpoly::forms::{reduced_forms, ReducedForm};
use crate::error::{Error, Result};
use crate::qseries::j_exact;

/// Precision ceiling and evaluation parallelism for one computation.
#[derive(Clone, Debug)]
pub struct HilbertConfig {
    /// Hard cap on the working precision before giving up.
    pub max_bits: u32,
    /// Extra bits added to the starting precision estimate.
    pub extra_bits: u32,
    /// Worker threads for the per-form evaluations (1 = sequential).
    pub threads: usize,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        HilbertConfig {
            max_bits: 1_000_000,
            extra_bits: 0,
            threads: 1,
        }
    }
}

/// The Hilbert class polynomial H_d, ascending integer coefficients, monic
/// of degree h(d).
pub fn hilbert_class_poly(d: i64) -> Result<Vec<BigInt>> {
    hilbert_class_poly_with(d, &HilbertConfig::default())
}

/// H_d under explicit precision and threading control.
pub fn hilbert_class_poly_with(
    d: i64,
    config: &HilbertConfig,
) -> Result<Vec<BigInt>> {
    let forms = reduced_forms(d)?;
    let mut bits = starting_bits(d, &forms) + config.extra_bits;
    loop {
        if bits > config.max_bits {
            return Err(Error::Precision(format!(
                "class polynomial for discriminant {d} needs more than {} bits",
                config.max_bits
            )));
        }
        if let Some(coeffs) = attempt(d, &forms, bits, config.threads) {
            return Ok(coeffs);
        }
        bits = bits.saturating_mul(2);
    }
}

/// π√|d|·Σ(1/a)/ln 2 + 32h + 64, the height bound on the coefficients plus
/// rounding slack. Floating point is fine here: this only seeds the retry
/// loop, which validates exactly.
fn starting_bits(d: i64, forms: &[ReducedForm]) -> u32 {
    let sum_inv_a: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let bits = PI * (d.unsigned_abs() as f64).sqrt() * sum_inv_a / LN_2
        + 32.0 * forms.len() as f64
        + 64.0;
    bits.ceil() as u32
}

/// Smallest series length whose tail lies below 2^−(bits+32) for the
/// slowest-converging form (largest a): the n-th coefficient of j is under
/// e^{4π√n} and |q|^n = e^{−nπ√|d|/a}.
fn terms_needed(bits: u32, d: i64, a_max: u64) -> usize {
    let y = (d.unsigned_abs() as f64).sqrt() / a_max as f64; // ≥ √3
    let target = -((bits as f64 + 32.0) * LN_2);
    let mut n = 1usize;
    loop {
        let log_term = 4.0 * PI * (n as f64).sqrt() - (n as f64) * PI * y;
        if log_term < target && (n as f64) * y * y > 16.0 {
            return n + 8;
        }
        n += 1;
    }
}

/// Integer coefficients of j for exponents −1, 0, …, len−2 (so `len`
/// entries), memoized across calls since extraction scans recompute them
/// for every candidate discriminant.
fn j_coefficients(len: usize) -> Vec<BigInt> {
    static TABLE: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());
    let mut table = TABLE.lock().unwrap();
    if table.len() < len {
        let series = j_exact(len as i64);
        debug_assert_eq!(series.val(), -1);
        *table = series
            .coeffs()
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer());
                c.to_integer()
            })
            .collect();
    }
    table[..len].to_vec()
}

/// j(τ) for the form's CM point, where jc[k] is the coefficient of q^(k−1).
fn j_at_form(
    form: &ReducedForm,
    jc: &[BigInt],
    pi: &BigFloat,
    sqrt_abs_d: &BigFloat,
    prec: u32,
) -> BigComplex {
    // q = e^{2πiτ} = e^{−π√|d|/a}·e^{−iπb/a}.
    let a = form.a;
    let decay = pi.mul(sqrt_abs_d).div(&BigFloat::from_u64(a, prec));
    let radius = BigFloat::exp(&decay.neg());
    let theta = pi.mul(&BigFloat::from_ratio(form.b, a as i64, prec));
    let (sin, cos) = BigFloat::sincos(&theta);
    let q = BigComplex::new(radius.mul(&cos), radius.mul(&sin).neg());
    // Horner on the regular part, then the polar term jc[0]/q.
    let mut acc = BigComplex::zero(prec);
    for c in jc.iter().skip(1).rev() {
        acc = acc.mul(&q).add_real(&BigFloat::from_bigint(c, prec));
    }
    let lead = q.inv();
    BigComplex::new(
        acc.re.add(&lead.re.mul(&BigFloat::from_bigint(&jc[0], prec))),
        acc.im.add(&lead.im.mul(&BigFloat::from_bigint(&jc[0], prec))),
    )
}

/// A real factor of the class polynomial: x − r, or x² − tr·x + nm for a
/// conjugate pair of roots.
enum Factor {
    Linear(BigFloat),
    Quadratic(BigFloat, BigFloat),
}

fn factor_for_form(
    form: &ReducedForm,
    jc: &[BigInt],
    pi: &BigFloat,
    sqrt_abs_d: &BigFloat,
    prec: u32,
) -> Factor {
    let j = j_at_form(form, jc, pi, sqrt_abs_d, prec);
    if form.is_ambiguous() {
        Factor::Linear(j.re)
    } else {
        Factor::Quadratic(j.re.shl(1), j.norm_sqr())
    }
}

fn attempt(
    d: i64,
    forms: &[ReducedForm],
    bits: u32,
    threads: usize,
) -> Option<Vec<BigInt>> {
    let prec = bits + 64;
    let pi = BigFloat::pi(prec);
    let sqrt_abs_d =
        BigFloat::from_i64(d.checked_abs().unwrap(), prec).sqrt();
    let a_max = forms.iter().map(|f| f.a).max().unwrap_or(1);
    let jc = j_coefficients(terms_needed(bits, d, a_max) + 1);

    // Forms with b < 0 are the conjugates of their b > 0 partners and are
    // folded into that partner's quadratic factor.
    let jobs: Vec<&ReducedForm> = forms
        .iter()
        .filter(|f| f.is_ambiguous() || f.b > 0)
        .collect();
    let eval = |f: &&ReducedForm| factor_for_form(f, &jc, &pi, &sqrt_abs_d, prec);
    let factors: Vec<Factor> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| jobs.par_iter().map(eval).collect())
    } else {
        jobs.iter().map(eval).collect()
    };

    // Expand the product over ascending coefficients; the lead stays an
    // exact 1 because every factor is monic.
    let mut poly = vec![BigFloat::one(prec)];
    for factor in &factors {
        match factor {
            Factor::Linear(r) => {
                let mut next = vec![BigFloat::zero(prec); poly.len() + 1];
                for (i, c) in poly.iter().enumerate() {
                    next[i + 1] = next[i + 1].add(c);
                    next[i] = next[i].sub(&r.mul(c));
                }
                poly = next;
            }
            Factor::Quadratic(tr, nm) => {
                let mut next = vec![BigFloat::zero(prec); poly.len() + 2];
                for (i, c) in poly.iter().enumerate() {
                    next[i + 2] = next[i + 2].add(c);
                    next[i + 1] = next[i + 1].sub(&tr.mul(c));
                    next[i] = next[i].add(&nm.mul(c));
                }
                poly = next;
            }
        }
    }
    debug_assert_eq!(poly.len(), forms.len() + 1);

    let mut out = Vec::with_capacity(poly.len());
    for c in &poly {
        let (n, ok) = c.round_to_integer();
        if !ok {
            return None;
        }
        out.push(n);
    }
    debug_assert!(out.last().map(BigInt::is_one).unwrap_or(false));
    Some(out)
}

/// Reads H_d from `<root>/hilbert/<d>.txt` or computes and stores it. The
/// file holds "d degree" on the first line, then the coefficients in
/// decimal, constant term first; an unreadable or inconsistent file is
/// treated as a miss and rewritten.
pub fn hilbert_class_poly_cached(
    d: i64,
    cache_root: &Path,
    config: &HilbertConfig,
) -> Result<Vec<BigInt>> {
    let dir = cache_root.join("hilbert");
    let path = dir.join(format!("{d}.txt"));
    if let Some(coeffs) = read_cache_file(&path, d) {
        return Ok(coeffs);
    }
    let coeffs = hilbert_class_poly_with(d, config)?;
    fs::create_dir_all(&dir)?;
    let mut text = format!("{d} {}\n", coeffs.len() - 1);
    for c in &coeffs {
        text.push_str(&c.to_string());
        text.push('\n');
    }
    let tmp = dir.join(format!(".{d}.txt.{}", std::process::id()));
    fs::write(&tmp, text)?;
    fs::rename(&tmp, &path)?;
    Ok(coeffs)
}

fn read_cache_file(path: &Path, d: i64) -> Option<Vec<BigInt>> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    let mut header = lines.next()?.split_whitespace();
    let file_d = i64::from_str(header.next()?).ok()?;
    let degree = usize::from_str(header.next()?).ok()?;
    if file_d != d || header.next().is_some() {
        return None;
    }
    let coeffs: Vec<BigInt> = lines
        .map_while(|line| BigInt::from_str(line.trim()).ok())
        .collect();
    if coeffs.len() != degree + 1 || !coeffs.last()?.is_one() {
        return None;
    }
    Some(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classpoly::forms::class_number;

    fn poly(coeffs: &[i128]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn single_class_values_match_the_classical_table() {
        // x − j for the thirteen one-class discriminants.
        let table: [(i64, i128); 13] = [
            (-3, 0),
            (-4, 1728),
            (-7, -3375),
            (-8, 8000),
            (-11, -32768),
            (-12, 54000),
            (-16, 287496),
            (-19, -884736),
            (-27, -12288000),
            (-28, 16581375),
            (-43, -884736000),
            (-67, -147197952000),
            (-163, -262537412640768000),
        ];
        for (d, j) in table {
            assert_eq!(
                hilbert_class_poly(d).unwrap(),
                poly(&[-j, 1]),
                "d = {d}"
            );
        }
    }

    #[test]
    fn higher_class_polynomials_match_published_values() {
        assert_eq!(
            hilbert_class_poly(-15).unwrap(),
            poly(&[-121287375, 191025, 1])
        );
        assert_eq!(
            hilbert_class_poly(-20).unwrap(),
            poly(&[-681472000, -1264000, 1])
        );
        assert_eq!(
            hilbert_class_poly(-32).unwrap(),
            poly(&[12167000000, -52250000, 1])
        );
        assert_eq!(
            hilbert_class_poly(-23).unwrap(),
            poly(&[12771880859375, -5151296875, 3491750, 1])
        );
    }

    #[test]
    fn degree_is_the_class_number_and_precision_is_stable() {
        for d in [-39, -47, -148, -356] {
            let h = hilbert_class_poly(d).unwrap();
            assert_eq!(h.len() - 1, class_number(d).unwrap(), "d = {d}");
            assert!(h.last().unwrap().is_one());
            // Doubling the working precision reproduces every coefficient.
            let base = starting_bits(d, &reduced_forms(d).unwrap());
            let doubled = hilbert_class_poly_with(
                d,
                &HilbertConfig {
                    extra_bits: base,
                    ..HilbertConfig::default()
                },
            )
            .unwrap();
            assert_eq!(h, doubled, "d = {d}");
        }
    }

    #[test]
    fn threaded_evaluation_matches_sequential() {
        let seq = hilbert_class_poly(-231).unwrap();
        let par = hilbert_class_poly_with(
            -231,
            &HilbertConfig {
                threads: 3,
                ..HilbertConfig::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn each_root_approximation_has_a_tiny_residual() {
        let d = -23;
        let coeffs = hilbert_class_poly(d).unwrap();
        let forms = reduced_forms(d).unwrap();
        let bits = starting_bits(d, &forms);
        let prec = bits + 64;
        let pi = BigFloat::pi(prec);
        let sqrt_abs_d = BigFloat::from_i64(-d, prec).sqrt();
        let a_max = forms.iter().map(|f| f.a).max().unwrap();
        let jc = j_coefficients(terms_needed(bits, d, a_max) + 1);
        for form in &forms {
            let root = j_at_form(&form, &jc, &pi, &sqrt_abs_d, prec);
            let mut val = BigComplex::zero(prec);
            for c in coeffs.iter().rev() {
                val = val.mul(&root).add_real(&BigFloat::from_bigint(c, prec));
            }
            let top = val
                .norm_sqr()
                .log2_magnitude()
                .unwrap_or(i64::MIN / 4);
            assert!(top / 2 < -32, "residual 2^{} at {form:?}", top / 2);
        }
    }

    #[test]
    fn precision_ceiling_is_enforced() {
        let err = hilbert_class_poly_with(
            -148,
            &HilbertConfig {
                max_bits: 16,
                ..HilbertConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precision(_)));
    }

    #[test]
    fn cache_roundtrips_and_heals_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = HilbertConfig::default();
        let first =
            hilbert_class_poly_cached(-15, dir.path(), &cfg).unwrap();
        let path = dir.path().join("hilbert/-15.txt");
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("-15 2\n"));
        assert_eq!(text.lines().count(), 4);
        let again = hilbert_class_poly_cached(-15, dir.path(), &cfg).unwrap();
        assert_eq!(first, again);
        fs::write(&path, "garbage\n").unwrap();
        let healed = hilbert_class_poly_cached(-15, dir.path(), &cfg).unwrap();
        assert_eq!(first, healed);
        assert!(fs::read_to_string(&path).unwrap().starts_with("-15 2\n"));
    }
}
