//! Classical q-expansions: the Euler product, the discriminant form, the
//! weight-4 Eisenstein series, the j-invariant and its reciprocal, and
//! weight-2 forms assembled from coefficient lists.
//!
//! Every constructor takes an absolute precision `prec` and returns a series
//! known modulo `q^prec`; internal intermediates carry enough margin that the
//! stated precision is honest.

use super::laurent::QSeries;
use super::modseries::ModSeries;
use crate::arith::fp64::Fp;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Signed pentagonal-number expansion of `prod_{n>=1} (1 - q^n)`:
/// coefficient c_k of q^k for k < len.
fn euler_coeffs_i64(len: usize) -> Vec<i64> {
    let mut c = vec![0i64; len];
    if len > 0 {
        c[0] = 1;
    }
    let mut k = 1i64;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        if e1 as usize >= len && e2 as usize >= len {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        if (e1 as usize) < len {
            c[e1 as usize] += sign;
        }
        if (e2 as usize) < len {
            c[e2 as usize] += sign;
        }
        k += 1;
    }
    c
}

/// Divisor-cube sums sigma_3(1..len-1); sigma_3(0) slot is unused (zero).
fn sigma3_u64(len: usize) -> Vec<u64> {
    let mut s = vec![0u64; len];
    for d in 1..len {
        let d3 = (d as u64) * (d as u64) * (d as u64);
        let mut m = d;
        while m < len {
            s[m] += d3;
            m += d;
        }
    }
    s
}

/// `prod (1 - q^n)` over Q, known modulo `q^prec`.
pub fn euler_product_exact(prec: i64) -> QSeries {
    assert!(prec > 0);
    QSeries::new(
        0,
        euler_coeffs_i64(prec as usize)
            .into_iter()
            .map(|c| BigRational::from(BigInt::from(c)))
            .collect(),
    )
}

/// `prod (1 - q^n)` over F_p, known modulo `q^prec`.
pub fn euler_product_mod(fp: Fp, prec: i64) -> ModSeries {
    assert!(prec > 0);
    ModSeries::from_reduced(
        fp,
        0,
        euler_coeffs_i64(prec as usize)
            .into_iter()
            .map(|c| fp.reduce_i64(c))
            .collect(),
    )
}

/// The discriminant form `q prod (1 - q^n)^24` (valuation 1), mod `q^prec`.
pub fn delta_exact(prec: i64) -> QSeries {
    let e = euler_product_exact(prec); // relative terms carry through powers
    let e2 = e.mul(&e);
    let e4 = e2.mul(&e2);
    let e8 = e4.mul(&e4);
    let e16 = e8.mul(&e8);
    e16.mul(&e8).shift(1).truncate_to(prec)
}

/// Mod-p discriminant form, valuation 1, known modulo `q^prec`.
pub fn delta_mod(fp: Fp, prec: i64) -> ModSeries {
    let e = euler_product_mod(fp, prec);
    let e2 = e.mul(&e);
    let e4 = e2.mul(&e2);
    let e8 = e4.mul(&e4);
    let e16 = e8.mul(&e8);
    e16.mul(&e8).shift(1).truncate_to(prec)
}

/// Weight-4 Eisenstein series `1 + 240 sum sigma_3(n) q^n`, mod `q^prec`.
pub fn eisenstein4_exact(prec: i64) -> QSeries {
    assert!(prec > 0);
    let sig = sigma3_u64(prec as usize);
    let mut coeffs = vec![BigRational::zero(); prec as usize];
    coeffs[0] = BigRational::from(BigInt::from(1));
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = BigRational::from(BigInt::from(240u64) * BigInt::from(sig[n]));
    }
    QSeries::new(0, coeffs)
}

pub fn eisenstein4_mod(fp: Fp, prec: i64) -> ModSeries {
    assert!(prec > 0);
    let sig = sigma3_u64(prec as usize);
    let mut coeffs = vec![0u64; prec as usize];
    coeffs[0] = 1;
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = fp.reduce_u128(240u128 * sig[n] as u128);
    }
    ModSeries::from_reduced(fp, 0, coeffs)
}

/// The modular j-invariant `E4^3 / Delta` (valuation -1), known mod `q^prec`.
pub fn j_exact(prec: i64) -> QSeries {
    let margin = prec + 2;
    let e4 = eisenstein4_exact(margin);
    let e4_cubed = e4.mul(&e4).mul(&e4);
    e4_cubed.mul(&delta_exact(margin).inv()).truncate_to(prec)
}

pub fn j_mod(fp: Fp, prec: i64) -> ModSeries {
    let margin = prec + 2;
    let e4 = eisenstein4_mod(fp, margin);
    let e4_cubed = e4.mul(&e4).mul(&e4);
    e4_cubed.mul(&delta_mod(fp, margin).inv()).truncate_to(prec)
}

/// `1/j = Delta / E4^3` (valuation +1), known mod `q^prec`.
pub fn j_reciprocal_exact(prec: i64) -> QSeries {
    let margin = prec + 2;
    let e4 = eisenstein4_exact(margin);
    let e4_cubed = e4.mul(&e4).mul(&e4);
    delta_exact(margin).mul(&e4_cubed.inv()).truncate_to(prec)
}

pub fn j_reciprocal_mod(fp: Fp, prec: i64) -> ModSeries {
    let margin = prec + 2;
    let e4 = eisenstein4_mod(fp, margin);
    let e4_cubed = e4.mul(&e4).mul(&e4);
    delta_mod(fp, margin).mul(&e4_cubed.inv()).truncate_to(prec)
}

/// Weight-2 cusp form `sum_{n>=1} a_n q^n` from 1-indexed coefficients
/// (`an[n]` is the n-th coefficient; `an[0]` is ignored), known mod `q^prec`.
pub fn form_from_an_exact(an: &[i64], prec: i64) -> QSeries {
    assert!(an.len() as i64 > prec - 1, "not enough coefficients");
    let coeffs = (1..prec)
        .map(|n| BigRational::from(BigInt::from(an[n as usize])))
        .collect();
    QSeries::new(1, coeffs)
}

pub fn form_from_an_mod(fp: Fp, an: &[i64], prec: i64) -> ModSeries {
    assert!(an.len() as i64 > prec - 1, "not enough coefficients");
    let coeffs = (1..prec)
        .map(|n| fp.reduce_i64(an[n as usize]))
        .collect();
    ModSeries::new(fp, 1, coeffs)
}
