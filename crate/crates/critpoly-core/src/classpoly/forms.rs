//! Reduced binary quadratic forms of negative discriminant.
//!
//! A primitive positive-definite form ax² + bxy + cy² of discriminant
//! d = b² − 4ac < 0 is reduced when |b| ≤ a ≤ c, with b ≥ 0 whenever
//! |b| = a or a = c. Every proper equivalence class contains exactly one
//! reduced form, so the enumeration below lists one representative per
//! ideal class and its length is the class number h(d). The form (a, b, c)
//! corresponds to the upper-half-plane point τ = (−b + √d)/(2a), where the
//! reduction conditions pin τ to the standard fundamental domain.

use num_integer::Integer;

use crate::error::{Error, Result};

/// One reduced primitive form (a, b, c) with b² − 4ac = d < 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReducedForm {
    pub a: u64,
    pub b: i64,
    pub c: u64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * (self.a as i64) * (self.c as i64)
    }

    /// The class is its own inverse, so the attached singular modulus is
    /// real: b = 0, b = a, or a = c.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.b == self.a as i64 || self.a == self.c
    }
}

/// Checks d < 0 and d ≡ 0, 1 (mod 4).
pub fn validate_discriminant(d: i64) -> Result<()> {
    if d >= 0 {
        return Err(Error::BadInput(format!(
            "discriminant {d} must be negative"
        )));
    }
    if !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::BadInput(format!(
            "discriminant {d} is not 0 or 1 mod 4"
        )));
    }
    Ok(())
}

/// All reduced primitive forms of discriminant d, sorted by (a, b).
pub fn reduced_forms(d: i64) -> Result<Vec<ReducedForm>> {
    validate_discriminant(d)?;
    let abs_d = d.unsigned_abs();
    let mut forms = Vec::new();
    let mut a = 1u64;
    while 3 * a * a <= abs_d {
        // b runs over −a < b ≤ a with b² ≡ d (mod 4a); b = −a duplicates
        // b = a and is excluded by the sign convention.
        for b in -(a as i64 - 1)..=(a as i64) {
            let num = b * b - d; // 4ac, positive
            let den = 4 * a as i64;
            if num % den != 0 {
                continue;
            }
            let c = (num / den) as u64;
            if c < a {
                continue;
            }
            if b < 0 && a == c {
                continue; // (a, −b, a) duplicates (a, b, a)
            }
            let g = a.gcd(&b.unsigned_abs()).gcd(&c);
            if g != 1 {
                continue;
            }
            forms.push(ReducedForm { a, b, c });
        }
        a += 1;
    }
    forms.sort();
    debug_assert!(forms.iter().all(|f| f.discriminant() == d));
    Ok(forms)
}

/// The class number h(d): how many reduced primitive forms exist.
pub fn class_number(d: i64) -> Result<usize> {
    Ok(reduced_forms(d)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_class_discriminants_have_one_form() {
        for d in [-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163]
        {
            assert_eq!(class_number(d).unwrap(), 1, "d = {d}");
        }
        assert_eq!(
            reduced_forms(-3).unwrap(),
            vec![ReducedForm { a: 1, b: 1, c: 1 }]
        );
        assert_eq!(
            reduced_forms(-4).unwrap(),
            vec![ReducedForm { a: 1, b: 0, c: 1 }]
        );
    }

    #[test]
    fn class_numbers_match_the_classical_table() {
        for (d, h) in [
            (-15, 2),
            (-20, 2),
            (-23, 3),
            (-24, 2),
            (-31, 3),
            (-32, 2),
            (-44, 3),
            (-47, 5),
            (-148, 2),
        ] {
            assert_eq!(class_number(d).unwrap(), h, "d = {d}");
        }
        // −44 = 4·(−11) drops the imprimitive (2, 2, 6); the class group
        // is the primitive forms only.
        assert_eq!(
            reduced_forms(-44).unwrap(),
            vec![
                ReducedForm { a: 1, b: 0, c: 11 },
                ReducedForm { a: 3, b: -2, c: 4 },
                ReducedForm { a: 3, b: 2, c: 4 },
            ]
        );
        assert_eq!(
            reduced_forms(-148).unwrap(),
            vec![
                ReducedForm { a: 1, b: 0, c: 37 },
                ReducedForm { a: 2, b: 2, c: 19 },
            ]
        );
    }

    #[test]
    fn forms_satisfy_the_reduction_conditions() {
        for d in [-23, -47, -84, -148, -163, -231, -356, -407] {
            let forms = reduced_forms(d).unwrap();
            assert!(!forms.is_empty(), "d = {d}");
            for w in forms.windows(2) {
                assert!(w[0] < w[1], "sorted distinct");
            }
            for f in forms {
                assert_eq!(f.discriminant(), d);
                assert!(f.b.unsigned_abs() <= f.a && f.a <= f.c);
                if f.b.unsigned_abs() == f.a || f.a == f.c {
                    assert!(f.b >= 0, "boundary forms take b >= 0");
                }
                assert_eq!(
                    f.a.gcd(&f.b.unsigned_abs()).gcd(&f.c),
                    1,
                    "primitive"
                );
            }
        }
    }

    #[test]
    fn conjugate_pairs_partition_the_non_ambiguous_forms() {
        for d in [-47, -84, -148, -231, -356] {
            let forms = reduced_forms(d).unwrap();
            for f in &forms {
                if !f.is_ambiguous() {
                    let partner = ReducedForm {
                        a: f.a,
                        b: -f.b,
                        c: f.c,
                    };
                    assert!(forms.contains(&partner), "d = {d}, {f:?}");
                }
            }
        }
    }

    #[test]
    fn invalid_discriminants_are_rejected() {
        for d in [0, 5, -1, -2, -5, -6, -22] {
            assert!(validate_discriminant(d).is_err(), "d = {d}");
        }
        assert!(reduced_forms(-5).is_err());
        assert!(validate_discriminant(-84).is_ok());
    }
}
