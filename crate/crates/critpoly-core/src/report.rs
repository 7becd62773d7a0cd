//! The stable JSON report of a computation run.
//!
//! One report captures everything a consumer needs from a run: the curve
//! metadata, which algorithm produced the critical polynomial F, the
//! polynomial itself, its class-polynomial decomposition, the rank-zero
//! verdict, and per-stage timings.  All big integers are serialized as
//! decimal strings — the coefficients routinely exceed 60 digits and JSON
//! numbers are lossy — and coefficient lists are ascending (constant term
//! first), matching the in-memory convention, so a report re-parses to the
//! exact polynomial it was built from.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{CriticalPolynomial, RunStats};
use crate::verdict::{Factorization, Verdict};

/// Top-level report; field names and nesting are a stable interface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub label: String,
    pub conductor: u64,
    pub genus: u64,
    /// "dense" or "yang".
    pub algorithm: String,
    /// "j", or the pole-cancellation function description.
    pub function_tag: String,
    #[serde(rename = "F")]
    pub f: PolynomialReport,
    pub factorization: FactorizationReport,
    pub verdict: VerdictReport,
    pub timings_ms: BTreeMap<String, u128>,
}

/// A monic integer polynomial as degree plus ascending decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialReport {
    pub degree: usize,
    pub coeffs: Vec<String>,
}

/// One Hilbert class polynomial factor H_disc appearing to the power exp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertFactorReport {
    pub disc: i64,
    pub exp: u32,
}

/// The non-CM cofactor and its certification status
/// ("irreducible" | "reducible" | "inconclusive").
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofactorReport {
    pub degree: usize,
    pub coeffs: Vec<String>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub hilbert: Vec<HilbertFactorReport>,
    pub cofactor: CofactorReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub proved: bool,
    /// Rule identifier when proved ("thm1-cond-irreducible",
    /// "thm1-cond-cm-plus-irreducible", "cusp-degenerate").
    pub rule: Option<String>,
    pub explanation: String,
}

fn decimal_strings(coeffs: &[BigInt]) -> Vec<String> {
    coeffs.iter().map(BigInt::to_string).collect()
}

fn parse_decimal_coeffs(coeffs: &[String]) -> Result<Vec<BigInt>> {
    coeffs
        .iter()
        .map(|s| {
            BigInt::from_str(s)
                .map_err(|_| Error::BadInput(format!("not a decimal integer: {s:?}")))
        })
        .collect()
}

impl Report {
    /// Build a report from a finished run; `stats` should already contain
    /// every stage the caller wants reported.
    pub fn assemble(
        critical: &CriticalPolynomial,
        stats: &RunStats,
        factorization: &Factorization,
        verdict: &Verdict,
    ) -> Report {
        Report {
            label: critical.label.clone(),
            conductor: critical.conductor,
            genus: critical.genus,
            algorithm: critical.algorithm.as_str().to_string(),
            function_tag: critical.function_tag.clone(),
            f: PolynomialReport {
                degree: critical.degree(),
                coeffs: decimal_strings(&critical.coefficients),
            },
            factorization: FactorizationReport {
                hilbert: factorization
                    .hilbert
                    .iter()
                    .map(|&(disc, exp)| HilbertFactorReport { disc, exp })
                    .collect(),
                cofactor: CofactorReport {
                    degree: factorization.cofactor.len().saturating_sub(1),
                    coeffs: decimal_strings(&factorization.cofactor),
                    status: factorization.cofactor_status.as_str().to_string(),
                },
            },
            verdict: VerdictReport {
                proved: verdict.proved,
                rule: verdict.rule.map(|r| r.as_str().to_string()),
                explanation: verdict.explanation.clone(),
            },
            timings_ms: stats.timings_ms.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }

    /// The critical polynomial's exact coefficients, ascending.
    pub fn f_coefficients(&self) -> Result<Vec<BigInt>> {
        parse_decimal_coeffs(&self.f.coeffs)
    }

    /// The cofactor's exact coefficients, ascending.
    pub fn cofactor_coefficients(&self) -> Result<Vec<BigInt>> {
        parse_decimal_coeffs(&self.factorization.cofactor.coeffs)
    }

    /// One-line factorization in the conventional table style, e.g.
    /// `F_{37a,j}(x) = H_{-148}(x)` or `F_{389a,j}(x) = H_{-19}(x)^2 (x^60 + ...)`.
    pub fn table_line(&self) -> Result<String> {
        let subscript = if self.function_tag == "j" { "j" } else { "h" };
        let mut pieces: Vec<String> = self
            .factorization
            .hilbert
            .iter()
            .map(|f| {
                if f.exp == 1 {
                    format!("H_{{{}}}(x)", f.disc)
                } else {
                    format!("H_{{{}}}(x)^{}", f.disc, f.exp)
                }
            })
            .collect();
        let cofactor = self.cofactor_coefficients()?;
        let cof_degree = cofactor.len().saturating_sub(1);
        if cof_degree > 0 {
            let text = if cof_degree <= 3 {
                polynomial_string(&cofactor)
            } else {
                leading_terms_string(&cofactor)
            };
            if pieces.is_empty() {
                pieces.push(text);
            } else {
                pieces.push(format!("({text})"));
            }
        }
        if pieces.is_empty() {
            // Constant critical polynomial (and the cofactor carries it).
            pieces.push(polynomial_string(&cofactor));
        }
        Ok(format!(
            "F_{{{},{}}}(x) = {}",
            self.label,
            subscript,
            pieces.join(" ")
        ))
    }
}

/// One printed term `c·x^k`, with unit coefficients elided.
fn term_string(magnitude: &BigInt, k: usize) -> String {
    let power = match k {
        0 => String::new(),
        1 => "x".to_string(),
        _ => format!("x^{k}"),
    };
    if k == 0 {
        magnitude.to_string()
    } else if magnitude.is_one() {
        power
    } else {
        format!("{magnitude}{power}")
    }
}

/// Human-readable polynomial in descending powers: "x - 1728", "x^2 - 2", "0".
pub fn polynomial_string(coeffs: &[BigInt]) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&term_string(&c.abs(), k));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// The leading two nonzero terms with a trailing ellipsis:
/// "x^8 + 1467...x^7 + ...".  Intended for large cofactors.
pub fn leading_terms_string(coeffs: &[BigInt]) -> String {
    let n = coeffs.len().saturating_sub(1);
    let mut out = term_string(&coeffs[n].abs(), n);
    if coeffs[n].is_negative() {
        out.insert(0, '-');
    }
    let Some(k) = (0..n).rev().find(|&k| !coeffs[k].is_zero()) else {
        return out;
    };
    out.push_str(if coeffs[k].is_negative() { " - " } else { " + " });
    out.push_str(&term_string(&coeffs[k].abs(), k));
    if (0..k).any(|i| !coeffs[i].is_zero()) {
        out.push_str(" + ...");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classpoly::hilbert_class_poly;
    use crate::pipeline::{Algorithm, Bookkeeping};
    use crate::verdict::{decide, extract_cm_factors};
    use crate::newform::CurveData;

    fn ints(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn critical_with(label: &str, coefficients: Vec<BigInt>, tag: &str) -> CriticalPolynomial {
        CriticalPolynomial {
            label: label.into(),
            conductor: 37,
            genus: 2,
            algorithm: Algorithm::Dense,
            function_tag: tag.into(),
            coefficients,
            bookkeeping: Bookkeeping::Dense {
                t_exponent: 0,
                order: 2737,
                a_exponent: 0,
                b_exponent: 0,
                kernel_dimension: 1,
            },
        }
    }

    #[test]
    fn polynomial_strings_match_the_classical_presentations() {
        assert_eq!(polynomial_string(&ints(&[0, 1])), "x");
        assert_eq!(polynomial_string(&ints(&[-1728, 1])), "x - 1728");
        assert_eq!(polynomial_string(&ints(&[-2, 0, 1])), "x^2 - 2");
        assert_eq!(polynomial_string(&ints(&[1, -2, 1])), "x^2 - 2x + 1");
        assert_eq!(polynomial_string(&ints(&[5])), "5");
        assert_eq!(polynomial_string(&ints(&[0])), "0");
        assert_eq!(polynomial_string(&ints(&[0, -1])), "-x");
        assert_eq!(
            polynomial_string(&hilbert_class_poly(-23).unwrap()),
            "x^3 + 3491750x^2 - 5151296875x + 12771880859375"
        );
    }

    #[test]
    fn leading_terms_elide_the_tail() {
        assert_eq!(leading_terms_string(&ints(&[1, 1, 0, 1])), "x^3 + x + ...");
        assert_eq!(leading_terms_string(&ints(&[7, 0, 0, 1])), "x^3 + 7");
        assert_eq!(leading_terms_string(&ints(&[0, 0, 0, 1])), "x^3");
        assert_eq!(
            leading_terms_string(&ints(&[3, 0, -5, 0, 1])),
            "x^4 - 5x^2 + ..."
        );
    }

    #[test]
    fn reports_round_trip_through_json_exactly() {
        // A coefficient far beyond both i64 and f64 exactness.
        let big = BigInt::from_str("-1467499520383590415545083053760").unwrap();
        let coeffs = vec![
            BigInt::from(12),
            big.clone(),
            BigInt::from(0),
            BigInt::from(1),
        ];
        let critical = critical_with("testcurve", coeffs.clone(), "j");
        let mut stats = RunStats::default();
        stats.timings_ms.insert("series".into(), 1234);
        stats.timings_ms.insert("solve".into(), 56789);
        let fac = extract_cm_factors(&coeffs, 148).unwrap();
        let curve = CurveData {
            label: "testcurve".into(),
            a_invariants: [0, 0, 1, -1, 0],
            conductor: 37,
            analytic_rank: 2,
        };
        let verdict = decide(&curve, &critical, &fac);

        let report = Report::assemble(&critical, &stats, &fac, &verdict);
        let json = report.to_json().unwrap();
        let parsed = Report::from_json(&json).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.f_coefficients().unwrap(), coeffs);
        assert_eq!(parsed.f.degree, 3);
        assert_eq!(parsed.timings_ms["solve"], 56789);
        // The big coefficient survives as an exact decimal string.
        assert!(json.contains("\"-1467499520383590415545083053760\""));
    }

    #[test]
    fn malformed_coefficient_strings_are_rejected() {
        let mut report = {
            let critical = critical_with("testcurve", ints(&[1]), "j");
            let fac = extract_cm_factors(&ints(&[1]), 20).unwrap();
            let verdict = Verdict {
                proved: false,
                rule: None,
                explanation: String::new(),
            };
            Report::assemble(&critical, &RunStats::default(), &fac, &verdict)
        };
        report.f.coeffs = vec!["12e9".into()];
        assert!(matches!(
            report.f_coefficients(),
            Err(Error::BadInput(_))
        ));
    }

    #[test]
    fn table_lines_follow_the_published_style() {
        let curve = CurveData {
            label: "37a".into(),
            a_invariants: [0, 0, 1, -1, 0],
            conductor: 37,
            analytic_rank: 1,
        };

        // Single class polynomial.
        let h148 = hilbert_class_poly(-148).unwrap();
        let critical = critical_with("37a", h148.clone(), "j");
        let fac = extract_cm_factors(&h148, 148).unwrap();
        let verdict = decide(&curve, &critical, &fac);
        let report = Report::assemble(&critical, &RunStats::default(), &fac, &verdict);
        assert_eq!(report.table_line().unwrap(), "F_{37a,j}(x) = H_{-148}(x)");

        // A squared factor.
        let h16 = hilbert_class_poly(-16).unwrap();
        let mut square = vec![BigInt::from(1)];
        for _ in 0..2 {
            let mut next = vec![BigInt::from(0); square.len() + h16.len() - 1];
            for (i, a) in square.iter().enumerate() {
                for (j, b) in h16.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            square = next;
        }
        let critical = critical_with("37b", square.clone(), "j");
        let fac = extract_cm_factors(&square, 148).unwrap();
        let verdict = decide(&curve, &critical, &fac);
        let report = Report::assemble(&critical, &RunStats::default(), &fac, &verdict);
        assert_eq!(report.table_line().unwrap(), "F_{37b,j}(x) = H_{-16}(x)^2");

        // Constant critical polynomial.
        let critical = critical_with("48a", ints(&[1]), "j");
        let fac = extract_cm_factors(&ints(&[1]), 192).unwrap();
        let verdict = decide(&curve, &critical, &fac);
        let report = Report::assemble(&critical, &RunStats::default(), &fac, &verdict);
        assert_eq!(report.table_line().unwrap(), "F_{48a,j}(x) = 1");

        // Hilbert factor times a large cofactor, under the pole tag.
        let mut f = hilbert_class_poly(-19).unwrap();
        f = {
            let g = ints(&[3, 0, -5, 0, 1]);
            let mut next = vec![BigInt::from(0); f.len() + g.len() - 1];
            for (i, a) in f.iter().enumerate() {
                for (j, b) in g.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            next
        };
        let critical = critical_with("testcurve", f.clone(), "j(j-1728)h with h = 1:12");
        let fac = extract_cm_factors(&f, 76).unwrap();
        let verdict = decide(&curve, &critical, &fac);
        let report = Report::assemble(&critical, &RunStats::default(), &fac, &verdict);
        assert_eq!(
            report.table_line().unwrap(),
            "F_{testcurve,h}(x) = H_{-19}(x) (x^4 - 5x^2 + ...)"
        );
    }
}
