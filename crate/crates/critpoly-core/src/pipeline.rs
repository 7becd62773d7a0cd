//! Multimodular orchestration of the two relation algorithms.
//!
//! One run fixes a curve and an algorithm, then repeats the whole per-prime
//! computation (series → relation → assembly) over a deterministic stream of
//! word-size primes. The integer critical polynomial is recovered from the
//! mod-p images by per-coefficient Chinese remaindering and rational
//! reconstruction (denominator 1 required), guarded three independent ways:
//! the degree is settled by strict majority vote across primes, the
//! reconstruction must survive one further prime unchanged, and fresh
//! verification primes must reproduce it from scratch mod p. A prime whose
//! per-prime run degenerates (consistency error) is skipped and recorded; a
//! verification mismatch folds the offending image back into the vote and
//! resumes. Identical configurations therefore produce bit-identical
//! results, and a run that cannot be verified within the prime budget aborts
//! loudly instead of guessing.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::arith::{
    rational_reconstruct, CrtAccumulator, Fp, ModPoly, PrimePool, QPoly,
};
use crate::error::{Error, Result};
use crate::eta::{build_yang_pair_mod, find_yang_eta};
use crate::gamma0::Gamma0;
use crate::newform::CurveData;
use crate::relation::{
    assemble_critical_mod, assemble_critical_yang_mod, dense_relation_mod,
    yang_relation_mod, DenseParams,
};

/// Requested algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AlgorithmChoice {
    /// Dense for small index, yang pair otherwise.
    #[default]
    Auto,
    Dense,
    Yang,
}

/// Algorithm a run actually used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Dense,
    Yang,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Dense => "dense",
            Algorithm::Yang => "yang",
        }
    }
}

/// Tuning knobs for one pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub algorithm: AlgorithmChoice,
    /// Dense exponent T in x = r·j^T; `None` picks 2g−2 when that solve fits
    /// the work budget and the fast T = 0 variant otherwise.
    pub t_exponent: Option<u32>,
    /// Override of the certifying series order.
    pub terms: Option<usize>,
    /// Index bound under which `Auto` picks the dense algorithm.
    pub dense_threshold: u64,
    /// Per-prime work bound (word operations) for affording T = 2g−2.
    pub work_budget: u128,
    /// Hard cap on primes consumed by one run (used + skipped).
    pub max_primes: usize,
    /// Fresh primes that must independently reproduce the reconstruction.
    pub verification_primes: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            algorithm: AlgorithmChoice::Auto,
            t_exponent: None,
            terms: None,
            dense_threshold: 120,
            work_budget: 4_000_000_000,
            max_primes: 32,
            verification_primes: 2,
        }
    }
}

/// Dimensions recorded alongside the result for reports and diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bookkeeping {
    Dense {
        t_exponent: u32,
        /// Certifying order M.
        order: usize,
        /// Assembly exponent A = deg f_top − T·d − (d + 2ν₃)/3.
        a_exponent: i64,
        /// Assembly exponent B = −(d + ν₂)/2.
        b_exponent: i64,
        /// Bounded-kernel dimension at the last contributing prime.
        kernel_dimension: usize,
    },
    Yang {
        /// Coefficients consumed per series: (m+1)(n+1).
        order: usize,
        /// Pole order m of the x-series g̃ (also deg h̃ in x^{2g−2−m}·f₀).
        pole_x: u64,
        /// Pole order n of the y-series h̃.
        pole_y: u64,
    },
}

/// Integer critical polynomial with provenance.
#[derive(Clone, Debug)]
pub struct CriticalPolynomial {
    pub label: String,
    pub conductor: u64,
    pub genus: u64,
    pub algorithm: Algorithm,
    /// "j" for the dense algorithm, or a description of h̃ = j(j−1728)·jᵉ·h
    /// with the eta quotient h spelled as divisor:exponent pairs.
    pub function_tag: String,
    /// Ascending integer coefficients, leading coefficient 1.
    pub coefficients: Vec<BigInt>,
    pub bookkeeping: Bookkeeping,
}

impl CriticalPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// The polynomial over Q, for factorization and report plumbing.
    pub fn to_qpoly(&self) -> QPoly {
        QPoly::from_coeffs(
            self.coefficients
                .iter()
                .cloned()
                .map(BigRational::from)
                .collect(),
        )
    }

    /// Reduction mod p (always defined: integer coefficients).
    pub fn reduce_mod(&self, fp: Fp) -> ModPoly {
        ModPoly::from_bigint_coeffs(fp, &self.coefficients)
    }
}

/// Prime accounting and stage timings of one run.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub timings_ms: BTreeMap<String, u128>,
    pub primes_used: Vec<u64>,
    pub primes_skipped: Vec<(u64, String)>,
}

/// A finished pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub critical: CriticalPolynomial,
    pub stats: RunStats,
}

/// Resolves `Auto` against the index threshold.
pub fn choose_algorithm(
    level: u64,
    config: &PipelineConfig,
) -> Result<Algorithm> {
    let g = Gamma0::new(level)?;
    Ok(match config.algorithm {
        AlgorithmChoice::Dense => Algorithm::Dense,
        AlgorithmChoice::Yang => Algorithm::Yang,
        AlgorithmChoice::Auto => {
            if g.index <= config.dense_threshold {
                Algorithm::Dense
            } else {
                Algorithm::Yang
            }
        }
    })
}

/// The dense exponent a run will use: an explicit override wins, otherwise
/// 2g−2 when the predicted solve fits the work budget, else the fast T = 0
/// variant (whose kernel slack the relation module resolves by gcd).
pub fn planned_t_exponent(level: u64, config: &PipelineConfig) -> Result<u32> {
    if let Some(t) = config.t_exponent {
        return Ok(t);
    }
    let g = Gamma0::new(level)?;
    let paper_t = (2 * g.genus).saturating_sub(2) as u32;
    if paper_t == 0 {
        return Ok(0);
    }
    let params = DenseParams::new(level, paper_t)?;
    Ok(if params.predicted_work() <= config.work_budget {
        paper_t
    } else {
        0
    })
}

/// Runs the configured (or automatically chosen) algorithm end to end.
pub fn compute_critical(
    curve: &CurveData,
    config: &PipelineConfig,
) -> Result<PipelineRun> {
    curve.validate()?;
    match choose_algorithm(curve.conductor, config)? {
        Algorithm::Dense => poly_relation(curve, config),
        Algorithm::Yang => poly_relation_yp(curve, config),
    }
}

/// Dense minimal-relation pipeline (x = r·j^T, y = 1/j).
pub fn poly_relation(
    curve: &CurveData,
    config: &PipelineConfig,
) -> Result<PipelineRun> {
    let total = Instant::now();
    let level = curve.conductor;
    let t_exp = planned_t_exponent(level, config)?;
    let mut params = DenseParams::new(level, t_exp)?;
    if let Some(terms) = config.terms {
        params.order = terms;
    }
    let mut timings = BTreeMap::new();
    let t = Instant::now();
    let an = curve.curve().an_table(level, params.total_order() + 32);
    add_ms(&mut timings, "series", t);

    let mut kernel_dimension = 0usize;
    let mut top_degree = 0i64;
    let reco = {
        let per_prime = |fp: Fp| -> Result<ModPoly> {
            let t = Instant::now();
            let rel = dense_relation_mod(fp, &an, &params)?;
            add_ms(&mut timings, "solve", t);
            let t = Instant::now();
            let f = assemble_critical_mod(&rel.relation, &params)?;
            add_ms(&mut timings, "assemble", t);
            kernel_dimension = rel.kernel_dimension;
            top_degree = rel
                .relation
                .slice_poly(params.deg_u as usize)
                .degree()
                .unwrap_or(0) as i64;
            Ok(f)
        };
        reconstruct_integer_poly(
            per_prime,
            config.max_primes,
            config.verification_primes,
        )?
    };
    timings.insert("reconstruct".into(), reco.reconstruct_ms);
    timings.insert("total".into(), total.elapsed().as_millis());

    let d = params.deg_u as i64;
    let a_exponent =
        top_degree - params.t_exp as i64 * d - (d + 2 * params.nu3 as i64) / 3;
    let b_exponent = -(d + params.nu2 as i64) / 2;
    Ok(PipelineRun {
        critical: CriticalPolynomial {
            label: curve.label.clone(),
            conductor: level,
            genus: params.genus,
            algorithm: Algorithm::Dense,
            function_tag: "j".into(),
            coefficients: reco.coefficients,
            bookkeeping: Bookkeeping::Dense {
                t_exponent: params.t_exp,
                order: params.order,
                a_exponent,
                b_exponent,
                kernel_dimension,
            },
        },
        stats: RunStats {
            timings_ms: timings,
            primes_used: reco.primes_used,
            primes_skipped: reco.primes_skipped,
        },
    })
}

/// Yang-pair pipeline: the relation P(g̃, h̃) by greedy pole cancellation,
/// the critical polynomial from its constant x-slice.
pub fn poly_relation_yp(
    curve: &CurveData,
    config: &PipelineConfig,
) -> Result<PipelineRun> {
    let total = Instant::now();
    let level = curve.conductor;
    let genus = Gamma0::new(level)?.genus;
    let mut timings = BTreeMap::new();
    let t = Instant::now();
    let meta = find_yang_eta(level)?;
    add_ms(&mut timings, "pair", t);
    let need = ((meta.m + 1) * (meta.n + 1)) as usize;
    let order = match config.terms {
        None => need,
        Some(terms) if terms >= need => terms,
        Some(terms) => {
            return Err(Error::BadInput(format!(
                "terms override {terms} below the certifying order {need}"
            )))
        }
    };
    let prec = order as i64 - meta.m as i64;

    let reco = {
        let per_prime = |fp: Fp| -> Result<ModPoly> {
            let t = Instant::now();
            let (g_t, h_t) = build_yang_pair_mod(fp, curve, &meta, prec)?;
            add_ms(&mut timings, "series", t);
            let t = Instant::now();
            let rel = yang_relation_mod(fp, &g_t, &h_t)?;
            add_ms(&mut timings, "solve", t);
            let t = Instant::now();
            let f = assemble_critical_yang_mod(&rel, meta.m, genus)?;
            add_ms(&mut timings, "assemble", t);
            Ok(f)
        };
        reconstruct_integer_poly(
            per_prime,
            config.max_primes,
            config.verification_primes,
        )?
    };
    timings.insert("reconstruct".into(), reco.reconstruct_ms);
    timings.insert("total".into(), total.elapsed().as_millis());

    let function_tag = match meta.extra_j {
        0 => format!("j(j-1728)h with h = {}", meta.eta),
        e => format!("j(j-1728)j^{e}h with h = {}", meta.eta),
    };
    Ok(PipelineRun {
        critical: CriticalPolynomial {
            label: curve.label.clone(),
            conductor: level,
            genus,
            algorithm: Algorithm::Yang,
            function_tag,
            coefficients: reco.coefficients,
            bookkeeping: Bookkeeping::Yang {
                order,
                pole_x: meta.m,
                pole_y: meta.n,
            },
        },
        stats: RunStats {
            timings_ms: timings,
            primes_used: reco.primes_used,
            primes_skipped: reco.primes_skipped,
        },
    })
}

fn add_ms(timings: &mut BTreeMap<String, u128>, stage: &str, from: Instant) {
    *timings.entry(stage.to_string()).or_default() +=
        from.elapsed().as_millis();
}

#[derive(Debug)]
struct Reconstruction {
    coefficients: Vec<BigInt>,
    primes_used: Vec<u64>,
    primes_skipped: Vec<(u64, String)>,
    reconstruct_ms: u128,
}

/// Drives `per_prime` over the deterministic prime stream until the images
/// reconstruct, stabilize, and verify. Consistency failures skip the prime;
/// any other error aborts the run (it would recur at every prime).
fn reconstruct_integer_poly(
    mut per_prime: impl FnMut(Fp) -> Result<ModPoly>,
    max_primes: usize,
    verification_primes: usize,
) -> Result<Reconstruction> {
    let mut pool = PrimePool::new();
    let mut images: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut skipped: Vec<(u64, String)> = Vec::new();
    let mut used: Vec<u64> = Vec::new();
    let mut previous: Option<Vec<BigInt>> = None;
    let mut stable: Option<Vec<BigInt>> = None;
    let mut remaining_verifications = 0usize;
    let mut reconstruct_ms = 0u128;

    loop {
        if used.len() + skipped.len() >= max_primes {
            return Err(Error::Inconsistent(format!(
                "no verified reconstruction after {} primes ({} skipped as degenerate)",
                used.len(),
                skipped.len()
            )));
        }
        let p = pool.next().expect("prime pool exhausted");
        let fp = Fp::new(p);
        let image = match per_prime(fp) {
            Ok(f) => f.coeffs().to_vec(),
            Err(Error::Inconsistent(why)) => {
                skipped.push((p, why));
                continue;
            }
            Err(e) => return Err(e),
        };
        used.push(p);

        let t = Instant::now();
        if let Some(cand) = stable.as_ref() {
            // Verification round: a fresh prime recomputed everything from
            // scratch and must agree with the reconstruction mod p.
            let confirmed = image_matches(cand, &image, fp);
            images.push((p, image));
            if confirmed {
                remaining_verifications -= 1;
            } else {
                stable = None;
                previous = None;
                remaining_verifications = 0;
            }
        } else {
            images.push((p, image));
            let cand = attempt_reconstruction(&images);
            if cand.is_some() && cand == previous {
                stable = cand;
                remaining_verifications = verification_primes;
            } else {
                previous = cand;
            }
        }
        reconstruct_ms += t.elapsed().as_millis();
        if stable.is_some() && remaining_verifications == 0 {
            return Ok(Reconstruction {
                coefficients: stable.unwrap(),
                primes_used: used,
                primes_skipped: skipped,
                reconstruct_ms,
            });
        }
    }
}

/// CRT + rational reconstruction over the majority-degree images; `None`
/// until they pin down a monic integer polynomial. When the full set is
/// blocked, each single prime is left out in turn: one degenerate image
/// cannot wedge the run, and the stability and verification rounds still
/// stand between a leave-one-out candidate and acceptance.
fn attempt_reconstruction(images: &[(u64, Vec<u64>)]) -> Option<Vec<BigInt>> {
    if images.len() < 2 {
        return None;
    }
    if let Some(c) = crt_candidate(images) {
        return Some(c);
    }
    if images.len() >= 4 {
        for drop in 0..images.len() {
            let subset: Vec<(u64, Vec<u64>)> = images
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .map(|(_, d)| d.clone())
                .collect();
            if let Some(c) = crt_candidate(&subset) {
                return Some(c);
            }
        }
    }
    None
}

fn crt_candidate(images: &[(u64, Vec<u64>)]) -> Option<Vec<BigInt>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (_, c) in images {
        *counts.entry(c.len()).or_default() += 1;
    }
    let (&len, &votes) = counts.iter().max_by_key(|(_, &v)| v)?;
    if len == 0 || votes * 2 <= images.len() {
        return None;
    }
    let subset: Vec<&(u64, Vec<u64>)> =
        images.iter().filter(|(_, c)| c.len() == len).collect();
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let mut acc = CrtAccumulator::new();
        for (p, c) in &subset {
            acc.push(*p, c[i]);
        }
        let r = rational_reconstruct(&acc.symmetric(), acc.modulus())?;
        if !r.denom().is_one() {
            return None;
        }
        out.push(r.numer().clone());
    }
    (out.last() == Some(&BigInt::one())).then_some(out)
}

fn image_matches(cand: &[BigInt], image: &[u64], fp: Fp) -> bool {
    let p = BigInt::from(fp.modulus());
    cand.len() == image.len()
        && cand
            .iter()
            .zip(image)
            .all(|(c, &r)| c.mod_floor(&p).to_u64() == Some(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_11a() -> CurveData {
        CurveData {
            label: "11a".into(),
            a_invariants: [0, -1, 1, -10, -20],
            conductor: 11,
            analytic_rank: 0,
        }
    }

    fn curve_26a() -> CurveData {
        CurveData {
            label: "26a".into(),
            a_invariants: [1, 0, 1, -5, -8],
            conductor: 26,
            analytic_rank: 0,
        }
    }

    fn reduction_of(coeffs: &[BigInt], fp: Fp) -> ModPoly {
        let p = BigInt::from(fp.modulus());
        ModPoly::from_coeffs(
            fp,
            coeffs
                .iter()
                .map(|c| c.mod_floor(&p).to_u64().unwrap())
                .collect(),
        )
    }

    #[test]
    fn algorithm_choice_honors_threshold_and_override() {
        let cfg = PipelineConfig::default();
        assert_eq!(choose_algorithm(37, &cfg).unwrap(), Algorithm::Dense);
        assert_eq!(choose_algorithm(664, &cfg).unwrap(), Algorithm::Yang);
        let forced = PipelineConfig {
            algorithm: AlgorithmChoice::Dense,
            ..cfg
        };
        assert_eq!(choose_algorithm(664, &forced).unwrap(), Algorithm::Dense);
    }

    #[test]
    fn planned_exponent_respects_the_work_budget() {
        let cfg = PipelineConfig::default();
        // Genus 1: 2g−2 = 0 regardless of budget.
        assert_eq!(planned_t_exponent(11, &cfg).unwrap(), 0);
        // Genus 2, small index: the 2g−2 solve fits the default budget.
        assert_eq!(planned_t_exponent(26, &cfg).unwrap(), 2);
        // Genus 7: T = 12 predicts ~10¹² operations; fall back to 0.
        assert_eq!(planned_t_exponent(89, &cfg).unwrap(), 0);
        let tight = PipelineConfig {
            work_budget: 1,
            ..PipelineConfig::default()
        };
        assert_eq!(planned_t_exponent(26, &tight).unwrap(), 0);
        let forced = PipelineConfig {
            t_exponent: Some(5),
            ..PipelineConfig::default()
        };
        assert_eq!(planned_t_exponent(89, &forced).unwrap(), 5);
    }

    #[test]
    fn reconstruction_recovers_a_planted_polynomial() {
        // The constant is ~129 bits, so five 62-bit primes are needed before
        // the candidate even exists; stability and verification add three.
        let coeffs = vec![
            BigInt::from(-9)
                * BigInt::from(10u64.pow(19))
                * BigInt::from(10u64.pow(19)),
            BigInt::from(123_456_789_i64),
            BigInt::one(),
        ];
        let reco = reconstruct_integer_poly(
            |fp| Ok(reduction_of(&coeffs, fp)),
            32,
            2,
        )
        .unwrap();
        assert_eq!(reco.coefficients, coeffs);
        assert!(reco.primes_skipped.is_empty());
        assert_eq!(reco.primes_used.len(), 8);
    }

    #[test]
    fn reconstruction_survives_one_poisoned_prime() {
        // The first prime lies with the correct degree: the leave-one-out
        // retry isolates it and the verification primes confirm the truth.
        let coeffs = vec![BigInt::from(42), BigInt::one()];
        let mut first = true;
        let reco = reconstruct_integer_poly(
            |fp| {
                if std::mem::take(&mut first) {
                    Ok(ModPoly::from_coeffs(fp, vec![43, 1]))
                } else {
                    Ok(reduction_of(&coeffs, fp))
                }
            },
            32,
            2,
        )
        .unwrap();
        assert_eq!(reco.coefficients, coeffs);
        assert!(reco.primes_skipped.is_empty());
        assert_eq!(reco.primes_used.len(), 7);
    }

    #[test]
    fn degenerate_primes_are_skipped_and_recorded() {
        let coeffs = vec![BigInt::from(7), BigInt::one()];
        let mut first = true;
        let reco = reconstruct_integer_poly(
            |fp| {
                if std::mem::take(&mut first) {
                    Err(Error::Inconsistent("planted degeneracy".into()))
                } else {
                    Ok(reduction_of(&coeffs, fp))
                }
            },
            32,
            2,
        )
        .unwrap();
        assert_eq!(reco.coefficients, coeffs);
        assert_eq!(reco.primes_skipped.len(), 1);
        assert_eq!(reco.primes_skipped[0].1, "planted degeneracy");
    }

    #[test]
    fn structural_errors_abort_immediately() {
        let err = reconstruct_integer_poly(
            |_| Err(Error::NoRelation("planted".into())),
            32,
            2,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoRelation(_)));
    }

    #[test]
    fn prime_budget_is_a_hard_stop() {
        // Degrees alternate, so no vote ever verifies; the run must abort
        // at the cap instead of spinning.
        let mut i = 0usize;
        let err = reconstruct_integer_poly(
            |fp| {
                i += 1;
                Ok(ModPoly::from_coeffs(
                    fp,
                    if i % 2 == 0 { vec![1] } else { vec![0, 1] },
                ))
            },
            6,
            2,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Inconsistent(_)));
    }

    #[test]
    fn dense_genus_one_run_is_trivial_and_tagged() {
        let run =
            compute_critical(&curve_11a(), &PipelineConfig::default()).unwrap();
        let c = &run.critical;
        assert_eq!(c.algorithm, Algorithm::Dense);
        assert_eq!(c.function_tag, "j");
        assert_eq!(c.coefficients, vec![BigInt::one()]);
        assert_eq!(c.degree(), 0);
        assert_eq!(c.genus, 1);
        match c.bookkeeping {
            Bookkeeping::Dense {
                t_exponent,
                kernel_dimension,
                ..
            } => {
                assert_eq!(t_exponent, 0);
                assert!(kernel_dimension >= 1);
            }
            _ => panic!("dense bookkeeping expected"),
        }
        assert!(run.stats.primes_used.len() >= 4);
        assert!(run.stats.primes_skipped.is_empty());
        for stage in ["series", "solve", "assemble", "reconstruct", "total"] {
            assert!(run.stats.timings_ms.contains_key(stage), "{stage}");
        }
    }

    #[test]
    fn yang_genus_one_run_matches_and_tags_the_pair() {
        let cfg = PipelineConfig {
            algorithm: AlgorithmChoice::Yang,
            ..PipelineConfig::default()
        };
        let run = compute_critical(&curve_11a(), &cfg).unwrap();
        let c = &run.critical;
        assert_eq!(c.algorithm, Algorithm::Yang);
        assert_eq!(c.coefficients, vec![BigInt::one()]);
        assert!(c.function_tag.starts_with("j(j-1728)h with h = "));
        assert!(c.function_tag.contains("1:108"));
        match c.bookkeeping {
            Bookkeeping::Yang {
                order,
                pole_x,
                pole_y,
            } => {
                assert_eq!((pole_x, pole_y), (45, 47));
                assert_eq!(order, 46 * 48);
            }
            _ => panic!("yang bookkeeping expected"),
        }
    }

    #[test]
    fn dense_runs_are_deterministic_with_a_full_degree_polynomial() {
        // Genus-2 level, squarefree so the zero divisor avoids the cusps and
        // the degree must be exactly 2g−2; two runs agree bit for bit.
        let curve = curve_26a();
        let cfg = PipelineConfig {
            t_exponent: Some(0),
            ..PipelineConfig::default()
        };
        let a = compute_critical(&curve, &cfg).unwrap();
        let b = compute_critical(&curve, &cfg).unwrap();
        assert_eq!(a.critical.coefficients, b.critical.coefficients);
        assert_eq!(a.stats.primes_used, b.stats.primes_used);
        assert_eq!(a.critical.degree(), 2);
        assert_eq!(*a.critical.coefficients.last().unwrap(), BigInt::one());
        assert!(a.stats.primes_skipped.is_empty());
    }
}
