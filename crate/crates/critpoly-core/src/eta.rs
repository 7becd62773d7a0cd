//! Eta-quotient calculus on X_0(N): admissibility conditions for a product
//! ∏ η(dz)^{r_d} to be a modular function, exact cusp orders and divisors,
//! prescribed-divisor solving over the admissible exponent lattice, and the
//! construction of function pairs with coprime pole orders at [∞] used by the
//! pole-cancellation relation method.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::Fp;
use crate::error::{Error, Result};
use crate::gamma0::{cusp_classes, cusp_width, divisors, euler_phi, gcd_u64, Gamma0};
use crate::newform::CurveData;
use crate::qseries::{euler_product_exact, euler_product_mod, j_exact, ModSeries, QSeries};

/// A formal product ∏_{d|N} η(dz)^{r_d}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    level: u64,
    /// (divisor, exponent), ascending by divisor, zero exponents omitted.
    exponents: Vec<(u64, i64)>,
}

/// Per-cusp-class multiplicities of a divisor supported on the cusps of
/// X_0(N), keyed by cusp denominator; every cusp in a class carries the same
/// multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspDivisor {
    level: u64,
    mult: BTreeMap<u64, i64>,
}

impl CuspDivisor {
    pub fn zero(level: u64) -> Self {
        CuspDivisor { level, mult: BTreeMap::new() }
    }

    pub fn from_pairs(level: u64, pairs: &[(u64, i64)]) -> Result<Self> {
        let mut d = CuspDivisor::zero(level);
        for &(denom, m) in pairs {
            d.set(denom, m)?;
        }
        Ok(d)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn set(&mut self, denom: u64, mult: i64) -> Result<()> {
        if denom == 0 || !self.level.is_multiple_of(denom) {
            return Err(Error::BadInput(format!(
                "{denom} is not a cusp denominator for level {}",
                self.level
            )));
        }
        if mult == 0 {
            self.mult.remove(&denom);
        } else {
            self.mult.insert(denom, mult);
        }
        Ok(())
    }

    /// Multiplicity at the cusps of the given denominator.
    pub fn at(&self, denom: u64) -> i64 {
        self.mult.get(&denom).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    /// Total degree: multiplicity times the number of cusps per class.
    pub fn degree(&self) -> i64 {
        self.mult
            .iter()
            .map(|(&d, &m)| m * euler_phi(gcd_u64(d, self.level / d)) as i64)
            .sum()
    }

    /// True when every multiplicity is ≥ 0 and the class of [∞] (denominator
    /// N) is absent.
    pub fn is_effective_off_infinity(&self) -> bool {
        self.mult.iter().all(|(&d, &m)| m >= 0 && d != self.level)
    }
}

impl fmt::Display for CuspDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mult.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for class in cusp_classes(self.level) {
            let m = self.at(class.denominator);
            if m == 0 {
                continue;
            }
            for &(a, d) in &class.representatives {
                if first {
                    if m < 0 {
                        write!(f, "-")?;
                    }
                    first = false;
                } else {
                    write!(f, " {} ", if m < 0 { "-" } else { "+" })?;
                }
                let mag = m.unsigned_abs();
                if mag != 1 {
                    write!(f, "{mag}")?;
                }
                if d == self.level {
                    write!(f, "[∞]")?;
                } else if d == 1 {
                    write!(f, "[0]")?;
                } else {
                    write!(f, "[{a}/{d}]")?;
                }
            }
        }
        Ok(())
    }
}

/// Outcome of the four admissibility conditions, with the failing ones named.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub failures: Vec<String>,
}

impl EtaQuotient {
    pub fn new(level: u64, pairs: &[(u64, i64)]) -> Result<Self> {
        if level == 0 {
            return Err(Error::BadInput("level must be positive".into()));
        }
        let mut map: BTreeMap<u64, i64> = BTreeMap::new();
        for &(d, r) in pairs {
            if d == 0 || !level.is_multiple_of(d) {
                return Err(Error::Eta(format!("{d} does not divide level {level}")));
            }
            *map.entry(d).or_insert(0) += r;
        }
        Ok(EtaQuotient {
            level,
            exponents: map.into_iter().filter(|&(_, r)| r != 0).collect(),
        })
    }

    pub fn one(level: u64) -> Self {
        EtaQuotient { level, exponents: Vec::new() }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn exponents(&self) -> &[(u64, i64)] {
        &self.exponents
    }

    pub fn exponent_at(&self, d: u64) -> i64 {
        self.exponents
            .iter()
            .find(|&&(dd, _)| dd == d)
            .map(|&(_, r)| r)
            .unwrap_or(0)
    }

    /// Parse the textual exponent syntax "d:r,d:r,…".
    pub fn parse(level: u64, s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (d, r) = part
                .split_once(':')
                .ok_or_else(|| Error::BadInput(format!("bad exponent entry {part:?}")))?;
            let d: u64 = d
                .trim()
                .parse()
                .map_err(|_| Error::BadInput(format!("bad divisor in {part:?}")))?;
            let r: i64 = r
                .trim()
                .parse()
                .map_err(|_| Error::BadInput(format!("bad exponent in {part:?}")))?;
            pairs.push((d, r));
        }
        EtaQuotient::new(level, &pairs)
    }

    /// The four sufficient conditions for the product to be a modular
    /// function on X_0(N): Σ r_d·N/d ≡ 0 (24), Σ r_d·d ≡ 0 (24), Σ r_d = 0,
    /// and ∏ (N/d)^{r_d} a rational square.
    pub fn admissibility(&self) -> AdmissibilityReport {
        let n = self.level as i128;
        let mut failures = Vec::new();
        let sum_nd: i128 = self
            .exponents
            .iter()
            .map(|&(d, r)| (n / d as i128) * r as i128)
            .sum();
        if sum_nd.rem_euclid(24) != 0 {
            failures.push(format!("sum r_d*(N/d) = {sum_nd} is not 0 mod 24"));
        }
        let sum_d: i128 =
            self.exponents.iter().map(|&(d, r)| d as i128 * r as i128).sum();
        if sum_d.rem_euclid(24) != 0 {
            failures.push(format!("sum r_d*d = {sum_d} is not 0 mod 24"));
        }
        let sum_r: i64 = self.exponents.iter().map(|&(_, r)| r).sum();
        if sum_r != 0 {
            failures.push(format!("sum r_d = {sum_r} is not 0"));
        }
        // prime-exponent parity of ∏ (N/d)^{r_d}
        for (p, _) in crate::gamma0::factorize(self.level) {
            let mut parity = 0i64;
            for &(d, r) in &self.exponents {
                let mut m = self.level / d;
                let mut v = 0i64;
                while m.is_multiple_of(p) {
                    m /= p;
                    v += 1;
                }
                parity += v * r;
            }
            if parity.rem_euclid(2) != 0 {
                failures.push(format!(
                    "prod (N/d)^(r_d) has odd exponent at prime {p}"
                ));
            }
        }
        AdmissibilityReport { admissible: failures.is_empty(), failures }
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility().admissible
    }

    /// Exact order of vanishing at the cusps of denominator c, in the local
    /// uniformizer of X_0(N):  (N/24)·Σ_d r_d·gcd(c,d)² / (gcd(c,N/c)·c·d).
    pub fn cusp_order(&self, c: u64) -> BigRational {
        assert!(c > 0 && self.level.is_multiple_of(c), "not a cusp denominator");
        let mut sum = BigRational::zero();
        for &(d, r) in &self.exponents {
            let g = gcd_u64(c, d);
            sum += BigRational::new(
                BigInt::from(r) * BigInt::from(g) * BigInt::from(g),
                BigInt::from(d),
            );
        }
        sum * BigRational::new(
            BigInt::from(self.level),
            BigInt::from(24u64) * BigInt::from(c) * BigInt::from(gcd_u64(c, self.level / c)),
        )
    }

    /// Order at [∞] (denominator N); equals the q-valuation of the expansion.
    pub fn order_at_infinity(&self) -> BigRational {
        self.cusp_order(self.level)
    }

    /// The full cusp divisor; requires every order to be an integer (true for
    /// admissible quotients).
    pub fn divisor(&self) -> Result<CuspDivisor> {
        let mut div = CuspDivisor::zero(self.level);
        for d in divisors(self.level) {
            let ord = self.cusp_order(d);
            if !ord.denom().is_one() {
                return Err(Error::Eta(format!(
                    "non-integral order {ord} at denominator {d}"
                )));
            }
            let m: i64 = ord
                .numer()
                .try_into()
                .map_err(|_| Error::Eta("cusp order overflows i64".into()))?;
            div.set(d, m)?;
        }
        Ok(div)
    }

    /// q-expansion with exact rational (in fact integer) coefficients, to
    /// absolute precision `prec`.
    pub fn expansion_exact(&self, prec: i64) -> Result<QSeries> {
        let val = self.integral_valuation()?;
        let len = (prec - val).max(1);
        let mut acc = QSeries::one_to_prec(len);
        for &(d, r) in &self.exponents {
            // (∏(1-q^{dn}))^r computed in the compressed variable t = q^d.
            let clen = (len + d as i64 - 1) / d as i64;
            let base = euler_product_exact(clen);
            let powed = if r >= 0 {
                base.pow(r as u32)
            } else {
                base.inv().pow((-r) as u32)
            };
            let mut stretched = vec![BigRational::zero(); len as usize];
            for (k, c) in powed.coeffs().iter().enumerate() {
                let idx = k as u64 * d;
                if (idx as i64) < len {
                    stretched[idx as usize] = c.clone();
                }
            }
            acc = acc.mul(&QSeries::new(0, stretched));
        }
        Ok(acc.shift(val).truncate_to(prec))
    }

    /// q-expansion reduced mod p, to absolute precision `prec`.
    pub fn expansion_mod(&self, fp: Fp, prec: i64) -> Result<ModSeries> {
        let val = self.integral_valuation()?;
        let len = (prec - val).max(1);
        let mut acc = ModSeries::one_to_prec(fp, len);
        for &(d, r) in &self.exponents {
            let clen = (len + d as i64 - 1) / d as i64;
            let base = euler_product_mod(fp, clen);
            let powed = if r >= 0 {
                base.pow(r as u64)
            } else {
                base.inv().pow((-r) as u64)
            };
            let mut stretched = vec![0u64; len as usize];
            for (k, &c) in powed.coeffs().iter().enumerate() {
                let idx = k as u64 * d;
                if (idx as i64) < len {
                    stretched[idx as usize] = c;
                }
            }
            acc = acc.mul(&ModSeries::from_reduced(fp, 0, stretched));
        }
        Ok(acc.shift(val).truncate_to(prec))
    }

    fn integral_valuation(&self) -> Result<i64> {
        let sum_d: i128 =
            self.exponents.iter().map(|&(d, r)| d as i128 * r as i128).sum();
        if sum_d.rem_euclid(24) != 0 {
            return Err(Error::Eta(format!(
                "fractional q-exponent: sum d*r_d = {sum_d} not divisible by 24"
            )));
        }
        Ok((sum_d / 24) as i64)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.exponents.iter().map(|&(d, r)| format!("{d}:{r}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

// ---------------------------------------------------------------------------
// The admissible exponent lattice and prescribed-divisor solving.
// ---------------------------------------------------------------------------

/// Basis of the integer kernel {x : M x = 0} of a small integer matrix,
/// computed by unimodular column reduction.
fn integer_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // u is kept column-major: u[j] is the j-th column of the transform.
    let mut rank = 0usize;
    for r in 0..rows {
        loop {
            // pick the column (≥ rank) with the smallest nonzero |a[r][j]|
            let mut piv: Option<usize> = None;
            for j in rank..cols {
                if !a[r][j].is_zero()
                    && piv.is_none_or(|p| a[r][j].abs() < a[r][p].abs())
                {
                    piv = Some(j);
                }
            }
            let Some(p) = piv else { break };
            // reduce all other columns by the pivot
            let mut again = false;
            for j in rank..cols {
                if j == p || a[r][j].is_zero() {
                    continue;
                }
                let q = &a[r][j] / &a[r][p]; // truncated division
                if !q.is_zero() {
                    for i in 0..rows {
                        let t = &a[i][p] * &q;
                        a[i][j] -= t;
                    }
                    for i in 0..cols {
                        let t = &u[p][i] * &q;
                        u[j][i] -= t;
                    }
                }
                if !a[r][j].is_zero() {
                    again = true;
                }
            }
            if !again {
                // single nonzero entry left in this row: move it to `rank`
                a.iter_mut().for_each(|row| row.swap(rank, p));
                u.swap(rank, p);
                rank += 1;
                break;
            }
        }
    }
    (rank..cols).map(|j| u[j].clone()).collect()
}

/// Basis of the lattice of admissible exponent vectors for level N, as
/// vectors indexed like `divisors(N)`.
fn admissible_lattice(n: u64) -> Vec<Vec<i64>> {
    let divs = divisors(n);
    let k = divs.len();
    // Coordinates: r = Σ x_i (e_i − e_{k−1}), i = 0..k−2, enforcing Σ r_d = 0.
    // Congruence rows mod 24: Σ r_d·(N/d), Σ r_d·d, and 12·(parity rows).
    let mut rows: Vec<Vec<i64>> = Vec::new();
    rows.push(divs.iter().map(|&d| (n / d) as i64).collect());
    rows.push(divs.iter().map(|&d| d as i64).collect());
    for (p, _) in crate::gamma0::factorize(n) {
        rows.push(
            divs.iter()
                .map(|&d| {
                    let mut m = n / d;
                    let mut v = 0i64;
                    while m.is_multiple_of(p) {
                        m /= p;
                        v += 1;
                    }
                    12 * v
                })
                .collect(),
        );
    }
    let t = rows.len();
    // Kernel of [C | 24·I] over Z, where C acts on the x-coordinates.
    let mut mat: Vec<Vec<BigInt>> = Vec::with_capacity(t);
    for row in &rows {
        let mut line: Vec<BigInt> = (0..k - 1)
            .map(|i| BigInt::from(row[i] - row[k - 1]))
            .collect();
        line.extend((0..t).map(|_| BigInt::zero()));
        mat.push(line);
    }
    for (ri, row) in mat.iter_mut().enumerate() {
        row[k - 1 + ri] = BigInt::from(24);
    }
    let kernel = integer_kernel(&mat);
    let mut basis = Vec::new();
    for v in kernel {
        let x: Vec<i64> = v[..k - 1]
            .iter()
            .map(|b| i64::try_from(b).expect("lattice coordinate overflow"))
            .collect();
        if x.iter().all(|&c| c == 0) {
            continue;
        }
        let mut r = vec![0i64; k];
        for (i, &xi) in x.iter().enumerate() {
            r[i] += xi;
            r[k - 1] -= xi;
        }
        basis.push(r);
    }
    basis
}

fn quotient_from_vector(n: u64, r: &[i64]) -> EtaQuotient {
    let pairs: Vec<(u64, i64)> = divisors(n)
        .into_iter()
        .zip(r.iter().copied())
        .filter(|&(_, e)| e != 0)
        .collect();
    EtaQuotient::new(n, &pairs).expect("divisor-indexed vector")
}

/// A uniformly small random admissible quotient (for property tests).
pub fn random_admissible(n: u64, rng: &mut impl rand::Rng) -> EtaQuotient {
    let basis = admissible_lattice(n);
    loop {
        let mut r = vec![0i64; divisors(n).len()];
        for b in &basis {
            let c = rng.random_range(-2..=2i64);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri += c * bi;
            }
        }
        if r.iter().any(|&c| c != 0) {
            return quotient_from_vector(n, &r);
        }
    }
}

/// Solve the k×k rational system: cusp orders at finite denominators equal to
/// the prescribed values, plus Σ r_d = 0.  Returns the exponent vector.
fn solve_equality_system(n: u64, d: &CuspDivisor) -> Result<Vec<BigRational>> {
    let divs = divisors(n);
    let k = divs.len();
    let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(k);
    let mut b: Vec<BigRational> = Vec::with_capacity(k);
    for &c in divs.iter().filter(|&&c| c != n) {
        let row: Vec<BigRational> = divs
            .iter()
            .map(|&dd| {
                let g = gcd_u64(c, dd);
                BigRational::new(
                    BigInt::from(n) * BigInt::from(g) * BigInt::from(g),
                    BigInt::from(24u64)
                        * BigInt::from(c)
                        * BigInt::from(gcd_u64(c, n / c))
                        * BigInt::from(dd),
                )
            })
            .collect();
        a.push(row);
        b.push(BigRational::from(BigInt::from(d.at(c))));
    }
    a.push(vec![BigRational::one(); k]);
    b.push(BigRational::zero());
    // Gaussian elimination with partial (first nonzero) pivoting.
    for col in 0..k {
        let piv = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Eta("cusp-order system is singular".into()))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for j in col..k {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..k {
                    let t = &a[col][j] * &f;
                    a[r][j] -= t;
                }
                let t = &b[col] * &f;
                b[r] -= t;
            }
        }
    }
    Ok(b)
}

/// Maximum multiplier scanned when clearing denominators of the rational
/// equality solution.
const MULTIPLIER_BOUND: u64 = 24 * 24;
/// Node budget for the order-lattice refinement search.
const REFINE_NODE_BUDGET: usize = 500_000;

/// Find an admissible eta-quotient whose divisor is D' − m[∞] with D' ≥ D and
/// m > 0, minimizing m among the solutions found.  D must be ≥ 0 and
/// supported away from [∞]; a zero D is replaced by a single zero at [0].
pub fn solve_prescribed_divisor(n: u64, d: &CuspDivisor) -> Result<EtaQuotient> {
    if d.level() != n {
        return Err(Error::BadInput("divisor level mismatch".into()));
    }
    if !d.is_effective_off_infinity() {
        return Err(Error::BadInput(
            "prescribed divisor must be ≥ 0 and supported away from [∞]".into(),
        ));
    }
    let mut d = d.clone();
    if d.is_zero() {
        d.set(1, 1)?;
    }

    // Phase 1: rational equality solution, scanning multipliers until the
    // scaled vector is integral and admissible.
    let v0 = solve_equality_system(n, &d)?;
    let mut best: Option<(i64, Vec<i64>)> = None;
    for t in 1..=MULTIPLIER_BOUND {
        let scaled: Option<Vec<i64>> = v0
            .iter()
            .map(|c| {
                let x = c * BigRational::from(BigInt::from(t));
                x.denom().is_one().then(|| i64::try_from(x.numer()).ok()).flatten()
            })
            .collect();
        let Some(r) = scaled else { continue };
        let h = quotient_from_vector(n, &r);
        if h.is_admissible() {
            let m = -i64::try_from(h.order_at_infinity().numer())
                .map_err(|_| Error::Eta("pole order overflows i64".into()))?;
            if m > 0 {
                best = Some((m, r));
                break;
            }
        }
    }
    let Some((scan_m, scan_r)) = best else {
        return Err(Error::Eta(format!(
            "no admissible quotient found for the prescribed divisor within \
             multiplier bound {MULTIPLIER_BOUND}"
        )));
    };

    // Phase 2: refine over the order lattice — enumerate admissible
    // exponent vectors whose finite-cusp orders are ≥ D with a smaller pole.
    let refined = refine_minimal_pole(n, &d, scan_m).unwrap_or(None);
    let r = refined.unwrap_or(scan_r);
    let h = quotient_from_vector(n, &r);
    debug_assert!(h.is_admissible());
    Ok(h)
}

/// Enumerate the admissible lattice in finite-cusp-order coordinates (made
/// lower-triangular by column reduction) for a vector with orders ≥ D and
/// pole < `bound`.  Returns None when no improvement is found or the matrix
/// degenerates; Err never escapes (used defensively).
fn refine_minimal_pole(
    n: u64,
    d: &CuspDivisor,
    bound: i64,
) -> Result<Option<Vec<i64>>> {
    let basis = admissible_lattice(n);
    let divs = divisors(n);
    let finite: Vec<u64> = divs.iter().copied().filter(|&c| c != n).collect();
    let k = finite.len();
    if basis.len() != k || k == 0 {
        return Ok(None);
    }
    // Order matrix: rows = finite cusp denominators, columns = basis vectors.
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(k);
    let mut vecs: Vec<Vec<i64>> = Vec::with_capacity(k);
    for b in &basis {
        let h = quotient_from_vector(n, b);
        let mut col = Vec::with_capacity(k);
        for &c in &finite {
            let ord = h.cusp_order(c);
            if !ord.denom().is_one() {
                return Ok(None);
            }
            col.push(
                i64::try_from(ord.numer()).map_err(|_| Error::Eta("order overflow".into()))?,
            );
        }
        cols.push(col);
        vecs.push(b.clone());
    }
    // Column reduction to lower-triangular form with positive diagonal,
    // applying the same operations to the exponent vectors.
    for row in 0..k {
        loop {
            let mut piv: Option<usize> = None;
            for j in row..k {
                if cols[j][row] != 0
                    && piv.is_none_or(|p: usize| cols[j][row].abs() < cols[p][row].abs())
                {
                    piv = Some(j);
                }
            }
            let Some(p) = piv else { return Ok(None) };
            let mut again = false;
            for j in row..k {
                if j == p || cols[j][row] == 0 {
                    continue;
                }
                let q = cols[j][row] / cols[p][row];
                if q != 0 {
                    for i in 0..k {
                        cols[j][i] -= q * cols[p][i];
                    }
                    for i in 0..vecs[p].len() {
                        let t = q * vecs[p][i];
                        vecs[j][i] -= t;
                    }
                }
                if cols[j][row] != 0 {
                    again = true;
                }
            }
            if !again {
                cols.swap(row, p);
                vecs.swap(row, p);
                if cols[row][row] < 0 {
                    cols[row].iter_mut().for_each(|x| *x = -*x);
                    vecs[row].iter_mut().for_each(|x| *x = -*x);
                }
                break;
            }
        }
    }
    // Weights: pole m = Σ_c count_c · ord_c over finite cusps.
    let weights: Vec<i64> = finite
        .iter()
        .map(|&c| euler_phi(gcd_u64(c, n / c)) as i64)
        .collect();
    let dvals: Vec<i64> = finite.iter().map(|&c| d.at(c)).collect();
    let mut best_m = bound;
    let mut best_x: Option<Vec<i64>> = None;
    let mut nodes = 0usize;
    // DFS over coordinates: at depth i choose x_i; o_i = Σ_{j≤i} C[j][i]·x_j.
    struct Dfs<'a> {
        cols: &'a [Vec<i64>],
        weights: &'a [i64],
        dvals: &'a [i64],
        k: usize,
        nodes: &'a mut usize,
        best_m: &'a mut i64,
        best_x: &'a mut Option<Vec<i64>>,
    }
    impl Dfs<'_> {
        fn go(&mut self, depth: usize, x: &mut Vec<i64>, partial: i64) {
            if *self.nodes >= REFINE_NODE_BUDGET {
                return;
            }
            *self.nodes += 1;
            if depth == self.k {
                if partial < *self.best_m && partial > 0 {
                    *self.best_m = partial;
                    *self.best_x = Some(x.clone());
                }
                return;
            }
            // o_depth = fixed + diag·x_depth, diag > 0
            let fixed: i64 = (0..depth).map(|j| self.cols[j][depth] * x[j]).sum();
            let diag = self.cols[depth][depth];
            // remaining minimal weighted contribution from deeper cusps
            let tail_min: i64 = (depth + 1..self.k)
                .map(|i| self.weights[i] * self.dvals[i])
                .sum();
            let budget = *self.best_m - 1 - partial - tail_min;
            if budget < 0 {
                return;
            }
            let lo = div_ceil_i64(self.dvals[depth] - fixed, diag);
            let hi = div_floor_i64(budget / self.weights[depth] - fixed, diag);
            let mut xi = lo;
            while xi <= hi {
                x.push(xi);
                let o = fixed + diag * xi;
                self.go(depth + 1, x, partial + self.weights[depth] * o);
                x.pop();
                if *self.nodes >= REFINE_NODE_BUDGET {
                    return;
                }
                xi += 1;
            }
        }
    }
    Dfs {
        cols: &cols,
        weights: &weights,
        dvals: &dvals,
        k,
        nodes: &mut nodes,
        best_m: &mut best_m,
        best_x: &mut best_x,
    }
    .go(0, &mut Vec::new(), 0);
    Ok(best_x.map(|x| {
        let len = vecs[0].len();
        let mut r = vec![0i64; len];
        for (j, &xj) in x.iter().enumerate() {
            for i in 0..len {
                r[i] += xj * vecs[j][i];
            }
        }
        r
    }))
}

fn div_ceil_i64(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}

fn div_floor_i64(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

// ---------------------------------------------------------------------------
// Pole-coprime function pairs for the cancellation method.
// ---------------------------------------------------------------------------

/// The data determining the pair (g̃, h̃) = (±r·h·j^e, j(j−1728)·h·j^e): the
/// eta-quotient h, whether the j-fallback multiplied in an extra factor, the
/// pole orders, and the scalar applied to normalize g̃'s leading coefficient.
#[derive(Clone, Debug)]
pub struct YangMeta {
    pub eta: EtaQuotient,
    /// 1 when h was replaced by j·h to make the pole order odd, else 0.
    pub extra_j: u32,
    /// Pole order of g̃ (also the "deg h" in the output exponent 2g−2−m).
    pub m: u64,
    /// Pole order of h̃ (= m + 2).
    pub n: u64,
    /// Scalar multiplied into r·h·j^e so the leading coefficient is 1.
    pub scale_g: i64,
}

/// Choose the auxiliary eta-quotient and pole orders for a level: solve for a
/// quotient with orders ≥ 4·width at every finite cusp, apply the j-fallback
/// if the resulting pole order is even, and verify that j(j−1728)·h·j^e
/// vanishes at every finite cusp and that the pole orders are coprime.
pub fn find_yang_eta(n: u64) -> Result<YangMeta> {
    let mut d = CuspDivisor::zero(n);
    for c in divisors(n) {
        if c != n {
            d.set(c, 4 * cusp_width(n, c) as i64)?;
        }
    }
    let eta = solve_prescribed_divisor(n, &d)?;
    let m0 = -i64::try_from(eta.order_at_infinity().numer())
        .map_err(|_| Error::Eta("pole order overflows i64".into()))?;
    assert!(m0 > 0);
    let extra_j: u32 = if m0 % 2 == 1 { 0 } else { 1 };
    let m = m0 as u64 + extra_j as u64;
    let npole = m + 2;
    if gcd_u64(m, npole) != 1 {
        return Err(Error::Eta(format!(
            "pole orders ({m}, {npole}) are not coprime after fallback"
        )));
    }
    // j(j−1728)·h·j^e must vanish at every finite cusp; j has a pole of order
    // equal to the cusp width there.
    for c in divisors(n) {
        if c == n {
            continue;
        }
        let w = cusp_width(n, c) as i64;
        let ord = eta.cusp_order(c) - BigRational::from(BigInt::from((2 + extra_j as i64) * w));
        if ord <= BigRational::zero() {
            return Err(Error::Eta(format!(
                "pair function fails to vanish at denominator-{c} cusps"
            )));
        }
    }
    Ok(YangMeta { eta, extra_j, m, n: npole, scale_g: -1 })
}

/// Build the exact q-series pair (g̃, h̃) for a curve, to absolute precision
/// `prec`: g̃ = −r·h·j^e with r = j(j−1728)·f/(q·dj/dq), h̃ = j(j−1728)·h·j^e,
/// both with leading coefficient 1 and integer coefficients.
pub fn build_yang_pair(
    curve: &CurveData,
    prec: i64,
) -> Result<(QSeries, QSeries, YangMeta)> {
    let n = curve.conductor;
    let _ = Gamma0::new(n)?;
    let meta = find_yang_eta(n)?;
    let m = meta.m as i64;
    // Internal length: products start at q^{-m-2}; keep `prec - (-m-2)` terms.
    let len = prec + m + 4;
    let an = curve.curve().an_table(n, (len + 2).max(4) as usize);
    let f = crate::qseries::form_from_an_exact(&an, len);
    let j = j_exact(len);
    let c1728 = QSeries::one_to_prec(len).scale(&BigRational::from(BigInt::from(1728)));
    let j1728 = j.sub(&c1728);
    let jj = j.mul(&j1728);
    let r = jj.mul(&f).mul(&j.q_derivative().inv());
    assert_eq!(r.val(), 0, "r must be regular of valuation 0 at [∞]");
    // Multiplying by j(j−1728)·j^e lowers the absolute precision bound by
    // 2 + e, so expand h that much further to land on `prec` exactly.
    let h = meta.eta.expansion_exact(prec + 2 + meta.extra_j as i64)?;
    let mut g_t = r.mul(&h);
    let mut h_t = jj.mul(&h);
    for _ in 0..meta.extra_j {
        g_t = g_t.mul(&j);
        h_t = h_t.mul(&j);
    }
    let g_t = g_t.scale(&BigRational::from(BigInt::from(meta.scale_g)));
    assert_eq!(g_t.val(), -(meta.m as i64));
    assert_eq!(h_t.val(), -(meta.n as i64));
    assert!(g_t.coeff_at(g_t.val()).is_one(), "g̃ leading coefficient");
    assert!(h_t.coeff_at(h_t.val()).is_one(), "h̃ leading coefficient");
    for series in [&g_t, &h_t] {
        assert!(
            series.coeffs().iter().all(|c| c.denom().is_one()),
            "pair series must have integer coefficients"
        );
    }
    Ok((g_t.truncate_to(prec), h_t.truncate_to(prec), meta))
}

/// Mod-p mirror of `build_yang_pair`, reusing an already-solved `meta` so
/// per-prime production runs skip the lattice search.
pub fn build_yang_pair_mod(
    fp: Fp,
    curve: &CurveData,
    meta: &YangMeta,
    prec: i64,
) -> Result<(ModSeries, ModSeries)> {
    let n = curve.conductor;
    let m = meta.m as i64;
    let len = prec + m + 4;
    let an = curve.curve().an_table(n, (len + 2).max(4) as usize);
    let f = crate::qseries::form_from_an_mod(fp, &an, len);
    let j = crate::qseries::j_mod(fp, len);
    let c1728 = ModSeries::one_to_prec(fp, len).scale(fp.reduce_i64(1728));
    let jj = j.mul(&j.sub(&c1728));
    let r = jj.mul(&f).mul(&j.q_derivative().inv());
    assert_eq!(r.val(), 0, "r must be regular of valuation 0 at [∞]");
    let h = meta.eta.expansion_mod(fp, prec + 2 + meta.extra_j as i64)?;
    let mut g_t = r.mul(&h);
    let mut h_t = jj.mul(&h);
    for _ in 0..meta.extra_j {
        g_t = g_t.mul(&j);
        h_t = h_t.mul(&j);
    }
    let g_t = g_t.scale(fp.reduce_i64(meta.scale_g));
    assert_eq!(g_t.val(), -(meta.m as i64));
    assert_eq!(h_t.val(), -(meta.n as i64));
    assert_eq!(g_t.coeff_at(g_t.val()), 1, "g̃ leading coefficient");
    assert_eq!(h_t.coeff_at(h_t.val()), 1, "h̃ leading coefficient");
    Ok((g_t.truncate_to(prec), h_t.truncate_to(prec)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;
    use rand::SeedableRng;

    fn h2_664() -> EtaQuotient {
        EtaQuotient::new(664, &[(2, -1), (4, 1), (166, -1), (8, 2), (332, 5), (664, -6)])
            .unwrap()
    }

    fn h1_664() -> EtaQuotient {
        EtaQuotient::new(664, &[(2, -4), (4, 6), (8, 4), (332, 6), (664, -12)]).unwrap()
    }

    #[test]
    fn admissibility_conditions() {
        assert!(h2_664().is_admissible());
        assert!(h1_664().is_admissible());
        assert!(EtaQuotient::one(664).is_admissible());
        // {1:1, 664:-1} violates both mod-24 sums and the square condition.
        let bad = EtaQuotient::new(664, &[(1, 1), (664, -1)]).unwrap();
        let report = bad.admissibility();
        assert!(!report.admissible);
        assert_eq!(report.failures.len(), 4); // two sums + parity at 2 and 83
    }

    #[test]
    fn delta_ratio_divisor_level_two() {
        // Δ(z)/Δ(2z): order +1 at [0], −1 at [∞], total degree zero.
        let h = EtaQuotient::new(2, &[(1, 24), (2, -24)]).unwrap();
        assert!(h.is_admissible());
        let div = h.divisor().unwrap();
        assert_eq!(div.at(1), 1);
        assert_eq!(div.at(2), -1);
        assert_eq!(div.degree(), 0);
    }

    #[test]
    fn published_divisor_of_h2() {
        let div = h2_664().divisor().unwrap();
        assert_eq!(div.at(332), 21);
        assert_eq!(div.at(8), 61);
        assert_eq!(div.at(4), 21);
        assert_eq!(div.at(664), -103);
        for d in [1u64, 2, 83, 166] {
            assert_eq!(div.at(d), 0, "denominator {d}");
        }
        assert_eq!(div.degree(), 0);
        assert_eq!(
            div.to_string(),
            "21[1/4] + 61[1/8] + 21[1/332] - 103[∞]"
        );
    }

    #[test]
    fn pole_orders_of_the_level_664_pair() {
        // ord_[∞](h1) = −247; r is regular of order 0 at [∞], so r·h1 has
        // pole order 247 there, coprime to h2's 103.
        let o1 = h1_664().order_at_infinity();
        let o2 = h2_664().order_at_infinity();
        assert_eq!(o1, BigRational::from_i64(-247).unwrap());
        assert_eq!(o2, BigRational::from_i64(-103).unwrap());
        assert_eq!(gcd_u64(247, 103), 1);
    }

    #[test]
    fn expansion_matches_direct_product() {
        // Δ(z)/Δ(2z) = q ∏(1−q^n)^24 / (q² ∏(1−q^{2n})^24).
        let h = EtaQuotient::new(2, &[(1, 24), (2, -24)]).unwrap();
        let got = h.expansion_exact(10).unwrap();
        let e = euler_product_exact(12);
        let mut stretched = vec![BigRational::zero(); 12];
        for (k, c) in e.coeffs().iter().enumerate() {
            if 2 * k < 12 {
                stretched[2 * k] = c.clone();
            }
        }
        let want = e
            .pow(24)
            .mul(&QSeries::new(0, stretched).pow(24).inv())
            .shift(-1)
            .truncate_to(10);
        assert_eq!(got.val(), want.val());
        for k in -1..10 {
            assert_eq!(got.coeff_at(k), want.coeff_at(k), "q^{k}");
        }
        // And the mod-p expansion is the reduction of the exact one.
        let fp = Fp::new(1_000_003);
        let gm = h.expansion_mod(fp, 10).unwrap();
        for k in -1..10 {
            let exact = got.coeff_at(k);
            let num = exact.numer().clone();
            let want_mod = ((num % 1_000_003i64) + 1_000_003i64) % 1_000_003i64;
            assert_eq!(
                gm.coeff_at(k),
                u64::try_from(want_mod).unwrap(),
                "q^{k} mod p"
            );
        }
    }

    #[test]
    fn random_quotients_have_degree_zero_divisors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [24u64, 36, 48, 664] {
            for _ in 0..50 {
                let h = random_admissible(n, &mut rng);
                assert!(h.is_admissible(), "N={n} h={h}");
                let div = h.divisor().unwrap();
                assert_eq!(div.degree(), 0, "N={n} h={h}");
            }
        }
    }

    #[test]
    fn q_valuation_equals_order_at_infinity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [6u64, 24, 48] {
            for _ in 0..10 {
                let h = random_admissible(n, &mut rng);
                let ord = h.order_at_infinity();
                assert!(ord.denom().is_one());
                let val: i64 = i64::try_from(ord.numer()).unwrap();
                let series = h.expansion_exact(val + 8).unwrap();
                assert_eq!(series.val(), val, "N={n} h={h}");
                assert!(series.coeff_at(val).is_one());
            }
        }
    }

    #[test]
    fn prescribed_divisor_level_two_is_delta_ratio() {
        let d = CuspDivisor::from_pairs(2, &[(1, 1)]).unwrap();
        let h = solve_prescribed_divisor(2, &d).unwrap();
        assert_eq!(h.exponents(), &[(1, 24), (2, -24)]);
    }

    #[test]
    fn prescribed_divisor_level_eleven_default() {
        // D = 0 boundary: a nonconstant quotient with D' ≥ 0 and minimal pole.
        let d = CuspDivisor::zero(11);
        let h = solve_prescribed_divisor(11, &d).unwrap();
        assert_eq!(h.exponents(), &[(1, 12), (11, -12)]);
        assert_eq!(
            h.order_at_infinity(),
            BigRational::from_i64(-5).unwrap()
        );
    }

    #[test]
    fn prescribed_divisor_minimizes_pole() {
        // At level 37 the admissible lattice is generated by (η_1/η_37)^2
        // with zero order 3 at [0]; the least multiple with order ≥ 148 is 150.
        let d = CuspDivisor::from_pairs(37, &[(1, 148)]).unwrap();
        let h = solve_prescribed_divisor(37, &d).unwrap();
        assert_eq!(h.exponents(), &[(1, 100), (37, -100)]);
        assert_eq!(h.cusp_order(1), BigRational::from_i64(150).unwrap());
        assert_eq!(
            h.order_at_infinity(),
            BigRational::from_i64(-150).unwrap()
        );
    }

    #[test]
    fn prescribed_divisor_rejects_bad_input() {
        let mut d = CuspDivisor::zero(37);
        d.set(37, 1).unwrap(); // the [∞] class
        assert!(solve_prescribed_divisor(37, &d).is_err());
        let mut neg = CuspDivisor::zero(37);
        neg.set(1, -1).unwrap();
        assert!(solve_prescribed_divisor(37, &neg).is_err());
    }

    #[test]
    fn yang_meta_level_37() {
        // Pole 150 is even, so the fallback multiplies by j: (151, 153).
        let meta = find_yang_eta(37).unwrap();
        assert_eq!(meta.eta.exponents(), &[(1, 100), (37, -100)]);
        assert_eq!(meta.extra_j, 1);
        assert_eq!((meta.m, meta.n), (151, 153));
    }

    #[test]
    fn exact_pair_for_37a() {
        let curve = CurveData {
            label: "37a".into(),
            a_invariants: [0, 0, 1, -1, 0],
            conductor: 37,
            analytic_rank: 1,
        };
        let (g, h, meta) = build_yang_pair(&curve, -120).unwrap();
        assert_eq!(g.val(), -(meta.m as i64));
        assert_eq!(h.val(), -(meta.n as i64));
        assert!(g.coeff_at(g.val()).is_one());
        assert!(h.coeff_at(h.val()).is_one());
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let h = EtaQuotient::parse(664, "2:-1,4:1,166:-1,8:2,332:5,664:-6").unwrap();
        assert_eq!(h, h2_664());
        assert_eq!(h.to_string(), "2:-1,4:1,8:2,166:-1,332:5,664:-6");
        assert!(EtaQuotient::parse(664, "5:1").is_err());
        assert!(EtaQuotient::parse(664, "2:x").is_err());
    }
}
