//! Truncated Laurent series over a word-size prime field, with the fast
//! kernels the relation solver is built on: schoolbook products with lazy
//! 128-bit accumulation, reciprocals by recurrence, block composition
//! (Brent–Kung) and compositional reversion (Newton).
//!
//! Storage mirrors `laurent::QSeries`: valuation plus ascending coefficients,
//! known modulo `q^(val + coeffs.len())`, leading zeros normalized into the
//! valuation, and the truncated zero series represented by an empty list whose
//! `val` records the precision.

use crate::arith::fp64::{Fp, FixedMul};

/// Below this operand length, products stay schoolbook.
const KARATSUBA_THRESHOLD: usize = 40;

/// Product of two coefficient arrays truncated to `out_len` terms.
///
/// Schoolbook with eight 124-bit products per reduction below the threshold;
/// Karatsuba above it (the solver's series preparation does hundreds of
/// full-length products at the larger levels, where this is a ~6x win).
pub fn mul_arrays(fp: Fp, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
    let n = out_len.min(if a.is_empty() || b.is_empty() {
        0
    } else {
        a.len() + b.len() - 1
    });
    if a.is_empty() || b.is_empty() {
        return vec![0u64; n];
    }
    // Coefficients at or beyond out_len cannot influence the output.
    let a = &a[..a.len().min(out_len)];
    let b = &b[..b.len().min(out_len)];
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        let mut out = schoolbook_range(fp, a, b, n);
        out.truncate(n);
        return out;
    }
    let mut out = karatsuba_full(fp, a, b);
    out.truncate(n);
    out.resize(n, 0);
    out
}

/// Schoolbook product of the first `out_len` coefficients.
fn schoolbook_range(fp: Fp, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
    let p = fp.modulus() as u128;
    let n = out_len.min(a.len() + b.len() - 1);
    let mut out = vec![0u64; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        let mut acc: u128 = 0;
        let mut pending = 0u32;
        for i in lo..=hi {
            // SAFETY of ranges: lo..=hi keeps both indices in bounds.
            acc += a[i] as u128 * b[k - i] as u128;
            pending += 1;
            if pending == 8 {
                acc %= p;
                pending = 0;
            }
        }
        *slot = (acc % p) as u64;
    }
    out
}

fn add_at(fp: Fp, dst: &mut [u64], src: &[u64], offset: usize) {
    debug_assert!(offset + src.len() <= dst.len());
    for (d, &s) in dst[offset..].iter_mut().zip(src.iter()) {
        *d = fp.add(*d, s);
    }
}

/// Full (untruncated) product by Karatsuba splitting; reduces mod p at every
/// level so coefficients stay single words.
fn karatsuba_full(fp: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.is_empty() {
        return Vec::new();
    }
    if b.len() <= KARATSUBA_THRESHOLD {
        return schoolbook_range(fp, a, b, a.len() + b.len() - 1);
    }
    if a.len() >= 2 * b.len() {
        // Strongly unbalanced: chop the long operand into b-sized pieces.
        let mut out = vec![0u64; a.len() + b.len() - 1];
        let step = b.len();
        let mut off = 0;
        while off < a.len() {
            let end = (off + step).min(a.len());
            let part = karatsuba_full(fp, &a[off..end], b);
            add_at(fp, &mut out, &part, off);
            off = end;
        }
        return out;
    }
    let h = a.len().div_ceil(2);
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = if b.len() > h { b.split_at(h) } else { (b, &[][..]) };
    let z0 = karatsuba_full(fp, a0, b0);
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        karatsuba_full(fp, a1, b1)
    };
    let mut s = a0.to_vec();
    for (d, &c) in s.iter_mut().zip(a1.iter()) {
        *d = fp.add(*d, c);
    }
    let mut t = b0.to_vec();
    for (d, &c) in t.iter_mut().zip(b1.iter()) {
        *d = fp.add(*d, c);
    }
    let mut z1 = karatsuba_full(fp, &s, &t);
    for (d, &c) in z1.iter_mut().zip(z0.iter()) {
        *d = fp.sub(*d, c);
    }
    for (d, &c) in z1.iter_mut().zip(z2.iter()) {
        *d = fp.sub(*d, c);
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    add_at(fp, &mut out, &z0, 0);
    add_at(fp, &mut out, &z1, h);
    add_at(fp, &mut out, &z2, 2 * h);
    out
}

/// Reciprocal of a power-series coefficient array (`a[0] != 0`) to `out_len`
/// terms, by the quadratic recurrence.
pub fn inv_array(fp: Fp, a: &[u64], out_len: usize) -> Vec<u64> {
    assert!(!a.is_empty() && a[0] != 0, "array inverse needs a unit");
    let p = fp.modulus() as u128;
    let a0_inv = fp.inv(a[0]);
    let mut out = vec![0u64; out_len];
    if out_len == 0 {
        return out;
    }
    out[0] = a0_inv;
    for k in 1..out_len {
        let hi = k.min(a.len() - 1);
        let mut acc: u128 = 0;
        let mut pending = 0u32;
        for j in 1..=hi {
            acc += a[j] as u128 * out[k - j] as u128;
            pending += 1;
            if pending == 8 {
                acc %= p;
                pending = 0;
            }
        }
        let s = (acc % p) as u64;
        out[k] = fp.mul(fp.neg(s), a0_inv);
    }
    out
}

/// Truncated Laurent series over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModSeries {
    fp: Fp,
    val: i64,
    coeffs: Vec<u64>,
}

impl ModSeries {
    pub fn new(fp: Fp, val: i64, coeffs: Vec<u64>) -> Self {
        let p = fp.modulus();
        let mut s = ModSeries {
            fp,
            val,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        };
        s.normalize();
        s
    }

    /// Takes already-reduced coefficients without the per-element reduction.
    pub fn from_reduced(fp: Fp, val: i64, coeffs: Vec<u64>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < fp.modulus()));
        let mut s = ModSeries { fp, val, coeffs };
        s.normalize();
        s
    }

    pub fn zero_to_prec(fp: Fp, prec: i64) -> Self {
        ModSeries { fp, val: prec, coeffs: Vec::new() }
    }

    pub fn one_to_prec(fp: Fp, prec: i64) -> Self {
        assert!(prec > 0);
        let mut coeffs = vec![0u64; prec as usize];
        coeffs[0] = 1;
        ModSeries { fp, val: 0, coeffs }
    }

    pub fn q_pow_to_prec(fp: Fp, k: i64, prec: i64) -> Self {
        assert!(prec > k);
        let mut coeffs = vec![0u64; (prec - k) as usize];
        coeffs[0] = 1;
        ModSeries { fp, val: k, coeffs }
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
    }

    pub fn field(&self) -> Fp {
        self.fp
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn val(&self) -> i64 {
        debug_assert!(!self.is_zero(), "valuation of (truncated) zero");
        self.val
    }

    pub fn prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff_at(&self, exp: i64) -> u64 {
        assert!(exp < self.prec(), "coefficient beyond known precision");
        if exp < self.val {
            return 0;
        }
        self.coeffs[(exp - self.val) as usize]
    }

    pub fn truncate_to(&self, prec: i64) -> ModSeries {
        assert!(prec <= self.prec(), "cannot extend precision by truncation");
        if prec <= self.val {
            return ModSeries::zero_to_prec(self.fp, prec);
        }
        ModSeries::from_reduced(
            self.fp,
            self.val,
            self.coeffs[..(prec - self.val) as usize].to_vec(),
        )
    }

    pub fn shift(&self, k: i64) -> ModSeries {
        ModSeries { fp: self.fp, val: self.val + k, coeffs: self.coeffs.clone() }
    }

    pub fn add(&self, other: &ModSeries) -> ModSeries {
        let fp = self.fp;
        let prec = self.prec().min(other.prec());
        let val = self.val.min(other.val).min(prec);
        let mut coeffs = vec![0u64; (prec - val) as usize];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let e = val + k as i64;
            let mut acc = 0u64;
            if e >= self.val && e < self.prec() {
                acc = self.coeffs[(e - self.val) as usize];
            }
            if e >= other.val && e < other.prec() {
                acc = fp.add(acc, other.coeffs[(e - other.val) as usize]);
            }
            *c = acc;
        }
        ModSeries::from_reduced(fp, val, coeffs)
    }

    pub fn neg(&self) -> ModSeries {
        ModSeries {
            fp: self.fp,
            val: self.val,
            coeffs: self.coeffs.iter().map(|&c| self.fp.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &ModSeries) -> ModSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> ModSeries {
        if c == 0 {
            return ModSeries::zero_to_prec(self.fp, self.prec());
        }
        let m = FixedMul::new(self.fp, c);
        ModSeries::from_reduced(
            self.fp,
            self.val,
            self.coeffs.iter().map(|&a| m.mul(a)).collect(),
        )
    }

    pub fn mul(&self, other: &ModSeries) -> ModSeries {
        if self.is_zero() || other.is_zero() {
            let prec = (self.prec() + other.val).min(other.prec() + self.val);
            return ModSeries::zero_to_prec(self.fp, prec);
        }
        let out_len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = mul_arrays(self.fp, &self.coeffs, &other.coeffs, out_len);
        ModSeries::from_reduced(self.fp, self.val + other.val, coeffs)
    }

    pub fn inv(&self) -> ModSeries {
        assert!(!self.is_zero(), "inverse of zero series");
        let coeffs = inv_array(self.fp, &self.coeffs, self.coeffs.len());
        ModSeries::from_reduced(self.fp, -self.val, coeffs)
    }

    pub fn pow(&self, e: u64) -> ModSeries {
        if e == 0 {
            return ModSeries::one_to_prec(
                self.fp,
                self.coeffs.len().max(1) as i64,
            );
        }
        let mut acc: Option<ModSeries> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.unwrap()
    }

    /// The operator `q d/dq`.
    pub fn q_derivative(&self) -> ModSeries {
        let fp = self.fp;
        ModSeries::from_reduced(
            fp,
            self.val,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| fp.mul(c, fp.reduce_i64(self.val + k as i64)))
                .collect(),
        )
    }

    /// Composition `self ∘ inner` to `out_len` terms, for a power-series
    /// `self` (val ≥ 0) and an inner series with valuation ≥ 1.
    ///
    /// Brent–Kung block decomposition: split the outer coefficient list into
    /// blocks of length ~sqrt(n); evaluate each block on precomputed powers of
    /// the inner series by scalar combinations; combine blocks by Horner with
    /// one series product per block.
    pub fn compose(&self, inner: &ModSeries, out_len: usize) -> ModSeries {
        assert!(self.val >= 0, "composition outer must be a power series");
        assert!(
            inner.is_zero() || inner.val() >= 1,
            "composition inner must vanish at 0"
        );
        assert!(
            self.prec() >= out_len as i64 && inner.prec() >= out_len as i64,
            "operands too short for requested composition length"
        );
        let fp = self.fp;
        // Both operands as plain power-series arrays.
        let mut outer = vec![0u64; self.val as usize];
        outer.extend_from_slice(&self.coeffs);
        outer.truncate(out_len);
        let mut inner_arr = vec![0u64; (inner.val.max(0) as usize).min(out_len)];
        for &c in &inner.coeffs {
            if inner_arr.len() >= out_len {
                break;
            }
            inner_arr.push(c);
        }
        inner_arr.resize(out_len, 0);
        let coeffs = compose_arrays(fp, &outer, inner_arr, out_len);
        ModSeries::from_reduced(fp, 0, coeffs)
    }

    /// Compositional inverse of a series `u = q + c2 q^2 + ...` (valuation 1,
    /// leading coefficient 1), to the same precision.
    ///
    /// Newton iteration with precision doubling; each step costs one block
    /// composition and one series division at the new precision.
    pub fn revert(&self) -> ModSeries {
        assert!(
            !self.is_zero() && self.val() == 1 && self.coeffs[0] == 1,
            "reversion expects q + O(q^2) with unit leading coefficient"
        );
        let fp = self.fp;
        let n = self.coeffs.len(); // valid coefficients of q^1..q^n
        // u as a power-series array (constant term zero): u[k] = coeff of q^k.
        let mut u = vec![0u64; n + 1];
        u[1..].copy_from_slice(&self.coeffs);
        // Work arrays hold coefficients of t^0..t^(len-1) for Q(t) = t + ...
        let mut q = vec![0u64; 2.min(n + 1)];
        if q.len() > 1 {
            q[1] = 1;
        }
        let mut prec = q.len(); // Q exact through t^(prec-1)
        while prec < n + 1 {
            let target = (2 * (prec - 1) + 1).min(n + 1);
            q.resize(target, 0);
            // e = u(Q) - t, correct through t^(target-1)
            let uq = compose_arrays(fp, &u, q.clone(), target);
            let mut e = uq;
            if target > 1 {
                e[1] = fp.sub(e[1], 1);
            }
            // u'(Q) = (u∘Q)' / Q'  — derivative here is d/dt.
            let d_uq = derivative_array(fp, &e_plus_t(fp, &e, target));
            let d_q = derivative_array(fp, &q);
            // Q'(0) = 1, so the division is by a unit.
            let d_q_inv = inv_array(fp, &d_q, target.saturating_sub(1).max(1));
            let quotient = mul_arrays(
                fp,
                &d_uq,
                &d_q_inv,
                target.saturating_sub(1).max(1),
            );
            // correction = e / u'(Q): multiply e by the reciprocal of u'(Q).
            let corr_den_inv =
                inv_array(fp, &quotient, target.saturating_sub(1).max(1));
            let corr = mul_arrays(fp, &e, &corr_den_inv, target);
            for k in 0..target {
                let c = corr.get(k).copied().unwrap_or(0);
                q[k] = fp.sub(q[k], c);
            }
            prec = target;
        }
        ModSeries::new(fp, 0, q)
    }
}

fn e_plus_t(fp: Fp, e: &[u64], len: usize) -> Vec<u64> {
    let mut v = e.to_vec();
    v.resize(len, 0);
    if len > 1 {
        v[1] = fp.add(v[1], 1);
    }
    v
}

fn derivative_array(fp: Fp, a: &[u64]) -> Vec<u64> {
    if a.len() <= 1 {
        return Vec::new();
    }
    (1..a.len())
        .map(|k| fp.mul(a[k], fp.reduce_i64(k as i64)))
        .collect()
}

/// Composition of plain power-series coefficient arrays: `outer(inner)` to
/// `out_len` terms; `inner[0]` must be zero.
pub fn compose_arrays(fp: Fp, outer: &[u64], inner: Vec<u64>, out_len: usize) -> Vec<u64> {
    assert!(inner.first().copied().unwrap_or(0) == 0, "inner[0] must vanish");
    let mut inner = inner;
    inner.resize(out_len.max(1), 0);
    if out_len == 0 {
        return Vec::new();
    }
    if outer.is_empty() {
        return vec![0; out_len];
    }
    let n_out = outer.len().min(out_len.max(1));
    // Block size ~ sqrt(total work).
    let b = ((n_out as f64).sqrt().ceil() as usize).max(1);
    let nb = n_out.div_ceil(b);
    // Powers inner^0..inner^(b-1), then big = inner^b.
    let mut powers: Vec<Vec<u64>> = Vec::with_capacity(b);
    let mut unit = vec![0u64; out_len];
    unit[0] = 1;
    powers.push(unit);
    for j in 1..b {
        let next = mul_arrays(fp, &powers[j - 1], &inner, out_len);
        powers.push(next);
    }
    let big = mul_arrays(fp, &powers[b - 1], &inner, out_len);
    // Horner over blocks, highest block first.
    let mut acc = vec![0u64; out_len];
    for blk in (0..nb).rev() {
        if blk + 1 < nb {
            acc = mul_arrays(fp, &acc, &big, out_len);
        }
        let base = blk * b;
        for j in 0..b {
            let idx = base + j;
            if idx >= n_out {
                break;
            }
            let c = outer[idx];
            if c == 0 {
                continue;
            }
            let m = FixedMul::new(fp, c);
            let pw = &powers[j];
            for (slot, &x) in acc.iter_mut().zip(pw.iter()) {
                let t = m.mul(x);
                let s = *slot + t;
                *slot = if s >= fp.modulus() { s - fp.modulus() } else { s };
            }
        }
    }
    acc
}
