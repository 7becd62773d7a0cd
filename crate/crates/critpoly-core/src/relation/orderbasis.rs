//! Iterative minimal approximant bases over F_p (van Barel–Bultheel order
//! basis).
//!
//! Given input series F_0, ..., F_{m−1} ∈ F_p[[t]] and a target order Σ, the
//! solver maintains m polynomial vectors B_r ∈ F_p[t]^m with the invariant
//! Σ_i B_r[i]·F_i ≡ 0 (mod t^σ) at every intermediate order σ.  One order is
//! absorbed per step: among the rows whose residual series has a nonzero
//! coefficient at t^σ, the row of minimal nominal degree pivots (ties to the
//! lowest index); every other such row subtracts the scalar multiple of the
//! pivot that clears its coefficient, and the pivot is multiplied by t.
//!
//! The result is a basis of the order-Σ approximant module with the
//! predictable-degree property: every approximant of componentwise degree
//! ≤ b is an F_p-combination of t^e·B_r with e + deg B_r ≤ b.  In particular
//! the bounded-degree kernel the relation algorithms need is spanned by the
//! qualifying rows, and its minimal element is the minimal qualifying row up
//! to a scalar — no elimination pass and no bivariate gcd afterwards.
//!
//! Residual tails are kept explicitly (the axpy is the hot loop, one Shoup
//! multiply per word); multiplying a residual by t is an O(1) logical shift.

use crate::arith::fp64::{sub_scaled_assign, Fp};

/// One basis row: m ascending-coefficient polynomials, all stored at the
/// uniform length `degree + 1`, plus the invariant order it certifies.
#[derive(Clone, Debug)]
pub struct ApproximantRow {
    pub components: Vec<Vec<u64>>,
    pub degree: usize,
}

/// A complete order basis at order `order`.
#[derive(Clone, Debug)]
pub struct OrderBasis {
    pub rows: Vec<ApproximantRow>,
    pub order: usize,
}

impl OrderBasis {
    /// Indices of rows usable under a componentwise degree bound.
    pub fn qualifying(&self, max_deg: usize) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| self.rows[r].degree <= max_deg)
            .collect()
    }

    /// Dimension of the degree-bounded kernel: each qualifying row B_r
    /// contributes the shifts t^e·B_r with e ≤ max_deg − deg B_r.
    pub fn kernel_dimension(&self, max_deg: usize) -> usize {
        self.rows
            .iter()
            .filter(|r| r.degree <= max_deg)
            .map(|r| max_deg - r.degree + 1)
            .sum()
    }

    /// The minimal qualifying row (minimal degree, ties to lowest index).
    pub fn minimal_row(&self, max_deg: usize) -> Option<&ApproximantRow> {
        self.rows
            .iter()
            .filter(|r| r.degree <= max_deg)
            .min_by_key(|r| r.degree)
    }
}

/// Runs the order-basis recursion through all `order` orders.
///
/// Every input must carry at least `order` coefficients (t^0..t^{order−1}).
pub fn minimal_approximant_basis(
    fp: Fp,
    inputs: &[Vec<u64>],
    order: usize,
) -> OrderBasis {
    let m = inputs.len();
    assert!(m > 0, "empty input list");
    for (i, f) in inputs.iter().enumerate() {
        assert!(
            f.len() >= order,
            "input {i} shorter ({}) than the target order ({order})",
            f.len()
        );
    }
    // Basis starts as the identity; residual r starts as F_r itself.
    let mut rows: Vec<ApproximantRow> = (0..m)
        .map(|r| ApproximantRow {
            components: (0..m).map(|i| vec![(r == i) as u64]).collect(),
            degree: 0,
        })
        .collect();
    // residual[r][e - shift[r]] is the coefficient of t^e in S_r; entries
    // below the current order are stale and never read again.
    let mut residual: Vec<Vec<u64>> =
        inputs.iter().map(|f| f[..order].to_vec()).collect();
    let mut shift = vec![0usize; m];

    for sigma in 0..order {
        let mut pivot: Option<usize> = None;
        for r in 0..m {
            if residual[r][sigma - shift[r]] != 0
                && pivot.is_none_or(|p| rows[r].degree < rows[p].degree)
            {
                pivot = Some(r);
            }
        }
        let Some(p) = pivot else { continue };
        let d_inv = fp.inv(residual[p][sigma - shift[p]]);
        let piv_res = std::mem::take(&mut residual[p]);
        let piv_row = std::mem::take(&mut rows[p].components);
        let (piv_deg, piv_shift) = (rows[p].degree, shift[p]);
        for r in 0..m {
            if r == p {
                continue;
            }
            let d = residual[r][sigma - shift[r]];
            if d == 0 {
                continue;
            }
            let c = fp.mul(d, d_inv);
            // Residual tails: S_r -= c·S_p over exponents sigma..order.
            sub_scaled_assign(
                fp,
                &mut residual[r][sigma - shift[r]..order - shift[r]],
                &piv_res[sigma - piv_shift..order - piv_shift],
                c,
            );
            // Row combination: B_r -= c·B_p componentwise.  The pivot has
            // minimal degree, so the target's nominal degree is unchanged.
            debug_assert!(piv_deg <= rows[r].degree);
            for (dst, src) in rows[r].components.iter_mut().zip(piv_row.iter()) {
                sub_scaled_assign(fp, dst, src, c);
            }
        }
        residual[p] = piv_res;
        rows[p].components = piv_row;
        // Pivot absorbs the order: B_p *= t, S_p *= t.
        shift[p] += 1;
        for comp in &mut rows[p].components {
            comp.insert(0, 0);
        }
        rows[p].degree += 1;
    }

    OrderBasis { rows, order }
}

/// Naive re-evaluation: does Σ_i row[i]·F_i vanish mod t^order?  Test oracle
/// and post-run diagnostic; quadratic and proud of it.
pub fn row_annihilates(
    fp: Fp,
    components: &[Vec<u64>],
    inputs: &[Vec<u64>],
    order: usize,
) -> bool {
    let p = fp.modulus() as u128;
    for e in 0..order {
        let mut acc: u128 = 0;
        for (poly, f) in components.iter().zip(inputs.iter()) {
            for (k, &c) in poly.iter().enumerate() {
                if c != 0 && k <= e {
                    acc = (acc + c as u128 * f[e - k] as u128) % p;
                }
            }
        }
        if acc != 0 {
            return false;
        }
    }
    true
}

/// Direct bounded-degree kernel by dense Gaussian elimination on the
/// (order × m(max_deg+1)) coefficient matrix: every vector (f_0,...,f_{m−1})
/// with deg f_i ≤ max_deg and Σ f_i·F_i ≡ 0 mod t^order.  This is the literal
/// linear-algebra definition the order basis is checked against; exponential
/// in nothing but patience, so test sizes only.
pub fn bounded_kernel_elimination(
    fp: Fp,
    inputs: &[Vec<u64>],
    order: usize,
    max_deg: usize,
) -> Vec<Vec<Vec<u64>>> {
    let m = inputs.len();
    let width = m * (max_deg + 1);
    // mat[e][col] with col = i*(max_deg+1)+k -> coefficient of t^e in t^k·F_i.
    let mut mat: Vec<Vec<u64>> = (0..order)
        .map(|e| {
            let mut row = vec![0u64; width];
            for i in 0..m {
                for k in 0..=max_deg {
                    if k <= e && e - k < inputs[i].len() {
                        row[i * (max_deg + 1) + k] = inputs[i][e - k];
                    }
                }
            }
            row
        })
        .collect();
    // Row-reduce; record pivot column per reduced row.
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..width {
        let Some(r) = (rank..order).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rank, r);
        let inv = fp.inv(mat[rank][col]);
        for x in mat[rank].iter_mut() {
            *x = fp.mul(*x, inv);
        }
        let pivot_row = std::mem::take(&mut mat[rank]);
        for (r, row) in mat.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let c = row[col];
                sub_scaled_assign(fp, row, &pivot_row, c);
            }
        }
        mat[rank] = pivot_row;
        pivots.push(col);
        rank += 1;
        if rank == order.min(width) {
            break;
        }
    }
    // Free columns parameterize the kernel.
    let mut kernel = Vec::new();
    for free in 0..width {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; width];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = fp.neg(mat[r][free]);
        }
        let polys: Vec<Vec<u64>> = (0..m)
            .map(|i| v[i * (max_deg + 1)..(i + 1) * (max_deg + 1)].to_vec())
            .collect();
        kernel.push(polys);
    }
    kernel
}
