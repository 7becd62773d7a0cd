//! Numerical invariants and cusp data of the modular curve X_0(N):
//! index, elliptic point counts, cusp count, genus, and the cusp classes
//! (denominator, width, multiplicity, explicit representatives).

use crate::error::{Error, Result};

/// Trial-division factorization of a positive word-size integer, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0u32;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = factorize(n);
    let mut out = vec![1u64];
    for (p, e) in f {
        let prev = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Kronecker-style symbol (-1 | p) for prime p: 0 at 2, ±1 by p mod 4.
fn minus_one_symbol(p: u64) -> i64 {
    match p % 4 {
        1 => 1,
        3 => -1,
        _ => 0, // p = 2
    }
}

/// Symbol (-3 | p) for prime p: 0 at 3, ±1 by p mod 3 (p = 2 counts as 2 mod 3).
fn minus_three_symbol(p: u64) -> i64 {
    match p % 3 {
        1 => 1,
        2 => -1,
        _ => 0, // p = 3
    }
}

/// The basic invariants of X_0(N).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gamma0 {
    pub n: u64,
    /// Index of the congruence subgroup in the full modular group.
    pub index: u64,
    /// Number of elliptic points of order 2.
    pub nu2: u64,
    /// Number of elliptic points of order 3.
    pub nu3: u64,
    /// Number of cusps.
    pub cusp_count: u64,
    pub genus: u64,
}

impl Gamma0 {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadInput("level must be positive".into()));
        }
        let factors = factorize(n);
        let mut index = n;
        for &(p, _) in &factors {
            index = index / p * (p + 1);
        }
        let nu2 = if n.is_multiple_of(4) {
            0
        } else {
            factors
                .iter()
                .map(|&(p, _)| 1 + minus_one_symbol(p))
                .product::<i64>() as u64
        };
        let nu3 = if n.is_multiple_of(9) {
            0
        } else {
            factors
                .iter()
                .map(|&(p, _)| 1 + minus_three_symbol(p))
                .product::<i64>() as u64
        };
        let cusp_count: u64 = divisors(n)
            .iter()
            .map(|&d| euler_phi(gcd_u64(d, n / d)))
            .sum();
        // 12 g = 12 + index - 3 nu2 - 4 nu3 - 6 cusps
        let twelve_g = 12 + index as i64 - 3 * nu2 as i64 - 4 * nu3 as i64
            - 6 * cusp_count as i64;
        assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus formula broke");
        Ok(Gamma0 {
            n,
            index,
            nu2,
            nu3,
            cusp_count,
            genus: (twelve_g / 12) as u64,
        })
    }
}

/// One Gamma_0(N)-equivalence class bundle: all cusps sharing a denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspClass {
    /// Common denominator d | N.
    pub denominator: u64,
    /// Ramification width of these cusps over the modular line.
    pub width: u64,
    /// Number of distinct cusps with this denominator.
    pub count: u64,
    /// Explicit representatives a/d, as (a, d) in lowest terms, a being the
    /// smallest numerator in its class (a = 0 for the zero cusp 0/1).
    pub representatives: Vec<(u64, u64)>,
}

/// A single cusp a/c of X_0(N) with its width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cusp {
    pub numer: u64,
    pub denom: u64,
    pub width: u64,
}

/// Width of the cusps with denominator `d | N`: N / (d * gcd(d, N/d)).
pub fn cusp_width(n: u64, d: u64) -> u64 {
    debug_assert!(n.is_multiple_of(d));
    n / (d * gcd_u64(d, n / d))
}

/// The cusp classes of X_0(N), ascending denominator.  For each divisor d of N
/// there are phi(gcd(d, N/d)) cusps a/d, with a ranging over residues mod
/// gcd(d, N/d) coprime to it; representatives are the smallest lifts with
/// gcd(a, d) = 1.
pub fn cusp_classes(n: u64) -> Vec<CuspClass> {
    divisors(n)
        .into_iter()
        .map(|d| {
            let g = gcd_u64(d, n / d);
            let width = cusp_width(n, d);
            let mut reps = Vec::new();
            if d == 1 {
                reps.push((0, 1));
            } else {
                for a0 in 1..=g {
                    if gcd_u64(a0, g) != 1 {
                        continue;
                    }
                    // lift a0 mod g to the smallest numerator in lowest terms
                    let mut a = a0;
                    while gcd_u64(a, d) != 1 {
                        a += g;
                    }
                    reps.push((a, d));
                }
                if g == 1 {
                    debug_assert_eq!(reps, vec![(1, d)]);
                }
            }
            CuspClass {
                denominator: d,
                width,
                count: euler_phi(g),
                representatives: reps,
            }
        })
        .collect()
}

/// Flat list of all cusps with widths, ascending denominator.
pub fn all_cusps(n: u64) -> Vec<Cusp> {
    cusp_classes(n)
        .into_iter()
        .flat_map(|class| {
            class
                .representatives
                .into_iter()
                .map(move |(a, d)| Cusp { numer: a, denom: d, width: class.width })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_helpers() {
        assert_eq!(factorize(48), vec![(2, 4), (3, 1)]);
        assert_eq!(factorize(37), vec![(37, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(37), 36);
    }

    #[test]
    fn classical_small_genera() {
        // First levels with genus 1 and 2, plus genus-0 cases.
        for (n, g) in [
            (1u64, 0u64),
            (10, 0),
            (11, 1),
            (15, 1),
            (17, 1),
            (22, 2),
            (23, 2),
        ] {
            assert_eq!(Gamma0::new(n).unwrap().genus, g, "N={n}");
        }
    }

    #[test]
    fn invariants_at_37() {
        let g = Gamma0::new(37).unwrap();
        assert_eq!(g.index, 38);
        assert_eq!(g.nu2, 2);
        assert_eq!(g.nu3, 2);
        assert_eq!(g.cusp_count, 2);
        assert_eq!(g.genus, 2);
    }

    #[test]
    fn genus_table_for_studied_levels() {
        for (n, genus) in [
            (37u64, 2u64),
            (44, 4),
            (48, 3),
            (67, 5),
            (89, 7),
            (389, 32),
            (433, 35),
            (446, 55),
            (563, 47),
            (571, 47),
            (643, 53),
            (655, 65),
            (664, 81),
            (681, 75),
            (707, 67),
            (709, 58),
            (718, 89),
            (794, 98),
            (817, 71),
            (916, 113),
            (944, 115),
            (997, 82),
        ] {
            assert_eq!(Gamma0::new(n).unwrap().genus, genus, "N={n}");
        }
    }

    #[test]
    fn widths_sum_to_index() {
        // Sum of cusp widths (with multiplicity) equals the index, for a wide
        // sweep of levels.
        for n in 1..=400u64 {
            let inv = Gamma0::new(n).unwrap();
            let total: u64 = cusp_classes(n)
                .iter()
                .map(|c| c.width * c.count)
                .sum();
            assert_eq!(total, inv.index, "N={n}");
            let count: u64 = cusp_classes(n).iter().map(|c| c.count).sum();
            assert_eq!(count, inv.cusp_count, "N={n}");
        }
    }

    #[test]
    fn parity_constraints_for_assembly() {
        // index ≡ nu2 (mod 2) and index ≡ nu3 (mod 3): needed so the critical
        // polynomial assembly exponents are integers.
        for n in 1..=400u64 {
            let inv = Gamma0::new(n).unwrap();
            assert_eq!((inv.index + inv.nu2) % 2, 0, "N={n}");
            assert_eq!((inv.index + 2 * inv.nu3) % 3, 0, "N={n}");
        }
    }

    #[test]
    fn cusp_classes_at_48() {
        let classes = cusp_classes(48);
        let denoms: Vec<u64> = classes.iter().map(|c| c.denominator).collect();
        assert_eq!(denoms, vec![1, 2, 3, 4, 6, 8, 12, 16, 24, 48]);
        let by_denom = |d: u64| classes.iter().find(|c| c.denominator == d).unwrap();
        // The order-4 classes: two cusps each at denominators 4 and 12.
        assert_eq!(by_denom(4).representatives, vec![(1, 4), (3, 4)]);
        assert_eq!(by_denom(12).representatives, vec![(1, 12), (7, 12)]);
        assert_eq!(by_denom(48).representatives, vec![(1, 48)]);
        assert_eq!(by_denom(48).width, 1);
        assert_eq!(by_denom(1).width, 48);
        assert_eq!(by_denom(1).representatives, vec![(0, 1)]);
        let total: u64 = classes.iter().map(|c| c.count).sum();
        assert_eq!(total, Gamma0::new(48).unwrap().cusp_count);
    }

    #[test]
    fn representatives_are_in_lowest_terms() {
        for n in [37u64, 44, 48, 67, 89, 389, 664] {
            for cusp in all_cusps(n) {
                if cusp.denom == 1 {
                    assert_eq!(cusp.numer, 0);
                } else {
                    assert_eq!(gcd_u64(cusp.numer, cusp.denom), 1, "N={n} cusp");
                }
                assert_eq!(cusp.width, cusp_width(n, cusp.denom));
            }
        }
    }
}
