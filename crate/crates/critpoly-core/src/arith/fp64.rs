//! Prime fields on 64-bit words.
//!
//! All multimodular work in this crate runs over odd primes `p < 2^62`.  That bound
//! leaves two spare bits so that a sum of two reduced residues never overflows a
//! word and the Shoup trick (multiplication by a fixed constant using a
//! precomputed `floor(c * 2^64 / p)`) is exact.  Products of arbitrary residues go
//! through `u128`.

/// Deterministic Miller–Rabin primality test for `u64`.
///
/// The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to be
/// exact for every integer below 3.3 * 10^24, which covers all of `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `a * b mod m` through a 128-bit product.
#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a^e mod m` by square-and-multiply.
pub fn pow_mod_u64(a: u64, mut e: u64, m: u64) -> u64 {
    let mut base = a % m;
    let mut acc = 1u64 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        e >>= 1;
    }
    acc
}

/// Arithmetic context for a fixed odd prime `p < 2^62`.
///
/// The struct is tiny and `Copy`; every operation takes it by value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Upper bound (exclusive) for supported moduli.
    pub const MAX_MODULUS: u64 = 1 << 62;

    /// Creates a context; panics if `p` is not an odd prime below `2^62`.
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < Self::MAX_MODULUS, "modulus out of range");
        assert!(is_prime_u64(p), "modulus must be prime");
        Fp { p }
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Reduces a signed machine integer into `[0, p)`.
    #[inline]
    pub fn reduce_i64(self, x: i64) -> u64 {
        let r = x.rem_euclid(self.p as i64);
        r as u64
    }

    /// Reduces an unsigned 128-bit value into `[0, p)`.
    #[inline]
    pub fn reduce_u128(self, x: u128) -> u64 {
        (x % self.p as u128) as u64
    }

    pub fn pow(self, a: u64, e: u64) -> u64 {
        pow_mod_u64(a, e, self.p)
    }

    /// Multiplicative inverse by Fermat; panics on zero.
    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.pow(a % self.p, self.p - 2)
    }
}

/// A constant multiplier with a precomputed Shoup companion word.
///
/// For fixed `c` and many `x`, `mul` costs two machine multiplications and one
/// conditional subtraction: with `c' = floor(c * 2^64 / p)` and
/// `q = floor(c' * x / 2^64)`, the value `c*x - q*p` is exact in wrapping
/// arithmetic and lies in `[0, 2p)`.
#[derive(Clone, Copy, Debug)]
pub struct FixedMul {
    c: u64,
    c_shoup: u64,
    p: u64,
}

impl FixedMul {
    #[inline]
    pub fn new(fp: Fp, c: u64) -> Self {
        debug_assert!(c < fp.p);
        FixedMul {
            c,
            c_shoup: (((c as u128) << 64) / fp.p as u128) as u64,
            p: fp.p,
        }
    }

    #[inline]
    pub fn constant(self) -> u64 {
        self.c
    }

    #[inline]
    pub fn mul(self, x: u64) -> u64 {
        let q = ((self.c_shoup as u128 * x as u128) >> 64) as u64;
        let r = self
            .c
            .wrapping_mul(x)
            .wrapping_sub(q.wrapping_mul(self.p));
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }
}

/// `dst[i] <- dst[i] - c * src[i] (mod p)` over the common prefix.
///
/// This is the inner loop of the relation solver; it uses a Shoup multiplier for
/// `p - c` so each element costs one widening multiply plus adds.
pub fn sub_scaled_assign(fp: Fp, dst: &mut [u64], src: &[u64], c: u64) {
    if c == 0 {
        return;
    }
    let mul = FixedMul::new(fp, fp.neg(c));
    let n = dst.len().min(src.len());
    let p = fp.modulus();
    for (d, &s) in dst[..n].iter_mut().zip(&src[..n]) {
        let t = mul.mul(s);
        let sum = *d + t;
        *d = if sum >= p { sum - p } else { sum };
    }
}

/// Deterministic stream of 62-bit primes, largest first.
///
/// Multimodular runs draw "solving" primes and fresh "verification" primes from
/// one shared descending sequence, so the set of moduli used for a given
/// computation is reproducible.
#[derive(Clone, Debug)]
pub struct PrimePool {
    next_candidate: u64,
}

impl PrimePool {
    pub fn new() -> Self {
        // Largest odd number below 2^62.
        PrimePool {
            next_candidate: (1u64 << 62) - 1,
        }
    }

    /// Starts the stream strictly below `bound` (used by tests for small fields).
    pub fn below(bound: u64) -> Self {
        let start = bound.min(1 << 62) - 1;
        PrimePool {
            next_candidate: start | 1,
        }
    }
}

impl Default for PrimePool {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimePool {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next_candidate > 2 {
            let n = self.next_candidate;
            self.next_candidate -= 2;
            if is_prime_u64(n) {
                return Some(n);
            }
        }
        None
    }
}
