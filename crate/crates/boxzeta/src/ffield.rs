//! Prime-field plumbing: square-root fiber counts over F_p and F_{p^2},
//! Legendre symbols, and the three quadratic characters of conductor 4 and 8.
//!
//! All point-counting kernels in this crate reduce to the fiber size of the
//! squaring map, sqrt_count(t) = #{b in F_p : b^2 = t}, which is 1 for t = 0
//! and 1 + legendre(t, p) otherwise. A `PrimeContext` tabulates these fibers
//! once per prime; `QuadExt` does the same over F_{p^2} for degree-2 counts.
//!
//! p = 2 is rejected everywhere. Every conductor in sight is a power of 2, so
//! 2 is the unique bad prime and no formula here is meaningful there.

use thiserror::Error;

/// Errors from prime validation and character evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("quadratic characters of conductor 4 and 8 are undefined at even argument {0}")]
    EvenArgument(i64),
}

/// Trial-division primality test restricted to odd primes.
pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All odd primes 3 <= p <= n, ascending.
pub fn odd_primes_upto(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 3..=n {
        if p % 2 == 1 && !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u64 = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Legendre symbol (a|p) in {-1, 0, 1} by Euler's criterion.
///
/// Independent of the table route in `PrimeContext`; the two are
/// cross-checked in tests.
pub fn legendre(a: i64, p: u64) -> Result<i32, FieldError> {
    if !is_odd_prime(p) {
        return Err(FieldError::NotOddPrime(p));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    })
}

/// The three quadratic characters cutting out Q(i), Q(sqrt 2), Q(sqrt -2).
///
/// On odd n: chi_m4(n) = +1 iff n = 1 (mod 4); chi_8(n) = +1 iff n = +-1
/// (mod 8); chi_m8(n) = +1 iff n = 1, 3 (mod 8). Equivalently the Kronecker
/// symbols (-4|n), (8|n), (-8|n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadChar {
    ChiM4,
    Chi8,
    ChiM8,
}

impl QuadChar {
    /// Character value at odd n (any sign); even n is rejected.
    pub fn value(self, n: i64) -> Result<i32, FieldError> {
        if n % 2 == 0 {
            return Err(FieldError::EvenArgument(n));
        }
        Ok(self.value_at_odd(n))
    }

    /// As `value` but with oddness asserted rather than reported.
    pub fn value_at_odd(self, n: i64) -> i32 {
        debug_assert!(n % 2 != 0);
        let ok = match self {
            QuadChar::ChiM4 => n.rem_euclid(4) == 1,
            QuadChar::Chi8 => matches!(n.rem_euclid(8), 1 | 7),
            QuadChar::ChiM8 => matches!(n.rem_euclid(8), 1 | 3),
        };
        if ok {
            1
        } else {
            -1
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QuadChar::ChiM4 => "chi_m4",
            QuadChar::Chi8 => "chi_8",
            QuadChar::ChiM8 => "chi_m8",
        }
    }
}

impl std::fmt::Display for QuadChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Immutable per-prime context: the sqrt-count table and the least
/// non-residue nu (used as the defining square root for F_{p^2}).
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    sqrt_count: Vec<u8>,
    nonresidue: u64,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !is_odd_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        let mut sqrt_count = vec![0u8; p as usize];
        for b in 0..p {
            sqrt_count[(b * b % p) as usize] += 1;
        }
        let nonresidue = (2..p)
            .find(|&t| sqrt_count[t as usize] == 0)
            .expect("odd p has (p-1)/2 non-residues");
        Ok(PrimeContext {
            p,
            sqrt_count,
            nonresidue,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// #{b in F_p : b^2 = t} for 0 <= t < p; values in {0, 1, 2}.
    #[inline]
    pub fn sqrt_count(&self, t: u64) -> u64 {
        self.sqrt_count[t as usize] as u64
    }

    /// Raw table indexed by residue, for hot loops.
    #[inline]
    pub fn sqrt_count_table(&self) -> &[u8] {
        &self.sqrt_count
    }

    /// Least quadratic non-residue nu of F_p.
    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    /// Legendre symbol via the table (0 at 0, else +-1).
    pub fn legendre(&self, a: i64) -> i32 {
        let r = a.rem_euclid(self.p as i64) as u64;
        self.sqrt_count(r) as i32 - 1
    }
}

/// Element of F_{p^2} = F_p(w), w^2 = nu, stored as (a, b) = a + b w.
pub type Fp2 = (u64, u64);

/// Arithmetic context for F_{p^2}.
///
/// Elements are indexed 0..p^2 by a + p b, so degree-2 kernels can use flat
/// tables exactly like the degree-1 ones.
#[derive(Debug, Clone)]
pub struct QuadExt {
    p: u64,
    nu: u64,
}

impl QuadExt {
    pub fn new(ctx: &PrimeContext) -> Self {
        QuadExt {
            p: ctx.p(),
            nu: ctx.nonresidue(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.p * self.p
    }

    pub const ZERO: Fp2 = (0, 0);
    pub const ONE: Fp2 = (1, 0);

    #[inline]
    pub fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    #[inline]
    pub fn sub(&self, x: Fp2, y: Fp2) -> Fp2 {
        ((x.0 + self.p - y.0) % self.p, (x.1 + self.p - y.1) % self.p)
    }

    #[inline]
    pub fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p;
        (
            (x.0 * y.0 + self.nu % p * (x.1 * y.1 % p)) % p,
            (x.0 * y.1 + x.1 * y.0) % p,
        )
    }

    /// Multiplicative inverse via the norm a^2 - nu b^2; None at zero.
    pub fn inverse(&self, x: Fp2) -> Option<Fp2> {
        if x == Self::ZERO {
            return None;
        }
        let p = self.p;
        let norm = (x.0 * x.0 % p + p - self.nu * (x.1 * x.1 % p) % p) % p;
        let ninv = pow_mod(norm, p - 2, p);
        Some((x.0 * ninv % p, (p - x.1 % p) % p * ninv % p))
    }

    pub fn pow(&self, mut x: Fp2, mut e: u64) -> Fp2 {
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// #{b in F_{p^2} : b^2 = t}, detecting squares by raising to (p^2-1)/2.
    pub fn sqrt_count2(&self, t: Fp2) -> u64 {
        if t == Self::ZERO {
            return 1;
        }
        if self.pow(t, (self.q() - 1) / 2) == Self::ONE {
            2
        } else {
            0
        }
    }

    /// Flat index of an element, a + p b.
    #[inline]
    pub fn index(&self, x: Fp2) -> usize {
        (x.0 + self.p * x.1) as usize
    }

    /// Element at a flat index.
    #[inline]
    pub fn element(&self, i: usize) -> Fp2 {
        (i as u64 % self.p, i as u64 / self.p)
    }

    /// Full sqrt-count table over F_{p^2}, built by enumerating squares.
    ///
    /// This is the route the counting kernels use; tests check it against
    /// `sqrt_count2`. The table has p^2 entries, hence the size guard.
    pub fn sqrt_count_fiber_table(&self) -> Vec<u8> {
        assert!(self.p <= 1000, "extension-field table guard: p <= 1000");
        let q = self.q() as usize;
        let mut t = vec![0u8; q];
        for i in 0..q {
            let x = self.element(i);
            t[self.index(self.mul(x, x))] += 1;
        }
        t
    }
}
