//! The Lefschetz trace identity for the cuboid surface and the exact
//! re-derivation of its seven motive multiplicities.
//!
//! For every odd prime p the surface count decomposes as
//!
//! ```text
//! #S(F_p) = p^2 + 1 + m1 a_p(h16) + m2 a_p(h32) + m3 a_p(h8)
//!           + p (m4 + m5 chi_m4(p) + m6 chi_m8(p) + m7 chi_8(p))
//! ```
//!
//! with (m1..m7) = (3, 1, 3, 10, 2, 1, 3). `verify_identity` checks this
//! residual-by-residual; `fit_multiplicities` recovers the vector from
//! counts alone by exact fraction-free elimination (Bareiss) over i128,
//! refusing rank-deficient prime sets instead of guessing. Note that at
//! least two primes = 1 (mod 8) are needed for rank 7: with fewer, the
//! columns satisfy a linear relation on the sampled primes and the system
//! determines only a one-parameter family.
//!
//! The rank-16 transcendental-plus-algebraic bookkeeping: 2(m1+m2+m3) +
//! (m4+..+m7) = 30 is the second Betti number of S, and the 48 exceptional
//! classes of the resolution raise it to 78.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cmforms::{self, CmError, FormId, H16InertConvention};
use crate::counting::{self, CountError};
use crate::ffield::{odd_primes_upto, PrimeContext, QuadChar};

/// Errors from identity verification and fitting.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error(transparent)]
    Cm(#[from] CmError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("need at least {need} odd primes, got {got}")]
    TooFewPrimes { got: usize, need: usize },
    #[error("design matrix has rank {rank} < 7; the multiplicities are not determined (supply more primes, including at least two = 1 mod 8)")]
    RankDeficient { rank: usize },
    #[error("no exact solution: nonzero residuals at primes {0:?}")]
    Inconsistent(Vec<u64>),
    #[error("exact solution is not integral at m{index}")]
    NonIntegral { index: usize },
    #[error("intermediate exceeds i128 during exact elimination")]
    Overflow,
}

/// Labels of the seven basis trace functions, in multiplicity order.
pub const BASIS_LABELS: [&str; 7] = [
    "a_h16", "a_h32", "a_h8", "p", "chi_m4*p", "chi_m8*p", "chi_8*p",
];

/// The seven multiplicities (m1..m7) against `BASIS_LABELS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiplicityVector(pub [i64; 7]);

impl MultiplicityVector {
    /// The vector the fit determines on any full-rank prime set.
    pub const CANONICAL: MultiplicityVector = MultiplicityVector([3, 1, 3, 10, 2, 1, 3]);

    /// 2 (m1+m2+m3) + (m4+m5+m6+m7): the rank of H^2 of the surface.
    pub fn h2_rank(&self) -> i64 {
        let m = self.0;
        2 * (m[0] + m[1] + m[2]) + m[3] + m[4] + m[5] + m[6]
    }

    /// h2_rank plus the 48 exceptional classes of the resolution.
    pub fn resolved_rank(&self) -> i64 {
        self.h2_rank() + 48
    }
}

/// Convention flags a fit or verification ran under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Conventions {
    pub h16_inert: H16InertConvention,
}

/// Multiplicities of the Galois characters on the rank-64 algebraic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PicardSplit {
    pub trivial: i64,
    pub chi_m4: i64,
    pub chi_m8: i64,
    pub chi_8: i64,
    pub total: i64,
}

/// The split under both exceptional-action hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PicardSplits {
    pub twisted: PicardSplit,
    pub permutation: PicardSplit,
}

/// Result of a verification or fit over a prime range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FitReport {
    pub multiplicities: MultiplicityVector,
    /// count_surface(p) - trace_rhs(p, m) per prime; all zero on success.
    pub residuals: BTreeMap<u64, i64>,
    pub all_zero: bool,
    pub conventions: Conventions,
    pub picard_splits: PicardSplits,
}

/// The seven basis trace values (a_h16, a_h32, a_h8, p, chi_m4 p, chi_m8 p,
/// chi_8 p) at p.
pub fn motive_traces(p: u64, conv: H16InertConvention) -> Result<[i64; 7], CmError> {
    let pi = p as i64;
    Ok([
        cmforms::ap_with(FormId::H16, p, conv)?,
        cmforms::ap_with(FormId::H32, p, conv)?,
        cmforms::ap_with(FormId::H8, p, conv)?,
        pi,
        QuadChar::ChiM4.value_at_odd(pi) as i64 * pi,
        QuadChar::ChiM8.value_at_odd(pi) as i64 * pi,
        QuadChar::Chi8.value_at_odd(pi) as i64 * pi,
    ])
}

/// p^2 + 1 + Sum m_i t_i(p).
pub fn trace_rhs(p: u64, m: &MultiplicityVector, conv: H16InertConvention) -> Result<i64, CmError> {
    let t = motive_traces(p, conv)?;
    let pi = p as i64;
    Ok(pi * pi + 1 + (0..7).map(|i| m.0[i] * t[i]).sum::<i64>())
}

/// Surface counts for all odd primes <= pmax, computed in parallel.
pub fn surface_counts_upto(pmax: u64) -> Result<BTreeMap<u64, u64>, CountError> {
    use rayon::prelude::*;
    odd_primes_upto(pmax)
        .par_iter()
        .map(|&p| {
            let ctx = PrimeContext::new(p)?;
            Ok((p, counting::count_surface_fast(&ctx)?.count))
        })
        .collect()
}

/// Check #S(F_p) = trace_rhs(p, m) for every odd prime 3 <= p <= pmax.
pub fn verify_identity(
    pmax: u64,
    m: &MultiplicityVector,
    conv: H16InertConvention,
) -> Result<FitReport, FitError> {
    let counts = surface_counts_upto(pmax)?;
    verify_identity_from_counts(&counts, m, conv)
}

/// As `verify_identity`, with the counts supplied by the caller.
pub fn verify_identity_from_counts(
    counts: &BTreeMap<u64, u64>,
    m: &MultiplicityVector,
    conv: H16InertConvention,
) -> Result<FitReport, FitError> {
    let mut residuals = BTreeMap::new();
    for (&p, &count) in counts {
        residuals.insert(p, count as i64 - trace_rhs(p, m, conv)?);
    }
    let all_zero = residuals.values().all(|&r| r == 0);
    Ok(FitReport {
        multiplicities: *m,
        residuals,
        all_zero,
        conventions: Conventions { h16_inert: conv },
        picard_splits: picard_report(m),
    })
}

/// Exactly solve Sum m_i t_i(p) = #S(F_p) - p^2 - 1 over the given primes.
pub fn fit_multiplicities(
    primes: &[u64],
    conv: H16InertConvention,
) -> Result<MultiplicityVector, FitError> {
    use rayon::prelude::*;
    let counts: BTreeMap<u64, u64> = primes
        .par_iter()
        .map(|&p| {
            let ctx = PrimeContext::new(p).map_err(CountError::from)?;
            Ok::<_, CountError>((p, counting::count_surface_fast(&ctx)?.count))
        })
        .collect::<Result<_, _>>()?;
    fit_from_counts(&counts, conv)
}

/// As `fit_multiplicities`, with the counts supplied by the caller.
pub fn fit_from_counts(
    counts: &BTreeMap<u64, u64>,
    conv: H16InertConvention,
) -> Result<MultiplicityVector, FitError> {
    if counts.len() < 8 {
        return Err(FitError::TooFewPrimes {
            got: counts.len(),
            need: 8,
        });
    }
    let mut rows: Vec<[i128; 8]> = Vec::with_capacity(counts.len());
    for (&p, &count) in counts {
        let t = motive_traces(p, conv)?;
        let mut row = [0i128; 8];
        for i in 0..7 {
            row[i] = t[i] as i128;
        }
        row[7] = count as i128 - (p as i128) * (p as i128) - 1;
        rows.push(row);
    }
    let m = solve_exact(&mut rows)?;
    // validate on every supplied prime, solve rows included
    let bad: Vec<u64> = counts
        .iter()
        .filter(|&(&p, &count)| {
            trace_rhs(p, &m, conv)
                .map(|rhs| rhs != count as i64)
                .unwrap_or(true)
        })
        .map(|(&p, _)| p)
        .collect();
    if !bad.is_empty() {
        return Err(FitError::Inconsistent(bad));
    }
    Ok(m)
}

/// Fit and package the full report (residuals, conventions, Picard splits).
pub fn fit_report(
    counts: &BTreeMap<u64, u64>,
    conv: H16InertConvention,
) -> Result<FitReport, FitError> {
    let m = fit_from_counts(counts, conv)?;
    verify_identity_from_counts(counts, &m, conv)
}

/// Fraction-free Gaussian elimination (Bareiss) on the augmented system,
/// followed by exact integer back-substitution.
///
/// Rank 7 means all seven design columns pivot in order, leaving a proper
/// upper triangle; a skipped column proves a dependence on the sampled
/// primes and the fit refuses. Inconsistency with the rows beyond the
/// pivots is caught by the caller's full validation pass.
fn solve_exact(rows: &mut [[i128; 8]]) -> Result<MultiplicityVector, FitError> {
    let n = rows.len();
    let mut prev: i128 = 1;
    let mut rank = 0usize;
    for col in 0..7 {
        let Some(pr) = (rank..n).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        for i in (rank + 1)..n {
            for j in (col + 1)..8 {
                let a = rows[rank][col]
                    .checked_mul(rows[i][j])
                    .ok_or(FitError::Overflow)?;
                let b = rows[i][col]
                    .checked_mul(rows[rank][j])
                    .ok_or(FitError::Overflow)?;
                let num = a.checked_sub(b).ok_or(FitError::Overflow)?;
                assert_eq!(num % prev, 0, "fraction-free elimination lost exactness");
                rows[i][j] = num / prev;
            }
            rows[i][col] = 0;
        }
        prev = rows[rank][col];
        rank += 1;
    }
    if rank < 7 {
        return Err(FitError::RankDeficient { rank });
    }
    let mut m = [0i64; 7];
    for k in (0..7).rev() {
        let mut acc = rows[k][7];
        for j in (k + 1)..7 {
            acc = acc
                .checked_sub(
                    rows[k][j]
                        .checked_mul(m[j] as i128)
                        .ok_or(FitError::Overflow)?,
                )
                .ok_or(FitError::Overflow)?;
        }
        if acc % rows[k][k] != 0 {
            return Err(FitError::NonIntegral { index: k + 1 });
        }
        let v = acc / rows[k][k];
        m[k] = i64::try_from(v).map_err(|_| FitError::Overflow)?;
    }
    Ok(MultiplicityVector(m))
}

/// Character multiplicities of the rank-64 algebraic lattice under both
/// exceptional hypotheses: the twisted action adds (24, 24, 0, 0) Tate
/// classes to (m4, m5, m6, m7), the permutation action adds (36, 12, 0, 0).
pub fn picard_report(m: &MultiplicityVector) -> PicardSplits {
    let mk = |dt: i64, dx: i64| PicardSplit {
        trivial: m.0[3] + dt,
        chi_m4: m.0[4] + dx,
        chi_m8: m.0[5],
        chi_8: m.0[6],
        total: m.0[3] + dt + m.0[4] + dx + m.0[5] + m.0[6],
    };
    PicardSplits {
        twisted: mk(24, 24),
        permutation: mk(36, 12),
    }
}
