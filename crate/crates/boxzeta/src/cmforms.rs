//! Exact Fourier coefficients of the six CM newforms attached to the cuboid
//! surface, computed from prime splitting in Z[i] and Z[sqrt(-2)].
//!
//! The coefficient laws, all at odd primes p:
//!
//! - f32 (weight 2, trivial character, CM by Q(i)): a_p = 2a where
//!   p = a^2 + b^2 with a odd and the sign of a fixed by a + b = 1 (mod 4)
//!   for one of the two signs of b; a_p = 0 at p = 3 (mod 4).
//! - f64 = f32 twisted by chi_8 (equivalently chi_m8; the twists agree
//!   wherever f32 is nonzero).
//! - h8 (weight 3, character chi_m8, CM by Q(sqrt(-2))): a_p = 2(a^2 - 2b^2)
//!   where p = a^2 + 2b^2; a_p = 0 at p = 5, 7 (mod 8).
//! - h32 = h8 twisted by chi_8.
//! - h16 (weight 3, character chi_m4, CM by Q(i)): a_p = 2(a^2 - b^2) from
//!   the two-squares decomposition at p = 1 (mod 4). At p = 3 (mod 4) the
//!   default is a_p = 0; a convention switch selects -2p instead, the value
//!   forced by reading the tensor decomposition f32^(x2) = h16 + Q(-1)^2
//!   literally at inert primes. The two conventions differ in the surface
//!   trace by 6p at p = 3 (mod 4), and the brute-force count at p = 3
//!   (24 points, at least the 24 rational singular points) selects 0.
//! - g64 pair (weight 2, character chi_8, CM by Q(sqrt(-2))): only the
//!   conjugation-stable pair {a, conj(a)} is determined by point counts; it
//!   is recovered from #X(F_p) and #X(F_{p^2}) by peeling the f32 and f64
//!   contributions off the first two power sums of Frobenius on H^1(X).
//!
//! Even-indexed coefficients are never produced: 2 is the unique bad prime
//! (every level in sight is a power of 2) and the CM recipes above say
//! nothing about a_2. Series output marks even indices excluded.

use serde::{Deserialize, Serialize};

use crate::counting::{self, CmCurve, CountError};
use crate::ffield::{is_odd_prime, FieldError, PrimeContext, QuadChar};

/// Errors from coefficient computation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CmError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("p = {p} is not {need}")]
    WrongResidue { p: u64, need: &'static str },
    #[error("{0:?} is pair-valued; use extract_g_pair or qexp")]
    PairValued(FormId),
    #[error("{0:?} has no elliptic-curve model; the oracle covers f32 and f64")]
    NotElliptic(FormId),
    #[error("{op} is limited to n <= {max}, got {n}")]
    LimitGuard { op: &'static str, n: u64, max: u64 },
}

/// The six newforms; the number in the name is the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormId {
    F32,
    F64,
    #[serde(rename = "g64")]
    G64Pair,
    H8,
    H16,
    H32,
}

impl FormId {
    pub fn weight(self) -> u32 {
        match self {
            FormId::F32 | FormId::F64 | FormId::G64Pair => 2,
            FormId::H8 | FormId::H16 | FormId::H32 => 3,
        }
    }

    /// Nebentypus character; None means trivial.
    pub fn nebentypus(self) -> Option<QuadChar> {
        match self {
            FormId::F32 | FormId::F64 => None,
            FormId::G64Pair => Some(QuadChar::Chi8),
            FormId::H8 | FormId::H32 => Some(QuadChar::ChiM8),
            FormId::H16 => Some(QuadChar::ChiM4),
        }
    }

    /// Nebentypus value at an odd prime (1 for trivial).
    pub fn nebentypus_at(self, p: u64) -> i64 {
        self.nebentypus()
            .map_or(1, |chi| chi.value_at_odd(p as i64) as i64)
    }

    /// The imaginary quadratic field giving the CM.
    pub fn cm_field(self) -> &'static str {
        match self {
            FormId::F32 | FormId::F64 | FormId::H16 => "Q(i)",
            FormId::G64Pair | FormId::H8 | FormId::H32 => "Q(sqrt(-2))",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FormId::F32 => "f32",
            FormId::F64 => "f64",
            FormId::G64Pair => "g64",
            FormId::H8 => "h8",
            FormId::H16 => "h16",
            FormId::H32 => "h32",
        }
    }
}

/// Element of Z[i].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };

    pub fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub fn conj(self) -> Self {
        GaussianInt {
            re: self.re,
            im: -self.im,
        }
    }

    fn checked_mul(self, other: Self) -> Option<Self> {
        Some(GaussianInt {
            re: self
                .re
                .checked_mul(other.re)?
                .checked_sub(self.im.checked_mul(other.im)?)?,
            im: self
                .re
                .checked_mul(other.im)?
                .checked_add(self.im.checked_mul(other.re)?)?,
        })
    }

    fn checked_sub(self, other: Self) -> Option<Self> {
        Some(GaussianInt {
            re: self.re.checked_sub(other.re)?,
            im: self.im.checked_sub(other.im)?,
        })
    }

    fn scale(self, k: i64) -> Option<Self> {
        Some(GaussianInt {
            re: self.re.checked_mul(k)?,
            im: self.im.checked_mul(k)?,
        })
    }
}

impl std::ops::Mul for GaussianInt {
    type Output = GaussianInt;

    fn mul(self, other: Self) -> Self {
        GaussianInt {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }
}

impl std::fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// The conjugation-stable pair {z, conj(z)}, stored via the member with
/// im >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoeffPair {
    pub re: i64,
    pub im: i64,
}

impl CoeffPair {
    pub fn new(z: GaussianInt) -> Self {
        CoeffPair {
            re: z.re,
            im: z.im.abs(),
        }
    }

    /// Both members, {re + im i, re - im i} (equal when im = 0).
    pub fn members(self) -> [GaussianInt; 2] {
        [
            GaussianInt::new(self.re, self.im),
            GaussianInt::new(self.re, -self.im),
        ]
    }

    /// Sum of the pair, always a rational integer.
    pub fn sum(self) -> i64 {
        2 * self.re
    }

    /// Product of the pair, |z|^2 >= 0.
    pub fn product(self) -> i64 {
        self.re * self.re + self.im * self.im
    }
}

impl std::fmt::Display for CoeffPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im == 0 {
            write!(f, "{{{}, {}}}", self.re, self.re)
        } else {
            let [a, b] = self.members();
            write!(f, "{{{a}, {b}}}")
        }
    }
}

/// Value of a_p(h16) at primes p = 3 (mod 4), where the CM recipe is silent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum H16InertConvention {
    /// a_p = 0, the standard convention for odd-weight CM newforms.
    #[default]
    Zero,
    /// a_p = -2p, the literal inert-prime trace of f32^(x2) minus 2p.
    #[serde(rename = "minus2p")]
    MinusTwoP,
}

fn require_odd_prime(p: u64) -> Result<(), CmError> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(FieldError::NotOddPrime(p).into())
    }
}

/// p = a^2 + b^2 with a odd, b even > 0, and the sign of a normalized by
/// a + b = 1 (mod 4). Returns (a, b).
pub fn two_squares_normalized(p: u64) -> Result<(i64, u64), CmError> {
    require_odd_prime(p)?;
    if p % 4 != 1 {
        return Err(CmError::WrongResidue {
            p,
            need: "1 (mod 4)",
        });
    }
    let mut b = 2u64;
    while b * b < p {
        let a2 = p - b * b;
        let a = a2.isqrt();
        if a * a == a2 {
            let target = (1 + 4 - b % 4) % 4; // 1 - b mod 4
            let signed = if a % 4 == target {
                a as i64
            } else {
                -(a as i64)
            };
            debug_assert_eq!(signed.rem_euclid(4), target as i64);
            return Ok((signed, b));
        }
        b += 2;
    }
    unreachable!("every p = 1 (mod 4) is a sum of two squares")
}

/// p = a^2 + 2b^2, unique up to signs; returns (|a|, |b|).
pub fn a2b2_decomp(p: u64) -> Result<(u64, u64), CmError> {
    require_odd_prime(p)?;
    if p % 8 != 1 && p % 8 != 3 {
        return Err(CmError::WrongResidue {
            p,
            need: "1 or 3 (mod 8)",
        });
    }
    let mut b = 1u64;
    while 2 * b * b < p {
        let a2 = p - 2 * b * b;
        let a = a2.isqrt();
        if a * a == a2 {
            return Ok((a, b));
        }
        b += 1;
    }
    unreachable!("every p = 1, 3 (mod 8) is a^2 + 2b^2")
}

/// Prime coefficient of an integer-valued form, default h16 convention.
pub fn ap(form: FormId, p: u64) -> Result<i64, CmError> {
    ap_with(form, p, H16InertConvention::default())
}

/// Prime coefficient with the h16 inert convention spelled out.
pub fn ap_with(form: FormId, p: u64, conv: H16InertConvention) -> Result<i64, CmError> {
    require_odd_prime(p)?;
    let chi8 = QuadChar::Chi8.value_at_odd(p as i64) as i64;
    Ok(match form {
        FormId::F32 => {
            if p % 4 != 1 {
                0
            } else {
                2 * two_squares_normalized(p)?.0
            }
        }
        FormId::F64 => chi8 * ap_with(FormId::F32, p, conv)?,
        FormId::H8 => {
            if p % 8 != 1 && p % 8 != 3 {
                0
            } else {
                let (a, b) = a2b2_decomp(p)?;
                2 * (a * a) as i64 - 4 * (b * b) as i64
            }
        }
        FormId::H32 => chi8 * ap_with(FormId::H8, p, conv)?,
        FormId::H16 => {
            if p % 4 == 1 {
                let (a, b) = two_squares_normalized(p)?;
                2 * (a * a - (b * b) as i64)
            } else {
                match conv {
                    H16InertConvention::Zero => 0,
                    H16InertConvention::MinusTwoP => -2 * p as i64,
                }
            }
        }
        FormId::G64Pair => return Err(CmError::PairValued(form)),
    })
}

/// a_p of f32 or f64 by counting points on the matching elliptic curve
/// (y^2 = x^3 - x for f32, y^2 = x^3 + x for f64). Independent oracle for
/// the two-squares law.
pub fn ap_oracle_elliptic(form: FormId, p: u64) -> Result<i64, CmError> {
    let curve = match form {
        FormId::F32 => CmCurve::E32,
        FormId::F64 => CmCurve::E64,
        other => return Err(CmError::NotElliptic(other)),
    };
    let ctx = PrimeContext::new(p)?;
    Ok(counting::count_elliptic(&ctx, curve))
}

const EXTRACT_MAX_P: u64 = 200;

/// The g64 coefficient pair at p, from #X(F_p) and #X(F_{p^2}).
///
/// With s_k the k-th power sum of Frobenius on H^1(X) (so s_1 = p + 1 -
/// #X(F_p), s_2 = p^2 + 1 - #X(F_{p^2})) and H^1(X) = f32 + f32 + f64 +
/// g64 pair, peeling off the known parts leaves A = a(+) + a(-) and
/// Q = a(+)^2 + a(-)^2; the pair is the root set of z^2 - Az + (A^2 - Q)/2.
/// Non-integral or non-conjugate roots indicate a counting bug and panic.
pub fn extract_g_pair(p: u64) -> Result<CoeffPair, CmError> {
    require_odd_prime(p)?;
    if p > EXTRACT_MAX_P {
        return Err(CountError::CostGuard {
            op: "extract_g_pair",
            p,
            max: EXTRACT_MAX_P,
        }
        .into());
    }
    let ctx = PrimeContext::new(p)?;
    let x1 = counting::count_curve_x(&ctx, 1)?.count as i64;
    let x2 = counting::count_curve_x(&ctx, 2)?.count as i64;
    let p_i = p as i64;
    let s1 = p_i + 1 - x1;
    let s2 = p_i * p_i + 1 - x2;
    let af32 = ap(FormId::F32, p)?;
    let af64 = ap(FormId::F64, p)?;
    let chi8 = QuadChar::Chi8.value_at_odd(p_i) as i64;
    let a_sum = s1 - 2 * af32 - af64;
    let sq_sum = s2 - 2 * (af32 * af32 - 2 * p_i) - (af64 * af64 - 2 * p_i) + 4 * chi8 * p_i;
    let twice_prod = a_sum * a_sum - sq_sum;
    assert_eq!(
        twice_prod % 2,
        0,
        "g-pair power sums have wrong parity at p = {p}"
    );
    let prod = twice_prod / 2;
    let disc = a_sum * a_sum - 4 * prod;
    if disc == 0 {
        assert_eq!(a_sum % 2, 0, "repeated g-pair root not integral at p = {p}");
        Ok(CoeffPair {
            re: a_sum / 2,
            im: 0,
        })
    } else if a_sum == 0 {
        assert!(
            prod >= 0,
            "g-pair product negative with zero sum at p = {p}"
        );
        let g = (prod as u64).isqrt() as i64;
        assert_eq!(g * g, prod, "g-pair roots not in Z[i] at p = {p}");
        Ok(CoeffPair { re: 0, im: g })
    } else {
        panic!("g-pair roots at p = {p} are not conjugation-stable (counting bug)");
    }
}

/// One entry of a q-expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Coefficient {
    /// Even index: outside the odd-support scope of every form here.
    Excluded,
    /// A single determined integer.
    Int(i64),
    /// The conjugation-stable pair (g64 only).
    Pair(CoeffPair),
    /// g64 composite whose value depends on per-prime sign choices that
    /// point counts cannot see (even number >= 2 of ambiguous factors).
    Undetermined,
}

const QEXP_MAX_N: u64 = 100_000;

/// q-expansion a_1..a_N (index n in the returned vector; entry 0 unused,
/// even entries Excluded), default h16 convention.
pub fn qexp(form: FormId, n_max: u64) -> Result<Vec<Coefficient>, CmError> {
    qexp_with(form, n_max, H16InertConvention::default())
}

/// q-expansion with the h16 inert convention spelled out.
///
/// Coefficients extend from primes by a_{p^{k+1}} = a_p a_{p^k} -
/// eps(p) p^{w-1} a_{p^{k-1}} and multiplicativity across coprime factors.
/// For g64 the pair {a_n(g+), a_n(g-)} = {z, conj z} is reported whenever it
/// is determined: always at prime powers, and at composites unless an even
/// number (>= 2) of ambiguous purely-imaginary factors makes even the
/// unordered pair sign-dependent.
pub fn qexp_with(
    form: FormId,
    n_max: u64,
    conv: H16InertConvention,
) -> Result<Vec<Coefficient>, CmError> {
    if n_max < 1 {
        return Err(CmError::LimitGuard {
            op: "qexp",
            n: n_max,
            max: QEXP_MAX_N,
        });
    }
    let cap = if form == FormId::G64Pair {
        EXTRACT_MAX_P
    } else {
        QEXP_MAX_N
    };
    if n_max > cap {
        return Err(CmError::LimitGuard {
            op: "qexp",
            n: n_max,
            max: cap,
        });
    }
    let n_max = n_max as usize;
    let spf = smallest_prime_factors(n_max);
    let mut out = vec![Coefficient::Excluded; n_max + 1];
    if form == FormId::G64Pair {
        // per-index canonical value plus the count of ambiguous factors
        let mut val: Vec<(GaussianInt, u32)> = vec![(GaussianInt::ZERO, 0); n_max + 1];
        val[1] = (GaussianInt::new(1, 0), 0);
        out[1] = Coefficient::Int(1);
        for n in (3..=n_max).step_by(2) {
            let p = spf[n] as usize;
            let mut pe = p;
            let mut m = n / p;
            while m.is_multiple_of(p) {
                pe *= p;
                m /= p;
            }
            let v = if m > 1 {
                let (a, ka) = val[pe];
                let (b, kb) = val[m];
                (checked_gauss(a.checked_mul(b), n), ka + kb)
            } else if pe == p {
                let z = extract_g_pair(p as u64)?;
                let z = GaussianInt::new(z.re, z.im);
                (z, (z.im != 0) as u32)
            } else {
                // a_{p^e} = a_p a_{p^{e-1}} - eps(p) p a_{p^{e-2}}
                let eps = FormId::G64Pair.nebentypus_at(p as u64);
                let a_p = val[p].0;
                let prev = val[pe / p].0;
                let prev2 = val[pe / p / p].0;
                let t = a_p
                    .checked_mul(prev)
                    .and_then(|x| x.checked_sub(checked_gauss(prev2.scale(eps * p as i64), n)));
                let z = checked_gauss(t, n);
                (z, (z.im != 0) as u32)
            };
            val[n] = v;
            let (z, k) = v;
            out[n] = if n == p {
                Coefficient::Pair(CoeffPair::new(z))
            } else if z == GaussianInt::ZERO {
                Coefficient::Int(0)
            } else if z.im != 0 {
                Coefficient::Pair(CoeffPair::new(z))
            } else if k == 0 {
                Coefficient::Int(z.re)
            } else {
                Coefficient::Undetermined
            };
        }
        return Ok(out);
    }
    let weight = form.weight();
    let mut val = vec![0i64; n_max + 1];
    val[1] = 1;
    out[1] = Coefficient::Int(1);
    for n in (3..=n_max).step_by(2) {
        let p = spf[n] as usize;
        let mut pe = p;
        let mut m = n / p;
        while m.is_multiple_of(p) {
            pe *= p;
            m /= p;
        }
        val[n] = if m > 1 {
            checked_int(val[pe].checked_mul(val[m]), n)
        } else if pe == p {
            ap_with(form, p as u64, conv)?
        } else {
            let eps = form.nebentypus_at(p as u64);
            let pw = (p as i64).pow(weight - 1);
            let t = val[p]
                .checked_mul(val[pe / p])
                .and_then(|x| x.checked_sub(eps.checked_mul(pw)?.checked_mul(val[pe / p / p])?));
            checked_int(t, n)
        };
        out[n] = Coefficient::Int(val[n]);
    }
    Ok(out)
}

fn checked_int(v: Option<i64>, n: usize) -> i64 {
    v.unwrap_or_else(|| panic!("coefficient overflow at index {n}"))
}

fn checked_gauss(v: Option<GaussianInt>, n: usize) -> GaussianInt {
    v.unwrap_or_else(|| panic!("coefficient overflow at index {n}"))
}

fn smallest_prime_factors(n_max: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

const ETA_MAX_N: u64 = 100_000;

/// Coefficients of q * Prod_{n >= 1} (1 - q^{4n})^6 through q^N, the eta
/// product equal to the h16 q-expansion. Independent of every coefficient
/// law above: pure polynomial multiplication.
///
/// The single power E = Prod (1 - q^{4n}) is expanded first by in-place
/// binomial passes (its truncated partial products stay far inside i128),
/// then raised to the 6th power through the sparse nonzero terms of E;
/// expanding (1 - q^m)^6 factor by factor instead sends intermediate
/// coefficients past i128 around N = 25000. All arithmetic is checked.
pub fn eta_oracle_h16(n_max: u64) -> Result<Vec<i64>, CmError> {
    if n_max > ETA_MAX_N {
        return Err(CmError::LimitGuard {
            op: "eta_oracle_h16",
            n: n_max,
            max: ETA_MAX_N,
        });
    }
    let n = n_max as usize;
    let trunc = n.saturating_sub(1); // degree needed before the q shift
    let mut single = vec![0i128; trunc + 1];
    single[0] = 1;
    let mut m = 4;
    while m <= trunc {
        for i in (m..=trunc).rev() {
            single[i] = single[i]
                .checked_sub(single[i - m])
                .expect("eta single-power coefficient overflow");
        }
        m += 4;
    }
    let sparse: Vec<(usize, i128)> = single
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let mut acc = single;
    for _ in 0..5 {
        let mut next = vec![0i128; trunc + 1];
        for &(m, c) in &sparse {
            for j in m..=trunc {
                if acc[j - m] != 0 {
                    next[j] = c
                        .checked_mul(acc[j - m])
                        .and_then(|t| next[j].checked_add(t))
                        .expect("eta power coefficient overflow");
                }
            }
        }
        acc = next;
    }
    let mut out = vec![0i64; n + 1];
    for (i, &c) in acc.iter().enumerate() {
        if i < n {
            out[i + 1] = i64::try_from(c).expect("eta coefficient exceeds i64");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::odd_primes_upto;

    #[test]
    fn two_squares_examples() {
        assert_eq!(two_squares_normalized(5), Ok((-1, 2)));
        assert_eq!(two_squares_normalized(13), Ok((3, 2)));
        assert_eq!(two_squares_normalized(17), Ok((1, 4)));
        assert!(matches!(
            two_squares_normalized(7),
            Err(CmError::WrongResidue { .. })
        ));
        for p in odd_primes_upto(1000) {
            if p % 4 != 1 {
                continue;
            }
            let (a, b) = two_squares_normalized(p).unwrap();
            assert_eq!((a * a) as u64 + b * b, p);
            assert_eq!(a.rem_euclid(2), 1);
            assert_eq!(b % 2, 0);
            assert_eq!((a + b as i64).rem_euclid(4), 1);
        }
    }

    #[test]
    fn a2b2_examples() {
        assert_eq!(a2b2_decomp(3), Ok((1, 1)));
        assert_eq!(a2b2_decomp(11), Ok((3, 1)));
        assert_eq!(a2b2_decomp(17), Ok((3, 2)));
        assert!(matches!(a2b2_decomp(5), Err(CmError::WrongResidue { .. })));
        assert!(matches!(a2b2_decomp(7), Err(CmError::WrongResidue { .. })));
        for p in odd_primes_upto(1000) {
            if p % 8 == 1 || p % 8 == 3 {
                let (a, b) = a2b2_decomp(p).unwrap();
                assert_eq!(a * a + 2 * b * b, p);
            }
        }
    }

    #[test]
    fn ap_examples() {
        assert_eq!(ap(FormId::F32, 5), Ok(-2));
        assert_eq!(ap(FormId::F32, 13), Ok(6));
        assert_eq!(ap(FormId::F32, 17), Ok(2));
        assert_eq!(ap(FormId::F64, 13), Ok(-6));
        assert_eq!(ap(FormId::H16, 5), Ok(-6));
        assert_eq!(ap(FormId::H32, 3), Ok(2));
        assert_eq!(ap(FormId::H8, 3), Ok(-2));
        assert_eq!(ap(FormId::H8, 11), Ok(14));
        assert_eq!(ap(FormId::H8, 17), Ok(2));
        assert_eq!(ap(FormId::H16, 3), Ok(0));
        assert_eq!(
            ap_with(FormId::H16, 3, H16InertConvention::MinusTwoP),
            Ok(-6)
        );
        assert!(matches!(
            ap(FormId::G64Pair, 5),
            Err(CmError::PairValued(_))
        ));
        assert!(matches!(ap(FormId::F32, 2), Err(CmError::Field(_))));
    }

    #[test]
    fn frozen_prime_coefficients_through_97() {
        // (p, f32, f64, h8, h16, h32); verified against the elliptic-curve
        // counts, the eta product, and the surface trace identity.
        const TABLE: [(u64, i64, i64, i64, i64, i64); 24] = [
            (3, 0, 0, -2, 0, 2),
            (5, -2, 2, 0, -6, 0),
            (7, 0, 0, 0, 0, 0),
            (11, 0, 0, 14, 0, -14),
            (13, 6, -6, 0, 10, 0),
            (17, 2, 2, 2, -30, 2),
            (19, 0, 0, -34, 0, 34),
            (23, 0, 0, 0, 0, 0),
            (29, -10, 10, 0, 42, 0),
            (31, 0, 0, 0, 0, 0),
            (37, -2, 2, 0, -70, 0),
            (41, 10, 10, -46, 18, -46),
            (43, 0, 0, 14, 0, -14),
            (47, 0, 0, 0, 0, 0),
            (53, 14, -14, 0, 90, 0),
            (59, 0, 0, -82, 0, 82),
            (61, -10, 10, 0, -22, 0),
            (67, 0, 0, 62, 0, -62),
            (71, 0, 0, 0, 0, 0),
            (73, -6, -6, -142, -110, -142),
            (79, 0, 0, 0, 0, 0),
            (83, 0, 0, 158, 0, -158),
            (89, 10, 10, 146, -78, 146),
            (97, 18, 18, -94, 130, -94),
        ];
        for (p, f32v, f64v, h8v, h16v, h32v) in TABLE {
            assert_eq!(ap(FormId::F32, p), Ok(f32v), "f32 at {p}");
            assert_eq!(ap(FormId::F64, p), Ok(f64v), "f64 at {p}");
            assert_eq!(ap(FormId::H8, p), Ok(h8v), "h8 at {p}");
            assert_eq!(ap(FormId::H16, p), Ok(h16v), "h16 at {p}");
            assert_eq!(ap(FormId::H32, p), Ok(h32v), "h32 at {p}");
        }
    }

    #[test]
    fn elliptic_oracle_matches() {
        assert_eq!(ap_oracle_elliptic(FormId::F32, 29), Ok(-10));
        assert_eq!(ap_oracle_elliptic(FormId::F32, 7), Ok(0));
        assert_eq!(ap_oracle_elliptic(FormId::F64, 17), Ok(2));
        assert!(matches!(
            ap_oracle_elliptic(FormId::H8, 5),
            Err(CmError::NotElliptic(_))
        ));
        for p in odd_primes_upto(300) {
            for form in [FormId::F32, FormId::F64] {
                assert_eq!(
                    ap(form, p).unwrap(),
                    ap_oracle_elliptic(form, p).unwrap(),
                    "{form:?} at {p}"
                );
            }
        }
    }

    #[test]
    fn g_pair_examples() {
        assert_eq!(extract_g_pair(3), Ok(CoeffPair { re: 0, im: 2 }));
        assert_eq!(extract_g_pair(5), Ok(CoeffPair { re: 0, im: 0 }));
        assert_eq!(extract_g_pair(11), Ok(CoeffPair { re: 0, im: 6 }));
        assert_eq!(extract_g_pair(17), Ok(CoeffPair { re: -6, im: 0 }));
        assert_eq!(extract_g_pair(19), Ok(CoeffPair { re: 0, im: 2 }));
        assert!(matches!(extract_g_pair(211), Err(CmError::Count(_))));
    }

    #[test]
    fn g_pair_tensor_and_twist_identities() {
        for p in odd_primes_upto(200) {
            let pair = extract_g_pair(p).unwrap();
            let [z, _] = pair.members();
            let zsq = z * z;
            assert_eq!(zsq.im, 0, "square of pair member rational at {p}");
            let chi8 = QuadChar::Chi8.value_at_odd(p as i64) as i64;
            if p % 8 == 1 || p % 8 == 3 {
                assert_eq!(
                    zsq.re,
                    ap(FormId::H32, p).unwrap() + 2 * chi8 * p as i64,
                    "tensor identity at split p = {p}"
                );
                assert_eq!(pair.product(), chi8 * zsq.re, "twist identity at {p}");
            } else {
                assert_eq!(pair, CoeffPair { re: 0, im: 0 }, "inert p = {p}");
            }
        }
    }

    #[test]
    fn qexp_golden_values() {
        let f32q = qexp(FormId::F32, 25).unwrap();
        assert_eq!(f32q[5], Coefficient::Int(-2));
        assert_eq!(f32q[9], Coefficient::Int(-3));
        assert_eq!(f32q[13], Coefficient::Int(6));
        assert_eq!(f32q[17], Coefficient::Int(2));
        assert_eq!(f32q[25], Coefficient::Int(-1));
        assert_eq!(f32q[2], Coefficient::Excluded);
        let f64q = qexp(FormId::F64, 25).unwrap();
        assert_eq!(f64q[5], Coefficient::Int(2));
        assert_eq!(f64q[9], Coefficient::Int(-3));
        assert_eq!(f64q[13], Coefficient::Int(-6));
        assert_eq!(f64q[25], Coefficient::Int(-1));
        let h16q = qexp(FormId::H16, 9).unwrap();
        assert_eq!(h16q[9], Coefficient::Int(9));
    }

    #[test]
    fn qexp_g64_symmetric_data() {
        let g = qexp(FormId::G64Pair, 35).unwrap();
        assert_eq!(g[3], Coefficient::Pair(CoeffPair { re: 0, im: 2 }));
        assert_eq!(g[9], Coefficient::Int(-1));
        assert_eq!(g[25], Coefficient::Int(5));
        assert_eq!(g[27], Coefficient::Pair(CoeffPair { re: 0, im: 4 }));
        assert_eq!(g[15], Coefficient::Int(0));
        // 33 = 3 * 11: two ambiguous imaginary factors, only +-12 possible
        assert_eq!(g[33], Coefficient::Undetermined);
        assert_eq!(g[17], Coefficient::Pair(CoeffPair { re: -6, im: 0 }));
        assert!(matches!(
            qexp(FormId::G64Pair, 300),
            Err(CmError::LimitGuard { .. })
        ));
    }

    #[test]
    fn eta_examples() {
        let eta = eta_oracle_h16(30).unwrap();
        assert_eq!(eta[1], 1);
        assert_eq!(eta[3], 0);
        assert_eq!(eta[5], -6);
        assert_eq!(eta[9], 9);
        assert_eq!(eta[13], 10);
        assert_eq!(eta[25], 11);
        assert!(matches!(
            eta_oracle_h16(200_000),
            Err(CmError::LimitGuard { .. })
        ));
    }

    #[test]
    fn eta_matches_h16_series() {
        let n = 2001;
        let eta = eta_oracle_h16(n).unwrap();
        let h16 = qexp(FormId::H16, n).unwrap();
        for i in (1..=n as usize).step_by(2) {
            assert_eq!(
                Coefficient::Int(eta[i]),
                h16[i],
                "eta product vs Hecke series at q^{i}"
            );
        }
        for i in (2..=n as usize).step_by(2) {
            assert_eq!(eta[i], 0, "even eta coefficient at q^{i}");
        }
    }

    #[test]
    fn deligne_bounds() {
        for p in odd_primes_upto(1000) {
            for form in [
                FormId::F32,
                FormId::F64,
                FormId::H8,
                FormId::H16,
                FormId::H32,
            ] {
                let a = ap(form, p).unwrap();
                let bound = match form.weight() {
                    2 => 4.0 * p as f64,
                    _ => 4.0 * (p as f64).powi(2),
                };
                assert!((a * a) as f64 <= bound, "{form:?} bound at {p}");
            }
        }
    }

    #[test]
    fn cm_vanishing() {
        for p in odd_primes_upto(1000) {
            assert_eq!(ap(FormId::F32, p).unwrap() == 0, p % 4 == 3, "f32 at {p}");
            assert_eq!(
                ap(FormId::H8, p).unwrap() == 0,
                p % 8 == 5 || p % 8 == 7,
                "h8 at {p}"
            );
        }
    }
}
