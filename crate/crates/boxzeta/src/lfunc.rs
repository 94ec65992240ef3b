//! Euler factors and truncated L-series for the surface's second cohomology.
//!
//! The degree-30 product attached to H^2 of the surface is
//!
//! ```text
//! L(s, h16)^3 L(s, h32) L(s, h8)^3
//!   zeta(s-1)^10 L(s-1, chi_m4)^2 L(s-1, chi_m8) L(s-1, chi_8)^3
//! ```
//!
//! and the resolved surface multiplies in the 48 exceptional Tate classes,
//! zeta(s-1)^24 L(s-1, chi_m4)^24 under the twisted exceptional action or
//! zeta(s-1)^36 L(s-1, chi_m4)^12 under the permutation action, for total
//! degree 78 either way.
//!
//! Everything here is local data and absolutely convergent truncations: the
//! factor at the unique bad prime 2 is the constant 1 carrying an explicit
//! exclusion marker, and no analytic continuation is attempted.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::cmforms::{self, CmError, CoeffPair, FormId, H16InertConvention};
use crate::counting::{self, CountError, ExceptionalAction};
use crate::ffield::{odd_primes_upto, FieldError, PrimeContext, QuadChar};

/// Errors from Euler-product assembly and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LfuncError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Cm(#[from] CmError),
    #[error(
        "evaluation needs s > 3 (absolute convergence margin for motivic weight 2), got s = {0}"
    )]
    BadS(f64),
    #[error("{op} is limited to n <= {max}, got {n}")]
    LimitGuard { op: &'static str, n: u64, max: u64 },
    #[error("Dirichlet coefficient at n = {0} exceeds i64")]
    Overflow(u64),
}

/// One irreducible factor type of the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LComponent {
    H16,
    H32,
    H8,
    Zeta,
    ChiM4,
    ChiM8,
    Chi8,
}

impl LComponent {
    /// Local degree: 2 for the newform components, 1 for the abelian ones.
    pub fn degree(self) -> u32 {
        match self {
            LComponent::H16 | LComponent::H32 | LComponent::H8 => 2,
            _ => 1,
        }
    }

    fn form(self) -> Option<FormId> {
        match self {
            LComponent::H16 => Some(FormId::H16),
            LComponent::H32 => Some(FormId::H32),
            LComponent::H8 => Some(FormId::H8),
            _ => None,
        }
    }

    fn character(self) -> Option<QuadChar> {
        match self {
            LComponent::ChiM4 => Some(QuadChar::ChiM4),
            LComponent::ChiM8 => Some(QuadChar::ChiM8),
            LComponent::Chi8 => Some(QuadChar::Chi8),
            _ => None,
        }
    }
}

/// A component raised to a multiplicity, with `shift` recording s -> s - shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LTerm {
    pub component: LComponent,
    pub multiplicity: u32,
    pub shift: u32,
}

/// A formal product of components: the shape of one L-function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LSpec {
    pub terms: Vec<LTerm>,
}

impl LSpec {
    pub fn empty() -> LSpec {
        LSpec { terms: Vec::new() }
    }

    /// The degree-30 product for H^2 of the (unresolved) surface.
    pub fn surface() -> LSpec {
        let t = |component, multiplicity, shift| LTerm {
            component,
            multiplicity,
            shift,
        };
        LSpec {
            terms: vec![
                t(LComponent::H16, 3, 0),
                t(LComponent::H32, 1, 0),
                t(LComponent::H8, 3, 0),
                t(LComponent::Zeta, 10, 1),
                t(LComponent::ChiM4, 2, 1),
                t(LComponent::ChiM8, 1, 1),
                t(LComponent::Chi8, 3, 1),
            ],
        }
    }

    /// The degree-78 product for the resolved surface under the given
    /// exceptional action.
    pub fn resolved(action: ExceptionalAction) -> LSpec {
        let mut spec = LSpec::surface();
        let (trivial, twisted) = match action {
            ExceptionalAction::Twisted => (24, 24),
            ExceptionalAction::Permutation => (36, 12),
        };
        spec.terms.push(LTerm {
            component: LComponent::Zeta,
            multiplicity: trivial,
            shift: 1,
        });
        spec.terms.push(LTerm {
            component: LComponent::ChiM4,
            multiplicity: twisted,
            shift: 1,
        });
        spec
    }

    /// Total degree, Sum multiplicity * component degree.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.multiplicity * t.component.degree())
            .sum()
    }
}

/// Local factor at p: polynomial in T with integer coefficients, constant
/// term 1. At p = 2 the polynomial is 1 and `excluded` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerFactor {
    pub p: u64,
    /// coeffs[j] multiplies T^j; coeffs[0] = 1.
    pub coeffs: Vec<BigInt>,
    /// Marks the bad prime 2, whose factor is not computed here.
    pub excluded: bool,
}

impl EulerFactor {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn excluded_at_two() -> EulerFactor {
        EulerFactor {
            p: 2,
            coeffs: vec![BigInt::one()],
            excluded: true,
        }
    }
}

/// Local factor of one component at p, with shift applied (T-coefficient j
/// scaled by p^{j * shift}).
///
/// Newform of weight 3 with nebentypus eps: 1 - a_p T + eps(p) p^2 T^2;
/// character chi with shift 1: 1 - chi(p) p T; zeta with shift 1: 1 - p T.
pub fn euler_factor(
    component: LComponent,
    shift: u32,
    p: u64,
    conv: H16InertConvention,
) -> Result<EulerFactor, LfuncError> {
    if p == 2 {
        return Ok(EulerFactor::excluded_at_two());
    }
    let mut coeffs: Vec<BigInt> = match component.form() {
        Some(form) => {
            let a = cmforms::ap_with(form, p, conv)?;
            let eps = form.nebentypus_at(p);
            let w = form.weight();
            vec![
                BigInt::one(),
                BigInt::from(-a),
                BigInt::from(eps) * BigInt::from(p).pow(w - 1),
            ]
        }
        None => {
            let chi = match component.character() {
                Some(chi) => chi.value(p as i64)? as i64,
                None => 1, // zeta
            };
            vec![BigInt::one(), BigInt::from(-chi)]
        }
    };
    if shift > 0 {
        let step = BigInt::from(p).pow(shift);
        let mut scale = BigInt::one();
        for c in coeffs.iter_mut().skip(1) {
            scale *= &step;
            *c *= &scale;
        }
    }
    Ok(EulerFactor {
        p,
        coeffs,
        excluded: false,
    })
}

/// Product of all component factors of `spec` at p.
pub fn aggregate_factor(
    spec: &LSpec,
    p: u64,
    conv: H16InertConvention,
) -> Result<EulerFactor, LfuncError> {
    if p == 2 {
        return Ok(EulerFactor::excluded_at_two());
    }
    let mut acc = vec![BigInt::one()];
    for term in &spec.terms {
        let factor = euler_factor(term.component, term.shift, p, conv)?;
        for _ in 0..term.multiplicity {
            acc = poly_mul(&acc, &factor.coeffs);
        }
    }
    Ok(EulerFactor {
        p,
        coeffs: acc,
        excluded: false,
    })
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

const DIRICHLET_MAX_N: u64 = 100_000;

/// First N Dirichlet coefficients of the product over odd p <= N.
///
/// Entry n of the result is Some(c_n) for odd n, None for n = 0 and for the
/// excluded even indices.
pub fn dirichlet_coeffs(
    spec: &LSpec,
    n_max: u64,
    conv: H16InertConvention,
) -> Result<Vec<Option<i64>>, LfuncError> {
    if !(1..=DIRICHLET_MAX_N).contains(&n_max) {
        return Err(LfuncError::LimitGuard {
            op: "dirichlet_coeffs",
            n: n_max,
            max: DIRICHLET_MAX_N,
        });
    }
    let n_max = n_max as usize;
    let mut c = vec![0i128; n_max + 1];
    c[1] = 1;
    for p in odd_primes_upto(n_max as u64) {
        let factor = aggregate_factor(spec, p, conv)?;
        let mut k_max = 0u32;
        let mut pk = p;
        while pk <= n_max as u64 {
            k_max += 1;
            pk = pk.saturating_mul(p);
        }
        let u = local_inverse(&factor.coeffs, k_max, p)?;
        // scatter: every n = m p^k with p not dividing m picks up c_m u_k
        let mut pk = 1usize;
        for &uk in &u[1..] {
            pk *= p as usize;
            let mut m = 1usize;
            while m * pk <= n_max {
                if !m.is_multiple_of(p as usize) && c[m] != 0 {
                    let add = c[m]
                        .checked_mul(uk)
                        .ok_or(LfuncError::Overflow((m * pk) as u64))?;
                    c[m * pk] = add; // m coprime to p, so this index is fresh
                }
                m += 1;
            }
        }
    }
    let mut out = vec![None; n_max + 1];
    for n in (1..=n_max).step_by(2) {
        out[n] = Some(i64::try_from(c[n]).map_err(|_| LfuncError::Overflow(n as u64))?);
    }
    Ok(out)
}

/// Coefficients u_0..u_k of the inverse power series of the local factor.
///
/// Only f_1..f_{k_max} enter the recurrence, so the conversion stops there;
/// the top coefficients of a degree-30 factor outgrow i128 near p = 19.
fn local_inverse(coeffs: &[BigInt], k_max: u32, p: u64) -> Result<Vec<i128>, LfuncError> {
    let f: Vec<i128> = coeffs[..coeffs.len().min(k_max as usize + 1)]
        .iter()
        .map(|c| c.to_i128().ok_or(LfuncError::Overflow(p)))
        .collect::<Result<_, _>>()?;
    let mut u = vec![0i128; k_max as usize + 1];
    u[0] = 1;
    for k in 1..=k_max as usize {
        let mut s: i128 = 0;
        for j in 1..=k.min(f.len() - 1) {
            s = f[j]
                .checked_mul(u[k - j])
                .and_then(|t| s.checked_add(t))
                .ok_or(LfuncError::Overflow(p))?;
        }
        u[k] = -s;
    }
    Ok(u)
}

/// A truncated Euler-product value with its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialValue {
    pub s: f64,
    pub pmax: u64,
    pub value: f64,
    /// Crude bound on the effect of primes beyond pmax:
    /// degree * pmax^(1-s) * 2.
    pub tail_bound: f64,
}

/// Value of the truncated product over odd primes p <= pmax at real s > 3.
///
/// Each component factor is evaluated separately in f64 at T = p^-s; the
/// value is the product of their reciprocals in spec order, primes
/// ascending.
pub fn evaluate_partial(
    spec: &LSpec,
    s: f64,
    pmax: u64,
    conv: H16InertConvention,
) -> Result<PartialValue, LfuncError> {
    if s.is_nan() || s <= 3.0 {
        return Err(LfuncError::BadS(s));
    }
    let mut value = 1.0f64;
    for p in odd_primes_upto(pmax) {
        let t = (p as f64).powf(-s);
        for term in &spec.terms {
            let factor = euler_factor(term.component, term.shift, p, conv)?;
            let mut local = 0.0;
            for c in factor.coeffs.iter().rev() {
                let cf = c.to_f64().expect("local coefficient in f64 range");
                local = local * t + cf;
            }
            for _ in 0..term.multiplicity {
                value /= local;
            }
        }
    }
    let tail_bound = spec.degree() as f64 * (pmax as f64).powf(1.0 - s) * 2.0;
    Ok(PartialValue {
        s,
        pmax,
        value,
        tail_bound,
    })
}

/// Largest relative deviation of the reciprocal-root moduli of the local
/// factors of `spec` at p from their pure values.
///
/// The aggregate factor is the exact product of the component factors, so
/// its root multiset is the union of theirs and this bound covers it too.
/// Weight-3 components contribute conjugate pairs with |root|^-1 = p exactly
/// when eps(p) = +1 (needs a_p^2 <= 4p^2) and real roots +-1/p when
/// eps(p) = -1 (needs a_p = 0, the CM vanishing); shifted abelian and zeta
/// components contribute a single root of magnitude exactly 1/p.
pub fn purity_max_deviation(
    spec: &LSpec,
    p: u64,
    conv: H16InertConvention,
) -> Result<f64, LfuncError> {
    if p == 2 {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    let pf = p as f64;
    for term in &spec.terms {
        let factor = euler_factor(term.component, term.shift, p, conv)?;
        let c: Vec<f64> = factor.coeffs.iter().map(|c| c.to_f64().unwrap()).collect();
        let radii: Vec<f64> = match c.len() {
            2 => vec![c[1].abs()], // reciprocal root is -c1
            3 => {
                // 1 + c1 T + c2 T^2 with reciprocal roots r1 r2 = c2,
                // r1 + r2 = -c1
                let disc = c[1] * c[1] - 4.0 * c[2];
                if disc <= 0.0 {
                    let modulus = c[2].sqrt();
                    vec![modulus, modulus]
                } else {
                    let root = disc.sqrt();
                    vec![((-c[1] + root) / 2.0).abs(), ((-c[1] - root) / 2.0).abs()]
                }
            }
            _ => unreachable!("component factors have degree 1 or 2"),
        };
        let expected = match term.component.degree() {
            // weight-3 newform: |reciprocal root| = p
            2 => pf,
            // degree-1 terms all carry shift 1 here: |reciprocal root| = p^shift
            _ => pf.powi(term.shift as i32),
        };
        for r in radii {
            worst = worst.max((r - expected).abs() / expected);
        }
    }
    Ok(worst)
}

/// One row of the export table.
#[derive(Debug, Clone, Serialize)]
pub struct ExportRow {
    pub p: u64,
    pub a_f32: i64,
    pub a_f64: i64,
    pub g_pair: CoeffPair,
    pub a_h8: i64,
    pub a_h16: i64,
    pub a_h32: i64,
    pub count_surface: u64,
    pub count_x: u64,
    /// Coefficients of the aggregate factor of the chosen spec at p, as
    /// exact decimal strings (they outgrow i64 quickly).
    pub factor_coeffs: Vec<String>,
}

/// The per-prime dump: coefficients, counts, and local factors.
#[derive(Debug, Clone, Serialize)]
pub struct ExportTable {
    pub rows: Vec<ExportRow>,
}

const EXPORT_MAX_P: u64 = 200;

/// Build the table for all odd primes <= pmax (g-pair extraction caps pmax
/// at 200). Rows are computed in parallel and emitted in prime order.
pub fn export_table(
    spec: &LSpec,
    pmax: u64,
    conv: H16InertConvention,
) -> Result<ExportTable, LfuncError> {
    use rayon::prelude::*;
    if pmax > EXPORT_MAX_P {
        return Err(LfuncError::LimitGuard {
            op: "export_table",
            n: pmax,
            max: EXPORT_MAX_P,
        });
    }
    let rows: Vec<ExportRow> = odd_primes_upto(pmax)
        .par_iter()
        .map(|&p| {
            let ctx = PrimeContext::new(p)?;
            Ok(ExportRow {
                p,
                a_f32: cmforms::ap_with(FormId::F32, p, conv)?,
                a_f64: cmforms::ap_with(FormId::F64, p, conv)?,
                g_pair: cmforms::extract_g_pair(p)?,
                a_h8: cmforms::ap_with(FormId::H8, p, conv)?,
                a_h16: cmforms::ap_with(FormId::H16, p, conv)?,
                a_h32: cmforms::ap_with(FormId::H32, p, conv)?,
                count_surface: counting::count_surface_fast(&ctx)?.count,
                count_x: counting::count_curve_x(&ctx, 1)?.count,
                factor_coeffs: aggregate_factor(spec, p, conv)?
                    .coeffs
                    .iter()
                    .map(|c| c.to_string())
                    .collect(),
            })
        })
        .collect::<Result<_, LfuncError>>()?;
    Ok(ExportTable { rows })
}

impl ExportTable {
    /// CSV with a leading comment line declaring the index-2 exclusion.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "# index-2 data excluded: 2 is the unique bad prime; all rows are odd primes\n",
        );
        out.push_str("p,a_f32,a_f64,g_pair_re,g_pair_im,a_h8,a_h16,a_h32,count_surface,count_x");
        let width = self.rows.first().map_or(0, |r| r.factor_coeffs.len());
        for j in 0..width {
            out.push_str(&format!(",factor_c{j}"));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.p,
                r.a_f32,
                r.a_f64,
                r.g_pair.re,
                r.g_pair.im,
                r.a_h8,
                r.a_h16,
                r.a_h32,
                r.count_surface,
                r.count_x
            ));
            for c in &r.factor_coeffs {
                out.push(',');
                out.push_str(c);
            }
            out.push('\n');
        }
        out
    }
}

/// Trace of Frobenius on H^2 read off the local factor: the negated linear
/// coefficient of the aggregate.
pub fn h2_trace_from_factor(factor: &EulerFactor) -> Option<i64> {
    if factor.coeffs.len() < 2 {
        return None;
    }
    (-&factor.coeffs[1]).to_i64()
}
