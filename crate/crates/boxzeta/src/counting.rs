//! Point counts over F_p and F_{p^2} for the varieties in play: the cuboid
//! surface S in P^6, the genus-5 curve X in P^4, the 48-point singular locus
//! Z, and the two auxiliary elliptic curves of conductor 32 and 64.
//!
//! The surface is cut out in P^6, coordinates (a1, a2, a3, b1, b2, b3, c), by
//!
//! ```text
//! a1^2 + b1^2 = c^2,   a2^2 + b2^2 = c^2,   a3^2 + b3^2 = c^2,
//! a1^2 + a2^2 + a3^2 = c^2,
//! ```
//!
//! and the curve X in P^4, coordinates (x, y, u, v, w), by
//!
//! ```text
//! u^2 = 2xy,   v^2 = x^2 - y^2,   w^2 = x^2 + y^2.
//! ```
//!
//! Every projective count here is an affine-cone count divided by q - 1. The
//! cone counts reduce to products of sqrt_count fibers: for the surface, once
//! (a1, a2, a3) is fixed, c ranges over the roots of c^2 = s where s is
//! a1^2 + a2^2 + a3^2, and each b_i over the roots of b_i^2 = s - a_i^2, so
//! the cone sum is Sum_{a} sqrt_count(s) Prod_i sqrt_count(s - a_i^2), an
//! O(p^3) loop of table lookups. For X over F_q the cone sum is the double
//! sum of sqrt_count(2xy) sqrt_count(x^2 - y^2) sqrt_count(x^2 + y^2) over
//! pairs (x, y).
//!
//! For the degree-2 count of X the O(q^2) double sum is collapsed to O(q):
//! sqrt_count(t) is invariant under multiplying t by a nonzero square (b maps
//! to b/lambda bijects the fibers), and all three arguments scale by lambda^2
//! along the cone direction, so the summand is constant on scaling orbits.
//! The projective count is therefore Sum_t f(1, t) + f(0, 1) directly. The
//! literal double sum stays in the test suite as the validator.

use serde::Serialize;

use crate::ffield::{is_odd_prime, FieldError, PrimeContext, QuadChar, QuadExt};

/// Errors from the counting kernels.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CountError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{op} is limited to p <= {max} (cost guard), got p = {p}")]
    CostGuard { op: &'static str, p: u64, max: u64 },
    #[error("curve counts support degree 1 or 2, got {0}")]
    BadDegree(u32),
}

/// The projective varieties whose points get counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarietyId {
    #[serde(rename = "surface")]
    CuboidSurface,
    #[serde(rename = "curve-x")]
    CurveX,
    #[serde(rename = "singular")]
    SingularLocus,
}

/// How a count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Fast,
    Brute,
}

/// One counting result: #V(F_{p^degree}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub variety: VarietyId,
    pub p: u64,
    pub degree: u32,
    pub count: u64,
    pub method: CountMethod,
}

/// The two CM elliptic curves: E32 is y^2 = x^3 - x, E64 is y^2 = x^3 + x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CmCurve {
    E32,
    E64,
}

const SURFACE_FAST_MAX_P: u64 = 5000;
const SURFACE_BRUTE_MAX_P: u64 = 13;
const CURVE_DEG2_MAX_P: u64 = 200;
const CURVE_BRUTE_MAX_P: u64 = 31;

/// #S(F_p) by the O(p^3) fiber-product kernel.
pub fn count_surface_fast(ctx: &PrimeContext) -> Result<CountRecord, CountError> {
    let p = ctx.p();
    if p > SURFACE_FAST_MAX_P {
        return Err(CountError::CostGuard {
            op: "count_surface_fast",
            p,
            max: SURFACE_FAST_MAX_P,
        });
    }
    let sc = ctx.sqrt_count_table();
    let sq: Vec<u64> = (0..p).map(|a| a * a % p).collect();
    let mut cone: u64 = 0;
    for &q1 in &sq {
        for &q2 in &sq {
            let mut q12 = q1 + q2;
            if q12 >= p {
                q12 -= p;
            }
            for &q3 in &sq {
                let mut s = q12 + q3;
                if s >= p {
                    s -= p;
                }
                let fc = sc[s as usize] as u64;
                if fc == 0 {
                    continue;
                }
                let mut t1 = s + p - q1;
                if t1 >= p {
                    t1 -= p;
                }
                let mut t2 = s + p - q2;
                if t2 >= p {
                    t2 -= p;
                }
                let mut t3 = s + p - q3;
                if t3 >= p {
                    t3 -= p;
                }
                cone +=
                    fc * sc[t1 as usize] as u64 * sc[t2 as usize] as u64 * sc[t3 as usize] as u64;
            }
        }
    }
    Ok(CountRecord {
        variety: VarietyId::CuboidSurface,
        p,
        degree: 1,
        count: projective_from_cone(cone, p),
        method: CountMethod::Fast,
    })
}

/// #S(F_p) by full enumeration of F_p^7, testing the four quadrics.
///
/// Independent oracle for the fast kernel; cost p^7 caps it at p <= 13.
pub fn count_surface_brute(p: u64) -> Result<CountRecord, CountError> {
    if !is_odd_prime(p) {
        return Err(FieldError::NotOddPrime(p).into());
    }
    if p > SURFACE_BRUTE_MAX_P {
        return Err(CountError::CostGuard {
            op: "count_surface_brute",
            p,
            max: SURFACE_BRUTE_MAX_P,
        });
    }
    let sq: Vec<u64> = (0..p).map(|v| v * v % p).collect();
    let mut cone: u64 = 0;
    for a1 in 0..p as usize {
        for a2 in 0..p as usize {
            for a3 in 0..p as usize {
                for b1 in 0..p as usize {
                    for b2 in 0..p as usize {
                        for b3 in 0..p as usize {
                            for c in 0..p as usize {
                                let c2 = sq[c];
                                let ok = (sq[a1] + sq[b1]) % p == c2
                                    && (sq[a2] + sq[b2]) % p == c2
                                    && (sq[a3] + sq[b3]) % p == c2
                                    && (sq[a1] + sq[a2] + sq[a3]) % p == c2;
                                cone += ok as u64;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CountRecord {
        variety: VarietyId::CuboidSurface,
        p,
        degree: 1,
        count: projective_from_cone(cone, p),
        method: CountMethod::Brute,
    })
}

/// #X(F_{p^degree}) for degree 1 or 2.
pub fn count_curve_x(ctx: &PrimeContext, degree: u32) -> Result<CountRecord, CountError> {
    let p = ctx.p();
    let count = match degree {
        1 => curve_x_deg1(ctx),
        2 => {
            if p > CURVE_DEG2_MAX_P {
                return Err(CountError::CostGuard {
                    op: "count_curve_x degree 2",
                    p,
                    max: CURVE_DEG2_MAX_P,
                });
            }
            curve_x_deg2(ctx)
        }
        d => return Err(CountError::BadDegree(d)),
    };
    Ok(CountRecord {
        variety: VarietyId::CurveX,
        p,
        degree,
        count,
        method: CountMethod::Fast,
    })
}

fn curve_x_deg1(ctx: &PrimeContext) -> u64 {
    let p = ctx.p();
    let sc = ctx.sqrt_count_table();
    let sq: Vec<u64> = (0..p).map(|v| v * v % p).collect();
    let mut cone: u64 = 0;
    for x in 0..p as usize {
        for y in 0..p as usize {
            let a = 2 * (x as u64) * (y as u64) % p;
            let b = (sq[x] + p - sq[y]) % p;
            let c = (sq[x] + sq[y]) % p;
            cone += sc[a as usize] as u64 * sc[b as usize] as u64 * sc[c as usize] as u64;
        }
    }
    projective_from_cone(cone, p)
}

fn curve_x_deg2(ctx: &PrimeContext) -> u64 {
    let ext = QuadExt::new(ctx);
    let sc = ext.sqrt_count_fiber_table();
    let q = ext.q();
    let two = (2 % ext.p(), 0);
    let one = QuadExt::ONE;
    // orbit representatives (1, t) for t in F_q, plus (0, 1)
    let mut total: u64 = 0;
    for i in 0..q as usize {
        let t = ext.element(i);
        let t2 = ext.mul(t, t);
        let a = ext.mul(two, t);
        let b = ext.sub(one, t2);
        let c = ext.add(one, t2);
        total += sc[ext.index(a)] as u64 * sc[ext.index(b)] as u64 * sc[ext.index(c)] as u64;
    }
    let minus_one = ext.sub(QuadExt::ZERO, one);
    total += sc[ext.index(minus_one)] as u64 * sc[ext.index(one)] as u64;
    total
}

/// #X(F_p) by full enumeration of F_p^5, testing the three quadrics.
pub fn count_curve_x_brute(p: u64) -> Result<CountRecord, CountError> {
    if !is_odd_prime(p) {
        return Err(FieldError::NotOddPrime(p).into());
    }
    if p > CURVE_BRUTE_MAX_P {
        return Err(CountError::CostGuard {
            op: "count_curve_x_brute",
            p,
            max: CURVE_BRUTE_MAX_P,
        });
    }
    let sq: Vec<u64> = (0..p).map(|v| v * v % p).collect();
    let mut cone: u64 = 0;
    for x in 0..p as usize {
        for y in 0..p as usize {
            for u in 0..p as usize {
                for v in 0..p as usize {
                    for w in 0..p as usize {
                        let ok = sq[u] == 2 * (x as u64) * (y as u64) % p
                            && sq[v] == (sq[x] + p - sq[y]) % p
                            && sq[w] == (sq[x] + sq[y]) % p;
                        cone += ok as u64;
                    }
                }
            }
        }
    }
    Ok(CountRecord {
        variety: VarietyId::CurveX,
        p,
        degree: 1,
        count: projective_from_cone(cone, p),
        method: CountMethod::Brute,
    })
}

fn projective_from_cone(cone: u64, q: u64) -> u64 {
    assert_eq!(
        (cone - 1) % (q - 1),
        0,
        "cone count {cone} - 1 not divisible by q - 1 = {}",
        q - 1
    );
    (cone - 1) / (q - 1)
}

/// A singular point of the surface, coordinates in {0, +-1, +-i} as
/// (real, imaginary) parts.
pub type SingularPoint = [(i8, i8); 7];

/// The 48 singular points. The first 24 have rational coordinates; the last
/// 24 need i and come in complex-conjugate pairs (adjacent rows).
pub fn singular_points() -> &'static [SingularPoint; 48] {
    const I: (i8, i8) = (0, 1);
    const J: (i8, i8) = (0, -1); // -i
    const O: (i8, i8) = (0, 0);
    const P: (i8, i8) = (1, 0);
    const N: (i8, i8) = (-1, 0);
    const TABLE: [SingularPoint; 48] = [
        // a3 = +-1, b1 = b2 = +-1, c = 1
        [O, O, N, N, N, O, P],
        [O, O, N, N, P, O, P],
        [O, O, N, P, N, O, P],
        [O, O, N, P, P, O, P],
        [O, O, P, N, N, O, P],
        [O, O, P, N, P, O, P],
        [O, O, P, P, N, O, P],
        [O, O, P, P, P, O, P],
        // a2 = +-1, b1 = b3 = +-1, c = 1
        [O, N, O, N, O, N, P],
        [O, N, O, N, O, P, P],
        [O, N, O, P, O, N, P],
        [O, N, O, P, O, P, P],
        [O, P, O, N, O, N, P],
        [O, P, O, N, O, P, P],
        [O, P, O, P, O, N, P],
        [O, P, O, P, O, P, P],
        // a1 = +-1, b2 = b3 = +-1, c = 1
        [N, O, O, O, N, N, P],
        [N, O, O, O, N, P, P],
        [N, O, O, O, P, N, P],
        [N, O, O, O, P, P, P],
        [P, O, O, O, N, N, P],
        [P, O, O, O, N, P, P],
        [P, O, O, O, P, N, P],
        [P, O, O, O, P, P, P],
        // c = 0 planes: a2 = +-1, a3 = +-i, b2 = +-i, b3 = 1
        [O, N, J, O, J, P, O],
        [O, N, J, O, I, P, O],
        [O, N, I, O, J, P, O],
        [O, N, I, O, I, P, O],
        [O, P, J, O, J, P, O],
        [O, P, J, O, I, P, O],
        [O, P, I, O, J, P, O],
        [O, P, I, O, I, P, O],
        // c = 0 planes: a1 = +-1, a3 = +-i, b1 = +-i, b3 = 1
        [N, O, J, J, O, P, O],
        [N, O, J, I, O, P, O],
        [N, O, I, J, O, P, O],
        [N, O, I, I, O, P, O],
        [P, O, J, J, O, P, O],
        [P, O, J, I, O, P, O],
        [P, O, I, J, O, P, O],
        [P, O, I, I, O, P, O],
        // c = 0 planes: a1 = +-1, a2 = +-i, b1 = +-i, b2 = 1
        [N, J, O, J, P, O, O],
        [N, J, O, I, P, O, O],
        [N, I, O, J, P, O, O],
        [N, I, O, I, P, O, O],
        [P, J, O, J, P, O, O],
        [P, J, O, I, P, O, O],
        [P, I, O, J, P, O, O],
        [P, I, O, I, P, O, O],
    ];
    &TABLE
}

/// #Z(F_p): 48 when i exists mod p (p = 1 mod 4), else the 24 rational
/// points.
///
/// Evaluates the coordinate table mod p, projectively normalizes, and
/// asserts the surviving points are pairwise distinct and lie on S.
pub fn count_singular(ctx: &PrimeContext) -> Result<CountRecord, CountError> {
    let p = ctx.p();
    let root_i = sqrt_of_minus_one(ctx);
    let mut seen = std::collections::HashSet::new();
    let mut rational = 0u64;
    for pt in singular_points() {
        let r = match root_i {
            Some(r) => r,
            None => {
                if pt.iter().any(|&(_, im)| im != 0) {
                    continue;
                }
                0
            }
        };
        let coords: Vec<u64> = pt
            .iter()
            .map(|&(re, im)| ((re as i64 + im as i64 * r as i64).rem_euclid(p as i64)) as u64)
            .collect();
        assert!(
            on_surface(&coords, p),
            "singular point off the surface at p = {p}"
        );
        let last = coords
            .iter()
            .rposition(|&v| v != 0)
            .expect("projective point is nonzero");
        let inv = inverse_mod(coords[last], p);
        let normalized: Vec<u64> = coords.iter().map(|&v| v * inv % p).collect();
        assert!(
            seen.insert(normalized),
            "singular points collide mod p = {p}"
        );
        rational += 1;
    }
    let expected = if p % 4 == 1 { 48 } else { 24 };
    assert_eq!(
        rational, expected,
        "singular-point rationality count at p = {p}"
    );
    Ok(CountRecord {
        variety: VarietyId::SingularLocus,
        p,
        degree: 1,
        count: rational,
        method: CountMethod::Fast,
    })
}

fn sqrt_of_minus_one(ctx: &PrimeContext) -> Option<u64> {
    let p = ctx.p();
    if p % 4 != 1 {
        return None;
    }
    let r = (1..p)
        .find(|&r| r * r % p == p - 1)
        .expect("p = 1 mod 4 has a root of -1");
    Some(r)
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn on_surface(v: &[u64], p: u64) -> bool {
    let sq = |x: u64| x * x % p;
    let c2 = sq(v[6]);
    (sq(v[0]) + sq(v[3])) % p == c2
        && (sq(v[1]) + sq(v[4])) % p == c2
        && (sq(v[2]) + sq(v[5])) % p == c2
        && (sq(v[0]) + sq(v[1]) + sq(v[2])) % p == c2
}

/// The two candidate Galois actions on the 48 exceptional classes of the
/// resolution.
///
/// `Permutation`: classes are permuted like the singular points themselves
/// (24 rational points fixed, 12 conjugate pairs swapped), so Frobenius
/// contributes p per rational point of Z. `Twisted`: 24 classes carry the
/// trivial character and 24 carry chi_m4, contributing 24p + 24 chi_m4(p) p.
/// The two agree at p = 1 (mod 4) and differ by 24p at p = 3 (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionalAction {
    Permutation,
    Twisted,
}

impl ExceptionalAction {
    /// Frobenius trace of the exceptional summand at p.
    pub fn trace(self, p: u64) -> i64 {
        let chi = QuadChar::ChiM4.value_at_odd(p as i64) as i64;
        match self {
            ExceptionalAction::Permutation => {
                let rational = if p % 4 == 1 { 48 } else { 24 };
                rational * p as i64
            }
            ExceptionalAction::Twisted => 24 * p as i64 + 24 * chi * p as i64,
        }
    }
}

/// Predicted #S_resolved(F_p) under the chosen exceptional action: each
/// F_p-rational A1 point is replaced by a P^1, so the model adds the
/// exceptional Frobenius trace to #S(F_p).
pub fn model_resolved_count(
    ctx: &PrimeContext,
    action: ExceptionalAction,
) -> Result<i64, CountError> {
    let surface = count_surface_fast(ctx)?.count as i64;
    Ok(surface + action.trace(ctx.p()))
}

/// a_p = p + 1 - #E(F_p) for the CM curve, with #E = 1 + Sum_x sqrt_count(x^3 +- x).
pub fn count_elliptic(ctx: &PrimeContext, curve: CmCurve) -> i64 {
    let p = ctx.p();
    let mut affine: u64 = 0;
    for x in 0..p {
        let x3 = x * x % p * x % p;
        let rhs = match curve {
            CmCurve::E32 => (x3 + p - x) % p,
            CmCurve::E64 => (x3 + x) % p,
        };
        affine += ctx.sqrt_count(rhs);
    }
    p as i64 + 1 - (affine as i64 + 1)
}
