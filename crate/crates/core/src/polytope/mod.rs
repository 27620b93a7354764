//! Exact certification of the bounds on `I_a`: at most 1 over binary
//! nonsignaling correlations and at most 4/3 over all nonsignaling
//! correlations. Everything here runs in exact rational arithmetic.

mod simplex;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::behavior::{table_index, Behavior, TABLE_LEN};
use crate::error::Result;
pub use simplex::ExactLp;

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// The precluded outcome per setting that defines a binary-support face:
/// `P(a,b|x,y) = 0` whenever `a = precluded_a[x]` or `b = precluded_b[y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SupportChoice {
    pub precluded_a: [usize; 2],
    pub precluded_b: [usize; 2],
}

impl SupportChoice {
    /// All 81 support choices, in lexicographic order.
    pub fn all() -> Vec<SupportChoice> {
        let mut out = Vec::with_capacity(81);
        for a0 in 0..3 {
            for a1 in 0..3 {
                for b0 in 0..3 {
                    for b1 in 0..3 {
                        out.push(SupportChoice {
                            precluded_a: [a0, a1],
                            precluded_b: [b0, b1],
                        });
                    }
                }
            }
        }
        out
    }

    /// The two allowed outcomes for Alice's setting `x`, ascending.
    pub fn allowed_a(&self, x: usize) -> [usize; 2] {
        allowed(self.precluded_a[x])
    }

    pub fn allowed_b(&self, y: usize) -> [usize; 2] {
        allowed(self.precluded_b[y])
    }
}

fn allowed(precluded: usize) -> [usize; 2] {
    match precluded {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Provenance of an extremal binary-nonsignaling point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    Deterministic,
    PrBox,
}

/// An exact-rational behavior table with binary-support provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalBehavior {
    /// 36 entries, row-major in `(x, y, a, b)`.
    pub p: Vec<Rational>,
    pub kind: VertexKind,
    pub support: SupportChoice,
}

impl RationalBehavior {
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> &Rational {
        &self.p[table_index(x, y, a, b)]
    }

    /// Exact `I_a`.
    pub fn i_a(&self) -> Rational {
        ia_from(&self.p)
    }

    /// Exact nonsignaling test: true iff every marginal equality holds.
    pub fn is_nonsignaling(&self) -> bool {
        for x in 0..2 {
            for a in 0..3 {
                let m0: Rational = (0..3).map(|b| self.get(x, 0, a, b)).sum();
                let m1: Rational = (0..3).map(|b| self.get(x, 1, a, b)).sum();
                if m0 != m1 {
                    return false;
                }
            }
        }
        for y in 0..2 {
            for b in 0..3 {
                let m0: Rational = (0..3).map(|a| self.get(0, y, a, b)).sum();
                let m1: Rational = (0..3).map(|a| self.get(1, y, a, b)).sum();
                if m0 != m1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_behavior(&self) -> Behavior {
        let mut p = [0.0; TABLE_LEN];
        for (i, v) in self.p.iter().enumerate() {
            p[i] = rational_to_f64(v);
        }
        Behavior::from_raw(p)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    num / den
}

/// Exact `I_a` of a 36-entry rational table.
pub fn ia_from(p: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for k in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                let term = p[table_index(x, y, k, k)].clone();
                if (k + x + y) % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
        }
    }
    total
}

/// A 2-setting/2-outcome behavior with entries in half-units (0, 1, or 2
/// meaning 0, 1/2, 1), indexed `(x, y, a, b)` row-major.
pub type TwoTwoTable = [u8; 16];

#[inline]
fn tt_index(x: usize, y: usize, a: usize, b: usize) -> usize {
    ((x * 2 + y) * 2 + a) * 2 + b
}

/// Extremal points of the 2-setting/2-outcome nonsignaling polytope,
/// generated by exhaustive filtering rather than transcription: all tables
/// with entries in {0, 1/2, 1} that are normalized and nonsignaling, minus
/// those expressible as midpoints of two others. Yields the 16 deterministic
/// points and the 8 Popescu-Rohrlich boxes.
pub fn two_two_vertices() -> Vec<TwoTwoTable> {
    // Per-slice distributions: 4 half-unit entries summing to one.
    let mut slices: Vec<[u8; 4]> = Vec::new();
    for e0 in 0..3u8 {
        for e1 in 0..3u8 {
            for e2 in 0..3u8 {
                for e3 in 0..3u8 {
                    if e0 + e1 + e2 + e3 == 2 {
                        slices.push([e0, e1, e2, e3]);
                    }
                }
            }
        }
    }
    debug_assert_eq!(slices.len(), 10);

    let mut candidates: Vec<TwoTwoTable> = Vec::new();
    for s00 in &slices {
        for s01 in &slices {
            for s10 in &slices {
                for s11 in &slices {
                    let mut t = [0u8; 16];
                    for (xy, s) in [s00, s01, s10, s11].iter().enumerate() {
                        for k in 0..4 {
                            t[xy * 4 + k] = s[k];
                        }
                    }
                    if tt_is_nonsignaling(&t) {
                        candidates.push(t);
                    }
                }
            }
        }
    }

    // Midpoint filter: a candidate is extremal iff it is not the midpoint of
    // two distinct candidates. All non-extremal half-unit tables are
    // midpoints of half-unit tables, so testing within the candidate set is
    // exhaustive.
    let index: HashSet<TwoTwoTable> = candidates.iter().copied().collect();
    let mut midpoints: HashSet<TwoTwoTable> = HashSet::new();
    for (i, u) in candidates.iter().enumerate() {
        for w in candidates.iter().skip(i + 1) {
            let mut mid = [0u8; 16];
            let mut ok = true;
            for k in 0..16 {
                let s = u[k] + w[k];
                if s % 2 != 0 {
                    ok = false;
                    break;
                }
                mid[k] = s / 2;
            }
            if ok && index.contains(&mid) {
                midpoints.insert(mid);
            }
        }
    }
    let mut vertices: Vec<TwoTwoTable> = candidates
        .into_iter()
        .filter(|t| !midpoints.contains(t))
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    vertices
}

fn tt_is_nonsignaling(t: &TwoTwoTable) -> bool {
    for x in 0..2 {
        for a in 0..2 {
            let m0 = t[tt_index(x, 0, a, 0)] + t[tt_index(x, 0, a, 1)];
            let m1 = t[tt_index(x, 1, a, 0)] + t[tt_index(x, 1, a, 1)];
            if m0 != m1 {
                return false;
            }
        }
    }
    for y in 0..2 {
        for b in 0..2 {
            let m0 = t[tt_index(0, y, 0, b)] + t[tt_index(0, y, 1, b)];
            let m1 = t[tt_index(1, y, 0, b)] + t[tt_index(1, y, 1, b)];
            if m0 != m1 {
                return false;
            }
        }
    }
    true
}

/// Whether a 2222 table is deterministic (all entries 0 or 1).
pub fn tt_is_deterministic(t: &TwoTwoTable) -> bool {
    t.iter().all(|&e| e == 0 || e == 2)
}

/// Embeds a 2222 vertex into the three-outcome scenario on the given
/// binary-support face.
pub fn embed(t: &TwoTwoTable, support: &SupportChoice) -> RationalBehavior {
    let mut p = vec![Rational::zero(); TABLE_LEN];
    for x in 0..2 {
        let aa = support.allowed_a(x);
        for y in 0..2 {
            let bb = support.allowed_b(y);
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let halves = t[tt_index(x, y, a2, b2)];
                    p[table_index(x, y, aa[a2], bb[b2])] =
                        Rational::new(BigInt::from(halves), BigInt::from(2));
                }
            }
        }
    }
    RationalBehavior {
        p,
        kind: if tt_is_deterministic(t) {
            VertexKind::Deterministic
        } else {
            VertexKind::PrBox
        },
        support: *support,
    }
}

/// All extremal binary nonsignaling behaviors: the 2222 vertices embedded on
/// every binary-support face, deduplicated by exact table equality and
/// returned in canonical lexicographic order.
pub fn enumerate_binary_ns_vertices() -> Vec<RationalBehavior> {
    let tt = two_two_vertices();
    let mut all: Vec<RationalBehavior> = Vec::with_capacity(81 * tt.len());
    for support in SupportChoice::all() {
        for t in &tt {
            all.push(embed(t, &support));
        }
    }
    all.sort_by(|u, w| u.p.cmp(&w.p));
    all.dedup_by(|u, w| u.p == w.p);
    all
}

/// Exact maximum of `I_a` over all binary nonsignaling extremal points.
pub fn max_ia_binary() -> Rational {
    enumerate_binary_ns_vertices()
        .iter()
        .map(|v| v.i_a())
        .max()
        .expect("vertex list is nonempty")
}

/// The symbolic coefficient table of `3 I_a - X_A - X_B` in the 36
/// coordinates, with the verdict that every coefficient lies in {-1, 0, 1}.
/// Together with the per-slice normalizations summing to 4, this certifies
/// `I_a <= 4/3` for nonsignaling behaviors.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientCertificate {
    /// `coefficients[x][y][a][b]` of `P(a,b|x,y)` in `3 I_a - X_A - X_B`.
    pub coefficients: [[[[i64; 3]; 3]; 2]; 2],
    pub all_in_unit_range: bool,
}

pub fn certify_coefficient_argument() -> CoefficientCertificate {
    let mut coefficients = [[[[0i64; 3]; 3]; 2]; 2];
    let mut all_in_unit_range = true;
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    // Expand by evaluating the linear functional on the
                    // indicator table of this single coordinate.
                    let mut p = vec![Rational::zero(); TABLE_LEN];
                    p[table_index(x, y, a, b)] = Rational::one();
                    let rb = RationalBehavior {
                        p,
                        kind: VertexKind::Deterministic,
                        support: SupportChoice {
                            precluded_a: [0, 0],
                            precluded_b: [0, 0],
                        },
                    };
                    let value = rational(3, 1) * ia_from(&rb.p) - xa_exact(&rb.p) - xb_exact(&rb.p);
                    debug_assert!(value.is_integer());
                    let c: i64 = i64::try_from(value.to_integer()).expect("small coefficient");
                    coefficients[x][y][a][b] = c;
                    if c.abs() > 1 {
                        all_in_unit_range = false;
                    }
                }
            }
        }
    }
    CoefficientCertificate {
        coefficients,
        all_in_unit_range,
    }
}

fn xa_exact(p: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for a in 0..2 {
        for b in 0..3 {
            for x in 0..2 {
                for y in 0..2 {
                    let term = p[table_index(x, y, a, b)].clone();
                    if (a + x + y) % 2 == 0 {
                        total += term;
                    } else {
                        total -= term;
                    }
                }
            }
        }
    }
    total
}

fn xb_exact(p: &[Rational]) -> Rational {
    let mut total = Rational::zero();
    for b in 0..2 {
        for a in 0..3 {
            for x in 0..2 {
                for y in 0..2 {
                    let term = p[table_index(x, y, a, b)].clone();
                    if (b + x + y) % 2 == 0 {
                        total += term;
                    } else {
                        total -= term;
                    }
                }
            }
        }
    }
    total
}

/// Builds the nonsignaling LP: 36 nonnegative variables, 4 normalization
/// equalities, and the 12 marginal equalities. Optionally restricted to a
/// binary-support face by fixing the precluded coordinates to zero.
pub fn nonsignaling_lp(support: Option<&SupportChoice>) -> ExactLp {
    let mut lp = ExactLp::new(TABLE_LEN);
    for x in 0..2 {
        for y in 0..2 {
            let mut row = vec![Rational::zero(); TABLE_LEN];
            for a in 0..3 {
                for b in 0..3 {
                    row[table_index(x, y, a, b)] = Rational::one();
                }
            }
            lp.add_equality(row, Rational::one());
        }
    }
    for x in 0..2 {
        for a in 0..3 {
            let mut row = vec![Rational::zero(); TABLE_LEN];
            for b in 0..3 {
                row[table_index(x, 0, a, b)] += Rational::one();
                row[table_index(x, 1, a, b)] -= Rational::one();
            }
            lp.add_equality(row, Rational::zero());
        }
    }
    for y in 0..2 {
        for b in 0..3 {
            let mut row = vec![Rational::zero(); TABLE_LEN];
            for a in 0..3 {
                row[table_index(0, y, a, b)] += Rational::one();
                row[table_index(1, y, a, b)] -= Rational::one();
            }
            lp.add_equality(row, Rational::zero());
        }
    }
    if let Some(s) = support {
        let mut fixed = HashSet::new();
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..3 {
                    for b in 0..3 {
                        if a == s.precluded_a[x] || b == s.precluded_b[y] {
                            fixed.insert(table_index(x, y, a, b));
                        }
                    }
                }
            }
        }
        for i in fixed {
            let mut row = vec![Rational::zero(); TABLE_LEN];
            row[i] = Rational::one();
            lp.add_equality(row, Rational::zero());
        }
    }
    lp
}

/// The objective vector of `I_a`.
pub fn ia_objective() -> Vec<Rational> {
    let mut c = vec![Rational::zero(); TABLE_LEN];
    for k in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                c[table_index(x, y, k, k)] = if (k + x + y) % 2 == 0 {
                    Rational::one()
                } else {
                    -Rational::one()
                };
            }
        }
    }
    c
}

/// Exact maximum of `I_a` over all nonsignaling behaviors, by LP.
pub fn max_ia_nonsignaling_lp() -> Result<Rational> {
    let lp = nonsignaling_lp(None);
    let (value, _) = lp.maximize(&ia_objective())?;
    Ok(value)
}

/// The full certificate emitted by the `bound` subcommand.
#[derive(Debug, Serialize)]
pub struct BoundCertificate {
    /// Deduplicated extremal binary nonsignaling points.
    pub vertex_count: usize,
    /// Exact max of `I_a` over those points, as "p/q".
    pub binary_max: String,
    /// Exact LP max of `I_a` over nonsignaling behaviors, as "p/q".
    pub nonsignaling_max: String,
    pub coefficients: [[[[i64; 3]; 3]; 2]; 2],
    pub coefficients_in_unit_range: bool,
}

pub fn bound_certificate() -> Result<BoundCertificate> {
    let vertices = enumerate_binary_ns_vertices();
    let binary_max = vertices
        .iter()
        .map(|v| v.i_a())
        .max()
        .expect("vertex list is nonempty");
    let ns_max = max_ia_nonsignaling_lp()?;
    let cert = certify_coefficient_argument();
    Ok(BoundCertificate {
        vertex_count: vertices.len(),
        binary_max: format_rational(&binary_max),
        nonsignaling_max: format_rational(&ns_max),
        coefficients: cert.coefficients,
        coefficients_in_unit_range: cert.all_in_unit_range,
    })
}

/// Formats a rational as "p/q".
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_two_polytope_has_24_vertices() {
        let v = two_two_vertices();
        assert_eq!(v.len(), 24);
        assert_eq!(v.iter().filter(|t| tt_is_deterministic(t)).count(), 16);
    }

    #[test]
    fn each_support_contributes_24_points() {
        let tt = two_two_vertices();
        for support in SupportChoice::all() {
            let embedded: Vec<_> = tt.iter().map(|t| embed(t, &support)).collect();
            assert_eq!(embedded.len(), 24);
            for rb in &embedded {
                assert!(rb.is_nonsignaling());
                for x in 0..2 {
                    for y in 0..2 {
                        let s: Rational =
                            (0..3).flat_map(|a| (0..3).map(move |b| (a, b)))
                                .map(|(a, b)| rb.get(x, y, a, b))
                                .sum();
                        assert_eq!(s, Rational::one());
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_saturating_point_is_enumerated() {
        // The assignment a = x, b = 2y as a rational table.
        let vertices = enumerate_binary_ns_vertices();
        let mut target = vec![Rational::zero(); TABLE_LEN];
        for x in 0..2 {
            for y in 0..2 {
                target[table_index(x, y, x, 2 * y)] = Rational::one();
            }
        }
        assert!(vertices.iter().any(|v| v.p == target));
    }

    #[test]
    fn binary_max_is_exactly_one() {
        assert_eq!(max_ia_binary(), Rational::one());
    }

    #[test]
    fn deterministic_vertices_alone_reach_one() {
        let best = enumerate_binary_ns_vertices()
            .iter()
            .filter(|v| v.kind == VertexKind::Deterministic)
            .map(|v| v.i_a())
            .max()
            .unwrap();
        assert_eq!(best, Rational::one());
    }

    #[test]
    fn pr_vertex_values_are_half_integer() {
        let half = rational(1, 2);
        for v in enumerate_binary_ns_vertices() {
            if v.kind == VertexKind::PrBox {
                let q = v.i_a() / half.clone();
                assert!(q.is_integer(), "I_a of a PR embedding must be k/2");
            }
        }
    }

    #[test]
    fn vertex_enumeration_is_deterministic() {
        let a = enumerate_binary_ns_vertices();
        let b = enumerate_binary_ns_vertices();
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(u, w)| u.p == w.p));
    }

    #[test]
    fn every_vertex_respects_the_binary_bound() {
        for v in enumerate_binary_ns_vertices() {
            assert!(v.i_a() <= Rational::one());
        }
    }

    #[test]
    fn coefficient_certificate_matches_hand_values() {
        let cert = certify_coefficient_argument();
        assert!(cert.all_in_unit_range);
        // 3(-1)^0 - (-1)^0 - (-1)^0 = 1.
        assert_eq!(cert.coefficients[0][0][0][0], 1);
        // a=0, b=1: the I_a term is absent and the X terms cancel.
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(cert.coefficients[x][y][0][1], 0);
                // a = b = 2 appears in none of the three sums.
                assert_eq!(cert.coefficients[x][y][2][2], 0);
            }
        }
    }

    #[test]
    fn lp_max_is_four_thirds() {
        assert_eq!(max_ia_nonsignaling_lp().unwrap(), rational(4, 3));
    }

    #[test]
    fn lp_on_saturating_support_face_gives_one() {
        // A face containing the assignment a = x, b = 2y.
        let support = SupportChoice {
            precluded_a: [2, 2],
            precluded_b: [1, 0],
        };
        let lp = nonsignaling_lp(Some(&support));
        let (value, _) = lp.maximize(&ia_objective()).unwrap();
        assert_eq!(value, Rational::one());
    }

    #[test]
    fn negated_objective_gives_minus_four_thirds() {
        let lp = nonsignaling_lp(None);
        let neg: Vec<Rational> = ia_objective().into_iter().map(|c| -c).collect();
        let (value, _) = lp.maximize(&neg).unwrap();
        assert_eq!(value, rational(4, 3));
    }
}
