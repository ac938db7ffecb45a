//! Reference eigenpoints and the invariant profile of a pair.

use rand::Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

use super::{dedupe, AnchorConvention, Element, LoxodromicPair, PairFrames, PointLabel};
use crate::boundary::{invariant_vector, BoundaryTuple, LabeledCross};
use crate::error::{Error, Result};
use crate::linalg::{projective_distance, C64};
use crate::loxodromic::{multiplicity, trace_tuple, Multiplicity, TraceTuple};
use crate::random::seeded_rng;
use crate::tol::Tolerances;

/// Deterministic rephasings by `e^{iπ/4}` tried before random phases.
const DETERMINISTIC_REPHASINGS: usize = 7;
const RANDOM_REPHASINGS: usize = 16;

/// What to do when an eigenpoint of `A` coincides with one of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CollisionPolicy {
    /// Multiply the colliding polar vector by a unit scalar until all
    /// points are distinct.
    #[default]
    Rephase,
    /// Keep the frames and drop repeated points.
    Relabel,
}

/// A polar vector multiplied by `e^{i·phase}` to resolve a collision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rephasing {
    pub element: Element,
    /// 1-based index of the polar vector `x_i`.
    pub polar: usize,
    pub phase: f64,
}

/// Provenance of each point of an eigenpoint tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderingTag {
    /// Label of every emitted point, in tuple order.
    pub labels: Vec<PointLabel>,
    /// For each position of the full ordering, the tuple index it maps to.
    pub relabel: Vec<usize>,
    pub rephased: Vec<Rephasing>,
    pub convention: AnchorConvention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEigenpoint {
    pub tuple: BoundaryTuple,
    pub ordering: OrderingTag,
}

impl ReferenceEigenpoint {
    pub fn t(&self) -> usize {
        self.tuple.len()
    }
}

pub fn reference_eigenpoint(pair: &LoxodromicPair, seed: u64) -> Result<ReferenceEigenpoint> {
    reference_eigenpoint_with(pair, seed, CollisionPolicy::Rephase, &Tolerances::default())
}

/// The tuple `(p_1, p_2, q_1, q_2, p_3, …, p_{n+1}, q_3, …, q_{n+1})` of
/// eigenpoints of the pair's frames. `seed` drives the random phases used
/// once the deterministic rephasings are exhausted.
pub fn reference_eigenpoint_with(
    pair: &LoxodromicPair,
    seed: u64,
    policy: CollisionPolicy,
    tol: &Tolerances,
) -> Result<ReferenceEigenpoint> {
    let mut frames = pair.frames();
    let mut rephased = Vec::new();
    if policy == CollisionPolicy::Rephase {
        let mut rng = seeded_rng(seed);
        let budget = DETERMINISTIC_REPHASINGS + RANDOM_REPHASINGS;
        let mut attempt = 0;
        while let Some((pa, pb)) = first_collision(&frames, tol.point) {
            if attempt == budget {
                return Err(Error::CollisionUnresolved { attempts: budget });
            }
            let (element, index) = if pa.index >= 3 {
                (Element::A, pa.index - 2)
            } else {
                (Element::B, pb.index - 2)
            };
            let phase = if attempt < DETERMINISTIC_REPHASINGS {
                FRAC_PI_4
            } else {
                rng.random_range(0.0..2.0 * PI)
            };
            let xs = match element {
                Element::A => &mut frames.x_a,
                Element::B => &mut frames.x_b,
            };
            xs[index - 1] *= C64::from_polar(1.0, phase);
            rephased.push(Rephasing {
                element,
                polar: index,
                phase,
            });
            attempt += 1;
        }
    }
    let (tuple, labels, relabel) = dedupe(frames.reference_order(), tol.point)?;
    Ok(ReferenceEigenpoint {
        tuple,
        ordering: OrderingTag {
            labels,
            relabel,
            rephased,
            convention: pair.convention(),
        },
    })
}

/// First coincidence between an `A` point and a `B` point, as
/// `(label_A, label_B)`. A shared fixed point is excluded by the pair, so
/// at least one of the two is built from a polar vector.
fn first_collision(frames: &PairFrames, tol: f64) -> Option<(PointLabel, PointLabel)> {
    let p = frames.eigenpoints(Element::A);
    let q = frames.eigenpoints(Element::B);
    for (i, u) in p.iter().enumerate() {
        for (j, v) in q.iter().enumerate() {
            if (i >= 2 || j >= 2) && projective_distance(u, v) <= tol {
                return Some((
                    PointLabel {
                        element: Element::A,
                        index: i + 1,
                    },
                    PointLabel {
                        element: Element::B,
                        index: j + 1,
                    },
                ));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairFlags {
    pub regular: bool,
    #[serde(rename = "goodI")]
    pub good_i: bool,
    pub non_singular: bool,
}

pub fn pair_flags(pair: &LoxodromicPair, tol: &Tolerances) -> Result<PairFlags> {
    let regular = pair.is_regular(tol)?;
    Ok(PairFlags {
        regular,
        good_i: regular && super::good::is_good_pair_i_with(pair, tol),
        non_singular: regular && super::nonsingular::is_nonsingular_with(pair, tol),
    })
}

/// Traces, multiplicities, flags and the invariants of an eigenpoint tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairProfile {
    pub traces_a: TraceTuple,
    pub traces_b: TraceTuple,
    pub mult_a: Multiplicity,
    pub mult_b: Multiplicity,
    pub flags: PairFlags,
    /// `𝔸(p_1, p_2, p_3)`.
    pub angular: f64,
    pub cross: Vec<LabeledCross>,
    pub t: usize,
    pub convention: AnchorConvention,
}

impl PairProfile {
    /// Largest componentwise difference: absolute on traces and the angle,
    /// `|ΔX|/max(1,|X|)` on cross ratios. `None` if the shapes differ.
    pub fn max_deviation(&self, other: &PairProfile) -> Option<f64> {
        if self.t != other.t
            || self.mult_a != other.mult_a
            || self.mult_b != other.mult_b
            || self.flags != other.flags
            || self.convention != other.convention
            || self.traces_a.values.len() != other.traces_a.values.len()
            || self.cross.len() != other.cross.len()
        {
            return None;
        }
        let mut worst = (self.angular - other.angular).abs();
        for (t, u) in [(&self.traces_a, &other.traces_a), (&self.traces_b, &other.traces_b)] {
            for (x, y) in t.values.iter().zip(&u.values) {
                worst = worst.max((x - y).norm());
            }
        }
        for (x, y) in self.cross.iter().zip(&other.cross) {
            if (x.k, x.j) != (y.k, y.j) {
                return None;
            }
            worst = worst.max((x.value - y.value).norm() / x.value.norm().max(1.0));
        }
        Some(worst)
    }
}

pub fn reference_invariants(pair: &LoxodromicPair) -> Result<PairProfile> {
    let tol = Tolerances::default();
    let point = reference_eigenpoint_with(pair, 0, CollisionPolicy::Rephase, &tol)?;
    profile_of_tuple(pair, &point.tuple, pair.convention(), &tol)
}

/// Profile of `pair` with invariants taken over `tuple`.
pub fn profile_of_tuple(
    pair: &LoxodromicPair,
    tuple: &BoundaryTuple,
    convention: AnchorConvention,
    tol: &Tolerances,
) -> Result<PairProfile> {
    let iv = invariant_vector(tuple)?;
    Ok(PairProfile {
        traces_a: trace_tuple(pair.a()),
        traces_b: trace_tuple(pair.b()),
        mult_a: multiplicity(pair.a())?,
        mult_b: multiplicity(pair.b())?,
        flags: pair_flags(pair, tol)?,
        angular: iv.angular,
        cross: iv.cross,
        t: tuple.len(),
        convention,
    })
}
