//! Loxodromic pairs: joint eigenframes, eigenpoint tuples in the reference,
//! canonical, good-pair and non-singular normalizations, and the conjugacy
//! decision procedure.

mod canonical;
mod conjugate;
mod good;
mod nonsingular;
mod reference;

pub use canonical::{canonical_constraints, canonical_eigenpoint, CanonicalEigenpoint, CentralizerElement, GramConstraint};
pub use conjugate::{
    conjugation_residual, decide_conjugacy, pairs_conjugate, ConjugacyOptions, Outcome, Verdict,
};
pub use good::{good_matching, is_good_pair_i, is_good_pair_i_with, normalize_good_i, GoodNormalization};
pub use nonsingular::{
    is_nonsingular, is_nonsingular_with, normalize_nonsingular, normalize_nonsingular_randomized, NonsingularTuple,
};
pub use reference::{
    pair_flags, profile_of_tuple, reference_eigenpoint, reference_eigenpoint_with, reference_invariants,
    CollisionPolicy, OrderingTag, PairFlags, PairProfile, ReferenceEigenpoint, Rephasing,
};

use serde::Serialize;
use std::f64::consts::SQRT_2;

use crate::boundary::BoundaryTuple;
use crate::error::{Error, Result};
use crate::form::{form, Isometry};
use crate::linalg::{edot, projective_distance, vnorm, CVector, C64};
use crate::loxodromic::{classify_with, eigenframe_with, is_regular_with, Eigenframe, IsometryType};
use crate::tol::Tolerances;

/// Which cross-element pairing is normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum AnchorConvention {
    /// `⟨a_A, a_B⟩ = 1`.
    AttractingAttracting,
    /// `⟨r_A, a_B⟩ = 1`.
    RepellingAttracting,
    /// `⟨a_A, r_B⟩ = 1`.
    AttractingRepelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Element {
    A,
    B,
}

/// Position of a point in the eigenpoint list of one element: 1 is the
/// attracting point, 2 the repelling point, `i ≥ 3` the point built from
/// `x_{i−2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PointLabel {
    pub element: Element,
    pub index: usize,
}

/// Two loxodromic elements without common fixed points, with eigenframes
/// jointly normalized so that `⟨a_A,r_A⟩ = ⟨a_B,r_B⟩ = 1` and the anchor
/// pairing recorded in `convention` equals 1.
#[derive(Debug, Clone)]
pub struct LoxodromicPair {
    a: Isometry,
    b: Isometry,
    frame_a: Eigenframe,
    frame_b: Eigenframe,
    convention: AnchorConvention,
}

pub fn make_pair(a: Isometry, b: Isometry) -> Result<LoxodromicPair> {
    make_pair_with(a, b, &Tolerances::default())
}

pub fn make_pair_with(a: Isometry, b: Isometry, tol: &Tolerances) -> Result<LoxodromicPair> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    for m in [&a, &b] {
        if classify_with(m, tol)? != IsometryType::Loxodromic {
            return Err(Error::NotLoxodromic);
        }
    }
    let frame_a = eigenframe_with(&a, tol)?;
    let frame_b = eigenframe_with(&b, tol)?;
    LoxodromicPair::from_frames(a, b, frame_a, frame_b, tol)
}

impl LoxodromicPair {
    /// Build a pair from given eigenframes, rescaling `a_B` and `r_B` to the
    /// `⟨a_A,a_B⟩ = 1` anchor, or `⟨r_A,a_B⟩ = 1` when the former pairing
    /// vanishes numerically.
    pub fn from_frames(a: Isometry, b: Isometry, frame_a: Eigenframe, frame_b: Eigenframe, tol: &Tolerances) -> Result<Self> {
        for u in [frame_a.a(), frame_a.r()] {
            for v in [frame_b.a(), frame_b.r()] {
                if projective_distance(u, v) <= tol.point {
                    return Err(Error::InvalidPair("the elements share a fixed point".into()));
                }
            }
        }
        let (anchor, convention) = if pairs_nontrivially(frame_a.a(), frame_b.a(), tol.pairing) {
            (frame_a.a(), AnchorConvention::AttractingAttracting)
        } else if pairs_nontrivially(frame_a.r(), frame_b.a(), tol.pairing) {
            (frame_a.r(), AnchorConvention::RepellingAttracting)
        } else {
            return Err(Error::Conditioning("a_B pairs to zero with both a_A and r_A".into()));
        };
        let frame_b = anchor_attracting(&frame_b, anchor);
        Ok(Self {
            a,
            b,
            frame_a,
            frame_b,
            convention,
        })
    }

    pub fn a(&self) -> &Isometry {
        &self.a
    }

    pub fn b(&self) -> &Isometry {
        &self.b
    }

    pub fn frame_a(&self) -> &Eigenframe {
        &self.frame_a
    }

    pub fn frame_b(&self) -> &Eigenframe {
        &self.frame_b
    }

    pub fn convention(&self) -> AnchorConvention {
        self.convention
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// `(CAC⁻¹, CBC⁻¹)` with both frames mapped by `C`.
    pub fn transport(&self, c: &Isometry) -> LoxodromicPair {
        LoxodromicPair {
            a: self.a.conjugate_by(c),
            b: self.b.conjugate_by(c),
            frame_a: self.frame_a.transport(c),
            frame_b: self.frame_b.transport(c),
            convention: self.convention,
        }
    }

    /// Both elements pass the resultant regularity test.
    pub fn is_regular(&self, tol: &Tolerances) -> Result<bool> {
        Ok(is_regular_with(&self.a, tol)?.regular && is_regular_with(&self.b, tol)?.regular)
    }

    pub(crate) fn frames(&self) -> PairFrames {
        PairFrames::of(&self.frame_a, &self.frame_b)
    }
}

/// Rescale `a_B` so that `⟨anchor, a_B⟩ = 1`, and `r_B` to keep `⟨a_B,r_B⟩`.
fn anchor_attracting(frame_b: &Eigenframe, anchor: &CVector) -> Eigenframe {
    let g = form(anchor, frame_b.a());
    let k = C64::from(1.0) / g.conj();
    frame_b.with_columns(frame_b.a() * k, frame_b.x().to_vec(), frame_b.r() * g)
}

pub(crate) fn pairs_nontrivially(u: &CVector, v: &CVector, tol: f64) -> bool {
    form(u, v).norm() > tol * vnorm(u) * vnorm(v)
}

/// The column vectors of both eigenframes, free to be rescaled by the
/// normalization routines.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PairFrames {
    pub a_a: CVector,
    pub r_a: CVector,
    pub x_a: Vec<CVector>,
    pub a_b: CVector,
    pub r_b: CVector,
    pub x_b: Vec<CVector>,
}

impl PairFrames {
    pub fn of(fa: &Eigenframe, fb: &Eigenframe) -> Self {
        Self {
            a_a: fa.a().clone(),
            r_a: fa.r().clone(),
            x_a: fa.x().to_vec(),
            a_b: fb.a().clone(),
            r_b: fb.r().clone(),
            x_b: fb.x().to_vec(),
        }
    }

    pub fn scale_all(&mut self, s: C64) {
        for v in self.vectors_mut() {
            *v *= s;
        }
    }

    fn vectors_mut(&mut self) -> impl Iterator<Item = &mut CVector> {
        [&mut self.a_a, &mut self.r_a, &mut self.a_b, &mut self.r_b]
            .into_iter()
            .chain(self.x_a.iter_mut())
            .chain(self.x_b.iter_mut())
    }

    /// Eigenpoint lifts `(a, r, (a−r)/√2 + x_1, …)` of one element.
    pub fn eigenpoints(&self, element: Element) -> Vec<CVector> {
        let (a, r, xs) = match element {
            Element::A => (&self.a_a, &self.r_a, &self.x_a),
            Element::B => (&self.a_b, &self.r_b, &self.x_b),
        };
        let mid = (a - r) / C64::from(SQRT_2);
        let mut pts = vec![a.clone(), r.clone()];
        pts.extend(xs.iter().map(|x| &mid + x));
        pts
    }

    /// Lifts in the order `(p_1, p_2, q_1, q_2, p_3, …, p_{n+1}, q_3, …, q_{n+1})`.
    pub fn reference_order(&self) -> Vec<(PointLabel, CVector)> {
        let p = self.eigenpoints(Element::A);
        let q = self.eigenpoints(Element::B);
        let label = |element, index| PointLabel { element, index };
        let mut out = vec![
            (label(Element::A, 1), p[0].clone()),
            (label(Element::A, 2), p[1].clone()),
            (label(Element::B, 1), q[0].clone()),
            (label(Element::B, 2), q[1].clone()),
        ];
        out.extend(p.iter().enumerate().skip(2).map(|(i, v)| (label(Element::A, i + 1), v.clone())));
        out.extend(q.iter().enumerate().skip(2).map(|(i, v)| (label(Element::B, i + 1), v.clone())));
        out
    }
}

/// Points in order with duplicates (within `tol`) removed, keeping the
/// first occurrence. Returns the tuple, the labels of the kept points and
/// the map from each original position to its index in the tuple.
pub(crate) fn dedupe(points: Vec<(PointLabel, CVector)>, tol: f64) -> Result<(BoundaryTuple, Vec<PointLabel>, Vec<usize>)> {
    let mut kept: Vec<(PointLabel, CVector)> = Vec::new();
    let mut map = Vec::with_capacity(points.len());
    for (label, v) in points {
        match kept.iter().position(|(_, w)| projective_distance(w, &v) <= tol) {
            Some(i) => map.push(i),
            None => {
                map.push(kept.len());
                kept.push((label, v));
            }
        }
    }
    let labels = kept.iter().map(|(l, _)| *l).collect();
    let pts = kept
        .into_iter()
        .map(|(_, v)| crate::boundary::BoundaryPoint::trusted(v))
        .collect();
    Ok((BoundaryTuple::with_tolerance(pts, tol)?, labels, map))
}

/// The unimodular `ω` best aligning `p` with `q` (`q_k ≈ ω p_k`) and the
/// largest relative deviation `‖q_k − ω p_k‖ / ‖p_k‖`.
pub fn global_scalar_deviation(p: &[CVector], q: &[CVector]) -> (C64, f64) {
    let s: C64 = p.iter().zip(q).map(|(u, v)| edot(v, u)).sum();
    let omega = if s.norm() > 0.0 { s / s.norm() } else { C64::from(1.0) };
    let dev = p
        .iter()
        .zip(q)
        .map(|(u, v)| vnorm(&(v - u * omega)) / vnorm(u).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    (omega, dev)
}
