//! Canonical eigenpoints: the `⟨r_A, a_B⟩ = 1` anchor, the ordering
//! `(a_A, r_A, q_{1,A}, …, q_{n−1,A}, a_B, r_B, q_{1,B}, …, q_{n−1,B})` and
//! the Gram constraints cutting out the section `L_t`.

use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use super::{dedupe, pairs_nontrivially, AnchorConvention, Element, LoxodromicPair, PairFrames, PointLabel};
use crate::boundary::BoundaryTuple;
use crate::error::{Error, Result};
use crate::form::form;
use crate::linalg::{vnorm, CMatrix, CVector, C64};
use crate::tol::Tolerances;

/// `⟨p_i, p_j⟩ = value` with 1-based positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramConstraint {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Constraints satisfied by every canonical eigenpoint of a pair in
/// `SU(n,1)`, derived from the eigenpoint construction over all `2n+2`
/// positions.
pub fn canonical_constraints(n: usize) -> Vec<GramConstraint> {
    let c = |i, j, value| GramConstraint { i, j, value };
    let b = n + 1;
    let mut out = vec![c(1, 2, 1.0), c(b + 1, b + 2, 1.0), c(2, b + 1, 1.0)];
    for off in [0, b] {
        for i in 3..=b {
            for j in 3..=b {
                if i != j {
                    out.push(c(off + i, off + j, -1.0));
                }
            }
        }
        for i in 3..=b {
            out.push(c(off + 1, off + i, -FRAC_1_SQRT_2));
            out.push(c(off + 2, off + i, FRAC_1_SQRT_2));
        }
    }
    out
}

/// An element `(λ, U_1, …, U_k, V_1, …, V_l)` of `C* × ∏U(a_i) × ∏U(b_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralizerElement {
    pub lambda: C64,
    pub blocks_a: Vec<CMatrix>,
    pub blocks_b: Vec<CMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalEigenpoint {
    frames: PairFrames,
    /// Distinct points, first occurrences kept.
    pub tuple: BoundaryTuple,
    pub labels: Vec<PointLabel>,
    pub relabel: Vec<usize>,
    pub convention: AnchorConvention,
}

impl CanonicalEigenpoint {
    fn build(frames: PairFrames, tol: &Tolerances) -> Result<Self> {
        let (tuple, labels, relabel) = dedupe(canonical_order(&frames), tol.point)?;
        Ok(Self {
            frames,
            tuple,
            labels,
            relabel,
            convention: AnchorConvention::RepellingAttracting,
        })
    }

    /// All `2n+2` lifts in canonical order, repeats included.
    pub fn lifts(&self) -> Vec<CVector> {
        canonical_order(&self.frames).into_iter().map(|(_, v)| v).collect()
    }

    pub fn n(&self) -> usize {
        self.frames.a_a.len() - 1
    }

    /// Largest violation of `canonical_constraints`, relative to
    /// `max(1, ‖p_i‖‖p_j‖)`.
    pub fn constraint_residual(&self) -> f64 {
        let lifts = self.lifts();
        canonical_constraints(self.n())
            .iter()
            .map(|c| {
                let (u, v) = (&lifts[c.i - 1], &lifts[c.j - 1]);
                (form(u, v) - C64::from(c.value)).norm() / (vnorm(u) * vnorm(v)).max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// The right action `g.p`: `λ` on the attracting vectors, `λ̄⁻¹` on the
    /// repelling ones, and each unitary block on its polar columns. The
    /// block sizes must match the multiplicities of `A` and `B`.
    pub fn acted_on(&self, g: &CentralizerElement, tol: &Tolerances) -> Result<Self> {
        let mut f = self.frames.clone();
        let inv = C64::from(1.0) / g.lambda.conj();
        f.a_a *= g.lambda;
        f.a_b *= g.lambda;
        f.r_a *= inv;
        f.r_b *= inv;
        f.x_a = act_blocks(&f.x_a, &g.blocks_a)?;
        f.x_b = act_blocks(&f.x_b, &g.blocks_b)?;
        Self::build(f, tol)
    }
}

fn act_blocks(xs: &[CVector], blocks: &[CMatrix]) -> Result<Vec<CVector>> {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    if total != xs.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: total,
        });
    }
    let mut out = Vec::with_capacity(xs.len());
    let mut start = 0;
    for u in blocks {
        let m = u.nrows();
        let cols = CMatrix::from_columns(&xs[start..start + m]);
        let moved = cols * u;
        out.extend(moved.column_iter().map(|c| c.into_owned()));
        start += m;
    }
    Ok(out)
}

fn canonical_order(f: &PairFrames) -> Vec<(PointLabel, CVector)> {
    let mut out = Vec::new();
    for element in [Element::A, Element::B] {
        out.extend(
            f.eigenpoints(element)
                .into_iter()
                .enumerate()
                .map(|(i, v)| (PointLabel { element, index: i + 1 }, v)),
        );
    }
    out
}

/// Frames rescaled to `⟨a_A,r_A⟩ = ⟨a_B,r_B⟩ = ⟨r_A,a_B⟩ = 1`, with the
/// constraints verified to `1e-9`.
pub fn canonical_eigenpoint(pair: &LoxodromicPair) -> Result<CanonicalEigenpoint> {
    let tol = Tolerances::default();
    let mut f = pair.frames();
    if !pairs_nontrivially(&f.r_a, &f.a_b, tol.pairing) {
        return Err(Error::AnchorUnavailable);
    }
    let g = form(&f.r_a, &f.a_b);
    f.a_b /= g.conj();
    f.r_b *= g;
    let point = CanonicalEigenpoint::build(f, &tol)?;
    let residual = point.constraint_residual();
    if residual > 1e-9 {
        return Err(Error::Conditioning(format!("canonical constraint residual {residual:.3e}")));
    }
    Ok(point)
}
