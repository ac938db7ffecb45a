//! Good pairs of type I: every polar eigenvector of `B` pairs with a polar
//! eigenvector of `A`, so the frames can be normalized up to the torus
//! `C* × U(1)^{n−1}`.

use super::reference::{OrderingTag, ReferenceEigenpoint};
use super::{dedupe, pairs_nontrivially, AnchorConvention, LoxodromicPair, PairFrames};
use crate::error::{Error, Result};
use crate::form::form;
use crate::linalg::{vnorm, CVector, C64};
use crate::tol::Tolerances;

/// Products below this fraction of the factor norms are skipped when
/// choosing the pinning pairing.
const PIN_THRESHOLD: f64 = 1e-6;

pub fn is_good_pair_i(pair: &LoxodromicPair) -> bool {
    is_good_pair_i_with(pair, &Tolerances::default())
}

/// Both elements regular and the bipartite graph of nonzero pairings
/// `⟨x_{i,A}, x_{j,B}⟩` has a perfect matching. Elements whose regularity
/// cannot be certified count as not regular.
pub fn is_good_pair_i_with(pair: &LoxodromicPair, tol: &Tolerances) -> bool {
    matches!(pair.is_regular(tol), Ok(true)) && good_matching(pair, tol).is_some()
}

/// `m[i] = j` pairs `x_{i,A}` with `x_{j,B}` (0-based), found by augmenting
/// paths over the nonzero pairings in index order.
pub fn good_matching(pair: &LoxodromicPair, tol: &Tolerances) -> Option<Vec<usize>> {
    let xa = pair.frame_a().x();
    let xb = pair.frame_b().x();
    let k = xa.len();
    let adj: Vec<Vec<usize>> = xa
        .iter()
        .map(|u| (0..k).filter(|&j| pairs_nontrivially(u, &xb[j], tol.pairing)).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; k];
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..k {
        let mut seen = vec![false; k];
        if !augment(i, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut m = vec![0; k];
    for (j, o) in owner.iter().enumerate() {
        m[o.expect("perfect matching")] = j;
    }
    Some(m)
}

/// Frames in the good-pair normalization together with the pinned tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodNormalization {
    frames: PairFrames,
    pub point: ReferenceEigenpoint,
    pub matching: Vec<usize>,
}

impl GoodNormalization {
    /// Lifts of `(a_A, r_A, a_B, r_B, x_{1,A}, …, x_{n−1,A}, x_{1,B}, …)`.
    pub fn frame_vectors(&self) -> Vec<CVector> {
        let f = &self.frames;
        let mut v = vec![f.a_a.clone(), f.r_a.clone(), f.a_b.clone(), f.r_b.clone()];
        v.extend(f.x_a.iter().cloned());
        v.extend(f.x_b.iter().cloned());
        v
    }

    /// The torus action `(λ a_A, λ̄⁻¹ r_A, λ a_B, λ̄⁻¹ r_B, μ_i x_{i,A}, μ_i x_{i,B})`
    /// followed by re-pinning.
    pub fn act_and_repin(&self, lambda: C64, mus: &[C64], tol: &Tolerances) -> Result<GoodNormalization> {
        let mut f = self.frames.clone();
        torus_act(&mut f, lambda, mus);
        Self::finish(f, self.matching.clone(), tol)
    }

    /// The frames after the torus action, without re-pinning.
    pub fn acted_vectors(&self, lambda: C64, mus: &[C64]) -> Vec<CVector> {
        let mut g = self.clone();
        torus_act(&mut g.frames, lambda, mus);
        g.frame_vectors()
    }

    fn finish(mut f: PairFrames, matching: Vec<usize>, tol: &Tolerances) -> Result<GoodNormalization> {
        pin(&mut f)?;
        let (tuple, labels, relabel) = dedupe(f.reference_order(), tol.point)?;
        Ok(GoodNormalization {
            frames: f,
            point: ReferenceEigenpoint {
                tuple,
                ordering: OrderingTag {
                    labels,
                    relabel,
                    rephased: Vec::new(),
                    convention: AnchorConvention::AttractingRepelling,
                },
            },
            matching,
        })
    }
}

fn torus_act(f: &mut PairFrames, lambda: C64, mus: &[C64]) {
    let inv = C64::from(1.0) / lambda.conj();
    f.a_a *= lambda;
    f.a_b *= lambda;
    f.r_a *= inv;
    f.r_b *= inv;
    for (i, &mu) in mus.iter().enumerate() {
        f.x_a[i] *= mu;
        f.x_b[i] *= mu;
    }
}

/// Choose the torus representative: `|⟨a_A,a_B⟩| = 1` fixes `|λ|`; for each
/// `i` the first of `⟨x_{i,A},a_B⟩`, `⟨x_{i,A},r_B⟩`, `⟨x_{i,B},a_A⟩`,
/// `⟨x_{i,B},r_A⟩` that is not negligible is made real positive; finally
/// the first non-negligible coordinate of `a_A` is made real positive.
fn pin(f: &mut PairFrames) -> Result<()> {
    let g = form(&f.a_a, &f.a_b);
    if g.norm() == 0.0 {
        return Err(Error::Conditioning("<a_A, a_B> vanishes".into()));
    }
    let s = C64::from(g.norm().powf(-0.5));
    torus_act(f, s, &[]);
    for i in 0..f.x_a.len() {
        let candidates = [
            (&f.x_a[i], &f.a_b),
            (&f.x_a[i], &f.r_b),
            (&f.x_b[i], &f.a_a),
            (&f.x_b[i], &f.r_a),
        ];
        let h = candidates
            .iter()
            .map(|(u, v)| form(u, v))
            .zip(candidates.iter())
            .find(|(h, (u, v))| h.norm() > PIN_THRESHOLD * vnorm(u) * vnorm(v))
            .map(|(h, _)| h);
        if let Some(h) = h {
            let mu = h.conj() / h.norm();
            f.x_a[i] *= mu;
            f.x_b[i] *= mu;
        }
    }
    let threshold = PIN_THRESHOLD * vnorm(&f.a_a);
    if let Some(z) = f.a_a.iter().find(|z| z.norm() > threshold).copied() {
        f.scale_all(z.conj() / z.norm());
    }
    Ok(())
}

/// Normalize to `⟨a_A,r_A⟩ = ⟨a_B,r_B⟩ = ⟨a_A,r_B⟩ = 1` with `x_{i,B}`
/// matched to `x_{i,A}` and `⟨x_{i,A},x_{i,B}⟩` real positive, then pin the
/// torus orbit. Polar vectors keep unit norm, so the pairings themselves
/// are not 1.
pub fn normalize_good_i(pair: &LoxodromicPair) -> Result<GoodNormalization> {
    let tol = Tolerances::default();
    if !matches!(pair.is_regular(&tol), Ok(true)) {
        return Err(Error::NotGoodPair);
    }
    let matching = good_matching(pair, &tol).ok_or(Error::NotGoodPair)?;
    let mut f = pair.frames();
    let h = form(&f.a_a, &f.r_b);
    f.a_b *= h;
    f.r_b /= h.conj();
    let xb = f.x_b.clone();
    for (i, &j) in matching.iter().enumerate() {
        let p = form(&f.x_a[i], &xb[j]);
        if !pairs_nontrivially(&f.x_a[i], &xb[j], tol.pairing) {
            return Err(Error::MatchingFailure(i + 1));
        }
        f.x_b[i] = &xb[j] * (p / p.norm());
    }
    GoodNormalization::finish(f, matching, &tol)
}
