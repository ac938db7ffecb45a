//! The staged decision procedure for conjugacy of loxodromic pairs.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{is_good_pair_i_with, is_nonsingular_with, normalize_good_i, normalize_nonsingular, LoxodromicPair};
use crate::boundary::{invariant_vector, tuples_congruent, BoundaryTuple};
use crate::error::{Error, Result};
use crate::form::{form_matrix, group_inverse, unit_determinant, Isometry};
use crate::linalg::{frob, smallest_right_singular, CMatrix, CVector, C64};
use crate::loxodromic::{is_regular_with, multiplicity, trace_tuple, Eigenframe};
use crate::random::seeded_rng;
use crate::tol::Tolerances;

/// Relative size below which a matrix entry is left out of the ratio graph.
const EDGE_THRESHOLD: f64 = 1e-8;
/// Singular values below this fraction of the largest span the null space
/// of the intertwining system.
const NULL_THRESHOLD: f64 = 1e-8;
/// Invariant vectors further apart than this separate two pairs.
const SEPARATION: f64 = 1e-4;
const REFINE_CANDIDATES: usize = 4;
const REFINE_SWEEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Outcome {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    #[serde(rename = "verdict")]
    pub outcome: Outcome,
    /// Stage that produced the outcome, 0 to 3.
    pub stage: u8,
    #[serde(serialize_with = "ser_conjugator", skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Isometry>,
    /// Conjugation residual of the returned isometry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub reason: String,
}

fn ser_conjugator<S: Serializer>(c: &Option<Isometry>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match c {
        Some(c) => crate::json::matrix_to_wire(c.matrix()).serialize(s),
        None => s.serialize_none(),
    }
}

impl Verdict {
    fn no(stage: u8, reason: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::No,
            stage,
            conjugator: None,
            residual: None,
            reason: reason.into(),
        }
    }

    fn yes(stage: u8, c: Isometry, residual: f64, reason: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Yes,
            stage,
            conjugator: Some(c),
            residual: Some(residual),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugacyOptions {
    /// Bound on the conjugation residual of any returned isometry.
    pub tol: f64,
    /// Number of centralizer samples in the last stage; defaults to
    /// `64·Σ m_i²` over the sampled blocks.
    pub budget: Option<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for ConjugacyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            budget: None,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

/// `max(‖XAX⁻¹ − A′‖_F, ‖XBX⁻¹ − B′‖_F)`, each divided by
/// `max(1, ‖A′‖_F)` resp. `max(1, ‖B′‖_F)`.
pub fn conjugation_residual(x: &Isometry, p: &LoxodromicPair, q: &LoxodromicPair) -> f64 {
    let xi = x.inverse();
    [(p.a(), q.a()), (p.b(), q.b())]
        .iter()
        .map(|(m, target)| frob(&(x.matrix() * m.matrix() * &xi - target.matrix())) / frob(target.matrix()).max(1.0))
        .fold(0.0, f64::max)
}

/// `Some(C)` with `C p C⁻¹ = q`, `None` if the pairs are not conjugate, and
/// `Error::Undetermined` if the sampled search is exhausted.
pub fn pairs_conjugate(p: &LoxodromicPair, q: &LoxodromicPair, tol: f64) -> Result<Option<Isometry>> {
    let opts = ConjugacyOptions {
        tol,
        ..ConjugacyOptions::default()
    };
    let v = decide_conjugacy(p, q, &opts)?;
    match v.outcome {
        Outcome::Yes => Ok(v.conjugator),
        Outcome::No => Ok(None),
        Outcome::Undetermined => Err(Error::Undetermined {
            samples: sample_budget(p, &opts),
        }),
    }
}

pub fn decide_conjugacy(p: &LoxodromicPair, q: &LoxodromicPair, opts: &ConjugacyOptions) -> Result<Verdict> {
    let tol = &opts.tolerances;
    if p.n() != q.n() {
        return Ok(Verdict::no(0, "dimensions differ"));
    }
    for (name, x, y) in [("A", p.a(), q.a()), ("B", p.b(), q.b())] {
        if !trace_tuple(x).agrees(&trace_tuple(y), tol.eig) {
            return Ok(Verdict::no(0, format!("trace tuples of {name} differ")));
        }
        if multiplicity(x)? != multiplicity(y)? {
            return Ok(Verdict::no(0, format!("multiplicities of {name} differ")));
        }
    }

    let regular = |m: &Isometry| matches!(is_regular_with(m, tol), Ok(r) if r.regular);
    let (reg_a, reg_b) = (regular(p.a()) && regular(q.a()), regular(p.b()) && regular(q.b()));
    let side = if reg_a {
        Some(Side::A)
    } else if reg_b {
        Some(Side::B)
    } else {
        None
    };
    if let Some(side) = side {
        if let Some(v) = stage_one(p, q, side, opts)? {
            return Ok(v);
        }
    }

    if reg_a && reg_b {
        if let Some(v) = stage_two(p, q, opts)? {
            return Ok(v);
        }
    }

    stage_three(p, q, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

/// The matrices of the diagonalized element and the other element, seen
/// from `side`.
fn split(pair: &LoxodromicPair, side: Side) -> (&Eigenframe, &Isometry) {
    match side {
        Side::A => (pair.frame_a(), pair.b()),
        Side::B => (pair.frame_b(), pair.a()),
    }
}

/// Frame columns of `target` reordered so that its diagonal matches that
/// of `source` cluster by cluster.
fn aligned_columns(source: &Eigenframe, target: &Eigenframe) -> Option<CMatrix> {
    let src = &source.structure().clusters;
    let dst = &target.structure().clusters;
    if src.len() != dst.len() {
        return None;
    }
    let mut starts = Vec::with_capacity(dst.len());
    let mut acc = 0;
    for c in dst {
        starts.push(acc);
        acc += c.multiplicity;
    }
    let mut used = vec![false; dst.len()];
    let cols = target.columns();
    let mut out = vec![cols[0].clone()];
    for c in src {
        let (j, _) = dst
            .iter()
            .enumerate()
            .filter(|(j, d)| !used[*j] && d.multiplicity == c.multiplicity)
            .map(|(j, d)| (j, (d.value - c.value).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[j] = true;
        out.extend(cols[1 + starts[j]..1 + starts[j] + c.multiplicity].iter().cloned());
    }
    out.push(cols[cols.len() - 1].clone());
    Some(CMatrix::from_columns(&out))
}

/// Check `X = unit_det(m)` against both conjugation equations.
fn verify(m: CMatrix, p: &LoxodromicPair, q: &LoxodromicPair, opts: &ConjugacyOptions) -> Option<(Isometry, f64)> {
    let x = Isometry::certify(unit_determinant(&m), opts.tol).ok()?;
    let r = conjugation_residual(&x, p, q);
    (r <= opts.tol).then_some((x, r))
}

struct Reduced {
    /// Frame of the diagonalized element of `p` and aligned frame of `q`.
    c: CMatrix,
    c2: CMatrix,
    bt: CMatrix,
    bt2: CMatrix,
}

fn reduce(p: &LoxodromicPair, q: &LoxodromicPair, side: Side) -> Option<Reduced> {
    let (fp, bp) = split(p, side);
    let (fq, bq) = split(q, side);
    let c = fp.matrix();
    let c2 = aligned_columns(fp, fq)?;
    let bt = group_inverse(&c) * bp.matrix() * &c;
    let bt2 = group_inverse(&c2) * bq.matrix() * &c2;
    Some(Reduced { c, c2, bt, bt2 })
}

/// Torus equivalence of the reduced second elements by propagating
/// `d_j = d_i B̃_ij / B̃′_ij` along a maximum spanning tree.
fn stage_one(p: &LoxodromicPair, q: &LoxodromicPair, side: Side, opts: &ConjugacyOptions) -> Result<Option<Verdict>> {
    let Some(red) = reduce(p, q, side) else {
        return Ok(Some(Verdict::no(1, "eigenvalues of the diagonalized elements cannot be aligned")));
    };
    let dim = red.bt.nrows();
    let mut d = spanning_solution(&red.bt, &red.bt2);
    if d.is_none() {
        let (sq, sq2) = (&red.bt * &red.bt, &red.bt2 * &red.bt2);
        d = spanning_solution(&(&red.bt + &sq), &(&red.bt2 + &sq2));
    }
    let Some(d) = d else {
        return Ok(None);
    };
    let m = CMatrix::from_diagonal(&CVector::from_vec(d.clone()));
    let dmax = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let consistency = frob(&(&m * &red.bt - &red.bt2 * &m)) / (frob(&red.bt) * dmax).max(f64::MIN_POSITIVE);
    let ratio = opts.tolerances.ratio;
    if consistency > ratio {
        return Ok(Some(Verdict::no(1, format!("ratio system inconsistent ({consistency:.3e})"))));
    }
    let z = d[0] * d[dim - 1].conj();
    if z.re <= 0.0 || z.im.abs() > ratio * z.norm() {
        return Ok(Some(Verdict::no(1, "solution is not of centralizer shape")));
    }
    let scale = z.re.powf(-0.5);
    for di in &d[1..dim - 1] {
        if (di.norm() * scale - 1.0).abs() > ratio {
            return Ok(Some(Verdict::no(1, "polar entries of the solution are not unimodular")));
        }
    }
    let x = &red.c2 * (m * C64::from(scale)) * group_inverse(&red.c);
    Ok(verify(x, p, q, opts).map(|(x, r)| Verdict::yes(1, x, r, "torus solution of the ratio system")))
}

/// `d` with `d_0 = 1` solving the ratio system on a maximum spanning tree
/// of the entries nonzero in both matrices; `None` if the tree does not
/// reach every index.
fn spanning_solution(bt: &CMatrix, bt2: &CMatrix) -> Option<Vec<C64>> {
    let dim = bt.nrows();
    let scale = frob(bt).max(frob(bt2));
    let weight = |i: usize, j: usize| bt[(i, j)].norm().min(bt2[(i, j)].norm()) / scale;
    let mut d: Vec<Option<C64>> = vec![None; dim];
    d[0] = Some(C64::from(1.0));
    for _ in 1..dim {
        let mut best: Option<(f64, usize, usize, bool)> = None;
        for i in (0..dim).filter(|&i| d[i].is_some()) {
            for j in (0..dim).filter(|&j| d[j].is_none()) {
                for (w, forward) in [(weight(i, j), true), (weight(j, i), false)] {
                    if w > EDGE_THRESHOLD && best.is_none_or(|b| w > b.0) {
                        best = Some((w, i, j, forward));
                    }
                }
            }
        }
        let (_, i, j, forward) = best?;
        let di = d[i].expect("tree node");
        d[j] = Some(if forward {
            di * bt[(i, j)] / bt2[(i, j)]
        } else {
            di * bt2[(j, i)] / bt[(j, i)]
        });
    }
    d.into_iter().collect()
}

/// Congruence of the non-singular or good-pair tuples.
fn stage_two(p: &LoxodromicPair, q: &LoxodromicPair, opts: &ConjugacyOptions) -> Result<Option<Verdict>> {
    let tol = &opts.tolerances;
    let tuples: Option<(BoundaryTuple, BoundaryTuple, &str)> =
        if is_nonsingular_with(p, tol) && is_nonsingular_with(q, tol) {
            Some((normalize_nonsingular(p)?.tuple, normalize_nonsingular(q)?.tuple, "non-singular"))
        } else if is_good_pair_i_with(p, tol) && is_good_pair_i_with(q, tol) {
            Some((normalize_good_i(p)?.point.tuple, normalize_good_i(q)?.point.tuple, "good pair"))
        } else {
            None
        };
    let Some((tp, tq, kind)) = tuples else {
        return Ok(None);
    };
    if tp.len() != tq.len() {
        return Ok(Some(Verdict::no(2, format!("{kind} tuples have different lengths"))));
    }
    let (ip, iq) = (invariant_vector(&tp)?, invariant_vector(&tq)?);
    if ip.max_deviation(&iq).is_none_or(|d| d > SEPARATION) {
        return Ok(Some(Verdict::no(2, format!("{kind} invariants differ"))));
    }
    let candidate = match tuples_congruent(&tp, &tq, opts.tol) {
        Ok(c) => c,
        Err(Error::NotFullRank { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(candidate
        .and_then(|c| verify(c.into_matrix(), p, q, opts))
        .map(|(x, r)| Verdict::yes(2, x, r, format!("congruent {kind} tuples"))))
}

/// Block sizes `(1, m_1, …, m_k, 1)` of the centralizer of a frame.
fn block_sizes(frame: &Eigenframe) -> Vec<usize> {
    let mut b = vec![1];
    b.extend(frame.structure().clusters.iter().map(|c| c.multiplicity));
    b.push(1);
    b
}

fn sample_budget(p: &LoxodromicPair, opts: &ConjugacyOptions) -> usize {
    opts.budget.unwrap_or_else(|| {
        let sizes = block_sizes(p.frame_a());
        64 * sizes[1..sizes.len() - 1].iter().map(|m| m * m).sum::<usize>().max(1)
    })
}

/// Positions `(row, col)` of the block-diagonal unknowns.
fn block_unknowns(sizes: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for &m in sizes {
        for i in 0..m {
            for j in 0..m {
                out.push((start + i, start + j));
            }
        }
        start += m;
    }
    out
}

/// Block-diagonal solutions `M` of `M B̃ = B̃′ M`, then the centralizer
/// shape. A one-dimensional solution space is decided exactly; larger ones
/// are sampled.
fn stage_three(p: &LoxodromicPair, q: &LoxodromicPair, opts: &ConjugacyOptions) -> Result<Verdict> {
    let cost = |f: &Eigenframe| block_sizes(f).iter().map(|m| m * m).sum::<usize>();
    let side = if cost(p.frame_b()) < cost(p.frame_a()) { Side::B } else { Side::A };
    let Some(red) = reduce(p, q, side) else {
        return Ok(Verdict::no(3, "eigenvalue clusters cannot be aligned"));
    };
    let sizes = block_sizes(split(p, side).0);
    let unknowns = block_unknowns(&sizes);
    let dim = red.bt.nrows();
    let norm = frob(&red.bt).max(1.0);
    let mut l = CMatrix::zeros(dim * dim, unknowns.len());
    for i in 0..dim {
        for j in 0..dim {
            let row = i * dim + j;
            for (k, &(r, c)) in unknowns.iter().enumerate() {
                let mut v = C64::from(0.0);
                if i == r {
                    v += red.bt[(c, j)];
                }
                if j == c {
                    v -= red.bt2[(i, r)];
                }
                l[(row, k)] = v / norm;
            }
        }
    }
    let (basis, sv) = smallest_right_singular(&l, unknowns.len());
    let top = sv.last().copied().unwrap_or(0.0);
    let null: Vec<CVector> = basis
        .into_iter()
        .zip(sv.iter())
        .filter(|(_, &s)| s <= NULL_THRESHOLD * top.max(1.0))
        .map(|(b, _)| b)
        .collect();
    let assemble = |coeffs: &[C64]| {
        let mut m = CMatrix::zeros(dim, dim);
        for (v, &c) in null.iter().zip(coeffs) {
            for (k, &(r, col)) in unknowns.iter().enumerate() {
                m[(r, col)] += v[k] * c;
            }
        }
        m
    };
    let to_x = |m: &CMatrix| &red.c2 * m * group_inverse(&red.c);
    match null.len() {
        0 => Ok(Verdict::no(3, "no block-diagonal intertwiner")),
        1 => {
            let m0 = assemble(&[C64::from(1.0)]);
            let h = form_matrix(dim);
            let g = (m0.adjoint() * &h * &m0 * &h).trace().re / dim as f64;
            if g <= 0.0 {
                return Ok(Verdict::no(3, "intertwiner does not preserve the form"));
            }
            let m = m0 / C64::from(g.sqrt());
            Ok(match verify(to_x(&m), p, q, opts) {
                Some((x, r)) => Verdict::yes(3, x, r, "unique intertwiner up to scale"),
                None => Verdict::no(3, "the unique intertwiner is not an isometry"),
            })
        }
        k => {
            let budget = sample_budget(p, opts);
            let residual_of = |coeffs: &[C64]| -> f64 {
                let m = project_to_centralizer(&assemble(coeffs), &sizes);
                let x = Isometry::uncertified(unit_determinant(&to_x(&m)));
                conjugation_residual(&x, p, q)
            };
            let mut samples: Vec<(f64, Vec<C64>)> = (0..budget)
                .into_par_iter()
                .map(|s| {
                    let mut rng = seeded_rng(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(s as u64));
                    let coeffs: Vec<C64> = (0..k)
                        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                        .collect();
                    (residual_of(&coeffs), coeffs)
                })
                .collect();
            samples.sort_by(|x, y| x.0.total_cmp(&y.0));
            for (_, start) in samples.into_iter().take(REFINE_CANDIDATES) {
                let coeffs = refine(start, &residual_of);
                let m = project_to_centralizer(&assemble(&coeffs), &sizes);
                if let Some((x, r)) = verify(to_x(&m), p, q, opts) {
                    return Ok(Verdict::yes(3, x, r, format!("sampled centralizer ({k}-dimensional intertwiners)")));
                }
            }
            Ok(Verdict {
                outcome: Outcome::Undetermined,
                stage: 3,
                conjugator: None,
                residual: None,
                reason: format!("{budget} centralizer samples did not verify"),
            })
        }
    }
}

/// Coordinate descent on the real and imaginary parts of the coefficients.
fn refine(mut coeffs: Vec<C64>, residual_of: &dyn Fn(&[C64]) -> f64) -> Vec<C64> {
    let mut best = residual_of(&coeffs);
    let mut step = 0.1 * coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-3);
    for _ in 0..REFINE_SWEEPS {
        let mut improved = false;
        for i in 0..coeffs.len() {
            for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let old = coeffs[i];
                coeffs[i] = old + dir * step;
                let r = residual_of(&coeffs);
                if r < best {
                    best = r;
                    improved = true;
                } else {
                    coeffs[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
    }
    coeffs
}

/// Nearest element of `diag(λ, U_1, …, U_k, λ̄⁻¹)`: polar factors of the
/// unitary blocks and the geometric mean of the two scalar entries.
fn project_to_centralizer(m: &CMatrix, sizes: &[usize]) -> CMatrix {
    let dim = m.nrows();
    let mut out = CMatrix::zeros(dim, dim);
    let (m0, mn) = (m[(0, 0)], m[(dim - 1, dim - 1)]);
    let lambda = if m0.norm() > 0.0 && mn.norm() > 0.0 {
        C64::from_polar((m0.norm() / mn.norm()).sqrt(), 0.5 * (m0.arg() + mn.arg()))
    } else {
        C64::from(1.0)
    };
    out[(0, 0)] = lambda;
    out[(dim - 1, dim - 1)] = C64::from(1.0) / lambda.conj();
    let mut start = 1;
    for &s in &sizes[1..sizes.len() - 1] {
        let block = m.view((start, start), (s, s)).into_owned();
        let svd = block.svd(true, true);
        let u = svd.u.expect("requested U") * svd.v_t.expect("requested V^T");
        out.view_mut((start, start), (s, s)).copy_from(&u);
        start += s;
    }
    out
}
