//! Invariants of ordered tuples of boundary points: Cartan's angular
//! invariant, the Korányi–Reimann cross ratio, the invariant vector of an
//! m-tuple and a constructive congruence test.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::form::{form, form_matrix, form_norm, Isometry};
use crate::linalg::{
    determinant, inverse, inverse_root, projective_distance, smallest_right_singular, vnorm, CMatrix, CVector, C64,
};
use crate::tol::Tolerances;

/// A point of `∂H^n_C`, stored as one of its null lifts.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    lift: CVector,
}

impl BoundaryPoint {
    /// Accepts `lift` if `|⟨z,z⟩| ≤ tol·‖z‖²`.
    pub fn new(lift: CVector, tol: f64) -> Result<Self> {
        let scale = vnorm(&lift).powi(2);
        if scale == 0.0 {
            return Err(Error::ZeroVector);
        }
        if lift.len() < 2 {
            return Err(Error::InvalidDimension);
        }
        let q = form_norm(&lift);
        if q.abs() > tol * scale {
            return Err(Error::NotNull { self_product: q });
        }
        Ok(Self { lift })
    }

    pub fn from_lift(lift: CVector) -> Result<Self> {
        Self::new(lift, Tolerances::default().null)
    }

    /// Standard lift of a point `(z₁, …, zₙ)` of the Siegel boundary.
    pub fn from_siegel(point: &[C64]) -> Result<Self> {
        let lift = crate::form::standard_lift(point, 1e-12)?;
        Self::from_lift(lift.into_coords())
    }

    pub(crate) fn trusted(lift: CVector) -> Self {
        Self { lift }
    }

    pub fn lift(&self) -> &CVector {
        &self.lift
    }

    pub fn dim(&self) -> usize {
        self.lift.len()
    }

    pub fn distance(&self, other: &BoundaryPoint) -> f64 {
        projective_distance(&self.lift, &other.lift)
    }

    pub fn same_point(&self, other: &BoundaryPoint, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn rescaled(&self, s: C64) -> Self {
        Self {
            lift: &self.lift * s,
        }
    }

    pub fn mapped_by(&self, c: &Isometry) -> Self {
        Self {
            lift: c.apply(&self.lift),
        }
    }
}

/// An ordered tuple of at least three pairwise distinct boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTuple {
    points: Vec<BoundaryPoint>,
}

impl BoundaryTuple {
    pub fn new(points: Vec<BoundaryPoint>) -> Result<Self> {
        Self::with_tolerance(points, Tolerances::default().point)
    }

    pub fn with_tolerance(points: Vec<BoundaryPoint>, tol: f64) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::TupleTooShort {
                min: 3,
                found: points.len(),
            });
        }
        let dim = points[0].dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].same_point(&points[j], tol) {
                    return Err(Error::CoincidentPoints(i + 1, j + 1));
                }
            }
        }
        Ok(Self { points })
    }

    pub fn from_lifts(lifts: Vec<CVector>) -> Result<Self> {
        let points = lifts.into_iter().map(BoundaryPoint::from_lift).collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points[0].dim() - 1
    }

    pub fn mapped_by(&self, c: &Isometry) -> Self {
        Self {
            points: self.points.iter().map(|p| p.mapped_by(c)).collect(),
        }
    }

    pub fn rescaled(&self, scalars: &[C64]) -> Self {
        Self {
            points: self.points.iter().zip(scalars).map(|(p, &s)| p.rescaled(s)).collect(),
        }
    }

    /// Largest projective distance between corresponding points.
    pub fn max_displacement(&self, other: &BoundaryTuple) -> f64 {
        self.points
            .iter()
            .zip(other.points.iter())
            .map(|(p, q)| p.distance(q))
            .fold(0.0, f64::max)
    }

    pub fn gram(&self) -> CMatrix {
        gram_of(self.points.iter().map(|p| p.lift()))
    }

    /// Number of projectively independent lifts.
    pub fn rank(&self) -> usize {
        independent_subset(&self.points.iter().map(|p| unit(p.lift())).collect::<Vec<_>>()).len()
    }
}

fn unit(v: &CVector) -> CVector {
    v / C64::from(vnorm(v))
}

pub(crate) fn gram_of<'a>(lifts: impl Iterator<Item = &'a CVector>) -> CMatrix {
    let lifts: Vec<&CVector> = lifts.collect();
    CMatrix::from_fn(lifts.len(), lifts.len(), |i, j| form(lifts[i], lifts[j]))
}

fn check_distinct(points: &[&BoundaryPoint], tol: f64) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].same_point(points[j], tol) {
                return Err(Error::CoincidentPoints(i + 1, j + 1));
            }
        }
    }
    Ok(())
}

fn pairing(z: &BoundaryPoint, w: &BoundaryPoint, name: &'static str, tol: f64) -> Result<C64> {
    let g = form(z.lift(), w.lift());
    if g.norm() <= tol * vnorm(z.lift()) * vnorm(w.lift()) {
        return Err(Error::DegenerateConfiguration {
            product: name,
            label: None,
        });
    }
    Ok(g)
}

/// `arg(−⟨z₁,z₂⟩⟨z₂,z₃⟩⟨z₃,z₁⟩) ∈ [−π/2, π/2]`.
pub fn cartan_invariant(z1: &BoundaryPoint, z2: &BoundaryPoint, z3: &BoundaryPoint) -> Result<f64> {
    let tol = Tolerances::default();
    check_distinct(&[z1, z2, z3], tol.point)?;
    let p = pairing(z1, z2, "<z1,z2>", tol.null)? * pairing(z2, z3, "<z2,z3>", tol.null)? * pairing(z3, z1, "<z3,z1>", tol.null)?;
    let angle = (-p).arg();
    // rounding can push a same-chain triple just past ±π/2
    const SLACK: f64 = 1e-9;
    if angle.abs() > FRAC_PI_2 + SLACK {
        return Err(Error::Conditioning(format!(
            "angular invariant {angle} outside [-π/2, π/2]"
        )));
    }
    Ok(angle.clamp(-FRAC_PI_2, FRAC_PI_2))
}

/// `⟨z₃,z₁⟩⟨z₄,z₂⟩ / (⟨z₄,z₁⟩⟨z₃,z₂⟩)`.
pub fn cross_ratio(z1: &BoundaryPoint, z2: &BoundaryPoint, z3: &BoundaryPoint, z4: &BoundaryPoint) -> Result<C64> {
    let tol = Tolerances::default();
    check_distinct(&[z1, z2, z3, z4], tol.point)?;
    let d1 = pairing(z4, z1, "<z4,z1>", tol.null)?;
    let d2 = pairing(z3, z2, "<z3,z2>", tol.null)?;
    Ok(form(z3.lift(), z1.lift()) * form(z4.lift(), z2.lift()) / (d1 * d2))
}

/// One labelled cross ratio `X_{k j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabeledCross {
    pub k: usize,
    pub j: usize,
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub value: C64,
}

/// The angular invariant of the first three points and the cross ratios
/// `X_{2j}`, `X_{3j}`, `X_{kj}` in the order `(2,4)…(2,m), (3,4)…(3,m),
/// (4,5), (4,6), …, (m−1,m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantVector {
    pub angular: f64,
    pub cross: Vec<LabeledCross>,
}

impl InvariantVector {
    pub fn len(&self) -> usize {
        self.cross.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cross.is_empty()
    }

    /// Real dimension `2·len + 1`.
    pub fn real_dimension(&self) -> usize {
        2 * self.cross.len() + 1
    }

    /// Componentwise deviation: absolute on the angle, `|Δ|/max(1,|X|)` on
    /// cross ratios. `None` when label lists differ.
    pub fn max_deviation(&self, other: &InvariantVector) -> Option<f64> {
        if self.cross.len() != other.cross.len() {
            return None;
        }
        let mut dev = (self.angular - other.angular).abs();
        for (a, b) in self.cross.iter().zip(other.cross.iter()) {
            if (a.k, a.j) != (b.k, b.j) {
                return None;
            }
            dev = dev.max((a.value - b.value).norm() / a.value.norm().max(1.0));
        }
        Some(dev)
    }
}

/// Labels `(k, j)` of the cross ratios of an m-tuple, in serialization order.
pub fn cross_ratio_labels(m: usize) -> Vec<(usize, usize)> {
    let mut labels = Vec::new();
    if m < 4 {
        return labels;
    }
    for row in [2, 3] {
        for j in 4..=m {
            labels.push((row, j));
        }
    }
    for k in 4..m {
        for j in k + 1..=m {
            labels.push((k, j));
        }
    }
    labels
}

/// Number of cross ratios of an m-tuple: `2(m−3) + (m−3)(m−4)/2`.
pub fn cross_ratio_count(m: usize) -> usize {
    if m < 4 {
        0
    } else {
        2 * (m - 3) + (m - 3) * (m - 4) / 2
    }
}

pub fn invariant_vector(p: &BoundaryTuple) -> Result<InvariantVector> {
    let z = p.points();
    let angular = cartan_invariant(&z[0], &z[1], &z[2])?;
    let mut cross = Vec::with_capacity(cross_ratio_count(z.len()));
    for (k, j) in cross_ratio_labels(z.len()) {
        let (a, b, c, d) = match k {
            2 => (&z[0], &z[1], &z[2], &z[j - 1]),
            3 => (&z[0], &z[2], &z[1], &z[j - 1]),
            _ => (&z[0], &z[k - 1], &z[1], &z[j - 1]),
        };
        let value = cross_ratio(a, b, c, d).map_err(|e| match e {
            Error::DegenerateConfiguration { product, .. } => Error::DegenerateConfiguration {
                product,
                label: Some((k, j)),
            },
            other => other,
        })?;
        cross.push(LabeledCross { k, j, value });
    }
    Ok(InvariantVector { angular, cross })
}

/// Greedy pivoted selection of a maximal independent subset of unit vectors.
pub(crate) fn independent_subset(vectors: &[CVector]) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut residuals: Vec<CVector> = vectors.to_vec();
    loop {
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, r)| (i, vnorm(r)))
            .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || norm <= 1e-8 {
            return chosen;
        }
        chosen.push(best);
        let q = &residuals[best] / C64::from(norm);
        for r in residuals.iter_mut() {
            let c = crate::linalg::edot(r, &q);
            *r -= &q * c;
        }
    }
}

/// Rescale lifts so that `⟨z₁, z_j⟩ = 1` for `j ≥ 2` and `|⟨z₂, z₃⟩| = 1`.
/// Two tuples with equal invariants have equal Gram matrices after this.
fn normalized_lifts(p: &BoundaryTuple) -> Vec<CVector> {
    let z = p.points();
    let mut lifts: Vec<CVector> = z.iter().map(|q| q.lift().clone()).collect();
    for j in 1..lifts.len() {
        let g = form(&lifts[0], &lifts[j]);
        lifts[j] /= g.conj();
    }
    let s = form(&lifts[1], &lifts[2]).norm().sqrt();
    lifts[0] *= C64::from(s);
    for l in lifts.iter_mut().skip(1) {
        *l /= C64::from(s);
    }
    lifts
}

/// H-orthonormal basis of the orthogonal complement of a nondegenerate span.
fn orthonormal_complement(basis: &[CVector]) -> Result<Vec<CVector>> {
    let dim = basis[0].len();
    let k = basis.len();
    if k == dim {
        return Ok(Vec::new());
    }
    let h = form_matrix(dim);
    let mut rows = CMatrix::zeros(k, dim);
    for (i, b) in basis.iter().enumerate() {
        rows.row_mut(i).copy_from(&(b.adjoint() * &h));
    }
    let (raw, _) = smallest_right_singular(&rows, dim - k);
    let mut out: Vec<CVector> = Vec::new();
    for mut v in raw {
        for x in &out {
            let c = form(&v, x);
            v -= x * c;
        }
        let q = form_norm(&v);
        if q <= 1e-10 * vnorm(&v).powi(2) {
            return Err(Error::Conditioning("span of the tuple is degenerate".into()));
        }
        out.push(v / C64::from(q.sqrt()));
    }
    Ok(out)
}

/// Decide whether `p′ = C p` for some `C ∈ SU(n,1)` and construct `C`.
///
/// Returns `Ok(None)` when the invariant vectors differ by more than `tol`
/// or when the constructed candidate fails verification. Tuples must span
/// `C^{n+1}` except for triples, which are completed by the orthogonal
/// complement of their span.
pub fn tuples_congruent(p: &BoundaryTuple, q: &BoundaryTuple, tol: f64) -> Result<Option<Isometry>> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n() + 1,
            found: q.n() + 1,
        });
    }
    let dim = p.n() + 1;
    let (ip, iq) = (invariant_vector(p)?, invariant_vector(q)?);
    match ip.max_deviation(&iq) {
        Some(d) if d <= tol => {}
        _ => return Ok(None),
    }
    let lp = normalized_lifts(p);
    let lq = normalized_lifts(q);
    let units: Vec<CVector> = lp.iter().map(unit).collect();
    let chosen = independent_subset(&units);
    let rank = chosen.len();
    if rank < dim && p.len() > 3 {
        return Err(Error::NotFullRank { rank, required: dim });
    }
    let mut src: Vec<CVector> = chosen.iter().map(|&i| lp[i].clone()).collect();
    let mut dst: Vec<CVector> = chosen.iter().map(|&i| lq[i].clone()).collect();
    if rank < dim {
        let src_ext = orthonormal_complement(&src)?;
        let dst_ext = orthonormal_complement(&dst)?;
        src.extend(src_ext);
        dst.extend(dst_ext);
    }
    let sp = CMatrix::from_columns(&src);
    let sq = CMatrix::from_columns(&dst);
    let Some(sp_inv) = inverse(&sp) else {
        return Ok(None);
    };
    let mut c = sq * sp_inv;
    let d = determinant(&c);
    if d.norm() == 0.0 {
        return Ok(None);
    }
    c *= inverse_root(d, dim);
    let tols = Tolerances::default();
    let Ok(candidate) = Isometry::certify(c, tols.group.max(tol)) else {
        return Ok(None);
    };
    if p.mapped_by(&candidate).max_displacement(q) > tols.verify.max(tol) {
        return Ok(None);
    }
    Ok(Some(candidate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::random::{random_complex, random_null_vector, random_su, seeded_rng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pt(v: &[C64]) -> BoundaryPoint {
        BoundaryPoint::from_lift(CVector::from_column_slice(v)).unwrap()
    }

    fn standard_quadruple() -> [BoundaryPoint; 4] {
        [
            pt(&[ZERO, ZERO, ONE]),
            pt(&[ONE, ZERO, ZERO]),
            pt(&[c(0.0, 1.0), ZERO, ONE]),
            pt(&[c(0.0, -1.0), ZERO, ONE]),
        ]
    }

    fn random_tuple(n: usize, m: usize, seed: u64) -> BoundaryTuple {
        let mut rng = seeded_rng(seed);
        BoundaryTuple::from_lifts((0..m).map(|_| random_null_vector(n, &mut rng)).collect()).unwrap()
    }

    #[test]
    fn same_chain_triple_has_angle_minus_half_pi() {
        let [o, inf, z, _] = standard_quadruple();
        let a = cartan_invariant(&o, &inf, &z).unwrap();
        assert!((a + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn totally_real_triple_has_zero_angle() {
        let [o, inf, _, _] = standard_quadruple();
        let z = pt(&[c(-0.5, 0.0), ONE, ONE]);
        assert!(cartan_invariant(&o, &inf, &z).unwrap().abs() < 1e-15);
    }

    #[test]
    fn coincident_points_are_rejected() {
        let [o, inf, _, _] = standard_quadruple();
        let o2 = o.rescaled(c(0.0, 3.0));
        assert_eq!(cartan_invariant(&o, &inf, &o2), Err(Error::CoincidentPoints(1, 3)));
    }

    #[test]
    fn standard_cross_ratio_is_minus_one() {
        let [o, inf, z3, z4] = standard_quadruple();
        let x = cross_ratio(&o, &inf, &z3, &z4).unwrap();
        assert!((x + ONE).norm() < 1e-15);
    }

    #[test]
    fn four_point_invariant_vector() {
        let t = BoundaryTuple::new(standard_quadruple().to_vec()).unwrap();
        let iv = invariant_vector(&t).unwrap();
        assert!((iv.angular + PI / 2.0).abs() < 1e-15);
        assert_eq!(iv.cross.iter().map(|x| (x.k, x.j)).collect::<Vec<_>>(), vec![(2, 4), (3, 4)]);
        assert!((iv.cross[0].value + ONE).norm() < 1e-15);
        // X(o, z3, ∞, z4) = ⟨∞,o⟩⟨z4,z3⟩ / (⟨z4,o⟩⟨∞,z3⟩) = (−2i)/(−i)
        assert!((iv.cross[1].value - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn triple_has_empty_cross_list() {
        let t = BoundaryTuple::new(standard_quadruple()[..3].to_vec()).unwrap();
        let iv = invariant_vector(&t).unwrap();
        assert!(iv.cross.is_empty());
        assert_eq!(iv.real_dimension(), 1);
    }

    #[test]
    fn label_counts_match_dimension_identity() {
        for m in 3..=12 {
            let labels = cross_ratio_labels(m);
            assert_eq!(labels.len(), cross_ratio_count(m));
            assert_eq!(2 * labels.len() + 1, m * (m - 3) + 1);
        }
        assert_eq!(cross_ratio_count(10), 35);
    }

    #[test]
    fn invariants_survive_isometries_and_rescaling() {
        for seed in 0..100 {
            let n = 2 + (seed as usize % 3);
            let p = random_tuple(n, 2 * n + 2, seed);
            let cmat = random_su(n, 1000 + seed).unwrap();
            let iv = invariant_vector(&p).unwrap();
            let moved = invariant_vector(&p.mapped_by(&cmat)).unwrap();
            assert!(iv.max_deviation(&moved).unwrap() < 1e-8, "seed {seed}");
            let mut rng = seeded_rng(seed);
            let scalars: Vec<C64> = (0..p.len()).map(|_| random_complex(&mut rng) + c(0.1, 0.0)).collect();
            let scaled = invariant_vector(&p.rescaled(&scalars)).unwrap();
            assert!(iv.max_deviation(&scaled).unwrap() < 1e-12);
        }
    }

    #[test]
    fn congruent_tuples_are_matched() {
        for seed in 0..30 {
            let n = 2 + (seed as usize % 2);
            let p = random_tuple(n, 2 * n + 2, seed);
            let cmat = random_su(n, 77 + seed).unwrap();
            let q = p.mapped_by(&cmat);
            let found = tuples_congruent(&p, &q, 1e-10).unwrap().expect("congruent");
            assert!(p.mapped_by(&found).max_displacement(&q) < 1e-7);
        }
    }

    #[test]
    fn perturbed_tuple_is_not_congruent() {
        let p = random_tuple(2, 6, 4);
        let mut pts = p.points().to_vec();
        let mut rng = seeded_rng(99);
        pts[4] = BoundaryPoint::from_lift(random_null_vector(2, &mut rng)).unwrap();
        let q = BoundaryTuple::new(pts).unwrap();
        assert!(tuples_congruent(&p, &q, 1e-8).unwrap().is_none());
    }

    #[test]
    fn tuple_is_congruent_to_itself() {
        let p = random_tuple(3, 8, 1);
        let c = tuples_congruent(&p, &p, 1e-10).unwrap().unwrap();
        assert!(p.mapped_by(&c).max_displacement(&p) < 1e-9);
    }

    #[test]
    fn rank_deficient_tuple_is_rejected() {
        // four points on one chain in C^{3,1}
        let inf = pt(&[ONE, ZERO, ZERO, ZERO]);
        let o = pt(&[ZERO, ZERO, ZERO, ONE]);
        let z = pt(&[c(0.0, 1.0), ZERO, ZERO, ONE]);
        let w = pt(&[c(0.0, -2.0), ZERO, ZERO, ONE]);
        let p = BoundaryTuple::new(vec![o, inf, z, w]).unwrap();
        assert_eq!(p.rank(), 2);
        assert!(matches!(tuples_congruent(&p, &p, 1e-10), Err(Error::NotFullRank { rank: 2, required: 4 })));
    }

    #[test]
    fn triples_are_congruent_by_angle_alone() {
        let mut rng = seeded_rng(3);
        let n = 4;
        let p = BoundaryTuple::from_lifts((0..3).map(|_| random_null_vector(n, &mut rng)).collect()).unwrap();
        let cmat = random_su(n, 5).unwrap();
        let q = p.mapped_by(&cmat);
        let found = tuples_congruent(&p, &q, 1e-10).unwrap().unwrap();
        assert!(p.mapped_by(&found).max_displacement(&q) < 1e-8);
    }
}
