//! Single-element analysis: isometry type, characteristic polynomial,
//! traces, regularity, eigenframes, multiplicity and eigenpoints.

use serde::{Serialize, Serializer};
use std::f64::consts::SQRT_2;

use crate::boundary::BoundaryPoint;
use crate::error::{Error, Result};
use crate::form::{complete_frame, form, form_norm, group_inverse, HVector, Isometry};
use crate::linalg::{
    determinant, fix_phase, frob, inverse_root, projective_distance, smallest_right_singular, vnorm, wrap_angle,
    CMatrix, CVector, C64,
};
use crate::poly::{char_coefficients, discriminant_resultant, resultant_sensitivity};
use crate::tol::Tolerances;

/// Eigendirections of the top and bottom eigenvalues closer than this are
/// read as a perturbed Jordan block rather than a loxodromic pair.
const JORDAN_SEPARATION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum IsometryType {
    Loxodromic,
    NonLoxodromic,
}

/// `s₀ … s_{n+1}` with `χ(x) = Σ (−1)^i s_i x^{n+1−i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coefficients: Vec<C64>,
}

impl CharPoly {
    /// `max_i |s_i − conj(s_{n+1−i})|`, zero for exact group elements.
    pub fn self_inversive_defect(&self) -> f64 {
        let s = &self.coefficients;
        let d = s.len() - 1;
        (0..=d).map(|i| (s[i] - s[d - i].conj()).norm()).fold(0.0, f64::max)
    }
}

impl Serialize for CharPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::ser_complex_vec(&self.coefficients, s)
    }
}

pub fn char_poly(a: &Isometry) -> CharPoly {
    CharPoly {
        coefficients: char_coefficients(a.matrix()),
    }
}

/// `(tr A, tr A², …, tr A^⌊(n+1)/2⌋)`, with the Frobenius norms of the
/// factors used to judge agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTuple {
    pub values: Vec<C64>,
    scale: f64,
}

impl TraceTuple {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values, scale: 1.0 }
    }

    /// Componentwise agreement: `|t_k − t′_k| ≤ tol·max(1, ‖A‖_F, ‖A′‖_F)^k`.
    pub fn agrees(&self, other: &TraceTuple, tol: f64) -> bool {
        if self.values.len() != other.values.len() {
            return false;
        }
        let base = self.scale.max(other.scale).max(1.0);
        self.values
            .iter()
            .zip(other.values.iter())
            .enumerate()
            .all(|(k, (x, y))| (x - y).norm() <= tol * base.powi(k as i32 + 1))
    }
}

impl Serialize for TraceTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::ser_complex_vec(&self.values, s)
    }
}

pub fn trace_tuple(a: &Isometry) -> TraceTuple {
    let count = a.n().div_ceil(2);
    let m = a.matrix();
    let mut power = m.clone();
    let mut values = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            power = &power * m;
        }
        values.push(power.trace());
    }
    TraceTuple {
        values,
        scale: frob(m),
    }
}

/// All eigenvalues from the complex Schur form.
pub fn eigenvalues(a: &Isometry) -> Vec<C64> {
    let schur = a.matrix().clone().schur();
    let t = schur.unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Eigenvalues sorted by modulus (descending), ties by argument.
fn sorted_by_modulus(a: &Isometry) -> Vec<C64> {
    let mut ev = eigenvalues(a);
    ev.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.arg().total_cmp(&y.arg())));
    ev
}

fn eigen_direction(a: &Isometry, lambda: C64) -> CVector {
    let shifted = a.matrix() - CMatrix::identity(a.dim(), a.dim()) * lambda;
    let (basis, _) = smallest_right_singular(&shifted, 1);
    basis.into_iter().next().expect("one vector")
}

pub fn classify_isometry(a: &Isometry) -> Result<IsometryType> {
    classify_with(a, &Tolerances::default())
}

/// Loxodromic iff the top eigenvalue has modulus above `1 + marginal` and its
/// eigendirection is separated from the bottom one. Moduli in
/// `(1 + eig, 1 + marginal]` are reported as marginal.
pub fn classify_with(a: &Isometry, tol: &Tolerances) -> Result<IsometryType> {
    let ev = sorted_by_modulus(a);
    let (top, bottom) = (ev[0], ev[ev.len() - 1]);
    let modulus = top.norm();
    if modulus <= 1.0 + tol.eig {
        return Ok(IsometryType::NonLoxodromic);
    }
    if modulus <= 1.0 + tol.marginal {
        return Err(Error::Marginal { modulus });
    }
    let (u, v) = (eigen_direction(a, top), eigen_direction(a, bottom));
    if projective_distance(&u, &v) < JORDAN_SEPARATION {
        return Ok(IsometryType::NonLoxodromic);
    }
    Ok(IsometryType::Loxodromic)
}

/// A cluster of unit-circle eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub phi: f64,
    #[serde(skip)]
    pub value: C64,
    pub multiplicity: usize,
}

/// `r e^{iθ}`, `e^{iφ_1} … e^{iφ_{n−1}}`, `r^{-1} e^{iθ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenStructure {
    pub r: f64,
    pub theta: f64,
    /// Sorted ascending; members of a cluster share its representative angle.
    pub phis: Vec<f64>,
    #[serde(skip)]
    pub clusters: Vec<Cluster>,
}

impl EigenStructure {
    pub fn n(&self) -> usize {
        self.phis.len() + 1
    }

    pub fn attracting_value(&self) -> C64 {
        C64::from_polar(self.r, self.theta)
    }

    pub fn repelling_value(&self) -> C64 {
        C64::from_polar(1.0 / self.r, self.theta)
    }

    /// `2θ + Σφ_i` reduced to `(−π, π]`.
    pub fn constraint_residual(&self) -> f64 {
        let total = 2.0 * self.theta + self.phis.iter().sum::<f64>();
        let w = wrap_angle(total);
        w.abs().min((w - 2.0 * std::f64::consts::PI).abs())
    }

    /// The diagonal form `E_A` ordered as `(a, x_1, …, x_{n−1}, r)`.
    pub fn diagonal_values(&self) -> Vec<C64> {
        let mut d = vec![self.attracting_value()];
        d.extend(self.phis.iter().map(|&p| C64::from_polar(1.0, p)));
        d.push(self.repelling_value());
        d
    }

    pub fn multiplicity(&self) -> Multiplicity {
        Multiplicity {
            parts: self.clusters.iter().map(|c| c.multiplicity).collect(),
        }
    }

    pub fn is_regular_shape(&self) -> bool {
        self.clusters.iter().all(|c| c.multiplicity == 1)
    }
}

/// Dimensions of the unit-circle eigenspaces in sorted-angle order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Multiplicity {
    pub parts: Vec<usize>,
}

fn cluster_unit_values(values: &[C64], tol: &Tolerances) -> Result<Vec<Cluster>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let mut sorted: Vec<(f64, C64)> = values.iter().map(|&v| (wrap_angle(v.arg()), v)).collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let k = sorted.len();
    let mut link = vec![false; k];
    let check = |gap: f64| -> Result<bool> {
        if gap < tol.cluster {
            Ok(true)
        } else if gap < 100.0 * tol.cluster {
            Err(Error::ClusteringAmbiguity { gap })
        } else {
            Ok(false)
        }
    };
    // link[i] joins sorted[i] to sorted[(i + 1) % k]
    for i in 0..k - 1 {
        link[i] = check((sorted[i + 1].1 - sorted[i].1).norm())?;
    }
    if k > 1 {
        link[k - 1] = check((sorted[0].1 - sorted[k - 1].1).norm())?;
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    if link.iter().all(|&l| l) {
        groups.push((0..k).collect());
    } else {
        // start right after a break so wrap-around groups stay whole
        let start = (0..k).find(|&i| !link[i]).expect("some break") + 1;
        let mut current = Vec::new();
        for step in 0..k {
            let i = (start + step) % k;
            current.push(i);
            if !link[i] {
                groups.push(std::mem::take(&mut current));
            }
        }
    }
    let mut clusters: Vec<(usize, Cluster)> = groups
        .into_iter()
        .map(|g| {
            let mean: C64 = g.iter().map(|&i| sorted[i].1).sum::<C64>() / g.len() as f64;
            let value = mean / mean.norm();
            let first = *g.iter().min().expect("nonempty");
            (
                first,
                Cluster {
                    phi: wrap_angle(value.arg()),
                    value,
                    multiplicity: g.len(),
                },
            )
        })
        .collect();
    clusters.sort_by(|x, y| x.1.phi.total_cmp(&y.1.phi).then(x.0.cmp(&y.0)));
    Ok(clusters.into_iter().map(|(_, c)| c).collect())
}

pub fn eigen_structure(a: &Isometry) -> Result<EigenStructure> {
    eigen_structure_with(a, &Tolerances::default())
}

pub fn eigen_structure_with(a: &Isometry, tol: &Tolerances) -> Result<EigenStructure> {
    if classify_with(a, tol)? != IsometryType::Loxodromic {
        return Err(Error::NotLoxodromic);
    }
    let ev = sorted_by_modulus(a);
    let (top, bottom) = (ev[0], ev[ev.len() - 1]);
    let unit = &ev[1..ev.len() - 1];
    for u in unit {
        if (u.norm() - 1.0).abs() > tol.eig.max(1e-12) * 10.0 {
            return Err(Error::Conditioning(format!(
                "middle eigenvalue modulus {} is off the unit circle",
                u.norm()
            )));
        }
    }
    let r = (top.norm() / bottom.norm()).sqrt();
    let theta = wrap_angle((top / top.norm() + bottom / bottom.norm()).arg());
    let clusters = cluster_unit_values(unit, tol)?;
    let phis: Vec<f64> = clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.phi, c.multiplicity))
        .collect();
    let s = EigenStructure {
        r,
        theta,
        phis,
        clusters,
    };
    if s.constraint_residual() > 1e-8 {
        return Err(Error::Conditioning(format!(
            "eigenvalue angles violate 2θ + Σφ ≡ 0 by {}",
            s.constraint_residual()
        )));
    }
    Ok(s)
}

pub fn multiplicity(a: &Isometry) -> Result<Multiplicity> {
    Ok(eigen_structure(a)?.multiplicity())
}

/// Ordered eigenbasis `(a, x_1, …, x_{n−1}, r)` with `⟨a,r⟩ = 1`,
/// `⟨x_i,x_j⟩ = δ_ij` and the remaining pairings zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenframe {
    a: CVector,
    x: Vec<CVector>,
    r: CVector,
    structure: EigenStructure,
}

impl Eigenframe {
    /// Assemble a frame from explicit columns. The pairings are checked at
    /// `tol` relative to the column norms.
    pub fn from_columns(a: CVector, x: Vec<CVector>, r: CVector, structure: EigenStructure, tol: f64) -> Result<Self> {
        let frame = Self { a, x, r, structure };
        frame.check(tol)?;
        Ok(frame)
    }

    pub fn a(&self) -> &CVector {
        &self.a
    }

    pub fn r(&self) -> &CVector {
        &self.r
    }

    pub fn x(&self) -> &[CVector] {
        &self.x
    }

    pub fn structure(&self) -> &EigenStructure {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    /// Columns `(a, x_1, …, x_{n−1}, r)`.
    pub fn columns(&self) -> Vec<CVector> {
        let mut cols = vec![self.a.clone()];
        cols.extend(self.x.iter().cloned());
        cols.push(self.r.clone());
        cols
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.columns())
    }

    pub fn diagonal(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(self.structure.diagonal_values()))
    }

    /// The frame matrix times the unit scalar that makes its determinant 1.
    pub fn conjugator(&self) -> Result<Isometry> {
        let m = self.matrix();
        let d = determinant(&m);
        Isometry::certify(&m * inverse_root(d, m.nrows()), 1e-8)
    }

    /// `C_A E_A C_A⁻¹`.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let c = self.conjugator()?;
        Ok(c.matrix() * self.diagonal() * c.inverse())
    }

    /// Image of the frame under `c`.
    pub fn transport(&self, c: &Isometry) -> Eigenframe {
        Eigenframe {
            a: c.apply(&self.a),
            x: self.x.iter().map(|v| c.apply(v)).collect(),
            r: c.apply(&self.r),
            structure: self.structure.clone(),
        }
    }

    /// Replace the columns, keeping the eigenvalue data.
    pub(crate) fn with_columns(&self, a: CVector, x: Vec<CVector>, r: CVector) -> Eigenframe {
        Eigenframe {
            a,
            x,
            r,
            structure: self.structure.clone(),
        }
    }

    /// Largest deviation of the Gram matrix from the frame normalization,
    /// relative to the product of column norms.
    pub fn normalization_defect(&self) -> f64 {
        let cols = self.columns();
        let k = cols.len();
        let mut worst: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let want = if (i == 0 && j == k - 1) || (i == k - 1 && j == 0) || (i == j && i > 0 && i < k - 1) {
                    1.0
                } else {
                    0.0
                };
                let g = form(&cols[i], &cols[j]);
                let scale = (vnorm(&cols[i]) * vnorm(&cols[j])).max(1.0);
                worst = worst.max((g - C64::from(want)).norm() / scale);
            }
        }
        worst
    }

    /// `‖A F − F E‖_F / max(1, ‖A‖_F ‖F‖_F)`.
    pub fn eigen_residual(&self, a: &Isometry) -> f64 {
        let f = self.matrix();
        frob(&(a.matrix() * &f - &f * self.diagonal())) / (frob(a.matrix()) * frob(&f)).max(1.0)
    }

    fn check(&self, tol: f64) -> Result<()> {
        if self.x.len() + 1 != self.n() || self.r.len() != self.a.len() {
            return Err(Error::DegenerateFrame("frame has the wrong number of columns".into()));
        }
        let defect = self.normalization_defect();
        if defect > tol {
            return Err(Error::DegenerateFrame(format!("frame normalization defect {defect:.3e}")));
        }
        Ok(())
    }

    /// Lifts `p_1 = a`, `p_2 = r`, `p_i = (a − r)/√2 + x_{i−2}`.
    pub fn eigenpoint_lifts(&self) -> Vec<CVector> {
        let mut pts = vec![self.a.clone(), self.r.clone()];
        let mid = (&self.a - &self.r) / C64::from(SQRT_2);
        pts.extend(self.x.iter().map(|x| &mid + x));
        pts
    }

    pub fn eigenpoints(&self) -> Vec<BoundaryPoint> {
        eigenpoints(self)
    }
}

pub fn eigenpoints(frame: &Eigenframe) -> Vec<BoundaryPoint> {
    frame.eigenpoint_lifts().into_iter().map(BoundaryPoint::trusted).collect()
}

/// Columns `(a, x_1, …, x_{n−2}, r)` of an eigenframe, recovered up to one
/// unimodular scalar from arbitrary lifts of its first `n` eigenpoints.
pub fn frame_from_eigenpoints(points: &[BoundaryPoint]) -> Result<(CVector, Vec<CVector>, CVector)> {
    let dim = points.first().map(|p| p.dim()).ok_or(Error::TupleTooShort { min: 2, found: 0 })?;
    let n = dim - 1;
    if points.len() != n || n < 2 {
        return Err(Error::TupleTooShort {
            min: n.max(2),
            found: points.len(),
        });
    }
    let p1 = points[0].lift().clone();
    let scaled = |v: &CVector, target: f64| -> Result<CVector> {
        let g = form(&p1, v);
        if g.norm() <= 1e-12 * vnorm(&p1) * vnorm(v) {
            return Err(Error::DegenerateFrame("eigenpoint pairs to zero with the attracting point".into()));
        }
        Ok(v * (C64::from(target) / g.conj()))
    };
    let p2 = scaled(points[1].lift(), 1.0)?;
    let middles = points[2..]
        .iter()
        .map(|p| scaled(p.lift(), -std::f64::consts::FRAC_1_SQRT_2))
        .collect::<Result<Vec<_>>>()?;
    // ⟨p_2, p_i⟩ = 1/(√2|β|²) when p_1 = β a
    let s = match middles.first() {
        Some(m) => {
            let g = form(&p2, m) * C64::from(SQRT_2);
            if g.re <= 0.0 || g.im.abs() > 1e-8 * g.norm() {
                return Err(Error::DegenerateFrame("points are not eigenpoints of a frame".into()));
            }
            g.re
        }
        None => 1.0,
    };
    let a = &p1 * C64::from(s.sqrt());
    let r = p2 / C64::from(s.sqrt());
    let mid = (&a - &r) / C64::from(SQRT_2);
    let xs = middles.iter().map(|m| m / C64::from(s.sqrt()) - &mid).collect();
    Ok((a, xs, r))
}

/// The isometry sending the first `n` eigenpoints of one eigenframe to
/// those of another, with the last polar vector of each frame completed so
/// that both frames lie in `SU(n,1)`.
pub fn isometry_from_eigenpoints(source: &[BoundaryPoint], target: &[BoundaryPoint]) -> Result<Isometry> {
    let complete = |pts: &[BoundaryPoint]| -> Result<CMatrix> {
        let (a, xs, r) = frame_from_eigenpoints(pts)?;
        let n = a.len() - 1;
        let mut given = vec![HVector::new(a)?];
        for x in xs {
            given.push(HVector::new(x)?);
        }
        given.push(HVector::new(r)?);
        let last = complete_frame(&given, n)?;
        let mut cols: Vec<CVector> = given.into_iter().map(HVector::into_coords).collect();
        cols.insert(n - 1, last.into_coords());
        Ok(CMatrix::from_columns(&cols))
    };
    let s = complete(source)?;
    let t = complete(target)?;
    if s.nrows() != t.nrows() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            found: t.nrows(),
        });
    }
    Isometry::certify(t * group_inverse(&s), 1e-8)
}

pub fn eigenframe(a: &Isometry) -> Result<Eigenframe> {
    eigenframe_with(a, &Tolerances::default())
}

pub fn eigenframe_with(a: &Isometry, tol: &Tolerances) -> Result<Eigenframe> {
    let structure = eigen_structure_with(a, tol)?;
    let dim = a.dim();
    let id = CMatrix::identity(dim, dim);

    let av = eigen_direction(a, structure.attracting_value());
    let av = fix_phase(&(&av / C64::from(vnorm(&av))));
    let rv = eigen_direction(a, structure.repelling_value());
    let g = form(&av, &rv);
    if g.norm() <= tol.pairing * vnorm(&rv) {
        return Err(Error::DegenerateFrame("attracting and repelling vectors pair to zero".into()));
    }
    let rv = rv / g.conj();

    let mut xs: Vec<CVector> = Vec::with_capacity(dim - 2);
    for cluster in &structure.clusters {
        let shifted = a.matrix() - &id * cluster.value;
        let (basis, _) = smallest_right_singular(&shifted, cluster.multiplicity);
        for mut v in basis {
            v -= &av * form(&v, &rv) + &rv * form(&v, &av);
            for prev in &xs {
                v -= prev * form(&v, prev);
            }
            let q = form_norm(&v);
            if q <= 1e-6 * vnorm(&v).powi(2) {
                return Err(Error::DegenerateFrame("polar eigenvector is not positive".into()));
            }
            xs.push(fix_phase(&(v / C64::from(q.sqrt()))));
        }
    }
    let frame = Eigenframe {
        a: av,
        x: xs,
        r: rv,
        structure,
    };
    frame.check(1e-8)?;
    let residual = frame.eigen_residual(a);
    if residual > 1e-7 {
        return Err(Error::Conditioning(format!("eigenframe residual {residual:.3e}")));
    }
    Ok(frame)
}

/// Outcome of the resultant test, with the eigenvalue-gap oracle it was
/// checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regularity {
    pub regular: bool,
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub resultant: C64,
    /// First-order sensitivity of the resultant to its coefficients.
    pub scale: f64,
    /// Regular according to the loxodromic test plus pairwise eigenvalue gaps.
    pub oracle: bool,
}

/// Pairwise gaps between all eigenvalues exceed `eig·max(1, |λ|, |μ|)`.
pub fn eigenvalues_distinct(a: &Isometry, tol: f64) -> bool {
    let ev = eigenvalues(a);
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            if (ev[i] - ev[j]).norm() <= tol * ev[i].norm().max(ev[j].norm()).max(1.0) {
                return false;
            }
        }
    }
    true
}

pub fn is_regular(a: &Isometry) -> Result<Regularity> {
    is_regular_with(a, &Tolerances::default())
}

/// Regular loxodromic iff `Re R < −zero band` with a real `R`, where `R` is
/// the resultant of `χ_A` and `χ_A′`. Disagreement with the eigenvalue
/// oracle is reported as an error.
pub fn is_regular_with(a: &Isometry, tol: &Tolerances) -> Result<Regularity> {
    let s = char_coefficients(a.matrix());
    let resultant = discriminant_resultant(&s);
    let scale = resultant_sensitivity(&s);
    let band = tol.resultant_zero * scale;
    let real_enough = resultant.im.abs() <= tol.resultant * resultant.norm();
    let regular = resultant.re < -band && real_enough;
    let oracle = classify_with(a, tol)? == IsometryType::Loxodromic && eigenvalues_distinct(a, tol.eig);
    if regular != oracle {
        return Err(Error::InconsistentRegularity {
            resultant_re: resultant.re,
            resultant_im: resultant.im,
            oracle,
        });
    }
    Ok(Regularity {
        regular,
        resultant,
        scale,
        oracle,
    })
}

/// Conjugacy of two loxodromic elements via their trace tuples.
pub fn same_element_class(a: &Isometry, b: &Isometry) -> Result<bool> {
    same_element_class_with(a, b, &Tolerances::default())
}

pub fn same_element_class_with(a: &Isometry, b: &Isometry, tol: &Tolerances) -> Result<bool> {
    for m in [a, b] {
        if classify_with(m, tol)? != IsometryType::Loxodromic {
            return Err(Error::NotLoxodromic);
        }
    }
    if a.dim() != b.dim() {
        return Ok(false);
    }
    Ok(trace_tuple(a).agrees(&trace_tuple(b), tol.eig))
}

/// Multiset equality of spectra, matching each eigenvalue of `a` to the
/// nearest unused one of `b` within `tol·max(1, |λ|)`.
pub fn same_eigenvalues(a: &Isometry, b: &Isometry, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let mut rest = eigenvalues(b);
    for l in eigenvalues(a) {
        let best = rest
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - l).norm().total_cmp(&(y.1 - l).norm()))
            .map(|(i, m)| (i, (m - l).norm()));
        match best {
            Some((i, d)) if d <= tol * l.norm().max(1.0) => {
                rest.swap_remove(i);
            }
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{complete_frame, HVector};
    use crate::linalg::{ONE, ZERO};
    use crate::random::{loxodromic_from_params, random_loxodromic, random_su, seeded_rng, LoxodromicParams};
    use std::f64::consts::PI;

    fn diag(values: &[C64]) -> Isometry {
        Isometry::certify(CMatrix::from_diagonal(&CVector::from_column_slice(values)), 1e-12).unwrap()
    }

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn two_half() -> Isometry {
        diag(&[re(2.0), ONE, re(0.5)])
    }

    #[test]
    fn char_poly_of_diagonal_and_identity() {
        let s = char_poly(&two_half()).coefficients;
        for (x, want) in s.iter().zip([1.0, 3.5, 3.5, 1.0]) {
            assert!((x - re(want)).norm() < 1e-14);
        }
        let s = char_poly(&Isometry::identity(2)).coefficients;
        for (x, want) in s.iter().zip([1.0, 3.0, 3.0, 1.0]) {
            assert!((x - re(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn traces_of_small_examples() {
        let t = trace_tuple(&two_half());
        assert_eq!(t.values.len(), 1);
        assert!((t.values[0] - re(3.5)).norm() < 1e-15);
        let t = trace_tuple(&Isometry::identity(3));
        assert_eq!(t.values, vec![re(4.0), re(4.0)]);
    }

    #[test]
    fn diagonal_classification_and_structure() {
        assert_eq!(classify_isometry(&two_half()).unwrap(), IsometryType::Loxodromic);
        assert_eq!(classify_isometry(&Isometry::identity(2)).unwrap(), IsometryType::NonLoxodromic);
        let s = eigen_structure(&two_half()).unwrap();
        assert!((s.r - 2.0).abs() < 1e-14 && s.theta.abs() < 1e-14 && s.phis == vec![0.0]);
    }

    fn spun() -> Isometry {
        diag(&[
            C64::from_polar(3.0, PI / 3.0),
            C64::from_polar(1.0, -2.0 * PI / 3.0),
            C64::from_polar(1.0 / 3.0, PI / 3.0),
        ])
    }

    #[test]
    fn rotated_loxodromic_structure_survives_conjugation() {
        let s = eigen_structure(&spun()).unwrap();
        assert!((s.r - 3.0).abs() < 1e-13);
        assert!((s.theta - PI / 3.0).abs() < 1e-13);
        assert!((s.phis[0] + 2.0 * PI / 3.0).abs() < 1e-13);
        let c = random_su(2, 8).unwrap();
        let moved = spun().conjugate_by(&c);
        assert_eq!(classify_isometry(&moved).unwrap(), IsometryType::Loxodromic);
        let t = eigen_structure(&moved).unwrap();
        assert!((t.r - 3.0).abs() < 1e-8 && (t.theta - s.theta).abs() < 1e-8 && (t.phis[0] - s.phis[0]).abs() < 1e-8);
    }

    #[test]
    fn parabolic_elements_are_not_loxodromic() {
        // Heisenberg translation (horizontal and vertical parts)
        let z = C64::new(0.3, -0.7);
        let t = C64::new(0.0, 1.1) - z.norm_sqr() / 2.0;
        let m = CMatrix::from_row_slice(3, 3, &[ONE, -z.conj(), t, ZERO, ONE, z, ZERO, ZERO, ONE]);
        let p = Isometry::certify(m, 1e-12).unwrap();
        assert_eq!(classify_isometry(&p).unwrap(), IsometryType::NonLoxodromic);
        let c = random_su(2, 3).unwrap();
        assert_eq!(classify_isometry(&p.conjugate_by(&c)).unwrap(), IsometryType::NonLoxodromic);
    }

    #[test]
    fn marginal_modulus_is_reported() {
        let r = 1.0 + 1e-7;
        let m = diag(&[re(r), ONE, re(1.0 / r)]);
        assert!(matches!(classify_isometry(&m), Err(Error::Marginal { .. })));
    }

    #[test]
    fn diagonal_frame_is_standard_basis() {
        let f = eigenframe(&two_half()).unwrap();
        assert!((f.a() - CVector::from_vec(vec![ONE, ZERO, ZERO])).norm() < 1e-14);
        assert!((&f.x()[0] - CVector::from_vec(vec![ZERO, ONE, ZERO])).norm() < 1e-14);
        assert!((f.r() - CVector::from_vec(vec![ZERO, ZERO, ONE])).norm() < 1e-14);
    }

    #[test]
    fn frames_reconstruct_random_elements() {
        let mut rng = seeded_rng(21);
        for n in 2..=5 {
            for _ in 0..20 {
                let s = random_loxodromic(n, &mut rng).unwrap();
                let f = eigenframe(&s.element).unwrap();
                let back = f.reconstruct().unwrap();
                assert!(frob(&(back - s.element.matrix())) < 1e-7 * frob(s.element.matrix()));
                assert!(f.normalization_defect() < 1e-9);
                for p in f.eigenpoint_lifts() {
                    assert!(form_norm(&p).abs() < 1e-9 * vnorm(&p).powi(2));
                }
            }
        }
    }

    #[test]
    fn frame_of_conjugate_spans_the_transported_frame() {
        let mut rng = seeded_rng(2);
        let s = random_loxodromic(3, &mut rng).unwrap();
        let f = eigenframe(&s.element).unwrap();
        let std = eigenframe(&Isometry::certify(s.params.diagonal(), 1e-12).unwrap()).unwrap();
        let moved = std.transport(&s.conjugator);
        for (u, v) in f.columns().iter().zip(moved.columns().iter()) {
            assert!(projective_distance(u, v) < 1e-8);
        }
    }

    #[test]
    fn middle_columns_of_frames_are_rigid() {
        let mut rng = seeded_rng(5);
        let s = random_loxodromic(4, &mut rng).unwrap();
        let c = eigenframe(&s.element).unwrap().conjugator().unwrap();
        let cols: Vec<CVector> = (0..5).map(|j| c.matrix().column(j).into_owned()).collect();
        for missing in 2..=4 {
            let given: Vec<HVector> = (0..5)
                .filter(|&j| j + 1 != missing)
                .map(|j| HVector::new(cols[j].clone()).unwrap())
                .collect();
            let back = complete_frame(&given, missing).unwrap();
            assert!((back.coords() - &cols[missing - 1]).norm() < 1e-9);
        }
    }

    #[test]
    fn regularity_of_examples() {
        let reg = is_regular(&two_half()).unwrap();
        assert!(reg.regular && (reg.resultant - re(-0.5625)).norm() < 1e-12);
        let rep = diag(&[re(2.0), re(-1.0), re(-1.0), re(0.5)]);
        let reg = is_regular(&rep).unwrap();
        assert!(!reg.regular && reg.resultant.norm() < 1e-6 * reg.scale);
        assert_eq!(multiplicity(&rep).unwrap().parts, vec![2]);
    }

    #[test]
    fn elliptic_regular_element_is_not_regular_loxodromic() {
        // rotation about the point (e₁ − e₃)/√2 with distinct angles
        let h = 1.0 / SQRT_2;
        let p = CMatrix::from_row_slice(3, 3, &[re(h), ZERO, re(h), ZERO, ONE, ZERO, re(h), ZERO, re(-h)]);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::from_polar(1.0, 0.4),
            C64::from_polar(1.0, 1.1),
            C64::from_polar(1.0, -1.5),
        ]));
        let j = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ONE, re(-1.0)]));
        let p_inv = &j * p.adjoint() * crate::form::form_matrix(3);
        let e = Isometry::certify(&p * d * p_inv, 1e-12).unwrap();
        let reg = is_regular(&e).unwrap();
        assert!(!reg.regular && reg.resultant.re > 0.0);
    }

    #[test]
    fn clusters_across_the_branch_cut_merge() {
        let tol = Tolerances::default();
        let v = [C64::from_polar(1.0, PI - 1e-12), C64::from_polar(1.0, -PI + 1e-12), ONE];
        let c = cluster_unit_values(&v, &tol).unwrap();
        assert_eq!(c.iter().map(|c| c.multiplicity).collect::<Vec<_>>(), vec![1, 2]);
        let near = [ONE, C64::from_polar(1.0, 1e-6)];
        assert!(matches!(cluster_unit_values(&near, &tol), Err(Error::ClusteringAmbiguity { .. })));
    }

    #[test]
    fn traces_separate_classes() {
        let other = diag(&[re(3.0), ONE, re(1.0 / 3.0)]);
        assert!(!same_element_class(&two_half(), &other).unwrap());
        let c = random_su(2, 1).unwrap();
        assert!(same_element_class(&two_half(), &two_half().conjugate_by(&c)).unwrap());
        assert!(same_eigenvalues(&two_half(), &two_half().conjugate_by(&c), 1e-8));
    }

    #[test]
    fn equal_multiplicity_frame_is_orthonormal() {
        let mut rng = seeded_rng(9);
        let params = LoxodromicParams {
            r: 2.5,
            theta: 0.3,
            phis: vec![-0.2, -0.2, -0.2],
        };
        let s = loxodromic_from_params(params, &mut rng).unwrap();
        let f = eigenframe(&s.element).unwrap();
        assert_eq!(f.structure().multiplicity().parts, vec![3]);
        assert!(f.normalization_defect() < 1e-9);
        assert!(f.eigen_residual(&s.element) < 1e-9);
    }
}
