//! The Hermitian form of signature `(n,1)` on `C^{n+1}`.
//!
//! The form is fixed to
//!
//! ```text
//! ⟨z, w⟩ = w* H z = z₁ w̄ₙ₊₁ + z₂ w̄₂ + … + zₙ w̄ₙ + zₙ₊₁ w̄₁
//! ```
//!
//! whose matrix `H` has ones in the anti-diagonal corners and the identity in
//! the middle block. `H` is its own inverse, so for `A ∈ SU(n,1)` the inverse
//! is `H A* H`.

use crate::error::{Error, Result};
use crate::linalg::{determinant, frob, smallest_right_singular, vnorm, CMatrix, CVector, C64, ONE, ZERO};

/// The ambient form: complex hyperbolic dimension `n`, vectors of length `n+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormContext {
    n: usize,
}

impl FormContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(Self { n })
    }

    /// Context for vectors (or square matrices) of size `dim = n+1`.
    pub fn for_dim(dim: usize) -> Result<Self> {
        Self::new(dim.saturating_sub(1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> CMatrix {
        form_matrix(self.dim())
    }

    pub fn product(&self, z: &CVector, w: &CVector) -> Result<C64> {
        self.check(z)?;
        self.check(w)?;
        Ok(form(z, w))
    }

    pub(crate) fn check(&self, z: &CVector) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        Ok(())
    }

    /// The distinguished null vector `o = (0, …, 0, 1)`.
    pub fn origin(&self) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[self.n] = ONE;
        v
    }

    /// The distinguished null vector `∞ = (1, 0, …, 0)`.
    pub fn infinity(&self) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[0] = ONE;
        v
    }
}

pub fn form_matrix(dim: usize) -> CMatrix {
    let mut h = CMatrix::zeros(dim, dim);
    h[(0, dim - 1)] = ONE;
    h[(dim - 1, 0)] = ONE;
    for i in 1..dim - 1 {
        h[(i, i)] = ONE;
    }
    h
}

/// `⟨z, w⟩` without dimension checks.
#[inline]
pub fn form(z: &CVector, w: &CVector) -> C64 {
    let d = z.len();
    let mut acc = z[0] * w[d - 1].conj() + z[d - 1] * w[0].conj();
    for i in 1..d - 1 {
        acc += z[i] * w[i].conj();
    }
    acc
}

#[inline]
pub(crate) fn form_norm(z: &CVector) -> f64 {
    form(z, z).re
}

/// `H M* H`, the group inverse of an element of `U(n,1)`.
pub(crate) fn group_inverse(m: &CMatrix) -> CMatrix {
    let h = form_matrix(m.nrows());
    &h * m.adjoint() * &h
}

/// Sign class of a vector under the form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub enum VectorClass {
    Negative,
    Null,
    Positive,
}

/// A vector of `C^{n,1}` carrying its self-product.
#[derive(Debug, Clone, PartialEq)]
pub struct HVector {
    coords: CVector,
    self_product: f64,
}

impl HVector {
    pub fn new(coords: CVector) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension);
        }
        let self_product = form_norm(&coords);
        Ok(Self {
            coords,
            self_product,
        })
    }

    pub fn from_slice(coords: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(coords))
    }

    pub fn coords(&self) -> &CVector {
        &self.coords
    }

    pub fn into_coords(self) -> CVector {
        self.coords
    }

    pub fn self_product(&self) -> f64 {
        self.self_product
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn classify(&self, tol: f64) -> Result<VectorClass> {
        classify_vector(self, tol)
    }
}

pub fn herm_product(z: &HVector, w: &HVector, ctx: &FormContext) -> Result<C64> {
    ctx.product(&z.coords, &w.coords)
}

/// Negative, null or positive relative to `tol·‖z‖²`.
pub fn classify_vector(z: &HVector, tol: f64) -> Result<VectorClass> {
    let scale = vnorm(&z.coords).powi(2);
    if scale == 0.0 {
        return Err(Error::ZeroVector);
    }
    let q = z.self_product;
    Ok(if q < -tol * scale {
        VectorClass::Negative
    } else if q > tol * scale {
        VectorClass::Positive
    } else {
        VectorClass::Null
    })
}

/// Append the homogeneous coordinate 1 to a point of the closed Siegel domain.
pub fn standard_lift(point: &[C64], tol: f64) -> Result<HVector> {
    if point.is_empty() {
        return Err(Error::InvalidDimension);
    }
    let value = 2.0 * point[0].re + point[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let scale = 1.0 + point.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if value > tol * scale {
        return Err(Error::OutsideSiegelDomain { value });
    }
    let mut coords: Vec<C64> = point.to_vec();
    coords.push(ONE);
    HVector::from_slice(&coords)
}

/// Residuals `(‖M*HM − H‖_F, |det M − 1|)`.
pub fn su_residuals(m: &CMatrix) -> (f64, f64) {
    let h = form_matrix(m.nrows());
    let form_residual = frob(&(m.adjoint() * &h * m - &h));
    let det_residual = (determinant(m) - ONE).norm();
    (form_residual, det_residual)
}

/// Membership in `SU(n,1)`; both residuals are measured against
/// `tol·max(1, ‖M‖_F²)`.
pub fn is_su(m: &CMatrix, tol: f64) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() < 2 {
        return Err(Error::InvalidDimension);
    }
    let (f, d) = su_residuals(m);
    let scale = frob(m).powi(2).max(1.0);
    Ok(f <= tol * scale && d <= tol * scale)
}

/// A square matrix together with a flag recording whether it passed the
/// `SU(n,1)` membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: CMatrix,
    certified: bool,
}

impl Isometry {
    pub fn certify(matrix: CMatrix, tol: f64) -> Result<Self> {
        if is_su(&matrix, tol)? {
            Ok(Self {
                matrix,
                certified: true,
            })
        } else {
            let (form_residual, det_residual) = su_residuals(&matrix);
            Err(Error::NotInGroup {
                form_residual,
                det_residual,
            })
        }
    }

    /// Wrap a matrix without checking membership.
    pub fn uncertified(matrix: CMatrix) -> Self {
        Self {
            matrix,
            certified: false,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n + 1, n + 1),
            certified: true,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inverse(&self) -> CMatrix {
        group_inverse(&self.matrix)
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// `C A C⁻¹` for an element `C` of the group.
    pub fn conjugate_by(&self, c: &Isometry) -> Isometry {
        Isometry {
            matrix: c.matrix() * &self.matrix * c.inverse(),
            certified: self.certified && c.certified,
        }
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            matrix: &self.matrix * other.matrix(),
            certified: self.certified && other.certified,
        }
    }

    pub fn power(&self, k: u32) -> CMatrix {
        let mut acc = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            acc = &acc * &self.matrix;
        }
        acc
    }
}

/// Reconstruct the column at 1-based position `missing_index` (`2 ≤ i ≤ n`)
/// of an `SU(n,1)` matrix from the other `n` columns, given in order.
pub fn complete_frame(columns: &[HVector], missing_index: usize) -> Result<HVector> {
    let dim = columns.len() + 1;
    let n = dim - 1;
    if n < 2 || !(2..=n).contains(&missing_index) {
        return Err(Error::DegenerateFrame(format!(
            "missing index {missing_index} outside 2..={n}"
        )));
    }
    for c in columns {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
    }
    let h = form_matrix(dim);
    // rows c_j* H: their kernel is the H-orthogonal complement
    let mut rows = CMatrix::zeros(n, dim);
    for (j, c) in columns.iter().enumerate() {
        let row = c.coords().adjoint() * &h;
        rows.row_mut(j).copy_from(&row);
    }
    let (basis, sv) = smallest_right_singular(&rows, 1);
    let top = sv.last().copied().unwrap_or(0.0);
    if top == 0.0 || sv[1] <= 1e-10 * top {
        return Err(Error::DegenerateFrame(
            "orthogonal complement of the given columns is not one-dimensional".into(),
        ));
    }
    let mut v = basis.into_iter().next().expect("one basis vector");
    let q = form_norm(&v);
    if q <= 1e-12 * vnorm(&v).powi(2) {
        return Err(Error::NoUnitScaling);
    }
    v /= C64::from(q.sqrt());

    let mut full = CMatrix::zeros(dim, dim);
    let mut k = 0;
    for col in 0..dim {
        if col + 1 == missing_index {
            full.set_column(col, &v);
        } else {
            full.set_column(col, columns[k].coords());
            k += 1;
        }
    }
    let d = determinant(&full);
    if (d.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::NoUnitScaling);
    }
    v *= d.conj() / d.norm();
    HVector::new(v)
}

/// Apply the same unit scalar to every column so the determinant becomes 1.
pub(crate) fn unit_determinant(m: &CMatrix) -> CMatrix {
    let d = determinant(m);
    m * crate::linalg::inverse_root(d, m.nrows())
}

pub(crate) fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::from_element(dim, ZERO);
    v[i] = ONE;
    v
}
