//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn vnorm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean inner product `Σ u_k conj(v_k)`.
pub(crate) fn edot(u: &CVector, v: &CVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub(crate) fn determinant(m: &CMatrix) -> C64 {
    m.clone().lu().determinant()
}

pub(crate) fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().lu().try_inverse()
}

/// Sine of the angle between the complex lines spanned by `u` and `v`.
pub fn projective_distance(u: &CVector, v: &CVector) -> f64 {
    let (nu, nv) = (vnorm(u), vnorm(v));
    if nu == 0.0 || nv == 0.0 {
        return 1.0;
    }
    let uh = u / C64::from(nu);
    let vh = v / C64::from(nv);
    let c = edot(&vh, &uh);
    vnorm(&(&vh - uh * c)).min(1.0)
}

/// Orthonormal (Euclidean) basis of the `dim` smallest right singular
/// directions of `m`, together with all singular values in ascending order.
pub(crate) fn smallest_right_singular(m: &CMatrix, dim: usize) -> (Vec<CVector>, Vec<f64>) {
    let cols = m.ncols();
    let square = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let basis = order
        .iter()
        .take(dim)
        .map(|&i| CVector::from_iterator(cols, v_t.row(i).iter().map(|z| z.conj())))
        .collect();
    (basis, values)
}

/// Multiply `v` by the unit scalar that makes its first coordinate of modulus
/// above `1e-8·‖v‖` real and positive.
pub(crate) fn fix_phase(v: &CVector) -> CVector {
    let threshold = 1e-8 * vnorm(v);
    match v.iter().find(|z| z.norm() > threshold) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Principal `k`-th root of the inverse of a unit-modulus (or nonzero) scalar.
pub(crate) fn inverse_root(d: C64, k: usize) -> C64 {
    C64::from_polar(d.norm().powf(-1.0 / k as f64), -d.arg() / k as f64)
}

/// Normalize an angle to `(-π, π]`, folding values within `1e-9` of `-π` to `π`.
pub(crate) fn wrap_angle(phi: f64) -> f64 {
    use std::f64::consts::PI;
    let mut a = phi.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI + 1e-9 {
        a += 2.0 * PI;
    }
    a
}
