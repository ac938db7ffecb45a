//! Engineered pairs with prescribed degeneracies: shared eigenpoints,
//! non-good and singular pairs, a vanishing canonical anchor, and
//! eigenvalue multiplicities.

use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::form::{basis_vector, complete_frame, form, form_norm, group_inverse, HVector, Isometry};
use crate::linalg::{CMatrix, CVector, C64};
use crate::loxodromic::{eigen_structure, Eigenframe};
use crate::pair::{make_pair, LoxodromicPair};
use crate::random::{
    constrained_frame, loxodromic_from_params, loxodromic_on_frame, random_complex_vector, random_loxodromic,
    random_null_vector, random_params, seeded_rng, LoxodromicParams, MAX_ATTEMPTS,
};
use crate::tol::Tolerances;

fn diagonal_element(params: &LoxodromicParams) -> Result<Isometry> {
    Isometry::certify(params.diagonal(), 1e-12)
}

/// Parameters with the unit-circle angles sorted, so that the standard
/// basis is an eigenframe in the order the eigensolver reports.
fn sorted_params(n: usize, seed: u64) -> LoxodromicParams {
    let mut p = random_params(n, 0.05, &mut seeded_rng(seed));
    p.phis.sort_by(f64::total_cmp);
    p
}

/// `SU(n,1)` frame whose first column is the null vector `a`.
fn frame_through(a: &CVector, seed: u64) -> Result<CMatrix> {
    let n = a.len() - 1;
    let mut rng = seeded_rng(seed);
    for _ in 0..MAX_ATTEMPTS {
        let w = random_null_vector(n, &mut rng);
        let g = form(a, &w);
        if g.norm() < 0.1 {
            continue;
        }
        let r = w / g.conj();
        let mut xs: Vec<CVector> = Vec::new();
        for i in 1..n - 1 {
            let mut v = basis_vector(n + 1, i) + random_complex_vector(n + 1, &mut rng) * C64::from(0.3);
            v -= a * form(&v, &r) + &r * form(&v, a);
            for x in &xs {
                v -= x * form(&v, x);
            }
            let q = form_norm(&v);
            if q <= 1e-3 {
                break;
            }
            xs.push(v / C64::from(q.sqrt()));
        }
        if xs.len() + 2 != n {
            continue;
        }
        let mut cols = vec![HVector::new(a.clone())?];
        for x in xs {
            cols.push(HVector::new(x)?);
        }
        cols.push(HVector::new(r)?);
        let last = complete_frame(&cols, n)?;
        let mut c: Vec<CVector> = cols.into_iter().map(HVector::into_coords).collect();
        c.insert(n - 1, last.into_coords());
        return Ok(CMatrix::from_columns(&c));
    }
    Err(Error::GramSchmidtBreakdown {
        attempts: MAX_ATTEMPTS,
    })
}

/// `n = 2`: a pair whose third eigenpoints coincide. `B = G A G⁻¹` where
/// `G` is loxodromic fixing `p_{3,A}`, tuned so that `|⟨a_A, G a_A⟩| = 1`,
/// and the frame of `B` is the unit multiple of `G·(frame of A)` meeting
/// the `⟨a_A,a_B⟩ = 1` anchor.
pub fn collision_pair(seed: u64) -> Result<LoxodromicPair> {
    let params = sorted_params(2, seed);
    let a = diagonal_element(&params)?;
    let structure = eigen_structure(&a)?;
    let (e1, e2, e3) = (basis_vector(3, 0), basis_vector(3, 1), basis_vector(3, 2));
    let p3 = (&e1 - &e3) * C64::from(FRAC_1_SQRT_2) + &e2;
    let k = frame_through(&p3, seed.wrapping_add(1))?;
    let k_inv = group_inverse(&k);
    let g_of = |t: f64| {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::from(t.exp()),
            C64::from(1.0),
            C64::from((-t).exp()),
        ]));
        &k * d * &k_inv
    };
    let value = |t: f64| form(&e1, &(g_of(t) * &e1)).norm();
    let mut hi = 1.0;
    while value(hi) < 1.0 {
        hi *= 2.0;
        if hi > 64.0 {
            return Err(Error::Conditioning("could not bracket the collision parameter".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if value(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g = Isometry::certify(g_of(0.5 * (lo + hi)), 1e-8)?;
    let b = a.conjugate_by(&g);
    let frame_a = Eigenframe::from_columns(e1.clone(), vec![e2], e3, structure.clone(), 1e-12)?;
    let moved = frame_a.transport(&g);
    let h = form(&e1, moved.a());
    let lambda = h / h.norm();
    let frame_b = Eigenframe::from_columns(
        moved.a() * lambda,
        moved.x().iter().map(|x| x * lambda).collect(),
        moved.r() * lambda,
        structure,
        1e-8,
    )?;
    LoxodromicPair::from_frames(a, b, frame_a, frame_b, &Tolerances::default())
}

/// `n = 3`: the polar eigenvector `x_{1,B} = (e_1 + e_4)/√2` lies in the
/// attracting–repelling plane of `A = diag(…)`, so it pairs to zero with
/// both polar eigenvectors of `A`.
pub fn non_good_pair(seed: u64) -> Result<LoxodromicPair> {
    let mut rng = seeded_rng(seed);
    let a = diagonal_element(&sorted_params(3, seed))?;
    let x = (basis_vector(4, 0) + basis_vector(4, 3)) * C64::from(FRAC_1_SQRT_2);
    let frame = constrained_frame(3, std::slice::from_ref(&x), None, &mut rng)?;
    let b = loxodromic_on_frame(&frame, &random_params(3, 0.05, &mut rng))?;
    make_pair(a, b)
}

/// `n = 4`: the fixed points of `B` lie in `span(e_1, e_4, e_5)`, so the
/// polar eigenvectors `e_2`, `e_3` of `A = diag(…)` are orthogonal to `L_B`.
pub fn singular_pair(seed: u64) -> Result<LoxodromicPair> {
    let mut rng = seeded_rng(seed);
    let a = diagonal_element(&sorted_params(4, seed))?;
    let plane = [basis_vector(5, 0), basis_vector(5, 3), basis_vector(5, 4)];
    let frame = constrained_frame(4, &[], Some(&plane), &mut rng)?;
    let b = loxodromic_on_frame(&frame, &random_params(4, 0.05, &mut rng))?;
    make_pair(a, b)
}

/// `n = 2`: the attracting point of `B` sits at distance about `1e-5` from
/// the repelling point `e_3` of `A`, so `⟨r_A, a_B⟩ ≈ 5·10⁻¹¹` is below
/// the pairing tolerance. Exact vanishing is impossible for distinct
/// boundary points.
pub fn anchor_degenerate_pair(seed: u64) -> Result<LoxodromicPair> {
    let mut rng = seeded_rng(seed);
    let a = diagonal_element(&sorted_params(2, seed))?;
    let eps = 1e-5;
    let a_b = CVector::from_vec(vec![C64::from(-0.5 * eps * eps), C64::from(eps), C64::from(1.0)]);
    let r0 = CVector::from_vec(vec![C64::from(1.0), C64::from(1.0), C64::from(-0.5)]);
    let r_b = &r0 / form(&a_b, &r0).conj();
    let x = complete_frame(&[HVector::new(a_b.clone())?, HVector::new(r_b.clone())?], 2)?;
    let frame = CMatrix::from_columns(&[a_b, x.into_coords(), r_b]);
    let b = loxodromic_on_frame(&frame, &random_params(2, 0.05, &mut rng))?;
    make_pair(a, b)
}

/// `n = 3`: `A` has a double unit-circle eigenvalue, `B` is a generic
/// regular loxodromic.
pub fn multiplicity_pair(seed: u64) -> Result<LoxodromicPair> {
    let mut rng = seeded_rng(seed);
    let theta = rng.random_range(-1.0..1.0);
    let params = LoxodromicParams {
        r: 2.0,
        theta,
        phis: vec![-theta, -theta],
    };
    let a = loxodromic_from_params(params, &mut rng)?.element;
    let b = random_loxodromic(3, &mut rng)?.element;
    make_pair(a, b)
}

/// `n = 3`: both elements act by scalars on `span(e_2, e_3)`, so the pair
/// commutes with a copy of `U(2)`.
pub fn reducible_pair(seed: u64) -> Result<LoxodromicPair> {
    let mut rng = seeded_rng(seed);
    let double = |theta: f64, r: f64| LoxodromicParams {
        r,
        theta,
        phis: vec![-theta, -theta],
    };
    let a = diagonal_element(&double(0.4, 2.0))?;
    let polars = [basis_vector(4, 1), basis_vector(4, 2)];
    let frame = constrained_frame(3, &polars, None, &mut rng)?;
    let b = loxodromic_on_frame(&frame, &double(-1.1, 1.7))?;
    make_pair(a, b)
}
