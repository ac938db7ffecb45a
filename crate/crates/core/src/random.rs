//! Seeded generation of group elements, boundary points and loxodromics.
//!
//! Every generator is a pure function of its seed: the same seed always
//! produces the same bits.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::form::{form, form_norm, group_inverse, unit_determinant, Isometry};
use crate::linalg::{vnorm, wrap_angle, CMatrix, CVector, C64};
use crate::tol::Tolerances;

pub type SeededRng = ChaCha8Rng;

/// Resampling bound for Gram-Schmidt breakdown.
pub const MAX_ATTEMPTS: usize = 16;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * FRAC_1_SQRT_2
}

pub fn random_complex_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_iterator(dim, (0..dim).map(|_| random_complex(rng)))
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(-PI..PI))
}

/// A null vector of unit Euclidean norm, projectively uniform on the boundary
/// sphere: the Gaussian's negative component is rescaled to cancel the
/// positive part.
pub fn random_null_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let dim = n + 1;
    loop {
        let w = random_complex_vector(dim, rng);
        let u = (w[0] + w[dim - 1]) * FRAC_1_SQRT_2;
        let t = (w[0] - w[dim - 1]) * FRAC_1_SQRT_2;
        let positive = (u.norm_sqr() + (1..dim - 1).map(|i| w[i].norm_sqr()).sum::<f64>()).sqrt();
        if t.norm() < 1e-12 || positive < 1e-12 {
            continue;
        }
        let t = t / t.norm() * positive;
        let mut v = w;
        v[0] = (u + t) * FRAC_1_SQRT_2;
        v[dim - 1] = (u - t) * FRAC_1_SQRT_2;
        let norm = vnorm(&v);
        return v / C64::from(norm);
    }
}

/// Random element of `SU(n,1)` from an H-Gram-Schmidt pass: a null pair
/// `(a, r)` with `⟨a,r⟩ = 1` first, then `n−1` positive unit vectors
/// orthogonal to it and to each other, then a unit scalar fixing `det = 1`.
pub fn random_su(n: usize, seed: u64) -> Result<Isometry> {
    let mut rng = seeded_rng(seed);
    random_su_with(n, &mut rng)
}

pub fn random_su_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Isometry> {
    if n == 0 {
        return Err(Error::InvalidDimension);
    }
    let dim = n + 1;
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let a = random_null_vector(n, rng);
        let r0 = random_null_vector(n, rng);
        let g = form(&a, &r0);
        if g.norm() < 0.1 {
            continue;
        }
        // balance the pair so both have Euclidean norm |g|^{-1/2}
        let s = g.norm().sqrt();
        let a = a / C64::from(s);
        let r = r0 / (g.conj() / s);
        let mut cols: Vec<CVector> = Vec::with_capacity(dim);
        cols.push(a.clone());
        let mut positives: Vec<CVector> = Vec::new();
        for _ in 0..n.saturating_sub(1) {
            let mut w = random_complex_vector(dim, rng);
            let (wr, wa) = (form(&w, &r), form(&w, &a));
            w -= &a * wr + &r * wa;
            for x in &positives {
                let c = form(&w, x);
                w -= x * c;
            }
            let q = form_norm(&w);
            if q < 1e-3 * vnorm(&w).powi(2) {
                continue 'attempt;
            }
            positives.push(w / C64::from(q.sqrt()));
        }
        cols.extend(positives);
        cols.push(r);
        let m = unit_determinant(&CMatrix::from_columns(&cols));
        return Isometry::certify(m, Tolerances::default().group);
    }
    Err(Error::GramSchmidtBreakdown {
        attempts: MAX_ATTEMPTS,
    })
}

/// Parameters `(r, θ, φ₁, …, φₙ₋₁)` of a diagonal loxodromic.
#[derive(Debug, Clone, PartialEq)]
pub struct LoxodromicParams {
    pub r: f64,
    pub theta: f64,
    pub phis: Vec<f64>,
}

impl LoxodromicParams {
    /// `diag(r e^{iθ}, e^{iφ₁}, …, e^{iφₙ₋₁}, r⁻¹ e^{iθ})`.
    pub fn diagonal(&self) -> CMatrix {
        let mut d = vec![C64::from_polar(self.r, self.theta)];
        d.extend(self.phis.iter().map(|&p| C64::from_polar(1.0, p)));
        d.push(C64::from_polar(1.0 / self.r, self.theta));
        CMatrix::from_diagonal(&CVector::from_vec(d))
    }

    /// Smallest chordal distance between distinct unit-circle eigenvalues.
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.phis.len() {
            for j in i + 1..self.phis.len() {
                let d = (C64::from_polar(1.0, self.phis[i]) - C64::from_polar(1.0, self.phis[j])).norm();
                best = best.min(d);
            }
        }
        best
    }
}

/// Random parameters satisfying `2θ + Σφ ≡ 0`, with every pair of
/// unit-circle eigenvalues at chordal distance at least `min_gap`.
pub fn random_params<R: Rng + ?Sized>(n: usize, min_gap: f64, rng: &mut R) -> LoxodromicParams {
    loop {
        let r = rng.random_range(1.5..3.0);
        let theta = rng.random_range(-PI..PI);
        let mut phis: Vec<f64> = (0..n.saturating_sub(2)).map(|_| rng.random_range(-PI..PI)).collect();
        if n >= 2 {
            phis.push(wrap_angle(-2.0 * theta - phis.iter().sum::<f64>()));
        }
        if n == 1 {
            // no unit-circle eigenvalues, so 2θ ≡ 0
            let theta = if rng.random_bool(0.5) { 0.0 } else { PI };
            return LoxodromicParams { r, theta, phis };
        }
        let p = LoxodromicParams {
            r,
            theta: wrap_angle(theta),
            phis,
        };
        if p.min_gap() >= min_gap {
            return p;
        }
    }
}

/// A loxodromic `C E C⁻¹` with its conjugator and diagonal form.
#[derive(Debug, Clone)]
pub struct LoxodromicSample {
    pub element: Isometry,
    pub conjugator: Isometry,
    pub params: LoxodromicParams,
}

/// Regular loxodromic with unit-circle eigenvalues separated by at least 0.05.
pub fn random_loxodromic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LoxodromicSample> {
    let params = random_params(n, 0.05, rng);
    loxodromic_from_params(params, rng)
}

pub fn loxodromic_from_params<R: Rng + ?Sized>(params: LoxodromicParams, rng: &mut R) -> Result<LoxodromicSample> {
    let n = params.phis.len() + 1;
    let c = random_su_with(n, rng)?;
    let e = params.diagonal();
    let m = c.matrix() * e * group_inverse(c.matrix());
    Ok(LoxodromicSample {
        element: Isometry::certify(m, 1e-8)?,
        conjugator: c,
        params,
    })
}

/// Random `m × m` unitary matrix (QR of a Gaussian matrix).
pub fn random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(m, m, |_, _| random_complex(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..m {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let col = q.column(j) * phase;
            q.set_column(j, &col);
        }
    }
    q
}

/// Random `SU(n,1)` frame `[a, x_1, …, x_{n−1}, r]` whose first polar
/// columns are the given H-orthonormal positive vectors and, when `plane` is
/// given, whose null pair `(a, r)` lies in the span of `plane`.
///
/// Used to engineer pairs with prescribed orthogonality patterns.
pub fn constrained_frame<R: Rng + ?Sized>(
    n: usize,
    polars: &[CVector],
    plane: Option<&[CVector]>,
    rng: &mut R,
) -> Result<CMatrix> {
    let dim = n + 1;
    let project_out = |mut v: CVector, basis: &[CVector]| {
        for b in basis {
            let c = form(&v, b) / C64::from(form_norm(b));
            v -= b * c;
        }
        v
    };
    let sample = |rng: &mut R| match plane {
        Some(p) => p.iter().fold(CVector::zeros(dim), |acc, b| acc + b * random_complex(rng)),
        None => random_complex_vector(dim, rng),
    };
    for _ in 0..MAX_ATTEMPTS * 4 {
        let fixed: Vec<CVector> = polars.to_vec();
        let w = project_out(sample(rng), &fixed);
        let qw = form_norm(&w);
        if qw > -1e-3 * vnorm(&w).powi(2) {
            continue;
        }
        let w = w / C64::from((-qw).sqrt());
        let mut basis = fixed.clone();
        basis.push(w.clone());
        let u = project_out(sample(rng), &basis);
        let qu = form_norm(&u);
        if qu < 1e-3 * vnorm(&u).powi(2) {
            continue;
        }
        let u = u / C64::from(qu.sqrt());
        let a = (&w + &u) * C64::from(FRAC_1_SQRT_2);
        let r = (&u - &w) * C64::from(FRAC_1_SQRT_2);
        let mut xs = fixed.clone();
        let mut ok = true;
        while xs.len() < n - 1 {
            let mut all = xs.clone();
            all.push(w.clone());
            all.push(u.clone());
            let v = project_out(random_complex_vector(dim, rng), &all);
            let q = form_norm(&v);
            if q < 1e-3 * vnorm(&v).powi(2) {
                ok = false;
                break;
            }
            xs.push(v / C64::from(q.sqrt()));
        }
        if !ok {
            continue;
        }
        let mut cols = vec![a];
        cols.extend(xs);
        cols.push(r);
        let mut m = CMatrix::from_columns(&cols);
        let d = crate::linalg::determinant(&m);
        // scaling a and r by ω keeps ⟨a,r⟩ and multiplies det by ω²
        let omega = C64::from_polar(1.0, -d.arg() / 2.0);
        for col in [0, dim - 1] {
            let c = m.column(col) * omega;
            m.set_column(col, &c);
        }
        Isometry::certify(m.clone(), 1e-9)?;
        return Ok(m);
    }
    Err(Error::GramSchmidtBreakdown {
        attempts: MAX_ATTEMPTS * 4,
    })
}

/// `F E F⁻¹` for an `SU(n,1)` frame `F` and diagonal parameters.
pub fn loxodromic_on_frame(frame: &CMatrix, params: &LoxodromicParams) -> Result<Isometry> {
    Isometry::certify(frame * params.diagonal() * group_inverse(frame), 1e-8)
}
