//! Non-singular pairs and their normalization, unique up to one unimodular
//! scalar.

use rand::Rng;

use super::{dedupe, pairs_nontrivially, Element, LoxodromicPair, PairFrames, PointLabel};
use crate::boundary::BoundaryTuple;
use crate::error::{Error, Result};
use crate::form::{form, form_norm};
use crate::linalg::{CVector, C64};
use crate::random::seeded_rng;
use crate::tol::Tolerances;

/// Post-conditions of the normalization are checked to this accuracy.
const NORMALIZATION_CHECK: f64 = 1e-9;

pub fn is_nonsingular(pair: &LoxodromicPair) -> bool {
    is_nonsingular_with(pair, &Tolerances::default())
}

/// Both elements regular, at least `n−2` polar vectors of `A` pair
/// nontrivially with `a_B`, and at least `n−2` of `B` with `a_A`.
pub fn is_nonsingular_with(pair: &LoxodromicPair, tol: &Tolerances) -> bool {
    if !matches!(pair.is_regular(tol), Ok(true)) {
        return false;
    }
    let need = pair.n().saturating_sub(2);
    let f = pair.frames();
    count_pairing(&f.x_a, &f.a_b, tol) >= need && count_pairing(&f.x_b, &f.a_a, tol) >= need
}

fn count_pairing(xs: &[CVector], v: &CVector, tol: &Tolerances) -> usize {
    xs.iter().filter(|x| pairs_nontrivially(x, v, tol.pairing)).count()
}

/// The normalized eigenpoint tuple `(p_{1,A}, …, p_{n,A}, p_{1,B}, …, p_{n,B})`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonsingularTuple {
    /// All `2n` lifts before repeated points are merged.
    pub lifts: Vec<CVector>,
    pub tuple: BoundaryTuple,
    pub labels: Vec<PointLabel>,
    pub relabel: Vec<usize>,
    /// Polar vectors of `A` and `B` after moving those pairing nontrivially
    /// with the other element's attracting vector to the front: entries are
    /// original 0-based indices.
    pub order_a: Vec<usize>,
    pub order_b: Vec<usize>,
}

pub fn normalize_nonsingular(pair: &LoxodromicPair) -> Result<NonsingularTuple> {
    normalize_frames(pair, pair.frames())
}

/// The same normalization started from lifts multiplied by random nonzero
/// scalars.
pub fn normalize_nonsingular_randomized(pair: &LoxodromicPair, seed: u64) -> Result<NonsingularTuple> {
    let mut rng = seeded_rng(seed);
    let mut f = pair.frames();
    let mut scale = |v: &mut CVector| {
        *v *= C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
    };
    scale(&mut f.a_a);
    scale(&mut f.r_a);
    scale(&mut f.a_b);
    scale(&mut f.r_b);
    f.x_a.iter_mut().for_each(&mut scale);
    f.x_b.iter_mut().for_each(&mut scale);
    normalize_frames(pair, f)
}

fn unit_phase(z: C64) -> C64 {
    if z.norm() == 0.0 {
        C64::from(1.0)
    } else {
        z / z.norm()
    }
}

fn normalize_frames(pair: &LoxodromicPair, mut f: PairFrames) -> Result<NonsingularTuple> {
    let tol = Tolerances::default();
    if !is_nonsingular_with(pair, &tol) {
        return Err(Error::NotNonsingular);
    }
    let n = pair.n();
    let order_a = front_pairing(&f.x_a, &f.a_b, &tol);
    let order_b = front_pairing(&f.x_b, &f.a_a, &tol);
    f.x_a = order_a.iter().map(|&i| f.x_a[i].clone()).collect();
    f.x_b = order_b.iter().map(|&i| f.x_b[i].clone()).collect();

    let lambda = form(&f.a_a, &f.r_a);
    let mu = form(&f.a_b, &f.r_b);
    let nu = form(&f.a_a, &f.r_b);
    let r: Vec<f64> = f.x_a.iter().map(|x| form_norm(x).sqrt()).collect();
    let s: Vec<f64> = f.x_b.iter().map(|x| form_norm(x).sqrt()).collect();
    let gamma: Vec<C64> = f.x_a.iter().map(|x| form(x, &f.a_b)).collect();
    let delta: Vec<C64> = f.x_b.iter().map(|x| form(x, &f.a_a)).collect();
    if !pairs_nontrivially(&f.x_a[0], &f.a_b, tol.pairing) {
        return Err(Error::InconsistentFlags("<x_1A, a_B> vanishes".into()));
    }
    let (g1, r1) = (gamma[0], C64::from(r[0]));

    // (1)
    f.x_a[0] /= r1;
    // (2)
    f.a_b *= r1 / g1.conj();
    // (3)
    f.r_b *= g1 / (r1 * mu.conj());
    // (4)
    f.a_a *= r1 * mu / (g1.conj() * nu);
    // (5)
    f.r_a *= g1 * nu.conj() / (r1 * lambda.conj() * mu.conj());
    // (6)
    for i in 1..f.x_a.len() {
        f.x_a[i] *= unit_phase(g1) * unit_phase(gamma[i]).conj() / r[i];
    }
    // (7)
    for i in 0..f.x_b.len() {
        f.x_b[i] *= unit_phase(g1) * unit_phase(mu) * unit_phase(nu).conj() * unit_phase(delta[i]).conj() / s[i];
    }
    check_normalization(&f, n)?;

    let pa = f.eigenpoints(Element::A);
    let pb = f.eigenpoints(Element::B);
    let mut points = Vec::with_capacity(2 * n);
    for (element, pts) in [(Element::A, &pa), (Element::B, &pb)] {
        points.extend(
            pts.iter()
                .take(n)
                .enumerate()
                .map(|(i, v)| (PointLabel { element, index: i + 1 }, v.clone())),
        );
    }
    let lifts = points.iter().map(|(_, v)| v.clone()).collect();
    let (tuple, labels, relabel) = dedupe(points, tol.point)?;
    Ok(NonsingularTuple {
        lifts,
        tuple,
        labels,
        relabel,
        order_a,
        order_b,
    })
}

/// Stable order putting vectors that pair nontrivially with `v` first.
fn front_pairing(xs: &[CVector], v: &CVector, tol: &Tolerances) -> Vec<usize> {
    let (mut yes, no): (Vec<usize>, Vec<usize>) = (0..xs.len()).partition(|&i| pairs_nontrivially(&xs[i], v, tol.pairing));
    yes.extend(no);
    yes
}

fn check_normalization(f: &PairFrames, n: usize) -> Result<()> {
    let one = C64::from(1.0);
    let mut failures = Vec::new();
    let mut expect = |name: String, got: C64, ok: bool| {
        if !ok {
            failures.push(format!("{name} = {got}"));
        }
    };
    for (name, u, v) in [
        ("<a_A,r_A>", &f.a_a, &f.r_a),
        ("<a_B,r_B>", &f.a_b, &f.r_b),
        ("<a_A,r_B>", &f.a_a, &f.r_b),
        ("<x_1A,a_B>", &f.x_a[0], &f.a_b),
    ] {
        let g = form(u, v);
        expect(name.into(), g, (g - one).norm() <= NORMALIZATION_CHECK);
    }
    for (side, xs) in [("A", &f.x_a), ("B", &f.x_b)] {
        for (i, x) in xs.iter().enumerate() {
            let q = form_norm(x);
            expect(format!("<x_{}{side},x_{}{side}>", i + 1, i + 1), C64::from(q), (q - 1.0).abs() <= NORMALIZATION_CHECK);
        }
    }
    for i in 0..n.saturating_sub(2) {
        for (name, u, v) in [("<x_{}A,a_B>", &f.x_a[i], &f.a_b), ("<x_{}B,a_A>", &f.x_b[i], &f.a_a)] {
            let g = form(u, v);
            let ok = g.im.abs() <= NORMALIZATION_CHECK * g.norm().max(1.0) && g.re > 0.0;
            expect(name.replace("{}", &(i + 1).to_string()), g, ok);
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::InconsistentFlags(failures.join(", ")))
    }
}
