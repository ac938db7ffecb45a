//! Characteristic polynomials and resultants of small complex matrices.

use crate::linalg::{determinant, CMatrix, C64, ONE, ZERO};

/// Coefficients `s₀ … s_d` with `det(xI − M) = Σ (−1)^i s_i x^{d−i}`, so
/// `s_i` is the i-th elementary symmetric function of the eigenvalues.
///
/// Computed from the Hessenberg form by Hyman's recursion on leading
/// principal minors, independently of any eigenvalue computation.
pub fn char_coefficients(m: &CMatrix) -> Vec<C64> {
    let d = m.nrows();
    let h = m.clone().hessenberg().h();
    // p[k] holds det(xI − H_k) in ascending powers of x
    let mut p: Vec<Vec<C64>> = vec![vec![ONE]];
    for k in 0..d {
        let mut next = vec![ZERO; k + 2];
        for (i, c) in p[k].iter().enumerate() {
            next[i + 1] += c;
            next[i] -= h[(k, k)] * c;
        }
        let mut sub = ONE;
        for i in (0..k).rev() {
            sub *= h[(i + 1, i)];
            let factor = h[(i, k)] * sub;
            for (t, c) in p[i].iter().enumerate() {
                next[t] -= factor * c;
            }
        }
        p.push(next);
    }
    let monic = &p[d];
    (0..=d)
        .map(|i| {
            let c = monic[d - i];
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// Monic-form coefficients in descending powers from the `s_i` convention.
pub fn descending_from_symmetric(s: &[C64]) -> Vec<C64> {
    s.iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
        .collect()
}

pub fn derivative_descending(p: &[C64]) -> Vec<C64> {
    let d = p.len() - 1;
    p[..d]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (d - i) as f64)
        .collect()
}

/// Sylvester matrix of `f` and `g` given in descending powers.
pub fn sylvester(f: &[C64], g: &[C64]) -> CMatrix {
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let size = df + dg;
    let mut s = CMatrix::zeros(size, size);
    for row in 0..dg {
        for (j, &c) in f.iter().enumerate() {
            s[(row, row + j)] = c;
        }
    }
    for row in 0..df {
        for (j, &c) in g.iter().enumerate() {
            s[(dg + row, row + j)] = c;
        }
    }
    s
}

pub fn resultant(f: &[C64], g: &[C64]) -> C64 {
    determinant(&sylvester(f, g))
}

/// Hadamard bound on `|det|` of the Sylvester matrix: product of row norms.
pub fn sylvester_scale(f: &[C64], g: &[C64]) -> f64 {
    let nf = f.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let ng = g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    nf.powi(g.len() as i32 - 1) * ng.powi(f.len() as i32 - 1)
}

/// Resultant of a polynomial with its derivative, from `s_i` coefficients.
pub fn discriminant_resultant(s: &[C64]) -> C64 {
    let f = descending_from_symmetric(s);
    let g = derivative_descending(&f);
    resultant(&f, &g)
}

/// First-order sensitivity `Σ_{i≥1} |∂R/∂s_i|·max(1, |s_i|)` of
/// [`discriminant_resultant`], by central differences. This is the size of
/// the change in `R` caused by a unit relative perturbation of the
/// coefficients, and so the natural scale against which `R = 0` is judged.
pub fn resultant_sensitivity(s: &[C64]) -> f64 {
    let mut total = 0.0;
    for i in 1..s.len() {
        let w = s[i].norm().max(1.0);
        let h = 1e-6 * w;
        let mut up = s.to_vec();
        let mut down = s.to_vec();
        up[i] += h;
        down[i] -= h;
        let d = (discriminant_resultant(&up) - discriminant_resultant(&down)) / (2.0 * h);
        total += d.norm() * w;
    }
    total
}

pub fn eval_descending(p: &[C64], x: C64) -> C64 {
    p.iter().fold(ZERO, |acc, &c| acc * x + c)
}
