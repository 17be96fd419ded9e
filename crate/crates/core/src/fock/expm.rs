//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! The degree and scaling are picked from the 1-norm using the thresholds
//! `θ_m` for which the backward error of the `[m/m]` approximant is below the
//! double precision unit roundoff (Higham 2005).

use num_complex::Complex64 as C64;

use super::matrix::{solve, ComplexMatrix};
use crate::error::{Error, Result};

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

/// Computes `exp(m)`.
///
/// `tol` is the requested backward error. The Padé thresholds deliver a
/// backward error at the unit roundoff, so any `tol` at or above it is met;
/// smaller values are rejected as unattainable.
pub fn matrix_exponential(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!("exponential of a non-square {}x{} matrix", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::Numerical("exponential of a matrix with non-finite entries".into()));
    }
    if !(tol.is_finite() && tol >= UNIT_ROUNDOFF) {
        return Err(Error::Numerical(format!(
            "requested tolerance {tol:e} is below the attainable backward error {UNIT_ROUNDOFF:e}"
        )));
    }
    let n = m.rows();
    let norm = m.norm1();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }

    let a2 = m * m;
    for (degree, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return low_degree(m, &a2, coeffs);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let (a, a2) = if s > 0 {
        let f = 0.5f64.powi(s);
        (m.scale_real(f), a2.scale_real(f * f))
    } else {
        (m.clone(), a2)
    };
    let mut r = degree13(&a, &a2)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::Numerical("matrix exponential overflowed".into()));
    }
    Ok(r)
}

fn pade_quotient(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    // exp(A) ≈ (V - U)^{-1} (V + U)
    let q = v - u;
    let p = v + u;
    let r = solve(&q, &p)?;
    if !r.is_finite() {
        return Err(Error::Numerical("Padé denominator is ill-conditioned".into()));
    }
    Ok(r)
}

fn low_degree(a: &ComplexMatrix, a2: &ComplexMatrix, b: &[f64]) -> Result<ComplexMatrix> {
    let n = a.rows();
    let ident = ComplexMatrix::identity(n);
    // Even powers I, A², A⁴, ...
    let mut powers = vec![ident, a2.clone()];
    while powers.len() < b.len() / 2 {
        let next = powers.last().unwrap() * a2;
        powers.push(next);
    }
    let mut odd = ComplexMatrix::zeros(n, n);
    let mut even = ComplexMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        even = &even + &p.scale_real(b[2 * k]);
        odd = &odd + &p.scale_real(b[2 * k + 1]);
    }
    let u = a * &odd;
    pade_quotient(&u, &even)
}

fn degree13(a: &ComplexMatrix, a2: &ComplexMatrix) -> Result<ComplexMatrix> {
    let b = &B13;
    let n = a.rows();
    let ident = ComplexMatrix::identity(n);
    let a4 = a2 * a2;
    let a6 = &a4 * a2;
    let lin = |c6: f64, c4: f64, c2: f64| -> ComplexMatrix {
        &(&a6.scale_real(c6) + &a4.scale_real(c4)) + &a2.scale_real(c2)
    };

    let inner_u = &a6 * &lin(b[13], b[11], b[9]);
    let u_sum = &(&inner_u + &lin(b[7], b[5], b[3])) + &ident.scale(C64::new(b[1], 0.0));
    let u = a * &u_sum;

    let inner_v = &a6 * &lin(b[12], b[10], b[8]);
    let v = &(&inner_v + &lin(b[6], b[4], b[2])) + &ident.scale(C64::new(b[0], 0.0));
    pade_quotient(&u, &v)
}
