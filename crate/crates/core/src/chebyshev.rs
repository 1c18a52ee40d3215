//! Chebyshev polynomials of the first and second kind by forward three-term
//! recurrence, for complex scalars and for real 2×2 matrix arguments.
//!
//! Second kind uses the standard seeds `U_0 = 1`, `U_1(z) = 2z`; first kind
//! uses `T_0 = 1`, `T_1(z) = z`. Both satisfy `Q_{k+1} = 2z·Q_k − Q_{k−1}`.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{ensure_finite, Result};

/// Real 2×2 matrix, row-major entries.
pub type Mat2 = Matrix2<f64>;

fn check(z: Complex64) -> Result<()> {
    ensure_finite(&[z.re, z.im], "Chebyshev argument")
}

fn recur(k: usize, z: Complex64, q0: Complex64, q1: Complex64) -> Complex64 {
    if k == 0 {
        return q0;
    }
    let two_z = 2.0 * z;
    let (mut prev, mut cur) = (q0, q1);
    for _ in 1..k {
        let next = two_z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U_k(z)`, Chebyshev polynomial of the second kind.
pub fn cheb_u(k: usize, z: Complex64) -> Result<Complex64> {
    check(z)?;
    Ok(recur(k, z, Complex64::new(1.0, 0.0), 2.0 * z))
}

/// `T_k(z)`, Chebyshev polynomial of the first kind.
pub fn cheb_t(k: usize, z: Complex64) -> Result<Complex64> {
    check(z)?;
    Ok(recur(k, z, Complex64::new(1.0, 0.0), z))
}

/// `U_0(z), …, U_k(z)` in one pass.
pub fn cheb_u_sequence(k: usize, z: Complex64) -> Result<Vec<Complex64>> {
    check(z)?;
    let mut out = Vec::with_capacity(k + 1);
    out.push(Complex64::new(1.0, 0.0));
    if k >= 1 {
        out.push(2.0 * z);
    }
    for j in 2..=k {
        let next = 2.0 * z * out[j - 1] - out[j - 2];
        out.push(next);
    }
    Ok(out)
}

/// `U_k(M)` for a real 2×2 matrix `M`: `U_0 = I`, `U_1 = 2M`, same recurrence
/// with matrix products.
///
/// Callers evaluating the block solutions of the real pentadiagonal form pass
/// `M = X/2`.
pub fn cheb_u_mat(k: usize, m: &Mat2) -> Result<Mat2> {
    ensure_finite(m.as_slice(), "matrix argument")?;
    let id = Mat2::identity();
    if k == 0 {
        return Ok(id);
    }
    let two_m = 2.0 * m;
    let (mut prev, mut cur) = (id, two_m);
    for _ in 1..k {
        let next = two_m * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Real 2×2 representation of a complex number: `a + ib ↦ [[a, −b], [b, a]]`.
pub fn complex_to_mat2(z: Complex64) -> Mat2 {
    Mat2::new(z.re, -z.im, z.im, z.re)
}
