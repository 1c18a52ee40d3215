//! Real pentadiagonal form of the even-`N` square well.
//!
//! Splitting each amplitude `α_k = a_k + i·b_k` left of the centre into its
//! real and imaginary parts, with a real central amplitude `γ`, turns the
//! complex eigenproblem into a real one of dimension `2n + 3`: 2×2 diagonal
//! blocks `X = [[−F, −ξ], [ξ, −F]]`, `−I` off-diagonal blocks, a `−1` in the
//! last column at the `a_n` row and a last row `(…, −2, 0, −F)`.

use nalgebra::{DMatrix, Vector2};

use crate::chebyshev::{cheb_u_mat, Mat2};
use crate::error::{ensure_finite, Error, Result};

/// The assembled real system.
#[derive(Debug, Clone, PartialEq)]
pub struct PentadiagonalSystem {
    pub n: usize,
    pub f: f64,
    pub xi: f64,
    pub matrix: DMatrix<f64>,
}

impl PentadiagonalSystem {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

pub fn build_real_system(n: usize, f: f64, xi: f64) -> Result<PentadiagonalSystem> {
    ensure_finite(&[f, xi], "real system point")?;
    let dim = 2 * n + 3;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..=n {
        let i = 2 * k;
        m[(i, i)] = -f;
        m[(i, i + 1)] = -xi;
        m[(i + 1, i)] = xi;
        m[(i + 1, i + 1)] = -f;
        if k < n {
            m[(i, i + 2)] = -1.0;
            m[(i + 1, i + 3)] = -1.0;
            m[(i + 2, i)] = -1.0;
            m[(i + 3, i + 1)] = -1.0;
        }
    }
    let last = dim - 1;
    m[(2 * n, last)] = -1.0;
    m[(last, 2 * n)] = -2.0;
    m[(last, last)] = -f;
    Ok(PentadiagonalSystem { n, f, xi, matrix: m })
}

/// Determinant by LU with partial pivoting restricted to the band: at most
/// two subdiagonals, and at most four superdiagonals after pivoting.
pub fn banded_determinant(matrix: &DMatrix<f64>, lower: usize, upper: usize) -> f64 {
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let mut det = 1.0;
    for j in 0..n {
        let last_row = (j + lower).min(n - 1);
        let pivot = (j..=last_row).max_by(|&r, &s| a[(r, j)].abs().total_cmp(&a[(s, j)].abs())).unwrap_or(j);
        if a[(pivot, j)] == 0.0 {
            return 0.0;
        }
        if pivot != j {
            a.swap_rows(pivot, j);
            det = -det;
        }
        let p = a[(j, j)];
        det *= p;
        let last_col = (j + lower + upper).min(n - 1);
        for r in j + 1..=last_row {
            let factor = a[(r, j)] / p;
            if factor == 0.0 {
                continue;
            }
            for c in j..=last_col {
                let v = a[(j, c)];
                a[(r, c)] -= factor * v;
            }
        }
    }
    det
}

pub fn real_system_determinant(n: usize, f: f64, xi: f64) -> Result<f64> {
    let sys = build_real_system(n, f, xi)?;
    Ok(banded_determinant(&sys.matrix, 2, 2))
}

/// Real null vector of the system at `(F, ξ)` from the SVD; errors when the
/// smallest singular value exceeds `tol` relative to the largest.
pub fn real_null_vector(n: usize, f: f64, xi: f64, tol: f64) -> Result<Vec<f64>> {
    let sys = build_real_system(n, f, xi)?;
    let svd = sys.matrix.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Singular("SVD did not converge".into()))?;
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, s)| (i, *s))
        .unwrap_or((0, f64::INFINITY));
    let smax = svd.singular_values.max();
    if smin > tol * smax.max(1.0) {
        return Err(Error::Inconsistent(format!(
            "no null vector at F={f}, xi={xi}: smallest singular value {smin:.3e}"
        )));
    }
    Ok(v_t.row(imin).iter().copied().collect())
}

/// Max residual of the real system when the blocks are generated as
/// `c_k = U_k(X/2)·c_0` with `c_0` read off the null vector, `γ` taken from
/// `c_{n+1}` and the second component of `c_{n+1}` required to vanish.
pub fn verify_matrix_chebyshev(n: usize, f: f64, xi: f64) -> Result<f64> {
    let null = real_null_vector(n, f, xi, 1e-9)?;
    let c0 = Vector2::new(null[0], null[1]);
    if c0.norm() == 0.0 {
        return Err(Error::Inconsistent(format!("null vector at F={f}, xi={xi} has c_0 = 0")));
    }
    let c0 = c0 / c0.norm();
    let half_x = Mat2::new(-f, -xi, xi, -f) / 2.0;
    let blocks: Vec<Vector2<f64>> =
        (0..=n + 1).map(|k| cheb_u_mat(k, &half_x).map(|u| u * c0)).collect::<Result<_>>()?;
    let gamma = blocks[n + 1][0];
    let mut v = Vec::with_capacity(2 * n + 3);
    for c in &blocks[..=n] {
        v.push(c[0]);
        v.push(c[1]);
    }
    v.push(gamma);
    let sys = build_real_system(n, f, xi)?;
    let x = nalgebra::DVector::from_vec(v);
    let scale = x.amax().max(1.0);
    let residual = (&sys.matrix * &x).amax().max(blocks[n + 1][1].abs());
    Ok(residual / scale)
}
