//! Closed-form eigenvectors of the square well (`q = 0`) and the real 2×2
//! matching systems whose determinants vanish exactly at the real
//! eigenvalues.
//!
//! The amplitudes left of the centre are `α_k = c·U_k(z)` with
//! `z = (−F + iξ)/2` and `c = a + ib`; the right half is the mirrored
//! complex conjugate. What remains of the eigenproblem is two real linear
//! conditions on `(a, b)`.

use num_complex::Complex64;

use crate::chebyshev::{cheb_t, cheb_u};
use crate::error::{ensure_finite, Error, Result};

/// Parity of the number of lattice intervals `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `N = 2n + 4`, dimension `2n + 3` with a central site.
    Even,
    /// `N = 2n + 3`, dimension `2n + 2`.
    Odd,
}

impl Parity {
    pub fn of(intervals: usize) -> Self {
        if intervals.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn dim(self, n: usize) -> usize {
        match self {
            Parity::Even => 2 * n + 3,
            Parity::Odd => 2 * n + 2,
        }
    }

    pub fn intervals(self, n: usize) -> usize {
        self.dim(n) + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Block size `n` for a square well with `intervals` lattice intervals.
pub fn block_size(intervals: usize) -> Result<(usize, Parity)> {
    if intervals < 3 {
        return Err(Error::Domain(format!("matching needs N >= 3, got N={intervals}")));
    }
    let parity = Parity::of(intervals);
    let n = match parity {
        Parity::Even => (intervals - 4) / 2,
        Parity::Odd => (intervals - 3) / 2,
    };
    Ok((n, parity))
}

/// Real 2×2 matching system for one `(n, parity, F, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingSystem {
    pub n: usize,
    pub parity: Parity,
    pub f: f64,
    pub xi: f64,
    /// Rows act on `(a, b)`.
    pub rows: [[f64; 2]; 2],
}

fn z_of(f: Complex64, xi: f64) -> Complex64 {
    (Complex64::new(0.0, xi) - f) / 2.0
}

impl MatchingSystem {
    pub fn new(n: usize, parity: Parity, f: f64, xi: f64) -> Result<Self> {
        ensure_finite(&[f, xi], "matching point")?;
        let z = z_of(Complex64::new(f, 0.0), xi);
        let u1 = cheb_u(n + 1, z)?;
        let u0 = cheb_u(n, z)?;
        let (p, q, r, s) = (u1.re, u1.im, u0.re, u0.im);
        let rows = match parity {
            // Im(c·U_{n+1}) = 0 and F·Re(c·U_{n+1}) + 2·Re(c·U_n) = 0
            Parity::Even => [[q, p], [f * p + 2.0 * r, -f * q - 2.0 * s]],
            // c·U_{n+1}(z) = conj(c·U_n(z)), real and imaginary parts
            Parity::Odd => [[p - r, s - q], [q + s, p + r]],
        };
        Ok(Self { n, parity, f, xi, rows })
    }

    pub fn determinant(&self) -> f64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    /// Magnitude of the determinant's two products, for relative tests.
    pub fn scale(&self) -> f64 {
        (self.rows[0][0] * self.rows[1][1]).abs() + (self.rows[0][1] * self.rows[1][0]).abs()
    }

    /// `(a, b)` spanning the null space, with `a² + b² = 1`, `a ≥ 0`
    /// (and `b > 0` when `a = 0`). When both rows vanish the null space is
    /// the whole plane and `(1, 0)` is returned.
    pub fn null_vector(&self) -> (f64, f64) {
        let [r0, r1] = self.rows;
        let row = if r0[0].hypot(r0[1]) >= r1[0].hypot(r1[1]) { r0 } else { r1 };
        let norm = row[0].hypot(row[1]);
        if norm == 0.0 {
            return (1.0, 0.0);
        }
        let (mut a, mut b) = (-row[1] / norm, row[0] / norm);
        if a < 0.0 || a == 0.0 && b < 0.0 {
            a = -a;
            b = -b;
        }
        (a + 0.0, b + 0.0)
    }
}

/// Determinant of the even-`N` matching system,
/// `−F·|U_{n+1}|² − 2·Re(U_{n+1}·conj U_n)`.
pub fn matching_det_even(n: usize, f: f64, xi: f64) -> Result<f64> {
    Ok(MatchingSystem::new(n, Parity::Even, f, xi)?.determinant())
}

/// Determinant of the odd-`N` matching system, `|U_{n+1}|² − |U_n|²`.
pub fn matching_det_odd(n: usize, f: f64, xi: f64) -> Result<f64> {
    Ok(MatchingSystem::new(n, Parity::Odd, f, xi)?.determinant())
}

pub fn matching_det(n: usize, parity: Parity, f: f64, xi: f64) -> Result<f64> {
    Ok(MatchingSystem::new(n, parity, f, xi)?.determinant())
}

/// Full eigenvector in lattice order for normalization `c`:
/// `α_0, …, α_n, [γ,] conj α_n, …, conj α_0`.
pub fn eigenvector(n: usize, parity: Parity, f: Complex64, xi: f64, c: Complex64) -> Result<Vec<Complex64>> {
    ensure_finite(&[f.re, f.im, xi, c.re, c.im], "eigenvector input")?;
    let z = z_of(f, xi);
    let alpha: Vec<Complex64> = (0..=n).map(|k| cheb_u(k, z).map(|u| c * u)).collect::<Result<_>>()?;
    let mut v = alpha.clone();
    if parity == Parity::Even {
        v.push(c * cheb_u(n + 1, z)?);
    }
    v.extend(alpha.iter().rev().map(|a| a.conj()));
    Ok(v)
}

/// Eigenvector at a real eigenvalue `f`, normalized by the matching null
/// vector.
pub fn matching_eigenvector(n: usize, parity: Parity, f: f64, xi: f64) -> Result<Vec<Complex64>> {
    let (a, b) = MatchingSystem::new(n, parity, f, xi)?.null_vector();
    eigenvector(n, parity, Complex64::new(f, 0.0), xi, Complex64::new(a, b))
}

/// `T_{n+1}(z)·U_{n+1}(w) + T_{n+1}(w)·U_{n+1}(z)` with
/// `z, w = (−F ± iξ)/2`, evaluated literally.
pub fn secular_printed_even(n: usize, f: f64, xi: f64) -> Result<Complex64> {
    let z = z_of(Complex64::new(f, 0.0), xi);
    let w = z.conj();
    Ok(cheb_t(n + 1, z)? * cheb_u(n + 1, w)? + cheb_t(n + 1, w)? * cheb_u(n + 1, z)?)
}

/// `U_n(z)·U_n(w) − U_{n+1}(z)·U_{n+1}(w)`, evaluated literally.
pub fn secular_printed_odd(n: usize, f: f64, xi: f64) -> Result<Complex64> {
    let z = z_of(Complex64::new(f, 0.0), xi);
    let w = z.conj();
    Ok(cheb_u(n, z)? * cheb_u(n, w)? - cheb_u(n + 1, z)? * cheb_u(n + 1, w)?)
}

/// `φ = α + iβ` with `cos φ = (−F + iξ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigPoint {
    pub alpha: f64,
    pub beta: f64,
}

impl TrigPoint {
    pub fn phi(&self) -> Complex64 {
        Complex64::new(self.alpha, self.beta)
    }

    /// `(F, ξ)` recovered from `cos α·cosh β = −F/2`, `sin α·sinh β = −ξ/2`.
    pub fn forward(&self) -> (f64, f64) {
        (-2.0 * self.alpha.cos() * self.beta.cosh(), -2.0 * self.alpha.sin() * self.beta.sinh())
    }
}

/// Inverse of [`TrigPoint::forward`] on the branch `β ≤ 0`; `α ∈ [0, π]`
/// for `ξ ≥ 0` and `α ∈ [−π, 0)` for `ξ < 0`.
pub fn trig_map(f: f64, xi: f64) -> Result<TrigPoint> {
    ensure_finite(&[f, xi], "trigonometric map input")?;
    let s = f * f + xi * xi - 4.0;
    let root = (s * s + 16.0 * xi * xi).sqrt();
    // rationalized when s < 0 to avoid cancellation
    let sinh_sq = if s >= 0.0 { (s + root) / 8.0 } else { 2.0 * xi * xi / (root - s) };
    let beta = -sinh_sq.sqrt().asinh();
    let cos_alpha = (-f / (2.0 * beta.cosh())).clamp(-1.0, 1.0);
    let mut alpha = cos_alpha.acos();
    if xi < 0.0 {
        alpha = -alpha;
    }
    Ok(TrigPoint { alpha, beta })
}

/// `Re[sin((n+1)φ)·cos((n+1)φ*) / sin φ]`.
pub fn trig_residual(n: usize, point: TrigPoint) -> Result<f64> {
    let phi = point.phi();
    let sin_phi = phi.sin();
    if sin_phi.norm() < 1e-14 {
        return Err(Error::Singular(format!("sin(phi) = 0 at alpha={}, beta={}", point.alpha, point.beta)));
    }
    let m = (n + 1) as f64;
    Ok(((m * phi).sin() * (m * phi.conj()).cos() / sin_phi).re)
}

/// Whether `F = 0` solves the even-`N` matching system for every sampled
/// coupling. Not applicable to odd `N`, which has no central site.
pub fn robust_level_check(n: usize, parity: Parity) -> Result<bool> {
    if parity == Parity::Odd {
        return Err(Error::NotApplicable("odd N has no central site".into()));
    }
    for &xi in &[0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let m = MatchingSystem::new(n, parity, 0.0, xi)?;
        if m.determinant().abs() > 1e-12 * m.scale().max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Real zeros of `g` on `[lo, hi]`.
///
/// Sign changes on a uniform grid of `points` samples are refined by
/// bisection to `tol`. A local minimum of `|g|` without a sign change is
/// refined by minimizing `|g|` over the neighbouring cells: a sign flip at
/// the minimizer yields two zeros, a minimum below `zero_tol(x)` a double
/// zero.
pub fn real_zeros<G, S>(g: G, zero_tol: S, lo: f64, hi: f64, points: usize, tol: f64) -> Vec<f64>
where
    G: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    let points = points.max(3);
    let xs: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut zeros = Vec::new();
    for i in 0..points {
        if ys[i] == 0.0 {
            zeros.push(xs[i]);
            continue;
        }
        if i + 1 < points && ys[i + 1] != 0.0 && ys[i].signum() != ys[i + 1].signum() {
            zeros.push(bisect(&g, xs[i], xs[i + 1], ys[i], tol));
        }
        if i > 0 && i + 1 < points {
            let (a, b, c) = (ys[i - 1], ys[i], ys[i + 1]);
            let same_sign = a.signum() == b.signum() && b.signum() == c.signum() && a != 0.0 && c != 0.0;
            if same_sign && b.abs() < a.abs() && b.abs() <= c.abs() {
                let sign = b.signum();
                let oriented = |x: f64| sign * g(x);
                let x_min = golden_min(&oriented, xs[i - 1], xs[i + 1]);
                let y_min = g(x_min);
                if y_min.signum() != sign && y_min != 0.0 {
                    zeros.push(bisect(&g, xs[i - 1], x_min, a, tol));
                    zeros.push(bisect(&g, x_min, xs[i + 1], y_min, tol));
                } else if y_min.abs() <= zero_tol(x_min) {
                    zeros.push(x_min);
                    zeros.push(x_min);
                }
            }
        }
    }
    zeros.sort_by(f64::total_cmp);
    zeros
}

fn bisect<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, mut ga: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..120 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Real eigenvalues of the square well with block size `n` as zeros of the
/// matching determinant, with multiplicity.
pub fn secular_zeros(n: usize, parity: Parity, xi: f64) -> Result<Vec<f64>> {
    ensure_finite(&[xi], "coupling")?;
    let reach = 2.0 + xi.abs();
    let det = |f: f64| matching_det(n, parity, f, xi).unwrap_or(f64::NAN);
    let zero_tol = |f: f64| 1e-10 * MatchingSystem::new(n, parity, f, xi).map(|m| m.scale()).unwrap_or(0.0).max(1e-300);
    let mut zeros = real_zeros(det, zero_tol, -reach, reach, 20 * (n + 2), 1e-12);
    if parity == Parity::Even {
        // the grid is symmetric about 0; snap the central level
        for z in zeros.iter_mut() {
            if z.abs() <= 1e-12 {
                *z = 0.0;
            }
        }
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Model;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn full_residual(parity: Parity, n: usize, f: Complex64, xi: f64, v: &[Complex64]) -> f64 {
        let h = Model::square_well(parity.intervals(n)).unwrap().hamiltonian(xi);
        let av = h.apply(v);
        let norm = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
        av.iter().zip(v).map(|(a, x)| (a - f * x).norm()).fold(0.0, f64::max) / norm
    }

    #[test]
    fn eigenvector_seeds() {
        let v = eigenvector(0, Parity::Even, c(0.3, 0.0), 0.7, c(1.0, 0.0)).unwrap();
        assert_eq!(v[0], c(1.0, 0.0));
        assert_eq!(v.len(), 3);
        let v = eigenvector(1, Parity::Odd, c(0.0, 0.0), 0.0, c(1.0, 0.0)).unwrap();
        assert_eq!(v[1], c(0.0, 0.0));
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn eigenvector_solves_matrix_at_closed_form_root() {
        let v = matching_eigenvector(0, Parity::Even, 1.0, 1.0).unwrap();
        assert!(full_residual(Parity::Even, 0, c(1.0, 0.0), 1.0, &v) < 1e-12);
        assert!(matching_det_even(0, 1.0, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn determinant_closed_forms_small_n() {
        for &f in &[-2.5, -1.0, -0.3, 0.0, 0.4, 1.7] {
            for &xi in &[0.0, 0.25, 1.0, 2.2] {
                let even = matching_det_even(0, f, xi).unwrap();
                assert_abs_diff_eq!(even, -f * (f * f + xi * xi - 2.0), epsilon = 1e-13);
                let odd = matching_det_odd(0, f, xi).unwrap();
                assert_abs_diff_eq!(odd, f * f + xi * xi - 1.0, epsilon = 1e-13);
                assert_abs_diff_eq!(matching_det_even(0, 0.0, xi).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn closed_form_roots_n1() {
        // even: F = ±√(2 − ξ² ± √(1 − 4ξ²))
        for &xi in &[0.0, 0.2, 0.4, 0.5] {
            let disc = (1.0f64 - 4.0 * xi * xi).max(0.0).sqrt();
            for sign in [-1.0, 1.0] {
                let f = (2.0 - xi * xi + sign * disc).sqrt();
                let m = MatchingSystem::new(1, Parity::Even, f, xi).unwrap();
                assert!(m.determinant().abs() <= 1e-10 * m.scale().max(1.0), "xi={xi} f={f}");
            }
        }
        // odd at ξ = 0: ±(√5 ± 1)/2
        let mut zeros = secular_zeros(1, Parity::Odd, 0.0).unwrap();
        let s5 = 5f64.sqrt();
        let mut expected = vec![-(s5 + 1.0) / 2.0, -(s5 - 1.0) / 2.0, (s5 - 1.0) / 2.0, (s5 + 1.0) / 2.0];
        zeros.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        assert_eq!(zeros.len(), 4);
        for (a, b) in zeros.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn odd_n1_double_roots_at_critical_coupling() {
        let xi = 5f64.sqrt() / 4.0;
        // F² = (6 − 4ξ²)/4 is a double root
        let f = ((6.0 - 4.0 * xi * xi) / 4.0f64).sqrt();
        let m = MatchingSystem::new(1, Parity::Odd, f, xi).unwrap();
        assert!(m.determinant().abs() < 1e-12);
        let zeros = secular_zeros(1, Parity::Odd, xi).unwrap();
        assert_eq!(zeros.len(), 4, "{zeros:?}");
        assert_abs_diff_eq!(zeros[3], f, epsilon = 1e-7);
        assert_abs_diff_eq!(zeros[2], f, epsilon = 1e-7);
    }

    #[test]
    fn printed_forms() {
        // odd n = 0: 1 − (F² + ξ²)
        let v = secular_printed_odd(0, 0.6, 0.8).unwrap();
        assert!(v.norm() < 1e-12);
        let f = (5f64.sqrt() + 1.0) / 2.0;
        assert!(secular_printed_odd(1, f, 0.0).unwrap().norm() < 1e-10);
        // odd printed form is minus the matching determinant
        for &(f, xi) in &[(0.3, 0.2), (1.4, 0.9), (-0.7, 1.3)] {
            for n in 0..6 {
                let printed = secular_printed_odd(n, f, xi).unwrap();
                assert_abs_diff_eq!(printed.im, 0.0, epsilon = 1e-9);
                assert_abs_diff_eq!(printed.re, -matching_det_odd(n, f, xi).unwrap(), epsilon = 1e-9);
            }
        }
        // even printed form at n = 0 is 4zw = F² + ξ², nonzero at the root F = ξ = 1
        let printed = secular_printed_even(0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(printed.re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(matching_det_even(0, 1.0, 1.0).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn trig_map_branch() {
        let p = trig_map(-2.0, 0.0).unwrap();
        assert_eq!((p.alpha, p.beta), (0.0, 0.0));
        let p = trig_map(0.0, 0.8).unwrap();
        assert_abs_diff_eq!(p.alpha, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        assert!(p.beta < 0.0);
        assert!(trig_residual(0, trig_map(-2.0, 0.0).unwrap()).is_err());
        assert!(trig_map(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn trig_residual_is_second_kind_product() {
        // sin((n+1)φ)/sin φ = U_n(cos φ)
        let (f, xi) = (0.7, 0.4);
        let p = trig_map(f, xi).unwrap();
        let z = Complex64::new(-f / 2.0, xi / 2.0);
        for n in 0..5 {
            let m = (n + 1) as f64;
            let expected = (cheb_u(n, z).unwrap() * (m * p.phi().conj()).cos()).re;
            assert_abs_diff_eq!(trig_residual(n, p).unwrap(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn robust_level() {
        for n in 0..=6 {
            assert!(robust_level_check(n, Parity::Even).unwrap());
        }
        assert!(matches!(robust_level_check(2, Parity::Odd), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn determinant_parity_in_f() {
        for n in 0..8 {
            for parity in [Parity::Even, Parity::Odd] {
                let sign = if parity.dim(n) % 2 == 0 { 1.0 } else { -1.0 };
                for &(f, xi) in &[(0.3, 0.2), (1.1, 0.6), (2.4, 1.5)] {
                    let a = matching_det(n, parity, f, xi).unwrap();
                    let b = matching_det(n, parity, -f, xi).unwrap();
                    assert!((b - sign * a).abs() <= 1e-10 * a.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn zero_finder_handles_close_pairs() {
        let g = |x: f64| (x - 0.537) * (x - 0.537 - 1e-6) * (x + 1.0);
        let z = real_zeros(g, |_| 1e-14, -2.0, 2.0, 41, 1e-13);
        assert_eq!(z.len(), 3);
        assert_abs_diff_eq!(z[1], 0.537, epsilon = 1e-12);
        assert_abs_diff_eq!(z[2], 0.537 + 1e-6, epsilon = 1e-12);
        let g = |x: f64| (x - 0.3) * (x - 0.3) + 1e-4;
        assert!(real_zeros(g, |_| 1e-14, -2.0, 2.0, 41, 1e-13).is_empty());
    }

    proptest! {
        #[test]
        fn trig_roundtrip(f in -5.0f64..5.0, xi in -5.0f64..5.0) {
            let p = trig_map(f, xi).unwrap();
            prop_assert!(p.beta <= 0.0);
            let (f2, xi2) = p.forward();
            prop_assert!((f2 - f).abs() < 1e-9 * (1.0 + f.abs()));
            prop_assert!((xi2 - xi).abs() < 1e-9 * (1.0 + xi.abs()));
        }

        #[test]
        fn eigenvector_is_pt_symmetric(n in 0usize..8, f in -3.0f64..3.0, xi in 0.0f64..2.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
            for parity in [Parity::Even, Parity::Odd] {
                let v = eigenvector(n, parity, c(f, 0.0), xi, c(a, b)).unwrap();
                let d = v.len();
                for k in 0..=n {
                    prop_assert_eq!(v[d - 1 - k], v[k].conj());
                }
            }
        }
    }
}
