//! Characteristic polynomial `det(A − F·I)` of the scaled tridiagonal matrix
//! and its roots.
//!
//! Two representations are provided. [`char_poly`] expands the leading
//! principal minors into monomial coefficients, which reproduces printed
//! secular determinants exactly. [`MinorRecurrence`] evaluates the same
//! polynomial pointwise through the minor recurrence; root finding on it
//! stays accurate at dimensions where the monomial coefficients are too
//! ill-conditioned to locate roots (beyond roughly `N = 25`).

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

use crate::aberth::{self, AberthOptions, PolyEval};
use crate::error::{Error, Result};
use crate::model::ScaledHamiltonian;

/// Realness threshold for downstream classification:
/// `|Im F| ≤ REAL_TOL·max(1, |F|)`.
pub const REAL_TOL: f64 = 1e-9;

/// Whether `f` counts as real under [`REAL_TOL`].
pub fn is_real(f: Complex64) -> bool {
    f.im.abs() <= REAL_TOL * f.norm().max(1.0)
}

/// Complex coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Trailing (highest-degree) zeros are dropped.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Largest coefficient modulus.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part among the coefficients.
    pub fn imaginary_defect(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

/// Real coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Some(parity)` when every coefficient of the other parity is below
    /// `tol·scale`: 0 for even, 1 for odd polynomials.
    pub fn parity(&self, tol: f64) -> Option<usize> {
        let limit = tol * self.scale();
        [0usize, 1]
            .into_iter()
            .find(|&par| self.coeffs.iter().enumerate().all(|(k, c)| k % 2 == par || c.abs() <= limit))
    }
}

/// `det(A − F·I)` as a polynomial in `F`, from
/// `D_k = (d_k − F)·D_{k−1} − D_{k−2}`, `D_0 = 1`, `D_{−1} = 0`.
pub fn char_poly(h: &ScaledHamiltonian) -> ComplexPolynomial {
    let zero = Complex64::new(0.0, 0.0);
    let mut prev: Vec<Complex64> = Vec::new();
    let mut cur = vec![Complex64::new(1.0, 0.0)];
    for &d in h.diagonal() {
        let mut next = vec![zero; cur.len() + 1];
        for (k, &c) in cur.iter().enumerate() {
            next[k] += d * c;
            next[k + 1] -= c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
    }
    ComplexPolynomial::new(cur)
}

/// Drops imaginary parts after checking they are round-off:
/// `max |Im c_k| ≤ tol·max(1, max |c_k|)`.
pub fn certify_real(p: &ComplexPolynomial, tol: f64) -> Result<RealPolynomial> {
    let defect = p.imaginary_defect();
    let allowed = tol * p.scale().max(1.0);
    if defect > allowed {
        return Err(Error::PtBroken { defect, allowed });
    }
    Ok(RealPolynomial::new(p.coeffs().iter().map(|c| c.re).collect()))
}

/// Roots with their residuals `|p(r)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    /// Sorted by real part, then imaginary part.
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    /// Residual scale `Σ|c_k|·|r|^k` for each root, the yardstick for `residuals`.
    pub residual_scales: Vec<f64>,
    /// Threshold used by [`RootSet::is_real`].
    pub real_tol: f64,
}

impl RootSet {
    pub fn is_real(&self) -> Vec<bool> {
        self.roots.iter().map(|&r| r.im.abs() <= self.real_tol * r.norm().max(1.0)).collect()
    }

    pub fn real_roots(&self) -> Vec<f64> {
        self.roots.iter().zip(self.is_real()).filter(|(_, real)| *real).map(|(r, _)| r.re).collect()
    }

    /// Largest `residual / residual_scale` over all roots.
    pub fn max_relative_residual(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.residual_scales)
            .map(|(r, s)| if *s > 0.0 { r / s } else { *r })
            .fold(0.0, f64::max)
    }
}

type Dd = Complex<TwoFloat>;

fn dd(z: Complex64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn undd(z: Dd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

struct Horner<'a> {
    coeffs: &'a [f64],
}

impl PolyEval for Horner<'_> {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Fujiwara's bound `2·max |c_k/c_n|^{1/(n−k)}`, halving the constant term.
    fn root_radius(&self) -> f64 {
        let n = self.degree();
        let lead = self.coeffs[n].abs();
        (0..n)
            .map(|k| {
                let c = if k == 0 { self.coeffs[0].abs() / 2.0 } else { self.coeffs[k].abs() };
                (c / lead).powf(1.0 / (n - k) as f64)
            })
            .fold(0.0, f64::max)
            * 2.0
    }

    fn newton(&self, z: Complex64) -> Complex64 {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        p / dp
    }

    fn newton_precise(&self, z: Complex64) -> Complex64 {
        let zd = dd(z);
        let zero = dd(Complex64::new(0.0, 0.0));
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * zd + p;
            p = p * zd + Complex::new(TwoFloat::from(c), TwoFloat::from(0.0));
        }
        undd(p) / undd(dp)
    }

    fn residual(&self, z: Complex64) -> f64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c).norm()
    }

    fn residual_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }
}

/// All complex roots of a real polynomial.
///
/// A zero root is split off while the constant coefficient is below
/// `1e−13·scale`. The rest come from Aberth–Ehrlich iteration with a
/// double-double polish. Conjugate pairs are symmetrized, and so are `±`
/// pairs when the polynomial is even or odd.
pub fn roots(p: &RealPolynomial) -> Result<RootSet> {
    if p.degree() == 0 {
        return Err(Error::Domain("roots of a constant polynomial".into()));
    }
    let scale = p.scale();
    let mut coeffs = p.coeffs().to_vec();
    let mut found = Vec::with_capacity(p.degree());
    while coeffs.len() > 1 && coeffs[0].abs() < 1e-13 * scale {
        found.push(Complex64::new(0.0, 0.0));
        coeffs.remove(0);
    }
    match coeffs.len() {
        1 => {}
        2 => found.push(Complex64::new(-coeffs[0] / coeffs[1], 0.0)),
        _ => found.extend(aberth::aberth(&Horner { coeffs: &coeffs }, AberthOptions::default())?),
    }
    if p.parity(1e-13).is_some() {
        aberth::symmetrize_negation(&mut found);
    }
    aberth::symmetrize_conjugates(&mut found);
    aberth::sort_roots(&mut found);
    let full = Horner { coeffs: p.coeffs() };
    Ok(RootSet {
        residuals: found.iter().map(|&r| full.residual(r)).collect(),
        residual_scales: found.iter().map(|&r| full.residual_scale(r)).collect(),
        roots: found,
        real_tol: REAL_TOL,
    })
}

/// `det(A − F·I)` evaluated pointwise by the leading-minor recurrence.
pub struct MinorRecurrence<'a> {
    h: &'a ScaledHamiltonian,
}

// keeps |D_k| away from overflow; only ratios and signs are needed
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BY: f64 = 1e-150;

impl<'a> MinorRecurrence<'a> {
    pub fn new(h: &'a ScaledHamiltonian) -> Self {
        Self { h }
    }

    /// `det(A − F·I)` without rescaling.
    pub fn value(&self, f: Complex64) -> Complex64 {
        let mut prev = Complex64::new(0.0, 0.0);
        let mut cur = Complex64::new(1.0, 0.0);
        for &d in self.h.diagonal() {
            let next = (d - f) * cur - prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

impl PolyEval for MinorRecurrence<'_> {
    fn degree(&self) -> usize {
        self.h.dim()
    }

    fn root_radius(&self) -> f64 {
        // Gershgorin: |d_k| plus two unit off-diagonals
        self.h.max_coupling() + 2.0
    }

    fn newton(&self, f: Complex64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p0, mut p1) = (zero, Complex64::new(1.0, 0.0));
        let (mut d0, mut d1) = (zero, zero);
        for &d in self.h.diagonal() {
            let a = d - f;
            let p2 = a * p1 - p0;
            let d2 = a * d1 - p1 - d0;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
            if p1.norm() > RESCALE_ABOVE || d1.norm() > RESCALE_ABOVE {
                p0 *= RESCALE_BY;
                p1 *= RESCALE_BY;
                d0 *= RESCALE_BY;
                d1 *= RESCALE_BY;
            }
        }
        p1 / d1
    }

    fn newton_precise(&self, f: Complex64) -> Complex64 {
        let zero = dd(Complex64::new(0.0, 0.0));
        let fd = dd(f);
        let (mut p0, mut p1) = (zero, dd(Complex64::new(1.0, 0.0)));
        let (mut d0, mut d1) = (zero, zero);
        let shrink = TwoFloat::from(RESCALE_BY);
        for &d in self.h.diagonal() {
            let a = dd(d) - fd;
            let p2 = a * p1 - p0;
            let d2 = a * d1 - p1 - d0;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
            if f64::from(p1.re).abs().max(f64::from(p1.im).abs()) > RESCALE_ABOVE
                || f64::from(d1.re).abs().max(f64::from(d1.im).abs()) > RESCALE_ABOVE
            {
                p0 = p0.scale(shrink);
                p1 = p1.scale(shrink);
                d0 = d0.scale(shrink);
                d1 = d1.scale(shrink);
            }
        }
        undd(p1) / undd(d1)
    }

    fn residual(&self, f: Complex64) -> f64 {
        self.value(f).norm()
    }

    fn residual_scale(&self, f: Complex64) -> f64 {
        let (mut s0, mut s1) = (0.0, 1.0);
        for &d in self.h.diagonal() {
            let s2 = (d.norm() + f.norm()) * s1 + s0;
            s0 = s1;
            s1 = s2;
        }
        s1
    }
}

/// Eigenvalues of a scaled Hamiltonian as roots of its characteristic
/// polynomial, evaluated through [`MinorRecurrence`].
///
/// The purely imaginary diagonal makes the spectrum closed under both
/// conjugation and `F → −F`; both closures are enforced on the result.
pub fn eigenvalue_roots(h: &ScaledHamiltonian) -> Result<RootSet> {
    let eval = MinorRecurrence::new(h);
    let mut found = aberth::aberth(&eval, AberthOptions::default())?;
    aberth::symmetrize_negation(&mut found);
    aberth::symmetrize_conjugates(&mut found);
    aberth::sort_roots(&mut found);
    Ok(RootSet {
        residuals: found.iter().map(|&r| eval.residual(r)).collect(),
        residual_scales: found.iter().map(|&r| eval.residual_scale(r)).collect(),
        roots: found,
        real_tol: REAL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Model, Rational};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_roots(found: &RootSet, expected: &mut [f64], tol: f64) {
        expected.sort_by(f64::total_cmp);
        assert_eq!(found.roots.len(), expected.len());
        for (r, e) in found.roots.iter().zip(expected.iter()) {
            assert!((r - c(*e)).norm() <= tol, "root {r} vs {e}");
        }
    }

    #[test]
    fn weigert_polynomial() {
        for &xi in &[0.0, 0.5, 1.0, 1.7] {
            let h = Model::square_well(4).unwrap().hamiltonian(xi);
            let p = certify_real(&char_poly(&h), 1e-12).unwrap();
            // −F³ − (ξ² − 2)F
            let expected = [0.0, -(xi * xi - 2.0), 0.0, -1.0];
            for (a, b) in p.coeffs().iter().zip(expected) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn certify_rejects_complex_coefficients() {
        let p = ComplexPolynomial::new(vec![c(1.0), Complex64::new(0.0, 1.0)]);
        assert!(matches!(certify_real(&p, 1e-12), Err(Error::PtBroken { .. })));
        let h = Model::shifted_well(8, Rational::new(3, 8)).unwrap().hamiltonian(0.77);
        assert!(certify_real(&char_poly(&h), 1e-12).is_ok());
    }

    #[test]
    fn small_closed_forms() {
        // −F(F² + ξ² − 2) at ξ = 1
        let p = RealPolynomial::new(vec![0.0, 1.0, 0.0, -1.0]);
        assert_roots(&roots(&p).unwrap(), &mut [0.0, 1.0, -1.0], 1e-14);
        let linear = RealPolynomial::new(vec![3.0, -2.0]);
        assert_roots(&roots(&linear).unwrap(), &mut [1.5], 0.0);
        assert!(roots(&RealPolynomial::new(vec![2.0])).is_err());
    }

    #[test]
    fn complex_pair_roots() {
        // F² + 1
        let p = RealPolynomial::new(vec![1.0, 0.0, 1.0]);
        let r = roots(&p).unwrap();
        assert_eq!(r.roots, vec![Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)]);
        assert_eq!(r.is_real(), vec![false, false]);
    }

    #[test]
    fn hermitian_limit_roots() {
        for n in 2..=20 {
            let h = Model::square_well(n).unwrap().hamiltonian(0.0);
            let mut expected: Vec<f64> =
                (1..n).map(|k| -2.0 * (k as f64 * std::f64::consts::PI / n as f64).cos()).collect();
            let coeff = roots(&certify_real(&char_poly(&h), 1e-12).unwrap()).unwrap();
            let implicit = eigenvalue_roots(&h).unwrap();
            assert_roots(&implicit, &mut expected.clone(), 1e-12);
            assert_roots(&coeff, &mut expected, 1e-9);
        }
    }

    #[test]
    fn implicit_route_at_large_dimension() {
        let n = 80;
        let h = Model::square_well(n).unwrap().hamiltonian(0.0);
        let mut expected: Vec<f64> =
            (1..n).map(|k| -2.0 * (k as f64 * std::f64::consts::PI / n as f64).cos()).collect();
        assert_roots(&eigenvalue_roots(&h).unwrap(), &mut expected, 1e-12);
    }

    #[test]
    fn double_root_resolved_to_full_precision() {
        // N = 6 square well at ξ = 1/2: F = ±√(7/4) are double roots
        let h = Model::square_well(6).unwrap().hamiltonian(0.5);
        let r = eigenvalue_roots(&h).unwrap();
        let s = 1.75f64.sqrt();
        let mut expected = [-s, -s, 0.0, s, s];
        assert_roots(&r, &mut expected, 1e-12);
    }

    #[test]
    fn parity_detection() {
        assert_eq!(RealPolynomial::new(vec![0.0, 2.0, 0.0, -1.0]).parity(1e-13), Some(1));
        assert_eq!(RealPolynomial::new(vec![1.0, 0.0, 3.0]).parity(1e-13), Some(0));
        assert_eq!(RealPolynomial::new(vec![1.0, 1.0, 3.0]).parity(1e-13), None);
    }
}
