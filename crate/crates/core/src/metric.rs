//! Biorthogonal eigenbasis of the complex-symmetric Hamiltonian and the
//! metric `Θ = Σ θ_n |n⟩⟩⟨⟨n|` that makes it quasi-Hermitian.
//!
//! Because `A = Aᵀ`, the left eigenvector belonging to a right eigenvector
//! `v` is `v` itself read as a row, so `|n⟩⟩ = conj(v_n)` and the pairing
//! `⟨⟨m|n⟩` is the unconjugated product `v_mᵀ v_n`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Model, ScaledHamiltonian};
use crate::spectral::spectrum;

/// Eigenvalue gaps at or below this are treated as an exceptional point.
pub const DEGENERACY_GAP: f64 = 1e-8;

const RESIDUAL_ACCEPT: f64 = 1e-11;
const SEED: u64 = 0x005e_ed0f_7e7a;

/// Right eigenvectors normalized to `v_nᵀ v_n = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalBasis {
    pub eigenvalues: Vec<Complex64>,
    /// Column `n` is `|n⟩`.
    pub right: DMatrix<Complex64>,
    /// `v_nᵀ v_n` before normalization, relative to `‖v_n‖²`.
    pub pairings: Vec<Complex64>,
}

impl BiorthogonalBasis {
    pub fn dim(&self) -> usize {
        self.right.nrows()
    }

    /// `|n⟩⟩ = conj(|n⟩)`, as columns.
    pub fn left(&self) -> DMatrix<Complex64> {
        self.right.map(|z| z.conj())
    }

    /// `max_{m≠n} |⟨⟨m|n⟩|` and `max_n |⟨⟨n|n⟩ − 1|`.
    pub fn biorthogonality_defect(&self) -> (f64, f64) {
        let gram = self.right.transpose() * &self.right;
        let mut off = 0.0_f64;
        let mut diag = 0.0_f64;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                if i == j {
                    diag = diag.max((gram[(i, j)] - 1.0).norm());
                } else {
                    off = off.max(gram[(i, j)].norm());
                }
            }
        }
        (off, diag)
    }

    /// `‖Σ_n |n⟩⟨⟨n| − I‖_max`.
    pub fn completeness_defect(&self) -> f64 {
        let sum = &self.right * self.right.transpose();
        (sum - DMatrix::identity(self.dim(), self.dim())).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖Σ_n E_n |n⟩⟨⟨n| − H‖_max`.
    pub fn reconstruction_defect(&self, h: &DMatrix<Complex64>) -> f64 {
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.right[(i, j)] * self.eigenvalues[j]);
        (scaled * self.right.transpose() - h).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_n ‖⟨⟨n|H − E_n⟨⟨n|‖_max`, with `⟨⟨n|` the row `v_nᵀ`.
    pub fn left_residual(&self, h: &DMatrix<Complex64>) -> f64 {
        (0..self.dim())
            .map(|n| {
                let row = self.right.column(n).transpose();
                (&row * h - row * self.eigenvalues[n]).iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Solves a tridiagonal system with unit off-diagonals `−1` and the given
/// diagonal, by Gaussian elimination with partial pivoting.
fn solve_tridiagonal(diag: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let minus_one = Complex64::new(-1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut d = diag.to_vec();
    let mut du = vec![minus_one; n.saturating_sub(1)];
    let mut du2 = vec![zero; n.saturating_sub(1)];
    let mut b = rhs.to_vec();
    let tiny = f64::EPSILON * diag.iter().map(|x| x.norm()).fold(2.0, f64::max);
    for i in 0..n.saturating_sub(1) {
        let sub = minus_one;
        if d[i].norm() >= sub.norm() {
            let fact = sub / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] = b[i + 1] - fact * b[i];
        } else {
            let fact = d[i] / sub;
            d[i] = sub;
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
    }
    if n > 0 && d[n - 1].norm() == 0.0 {
        d[n - 1] = Complex64::new(tiny, 0.0);
    }
    let mut x = vec![zero; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    x
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Right eigenvector for eigenvalue `lambda` by inverse iteration from a
/// seeded random start.
fn inverse_iteration(h: &ScaledHamiltonian, lambda: Complex64, index: usize) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(index as u64));
    let mut v: Vec<Complex64> =
        (0..h.dim()).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let shifted: Vec<Complex64> = h.diagonal().iter().map(|d| d - lambda).collect();
    let accept = RESIDUAL_ACCEPT * (2.0 + h.max_coupling());
    let mut residual = f64::INFINITY;
    for it in 0..8 {
        let x = solve_tridiagonal(&shifted, &v);
        let norm = max_norm(&x);
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        v = x.iter().map(|z| z / norm).collect();
        let av = h.apply(&v);
        residual = av.iter().zip(&v).map(|(a, x)| (a - lambda * x).norm()).fold(0.0, f64::max);
        if it >= 1 && residual <= accept {
            return Ok(v);
        }
    }
    Err(Error::NumericFailure { iterations: 8, max_step: residual, best: vec![lambda] })
}

/// Biorthogonal basis of the model at coupling `ξ`.
pub fn biorthogonalize(model: &Model, xi: f64) -> Result<BiorthogonalBasis> {
    let levels = spectrum(model, xi)?;
    basis_for(&model.hamiltonian(xi), &levels.eigenvalues)
}

/// Biorthogonal basis for known eigenvalues of `h`.
pub fn basis_for(h: &ScaledHamiltonian, eigenvalues: &[Complex64]) -> Result<BiorthogonalBasis> {
    for i in 0..eigenvalues.len() {
        for j in i + 1..eigenvalues.len() {
            let gap = (eigenvalues[i] - eigenvalues[j]).norm();
            if gap <= DEGENERACY_GAP {
                return Err(Error::Degenerate { first: eigenvalues[i], second: eigenvalues[j], gap });
            }
        }
    }
    let dim = h.dim();
    let mut right = DMatrix::<Complex64>::zeros(dim, dim);
    let mut pairings = Vec::with_capacity(dim);
    for (n, &lambda) in eigenvalues.iter().enumerate() {
        let v = match inverse_iteration(h, lambda, n) {
            Ok(v) => v,
            // stalling happens at a nearly defective eigenvalue
            Err(Error::NumericFailure { .. }) => {
                let (second, gap) = eigenvalues
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != n)
                    .map(|(_, &mu)| (mu, (mu - lambda).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap_or((lambda, 0.0));
                return Err(Error::Degenerate { first: lambda, second, gap });
            }
            Err(e) => return Err(e),
        };
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let pairing: Complex64 = v.iter().map(|z| z * z).sum();
        let relative = pairing / norm_sq;
        if relative.norm() <= DEGENERACY_GAP {
            return Err(Error::Degenerate { first: lambda, second: lambda, gap: relative.norm() });
        }
        let scale = pairing.sqrt();
        for (k, z) in v.iter().enumerate() {
            right[(k, n)] = z / scale;
        }
        pairings.push(relative);
    }
    Ok(BiorthogonalBasis { eigenvalues: eigenvalues.to_vec(), right, pairings })
}

/// Hermitian metric with its weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    pub theta: DMatrix<Complex64>,
    pub weights: Vec<f64>,
    /// `‖Θ − Θ†‖_max` before symmetrization.
    pub hermiticity_defect: f64,
}

impl MetricMatrix {
    /// Positive definiteness via Cholesky factorization.
    pub fn is_positive_definite(&self) -> bool {
        is_positive_definite(&self.theta)
    }
}

pub fn is_positive_definite(m: &DMatrix<Complex64>) -> bool {
    m.clone().cholesky().is_some()
}

/// `Θ = Σ θ_n |n⟩⟩⟨⟨n|`, then `Θ ← (Θ + Θ†)/2`.
pub fn build_metric(basis: &BiorthogonalBasis, weights: &[f64]) -> Result<MetricMatrix> {
    let dim = basis.dim();
    if weights.len() != dim {
        return Err(Error::Domain(format!("expected {dim} weights, got {}", weights.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::Domain(format!("weights must be positive, got {w}")));
    }
    let left = basis.left();
    let weighted = DMatrix::from_fn(dim, dim, |i, j| left[(i, j)] * weights[j]);
    let theta = weighted * basis.right.transpose();
    let adjoint = theta.adjoint();
    let hermiticity_defect = (&theta - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let theta = (theta + adjoint) * Complex64::new(0.5, 0.0);
    Ok(MetricMatrix { theta, weights: weights.to_vec(), hermiticity_defect })
}

/// `‖H†Θ − ΘH‖_max / ‖Θ‖_max`.
pub fn verify_quasi_hermiticity(h: &DMatrix<Complex64>, theta: &DMatrix<Complex64>) -> Result<f64> {
    if h.shape() != theta.shape() || h.nrows() != h.ncols() {
        return Err(Error::Domain(format!("shapes {:?} and {:?} do not conform", h.shape(), theta.shape())));
    }
    let scale = theta.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Domain("zero metric".into()));
    }
    Ok((h.adjoint() * theta - theta * h).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale)
}

/// Anti-diagonal permutation `P`, `(Pv)_k = v_{d−1−k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParityMatrix {
    pub dim: usize,
}

impl ParityMatrix {
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            if i + j + 1 == self.dim {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `P·M·P`.
    pub fn conjugate(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |i, j| m[(d - 1 - i, d - 1 - j)])
    }
}

/// `‖H† − P·H·P‖_max`.
pub fn verify_pseudo_hermiticity(h: &DMatrix<Complex64>) -> f64 {
    let p = ParityMatrix { dim: h.nrows() };
    (h.adjoint() - p.conjugate(h)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Metric with its verification figures.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub xi: f64,
    pub eigenvalues: Vec<Complex64>,
    pub metric: MetricMatrix,
    pub quasi_residual: f64,
    pub pseudo_residual: f64,
    pub positive_definite: bool,
    pub completeness_defect: f64,
}

#[derive(Serialize)]
struct MetricJson<'a> {
    xi: f64,
    eigenvalues: Vec<crate::spectral::ReIm>,
    weights: &'a [f64],
    theta: Vec<Vec<[f64; 2]>>,
    quasi_hermiticity_residual: f64,
    pseudo_hermiticity_residual: f64,
    hermiticity_defect: f64,
    positive_definite: bool,
    completeness_defect: f64,
}

impl Serialize for MetricReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let t = &self.metric.theta;
        MetricJson {
            xi: self.xi,
            eigenvalues: self.eigenvalues.iter().map(|&z| z.into()).collect(),
            weights: &self.metric.weights,
            theta: (0..t.nrows()).map(|i| (0..t.ncols()).map(|j| [t[(i, j)].re, t[(i, j)].im]).collect()).collect(),
            quasi_hermiticity_residual: self.quasi_residual,
            pseudo_hermiticity_residual: self.pseudo_residual,
            hermiticity_defect: self.metric.hermiticity_defect,
            positive_definite: self.positive_definite,
            completeness_defect: self.completeness_defect,
        }
        .serialize(s)
    }
}

/// Metric for the model at `ξ` with weights `θ_n` (all ones by default).
///
/// Refuses with [`Error::NonConstructible`] when any eigenvalue is non-real
/// and with [`Error::Degenerate`] at an exceptional point.
pub fn construct_metric(model: &Model, xi: f64, weights: Option<&[f64]>) -> Result<MetricReport> {
    let levels = spectrum(model, xi)?;
    if !levels.all_real() {
        let worst = levels.eigenvalues.iter().map(|f| f.im.abs()).fold(0.0, f64::max);
        return Err(Error::NonConstructible(format!(
            "{} of {} eigenvalues are non-real at xi={xi} (max |Im F| = {worst:.3e})",
            levels.eigenvalues.len() - levels.real_count(),
            levels.eigenvalues.len()
        )));
    }
    let h = model.hamiltonian(xi);
    let basis = basis_for(&h, &levels.eigenvalues)?;
    let ones = vec![1.0; basis.dim()];
    let metric = build_metric(&basis, weights.unwrap_or(&ones))?;
    let dense = h.to_dense();
    Ok(MetricReport {
        xi,
        eigenvalues: levels.eigenvalues,
        quasi_residual: verify_quasi_hermiticity(&dense, &metric.theta)?,
        pseudo_residual: verify_pseudo_hermiticity(&dense),
        positive_definite: metric.is_positive_definite(),
        completeness_defect: basis.completeness_defect(),
        metric,
    })
}
