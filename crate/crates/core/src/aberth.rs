//! Aberth–Ehrlich simultaneous root iteration over any polynomial that can
//! report its Newton ratio `p(z)/p'(z)`.
//!
//! The iteration runs in two phases. The first uses plain `f64` evaluation
//! and stops on convergence or stagnation. The second repeats the Aberth
//! update with the Newton ratio evaluated in double-double arithmetic, which
//! resolves clustered and multiple roots down to `f64` resolution instead of
//! the `√ε` floor of the first phase.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial evaluation needed by [`aberth`].
pub trait PolyEval {
    fn degree(&self) -> usize;

    /// Upper bound on the modulus of every root.
    fn root_radius(&self) -> f64;

    /// `p(z)/p'(z)` in `f64`. Infinite when only `p'(z)` vanishes, NaN when
    /// both do.
    fn newton(&self, z: Complex64) -> Complex64;

    /// `p(z)/p'(z)` with extended-precision evaluation.
    fn newton_precise(&self, z: Complex64) -> Complex64;

    /// `|p(z)|`.
    fn residual(&self, z: Complex64) -> f64;

    /// Size of `|p(z)|` that counts as round-off at `z`: the polynomial
    /// evaluated with every term replaced by its modulus.
    fn residual_scale(&self, z: Complex64) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct AberthOptions {
    pub max_iterations: usize,
    pub polish_iterations: usize,
    /// Convergence when every step is below `step_tol·(1 + |z|)`.
    pub step_tol: f64,
    /// Largest precise Newton ratio, relative to `1 + |z|`, accepted at exit.
    pub settle_tol: f64,
}

impl Default for AberthOptions {
    fn default() -> Self {
        Self { max_iterations: 200, polish_iterations: 60, step_tol: 1e-13, settle_tol: 1e-6 }
    }
}

fn initial_guesses(degree: usize, radius: f64) -> Vec<Complex64> {
    // rotated off the real axis so conjugate-symmetric root sets do not keep
    // the iterates symmetric
    let offset = 0.4;
    (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + offset;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

fn aberth_step(z: &[Complex64], i: usize, ratio: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, zj) in z.iter().enumerate() {
        if j != i {
            let diff = z[i] - zj;
            if diff.norm_sqr() > 0.0 {
                sum += diff.inv();
            }
        }
    }
    if ratio.is_nan() {
        // p(z) = p'(z) = 0: already on a root
        return Complex64::new(0.0, 0.0);
    }
    if ratio.is_finite() {
        let denom = Complex64::new(1.0, 0.0) - ratio * sum;
        if denom.norm_sqr() > 0.0 {
            ratio / denom
        } else {
            ratio
        }
    } else if sum.norm_sqr() > 0.0 {
        // p'(z) = 0: limit of the update as the Newton ratio blows up
        -sum.inv()
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// One Gauss–Seidel sweep; returns the largest relative step.
fn sweep<F: Fn(Complex64) -> Complex64>(z: &mut [Complex64], active: &mut [bool], tol: f64, ratio: F) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..z.len() {
        if !active[i] {
            continue;
        }
        let w = aberth_step(z, i, ratio(z[i]));
        let candidate = z[i] - w;
        if !candidate.is_finite() {
            continue;
        }
        z[i] = candidate;
        let rel = w.norm() / (1.0 + z[i].norm());
        worst = worst.max(rel);
        if rel <= tol {
            active[i] = false;
        }
    }
    worst
}

/// All roots of `p`, in no particular order.
pub fn aberth<P: PolyEval + ?Sized>(p: &P, opts: AberthOptions) -> Result<Vec<Complex64>> {
    let degree = p.degree();
    if degree == 0 {
        return Ok(Vec::new());
    }
    let radius = p.root_radius().max(1e-3);
    let mut z = initial_guesses(degree, radius);

    let mut active = vec![true; degree];
    for _ in 0..opts.max_iterations {
        sweep(&mut z, &mut active, opts.step_tol, |x| p.newton(x));
        if active.iter().all(|a| !a) {
            break;
        }
    }

    // polish every root, converged or not, with the precise ratio
    let mut active = vec![true; degree];
    let mut worst = f64::INFINITY;
    for it in 0..opts.polish_iterations {
        worst = sweep(&mut z, &mut active, opts.step_tol, |x| p.newton_precise(x));
        if it >= 1 && (active.iter().all(|a| !a) || worst <= opts.step_tol) {
            break;
        }
    }
    // a NaN ratio also stops the steps, so every root is re-checked
    let settled = z.iter().all(|&x| {
        let r = p.newton_precise(x);
        r.is_finite() && r.norm() <= opts.settle_tol * (1.0 + x.norm()) || p.residual(x) == 0.0
    });
    if worst <= opts.step_tol && settled {
        return Ok(z);
    }
    Err(Error::NumericFailure { iterations: opts.max_iterations + opts.polish_iterations, max_step: worst, best: z })
}

/// Greedy minimum-distance pairing of roots under an involution `map`.
///
/// Each root `r` is matched either with another root `s ≈ map(r)` or with
/// itself (cost `|r − map(r)|`). Matched pairs are replaced by their
/// symmetric average; self-matched roots are projected onto the fixed set.
fn symmetrize<M, P>(roots: &mut [Complex64], map: M, project: P)
where
    M: Fn(Complex64) -> Complex64,
    P: Fn(Complex64) -> Complex64,
{
    let n = roots.len();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        candidates.push(((roots[i] - map(roots[i])).norm(), i, i));
        for j in i + 1..n {
            candidates.push(((roots[j] - map(roots[i])).norm(), i, j));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut done = vec![false; n];
    for (_, i, j) in candidates {
        if done[i] || done[j] {
            continue;
        }
        if i == j {
            roots[i] = project(roots[i]);
            done[i] = true;
        } else {
            let avg = 0.5 * (roots[i] + map(roots[j]));
            roots[i] = avg;
            roots[j] = map(avg);
            done[i] = true;
            done[j] = true;
        }
    }
}

/// Enforces closure under complex conjugation: matched pairs become exact
/// conjugates, self-matched roots become exactly real.
pub fn symmetrize_conjugates(roots: &mut [Complex64]) {
    symmetrize(roots, |z| z.conj(), |z| Complex64::new(z.re, 0.0));
}

/// Enforces closure under `F → −F`; a self-matched root is set to zero.
pub fn symmetrize_negation(roots: &mut [Complex64]) {
    symmetrize(roots, |z| -z, |_| Complex64::new(0.0, 0.0));
}

/// Sorts by real part, then imaginary part.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}
