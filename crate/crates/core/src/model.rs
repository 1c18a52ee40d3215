//! Lattice, piecewise-constant imaginary potentials and the scaled
//! complex-symmetric tridiagonal eigenproblem.
//!
//! On the grid `x_k = −1 + k·h`, `h = 2/N`, the difference Schrödinger
//! equation with Dirichlet ends becomes `(A − F)ψ = 0` where `A` has
//! diagonal `h²·V(x_k)` for the interior sites `k = 1..N−1` and constant
//! off-diagonal `−1`. Energies and couplings are carried in the scaled
//! variables `F = E·h² − 2` and `ξ = Z·h²`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"p/q"` (or a bare integer) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Domain(format!("not a rational p/q: {s:?}")))
}

/// Equidistant grid on `[−1, 1]` with `N` subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    n: usize,
}

impl Lattice {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("lattice needs N >= 2, got {n}")));
        }
        if n > i32::MAX as usize {
            return Err(Error::Domain(format!("N = {n} too large")));
        }
        Ok(Self { n })
    }

    /// Number of subintervals `N`.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of interior sites, `N − 1`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn spacing(&self) -> f64 {
        2.0 / self.n as f64
    }

    /// `h² = 4/N²`.
    pub fn spacing_sq(&self) -> f64 {
        4.0 / (self.n as f64 * self.n as f64)
    }

    /// `x_k = (2k − N)/N` exactly.
    pub fn point_exact(&self, k: usize) -> Rational {
        Rational::new(2 * k as i64 - self.n as i64, self.n as i64)
    }

    pub fn point(&self, k: usize) -> f64 {
        -1.0 + k as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.point(k)).collect()
    }
}

/// Purely imaginary antisymmetric step potential: `+i·Z_n` on
/// `(−ℓ_n, −ℓ_{n−1})` and `−i·Z_n` on `(ℓ_{n−1}, ℓ_n)`, with
/// `0 = ℓ_0 < ℓ_1 < … < ℓ_{q+1} = 1`.
///
/// A point sitting exactly on an interior breakpoint takes the mean of the
/// two adjacent region values; `x = 0` and `x = ±1` give zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    /// Interior breakpoints `ℓ_1 … ℓ_q`.
    breakpoints: Vec<Rational>,
    /// Strengths `Z_1 … Z_{q+1}`, innermost region first.
    strengths: Vec<f64>,
}

impl PotentialProfile {
    pub fn new(breakpoints: Vec<Rational>, strengths: Vec<f64>) -> Result<Self> {
        if strengths.len() != breakpoints.len() + 1 {
            return Err(Error::Domain(format!(
                "{} breakpoints need {} strengths, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                strengths.len()
            )));
        }
        ensure_finite(&strengths, "strength")?;
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let mut prev = zero;
        for &l in &breakpoints {
            if l <= prev || l >= one {
                return Err(Error::Domain(format!(
                    "breakpoints must satisfy 0 < l_1 < ... < l_q < 1, got {}",
                    fmt_rationals(&breakpoints)
                )));
            }
            prev = l;
        }
        Ok(Self { breakpoints, strengths })
    }

    /// Single-region well, `V = −i·sign(x)·Z`.
    pub fn square_well(z: f64) -> Self {
        Self { breakpoints: Vec::new(), strengths: vec![z] }
    }

    /// Zero potential on `(−ℓ, ℓ)` and `∓i·Z` outside.
    pub fn shifted_well(ell: Rational, z: f64) -> Result<Self> {
        Self::new(vec![ell], vec![0.0, z])
    }

    pub fn q(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// Same breakpoints, strengths multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { breakpoints: self.breakpoints.clone(), strengths: self.strengths.iter().map(|z| z * factor).collect() }
    }

    /// Value of `V` at an exact rational position in `[−1, 1]`.
    pub fn potential_at_exact(&self, x: Rational) -> Complex64 {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let ax = if x < zero { -x } else { x };
        if ax == zero || ax >= one {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if x < zero { 1.0 } else { -1.0 };
        // region n (0-based) is (ℓ_n, ℓ_{n+1}) with ℓ_0 = 0, ℓ_{q+1} = 1
        let mut value = self.strengths[self.breakpoints.len()];
        for (n, &l) in self.breakpoints.iter().enumerate() {
            if ax < l {
                value = self.strengths[n];
                break;
            }
            if ax == l {
                value = 0.5 * (self.strengths[n] + self.strengths[n + 1]);
                break;
            }
        }
        Complex64::new(0.0, sign * value)
    }

    /// Value of `V(x)` for a real position; breakpoints compare exactly
    /// against their nearest `f64`.
    pub fn potential_at(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() || !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [-1, 1]")));
        }
        let ax = x.abs();
        if ax == 0.0 || ax == 1.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let sign = if x < 0.0 { 1.0 } else { -1.0 };
        let mut value = self.strengths[self.breakpoints.len()];
        for (n, l) in self.breakpoints.iter().enumerate() {
            let l = ratio_to_f64(*l);
            if ax < l {
                value = self.strengths[n];
                break;
            }
            if ax == l {
                value = 0.5 * (self.strengths[n] + self.strengths[n + 1]);
                break;
            }
        }
        Ok(Complex64::new(0.0, sign * value))
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn fmt_rationals(ls: &[Rational]) -> String {
    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

/// The scaled matrix `A` of `(A − F)ψ = 0`: purely imaginary diagonal,
/// off-diagonal `−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledHamiltonian {
    lattice: Lattice,
    diagonal: Vec<Complex64>,
}

impl ScaledHamiltonian {
    /// Diagonal taken directly from a profile already expressed in scaled
    /// strengths `ξ_n = Z_n·h²`.
    pub fn from_scaled_profile(lattice: Lattice, scaled: &PotentialProfile) -> Self {
        let diagonal = (1..lattice.intervals()).map(|k| scaled.potential_at_exact(lattice.point_exact(k))).collect();
        Self { lattice, diagonal }
    }

    /// Builds from an explicit diagonal. Entries must be purely imaginary.
    pub fn from_diagonal(lattice: Lattice, diagonal: Vec<Complex64>) -> Result<Self> {
        if diagonal.len() != lattice.dim() {
            return Err(Error::Domain(format!(
                "diagonal length {} does not match dimension {}",
                diagonal.len(),
                lattice.dim()
            )));
        }
        if diagonal.iter().any(|d| d.re != 0.0 || !d.im.is_finite()) {
            return Err(Error::Domain("diagonal must be purely imaginary and finite".into()));
        }
        Ok(Self { lattice, diagonal })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    /// Largest `|d_k|`, a bound on the non-Hermitian part.
    pub fn max_coupling(&self) -> f64 {
        self.diagonal.iter().map(|d| d.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = self.diagonal[k];
            if k + 1 < n {
                m[(k, k + 1)] = Complex64::new(-1.0, 0.0);
                m[(k + 1, k)] = Complex64::new(-1.0, 0.0);
            }
        }
        m
    }

    /// `A·v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut s = self.diagonal[k] * v[k];
                if k > 0 {
                    s -= v[k - 1];
                }
                if k + 1 < n {
                    s -= v[k + 1];
                }
                s
            })
            .collect()
    }
}

/// Assembles the scaled matrix for physical strengths `Z_n` on `N` intervals:
/// diagonal entries `h²·V(x_k)`.
pub fn build_hamiltonian(n: usize, profile: &PotentialProfile) -> Result<ScaledHamiltonian> {
    let lattice = Lattice::new(n)?;
    Ok(ScaledHamiltonian::from_scaled_profile(lattice, &profile.scaled(lattice.spacing_sq())))
}

/// A family of Hamiltonians parametrised by one scaled coupling `ξ`.
///
/// Region strengths are `w_n·ξ` for fixed relative weights `w_n`; the
/// square well has `w = [1]`, the shifted wells `w = [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    lattice: Lattice,
    shape: PotentialProfile,
}

impl Model {
    pub fn new(n: usize, shape: PotentialProfile) -> Result<Self> {
        Ok(Self { lattice: Lattice::new(n)?, shape })
    }

    pub fn square_well(n: usize) -> Result<Self> {
        Self::new(n, PotentialProfile::square_well(1.0))
    }

    pub fn shifted_well(n: usize, ell: Rational) -> Result<Self> {
        Self::new(n, PotentialProfile::shifted_well(ell, 1.0)?)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// `N`.
    pub fn intervals(&self) -> usize {
        self.lattice.intervals()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn shape(&self) -> &PotentialProfile {
        &self.shape
    }

    pub fn hamiltonian(&self, xi: f64) -> ScaledHamiltonian {
        ScaledHamiltonian::from_scaled_profile(self.lattice, &self.shape.scaled(xi))
    }

    pub fn coupling_to_physical(&self, xi: f64) -> f64 {
        coupling_to_physical(xi, self.intervals())
    }

    pub fn coupling_to_scaled(&self, z: f64) -> f64 {
        coupling_to_scaled(z, self.intervals())
    }

    /// Descriptor with the physical strengths at coupling `ξ`.
    pub fn descriptor(&self, xi: f64) -> ModelDescriptor {
        let z = self.coupling_to_physical(xi);
        ModelDescriptor {
            n: self.intervals(),
            q: self.shape.q(),
            ell: self.shape.breakpoints.iter().map(|l| l.to_string()).collect(),
            z: self.shape.strengths.iter().map(|w| w * z).collect(),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={} q={}", self.intervals(), self.shape.q())?;
        if self.shape.q() > 0 {
            write!(f, " ell={}", fmt_rationals(&self.shape.breakpoints))?;
        }
        Ok(())
    }
}

/// JSON form `{"N": 8, "q": 1, "ell": ["5/8"], "Z": [0.0, 4.0]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub ell: Vec<String>,
    #[serde(rename = "Z")]
    pub z: Vec<f64>,
}

impl ModelDescriptor {
    /// Physical profile described by this descriptor.
    ///
    /// A single strength with `q ≥ 1` is read as the outermost region's
    /// strength with zero in all inner regions.
    pub fn profile(&self) -> Result<PotentialProfile> {
        let ell = self.ell.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if ell.len() != self.q {
            return Err(Error::Domain(format!("q = {} but {} breakpoints given", self.q, ell.len())));
        }
        let strengths = if self.z.len() == 1 && self.q > 0 {
            let mut s = vec![0.0; self.q + 1];
            s[self.q] = self.z[0];
            s
        } else {
            self.z.clone()
        };
        PotentialProfile::new(ell, strengths)
    }

    /// Splits into a one-parameter model plus its physical coupling `Z`
    /// (the largest strength magnitude).
    pub fn to_model(&self) -> Result<(Model, f64)> {
        let profile = self.profile()?;
        let z = profile.strengths().iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        let shape = if z > 0.0 {
            profile.scaled(1.0 / z)
        } else {
            let mut w = vec![0.0; profile.q() + 1];
            w[profile.q()] = 1.0;
            PotentialProfile::new(profile.breakpoints().to_vec(), w)?
        };
        Ok((Model::new(self.n, shape)?, z))
    }
}

/// Scaled and physical energy of one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPair {
    pub scaled: Complex64,
    pub physical: Complex64,
}

/// `E = (F + 2)·N²/4`.
pub fn to_physical(f: Complex64, n: usize) -> EnergyPair {
    let n2 = (n * n) as f64;
    EnergyPair { scaled: f, physical: (f + 2.0) * n2 / 4.0 }
}

/// `F = 4E/N² − 2`.
pub fn to_scaled(e: Complex64, n: usize) -> Complex64 {
    e * 4.0 / (n * n) as f64 - 2.0
}

/// `Z = ξ·N²/4`.
pub fn coupling_to_physical(xi: f64, n: usize) -> f64 {
    xi * (n * n) as f64 / 4.0
}

/// `ξ = 4Z/N²`.
pub fn coupling_to_scaled(z: f64, n: usize) -> f64 {
    z * 4.0 / (n * n) as f64
}

/// Anti-diagonal reflection of a vector.
pub fn reflect<T: Copy>(v: &[T]) -> Vec<T> {
    v.iter().rev().copied().collect()
}
