//! Spectra, parameter sweeps with eigenvalue tracking, and location of the
//! couplings where the spectrum changes character.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charpoly::{certify_real, char_poly, eigenvalue_roots, is_real, REAL_TOL};
use crate::error::{ensure_finite, Error, Result};
use crate::model::{coupling_to_physical, to_physical, Model, ModelDescriptor};
use crate::secular::Parity;
use crate::tracking::{match_values, max_movement};

/// Default bracket width for critical couplings, in `ξ`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Eigenvalues of one model at one coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub descriptor: ModelDescriptor,
    pub xi: f64,
    /// Physical coupling `Z = ξ·N²/4`.
    pub z: f64,
    /// Scaled eigenvalues `F`, sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub is_real: Vec<bool>,
    /// Physical energies `E = (F + 2)·N²/4`.
    pub energies: Vec<Complex64>,
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    #[serde(flatten)]
    descriptor: &'a ModelDescriptor,
    xi: f64,
    eigenvalues: Vec<ReIm>,
    is_real: &'a [bool],
    energies: Vec<ReIm>,
}

impl Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumJson {
            descriptor: &self.descriptor,
            xi: self.xi,
            eigenvalues: self.eigenvalues.iter().map(|&f| f.into()).collect(),
            is_real: &self.is_real,
            energies: self.energies.iter().map(|&e| e.into()).collect(),
        }
        .serialize(s)
    }
}

pub const SPECTRUM_CSV_HEADER: &str = "xi,Z,re_F,im_F,re_E,im_E,is_real";

impl Spectrum {
    pub fn all_real(&self) -> bool {
        self.is_real.iter().all(|&r| r)
    }

    pub fn real_count(&self) -> usize {
        self.is_real.iter().filter(|&&r| r).count()
    }

    /// Non-real eigenvalues whose real part is zero within the realness
    /// tolerance.
    pub fn imaginary_count(&self) -> usize {
        self.eigenvalues.iter().zip(&self.is_real).filter(|(f, &r)| !r && on_imaginary_axis(**f)).count()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().zip(&self.is_real).filter(|(_, &r)| r).map(|(f, _)| f.re).collect()
    }

    /// CSV with columns `xi,Z,re_F,im_F,re_E,im_E,is_real`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SPECTRUM_CSV_HEADER);
        out.push('\n');
        for ((f, e), r) in self.eigenvalues.iter().zip(&self.energies).zip(&self.is_real) {
            out.push_str(&format!("{:?},{:?},{:?},{:?},{:?},{:?},{}\n", self.xi, self.z, f.re, f.im, e.re, e.im, r));
        }
        out
    }
}

fn on_imaginary_axis(f: Complex64) -> bool {
    f.re.abs() <= REAL_TOL * f.norm().max(1.0)
}

// beyond this the expanded coefficients lose their imaginary cancellation
// to round-off
const CERTIFY_MAX_DIM: usize = 24;

/// Spectrum at coupling `ξ`.
///
/// The matrix is checked for exact PT symmetry, `d_{m−1−k} = conj(d_k)`, and
/// at small dimension its characteristic polynomial is certified real.
pub fn spectrum(model: &Model, xi: f64) -> Result<Spectrum> {
    ensure_finite(&[xi], "coupling")?;
    let h = model.hamiltonian(xi);
    let d = h.diagonal();
    let defect = d.iter().zip(d.iter().rev()).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max);
    if defect > 0.0 {
        return Err(Error::PtBroken { defect, allowed: 0.0 });
    }
    if h.dim() <= CERTIFY_MAX_DIM {
        certify_real(&char_poly(&h), 1e-12)?;
    }
    let roots = eigenvalue_roots(&h)?;
    let n = model.intervals();
    Ok(Spectrum {
        descriptor: model.descriptor(xi),
        xi,
        z: coupling_to_physical(xi, n),
        is_real: roots.roots.iter().map(|&f| is_real(f)).collect(),
        energies: roots.roots.iter().map(|&f| to_physical(f, n).physical).collect(),
        eigenvalues: roots.roots,
    })
}

/// One row of a sweep: the eigenvalue on `track` at coupling `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub xi: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub track: usize,
    pub re_f: f64,
    pub im_f: f64,
    pub re_e: f64,
    pub im_e: f64,
    pub is_real: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub model: ModelDescriptor,
    pub tracks: usize,
    /// Extra couplings evaluated between grid points to keep tracks continuous.
    pub refinements: usize,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "xi,Z,track,re_F,im_F,re_E,im_E,is_real";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{:?},{:?},{},{:?},{:?},{:?},{:?},{}\n",
                r.xi, r.z, r.track, r.re_f, r.im_f, r.re_e, r.im_e, r.is_real
            ));
        }
        out
    }

    /// Values of one track in grid order.
    pub fn track(&self, index: usize) -> Vec<SweepRow> {
        self.rows.iter().filter(|r| r.track == index).copied().collect()
    }
}

const MAX_REFINE_DEPTH: usize = 8;
const TRACK_SAFETY: f64 = 1e-3;

struct Tracker<'a> {
    model: &'a Model,
    refinements: usize,
}

impl Tracker<'_> {
    /// Continues the track-ordered values `cur` at `a` to `next` at `b`,
    /// subdividing `[a, b]` while some track moves further than `4·Δξ` plus
    /// a safety margin.
    fn advance(
        &mut self,
        cur: &[Complex64],
        a: f64,
        b: f64,
        next: &[Complex64],
        depth: usize,
    ) -> Result<Vec<Complex64>> {
        let assignment = match_values(cur, next);
        let moved = max_movement(cur, next, &assignment);
        if moved > 4.0 * (b - a) + TRACK_SAFETY && depth < MAX_REFINE_DEPTH {
            let mid = 0.5 * (a + b);
            self.refinements += 1;
            let mid_values = spectrum(self.model, mid)?.eigenvalues;
            let at_mid = self.advance(cur, a, mid, &mid_values, depth + 1)?;
            return self.advance(&at_mid, mid, b, next, depth + 1);
        }
        Ok(assignment.iter().map(|&j| next[j]).collect())
    }
}

/// Spectra on a strictly increasing grid with eigenvalues joined into
/// tracks by nearest-neighbour continuation.
pub fn sweep(model: &Model, grid: &[f64]) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Domain("empty coupling grid".into()));
    }
    ensure_finite(grid, "coupling grid")?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("coupling grid must be strictly increasing".into()));
    }
    let spectra: Vec<Spectrum> = grid.par_iter().map(|&xi| spectrum(model, xi)).collect::<Result<_>>()?;
    let n = model.intervals();
    let tracks = model.dim();
    let mut tracker = Tracker { model, refinements: 0 };
    let mut rows = Vec::with_capacity(grid.len() * tracks);
    let mut cur = spectra[0].eigenvalues.clone();
    for (k, s) in spectra.iter().enumerate() {
        if k > 0 {
            cur = tracker.advance(&cur, grid[k - 1], grid[k], &s.eigenvalues, 0)?;
        }
        for (track, &f) in cur.iter().enumerate() {
            let e = to_physical(f, n).physical;
            rows.push(SweepRow {
                xi: s.xi,
                z: s.z,
                track,
                re_f: f.re,
                im_f: f.im,
                re_e: e.re,
                im_e: e.im,
                is_real: is_real(f),
            });
        }
    }
    Ok(SweepTable { model: model.descriptor(0.0), tracks, refinements: tracker.refinements, rows })
}

/// `steps + 1` equally spaced points from `from` to `to`.
pub fn linear_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    ensure_finite(&[from, to], "grid bounds")?;
    if steps == 0 {
        return Err(Error::Domain("grid needs at least one step".into()));
    }
    if to <= from {
        return Err(Error::Domain(format!("grid end {to} must exceed start {from}")));
    }
    Ok((0..=steps).map(|i| from + (to - from) * i as f64 / steps as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    FirstComplexification,
    PairMerger,
    ImaginaryAxisCrossing,
}

/// A located change in the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalReport {
    pub kind: EventKind,
    #[serde(rename = "N")]
    pub n: usize,
    /// Bracket midpoint.
    pub xi: f64,
    pub bracket: (f64, f64),
    #[serde(rename = "Z")]
    pub z: f64,
    /// Pairs of eigenvalues that merge (or leave the real axis) across the
    /// bracket.
    pub merging_pairs: usize,
    /// Event locations in `F`: merger points for mergers, the crossing
    /// values for imaginary-axis crossings.
    #[serde(serialize_with = "serialize_values")]
    pub values: Vec<Complex64>,
}

fn serialize_values<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|&z| ReIm::from(z)))
}

impl CriticalReport {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn scan<T: Send, F: Fn(f64) -> Result<T> + Sync>(lo: f64, hi: f64, points: usize, f: F) -> Result<Vec<(f64, T)>> {
    (0..points)
        .into_par_iter()
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            f(x).map(|v| (x, v))
        })
        .collect()
}

/// Shrinks `[a, b]` until narrower than `tol`, keeping `keep(a)` true and
/// `keep(b)` false.
fn bisect<P: Fn(f64) -> Result<bool>>(mut a: f64, mut b: f64, tol: f64, keep: P) -> Result<(f64, f64)> {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if keep(m)? {
            a = m;
        } else {
            b = m;
        }
    }
    Ok((a, b))
}

/// Midpoints of eigenvalues that are real on one side of a bracket and
/// non-real on the other, paired in order along the real axis.
fn merger_points(real_side: &Spectrum, complex_side: &Spectrum) -> Vec<Complex64> {
    let assignment = match_values(&real_side.eigenvalues, &complex_side.eigenvalues);
    let mut lost: Vec<f64> = (0..real_side.eigenvalues.len())
        .filter(|&i| real_side.is_real[i] && !complex_side.is_real[assignment[i]])
        .map(|i| real_side.eigenvalues[i].re)
        .collect();
    lost.sort_by(f64::total_cmp);
    lost.chunks(2).map(|c| Complex64::new(c.iter().sum::<f64>() / c.len() as f64, 0.0)).collect()
}

const COARSE_POINTS: usize = 64;
const COARSE_RANGE: f64 = 8.0;
const SCAN_POINTS: usize = 257;

/// Default upper end for critical searches: four times the first coupling
/// at which a coarse scan of `[0, 8]` sees a non-real eigenvalue.
pub fn default_xi_max(model: &Model) -> Result<f64> {
    let coarse = scan(0.0, COARSE_RANGE, COARSE_POINTS, |xi| Ok(spectrum(model, xi)?.all_real()))?;
    coarse
        .iter()
        .find(|(_, real)| !real)
        .map(|(xi, _)| 4.0 * xi)
        .ok_or(Error::NoTransition { lo: 0.0, hi: COARSE_RANGE })
}

/// Smallest coupling in `[0, ξ_max]` at which the spectrum stops being
/// entirely real, bracketed to `tol`.
///
/// The range is scanned first and only the earliest cell with a flip is
/// bisected, so windows of restored reality further up do not matter.
pub fn critical_coupling(model: &Model, xi_max: Option<f64>, tol: f64) -> Result<CriticalReport> {
    check_tol(tol)?;
    let xi_max = match xi_max {
        Some(x) => {
            ensure_finite(&[x], "xi_max")?;
            if x <= 0.0 {
                return Err(Error::Domain(format!("xi_max must be positive, got {x}")));
            }
            x
        }
        None => default_xi_max(model)?,
    };
    if !spectrum(model, 0.0)?.all_real() {
        return Err(Error::Domain("spectrum is not real at xi = 0".into()));
    }
    let real = |xi: f64| Ok(spectrum(model, xi)?.all_real());
    let grid = scan(0.0, xi_max, SCAN_POINTS, real)?;
    let cell = grid
        .windows(2)
        .find(|w| w[0].1 && !w[1].1)
        .map(|w| (w[0].0, w[1].0))
        .ok_or(Error::NoTransition { lo: 0.0, hi: xi_max })?;
    let (lo, hi) = bisect(cell.0, cell.1, tol, real)?;
    let (below, above) = (spectrum(model, lo)?, spectrum(model, hi)?);
    if !below.all_real() || above.all_real() {
        return Err(Error::Inconsistent(format!("bracket [{lo}, {hi}] does not straddle the transition")));
    }
    let values = merger_points(&below, &above);
    let xi = 0.5 * (lo + hi);
    Ok(CriticalReport {
        kind: EventKind::FirstComplexification,
        n: model.intervals(),
        xi,
        bracket: (lo, hi),
        z: coupling_to_physical(xi, model.intervals()),
        merging_pairs: (model.dim() - above.real_count()) / 2,
        values,
    })
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    ensure_finite(&[lo, hi], "coupling range")?;
    if hi <= lo || lo < 0.0 {
        return Err(Error::Domain(format!("invalid coupling range [{lo}, {hi}]")));
    }
    Ok(())
}

/// Every coupling in `[lo, hi]` where the number of real eigenvalues
/// changes, each bracketed to `tol`.
pub fn exceptional_points(model: &Model, lo: f64, hi: f64, tol: f64) -> Result<Vec<CriticalReport>> {
    check_range(lo, hi)?;
    check_tol(tol)?;
    let count = |xi: f64| Ok(spectrum(model, xi)?.real_count());
    let grid = scan(lo, hi, SCAN_POINTS, count)?;
    let mut events = Vec::new();
    for w in grid.windows(2) {
        let ((a, ca), (b, cb)) = (w[0], w[1]);
        if ca == cb {
            continue;
        }
        let (l, r) = bisect(a, b, tol, |xi| Ok(count(xi)? == ca))?;
        let (left, right) = (spectrum(model, l)?, spectrum(model, r)?);
        if left.real_count() != ca || right.real_count() == ca {
            return Err(Error::Inconsistent(format!("bracket [{l}, {r}] does not straddle the event")));
        }
        let (real_side, complex_side) =
            if left.real_count() > right.real_count() { (&left, &right) } else { (&right, &left) };
        let xi = 0.5 * (l + r);
        events.push(CriticalReport {
            kind: EventKind::PairMerger,
            n: model.intervals(),
            xi,
            bracket: (l, r),
            z: coupling_to_physical(xi, model.intervals()),
            merging_pairs: real_side.real_count().abs_diff(complex_side.real_count()) / 2,
            values: merger_points(real_side, complex_side),
        });
    }
    Ok(events)
}

/// First coupling in `[lo, hi]` at which a complex pair reaches the
/// imaginary axis, i.e. where the number of purely imaginary eigenvalues
/// grows.
///
/// When purely imaginary eigenvalues are already present at `lo`, the
/// search moves to `[0, lo]` and reports where they first appeared.
pub fn imaginary_axis_crossing(model: &Model, lo: f64, hi: f64, tol: f64) -> Result<CriticalReport> {
    check_range(lo, hi)?;
    check_tol(tol)?;
    let count = |xi: f64| Ok(spectrum(model, xi)?.imaginary_count());
    let (from, to) = if count(lo)? > 0 { (0.0, lo) } else { (lo, hi) };
    let grid = scan(from, to, SCAN_POINTS, count)?;
    let cell = grid.windows(2).find(|w| w[1].1 > w[0].1).map(|w| (w[0].0, w[1].0, w[0].1));
    let Some((a, b, base)) = cell else {
        return Err(Error::NotApplicable(format!("no complex pair reaches the imaginary axis on [{lo}, {hi}]")));
    };
    let (l, r) = bisect(a, b, tol, |xi| Ok(count(xi)? <= base))?;
    let (before, after) = (spectrum(model, l)?, spectrum(model, r)?);
    if before.imaginary_count() > base || after.imaginary_count() <= base {
        return Err(Error::Inconsistent(format!("bracket [{l}, {r}] does not straddle the crossing")));
    }
    // crossing value: the approaching pair on the near side, else the new
    // imaginary pair on the far side
    let approaching = before
        .eigenvalues
        .iter()
        .filter(|f| f.im > 0.0 && !on_imaginary_axis(**f))
        .min_by(|a, b| a.re.abs().total_cmp(&b.re.abs()));
    let im = match approaching {
        Some(f) => f.im,
        None => after
            .eigenvalues
            .iter()
            .filter(|f| f.im > 0.0 && on_imaginary_axis(**f))
            .map(|f| f.im)
            .fold(f64::INFINITY, f64::min),
    };
    let xi = 0.5 * (l + r);
    Ok(CriticalReport {
        kind: EventKind::ImaginaryAxisCrossing,
        n: model.intervals(),
        xi,
        bracket: (l, r),
        z: coupling_to_physical(xi, model.intervals()),
        merging_pairs: (after.imaginary_count() - base) / 2,
        values: vec![Complex64::new(0.0, im), Complex64::new(0.0, -im)],
    })
}

/// One row of a critical-coupling table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub parity: &'static str,
    pub xi_crit: f64,
    #[serde(rename = "Z_crit")]
    pub z_crit: f64,
    pub bracket_width: f64,
}

pub const CRITICAL_CSV_HEADER: &str = "N,parity,xi_crit,Z_crit,bracket_width";

pub fn critical_rows_csv(rows: &[CriticalRow]) -> String {
    let mut out = String::from(CRITICAL_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{:?},{:?},{:?}\n", r.n, r.parity, r.xi_crit, r.z_crit, r.bracket_width));
    }
    out
}

impl CriticalRow {
    pub fn from_report(report: &CriticalReport) -> Self {
        Self {
            n: report.n,
            parity: Parity::of(report.n).name(),
            xi_crit: report.xi,
            z_crit: report.z,
            bracket_width: report.bracket_width(),
        }
    }
}

/// Critical couplings of square wells for each `N`, in input order.
pub fn critical_table(n_list: &[usize], tol: f64) -> Result<Vec<CriticalRow>> {
    n_list
        .par_iter()
        .map(|&n| {
            if n < 3 {
                return Err(Error::Domain(format!("critical table needs N >= 3, got {n}")));
            }
            let model = Model::square_well(n)?;
            critical_coupling(&model, None, tol).map(|r| CriticalRow::from_report(&r))
        })
        .collect()
}

/// Lowest physical energy of the free square well against `π²/4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuumRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub e1: f64,
    pub error: f64,
    /// Whether the spectrum at the probe coupling is entirely real.
    pub real_at_probe: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuumReport {
    #[serde(rename = "Z_probe")]
    pub z_probe: f64,
    pub rows: Vec<ContinuumRow>,
    /// `error(N_{k+1}) / error(N_k)` for consecutive entries.
    pub ratios: Vec<f64>,
}

/// Lowest level at `Z = 0` against the continuum value `π²/4`, and
/// reality of the whole spectrum at physical coupling `z_probe`.
pub fn continuum_check(n_list: &[usize], z_probe: f64) -> Result<ContinuumReport> {
    ensure_finite(&[z_probe], "probe coupling")?;
    let exact = std::f64::consts::PI.powi(2) / 4.0;
    let rows: Vec<ContinuumRow> = n_list
        .par_iter()
        .map(|&n| {
            let model = Model::square_well(n)?;
            let free = spectrum(&model, 0.0)?;
            let e1 = free.energies.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
            let probe = spectrum(&model, model.coupling_to_scaled(z_probe))?;
            Ok(ContinuumRow { n, e1, error: (e1 - exact).abs(), real_at_probe: probe.all_real() })
        })
        .collect::<Result<_>>()?;
    let ratios = rows.windows(2).map(|w| w[1].error / w[0].error).collect();
    Ok(ContinuumReport { z_probe, rows, ratios })
}
