use num_complex::Complex64;
use ptwell::model::{Model, Rational};
use ptwell::spectral::{critical_coupling, imaginary_axis_crossing, linear_grid, spectrum, sweep, SweepTable};
use ptwell::Error;

fn well(n: usize, p: i64, q: i64) -> Model {
    Model::shifted_well(n, Rational::new(p, q)).unwrap()
}

fn complex_tracks(t: &SweepTable) -> Vec<usize> {
    (0..t.tracks).filter(|&k| t.track(k).iter().any(|r| !r.is_real)).collect()
}

#[test]
fn half_well_six_sites_matches_closed_form() {
    let m = well(6, 1, 2);
    for xi in [0.0, 0.4, 1.0, 1.2, 2.0, 3.5] {
        let s = spectrum(&m, xi).unwrap();
        let root = (4.0 + xi.powi(4)).sqrt();
        let mut expected = vec![Complex64::new(0.0, 0.0)];
        for sign in [-1.0, 1.0] {
            let f = (Complex64::new(8.0 - 2.0 * xi * xi + sign * 2.0 * root, 0.0)).sqrt() / 2.0;
            expected.extend([f, -f]);
        }
        for e in &expected {
            let d = s.eigenvalues.iter().map(|f| (f - e).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "xi={xi}: {e} missing from {:?}", s.eigenvalues);
        }
    }
}

#[test]
fn spectra_past_the_transition() {
    let s = spectrum(&Model::square_well(4).unwrap(), 2.0).unwrap();
    let r2 = 2f64.sqrt();
    let expected = [Complex64::new(0.0, -r2), Complex64::new(0.0, 0.0), Complex64::new(0.0, r2)];
    for (f, e) in s.eigenvalues.iter().zip(&expected) {
        assert!((f - e).norm() < 1e-12, "{f} vs {e}");
    }
    assert_eq!(s.real_count(), 1);
    let s = spectrum(&Model::square_well(3).unwrap(), 0.0).unwrap();
    assert!((s.eigenvalues[0] + 1.0).norm() < 1e-14 && (s.eigenvalues[1] - 1.0).norm() < 1e-14);
}

#[test]
fn sweep_five_eighths_has_one_merger() {
    let t = sweep(&well(8, 5, 8), &linear_grid(0.0, 2.0, 200).unwrap()).unwrap();
    assert_eq!(t.tracks, 7);
    let complex = complex_tracks(&t);
    assert_eq!(complex.len(), 2, "{complex:?}");
    // the merging pair is the symmetric inner pair
    let (a, b) = (t.track(complex[0]), t.track(complex[1]));
    assert!(a[0].re_f.abs() - b[0].re_f.abs() < 1e-12 && a[0].re_f * b[0].re_f < 0.0);
    let first = a.iter().position(|r| !r.is_real).unwrap();
    assert!((a[first].xi - 1.1547).abs() < 0.011);
    for k in (0..7).filter(|k| !complex.contains(k)) {
        assert!(t.track(k).iter().all(|r| r.is_real), "track {k}");
    }
}

#[test]
fn sweep_three_eighths_has_two_mergers_at_one_coupling() {
    let t = sweep(&well(8, 3, 8), &linear_grid(0.0, 1.0, 200).unwrap()).unwrap();
    let complex = complex_tracks(&t);
    assert_eq!(complex.len(), 4, "{complex:?}");
    let onsets: Vec<f64> = complex.iter().map(|&k| t.track(k).iter().find(|r| !r.is_real).unwrap().xi).collect();
    assert!(onsets.iter().all(|&x| x == onsets[0]), "{onsets:?}");
    assert!((onsets[0] - 0.5876).abs() < 0.006);
}

#[test]
fn sweep_tracks_are_continuous() {
    let t = sweep(&well(8, 1, 2), &linear_grid(0.0, 4.0, 80).unwrap()).unwrap();
    let dxi = 4.0 / 80.0;
    for k in 0..t.tracks {
        let tr = t.track(k);
        for w in tr.windows(2) {
            assert!(w[1].xi > w[0].xi);
            let moved = Complex64::new(w[1].re_f - w[0].re_f, w[1].im_f - w[0].im_f).norm();
            assert!(moved <= 4.0 * dxi + 0.05, "track {k} jumps {moved} at xi={}", w[1].xi);
        }
    }
}

#[test]
fn constant_level_on_half_well() {
    let t = sweep(&well(6, 1, 2), &linear_grid(0.0, 3.0, 60).unwrap()).unwrap();
    let zero = (0..t.tracks).find(|&k| t.track(k)[0].re_f.abs() < 1e-12).unwrap();
    for r in t.track(zero) {
        assert!(r.re_f.abs() < 1e-9 && r.im_f.abs() < 1e-9, "xi={}", r.xi);
    }
}

#[test]
fn sweep_is_deterministic() {
    let grid = linear_grid(0.0, 2.0, 50).unwrap();
    let a = sweep(&well(8, 5, 8), &grid).unwrap().to_csv();
    let b = sweep(&well(8, 5, 8), &grid).unwrap().to_csv();
    assert_eq!(a, b);
    assert!(a.starts_with("xi,Z,track,re_F,im_F,re_E,im_E,is_real\n"));
}

#[test]
fn extreme_levels_at_strong_coupling() {
    let s = spectrum(&well(8, 5, 8), 50.0).unwrap();
    let lo = s.eigenvalues.first().unwrap();
    let hi = s.eigenvalues.last().unwrap();
    assert!(lo.im == 0.0 && hi.im == 0.0);
    assert!((hi.re - 3f64.sqrt()).abs() < 0.05 && (lo.re + 3f64.sqrt()).abs() < 0.05, "{lo} {hi}");
}

#[test]
fn robust_level_far_past_the_transition() {
    for n in [4, 6, 8, 12, 16] {
        let m = Model::square_well(n).unwrap();
        let crit = critical_coupling(&m, None, 1e-9).unwrap().xi;
        for xi in linear_grid(0.0, 10.0 * crit, 25).unwrap() {
            let s = spectrum(&m, xi).unwrap();
            assert!(s.eigenvalues.iter().any(|f| f.norm() <= 1e-9), "N={n} xi={xi}");
        }
    }
}

#[test]
fn crossing_at_the_transition_for_four_sites() {
    let r = imaginary_axis_crossing(&Model::square_well(4).unwrap(), 1.5, 3.0, 1e-10).unwrap();
    assert!((r.xi - 2f64.sqrt()).abs() < 1e-8, "{}", r.xi);
}

#[test]
fn no_crossing_in_a_real_regime() {
    let r = imaginary_axis_crossing(&Model::square_well(4).unwrap(), 0.0, 1.0, 1e-10);
    assert!(matches!(r, Err(Error::NotApplicable(_))), "{r:?}");
}

#[test]
fn critical_couplings_of_small_wells() {
    for (n, z) in [(3, 2.25), (4, 4.0 * 2f64.sqrt()), (6, 4.5)] {
        let r = critical_coupling(&Model::square_well(n).unwrap(), None, 1e-9).unwrap();
        assert!((r.z - z).abs() < 1e-7, "N={n}: {}", r.z);
        assert!(r.bracket_width() <= 1e-9);
    }
}
