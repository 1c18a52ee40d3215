use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use ptwell::charpoly::{certify_real, char_poly, eigenvalue_roots, roots};
use ptwell::model::{Model, Rational};
use ptwell::realform::{real_null_vector, real_system_determinant, verify_matrix_chebyshev};
use ptwell::secular::{block_size, matching_eigenvector, secular_zeros, trig_map, trig_residual, Parity};
use ptwell::spectral::spectrum;
use ptwell::tracking::hungarian;

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.len();
    assert_eq!(n, b.len());
    let cost: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x - y).norm())).collect();
    let col = hungarian(&cost, n);
    (0..n).map(|i| cost[i * n + col[i]]).fold(0.0, f64::max)
}

fn dense_eigenvalues(m: &Model, xi: f64) -> Vec<Complex64> {
    let a: DMatrix<Complex64> = m.hamiltonian(xi).to_dense();
    let mat = faer::Mat::<faer::c64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    mat.eigenvalues().expect("dense eigenvalues")
}

fn models() -> Vec<Model> {
    let mut v: Vec<Model> = (2..=12).map(|n| Model::square_well(n).unwrap()).collect();
    for (n, p, q) in [(6, 1, 2), (8, 3, 8), (8, 5, 8), (10, 1, 2), (12, 1, 3)] {
        v.push(Model::shifted_well(n, Rational::new(p, q)).unwrap());
    }
    v
}

#[test]
fn agrees_with_dense_eigensolver() {
    for m in models() {
        for xi in [0.0, 0.3, 0.8, 1.7, 4.0] {
            let s = spectrum(&m, xi).unwrap();
            let d = distance(&s.eigenvalues, &dense_eigenvalues(&m, xi));
            assert!(d < 1e-7, "{m} xi={xi}: {d:.3e}");
        }
    }
}

#[test]
fn coefficient_and_recurrence_routes_agree() {
    for n in [10, 16, 20] {
        let m = Model::square_well(n).unwrap();
        for xi in [0.1, 0.25, 1.0, 3.0] {
            let h = m.hamiltonian(xi);
            let by_coeffs = roots(&certify_real(&char_poly(&h), 1e-9).unwrap()).unwrap();
            let implicit = eigenvalue_roots(&h).unwrap();
            let d = distance(&by_coeffs.roots, &implicit.roots);
            assert!(d < 1e-8, "N={n} xi={xi}: {d:.3e}");
        }
    }
}

#[test]
fn recurrence_route_at_forty_sites() {
    let m = Model::square_well(40).unwrap();
    let s = spectrum(&m, 0.0).unwrap();
    for (k, f) in s.eigenvalues.iter().enumerate() {
        let exact = -2.0 * ((k + 1) as f64 * std::f64::consts::PI / 40.0).cos();
        assert!((f.re - exact).abs() < 1e-12 && f.im == 0.0, "k={k}");
    }
    let s = spectrum(&m, 0.07).unwrap();
    let d = distance(&s.eigenvalues, &dense_eigenvalues(&m, 0.07));
    assert!(d < 1e-8, "{d:.3e}");
}

#[test]
fn five_eighths_roots_at_zero_coupling() {
    let m = Model::shifted_well(8, Rational::new(5, 8)).unwrap();
    let s = spectrum(&m, 0.0).unwrap();
    let r2 = 2f64.sqrt();
    let mut expected = vec![0.0, r2, -r2];
    for sign in [-1.0, 1.0] {
        let f = (2.0 + sign * r2).sqrt();
        expected.extend([f, -f]);
    }
    let expected: Vec<Complex64> = expected.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    assert!(distance(&s.eigenvalues, &expected) < 1e-12);
}

#[test]
fn matching_vectors_are_eigenvectors() {
    for n_int in 3..=14 {
        let m = Model::square_well(n_int).unwrap();
        let (n, parity) = block_size(n_int).unwrap();
        let xi = 0.2;
        let h = m.hamiltonian(xi);
        for f in secular_zeros(n, parity, xi).unwrap() {
            let v = matching_eigenvector(n, parity, f, xi).unwrap();
            let hv = h.apply(&v);
            let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let res = hv.iter().zip(&v).map(|(a, b)| (a - f * b).norm()).fold(0.0, f64::max);
            assert!(res <= 1e-9 * scale, "N={n_int} F={f}: {res:.3e}");
        }
    }
}

#[test]
fn real_form_vanishes_at_even_eigenvalues() {
    for n_int in [4, 6, 8, 10] {
        let (n, parity) = block_size(n_int).unwrap();
        assert_eq!(parity, Parity::Even);
        let xi = 0.15;
        for f in secular_zeros(n, parity, xi).unwrap() {
            let det = real_system_determinant(n, f, xi).unwrap();
            assert!(det.abs() < 1e-8, "N={n_int} F={f}: {det:.3e}");
            assert!(real_null_vector(n, f, xi, 1e-9).is_ok());
            assert!(verify_matrix_chebyshev(n, f, xi).unwrap() < 1e-9);
        }
    }
}

#[test]
fn printed_trig_form_misses_the_smallest_roots() {
    // at n = 0 the printed form reduces to Re cos φ = −F/2, which does not
    // vanish at the eigenvalues ±√(2 − ξ²)
    for xi in [0.0, 0.3, 1.0] {
        for f in secular_zeros(0, Parity::Even, xi).unwrap() {
            let r = trig_residual(0, trig_map(f, xi).unwrap()).unwrap();
            assert!((r + f / 2.0).abs() < 1e-12, "xi={xi} F={f}: {r}");
            if f != 0.0 {
                assert!(r.abs() > 0.1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn real_zero_counts_agree(n_int in 3usize..=20, xi in 0.0f64..3.0) {
        let (n, parity) = block_size(n_int).unwrap();
        let s = spectrum(&Model::square_well(n_int).unwrap(), xi).unwrap();
        let zeros = secular_zeros(n, parity, xi).unwrap();
        prop_assume!(s.eigenvalues.windows(2).all(|w| (w[1] - w[0]).norm() > 1e-5));
        prop_assert_eq!(zeros.len(), s.real_count());
    }
}
