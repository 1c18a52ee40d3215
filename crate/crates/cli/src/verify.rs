//! Reference values that a correct build must reproduce.

use num_complex::Complex64;
use serde::Serialize;

use ptwell::charpoly::{certify_real, char_poly};
use ptwell::metric::construct_metric;
use ptwell::model::{to_physical, Model, Rational};
use ptwell::realform::real_system_determinant;
use ptwell::secular::{block_size, secular_zeros, Parity};
use ptwell::spectral::{continuum_check, critical_coupling, exceptional_points, imaginary_axis_crossing, spectrum};
use ptwell::tracking::hungarian;
use ptwell::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Summary<'a> {
    pub passed: usize,
    pub failed: usize,
    pub checks: &'a [Check],
}

fn check(name: &str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { name: name.to_string(), passed, detail }
}

fn square(n: usize) -> Model {
    Model::square_well(n).expect("valid lattice")
}

fn well(n: usize, p: i64, q: i64) -> Model {
    Model::shifted_well(n, Rational::new(p, q)).expect("valid well")
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    let cost: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x - y).norm())).collect();
    let col = hungarian(&cost, n);
    (0..n).map(|i| cost[i * n + col[i]]).fold(0.0, f64::max)
}

fn show(values: &[Complex64]) -> String {
    let parts: Vec<String> = values.iter().map(|z| format!("{:.10}{:+.3e}i", z.re, z.im)).collect();
    format!("[{}]", parts.join(", "))
}

fn closed_form(name: &str, n: usize, xi_crit: f64, values: fn(f64) -> Vec<Complex64>) -> Check {
    check(name, || {
        let mut worst = 0.0_f64;
        for k in 0..=20 {
            let xi = xi_crit * k as f64 / 20.0;
            worst = worst.max(distance(&spectrum(&square(n), xi)?.eigenvalues, &values(xi)));
        }
        Ok((worst <= 1e-9, format!("max deviation {worst:.2e} on [0, {xi_crit:.6}]")))
    })
}

fn csqrt(x: f64) -> Complex64 {
    Complex64::new(x, 0.0).sqrt()
}

fn critical_z(model: &Model) -> Result<f64> {
    Ok(critical_coupling(model, None, 1e-9)?.z)
}

fn y_values(xi: f64) -> Result<Vec<Complex64>> {
    let s = spectrum(&well(10, 1, 2), xi)?;
    let mut y: Vec<Complex64> =
        s.eigenvalues.iter().filter(|f| f.re > 0.0 || f.re == 0.0 && f.im > 0.0).map(|f| f * f).collect();
    y.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(y)
}

fn coefficients(name: &str, model: Model, expected: fn(f64) -> [f64; 8]) -> Check {
    check(name, || {
        let mut worst = 0.0_f64;
        for k in 0..20 {
            let xi = 0.137 + 0.149 * k as f64;
            let p = certify_real(&char_poly(&model.hamiltonian(xi)), 1e-12)?;
            let want = expected(xi);
            if p.coeffs().len() != want.len() {
                return Ok((false, format!("degree {} at xi={xi}", p.degree())));
            }
            for (g, w) in p.coeffs().iter().zip(want) {
                worst = worst.max((g - w).abs() / w.abs().max(1.0));
            }
        }
        Ok((worst <= 1e-10, format!("{model}: max relative error {worst:.2e} over 20 couplings")))
    })
}

pub fn run(negative_control: bool) -> Vec<Check> {
    let mut checks = Vec::new();

    for (n, z) in
        [(4, 5.657), (6, 4.500), (8, 4.463), (10, 4.461), (12, 4.463), (3, 2.250), (5, 3.494), (7, 3.946), (9, 4.148)]
    {
        checks.push(check(&format!("Z_crit({n})"), || {
            let got = critical_z(&square(n))?;
            Ok(((got - z).abs() <= 2e-3, format!("{got:.6} vs {z}")))
        }));
    }
    checks.push(check("odd Z_crit increasing", || {
        let z: Vec<f64> = [3, 5, 7, 9, 11].iter().map(|&n| critical_z(&square(n))).collect::<Result<_>>()?;
        Ok((z.windows(2).all(|w| w[1] > w[0]), format!("{z:.4?}")))
    }));
    checks.push(check("Z_crit(20), Z_crit(40) near 4.475", || {
        let z = [critical_z(&square(20))?, critical_z(&square(40))?];
        Ok((z.iter().all(|v| (4.40..=4.55).contains(v)), format!("{z:.4?}")))
    }));

    checks.push(closed_form("closed form N=3", 3, 1.0, |xi| {
        let r = csqrt((-xi).mul_add(xi, 1.0));
        vec![r, -r]
    }));
    checks.push(closed_form("closed form N=4", 4, 2f64.sqrt(), |xi| {
        let r = csqrt((-xi).mul_add(xi, 2.0));
        vec![Complex64::new(0.0, 0.0), r, -r]
    }));
    checks.push(closed_form("closed form N=5", 5, 5f64.sqrt() / 4.0, |xi| {
        let d = csqrt((-16.0 * xi).mul_add(xi, 5.0));
        [-1.0, 1.0]
            .iter()
            .flat_map(|s| {
                let r = (Complex64::new((-4.0 * xi).mul_add(xi, 6.0), 0.0) + 2.0 * s * d).sqrt() / 2.0;
                [r, -r]
            })
            .collect()
    }));
    checks.push(closed_form("closed form N=6", 6, 0.5, |xi| {
        let d = csqrt((-4.0 * xi).mul_add(xi, 1.0));
        let mut v = vec![Complex64::new(0.0, 0.0)];
        for s in [-1.0, 1.0] {
            let r = (Complex64::new((-xi).mul_add(xi, 2.0), 0.0) + s * d).sqrt();
            v.extend([r, -r]);
        }
        v
    }));

    checks.push(coefficients("determinant l=5/8", well(8, 5, 8), |x| {
        let x2 = x * x;
        [0.0, 4.0 - 3.0 * x2, 0.0, 4.0 * x2 - 10.0, 0.0, 6.0 - x2, 0.0, -1.0]
    }));
    checks.push(coefficients("determinant l=3/8", well(8, 3, 8), |x| {
        let x2 = x * x;
        [0.0, 2.0 * x2 * x2 + x2 + 4.0, 0.0, -x2 * x2 + 4.0 * x2 - 10.0, 0.0, 6.0 - 2.0 * x2, 0.0, -1.0]
    }));

    checks.push(check("exceptional point N=6 l=1/2", || {
        let ev = exceptional_points(&well(6, 1, 2), 0.0, 2.0, 1e-10)?;
        let ok = ev.len() == 1 && (ev[0].xi - 1.224745).abs() <= 1e-6 && ev[0].values.iter().all(|f| f.norm() <= 1e-4);
        Ok((ok, ev.iter().map(|e| format!("xi*={:.9} F*={}", e.xi, show(&e.values))).collect::<Vec<_>>().join("; ")))
    }));
    checks.push(check("exceptional point N=8 l=1/2", || {
        let ev = exceptional_points(&well(8, 1, 2), 0.0, 1.0, 1e-10)?;
        let ok = ev.len() == 1
            && (ev[0].xi - 0.845479352).abs() <= 1e-6
            && ev[0].values.len() == 2
            && ev[0].values.iter().all(|f| (f.re.abs() - 1.0516722).abs() <= 1e-5);
        Ok((ok, ev.iter().map(|e| format!("xi*={:.9} F*={}", e.xi, show(&e.values))).collect::<Vec<_>>().join("; ")))
    }));
    checks.push(check("imaginary-axis crossing N=8 l=1/2", || {
        let r = imaginary_axis_crossing(&well(8, 1, 2), 1.0, 4.0, 1e-10)?;
        let hit = r.values.iter().any(|f| (f.im.abs() - 2.1466382).abs() <= 1e-5 && f.re.abs() <= 1e-5);
        Ok(((r.xi - 3.2222152).abs() <= 1e-5 && hit, format!("xi_zero={:.9} F={}", r.xi, show(&r.values))))
    }));
    checks.push(check("single merger N=8 l=5/8", || {
        let ev = exceptional_points(&well(8, 5, 8), 0.0, 2.0, 1e-10)?;
        let ok = ev.len() == 1 && ev[0].merging_pairs == 1 && (ev[0].xi - 1.15470).abs() <= 1e-4;
        Ok((ok, ev.iter().map(|e| format!("xi*={:.8} pairs={}", e.xi, e.merging_pairs)).collect::<Vec<_>>().join("; ")))
    }));
    checks.push(check("double merger N=8 l=3/8", || {
        let model = if negative_control { well(8, 5, 8) } else { well(8, 3, 8) };
        let ev = exceptional_points(&model, 0.0, 2.0, 1e-10)?;
        let ok = ev.len() == 1
            && ev[0].merging_pairs == 2
            && (ev[0].xi - 0.5875692).abs() <= 1e-5
            && ev[0].values.iter().all(|f| (f.re.abs() - 1.1407164).abs() <= 1e-5);
        let detail = ev.iter().map(|e| format!("xi*={:.9} pairs={} F*={}", e.xi, e.merging_pairs, show(&e.values)));
        Ok((ok, format!("{model}: {}", detail.collect::<Vec<_>>().join("; "))))
    }));

    let quadruplet = [0.5173571919, 1.810807242, 1.810964520, 3.356678112];
    checks.push(check("N=10 quadruplet at xi=0.50209209", || {
        let y = y_values(0.50209209)?;
        let want: Vec<Complex64> = quadruplet.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let d = distance(&y, &want);
        Ok((d <= 1e-6, format!("y={}, deviation {d:.3e}", show(&y))))
    }));
    checks.push(check("N=10 pair width at xi=0.502092091", || {
        let im = y_values(0.502092091)?.iter().map(|y| y.im.abs()).fold(0.0, f64::max);
        Ok(((im - 5.27e-5).abs() <= 5.27e-6, format!("|Im y| = {im:.4e}, expected 5.27e-5")))
    }));
    checks.push(check("N=10 outer levels and pair centre", || {
        let y = y_values(0.50209209)?;
        if y.len() != 4 {
            return Ok((false, format!("{} values", y.len())));
        }
        let centre = (y[1] + y[2]) / 2.0;
        let d = (y[0].re - quadruplet[0])
            .abs()
            .max((y[3].re - quadruplet[3]).abs())
            .max((centre - (quadruplet[1] + quadruplet[2]) / 2.0).norm());
        Ok((d <= 1e-6, format!("deviation {d:.3e}")))
    }));

    checks.push(check("robust level F=0", || {
        for n in [4, 6, 8, 10, 20, 40] {
            for k in 0..=20 {
                let xi = k as f64 / 2.0;
                let s = spectrum(&square(n), xi)?;
                if !s.eigenvalues.iter().any(|f| f.norm() <= 1e-9) {
                    return Ok((false, format!("N={n} xi={xi}")));
                }
            }
            if to_physical(Complex64::new(0.0, 0.0), n).physical.re != (n * n) as f64 / 2.0 {
                return Ok((false, format!("N={n}: E(F=0) differs from N^2/2")));
            }
        }
        Ok((true, "present for N in {4..40}, xi in [0, 10]; E = N^2/2".into()))
    }));

    checks.push(check("route equivalence", || {
        let mut worst = 0.0_f64;
        for n_int in 3..=22 {
            let (n, parity) = block_size(n_int)?;
            let xi = 0.1;
            let mut real = spectrum(&square(n_int), xi)?.real_values();
            real.sort_by(f64::total_cmp);
            let zeros = secular_zeros(n, parity, xi)?;
            if zeros.len() != real.len() {
                return Ok((false, format!("N={n_int}: {} zeros, {} real eigenvalues", zeros.len(), real.len())));
            }
            for (z, r) in zeros.iter().zip(&real) {
                worst = worst.max((z - r).abs());
                if parity == Parity::Even && real_system_determinant(n, *r, xi)?.abs() > 1e-8 {
                    return Ok((false, format!("N={n_int}: real form nonzero at F={r}")));
                }
            }
        }
        Ok((worst <= 1e-8, format!("max deviation {worst:.2e} for N=3..22")))
    }));

    checks.push(check("spectral symmetries", || {
        let mut worst = 0.0_f64;
        for m in [square(7), square(10), well(8, 1, 2), well(8, 3, 8), well(10, 1, 2)] {
            for xi in [0.3, 1.0, 2.5] {
                let s = spectrum(&m, xi)?;
                let neg: Vec<Complex64> = s.eigenvalues.iter().map(|f| -f).collect();
                let conj: Vec<Complex64> = s.eigenvalues.iter().map(|f| f.conj()).collect();
                worst = worst.max(distance(&s.eigenvalues, &neg)).max(distance(&s.eigenvalues, &conj));
            }
        }
        Ok((worst <= 1e-9, format!("closure defect {worst:.2e}")))
    }));

    checks.push(check("metric residuals", || {
        let mut worst = 0.0_f64;
        for (m, xi) in [(square(4), 0.5), (square(7), 0.2), (well(8, 1, 2), 0.6), (well(8, 5, 8), 1.0)] {
            let r = construct_metric(&m, xi, None)?;
            if !r.positive_definite {
                return Ok((false, format!("{m}: not positive definite")));
            }
            worst = worst.max(r.quasi_residual);
        }
        Ok((worst <= 1e-10, format!("max residual {worst:.2e}")))
    }));
    checks.push(check("metric refused past the transition", || match construct_metric(&square(4), 2.0, None) {
        Err(Error::NonConstructible(m)) => Ok((true, m)),
        other => Ok((false, format!("{other:?}"))),
    }));

    checks.push(check("continuum limit", || {
        let r = continuum_check(&[20, 40, 80], 3.0)?;
        let ok = r.ratios.iter().all(|q| (q - 0.25).abs() <= 0.02)
            && r.rows.iter().filter(|w| w.n <= 40).all(|w| w.real_at_probe);
        Ok((ok, format!("error ratios {:.4?}", r.ratios)))
    }));

    checks
}
