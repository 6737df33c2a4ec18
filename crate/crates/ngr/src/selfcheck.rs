//! Numerical self-tests run by `ngr selfcheck`.

use ngr_core::fft::{fft3, ifft3};
use ngr_core::net::{forward, init_input, loss_and_grad, penalty, AxisWeights, GradientTriple, NetConfig, NetParams};
use ngr_core::solver::update_x;
use ngr_core::tensor::{grad, grad_adjoint, grad_spectrum};
use ngr_core::{Axis, Rng, Shape, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {} ({})", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub fn run_all() -> Vec<Check> {
    vec![adjoint(), spectrum(), fft_round_trip(), solve_vs_dense(), finite_differences()]
}

fn adjoint() -> Check {
    let shape = Shape::new(8, 8, 3);
    let mut rng = Rng::new(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = rng.uniform(shape, -1.0, 1.0).unwrap();
        let g = rng.uniform(shape, -1.0, 1.0).unwrap();
        for axis in Axis::ALL {
            let gap = (grad(&x, axis).dot(&g) - x.dot(&grad_adjoint(&g, axis))).abs();
            worst = worst.max(gap / (x.norm() * g.norm()));
        }
    }
    Check::new("adjoint", worst <= 1e-10, format!("worst relative gap {worst:.2e}"))
}

fn spectrum() -> Check {
    let mut worst: f64 = 0.0;
    for n in [2usize, 3, 4, 7, 8, 16] {
        let mut kernel = Tensor3::zeros(Shape::new(n, 1, 1));
        kernel[0] = -1.0;
        kernel[n - 1] += 1.0;
        let k = fft3(&kernel);
        for (i, s) in grad_spectrum(n).iter().enumerate() {
            let closed = 4.0 * (std::f64::consts::PI * i as f64 / n as f64).sin().powi(2);
            worst = worst.max((s - closed).abs()).max((s - k.data()[i].norm_sqr()).abs());
        }
    }
    Check::new("spectrum", worst <= 1e-12, format!("worst abs error {worst:.2e}"))
}

fn fft_round_trip() -> Check {
    let x = Rng::new(2).uniform(Shape::new(6, 10, 3), -1.0, 1.0).unwrap();
    let back = ifft3(&fft3(&x));
    let err = back.zip_map(&x, |a, b| a - b).norm() / x.norm();
    Check::new("fft-round-trip", err <= 1e-10, format!("relative error {err:.2e}"))
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs())).unwrap();
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|j| a[r * n + j] * x[j]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    x
}

fn solve_vs_dense() -> Check {
    let shape = Shape::new(5, 4, 2);
    let n = shape.len();
    let mut rng = Rng::new(3);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let lambda = AxisWeights::new(rng.range(0.0, 3.0), rng.range(0.0, 3.0), rng.range(0.0, 3.0));
        let mu = rng.range(0.5, 20.0);
        // Column j of the normal matrix is the operator applied to e_j.
        let mut a = vec![0.0; n * n];
        for j in 0..n {
            let mut e = Tensor3::zeros(shape);
            e[j] = 1.0;
            let mut col = e.map(|v| mu * v);
            for axis in Axis::ALL {
                col.axpy(lambda.get(axis), &grad_adjoint(&grad(&e, axis), axis));
            }
            for i in 0..n {
                a[i * n + j] = col[i];
            }
        }
        let r = rng.uniform(shape, -1.0, 1.0).unwrap();
        let want = dense_solve(a, r.data().to_vec());
        let got = update_x(&r, &lambda, mu).unwrap();
        let num: f64 = got.data().iter().zip(&want).map(|(p, q)| (p - q) * (p - q)).sum();
        let den: f64 = want.iter().map(|q| q * q).sum();
        worst = worst.max((num / den).sqrt());
    }
    Check::new("fft-vs-dense", worst <= 1e-8, format!("worst relative error {worst:.2e}"))
}

fn finite_differences() -> Check {
    const H: f64 = 1e-5;
    const TOL: f64 = 1e-4;
    let shape = Shape::new(6, 6, 2);
    let cfg = NetConfig { blocks: 2, width: 4, head_gain: 1.0, ..NetConfig::for_channels(2) };
    let mut rng = Rng::new(4);
    let input = init_input(&mut rng, shape, 0.1).unwrap();
    let mut params = NetParams::init(&mut rng, &cfg).unwrap();
    let mut target = GradientTriple::zeros(shape);
    for axis in Axis::ALL {
        target[axis] = rng.uniform(shape, -1.0, 1.0).unwrap();
    }
    let lambda = AxisWeights::new(1.0, 0.7, 1.3);
    let (l0, grads) = loss_and_grad(&params, &cfg, &input, &target, &lambda).unwrap();
    // Central differences cannot resolve below this; see the zero-gradient biases
    // that feed a normalization layer.
    let floor = 64.0 * f64::EPSILON * l0 / (2.0 * H);
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let orig = params.as_slice()[i];
        params.as_mut_slice()[i] = orig + H;
        let lp = penalty(&forward(&params, &cfg, &input).unwrap(), &target, &lambda);
        params.as_mut_slice()[i] = orig - H;
        let lm = penalty(&forward(&params, &cfg, &input).unwrap(), &target, &lambda);
        params.as_mut_slice()[i] = orig;
        let numeric = (lp - lm) / (2.0 * H);
        let analytic = grads.as_slice()[i];
        let diff = (analytic - numeric).abs();
        let scale = analytic.abs().max(numeric.abs());
        if diff <= floor && scale <= floor / TOL {
            continue;
        }
        worst = worst.max(diff / scale);
    }
    Check::new("finite-differences", worst <= TOL, format!("{} parameters, worst relative error {worst:.2e}", params.len()))
}
