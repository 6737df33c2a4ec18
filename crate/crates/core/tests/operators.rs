mod common;

use common::{difference_matrix, rel_err};
use ngr_core::fft::{fft3, ifft3, Plan1d};
use ngr_core::tensor::{grad, grad_adjoint, grad_spectrum};
use ngr_core::{Axis, ComplexTensor3, Rng, Shape, Tensor3};
use num_complex::Complex64;
use std::f64::consts::PI;

#[test]
fn adjoint_identity_random_pairs() {
    let shape = Shape::new(8, 8, 3);
    let mut rng = Rng::new(20);
    for _ in 0..100 {
        for axis in Axis::ALL {
            let x = rng.uniform(shape, -1.0, 1.0).unwrap();
            let g = rng.uniform(shape, -1.0, 1.0).unwrap();
            let lhs = grad(&x, axis).dot(&g);
            let rhs = x.dot(&grad_adjoint(&g, axis));
            assert!((lhs - rhs).abs() <= 1e-10 * x.norm() * g.norm(), "{axis:?}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn difference_matches_explicit_matrix() {
    let shape = Shape::new(4, 5, 3);
    let x = Rng::new(4).uniform(shape, -1.0, 1.0).unwrap();
    for axis in Axis::ALL {
        let d = difference_matrix(shape, axis);
        assert!(rel_err(grad(&x, axis).data(), &d.apply(x.data())) < 1e-15);
        assert!(rel_err(grad_adjoint(&x, axis).data(), &d.transpose().apply(x.data())) < 1e-15);
    }
}

#[test]
fn spectrum_closed_form_and_kernel_fft() {
    for n in [2usize, 3, 4, 7, 8, 16] {
        let spec = grad_spectrum(n);
        assert_eq!(spec.len(), n);
        // Kernel of the forward difference applied by circular convolution:
        // out[k] = x[k+1] - x[k]  <=>  h[0] = -1, h[n-1] = 1.
        let mut kernel = vec![Complex64::new(0.0, 0.0); n];
        kernel[0].re -= 1.0;
        kernel[(n - 1) % n].re += 1.0;
        Plan1d::new(n).forward(&mut kernel);
        for k in 0..n {
            let s = (PI * k as f64 / n as f64).sin();
            assert!((spec[k] - 4.0 * s * s).abs() <= 1e-12, "n={n} k={k}");
            assert!((spec[k] - kernel[k].norm_sqr()).abs() <= 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn transform_of_gradient_is_multiplier() {
    let shape = Shape::new(6, 7, 3);
    let x = Rng::new(8).uniform(shape, 0.0, 1.0).unwrap();
    for axis in Axis::ALL {
        let n = shape.extent(axis);
        let spec = grad_spectrum(n);
        let gx = fft3(&grad(&x, axis));
        let fx = fft3(&x);
        // |F(grad x)|^2 = spectrum * |F(x)|^2 at every frequency.
        for ky in 0..shape.height {
            for kx in 0..shape.width {
                for kc in 0..shape.channels {
                    let k = match axis {
                        Axis::H => ky,
                        Axis::V => kx,
                        Axis::T => kc,
                    };
                    let want = spec[k] * fx.get(ky, kx, kc).norm_sqr();
                    assert!((gx.get(ky, kx, kc).norm_sqr() - want).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn fft_round_trip_on_odd_and_even_sizes() {
    for shape in [Shape::new(5, 6, 3), Shape::new(8, 8, 2), Shape::new(1, 9, 1)] {
        let x = Rng::new(3).uniform(shape, -1.0, 1.0).unwrap();
        let back: Tensor3 = ifft3(&fft3(&x));
        assert!(common::max_abs_diff(&back, &x) < 1e-12);
        let z: ComplexTensor3 = fft3(&x);
        assert!((z.norm_sq() / shape.len() as f64 - x.norm_sq()).abs() < 1e-9);
    }
}
