use ngr_core::degrade::{add_gaussian, add_impulse};
use ngr_core::metrics::psnr;
use ngr_core::net::{AxisWeights, NetConfig};
use ngr_core::solver::{run_denoising, DenoiseConfig, SolverConfig};
use ngr_core::{Rng, Shape, Tensor3};

fn small(iters: usize, tau: f64) -> DenoiseConfig {
    DenoiseConfig {
        solver: SolverConfig { outer_iters: iters, net: NetConfig { blocks: 3, width: 8, ..NetConfig::default() }, ..SolverConfig::default() },
        tau,
        ..DenoiseConfig::default()
    }
}

#[test]
fn fidelity_only_is_a_fixed_point() {
    let y = Rng::new(4).uniform(Shape::new(12, 12, 3), 0.0, 1.0).unwrap();
    let mut cfg = small(10, 0.0);
    cfg.solver.lambda = AxisWeights::new(0.0, 0.0, 0.0);
    let out = run_denoising(&y, &cfg).unwrap();
    assert_eq!(out.x, y);
    assert!(out.s.data().iter().all(|&v| v == 0.0));
}

#[test]
fn gaussian_mode_has_no_outliers() {
    let clean = Tensor3::filled(Shape::new(16, 16, 3), 0.5);
    let y = add_gaussian(&mut Rng::new(1), &clean, 0.1).unwrap();
    let out = run_denoising(&y, &small(40, 0.0)).unwrap();
    assert!(out.s.data().iter().all(|&v| v == 0.0));
    assert!(psnr(&out.x, &clean).unwrap() > psnr(&y, &clean).unwrap() + 5.0);
}

#[test]
fn outlier_support_sits_above_threshold() {
    let clean = Tensor3::filled(Shape::new(24, 24, 3), 0.5);
    let y = add_impulse(&mut Rng::new(2), &clean, 0.25).unwrap();
    let cfg = small(150, 0.05);
    let out = run_denoising(&y, &cfg).unwrap();
    let t = cfg.tau / cfg.beta;
    let last = out.trace.records.last().unwrap();
    let mut support = 0;
    for i in 0..y.len() {
        if out.s.data()[i] != 0.0 {
            support += 1;
            // S was thresholded against the previous X; allow for the last X step.
            assert!((y.data()[i] - out.x.data()[i]).abs() > t - 1e-3, "entry {i}");
        }
    }
    // Every impulse that differs from the clean value is caught.
    let hits = y.data().iter().filter(|&&v| v != 0.5).count();
    assert!(support >= hits, "{support} < {hits}");
    assert!(last.residual.is_finite());
    assert!(psnr(&out.x, &clean).unwrap() > 30.0);
}
