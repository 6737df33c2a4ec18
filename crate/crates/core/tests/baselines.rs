use ngr_core::baselines::{mean_fill, tv3d_inpaint, tv3d_inpaint_traced, zero_fill, TvConfig};
use ngr_core::degrade::random_mask;
use ngr_core::metrics::psnr;
use ngr_core::solver::ObservationMask;
use ngr_core::synthetic::{piecewise_constant, piecewise_smooth};
use ngr_core::{Rng, Shape, Tensor3};

const DESK: Shape = Shape::new(64, 64, 3);

fn desk_mask() -> ObservationMask {
    random_mask(&mut Rng::new(100), DESK, 0.3).unwrap()
}

#[test]
fn constant_image_recovered_exactly() {
    let gt = Tensor3::filled(DESK, 0.6);
    for (seed, sr) in [(1, 0.1), (2, 0.3), (3, 0.5)] {
        let mask = random_mask(&mut Rng::new(seed), DESK, sr).unwrap();
        let x = tv3d_inpaint(&mask.project(&gt), &mask, &TvConfig { iters: 300, ..TvConfig::default() }).unwrap();
        let err = x.zip_map(&gt, |a, b| a - b).max_abs();
        assert!(err <= 1e-3, "SR {sr}: max error {err}");
    }
}

#[test]
fn observed_entries_are_kept_exactly() {
    let gt = piecewise_smooth(Shape::new(16, 16, 3), 4);
    let mask = random_mask(&mut Rng::new(5), gt.shape(), 0.4).unwrap();
    let y = mask.project(&gt);
    let x = tv3d_inpaint(&y, &mask, &TvConfig { iters: 20, ..TvConfig::default() }).unwrap();
    for i in 0..y.len() {
        if mask.is_observed(i) {
            assert_eq!(x.data()[i], y.data()[i]);
        }
    }
}

/// ADMM is not a descent method: the TV value of the feasible iterate keeps
/// small oscillations after burn-in (relative size about 1e-4 here).
#[test]
fn tv_objective_settles_after_burn_in() {
    let shape = Shape::new(8, 8, 3);
    for seed in 0..5 {
        let mut rng = Rng::new(seed);
        let y = rng.uniform(shape, 0.0, 1.0).unwrap();
        let mask = random_mask(&mut rng, shape, 0.5).unwrap();
        let out = tv3d_inpaint_traced(&mask.project(&y), &mask, &TvConfig { iters: 200, ..TvConfig::default() }).unwrap();
        let obj = &out.objective;
        let burn = obj.len() / 5;
        let worst = (burn..obj.len() - 1).map(|k| (obj[k + 1] - obj[k]) / obj[k]).fold(f64::MIN, f64::max);
        let min = obj[burn..].iter().copied().fold(f64::MAX, f64::min);
        assert!(worst < 1e-3, "seed {seed}: relative increase {worst}");
        assert!(obj[obj.len() - 1] <= min * (1.0 + 1e-3));
        assert!(obj[obj.len() - 1] < 0.7 * obj[0]);
    }
}

/// Reference PSNRs reproduced by an independent array implementation of the
/// same splitting (default config: unit weights, mu 4, 300 iterations).
#[test]
fn desk_scale_reference_numbers() {
    let mask = desk_mask();
    for (gt, want) in [
        (piecewise_constant(DESK, 11), 24.973508953905),
        (piecewise_smooth(DESK, 11), 25.140968800256),
    ] {
        let x = tv3d_inpaint(&mask.project(&gt), &mask, &TvConfig::default()).unwrap();
        let p = psnr(&x, &gt).unwrap();
        assert!((p - want).abs() < 1e-6, "{p} vs {want}");
    }
}

#[test]
fn fills() {
    let gt = piecewise_smooth(DESK, 11);
    let mask = desk_mask();
    let y = mask.project(&gt);
    let z = zero_fill(&y, &mask).unwrap();
    assert!((psnr(&z, &gt).unwrap() - 7.010071321024).abs() < 1e-6);
    let m = mean_fill(&y, &mask).unwrap();
    assert!(psnr(&m, &gt).unwrap() > psnr(&z, &gt).unwrap());
    let c = Tensor3::filled(DESK, 0.25);
    assert_eq!(mean_fill(&mask.project(&c), &mask).unwrap(), c);
}
