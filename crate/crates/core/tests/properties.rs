use ngr_core::degrade::{add_impulse, random_mask};
use ngr_core::prox::{shrink, soft_threshold};
use ngr_core::tensor::{grad, grad_adjoint};
use ngr_core::{Axis, Rng, Shape, Tensor3};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = Shape> {
    (1usize..7, 1usize..7, 1usize..4).prop_map(|(h, w, c)| Shape::new(h, w, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_identity(s in shape(), seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let x = rng.uniform(s, -1.0, 1.0).unwrap();
        let g = rng.uniform(s, -1.0, 1.0).unwrap();
        for axis in Axis::ALL {
            let lhs = grad(&x, axis).dot(&g);
            let rhs = x.dot(&grad_adjoint(&g, axis));
            prop_assert!((lhs - rhs).abs() <= 1e-10 * x.norm() * g.norm() + 1e-300);
        }
    }

    #[test]
    fn gradients_sum_to_zero(s in shape(), seed in any::<u64>()) {
        let x = Rng::new(seed).uniform(s, 0.0, 1.0).unwrap();
        for axis in Axis::ALL {
            prop_assert!(grad(&x, axis).data().iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn shrink_is_nonexpansive_and_shrinks(a in -10.0..10.0f64, b in -10.0..10.0f64, t in 0.0..5.0f64) {
        prop_assert!((shrink(a, t) - shrink(b, t)).abs() <= (a - b).abs() + 1e-15);
        prop_assert!(shrink(a, t).abs() <= a.abs());
        prop_assert!(shrink(a, t) == 0.0 || shrink(a, t).signum() == a.signum());
        prop_assert_eq!(shrink(a, 0.0), a);
    }

    #[test]
    fn soft_threshold_matches_shrink(s in shape(), seed in any::<u64>(), t in 0.0..1.0f64) {
        let x = Rng::new(seed).uniform(s, -1.0, 1.0).unwrap();
        let y = soft_threshold(&x, t);
        for (a, b) in x.data().iter().zip(y.data()) {
            prop_assert_eq!(*b, shrink(*a, t));
        }
    }

    #[test]
    fn masks_are_deterministic_and_project(s in shape(), seed in any::<u64>(), sr in 0.0..=1.0f64) {
        let m = random_mask(&mut Rng::new(seed), s, sr).unwrap();
        prop_assert_eq!(&m, &random_mask(&mut Rng::new(seed), s, sr).unwrap());
        let x = Tensor3::filled(s, 0.7);
        let p = m.project(&x);
        for i in 0..s.len() {
            prop_assert_eq!(p.data()[i], if m.is_observed(i) { 0.7 } else { 0.0 });
        }
        prop_assert_eq!(m.project(&p), p);
    }

    #[test]
    fn impulse_leaves_input_untouched(s in shape(), seed in any::<u64>(), r in 0.0..=1.0f64) {
        let x = Tensor3::filled(s, 0.3);
        let before = x.clone();
        let y = add_impulse(&mut Rng::new(seed), &x, r).unwrap();
        prop_assert_eq!(&x, &before);
        prop_assert!(y.data().iter().all(|&v| v == 0.0 || v == 1.0 || v == 0.3));
    }
}
