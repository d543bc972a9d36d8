use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use needlet_core::cutoff::{assemble_cutoff, CutoffFunction, CutoffKind, CutoffSpec};
use needlet_core::decay::{log_shape, measure_envelope, SamplingPlan};
use needlet_core::kernels::{chebyshev_kernel, distance, jacobi_kernel, trig_kernel, Family, KernelInstance};
use needlet_core::needlets::{build_needlet_system, random_band_limited, NeedletFamily, NeedletSystem};
use needlet_core::orthopoly::JacobiParams;
use needlet_core::quadrature::{gauss_rule, verify_exactness, WeightId};
use proptest::prelude::*;

fn type_a() -> Arc<CutoffFunction> {
    static C: OnceLock<Arc<CutoffFunction>> = OnceLock::new();
    C.get_or_init(|| Arc::new(assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeA, 1.0)).unwrap())).clone()
}

fn type_c() -> Arc<CutoffFunction> {
    static C: OnceLock<Arc<CutoffFunction>> = OnceLock::new();
    C.get_or_init(|| Arc::new(assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeC, 1.0)).unwrap())).clone()
}

fn frame() -> &'static NeedletSystem {
    static S: OnceLock<NeedletSystem> = OnceLock::new();
    S.get_or_init(|| build_needlet_system(NeedletFamily::Jacobi { alpha: 1.0, beta: 0.5 }, type_c(), 4).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_values_stay_in_unit_interval(t in -1.0f64..3.0) {
        for c in [type_a(), type_c()] {
            let v = c.eval(t);
            prop_assert!((0.0..=1.0).contains(&v));
            if t.abs() >= 2.0 {
                prop_assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn type_c_squares_partition(t in 1.0f64..2.0) {
        let c = type_c();
        prop_assert!((c.eval(t).powi(2) + c.eval(t / 2.0).powi(2) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn chebyshev_kernel_folds_trig_kernel(th in 0.0f64..PI, ph in 0.0f64..PI, n in 4usize..80) {
        let m = type_a().multipliers(n);
        let lhs = chebyshev_kernel(&m, th.cos(), ph.cos());
        let rhs = (trig_kernel(&m, th - ph) + trig_kernel(&m, th + ph)) / PI;
        prop_assert!((lhs - rhs).abs() < 1e-10 * (n as f64));
    }

    #[test]
    fn jacobi_kernel_is_symmetric(a in -0.5f64..3.0, b in -0.5f64..3.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let m = type_a().multipliers(24);
        let p = JacobiParams::new(a, b).unwrap();
        let (u, v) = (jacobi_kernel(&m, p, x, y), jacobi_kernel(&m, p, y, x));
        prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
    }

    #[test]
    fn hermite_kernel_is_symmetric(x in -8.0f64..8.0, y in -8.0f64..8.0) {
        let k = KernelInstance::new(Family::Hermite { dim: 1 }, type_a(), 20).unwrap();
        let (u, v) = (k.eval(&[x], &[y]).unwrap(), k.eval(&[y], &[x]).unwrap());
        prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0));
    }

    #[test]
    fn distance_is_a_symmetric_metric(a in 0.0f64..PI, b in 0.0f64..PI, c in 0.0f64..PI) {
        let f = Family::Chebyshev;
        let (x, y, z) = ([a.cos()], [b.cos()], [c.cos()]);
        let dxy = distance(&f, &x, &y).unwrap();
        prop_assert!((dxy - distance(&f, &y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(dxy <= distance(&f, &x, &z).unwrap() + distance(&f, &z, &y).unwrap() + 1e-12);
    }

    #[test]
    fn gauss_jacobi_is_exact(a in -0.9f64..4.0, b in -0.9f64..4.0, m in 1usize..40) {
        let r = gauss_rule(WeightId::Jacobi { alpha: a, beta: b }, m).unwrap();
        prop_assert!(verify_exactness(&r, 2 * m - 1).unwrap() < 1e-11);
    }

    #[test]
    fn gauss_laguerre_is_exact(a in 0.0f64..4.0, m in 1usize..30) {
        let r = gauss_rule(WeightId::Laguerre { alpha: a }, m).unwrap();
        prop_assert!(verify_exactness(&r, 2 * m - 1).unwrap() < 1e-9);
    }

    #[test]
    fn log_shape_is_increasing(x in 0.0f64..1e6, dx in 1e-3f64..10.0, eps in 0.05f64..1.0) {
        for depth in [1usize, 2] {
            prop_assert!(log_shape(x + dx, eps, depth) > log_shape(x, eps, depth));
            prop_assert!(log_shape(x, eps, depth) >= 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn frame_is_tight_for_random_inputs(seed in any::<u64>()) {
        let s = frame();
        let f = random_band_limited(s.capacity(), seed);
        prop_assert!(s.parseval_check(&f).unwrap() < 1e-10);
    }

    #[test]
    fn analysis_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), lam in -3.0f64..3.0) {
        let s = frame();
        let (f, g) = (random_band_limited(s.capacity(), s1), random_band_limited(s.capacity(), s2));
        let h: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + lam * b).collect();
        let (cf, cg, ch) = (s.analyze_spectral(&f).unwrap(), s.analyze_spectral(&g).unwrap(), s.analyze_spectral(&h).unwrap());
        for ((a, b), c) in cf.levels.iter().flatten().zip(cg.levels.iter().flatten()).zip(ch.levels.iter().flatten()) {
            prop_assert!((a + lam * b - c).abs() < 1e-10);
        }
    }

    #[test]
    fn envelope_is_deterministic(seed in any::<u64>()) {
        let k = KernelInstance::new(Family::Jacobi { alpha: 1.0, beta: 0.0 }, type_a(), 16).unwrap();
        let plan = SamplingPlan::default().with_seed(seed);
        prop_assert_eq!(measure_envelope(&k, &plan).unwrap(), measure_envelope(&k, &plan).unwrap());
    }
}
