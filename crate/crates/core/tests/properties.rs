//! Property tests for the invariants of each module.

use std::f64::consts::PI;

use casimir_core::asymptotics::{c4_dissimilar, c4_equal, leading_coefficient_dielectric, low_t_dielectric, Quantity};
use casimir_core::lifshitz::temperature_for_tau;
use casimir_core::materials::{
    eval_eps, kk_to_imaginary_axis, preset, Conductivity, DcAugmentedModel, DrudeModel, OpticalDataTable,
    OscillatorModel, PlasmaModel, Relaxation, TailModel,
};
use casimir_core::reflection::{coefficients, r0, zero_freq_pair, TeZero};
use casimir_core::specfun::{polylog, polylog_with, PrecisionPolicy};
use casimir_core::{free_energy, NumericalSettings, PermittivityModel, PlateConfiguration};
use proptest::prelude::*;

fn oscillator() -> impl Strategy<Value = OscillatorModel> {
    prop::collection::vec((0.05f64..20.0, 1e13f64..1e17), 1..4).prop_map(|terms| {
        let (c, w): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();
        OscillatorModel::new(c, w).unwrap()
    })
}

fn finite_preset() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["Si-static", "SiO2-static", "ideal-metal", "vacuum"])
}

proptest! {
    #[test]
    fn polylog_increasing(n in prop::sample::select(vec![2u32, 3]), z in 0.0f64..0.999, dz in 1e-6f64..1e-3) {
        let z2 = (z + dz).min(1.0);
        prop_assert!(polylog(n, z).unwrap() < polylog(n, z2).unwrap());
    }

    #[test]
    fn polylog_order_ordering(z in 0.0f64..=1.0) {
        prop_assert!(polylog(3, z).unwrap() <= polylog(2, z).unwrap());
    }

    #[test]
    fn polylog_geometric_tail_bound(n in prop::sample::select(vec![2u32, 3]), z in 0.01f64..0.95, k in 1usize..60) {
        let partial: f64 = (1..=k).map(|j| z.powi(j as i32) / (j as f64).powi(n as i32)).sum();
        let bound = z.powi(k as i32 + 1) / ((k as f64 + 1.0).powi(n as i32) * (1.0 - z));
        let full = polylog_with(n, z, &PrecisionPolicy::tight()).unwrap();
        let slack = (PrecisionPolicy::tight().rel_tol() + 4.0 * f64::EPSILON) * full;
        prop_assert!((full - partial).abs() <= bound + slack);
    }

    #[test]
    fn oscillator_decreasing_and_bounded(m in oscillator(), xi in 1e10f64..1e18, f in 1.001f64..10.0) {
        let model = PermittivityModel::Oscillator(m.clone());
        let e1 = eval_eps(&model, xi, None).unwrap();
        let e2 = eval_eps(&model, xi * f, None).unwrap();
        prop_assert!(e2 < e1);
        prop_assert!(e1 > 1.0 && e1 <= m.static_eps());
        prop_assert!(eval_eps(&model, 1e30, None).unwrap() - 1.0 < 1e-20);
    }

    #[test]
    fn metals_decreasing(wp in 1e15f64..3e16, nu in 1e12f64..1e15, xi in 1e10f64..1e18, f in 1.001f64..10.0) {
        for model in [
            PermittivityModel::Drude(DrudeModel::new(wp, Relaxation::Constant(nu)).unwrap()),
            PermittivityModel::Plasma(PlasmaModel::new(wp).unwrap()),
        ] {
            let e1 = eval_eps(&model, xi, None).unwrap();
            let e2 = eval_eps(&model, xi * f, None).unwrap();
            prop_assert!(e2 < e1 && e2 > 1.0);
        }
    }

    #[test]
    fn dc_term_is_additive(base in oscillator(), sigma in 1e6f64..1e12, xi in 1e10f64..1e17, t in 50.0f64..600.0) {
        let dc = DcAugmentedModel::new(base.clone(), Conductivity::Activated { sigma0_300k: sigma, gap_b_k: 1000.0 }).unwrap();
        let sigma_t = sigma * (1000.0 / 300.0 - 1000.0 / t).exp();
        let with = eval_eps(&PermittivityModel::DcAugmented(dc), xi, Some(t)).unwrap();
        let without = eval_eps(&PermittivityModel::Oscillator(base), xi, None).unwrap();
        let term = 4.0 * PI * sigma_t / xi;
        prop_assert!(((with - without) - term).abs() <= 4.0 * f64::EPSILON * with + 1e-12 * term);
    }

    #[test]
    fn fresnel_bounds_and_monotonicity(eps in 1.0001f64..1e4, de in 1e-3f64..10.0, zeta in 1e-6f64..50.0, extra in 0.0f64..50.0) {
        let y = zeta + extra;
        let (tm, te) = coefficients(eps, zeta, y);
        prop_assert!(0.0 <= te && te <= tm && tm < 1.0);
        let (tm2, te2) = coefficients(eps * (1.0 + de), zeta, y);
        prop_assert!(tm2 > tm && te2 > te);
    }

    #[test]
    fn fresnel_continuous_in_zeta(eps in 1.0001f64..1e3, zeta in 0.0f64..20.0, extra in 0.1f64..20.0) {
        let y = zeta + extra;
        let (tm, te) = coefficients(eps, zeta, y);
        let (tm2, te2) = coefficients(eps, zeta + 1e-9, y);
        prop_assert!((tm - tm2).abs() < 1e-6 && (te - te2).abs() < 1e-6);
    }

    #[test]
    fn dc_zero_frequency_jump(base in oscillator(), y in 0.01f64..30.0) {
        let eps0 = base.static_eps();
        let dc = PermittivityModel::DcAugmented(
            DcAugmentedModel::new(base, Conductivity::Activated { sigma0_300k: 1.0, gap_b_k: 100.0 }).unwrap(),
        );
        let pair = zero_freq_pair(&dc, None).unwrap();
        prop_assert_eq!(pair.r_par0, 1.0);
        prop_assert_eq!(pair.r_perp0, TeZero::Constant(0.0));
        let (tm, te) = coefficients(eps0, 1e-12, y);
        prop_assert!((tm - r0(eps0)).abs() < 1e-9 && te < 1e-9);
        prop_assert!(1.0 - tm > 1e-3);
    }

    #[test]
    fn c4_dissimilar_converges_linearly(x in 1.2f64..60.0) {
        let eq = c4_equal(x).unwrap();
        let d1 = (c4_dissimilar(x, x * 1.01).unwrap() - eq).abs();
        let d2 = (c4_dissimilar(x, x * 1.001).unwrap() - eq).abs();
        prop_assert!(d2 <= d1 / 5.0, "{} {}", d1, d2);
    }

    #[test]
    fn low_t_entropy_nonnegative_below_bracket_root(e1 in 1.01f64..60.0, e2 in 1.01f64..60.0, frac in 0.0f64..1.0) {
        let a = 1e-6;
        let root = 0.75 * leading_coefficient_dielectric(e1, e2).unwrap() / c4_dissimilar(e1, e2).unwrap();
        let tau = (frac * root).min(1.0);
        let s = low_t_dielectric(e1, e2, a, temperature_for_tau(a, tau), Quantity::Entropy).unwrap();
        prop_assert!(s.value >= 0.0);
        let swapped = low_t_dielectric(e2, e1, a, temperature_for_tau(a, tau), Quantity::Entropy).unwrap();
        let leading = 3.0 * 1.380_649e-23 * leading_coefficient_dielectric(e1, e2).unwrap() * tau * tau / (8.0 * PI * a * a);
        prop_assert!((s.value - swapped.value).abs() <= 1e-13 * leading);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kk_reproduces_damped_oscillator(c in 0.5f64..15.0, w0 in 1e14f64..1e16, xi_frac in 1e-3f64..30.0) {
        let gamma = 0.01 * w0;
        let lo = w0 * 1e-4;
        let r = 1e8f64.ln();
        let n = 40_001;
        let omega: Vec<f64> = (0..n).map(|i| lo * (r * i as f64 / (n - 1) as f64).exp()).collect();
        let eps2: Vec<f64> = omega
            .iter()
            .map(|&w| {
                let d = w0 * w0 - w * w;
                c * w0 * w0 * gamma * w / (d * d + gamma * gamma * w * w)
            })
            .collect();
        let table = OpticalDataTable::new(omega, eps2).unwrap();
        let xi = xi_frac * w0;
        let got = kk_to_imaginary_axis(&table, xi, TailModel::DEFAULT_LOW, TailModel::DEFAULT_HIGH).unwrap();
        let exact = 1.0 + c * w0 * w0 / (w0 * w0 + xi * xi + gamma * xi);
        let undamped = eval_eps(&PermittivityModel::Oscillator(OscillatorModel::single(1.0 + c, w0).unwrap()), xi, None).unwrap();
        prop_assert!((got - exact).abs() <= 1e-4 * exact);
        prop_assert!((got - undamped).abs() <= 1e-2 * undamped);
    }

    #[test]
    fn free_energy_swap_symmetric(m1 in finite_preset(), m2 in finite_preset(), a in 2e-7f64..3e-6, t in 50.0f64..500.0) {
        let ns = NumericalSettings::default();
        let cfg = PlateConfiguration::new(preset(m1).unwrap(), preset(m2).unwrap(), a, t).unwrap();
        let f = free_energy(&cfg, &ns).unwrap();
        let g = free_energy(&cfg.swapped(), &ns).unwrap();
        prop_assert!((f.value - g.value).abs() <= f.error + g.error);
    }

    #[test]
    fn truncation_and_quadrature_errors_are_sound(m1 in finite_preset(), m2 in finite_preset(), a in 2e-7f64..3e-6, t in 20.0f64..500.0) {
        let ns = NumericalSettings::default();
        let cfg = PlateConfiguration::new(preset(m1).unwrap(), preset(m2).unwrap(), a, t).unwrap();
        let f = free_energy(&cfg, &ns).unwrap();
        let more_terms = NumericalSettings { matsubara_rel_tol: ns.matsubara_rel_tol * 1e-3, ..ns };
        let g = free_energy(&cfg, &more_terms).unwrap();
        prop_assert!(g.diagnostics.terms_used >= f.diagnostics.terms_used);
        prop_assert!((f.value - g.value).abs() <= f.diagnostics.truncation_error + f.diagnostics.quadrature_error + g.diagnostics.quadrature_error);
        let finer = NumericalSettings { y_quad_rel_tol: ns.y_quad_rel_tol / 2.0, ..ns };
        let h = free_energy(&cfg, &finer).unwrap();
        prop_assert!((f.value - h.value).abs() <= f.diagnostics.quadrature_error + f.diagnostics.truncation_error + h.diagnostics.truncation_error);
    }
}
