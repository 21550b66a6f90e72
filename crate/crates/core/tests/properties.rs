use clr_lab::constants::{c_gamma, c_lower, c_simple, lt_classical, m_lower, m_simple};
use clr_lab::kinetic::{bound_at_lambda, g_t, hs_density, PotentialProfile, RadialSymbol, Sample};
use clr_lab::numerics::special::{factorial, ln_gamma};
use clr_lab::numerics::{integrate_1d, minimize_scalar, QuadratureSpec, SearchSpec};
use clr_lab::report::{fmt_num, Cell, Format, Table};
use clr_lab::scalefn::{l2_scalenorm, tail_functional, PowerSegment, ScaleFn};
use clr_lab::trial::{i_gamma_reduced, trial_objective, TrialParams};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monomials_on_unit_interval(n in 0u32..12) {
        let v = integrate_1d(|x| x.powi(n as i32), 0.0, 1.0, &q()).unwrap().value;
        prop_assert!(rel(v, 1.0 / (n as f64 + 1.0)) < 1e-10);
    }

    #[test]
    fn gamma_moments_on_half_line(k in 0u32..8) {
        let v = integrate_1d(|x: f64| (k as f64 * x.ln() - x).exp(), 0.0, f64::INFINITY, &q()).unwrap().value;
        prop_assert!(rel(v, factorial(k)) < 1e-9);
    }

    #[test]
    fn fractional_gamma_moments(s in 0.3f64..6.0) {
        let v = integrate_1d(|x: f64| ((s - 1.0) * x.ln() - x).exp(), 0.0, f64::INFINITY, &q()).unwrap().value;
        prop_assert!(rel(v, ln_gamma(s).exp()) < 1e-8);
    }

    #[test]
    fn integral_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = |x: f64| 1.0 / (1.0 + x * x);
        let g = |x: f64| (-x).exp();
        let both = integrate_1d(|x| a * f(x) + b * g(x), 0.0, f64::INFINITY, &q()).unwrap().value;
        let split = a * std::f64::consts::FRAC_PI_2 + b;
        prop_assert!((both - split).abs() < 1e-9 * (1.0 + split.abs()));
    }

    #[test]
    fn brent_finds_parabola_vertex(c in 0.2f64..20.0) {
        let m = minimize_scalar(|x| (x - c).powi(2) + 1.0, (0.01, 50.0), &SearchSpec::default()).unwrap();
        prop_assert!((m.argmin - c).abs() < 1e-6 * (1.0 + c));
        prop_assert!((m.min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dilation_and_inversion_preserve_norm(c in 0.05f64..20.0, e in 0.5f64..3.0) {
        let m = ScaleFn::piecewise(vec![
            PowerSegment::new(1.0, e, 0.0, 1.0),
            PowerSegment::new(1.0, -e, 1.0, f64::INFINITY),
        ]).unwrap();
        let base = l2_scalenorm(&m).unwrap();
        prop_assert!(rel(base, (1.0 / e).sqrt()) < 1e-12);
        prop_assert!(rel(l2_scalenorm(&m.dilate(c).unwrap()).unwrap(), base) < 1e-12);
        prop_assert!(rel(l2_scalenorm(&m.invert().unwrap()).unwrap(), base) < 1e-12);
    }

    #[test]
    fn tail_of_min_matches_closed_form(g in 2.2f64..15.0) {
        let t = tail_functional(&ScaleFn::min_t_inv(), g, &q()).unwrap();
        prop_assert!(rel(t.value, m_simple(g).unwrap()) < 1e-8);
        prop_assert!(t.truncation_bound >= 0.0);
    }

    #[test]
    fn constant_closed_forms_are_consistent(g in 2.05f64..60.0) {
        let (lo, hi) = (c_lower(g).unwrap(), c_simple(g).unwrap());
        prop_assert!(lo <= hi);
        prop_assert!(rel(c_gamma(g, m_lower(g).unwrap()).unwrap(), lo) < 1e-12);
        prop_assert!(rel(c_gamma(g, m_simple(g).unwrap()).unwrap(), hi) < 1e-12);
    }

    #[test]
    fn lt_classical_is_multiplicative(theta in 0.0f64..3.0, n in 1u32..6, extra in 1u32..6) {
        let d = n + extra;
        let whole = lt_classical(theta, d).unwrap();
        let split = lt_classical(theta, n).unwrap() * lt_classical(theta + n as f64 / 2.0, extra).unwrap();
        prop_assert!(rel(split, whole) < 1e-12);
    }

    #[test]
    fn power_g_t_is_homogeneous(d in 3u32..7, alpha in 0.4f64..1.4, u in 0.05f64..20.0, c in 0.1f64..10.0) {
        prop_assume!(2.0 * alpha < d as f64);
        let s = RadialSymbol::power(alpha, d).unwrap();
        let gamma = d as f64 / alpha;
        let a = g_t(&s, u, &q()).unwrap();
        let b = g_t(&s, c * u, &q()).unwrap();
        prop_assert!(rel(b, c.powf(gamma / 2.0) * a) < 1e-7);
    }

    #[test]
    fn bound_is_linear_in_weights(w in 0.01f64..100.0, lambda in 0.1f64..10.0) {
        let s = RadialSymbol::power(1.0, 3).unwrap();
        let unit = PotentialProfile::new(3, vec![Sample { u: 1.5, w: 1.0 }, Sample { u: 0.2, w: 2.0 }], "").unwrap();
        let scaled = PotentialProfile::new(3, vec![Sample { u: 1.5, w }, Sample { u: 0.2, w: 2.0 * w }], "").unwrap();
        let a = bound_at_lambda(&s, &unit, lambda, &q()).unwrap();
        let b = bound_at_lambda(&s, &scaled, lambda, &q()).unwrap();
        prop_assert!(rel(b, w * a) < 1e-12);
    }

    #[test]
    fn fmt_num_keeps_requested_digits(x in -1e9f64..1e9, digits in 3usize..12) {
        prop_assume!(x.abs() > 1e-3);
        let back: f64 = fmt_num(x, digits).parse().unwrap();
        prop_assert!(rel(back, x) <= 0.5 * 10f64.powi(1 - digits as i32) * 1.000001);
    }

    #[test]
    fn csv_rows_match_header(values in proptest::collection::vec(-1e3f64..1e3, 1..6)) {
        let mut t = Table::new((0..values.len()).map(|i| format!("c{i}")));
        t.push(values.iter().map(|&v| Cell::Num(v)).collect());
        t.push(vec![Cell::Missing; values.len()]);
        let out = t.render(Format::Csv, 6, false);
        for line in out.lines() {
            prop_assert_eq!(line.split(',').count(), values.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn objective_breakdown_is_consistent(
        p in 1u32..5, qq in 1u32..5, alpha in 1.3f64..8.0, beta in 1.3f64..8.0, g in 2.3f64..10.0,
    ) {
        let t = TrialParams::new(p, qq, alpha, beta).unwrap();
        let b = trial_objective(&t, g, &q()).unwrap();
        prop_assert!(b.norm1 > 0.0 && b.norm2 > 0.0 && b.tail > 0.0);
        prop_assert!(rel(b.mu, b.norm1 * b.norm2) < 1e-14);
        prop_assert!(rel(b.objective, b.mu.powf(g - 2.0) * b.tail) < 1e-12);
        prop_assert!(b.objective >= m_lower(g).unwrap() * (1.0 - 1e-9));
    }

    #[test]
    fn reduced_objective_is_swap_symmetric(
        p in 1u32..5, qq in 1u32..5, alpha in 1.3f64..8.0, beta in 1.3f64..8.0, g in 2.3f64..10.0,
    ) {
        let t = TrialParams::new(p, qq, alpha, beta).unwrap();
        let a = i_gamma_reduced(&t, g, &q()).unwrap();
        let b = i_gamma_reduced(&t.swapped(), g, &q()).unwrap();
        prop_assert!(rel(a, b) < 1e-9);
    }

    #[test]
    fn g_t_equals_hs_density_of_min(d in 3u32..6, alpha in 0.5f64..1.2, u in 0.1f64..10.0) {
        let t = RadialSymbol::power(alpha, d).unwrap();
        let lhs = g_t(&t, u, &q()).unwrap();
        let rhs = hs_density(&t.inverse_sqrt().unwrap(), &ScaleFn::min_t_inv(), u.sqrt(), &q()).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-7);
    }
}
