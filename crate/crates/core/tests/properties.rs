use approx::assert_relative_eq;
use nitsche_lab::comparison::{hessian_check, osserman_check};
use nitsche_lab::metric::{CurvatureBound, RotMetric};
use nitsche_lab::minimal::WeierstrassData;
use nitsche_lab::radial::{
    critical_outer, nitsche_euclidean, radial_map_ndim, solve_bvp, BvpOutcome,
};
use nitsche_lab::report::check_bound;
use proptest::prelude::*;

fn bound_strategy() -> impl Strategy<Value = CurvatureBound> {
    prop_oneof![
        Just(CurvatureBound::zero()),
        (0.2f64..2.0).prop_map(|k| CurvatureBound::negative(k).unwrap()),
        (0.2f64..2.0).prop_map(|k| CurvatureBound::positive(k).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhs_is_at_least_one_and_reproducible(
        bound in bound_strategy(),
        frac in 0.05f64..0.45,
        u in 0.01f64..1.0,
        modulus in 0.01f64..2.0,
    ) {
        let cap = bound.cap_radius().unwrap_or(2.0);
        let rho1 = frac * cap;
        let rho2 = rho1 + u * (0.95 * cap - rho1);
        let r = check_bound(&bound, rho1, rho2, modulus).unwrap();
        prop_assert!(r.rhs >= 1.0);
        let psi = bound.psi_small(rho1).unwrap();
        let rhs = psi / (2.0 * rho1) * modulus * modulus + 1.0;
        prop_assert!((r.rhs - rhs).abs() <= 1e-12 * rhs);
        prop_assert!((r.margin - (rho2 / rho1 - rhs)).abs() <= 1e-12 * rhs);
        prop_assert_eq!(r.main_pass(), r.margin >= -r.tolerance);
    }

    #[test]
    fn critical_outer_grows_with_modulus(
        bound in bound_strategy(),
        rho1 in 0.1f64..0.5,
        t in 0.05f64..0.8,
    ) {
        let m = RotMetric::constant(bound);
        let a = critical_outer(&m, rho1, t).unwrap();
        let b = critical_outer(&m, rho1, 1.25 * t).unwrap();
        prop_assert!(a > rho1);
        prop_assert!(b > a);
    }

    #[test]
    fn distance_round_trip(bound in bound_strategy(), frac in 0.01f64..0.9) {
        let m = RotMetric::constant(bound);
        let rho = frac * m.distance_range().min(3.0);
        let s = m.inverse_distance(rho).unwrap();
        prop_assert!((m.distance(s).unwrap() - rho).abs() < 1e-10 * rho.max(1.0));
    }

    #[test]
    fn radial_map_matches_planar_bvp(r in 0.2f64..0.8, lift in 0.01f64..0.3, theta in 0.0f64..std::f64::consts::TAU, u in 0.0f64..1.0) {
        let crit = nitsche_euclidean(r).unwrap();
        let rho = crit * (1.0 - lift);
        let modulus = -r.ln();
        let BvpOutcome::Solved(p) = solve_bvp(&RotMetric::flat(), rho, 1.0, modulus).unwrap() else {
            panic!("below the critical radius a solution exists");
        };
        let t = u * modulus;
        let norm = r * t.exp();
        let x = [norm * theta.cos(), norm * theta.sin()];
        let y = radial_map_ndim(&x, r, rho).unwrap();
        let image = (y[0] * y[0] + y[1] * y[1]).sqrt();
        prop_assert!((image - p.eval(t).0).abs() < 1e-6, "{} vs {}", image, p.eval(t).0);
    }
}

#[test]
fn osserman_comparison_chains_through_the_plane() {
    let sphere = RotMetric::constant(CurvatureBound::positive(1.0).unwrap());
    let flat = RotMetric::flat();
    let hyper = RotMetric::constant(CurvatureBound::negative(1.0).unwrap());
    let rho_max = 1.2;
    let a = osserman_check(&hyper, &flat, rho_max).unwrap();
    let b = osserman_check(&flat, &sphere, rho_max).unwrap();
    let c = osserman_check(&hyper, &sphere, rho_max).unwrap();
    assert!(a.pass && b.pass);
    assert!(c.pass);
    assert!(c.min_margin >= a.min_margin.min(b.min_margin) - 1e-9);
}

#[test]
fn self_comparison_has_zero_margin() {
    let m = RotMetric::constant(CurvatureBound::negative(0.7).unwrap());
    let r = osserman_check(&m, &m, 1.0).unwrap();
    assert!(r.pass);
    assert!(r.max_abs_margin < 1e-7, "{}", r.max_abs_margin);
}

#[test]
fn catalog_surfaces_satisfy_flat_hessian_comparison() {
    let symmetric: Vec<_> = WeierstrassData::catalog()
        .into_iter()
        .filter(|w| w.verify_symmetric())
        .collect();
    assert!(!symmetric.is_empty());
    for w in symmetric {
        let m = w.rot_metric().unwrap();
        let rho_max = 0.5 * m.distance_range().min(1.0);
        let r = hessian_check(&m, rho_max, &CurvatureBound::zero()).unwrap();
        assert!(r.pass, "{}: min margin {}", w.name, r.min_margin);
    }
}

#[test]
fn expected_critical_radius_in_the_plane() {
    let r = 0.5;
    let outer = critical_outer(
        &RotMetric::flat(),
        nitsche_euclidean(r).unwrap(),
        -f64::ln(r),
    )
    .unwrap();
    assert_relative_eq!(outer, 1.0, max_relative = 1e-9);
}
