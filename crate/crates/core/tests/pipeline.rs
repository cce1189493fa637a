use nitsche_lab::metric::{CurvatureBound, RotMetric};
use nitsche_lab::minimal::{corollary_check, WeierstrassData};
use nitsche_lab::modulus::{capacity_masked, modulus_circular, MaskedDomain};
use nitsche_lab::pde::{max_harmonicity_residual, solve_dirichlet, AnnulusGrid, AnnulusMap};
use nitsche_lab::radial::{solve_bvp, BvpOutcome};
use nitsche_lab::report::{verify_end_to_end, SolverChoice, VerifyParams};

fn params(solver: SolverChoice) -> VerifyParams {
    VerifyParams {
        r1: 1.0,
        r2: 1.6,
        rho1: 0.4,
        rho2: 0.7,
        nr: 64,
        ntheta: 64,
        solver,
        orientation: Default::default(),
    }
}

#[test]
fn grid_solver_reproduces_the_radial_profile() {
    let m = RotMetric::constant(CurvatureBound::negative(1.0).unwrap());
    let grid = AnnulusGrid::new(1.0, 1.6, 64, 64).unwrap();
    let (map, report) = solve_dirichlet(grid, &m, 0.4, 0.7).unwrap();
    assert!(report.converged);
    assert!(max_harmonicity_residual(&map).unwrap() < 1e-6);

    let BvpOutcome::Solved(p) = solve_bvp(&m, 0.4, 0.7, grid.modulus()).unwrap() else {
        panic!("radial solution expected");
    };
    let radial = AnnulusMap::from_radial(grid, m, &p).unwrap();
    let worst = map
        .rho()
        .iter()
        .zip(radial.rho())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "max |Δρ| = {worst}");
}

#[test]
fn grid_and_radial_reports_agree() {
    let m = RotMetric::constant(CurvatureBound::negative(1.0).unwrap());
    let a = verify_end_to_end(&m, &params(SolverChoice::Grid)).unwrap();
    let b = verify_end_to_end(&m, &params(SolverChoice::Radial)).unwrap();
    assert!(a.passed() && b.passed());
    assert!((a.margin - b.margin).abs() < 1e-12);
    assert_eq!(a.provenance.grid, b.provenance.grid);
    assert_ne!(a.provenance.config_hash, b.provenance.config_hash);
}

#[test]
fn inversion_preserves_the_modulus() {
    let d = MaskedDomain::circular_cartesian(1.0, 2.0, 257).unwrap();
    let inv = d.inverted(1.8).unwrap();
    let a = capacity_masked(&d).unwrap().modulus;
    let b = capacity_masked(&inv).unwrap().modulus;
    let exact = modulus_circular(1.0, 2.0).unwrap();
    assert!((a - exact).abs() < 1e-2 * exact, "{a} vs {exact}");
    assert!((b - exact).abs() < 1e-2 * exact, "{b} vs {exact}");
}

#[test]
fn minimal_surface_corollary_on_enneper() {
    let w = WeierstrassData::by_name("enneper").unwrap();
    let r = corollary_check(&w, 0.3, 0.6, 129).unwrap();
    assert!(r.main_pass(), "margin {}", r.margin);
    assert!(r.modulus > 0.0);
}
