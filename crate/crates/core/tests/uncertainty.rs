use proptest::prelude::*;
use robin_box::momentum::{expval_pi, expval_pr, MomentumExtension};
use robin_box::random::random_state;
use robin_box::spectrum::*;
use robin_box::uncertainty::*;
use robin_box::wave::l2_distance;
use robin_box::{observables_of, BoxConfig, Mode, ModeSum, Quadrature, WaveFunction, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn unit() -> BoxConfig {
    BoxConfig::new(1.0, 1.0).unwrap()
}

fn linear_zero(cfg: BoxConfig) -> ModeSum {
    ModeSum::single(cfg, Mode::Linear { c0: 0.0, c1: (12.0 / cfg.l.powi(3)).sqrt() })
}

fn named_states(cfg: BoxConfig) -> Vec<(&'static str, ModeSum, RobinBC)> {
    let l = cfg.l;
    vec![
        ("dirichlet ground", dirichlet_spectrum(cfg, 0).eigenfunction(0), Family::Dirichlet.bc()),
        ("linear zero mode", linear_zero(cfg), Family::Symmetric(-2.0 / l).bc()),
        (
            "antisymmetric negative level",
            antisymmetric_robin_spectrum(cfg, 1.0 / l, 0).unwrap().eigenfunction(0),
            Family::Antisymmetric(1.0 / l).bc(),
        ),
        ("constant", neumann_spectrum(cfg, 0).eigenfunction(0), Family::Neumann.bc()),
    ]
}

#[test]
fn commutator_on_named_states() {
    let cfg = BoxConfig::new(1.0, 1.6).unwrap();
    let q = Quadrature::standard(cfg);
    for (name, psi, _) in named_states(cfg) {
        let c = commutator_expectation_x_pr(&psi, &q).unwrap();
        assert!((c - I).norm() <= 1e-8, "{name}: {c}");
        assert!(commutator_expectation_x_pi(&psi).norm() <= 1e-10);
    }
}

#[test]
fn commutator_from_the_momentum_series() {
    let cfg = unit();
    let q = Quadrature::standard(cfg);
    let psi = dirichlet_spectrum(cfg, 0).eigenfunction(0);
    let c = commutator_spectral_series(&psi, &MomentumExtension::new(0.0, 0.0).unwrap(), 2000, &q).unwrap();
    assert!((c - I).norm() <= 1e-4, "{c}");
}

#[test]
fn inequality_holds_on_named_states() {
    let cfg = unit();
    let q = Quadrature::standard(cfg);
    for (name, psi, bc) in named_states(cfg) {
        let r = kinetic_inequality_report(&psi, &bc, &q).unwrap();
        assert!(r.holds, "{name}: {r:?}");
        assert!(r.anticomm_imag.abs() <= 1e-10, "{name}: {r:?}");
    }
}

#[test]
fn antisymmetric_negative_level_saturates() {
    for gl in [1.0, -2.0, 4.0] {
        let cfg = BoxConfig::new(1.0, 1.2).unwrap();
        let q = Quadrature::standard(cfg);
        let g = gl / cfg.l;
        let psi = antisymmetric_robin_spectrum(cfg, g, 0).unwrap().eigenfunction(0);
        let r = kinetic_inequality_report(&psi, &Family::Antisymmetric(g).bc(), &q).unwrap();
        assert!(r.p_r.abs() <= 1e-9 && r.anticomm.abs() <= 1e-9);
        assert!(r.cross_term.abs() <= 1e-9);
        assert!(r.slack.abs() <= 1e-9, "{r:?}");
        assert!((r.lhs + g * g).abs() <= 1e-9 * (1.0 + g * g));
    }
}

#[test]
fn linear_zero_mode_report() {
    let cfg = BoxConfig::new(1.0, 1.5).unwrap();
    let q = Quadrature::standard(cfg);
    let psi = linear_zero(cfg);
    let r = kinetic_inequality_report(&psi, &Family::Symmetric(-2.0 / cfg.l).bc(), &q).unwrap();
    assert!(r.anticomm.abs() <= 1e-9);
    assert!(r.holds);
    assert!(16.0 / 5.0 >= r.anticomm * r.anticomm);
    assert!((r.delta_x.powi(2) - 3.0 * cfg.l * cfg.l / 20.0).abs() <= 1e-12);
    let obs = observables_of(&psi, &q).unwrap();
    assert!((obs.var_x - 3.0 * cfg.l * cfg.l / 20.0).abs() <= 1e-12);
}

#[test]
fn unnormalized_or_foreign_states_are_rejected() {
    let cfg = unit();
    let q = Quadrature::standard(cfg);
    let psi = dirichlet_spectrum(cfg, 0).eigenfunction(0);
    assert!(kinetic_inequality_report(&psi, &Family::Neumann.bc(), &q).is_err());
    let twice = ModeSum::new(cfg, psi.modes.clone(), vec![C64::new(2.0, 0.0)]);
    assert!(kinetic_inequality_report(&twice, &Family::Dirichlet.bc(), &q).is_err());
}

#[test]
fn generalized_uncertainty_examples() {
    let cfg = unit();
    let q = Quadrature::standard(cfg);
    let ground = dirichlet_spectrum(cfg, 0).eigenfunction(0);
    let g = generalized_uncertainty(&ground, &q).unwrap();
    // Dx^2 = L^2 (1/12 - 1/(2 pi^2)), D(-i d/dx) = pi / L, rhs = 1/2
    let dx = (1.0 / 12.0 - 0.5 / (std::f64::consts::PI.powi(2))).sqrt();
    assert!((g.lhs - std::f64::consts::PI * dx).abs() < 1e-12);
    assert!((g.rhs - 0.5).abs() < 1e-12 && g.slack > 0.0);
    let constant = neumann_spectrum(cfg, 0).eigenfunction(0);
    let c = generalized_uncertainty(&constant, &q).unwrap();
    assert!(c.rhs.abs() < 1e-12 && c.lhs.abs() < 1e-12);
    assert!(expval_pr(&constant, &q).unwrap().abs() < 1e-15 && expval_pi(&constant).abs() < 1e-15);
    let gamma = 1.7;
    let s = saturating_state(cfg, C64::new(0.0, 0.0), I / gamma, &q).unwrap();
    let e = generalized_uncertainty(&s, &q).unwrap();
    assert!(e.slack.abs() <= 1e-9, "{e:?}");
}

#[test]
fn saturating_state_examples() {
    let cfg = BoxConfig::new(1.0, 1.3).unwrap();
    let q = Quadrature::standard(cfg);
    let gamma = 0.8;
    let s = saturating_state(cfg, C64::new(0.0, 0.0), I / gamma, &q).unwrap();
    let negative = antisymmetric_robin_spectrum(cfg, gamma, 0).unwrap().eigenfunction(0);
    assert!(l2_distance(&s, &negative, &q) < 1e-12);
    let flat = saturating_state(cfg, C64::new(0.0, 0.0), C64::new(1e8 * cfg.l, 0.0), &q).unwrap();
    let constant = neumann_spectrum(cfg, 0).eigenfunction(0);
    // equal up to a global phase
    let phase = flat.value(0.0) / flat.value(0.0).norm();
    let aligned = ModeSum::new(cfg, constant.modes.clone(), vec![phase]);
    assert!(l2_distance(&flat, &aligned, &q) <= 1e-7);
    let quad_pot = saturating_state(cfg, C64::new(1.0 / cfg.l, 0.0), I * cfg.l, &q).unwrap();
    assert!(quad_pot.eigen_residual(&q).unwrap() <= 1e-8);
}

#[test]
fn saturating_states_close_the_kinetic_inequality() {
    let cfg = unit();
    let q = Quadrature::standard(cfg);
    let h = cfg.half();
    for (a, c) in [(0.0, 0.7), (0.5, 1.0), (-1.3, 2.0)] {
        let s = saturating_state(cfg, C64::new(a, 0.0), I * c, &q).unwrap();
        let bc = RobinBC::robin((1.0 + a * h) / c, -(1.0 - a * h) / c).unwrap();
        let r = kinetic_inequality_report(&s, &bc, &q).unwrap();
        assert!(r.slack.abs() <= 1e-9, "a = {a}, c = {c}: {r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn commutator_on_random_states(seed in 0u64..1_000_000, which in 0usize..4) {
        let cfg = unit();
        let q = Quadrature::standard(cfg);
        let fam = [Family::Dirichlet, Family::Neumann, Family::Symmetric(-3.0), Family::Antisymmetric(1.0)][which];
        let s = random_state(&fam.spectrum(cfg, 5).unwrap(), 6, seed).unwrap();
        let c = commutator_expectation_x_pr(&s.wave(), &q).unwrap();
        prop_assert!((c - I).norm() <= 1e-8);
        prop_assert!(commutator_expectation_x_pi(&s.wave()).norm() <= 1e-10);
    }

    #[test]
    fn root_sum_matches_simple_bound(seed in 0u64..1_000_000) {
        let cfg = unit();
        let q = Quadrature::standard(cfg);
        let s = random_state(&symmetric_robin_spectrum(cfg, 1.0, 7).unwrap(), 8, seed).unwrap();
        let g = generalized_uncertainty(&s.wave(), &q).unwrap();
        prop_assert!((g.rhs - g.root_sum).abs() <= 1e-10);
        prop_assert!(g.slack >= -1e-10);
    }

    #[test]
    fn kinetic_inequality_on_random_robin_states(seed in 0u64..1_000_000, which in 0usize..5, kind in 0usize..3) {
        let cfg = BoxConfig::new(1.0, 1.0).unwrap();
        let q = Quadrature::standard(cfg);
        let gl = [-3.0, -1.0, 0.0, 1.0, 3.0][which];
        let fam = match kind {
            0 => Family::Symmetric(gl),
            1 => Family::Antisymmetric(gl),
            _ => Family::General(RobinBC::robin(gl, 0.5 - gl).unwrap()),
        };
        let s = random_state(&fam.spectrum(cfg, 7).unwrap(), 8, seed).unwrap();
        let r = kinetic_inequality_report(&s.wave(), &fam.bc(), &q).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        prop_assert!(r.anticomm_imag.abs() <= 1e-10);
    }
}
