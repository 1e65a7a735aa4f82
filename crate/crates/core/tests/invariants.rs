use kgbeam::currents::{axial_probability_density, current_analytic};
use kgbeam::diffops::{kg_residual, sample_points, StencilSpec};
use kgbeam::potentials::{quantum_potential, scalar_potential, scalar_potential_expansion};
use kgbeam::wavefield::{beam_radius, probability_density};
use kgbeam::{
    boost_event, boost_wavevector, derive_parameters, Beam, BeamMode, BeamParameters, Event, EventCoordinates,
    FourVector, UnitSystem,
};
use proptest::prelude::*;

fn params(m0: f64, w0: f64, k3: f64, mode: BeamMode) -> BeamParameters {
    derive_parameters(m0, w0, k3, mode, 1.0, UnitSystem::natural()).unwrap()
}

fn hg_mode() -> impl Strategy<Value = BeamMode> {
    (0u32..=3, 0u32..=3).prop_map(|(m, n)| BeamMode::Hg { m, n })
}

fn any_mode() -> impl Strategy<Value = BeamMode> {
    prop_oneof![hg_mode(), (-2i32..=2, 0u32..=1).prop_map(|(l, p)| BeamMode::Lg { l, p })]
}

/// Relative coordinates within a few radii and Rayleigh ranges of the waist.
fn point(p: &BeamParameters, u: [f64; 4]) -> EventCoordinates {
    let s = 4.0 * p.b * u[2];
    let w = beam_radius(p, s);
    let tau = 2.0 * p.b * u[3] / p.units.c;
    EventCoordinates::new(2.0 * w * u[0], 2.0 * w * u[1], s - p.units.c * tau, tau)
}

fn unit4() -> impl Strategy<Value = [f64; 4]> {
    [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]
}

/// `j / |Psi|^2` written out from the phase of an HG mode.
fn velocity_oracle(p: &BeamParameters, d: EventCoordinates) -> FourVector {
    let f = p.units.hbar / p.m0;
    let s = d.xi3 + p.units.c * d.tau;
    let b = p.b;
    let w0sq = p.w0 * p.w0;
    let rho2 = d.xi1 * d.xi1 + d.xi2 * d.xi2;
    let big = s * s + 4.0 * b * b;
    let trans = 4.0 * b * s / (w0sq * big);
    let axial = 2.0 * b * p.mode_constant / big + 2.0 * b * rho2 * (s * s - 4.0 * b * b) / (w0sq * big * big);
    FourVector::new(f * trans * d.xi1, f * trans * d.xi2, f * (p.k3 + p.kappa - axial), f * (p.k4 - p.kappa + axial))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_is_boost_invariant(
        mode in any_mode(),
        m0 in 0.2f64..3.0,
        w0 in 0.5f64..4.0,
        k3 in -2.0f64..2.0,
        beta in -0.95f64..0.95,
        u in unit4(),
    ) {
        let p = params(m0, w0, k3, mode);
        let (k3b, _) = boost_wavevector(p.k3, p.k4, beta).unwrap();
        let pb = derive_parameters(p.m0, p.w0, k3b, p.mode, p.length, p.units).unwrap();
        let d = point(&p, u);
        let e = Event::new(d.xi1, d.xi2, d.xi3, d.tau);
        let before = Beam::new(p).psi_at(e).norm_sqr();
        let after = Beam::new(pb).psi_at(boost_event(e, beta, p.units).unwrap()).norm_sqr();
        prop_assert!((after - before).abs() <= 1e-9 * before.max(1e-300), "{before} vs {after}");
    }

    #[test]
    fn boosted_wavevector_keeps_its_norm(k3 in -5.0f64..5.0, extra in 0.01f64..5.0, beta in -0.99f64..0.99) {
        let k4 = (k3 * k3 + extra).sqrt();
        let (a, b) = boost_wavevector(k3, k4, beta).unwrap();
        prop_assert!(((b * b - a * a) - extra).abs() < 1e-11 * (k4 * k4) / (1.0 - beta * beta));
        prop_assert!(b > 0.0);
    }

    #[test]
    fn axial_density_is_modulus_squared(
        mode in hg_mode(),
        m0 in 0.2f64..3.0,
        w0 in 0.5f64..4.0,
        k3 in -2.0f64..2.0,
        u in unit4(),
    ) {
        let p = params(m0, w0, k3, mode);
        let d = point(&p, u);
        let rho = probability_density(&p, d);
        prop_assume!(rho > 0.0);
        let axial = axial_probability_density(&p, d).unwrap();
        prop_assert!((axial - rho).abs() <= 1e-10 * rho, "{axial} vs {rho}");
    }

    #[test]
    fn plane_wave_plus_potential_is_flow_velocity(
        mode in hg_mode(),
        m0 in 0.2f64..3.0,
        w0 in 0.5f64..4.0,
        k3 in -2.0f64..2.0,
        u in unit4(),
    ) {
        let p = params(m0, w0, k3, mode);
        let d = point(&p, u);
        let f = p.units.hbar / p.m0;
        let split = FourVector::axial(f * p.k3, f * p.k4) + quantum_potential(&p, d).unwrap();
        let oracle = velocity_oracle(&p, d);
        prop_assert!((split - oracle).max_abs() <= 1e-10 * oracle.max_abs());
        let rho = probability_density(&p, d);
        prop_assume!(rho > 1e-200);
        let v = current_analytic(&p, d).unwrap().velocity();
        prop_assert!((v - oracle).max_abs() <= 1e-10 * oracle.max_abs());
    }

    #[test]
    fn scalar_potential_matches_its_expansion(
        mode in hg_mode(),
        m0 in 0.2f64..3.0,
        w0 in 0.5f64..4.0,
        k3 in -2.0f64..2.0,
        u in unit4(),
    ) {
        let p = params(m0, w0, k3, mode);
        let d = point(&p, u);
        let v2 = scalar_potential(&p, d).unwrap();
        let ex = scalar_potential_expansion(&p, d).unwrap();
        let w = beam_radius(&p, d.s(p.units.c));
        let scale = 4.0 * p.units.hbar.powi(2) * (p.mode_constant / (w * w) + d.rho_sq() / w.powi(4));
        prop_assert!((v2 - ex).abs() <= 1e-10 * scale);
        // zero exactly on the circle rho = sqrt(N) w
        let r = p.mode_constant.sqrt() * w;
        let on_circle = EventCoordinates::new(r, 0.0, d.xi3, d.tau);
        prop_assert!(scalar_potential(&p, on_circle).unwrap().abs() <= 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_modes_solve_klein_gordon(
        mode in any_mode(),
        m0 in 0.0f64..3.0,
        w0 in 0.8f64..4.0,
        k3 in -2.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let p = params(m0, w0, k3, mode);
        let r = kg_residual(&Beam::new(p), &sample_points(&p, 16, seed), &StencilSpec::for_params(&p)).unwrap();
        prop_assert!(r.passes(1e-6), "{r:?}");
    }
}
