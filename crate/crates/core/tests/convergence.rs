use kgbeam::diffops::{
    derivative, envelope_identities, kg_residual, parabolic_residual, sample_points, second_derivative, StencilOrder,
    StencilSpec,
};
use kgbeam::currents::{continuity_report, ContinuityForm};
use kgbeam::{Beam, BeamMode, BeamParameters, Perturbation};

const TOL: f64 = 1e-6;

fn stencil(order: StencilOrder, richardson: bool) -> StencilSpec {
    StencilSpec { steps: [1.0; 4], order, richardson }
}

/// Error of the first and second derivative of `exp(x) sin(3x)` at `x0 = 0.3` for step `h`.
fn errors(h: f64, st: &StencilSpec) -> (f64, f64) {
    let x0 = 0.3f64;
    let f = |dx: f64| (x0 + dx).exp() * (3.0 * (x0 + dx)).sin();
    let (s, c) = (3.0 * x0).sin_cos();
    let d1 = x0.exp() * (s + 3.0 * c);
    let d2 = x0.exp() * (-8.0 * s + 6.0 * c);
    ((derivative(f, h, st) - d1).abs(), (second_derivative(f, h, st) - d2).abs())
}

#[test]
fn stencils_converge_at_their_nominal_order() {
    for (order, richardson, expected) in [
        (StencilOrder::Second, false, 4.0),
        (StencilOrder::Second, true, 16.0),
        (StencilOrder::Fourth, false, 16.0),
        (StencilOrder::Fourth, true, 64.0),
    ] {
        let st = stencil(order, richardson);
        let h = 0.1;
        let (a1, a2) = errors(h, &st);
        let (b1, b2) = errors(h / 2.0, &st);
        for ratio in [a1 / b1, a2 / b2] {
            assert!(ratio > 0.75 * expected && ratio < 1.3 * expected, "{order:?} {richardson}: {ratio}");
        }
    }
}

#[test]
fn beam_residual_shrinks_sixteenfold_per_halving() {
    let p = BeamParameters::reference(BeamMode::Hg { m: 1, n: 1 });
    let beam = Beam::new(p);
    let pts = sample_points(&p, 32, 11);
    let coarse = kg_residual(&beam, &pts, &StencilSpec::with_relative_step(&p, 0.1)).unwrap();
    let fine = kg_residual(&beam, &pts, &StencilSpec::with_relative_step(&p, 0.05)).unwrap();
    assert!(coarse.coarse_stencil && !fine.coarse_stencil);
    let ratio = coarse.max_abs / fine.max_abs;
    assert!(ratio >= 12.0, "ratio {ratio}");
}

#[test]
fn negative_controls_exceed_tolerance_by_three_decades() {
    let threshold = 1e3 * TOL;
    for mode in [BeamMode::Hg { m: 0, n: 0 }, BeamMode::Hg { m: 2, n: 1 }, BeamMode::Lg { l: 1, p: 0 }] {
        let p = BeamParameters::reference(mode);
        let st = StencilSpec::for_params(&p);
        let pts = sample_points(&p, 64, 23);
        let gouy = Beam::new(p).with_perturbation(Perturbation::wrong_gouy(mode));
        let b = Beam::new(p).with_perturbation(Perturbation::scaled_b(1.1));
        let axial = Beam::new(p).with_perturbation(Perturbation::skewed_axial(1.1));
        let decay = Beam::new(p).with_perturbation(Perturbation::no_decay());
        let measured = [
            ("gouy kg", kg_residual(&gouy, &pts, &st).unwrap().max_rel),
            ("gouy parabolic", parabolic_residual(&gouy, &pts, &st).unwrap().max_rel),
            ("b parabolic", parabolic_residual(&b, &pts, &st).unwrap().max_rel),
            ("axial envelope", envelope_identities(&axial, &pts, &st).unwrap().worst().max_rel),
            ("decay continuity", continuity_report(&decay, &pts, &st, ContinuityForm::Full).unwrap().max_rel),
        ];
        for (name, r) in measured {
            assert!(r > threshold, "{mode} {name}: {r}");
        }
        let exact = kg_residual(&Beam::new(p), &pts, &st).unwrap();
        assert!(exact.passes(TOL));
    }
}
