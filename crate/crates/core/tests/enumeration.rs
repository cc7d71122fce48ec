mod common;

use common::*;
use itertools::Itertools;
use num_traits::Zero;
use twophase_core::montecarlo::synthetic::{synthetic_population, Noise, SyntheticSpec};
use twophase_core::montecarlo::two_phase_sample_count;
use twophase_core::*;

fn design() -> DesignSpec {
    DesignSpec::new(6, 4, 3).unwrap()
}

#[test]
fn sample_r_matches_an_independent_double_loop() {
    let frame = fixture();
    let res = enumerate_exact(&frame, &design(), &EstimatorSpec::SampleR, u128::MAX).unwrap();
    let rho = Columns::of(&frame, &(0..6).collect::<Vec<_>>()).corr_yx();

    let mut values = Vec::new();
    for first in (0..6usize).combinations(4) {
        for second in first.iter().copied().combinations(3) {
            values.push(Columns::of(&frame, &second).corr_yx());
        }
    }
    assert_eq!(values.len() as u128, res.pairs_total);
    assert_eq!(res.pairs_used, 60);
    let mean = values.iter().sum::<f64>() / 60.0;
    let mse = values.iter().map(|v| (v - rho).powi(2)).sum::<f64>() / 60.0;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 60.0;
    assert_close("mean", res.mean, mean, 1e-12);
    assert_close("mse", res.mse, mse, 1e-10);
    assert_close("variance", res.variance, var, 1e-10);
    assert_close("bias", res.bias, mean - rho, 1e-10);
    assert!((res.mse - (res.variance + res.bias * res.bias)).abs() <= 1e-12);
}

/// `DifferenceType(c, 0, 0, 0)` is `r + c·(u − 1)`, so its exact mean is
/// `E(r) + c·E(u − 1)` with `E(u)` from rational sums.
#[test]
fn difference_type_is_linear_in_its_constant() {
    let frame = fixture();
    let base = enumerate_exact(&frame, &design(), &EstimatorSpec::SampleR, u128::MAX).unwrap();
    let mut sum_u = Q::zero();
    for first in (0..6usize).combinations(4) {
        let xf = mean(&Columns::of(&frame, &first).x);
        for second in first.iter().copied().combinations(3) {
            sum_u += mean(&Columns::of(&frame, &second).x) / &xf;
        }
    }
    let e_u_minus_1 = f(&(sum_u / qi(60))) - 1.0;
    for c in [-2.0, 0.5, 3.0] {
        let spec = EstimatorSpec::DifferenceType([c, 0.0, 0.0, 0.0]);
        let got = enumerate_exact(&frame, &design(), &spec, u128::MAX).unwrap();
        assert!(
            (got.mean - (base.mean + c * e_u_minus_1)).abs() <= 1e-12,
            "c = {c}"
        );
    }
}

#[test]
fn sample_counts() {
    assert_eq!(two_phase_sample_count(&design()), 60);
    assert_eq!(
        two_phase_sample_count(&DesignSpec::new(80, 25, 10).unwrap()),
        1_187_912_267_740_726_742_878_343_680
    );
    let err = enumerate_exact(&fixture(), &design(), &EstimatorSpec::SampleR, 59).unwrap_err();
    assert_eq!(err, Error::TooManySamples { count: 60, cap: 59 });
}

#[test]
fn gaussian_population_moments_follow_normal_theory() {
    let spec = SyntheticSpec {
        units: 200_000,
        x_loading: 0.0,
        y_loading: 0.5,
        noise: Noise::Gaussian,
    };
    let frame = synthetic_population(&spec, 7).unwrap();
    let m = population_moments(&frame).unwrap();
    let rho = m.rho().unwrap();
    assert!((rho - 0.5).abs() < 0.01);
    let theory = normal_theory_moments(rho).unwrap();
    for (p, q, mm) in [(2, 2, 0), (1, 3, 0), (3, 1, 0), (0, 4, 0), (4, 0, 0)] {
        let (got, want) = (m.d(p, q, mm).unwrap(), theory.d(p, q, mm).unwrap());
        assert!((got - want).abs() < 0.06, "d_{p}{q}{mm}: {got} vs {want}");
    }
    assert!((theory.d(2, 2, 0).unwrap() - (1.0 + 2.0 * rho * rho)).abs() < 1e-12);
    assert!((theory.d(1, 3, 0).unwrap() - 3.0 * rho).abs() < 1e-12);
}

#[test]
fn simulation_is_deterministic() {
    let frame = fixture();
    let spec = EstimatorSpec::TLinear([-0.5, 0.3, -0.8, 0.1]);
    let opts = SimulationOptions::new(2_000, 99);
    let a = simulate(&frame, &design(), &spec, &opts).unwrap();
    let b = simulate(&frame, &design(), &spec, &opts).unwrap();
    let c = simulate(&frame, &design(), &spec, &opts.with_workers(1)).unwrap();
    let d = simulate(&frame, &design(), &spec, &opts.with_workers(3)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a, d);
    let other = simulate(
        &frame,
        &design(),
        &spec,
        &SimulationOptions::new(2_000, 100),
    )
    .unwrap();
    assert_ne!(a.mean_estimate, other.mean_estimate);
}

#[test]
fn simulation_agrees_with_enumeration() {
    let frame = fixture();
    let spec = EstimatorSpec::SampleR;
    let exact = enumerate_exact(&frame, &design(), &spec, u128::MAX).unwrap();
    let sim = simulate(&frame, &design(), &spec, &SimulationOptions::new(20_000, 5)).unwrap();
    assert!((sim.mean_estimate - exact.mean).abs() <= 4.0 * sim.mc_standard_error_of_mean);
    assert!((sim.empirical_mse - exact.mse).abs() <= 4.0 * sim.mc_standard_error_of_mse);
}
