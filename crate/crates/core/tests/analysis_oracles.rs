#![allow(clippy::excessive_precision)]

use dafsim::analysis::{analytical_ber, conditional_gamma_max_cdf, outage_probability};
use dafsim::oracle::{ber_2d_quadrature, outage_lambda_average};
use dafsim::phy::{ModulationParams, PowerProfile};
use dafsim::specfn::QuadratureSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

#[test]
fn closed_form_matches_two_dimensional_quadrature() {
    let quad = QuadratureSpec::default();
    for modulation in [ModulationParams::dbpsk(), ModulationParams::dqpsk()] {
        for db in [10.0, 20.0, 30.0] {
            for q in [0.5, 0.7] {
                let profile = PowerProfile::from_db(db, q).unwrap();
                let closed = analytical_ber(&modulation, &profile, &quad).unwrap();
                let oracle = ber_2d_quadrature(&modulation, &profile);
                let rel = ((closed - oracle) / oracle).abs();
                assert!(rel < 1e-8, "M={} P={db} q={q}: {closed:e} vs {oracle:e}", modulation.order());
            }
        }
    }
}

#[test]
fn dbpsk_20db_reference_value() {
    // frozen from the 2-D quadrature oracle
    let profile = PowerProfile::from_db(20.0, 0.7).unwrap();
    let oracle = ber_2d_quadrature(&ModulationParams::dbpsk(), &profile);
    let closed = analytical_ber(&ModulationParams::dbpsk(), &profile, &QuadratureSpec::default()).unwrap();
    let frozen = 1.332_947_259_852_303e-3;
    assert!(((oracle - frozen) / frozen).abs() < 1e-12);
    assert!(((closed - frozen) / frozen).abs() < 1e-8);
}

#[test]
fn monotone_in_total_power() {
    let quad = QuadratureSpec::default();
    for modulation in [ModulationParams::dbpsk(), ModulationParams::dqpsk()] {
        let mut last = 1.0;
        for i in 0..=16 {
            let db = 2.5 * i as f64;
            let v = analytical_ber(&modulation, &PowerProfile::from_db(db, 0.7).unwrap(), &quad).unwrap();
            assert!(v < last);
            last = v;
        }
    }
}

#[test]
fn outage_matches_lambda_quadrature() {
    for (p0_total, a, g) in [(20.0, 1.0, 1.0), (2.0, 0.3, 0.05), (400.0, 3.0, 20.0), (50.0, 0.8, 80.0)] {
        let profile = PowerProfile::new(p0_total, 0.5).unwrap().with_amplification(a).unwrap();
        let closed = outage_probability(g, &profile).unwrap();
        let oracle = outage_lambda_average(g, &profile);
        assert!(((closed - oracle) / oracle).abs() < 1e-8, "{closed:e} vs {oracle:e}");
    }
}

#[test]
fn conditional_cdf_matches_max_of_exponentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 1_000_000;
    let hits = (0..n)
        .filter(|_| {
            let a: f64 = rng.sample(Exp1);
            let b: f64 = rng.sample(Exp1);
            a.max(b) <= 1.0
        })
        .count();
    let mc = hits as f64 / n as f64;
    let exact = conditional_gamma_max_cdf(1.0, 1.0, 1.0).unwrap();
    assert!((mc - exact).abs() < 0.002, "{mc} vs {exact}");
}
