mod common;

use common::*;
use ::locsme::array_model::complex_gaussian;
use ::locsme::harness::{aggregate_sinr_db, derive_seed, TrialSettings};
use ::locsme::linalg::spectral_norm_hermitian;
use ::locsme::mvdr::SMI_FALLBACK_LOAD;
use ::locsme::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn identity_projector(m: usize) -> Projection64 {
    ProjectionOperator::from_sector(&CMat64::identity(m, m), m).unwrap()
}

fn close(a: &CVec64, b: &CVec64, tol: f64) -> bool {
    norm(&(a - b)) <= tol
}

#[test]
fn golden_trace_unit_initialization() {
    // w(0) = 1 gives y = 1, s = e1, nu = 1/2, d = [1/2, 1/2], a = [1, 1]/sqrt 2.
    // R = diag(1, 0) shrinks to I/2; |a^H e1|^2 - 1 < 0 so sigma1 = 0;
    // INC: I/2 + I/2 = I, rescaled to 2I; w = a.
    let cfg = LocsmeConfig { rho_init: 1.0, ..LocsmeConfig::default() };
    let mut bf = Locsme64::new(identity_projector(2), &cvec(&[(1.0, 0.0), (1.0, 0.0)]), 1.0, cfg).unwrap();
    let t = bf.process_traced(&cvec(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
    let h = 0.5f64.sqrt();
    assert_eq!(t.output, c(1.0, 0.0));
    assert!(close(&t.d_hat, &cvec(&[(0.5, 0.0), (0.5, 0.0)]), 1e-15));
    assert_eq!((t.rho_used, t.rho0_used), (1.0, 1.0));
    assert!(fro(&(t.r_tilde - CMat64::identity(2, 2) * c(0.5, 0.0))) < 1e-15);
    assert!((bf.vec_state.rho - 1.0).abs() < 1e-15);
    assert!((bf.mat_state.rho0 - 1.0).abs() < 1e-15);
    assert!(close(&bf.a_hat, &cvec(&[(h, 0.0), (h, 0.0)]), 1e-14));
    assert_eq!(bf.sigma1_sq_hat, 0.0);
    assert!(fro(&(&bf.inc_hat - CMat64::identity(2, 2) * c(2.0, 0.0))) < 1e-14);
    assert!(close(&bf.weights, &cvec(&[(h, 0.0), (h, 0.0)]), 1e-14));
}

#[test]
fn golden_trace_default_initialization() {
    // rho = 1/2: d = [3/4, 1/4], next rho = 1 / 1.25 = 0.8, a = [3, 1]/sqrt 10.
    // R~ = diag(3/4, 1/4); sigma1 = max(0, 0.9 - 1) = 0;
    // INC: diag(3/2, 1) rescaled to diag(2, 4/3); w = sqrt 10 / 7 [2, 1].
    let mut bf = Locsme64::new(
        identity_projector(2),
        &cvec(&[(1.0, 0.0), (1.0, 0.0)]),
        1.0,
        LocsmeConfig::default(),
    )
    .unwrap();
    let t = bf.process_traced(&cvec(&[(1.0, 0.0), (0.0, 0.0)])).unwrap();
    assert!(close(&t.d_hat, &cvec(&[(0.75, 0.0), (0.25, 0.0)]), 1e-15));
    assert!((bf.vec_state.rho - 0.8).abs() < 1e-15);
    assert!((bf.mat_state.rho0 - 0.8).abs() < 1e-15);
    let r10 = 10f64.sqrt();
    assert!(close(&bf.a_hat, &cvec(&[(3.0 / r10, 0.0), (1.0 / r10, 0.0)]), 1e-14));
    assert_eq!(bf.sigma1_sq_hat, 0.0);
    let expected_inc = CMat64::from_diagonal(&cvec(&[(2.0, 0.0), (4.0 / 3.0, 0.0)]));
    assert!(fro(&(&bf.inc_hat - expected_inc)) < 1e-14);
    assert!(close(&bf.weights, &cvec(&[(2.0 * r10 / 7.0, 0.0), (r10 / 7.0, 0.0)]), 1e-14));
}

fn stream(scenario: &Scenario, seed: u64) -> (SnapshotSource<f64>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized = realize_mismatch::<f64, _>(&mut rng, scenario).unwrap();
    (SnapshotSource::new(scenario, realized).unwrap(), rng)
}

#[test]
fn per_snapshot_invariants_hold() {
    for mismatch in [
        MismatchModel::None,
        MismatchModel::Coherent(Scattering::default()),
        MismatchModel::Incoherent(Scattering::default()),
    ] {
        let s = Scenario { mismatch, ..Scenario::default() };
        let (src, mut rng) = stream(&s, 77);
        let mut bf = Locsme64::from_scenario(&s, LocsmeConfig::default()).unwrap();
        for i in 1..=200 {
            let (x, _) = src.draw(&mut rng);
            let t = bf.process_traced(&x).unwrap();
            assert!((norm(&bf.a_hat) - 1.0).abs() < 1e-12, "snapshot {i}");
            assert!((dot(&bf.weights, &bf.a_hat) - c(1.0, 0.0)).norm() < 1e-10, "snapshot {i}");
            let inc_norm = spectral_norm_hermitian(&bf.inc_hat);
            assert!((inc_norm - 2.0).abs() < 1e-8 * 2.0, "snapshot {i}");
            let r_hat = bf.mat_state.scm().unwrap();
            let (tr_t, tr_r) = (t.r_tilde.trace().re, r_hat.trace().re);
            assert!((tr_t - tr_r).abs() < 1e-10 * tr_r, "snapshot {i}");
            for rho in [t.rho_used, t.rho0_used, bf.vec_state.rho, bf.mat_state.rho0] {
                assert!((0.0..=1.0).contains(&rho));
            }
        }
    }
}

#[test]
fn steering_estimate_aligns_without_mismatch() {
    let s = Scenario {
        mismatch: MismatchModel::None,
        snr_db: 20.0,
        ..Scenario::default()
    };
    let a = s.presumed_steering::<f64>().unwrap();
    let mut total = 0.0;
    for trial in 0..100 {
        let (src, mut rng) = stream(&s, derive_seed(99, 0, trial));
        let mut bf = Locsme64::from_scenario(&s, LocsmeConfig::default()).unwrap();
        for _ in 0..50 {
            let (x, _) = src.draw(&mut rng);
            bf.process(&x).unwrap();
        }
        total += dot(&bf.a_hat, &a).norm() / norm(&a);
    }
    let mean = total / 100.0;
    assert!(mean > 0.99, "mean alignment {mean}");
}

fn terminal_means(s: &Scenario, n_snapshots: usize) -> (f64, f64) {
    let settings = TrialSettings::<f64> {
        algorithms: vec![Algorithm::Optimal, Algorithm::Locsme],
        ..TrialSettings::default()
    };
    let (mut opt, mut loc) = (Vec::new(), Vec::new());
    for trial in 0..100 {
        let r = run_trial(s, derive_seed(5, 0, trial), n_snapshots, &settings).unwrap();
        opt.push(r.terminal(Algorithm::Optimal).unwrap());
        loc.push(r.terminal(Algorithm::Locsme).unwrap());
    }
    (aggregate_sinr_db(&opt).0, aggregate_sinr_db(&loc).0)
}

#[test]
fn near_optimal_without_mismatch() {
    let s = Scenario {
        mismatch: MismatchModel::None,
        snr_db: 20.0,
        ..Scenario::default()
    };
    let (opt, loc) = terminal_means(&s, 50);
    assert!(opt - loc < 3.0, "optimal {opt} dB, LOCSME {loc} dB");
}

#[test]
fn more_snapshots_do_not_hurt() {
    let s = Scenario {
        mismatch: MismatchModel::None,
        ..Scenario::default()
    };
    let (_, at10) = terminal_means(&s, 10);
    let (_, at50) = terminal_means(&s, 50);
    assert!(at50 >= at10, "10 snapshots {at10} dB, 50 snapshots {at50} dB");
}

#[test]
fn noise_only_power_estimate_matches_clamped_expectation() {
    // |a^H n|^2 is exponential with mean sigma^2 for unit a, so the unclamped
    // estimate averages to 0 and the clamped one to sigma^2 / e.
    let g = UlaGeometry::half_wavelength(12).unwrap();
    let a = steering_vector::<f64>(&g, 10.0).unwrap() / c(12f64.sqrt(), 0.0);
    let sigma2 = 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 100_000;
    let (mut raw, mut clamped) = (0.0, 0.0);
    for _ in 0..n {
        let x = CVec64::from_fn(12, |_, _| complex_gaussian::<f64, _>(&mut rng, sigma2));
        raw += dot(&a, &x).norm_sqr() - sigma2;
        clamped += estimate_power(&a, &x, sigma2);
    }
    let (raw, clamped) = (raw / n as f64, clamped / n as f64);
    assert!(raw.abs() < 0.02, "unclamped mean {raw}");
    let expected = sigma2 * (-1f64).exp();
    assert!((clamped - expected).abs() / expected < 0.02, "clamped mean {clamped}");
}

#[test]
fn smi_matches_dense_inverse() {
    let s = Scenario::default();
    let (src, mut rng) = stream(&s, 4242);
    let mut scm = CMat64::zeros(12, 12);
    for _ in 0..100 {
        let (x, _) = src.draw(&mut rng);
        scm += &x * x.adjoint();
    }
    scm /= c(100.0, 0.0);
    let a = s.presumed_steering::<f64>().unwrap();
    let sol = smi_weights(&scm, &a, 0.0).unwrap();
    assert!(sol.fallback_load.is_none());
    let ra = gauss_jordan_inverse(&scm) * &a;
    let expected = &ra / dot(&a, &ra);
    assert!(norm(&(sol.weights - &expected)) / norm(&expected) < 1e-8);
}

#[test]
fn smi_falls_back_when_rank_deficient() {
    let s = Scenario::default();
    let (src, mut rng) = stream(&s, 1);
    let mut scm = CMat64::zeros(12, 12);
    for _ in 0..5 {
        let (x, _) = src.draw(&mut rng);
        scm += &x * x.adjoint();
    }
    let a = s.presumed_steering::<f64>().unwrap();
    let sol = smi_weights(&scm, &a, 0.0).unwrap();
    let load = sol.fallback_load.expect("fallback expected");
    assert!((load - SMI_FALLBACK_LOAD * scm.trace().re / 12.0).abs() < 1e-20);
    assert!((dot(&sol.weights, &a) - c(1.0, 0.0)).norm() < 1e-8);
}

#[test]
fn optimal_beats_random_weights() {
    let s = Scenario { mismatch: MismatchModel::None, ..Scenario::default() };
    let a = s.presumed_steering::<f64>().unwrap();
    let inc = s.true_inc::<f64>().unwrap();
    let rs = &a * a.adjoint() * c(s.desired_power(), 0.0);
    let best = output_sinr(&optimal_weights(&inc, &a).unwrap(), &rs, &inc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let w = CVec64::from_fn(12, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let w = &w / c(norm(&w), 0.0);
        if let Ok(v) = output_sinr(&w, &rs, &inc) {
            assert!(best > v);
        }
    }
}

#[test]
fn white_inc_optimum_is_matched_filter() {
    let g = UlaGeometry::half_wavelength(6).unwrap();
    let a = steering_vector::<f64>(&g, -25.0).unwrap();
    let w = optimal_weights(&(CMat64::identity(6, 6) * c(0.3, 0.0)), &a).unwrap();
    assert!(norm(&(w - &a / c(6.0, 0.0))) < 1e-14);
}

#[test]
fn snapshot_index_is_reported_with_errors() {
    let s = Scenario::default();
    let mut bf = Locsme64::from_scenario(&s, LocsmeConfig::default()).unwrap();
    let (src, mut rng) = stream(&s, 3);
    for _ in 0..3 {
        bf.process(&src.draw(&mut rng).0).unwrap();
    }
    let err = bf.process(&CVec64::zeros(5)).unwrap_err();
    assert!(matches!(err, Error::AtSnapshot { snapshot: 4, .. }));
    assert!(matches!(err.root(), Error::Dimension { expected: 12, actual: 5 }));
}

#[test]
fn single_precision_pipeline_runs() {
    let s = Scenario::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let realized = realize_mismatch::<f32, _>(&mut rng, &s).unwrap();
    let src = SnapshotSource::<f32>::new(&s, realized).unwrap();
    let mut bf = Locsme32::from_scenario(&s, LocsmeConfig::default()).unwrap();
    for _ in 0..50 {
        let (x, _) = src.draw(&mut rng);
        bf.process(&x).unwrap();
        let gain: C32 = bf.weights.iter().zip(bf.a_hat.iter()).map(|(w, a)| w.conj() * a).sum();
        assert!((gain - C32::new(1.0, 0.0)).norm() < 1e-4);
    }
    let sinr = output_sinr(&bf.weights, src.true_desired_cov(), src.true_inc()).unwrap();
    assert!(sinr > 10.0, "SINR {sinr} dB");
}
