//! Statistical invariants: bilateral/single-lateral channel equivalence,
//! fidelity monotonicity in the noise strength, and the planar protocol's
//! agreement with the closed-form measurement-error model.

use qdistill::block::StabilizerCode;
use qdistill::distill::{
    run_block_protocol, run_recurrence, BlockDecoder, BlockRunner, NoiseSpec, SyndromeMode,
    TrialStats,
};
use qdistill::exec::{run_trials, RunCfg};
use qdistill::pauli::Letter;
use qdistill::planar::{decode_error_prob, run_resource_protocol};
use qdistill::rng::{noise_rng, trial_rng};

/// Runs the x-parity detection block with noise on both sides at strength p.
fn bilateral_recurrence(width: usize, p: f64, cfg: &RunCfg) -> TrialStats {
    let code = StabilizerCode::x_parity(width).unwrap();
    let runner = BlockRunner::new(&code, BlockDecoder::Detect).unwrap();
    let noise = NoiseSpec::depolarizing(p).unwrap();
    run_trials(
        cfg,
        || runner.fresh_scratch(),
        |scratch, trial| {
            let mut nrng = noise_rng(cfg.seed, trial);
            let mut rng = trial_rng(cfg.seed, trial);
            let alice: Vec<Letter> = (0..width).map(|_| noise.sample_letter(&mut nrng)).collect();
            let bob: Vec<Letter> = (0..width).map(|_| noise.sample_letter(&mut nrng)).collect();
            match runner.run_block_two_sided(scratch, Some(&alice), &bob, &mut rng) {
                Ok(Some(res)) => TrialStats::success(&res),
                Ok(None) => TrialStats::failure(),
                Err(_) => TrialStats::error(),
            }
        },
        TrialStats::zero,
        TrialStats::merge,
    )
}

#[test]
fn bilateral_channel_equals_single_lateral_at_adjusted_strength() {
    let width = 2;
    let p = 0.12;
    let p_single = qdistill::distill::single_lateral_equivalent(p).unwrap();
    let trials = 1_000_000;
    let two_sided = bilateral_recurrence(width, p, &RunCfg::new(trials, 215));
    let one_sided = run_recurrence(
        width,
        1,
        &NoiseSpec::depolarizing(p_single).unwrap(),
        &RunCfg::new(trials, 216),
    )
    .unwrap();
    // success probabilities within 3 combined sigma
    let ps_a = two_sided.successes as f64 / trials as f64;
    let ps_b = one_sided.success_prob;
    let sigma = ((ps_a * (1.0 - ps_a) + ps_b * (1.0 - ps_b)) / trials as f64).sqrt();
    assert!((ps_a - ps_b).abs() <= 3.0 * sigma, "P_S {ps_a:.5} vs {ps_b:.5}");
    // per-class residual fractions within 3 combined sigma
    let kept_a: u64 = two_sided.residuals.iter().sum();
    let kept_b: u64 = one_sided.residual_counts.iter().sum();
    for i in 0..4 {
        let fa = two_sided.residuals[i] as f64 / kept_a as f64;
        let fb = one_sided.residual_counts[i] as f64 / kept_b as f64;
        let sigma = (fa * (1.0 - fa) / kept_a as f64 + fb * (1.0 - fb) / kept_b as f64)
            .sqrt()
            .max(1e-6);
        assert!((fa - fb).abs() <= 3.0 * sigma, "class {i}: {fa:.5} vs {fb:.5}");
    }
}

#[test]
fn output_fidelity_nonincreasing_in_noise() {
    let trials = 200_000;
    let mut prev: Option<(f64, f64)> = None;
    for (i, p) in [0.02, 0.12, 0.22, 0.32, 0.42].into_iter().enumerate() {
        let r = run_recurrence(
            2,
            2,
            &NoiseSpec::depolarizing(p).unwrap(),
            &RunCfg::new(trials, 300 + i as u64),
        )
        .unwrap();
        let f = r.fidelity_out.unwrap();
        let sigma = r.fidelity_ci95.unwrap() / 1.96;
        if let Some((pf, psig)) = prev {
            assert!(
                f <= pf + 3.0 * (sigma + psig),
                "fidelity rose from {pf:.4} to {f:.4} at p={p}"
            );
        }
        prev = Some((f, sigma));
    }
}

#[test]
fn detect_mode_block_protocol_monotone_too() {
    let code = StabilizerCode::five_one_three();
    let trials = 100_000;
    let mut prev: Option<(f64, f64)> = None;
    for (i, p) in [0.02, 0.1, 0.2, 0.3].into_iter().enumerate() {
        let r = run_block_protocol(
            &code,
            SyndromeMode::Detect,
            &NoiseSpec::depolarizing(p).unwrap(),
            &RunCfg::new(trials, 400 + i as u64),
        )
        .unwrap();
        let f = r.fidelity_out.unwrap();
        let sigma = r.fidelity_ci95.unwrap() / 1.96;
        if let Some((pf, psig)) = prev {
            assert!(f <= pf + 3.0 * (sigma + psig));
        }
        prev = Some((f, sigma));
    }
}

#[test]
fn planar_monte_carlo_matches_closed_form_grid() {
    for (l, trials) in [(3usize, 60_000u64), (6, 20_000), (11, 4_000)] {
        for q in [0.005, 0.02, 0.05] {
            let noise = NoiseSpec::new(0.0, q).unwrap();
            let r = run_resource_protocol(l, &noise, &RunCfg::new(trials, 500 + l as u64)).unwrap();
            let p_l = decode_error_prob(q, l).unwrap();
            let mc = 1.0 - r.fidelity_out.unwrap();
            let sigma = (p_l * (1.0 - p_l) / trials as f64).sqrt().max(1e-9);
            assert!(
                (mc - p_l).abs() <= 3.0 * sigma,
                "L={l} q={q}: MC {mc:.5} vs analytic {p_l:.5} (3sigma {:.5})",
                3.0 * sigma
            );
        }
    }
}

#[test]
fn planar_x_and_z_residual_classes_equiprobable() {
    let trials = 200_000;
    let noise = NoiseSpec::new(0.0, 0.04).unwrap();
    let r = run_resource_protocol(4, &noise, &RunCfg::new(trials, 600)).unwrap();
    let x = r.residual_counts[Letter::X.index()] as f64;
    let z = r.residual_counts[Letter::Z.index()] as f64;
    let sigma = (x + z).sqrt().max(1.0);
    assert!((x - z).abs() <= 4.0 * sigma, "X {x} vs Z {z}");
}
