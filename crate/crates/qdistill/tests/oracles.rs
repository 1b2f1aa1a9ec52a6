//! Exhaustive weighted-enumeration oracles against the Monte Carlo engine.
//!
//! The oracles are classical: they enumerate all 4^n Pauli patterns with
//! Werner weights and predict acceptance and per-slot residual classes from
//! the parity-code structure. The engine under test runs the full tableau
//! protocol. Agreement is checked per slot within 3σ binomial bounds.

use qdistill::block::StabilizerCode;
use qdistill::distill::{
    run_block_protocol, run_recurrence, NoiseSpec, ProtocolResult, SyndromeMode,
};
use qdistill::exec::RunCfg;
use qdistill::pauli::{symplectic_product, Letter, PauliString};

/// Werner pattern weight.
fn weight_of(pattern: &[Letter], p: f64) -> f64 {
    pattern
        .iter()
        .map(|l| if *l == Letter::I { 1.0 - p } else { p / 3.0 })
        .product()
}

/// Classical oracle for one width-n parity-detection block: acceptance
/// probability and the residual distribution of kept slot 0.
fn parity_block_oracle(n: usize, p: f64) -> (f64, [f64; 4]) {
    let mut accept = 0.0;
    let mut classes = [0.0f64; 4];
    let total = 4usize.pow(n as u32);
    for idx in 0..total {
        let pattern: Vec<Letter> = (0..n).map(|i| Letter::ALL[(idx >> (2 * i)) & 3]).collect();
        let w = weight_of(&pattern, p);
        let z_parity = pattern.iter().filter(|l| l.bits().1).count() % 2;
        if z_parity != 0 {
            continue;
        }
        accept += w;
        let (x1, _) = pattern[0].bits();
        let (x2, z2) = pattern[1].bits();
        classes[Letter::from_bits(x1 ^ x2, z2).index()] += w;
    }
    for c in &mut classes {
        *c /= accept;
    }
    (accept, classes)
}

fn assert_matches_oracle(result: &ProtocolResult, accept: f64, classes: [f64; 4], label: &str) {
    let trials = result.trials as f64;
    let sigma_acc = (accept * (1.0 - accept) * trials).sqrt();
    assert!(
        (result.successes as f64 - accept * trials).abs() <= 3.0 * sigma_acc,
        "{label}: success {} vs expected {:.1} +- {:.1}",
        result.successes,
        accept * trials,
        sigma_acc
    );
    // per-slot comparison avoids intra-cohort correlations; the engine
    // aggregates slots, so divide by k
    let kept = result.residual_counts.iter().sum::<u64>() as f64;
    for (i, &expected) in classes.iter().enumerate() {
        let got = result.residual_counts[i] as f64;
        let sigma = (expected * (1.0 - expected) * kept).sqrt().max(1.0);
        assert!(
            (got - expected * kept).abs() <= 3.0 * sigma,
            "{label}: class {i} count {got} vs expected {:.1} +- {sigma:.1}",
            expected * kept
        );
    }
}

#[test]
fn recurrence_width2_matches_enumeration_at_p005_and_p02() {
    for p in [0.05, 0.2] {
        let (accept, classes) = parity_block_oracle(2, p);
        let noise = NoiseSpec::depolarizing(p).unwrap();
        let result = run_recurrence(2, 1, &noise, &RunCfg::new(1_000_000, 101)).unwrap();
        assert_matches_oracle(&result, accept, classes, &format!("width 2, p={p}"));
    }
}

#[test]
fn recurrence_width3_matches_enumeration_at_p005_and_p02() {
    for p in [0.05, 0.2] {
        let (accept, classes) = parity_block_oracle(3, p);
        let noise = NoiseSpec::depolarizing(p).unwrap();
        let result = run_recurrence(3, 1, &noise, &RunCfg::new(1_000_000, 103)).unwrap();
        assert_matches_oracle(&result, accept, classes, &format!("width 3, p={p}"));
    }
}

#[test]
fn detection_block_protocol_matches_enumeration() {
    // the same statistics through the block-protocol entry point
    let p = 0.2;
    let (accept, classes) = parity_block_oracle(3, p);
    let code = StabilizerCode::x_parity(3).unwrap();
    let noise = NoiseSpec::depolarizing(p).unwrap();
    let result =
        run_block_protocol(&code, SyndromeMode::Detect, &noise, &RunCfg::new(1_000_000, 107))
            .unwrap();
    assert_matches_oracle(&result, accept, classes, "x-parity block, p=0.2");
}

#[test]
fn width2_golden_values_at_f08() {
    // frozen from the 16-pattern enumeration at F_in = 0.8:
    // P_S = 173/225, F_out = 145/173
    let (accept, classes) = parity_block_oracle(2, 0.2);
    assert!((accept - 173.0 / 225.0).abs() < 1e-12);
    assert!((classes[0] - 145.0 / 173.0).abs() < 1e-12);
    let noise = NoiseSpec::from_fidelity(0.8).unwrap();
    let result = run_recurrence(2, 1, &noise, &RunCfg::new(400_000, 109)).unwrap();
    assert_matches_oracle(&result, 173.0 / 225.0, classes, "golden F=0.8");
}

/// Exhaustive single-lateral oracle for the five-qubit code in correction
/// mode: every 4^5 pattern decodes to a residual logical class computed by
/// commutation algebra.
#[test]
fn five_one_three_correct_mode_matches_exhaustive_enumeration() {
    let code = StabilizerCode::five_one_three();
    let gens = code.measured_generators();
    let ops = code.logical_operators();
    let p = 0.05;
    let mut expect = [0.0f64; 4];
    for idx in 0..4usize.pow(5) {
        let pattern: Vec<Letter> = (0..5).map(|i| Letter::ALL[(idx >> (2 * i)) & 3]).collect();
        let w = weight_of(&pattern, p);
        let e = PauliString::from_letters(5, &pattern.iter().copied().enumerate().collect::<Vec<_>>())
            .unwrap();
        let mut c = qdistill::bits::BitVec::zeros(4);
        for (i, g) in gens.iter().enumerate() {
            if symplectic_product(g, &e).unwrap() {
                c.set(i, true);
            }
        }
        let recovery = code.decode_syndrome(&c).unwrap();
        let net = qdistill::pauli::multiply(&e, recovery).unwrap();
        // logical class of the net operator
        let x_comp = symplectic_product(&net, &ops.lz[0]).unwrap();
        let z_comp = symplectic_product(&net, &ops.lx[0]).unwrap();
        expect[Letter::from_bits(x_comp, z_comp).index()] += w;
    }
    let noise = NoiseSpec::depolarizing(p).unwrap();
    let result =
        run_block_protocol(&code, SyndromeMode::Correct, &noise, &RunCfg::new(1_000_000, 113))
            .unwrap();
    assert_eq!(result.successes, result.trials);
    assert_matches_oracle(&result, 1.0, expect, "five-qubit correct mode");
}

#[test]
fn noiseless_protocols_are_exact_over_many_seeds() {
    let noise = NoiseSpec::noiseless();
    let codes = [
        StabilizerCode::five_one_three(),
        StabilizerCode::nine_four_two(),
        StabilizerCode::x_parity(4).unwrap(),
    ];
    for code in &codes {
        for seed in [1u64, 99, 12345] {
            let r = run_block_protocol(
                code,
                SyndromeMode::Detect,
                &noise,
                &RunCfg::new(1000, seed),
            )
            .unwrap();
            assert_eq!(r.successes, 1000);
            assert_eq!(r.fidelity_out, Some(1.0), "code n={} seed {seed}", code.n());
        }
    }
}
