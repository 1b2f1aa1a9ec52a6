//! Protocol-level drivers: single block runs, iterated recurrence protocols,
//! and the classical-code two-iteration adaptation.
//!
//! Each trial draws its error pattern and its measurement randomness from
//! two separate counter-based streams. The residual of a correct protocol
//! depends only on the error pattern (measurement randomness cancels through
//! the phase fixes), which is what the circuit-equivalence tests exploit.

use crate::bits::BitMatrix;
use crate::block::StabilizerCode;
use crate::error::{Error, Result};
use crate::exec::{run_trials, RunCfg};
use crate::pauli::Letter;
use crate::rng::{noise_rng, trial_rng};
use crate::tableau::BellRegister;
use rand::Rng;

use super::noise::NoiseSpec;
use super::result::{ProtocolResult, TrialStats};
use super::runner::{BlockDecoder, BlockRunner, CosetTable};

/// Syndrome handling mode of the single-code block protocol.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SyndromeMode {
    /// One-way: decode and correct; yields k pairs from every trial.
    Correct,
    /// Two-way: reject the whole block on any nonzero syndrome.
    Detect,
}

fn decoder_for(code: &StabilizerCode, mode: SyndromeMode) -> BlockDecoder<'_> {
    match mode {
        SyndromeMode::Correct => BlockDecoder::Lookup(code),
        SyndromeMode::Detect => BlockDecoder::Detect,
    }
}

/// Runs the four-step block protocol on `code` under Werner noise.
pub fn run_block_protocol(
    code: &StabilizerCode,
    mode: SyndromeMode,
    noise: &NoiseSpec,
    cfg: &RunCfg,
) -> Result<ProtocolResult> {
    let runner = BlockRunner::new(code, decoder_for(code, mode))?;
    let n = runner.n();
    let stats = run_trials(
        cfg,
        || runner.fresh_scratch(),
        |scratch, trial| {
            let mut nrng = noise_rng(cfg.seed, trial);
            let mut rng = trial_rng(cfg.seed, trial);
            let pattern: Vec<Letter> = (0..n).map(|_| noise.sample_letter(&mut nrng)).collect();
            match runner.run_block(scratch, &pattern, &mut rng) {
                Ok(Some(res)) => TrialStats::success(&res),
                Ok(None) => TrialStats::failure(),
                Err(_) => TrialStats::error(),
            }
        },
        TrialStats::zero,
        TrialStats::merge,
    );
    finish(stats, n, runner.k())
}

/// Single deterministic run with a fixed injected error pattern; used for
/// exhaustive sweeps.
pub fn run_block_with_pattern(
    code: &StabilizerCode,
    mode: SyndromeMode,
    pattern: &[Letter],
    seed: u64,
) -> Result<Option<Vec<Letter>>> {
    if pattern.len() != code.n() {
        return Err(Error::DimensionMismatch { left: pattern.len(), right: code.n() });
    }
    let runner = BlockRunner::new(code, decoder_for(code, mode))?;
    let mut scratch = runner.fresh_scratch();
    let mut rng = trial_rng(seed, 0);
    runner.run_block(&mut scratch, pattern, &mut rng)
}

/// One cohort of an iterated protocol, recursing from the last stage down.
///
/// Stage `s` consumes `n_s` inputs per block, each the position-`pos` kept
/// pair of a distinct earlier-stage cohort; grouping by position keeps a
/// block's inputs independent. Bilateral Hadamards sit between stages and
/// swap X and Z residuals. A kept pair leaving a block is an exact Bell
/// state carrying a known residual Pauli, so later stages reseed fresh
/// registers with that residual injected.
fn run_cohort(
    stages: &[&BlockRunner],
    upto: usize,
    scratch: &mut [BellRegister],
    next_input: &mut impl FnMut() -> Letter,
    rng: &mut impl Rng,
) -> Result<Option<Vec<Letter>>> {
    if upto == 0 {
        return Ok(Some(vec![next_input()]));
    }
    let stage = stages[upto - 1];
    let width = stage.n();
    let mut groups: Vec<Vec<Letter>> = Vec::with_capacity(width);
    for _ in 0..width {
        match run_cohort(stages, upto - 1, scratch, next_input, rng)? {
            Some(outs) => groups.push(outs),
            None => return Ok(None),
        }
    }
    let positions = groups[0].len();
    let mut outs = Vec::with_capacity(positions * stage.k());
    let mut inputs = vec![Letter::I; width];
    for pos in 0..positions {
        for (g, input) in groups.iter().zip(inputs.iter_mut()) {
            let mut letter = g[pos];
            if upto >= 2 {
                letter = letter.hadamard_conj();
            }
            *input = letter;
        }
        match stage.run_block(&mut scratch[upto - 1], &inputs, rng)? {
            Some(res) => outs.extend(res),
            None => return Ok(None),
        }
    }
    Ok(Some(outs))
}

fn run_iterated(stages: &[&BlockRunner], noise: &NoiseSpec, cfg: &RunCfg) -> Result<ProtocolResult> {
    let n_total: usize = stages.iter().map(|s| s.n()).product();
    let k_total: usize = stages.iter().map(|s| s.k()).product();
    let stats = run_trials(
        cfg,
        || stages.iter().map(|s| s.fresh_scratch()).collect::<Vec<_>>(),
        |scratch, trial| {
            let mut nrng = noise_rng(cfg.seed, trial);
            let mut rng = trial_rng(cfg.seed, trial);
            let mut sample = || noise.sample_letter(&mut nrng);
            match run_cohort(stages, stages.len(), scratch, &mut sample, &mut rng) {
                Ok(Some(res)) => TrialStats::success(&res),
                Ok(None) => TrialStats::failure(),
                Err(_) => TrialStats::error(),
            }
        },
        TrialStats::zero,
        TrialStats::merge,
    );
    finish(stats, n_total, k_total)
}

/// The n-to-(n-1) recurrence protocol: each iteration runs width-`n`
/// parity-detection blocks, survivors pass through bilateral Hadamards and
/// regroup by position into the next iteration.
pub fn run_recurrence(
    width: usize,
    iterations: usize,
    noise: &NoiseSpec,
    cfg: &RunCfg,
) -> Result<ProtocolResult> {
    if width < 2 {
        return Err(Error::Domain("recurrence width must be at least 2".into()));
    }
    if iterations == 0 {
        return Err(Error::Domain("at least one iteration required".into()));
    }
    let code = StabilizerCode::x_parity(width)?;
    let runner = BlockRunner::new(&code, BlockDecoder::Detect)?;
    let stages = vec![&runner; iterations];
    run_iterated(&stages, noise, cfg)
}

/// One deterministic recurrence cohort with a fixed input error pattern
/// (length width^iterations, consumed in input order); used for exhaustive
/// detection sweeps.
pub fn run_recurrence_with_pattern(
    width: usize,
    iterations: usize,
    pattern: &[Letter],
    seed: u64,
) -> Result<Option<Vec<Letter>>> {
    let expected = width.pow(iterations as u32);
    if pattern.len() != expected {
        return Err(Error::DimensionMismatch { left: pattern.len(), right: expected });
    }
    let code = StabilizerCode::x_parity(width)?;
    let runner = BlockRunner::new(&code, BlockDecoder::Detect)?;
    let stages = vec![&runner; iterations];
    let mut scratch: Vec<BellRegister> = stages.iter().map(|s| s.fresh_scratch()).collect();
    let mut rng = trial_rng(seed, 0);
    let mut feed = pattern.iter().copied();
    let mut sampler = move || feed.next().expect("pattern length checked");
    run_cohort(&stages, stages.len(), &mut scratch, &mut sampler, &mut rng)
}

/// Adapts a pair of classical parity-check matrices to entanglement
/// distillation: the first iteration corrects bit flips with `h_bitflip` as
/// Z-type stabilizers, bilateral Hadamards convert the remaining phase flips,
/// and the second iteration corrects those with `h_phaseflip`. Blocks whose
/// syndrome has no unique minimum-weight explanation are rejected, which
/// reproduces pure detection behavior for distance-2 checks.
pub fn classical_code_protocol(
    h_bitflip: &BitMatrix,
    h_phaseflip: &BitMatrix,
    noise: &NoiseSpec,
    cfg: &RunCfg,
) -> Result<ProtocolResult> {
    classical_code_protocol_channel(
        h_bitflip,
        h_phaseflip,
        &super::transfer::PauliChannel::werner(noise.p())?,
        cfg,
    )
}

/// [`classical_code_protocol`] with an arbitrary input Pauli channel, for
/// asymmetric noise where the two iterations deserve different code
/// strengths.
pub fn classical_code_protocol_channel(
    h_bitflip: &BitMatrix,
    h_phaseflip: &BitMatrix,
    channel: &super::transfer::PauliChannel,
    cfg: &RunCfg,
) -> Result<ProtocolResult> {
    for (idx, h) in [h_bitflip, h_phaseflip].into_iter().enumerate() {
        if h.rank() != h.nrows() {
            return Err(Error::RankDeficient { row: idx });
        }
    }
    let code1 = StabilizerCode::z_type_from_parity_check(h_bitflip)?;
    let code2 = StabilizerCode::z_type_from_parity_check(h_phaseflip)?;
    let runner1 = BlockRunner::new(&code1, BlockDecoder::CosetLeader(CosetTable::for_code(&code1)?))?;
    let runner2 = BlockRunner::new(&code2, BlockDecoder::CosetLeader(CosetTable::for_code(&code2)?))?;
    let stages = vec![&runner1, &runner2];
    let n_total: usize = stages.iter().map(|s| s.n()).product();
    let k_total: usize = stages.iter().map(|s| s.k()).product();
    let stats = run_trials(
        cfg,
        || stages.iter().map(|s| s.fresh_scratch()).collect::<Vec<_>>(),
        |scratch, trial| {
            let mut nrng = noise_rng(cfg.seed, trial);
            let mut rng = trial_rng(cfg.seed, trial);
            let mut sample = || channel.sample(&mut nrng);
            match run_cohort(&stages, stages.len(), scratch, &mut sample, &mut rng) {
                Ok(Some(res)) => TrialStats::success(&res),
                Ok(None) => TrialStats::failure(),
                Err(_) => TrialStats::error(),
            }
        },
        TrialStats::zero,
        TrialStats::merge,
    );
    finish(stats, n_total, k_total)
}

fn finish(stats: TrialStats, n: usize, k: usize) -> Result<ProtocolResult> {
    if stats.errors > 0 {
        return Err(Error::Domain(format!(
            "{} of {} trials hit an uncorrectable syndrome in correction mode",
            stats.errors, stats.trials
        )));
    }
    Ok(ProtocolResult::from_stats(stats, n, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;

    fn cfg(trials: u64, seed: u64) -> RunCfg {
        RunCfg::sequential(trials, seed)
    }

    #[test]
    fn noiseless_block_protocol_is_exact() {
        let code = StabilizerCode::five_one_three();
        for mode in [SyndromeMode::Correct, SyndromeMode::Detect] {
            let r = run_block_protocol(&code, mode, &NoiseSpec::noiseless(), &cfg(300, 1)).unwrap();
            assert_eq!(r.successes, 300);
            assert_eq!(r.fidelity_out, Some(1.0));
            assert_eq!(r.residual_counts, [300, 0, 0, 0]);
        }
    }

    #[test]
    fn noiseless_recurrence_yield() {
        let r = run_recurrence(2, 2, &NoiseSpec::noiseless(), &cfg(500, 2)).unwrap();
        assert_eq!(r.successes, 500);
        assert_eq!(r.fidelity_out, Some(1.0));
        assert!((r.yield_rate - 0.25).abs() < 1e-12);
        assert_eq!(r.n_consumed, 4);
        assert_eq!(r.k_out, 1);
    }

    #[test]
    fn detect_beats_correct_on_fidelity_at_same_noise() {
        let code = StabilizerCode::five_one_three();
        let noise = NoiseSpec::depolarizing(0.05).unwrap();
        let correct =
            run_block_protocol(&code, SyndromeMode::Correct, &noise, &cfg(30_000, 3)).unwrap();
        let detect =
            run_block_protocol(&code, SyndromeMode::Detect, &noise, &cfg(30_000, 3)).unwrap();
        assert!(detect.fidelity_out.unwrap() > correct.fidelity_out.unwrap());
        assert!(detect.success_prob < correct.success_prob);
        assert!((correct.success_prob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn recurrence_detects_all_weight_one_errors_exhaustively() {
        // two-iteration width-3 protocol behaves as a [[9,4,2]] detector
        for q in 0..9 {
            for letter in Letter::ERRORS {
                let mut pattern = [Letter::I; 9];
                pattern[q] = letter;
                let out = run_recurrence_with_pattern(3, 2, &pattern, 7).unwrap();
                assert!(out.is_none(), "{letter} on input {q} must be detected");
            }
        }
        let clean = run_recurrence_with_pattern(3, 2, &[Letter::I; 9], 7).unwrap();
        assert_eq!(clean.unwrap(), vec![Letter::I; 4]);
    }

    #[test]
    fn classical_all_ones_check_matches_recurrence_statistically() {
        let h = BitMatrix::parse("11").unwrap();
        let noise = NoiseSpec::depolarizing(0.2).unwrap();
        let trials = 60_000;
        let classical = classical_code_protocol(&h, &h, &noise, &cfg(trials, 11)).unwrap();
        let recurrence = run_recurrence(2, 2, &noise, &cfg(trials, 12)).unwrap();
        // same protocol up to X/Z orientation, which Werner noise cannot see
        let d_ps = (classical.success_prob - recurrence.success_prob).abs();
        assert!(d_ps < 3.0 * (classical.success_ci95 + recurrence.success_ci95) / 1.96);
        let d_f = (classical.fidelity_out.unwrap() - recurrence.fidelity_out.unwrap()).abs();
        assert!(
            d_f < 3.0 * (classical.fidelity_ci95.unwrap() + recurrence.fidelity_ci95.unwrap()) / 1.96
        );
    }

    #[test]
    fn repetition_code_corrects_single_bitflip() {
        let h3 = BitMatrix::parse("110\n011").unwrap();
        let code = StabilizerCode::z_type_from_parity_check(&h3).unwrap();
        let table = CosetTable::for_code(&code).unwrap();
        let runner = BlockRunner::new(&code, BlockDecoder::CosetLeader(table)).unwrap();
        let mut scratch = runner.fresh_scratch();
        for q in 0..3 {
            let mut inputs = [Letter::I; 3];
            inputs[q] = Letter::X;
            let mut rng = trial_rng(13, q as u64);
            let out = runner.run_block(&mut scratch, &inputs, &mut rng).unwrap();
            assert_eq!(out.unwrap(), vec![Letter::I], "bit flip on qubit {q}");
        }
    }

    #[test]
    fn asymmetric_noise_favors_matching_code_strength() {
        // Strong phase noise (p_Z = 3 p_X): the dominant Z errors reach the
        // second iteration, so putting the stronger code there ([3,2,2] then
        // [3,1,3]) must beat the mismatched orientation on output fidelity.
        use super::super::transfer::PauliChannel;
        let h322 = BitMatrix::parse("111").unwrap();
        let h313 = BitMatrix::parse("110\n011").unwrap();
        let channel = PauliChannel::new([0.85, 0.03, 0.03, 0.09]).unwrap();
        let trials = 100_000;
        let matched =
            classical_code_protocol_channel(&h322, &h313, &channel, &cfg(trials, 17)).unwrap();
        let mismatched =
            classical_code_protocol_channel(&h313, &h322, &channel, &cfg(trials, 18)).unwrap();
        assert!(
            matched.fidelity_out.unwrap() >= mismatched.fidelity_out.unwrap(),
            "matched {} vs mismatched {}",
            matched.fidelity_out.unwrap(),
            mismatched.fidelity_out.unwrap()
        );
    }

    #[test]
    fn rank_deficient_parity_check_rejected() {
        let h = BitMatrix::parse("110\n110").unwrap();
        assert!(matches!(
            classical_code_protocol(&h, &h, &NoiseSpec::noiseless(), &cfg(1, 0)),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn parallel_and_sequential_agree_exactly() {
        let code = StabilizerCode::five_one_three();
        let noise = NoiseSpec::depolarizing(0.1).unwrap();
        let seq = run_block_protocol(
            &code,
            SyndromeMode::Detect,
            &noise,
            &RunCfg { trials: 4000, seed: 21, execution: Execution::Sequential },
        )
        .unwrap();
        let par = run_block_protocol(
            &code,
            SyndromeMode::Detect,
            &noise,
            &RunCfg { trials: 4000, seed: 21, execution: Execution::Parallel },
        )
        .unwrap();
        assert_eq!(seq.residual_counts, par.residual_counts);
        assert_eq!(seq.successes, par.successes);
    }
}
