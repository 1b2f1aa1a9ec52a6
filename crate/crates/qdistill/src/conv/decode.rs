//! Frame-by-frame measurement decoding of convolutional codes and the
//! streaming distillation protocol.
//!
//! The protocol measures the original shift-invariant generators (two per
//! frame for the rate-1/3 code), decodes each frame with single-qubit
//! measurements per the standard-form schedule, and computes the kept
//! qubits' phase corrections from outcomes in nearby frames through the
//! dependency lists of `A₂ᵀ(D⁻¹)`, `Cᵀ(D⁻¹)`, `Eᵀ(D⁻¹)`.

use super::code::{ConvCode, ConvStandardForm};
use crate::distill::{NoiseSpec, ProtocolResult, TrialStats};
use crate::error::{Error, Result};
use crate::exec::{run_trials, RunCfg};
use crate::pauli::{Letter, PauliString};
use crate::rng::{noise_rng, trial_rng};
use crate::tableau::BellRegister;
use rand::Rng;

/// Where a phase correction reads an outcome: measured slot `slot` of frame
/// `base + offset`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct PhaseDep {
    pub slot: usize,
    pub offset: i64,
}

/// Per-frame decoding recipe derived from the standard form.
pub struct FrameDecoder {
    pub std: ConvStandardForm,
    /// Measurement basis per measured slot (first r slots Z, rest X).
    pub bases: Vec<Letter>,
    /// For each kept qubit: outcome dependencies of its logical-X phase.
    pub x_deps: Vec<Vec<PhaseDep>>,
    /// Likewise for the logical-Z phase.
    pub z_deps: Vec<Vec<PhaseDep>>,
}

impl FrameDecoder {
    pub fn new(std: ConvStandardForm) -> Self {
        let n = std.code.n();
        let k = std.code.k();
        let m = n - k;
        let r = std.r;
        let mut bases = vec![Letter::Z; r];
        bases.extend(std::iter::repeat(Letter::X).take(m - r));
        let mut x_deps = Vec::with_capacity(k);
        let mut z_deps = Vec::with_capacity(k);
        for i in 0..k {
            let mut xd = Vec::new();
            for j in 0..r {
                // C^T(D^-1)[i][j] = C[j][i](D^-1)
                for e in std.code.z_entry(j, m + i).reverse().exponents() {
                    xd.push(PhaseDep { slot: j, offset: e });
                }
            }
            for j in 0..m - r {
                for e in std.code.z_entry(r + j, m + i).reverse().exponents() {
                    xd.push(PhaseDep { slot: r + j, offset: e });
                }
            }
            x_deps.push(xd);
            let mut zd = Vec::new();
            for j in 0..r {
                for e in std.code.x_entry(j, m + i).reverse().exponents() {
                    zd.push(PhaseDep { slot: j, offset: e });
                }
            }
            z_deps.push(zd);
        }
        Self { std, bases, x_deps, z_deps }
    }

    /// Inclusive frame-offset range any phase of this decoder can touch.
    pub fn dep_span(&self) -> (i64, i64) {
        let mut lo = 0;
        let mut hi = 0;
        for dep in self.x_deps.iter().chain(&self.z_deps).flatten() {
            lo = lo.min(dep.offset);
            hi = hi.max(dep.offset);
        }
        (lo, hi)
    }

    /// Phase corrections (x, z) for kept qubit `kept` of frame `frame`,
    /// reading `outcomes[frame][slot]` bits. Errors out when the window does
    /// not cover the dependency span.
    pub fn frame_phases(
        &self,
        kept: usize,
        frame: usize,
        outcomes: &[Vec<bool>],
    ) -> Result<(bool, bool)> {
        let (lo, hi) = self.dep_span();
        let need_lo = frame as i64 + lo;
        let need_hi = frame as i64 + hi;
        if need_lo < 0 || need_hi >= outcomes.len() as i64 {
            return Err(Error::SpanTooSmall {
                need: (need_hi - need_lo + 1) as usize,
                got: outcomes.len(),
            });
        }
        let read = |deps: &[PhaseDep]| {
            deps.iter().fold(false, |acc, d| {
                acc ^ outcomes[(frame as i64 + d.offset) as usize][d.slot]
            })
        };
        Ok((read(&self.x_deps[kept]), read(&self.z_deps[kept])))
    }
}

/// Letters of generator `gen` of base frame `base`, as (frame, qubit, letter).
pub(crate) fn generator_letters(code: &ConvCode, gen: usize, base: i64) -> Vec<(i64, usize, Letter)> {
    let n = code.n();
    let mut out = Vec::new();
    for q in 0..n {
        let xs = code.x_entry(gen, q);
        let zs = code.z_entry(gen, q);
        let lo = xs.low().unwrap_or(0).min(zs.low().unwrap_or(0));
        let hi = xs.high().unwrap_or(0).max(zs.high().unwrap_or(0));
        for e in lo..=hi {
            let letter = Letter::from_bits(xs.coeff(e), zs.coeff(e));
            if letter != Letter::I {
                out.push((base + e, q, letter));
            }
        }
    }
    out
}

/// Sliding-window minimum-weight decoder for single-qubit errors. A
/// signature is the syndrome pattern an error writes across the generator
/// bases that overlap it, keyed from its first firing base.
struct SlidingDecoder {
    /// checks per frame
    checks: usize,
    /// (pattern from first firing base, frames from first firing base to the
    /// error frame, qubit, letter)
    entries: Vec<(Vec<u8>, i64, usize, Letter)>,
}

impl SlidingDecoder {
    fn build(code: &ConvCode) -> Result<Self> {
        let checks = code.rows().len();
        let gen_span = code.constraint_len() + 1;
        let mut entries = Vec::new();
        for q in 0..code.n() {
            for letter in Letter::ERRORS {
                // bases that can see an error at frame 0: -gen_span+1 ..= 0
                let mut pattern: Vec<u8> = Vec::new();
                let mut first: Option<i64> = None;
                for base in -(gen_span as i64 - 1)..=0 {
                    let mut bits = 0u8;
                    for gen in 0..checks {
                        let anti = generator_letters(code, gen, base)
                            .into_iter()
                            .filter(|&(f, qq, _)| f == 0 && qq == q)
                            .fold(false, |acc, (_, _, l)| acc ^ l.anticommutes(letter));
                        if anti {
                            bits |= 1 << gen;
                        }
                    }
                    if bits != 0 && first.is_none() {
                        first = Some(base);
                    }
                    if first.is_some() {
                        pattern.push(bits);
                    }
                }
                let Some(first) = first else {
                    return Err(Error::Domain(format!(
                        "undetectable single error {letter} on qubit {q}"
                    )));
                };
                entries.push((pattern, -first, q, letter));
            }
        }
        // patterns must identify (qubit, letter) uniquely
        for (i, a) in entries.iter().enumerate() {
            for b in entries.iter().skip(i + 1) {
                if a.0 == b.0 {
                    return Err(Error::Domain(
                        "ambiguous single-error signatures; sliding decoder unsupported".into(),
                    ));
                }
            }
        }
        let _ = gen_span;
        Ok(Self { checks, entries })
    }

    /// Scans the syndrome stream (one u8 of check bits per generator base)
    /// and returns corrections as (frame, qubit, letter). Unmatched patterns
    /// are skipped; bases whose full window is not observable are left to
    /// the boundary exclusion.
    fn decode(&self, syndromes: &mut [u8]) -> Vec<(usize, usize, Letter)> {
        let mut out = Vec::new();
        let bases = syndromes.len();
        for f in 0..bases {
            if syndromes[f] == 0 {
                continue;
            }
            for (pattern, delta, q, letter) in &self.entries {
                if f + pattern.len() > bases {
                    continue;
                }
                if syndromes[f..f + pattern.len()] == pattern[..] {
                    let frame = f as i64 + delta;
                    for (i, bits) in pattern.iter().enumerate() {
                        syndromes[f + i] ^= bits;
                    }
                    out.push((frame as usize, *q, *letter));
                    break;
                }
            }
        }
        let _ = self.checks;
        out
    }
}

/// Measurement outcomes of one streaming trial: per-base stabilizer bit
/// sets for both sides and per-frame decoding outcomes.
pub struct StreamOutcomes {
    pub s_a: Vec<u8>,
    pub s_b: Vec<u8>,
    pub a: Vec<Vec<bool>>,
    pub b: Vec<Vec<bool>>,
}

/// Precompiled streaming runner over a finite window of frames.
pub struct ConvRunner {
    code: ConvCode,
    decoder: FrameDecoder,
    sliding: SlidingDecoder,
    frames: usize,
    template: BellRegister,
    /// measured generator Paulis per base frame, per side
    meas_alice: Vec<Vec<PauliString>>,
    meas_bob: Vec<Vec<PauliString>>,
    interior: std::ops::Range<usize>,
    odd_y: Vec<bool>,
}

impl ConvRunner {
    pub fn new(code: &ConvCode, frames: usize) -> Result<Self> {
        let std = super::code::conv_standard_form(code)?;
        if std.column_perm.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::Domain(
                "streaming runner requires a code whose standard form needs no qubit permutation"
                    .into(),
            ));
        }
        let decoder = FrameDecoder::new(std);
        let n = code.n();
        let gen_span = code.constraint_len() + 1;
        let (dep_lo, dep_hi) = decoder.dep_span();
        if dep_lo < 0 {
            return Err(Error::Domain("backward phase dependencies unsupported".into()));
        }
        let lead_out = (dep_hi as usize).max(gen_span - 1);
        if frames < gen_span + 2 {
            return Err(Error::Domain(format!(
                "need at least {} frames for constraint span plus boundaries",
                gen_span + 2
            )));
        }
        let interior = 1..frames - lead_out;
        let pairs = n * frames;
        let template = BellRegister::new(pairs)?;
        let total = 2 * pairs;
        let mut meas_alice = Vec::new();
        let mut meas_bob = Vec::new();
        for base in 0..frames - (gen_span - 1) {
            let mut side_a = Vec::new();
            let mut side_b = Vec::new();
            for gen in 0..code.rows().len() {
                let letters = generator_letters(code, gen, base as i64);
                let to_pauli = |offset: usize| -> Result<PauliString> {
                    let pairs_letters: Vec<(usize, Letter)> = letters
                        .iter()
                        .map(|&(f, q, l)| (offset + f as usize * n + q, l))
                        .collect();
                    PauliString::from_letters(total, &pairs_letters)
                };
                side_a.push(to_pauli(0)?);
                side_b.push(to_pauli(pairs)?);
            }
            meas_alice.push(side_a);
            meas_bob.push(side_b);
        }
        let odd_y = (0..code.rows().len())
            .map(|gen| {
                generator_letters(code, gen, 0)
                    .iter()
                    .filter(|&&(_, _, l)| l == Letter::Y)
                    .count()
                    % 2
                    == 1
            })
            .collect();
        let sliding = SlidingDecoder::build(code)?;
        Ok(Self {
            code: code.clone(),
            decoder,
            sliding,
            frames,
            template,
            meas_alice,
            meas_bob,
            interior,
            odd_y,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn interior(&self) -> std::ops::Range<usize> {
        self.interior.clone()
    }

    pub fn decoder(&self) -> &FrameDecoder {
        &self.decoder
    }

    pub fn code(&self) -> &ConvCode {
        &self.code
    }

    /// Number of measured generator base frames.
    pub fn base_count(&self) -> usize {
        self.meas_alice.len()
    }

    pub fn fresh_scratch(&self) -> BellRegister {
        self.template.clone()
    }

    /// Plays one trial on an injected error pattern (letters indexed by
    /// pair = frame*n + qubit). Returns residual letters for interior kept
    /// qubits.
    pub fn run_stream(
        &self,
        scratch: &mut BellRegister,
        pattern: &[Letter],
        rng: &mut impl Rng,
    ) -> Result<Vec<Letter>> {
        let n = self.code.n();
        let k = self.code.k();
        let m = n - k;
        let pairs = n * self.frames;
        debug_assert_eq!(pattern.len(), pairs);
        scratch.clone_state_from(&self.template);
        for (pair, &letter) in pattern.iter().enumerate() {
            scratch.tab.apply_letter(scratch.bob(pair), letter);
        }

        // stabilizer streams on both sides
        let bases = self.meas_alice.len();
        let mut s_a = vec![0u8; bases];
        for (base, gens) in self.meas_alice.iter().enumerate() {
            for (g, p) in gens.iter().enumerate() {
                let (o, _) = scratch.tab.measure(p, rng)?;
                if o {
                    s_a[base] |= 1 << g;
                }
            }
        }
        let mut s_b = vec![0u8; bases];
        for (base, gens) in self.meas_bob.iter().enumerate() {
            for (g, p) in gens.iter().enumerate() {
                let (o, _) = scratch.tab.measure(p, rng)?;
                if o {
                    s_b[base] |= 1 << g;
                }
            }
        }

        // decoding measurements, every frame, both sides
        let mut a = vec![vec![false; m]; self.frames];
        let mut b = vec![vec![false; m]; self.frames];
        for frame in 0..self.frames {
            for slot in 0..m {
                let q = frame * n + slot;
                let basis = self.decoder.bases[slot];
                let pa = PauliString::single(2 * pairs, q, basis)?;
                let (o, _) = scratch.tab.measure(&pa, rng)?;
                a[frame][slot] = o;
                let pb = PauliString::single(2 * pairs, pairs + q, basis)?;
                let (o, _) = scratch.tab.measure(&pb, rng)?;
                b[frame][slot] = o;
            }
        }
        self.finish_stream(scratch, StreamOutcomes { s_a, s_b, a, b })
    }

    /// Classical tail shared by the direct and circuit-based paths: syndrome
    /// stream, sliding-window correction, phase fixes, residual read-out.
    pub fn finish_stream(
        &self,
        scratch: &mut BellRegister,
        outcomes: StreamOutcomes,
    ) -> Result<Vec<Letter>> {
        let n = self.code.n();
        let k = self.code.k();
        let m = n - k;
        let pairs = n * self.frames;
        let StreamOutcomes { s_a, s_b, a, b } = outcomes;
        let mut syndromes = vec![0u8; s_a.len()];
        for (base, syn) in syndromes.iter_mut().enumerate() {
            let mut bits = s_a[base] ^ s_b[base];
            for (g, odd) in self.odd_y.iter().enumerate() {
                if *odd {
                    bits ^= 1 << g;
                }
            }
            *syn = bits;
        }

        // Bob's corrections from the syndrome stream fold into his outcomes
        // (measured slots) or kept-qubit Paulis
        let mut b = b;
        let mut kept_fix = vec![Letter::I; pairs];
        for (frame, q, letter) in self.sliding.decode(&mut syndromes) {
            if frame >= self.frames {
                continue;
            }
            if q < m {
                if letter.anticommutes(self.decoder.bases[q]) {
                    b[frame][q] = !b[frame][q];
                }
            } else {
                let pair = frame * n + q;
                kept_fix[pair] = kept_fix[pair].mul_letter(letter);
            }
        }

        // phase fixes and residual classification on interior frames
        let mut residuals = Vec::new();
        for frame in self.interior.clone() {
            for kept in 0..k {
                let pair = frame * n + m + kept;
                let (ax, az) = self.decoder.frame_phases(kept, frame, &a)?;
                if ax {
                    scratch.tab.z(scratch.alice(pair));
                }
                if az {
                    scratch.tab.x(scratch.alice(pair));
                }
                let (bx, bz) = self.decoder.frame_phases(kept, frame, &b)?;
                let fix = Letter::from_bits(bz, bx).mul_letter(kept_fix[pair]);
                scratch.tab.apply_letter(scratch.bob(pair), fix);
                residuals.push(scratch.bell_residual(pair)?);
            }
        }
        Ok(residuals)
    }
}

/// Streams Bell pairs through the convolutional protocol under Werner noise.
/// Boundary frames are excluded from the metrics; yield approaches k/n as
/// the window grows.
pub fn run_conv_distillation(
    code: &ConvCode,
    frames: usize,
    noise: &NoiseSpec,
    cfg: &RunCfg,
) -> Result<ProtocolResult> {
    let runner = ConvRunner::new(code, frames)?;
    let pairs = code.n() * frames;
    let k_out = runner.interior().len() * code.k();
    let stats = run_trials(
        cfg,
        || runner.fresh_scratch(),
        |scratch, trial| {
            let mut nrng = noise_rng(cfg.seed, trial);
            let mut rng = trial_rng(cfg.seed, trial);
            let pattern: Vec<Letter> = (0..pairs).map(|_| noise.sample_letter(&mut nrng)).collect();
            match runner.run_stream(scratch, &pattern, &mut rng) {
                Ok(res) => TrialStats::success(&res),
                Err(_) => TrialStats::error(),
            }
        },
        TrialStats::zero,
        TrialStats::merge,
    );
    if stats.errors > 0 {
        return Err(Error::Domain(format!(
            "{} of {} streaming trials failed hard",
            stats.errors, stats.trials
        )));
    }
    Ok(ProtocolResult::from_stats(stats, pairs, k_out))
}

/// Deterministic single run with an injected pattern, for sweeps.
pub fn run_conv_with_pattern(
    code: &ConvCode,
    frames: usize,
    pattern: &[Letter],
    seed: u64,
) -> Result<Vec<Letter>> {
    let runner = ConvRunner::new(code, frames)?;
    if pattern.len() != code.n() * frames {
        return Err(Error::DimensionMismatch {
            left: pattern.len(),
            right: code.n() * frames,
        });
    }
    let mut scratch = runner.fresh_scratch();
    let mut rng = trial_rng(seed, 0);
    runner.run_stream(&mut scratch, pattern, &mut rng)
}
