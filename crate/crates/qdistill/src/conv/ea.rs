//! Entanglement-assisted decoding for standard forms whose logical
//! operators would need Laurent-series entries.
//!
//! When the per-logical coupling polynomial `Q(D)` of degree `m` ≥ 1 links
//! kept qubits across frames, decoding by the usual phase chain would let a
//! single parity-measurement error propagate forever. Segmenting the stream
//! into blocks of `N` frames, each anchored by `m` pre-shared Bell pairs and
//! sacrificing its first `m` frame pairs, confines errors to one block at an
//! overhead of `2m/(N-m)` consumed per decoded pair.
//!
//! The protocol only ever uses the sliding relations
//! `∏_{l: q_l=1} X_{k+l} ⊗ (same)` and their Z mirrors plus the anchor
//! parities; it never inverts the coupling, which is exactly what makes it
//! streamable.

use super::poly::LaurentPoly;
use crate::distill::{NoiseSpec, ProtocolResult, TrialStats};
use crate::error::{Error, Result};
use crate::exec::{run_trials, RunCfg};
use crate::pauli::{Letter, PauliString};
use crate::rng::{noise_rng, stream_rng, trial_rng};
use crate::tableau::BellRegister;
use rand::Rng;

/// Overhead ratio `2m/(N-m)` of consumed to output pairs per block.
pub fn ea_overhead(q_poly: &LaurentPoly, block_frames: usize) -> Result<f64> {
    let m = poly_degree(q_poly)?;
    if m == 0 {
        return Ok(0.0);
    }
    if block_frames <= m {
        return Err(Error::Domain(format!(
            "block of {block_frames} frames cannot anchor a degree-{m} coupling"
        )));
    }
    Ok(2.0 * m as f64 / (block_frames - m) as f64)
}

fn poly_degree(q: &LaurentPoly) -> Result<usize> {
    if q.is_zero() || q.low() != Some(0) {
        return Err(Error::Domain(
            "coupling polynomial must be canonical with a constant term".into(),
        ));
    }
    Ok(q.high().unwrap_or(0) as usize)
}

/// One block of the entanglement-assisted decoder over `n_frames` logical
/// pairs with `m` pre-shared anchors.
///
/// Pairs `0..m` are the anchors, pairs `m..m+n_frames` the logical stream.
/// The logical-Bell structure with `X_L(k) = ∏_{l: q_l=1} X_{k+l}` comes
/// from CNOT cascades applied on both sides (descending control order keeps
/// the X images bounded).
pub struct EaBlock {
    m: usize,
    n_frames: usize,
    template: BellRegister,
    q_exponents: Vec<i64>,
}

impl EaBlock {
    pub fn new(q_poly: &LaurentPoly, n_frames: usize) -> Result<Self> {
        let m = poly_degree(q_poly)?;
        if n_frames <= m {
            return Err(Error::Domain(format!(
                "need more than {m} frames per block, got {n_frames}"
            )));
        }
        let mut template = BellRegister::new(m + n_frames)?;
        for k in (0..n_frames).rev() {
            for &l in &q_poly.exponents() {
                if l == 0 {
                    continue;
                }
                let target = k + l as usize;
                if target >= n_frames {
                    continue;
                }
                let (c, t) = (m + k, m + target);
                template.tab.cnot(template.alice(c), template.alice(t));
                template.tab.cnot(template.bob(c), template.bob(t));
            }
        }
        Ok(Self { m, n_frames, template, q_exponents: q_poly.exponents() })
    }

    pub fn fresh_scratch(&self) -> BellRegister {
        self.template.clone()
    }

    /// Runs one block. Noise letters hit Bob's stream qubits; `flip`
    /// optionally forces a bit-flip on one recorded anchor parity (index in
    /// `0..4m`, layout per anchor j: x-alice, x-bob, z-alice, z-bob).
    /// Returns residual letters of the `n_frames - m` decoded pairs.
    pub fn run(
        &self,
        scratch: &mut BellRegister,
        noise: &NoiseSpec,
        flip: Option<usize>,
        nrng: &mut impl Rng,
        rng: &mut impl Rng,
    ) -> Result<Vec<Letter>> {
        let m = self.m;
        let nf = self.n_frames;
        let total = 2 * scratch.pairs();
        scratch.clone_state_from(&self.template);
        for k in 0..nf {
            let letter = noise.sample_letter(nrng);
            scratch.tab.apply_letter(scratch.bob(m + k), letter);
        }

        if m == 0 {
            let mut out = Vec::with_capacity(nf);
            for k in 0..nf {
                out.push(scratch.bell_residual(k)?);
            }
            return Ok(out);
        }

        // anchor parity measurements X(pre_j)X(f_j), Z(pre_j)Z(f_j), both sides
        let mut recorded = Vec::with_capacity(4 * m);
        for j in 0..m {
            for basis in [Letter::X, Letter::Z] {
                for side in 0..2 {
                    let (qa, qb) = if side == 0 {
                        (scratch.alice(j), scratch.alice(m + j))
                    } else {
                        (scratch.bob(j), scratch.bob(m + j))
                    };
                    let p = PauliString::from_letters(total, &[(qa, basis), (qb, basis)])?;
                    let (o, _) = scratch.tab.measure(&p, rng)?;
                    let mut bit = noise.flip_outcome(o, rng);
                    if flip == Some(recorded.len()) {
                        bit = !bit;
                    }
                    recorded.push(bit);
                }
            }
        }

        // parity chains: anchors give p(0..m); the sliding relations extend
        // them forward. X uses Q(D) ascending, Z its mirrored pattern.
        let mut px = vec![false; nf];
        let mut pz = vec![false; nf];
        for j in 0..m {
            px[j] = recorded[4 * j] ^ recorded[4 * j + 1];
            pz[j] = recorded[4 * j + 2] ^ recorded[4 * j + 3];
        }
        for k in m..nf {
            let mut ax = false;
            let mut az = false;
            for &l in &self.q_exponents {
                let l = l as usize;
                if l < m {
                    ax ^= px[k - m + l];
                }
                if l >= 1 {
                    az ^= pz[k - l];
                }
            }
            px[k] = ax;
            pz[k] = az;
        }

        // fixes and residual classification on the decoded pairs
        let mut out = Vec::with_capacity(nf - m);
        for k in m..nf {
            let pair = m + k;
            if px[k] {
                scratch.tab.z(scratch.bob(pair));
            }
            if pz[k] {
                scratch.tab.x(scratch.bob(pair));
            }
            out.push(scratch.bell_residual(pair)?);
        }
        Ok(out)
    }
}

/// Entanglement-assisted decoding of `blocks` segments of `block_frames`
/// logical pairs each. Returns the protocol result over decoded pairs plus
/// the per-block overhead `2m/(N-m)`.
pub fn ea_decode(
    q_poly: &LaurentPoly,
    block_frames: usize,
    blocks: usize,
    noise: &NoiseSpec,
    cfg: &RunCfg,
) -> Result<(ProtocolResult, f64)> {
    if blocks == 0 {
        return Err(Error::Domain("need at least one block".into()));
    }
    let overhead = ea_overhead(q_poly, block_frames)?;
    let block = EaBlock::new(q_poly, block_frames)?;
    let m = block.m;
    let stats = run_trials(
        cfg,
        || block.fresh_scratch(),
        |scratch, trial| {
            let mut collected = Vec::with_capacity(blocks * (block_frames - m));
            for b in 0..blocks {
                let mut nrng = stream_rng(cfg.seed, trial, 2 + 2 * b as u64);
                let mut rng = stream_rng(cfg.seed, trial, 3 + 2 * b as u64);
                match block.run(scratch, noise, None, &mut nrng, &mut rng) {
                    Ok(res) => collected.extend(res),
                    Err(_) => return TrialStats::error(),
                }
            }
            TrialStats::success(&collected)
        },
        TrialStats::zero,
        TrialStats::merge,
    );
    if stats.errors > 0 {
        return Err(Error::Domain("entanglement-assisted block failed hard".into()));
    }
    let consumed = blocks * (block_frames + m);
    let decoded = blocks * (block_frames - m);
    Ok((ProtocolResult::from_stats(stats, consumed, decoded), overhead))
}

/// One deterministic trial with an optional forced flip of a recorded anchor
/// parity in a chosen block; exposes per-block residuals for confinement
/// tests.
pub fn ea_decode_single_trial(
    q_poly: &LaurentPoly,
    block_frames: usize,
    blocks: usize,
    noise: &NoiseSpec,
    forced_flip: Option<(usize, usize)>,
    seed: u64,
) -> Result<Vec<Vec<Letter>>> {
    let block = EaBlock::new(q_poly, block_frames)?;
    let mut scratch = block.fresh_scratch();
    let mut out = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let mut nrng = noise_rng(seed, b as u64);
        let mut rng = trial_rng(seed, b as u64);
        let flip = forced_flip.and_then(|(fb, idx)| (fb == b).then_some(idx));
        out.push(block.run(&mut scratch, noise, flip, &mut nrng, &mut rng)?);
    }
    Ok(out)
}
