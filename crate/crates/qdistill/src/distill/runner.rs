//! Tableau-level execution of one measurement-based distillation block.
//!
//! The runner owns everything derivable from the code once: the Bell
//! template, the embedded measurement operators for both sides, the decoding
//! schedule with its phase masks, and the syndrome decoder. `run_block`
//! clones the template, injects an error pattern, and plays the protocol:
//!
//! 1. Alice measures stabilizer parities and decoding parities, then fixes
//!    the phases of her kept qubits.
//! 2. Bob does the same; the syndrome is the XOR of both parity sets with
//!    the odd-Y transpose adjustment.
//! 3. The recovery (mode-dependent) folds into Bob's decoding parities and
//!    kept-qubit Paulis.
//! 4. Every kept pair is classified by its residual Pauli.

use std::collections::HashMap;

use crate::bits::{BitMatrix, BitVec};
use crate::block::{DecodingSchedule, StabilizerCode};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::tableau::BellRegister;
use rand::Rng;

/// Syndrome handling policy for one block.
pub enum BlockDecoder<'c> {
    /// Two-way mode: any nonzero syndrome rejects the whole block.
    Detect,
    /// One-way mode with the code's weight-bounded lookup table; an unknown
    /// syndrome is a hard error.
    Lookup(&'c StabilizerCode),
    /// Classical coset-leader decoding over bit-flip patterns; syndromes
    /// without a unique minimum-weight leader reject the block.
    CosetLeader(CosetTable),
}

/// Precompiled executable form of one code block.
pub struct BlockRunner<'c> {
    code: &'c StabilizerCode,
    pub sched: DecodingSchedule,
    decoder: BlockDecoder<'c>,
    template: BellRegister,
    meas_alice: Vec<PauliString>,
    meas_bob: Vec<PauliString>,
    dec_alice: Vec<PauliString>,
    dec_bob: Vec<PauliString>,
    /// Physical pair index per kept position.
    kept_pairs: Vec<usize>,
    n: usize,
    k: usize,
}

impl<'c> BlockRunner<'c> {
    pub fn new(code: &'c StabilizerCode, decoder: BlockDecoder<'c>) -> Result<Self> {
        let n = code.n();
        let k = code.k();
        let m = n - k;
        let template = BellRegister::new(n)?;
        let total = 2 * n;
        let perm = code.std().column_perm().to_vec();
        let gens = code.measured_generators();
        let mut meas_alice = Vec::with_capacity(m);
        let mut meas_bob = Vec::with_capacity(m);
        for g in &gens {
            meas_alice.push(g.embed(total, 0, Some(&perm))?);
            meas_bob.push(g.embed(total, n, Some(&perm))?);
        }
        let sched = code.decoding_schedule();
        let mut dec_alice = Vec::with_capacity(m);
        let mut dec_bob = Vec::with_capacity(m);
        for (&pos, basis) in sched
            .z_measured
            .iter()
            .map(|p| (p, Letter::Z))
            .chain(sched.x_measured.iter().map(|p| (p, Letter::X)))
            .map(|(p, b)| (p, b))
            .collect::<Vec<_>>()
            .iter()
        {
            let q = perm[pos];
            dec_alice.push(PauliString::single(total, q, *basis)?);
            dec_bob.push(PauliString::single(total, n + q, *basis)?);
        }
        let kept_pairs = sched.kept.iter().map(|&pos| perm[pos]).collect();
        Ok(Self { code, sched, decoder, template, meas_alice, meas_bob, dec_alice, dec_bob, kept_pairs, n, k })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fresh_scratch(&self) -> BellRegister {
        self.template.clone()
    }

    pub fn code(&self) -> &StabilizerCode {
        self.code
    }

    /// Physical pair index per kept position.
    pub fn kept_pairs(&self) -> &[usize] {
        &self.kept_pairs
    }

    /// Runs one block on the given input residuals (one letter per pair).
    /// `Ok(None)` means the block was rejected; `Ok(Some(res))` carries the
    /// residual letters of the kept pairs in schedule order.
    pub fn run_block(
        &self,
        scratch: &mut BellRegister,
        inputs: &[Letter],
        rng: &mut impl Rng,
    ) -> Result<Option<Vec<Letter>>> {
        self.run_block_two_sided(scratch, None, inputs, rng)
    }

    /// Same protocol with errors injected on both sides, for bilateral
    /// channel equivalence checks.
    pub fn run_block_two_sided(
        &self,
        scratch: &mut BellRegister,
        alice_inputs: Option<&[Letter]>,
        inputs: &[Letter],
        rng: &mut impl Rng,
    ) -> Result<Option<Vec<Letter>>> {
        debug_assert_eq!(inputs.len(), self.n);
        let m = self.n - self.k;
        scratch.clone_state_from(&self.template);
        if let Some(alice) = alice_inputs {
            for (pair, &letter) in alice.iter().enumerate() {
                scratch.tab.apply_letter(scratch.alice(pair), letter);
            }
        }
        for (pair, &letter) in inputs.iter().enumerate() {
            scratch.tab.apply_letter(scratch.bob(pair), letter);
        }

        let mut s_a = BitVec::zeros(m);
        for (i, g) in self.meas_alice.iter().enumerate() {
            let (o, _) = scratch.tab.measure(g, rng)?;
            s_a.set(i, o);
        }
        let mut a = BitVec::zeros(m);
        for (j, d) in self.dec_alice.iter().enumerate() {
            let (o, _) = scratch.tab.measure(d, rng)?;
            a.set(j, o);
        }
        let mut s_b = BitVec::zeros(m);
        for (i, g) in self.meas_bob.iter().enumerate() {
            let (o, _) = scratch.tab.measure(g, rng)?;
            s_b.set(i, o);
        }
        let mut b = BitVec::zeros(m);
        for (j, d) in self.dec_bob.iter().enumerate() {
            let (o, _) = scratch.tab.measure(d, rng)?;
            b.set(j, o);
        }
        self.finish_block(scratch, &BlockOutcomes { s_a, a, s_b, b })
    }

    /// Classical tail of the protocol: Alice's phase fixes, the syndrome,
    /// the mode-dependent recovery folded into Bob's outcomes, and residual
    /// classification. Shared by the direct and circuit-based paths.
    pub fn finish_block(
        &self,
        scratch: &mut BellRegister,
        outcomes: &BlockOutcomes,
    ) -> Result<Option<Vec<Letter>>> {
        let m = self.n - self.k;
        let BlockOutcomes { s_a, a, s_b, b } = outcomes;
        for i in 0..self.k {
            let ax = a.masked_parity(&self.sched.x_phase_masks[i]);
            let az = a.masked_parity(&self.sched.z_phase_masks[i]);
            let q = scratch.alice(self.kept_pairs[i]);
            if ax {
                scratch.tab.z(q);
            }
            if az {
                scratch.tab.x(q);
            }
        }
        let c = self.code.syndrome(s_a, s_b)?;

        let recovery: PauliString = match &self.decoder {
            BlockDecoder::Detect => {
                if !self.code.detect(&c) {
                    return Ok(None);
                }
                PauliString::identity(self.n)
            }
            BlockDecoder::Lookup(code) => code.decode_syndrome(&c)?.clone(),
            BlockDecoder::CosetLeader(table) => match table.decode(&c) {
                Some(pattern) => {
                    let mut p = PauliString::identity(self.n);
                    for q in pattern.iter_ones() {
                        p.set_letter(q, Letter::X);
                    }
                    p
                }
                None => return Ok(None),
            },
        };

        // integrated recovery: adjust b where the recovery anticommutes with
        // the measured basis, fix kept-qubit phases, apply recovery remnants
        let r = self.sched.z_measured.len();
        let mut b_adj = b.clone();
        for j in 0..m {
            let f = recovery.letter(j);
            let basis = if j < r { Letter::Z } else { Letter::X };
            if f.anticommutes(basis) {
                b_adj.flip(j);
            }
        }
        for i in 0..self.k {
            let bx = b_adj.masked_parity(&self.sched.x_phase_masks[i]);
            let bz = b_adj.masked_parity(&self.sched.z_phase_masks[i]);
            let fix = Letter::from_bits(bz, bx).mul_letter(recovery.letter(m + i));
            let q = scratch.bob(self.kept_pairs[i]);
            scratch.tab.apply_letter(q, fix);
        }

        let mut residuals = Vec::with_capacity(self.k);
        for i in 0..self.k {
            residuals.push(scratch.bell_residual(self.kept_pairs[i])?);
        }
        Ok(Some(residuals))
    }
}

/// Measurement outcomes of one block: both parties' stabilizer parities and
/// decoding parities.
pub struct BlockOutcomes {
    pub s_a: BitVec,
    pub a: BitVec,
    pub s_b: BitVec,
    pub b: BitVec,
}

/// Coset-leader decoding table for bit-flip errors against a set of Z-type
/// generators. A syndrome maps to its minimum-weight error pattern, or to a
/// rejection when that pattern is not unique.
pub struct CosetTable {
    entries: HashMap<u64, Option<BitVec>>,
}

impl CosetTable {
    /// `z_rows` is the (n-k) x n matrix of Z supports of the measured
    /// generators, in the same qubit order the runner uses.
    pub fn build(z_rows: &BitMatrix) -> Result<Self> {
        let n = z_rows.ncols();
        let m = z_rows.nrows();
        if m > 64 {
            return Err(Error::Domain("coset table supports at most 64 checks".into()));
        }
        if n > 24 {
            return Err(Error::Domain("coset table enumeration capped at n = 24".into()));
        }
        let mut entries: HashMap<u64, (BitVec, usize, bool)> = HashMap::new();
        let syndrome_of = |e: &BitVec| -> u64 {
            let mut key = 0u64;
            for i in 0..m {
                if z_rows.row(i).dot(e) {
                    key |= 1 << i;
                }
            }
            key
        };
        // full enumeration by weight; fine at the sizes classical adapters use
        let total = 1usize << n;
        let mut patterns: Vec<(usize, usize)> =
            (0..total).map(|bits| (bits.count_ones() as usize, bits)).collect();
        patterns.sort();
        let all_syndromes = 1usize << m;
        let mut filled = 0usize;
        let mut max_leader_weight = 0usize;
        for (w, bits) in patterns {
            if filled == all_syndromes && w > max_leader_weight {
                break;
            }
            let e = BitVec::from_indices(n, &(0..n).filter(|q| bits >> q & 1 == 1).collect::<Vec<_>>());
            let s = syndrome_of(&e);
            match entries.get_mut(&s) {
                None => {
                    entries.insert(s, (e, w, false));
                    filled += 1;
                    max_leader_weight = max_leader_weight.max(w);
                }
                Some((leader, lw, ambiguous)) => {
                    if *lw == w && *leader != e {
                        *ambiguous = true;
                    }
                }
            }
        }
        Ok(Self {
            entries: entries
                .into_iter()
                .map(|(s, (leader, _, ambiguous))| (s, (!ambiguous).then_some(leader)))
                .collect(),
        })
    }

    /// Builds against a code's measured (standard-form, permuted) generators.
    pub fn for_code(code: &StabilizerCode) -> Result<Self> {
        let gens = code.measured_generators();
        let n = code.n();
        let mut z_rows = BitMatrix::zeros(gens.len(), n);
        for (i, g) in gens.iter().enumerate() {
            if !g.x().is_zero() {
                return Err(Error::Domain(
                    "coset-leader decoding requires Z-type generators".into(),
                ));
            }
            for q in 0..n {
                if g.z().get(q) {
                    z_rows.set(i, q, true);
                }
            }
        }
        Self::build(&z_rows)
    }

    /// `Some(pattern)` for a unique minimum-weight leader, `None` for an
    /// ambiguous (rejectable) syndrome.
    pub fn decode(&self, c: &BitVec) -> Option<&BitVec> {
        let key = c.words().first().copied().unwrap_or(0);
        self.entries.get(&key).and_then(|v| v.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn coset_table_repetition_code() {
        // [3,1,3] repetition: all syndromes have unique leaders
        let h = BitMatrix::parse("110\n011").unwrap();
        let table = CosetTable::build(&h).unwrap();
        for s in 0..4u64 {
            let c = BitVec::from_indices(2, &(0..2).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>());
            let leader = table.decode(&c);
            assert!(leader.is_some(), "syndrome {s} must be correctable");
            assert!(leader.unwrap().count_ones() <= 1);
        }
    }

    #[test]
    fn coset_table_parity_code_is_ambiguous() {
        // [2,1,2]: syndrome 1 has two weight-1 leaders
        let h = BitMatrix::parse("11").unwrap();
        let table = CosetTable::build(&h).unwrap();
        let zero = BitVec::zeros(1);
        assert!(table.decode(&zero).is_some());
        let one = BitVec::from_bools(&[true]);
        assert!(table.decode(&one).is_none());
    }

    #[test]
    fn noiseless_block_is_exact() {
        let code = StabilizerCode::five_one_three();
        let runner = BlockRunner::new(&code, BlockDecoder::Lookup(&code)).unwrap();
        let mut scratch = runner.fresh_scratch();
        for trial in 0..200 {
            let mut rng = trial_rng(5, trial);
            let out = runner
                .run_block(&mut scratch, &[Letter::I; 5], &mut rng)
                .unwrap()
                .expect("correction mode always keeps");
            assert_eq!(out, vec![Letter::I]);
        }
    }

    #[test]
    fn five_one_three_corrects_every_single_error() {
        let code = StabilizerCode::five_one_three();
        let runner = BlockRunner::new(&code, BlockDecoder::Lookup(&code)).unwrap();
        let mut scratch = runner.fresh_scratch();
        for q in 0..5 {
            for letter in Letter::ERRORS {
                let mut inputs = [Letter::I; 5];
                inputs[q] = letter;
                for trial in 0..20 {
                    let mut rng = trial_rng(31, trial);
                    let out = runner
                        .run_block(&mut scratch, &inputs, &mut rng)
                        .unwrap()
                        .expect("correction mode");
                    assert_eq!(out, vec![Letter::I], "error {letter} on qubit {q}");
                }
            }
        }
    }

    #[test]
    fn nine_four_two_rejects_every_single_error_and_passes_none() {
        let code = StabilizerCode::nine_four_two();
        let runner = BlockRunner::new(&code, BlockDecoder::Detect).unwrap();
        let mut scratch = runner.fresh_scratch();
        let mut rng = trial_rng(41, 0);
        let out = runner
            .run_block(&mut scratch, &[Letter::I; 9], &mut rng)
            .unwrap()
            .expect("noiseless block accepted");
        assert_eq!(out, vec![Letter::I; 4]);
        for q in 0..9 {
            for letter in Letter::ERRORS {
                let mut inputs = [Letter::I; 9];
                inputs[q] = letter;
                let mut rng = trial_rng(43, q as u64);
                let out = runner.run_block(&mut scratch, &inputs, &mut rng).unwrap();
                assert!(out.is_none(), "weight-1 {letter} on qubit {q} must reject");
            }
        }
    }

    #[test]
    fn detect_mode_residuals_follow_classical_rule() {
        // width-2 parity block: accepted patterns have z1 = z2; the kept
        // pair's residual is (x1 ^ x2, z2)
        let code = StabilizerCode::x_parity(2).unwrap();
        let runner = BlockRunner::new(&code, BlockDecoder::Detect).unwrap();
        let mut scratch = runner.fresh_scratch();
        for (i, &e1) in Letter::ALL.iter().enumerate() {
            for (j, &e2) in Letter::ALL.iter().enumerate() {
                let mut rng = trial_rng(53, (4 * i + j) as u64);
                let out = runner.run_block(&mut scratch, &[e1, e2], &mut rng).unwrap();
                let (x1, z1) = e1.bits();
                let (x2, z2) = e2.bits();
                if z1 != z2 {
                    assert!(out.is_none(), "{e1}{e2} must be detected");
                } else {
                    let expect = Letter::from_bits(x1 ^ x2, z2);
                    assert_eq!(out.unwrap(), vec![expect], "pattern {e1}{e2}");
                }
            }
        }
    }
}
