//! Stabilizer codes as executable measurement-based distillation recipes:
//! logical operators read off the standard form, the single-qubit decoding
//! schedule with its phase masks, syndrome handling, and the integrated
//! error-correction-plus-decoding recovery.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::bits::BitVec;
use crate::check::{standard_form, CheckMatrix, StandardForm};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// An `[[n, k, d]]` stabilizer code. The distance is declared metadata and is
/// not verified.
#[derive(Debug)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    d: usize,
    generators: CheckMatrix,
    std: OnceLock<StandardForm>,
    table: OnceLock<SyndromeTable>,
}

impl StabilizerCode {
    pub fn new(d: usize, generators: CheckMatrix) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("distance must be at least 1".into()));
        }
        let n = generators.n();
        let k = generators.k();
        Ok(Self { n, k, d, generators, std: OnceLock::new(), table: OnceLock::new() })
    }

    pub fn parse(d: usize, text: &str) -> Result<Self> {
        Self::new(d, CheckMatrix::parse(text)?)
    }

    /// The five-qubit code. Distance 3, corrects any single-qubit error.
    pub fn five_one_three() -> Self {
        Self::parse(3, "YZIZY\nIXZZX\nZZXIX\nZIZYY").expect("valid builtin code")
    }

    /// Two recurrence iterations of width 3 seen as one block code; detects
    /// any single-qubit error.
    pub fn nine_four_two() -> Self {
        Self::parse(2, "XXXIIIIII\nIIIXXXIII\nIIIIIIXXX\nZZIZZIZZI\nZIZZIZZIZ")
            .expect("valid builtin code")
    }

    /// Width-`n` parity-detection code with the single generator X₁X₂…Xₙ.
    pub fn x_parity(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("parity code needs width >= 2".into()));
        }
        let row = PauliString::from_letters(n, &(0..n).map(|q| (q, Letter::X)).collect::<Vec<_>>())?;
        Self::new(2, CheckMatrix::new(vec![row])?)
    }

    /// Code whose generators are the rows of a classical parity-check matrix
    /// written as Z strings; detects/corrects bit flips.
    pub fn z_type_from_parity_check(h: &crate::bits::BitMatrix) -> Result<Self> {
        let n = h.ncols();
        let rows: Vec<PauliString> = (0..h.nrows())
            .map(|i| {
                let letters: Vec<(usize, Letter)> =
                    h.row(i).iter_ones().map(|q| (q, Letter::Z)).collect();
                PauliString::from_letters(n, &letters)
            })
            .collect::<Result<_>>()?;
        // declared distance 1: the correction capability is supplied by the
        // coset-leader decoder, not by this lookup bound
        Self::new(1, CheckMatrix::new(rows)?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &CheckMatrix {
        &self.generators
    }

    /// Lazily derived standard form. Cannot fail for a validated check
    /// matrix.
    pub fn std(&self) -> &StandardForm {
        self.std
            .get_or_init(|| standard_form(&self.generators).expect("validated check matrix"))
    }

    /// Generators actually measured by the protocol: the standard-form rows
    /// in permuted qubit order, signs dropped (a common sign on both sides
    /// cancels out of every syndrome).
    pub fn measured_generators(&self) -> Vec<PauliString> {
        self.std()
            .rows()
            .iter()
            .map(|r| {
                let mut p = r.clone();
                p.set_sign(crate::pauli::Sign::Plus);
                p
            })
            .collect()
    }

    pub fn logical_operators(&self) -> LogicalOperators {
        logical_operators(self)
    }

    pub fn decoding_schedule(&self) -> DecodingSchedule {
        decoding_schedule(self)
    }

    /// Error syndrome from both parties' stabilizer parities, including the
    /// transpose adjustment for generators with an odd Pauli-Y count.
    pub fn syndrome(&self, s_a: &BitVec, s_b: &BitVec) -> Result<BitVec> {
        let m = self.n - self.k;
        if s_a.len() != m || s_b.len() != m {
            return Err(Error::DimensionMismatch { left: s_a.len(), right: s_b.len() });
        }
        let mut c = BitVec::zeros(m);
        for (i, row) in self.std().rows().iter().enumerate() {
            let bit = s_a.get(i) ^ s_b.get(i) ^ row.has_odd_y();
            c.set(i, bit);
        }
        Ok(c)
    }

    fn syndrome_table(&self) -> &SyndromeTable {
        self.table.get_or_init(|| SyndromeTable::build(self))
    }

    /// Minimum-weight recovery Pauli (in permuted qubit order) for syndrome
    /// `c`, from the lookup table covering weight ≤ ⌊(d−1)/2⌋.
    pub fn decode_syndrome(&self, c: &BitVec) -> Result<&PauliString> {
        let key = syndrome_key(c);
        self.syndrome_table()
            .entries
            .get(&key)
            .ok_or_else(|| Error::UncorrectableSyndrome {
                syndrome: (0..c.len()).map(|i| c.get(i)).collect(),
            })
    }

    /// Detection mode: accept only the all-zero syndrome.
    pub fn detect(&self, c: &BitVec) -> bool {
        c.is_zero()
    }

    /// Folds the recovery for syndrome `c` into Bob's decoding outcomes `b`:
    /// outcomes flip where the recovery anticommutes with the measurement
    /// basis, and the per-kept-qubit phase fix composes with the recovery's
    /// action there.
    pub fn integrated_recovery(
        &self,
        sched: &DecodingSchedule,
        b: &BitVec,
        c: &BitVec,
    ) -> Result<(BitVec, Vec<Letter>)> {
        let m = self.n - self.k;
        if b.len() != m {
            return Err(Error::DimensionMismatch { left: b.len(), right: m });
        }
        let recovery = self.decode_syndrome(c)?;
        let r = self.std().r();
        let mut b_adj = b.clone();
        for j in 0..m {
            let f = recovery.letter(j);
            let basis = if j < r { Letter::Z } else { Letter::X };
            if f.anticommutes(basis) {
                b_adj.flip(j);
            }
        }
        let mut finals = Vec::with_capacity(self.k);
        for i in 0..self.k {
            let beta_x = b_adj.masked_parity(&sched.x_phase_masks[i]);
            let beta_z = b_adj.masked_parity(&sched.z_phase_masks[i]);
            // Z fixes a flipped logical X sign, X fixes a flipped logical Z
            let fix = Letter::from_bits(beta_z, beta_x);
            finals.push(fix.mul_letter(recovery.letter(m + i)));
        }
        Ok((b_adj, finals))
    }
}

/// Logical X and Z operators in the permuted qubit order of the standard
/// form.
#[derive(Clone, Debug)]
pub struct LogicalOperators {
    pub lx: Vec<PauliString>,
    pub lz: Vec<PauliString>,
}

/// Logical operators read off the standard-form blocks:
/// `L_X = [0 Eᵀ I | Cᵀ 0 0]`, `L_Z = [0 0 0 | A₂ᵀ 0 I]`.
pub fn logical_operators(code: &StabilizerCode) -> LogicalOperators {
    let std = code.std();
    let (n, k, r) = (std.n(), std.k(), std.r());
    let m = n - k;
    let e = std.e();
    let c = std.c();
    let a2 = std.a2();
    let mut lx = Vec::with_capacity(k);
    let mut lz = Vec::with_capacity(k);
    for i in 0..k {
        let mut ox = PauliString::identity(n);
        for j in 0..m - r {
            if e.get(j, i) {
                ox.set_letter(r + j, Letter::X);
            }
        }
        ox.set_letter(m + i, Letter::X);
        for j in 0..r {
            if c.get(j, i) {
                ox.set_letter(j, Letter::Z);
            }
        }
        lx.push(ox);

        let mut oz = PauliString::identity(n);
        for j in 0..r {
            if a2.get(j, i) {
                oz.set_letter(j, Letter::Z);
            }
        }
        oz.set_letter(m + i, Letter::Z);
        lz.push(oz);
    }
    LogicalOperators { lx, lz }
}

/// Which permuted qubits are measured in which basis, and the phase masks
/// that turn measurement outcomes into logical sign corrections.
#[derive(Clone, Debug)]
pub struct DecodingSchedule {
    /// Permuted positions measured in the Z basis (the first `r`).
    pub z_measured: Vec<usize>,
    /// Permuted positions measured in the X basis (the next `n-k-r`).
    pub x_measured: Vec<usize>,
    /// Permuted positions kept as the decoded qubits (the last `k`).
    pub kept: Vec<usize>,
    /// Mask `i` dotted with the outcome vector gives the logical-X phase
    /// α_x of kept qubit `i`.
    pub x_phase_masks: Vec<BitVec>,
    /// Likewise for the logical-Z phase α_z.
    pub z_phase_masks: Vec<BitVec>,
}

pub fn decoding_schedule(code: &StabilizerCode) -> DecodingSchedule {
    let std = code.std();
    let (n, k, r) = (std.n(), std.k(), std.r());
    let m = n - k;
    let e = std.e();
    let c = std.c();
    let a2 = std.a2();
    let mut x_phase_masks = Vec::with_capacity(k);
    let mut z_phase_masks = Vec::with_capacity(k);
    for i in 0..k {
        let mut mx = BitVec::zeros(m);
        for j in 0..r {
            if c.get(j, i) {
                mx.set(j, true);
            }
        }
        for j in 0..m - r {
            if e.get(j, i) {
                mx.set(r + j, true);
            }
        }
        x_phase_masks.push(mx);
        let mut mz = BitVec::zeros(m);
        for j in 0..r {
            if a2.get(j, i) {
                mz.set(j, true);
            }
        }
        z_phase_masks.push(mz);
    }
    DecodingSchedule {
        z_measured: (0..r).collect(),
        x_measured: (r..m).collect(),
        kept: (m..n).collect(),
        x_phase_masks,
        z_phase_masks,
    }
}

/// Phase corrections (α_x, α_z) for all `k` kept qubits from one party's
/// decoding outcomes.
pub fn phase_corrections(sched: &DecodingSchedule, outcomes: &BitVec) -> Result<(BitVec, BitVec)> {
    let m = sched.z_measured.len() + sched.x_measured.len();
    if outcomes.len() != m {
        return Err(Error::DimensionMismatch { left: outcomes.len(), right: m });
    }
    let k = sched.kept.len();
    let mut ax = BitVec::zeros(k);
    let mut az = BitVec::zeros(k);
    for i in 0..k {
        ax.set(i, outcomes.masked_parity(&sched.x_phase_masks[i]));
        az.set(i, outcomes.masked_parity(&sched.z_phase_masks[i]));
    }
    Ok((ax, az))
}

fn syndrome_key(c: &BitVec) -> u64 {
    assert!(c.len() <= 64, "syndrome lookup supports up to 64 generators");
    c.words().first().copied().unwrap_or(0)
}

#[derive(Debug)]
struct SyndromeTable {
    entries: HashMap<u64, PauliString>,
}

impl SyndromeTable {
    /// Enumerates errors of weight ≤ ⌊(d−1)/2⌋ in deterministic order
    /// (weight, positions, letter) and records first-come minimum-weight
    /// recoveries.
    fn build(code: &StabilizerCode) -> Self {
        let n = code.n();
        let t = (code.d().saturating_sub(1)) / 2;
        let gens = code.measured_generators();
        let mut entries = HashMap::new();
        entries.insert(0u64, PauliString::identity(n));
        let mut current: Vec<PauliString> = vec![PauliString::identity(n)];
        for _w in 1..=t {
            let mut next = Vec::new();
            for base in &current {
                let start = (0..n).rev().find(|&q| base.letter(q) != Letter::I).map_or(0, |q| q + 1);
                for q in start..n {
                    for letter in Letter::ERRORS {
                        let mut e = base.clone();
                        e.set_letter(q, letter);
                        let mut key = 0u64;
                        for (i, g) in gens.iter().enumerate() {
                            if crate::pauli::symplectic_product(g, &e).expect("equal length") {
                                key |= 1 << i;
                            }
                        }
                        entries.entry(key).or_insert_with(|| e.clone());
                        next.push(e);
                    }
                }
            }
            current = next;
        }
        Self { entries }
    }
}
