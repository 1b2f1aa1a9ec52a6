//! Minimal circuit IR for measurement-based protocol synthesis and
//! depth/gate/span accounting.
//!
//! Circuits are flat gate lists over data qubits (standard-form position
//! order) plus one fresh ancilla per stabilizer gadget. Depth counts only
//! two-qubit gates, assigned greedily to the earliest slot where both qubits
//! are free; the full schedule for the netlist additionally preserves
//! per-qubit gate order and places classically controlled Paulis after all
//! measurements.

use crate::bits::BitVec;
use crate::block::StabilizerCode;
use crate::conv::{generator_letters, ConvCode, ConvRunner, StreamOutcomes};
use crate::distill::{BlockDecoder, BlockOutcomes, BlockRunner, SyndromeMode};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::rng::trial_rng;
use crate::tableau::{BellRegister, Tableau};
use rand::Rng;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    S,
    Cnot,
    PauliX,
    PauliY,
    PauliZ,
    MeasX,
    MeasZ,
    /// Pauli applied under classical control of earlier measurement
    /// outcomes; the controlling function lives in the protocol layer.
    ClassicalPauli,
}

impl GateKind {
    pub fn is_two_qubit(self) -> bool {
        self == GateKind::Cnot
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, GateKind::MeasX | GateKind::MeasZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Cnot => "CNOT",
            GateKind::PauliX => "X",
            GateKind::PauliY => "Y",
            GateKind::PauliZ => "Z",
            GateKind::MeasX => "MX",
            GateKind::MeasZ => "MZ",
            GateKind::ClassicalPauli => "CPAULI",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

/// A circuit over `n_qubits` qubits with a frame tag per qubit.
#[derive(Clone, Debug)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub qubit_frame: Vec<i64>,
    /// Number of frames this circuit's gate budget is accounted against.
    pub frames: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CircuitMetrics {
    /// Time steps containing at least one two-qubit gate.
    pub depth2q: usize,
    pub gates2q_per_frame: usize,
    /// Longest frame extent of any two-qubit gate.
    pub span_frames: usize,
}

/// Reference constants for the unitary decoding of the rate-1/3 code,
/// loaded as fixed comparison data.
pub const UNITARY_RATE_THIRD_REFERENCE: CircuitMetrics =
    CircuitMetrics { depth2q: 11, gates2q_per_frame: 14, span_frames: 3 };

impl Circuit {
    pub fn new(n_qubits: usize, qubit_frame: Vec<i64>, frames: usize) -> Self {
        assert_eq!(qubit_frame.len(), n_qubits);
        Self { n_qubits, gates: Vec::new(), qubit_frame, frames }
    }

    fn push(&mut self, kind: GateKind, qubits: &[usize]) {
        self.gates.push(Gate { kind, qubits: qubits.to_vec() });
    }

    /// Earliest-slot assignment of the two-qubit subsequence: each gate goes
    /// into the lowest slot where both its qubits are free.
    pub fn depth2q(&self) -> usize {
        let mut slots: Vec<BitVec> = Vec::new();
        for gate in self.gates.iter().filter(|g| g.kind.is_two_qubit()) {
            let (a, b) = (gate.qubits[0], gate.qubits[1]);
            let slot = slots
                .iter()
                .position(|busy| !busy.get(a) && !busy.get(b))
                .unwrap_or_else(|| {
                    slots.push(BitVec::zeros(self.n_qubits));
                    slots.len() - 1
                });
            slots[slot].set(a, true);
            slots[slot].set(b, true);
        }
        slots.len()
    }

    /// Order-preserving greedy schedule over all gates: per-qubit sequencing
    /// is kept, gates in one step act on disjoint qubits, and classically
    /// controlled gates run strictly after every measurement.
    pub fn schedule(&self) -> Vec<u32> {
        let mut next_free = vec![0u32; self.n_qubits];
        let mut last_meas_end = 0u32;
        let mut out = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let mut t = gate.qubits.iter().map(|&q| next_free[q]).max().unwrap_or(0);
            if gate.kind == GateKind::ClassicalPauli {
                t = t.max(last_meas_end);
            }
            for &q in &gate.qubits {
                next_free[q] = t + 1;
            }
            if gate.kind.is_measurement() {
                last_meas_end = last_meas_end.max(t + 1);
            }
            out.push(t);
        }
        out
    }

    pub fn metrics(&self) -> CircuitMetrics {
        let total_2q = self.gates.iter().filter(|g| g.kind.is_two_qubit()).count();
        let span = self
            .gates
            .iter()
            .filter(|g| g.kind.is_two_qubit())
            .map(|g| {
                let fs: Vec<i64> = g.qubits.iter().map(|&q| self.qubit_frame[q]).collect();
                (fs.iter().max().unwrap() - fs.iter().min().unwrap() + 1) as usize
            })
            .max()
            .unwrap_or(0);
        CircuitMetrics {
            depth2q: self.depth2q(),
            gates2q_per_frame: total_2q / self.frames.max(1),
            span_frames: span,
        }
    }

    /// Text netlist: one gate per line as `kind targets... @step`.
    pub fn netlist(&self) -> String {
        let times = self.schedule();
        let mut out = String::new();
        for (gate, t) in self.gates.iter().zip(times) {
            let targets: Vec<String> = gate.qubits.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("{} {} @{}\n", gate.kind.name(), targets.join(" "), t));
        }
        out
    }

    /// Relabels qubits (metrics must be invariant under this).
    pub fn relabeled(&self, map: &[usize]) -> Self {
        let mut frame = vec![0; self.n_qubits];
        for (q, &m) in map.iter().enumerate() {
            frame[m] = self.qubit_frame[q];
        }
        Self {
            n_qubits: self.n_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    kind: g.kind,
                    qubits: g.qubits.iter().map(|&q| map[q]).collect(),
                })
                .collect(),
            qubit_frame: frame,
            frames: self.frames,
        }
    }
}

/// Emits the controlled-`letter` gadget coupling `anc -> q` using only the
/// H/S/CNOT gate set (S³ = S†).
fn push_controlled_letter(c: &mut Circuit, anc: usize, q: usize, letter: Letter) {
    match letter {
        Letter::I => {}
        Letter::X => c.push(GateKind::Cnot, &[anc, q]),
        Letter::Z => {
            c.push(GateKind::H, &[q]);
            c.push(GateKind::Cnot, &[anc, q]);
            c.push(GateKind::H, &[q]);
        }
        Letter::Y => {
            c.push(GateKind::S, &[q]);
            c.push(GateKind::S, &[q]);
            c.push(GateKind::S, &[q]);
            c.push(GateKind::Cnot, &[anc, q]);
            c.push(GateKind::S, &[q]);
        }
    }
}

/// One side's measurement circuit for a block code, with the
/// error-correction-and-decoding integration applied: once a data qubit's
/// decoding measurement has happened, later gadgets replace their Z coupling
/// to it by a classical XOR of that outcome.
pub struct BlockCircuit {
    pub circuit: Circuit,
    /// Decode-outcome indices XORed into each gadget's raw ancilla outcome
    /// to recover the unreduced stabilizer parity.
    pub stripped: Vec<Vec<usize>>,
    m: usize,
}

pub fn synthesize_block_circuit(code: &StabilizerCode) -> Result<BlockCircuit> {
    let n = code.n();
    let k = code.k();
    let m = n - k;
    let std = code.std();
    let r = std.r();
    let gens = code.measured_generators();
    let mut circuit = Circuit::new(n + m, vec![0; n + m], 1);
    let mut stripped = Vec::with_capacity(m);
    for (i, g) in gens.iter().enumerate() {
        let anc = n + i;
        let mut strip = Vec::new();
        circuit.push(GateKind::H, &[anc]);
        for q in 0..n {
            let letter = g.letter(q);
            if letter == Letter::I {
                continue;
            }
            // positions already measured in the Z basis couple via Z only;
            // replace the gate by classical postprocessing
            if letter == Letter::Z && q < r.min(i) {
                strip.push(q);
                continue;
            }
            push_controlled_letter(&mut circuit, anc, q, letter);
        }
        circuit.push(GateKind::H, &[anc]);
        circuit.push(GateKind::MeasZ, &[anc]);
        // this position's own decoding measurement follows its gadget
        if i < m {
            let kind = if i < r { GateKind::MeasZ } else { GateKind::MeasX };
            circuit.push(kind, &[i]);
        }
        stripped.push(strip);
    }
    for kept in m..n {
        circuit.push(GateKind::ClassicalPauli, &[kept]);
    }
    Ok(BlockCircuit { circuit, stripped, m })
}

impl BlockCircuit {
    /// Splits the interleaved outcome stream `[s'_0, a_0, s'_1, a_1, ...]`
    /// into unreduced stabilizer parities and decoding parities.
    pub fn interpret_outcomes(&self, outcomes: &[bool]) -> Result<(BitVec, BitVec)> {
        if outcomes.len() != 2 * self.m {
            return Err(Error::DimensionMismatch { left: outcomes.len(), right: 2 * self.m });
        }
        let mut s = BitVec::zeros(self.m);
        let mut a = BitVec::zeros(self.m);
        for i in 0..self.m {
            a.set(i, outcomes[2 * i + 1]);
        }
        for i in 0..self.m {
            let mut bit = outcomes[2 * i];
            for &j in &self.stripped[i] {
                bit ^= a.get(j);
            }
            s.set(i, bit);
        }
        Ok((s, a))
    }
}

/// Executes a gate list on a tableau through a qubit map, collecting
/// measurement outcomes in order. `ClassicalPauli` placeholders are skipped;
/// the protocol layer applies their effect from the interpreted outcomes.
pub fn execute_gates(
    tab: &mut Tableau,
    gates: &[Gate],
    map: impl Fn(usize) -> usize,
    rng: &mut impl Rng,
) -> Result<Vec<bool>> {
    let mut outcomes = Vec::new();
    for gate in gates {
        let q0 = map(gate.qubits[0]);
        match gate.kind {
            GateKind::H => tab.h(q0),
            GateKind::S => tab.s(q0),
            GateKind::Cnot => tab.cnot(q0, map(gate.qubits[1])),
            GateKind::PauliX => tab.x(q0),
            GateKind::PauliY => tab.y(q0),
            GateKind::PauliZ => tab.z(q0),
            GateKind::MeasZ => {
                let p = PauliString::single(tab.n(), q0, Letter::Z)?;
                outcomes.push(tab.measure(&p, rng)?.0);
            }
            GateKind::MeasX => {
                let p = PauliString::single(tab.n(), q0, Letter::X)?;
                outcomes.push(tab.measure(&p, rng)?.0);
            }
            GateKind::ClassicalPauli => {}
        }
    }
    Ok(outcomes)
}

/// Runs one trial of the block protocol with both sides implemented by the
/// synthesized circuit, sharing the classical tail with the direct runner.
pub fn run_block_circuit_trial(
    code: &StabilizerCode,
    mode: SyndromeMode,
    pattern: &[Letter],
    seed: u64,
) -> Result<Option<Vec<Letter>>> {
    let decoder = match mode {
        SyndromeMode::Correct => BlockDecoder::Lookup(code),
        SyndromeMode::Detect => BlockDecoder::Detect,
    };
    let runner = BlockRunner::new(code, decoder)?;
    let bc = synthesize_block_circuit(code)?;
    let n = code.n();
    let m = n - code.k();
    let perm = code.std().column_perm().to_vec();
    let mut reg = BellRegister::with_workspace(n, 2 * m)?;
    let mut rng = trial_rng(seed, 0);
    for (pair, &letter) in pattern.iter().enumerate() {
        reg.tab.apply_letter(reg.bob(pair), letter);
    }
    // Alice: data qubit pos -> perm[pos], ancilla j -> 2n + j
    let alice_out = execute_gates(
        &mut reg.tab,
        &bc.circuit.gates,
        |q| if q < n { perm[q] } else { 2 * n + (q - n) },
        &mut rng,
    )?;
    let bob_out = execute_gates(
        &mut reg.tab,
        &bc.circuit.gates,
        |q| if q < n { n + perm[q] } else { 2 * n + m + (q - n) },
        &mut rng,
    )?;
    let (s_a, a) = bc.interpret_outcomes(&alice_out)?;
    let (s_b, b) = bc.interpret_outcomes(&bob_out)?;
    runner.finish_block(&mut reg, &BlockOutcomes { s_a, a, s_b, b })
}

/// Unit-cell circuit of the streaming measurement protocol: the two-qubit
/// gates landing on one frame in steady state. Those are the current
/// frame's generator couplings at delay zero plus the previous frame's
/// couplings at delay one, together with that frame's ancilla open/close
/// and decoding measurements.
pub fn synthesize_conv_frame_circuit(code: &ConvCode) -> Result<Circuit> {
    let n = code.n();
    let k = code.k();
    let m = n - k;
    let span = code.constraint_len() as i64;
    if span != 1 {
        return Err(Error::Domain(
            "frame unit-cell synthesis expects a one-frame constraint span".into(),
        ));
    }
    // qubits: 0..n data (frame 1), then the current frame's ancillas
    // (frame 1), then the previous frame's ancillas (frame 0)
    let n_qubits = n + 2 * m;
    let mut frames_tags = vec![1i64; n + m];
    frames_tags.extend(vec![0i64; m]);
    let mut c = Circuit::new(n_qubits, frames_tags, 1);
    for gen in 0..m {
        c.push(GateKind::H, &[n + gen]);
    }
    // current frame gadgets: delay-0 letters; previous frame gadgets:
    // delay-1 letters, both acting on this frame's data qubits
    for (anc_base, delay) in [(n, 0i64), (n + m, 1i64)] {
        for gen in 0..m {
            let anc = anc_base + gen;
            for (f, q, letter) in generator_letters(code, gen, 0) {
                if f == delay {
                    push_controlled_letter(&mut c, anc, q, letter);
                }
            }
        }
    }
    for gen in 0..m {
        let anc = n + m + gen;
        c.push(GateKind::H, &[anc]);
        c.push(GateKind::MeasZ, &[anc]);
    }
    for slot in 0..m {
        c.push(GateKind::MeasZ, &[slot]);
    }
    for kept in m..n {
        c.push(GateKind::ClassicalPauli, &[kept]);
    }
    Ok(c)
}

/// Full streaming circuit over a finite window, for execution equivalence:
/// per base frame two ancilla gadgets measuring the shift-invariant
/// generators, then every frame's decoding measurements.
pub struct ConvStreamCircuit {
    pub circuit: Circuit,
    frames: usize,
    n: usize,
    m: usize,
    bases: usize,
}

impl ConvStreamCircuit {
    pub fn frames(&self) -> usize {
        self.frames
    }
}

pub fn synthesize_conv_stream_circuit(code: &ConvCode, frames: usize) -> Result<ConvStreamCircuit> {
    let n = code.n();
    let k = code.k();
    let m = n - k;
    let span = code.constraint_len();
    if frames < span + 2 {
        return Err(Error::Domain("window too small".into()));
    }
    let bases = frames - span;
    let data = n * frames;
    let n_qubits = data + m * bases;
    let mut tags: Vec<i64> = (0..data).map(|q| (q / n) as i64).collect();
    for base in 0..bases {
        tags.extend(std::iter::repeat(base as i64).take(m));
    }
    let mut c = Circuit::new(n_qubits, tags, frames);
    for base in 0..bases {
        for gen in 0..m {
            let anc = data + base * m + gen;
            c.push(GateKind::H, &[anc]);
            for (f, q, letter) in generator_letters(code, gen, base as i64) {
                push_controlled_letter(&mut c, anc, (f as usize) * n + q, letter);
            }
            c.push(GateKind::H, &[anc]);
            c.push(GateKind::MeasZ, &[anc]);
        }
    }
    for frame in 0..frames {
        for slot in 0..m {
            c.push(GateKind::MeasZ, &[frame * n + slot]);
        }
    }
    for frame in 0..frames {
        c.push(GateKind::ClassicalPauli, &[frame * n + m]);
    }
    Ok(ConvStreamCircuit { circuit: c, frames, n, m, bases })
}

/// Runs one streaming trial through the synthesized circuit, sharing the
/// classical tail with the direct runner.
pub fn run_conv_circuit_trial(
    code: &ConvCode,
    frames: usize,
    pattern: &[Letter],
    seed: u64,
) -> Result<Vec<Letter>> {
    let runner = ConvRunner::new(code, frames)?;
    let sc = synthesize_conv_stream_circuit(code, frames)?;
    let pairs = sc.n * frames;
    if pattern.len() != pairs {
        return Err(Error::DimensionMismatch { left: pattern.len(), right: pairs });
    }
    let anc_per_side = sc.m * sc.bases;
    let mut reg = BellRegister::with_workspace(pairs, 2 * anc_per_side)?;
    let mut rng = trial_rng(seed, 0);
    for (pair, &letter) in pattern.iter().enumerate() {
        reg.tab.apply_letter(reg.bob(pair), letter);
    }
    let alice_out = execute_gates(
        &mut reg.tab,
        &sc.circuit.gates,
        |q| if q < pairs { q } else { 2 * pairs + (q - pairs) },
        &mut rng,
    )?;
    let bob_out = execute_gates(
        &mut reg.tab,
        &sc.circuit.gates,
        |q| {
            if q < pairs {
                pairs + q
            } else {
                2 * pairs + anc_per_side + (q - pairs)
            }
        },
        &mut rng,
    )?;
    let interpret = |out: &[bool]| -> (Vec<u8>, Vec<Vec<bool>>) {
        let mut s = vec![0u8; sc.bases];
        for base in 0..sc.bases {
            for gen in 0..sc.m {
                if out[base * sc.m + gen] {
                    s[base] |= 1 << gen;
                }
            }
        }
        let dec_off = sc.bases * sc.m;
        let mut dec = vec![vec![false; sc.m]; sc.frames];
        for frame in 0..sc.frames {
            for slot in 0..sc.m {
                dec[frame][slot] = out[dec_off + frame * sc.m + slot];
            }
        }
        (s, dec)
    };
    let (s_a, a) = interpret(&alice_out);
    let (s_b, b) = interpret(&bob_out);
    runner.finish_stream(&mut reg, StreamOutcomes { s_a, s_b, a, b })
}
