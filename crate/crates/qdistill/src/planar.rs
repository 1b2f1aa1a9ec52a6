//! Planar surface codes on an L×L lattice: construction, string logical
//! operators, the resource-Bell encoder protocol, measurement-error
//! threshold analysis, teleportation-based encode/decode, and
//! effective-channel distillation of the resource state.

use std::collections::HashMap;

use crate::bits::BitVec;
use crate::distill::{parity_detect_transfer, NoiseSpec, PauliChannel, ProtocolResult, TrialStats};
use crate::error::{Error, Result};
use crate::exec::{run_trials, RunCfg};
use crate::pauli::{Letter, PauliString};
use crate::rng::{noise_rng, trial_rng};
use crate::tableau::{BellRegister, Tableau};
use rand::Rng;

/// Default cap on the lattice length for tableau-backed protocol runs.
pub const DEFAULT_L_CAP: usize = 12;

/// Planar code with parameters [[2L²-2L+1, 1, L]]: qubits sit on the L²
/// horizontal and (L-1)² vertical edges; vertex stars are X stabilizers,
/// plaquettes Z stabilizers, boundary variants have weight 3.
#[derive(Clone, Debug)]
pub struct PlanarLattice {
    l: usize,
    n_qubits: usize,
    x_stabs: Vec<Vec<usize>>,
    z_stabs: Vec<Vec<usize>>,
    /// Column string of horizontal edges; crosses every Z stabilizer evenly.
    x_logical: Vec<usize>,
    /// Row string of horizontal edges; crosses every X stabilizer evenly.
    z_logical: Vec<usize>,
}

impl PlanarLattice {
    /// Horizontal edge (row, col), row and col in 0..L.
    fn h(&self, row: usize, col: usize) -> usize {
        row * self.l + col
    }

    /// Vertical edge (row, col), both in 0..L-1.
    fn v(&self, row: usize, col: usize) -> usize {
        self.l * self.l + row * (self.l - 1) + col
    }

    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_stabs(&self) -> &[Vec<usize>] {
        &self.x_stabs
    }

    pub fn z_stabs(&self) -> &[Vec<usize>] {
        &self.z_stabs
    }

    pub fn x_logical(&self) -> &[usize] {
        &self.x_logical
    }

    pub fn z_logical(&self) -> &[usize] {
        &self.z_logical
    }

    /// Alternative logical strings through column `col` and row `row`; the
    /// defaults are `col = 0`, `row = 0`.
    pub fn logical_strings(&self, row: usize, col: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        if row >= self.l || col >= self.l {
            return Err(Error::QubitOutOfRange { index: row.max(col), n: self.l });
        }
        let x_str = (0..self.l).map(|i| self.h(i, col)).collect();
        let z_str = (0..self.l).map(|j| self.h(row, j)).collect();
        Ok((x_str, z_str))
    }

    /// Adjacency dump: one stabilizer per line with its qubit indices.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.x_stabs.iter().enumerate() {
            out.push_str(&format!("X{} {:?}\n", i, s));
        }
        for (i, s) in self.z_stabs.iter().enumerate() {
            out.push_str(&format!("Z{} {:?}\n", i, s));
        }
        out.push_str(&format!("XL {:?}\n", self.x_logical));
        out.push_str(&format!("ZL {:?}\n", self.z_logical));
        out
    }
}

pub fn build_planar(l: usize) -> Result<PlanarLattice> {
    if l < 2 {
        return Err(Error::Domain(format!("lattice length {l} must be at least 2")));
    }
    let n_qubits = 2 * l * l - 2 * l + 1;
    let mut lat = PlanarLattice {
        l,
        n_qubits,
        x_stabs: Vec::new(),
        z_stabs: Vec::new(),
        x_logical: Vec::new(),
        z_logical: Vec::new(),
    };
    for row in 0..l {
        for col in 0..l - 1 {
            let mut star = vec![lat.h(row, col), lat.h(row, col + 1)];
            if row > 0 {
                star.push(lat.v(row - 1, col));
            }
            if row < l - 1 {
                star.push(lat.v(row, col));
            }
            lat.x_stabs.push(star);
        }
    }
    for row in 0..l - 1 {
        for col in 0..l {
            let mut plaq = vec![lat.h(row, col), lat.h(row + 1, col)];
            if col > 0 {
                plaq.push(lat.v(row, col - 1));
            }
            if col < l - 1 {
                plaq.push(lat.v(row, col));
            }
            lat.z_stabs.push(plaq);
        }
    }
    let (x_logical, z_logical) = {
        let x_str = (0..l).map(|i| lat.h(i, 0)).collect();
        let z_str = (0..l).map(|j| lat.h(0, j)).collect();
        (x_str, z_str)
    };
    lat.x_logical = x_logical;
    lat.z_logical = z_logical;
    Ok(lat)
}

/// Single-qubit decoding measurements: the X-basis list along the logical X
/// string and the Z-basis list along the logical Z string, both excluding
/// the intersection qubit, which is the decoded qubit.
pub fn decoding_measurement_set(lat: &PlanarLattice) -> (Vec<usize>, Vec<usize>, usize) {
    let kept = lat.x_logical[0];
    debug_assert_eq!(kept, lat.z_logical[0]);
    let x_list = lat.x_logical[1..].to_vec();
    let z_list = lat.z_logical[1..].to_vec();
    (z_list, x_list, kept)
}

/// Analytic decoding error probability: with per-measurement flip
/// probability `p`, a parity over L-1 outcomes errs with
/// `q = 1/2 - (1-2p)^{L-1}/2`, and the decoded qubit suffers
/// `P_L = 2q - q² = 3/4 - (1-2p)^{L-1}/2 - (1-2p)^{2(L-1)}/4`.
pub fn decode_error_prob(p: f64, l: usize) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Domain(format!("measurement flip probability {p} outside [0, 1/2]")));
    }
    if l < 2 {
        return Err(Error::Domain("lattice length must be at least 2".into()));
    }
    let x = (1.0 - 2.0 * p).powi(l as i32 - 1);
    Ok(0.75 - 0.5 * x - 0.25 * x * x)
}

/// Root of `P_L(p) = 1/2`: with `x = (1-2p)^{L-1}` the equation becomes
/// `x² + 2x - 1 = 0`, so `x = √2 - 1` and
/// `p = (1 - (√2-1)^{1/(L-1)})/2`.
pub fn measurement_threshold(l: usize) -> Result<f64> {
    if l < 2 {
        return Err(Error::Domain("lattice length must be at least 2".into()));
    }
    let x = std::f64::consts::SQRT_2 - 1.0;
    Ok(0.5 * (1.0 - x.powf(1.0 / (l as f64 - 1.0))))
}

/// Analytic threshold samples over a lattice-size range.
#[derive(Clone, Debug)]
pub struct ThresholdResult {
    pub l: usize,
    pub p_threshold: f64,
}

pub fn threshold_curve(l_min: usize, l_max: usize) -> Result<Vec<ThresholdResult>> {
    if l_min < 2 || l_max < l_min {
        return Err(Error::Domain("bad lattice range".into()));
    }
    (l_min..=l_max)
        .map(|l| Ok(ThresholdResult { l, p_threshold: measurement_threshold(l)? }))
        .collect()
}

/// Least-squares slope of ln(threshold) against ln(L) over a range.
pub fn threshold_loglog_slope(l_min: usize, l_max: usize) -> Result<f64> {
    let curve = threshold_curve(l_min, l_max)?;
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .map(|t| ((t.l as f64).ln(), t.p_threshold.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Precompiled resource-Bell protocol for one lattice size.
pub struct ResourceRunner {
    lat: PlanarLattice,
    template: BellRegister,
    meas_alice: Vec<PauliString>,
    meas_bob: Vec<PauliString>,
    dec_x: Vec<usize>,
    dec_z: Vec<usize>,
    kept: usize,
    x_check: PauliString,
    z_check: PauliString,
    /// syndrome (as words) -> recovery on Bob, covering single-qubit errors
    /// (and up to weight ⌊(L-1)/2⌋ for L ≤ 4)
    table: HashMap<Vec<u64>, PauliString>,
}

impl ResourceRunner {
    pub fn new(l: usize, cap: usize) -> Result<Self> {
        if l > cap {
            return Err(Error::CapExceeded { l, cap });
        }
        let lat = build_planar(l)?;
        let n = lat.n_qubits();
        let template = BellRegister::new(n)?;
        let total = 2 * n;
        let stab_letters = |s: &[usize], letter: Letter, offset: usize| -> Result<PauliString> {
            PauliString::from_letters(total, &s.iter().map(|&q| (offset + q, letter)).collect::<Vec<_>>())
        };
        let mut meas_alice = Vec::new();
        let mut meas_bob = Vec::new();
        for s in lat.x_stabs() {
            meas_alice.push(stab_letters(s, Letter::X, 0)?);
            meas_bob.push(stab_letters(s, Letter::X, n)?);
        }
        for s in lat.z_stabs() {
            meas_alice.push(stab_letters(s, Letter::Z, 0)?);
            meas_bob.push(stab_letters(s, Letter::Z, n)?);
        }
        let (dec_z, dec_x, kept) = decoding_measurement_set(&lat);
        // residual checks: X_kept ⊗ X_L(Bob), Z_kept ⊗ Z_L(Bob)
        let mut x_check_letters: Vec<(usize, Letter)> =
            lat.x_logical().iter().map(|&q| (n + q, Letter::X)).collect();
        x_check_letters.push((kept, Letter::X));
        let x_check = PauliString::from_letters(total, &x_check_letters)?;
        let mut z_check_letters: Vec<(usize, Letter)> =
            lat.z_logical().iter().map(|&q| (n + q, Letter::Z)).collect();
        z_check_letters.push((kept, Letter::Z));
        let z_check = PauliString::from_letters(total, &z_check_letters)?;
        let table = build_syndrome_table(&lat)?;
        Ok(Self { lat, template, meas_alice, meas_bob, dec_x, dec_z, kept, x_check, z_check, table })
    }

    pub fn lattice(&self) -> &PlanarLattice {
        &self.lat
    }

    pub fn fresh_scratch(&self) -> BellRegister {
        self.template.clone()
    }

    /// Steps 1-4 of the resource protocol on one injected error pattern:
    /// transversal Bell creation (template), both-side stabilizer
    /// projection, syndrome correction on Bob, Alice's string decoding with
    /// per-outcome flips, then residual classification of the
    /// physical-logical pair. `None` means the syndrome had no table entry.
    pub fn run(
        &self,
        scratch: &mut BellRegister,
        pattern: &[Letter],
        noise: &NoiseSpec,
        nrng: &mut impl Rng,
        rng: &mut impl Rng,
    ) -> Result<Option<Letter>> {
        let n = self.lat.n_qubits();
        scratch.clone_state_from(&self.template);
        for (q, &letter) in pattern.iter().enumerate() {
            scratch.tab.apply_letter(scratch.bob(q), letter);
        }
        let m = self.meas_alice.len();
        let mut c = BitVec::zeros(m);
        let mut s_a = BitVec::zeros(m);
        for (i, g) in self.meas_alice.iter().enumerate() {
            let (o, _) = scratch.tab.measure(g, rng)?;
            s_a.set(i, o);
        }
        for (i, g) in self.meas_bob.iter().enumerate() {
            let (o, _) = scratch.tab.measure(g, rng)?;
            c.set(i, o ^ s_a.get(i));
        }
        if !c.is_zero() {
            let Some(recovery) = self.table.get(c.words()) else {
                return Ok(None);
            };
            let embedded = recovery.embed(2 * n, n, None)?;
            scratch.tab.apply_pauli(&embedded)?;
        }
        // Alice decodes her block along the two strings; recorded outcomes
        // may flip
        let mut ax = false;
        for &q in &self.dec_x {
            let p = PauliString::single(2 * n, q, Letter::X)?;
            let (o, _) = scratch.tab.measure(&p, rng)?;
            ax ^= noise.flip_outcome(o, nrng);
        }
        let mut az = false;
        for &q in &self.dec_z {
            let p = PauliString::single(2 * n, q, Letter::Z)?;
            let (o, _) = scratch.tab.measure(&p, rng)?;
            az ^= noise.flip_outcome(o, nrng);
        }
        if ax {
            scratch.tab.z(self.kept);
        }
        if az {
            scratch.tab.x(self.kept);
        }
        let sx = scratch.tab.peek(&self.x_check)?;
        let sz = scratch.tab.peek(&self.z_check)?;
        match (sx, sz) {
            (Some(sx), Some(sz)) => Ok(Some(Letter::from_bits(sz, sx))),
            _ => Err(Error::ContractViolation(
                "physical-logical pair still entangled with decoded qubits".into(),
            )),
        }
    }
}

fn build_syndrome_table(lat: &PlanarLattice) -> Result<HashMap<Vec<u64>, PauliString>> {
    let n = lat.n_qubits();
    let m = 2 * n - 2 * lat.l() * (lat.l() - 1) + 0; // n-1 checks
    let m = debug_checked_m(lat, m);
    let t = if lat.l() <= 4 { (lat.l() - 1) / 2 } else { 1 };
    let gens: Vec<(Letter, &Vec<usize>)> = lat
        .x_stabs()
        .iter()
        .map(|s| (Letter::X, s))
        .chain(lat.z_stabs().iter().map(|s| (Letter::Z, s)))
        .collect();
    let syndrome_of = |e: &PauliString| -> BitVec {
        let mut c = BitVec::zeros(m);
        for (i, (letter, support)) in gens.iter().enumerate() {
            let mut anti = false;
            for &q in support.iter() {
                anti ^= letter.anticommutes(e.letter(q));
            }
            if anti {
                c.set(i, true);
            }
        }
        c
    };
    let mut table = HashMap::new();
    table.insert(BitVec::zeros(m).words().to_vec(), PauliString::identity(n));
    let mut current = vec![PauliString::identity(n)];
    for _w in 1..=t {
        let mut next = Vec::new();
        for base in &current {
            let start =
                (0..n).rev().find(|&q| base.letter(q) != Letter::I).map_or(0, |q| q + 1);
            for q in start..n {
                for letter in Letter::ERRORS {
                    let mut e = base.clone();
                    e.set_letter(q, letter);
                    let c = syndrome_of(&e);
                    table.entry(c.words().to_vec()).or_insert_with(|| e.clone());
                    next.push(e);
                }
            }
        }
        current = next;
    }
    Ok(table)
}

fn debug_checked_m(lat: &PlanarLattice, _m: usize) -> usize {
    lat.x_stabs().len() + lat.z_stabs().len()
}

/// Monte Carlo of the five-step resource protocol (steps 1-4; step 5 is
/// teleportation, see [`TeleportLab`]). The residual histogram over the
/// physical-logical pair is the protocol's error channel; fidelity is
/// `1 - P_L`.
pub fn run_resource_protocol(l: usize, noise: &NoiseSpec, cfg: &RunCfg) -> Result<ProtocolResult> {
    run_resource_protocol_capped(l, noise, cfg, DEFAULT_L_CAP)
}

pub fn run_resource_protocol_capped(
    l: usize,
    noise: &NoiseSpec,
    cfg: &RunCfg,
    cap: usize,
) -> Result<ProtocolResult> {
    let runner = ResourceRunner::new(l, cap)?;
    let n = runner.lattice().n_qubits();
    let stats = run_trials(
        cfg,
        || runner.fresh_scratch(),
        |scratch, trial| {
            let mut nrng = noise_rng(cfg.seed, trial);
            let mut rng = trial_rng(cfg.seed, trial);
            let pattern: Vec<Letter> = (0..n).map(|_| noise.sample_letter(&mut nrng)).collect();
            match runner.run(scratch, &pattern, noise, &mut nrng, &mut rng) {
                Ok(Some(residual)) => TrialStats::success(&[residual]),
                Ok(None) => TrialStats::failure(),
                Err(_) => TrialStats::error(),
            }
        },
        TrialStats::zero,
        TrialStats::merge,
    );
    if stats.errors > 0 {
        return Err(Error::Domain("resource protocol hit a contract violation".into()));
    }
    Ok(ProtocolResult::from_stats(stats, n, 1))
}

/// One deterministic run with a fixed injected pattern, for sweeps.
pub fn run_resource_with_pattern(l: usize, pattern: &[Letter], seed: u64) -> Result<Letter> {
    let runner = ResourceRunner::new(l, DEFAULT_L_CAP)?;
    if pattern.len() != runner.lattice().n_qubits() {
        return Err(Error::DimensionMismatch {
            left: pattern.len(),
            right: runner.lattice().n_qubits(),
        });
    }
    let mut scratch = runner.fresh_scratch();
    let mut nrng = noise_rng(seed, 0);
    let mut rng = trial_rng(seed, 0);
    runner
        .run(&mut scratch, pattern, &NoiseSpec::noiseless(), &mut nrng, &mut rng)?
        .ok_or_else(|| Error::UncorrectableSyndrome { syndrome: vec![] })
}

/// Effective-channel distillation of the resource state: applies the
/// width-n parity-detection transfer function (with bilateral-Hadamard
/// swaps between iterations) `rounds` times at the class-distribution
/// level. Requires total error below 1/2 and reports per-round channels.
pub fn distill_resource(
    input: &PauliChannel,
    width: usize,
    iterations: usize,
    rounds: usize,
) -> Result<Vec<(f64, PauliChannel)>> {
    if input.total_error() >= 0.5 {
        return Err(Error::Domain(format!(
            "input not distillable: total error {:.4} >= 1/2",
            input.total_error()
        )));
    }
    if iterations == 0 || rounds == 0 {
        return Err(Error::Domain("need at least one iteration and one round".into()));
    }
    let mut ch = *input;
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let mut accept_round = 1.0;
        let mut cur = ch;
        for it in 0..iterations {
            if it > 0 {
                cur = cur.hadamard();
            }
            let (accept, next) = parity_detect_transfer(&cur, width)?;
            accept_round *= accept;
            cur = next;
        }
        if cur.total_error() > ch.total_error() + 1e-12 {
            return Err(Error::Domain(format!(
                "no improvement: {:.4} -> {:.4}",
                ch.total_error(),
                cur.total_error()
            )));
        }
        ch = cur;
        out.push((accept_round, ch));
    }
    Ok(out)
}

/// Single-qubit stabilizer states for teleportation round trips.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StabState {
    ZeroZ,
    OneZ,
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl StabState {
    pub const ALL: [StabState; 6] = [
        StabState::ZeroZ,
        StabState::OneZ,
        StabState::PlusX,
        StabState::MinusX,
        StabState::PlusY,
        StabState::MinusY,
    ];

    /// (stabilizing letter, sign bit)
    pub fn stabilizer(self) -> (Letter, bool) {
        match self {
            StabState::ZeroZ => (Letter::Z, false),
            StabState::OneZ => (Letter::Z, true),
            StabState::PlusX => (Letter::X, false),
            StabState::MinusX => (Letter::X, true),
            StabState::PlusY => (Letter::Y, false),
            StabState::MinusY => (Letter::Y, true),
        }
    }

    fn prepare(self, tab: &mut Tableau, q: usize) {
        match self {
            StabState::ZeroZ => {}
            StabState::OneZ => tab.x(q),
            StabState::PlusX => tab.h(q),
            StabState::MinusX => {
                tab.x(q);
                tab.h(q);
            }
            StabState::PlusY => {
                tab.h(q);
                tab.s(q);
            }
            StabState::MinusY => {
                tab.x(q);
                tab.h(q);
                tab.s(q);
            }
        }
    }
}

/// Teleportation lab: one input qubit plus a set of resource physical-
/// logical Bell states prepared noiselessly by the five-step protocol, all
/// in one tableau.
pub struct TeleportLab {
    lat: PlanarLattice,
    tab: Tableau,
    seed_counter: u64,
    seed: u64,
    /// (alice physical qubit, bob block offset, consumed)
    resources: Vec<(usize, usize, bool)>,
    input: usize,
}

impl TeleportLab {
    /// Builds `resources` resource states on an L×L lattice. Each resource
    /// occupies 2N qubits; the input slot is qubit 0.
    pub fn new(l: usize, resources: usize, seed: u64) -> Result<Self> {
        let lat = build_planar(l)?;
        let n = lat.n_qubits();
        let total = 1 + resources * 2 * n;
        let mut lab = Self {
            lat,
            tab: Tableau::new(total),
            seed_counter: 0,
            seed,
            resources: Vec::new(),
            input: 0,
        };
        for r in 0..resources {
            lab.prepare_resource(1 + r * 2 * n)?;
        }
        Ok(lab)
    }

    fn next_rng(&mut self) -> rand_chacha::ChaCha8Rng {
        self.seed_counter += 1;
        trial_rng(self.seed, self.seed_counter)
    }

    /// Steps 1-4, noiseless, on the block starting at `offset`: Alice's
    /// half then Bob's half, leaving (kept physical qubit, Bob logical
    /// block).
    fn prepare_resource(&mut self, offset: usize) -> Result<()> {
        let n = self.lat.n_qubits();
        let (alice0, bob0) = (offset, offset + n);
        let mut rng = self.next_rng();
        for q in 0..n {
            self.tab.h(alice0 + q);
            self.tab.cnot(alice0 + q, bob0 + q);
        }
        let total = self.tab.n();
        let stab = |letter: Letter, support: &[usize], base: usize, rng: &mut rand_chacha::ChaCha8Rng, tab: &mut Tableau| -> Result<bool> {
            let p = PauliString::from_letters(
                total,
                &support.iter().map(|&q| (base + q, letter)).collect::<Vec<_>>(),
            )?;
            Ok(tab.measure(&p, rng)?.0)
        };
        let mut syndromes = Vec::new();
        for s in self.lat.x_stabs().to_vec() {
            let a = stab(Letter::X, &s, alice0, &mut rng, &mut self.tab)?;
            let b = stab(Letter::X, &s, bob0, &mut rng, &mut self.tab)?;
            syndromes.push(a ^ b);
        }
        for s in self.lat.z_stabs().to_vec() {
            let a = stab(Letter::Z, &s, alice0, &mut rng, &mut self.tab)?;
            let b = stab(Letter::Z, &s, bob0, &mut rng, &mut self.tab)?;
            syndromes.push(a ^ b);
        }
        if syndromes.iter().any(|&s| s) {
            return Err(Error::ContractViolation(
                "noiseless resource preparation produced a nonzero syndrome".into(),
            ));
        }
        self.normalize_block_signs(bob0, &mut rng)?;
        // Alice decodes her block
        let (dec_z, dec_x, kept) = decoding_measurement_set(&self.lat);
        let mut ax = false;
        for q in dec_x {
            let p = PauliString::single(total, alice0 + q, Letter::X)?;
            ax ^= self.tab.measure(&p, &mut rng)?.0;
        }
        let mut az = false;
        for q in dec_z {
            let p = PauliString::single(total, alice0 + q, Letter::Z)?;
            az ^= self.tab.measure(&p, &mut rng)?.0;
        }
        if ax {
            self.tab.z(alice0 + kept);
        }
        if az {
            self.tab.x(alice0 + kept);
        }
        self.resources.push((alice0 + kept, bob0, false));
        Ok(())
    }

    /// Moves a block into the +1 eigenspace of every code stabilizer by a
    /// Pauli frame fix that commutes with both logical operators. The fix
    /// solves a small symplectic system: it must anticommute with exactly
    /// the minus-signed generators.
    fn normalize_block_signs(
        &mut self,
        block: usize,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<()> {
        use crate::bits::{BitMatrix, BitVec};
        let n = self.lat.n_qubits();
        let total = self.tab.n();
        let mut constraints: Vec<(Vec<(usize, Letter)>, bool)> = Vec::new();
        let x_support: Vec<Vec<usize>> = self.lat.x_stabs().to_vec();
        let z_support: Vec<Vec<usize>> = self.lat.z_stabs().to_vec();
        for (letter, supports) in [(Letter::X, &x_support), (Letter::Z, &z_support)] {
            for s in supports {
                let letters: Vec<(usize, Letter)> =
                    s.iter().map(|&q| (block + q, letter)).collect();
                let p = PauliString::from_letters(total, &letters)?;
                let (sign, det) = self.tab.measure(&p, rng)?;
                debug_assert!(det);
                constraints.push((s.iter().map(|&q| (q, letter)).collect(), sign));
            }
        }
        constraints.push((
            self.lat.x_logical().iter().map(|&q| (q, Letter::X)).collect(),
            false,
        ));
        constraints.push((
            self.lat.z_logical().iter().map(|&q| (q, Letter::Z)).collect(),
            false,
        ));
        // unknown Pauli p as (x|z); symplectic(g, p) uses g's (z|x)
        let mut a = BitMatrix::zeros(constraints.len(), 2 * n);
        let mut rhs = BitVec::zeros(constraints.len());
        for (i, (letters, sign)) in constraints.iter().enumerate() {
            for &(q, letter) in letters {
                let (gx, gz) = letter.bits();
                if gz {
                    a.set(i, q, true); // pairs with x_p
                }
                if gx {
                    a.set(i, n + q, true); // pairs with z_p
                }
            }
            rhs.set(i, *sign);
        }
        let fix = a
            .solve(&rhs)
            .ok_or_else(|| Error::ContractViolation("no sign-normalizing Pauli exists".into()))?;
        for q in 0..n {
            let letter = Letter::from_bits(fix.get(q), fix.get(n + q));
            self.tab.apply_letter(block + q, letter);
        }
        Ok(())
    }

    /// X_L / Z_L Pauli on the logical block at `bob0`.
    fn logical_pauli(&self, bob0: usize, letter: Letter) -> Result<PauliString> {
        let support = match letter {
            Letter::X => self.lat.x_logical(),
            Letter::Z => self.lat.z_logical(),
            _ => return Err(Error::Domain("only X/Z logical paulis".into())),
        };
        PauliString::from_letters(
            self.tab.n(),
            &support.iter().map(|&q| (bob0 + q, letter)).collect::<Vec<_>>(),
        )
    }

    /// Applies a logical Pauli error on a resource's Bob block (for error
    /// transfer demonstrations).
    pub fn corrupt_resource_logical(&mut self, res: usize, letter: Letter) -> Result<()> {
        let (_, bob0, _) = self.resources[res];
        match letter {
            Letter::I => Ok(()),
            Letter::X | Letter::Z => {
                let p = self.logical_pauli(bob0, letter)?;
                self.tab.apply_pauli(&p)
            }
            Letter::Y => {
                let px = self.logical_pauli(bob0, Letter::X)?;
                let pz = self.logical_pauli(bob0, Letter::Z)?;
                self.tab.apply_pauli(&px)?;
                self.tab.apply_pauli(&pz)
            }
        }
    }

    /// Prepares the input slot in a given stabilizer state.
    pub fn prepare_input(&mut self, state: StabState) {
        state.prepare(&mut self.tab, self.input);
    }

    /// Step 5, encode: Bell measurement between the input and the
    /// resource's physical qubit, conditional logical Pauli fixes on the
    /// resource's Bob block. Consumes the resource and returns its block
    /// offset, which now holds the encoded logical state.
    pub fn teleport_encode(&mut self, res: usize) -> Result<usize> {
        let (kept, bob0, consumed) = self.resources[res];
        if consumed {
            return Err(Error::ConsumedResource);
        }
        self.resources[res].2 = true;
        let total = self.tab.n();
        let mut rng = self.next_rng();
        let xx = PauliString::from_letters(total, &[(self.input, Letter::X), (kept, Letter::X)])?;
        let zz = PauliString::from_letters(total, &[(self.input, Letter::Z), (kept, Letter::Z)])?;
        let (alpha, _) = self.tab.measure(&xx, &mut rng)?;
        let (beta, _) = self.tab.measure(&zz, &mut rng)?;
        if alpha {
            let p = self.logical_pauli(bob0, Letter::Z)?;
            self.tab.apply_pauli(&p)?;
        }
        if beta {
            let p = self.logical_pauli(bob0, Letter::X)?;
            self.tab.apply_pauli(&p)?;
        }
        Ok(bob0)
    }

    /// Step 5, decode: transversal Bell measurement between a logical data
    /// block and the resource's Bob block, conditional Pauli on the
    /// resource's physical qubit. Consumes the resource and returns the
    /// physical qubit now holding the state.
    pub fn teleport_decode(&mut self, data_block: usize, res: usize) -> Result<usize> {
        let (kept, bob0, consumed) = self.resources[res];
        if consumed {
            return Err(Error::ConsumedResource);
        }
        self.resources[res].2 = true;
        let n = self.lat.n_qubits();
        let total = self.tab.n();
        let mut rng = self.next_rng();
        let mut xx = vec![false; n];
        let mut zz = vec![false; n];
        for q in 0..n {
            let px = PauliString::from_letters(
                total,
                &[(data_block + q, Letter::X), (bob0 + q, Letter::X)],
            )?;
            xx[q] = self.tab.measure(&px, &mut rng)?.0;
            let pz = PauliString::from_letters(
                total,
                &[(data_block + q, Letter::Z), (bob0 + q, Letter::Z)],
            )?;
            zz[q] = self.tab.measure(&pz, &mut rng)?.0;
        }
        let alpha = self.lat.x_logical().iter().fold(false, |acc, &q| acc ^ xx[q]);
        let beta = self.lat.z_logical().iter().fold(false, |acc, &q| acc ^ zz[q]);
        if alpha {
            self.tab.z(kept);
        }
        if beta {
            self.tab.x(kept);
        }
        Ok(kept)
    }

    /// Stabilizer sign of a single-qubit observable on a lab qubit.
    pub fn peek_qubit(&mut self, q: usize, letter: Letter) -> Result<Option<bool>> {
        let p = PauliString::single(self.tab.n(), q, letter)?;
        self.tab.peek(&p)
    }

    /// Logical sign checks on a block: returns the signs of X_L and Z_L if
    /// deterministic.
    pub fn peek_logical(&mut self, block: usize, letter: Letter) -> Result<Option<bool>> {
        let p = self.logical_pauli(block, letter)?;
        self.tab.peek(&p)
    }

    /// All code stabilizers of a block, for logical-state verification.
    pub fn block_stabilizer_signs(&mut self, block: usize) -> Result<Vec<Option<bool>>> {
        let total = self.tab.n();
        let mut out = Vec::new();
        for s in self.lat.x_stabs().to_vec() {
            let p = PauliString::from_letters(
                total,
                &s.iter().map(|&q| (block + q, Letter::X)).collect::<Vec<_>>(),
            )?;
            out.push(self.tab.peek(&p)?);
        }
        for s in self.lat.z_stabs().to_vec() {
            let p = PauliString::from_letters(
                total,
                &s.iter().map(|&q| (block + q, Letter::Z)).collect::<Vec<_>>(),
            )?;
            out.push(self.tab.peek(&p)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts_and_weights() {
        let lat = build_planar(2).unwrap();
        assert_eq!(lat.n_qubits(), 5);
        assert_eq!(lat.x_stabs().len() + lat.z_stabs().len(), 4);
        let lat23 = build_planar(23).unwrap();
        assert_eq!(lat23.n_qubits(), 1013);
        let lat6 = build_planar(6).unwrap();
        assert_eq!(lat6.n_qubits(), 61);
        assert_eq!(lat6.x_stabs().len() + lat6.z_stabs().len(), 60);
        for s in lat6.x_stabs().iter().chain(lat6.z_stabs()) {
            assert!(s.len() == 3 || s.len() == 4);
        }
        assert!(build_planar(1).is_err());
    }

    #[test]
    fn lattice_algebra() {
        let lat = build_planar(6).unwrap();
        let n = lat.n_qubits();
        let pauli_of = |support: &[usize], letter: Letter| {
            PauliString::from_letters(n, &support.iter().map(|&q| (q, letter)).collect::<Vec<_>>())
                .unwrap()
        };
        let mut all: Vec<PauliString> = Vec::new();
        for s in lat.x_stabs() {
            all.push(pauli_of(s, Letter::X));
        }
        for s in lat.z_stabs() {
            all.push(pauli_of(s, Letter::Z));
        }
        for (i, a) in all.iter().enumerate() {
            for b in all.iter().skip(i + 1) {
                assert!(!crate::pauli::symplectic_product(a, b).unwrap());
            }
        }
        let xl = pauli_of(lat.x_logical(), Letter::X);
        let zl = pauli_of(lat.z_logical(), Letter::Z);
        assert_eq!(xl.weight(), 6);
        assert_eq!(zl.weight(), 6);
        for g in &all {
            assert!(!crate::pauli::symplectic_product(&xl, g).unwrap());
            assert!(!crate::pauli::symplectic_product(&zl, g).unwrap());
        }
        assert!(crate::pauli::symplectic_product(&xl, &zl).unwrap());
        // logical strings intersect in exactly one qubit
        let overlap: Vec<_> =
            lat.x_logical().iter().filter(|q| lat.z_logical().contains(q)).collect();
        assert_eq!(overlap.len(), 1);
    }

    #[test]
    fn decoding_set_sizes() {
        for l in [2usize, 6] {
            let lat = build_planar(l).unwrap();
            let (z_list, x_list, kept) = decoding_measurement_set(&lat);
            assert_eq!(z_list.len(), l - 1);
            assert_eq!(x_list.len(), l - 1);
            assert!(!z_list.contains(&kept) && !x_list.contains(&kept));
        }
    }

    #[test]
    fn alternative_strings_are_valid() {
        let lat = build_planar(4).unwrap();
        let n = lat.n_qubits();
        let (x_str, z_str) = lat.logical_strings(2, 2).unwrap();
        let xl = PauliString::from_letters(
            n,
            &x_str.iter().map(|&q| (q, Letter::X)).collect::<Vec<_>>(),
        )
        .unwrap();
        let zl = PauliString::from_letters(
            n,
            &z_str.iter().map(|&q| (q, Letter::Z)).collect::<Vec<_>>(),
        )
        .unwrap();
        for s in lat.z_stabs() {
            let g = PauliString::from_letters(
                n,
                &s.iter().map(|&q| (q, Letter::Z)).collect::<Vec<_>>(),
            )
            .unwrap();
            assert!(!crate::pauli::symplectic_product(&xl, &g).unwrap());
        }
        for s in lat.x_stabs() {
            let g = PauliString::from_letters(
                n,
                &s.iter().map(|&q| (q, Letter::X)).collect::<Vec<_>>(),
            )
            .unwrap();
            assert!(!crate::pauli::symplectic_product(&zl, &g).unwrap());
        }
        assert!(crate::pauli::symplectic_product(&xl, &zl).unwrap());
        assert!(lat.logical_strings(9, 0).is_err());
    }

    #[test]
    fn analytic_formulas() {
        assert_eq!(decode_error_prob(0.0, 6).unwrap(), 0.0);
        assert!((decode_error_prob(0.5, 6).unwrap() - 0.75).abs() < 1e-12);
        // L=23 threshold lands on 0.0196
        let p23 = measurement_threshold(23).unwrap();
        assert!((p23 - 0.0196).abs() < 5e-4, "threshold {p23}");
        // and P_L at that point is exactly 1/2
        assert!((decode_error_prob(p23, 23).unwrap() - 0.5).abs() < 1e-12);
        // x-root is sqrt(2) - 1
        let x = (1.0 - 2.0 * p23).powi(22);
        assert!((x - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-9);
        // monotone increasing in p
        let mut prev = -1.0;
        for i in 0..=50 {
            let p = 0.5 * i as f64 / 50.0;
            let v = decode_error_prob(p, 8).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(decode_error_prob(0.6, 5).is_err());
    }

    #[test]
    fn threshold_exactness_and_slope() {
        for l in [2usize, 5, 23, 101] {
            let p = measurement_threshold(l).unwrap();
            assert!((decode_error_prob(p, l).unwrap() - 0.5).abs() < 1e-12);
        }
        let slope = threshold_loglog_slope(50, 400).unwrap();
        assert!((slope + 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn noiseless_resource_protocol_is_exact() {
        for l in [2usize, 3] {
            let r = run_resource_protocol(l, &NoiseSpec::noiseless(), &RunCfg::sequential(50, 5))
                .unwrap();
            assert_eq!(r.successes, 50);
            assert_eq!(r.fidelity_out, Some(1.0));
        }
    }

    #[test]
    fn weight_one_sweep_corrected_at_l3() {
        let lat = build_planar(3).unwrap();
        let n = lat.n_qubits();
        for q in 0..n {
            for letter in Letter::ERRORS {
                let mut pattern = vec![Letter::I; n];
                pattern[q] = letter;
                let residual = run_resource_with_pattern(3, &pattern, 9).unwrap();
                assert_eq!(residual, Letter::I, "{letter} on qubit {q}");
            }
        }
    }

    #[test]
    fn measurement_flip_statistics_match_closed_form_small() {
        let l = 3;
        let q = 0.05;
        let trials = 40_000u64;
        let noise = NoiseSpec::new(0.0, q).unwrap();
        let r = run_resource_protocol(l, &noise, &RunCfg::new(trials, 11)).unwrap();
        let p_l = decode_error_prob(q, l).unwrap();
        let mc = 1.0 - r.fidelity_out.unwrap();
        let sigma = (p_l * (1.0 - p_l) / trials as f64).sqrt();
        assert!((mc - p_l).abs() <= 3.0 * sigma, "mc {mc} vs analytic {p_l}");
        // class structure: X and Z equiprobable, Y = Q^2
        let qq = 0.5 - 0.5 * (1.0f64 - 2.0 * q).powi(l as i32 - 1);
        let x_frac = r.residual_counts[1] as f64 / trials as f64;
        let z_frac = r.residual_counts[3] as f64 / trials as f64;
        let y_frac = r.residual_counts[2] as f64 / trials as f64;
        let pxz = qq * (1.0 - qq);
        let sig = (pxz * (1.0 - pxz) / trials as f64).sqrt();
        assert!((x_frac - pxz).abs() <= 3.0 * sig);
        assert!((z_frac - pxz).abs() <= 3.0 * sig);
        let sig_y = (qq * qq * (1.0 - qq * qq) / trials as f64).sqrt().max(1e-6);
        assert!((y_frac - qq * qq).abs() <= 4.0 * sig_y);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            run_resource_protocol(13, &NoiseSpec::noiseless(), &RunCfg::sequential(1, 0)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn distill_resource_examples() {
        let clean = PauliChannel::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        let rounds = distill_resource(&clean, 2, 2, 1).unwrap();
        assert!((rounds[0].1.total_error()).abs() < 1e-15);

        // P_L = 0.4 as a planar-style channel: X = Z = Q(1-Q), Y = Q^2
        let qq = 1.0 - (1.0f64 - 0.4).sqrt(); // solves 2q - q^2 = 0.4
        let ch =
            PauliChannel::new([0.6, qq * (1.0 - qq), qq * qq, qq * (1.0 - qq)]).unwrap();
        let rounds = distill_resource(&ch, 2, 2, 1).unwrap();
        assert!(rounds[0].1.total_error() < 0.4);

        let hot = PauliChannel::new([0.4, 0.2, 0.2, 0.2]).unwrap();
        assert!(distill_resource(&hot, 2, 2, 1).is_err());
    }

    #[test]
    fn teleport_round_trip_on_all_stabilizer_states() {
        let mut checked = 0;
        for state in StabState::ALL {
            let mut lab = TeleportLab::new(2, 2, 42 + checked).unwrap();
            lab.prepare_input(state);
            let block = lab.teleport_encode(0).unwrap();
            let phys = lab.teleport_decode(block, 1).unwrap();
            let (letter, sign) = state.stabilizer();
            assert_eq!(
                lab.peek_qubit(phys, letter).unwrap(),
                Some(sign),
                "round trip of {state:?}"
            );
            checked += 1;
        }
    }

    #[test]
    fn encode_zero_gives_logical_zero() {
        let mut lab = TeleportLab::new(3, 1, 7).unwrap();
        lab.prepare_input(StabState::ZeroZ);
        let block = lab.teleport_encode(0).unwrap();
        for s in lab.block_stabilizer_signs(block).unwrap() {
            assert_eq!(s, Some(false), "all code stabilizers must be +1");
        }
        assert_eq!(lab.peek_logical(block, Letter::Z).unwrap(), Some(false));
    }

    #[test]
    fn residual_error_transfers_to_decoded_qubit() {
        // Z on the resource's logical side shows up as Z on the teleported
        // state
        let mut lab = TeleportLab::new(2, 2, 9).unwrap();
        lab.corrupt_resource_logical(0, Letter::Z).unwrap();
        lab.prepare_input(StabState::PlusX);
        let block = lab.teleport_encode(0).unwrap();
        let phys = lab.teleport_decode(block, 1).unwrap();
        // Z|+> = |->: X sign flipped
        assert_eq!(lab.peek_qubit(phys, Letter::X).unwrap(), Some(true));
    }

    #[test]
    fn consumed_resource_rejected() {
        let mut lab = TeleportLab::new(2, 1, 3).unwrap();
        lab.prepare_input(StabState::ZeroZ);
        let _ = lab.teleport_encode(0).unwrap();
        assert!(matches!(lab.teleport_encode(0), Err(Error::ConsumedResource)));
    }
}
