//! Werner-state noise model: independent depolarizing errors on Bob's
//! qubits, plus an optional single-qubit measurement flip probability.

use crate::error::{Error, Result};
use crate::pauli::Letter;
use crate::tableau::BellRegister;
use rand::Rng;

/// Depolarizing error probability `p` per Bob qubit and measurement flip
/// probability. The Werner input has fidelity `F = 1 - p` under the
/// uniform-Pauli convention `p/3` per error type.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    p: f64,
    meas_flip: f64,
}

impl NoiseSpec {
    pub fn new(p: f64, meas_flip: f64) -> Result<Self> {
        if !(0.0..=0.75).contains(&p) {
            return Err(Error::Domain(format!("depolarizing probability {p} outside [0, 3/4]")));
        }
        if !(0.0..=0.5).contains(&meas_flip) {
            return Err(Error::Domain(format!(
                "measurement flip probability {meas_flip} outside [0, 1/2]"
            )));
        }
        Ok(Self { p, meas_flip })
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, 0.0)
    }

    pub fn noiseless() -> Self {
        Self { p: 0.0, meas_flip: 0.0 }
    }

    /// Werner input of the given fidelity, `p = 1 - F`.
    pub fn from_fidelity(f: f64) -> Result<Self> {
        Self::depolarizing(1.0 - f)
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn meas_flip(&self) -> f64 {
        self.meas_flip
    }

    pub fn fidelity(&self) -> f64 {
        1.0 - self.p
    }

    /// Draws one error letter: identity with probability `1-p`, otherwise
    /// uniform over X, Y, Z.
    #[inline]
    pub fn sample_letter(&self, rng: &mut impl Rng) -> Letter {
        if self.p > 0.0 && rng.random::<f64>() < self.p {
            Letter::ERRORS[rng.random_range(0..3)]
        } else {
            Letter::I
        }
    }

    /// Applies the measurement flip channel to a recorded outcome bit.
    #[inline]
    pub fn flip_outcome(&self, bit: bool, rng: &mut impl Rng) -> bool {
        if self.meas_flip > 0.0 && rng.random::<f64>() < self.meas_flip {
            !bit
        } else {
            bit
        }
    }
}

/// Equivalent single-lateral depolarizing probability for noise of strength
/// `p` applied on both sides: `p' = 2p - (4/3)p²`.
pub fn single_lateral_equivalent(p: f64) -> Result<f64> {
    if !(0.0..=0.75).contains(&p) {
        return Err(Error::Domain(format!("depolarizing probability {p} outside [0, 3/4]")));
    }
    Ok(2.0 * p - 4.0 / 3.0 * p * p)
}

/// One error letter per pair.
pub fn sample_pattern(pairs: usize, spec: &NoiseSpec, rng: &mut impl Rng) -> Vec<Letter> {
    (0..pairs).map(|_| spec.sample_letter(rng)).collect()
}

/// Applies depolarizing noise to Bob's half of every pair.
pub fn inject_noise(reg: &mut BellRegister, spec: &NoiseSpec, rng: &mut impl Rng) {
    for pair in 0..reg.pairs() {
        let letter = spec.sample_letter(rng);
        reg.tab.apply_letter(reg.bob(pair), letter);
    }
}

/// Noise on both sides at strength `p`, for equivalence checks against the
/// single-lateral channel.
pub fn inject_noise_bilateral(reg: &mut BellRegister, spec: &NoiseSpec, rng: &mut impl Rng) {
    for pair in 0..reg.pairs() {
        let la = spec.sample_letter(rng);
        let lb = spec.sample_letter(rng);
        reg.tab.apply_letter(reg.alice(pair), la);
        reg.tab.apply_letter(reg.bob(pair), lb);
    }
}
