//! Exact per-pair transfer function of the parity-detection block on Pauli
//! channels. Used for effective-channel distillation of resource states,
//! where carrying full tableaux of surface-code blocks would be pointless:
//! the block maps i.i.d. Pauli-channel inputs to an exactly computable
//! accepted-output marginal.

use crate::error::{Error, Result};
use crate::pauli::Letter;

/// A single-qubit Pauli channel as a distribution over {I, X, Y, Z}.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PauliChannel {
    /// Probabilities indexed by [`Letter::index`].
    pub p: [f64; 4],
}

impl PauliChannel {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x) || x.is_nan()) {
            return Err(Error::Domain("channel probabilities outside [0,1]".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("channel probabilities sum to {sum}")));
        }
        Ok(Self { p })
    }

    pub fn werner(error: f64) -> Result<Self> {
        Self::new([1.0 - error, error / 3.0, error / 3.0, error / 3.0])
    }

    pub fn total_error(&self) -> f64 {
        1.0 - self.p[Letter::I.index()]
    }

    /// Conjugation by bilateral Hadamards: X and Z swap.
    pub fn hadamard(&self) -> Self {
        let mut p = self.p;
        p.swap(Letter::X.index(), Letter::Z.index());
        Self { p }
    }

    /// Draws one error letter from the channel.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> Letter {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for letter in Letter::ALL {
            acc += self.p[letter.index()];
            if u < acc {
                return letter;
            }
        }
        Letter::Z
    }

    #[inline]
    fn joint(&self, x: bool, z: bool) -> f64 {
        self.p[Letter::from_bits(x, z).index()]
    }
}

/// Acceptance probability and accepted-output marginal of one width-`n`
/// X-parity detection block fed with `n` i.i.d. copies of `ch`.
///
/// Accepted patterns have even total Z-component parity; the kept pair at
/// position `i` carries residual `(x_1 ⊕ x_{1+i}, z_{1+i})`.
pub fn parity_detect_transfer(ch: &PauliChannel, width: usize) -> Result<(f64, PauliChannel)> {
    if width < 2 {
        return Err(Error::Domain("parity block needs width >= 2".into()));
    }
    let w = ch.joint(true, true) + ch.joint(false, true); // P(z = 1)
    let rest = width - 2;
    let even_rest = 0.5 * (1.0 + (1.0 - 2.0 * w).powi(rest as i32));
    let rest_parity = |parity: bool| if parity { 1.0 - even_rest } else { even_rest };
    let accept = 0.5 * (1.0 + (1.0 - 2.0 * w).powi(width as i32));
    if accept <= 0.0 {
        return Err(Error::Domain("block never accepts".into()));
    }
    let mut out = [0.0f64; 4];
    for (a, b) in [(false, false), (true, false), (true, true), (false, true)] {
        let mut total = 0.0;
        for x1 in [false, true] {
            for z1 in [false, true] {
                // z-parity constraint: z1 ^ b ^ (rest parity) = 0
                total += ch.joint(x1, z1) * ch.joint(x1 ^ a, b) * rest_parity(z1 ^ b);
            }
        }
        out[Letter::from_bits(a, b).index()] = total / accept;
    }
    Ok((accept, PauliChannel::new(out)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: enumerate all 4^n patterns.
    fn brute_force(ch: &PauliChannel, width: usize) -> (f64, PauliChannel) {
        let mut accept = 0.0;
        let mut out = [0.0f64; 4];
        let total = 4usize.pow(width as u32);
        for code in 0..total {
            let letters: Vec<Letter> =
                (0..width).map(|i| Letter::ALL[(code >> (2 * i)) & 3]).collect();
            let weight: f64 = letters.iter().map(|l| ch.p[l.index()]).product();
            let z_par = letters.iter().filter(|l| l.bits().1).count() % 2;
            if z_par != 0 {
                continue;
            }
            accept += weight;
            // marginal of the first kept pair (position 1)
            let (x1, _) = letters[0].bits();
            let (x2, z2) = letters[1].bits();
            out[Letter::from_bits(x1 ^ x2, z2).index()] += weight;
        }
        for o in &mut out {
            *o /= accept;
        }
        (accept, PauliChannel { p: out })
    }

    #[test]
    fn transfer_matches_brute_force() {
        for width in 2..=5 {
            for err in [0.05, 0.2, 0.4] {
                let ch = PauliChannel::werner(err).unwrap();
                let (a1, o1) = parity_detect_transfer(&ch, width).unwrap();
                let (a2, o2) = brute_force(&ch, width);
                assert!((a1 - a2).abs() < 1e-12, "accept width={width} err={err}");
                for i in 0..4 {
                    assert!((o1.p[i] - o2.p[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn asymmetric_channel_matches_brute_force() {
        let ch = PauliChannel::new([0.7, 0.05, 0.1, 0.15]).unwrap();
        let (a1, o1) = parity_detect_transfer(&ch, 3).unwrap();
        let (a2, o2) = brute_force(&ch, 3);
        assert!((a1 - a2).abs() < 1e-12);
        for i in 0..4 {
            assert!((o1.p[i] - o2.p[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn clean_channel_is_fixed_point() {
        let ch = PauliChannel::werner(0.0).unwrap();
        let (accept, out) = parity_detect_transfer(&ch, 4).unwrap();
        assert!((accept - 1.0).abs() < 1e-15);
        assert!((out.p[0] - 1.0).abs() < 1e-15);
    }
}
