//! Adaptive block-size distillation schedule.
//!
//! Iterating the width-n parity protocol with block size chosen as
//! `n_k = √2·p_{k-1}^{-a}` keeps the output infidelity falling
//! doubly-exponentially while the per-round rate and success losses sum to a
//! constant, so the overall yield rate stays bounded below by `e^{-c}`.

use crate::error::{Error, Result};

/// One round of the schedule. `block_size` is the real-valued optimum used
/// by the closed forms; `block_size_int` is the realizable integer (floored,
/// at least 2).
#[derive(Clone, Debug)]
pub struct AdaptiveRound {
    pub block_size: f64,
    pub block_size_int: u64,
    /// Encoding rate (n-1)/n of this round.
    pub rate: f64,
    /// Output infidelity after this round.
    pub p_out: f64,
    /// Success probability of this round.
    pub success: f64,
}

#[derive(Clone, Debug)]
pub struct AdaptiveSchedule {
    pub p0: f64,
    pub a_exp: f64,
    pub rounds: Vec<AdaptiveRound>,
    /// Series bound: the yield-rate product over any horizon stays above
    /// `exp(-c_bound)`.
    pub c_bound: f64,
}

impl AdaptiveSchedule {
    /// Product of rate × success over all computed rounds.
    pub fn yield_product(&self) -> f64 {
        self.rounds.iter().map(|r| r.rate * r.success).product()
    }
}

/// Closed-form schedule for `rounds` rounds:
/// `n_k = √2·p0^{-a(2-2a)^{k-1}}`, `p_k = p0^{(2-2a)^k}`,
/// `P_k = 1 - √2·p0^{(2-2a)^k/2}`, with
/// `c = √(2p0)/(1-√p0) + √2/(2(1-p0^a))`.
pub fn adaptive_schedule(p0: f64, a_exp: f64, rounds: usize) -> Result<AdaptiveSchedule> {
    if !(p0 > 0.0 && p0 <= 0.1) {
        return Err(Error::Domain(format!("initial infidelity {p0} outside (0, 0.1]")));
    }
    if !(a_exp > 0.0 && a_exp < 0.5) {
        return Err(Error::Domain(format!("schedule exponent {a_exp} outside (0, 1/2)")));
    }
    let base = 2.0 - 2.0 * a_exp;
    let mut out = Vec::with_capacity(rounds);
    for k in 1..=rounds as i32 {
        let exp_prev = base.powi(k - 1);
        let exp_cur = base.powi(k);
        let n_real = std::f64::consts::SQRT_2 * p0.powf(-a_exp * exp_prev);
        let rate = 1.0 - std::f64::consts::SQRT_2 / 2.0 * p0.powf(a_exp * exp_prev);
        let p_out = p0.powf(exp_cur);
        let success = 1.0 - std::f64::consts::SQRT_2 * p0.powf(exp_cur / 2.0);
        out.push(AdaptiveRound {
            block_size: n_real,
            block_size_int: (n_real.floor() as u64).max(2),
            rate,
            p_out,
            success,
        });
    }
    let c_bound = (2.0 * p0).sqrt() / (1.0 - p0.sqrt())
        + std::f64::consts::SQRT_2 / (2.0 * (1.0 - p0.powf(a_exp)));
    Ok(AdaptiveSchedule { p0, a_exp, rounds: out, c_bound })
}

/// The same schedule via the recursion
/// `n_k = √2·p_{k-1}^{-a}`, `p_k = n_k²·p_{k-1}²/2`, `P_k = 1 - n_k·p_{k-1}`,
/// for cross-checking the closed forms.
pub fn adaptive_schedule_recursive(p0: f64, a_exp: f64, rounds: usize) -> Result<AdaptiveSchedule> {
    if !(p0 > 0.0 && p0 <= 0.1) {
        return Err(Error::Domain(format!("initial infidelity {p0} outside (0, 0.1]")));
    }
    if !(a_exp > 0.0 && a_exp < 0.5) {
        return Err(Error::Domain(format!("schedule exponent {a_exp} outside (0, 1/2)")));
    }
    let mut p_prev = p0;
    let mut out = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let n = std::f64::consts::SQRT_2 * p_prev.powf(-a_exp);
        let rate = (n - 1.0) / n;
        let p_out = 0.5 * n * n * p_prev * p_prev;
        let success = 1.0 - n * p_prev;
        out.push(AdaptiveRound {
            block_size: n,
            block_size_int: (n.floor() as u64).max(2),
            rate,
            p_out,
            success,
        });
        p_prev = p_out;
    }
    let c_bound = (2.0 * p0).sqrt() / (1.0 - p0.sqrt())
        + std::f64::consts::SQRT_2 / (2.0 * (1.0 - p0.powf(a_exp)));
    Ok(AdaptiveSchedule { p0, a_exp, rounds: out, c_bound })
}
