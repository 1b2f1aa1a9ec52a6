//! Trial accumulation and protocol-level metrics.

use crate::pauli::Letter;

/// Raw counters merged across workers. Merging is plain addition, so the
/// result is independent of how trials are partitioned.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct TrialStats {
    pub trials: u64,
    pub successes: u64,
    pub kept_pairs: u64,
    pub residuals: [u64; 4],
    /// Trials aborted by a hard error (eg. uncorrectable syndrome in
    /// correction mode).
    pub errors: u64,
}

impl TrialStats {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn success(residuals: &[Letter]) -> Self {
        let mut s = Self { trials: 1, successes: 1, kept_pairs: residuals.len() as u64, ..Self::default() };
        for r in residuals {
            s.residuals[r.index()] += 1;
        }
        s
    }

    pub fn failure() -> Self {
        Self { trials: 1, ..Self::default() }
    }

    pub fn error() -> Self {
        Self { trials: 1, errors: 1, ..Self::default() }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.successes += other.successes;
        self.kept_pairs += other.kept_pairs;
        self.errors += other.errors;
        for i in 0..4 {
            self.residuals[i] += other.residuals[i];
        }
        self
    }
}

/// 95% normal-approximation half-width for a binomial proportion.
pub(crate) fn ci95(p_hat: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    1.96 * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Outcome of a protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub trials: u64,
    pub successes: u64,
    /// Histogram over {I, X, Y, Z} of residual errors on kept pairs of
    /// successful trials.
    pub residual_counts: [u64; 4],
    /// P(residual = I | success), per kept pair; `None` when nothing was kept.
    pub fidelity_out: Option<f64>,
    pub fidelity_ci95: Option<f64>,
    pub success_prob: f64,
    pub success_ci95: f64,
    /// k·P_S/n: logical pairs out per physical pair in.
    pub yield_rate: f64,
    /// Physical pairs consumed per trial.
    pub n_consumed: usize,
    /// Pairs kept per successful trial.
    pub k_out: usize,
}

impl ProtocolResult {
    pub fn from_stats(stats: TrialStats, n_consumed: usize, k_out: usize) -> Self {
        let success_prob = if stats.trials > 0 {
            stats.successes as f64 / stats.trials as f64
        } else {
            f64::NAN
        };
        let fidelity_out = (stats.kept_pairs > 0)
            .then(|| stats.residuals[0] as f64 / stats.kept_pairs as f64);
        Self {
            trials: stats.trials,
            successes: stats.successes,
            residual_counts: stats.residuals,
            fidelity_out,
            fidelity_ci95: fidelity_out.map(|f| ci95(f, stats.kept_pairs)),
            success_prob,
            success_ci95: ci95(success_prob, stats.trials),
            yield_rate: k_out as f64 * success_prob / n_consumed as f64,
            n_consumed,
            k_out,
        }
    }
}
