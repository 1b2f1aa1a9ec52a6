//! Trial execution: rayon fan-out with a sequential fallback.
//!
//! Protocol runners express one trial as a pure function of the trial index;
//! merging is associative counter addition, so any partitioning of the trial
//! range produces identical results.

/// How to run a batch of Monte Carlo trials.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    /// Single thread, in trial order.
    Sequential,
    /// Fan out over the rayon pool. Without the `parallel` feature this
    /// falls back to sequential execution.
    #[default]
    Parallel,
}

/// Common Monte Carlo run configuration. The seed is mandatory everywhere;
/// there is deliberately no wall-clock default.
#[derive(Copy, Clone, Debug)]
pub struct RunCfg {
    pub trials: u64,
    pub seed: u64,
    pub execution: Execution,
}

impl RunCfg {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, execution: Execution::default() }
    }

    pub fn sequential(trials: u64, seed: u64) -> Self {
        Self { trials, seed, execution: Execution::Sequential }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Runs `trials` independent trials and merges their outputs.
///
/// `init` builds per-worker scratch state (templates, buffers); `trial` maps
/// a trial index to a result; `merge` must be associative and commutative.
pub fn run_trials<W, T>(
    cfg: &RunCfg,
    init: impl Fn() -> W + Sync,
    trial: impl Fn(&mut W, u64) -> T + Sync,
    zero: impl Fn() -> T + Sync,
    merge: impl Fn(T, T) -> T + Sync,
) -> T
where
    W: Send,
    T: Send,
{
    match cfg.execution {
        Execution::Sequential => run_sequential(cfg.trials, init, trial, zero, merge),
        Execution::Parallel => run_parallel(cfg.trials, init, trial, zero, merge),
    }
}

fn run_sequential<W, T>(
    trials: u64,
    init: impl Fn() -> W,
    trial: impl Fn(&mut W, u64) -> T,
    zero: impl Fn() -> T,
    merge: impl Fn(T, T) -> T,
) -> T {
    let mut ws = init();
    let mut acc = zero();
    for t in 0..trials {
        acc = merge(acc, trial(&mut ws, t));
    }
    acc
}

#[cfg(feature = "parallel")]
fn run_parallel<W, T>(
    trials: u64,
    init: impl Fn() -> W + Sync,
    trial: impl Fn(&mut W, u64) -> T + Sync,
    zero: impl Fn() -> T + Sync,
    merge: impl Fn(T, T) -> T + Sync,
) -> T
where
    W: Send,
    T: Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map_init(&init, |ws, t| trial(ws, t))
        .fold(&zero, |acc, item| merge(acc, item))
        .reduce(&zero, &merge)
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<W, T>(
    trials: u64,
    init: impl Fn() -> W + Sync,
    trial: impl Fn(&mut W, u64) -> T + Sync,
    zero: impl Fn() -> T + Sync,
    merge: impl Fn(T, T) -> T + Sync,
) -> T
where
    W: Send,
    T: Send,
{
    run_sequential(trials, init, trial, zero, merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree() {
        let sum = |exec| {
            let cfg = RunCfg { trials: 10_000, seed: 0, execution: exec };
            run_trials(
                &cfg,
                || (),
                |_, t| t.wrapping_mul(0x9E3779B97F4A7C15) >> 40,
                || 0u64,
                |a, b| a.wrapping_add(b),
            )
        };
        assert_eq!(sum(Execution::Sequential), sum(Execution::Parallel));
    }
}
