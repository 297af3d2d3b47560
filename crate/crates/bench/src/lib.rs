//! Shared fixtures for the benchmark targets.

use gymnav_core::environment::{Action, Environment};
use gymnav_core::registry::Registry;
use gymnav_core::rng::Rng64;

/// Environment the throughput numbers are quoted on.
pub const BENCH_ENV: &str = "Circuit2TurtlebotLidar-v0";

pub fn bench_env() -> Environment {
    let mut env = Registry::builtin().make(BENCH_ENV).expect("builtin world");
    env.reset();
    env
}

/// Drives `n` uniformly random actions, resetting after crashes, and
/// returns the summed reward so the work cannot be optimized away.
pub fn drive_random_steps(env: &mut Environment, n: u32, rng: &mut Rng64) -> f64 {
    let mut total = 0.0;
    for _ in 0..n {
        if env.is_terminated() {
            env.reset();
        }
        let action = Action::ALL[rng.uniform_index(Action::ALL.len())];
        total += env.step(action).expect("episode is live").reward;
    }
    total
}
