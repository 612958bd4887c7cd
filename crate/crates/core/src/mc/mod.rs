//! Seeded Monte Carlo validation of the analytic channel-check results.
//!
//! Three experiments are provided: symbol-level pilot estimation (checks the
//! estimator variance), the false alarm rate of the test statistic on
//! legitimate traffic, and the success rate of a uniform guessing attack
//! against the acceptance sphere.
//!
//! # Reproducibility
//!
//! Trials are grouped into fixed blocks of [`BLOCK_TRIALS`] consecutive
//! trial indices. Block `b` draws from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)` on stream `b`. Block boundaries depend only on the
//! trial index and per-block results are combined in block order, so a
//! given `(seed, trials)` yields identical output for any worker count.

mod batch;
mod rng;
mod sim;

pub use batch::{TrialBatch, WILSON_Z};
pub use rng::{block_rng, BLOCK_TRIALS};
pub use sim::{
    expected_events, measure_attack_success, measure_false_alarm, measure_false_alarm_with, simulate_pilot_estimation,
    ChallengeDraw, ChannelLaw, PilotMoments, MIN_EXPECTED_EVENTS,
};
