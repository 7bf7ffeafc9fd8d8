//! Simulates two weeks of nightly runs for the stable tests under a fixed
//! budget, then picks office-hours tests for one change set.
//!
//! ```text
//! cargo run -p flipsense --example resource_schedule
//! ```

use std::collections::BTreeSet;

use flipsense::baselines::hbtp_scores;
use flipsense::schedule::{
    cost, day_tick, office_hours_tick, select_stable, ScheduleState, StableRule, StableStrategy,
};
use flipsense::synth::{generate, SynthConfig};
use flipsense::{build_delta, extract_flips, DMode, MatrixConfig, ScoreMode, SensitivityMatrix};

pub fn run_example() -> flipsense::Result<Vec<u64>> {
    let out = generate(&SynthConfig::default())?;
    let history = &out.history;
    let ledger = extract_flips(history);
    let mut state = ScheduleState::from_history(history, &ledger, StableRule::NeverFlipped);
    let stable = state.stable_tests().len();
    println!("{} tests, {stable} stable", state.tests.len());

    let mut costs = vec![cost(&state)];
    let budget = stable.div_ceil(7).max(1);
    for day in 1..=14 {
        let pick: BTreeSet<String> =
            select_stable(&state, budget, StableStrategy::RoundRobin { window_days: 7 })?.into_iter().collect();
        state = day_tick(&state, &pick);
        costs.push(cost(&state));
        println!("day {day:>2}: ran {} stable tests, cost {}", pick.len(), cost(&state));
    }

    let mut matrix = SensitivityMatrix::new(MatrixConfig::ema(0.8)?);
    for rec in &history.records()[1..] {
        matrix.advance(&build_delta(&rec.changed_files, ledger.flipped(rec.seq), DMode::Linear))?;
    }
    let hbtp = hbtp_scores(history, &ledger, history.len());
    let changed = history.records().last().expect("non-empty").changed_files.clone();
    let picks = office_hours_tick(&matrix, &mut state.pending, &changed, &hbtp, &ledger.universe, 5, 0.7, ScoreMode::Sum)?;
    println!("office hours: {picks:?}");
    Ok(costs)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    run_example().map(|_| ())
}
