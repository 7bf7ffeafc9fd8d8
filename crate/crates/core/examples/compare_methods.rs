//! Replays a synthetic history under the decayed-sensitivity method, the
//! cumulative co-occurrence baseline and random selection, then prints the
//! four metric tables and the relative improvement over the baseline.
//!
//! ```text
//! cargo run -p flipsense --example compare_methods [seed]
//! ```

use flipsense::eval::{
    default_alpha_grid, figure_data, improvement, replay_sizes, sweep_alpha, EvalReport, Metric,
    MethodConfig,
};
use flipsense::synth::{generate, SynthConfig};
use flipsense::{extract_flips, DMode, ScoreMode};

const SIZES: [usize; 5] = [5, 10, 15, 20, 25];

pub fn run_example(seed: u64) -> flipsense::Result<Vec<EvalReport>> {
    let out = generate(&SynthConfig::default().with_seed(seed))?;
    let ledger = extract_flips(&out.history);

    let sweep = sweep_alpha(
        &out.history,
        &ledger,
        &default_alpha_grid(),
        &SIZES,
        DMode::Linear,
        ScoreMode::Sum,
    )?;
    println!("alpha chosen by zero-result minimisation: {:.2}", sweep.best_alpha);

    let mut reports = Vec::new();
    for method in [
        MethodConfig::ema(sweep.best_alpha),
        MethodConfig::ekelund(),
        MethodConfig::random(seed, 100),
    ] {
        reports.extend(replay_sizes(&out.history, &ledger, &method, &SIZES)?);
    }

    let fig = figure_data(&reports)?;
    for metric in Metric::ALL {
        println!("\n{}:\n{}", metric.name(), fig.to_csv(metric));
    }
    for metric in Metric::ALL {
        let imp = improvement(&fig, metric, "ema", "ekelund")?;
        if let Some(avg) = imp.avg {
            println!("{:>10}: avg {:+.1}% vs ekelund", metric.name(), avg * 100.0);
        }
    }
    Ok(reports)
}

#[allow(dead_code)]
fn main() -> flipsense::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    run_example(seed).map(|_| ())
}
