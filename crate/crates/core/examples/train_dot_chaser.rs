//! End-to-end training on the built-in pursuit game.
//!
//! Fifteen generations: the dictionary grows from empty as the evolving
//! policies explore, the network input size follows it, and fitness climbs
//! past the random-action baseline.
//!
//! Run with: `cargo run --release -p vqnes --example train_dot_chaser`

use vqnes::config::RunConfig;
use vqnes::harness::{random_policy_baseline, train};

fn main() -> vqnes::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.generations = 15;
    cfg.evals_per_individual = 1; // the game is deterministic per seed
    cfg.max_interactions = 60;
    cfg.grid_size = 7;
    cfg.cell_px = 3;
    cfg.obs_width = 7;
    cfg.obs_height = 7;
    cfg.train_set_capacity = 12;
    cfg.max_centroids = 24;
    cfg.delta = 0.05;
    cfg.epsilon = 0.05;
    cfg.omega = 6;
    cfg.seed = 3;

    let out_dir = std::env::temp_dir().join("vqnes_train_dot_chaser");
    let output = train(&cfg, &out_dir)?;

    println!("gen   best     mean     dict  params  lambda");
    for r in &output.records {
        println!(
            "{:>3}  {:>7.2}  {:>7.2}  {:>4}  {:>6}  {:>6}",
            r.generation, r.best, r.mean, r.dict_size, r.params, r.lambda
        );
    }

    let baseline = random_policy_baseline(&cfg, 30, 999)?;
    let last = output.records.last().unwrap();
    println!("\nrandom-action baseline: {baseline:.2}");
    println!("final generation best:  {:.2}", last.best);
    println!("metrics at {}", output.metrics_path.display());
    Ok(())
}
