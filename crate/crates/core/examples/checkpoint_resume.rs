//! Save a run mid-flight, resume it, and verify the continuation matches an
//! uninterrupted run record for record.
//!
//! Run with: `cargo run --release -p vqnes --example checkpoint_resume`

use vqnes::config::RunConfig;
use vqnes::harness::{build_env, init_state, make_checkpoint, resume, run_generation, train};

fn main() -> vqnes::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.generations = 6;
    cfg.evals_per_individual = 1;
    cfg.max_interactions = 40;
    cfg.grid_size = 6;
    cfg.cell_px = 3;
    cfg.obs_width = 6;
    cfg.obs_height = 6;
    cfg.train_set_capacity = 8;
    cfg.max_centroids = 16;
    cfg.delta = 0.05;
    cfg.epsilon = 0.05;
    cfg.omega = 6;
    cfg.seed = 21;
    cfg.log_wall_time = false; // timings would differ between the two runs

    let base = std::env::temp_dir().join("vqnes_checkpoint_resume");
    std::fs::create_dir_all(&base)?;

    // the uninterrupted reference
    let full = train(&cfg, &base.join("full"))?;

    // run three generations by hand, checkpoint, then resume to the end
    let env = &mut build_env(&cfg)?;
    let mut state = init_state(&cfg, env)?;
    for _ in 0..3 {
        let (next, _) = run_generation(&state, &cfg, env, &mut None)?;
        state = next;
    }
    let mid_path = base.join("mid.ckpt");
    make_checkpoint(&state, &cfg).save(&mid_path)?;
    println!("checkpointed at generation {}", state.generation);

    let resumed = resume(&cfg, &mid_path, &base.join("resumed"))?;
    println!("resumed and ran {} more generations", resumed.records.len());

    let mut all_equal = true;
    for (r, f) in resumed.records.iter().zip(&full.records[3..]) {
        let equal = r == f;
        all_equal &= equal;
        println!(
            "gen {}: resumed best {:.2} vs full best {:.2}  {}",
            r.generation,
            r.best,
            f.best,
            if equal { "match" } else { "MISMATCH" }
        );
    }
    assert!(
        all_equal,
        "continuation diverged from the uninterrupted run"
    );
    println!("continuation is identical to the uninterrupted run");
    Ok(())
}
