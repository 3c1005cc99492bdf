//! Expand the search distribution mid-run.
//!
//! Optimizes a 3-D sphere for 20 generations, then inserts two coordinates
//! (zero mean, 0.0001 variance, zero covariance) before the last position and
//! keeps optimizing the 5-D sphere. Prints the mean and covariance around the
//! expansion so the insertion pattern is visible.
//!
//! Run with: `cargo run --release -p vqnes --example grow_dimensions`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vqnes::optimizer::Xnes;

fn sphere(z: &[f64]) -> f64 {
    -z.iter().map(|x| x * x).sum::<f64>()
}

fn print_distribution(tag: &str, xnes: &Xnes) {
    let mu = xnes.dist.mu();
    let cov = xnes.dist.covariance();
    println!(
        "{tag} mean: {:?}",
        mu.iter()
            .map(|v| (v * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );
    println!("{tag} covariance:");
    for row in 0..cov.nrows() {
        let cells: Vec<String> = (0..cov.ncols())
            .map(|col| format!("{:>9.4}", cov[(row, col)]))
            .collect();
        println!("  [{}]", cells.join(" "));
    }
}

fn main() -> vqnes::Result<()> {
    let mut xnes = Xnes::new(3, 1.0, 1.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for _ in 0..20 {
        let batch = xnes.ask(&mut rng);
        let fitnesses: Vec<f64> = (0..xnes.hyper.lambda)
            .map(|k| sphere(&batch.genome(k)))
            .collect();
        xnes.tell(&batch, &fitnesses)?;
    }
    print_distribution("before", &xnes);

    // two new coordinates slot in before the last one
    xnes.expand_dims(&[2, 3], 0.0001)?;
    println!("\nexpanded 3 -> 5 (population {} now)\n", xnes.hyper.lambda);
    print_distribution("after", &xnes);

    for generation in 21..=400 {
        let batch = xnes.ask(&mut rng);
        let fitnesses: Vec<f64> = (0..xnes.hyper.lambda)
            .map(|k| sphere(&batch.genome(k)))
            .collect();
        let best = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if generation % 50 == 0 {
            println!("gen {generation:>4}  best {best:.3e}");
        }
        xnes.tell(&batch, &fitnesses)?;
    }
    Ok(())
}
