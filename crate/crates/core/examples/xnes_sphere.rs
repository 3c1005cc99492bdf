//! Minimize the 10-D sphere with the ask/tell optimizer.
//!
//! Run with: `cargo run --release -p vqnes --example xnes_sphere`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vqnes::optimizer::Xnes;

fn main() -> vqnes::Result<()> {
    let dim = 10;
    let mut xnes = Xnes::new(dim, 1.0, 1.0, 1.0)?;
    // start away from the optimum
    let start = nalgebra::DVector::from_element(dim, 1.0);
    xnes.dist = vqnes::optimizer::SearchDistribution::from_parts(
        start,
        nalgebra::DMatrix::identity(dim, dim),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    println!("dim {dim}, population {}", xnes.hyper.lambda);

    for generation in 1..=2000 {
        let batch = xnes.ask(&mut rng);
        let fitnesses: Vec<f64> = (0..xnes.hyper.lambda)
            .map(|k| -batch.genome(k).iter().map(|x| x * x).sum::<f64>())
            .collect();
        let best = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if generation % 50 == 0 {
            println!("gen {generation:>4}  best {best:.3e}");
        }
        if best > -1e-9 {
            println!("reached {best:.3e} after {generation} generations");
            return Ok(());
        }
        xnes.tell(&batch, &fitnesses)?;
    }
    println!("budget exhausted");
    Ok(())
}
