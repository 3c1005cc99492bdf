//! Micro-benchmarks behind the `bench` CLI subcommand: encode-time scaling
//! over dictionary size and sphere convergence of the optimizer.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compressor::{drsc_encode, Centroid, CompressorConfig, Dictionary, Observation};
use crate::error::Result;
use crate::optimizer::Xnes;

#[derive(Debug, Clone, Copy)]
pub struct ScalingPoint {
    pub dict_size: usize,
    pub median_nanos: f64,
}

fn random_pixels<R: Rng>(len: usize, rng: &mut R) -> Vec<f32> {
    (0..len).map(|_| rng.random_range(0.0..=1.0)).collect()
}

/// Median wall time of one encode at each dictionary size. Epsilon is zero so
/// every run performs exactly `omega` selections and the scan over candidates
/// dominates.
pub fn measure_encode_scaling(
    dict_sizes: &[usize],
    image_len: usize,
    omega: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CompressorConfig {
        epsilon: 0.0,
        omega,
        ..CompressorConfig::default()
    };
    let mut points = Vec::with_capacity(dict_sizes.len());
    for &size in dict_sizes {
        let mut dictionary = Dictionary::new(image_len)?;
        for _ in 0..size {
            dictionary.push(Centroid::new(random_pixels(image_len, &mut rng))?)?;
        }
        let images: Vec<Observation> = (0..reps)
            .map(|_| Observation::new(random_pixels(image_len, &mut rng), image_len, 1))
            .collect::<Result<_>>()?;
        // warm-up pass keeps first-touch costs out of the medians
        drsc_encode(&images[0], &dictionary, &cfg)?;
        let mut nanos: Vec<f64> = Vec::with_capacity(reps);
        for image in &images {
            let t0 = Instant::now();
            let code = drsc_encode(image, &dictionary, &cfg)?;
            nanos.push(t0.elapsed().as_nanos() as f64);
            assert!(code.popcount() <= omega);
        }
        nanos.sort_by(f64::total_cmp);
        points.push(ScalingPoint {
            dict_size: size,
            median_nanos: nanos[nanos.len() / 2],
        });
    }
    Ok(points)
}

/// Coefficient of determination of the least-squares line through the points.
pub fn linear_fit_r2(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    if ss_tot == 0.0 {
        return 1.0;
    }
    1.0 - ss_res / ss_tot
}

pub fn encode_scaling_r2(points: &[ScalingPoint]) -> f64 {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.dict_size as f64, p.median_nanos))
        .collect();
    linear_fit_r2(&xy)
}

/// Generations the optimizer needs to push the sphere objective above
/// `-target` starting from an all-ones mean; `None` if the budget runs out.
pub fn sphere_convergence_generations(
    dim: usize,
    target: f64,
    max_generations: usize,
    seed: u64,
) -> Result<Option<usize>> {
    use nalgebra::{DMatrix, DVector};
    let dist = crate::optimizer::SearchDistribution::from_parts(
        DVector::from_element(dim, 1.0),
        DMatrix::identity(dim, dim),
    )?;
    let mut xnes = Xnes::from_parts(dist, 1.0, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for generation in 1..=max_generations {
        let batch = xnes.ask(&mut rng);
        let fitnesses: Vec<f64> = (0..xnes.hyper.lambda)
            .map(|k| -batch.genome(k).iter().map(|x| x * x).sum::<f64>())
            .collect();
        if fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max) > -target {
            return Ok(Some(generation));
        }
        xnes.tell(&batch, &fitnesses)?;
    }
    Ok(None)
}
