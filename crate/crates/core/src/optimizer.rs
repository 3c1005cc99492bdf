//! Exponential natural evolution strategy with an ask/tell interface and
//! mid-run dimension insertion.
//!
//! The search distribution is a multivariate Gaussian held as a mean vector
//! and a square root factor `A` with `Σ = AᵀA`. Updates run in exponential
//! local coordinates on the stored standard-normal draws, so the covariance
//! stays symmetric positive definite by construction. When the policy network
//! gains inputs, [`expand_dims`] inserts fresh coordinates with zero mean,
//! zero covariance and a tiny bootstrap variance without disturbing the
//! marginal over the old coordinates.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Gaussian search distribution: mean `mu` and factor `a_factor`, `Σ = AᵀA`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchDistribution {
    mu: DVector<f64>,
    a_factor: DMatrix<f64>,
}

impl SearchDistribution {
    /// Isotropic distribution centered at zero with standard deviation `sigma`.
    pub fn standard(dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "distribution dimension must be >= 1".into(),
            ));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidArgument("sigma must be positive".into()));
        }
        Ok(Self {
            mu: DVector::zeros(dim),
            a_factor: DMatrix::identity(dim, dim) * sigma,
        })
    }

    pub fn from_parts(mu: DVector<f64>, a_factor: DMatrix<f64>) -> Result<Self> {
        let dim = mu.len();
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "distribution dimension must be >= 1".into(),
            ));
        }
        if a_factor.nrows() != dim || a_factor.ncols() != dim {
            return Err(Error::DimensionMismatch {
                context: "distribution factor",
                expected: dim,
                got: a_factor.nrows().max(a_factor.ncols()),
            });
        }
        Ok(Self { mu, a_factor })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn a_factor(&self) -> &DMatrix<f64> {
        &self.a_factor
    }

    /// Full covariance `AᵀA`.
    pub fn covariance(&self) -> DMatrix<f64> {
        self.a_factor.transpose() * &self.a_factor
    }
}

/// Population size, learning rates and fitness-shaping utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct NesHyper {
    pub lambda: usize,
    pub eta_mu: f64,
    pub eta_a: f64,
    /// Rank utilities, non-increasing, summing to zero.
    pub utilities: Vec<f64>,
}

/// Standard defaults scaled for this setup: population `round(pop_scale *
/// (4 + floor(3 ln p)))`, mean rate 1, factor rate `lr_scale * (9 + 3 ln p) /
/// (5 p sqrt(p))`, log-rank utilities shifted to zero sum.
pub fn default_hyper(p: usize, pop_scale: f64, lr_scale: f64) -> Result<NesHyper> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "parameter count must be >= 1".into(),
        ));
    }
    if !pop_scale.is_finite() || pop_scale <= 0.0 || !lr_scale.is_finite() || lr_scale <= 0.0 {
        return Err(Error::InvalidArgument(
            "hyperparameter scales must be positive".into(),
        ));
    }
    let p_f = p as f64;
    let base = 4.0 + (3.0 * p_f.ln()).floor();
    let lambda = (pop_scale * base).round().max(2.0) as usize;
    let eta_a = lr_scale * (9.0 + 3.0 * p_f.ln()) / (5.0 * p_f * p_f.sqrt());
    Ok(NesHyper {
        lambda,
        eta_mu: 1.0,
        eta_a,
        utilities: shaped_utilities(lambda),
    })
}

fn shaped_utilities(lambda: usize) -> Vec<f64> {
    let half_log = (lambda as f64 / 2.0 + 1.0).ln();
    let raw: Vec<f64> = (1..=lambda)
        .map(|k| (half_log - (k as f64).ln()).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut utilities: Vec<f64> = raw
        .iter()
        .map(|r| r / total - 1.0 / lambda as f64)
        .collect();
    // pin the zero sum exactly so fully tied generations are true no-ops;
    // the top utility sits clear of the rest, so the adjustment is safe
    let tail: f64 = utilities[1..].iter().sum();
    utilities[0] = -tail;
    utilities
}

/// One generation of draws: the standard normals and the genomes they map to.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    /// λ×p standard-normal draws, row per individual.
    std_normals: DMatrix<f64>,
    /// λ×p genomes, row k = `mu + Aᵀ s_k`.
    genomes: DMatrix<f64>,
}

impl SampleBatch {
    pub fn lambda(&self) -> usize {
        self.genomes.nrows()
    }

    pub fn dim(&self) -> usize {
        self.genomes.ncols()
    }

    pub fn genome(&self, k: usize) -> Vec<f64> {
        self.genomes.row(k).iter().copied().collect()
    }

    pub fn std_normal(&self, k: usize) -> Vec<f64> {
        self.std_normals.row(k).iter().copied().collect()
    }
}

/// Draw `lambda` genomes from the distribution.
pub fn ask<R: Rng>(dist: &SearchDistribution, hyper: &NesHyper, rng: &mut R) -> SampleBatch {
    let (lambda, p) = (hyper.lambda, dist.dim());
    let mut std_normals = DMatrix::zeros(lambda, p);
    for k in 0..lambda {
        for j in 0..p {
            std_normals[(k, j)] = rng.sample(StandardNormal);
        }
    }
    let mut genomes = DMatrix::zeros(lambda, p);
    for k in 0..lambda {
        for i in 0..p {
            // z_i = mu_i + (Aᵀ s)_i = mu_i + Σ_j A[j,i] s_j
            let mut acc = dist.mu[i];
            for j in 0..p {
                acc += dist.a_factor[(j, i)] * std_normals[(k, j)];
            }
            genomes[(k, i)] = acc;
        }
    }
    SampleBatch {
        std_normals,
        genomes,
    }
}

/// Per-individual utilities from fitness ranks (maximization). Tied fitnesses
/// share the mean of the utilities their rank span covers, so the update does
/// not depend on sort order among ties.
fn rank_utilities(fitnesses: &[f64], utilities: &[f64]) -> Vec<f64> {
    let lambda = fitnesses.len();
    let mut order: Vec<usize> = (0..lambda).collect();
    order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
    let mut per_individual = vec![0.0; lambda];
    let mut start = 0;
    while start < lambda {
        let mut end = start + 1;
        while end < lambda && fitnesses[order[end]] == fitnesses[order[start]] {
            end += 1;
        }
        let mean: f64 = utilities[start..end].iter().sum::<f64>() / (end - start) as f64;
        for &idx in &order[start..end] {
            per_individual[idx] = mean;
        }
        start = end;
    }
    per_individual
}

/// Natural-gradient update from one evaluated batch.
///
/// Ranks individuals by fitness (descending), then updates in local
/// coordinates using the stored standard-normal draws:
/// `mu += eta_mu * Aᵀ Σ u_k s_k`, and the factor picks up the exponential of
/// `eta_a/2 Σ u_k (s_k s_kᵀ − I)` composed on the side of the draws, so with
/// `z = mu + Aᵀ s` the new factor is `exp(·) A`. Composing on the other side
/// applies the local-frame operator in genome space; once `A` turns
/// anisotropic that misalignment stalls convergence and then inflates the
/// covariance (observable on a long sphere run).
pub fn tell(
    dist: &SearchDistribution,
    hyper: &NesHyper,
    batch: &SampleBatch,
    fitnesses: &[f64],
) -> Result<SearchDistribution> {
    let (lambda, p) = (hyper.lambda, dist.dim());
    if fitnesses.len() != lambda || batch.lambda() != lambda {
        return Err(Error::DimensionMismatch {
            context: "tell fitnesses",
            expected: lambda,
            got: fitnesses.len().min(batch.lambda()),
        });
    }
    if batch.dim() != p {
        return Err(Error::DimensionMismatch {
            context: "tell batch dimension",
            expected: p,
            got: batch.dim(),
        });
    }
    if let Some(index) = fitnesses.iter().position(|f| !f.is_finite()) {
        return Err(Error::NonFiniteFitness { index });
    }
    // a fully tied generation carries no ranking information
    if fitnesses.iter().all(|f| *f == fitnesses[0]) {
        return Ok(dist.clone());
    }

    let weights = rank_utilities(fitnesses, &hyper.utilities);
    let weight_sum: f64 = weights.iter().sum();

    // gradient for the mean, in local coordinates
    let mut grad_mu = vec![0.0; p];
    for (k, w) in weights.iter().enumerate() {
        for (j, g) in grad_mu.iter_mut().enumerate() {
            *g += w * batch.std_normals[(k, j)];
        }
    }
    let mut mu = dist.mu.clone();
    for i in 0..p {
        let mut acc = 0.0;
        for (j, g) in grad_mu.iter().enumerate() {
            acc += dist.a_factor[(j, i)] * g;
        }
        mu[i] += hyper.eta_mu * acc;
    }

    // gradient for the factor: Σ u_k (s_k s_kᵀ − I), symmetric by construction
    let mut grad_m = DMatrix::zeros(p, p);
    for (k, w) in weights.iter().enumerate() {
        for i in 0..p {
            let si = batch.std_normals[(k, i)];
            for j in i..p {
                grad_m[(i, j)] += w * si * batch.std_normals[(k, j)];
            }
        }
    }
    for i in 0..p {
        grad_m[(i, i)] -= weight_sum;
        for j in (i + 1)..p {
            grad_m[(j, i)] = grad_m[(i, j)];
        }
    }

    let exponent = grad_m * (hyper.eta_a / 2.0);
    let a_factor = sym_exp(&exponent) * &dist.a_factor;
    SearchDistribution::from_parts(mu, a_factor)
}

/// Matrix exponential of a symmetric matrix via eigendecomposition.
fn sym_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eigen = m.clone().symmetric_eigen();
    let exp_values = eigen.eigenvalues.map(f64::exp);
    &eigen.eigenvectors * DMatrix::from_diagonal(&exp_values) * eigen.eigenvectors.transpose()
}

/// Insert fresh coordinates at the given positions of the enlarged parameter
/// vector: zero mean, zero covariance against everything old, and `eps_var`
/// variance to bootstrap search along the new directions.
///
/// Positions index into the grown vector and must be strictly increasing.
/// Old means and pairwise covariances are preserved bit for bit.
pub fn expand_dims(
    dist: &SearchDistribution,
    insert_positions: &[usize],
    eps_var: f64,
) -> Result<SearchDistribution> {
    if !eps_var.is_finite() || eps_var <= 0.0 {
        return Err(Error::InvalidArgument("eps_var must be positive".into()));
    }
    let old_dim = dist.dim();
    let new_dim = old_dim + insert_positions.len();
    for (i, &pos) in insert_positions.iter().enumerate() {
        if pos >= new_dim {
            return Err(Error::InvalidArgument(format!(
                "insert position {pos} out of range for dimension {new_dim}"
            )));
        }
        if i > 0 && insert_positions[i - 1] >= pos {
            return Err(Error::InvalidArgument(
                "insert positions must be strictly increasing".into(),
            ));
        }
    }
    if insert_positions.is_empty() {
        return Ok(dist.clone());
    }

    // map old coordinate index -> new coordinate index
    let mut inserted = vec![false; new_dim];
    for &pos in insert_positions {
        inserted[pos] = true;
    }
    let old_to_new: Vec<usize> = (0..new_dim).filter(|&i| !inserted[i]).collect();

    let mut mu = DVector::zeros(new_dim);
    for (old_i, &new_i) in old_to_new.iter().enumerate() {
        mu[new_i] = dist.mu[old_i];
    }

    // Inserting zero rows/columns into A with sqrt(eps) on the new diagonal
    // leaves every old entry of AᵀA untouched and gives the new coordinates
    // exactly zero covariance and eps variance.
    let scale = eps_var.sqrt();
    let mut a_factor = DMatrix::zeros(new_dim, new_dim);
    for (old_r, &new_r) in old_to_new.iter().enumerate() {
        for (old_c, &new_c) in old_to_new.iter().enumerate() {
            a_factor[(new_r, new_c)] = dist.a_factor[(old_r, old_c)];
        }
    }
    for &pos in insert_positions {
        a_factor[(pos, pos)] = scale;
    }
    SearchDistribution::from_parts(mu, a_factor)
}

/// Recompute the default hyperparameters at the distribution's current
/// dimension, e.g. right after [`expand_dims`].
pub fn rehyper_after_expand(
    dist: &SearchDistribution,
    pop_scale: f64,
    lr_scale: f64,
) -> Result<NesHyper> {
    default_hyper(dist.dim(), pop_scale, lr_scale)
}

/// Convenience wrapper bundling a distribution with its hyperparameters.
#[derive(Debug, Clone)]
pub struct Xnes {
    pub dist: SearchDistribution,
    pub hyper: NesHyper,
    pop_scale: f64,
    lr_scale: f64,
}

impl Xnes {
    pub fn new(dim: usize, init_sigma: f64, pop_scale: f64, lr_scale: f64) -> Result<Self> {
        let dist = SearchDistribution::standard(dim, init_sigma)?;
        let hyper = default_hyper(dim, pop_scale, lr_scale)?;
        Ok(Self {
            dist,
            hyper,
            pop_scale,
            lr_scale,
        })
    }

    pub fn from_parts(dist: SearchDistribution, pop_scale: f64, lr_scale: f64) -> Result<Self> {
        let hyper = default_hyper(dist.dim(), pop_scale, lr_scale)?;
        Ok(Self {
            dist,
            hyper,
            pop_scale,
            lr_scale,
        })
    }

    pub fn ask<R: Rng>(&self, rng: &mut R) -> SampleBatch {
        ask(&self.dist, &self.hyper, rng)
    }

    pub fn tell(&mut self, batch: &SampleBatch, fitnesses: &[f64]) -> Result<()> {
        self.dist = tell(&self.dist, &self.hyper, batch, fitnesses)?;
        Ok(())
    }

    /// Insert dimensions and refresh the hyperparameters for the new size.
    pub fn expand_dims(&mut self, insert_positions: &[usize], eps_var: f64) -> Result<()> {
        self.dist = expand_dims(&self.dist, insert_positions, eps_var)?;
        self.hyper = rehyper_after_expand(&self.dist, self.pop_scale, self.lr_scale)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hyper_matches_reference_formula() {
        // eta_a at p=100 with lr_scale 0.5: 0.5 * (9 + 3 ln 100) / (5 * 100 * 10)
        let hyper = default_hyper(100, 1.5, 0.5).unwrap();
        assert_eq!(hyper.eta_a, 0.0022815510557964275);
        assert_eq!(hyper.eta_mu, 1.0);
    }

    #[test]
    fn population_sizes_for_typical_network_dimensions() {
        // 6..18 neurons with a few dozen centroids give these parameter counts
        for (p, expected_lambda) in [(42, 23), (102, 26), (222, 30), (510, 33), (1242, 38)] {
            let hyper = default_hyper(p, 1.5, 0.5).unwrap();
            assert_eq!(hyper.lambda, expected_lambda, "p={p}");
            assert!((18..=42).contains(&hyper.lambda));
        }
    }

    #[test]
    fn utilities_sum_to_zero_and_decrease() {
        for lambda in [2usize, 5, 10, 23, 42] {
            let u = shaped_utilities(lambda);
            assert_eq!(u.len(), lambda);
            let sum: f64 = u.iter().sum();
            assert!(sum.abs() < 1e-12, "lambda={lambda} sum={sum}");
            for pair in u.windows(2) {
                assert!(pair[0] >= pair[1]);
            }
        }
    }

    #[test]
    fn ask_with_identity_factor_returns_raw_draws() {
        let dist = SearchDistribution::standard(4, 1.0).unwrap();
        let hyper = default_hyper(4, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let batch = ask(&dist, &hyper, &mut rng);
        for k in 0..hyper.lambda {
            assert_eq!(batch.genome(k), batch.std_normal(k));
        }
    }

    #[test]
    fn ask_genomes_reproduce_from_draws() {
        let mu = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let a = DMatrix::from_row_slice(3, 3, &[0.9, 0.2, -0.1, 0.0, 1.1, 0.3, 0.0, 0.0, 0.7]);
        let dist = SearchDistribution::from_parts(mu.clone(), a.clone()).unwrap();
        let hyper = default_hyper(3, 1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let batch = ask(&dist, &hyper, &mut rng);
        for k in 0..hyper.lambda {
            let s = batch.std_normal(k);
            let z = batch.genome(k);
            for i in 0..3 {
                let mut acc = mu[i];
                for (j, sj) in s.iter().enumerate() {
                    acc += a[(j, i)] * sj;
                }
                assert_eq!(z[i], acc, "genome entry must be mu + Aᵀs exactly");
            }
        }
    }

    #[test]
    fn ask_sample_statistics_match_distribution() {
        let mu = DVector::from_vec(vec![2.0, -1.0]);
        let a = DMatrix::from_row_slice(2, 2, &[1.5, 0.4, 0.0, 0.8]);
        let dist = SearchDistribution::from_parts(mu.clone(), a.clone()).unwrap();
        let hyper = NesHyper {
            lambda: 10_000,
            eta_mu: 1.0,
            eta_a: 0.1,
            utilities: shaped_utilities(10_000),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let batch = ask(&dist, &hyper, &mut rng);
        let n = hyper.lambda as f64;

        let cov = dist.covariance();
        for i in 0..2 {
            let mean_i = (0..hyper.lambda)
                .map(|k| batch.genomes[(k, i)])
                .sum::<f64>()
                / n;
            let sigma_i = (cov[(i, i)] / n).sqrt();
            assert!(
                (mean_i - mu[i]).abs() < 3.0 * sigma_i,
                "mean {mean_i} vs {} (3σ={})",
                mu[i],
                3.0 * sigma_i
            );
        }
        // covariance entries within a loose multiple of their standard error
        for i in 0..2 {
            for j in 0..2 {
                let emp = (0..hyper.lambda)
                    .map(|k| (batch.genomes[(k, i)] - mu[i]) * (batch.genomes[(k, j)] - mu[j]))
                    .sum::<f64>()
                    / n;
                let se = ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / n).sqrt();
                assert!(
                    (emp - cov[(i, j)]).abs() < 4.0 * se,
                    "cov[{i},{j}] {emp} vs {}",
                    cov[(i, j)]
                );
            }
        }
    }

    #[test]
    fn tell_with_equal_fitnesses_is_a_no_op() {
        let dist = SearchDistribution::standard(3, 1.0).unwrap();
        let hyper = default_hyper(3, 1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = ask(&dist, &hyper, &mut rng);
        let fitnesses = vec![2.5; hyper.lambda];
        let updated = tell(&dist, &hyper, &batch, &fitnesses).unwrap();
        // every individual gets the mean utility (zero), so nothing moves
        assert_eq!(updated.mu(), dist.mu());
        assert_eq!(updated.a_factor(), dist.a_factor());
    }

    #[test]
    fn tell_moves_mean_toward_quadratic_optimum() {
        // f(x) = -x² around mu=1: mass below 1 ranks higher, mu must drop
        let dist = SearchDistribution::from_parts(
            DVector::from_vec(vec![1.0]),
            DMatrix::from_row_slice(1, 1, &[1.0]),
        )
        .unwrap();
        let hyper = default_hyper(1, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let batch = ask(&dist, &hyper, &mut rng);
        let fitnesses: Vec<f64> = (0..hyper.lambda)
            .map(|k| -batch.genome(k)[0].powi(2))
            .collect();
        let updated = tell(&dist, &hyper, &batch, &fitnesses).unwrap();
        assert!(
            updated.mu()[0].abs() < 1.0,
            "mu did not move toward 0: {}",
            updated.mu()[0]
        );
    }

    #[test]
    fn tell_rejects_non_finite_fitness() {
        let dist = SearchDistribution::standard(2, 1.0).unwrap();
        let hyper = default_hyper(2, 1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let batch = ask(&dist, &hyper, &mut rng);
        let mut fitnesses = vec![0.0; hyper.lambda];
        fitnesses[1] = f64::NAN;
        assert!(matches!(
            tell(&dist, &hyper, &batch, &fitnesses),
            Err(Error::NonFiniteFitness { index: 1 })
        ));
    }

    #[test]
    fn tell_rejects_wrong_population_size() {
        let dist = SearchDistribution::standard(2, 1.0).unwrap();
        let hyper = default_hyper(2, 1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let batch = ask(&dist, &hyper, &mut rng);
        let fitnesses = vec![0.0; hyper.lambda + 1];
        assert!(tell(&dist, &hyper, &batch, &fitnesses).is_err());
    }

    #[test]
    fn expansion_reproduces_documented_pattern() {
        // 2 inputs + bias, growing to 4 inputs + bias: two zeros enter the
        // mean before the bias slot, covariance gains eps diagonal entries
        // with zero cross terms, everything old survives bit for bit.
        let mu = DVector::from_vec(vec![0.3, -0.7, 1.1]);
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.1, 0.2, 0.0, 0.9, -0.3, 0.0, 0.0, 1.2]);
        let dist = SearchDistribution::from_parts(mu, a).unwrap();
        let cov_before = dist.covariance();

        let grown = expand_dims(&dist, &[2, 3], 0.0001).unwrap();
        assert_eq!(grown.dim(), 5);
        let mu_after = grown.mu();
        assert_eq!(
            mu_after.iter().copied().collect::<Vec<_>>(),
            vec![0.3, -0.7, 0.0, 0.0, 1.1]
        );

        let cov = grown.covariance();
        let old_to_new = [0usize, 1, 4];
        for (i, &ni) in old_to_new.iter().enumerate() {
            for (j, &nj) in old_to_new.iter().enumerate() {
                assert_eq!(cov[(ni, nj)], cov_before[(i, j)]);
            }
        }
        for &pos in &[2usize, 3] {
            assert_eq!(cov[(pos, pos)], 0.0001, "eps variance on new diagonal");
            for other in 0..5 {
                if other != pos {
                    assert_eq!(cov[(pos, other)], 0.0);
                    assert_eq!(cov[(other, pos)], 0.0);
                }
            }
        }
    }

    #[test]
    fn expansion_with_no_positions_is_identity() {
        let dist = SearchDistribution::standard(3, 0.5).unwrap();
        let same = expand_dims(&dist, &[], 0.0001).unwrap();
        assert_eq!(same.mu(), dist.mu());
        assert_eq!(same.a_factor(), dist.a_factor());
    }

    #[test]
    fn expansion_rejects_bad_arguments() {
        let dist = SearchDistribution::standard(3, 1.0).unwrap();
        assert!(expand_dims(&dist, &[0], 0.0).is_err());
        assert!(expand_dims(&dist, &[5], 1e-4).is_err());
        assert!(expand_dims(&dist, &[1, 1], 1e-4).is_err());
    }

    #[test]
    fn expansion_marginal_statistics_unchanged() {
        let mu = DVector::from_vec(vec![0.5, -0.2]);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 0.6]);
        let dist = SearchDistribution::from_parts(mu, a).unwrap();
        let grown = expand_dims(&dist, &[1], 0.0001).unwrap();

        let hyper = NesHyper {
            lambda: 10_000,
            eta_mu: 1.0,
            eta_a: 0.1,
            utilities: shaped_utilities(10_000),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let batch = ask(&grown, &hyper, &mut rng);
        let n = hyper.lambda as f64;
        let cov = dist.covariance();
        // old coordinates live at new indices 0 and 2
        for (old_i, new_i) in [(0usize, 0usize), (1, 2)] {
            let mean: f64 = (0..hyper.lambda)
                .map(|k| batch.genomes[(k, new_i)])
                .sum::<f64>()
                / n;
            let sigma = (cov[(old_i, old_i)] / n).sqrt();
            assert!((mean - dist.mu()[old_i]).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn rehyper_is_definitionally_default_hyper() {
        let dist = SearchDistribution::standard(150, 1.0).unwrap();
        let recomputed = rehyper_after_expand(&dist, 1.5, 0.5).unwrap();
        assert_eq!(recomputed, default_hyper(150, 1.5, 0.5).unwrap());
        // lambda never shrinks when p grows
        let before = default_hyper(100, 1.5, 0.5).unwrap();
        assert!(recomputed.lambda >= before.lambda);
    }

    #[test]
    fn seeded_ask_tell_trajectories_are_identical() {
        let run = || {
            let mut xnes = Xnes::new(4, 1.0, 1.5, 0.5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..5 {
                let batch = xnes.ask(&mut rng);
                let fitnesses: Vec<f64> = (0..xnes.hyper.lambda)
                    .map(|k| {
                        let z = batch.genome(k);
                        -z.iter().map(|x| x * x).sum::<f64>()
                    })
                    .collect();
                xnes.tell(&batch, &fitnesses).unwrap();
            }
            xnes.dist
        };
        let a = run();
        let b = run();
        assert_eq!(a.mu(), b.mu());
        assert_eq!(a.a_factor(), b.a_factor());
    }

    #[test]
    fn covariance_stays_positive_definite_under_updates() {
        let mut xnes = Xnes::new(5, 1.0, 1.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let batch = xnes.ask(&mut rng);
            let fitnesses: Vec<f64> = (0..xnes.hyper.lambda)
                .map(|k| {
                    let z = batch.genome(k);
                    -z.iter().map(|x| x * x).sum::<f64>()
                })
                .collect();
            xnes.tell(&batch, &fitnesses).unwrap();
            let min_eig = xnes.dist.covariance().symmetric_eigen().eigenvalues.min();
            assert!(min_eig > 0.0, "covariance lost positive definiteness");
        }
    }

    proptest! {
        // Utilities depend on ranks only: any strictly increasing transform
        // of the fitnesses produces the identical update.
        #[test]
        fn tell_is_invariant_to_monotone_fitness_transforms(
            seed in 0u64..500,
            scale in 0.1f64..5.0,
            offset in -10.0f64..10.0,
        ) {
            let dist = SearchDistribution::standard(3, 1.0).unwrap();
            let hyper = default_hyper(3, 1.5, 0.5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let batch = ask(&dist, &hyper, &mut rng);
            let fitnesses: Vec<f64> = (0..hyper.lambda)
                .map(|k| -batch.genome(k).iter().map(|x| x * x).sum::<f64>())
                .collect();
            let transformed: Vec<f64> =
                fitnesses.iter().map(|f| scale * f + offset).collect();

            let a = tell(&dist, &hyper, &batch, &fitnesses).unwrap();
            let b = tell(&dist, &hyper, &batch, &transformed).unwrap();
            prop_assert_eq!(a.mu(), b.mu());
            prop_assert_eq!(a.a_factor(), b.a_factor());
        }

        // Tie handling removes order dependence: permuting which individual
        // carries which (tied) fitness leaves the update unchanged when the
        // tied individuals swap places in the argument order.
        #[test]
        fn tied_fitness_updates_are_symmetric(seed in 0u64..200) {
            let dist = SearchDistribution::standard(2, 1.0).unwrap();
            let hyper = default_hyper(2, 1.5, 0.5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let batch = ask(&dist, &hyper, &mut rng);
            let mut fitnesses = vec![0.0; hyper.lambda];
            for (i, f) in fitnesses.iter_mut().enumerate() {
                *f = (i / 2) as f64; // pairs of ties
            }
            let base = tell(&dist, &hyper, &batch, &fitnesses).unwrap();
            // swapping the values inside a tie group changes nothing
            fitnesses.swap(0, 1);
            let swapped = tell(&dist, &hyper, &batch, &fitnesses).unwrap();
            prop_assert_eq!(base.mu(), swapped.mu());
            prop_assert_eq!(base.a_factor(), swapped.a_factor());
        }
    }
}
