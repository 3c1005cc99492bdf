//! Online-growing dictionary compressor.
//!
//! The dictionary starts empty and grows by appending clipped reconstruction
//! residuals ([`idvq_train_step`]). Observations are encoded into binary codes
//! by greedily subtracting the most similar centroid until the leftover
//! information drops below a threshold ([`drsc_encode`]). Centroids are never
//! refined after insertion, so codes stay stable for features already learned.

use rand::Rng;

use crate::error::{Error, Result};

/// A preprocessed grayscale frame, row-major, every pixel in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pixels: Vec<f32>,
    width: usize,
    height: usize,
}

impl Observation {
    pub fn new(pixels: Vec<f32>, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(
                "observation dimensions must be positive".into(),
            ));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                context: "observation pixels",
                expected: width * height,
                got: pixels.len(),
            });
        }
        if let Some(p) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!(
                "pixel value {p} outside [0, 1]"
            )));
        }
        Ok(Self {
            pixels,
            width,
            height,
        })
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// A dictionary element: the non-negative residual image of one learned feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    values: Vec<f32>,
}

impl Centroid {
    pub fn new(values: Vec<f32>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "centroid value {v} must be finite and non-negative"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Ordered, append-only collection of centroids.
///
/// Centroid order is stable and existing entries are never modified, so a
/// code's bit positions keep their meaning for the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    centroids: Vec<Centroid>,
    image_len: usize,
}

impl Dictionary {
    pub fn new(image_len: usize) -> Result<Self> {
        if image_len == 0 {
            return Err(Error::InvalidArgument(
                "dictionary image_len must be positive".into(),
            ));
        }
        Ok(Self {
            centroids: Vec::new(),
            image_len,
        })
    }

    pub fn push(&mut self, centroid: Centroid) -> Result<()> {
        if centroid.len() != self.image_len {
            return Err(Error::DimensionMismatch {
                context: "centroid length",
                expected: self.image_len,
                got: centroid.len(),
            });
        }
        self.centroids.push(centroid);
        Ok(())
    }

    pub fn centroids(&self) -> &[Centroid] {
        &self.centroids
    }

    pub fn get(&self, index: usize) -> Option<&Centroid> {
        self.centroids.get(index)
    }

    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn image_len(&self) -> usize {
        self.image_len
    }
}

/// Binary code over dictionary positions, at most `omega` ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCode {
    bits: Vec<u8>,
}

impl SparseCode {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|b| **b > 1) {
            return Err(Error::InvalidArgument(format!("code bit {b} is not 0/1")));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|b| **b == 1).count()
    }

    /// The code as network input values.
    pub fn as_inputs(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }

    /// One `0`/`1` character per bit, e.g. `0101`.
    pub fn to_bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|b| if *b == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Compressor thresholds.
///
/// `delta` gates dictionary growth, `epsilon` stops encoding once the leftover
/// residual is negligible, `omega` caps the number of ones per code.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressorConfig {
    pub delta: f64,
    pub epsilon: f64,
    pub omega: usize,
    pub train_set_capacity: usize,
    /// Prefer high-residual observations when sampling the training set.
    pub prioritized_sampling: bool,
    /// Hard cap on dictionary size; 0 means unlimited.
    pub max_centroids: usize,
}

impl CompressorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta < 0.0 || !self.delta.is_finite() {
            return Err(Error::InvalidArgument("delta must be >= 0".into()));
        }
        if self.epsilon < 0.0 || !self.epsilon.is_finite() {
            return Err(Error::InvalidArgument("epsilon must be >= 0".into()));
        }
        if self.omega == 0 {
            return Err(Error::InvalidArgument("omega must be >= 1".into()));
        }
        if self.train_set_capacity == 0 {
            return Err(Error::InvalidArgument(
                "train_set_capacity must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for CompressorConfig {
    fn default() -> Self {
        Self {
            delta: 0.005,
            epsilon: 1.0,
            omega: 10,
            train_set_capacity: 64,
            prioritized_sampling: false,
            max_centroids: 0,
        }
    }
}

fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

fn l1_sum(values: &[f32]) -> f64 {
    values.iter().map(|v| f64::from(v.abs())).sum()
}

fn l1_distance(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| f64::from((x - y).abs())).sum()
}

/// Greedy single-pass binary encoding against the dictionary.
///
/// Each iteration selects the not-yet-selected centroid with the smallest
/// aggregated absolute difference to the current residual (ties to the lowest
/// index), flips its bit, subtracts it, and clips the residual at zero. Stops
/// when the residual sum drops to `epsilon`, `omega` bits are set, or every
/// centroid has been selected.
pub fn drsc_encode(x: &Observation, d: &Dictionary, cfg: &CompressorConfig) -> Result<SparseCode> {
    drsc_encode_with_residual(x, d, cfg).map(|(code, _)| code)
}

/// Like [`drsc_encode`] but also returns the final aggregated residual, which
/// the training-set collector logs to expose poorly covered observations.
pub fn drsc_encode_with_residual(
    x: &Observation,
    d: &Dictionary,
    cfg: &CompressorConfig,
) -> Result<(SparseCode, f64)> {
    check_len("encode observation", d.image_len(), x.len())?;
    cfg.validate()?;

    let mut bits = vec![0u8; d.len()];
    let mut residual: Vec<f32> = x.pixels().to_vec();
    let mut residual_sum = l1_sum(&residual);
    let mut ones = 0usize;

    while residual_sum > cfg.epsilon && ones < cfg.omega && ones < d.len() {
        let mut best_index = usize::MAX;
        let mut best_distance = f64::INFINITY;
        for (i, centroid) in d.centroids().iter().enumerate() {
            if bits[i] == 1 {
                continue;
            }
            let distance = l1_distance(&residual, centroid.values());
            if distance < best_distance {
                best_distance = distance;
                best_index = i;
            }
        }
        bits[best_index] = 1;
        ones += 1;
        for (r, c) in residual.iter_mut().zip(d.centroids()[best_index].values()) {
            *r = (*r - c).max(0.0);
        }
        residual_sum = l1_sum(&residual);
    }

    Ok((SparseCode { bits }, residual_sum))
}

/// Sum of the centroids selected by the code; zero vector for the empty code.
pub fn reconstruct(code: &SparseCode, d: &Dictionary) -> Result<Vec<f32>> {
    check_len("reconstruct code", d.len(), code.len())?;
    let mut out = vec![0.0f32; d.image_len()];
    for (bit, centroid) in code.bits().iter().zip(d.centroids()) {
        if *bit == 1 {
            for (o, c) in out.iter_mut().zip(centroid.values()) {
                *o += c;
            }
        }
    }
    Ok(out)
}

/// `max(0, x - recon)` elementwise. Positive entries are image information the
/// reconstruction missed; negative entries are reconstruction artifacts and
/// are discarded.
pub fn clipped_residual(x: &Observation, recon: &[f32]) -> Result<Vec<f32>> {
    check_len("residual reconstruction", x.len(), recon.len())?;
    Ok(x.pixels()
        .iter()
        .zip(recon)
        .map(|(p, r)| (p - r).max(0.0))
        .collect())
}

/// One dictionary training step: encode, reconstruct, and append the clipped
/// residual as a new centroid if its aggregated magnitude exceeds `delta`.
///
/// Returns `true` when the dictionary grew. Existing centroids are untouched.
pub fn idvq_train_step(
    x: &Observation,
    d: &mut Dictionary,
    cfg: &CompressorConfig,
) -> Result<bool> {
    let code = drsc_encode(x, d, cfg)?;
    let recon = reconstruct(&code, d)?;
    let residual = clipped_residual(x, &recon)?;
    if l1_sum(&residual) > cfg.delta {
        if cfg.max_centroids > 0 && d.len() >= cfg.max_centroids {
            return Ok(false);
        }
        d.push(Centroid { values: residual })?;
        return Ok(true);
    }
    Ok(false)
}

/// Folds [`idvq_train_step`] over the training set in stored order.
/// Returns the number of centroids appended.
pub fn idvq_train(ts: &TrainingSet, d: &mut Dictionary, cfg: &CompressorConfig) -> Result<usize> {
    let mut appended = 0;
    for sample in ts.samples() {
        if idvq_train_step(&sample.observation, d, cfg)? {
            appended += 1;
        }
    }
    Ok(appended)
}

/// One observation offered to the between-generations training set.
#[derive(Debug, Clone)]
pub struct TrainingSample {
    pub observation: Observation,
    /// Aggregated residual left after encoding at offer time.
    pub residual_sum: f64,
    /// Weighted-reservoir key; unused under uniform sampling.
    key: f64,
}

/// Bounded sample of one generation's observations.
///
/// Uniform reservoir sampling by default, so the retained set is a uniform
/// sample of every observation offered since the last [`TrainingSet::clear`].
/// With `prioritized` set, offers are kept with probability proportional to
/// their residual magnitude instead (weighted reservoir).
#[derive(Debug, Clone)]
pub struct TrainingSet {
    samples: Vec<TrainingSample>,
    seen: u64,
    capacity: usize,
    prioritized: bool,
}

impl TrainingSet {
    pub fn new(capacity: usize, prioritized: bool) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidArgument(
                "training set capacity must be >= 1".into(),
            ));
        }
        Ok(Self {
            samples: Vec::with_capacity(capacity),
            seen: 0,
            capacity,
            prioritized,
        })
    }

    /// Offer one observation; the reservoir decides whether it is retained.
    pub fn offer<R: Rng>(&mut self, observation: Observation, residual_sum: f64, rng: &mut R) {
        self.seen += 1;
        if self.prioritized {
            self.offer_weighted(observation, residual_sum, rng);
        } else {
            self.offer_uniform(observation, residual_sum, rng);
        }
    }

    // Algorithm R: keep slot j with probability capacity / seen.
    fn offer_uniform<R: Rng>(&mut self, observation: Observation, residual_sum: f64, rng: &mut R) {
        let sample = TrainingSample {
            observation,
            residual_sum,
            key: 0.0,
        };
        if self.samples.len() < self.capacity {
            self.samples.push(sample);
        } else {
            let j = rng.random_range(0..self.seen);
            if (j as usize) < self.capacity {
                self.samples[j as usize] = sample;
            }
        }
    }

    // A-Res weighted reservoir: key = u^(1/w), keep the largest keys.
    fn offer_weighted<R: Rng>(&mut self, observation: Observation, residual_sum: f64, rng: &mut R) {
        let weight = residual_sum.max(f64::MIN_POSITIVE);
        let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let key = u.powf(1.0 / weight);
        let sample = TrainingSample {
            observation,
            residual_sum,
            key,
        };
        if self.samples.len() < self.capacity {
            self.samples.push(sample);
            return;
        }
        let (min_idx, min_key) = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.key))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("capacity >= 1");
        if key > min_key {
            self.samples[min_idx] = sample;
        }
    }

    pub fn samples(&self) -> &[TrainingSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn seen_count(&self) -> u64 {
        self.seen
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Largest residual among retained samples; observability for the
    /// "which observations are still poorly covered" signal.
    pub fn max_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.residual_sum)
            .fold(0.0, f64::max)
    }

    /// Drop all samples and reset the offer counter for the next generation.
    pub fn clear(&mut self) {
        self.samples.clear();
        self.seen = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(pixels: &[f32]) -> Observation {
        Observation::new(pixels.to_vec(), pixels.len(), 1).unwrap()
    }

    fn dict(centroids: &[&[f32]], image_len: usize) -> Dictionary {
        let mut d = Dictionary::new(image_len).unwrap();
        for c in centroids {
            d.push(Centroid::new(c.to_vec()).unwrap()).unwrap();
        }
        d
    }

    fn cfg(delta: f64, epsilon: f64, omega: usize) -> CompressorConfig {
        CompressorConfig {
            delta,
            epsilon,
            omega,
            ..CompressorConfig::default()
        }
    }

    #[test]
    fn observation_rejects_out_of_range_pixels() {
        assert!(Observation::new(vec![0.0, 1.1], 2, 1).is_err());
        assert!(Observation::new(vec![-0.1, 0.5], 2, 1).is_err());
        assert!(Observation::new(vec![0.5; 3], 2, 1).is_err());
    }

    #[test]
    fn encode_empty_dictionary_returns_empty_code() {
        let d = Dictionary::new(2).unwrap();
        let code = drsc_encode(&obs(&[0.3, 0.7]), &d, &cfg(0.005, 0.1, 2)).unwrap();
        assert_eq!(code.len(), 0);
        assert_eq!(code.popcount(), 0);
    }

    #[test]
    fn encode_exact_single_centroid_match() {
        let d = dict(&[&[1.0, 0.0], &[0.0, 1.0]], 2);
        let code = drsc_encode(&obs(&[1.0, 0.0]), &d, &cfg(0.005, 0.1, 2)).unwrap();
        assert_eq!(code.bits(), &[1, 0]);
    }

    #[test]
    fn encode_tie_breaks_to_lowest_index_then_completes() {
        // residual [1,1]: both centroids at L1 distance 1, lowest index wins;
        // second pass zeroes the residual.
        let d = dict(&[&[1.0, 0.0], &[0.0, 1.0]], 2);
        let (code, residual) =
            drsc_encode_with_residual(&obs(&[1.0, 1.0]), &d, &cfg(0.005, 0.1, 2)).unwrap();
        assert_eq!(code.bits(), &[1, 1]);
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn encode_stops_at_omega_cap() {
        let d = dict(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]], 3);
        let (code, residual) =
            drsc_encode_with_residual(&obs(&[1.0, 1.0, 1.0]), &d, &cfg(0.005, 0.0, 2)).unwrap();
        assert_eq!(code.bits(), &[1, 1, 0]);
        assert_eq!(code.popcount(), 2);
        assert_eq!(residual, 1.0);
    }

    #[test]
    fn encode_rejects_dimension_mismatch() {
        let d = dict(&[&[1.0, 0.0]], 2);
        let err = drsc_encode(&obs(&[1.0, 0.0, 0.0]), &d, &cfg(0.005, 0.1, 2));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn reconstruct_cases() {
        let d = dict(&[&[0.5, 0.2], &[0.1, 0.4]], 2);
        let zero = reconstruct(&SparseCode::from_bits(vec![0, 0]).unwrap(), &d).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);

        let single = dict(&[&[1.0, 0.0], &[0.0, 1.0]], 2);
        let one = reconstruct(&SparseCode::from_bits(vec![1, 0]).unwrap(), &single).unwrap();
        assert_eq!(one, vec![1.0, 0.0]);

        let both = reconstruct(&SparseCode::from_bits(vec![1, 1]).unwrap(), &d).unwrap();
        assert!((both[0] - 0.6).abs() < 1e-6 && (both[1] - 0.6).abs() < 1e-6);
    }

    #[test]
    fn clipped_residual_cases() {
        let x = obs(&[0.8, 0.3, 0.5]);
        assert_eq!(
            clipped_residual(&x, &[0.8, 0.3, 0.5]).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert_eq!(
            clipped_residual(&obs(&[1.0, 0.0]), &[0.0, 1.0]).unwrap(),
            vec![1.0, 0.0]
        );
        let r = clipped_residual(&x, &[0.5, 0.5, 0.5]).unwrap();
        assert!((r[0] - 0.3).abs() < 1e-7);
        assert_eq!(&r[1..], &[0.0, 0.0]);
    }

    #[test]
    fn train_step_on_empty_dictionary_appends_the_image() {
        let mut d = Dictionary::new(2).unwrap();
        let x = obs(&[0.5, 0.25]);
        let grew = idvq_train_step(&x, &mut d, &cfg(0.005, 0.1, 2)).unwrap();
        assert!(grew);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0).unwrap().values(), x.pixels());
    }

    #[test]
    fn train_step_skips_fully_covered_image() {
        let mut d = dict(&[&[1.0, 0.0]], 2);
        let grew = idvq_train_step(&obs(&[1.0, 0.0]), &mut d, &cfg(0.005, 0.01, 2)).unwrap();
        assert!(!grew);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn train_step_appends_uncovered_residual() {
        let mut d = dict(&[&[1.0, 0.0]], 2);
        let grew = idvq_train_step(&obs(&[1.0, 1.0]), &mut d, &cfg(0.5, 0.1, 2)).unwrap();
        assert!(grew);
        assert_eq!(d.len(), 2);
        assert_eq!(d.get(1).unwrap().values(), &[0.0, 1.0]);
    }

    #[test]
    fn train_folds_samples_in_order() {
        // {[1,0], [0,1], [1,1]} from empty: third image is fully covered.
        let mut ts = TrainingSet::new(8, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for pixels in [[1.0f32, 0.0], [0.0, 1.0], [1.0, 1.0]] {
            ts.offer(obs(&pixels), 0.0, &mut rng);
        }
        let mut d = Dictionary::new(2).unwrap();
        let appended = idvq_train(&ts, &mut d, &cfg(0.5, 0.1, 3)).unwrap();
        assert_eq!(appended, 2);
        assert_eq!(d.get(0).unwrap().values(), &[1.0, 0.0]);
        assert_eq!(d.get(1).unwrap().values(), &[0.0, 1.0]);
    }

    #[test]
    fn train_on_empty_set_is_a_no_op() {
        let ts = TrainingSet::new(4, false).unwrap();
        let mut d = dict(&[&[1.0, 0.0]], 2);
        let before = d.clone();
        assert_eq!(idvq_train(&ts, &mut d, &cfg(0.005, 0.1, 2)).unwrap(), 0);
        assert_eq!(d, before);
    }

    #[test]
    fn duplicate_samples_add_one_centroid() {
        let mut ts = TrainingSet::new(4, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        ts.offer(obs(&[0.5, 0.5]), 0.0, &mut rng);
        ts.offer(obs(&[0.5, 0.5]), 0.0, &mut rng);
        let mut d = Dictionary::new(2).unwrap();
        assert_eq!(idvq_train(&ts, &mut d, &cfg(0.005, 0.0, 2)).unwrap(), 1);
    }

    #[test]
    fn max_centroids_caps_growth() {
        let mut config = cfg(0.005, 0.0, 4);
        config.max_centroids = 1;
        let mut d = Dictionary::new(2).unwrap();
        assert!(idvq_train_step(&obs(&[1.0, 0.0]), &mut d, &config).unwrap());
        assert!(!idvq_train_step(&obs(&[0.0, 1.0]), &mut d, &config).unwrap());
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn reservoir_keeps_everything_under_capacity() {
        let mut ts = TrainingSet::new(10, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..5 {
            ts.offer(obs(&[i as f32 / 10.0, 0.0]), 0.0, &mut rng);
        }
        assert_eq!(ts.len(), 5);
        assert_eq!(ts.seen_count(), 5);
    }

    #[test]
    fn reservoir_capacity_one_is_uniform() {
        // With capacity 1 and n offers, each offer survives with probability 1/n.
        let n = 5usize;
        let trials = 40_000usize;
        let mut counts = vec![0usize; n];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..trials {
            let mut ts = TrainingSet::new(1, false).unwrap();
            for i in 0..n {
                ts.offer(obs(&[i as f32 / 8.0]), 0.0, &mut rng);
            }
            let kept = (ts.samples()[0].observation.pixels()[0] * 8.0).round() as usize;
            counts[kept] += 1;
        }
        let expected = trials as f64 / n as f64;
        // 4-sigma binomial bound per bucket.
        let sigma = (trials as f64 * (1.0 / n as f64) * (1.0 - 1.0 / n as f64)).sqrt();
        for &c in &counts {
            assert!(
                (c as f64 - expected).abs() < 4.0 * sigma,
                "bucket count {c} too far from {expected}"
            );
        }
    }

    #[test]
    fn prioritized_reservoir_prefers_high_residual() {
        let trials = 2_000usize;
        let mut kept_high = 0usize;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..trials {
            let mut ts = TrainingSet::new(1, true).unwrap();
            ts.offer(obs(&[0.0]), 0.1, &mut rng);
            ts.offer(obs(&[1.0]), 10.0, &mut rng);
            if ts.samples()[0].observation.pixels()[0] == 1.0 {
                kept_high += 1;
            }
        }
        assert!(
            kept_high > trials * 8 / 10,
            "high-residual sample kept only {kept_high}/{trials} times"
        );
    }

    #[test]
    fn residual_magnitudes_are_observable_per_sample() {
        let mut ts = TrainingSet::new(4, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        ts.offer(obs(&[0.1]), 0.25, &mut rng);
        ts.offer(obs(&[0.2]), 4.5, &mut rng);
        ts.offer(obs(&[0.3]), 1.0, &mut rng);
        assert_eq!(ts.max_residual(), 4.5);
        let logged: Vec<f64> = ts.samples().iter().map(|s| s.residual_sum).collect();
        assert_eq!(logged, vec![0.25, 4.5, 1.0]);
    }

    #[test]
    fn clear_resets_samples_and_counter() {
        let mut ts = TrainingSet::new(4, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        ts.offer(obs(&[0.1]), 0.0, &mut rng);
        ts.clear();
        assert_eq!(ts.len(), 0);
        assert_eq!(ts.seen_count(), 0);
    }

    prop_compose! {
        fn arb_case()(len in 1usize..24)(
            x in proptest::collection::vec(0.0f32..=1.0, len),
            centroids in proptest::collection::vec(
                proptest::collection::vec(0.0f32..=1.0, len), 0..8),
            omega in 1usize..6,
            epsilon in 0.0f64..2.0,
        ) -> (Vec<f32>, Vec<Vec<f32>>, usize, f64) {
            (x, centroids, omega, epsilon)
        }
    }

    proptest! {
        #[test]
        fn encode_invariants((x, centroids, omega, epsilon) in arb_case()) {
            let len = x.len();
            let mut d = Dictionary::new(len).unwrap();
            for c in &centroids {
                d.push(Centroid::new(c.clone()).unwrap()).unwrap();
            }
            let config = cfg(0.005, epsilon, omega);
            let x = Observation::new(x, len, 1).unwrap();
            let (code, residual) = drsc_encode_with_residual(&x, &d, &config).unwrap();

            // binary, capped, deterministic
            prop_assert_eq!(code.len(), d.len());
            prop_assert!(code.bits().iter().all(|b| *b <= 1));
            prop_assert!(code.popcount() <= omega);
            let again = drsc_encode(&x, &d, &config).unwrap();
            prop_assert_eq!(&again, &code);

            // when neither cap bound the loop, the residual dropped below epsilon
            if code.popcount() < omega && code.popcount() < d.len() {
                prop_assert!(residual <= epsilon);
            }
        }

        #[test]
        fn training_never_mutates_existing_centroids(
            (x, centroids, omega, _eps) in arb_case()
        ) {
            let len = x.len();
            let mut d = Dictionary::new(len).unwrap();
            for c in &centroids {
                d.push(Centroid::new(c.clone()).unwrap()).unwrap();
            }
            let before = d.clone();
            let config = cfg(0.01, 0.05, omega);
            let x = Observation::new(x, len, 1).unwrap();
            idvq_train_step(&x, &mut d, &config).unwrap();

            prop_assert!(d.len() >= before.len());
            for (old, new) in before.centroids().iter().zip(d.centroids()) {
                prop_assert_eq!(old, new);
            }
            // clipped residuals keep centroids non-negative
            for c in d.centroids() {
                prop_assert!(c.values().iter().all(|v| *v >= 0.0));
            }
        }
    }
}
