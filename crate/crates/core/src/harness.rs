//! Training orchestration.
//!
//! Per generation: draw genomes, evaluate each one episodically (encoding
//! every observation against the frozen dictionary and offering it to the
//! training-set collector), update the search distribution, then train the
//! dictionary on the collected set. If the dictionary grew, the controller
//! input size and the distribution dimensionality grow in lockstep through
//! the shared genotype layout. Generations are atomic: a failure leaves the
//! previous state untouched.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checkpoint::{RngSnapshot, RunCheckpoint};
use crate::compressor::{
    drsc_encode_with_residual, idvq_train, CompressorConfig, Dictionary, Observation, TrainingSet,
};
use crate::config::RunConfig;
use crate::controller::{Controller, ControllerShape, GenotypeLayout};
use crate::env::{make_builtin, PreprocessedEnv};
use crate::error::{Error, Result};
use crate::imageio::write_pgm;
use crate::metrics::{GenerationRecord, MetricsWriter};
use crate::optimizer::{
    ask, default_hyper, expand_dims, rehyper_after_expand, tell, NesHyper, SearchDistribution,
};

/// Full mutable state of a run at a generation boundary.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub generation: u32,
    pub dictionary: Dictionary,
    pub distribution: SearchDistribution,
    pub hyper: NesHyper,
    pub shape: ControllerShape,
    pub rng: ChaCha8Rng,
}

impl TrainState {
    /// Distribution dimension must equal the weight count of a network whose
    /// input size is the dictionary size.
    pub fn check_consistency(&self) -> Result<()> {
        if self.shape.n_inputs != self.dictionary.len() {
            return Err(Error::InvalidArgument(format!(
                "state inconsistent: {} inputs vs {} centroids",
                self.shape.n_inputs,
                self.dictionary.len()
            )));
        }
        if self.distribution.dim() != self.shape.weight_count() {
            return Err(Error::InvalidArgument(format!(
                "state inconsistent: distribution dim {} vs weight count {}",
                self.distribution.dim(),
                self.shape.weight_count()
            )));
        }
        Ok(())
    }
}

/// Build the configured environment wrapped with preprocessing.
pub fn build_env(cfg: &RunConfig) -> Result<PreprocessedEnv> {
    let provider = make_builtin(
        &cfg.environment,
        cfg.grid_size,
        cfg.cell_px,
        cfg.effective_env_seed(),
    )?;
    PreprocessedEnv::new(
        provider,
        cfg.obs_width,
        cfg.obs_height,
        cfg.max_interactions,
    )
}

/// Fresh generation-zero state: empty dictionary, zero-input network over the
/// environment's action count, isotropic distribution over its weights.
pub fn init_state(cfg: &RunConfig, env: &PreprocessedEnv) -> Result<TrainState> {
    cfg.validate()?;
    let dictionary = Dictionary::new(cfg.obs_width * cfg.obs_height)?;
    let shape = ControllerShape::new(0, env.spec().action_count)?;
    let distribution = SearchDistribution::standard(shape.weight_count(), cfg.init_sigma)?;
    let hyper = default_hyper(distribution.dim(), cfg.pop_scale, cfg.lr_scale)?;
    Ok(TrainState {
        generation: 0,
        dictionary,
        distribution,
        hyper,
        shape,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    })
}

/// Rebuild a [`TrainState`] from a checkpoint. Hyperparameters are derived,
/// not stored: either from the current dimension or, when rehyper is off,
/// from the generation-zero dimension.
pub fn state_from_checkpoint(ckpt: &RunCheckpoint, cfg: &RunConfig) -> Result<TrainState> {
    let hyper = if cfg.rehyper_on_expand {
        default_hyper(ckpt.distribution.dim(), cfg.pop_scale, cfg.lr_scale)?
    } else {
        let initial = ControllerShape::new(0, ckpt.shape.n_neurons)?;
        default_hyper(initial.weight_count(), cfg.pop_scale, cfg.lr_scale)?
    };
    let state = TrainState {
        generation: ckpt.generation,
        dictionary: ckpt.dictionary.clone(),
        distribution: ckpt.distribution.clone(),
        hyper,
        shape: ckpt.shape,
        rng: ckpt.rng.restore(),
    };
    state.check_consistency()?;
    Ok(state)
}

pub fn make_checkpoint(state: &TrainState, cfg: &RunConfig) -> RunCheckpoint {
    RunCheckpoint {
        config_hash: cfg.hash(),
        generation: state.generation,
        shape: state.shape,
        rng: RngSnapshot::capture(&state.rng),
        config_text: cfg.canonical_string(),
        dictionary: state.dictionary.clone(),
        distribution: state.distribution.clone(),
    }
}

/// Writes preprocessed observations as numbered graymaps for debugging.
pub struct FrameDumper {
    dir: PathBuf,
    counter: u64,
}

impl FrameDumper {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            counter: 0,
        })
    }

    fn dump(&mut self, obs: &Observation) -> Result<()> {
        let path = self.dir.join(format!("frame_{:08}.pgm", self.counter));
        self.counter += 1;
        write_pgm(&path, obs)
    }
}

/// One episode: reset environment and controller state, then encode, act and
/// step until terminal or the interaction cap. Every encoded observation is
/// handed to `collect` along with its post-encoding residual.
fn run_episode(
    controller: &mut Controller,
    env: &mut PreprocessedEnv,
    dictionary: &Dictionary,
    ccfg: &CompressorConfig,
    frameskip: usize,
    max_interactions: usize,
    collect: &mut dyn FnMut(&Observation, f64) -> Result<()>,
) -> Result<f64> {
    controller.reset_state();
    let mut observation = env.reset()?;
    let mut total_reward = 0.0;
    for _ in 0..max_interactions {
        let (code, residual) = drsc_encode_with_residual(&observation, dictionary, ccfg)?;
        collect(&observation, residual)?;
        let action = controller.activate(&code.as_inputs())?;
        let step = env.step(action, frameskip)?;
        total_reward += step.reward;
        if step.terminal {
            break;
        }
        observation = step.observation;
    }
    Ok(total_reward)
}

/// Mean cumulative reward over `evals_per_individual` episodes for one genome,
/// offering every encoded observation to the training-set collector.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_individual(
    genome: &[f64],
    env: &mut PreprocessedEnv,
    dictionary: &Dictionary,
    shape: ControllerShape,
    cfg: &RunConfig,
    collector: &mut TrainingSet,
    rng: &mut ChaCha8Rng,
    dumper: &mut Option<FrameDumper>,
) -> Result<f64> {
    let ccfg = cfg.compressor_config();
    let mut controller = Controller::new(shape, genome.to_vec(), cfg.activation())?;
    let mut total = 0.0;
    for _ in 0..cfg.evals_per_individual {
        let mut collect = |obs: &Observation, residual: f64| -> Result<()> {
            collector.offer(obs.clone(), residual, rng);
            if let Some(dumper) = dumper.as_mut() {
                dumper.dump(obs)?;
            }
            Ok(())
        };
        total += run_episode(
            &mut controller,
            env,
            dictionary,
            &ccfg,
            cfg.frameskip,
            cfg.max_interactions,
            &mut collect,
        )?;
    }
    Ok(total / f64::from(cfg.evals_per_individual))
}

/// Score a genome without collecting training data.
pub fn evaluate_genome(
    genome: &[f64],
    env: &mut PreprocessedEnv,
    dictionary: &Dictionary,
    shape: ControllerShape,
    cfg: &RunConfig,
    episodes: u32,
) -> Result<Vec<f64>> {
    let ccfg = cfg.compressor_config();
    let mut controller = Controller::new(shape, genome.to_vec(), cfg.activation())?;
    let mut scores = Vec::with_capacity(episodes as usize);
    let mut no_collect = |_: &Observation, _: f64| -> Result<()> { Ok(()) };
    for _ in 0..episodes {
        scores.push(run_episode(
            &mut controller,
            env,
            dictionary,
            &ccfg,
            cfg.frameskip,
            cfg.max_interactions,
            &mut no_collect,
        )?);
    }
    Ok(scores)
}

/// Advance one generation. The input state is untouched; on error nothing is
/// committed.
pub fn run_generation(
    state: &TrainState,
    cfg: &RunConfig,
    env: &mut PreprocessedEnv,
    dumper: &mut Option<FrameDumper>,
) -> Result<(TrainState, GenerationRecord)> {
    state.check_consistency()?;
    let started = Instant::now();
    let mut rng = state.rng.clone();
    let ccfg = cfg.compressor_config();

    let batch = ask(&state.distribution, &state.hyper, &mut rng);
    let mut training_set = TrainingSet::new(ccfg.train_set_capacity, ccfg.prioritized_sampling)?;
    let mut fitnesses = Vec::with_capacity(state.hyper.lambda);
    for k in 0..state.hyper.lambda {
        let genome = batch.genome(k);
        fitnesses.push(evaluate_individual(
            &genome,
            env,
            &state.dictionary,
            state.shape,
            cfg,
            &mut training_set,
            &mut rng,
            dumper,
        )?);
    }

    let mut distribution = tell(&state.distribution, &state.hyper, &batch, &fitnesses)?;

    // dictionary training happens strictly between generations
    let mut dictionary = state.dictionary.clone();
    let grown = idvq_train(&training_set, &mut dictionary, &ccfg)?;

    let mut shape = state.shape;
    let mut hyper = state.hyper.clone();
    if grown > 0 {
        let new_inputs = shape.n_inputs + grown;
        let positions = GenotypeLayout::new(shape).insert_positions_for_input_growth(new_inputs)?;
        distribution = expand_dims(&distribution, &positions, cfg.eps_var)?;
        shape = ControllerShape::new(new_inputs, shape.n_neurons)?;
        if cfg.rehyper_on_expand {
            hyper = rehyper_after_expand(&distribution, cfg.pop_scale, cfg.lr_scale)?;
        }
    }

    let best = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = fitnesses.iter().sum::<f64>() / fitnesses.len() as f64;
    let record = GenerationRecord {
        generation: state.generation,
        best,
        mean,
        min,
        dict_size: dictionary.len(),
        params: distribution.dim(),
        lambda: state.hyper.lambda,
        seconds: if cfg.log_wall_time {
            started.elapsed().as_secs_f64()
        } else {
            0.0
        },
    };

    let next = TrainState {
        generation: state.generation + 1,
        dictionary,
        distribution,
        hyper,
        shape,
        rng,
    };
    next.check_consistency()?;
    Ok((next, record))
}

#[derive(Debug)]
pub struct TrainOutput {
    pub records: Vec<GenerationRecord>,
    pub state: TrainState,
    pub metrics_path: PathBuf,
    pub checkpoint_path: PathBuf,
    pub dictionary_path: PathBuf,
}

/// Run a fresh training loop, streaming metrics and checkpointing
/// periodically plus at the end.
pub fn train(cfg: &RunConfig, out_dir: &Path) -> Result<TrainOutput> {
    let env = &mut build_env(cfg)?;
    let state = init_state(cfg, env)?;
    train_loop(state, cfg, env, out_dir)
}

/// Continue from a checkpoint; the stored config hash must match.
pub fn resume(cfg: &RunConfig, checkpoint: &Path, out_dir: &Path) -> Result<TrainOutput> {
    let ckpt = RunCheckpoint::load(checkpoint)?;
    ckpt.verify_config(cfg.hash())?;
    let env = &mut build_env(cfg)?;
    let state = state_from_checkpoint(&ckpt, cfg)?;
    train_loop(state, cfg, env, out_dir)
}

fn train_loop(
    mut state: TrainState,
    cfg: &RunConfig,
    env: &mut PreprocessedEnv,
    out_dir: &Path,
) -> Result<TrainOutput> {
    fs::create_dir_all(out_dir)?;
    let metrics_path = out_dir.join("metrics.csv");
    let checkpoint_path = out_dir.join("run.ckpt");
    let mut metrics = MetricsWriter::create(&metrics_path)?;
    let mut dumper = if cfg.frame_dump_dir.is_empty() {
        None
    } else {
        Some(FrameDumper::create(Path::new(&cfg.frame_dump_dir))?)
    };

    let mut records = Vec::new();
    while state.generation < cfg.generations {
        let (next, record) = run_generation(&state, cfg, env, &mut dumper)?;
        state = next;
        metrics.append(&record)?;
        records.push(record);
        if cfg.checkpoint_every > 0 && state.generation.is_multiple_of(cfg.checkpoint_every) {
            make_checkpoint(&state, cfg).save(&checkpoint_path)?;
        }
    }
    make_checkpoint(&state, cfg).save(&checkpoint_path)?;
    let dictionary_path = out_dir.join("dictionary.dict");
    crate::checkpoint::save_dictionary(&dictionary_path, &state.dictionary)?;
    Ok(TrainOutput {
        records,
        state,
        metrics_path,
        checkpoint_path,
        dictionary_path,
    })
}

#[derive(Debug, Clone)]
pub struct ScoreReport {
    pub episode_scores: Vec<f64>,
    pub mean: f64,
}

/// Replay the stored best genome (the distribution mean) from a checkpoint.
pub fn eval_checkpoint(checkpoint: &Path, episodes: u32) -> Result<ScoreReport> {
    if episodes == 0 {
        return Err(Error::InvalidArgument("episodes must be >= 1".into()));
    }
    let ckpt = RunCheckpoint::load(checkpoint)?;
    let cfg = RunConfig::parse(&ckpt.config_text)?;
    let env = &mut build_env(&cfg)?;
    let genome: Vec<f64> = ckpt.distribution.mu().iter().copied().collect();
    let episode_scores =
        evaluate_genome(&genome, env, &ckpt.dictionary, ckpt.shape, &cfg, episodes)?;
    let mean = episode_scores.iter().sum::<f64>() / episode_scores.len() as f64;
    Ok(ScoreReport {
        episode_scores,
        mean,
    })
}

/// Deterministic uniform-random-action baseline on the configured
/// environment: mean cumulative reward over `episodes` episodes.
pub fn random_policy_baseline(cfg: &RunConfig, episodes: u32, seed: u64) -> Result<f64> {
    use rand::Rng;
    let env = &mut build_env(cfg)?;
    let actions = env.spec().action_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..episodes {
        env.reset()?;
        for _ in 0..cfg.max_interactions {
            let action = rng.random_range(0..actions);
            let step = env.step(action, cfg.frameskip)?;
            total += step.reward;
            if step.terminal {
                break;
            }
        }
    }
    Ok(total / f64::from(episodes))
}
