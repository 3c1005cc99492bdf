//! Run configuration: flat `key = value` text files and the canonical hash
//! used to pair checkpoints with the config that produced them.

use crate::compressor::CompressorConfig;
use crate::controller::Activation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub generations: u32,
    pub evals_per_individual: u32,
    pub max_interactions: usize,
    pub frameskip: usize,
    pub pop_scale: f64,
    pub lr_scale: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub omega: usize,
    pub train_set_capacity: usize,
    pub prioritized_sampling: bool,
    pub max_centroids: usize,
    pub environment: String,
    pub env_seed: u64,
    pub grid_size: usize,
    pub cell_px: usize,
    pub obs_width: usize,
    pub obs_height: usize,
    pub seed: u64,
    pub init_sigma: f64,
    pub eps_var: f64,
    pub activation: String,
    pub rehyper_on_expand: bool,
    pub checkpoint_every: u32,
    /// Record real wall-clock seconds in the metrics; disable for runs that
    /// must produce byte-identical metrics files.
    pub log_wall_time: bool,
    /// Dump every preprocessed observation as a numbered graymap; empty = off.
    pub frame_dump_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            generations: 100,
            evals_per_individual: 5,
            max_interactions: 200,
            frameskip: 5,
            pop_scale: 1.5,
            lr_scale: 0.5,
            delta: 0.005,
            epsilon: 1.0,
            omega: 10,
            train_set_capacity: 64,
            prioritized_sampling: false,
            max_centroids: 0,
            environment: "dot_chaser".into(),
            env_seed: 0,
            grid_size: 9,
            cell_px: 5,
            obs_width: 9,
            obs_height: 9,
            seed: 42,
            init_sigma: 1.0,
            eps_var: 1e-4,
            activation: "tanh".into(),
            rehyper_on_expand: true,
            checkpoint_every: 10,
            log_wall_time: true,
            frame_dump_dir: String::new(),
        }
    }
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment, unknown keys error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (line_no, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("line {}: expected key = value", line_no + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Format(format!("line {}: {e}", line_no + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Format(format!("bad value '{value}' for {key}")))
        }
        fn flag(key: &str, value: &str) -> Result<bool> {
            match value {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                _ => Err(Error::Format(format!("bad boolean '{value}' for {key}"))),
            }
        }
        match key {
            "generations" => self.generations = num(key, value)?,
            "evals_per_individual" => self.evals_per_individual = num(key, value)?,
            "max_interactions" => self.max_interactions = num(key, value)?,
            "frameskip" => self.frameskip = num(key, value)?,
            "pop_scale" => self.pop_scale = num(key, value)?,
            "lr_scale" => self.lr_scale = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "omega" => self.omega = num(key, value)?,
            "train_set_capacity" => self.train_set_capacity = num(key, value)?,
            "prioritized_sampling" => self.prioritized_sampling = flag(key, value)?,
            "max_centroids" => self.max_centroids = num(key, value)?,
            "environment" => self.environment = value.to_string(),
            "env_seed" => self.env_seed = num(key, value)?,
            "grid_size" => self.grid_size = num(key, value)?,
            "cell_px" => self.cell_px = num(key, value)?,
            "obs_width" => self.obs_width = num(key, value)?,
            "obs_height" => self.obs_height = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "init_sigma" => self.init_sigma = num(key, value)?,
            "eps_var" => self.eps_var = num(key, value)?,
            "activation" => self.activation = value.to_string(),
            "rehyper_on_expand" => self.rehyper_on_expand = flag(key, value)?,
            "checkpoint_every" => self.checkpoint_every = num(key, value)?,
            "log_wall_time" => self.log_wall_time = flag(key, value)?,
            "frame_dump_dir" => self.frame_dump_dir = value.to_string(),
            other => return Err(Error::Format(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.evals_per_individual == 0 {
            return Err(Error::InvalidArgument(
                "evals_per_individual must be >= 1".into(),
            ));
        }
        if self.max_interactions == 0 || self.frameskip == 0 {
            return Err(Error::InvalidArgument(
                "max_interactions and frameskip must be >= 1".into(),
            ));
        }
        for (name, value) in [
            ("pop_scale", self.pop_scale),
            ("lr_scale", self.lr_scale),
            ("init_sigma", self.init_sigma),
            ("eps_var", self.eps_var),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
        }
        self.compressor_config().validate()?;
        Activation::parse(&self.activation)?;
        Ok(())
    }

    pub fn compressor_config(&self) -> CompressorConfig {
        CompressorConfig {
            delta: self.delta,
            epsilon: self.epsilon,
            omega: self.omega,
            train_set_capacity: self.train_set_capacity,
            prioritized_sampling: self.prioritized_sampling,
            max_centroids: self.max_centroids,
        }
    }

    pub fn activation(&self) -> Activation {
        Activation::parse(&self.activation).expect("validated at parse time")
    }

    /// Seed for the environment layout; falls back to the run seed.
    pub fn effective_env_seed(&self) -> u64 {
        if self.env_seed != 0 {
            self.env_seed
        } else {
            self.seed
        }
    }

    /// Canonical text form: every semantic key, fixed order. Observability
    /// knobs (timing, frame dumps) are excluded so toggling them does not
    /// orphan existing checkpoints.
    pub fn canonical_string(&self) -> String {
        format!(
            "generations={}\nevals_per_individual={}\nmax_interactions={}\nframeskip={}\n\
             pop_scale={}\nlr_scale={}\ndelta={}\nepsilon={}\nomega={}\ntrain_set_capacity={}\n\
             prioritized_sampling={}\nmax_centroids={}\nenvironment={}\nenv_seed={}\n\
             grid_size={}\ncell_px={}\nobs_width={}\nobs_height={}\nseed={}\ninit_sigma={}\n\
             eps_var={}\nactivation={}\nrehyper_on_expand={}\n",
            self.generations,
            self.evals_per_individual,
            self.max_interactions,
            self.frameskip,
            self.pop_scale,
            self.lr_scale,
            self.delta,
            self.epsilon,
            self.omega,
            self.train_set_capacity,
            self.prioritized_sampling,
            self.max_centroids,
            self.environment,
            self.env_seed,
            self.grid_size,
            self.cell_px,
            self.obs_width,
            self.obs_height,
            self.seed,
            self.init_sigma,
            self.eps_var,
            self.activation,
            self.rehyper_on_expand,
        )
    }

    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical_string().as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
