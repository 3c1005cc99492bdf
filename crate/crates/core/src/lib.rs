//! Decoupled pixel-control learning: an online-growing vector-quantization
//! dictionary feeds a binary sparse encoder whose codes drive a tiny
//! recurrent policy network, evolved by an exponential natural evolution
//! strategy that grows its search-distribution dimensionality together with
//! the dictionary.
//!
//! The pipeline has four parts, each usable on its own:
//!
//! - [`compressor`] — the growing dictionary (`idvq_train*`), the greedy
//!   binary encoder (`drsc_encode`), and the per-generation training-set
//!   reservoir.
//! - [`controller`] — a single-layer recurrent network whose input size can
//!   grow without changing its behavior on old inputs.
//! - [`optimizer`] — ask/tell XNES over a Gaussian `(μ, A)` with `Σ = AᵀA`,
//!   plus mid-run dimension insertion aligned to the controller's genotype
//!   layout.
//! - [`env`](mod@env) + [`harness`] — episodic pixel environments (two
//!   built-in deterministic games, a provider trait for external ones) and
//!   the generation loop wiring everything together with metrics, config and
//!   checkpointing.
//!
//! Start from the runnable examples, one per capability:
//!
//! ```text
//! cargo run --release -p vqnes --example xnes_sphere         # ask/tell optimization
//! cargo run --release -p vqnes --example grow_dimensions     # mid-run dimension insertion
//! cargo run -p vqnes --example dictionary_growth             # online dictionary training
//! cargo run -p vqnes --example encode_image                  # dictionary files + image encoding
//! cargo run --release -p vqnes --example train_dot_chaser    # end-to-end training
//! cargo run --release -p vqnes --example checkpoint_resume   # save/resume determinism
//! cargo run -p vqnes --example custom_environment            # plugging in your own game
//! ```
//!
//! The `vqnes` binary exposes the same flows as `train`, `eval`, `encode` and
//! `bench` subcommands.

pub mod bench;
pub mod checkpoint;
pub mod compressor;
pub mod config;
pub mod controller;
pub mod env;
pub mod error;
pub mod harness;
pub mod imageio;
pub mod metrics;
pub mod optimizer;

pub use compressor::{CompressorConfig, Dictionary, Observation, SparseCode};
pub use config::RunConfig;
pub use controller::{Controller, ControllerShape, GenotypeLayout};
pub use error::{Error, Result};
pub use optimizer::{SearchDistribution, Xnes};
