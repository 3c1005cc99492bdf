use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vqnes::bench;
use vqnes::checkpoint::load_dictionary;
use vqnes::compressor::drsc_encode;
use vqnes::config::RunConfig;
use vqnes::harness;
use vqnes::imageio::load_image;

#[derive(Parser)]
#[command(
    name = "vqnes",
    version,
    about = "Growing-dictionary sparse codes driving tiny evolved recurrent policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the training loop described by a config file.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's rng seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for metrics and checkpoints.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Continue from an existing checkpoint instead of starting fresh.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Replay the best genome stored in a checkpoint.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        episodes: u32,
    },
    /// Encode an image against a dictionary and print the binary code.
    Encode {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        image: PathBuf,
        /// Residual threshold that stops encoding.
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Maximum number of ones in the code.
        #[arg(long, default_value_t = 10)]
        omega: usize,
    },
    /// Run a micro-benchmark suite.
    Bench {
        #[arg(long, value_enum)]
        suite: BenchSuite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchSuite {
    Xnes,
    Drsc,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> vqnes::Result<()> {
    match cli.command {
        Command::Train {
            config,
            seed,
            out,
            resume,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = RunConfig::parse(&text)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let output = match resume {
                Some(checkpoint) => harness::resume(&cfg, &checkpoint, &out)?,
                None => harness::train(&cfg, &out)?,
            };
            for record in &output.records {
                println!(
                    "gen {:>4}  best {:>10.3}  mean {:>10.3}  dict {:>4}  params {:>5}  lambda {:>3}  {:.2}s",
                    record.generation,
                    record.best,
                    record.mean,
                    record.dict_size,
                    record.params,
                    record.lambda,
                    record.seconds
                );
            }
            println!("metrics:    {}", output.metrics_path.display());
            println!("checkpoint: {}", output.checkpoint_path.display());
        }
        Command::Eval {
            checkpoint,
            episodes,
        } => {
            let report = harness::eval_checkpoint(&checkpoint, episodes)?;
            for (i, score) in report.episode_scores.iter().enumerate() {
                println!("episode {:>3}: {score:.3}", i + 1);
            }
            println!("mean: {:.3}", report.mean);
        }
        Command::Encode {
            dict,
            image,
            epsilon,
            omega,
        } => {
            let dictionary = load_dictionary(&dict)?;
            let observation = load_image(&image)?;
            let cfg = vqnes::compressor::CompressorConfig {
                epsilon,
                omega,
                ..Default::default()
            };
            let code = drsc_encode(&observation, &dictionary, &cfg)?;
            println!("{}", code.to_bit_string());
        }
        Command::Bench { suite } => match suite {
            BenchSuite::Drsc => {
                let sizes = [25usize, 50, 100, 200];
                let points = bench::measure_encode_scaling(&sizes, 5600, 5, 31, 1)?;
                println!("dict_size median_us");
                for p in &points {
                    println!("{:>9} {:>9.1}", p.dict_size, p.median_nanos / 1000.0);
                }
                println!("linear fit r2: {:.4}", bench::encode_scaling_r2(&points));
            }
            BenchSuite::Xnes => {
                let started = std::time::Instant::now();
                match bench::sphere_convergence_generations(10, 1e-6, 5000, 42)? {
                    Some(generations) => println!(
                        "10-d sphere above -1e-6 after {generations} generations ({:.2}s)",
                        started.elapsed().as_secs_f64()
                    ),
                    None => println!("did not converge within 5000 generations"),
                }
            }
        },
    }
    Ok(())
}
