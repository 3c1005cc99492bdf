//! Episodic pixel environments.
//!
//! Any provider of `(reset, raw_step, action_count)` plugs in through the
//! [`PixelEnv`] trait; [`PreprocessedEnv`] wraps it with the grayscale
//! block-average downsampling and frameskip stepping the harness expects.
//! Two deterministic synthetic games ship built in for desk-scale runs.

mod avoider;
mod dot_chaser;

pub use avoider::Avoider;
pub use dot_chaser::DotChaser;

use crate::compressor::Observation;
use crate::error::{Error, Result};

/// Raw RGB frame, height×width×3, row-major, channel-interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFrame {
    rgb: Vec<u8>,
    width: usize,
    height: usize,
}

impl RawFrame {
    pub fn new(rgb: Vec<u8>, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(
                "frame dimensions must be positive".into(),
            ));
        }
        if rgb.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                context: "frame rgb buffer",
                expected: width * height * 3,
                got: rgb.len(),
            });
        }
        Ok(Self { rgb, width, height })
    }

    pub fn rgb(&self) -> &[u8] {
        &self.rgb
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Outcome of one raw (single-frame) environment transition.
#[derive(Debug, Clone)]
pub struct RawStep {
    pub frame: RawFrame,
    pub reward: f64,
    pub terminal: bool,
}

/// Outcome of one agent interaction (frameskip applied, frame preprocessed).
#[derive(Debug, Clone)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub terminal: bool,
}

/// Static properties of a wrapped environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvSpec {
    pub action_count: usize,
    pub obs_width: usize,
    pub obs_height: usize,
    pub max_interactions: usize,
}

/// Minimal provider protocol: anything that can reset, step one frame and
/// report its action count can drive the harness.
pub trait PixelEnv {
    fn action_count(&self) -> usize;
    fn frame_width(&self) -> usize;
    fn frame_height(&self) -> usize;
    fn reset(&mut self) -> RawFrame;
    fn raw_step(&mut self, action: usize) -> RawStep;

    /// Index of the do-nothing action used to pad frameskip.
    fn noop_action(&self) -> usize {
        0
    }

    /// Reseed the provider if it supports it; returns whether it did.
    fn reseed(&mut self, _seed: u64) -> bool {
        false
    }
}

/// Grayscale + block-average downsampling to `target_w`×`target_h`.
///
/// Each output cell averages the channel means of a block of source pixels;
/// block edges follow `floor(k·src/target)`, so blocks tile the source
/// exactly, are at most `ceil(src/target)` wide, and shrink at the seams when
/// the target does not divide the source.
pub fn preprocess(frame: &RawFrame, target_w: usize, target_h: usize) -> Result<Observation> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::InvalidArgument(
            "target dimensions must be positive".into(),
        ));
    }
    if target_w > frame.width || target_h > frame.height {
        return Err(Error::InvalidArgument(format!(
            "target {target_w}x{target_h} exceeds source {}x{}",
            frame.width, frame.height
        )));
    }
    let mut pixels = Vec::with_capacity(target_w * target_h);
    for by in 0..target_h {
        let y0 = by * frame.height / target_h;
        let y1 = (by + 1) * frame.height / target_h;
        for bx in 0..target_w {
            let x0 = bx * frame.width / target_w;
            let x1 = (bx + 1) * frame.width / target_w;
            let mut acc = 0.0f64;
            for y in y0..y1 {
                for x in x0..x1 {
                    let base = (y * frame.width + x) * 3;
                    let sum = u32::from(frame.rgb[base])
                        + u32::from(frame.rgb[base + 1])
                        + u32::from(frame.rgb[base + 2]);
                    acc += f64::from(sum) / 3.0;
                }
            }
            let count = ((y1 - y0) * (x1 - x0)) as f64;
            pixels.push((acc / count / 255.0) as f32);
        }
    }
    Observation::new(pixels, target_w, target_h)
}

/// A provider wrapped with preprocessing, frameskip and the interaction cap.
pub struct PreprocessedEnv {
    provider: Box<dyn PixelEnv>,
    spec: EnvSpec,
}

impl PreprocessedEnv {
    /// Validates the provider against the requested observation size at
    /// construction; undersized frames are rejected here rather than later.
    pub fn new(
        provider: Box<dyn PixelEnv>,
        obs_width: usize,
        obs_height: usize,
        max_interactions: usize,
    ) -> Result<Self> {
        if provider.action_count() == 0 {
            return Err(Error::AdapterProtocol(
                "provider reports zero actions".into(),
            ));
        }
        if max_interactions == 0 {
            return Err(Error::InvalidArgument(
                "max_interactions must be positive".into(),
            ));
        }
        if obs_width > provider.frame_width() || obs_height > provider.frame_height() {
            return Err(Error::AdapterProtocol(format!(
                "observation {obs_width}x{obs_height} exceeds provider frame {}x{}",
                provider.frame_width(),
                provider.frame_height()
            )));
        }
        let spec = EnvSpec {
            action_count: provider.action_count(),
            obs_width,
            obs_height,
            max_interactions,
        };
        Ok(Self { provider, spec })
    }

    pub fn spec(&self) -> EnvSpec {
        self.spec
    }

    pub fn reseed(&mut self, seed: u64) -> bool {
        self.provider.reseed(seed)
    }

    pub fn reset(&mut self) -> Result<Observation> {
        let frame = self.provider.reset();
        self.check_frame(&frame)?;
        preprocess(&frame, self.spec.obs_width, self.spec.obs_height)
    }

    /// One interaction: the chosen action once, then NOOP for the remaining
    /// `frameskip - 1` frames, rewards summed. Terminal cuts the skip short.
    pub fn step(&mut self, action: usize, frameskip: usize) -> Result<StepResult> {
        if action >= self.spec.action_count {
            return Err(Error::InvalidArgument(format!(
                "action {action} out of range 0..{}",
                self.spec.action_count
            )));
        }
        if frameskip == 0 {
            return Err(Error::InvalidArgument("frameskip must be >= 1".into()));
        }
        let mut total_reward = 0.0;
        let mut step = self.provider.raw_step(action);
        total_reward += step.reward;
        let noop = self.provider.noop_action();
        for _ in 1..frameskip {
            if step.terminal {
                break;
            }
            step = self.provider.raw_step(noop);
            total_reward += step.reward;
        }
        self.check_frame(&step.frame)?;
        Ok(StepResult {
            observation: preprocess(&step.frame, self.spec.obs_width, self.spec.obs_height)?,
            reward: total_reward,
            terminal: step.terminal,
        })
    }

    fn check_frame(&self, frame: &RawFrame) -> Result<()> {
        if frame.width() != self.provider.frame_width()
            || frame.height() != self.provider.frame_height()
        {
            return Err(Error::AdapterProtocol(format!(
                "provider emitted a {}x{} frame, reported {}x{}",
                frame.width(),
                frame.height(),
                self.provider.frame_width(),
                self.provider.frame_height()
            )));
        }
        Ok(())
    }
}

/// Build a built-in synthetic game by name.
pub fn make_builtin(
    name: &str,
    grid: usize,
    cell_px: usize,
    seed: u64,
) -> Result<Box<dyn PixelEnv>> {
    match name {
        "dot_chaser" => Ok(Box::new(DotChaser::new(grid, cell_px, seed)?)),
        "avoider" => Ok(Box::new(Avoider::new(grid, cell_px, seed)?)),
        other => Err(Error::InvalidArgument(format!(
            "unknown environment '{other}' (expected dot_chaser|avoider)"
        ))),
    }
}

/// Conformance suite for external adapters: stable dimensions, in-range
/// rewards, and trace reproducibility when the provider supports reseeding.
pub fn check_adapter_contract(provider: &mut dyn PixelEnv) -> Result<()> {
    if provider.action_count() == 0 {
        return Err(Error::AdapterProtocol(
            "provider reports zero actions".into(),
        ));
    }
    if provider.noop_action() >= provider.action_count() {
        return Err(Error::AdapterProtocol(
            "noop action outside the action range".into(),
        ));
    }
    let (w, h) = (provider.frame_width(), provider.frame_height());
    if w == 0 || h == 0 {
        return Err(Error::AdapterProtocol("provider frame is empty".into()));
    }

    let frame = provider.reset();
    if frame.width() != w || frame.height() != h {
        return Err(Error::AdapterProtocol(format!(
            "reset frame {}x{} does not match reported {w}x{h}",
            frame.width(),
            frame.height()
        )));
    }
    for step_index in 0..8 {
        let action = step_index % provider.action_count();
        let step = provider.raw_step(action);
        if step.frame.width() != w || step.frame.height() != h {
            return Err(Error::AdapterProtocol(
                "frame size changed mid-episode".into(),
            ));
        }
        if !step.reward.is_finite() {
            return Err(Error::AdapterProtocol("non-finite reward".into()));
        }
        if step.terminal {
            provider.reset();
        }
    }

    if provider.reseed(12345) {
        let trace = |provider: &mut dyn PixelEnv| -> Vec<(Vec<u8>, u64, bool)> {
            provider.reseed(12345);
            let mut out = vec![(provider.reset().rgb().to_vec(), 0, false)];
            for i in 0..6 {
                let step = provider.raw_step(i % provider.action_count());
                out.push((
                    step.frame.rgb().to_vec(),
                    step.reward.to_bits(),
                    step.terminal,
                ));
                if step.terminal {
                    break;
                }
            }
            out
        };
        let first = trace(provider);
        let second = trace(provider);
        if first != second {
            return Err(Error::AdapterProtocol(
                "reseeded traces differ; provider is not deterministic".into(),
            ));
        }
    }
    Ok(())
}
