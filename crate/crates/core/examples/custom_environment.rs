//! Plug an external game into the harness through the provider trait.
//!
//! Implements a minimal blinking-light environment (press the matching button
//! while the light is on), checks it against the adapter contract, wraps it
//! with preprocessing, and scores a hand-written policy against random play.
//!
//! Run with: `cargo run -p vqnes --example custom_environment`

use vqnes::env::{check_adapter_contract, PixelEnv, PreprocessedEnv, RawFrame, RawStep};

/// Light on the left or right half; acting on the lit side pays one point.
struct BlinkEnv {
    seed: u64,
    t: u64,
}

impl BlinkEnv {
    fn new(seed: u64) -> Self {
        Self { seed, t: 0 }
    }

    fn lit_right(&self) -> bool {
        // deterministic pseudo-random blink pattern
        (self
            .seed
            .wrapping_add(self.t)
            .wrapping_mul(0x9e3779b97f4a7c15)
            >> 63)
            == 1
    }

    fn render(&self) -> RawFrame {
        let (w, h) = (8usize, 4usize);
        let mut rgb = vec![0u8; w * h * 3];
        let x0 = if self.lit_right() { w / 2 } else { 0 };
        for y in 0..h {
            for x in x0..x0 + w / 2 {
                let base = (y * w + x) * 3;
                rgb[base] = 250;
                rgb[base + 1] = 250;
                rgb[base + 2] = 250;
            }
        }
        RawFrame::new(rgb, w, h).unwrap()
    }
}

impl PixelEnv for BlinkEnv {
    fn action_count(&self) -> usize {
        3 // noop, press-left, press-right
    }
    fn frame_width(&self) -> usize {
        8
    }
    fn frame_height(&self) -> usize {
        4
    }
    fn reset(&mut self) -> RawFrame {
        self.t = 0;
        self.render()
    }
    fn raw_step(&mut self, action: usize) -> RawStep {
        let correct = if self.lit_right() { 2 } else { 1 };
        let reward = if action == correct { 1.0 } else { 0.0 };
        self.t += 1;
        RawStep {
            frame: self.render(),
            reward,
            terminal: self.t >= 64,
        }
    }
    fn reseed(&mut self, seed: u64) -> bool {
        self.seed = seed;
        self.t = 0;
        true
    }
}

fn main() -> vqnes::Result<()> {
    let mut provider = BlinkEnv::new(5);
    check_adapter_contract(&mut provider)?;
    println!("adapter contract: ok ({} actions)", provider.action_count());

    let mut env = PreprocessedEnv::new(Box::new(provider), 2, 1, 64)?;
    println!(
        "observation: {}x{}",
        env.spec().obs_width,
        env.spec().obs_height
    );

    // the 2-pixel observation tells the policy which side is lit
    let mut obs = env.reset()?;
    let mut smart = 0.0;
    loop {
        let action = if obs.pixels()[1] > obs.pixels()[0] {
            2
        } else {
            1
        };
        let step = env.step(action, 1)?;
        smart += step.reward;
        if step.terminal {
            break;
        }
        obs = step.observation;
    }

    env.reset()?;
    let mut random = 0.0;
    let mut state = 11u64;
    loop {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let step = env.step((state >> 33) as usize % 3, 1)?;
        random += step.reward;
        if step.terminal {
            break;
        }
    }

    println!("sighted policy scored {smart}, random play scored {random}");
    Ok(())
}
