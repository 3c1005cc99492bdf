//! Grid dodging game: falling blocks sweep the board, the agent earns one
//! reward per frame survived and the episode ends on collision.
//!
//! Block columns and phases derive from the seed; blocks fall one row per
//! frame and re-enter at the top a fixed stride to the right, so the whole
//! trajectory is deterministic.

use super::dot_chaser::splitmix64;
use super::{PixelEnv, RawFrame, RawStep};
use crate::error::{Error, Result};

const AGENT_SHADE: u8 = 255;
const BLOCK_SHADE: u8 = 160;

pub struct Avoider {
    grid: usize,
    cell_px: usize,
    seed: u64,
    agent: (usize, usize),
    blocks: Vec<(usize, usize)>,
    crashed: bool,
}

impl Avoider {
    pub fn new(grid: usize, cell_px: usize, seed: u64) -> Result<Self> {
        if grid < 4 {
            return Err(Error::InvalidArgument("grid must be at least 4".into()));
        }
        if cell_px == 0 {
            return Err(Error::InvalidArgument("cell_px must be positive".into()));
        }
        let mut env = Self {
            grid,
            cell_px,
            seed,
            agent: (0, 0),
            blocks: Vec::new(),
            crashed: false,
        };
        env.restore_initial_layout();
        Ok(env)
    }

    fn restore_initial_layout(&mut self) {
        self.agent = (self.grid / 2, self.grid - 1);
        let count = (self.grid / 3).max(2);
        self.blocks.clear();
        let mut state = self.seed;
        for _ in 0..count {
            state = splitmix64(state);
            let col = (state % self.grid as u64) as usize;
            state = splitmix64(state);
            let row = (state % (self.grid as u64 / 2)) as usize;
            self.blocks.push((col, row));
        }
        self.crashed = false;
    }

    fn collided(&self) -> bool {
        self.blocks.contains(&self.agent)
    }

    fn render(&self) -> RawFrame {
        let px = self.grid * self.cell_px;
        let mut rgb = vec![0u8; px * px * 3];
        for block in &self.blocks {
            fill_cell(&mut rgb, px, self.cell_px, *block, BLOCK_SHADE);
        }
        fill_cell(&mut rgb, px, self.cell_px, self.agent, AGENT_SHADE);
        RawFrame::new(rgb, px, px).expect("render buffer sized to the frame")
    }
}

fn fill_cell(rgb: &mut [u8], frame_px: usize, cell_px: usize, cell: (usize, usize), shade: u8) {
    let (cx, cy) = cell;
    for y in cy * cell_px..(cy + 1) * cell_px {
        for x in cx * cell_px..(cx + 1) * cell_px {
            let base = (y * frame_px + x) * 3;
            rgb[base] = shade;
            rgb[base + 1] = shade;
            rgb[base + 2] = shade;
        }
    }
}

impl PixelEnv for Avoider {
    fn action_count(&self) -> usize {
        5
    }

    fn frame_width(&self) -> usize {
        self.grid * self.cell_px
    }

    fn frame_height(&self) -> usize {
        self.grid * self.cell_px
    }

    fn reset(&mut self) -> RawFrame {
        self.restore_initial_layout();
        self.render()
    }

    fn raw_step(&mut self, action: usize) -> RawStep {
        if self.crashed {
            return RawStep {
                frame: self.render(),
                reward: 0.0,
                terminal: true,
            };
        }
        let (x, y) = self.agent;
        self.agent = match action {
            1 => (x, y.saturating_sub(1)),
            2 => (x, (y + 1).min(self.grid - 1)),
            3 => (x.saturating_sub(1), y),
            4 => ((x + 1).min(self.grid - 1), y),
            _ => (x, y),
        };
        for block in &mut self.blocks {
            block.1 += 1;
            if block.1 >= self.grid {
                block.1 = 0;
                block.0 = (block.0 + 3) % self.grid;
            }
        }
        self.crashed = self.collided();
        RawStep {
            frame: self.render(),
            reward: if self.crashed { 0.0 } else { 1.0 },
            terminal: self.crashed,
        }
    }

    fn reseed(&mut self, seed: u64) -> bool {
        self.seed = seed;
        self.restore_initial_layout();
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_earns_one_reward_per_frame() {
        let mut env = Avoider::new(9, 2, 3).unwrap();
        env.reset();
        let step = env.raw_step(0);
        if !step.terminal {
            assert_eq!(step.reward, 1.0);
        }
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let run = |seed: u64| {
            let mut env = Avoider::new(8, 2, seed).unwrap();
            let mut trace = vec![env.reset().rgb().to_vec()];
            for i in 0..24 {
                let step = env.raw_step(i % 5);
                trace.push(step.frame.rgb().to_vec());
                if step.terminal {
                    break;
                }
            }
            trace
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn collision_terminates_the_episode() {
        let mut env = Avoider::new(8, 2, 1).unwrap();
        env.reset();
        // sit still long enough and a wrapping block eventually lands on the
        // agent column's bottom row; cap the wait to keep the test bounded
        let mut terminated = false;
        for _ in 0..400 {
            let step = env.raw_step(0);
            if step.terminal {
                terminated = true;
                assert_eq!(step.reward, 0.0);
                break;
            }
        }
        assert!(
            terminated,
            "no collision within 400 frames of standing still"
        );
    }
}
