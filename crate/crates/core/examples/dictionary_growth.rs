//! Watch the dictionary grow as novel observations stream in.
//!
//! Feeds sprite images (a bright square at varying positions over a dim
//! background) through the online trainer and prints how each image encodes
//! before and after training touches it.
//!
//! Run with: `cargo run -p vqnes --example dictionary_growth`

use vqnes::compressor::{
    drsc_encode_with_residual, idvq_train_step, CompressorConfig, Dictionary, Observation,
};

const SIDE: usize = 8;

fn sprite_image(x: usize, y: usize) -> Observation {
    let mut pixels = vec![0.1f32; SIDE * SIDE];
    for dy in 0..2 {
        for dx in 0..2 {
            pixels[(y + dy) * SIDE + (x + dx)] = 0.9;
        }
    }
    Observation::new(pixels, SIDE, SIDE).unwrap()
}

fn main() -> vqnes::Result<()> {
    let cfg = CompressorConfig {
        delta: 0.1,
        epsilon: 0.1,
        omega: 4,
        ..Default::default()
    };
    let mut dictionary = Dictionary::new(SIDE * SIDE)?;

    let stream = [
        (0, 0),
        (4, 0),
        (0, 0), // repeat: already covered, no growth
        (0, 4),
        (4, 4),
        (4, 0), // repeat
        (2, 2),
    ];
    for (step, (x, y)) in stream.into_iter().enumerate() {
        let image = sprite_image(x, y);
        let (code_before, residual_before) = drsc_encode_with_residual(&image, &dictionary, &cfg)?;
        let grew = idvq_train_step(&image, &mut dictionary, &cfg)?;
        let (code_after, residual_after) = drsc_encode_with_residual(&image, &dictionary, &cfg)?;
        println!(
            "step {step}: sprite at ({x},{y})  code {} (residual {residual_before:5.2}) -> {} (residual {residual_after:5.2})  dict {}{}",
            pad(&code_before.to_bit_string()),
            pad(&code_after.to_bit_string()),
            dictionary.len(),
            if grew { "  [+1 centroid]" } else { "" },
        );
    }
    Ok(())
}

fn pad(bits: &str) -> String {
    format!("{bits:<7}")
}
