//! Build a dictionary, persist it, and encode an image file with it.
//!
//! With no arguments the example trains a small dictionary on generated
//! sprites, writes it plus a sample graymap to a temp directory, and encodes
//! the graymap. Pass `<dict> <image>` to encode your own files instead.
//!
//! Run with: `cargo run -p vqnes --example encode_image [dict image]`

use std::path::PathBuf;

use vqnes::checkpoint::{load_dictionary, save_dictionary};
use vqnes::compressor::{
    drsc_encode_with_residual, idvq_train_step, CompressorConfig, Dictionary, Observation,
};
use vqnes::imageio::{load_image, write_pgm};

fn main() -> vqnes::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = CompressorConfig {
        delta: 0.1,
        epsilon: 0.1,
        omega: 6,
        ..Default::default()
    };

    let (dict_path, image_path): (PathBuf, PathBuf) = if args.len() == 2 {
        (args[0].clone().into(), args[1].clone().into())
    } else {
        let dir = std::env::temp_dir().join("vqnes_encode_image");
        std::fs::create_dir_all(&dir)?;
        let dict_path = dir.join("demo.dict");
        let image_path = dir.join("demo.pgm");

        // a dictionary over 8x8 images with two bright bars
        let mut dictionary = Dictionary::new(64)?;
        for offset in [0usize, 4] {
            let mut pixels = vec![0.0f32; 64];
            for y in 0..8 {
                pixels[y * 8 + offset] = 1.0;
            }
            idvq_train_step(
                &Observation::new(pixels, 8, 8).unwrap(),
                &mut dictionary,
                &cfg,
            )?;
        }
        save_dictionary(&dict_path, &dictionary)?;

        // the image to encode contains both bars
        let mut pixels = vec![0.0f32; 64];
        for y in 0..8 {
            pixels[y * 8] = 1.0;
            pixels[y * 8 + 4] = 1.0;
        }
        write_pgm(&image_path, &Observation::new(pixels, 8, 8).unwrap())?;
        println!("wrote {} and {}", dict_path.display(), image_path.display());
        (dict_path, image_path)
    };

    let dictionary = load_dictionary(&dict_path)?;
    let image = load_image(&image_path)?;
    let (code, residual) = drsc_encode_with_residual(&image, &dictionary, &cfg)?;
    println!(
        "dictionary of {} centroids over {}-pixel images",
        dictionary.len(),
        dictionary.image_len()
    );
    println!("code: {}", code.to_bit_string());
    println!("ones: {} / residual left: {residual:.4}", code.popcount());
    Ok(())
}
