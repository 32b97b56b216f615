//! Pinned regression scene.
//!
//! The quality numbers in the acceptance suite are tied to one fixed
//! 512x512 grayscale image. It is generated procedurally (smooth sky
//! gradient, soft sun disk, rolling horizon, a house and tree blobs, plus
//! low-amplitude value noise) so it has natural-photo statistics — a
//! sparse DCT spectrum and real edges — while being fully deterministic.
//! Only IEEE-exact arithmetic is used (no libm transcendentals), so the
//! bytes are identical on every platform; the checked-in PGM is the
//! authoritative copy and a test pins it to the generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apps::GrayImage;

/// Embedded copy of `assets/test_image_512.pgm`.
pub const VENDORED_PGM: &[u8] = include_bytes!("../../assets/test_image_512.pgm");

/// Decodes the vendored 512x512 test image.
pub fn vendored() -> GrayImage {
    crate::io::read_pgm(VENDORED_PGM).expect("embedded test image is valid")
}

/// Sine of `2*pi*t` via the Bhaskara rational approximation, which needs
/// only +,-,*,/ and is therefore bit-stable across platforms.
fn wave(t: f64) -> f64 {
    let phase = t - t.floor();
    let (half, sign) = if phase < 0.5 {
        (phase, 1.0)
    } else {
        (phase - 0.5, -1.0)
    };
    // Bhaskara I: sin(x) ~ 16 x (pi - x) / (5 pi^2 - 4 x (pi - x)), x in [0, pi].
    let x = half * 2.0 * std::f64::consts::PI;
    let pi = std::f64::consts::PI;
    sign * 16.0 * x * (pi - x) / (5.0 * pi * pi - 4.0 * x * (pi - x))
}

fn smoothstep(edge0: f64, edge1: f64, x: f64) -> f64 {
    let t = ((x - edge0) / (edge1 - edge0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Bilinear value noise in [-1, 1] from a seeded lattice.
struct ValueNoise {
    cell: f64,
    cols: usize,
    lattice: Vec<f64>,
}

impl ValueNoise {
    fn new(width: usize, height: usize, cell: f64, seed: u64) -> ValueNoise {
        let cols = (width as f64 / cell).ceil() as usize + 2;
        let rows = (height as f64 / cell).ceil() as usize + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lattice = (0..cols * rows)
            .map(|_| rng.random_range(-1.0f64..1.0))
            .collect();
        ValueNoise {
            cell,
            cols,
            lattice,
        }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let gx = x / self.cell;
        let gy = y / self.cell;
        let x0 = gx.floor() as usize;
        let y0 = gy.floor() as usize;
        let fx = gx - gx.floor();
        let fy = gy - gy.floor();
        let v = |ix: usize, iy: usize| self.lattice[iy * self.cols + ix];
        let top = v(x0, y0) * (1.0 - fx) + v(x0 + 1, y0) * fx;
        let bot = v(x0, y0 + 1) * (1.0 - fx) + v(x0 + 1, y0 + 1) * fx;
        top * (1.0 - fy) + bot * fy
    }
}

/// Renders the scene at an arbitrary size. `generate(512, 512)` is the
/// vendored image.
pub fn generate(width: usize, height: usize) -> GrayImage {
    let coarse = ValueNoise::new(width, height, 24.0, 0x5AE1);
    let fine = ValueNoise::new(width, height, 6.0, 0x5AE2);
    let w = width as f64;
    let h = height as f64;
    let mut pixels = Vec::with_capacity(width * height);

    for py in 0..height {
        for px in 0..width {
            let u = (px as f64 + 0.5) / w;
            let v = (py as f64 + 0.5) / h;

            // Sky with a soft sun disk.
            let mut value = 205.0 - 55.0 * v;
            let dx = u - 0.70;
            let dy = (v - 0.20) * (h / w);
            let sun_dist = (dx * dx + dy * dy).sqrt();
            value += 45.0 * (1.0 - smoothstep(0.08, 0.115, sun_dist));

            // Rolling horizon; ground below it.
            let horizon = 0.56 + 0.060 * wave(1.7 * u + 0.15) + 0.035 * wave(3.1 * u + 0.80);
            let ground = smoothstep(horizon - 0.004, horizon + 0.004, v);
            if ground > 0.0 {
                let depth = ((v - horizon) / (1.0 - horizon)).clamp(0.0, 1.0);
                let mut g = 118.0 - 42.0 * depth;
                g += 13.0 * wave(2.6 * u + 0.4 * depth);
                g += 7.0 * wave(5.3 * u + 0.9);
                value = value * (1.0 - ground) + g * ground;
            }

            // Tree blobs sitting on the ground.
            for (cx, cy, r, depthshift) in [
                (0.16, 0.66, 0.060, -38.0),
                (0.33, 0.74, 0.075, -30.0),
                (0.87, 0.70, 0.055, -34.0),
            ] {
                let tx = u - cx;
                let ty = (v - cy) * 1.4;
                let d = (tx * tx + ty * ty).sqrt();
                value += depthshift * (1.0 - smoothstep(r * 0.75, r, d));
            }

            // House: bright walls, darker roof.
            if (0.55..0.68).contains(&u) && (horizon - 0.005..horizon + 0.085).contains(&v) {
                value = 158.0 - 60.0 * (v - horizon) + 14.0 * wave(9.0 * u);
            }
            let roof_h = 0.05;
            if v < horizon - 0.005 && v > horizon - roof_h {
                let span = (v - (horizon - roof_h)) / roof_h * 0.065;
                if (u - 0.615).abs() < span {
                    value = 72.0 + 120.0 * (v - horizon + roof_h);
                }
            }

            // Gentle film-like texture.
            let x = px as f64;
            let y = py as f64;
            value += 4.5 * coarse.at(x, y) + 2.0 * fine.at(x, y);

            pixels.push(value.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(width, height, pixels).expect("nonzero dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vendored_file_matches_generator() {
        let img = vendored();
        assert_eq!((img.width(), img.height()), (512, 512));
        assert_eq!(img, generate(512, 512));
    }

    // Rebuilds the checked-in asset after a scene change:
    //   cargo test -p sae-core regenerate_vendored_image -- --ignored
    #[test]
    #[ignore]
    fn regenerate_vendored_image() {
        let img = generate(512, 512);
        std::fs::write("assets/test_image_512.pgm", crate::io::write_pgm(&img)).unwrap();
    }

    #[test]
    fn scene_has_photo_like_spread() {
        let img = generate(128, 128);
        let mean: f64 =
            img.pixels().iter().map(|&p| p as f64).sum::<f64>() / img.pixels().len() as f64;
        assert!((60.0..200.0).contains(&mean), "mean {mean}");
        let min = *img.pixels().iter().min().unwrap();
        let max = *img.pixels().iter().max().unwrap();
        assert!(max - min > 100, "dynamic range {min}..{max}");
    }
}
