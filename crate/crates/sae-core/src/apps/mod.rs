//! Image-processing pipelines routed through the emulated arrays.
//!
//! Three applications exercise the approximate PEs end to end: an 8x8
//! integer-scaled DCT round trip, Laplacian edge detection, and image
//! sharpening. Output quality is scored with PSNR and SSIM.

pub mod convolve;
pub mod dct;
pub mod testimage;

pub use convolve::{convolve3, convolve_scored, edge_detect, sharpen, Kernel3, PostProcess};
pub use dct::{dct_pipeline, DctOutput, DctSpec};

use serde::Serialize;

use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<GrayImage> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} image with {} pixels",
                width,
                height,
                pixels.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> GrayImage {
        GrayImage {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    /// Clamped accessor with replicate semantics outside the borders.
    pub fn get_replicate(&self, x: isize, y: isize) -> u8 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.get(xc, yc)
    }

    /// Top-left `w x h` crop.
    pub fn crop(&self, w: usize, h: usize) -> Result<GrayImage> {
        if w > self.width || h > self.height {
            return Err(Error::DimensionMismatch(format!(
                "crop {w}x{h} exceeds {}x{}",
                self.width, self.height
            )));
        }
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            pixels.extend_from_slice(&self.pixels[y * self.width..y * self.width + w]);
        }
        GrayImage::new(w, h, pixels)
    }
}

/// PSNR/SSIM pair for one image comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QualityScore {
    /// Peak signal-to-noise ratio in dB; infinite for identical images.
    pub psnr_db: f64,
    /// Structural similarity over sliding 8x8 windows, in [-1, 1].
    pub ssim: f64,
}

impl QualityScore {
    pub fn measure(reference: &GrayImage, test: &GrayImage) -> Result<QualityScore> {
        Ok(QualityScore {
            psnr_db: psnr(reference, test)?,
            ssim: ssim(reference, test)?,
        })
    }
}

fn check_same_size(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    Ok(())
}

/// Mean squared error between two equally sized images.
pub fn mse(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    check_same_size(reference, test)?;
    let sum: u64 = reference
        .pixels
        .iter()
        .zip(&test.pixels)
        .map(|(&r, &t)| {
            let d = r as i64 - t as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / reference.pixels.len() as f64)
}

/// `10 * log10(255^2 / MSE)`; infinite when the images are identical.
pub fn psnr(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    let mse = mse(reference, test)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Mean SSIM over all 8x8 windows at stride 1, with the standard constants
/// `C1 = (0.01*255)^2` and `C2 = (0.03*255)^2`. Images smaller than the
/// window are scored over a single full-image window.
pub fn ssim(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    check_same_size(reference, test)?;
    let (w, h) = (reference.width, reference.height);
    let win_w = w.min(8);
    let win_h = h.min(8);

    // Summed-area tables over x, y, x^2, y^2, xy make each window O(1).
    let cols = w + 1;
    let mut sx = vec![0f64; cols * (h + 1)];
    let mut sy = vec![0f64; cols * (h + 1)];
    let mut sxx = vec![0f64; cols * (h + 1)];
    let mut syy = vec![0f64; cols * (h + 1)];
    let mut sxy = vec![0f64; cols * (h + 1)];
    for y in 0..h {
        for x in 0..w {
            let rv = reference.get(x, y) as f64;
            let tv = test.get(x, y) as f64;
            let i = (y + 1) * cols + (x + 1);
            let up = y * cols + (x + 1);
            let left = (y + 1) * cols + x;
            let diag = y * cols + x;
            sx[i] = rv + sx[up] + sx[left] - sx[diag];
            sy[i] = tv + sy[up] + sy[left] - sy[diag];
            sxx[i] = rv * rv + sxx[up] + sxx[left] - sxx[diag];
            syy[i] = tv * tv + syy[up] + syy[left] - syy[diag];
            sxy[i] = rv * tv + sxy[up] + sxy[left] - sxy[diag];
        }
    }
    let window_sum = |t: &[f64], x0: usize, y0: usize| -> f64 {
        t[(y0 + win_h) * cols + (x0 + win_w)]
            - t[y0 * cols + (x0 + win_w)]
            - t[(y0 + win_h) * cols + x0]
            + t[y0 * cols + x0]
    };

    const C1: f64 = 6.5025; // (0.01 * 255)^2
    const C2: f64 = 58.5225; // (0.03 * 255)^2
    let n = (win_w * win_h) as f64;
    let mut total = 0.0;
    let mut windows = 0u64;
    for y0 in 0..=h - win_h {
        for x0 in 0..=w - win_w {
            let mx = window_sum(&sx, x0, y0) / n;
            let my = window_sum(&sy, x0, y0) / n;
            let vx = window_sum(&sxx, x0, y0) / n - mx * mx;
            let vy = window_sum(&syy, x0, y0) / n - my * my;
            let cov = window_sum(&sxy, x0, y0) / n - mx * my;
            let score = ((2.0 * mx * my + C1) * (2.0 * cov + C2))
                / ((mx * mx + my * my + C1) * (vx + vy + C2));
            total += score;
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_images_score_perfect() {
        let img = testimage::generate(32, 32);
        assert_eq!(psnr(&img, &img).unwrap(), f64::INFINITY);
        assert!((ssim(&img, &img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximal_mse_gives_zero_db() {
        let black = GrayImage::filled(16, 16, 0);
        let white = GrayImage::filled(16, 16, 255);
        assert_eq!(psnr(&black, &white).unwrap(), 0.0);
    }

    #[test]
    fn psnr_matches_direct_mse_oracle() {
        let a = testimage::generate(40, 24);
        let mut b = a.clone();
        for (i, p) in b.pixels.iter_mut().enumerate() {
            *p = p.wrapping_add((i % 7) as u8);
        }
        // Straightforward per-pixel reference.
        let mut sum = 0f64;
        for (pa, pb) in a.pixels().iter().zip(b.pixels()) {
            sum += (*pa as f64 - *pb as f64).powi(2);
        }
        let want = 10.0 * (255.0f64 * 255.0 / (sum / (40.0 * 24.0))).log10();
        assert!((psnr(&a, &b).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn ssim_penalizes_noise_more_than_bias() {
        let base = testimage::generate(64, 64);
        let mut noisy = base.clone();
        let mut state = 123u64;
        for p in noisy.pixels.iter_mut() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            *p = p.saturating_add((state >> 60) as u8 * 4);
        }
        let s = ssim(&base, &noisy).unwrap();
        assert!(s < 1.0 && s > 0.0);
    }

    #[test]
    fn size_mismatch_rejected() {
        let a = GrayImage::filled(8, 8, 0);
        let b = GrayImage::filled(8, 9, 0);
        assert!(psnr(&a, &b).is_err());
        assert!(ssim(&a, &b).is_err());
    }
}
