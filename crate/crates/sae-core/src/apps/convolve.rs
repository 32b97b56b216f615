//! 3x3 convolution through PE MAC chains: edge detection and sharpening.
//!
//! Every output pixel folds its nine tap/pixel products through one PE in
//! row-major stream order, exactly as an accumulating array would. Signed
//! PEs take level-shifted pixels (`p - 128`); the shift is compensated by
//! adding back `128 * sum(taps)` after the fold, which is exact for any
//! kernel. Borders replicate.

use crate::apps::{GrayImage, QualityScore};
use crate::error::{Error, Result};
use crate::pe::{build_pe, PeConfig, Signedness};

/// Integer 3x3 kernel.
#[derive(Debug, Clone, Copy)]
pub struct Kernel3 {
    pub name: &'static str,
    pub taps: [[i64; 3]; 3],
}

impl Kernel3 {
    /// 8-neighbor Laplacian; taps sum to zero.
    pub fn laplacian() -> Kernel3 {
        Kernel3 {
            name: "laplacian",
            taps: [[-1, -1, -1], [-1, 8, -1], [-1, -1, -1]],
        }
    }

    /// 4-neighbor sharpening kernel; taps sum to one.
    pub fn sharpen() -> Kernel3 {
        Kernel3 {
            name: "sharpen",
            taps: [[0, -1, 0], [-1, 5, -1], [0, -1, 0]],
        }
    }

    pub fn custom(name: &'static str, taps: [[i64; 3]; 3]) -> Kernel3 {
        Kernel3 { name, taps }
    }

    pub fn tap_sum(&self) -> i64 {
        self.taps.iter().flatten().sum()
    }

    fn has_negative(&self) -> bool {
        self.taps.iter().flatten().any(|&t| t < 0)
    }
}

/// How raw convolution sums map back to 8-bit pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostProcess {
    /// Clamp into [0, 255].
    Clamp,
    /// Affine min-max rescale of the raw plane into [0, 255]; a constant
    /// plane maps to zero.
    Normalize,
}

fn validate(kernel: &Kernel3, pe: &PeConfig) -> Result<()> {
    pe.validate()?;
    if kernel.has_negative() && pe.signedness == Signedness::Unsigned {
        return Err(Error::InvalidConfig(format!(
            "kernel {:?} has negative taps; unsigned PEs cannot represent them",
            kernel.name
        )));
    }
    if pe.width < 8 {
        return Err(Error::InvalidConfig(format!(
            "PE width {} too narrow for 8-bit pixels",
            pe.width
        )));
    }
    for &t in kernel.taps.iter().flatten() {
        if t < pe.operand_min() || t > pe.operand_max() {
            return Err(Error::OperandOutOfRange {
                name: "kernel tap",
                value: t,
                min: pe.operand_min(),
                max: pe.operand_max(),
            });
        }
    }
    if pe.acc_width < 24 {
        return Err(Error::InvalidConfig(format!(
            "PE accumulator width {} too narrow for convolution; need >= 24",
            pe.acc_width
        )));
    }
    Ok(())
}

/// Convolves the image with a 3x3 kernel, every MAC performed by the PE.
pub fn convolve3(
    img: &GrayImage,
    kernel: &Kernel3,
    pe: PeConfig,
    post: PostProcess,
) -> Result<GrayImage> {
    validate(kernel, &pe)?;
    let desc = build_pe(pe)?;
    let signed = pe.signedness == Signedness::Signed;
    // Signed PEs see level-shifted pixels; the kernel is linear, so the
    // shift folds into a constant added back afterwards.
    let bias = if signed { 128 * kernel.tap_sum() } else { 0 };

    let (w, h) = (img.width(), img.height());
    let mut raw = vec![0i64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0i64;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    let p = img.get_replicate(x as isize + dx, y as isize + dy) as i64;
                    let operand = if signed { p - 128 } else { p };
                    let tap = kernel.taps[(dy + 1) as usize][(dx + 1) as usize];
                    acc = desc.eval(operand, tap, acc)?;
                }
            }
            raw[y * w + x] = acc + bias;
        }
    }

    let pixels = match post {
        PostProcess::Clamp => raw.iter().map(|&v| v.clamp(0, 255) as u8).collect(),
        PostProcess::Normalize => {
            let lo = *raw.iter().min().unwrap();
            let hi = *raw.iter().max().unwrap();
            if lo == hi {
                vec![0u8; raw.len()]
            } else {
                raw.iter()
                    .map(|&v| (((v - lo) * 255 + (hi - lo) / 2) / (hi - lo)) as u8)
                    .collect()
            }
        }
    };
    GrayImage::new(w, h, pixels)
}

/// Laplacian edge map plus its quality versus the exact-PE edge map of the
/// same image. PSNR against the source image would be meaningless for an
/// edge map, so the exact output is the reference. The signed Laplacian
/// plane is min-max normalized into [0, 255], the standard display mapping
/// for this operator.
pub fn edge_detect(img: &GrayImage, pe: PeConfig) -> Result<(GrayImage, QualityScore)> {
    convolve_scored(img, &Kernel3::laplacian(), pe, PostProcess::Normalize)
}

/// Sharpened image plus its quality versus the exact-PE sharpened output.
pub fn sharpen(img: &GrayImage, pe: PeConfig) -> Result<(GrayImage, QualityScore)> {
    convolve_scored(img, &Kernel3::sharpen(), pe, PostProcess::Clamp)
}

/// Shared scoring path: run the kernel with the given PE and with its exact
/// (`k = 0`) twin, score the former against the latter.
pub fn convolve_scored(
    img: &GrayImage,
    kernel: &Kernel3,
    pe: PeConfig,
    post: PostProcess,
) -> Result<(GrayImage, QualityScore)> {
    let out = convolve3(img, kernel, pe, post)?;
    let exact_pe = PeConfig::with_acc_width(pe.width, pe.signedness, 0, pe.acc_width)?;
    let reference = convolve3(img, kernel, exact_pe, post)?;
    let score = QualityScore::measure(&reference, &out)?;
    Ok((out, score))
}
