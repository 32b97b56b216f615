//! Bit-accurate emulator for exact and approximate systolic-array matrix
//! multiplication.
//!
//! The crate models the hardware bottom-up:
//!
//! - [`cells`] — the four combinational partial-product cell types (exact
//!   and approximate PPC/NPPC) defined by their boolean equations.
//! - [`pe`] — N-bit processing elements computing the fused `a*b + c` from
//!   a grid of cells, unsigned or Baugh-Wooley signed, with column-wise
//!   approximation parameter `k`.
//! - [`systolic`] — a cycle-accurate output-stationary array built from
//!   those PEs, reproducing the `3N - 2` latency of the square case.
//! - [`metrics`] — error-rate/NMED/MRED analysis of approximate PEs against
//!   a wide-integer oracle.
//! - [`apps`] — image pipelines (integer DCT round trip, Laplacian edge
//!   detection, sharpening) routed through the emulated arrays, scored with
//!   PSNR and SSIM.
//! - [`io`] — bit-exact PGM image and CSV matrix codecs.
//!
//! Everything is deterministic: random protocols take explicit seeds and
//! all reports are byte-stable across runs.

pub mod apps;
pub mod cells;
pub mod cli;
pub mod error;
pub mod io;
pub mod metrics;
pub mod pe;
pub mod systolic;

pub use error::{Error, Result};
pub use pe::{build_pe, eval_pe_exact_oracle, PeConfig, PeDescriptor, Signedness};
