//! C ABI over the emulator core.
//!
//! Conventions: every fallible call returns a [`SaeStatus`] and writes its
//! result through out-pointers; handles are opaque and freed with their
//! paired `_free` function; no call panics across the boundary. The header
//! in `include/sae.h` mirrors this surface (kept in sync by hand and
//! checked by `cbindgen.toml` when the tool is available).

use std::os::raw::c_char;

use sae_core::cells::{self, CellKind};
use sae_core::metrics::{analyze, InputProtocol};
use sae_core::pe::{build_pe, eval_pe_exact_oracle, PeConfig, PeDescriptor, Signedness};
use sae_core::systolic::{matmul_oracle, simulate, ArrayConfig, IntMatrix};
use sae_core::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    OutOfRange = 3,
    DimensionMismatch = 4,
    Unsupported = 5,
}

fn status_of(err: &Error) -> SaeStatus {
    match err {
        Error::InvalidConfig(_) => SaeStatus::InvalidConfig,
        Error::OperandOutOfRange { .. } => SaeStatus::OutOfRange,
        Error::DimensionMismatch(_) => SaeStatus::DimensionMismatch,
        _ => SaeStatus::Unsupported,
    }
}

/// Opaque processing-element handle: configuration plus its built cell grid.
pub struct SaePe {
    config: PeConfig,
    desc: PeDescriptor,
}

/// Cell kinds exposed over the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaeCellKind {
    ExactPpc = 0,
    ExactNppc = 1,
    ApproxPpc = 2,
    ApproxNppc = 3,
}

impl From<SaeCellKind> for CellKind {
    fn from(k: SaeCellKind) -> CellKind {
        match k {
            SaeCellKind::ExactPpc => CellKind::ExactPpc,
            SaeCellKind::ExactNppc => CellKind::ExactNppc,
            SaeCellKind::ApproxPpc => CellKind::ApproxPpc,
            SaeCellKind::ApproxNppc => CellKind::ApproxNppc,
        }
    }
}

/// One truth-table row: four input bits, two output bits, error distance of
/// the approximate variant (0 for exact kinds).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SaeTruthRow {
    pub a: u8,
    pub b: u8,
    pub c_in: u8,
    pub s_in: u8,
    pub s: u8,
    pub c: u8,
    pub ed: i8,
}

/// Aggregated error metrics of one configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SaeErrorReport {
    pub er: f64,
    pub med: f64,
    pub nmed: f64,
    pub mred: f64,
    pub max_ed: u64,
    pub samples: u64,
}

/// Builds a PE handle. `acc_width == 0` selects the default `2N + 8`.
///
/// # Safety
/// `out` must point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn sae_pe_new(
    width: u32,
    is_signed: bool,
    approx_columns: u32,
    acc_width: u32,
    out: *mut *mut SaePe,
) -> SaeStatus {
    if out.is_null() {
        return SaeStatus::NullPointer;
    }
    let signedness = if is_signed {
        Signedness::Signed
    } else {
        Signedness::Unsigned
    };
    let config = if acc_width == 0 {
        PeConfig::new(width, signedness, approx_columns)
    } else {
        PeConfig::with_acc_width(width, signedness, approx_columns, acc_width)
    };
    match config.and_then(|config| Ok((config, build_pe(config)?))) {
        Ok((config, desc)) => {
            *out = Box::into_raw(Box::new(SaePe { config, desc }));
            SaeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a handle created by [`sae_pe_new`]. Null is a no-op.
///
/// # Safety
/// `pe` must be a pointer previously returned by `sae_pe_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sae_pe_free(pe: *mut SaePe) {
    if !pe.is_null() {
        drop(Box::from_raw(pe));
    }
}

/// Evaluates the fused MAC `a*b + c` through the cell grid.
///
/// # Safety
/// `pe` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sae_pe_eval(
    pe: *const SaePe,
    a: i64,
    b: i64,
    c: i64,
    out: *mut i64,
) -> SaeStatus {
    let (Some(pe), false) = (pe.as_ref(), out.is_null()) else {
        return SaeStatus::NullPointer;
    };
    match pe.desc.eval(a, b, c) {
        Ok(v) => {
            *out = v;
            SaeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Ground-truth MAC `a*b + c` in wide integer arithmetic.
///
/// # Safety
/// `pe` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sae_pe_eval_exact(
    pe: *const SaePe,
    a: i64,
    b: i64,
    c: i64,
    out: *mut i64,
) -> SaeStatus {
    let (Some(pe), false) = (pe.as_ref(), out.is_null()) else {
        return SaeStatus::NullPointer;
    };
    match eval_pe_exact_oracle(&pe.config, a, b, c) {
        Ok(v) => {
            *out = v;
            SaeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Reports the PPC/NPPC product-cell counts of the grid.
///
/// # Safety
/// `pe` must be a live handle; `ppc`/`nppc` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sae_pe_counts(
    pe: *const SaePe,
    ppc: *mut u64,
    nppc: *mut u64,
) -> SaeStatus {
    let (Some(pe), false, false) = (pe.as_ref(), ppc.is_null(), nppc.is_null()) else {
        return SaeStatus::NullPointer;
    };
    *ppc = pe.desc.ppc_count() as u64;
    *nppc = pe.desc.nppc_count() as u64;
    SaeStatus::Ok
}

/// Multiplies `a` (`rows x inner`) by `b` (`inner x cols`) on the
/// cycle-accurate array; writes the product row-major and the cycle count.
///
/// # Safety
/// `a` must point to `rows*inner` values, `b` to `inner*cols`, `out` to
/// `rows*cols` writable values; `cycles` may be null.
#[no_mangle]
pub unsafe extern "C" fn sae_simulate(
    pe: *const SaePe,
    a: *const i64,
    rows: usize,
    inner: usize,
    b: *const i64,
    cols: usize,
    out: *mut i64,
    cycles: *mut u64,
) -> SaeStatus {
    let (Some(pe), false, false, false) = (pe.as_ref(), a.is_null(), b.is_null(), out.is_null())
    else {
        return SaeStatus::NullPointer;
    };
    if rows == 0 || inner == 0 || cols == 0 {
        return SaeStatus::DimensionMismatch;
    }
    let to_matrix = |ptr: *const i64, r: usize, c: usize| {
        let data = std::slice::from_raw_parts(ptr, r * c);
        let rows_vec: Vec<Vec<i64>> = data.chunks(c).map(|row| row.to_vec()).collect();
        IntMatrix::from_rows(&rows_vec)
    };
    let (Ok(ma), Ok(mb)) = (to_matrix(a, rows, inner), to_matrix(b, inner, cols)) else {
        return SaeStatus::DimensionMismatch;
    };
    let cfg = ArrayConfig {
        rows,
        cols,
        inner,
        pe: pe.config,
    };
    match simulate(cfg, &ma, &mb) {
        Ok((product, n_cycles)) => {
            std::ptr::copy_nonoverlapping(product.data().as_ptr(), out, rows * cols);
            if !cycles.is_null() {
                *cycles = n_cycles;
            }
            SaeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Reference triple-loop product, for validating `sae_simulate` from the
/// binding side.
///
/// # Safety
/// Same buffer contracts as [`sae_simulate`].
#[no_mangle]
pub unsafe extern "C" fn sae_matmul_oracle(
    a: *const i64,
    rows: usize,
    inner: usize,
    b: *const i64,
    cols: usize,
    out: *mut i64,
) -> SaeStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return SaeStatus::NullPointer;
    }
    if rows == 0 || inner == 0 || cols == 0 {
        return SaeStatus::DimensionMismatch;
    }
    let to_rows = |ptr: *const i64, r: usize, c: usize| -> Vec<Vec<i64>> {
        std::slice::from_raw_parts(ptr, r * c)
            .chunks(c)
            .map(|row| row.to_vec())
            .collect()
    };
    let ma = IntMatrix::from_rows(&to_rows(a, rows, inner));
    let mb = IntMatrix::from_rows(&to_rows(b, inner, cols));
    match (ma, mb) {
        (Ok(ma), Ok(mb)) => match matmul_oracle(&ma, &mb) {
            Ok(product) => {
                std::ptr::copy_nonoverlapping(product.data().as_ptr(), out, rows * cols);
                SaeStatus::Ok
            }
            Err(e) => status_of(&e),
        },
        _ => SaeStatus::DimensionMismatch,
    }
}

/// Fills `rows` with the 16-row truth table of a cell kind in canonical
/// input order.
///
/// # Safety
/// `rows` must point to 16 writable [`SaeTruthRow`] slots.
#[no_mangle]
pub unsafe extern "C" fn sae_truth_table(kind: SaeCellKind, rows: *mut SaeTruthRow) -> SaeStatus {
    if rows.is_null() {
        return SaeStatus::NullPointer;
    }
    let kind: CellKind = kind.into();
    let table = match cells::truth_table(kind) {
        Ok(t) => t,
        Err(e) => return status_of(&e),
    };
    let out = std::slice::from_raw_parts_mut(rows, 16);
    for (slot, (inp, outp)) in out.iter_mut().zip(table) {
        *slot = SaeTruthRow {
            a: inp.a as u8,
            b: inp.b as u8,
            c_in: inp.c_in as u8,
            s_in: inp.s_in as u8,
            s: outp.s as u8,
            c: outp.c as u8,
            ed: cells::error_distance(kind, inp),
        };
    }
    SaeStatus::Ok
}

/// Error metrics of the handle's configuration: exhaustive `(a, b)` with
/// `c = 0` when `samples == 0` (widths up to 8), otherwise `samples` random
/// triples drawn from `seed`.
///
/// # Safety
/// `pe` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sae_analyze(
    pe: *const SaePe,
    samples: u64,
    seed: u64,
    out: *mut SaeErrorReport,
) -> SaeStatus {
    let (Some(pe), false) = (pe.as_ref(), out.is_null()) else {
        return SaeStatus::NullPointer;
    };
    let protocol = if samples == 0 {
        InputProtocol::ExhaustiveAbZeroC
    } else {
        InputProtocol::RandomAbc {
            seed,
            count: samples,
        }
    };
    match analyze(pe.config, &protocol) {
        Ok(r) => {
            *out = SaeErrorReport {
                er: r.er,
                med: r.med,
                nmed: r.nmed,
                mred: r.mred,
                max_ed: r.max_ed,
                samples: r.samples,
            };
            SaeStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Static version string of the library.
#[no_mangle]
pub extern "C" fn sae_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
