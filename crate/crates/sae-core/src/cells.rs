//! Combinational partial-product cells.
//!
//! A positive partial-product cell (PPC) is a full adder fused with an AND
//! gate: it adds `a·b` to an incoming carry and sum. The negative variant
//! (NPPC) adds the complemented product `!(a·b)` instead, which is what
//! Baugh-Wooley signed multiplication needs for its cross terms. Both come
//! in an exact flavor and an approximate flavor that trades five wrong
//! outputs out of sixteen for a much cheaper circuit.
//!
//! All evaluators are pure functions over four input bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four input bits of one cell: operand bits `a`, `b`, incoming carry
/// and incoming sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellInputs {
    pub a: bool,
    pub b: bool,
    pub c_in: bool,
    pub s_in: bool,
}

impl CellInputs {
    /// Decodes row index `i` of the canonical truth table, counting
    /// `(a, b, c_in, s_in)` from 0000 to 1111 with `a` as the high bit.
    pub fn from_index(i: usize) -> CellInputs {
        debug_assert!(i < 16);
        CellInputs {
            a: i & 0b1000 != 0,
            b: i & 0b0100 != 0,
            c_in: i & 0b0010 != 0,
            s_in: i & 0b0001 != 0,
        }
    }
}

/// Sum and carry output bits of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellOutput {
    pub s: bool,
    pub c: bool,
}

impl CellOutput {
    /// Arithmetic value `s + 2c` of the output pair.
    pub fn value(self) -> u8 {
        self.s as u8 + 2 * self.c as u8
    }
}

/// Every kind of cell a processing element can be built from.
///
/// `ConstOne`/`ConstZero` are degenerate pass-through kinds used for the
/// Baugh-Wooley correction bits and for carry reduction: they ignore `a`
/// and `b` and add a fixed bit to the incoming carry and sum. They have no
/// approximate variant and no truth table of their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    ExactPpc,
    ExactNppc,
    ApproxPpc,
    ApproxNppc,
    ConstOne,
    ConstZero,
}

impl CellKind {
    /// True for the PPC family (exact or approximate).
    pub fn is_ppc(self) -> bool {
        matches!(self, CellKind::ExactPpc | CellKind::ApproxPpc)
    }

    /// True for the NPPC family (exact or approximate).
    pub fn is_nppc(self) -> bool {
        matches!(self, CellKind::ExactNppc | CellKind::ApproxNppc)
    }

    /// True for the approximate variants.
    pub fn is_approx(self) -> bool {
        matches!(self, CellKind::ApproxPpc | CellKind::ApproxNppc)
    }

    /// The approximate variant of this kind; constants stay exact.
    pub fn approximated(self) -> CellKind {
        match self {
            CellKind::ExactPpc => CellKind::ApproxPpc,
            CellKind::ExactNppc => CellKind::ApproxNppc,
            other => other,
        }
    }
}

fn full_add(term: bool, c_in: bool, s_in: bool) -> CellOutput {
    let total = term as u8 + c_in as u8 + s_in as u8;
    CellOutput {
        s: total & 1 != 0,
        c: total & 2 != 0,
    }
}

/// Exact PPC: `s + 2c == a·b + c_in + s_in`.
pub fn eval_exact_ppc(inp: CellInputs) -> CellOutput {
    full_add(inp.a && inp.b, inp.c_in, inp.s_in)
}

/// Exact NPPC: `s + 2c == !(a·b) + c_in + s_in`.
pub fn eval_exact_nppc(inp: CellInputs) -> CellOutput {
    full_add(!(inp.a && inp.b), inp.c_in, inp.s_in)
}

/// Approximate PPC: `s = (s_in | c_in) & !(a·b)`, `c = a·b`.
pub fn eval_approx_ppc(inp: CellInputs) -> CellOutput {
    let ab = inp.a && inp.b;
    CellOutput {
        s: (inp.s_in || inp.c_in) && !ab,
        c: ab,
    }
}

/// Approximate NPPC: `c = (s_in | c_in) & !(a·b)`, `s = !c`.
pub fn eval_approx_nppc(inp: CellInputs) -> CellOutput {
    let c = (inp.s_in || inp.c_in) && !(inp.a && inp.b);
    CellOutput { s: !c, c }
}

/// Evaluates a cell of any kind, including the constant pass-through kinds.
pub fn eval(kind: CellKind, inp: CellInputs) -> CellOutput {
    match kind {
        CellKind::ExactPpc => eval_exact_ppc(inp),
        CellKind::ExactNppc => eval_exact_nppc(inp),
        CellKind::ApproxPpc => eval_approx_ppc(inp),
        CellKind::ApproxNppc => eval_approx_nppc(inp),
        CellKind::ConstOne => full_add(true, inp.c_in, inp.s_in),
        CellKind::ConstZero => full_add(false, inp.c_in, inp.s_in),
    }
}

/// Enumerates the 16-row truth table of an evaluating cell kind in canonical
/// input order. Constant kinds are rejected: they do not define a table.
pub fn truth_table(kind: CellKind) -> Result<Vec<(CellInputs, CellOutput)>> {
    if matches!(kind, CellKind::ConstOne | CellKind::ConstZero) {
        return Err(Error::InvalidCellKind(kind));
    }
    Ok((0..16)
        .map(|i| {
            let inp = CellInputs::from_index(i);
            (inp, eval(kind, inp))
        })
        .collect())
}

/// Error distance of the approximate variant against its exact counterpart
/// for one input row: `value(approx) - value(exact)`. Exact kinds return 0.
pub fn error_distance(kind: CellKind, inp: CellInputs) -> i8 {
    let exact = match kind {
        CellKind::ApproxPpc => eval_exact_ppc(inp),
        CellKind::ApproxNppc => eval_exact_nppc(inp),
        _ => return 0,
    };
    eval(kind, inp).value() as i8 - exact.value() as i8
}

/// Cell-level error statistics under a caller-supplied input distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProfile {
    /// Probability mass of inputs whose output value is wrong.
    pub error_probability: f64,
    /// Expected signed error distance.
    pub mean_ed: f64,
    /// Expected absolute error distance.
    pub mean_abs_ed: f64,
}

/// Aggregates the error distances of an approximate kind under an arbitrary
/// input distribution. `probability` assigns mass to each of the 16 input
/// rows (it is normalized internally, so unnormalized weights work too).
/// Under the uniform distribution this reports the 5/16 error rate.
pub fn error_profile(
    kind: CellKind,
    probability: impl Fn(CellInputs) -> f64,
) -> Result<ErrorProfile> {
    if matches!(kind, CellKind::ConstOne | CellKind::ConstZero) {
        return Err(Error::InvalidCellKind(kind));
    }
    let mut total = 0.0;
    let mut err_mass = 0.0;
    let mut mean_ed = 0.0;
    let mut mean_abs = 0.0;
    for i in 0..16 {
        let inp = CellInputs::from_index(i);
        let p = probability(inp);
        let ed = error_distance(kind, inp) as f64;
        total += p;
        if ed != 0.0 {
            err_mass += p;
        }
        mean_ed += p * ed;
        mean_abs += p * ed.abs();
    }
    Ok(ErrorProfile {
        error_probability: err_mass / total,
        mean_ed: mean_ed / total,
        mean_abs_ed: mean_abs / total,
    })
}

/// Product distribution where every input bit is independently 1 with the
/// given probability. `bit_probability(0.5)` is the uniform distribution;
/// 0.25 models each line carrying an AND of two uniform bits.
pub fn bit_probability(p_one: f64) -> impl Fn(CellInputs) -> f64 {
    move |inp: CellInputs| {
        [inp.a, inp.b, inp.c_in, inp.s_in]
            .into_iter()
            .map(|bit| if bit { p_one } else { 1.0 - p_one })
            .product()
    }
}
