//! N-bit processing elements computing the fused MAC `a*b + c`.
//!
//! A PE is a grid of partial-product cells, one column per output weight.
//! Unsigned operands place all `N*N` product terms as PPC cells; signed
//! operands follow the Baugh-Wooley scheme: the `2N-2` cross terms touching
//! the sign bit become NPPC cells and fixed correction ones enter at weight
//! `N` and at the sign-extension weights. The accumulator input `c` is fused
//! into the grid, one bit per column.
//!
//! Column-wise approximation replaces every product cell at weights below
//! `k` with its approximate variant. Correction constants and accumulator
//! bits are never approximated.

use serde::{Deserialize, Serialize};

use crate::cells::{self, CellInputs, CellKind};
use crate::error::{Error, Result};

/// Operand interpretation of a PE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signedness {
    Unsigned,
    /// Two's complement operands and accumulator.
    Signed,
}

/// Static configuration of one processing element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeConfig {
    /// Operand bit width N, 2..=16.
    pub width: u32,
    pub signedness: Signedness,
    /// Number of least-significant columns built from approximate cells,
    /// 0..=2N. Zero means fully exact.
    pub approx_columns: u32,
    /// Accumulator width in bits, at least 2N. Results wrap modulo
    /// `2^acc_width`.
    pub acc_width: u32,
}

impl PeConfig {
    /// Configuration with the default accumulator width `2N + 8`, sized so
    /// that an 8-deep accumulation of full-range products cannot overflow.
    pub fn new(width: u32, signedness: Signedness, approx_columns: u32) -> Result<PeConfig> {
        PeConfig::with_acc_width(width, signedness, approx_columns, 2 * width + 8)
    }

    pub fn with_acc_width(
        width: u32,
        signedness: Signedness,
        approx_columns: u32,
        acc_width: u32,
    ) -> Result<PeConfig> {
        let cfg = PeConfig {
            width,
            signedness,
            approx_columns,
            acc_width,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=16).contains(&self.width) {
            return Err(Error::InvalidConfig(format!(
                "operand width {} outside 2..=16",
                self.width
            )));
        }
        if self.approx_columns > 2 * self.width {
            return Err(Error::InvalidConfig(format!(
                "approx_columns {} exceeds 2N = {}",
                self.approx_columns,
                2 * self.width
            )));
        }
        if self.acc_width < 2 * self.width || self.acc_width > 60 {
            return Err(Error::InvalidConfig(format!(
                "acc_width {} outside {}..=60",
                self.acc_width,
                2 * self.width
            )));
        }
        Ok(())
    }

    /// Smallest representable operand value.
    pub fn operand_min(&self) -> i64 {
        match self.signedness {
            Signedness::Unsigned => 0,
            Signedness::Signed => -(1 << (self.width - 1)),
        }
    }

    /// Largest representable operand value.
    pub fn operand_max(&self) -> i64 {
        match self.signedness {
            Signedness::Unsigned => (1 << self.width) - 1,
            Signedness::Signed => (1 << (self.width - 1)) - 1,
        }
    }

    pub fn acc_min(&self) -> i64 {
        match self.signedness {
            Signedness::Unsigned => 0,
            Signedness::Signed => -(1 << (self.acc_width - 1)),
        }
    }

    pub fn acc_max(&self) -> i64 {
        match self.signedness {
            Signedness::Unsigned => (1i64 << self.acc_width) - 1,
            Signedness::Signed => (1i64 << (self.acc_width - 1)) - 1,
        }
    }

    /// Wraps an arbitrary integer into the accumulator range, i.e. reduces
    /// it modulo `2^acc_width` and reinterprets per signedness.
    pub fn wrap_acc(&self, v: i64) -> i64 {
        let mask = (1i64 << self.acc_width) - 1;
        let low = v & mask;
        match self.signedness {
            Signedness::Unsigned => low,
            Signedness::Signed => {
                if low & (1i64 << (self.acc_width - 1)) != 0 {
                    low - (1i64 << self.acc_width)
                } else {
                    low
                }
            }
        }
    }

    fn check_operand(&self, name: &'static str, v: i64) -> Result<()> {
        if v < self.operand_min() || v > self.operand_max() {
            return Err(Error::OperandOutOfRange {
                name,
                value: v,
                min: self.operand_min(),
                max: self.operand_max(),
            });
        }
        Ok(())
    }

    fn check_acc(&self, name: &'static str, v: i64) -> Result<()> {
        if v < self.acc_min() || v > self.acc_max() {
            return Err(Error::OperandOutOfRange {
                name,
                value: v,
                min: self.acc_min(),
                max: self.acc_max(),
            });
        }
        Ok(())
    }
}

/// One cell position in the PE grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub kind: CellKind,
    /// Operand bit pair `(a_bit, b_bit)` feeding the cell, or `None` for
    /// constant kinds.
    pub source: Option<(u32, u32)>,
}

/// Structural description of one processing element: per-column cell lists
/// plus the configuration they were built from. Immutable after
/// construction; evaluation is pure, so descriptors may be shared freely
/// across threads.
#[derive(Debug, Clone)]
pub struct PeDescriptor {
    config: PeConfig,
    columns: Vec<Vec<GridCell>>,
}

/// Builds the cell grid for a configuration.
pub fn build_pe(config: PeConfig) -> Result<PeDescriptor> {
    config.validate()?;
    let n = config.width;
    let w = config.acc_width;
    let k = config.approx_columns;
    let signed = config.signedness == Signedness::Signed;

    let mut columns: Vec<Vec<GridCell>> = vec![Vec::new(); w as usize];
    for col in 0..w {
        // Product terms a_i * b_j with i + j == col, i ascending.
        for i in 0..n {
            let Some(j) = col.checked_sub(i) else {
                continue;
            };
            if j >= n {
                continue;
            }
            let negative = signed && ((i == n - 1) ^ (j == n - 1));
            let mut kind = if negative {
                CellKind::ExactNppc
            } else {
                CellKind::ExactPpc
            };
            if col < k {
                kind = kind.approximated();
            }
            columns[col as usize].push(GridCell {
                kind,
                source: Some((i, j)),
            });
        }
        // Baugh-Wooley correction ones: weight N, and every weight from
        // 2N-1 up to the accumulator top (the sign extension of the
        // classic 2N-bit correction into a wider accumulator).
        if signed && (col == n || col >= 2 * n - 1) {
            columns[col as usize].push(GridCell {
                kind: CellKind::ConstOne,
                source: None,
            });
        }
    }
    Ok(PeDescriptor { config, columns })
}

/// Per-cell activity record used by traced evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CellTrace {
    pub kind: CellKind,
    pub a: bool,
    pub b: bool,
    pub c_in: bool,
    pub s_in: bool,
    pub s: bool,
    pub c: bool,
}

/// Activity of one column during an evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnTrace {
    pub column: u32,
    pub cells: Vec<CellTrace>,
    pub sum_bit: bool,
}

// Upper bound on cells (and therefore pending carries) in one column:
// at most N product terms, one constant, and carry-reduction spill.
const MAX_COL_CELLS: usize = 40;

impl PeDescriptor {
    pub fn config(&self) -> &PeConfig {
        &self.config
    }

    pub fn columns(&self) -> &[Vec<GridCell>] {
        &self.columns
    }

    /// Number of product cells of the PPC family (exact or approximate).
    pub fn ppc_count(&self) -> usize {
        self.count(CellKind::is_ppc)
    }

    /// Number of product cells of the NPPC family (exact or approximate).
    pub fn nppc_count(&self) -> usize {
        self.count(CellKind::is_nppc)
    }

    fn count(&self, pred: fn(CellKind) -> bool) -> usize {
        self.columns
            .iter()
            .flatten()
            .filter(|cell| cell.source.is_some() && pred(cell.kind))
            .count()
    }

    /// Evaluates the cell grid for operands `a`, `b` and accumulator input
    /// `c`, returning the `acc_width`-bit result. With `approx_columns == 0`
    /// this equals `a*b + c` whenever that value is representable; wider
    /// results wrap modulo `2^acc_width`.
    pub fn eval(&self, a: i64, b: i64, c: i64) -> Result<i64> {
        self.eval_inner(a, b, c, None)
    }

    /// Like [`eval`](Self::eval) but also records per-column cell activity.
    pub fn eval_traced(&self, a: i64, b: i64, c: i64) -> Result<(i64, Vec<ColumnTrace>)> {
        let mut trace = Vec::with_capacity(self.columns.len());
        let value = self.eval_inner(a, b, c, Some(&mut trace))?;
        Ok((value, trace))
    }

    fn eval_inner(
        &self,
        a: i64,
        b: i64,
        c: i64,
        mut trace: Option<&mut Vec<ColumnTrace>>,
    ) -> Result<i64> {
        let cfg = &self.config;
        cfg.check_operand("a", a)?;
        cfg.check_operand("b", b)?;
        cfg.check_acc("c", c)?;

        let n = cfg.width;
        let w = cfg.acc_width;
        let a_bits = (a as u64) & ((1 << n) - 1);
        let b_bits = (b as u64) & ((1 << n) - 1);
        let c_bits = (c as u64) & ((1u64 << w) - 1);

        let mut carries_in = [false; MAX_COL_CELLS];
        let mut n_in = 0usize;
        let mut carries_out = [false; MAX_COL_CELLS];
        let mut result: u64 = 0;

        for col in 0..w {
            let mut n_out = 0usize;
            let mut taken = 0usize;
            let mut sum = c_bits >> col & 1 != 0;
            let mut cell_traces = trace.as_ref().map(|_| Vec::new());

            let mut feed = |kind: CellKind, source: Option<(u32, u32)>, s_in: bool, c_in: bool| {
                let (a_bit, b_bit) = match source {
                    Some((i, j)) => (a_bits >> i & 1 != 0, b_bits >> j & 1 != 0),
                    None => (false, false),
                };
                let out = cells::eval(
                    kind,
                    CellInputs {
                        a: a_bit,
                        b: b_bit,
                        c_in,
                        s_in,
                    },
                );
                if let Some(rec) = cell_traces.as_mut() {
                    rec.push(CellTrace {
                        kind,
                        a: a_bit,
                        b: b_bit,
                        c_in,
                        s_in,
                        s: out.s,
                        c: out.c,
                    });
                }
                out
            };

            for cell in &self.columns[col as usize] {
                let c_in = if taken < n_in {
                    taken += 1;
                    carries_in[taken - 1]
                } else {
                    false
                };
                let out = feed(cell.kind, cell.source, sum, c_in);
                sum = out.s;
                debug_assert!(n_out < MAX_COL_CELLS);
                carries_out[n_out] = out.c;
                n_out += 1;
            }
            // Leftover carries reduce through plain full adders.
            while taken < n_in {
                taken += 1;
                let out = feed(CellKind::ConstZero, None, sum, carries_in[taken - 1]);
                sum = out.s;
                debug_assert!(n_out < MAX_COL_CELLS);
                carries_out[n_out] = out.c;
                n_out += 1;
            }

            if let (Some(rec), Some(out)) = (cell_traces, trace.as_deref_mut()) {
                out.push(ColumnTrace {
                    column: col,
                    cells: rec,
                    sum_bit: sum,
                });
            }

            result |= (sum as u64) << col;
            carries_in[..n_out].copy_from_slice(&carries_out[..n_out]);
            n_in = n_out;
        }
        // Carries past the top column wrap away.

        Ok(cfg.wrap_acc(result as i64))
    }
}

/// Ground-truth MAC: `a*b + c` in wide integer arithmetic, ignoring the
/// cell grid and the accumulator width. Used as the reference for all error
/// analysis.
pub fn eval_pe_exact_oracle(config: &PeConfig, a: i64, b: i64, c: i64) -> Result<i64> {
    config.check_operand("a", a)?;
    config.check_operand("b", b)?;
    config.check_acc("c", c)?;
    Ok(a * b + c)
}
