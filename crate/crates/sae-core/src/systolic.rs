//! Cycle-accurate output-stationary systolic array.
//!
//! Operands stream through the grid while each PE accumulates one output
//! element in place: rows of `A` enter from the left edge skewed by row
//! index, columns of `B` from the top edge skewed by column index, and
//! every cycle each PE folds its operand pair into its accumulator and
//! forwards `a` rightward and `b` downward. A square `N x N x N` product
//! completes in exactly `3N - 2` cycles; the general `R x K` by `K x C`
//! case takes `R + C + K - 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pe::{build_pe, PeConfig, PeDescriptor};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from row slices; rows must be rectangular.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<IntMatrix> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if height == 0 || width == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(height * width);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} elements, expected {width}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(IntMatrix {
            rows: height,
            cols: width,
            data,
        })
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Shape and PE configuration of one array instance.
#[derive(Debug, Clone, Copy)]
pub struct ArrayConfig {
    /// PE grid rows (height of the result).
    pub rows: usize,
    /// PE grid columns (width of the result).
    pub cols: usize,
    /// Accumulation depth: `A` is `rows x inner`, `B` is `inner x cols`.
    pub inner: usize,
    pub pe: PeConfig,
}

impl ArrayConfig {
    pub fn square(n: usize, pe: PeConfig) -> ArrayConfig {
        ArrayConfig {
            rows: n,
            cols: n,
            inner: n,
            pe,
        }
    }

    /// Total cycles to drain the array: `R + C + K - 2`, which reduces to
    /// `3N - 2` in the square case.
    pub fn latency(&self) -> u64 {
        (self.rows + self.cols + self.inner - 2) as u64
    }

    fn validate(&self, a: &IntMatrix, b: &IntMatrix) -> Result<()> {
        self.pe.validate()?;
        if self.rows == 0 || self.cols == 0 || self.inner == 0 {
            return Err(Error::DimensionMismatch(
                "array dimensions must be >= 1".into(),
            ));
        }
        if a.rows() != self.rows || a.cols() != self.inner {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, expected {}x{}",
                a.rows(),
                a.cols(),
                self.rows,
                self.inner
            )));
        }
        if b.rows() != self.inner || b.cols() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "B is {}x{}, expected {}x{}",
                b.rows(),
                b.cols(),
                self.inner,
                self.cols
            )));
        }
        for (name, m) in [("A element", a), ("B element", b)] {
            for &v in m.data() {
                if v < self.pe.operand_min() || v > self.pe.operand_max() {
                    return Err(Error::OperandOutOfRange {
                        name,
                        value: v,
                        min: self.pe.operand_min(),
                        max: self.pe.operand_max(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Mutable simulation state: one accumulator per PE plus the operand wave
/// registers. Snapshots of this are what [`cycle_trace`] emits.
#[derive(Debug, Clone, Serialize)]
pub struct SaState {
    /// Cycles executed so far.
    pub cycle: u64,
    pub done: bool,
    /// Accumulator grid, rows x cols.
    pub accumulators: IntMatrix,
    /// Operand currently held at each PE's `a` (left) input, row-major;
    /// `None` is a bubble.
    pub a_wave: Vec<Option<i64>>,
    /// Operand currently held at each PE's `b` (top) input.
    pub b_wave: Vec<Option<i64>>,
    /// Number of MAC steps whose exact wide-integer value left the
    /// accumulator range (the wrapped data path diverges from unwrapped
    /// arithmetic past this point).
    pub overflow_events: u64,
}

struct Simulator<'m> {
    cfg: ArrayConfig,
    desc: PeDescriptor,
    a: &'m IntMatrix,
    b: &'m IntMatrix,
    state: SaState,
    // Wide-integer shadow accumulators for overflow detection.
    wide: Vec<i64>,
}

impl<'m> Simulator<'m> {
    fn new(cfg: ArrayConfig, a: &'m IntMatrix, b: &'m IntMatrix) -> Result<Simulator<'m>> {
        cfg.validate(a, b)?;
        let desc = build_pe(cfg.pe)?;
        let cells = cfg.rows * cfg.cols;
        Ok(Simulator {
            cfg,
            desc,
            a,
            b,
            state: SaState {
                cycle: 0,
                done: false,
                accumulators: IntMatrix::zeros(cfg.rows, cfg.cols),
                a_wave: vec![None; cells],
                b_wave: vec![None; cells],
                overflow_events: 0,
            },
            wide: vec![0; cells],
        })
    }

    /// Executes one clock cycle: shift the operand waves, then fire every
    /// PE holding a valid operand pair.
    fn step(&mut self) -> Result<()> {
        let (rows, cols, inner) = (self.cfg.rows, self.cfg.cols, self.cfg.inner);
        let t = self.state.cycle as i64;

        // Operands move right/down; edge PEs pick up the skewed streams.
        // Row i of A enters i cycles late, column j of B likewise, so the
        // pair for k meets PE (i, j) at cycle i + j + k.
        for i in (0..rows).rev() {
            for j in (0..cols).rev() {
                let idx = i * cols + j;
                self.state.a_wave[idx] = if j == 0 {
                    let k = t - i as i64;
                    (0..inner as i64)
                        .contains(&k)
                        .then(|| self.a[(i, k as usize)])
                } else {
                    self.state.a_wave[idx - 1]
                };
                self.state.b_wave[idx] = if i == 0 {
                    let k = t - j as i64;
                    (0..inner as i64)
                        .contains(&k)
                        .then(|| self.b[(k as usize, j)])
                } else {
                    self.state.b_wave[idx - cols]
                };
            }
        }

        for i in 0..rows {
            for j in 0..cols {
                let idx = i * cols + j;
                if let (Some(av), Some(bv)) = (self.state.a_wave[idx], self.state.b_wave[idx]) {
                    let acc = self.state.accumulators[(i, j)];
                    self.state.accumulators[(i, j)] = self.desc.eval(av, bv, acc)?;
                    self.wide[idx] += av * bv;
                    if self.wide[idx] < self.cfg.pe.acc_min()
                        || self.wide[idx] > self.cfg.pe.acc_max()
                    {
                        self.state.overflow_events += 1;
                    }
                }
            }
        }

        self.state.cycle += 1;
        self.state.done = self.state.cycle >= self.cfg.latency();
        Ok(())
    }
}

/// Runs a full matrix multiplication and returns the accumulated product
/// together with the cycle count.
pub fn simulate(cfg: ArrayConfig, a: &IntMatrix, b: &IntMatrix) -> Result<(IntMatrix, u64)> {
    let mut sim = Simulator::new(cfg, a, b)?;
    while !sim.state.done {
        sim.step()?;
    }
    Ok((sim.state.accumulators, sim.state.cycle))
}

/// Like [`simulate`] but snapshots the state after every cycle. The first
/// snapshot is the initial all-zero state (cycle 0); the last one carries
/// `done == true` and the same accumulators `simulate` returns.
pub fn cycle_trace(cfg: ArrayConfig, a: &IntMatrix, b: &IntMatrix) -> Result<Vec<SaState>> {
    let mut sim = Simulator::new(cfg, a, b)?;
    let mut snapshots = Vec::with_capacity(cfg.latency() as usize + 1);
    snapshots.push(sim.state.clone());
    while !sim.state.done {
        sim.step()?;
        snapshots.push(sim.state.clone());
    }
    Ok(snapshots)
}

/// Reference product: plain triple loop in wide integer arithmetic.
pub fn matmul_oracle(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut out = IntMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut acc = 0i64;
            for k in 0..a.cols() {
                acc += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Folds one output element through the same PE in stream order, `k = 0..K`.
/// The array introduces no error beyond this scalar chain.
pub fn scalar_fold(
    desc: &PeDescriptor,
    a: &IntMatrix,
    b: &IntMatrix,
    i: usize,
    j: usize,
) -> Result<i64> {
    let mut acc = 0i64;
    for k in 0..a.cols() {
        acc = desc.eval(a[(i, k)], b[(k, j)], acc)?;
    }
    Ok(acc)
}
