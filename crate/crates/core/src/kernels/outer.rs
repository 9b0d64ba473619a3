//! Staged outer-product engine: each stage is a rank-N update of every slice
//! in its partition, one rank-1 update per summation step. The per-step
//! traces are the golden schedule the machine must reproduce bit for bit.
//!
//! Contributions are committed to per-element slots keyed by summation row
//! and folded in row order once the stage completes, so the result does not
//! depend on the order rows were streamed in. Contributions with an exactly
//! zero operand are never stored; with accumulators starting at +0.0 this is
//! bit-identical to adding them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{Shape3, Tensor3};

use super::{GemtProblem, ResolvedProblem};

/// One summation step of one stage.
#[derive(Debug, Clone)]
pub struct OuterStep {
    /// Row of the coefficient matrix consumed by this step.
    pub row: usize,
    /// True when the whole coefficient row was zero and the step was elided.
    pub skipped_step: bool,
    /// The streamed coefficient vector (shared by every slice).
    pub coeff_vec: Vec<Scalar>,
    /// Per slice, the tensor-side vector the pivot column supplies.
    pub tensor_vecs: Vec<Vec<Scalar>>,
    /// Multiply-adds with both operands nonzero.
    pub executed: u64,
    /// Multiply-adds elided because either operand was exactly zero.
    pub skipped: u64,
}

/// Full record of one stage: per-step traces plus the stage result.
#[derive(Debug, Clone)]
pub struct StageTrace {
    pub stage: u8,
    pub slice_count: usize,
    pub update_rows: usize,
    pub update_cols: usize,
    pub steps: Vec<OuterStep>,
    pub result: Tensor3,
}

impl StageTrace {
    pub fn executed_macs(&self) -> u64 {
        self.steps.iter().map(|s| s.executed).sum()
    }

    /// Elided multiply-adds, counting full blocks for elided steps.
    pub fn skipped_macs(&self) -> u64 {
        self.steps.iter().map(|s| s.skipped).sum()
    }

    pub fn time_steps(&self) -> u64 {
        self.steps.iter().filter(|s| !s.skipped_step).count() as u64
    }

    pub fn steps_saved(&self) -> u64 {
        self.steps.iter().filter(|s| s.skipped_step).count() as u64
    }

    /// Tensor-side vector entries that are exactly zero over non-elided
    /// steps: each one is a pivot broadcast the machine suppresses.
    pub fn zero_operand_entries(&self) -> u64 {
        self.steps
            .iter()
            .filter(|s| !s.skipped_step)
            .map(|s| {
                s.tensor_vecs
                    .iter()
                    .flat_map(|v| v.iter())
                    .filter(|x| x.is_exact_zero())
                    .count() as u64
            })
            .sum()
    }

    /// Tensor-side vector entries that are nonzero: the pivot broadcasts the
    /// machine performs.
    pub fn nonzero_operand_entries(&self) -> u64 {
        self.steps
            .iter()
            .filter(|s| !s.skipped_step)
            .map(|s| {
                s.tensor_vecs
                    .iter()
                    .flat_map(|v| v.iter())
                    .filter(|x| !x.is_exact_zero())
                    .count() as u64
            })
            .sum()
    }

    /// Coefficient elements put on buses over non-elided steps: nonzero
    /// entries plus the tagged pivot entry even when zero.
    pub fn sent_coeff_entries(&self) -> u64 {
        self.steps
            .iter()
            .filter(|s| !s.skipped_step)
            .map(|s| {
                s.coeff_vec
                    .iter()
                    .enumerate()
                    .filter(|(k, v)| !v.is_exact_zero() || *k == s.row)
                    .count() as u64
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct OuterRun {
    pub output: Tensor3,
    pub stages: [StageTrace; 3],
}

impl OuterRun {
    pub fn executed_macs(&self) -> u64 {
        self.stages.iter().map(|s| s.executed_macs()).sum()
    }

    pub fn skipped_macs(&self) -> u64 {
        self.stages.iter().map(|s| s.skipped_macs()).sum()
    }

    pub fn time_steps(&self) -> u64 {
        self.stages.iter().map(|s| s.time_steps()).sum()
    }
}

/// Accumulates one stage of rank-1 updates into row-keyed slots.
struct SlotBoard {
    slices: usize,
    rows: usize,
    cols: usize,
    sum_len: usize,
    slots: Vec<Option<Scalar>>,
}

impl SlotBoard {
    fn new(slices: usize, rows: usize, cols: usize, sum_len: usize) -> Self {
        SlotBoard { slices, rows, cols, sum_len, slots: vec![None; slices * rows * cols * sum_len] }
    }

    fn put(&mut self, slice: usize, r: usize, c: usize, sum_row: usize, value: Scalar) {
        let idx = ((slice * self.rows + r) * self.cols + c) * self.sum_len + sum_row;
        debug_assert!(self.slots[idx].is_none(), "one contribution per slot");
        self.slots[idx] = Some(value);
    }

    /// Fold an element's contributions in summation-row order.
    fn fold(&self, slice: usize, r: usize, c: usize, init: Scalar) -> Scalar {
        let base = ((slice * self.rows + r) * self.cols + c) * self.sum_len;
        let mut acc = init;
        for s in 0..self.sum_len {
            if let Some(v) = self.slots[base + s] {
                acc = acc + v;
            }
        }
        acc
    }
}

pub fn gemt_staged_outer(p: &GemtProblem) -> Result<OuterRun> {
    let r = p.resolve()?;
    let in_shape = r.x.shape();

    // Stage chain: contract mode 3 over horizontal slices, mode 1 over
    // horizontal slices with the coefficient column as left operand, then
    // mode 2 over the resliced tensor.
    let dot_x = run_stage(&r, 1, &r.x, in_shape)?;
    let ddot_x = run_stage(&r, 2, &dot_x.result, dot_x.result.shape())?;
    let final_stage = run_stage(&r, 3, &ddot_x.result, ddot_x.result.shape())?;

    let output = final_stage.result.clone();
    Ok(OuterRun { output, stages: [dot_x, ddot_x, final_stage] })
}

fn run_stage(r: &ResolvedProblem, stage: u8, input: &Tensor3, in_shape: Shape3) -> Result<StageTrace> {
    let (matrix, slice_count, update_rows) = match stage {
        1 => (&r.m3, in_shape.n2, in_shape.n1),
        2 => (&r.m1, in_shape.n2, r.m1.cols()),
        3 => (&r.m2, in_shape.n3, in_shape.n1),
        _ => unreachable!(),
    };
    let sum_len = matrix.rows();
    let expected = match stage {
        1 => in_shape.n3,
        2 => in_shape.n1,
        3 => in_shape.n2,
        _ => unreachable!(),
    };
    if sum_len != expected {
        return Err(Error::ShapeMismatch(format!(
            "stage {stage} summation length {sum_len} does not match tensor extent {expected}"
        )));
    }
    let update_cols = match stage {
        1 | 3 => matrix.cols(),
        2 => in_shape.n3,
        _ => unreachable!(),
    };

    let mut board = SlotBoard::new(slice_count, update_rows, update_cols, sum_len);
    let mut steps = Vec::with_capacity(sum_len);

    for &row in matrix.tags() {
        let coeff_vec: Vec<Scalar> = matrix.row(row).to_vec();
        if coeff_vec.iter().all(|s| s.is_exact_zero()) {
            steps.push(OuterStep {
                row,
                skipped_step: true,
                coeff_vec,
                tensor_vecs: Vec::new(),
                executed: 0,
                skipped: (slice_count * update_rows * update_cols) as u64,
            });
            continue;
        }

        let mut tensor_vecs = Vec::with_capacity(slice_count);
        let mut executed = 0u64;
        let mut skipped = 0u64;

        for slice in 0..slice_count {
            let tensor_vec: Vec<Scalar> = match stage {
                // column `row` of horizontal slice `slice`
                1 => (0..in_shape.n1).map(|i1| input.get(i1, slice, row)).collect(),
                // row `row` of horizontal slice `slice`
                2 => (0..in_shape.n3).map(|i3| input.get(row, slice, i3)).collect(),
                // column `row` of lateral slice `slice`
                3 => (0..in_shape.n1).map(|i1| input.get(i1, row, slice)).collect(),
                _ => unreachable!(),
            };

            // rank-1 update; stage 2 places the coefficient vector on the left
            for i in 0..update_rows {
                for j in 0..update_cols {
                    let (a, b) = match stage {
                        1 | 3 => (tensor_vec[i], coeff_vec[j]),
                        2 => (tensor_vec[j], coeff_vec[i]),
                        _ => unreachable!(),
                    };
                    if a.is_exact_zero() || b.is_exact_zero() {
                        skipped += 1;
                    } else {
                        board.put(slice, i, j, row, a * b);
                        executed += 1;
                    }
                }
            }
            tensor_vecs.push(tensor_vec);
        }

        steps.push(OuterStep { row, skipped_step: false, coeff_vec, tensor_vecs, executed, skipped });
    }

    // fold slots into the stage result
    let out_shape = match stage {
        1 => Shape3::new(in_shape.n1, in_shape.n2, update_cols)?,
        2 => Shape3::new(update_rows, in_shape.n2, in_shape.n3)?,
        3 => Shape3::new(in_shape.n1, update_cols, in_shape.n3)?,
        _ => unreachable!(),
    };
    let mut result = Tensor3::zeros(out_shape, r.kind);
    for slice in 0..slice_count {
        for i in 0..update_rows {
            for j in 0..update_cols {
                let init = if stage == 3 { r.y_init.get(i, j, slice) } else { r.kind.zero() };
                let value = board.fold(slice, i, j, init);
                match stage {
                    1 => result.set(i, slice, j, value),
                    2 => result.set(i, slice, j, value),
                    3 => result.set(i, j, slice, value),
                    _ => unreachable!(),
                }
            }
        }
    }

    Ok(StageTrace { stage, slice_count, update_rows, update_cols, steps, result })
}
