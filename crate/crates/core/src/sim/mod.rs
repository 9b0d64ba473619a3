//! Discrete-time simulation of the 3D cell grid.
//!
//! A loaded machine runs three stages under actuator control. Each time-step
//! has three barrier-separated phases: the active actuator replicates one
//! tagged coefficient vector across its face of the grid, the cells holding
//! the tagged element broadcast their stage-input register on the orthogonal
//! bus family, and every cell with both operands in hand folds one multiply
//! into its stage output. Cells never branch on coordinates; the machine owns
//! all routing.
//!
//! Stage outputs are committed per cell into slots keyed by summation row and
//! folded in row order when the stage completes. The fold order is therefore
//! independent of the stream schedule, which makes permutation retagging and
//! exact-zero skipping bit-preserving.

mod cell;
mod report;

pub use cell::{
    cell_compute, pivot_broadcast, ActuatorId, BusFamily, BusMessage, Cell, CellCounters,
    CellRegisters, ComputeOutcome, RegId, ZeroPolicy,
};
pub use report::{
    dense_counts, esop_stats, CoreInfo, CostWeights, DenseCounts, EsopSummary, ProblemInfo,
    SimReport, StageCounters, StageReport,
};

use crate::coeff::CoeffMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};
use crate::tensor::{Shape3, Tensor3};

/// Grid extents, cost weights, zero-test policy, and worker count.
#[derive(Debug, Clone)]
pub struct CoreConfig {
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
    pub weights: CostWeights,
    pub zero_policy: ZeroPolicy,
    pub workers: usize,
}

impl CoreConfig {
    pub fn new(p1: usize, p2: usize, p3: usize) -> Self {
        CoreConfig {
            p1,
            p2,
            p3,
            weights: CostWeights::default(),
            zero_policy: ZeroPolicy::Exact,
            workers: 1,
        }
    }

    /// Core sized exactly to the problem.
    pub fn fitted(shape: Shape3) -> Self {
        CoreConfig::new(shape.n1, shape.n2, shape.n3)
    }

    pub fn with_zero_policy(mut self, policy: ZeroPolicy) -> Self {
        self.zero_policy = policy;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_weights(mut self, weights: CostWeights) -> Self {
        self.weights = weights;
        self
    }
}

/// Streaming memory holding one tagged square matrix and a cursor.
#[derive(Debug, Clone)]
pub struct Actuator {
    pub id: ActuatorId,
    matrix: CoeffMatrix,
    cursor: usize,
}

impl Actuator {
    pub fn matrix(&self) -> &CoeffMatrix {
        &self.matrix
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    fn exhausted(&self) -> bool {
        self.cursor >= self.matrix.rows()
    }
}

#[derive(Debug, Clone, Copy)]
struct ActiveCell {
    cell_idx: usize,
    i1: usize,
    i2: usize,
    i3: usize,
}

/// What one public `step` call did.
#[derive(Debug, Clone, Copy)]
pub struct StepTrace {
    pub stage: u8,
    /// Coefficient row consumed at this cursor position.
    pub row: usize,
    /// True when the row was all-zero and elided without a time-step.
    pub skipped_step: bool,
    /// True when this call completed the stage (registers committed).
    pub stage_completed: bool,
    pub macs_executed: u64,
    pub macs_skipped: u64,
    pub coeff_sends: u64,
    pub pivot_broadcast_sends: u64,
    pub bus_receives: u64,
}

pub struct Machine {
    config: CoreConfig,
    shape: Shape3,
    kind: ScalarKind,
    cells: Vec<Cell>,
    active: Vec<ActiveCell>,
    actuators: [Actuator; 3],
    /// 0..=2 while running, 3 when all stages are done.
    stage_idx: usize,
    /// Per active cell, one contribution slot per summation row.
    pending: Vec<Vec<Option<Scalar>>>,
    counters: [StageCounters; 3],
}

/// Map a problem onto the grid: every element of `x` goes stationary into
/// its cell, the matrices go to their actuators with cursors at zero.
pub fn load(
    config: CoreConfig,
    x: &Tensor3,
    c1: &CoeffMatrix,
    c2: &CoeffMatrix,
    c3: &CoeffMatrix,
) -> Result<Machine> {
    let shape = x.shape();
    for c in [c1, c2, c3] {
        if !c.is_square() {
            return Err(Error::NonSquareMatrix { rows: c.rows(), cols: c.cols() });
        }
    }
    for (mode, c) in [(1u8, c1), (2, c2), (3, c3)] {
        if c.rows() != shape.extent(mode) {
            return Err(Error::ShapeMismatch(format!(
                "mode-{mode} matrix is {}x{} but the tensor extent is {}",
                c.rows(),
                c.cols(),
                shape.extent(mode)
            )));
        }
    }
    if config.p1 < shape.n1 || config.p2 < shape.n2 || config.p3 < shape.n3 {
        return Err(Error::CoreTooSmall {
            p1: config.p1,
            p2: config.p2,
            p3: config.p3,
            n1: shape.n1,
            n2: shape.n2,
            n3: shape.n3,
        });
    }

    let kind = x
        .kind()
        .promote(c1.scalar_kind())
        .promote(c2.scalar_kind())
        .promote(c3.scalar_kind());
    let x = x.cast(kind)?;
    let zero = kind.zero();

    let mut cells = vec![Cell::new(zero); config.p1 * config.p2 * config.p3];
    let mut active = Vec::with_capacity(shape.len());
    for i1 in 0..shape.n1 {
        for i2 in 0..shape.n2 {
            for i3 in 0..shape.n3 {
                let cell_idx = (i1 * config.p2 + i2) * config.p3 + i3;
                cells[cell_idx].regs.x = x.get(i1, i2, i3);
                active.push(ActiveCell { cell_idx, i1, i2, i3 });
            }
        }
    }

    let actuators = [
        Actuator { id: ActuatorId::Lateral, matrix: c3.cast(kind)?, cursor: 0 },
        Actuator { id: ActuatorId::Horizontal, matrix: c1.cast(kind)?, cursor: 0 },
        Actuator { id: ActuatorId::Frontal, matrix: c2.cast(kind)?, cursor: 0 },
    ];

    let pending = vec![vec![None; shape.n3]; active.len()];
    Ok(Machine {
        config,
        shape,
        kind,
        cells,
        active,
        actuators,
        stage_idx: 0,
        pending,
        counters: [StageCounters::default(); 3],
    })
}

/// Per-stage routing constants: which coordinate the stream addresses,
/// how many bus copies one coefficient element takes, and the broadcast bus
/// index of a cell.
struct StageGeometry {
    sum_len: usize,
    face_copies: u64,
    ybus_count: usize,
}

impl Machine {
    fn geometry(&self, stage: usize) -> StageGeometry {
        let s = self.shape;
        match stage {
            // coefficient rows ride lateral lines, pivots answer on horizontal
            0 => StageGeometry { sum_len: s.n3, face_copies: s.n2 as u64, ybus_count: s.n1 * s.n2 },
            // coefficient columns ride horizontal lines, pivots answer on lateral
            1 => StageGeometry { sum_len: s.n1, face_copies: s.n2 as u64, ybus_count: s.n2 * s.n3 },
            // coefficient rows ride lateral lines, pivots answer on frontal
            2 => StageGeometry { sum_len: s.n2, face_copies: s.n3 as u64, ybus_count: s.n1 * s.n3 },
            _ => unreachable!(),
        }
    }

    fn axis_coord(&self, stage: usize, cell: &ActiveCell) -> usize {
        match stage {
            0 => cell.i3,
            1 => cell.i1,
            2 => cell.i2,
            _ => unreachable!(),
        }
    }

    fn ybus_index(&self, stage: usize, cell: &ActiveCell) -> usize {
        let s = self.shape;
        match stage {
            0 => cell.i1 * s.n2 + cell.i2,
            1 => cell.i2 * s.n3 + cell.i3,
            2 => cell.i1 * s.n3 + cell.i3,
            _ => unreachable!(),
        }
    }

    pub fn shape(&self) -> Shape3 {
        self.shape
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        self.kind
    }

    pub fn config(&self) -> &CoreConfig {
        &self.config
    }

    pub fn actuators(&self) -> &[Actuator; 3] {
        &self.actuators
    }

    pub fn is_finished(&self) -> bool {
        self.stage_idx >= 3
    }

    /// Next stage to run (1-based), when any remains.
    pub fn next_stage(&self) -> Option<u8> {
        (self.stage_idx < 3).then_some(self.stage_idx as u8 + 1)
    }

    /// Cells inside the problem extents.
    pub fn active_cell_count(&self) -> usize {
        self.active.len()
    }

    /// Read a register plane back as a tensor over the problem extents.
    pub fn register_tensor(&self, reg: RegId) -> Tensor3 {
        let mut data = Vec::with_capacity(self.active.len());
        for a in &self.active {
            data.push(self.cells[a.cell_idx].regs.get(reg));
        }
        Tensor3::from_data(self.shape, self.kind, data).expect("registers share the machine kind")
    }

    /// Counters of every grid cell, active or idle, in grid order.
    pub fn cell_counters(&self) -> impl Iterator<Item = &CellCounters> {
        self.cells.iter().map(|c| &c.counters)
    }

    pub fn cell_counter_at(&self, i1: usize, i2: usize, i3: usize) -> &CellCounters {
        &self.cells[(i1 * self.config.p2 + i2) * self.config.p3 + i3].counters
    }

    pub fn waiting_at(&self, i1: usize, i2: usize, i3: usize) -> bool {
        self.cells[(i1 * self.config.p2 + i2) * self.config.p3 + i3].regs.waiting
    }

    /// Execute one cursor position of the active stage: either a full
    /// time-step or the elision of an all-zero coefficient vector.
    pub fn step(&mut self) -> Result<StepTrace> {
        if self.is_finished() {
            return Err(Error::MachineFinished);
        }
        let stage = self.stage_idx;
        let geo = self.geometry(stage);
        let zero = self.config.zero_policy;
        let actuator_id = self.actuators[stage].id;
        let cursor = self.actuators[stage].cursor;
        let row = self.actuators[stage].matrix.tags()[cursor];

        let vector: Vec<Scalar> = self.actuators[stage].matrix.row(row).to_vec();
        let all_zero = vector.iter().all(|v| zero.is_zero(*v));

        if all_zero {
            // never put on the wire; the streamed tag is withheld too
            let skipped = self.active.len() as u64;
            self.counters[stage].steps_saved += 1;
            self.counters[stage].macs_skipped += skipped;
            self.actuators[stage].cursor += 1;
            let stage_completed = self.finalize_if_exhausted(stage, geo.sum_len)?;
            return Ok(StepTrace {
                stage: stage as u8 + 1,
                row,
                skipped_step: true,
                stage_completed,
                macs_executed: 0,
                macs_skipped: skipped,
                coeff_sends: 0,
                pivot_broadcast_sends: 0,
                bus_receives: 0,
            });
        }

        // actuator phase: replicate the tagged vector across the face,
        // withholding zero elements at untagged positions
        let sent: Vec<bool> =
            vector.iter().enumerate().map(|(k, v)| !zero.is_zero(*v) || k == row).collect();
        let coeff_sends = geo.face_copies * sent.iter().filter(|s| **s).count() as u64;

        // pivot phase: tagged cells offer their stage-input register
        let mut bus: Vec<Option<Scalar>> = vec![None; geo.ybus_count];
        let mut pivot_sends = 0u64;
        for a in &self.active {
            if self.axis_coord(stage, a) != row {
                continue;
            }
            let msg = BusMessage { value: vector[row], tag: true, actuator: actuator_id };
            if let Some(value) = pivot_broadcast(&self.cells[a.cell_idx].regs, &msg, &zero) {
                bus[self.ybus_index(stage, a)] = Some(value);
                self.cells[a.cell_idx].counters.sends += 1;
                pivot_sends += 1;
            }
        }

        // compute phase: every active cell, in parallel
        let outcomes = self.compute_phase(stage, row, &vector, &sent, &bus, actuator_id);

        // commit phase: apply outcomes in active order
        let mut macs = 0u64;
        let mut skips = 0u64;
        let mut receives = 0u64;
        for (pos, outcome) in outcomes.into_iter().enumerate() {
            let cell = &mut self.cells[self.active[pos].cell_idx];
            match outcome.contribution {
                Some(contribution) => {
                    self.pending[pos][row] = Some(contribution);
                    cell.counters.macs += 1;
                    macs += 1;
                }
                None => {
                    cell.counters.skips += 1;
                    skips += 1;
                }
            }
            cell.counters.receives += outcome.receives;
            receives += outcome.receives;
            cell.regs.waiting = outcome.waiting;
        }

        let c = &mut self.counters[stage];
        c.time_steps += 1;
        c.macs_executed += macs;
        c.macs_skipped += skips;
        c.coeff_sends += coeff_sends;
        c.pivot_broadcast_sends += pivot_sends;
        c.bus_receives += receives;

        self.actuators[stage].cursor += 1;
        let stage_completed = self.finalize_if_exhausted(stage, geo.sum_len)?;

        Ok(StepTrace {
            stage: stage as u8 + 1,
            row,
            skipped_step: false,
            stage_completed,
            macs_executed: macs,
            macs_skipped: skips,
            coeff_sends,
            pivot_broadcast_sends: pivot_sends,
            bus_receives: receives,
        })
    }

    fn compute_phase(
        &self,
        stage: usize,
        row: usize,
        vector: &[Scalar],
        sent: &[bool],
        bus: &[Option<Scalar>],
        actuator_id: ActuatorId,
    ) -> Vec<ComputeOutcome> {
        let zero = self.config.zero_policy;
        let one_cell = |a: &ActiveCell| {
            let coord = self.axis_coord(stage, a);
            let msg = sent[coord]
                .then(|| BusMessage { value: vector[coord], tag: coord == row, actuator: actuator_id });
            // the pivot reads its own register, not its own broadcast
            let operand = if coord == row { None } else { bus[self.ybus_index(stage, a)] };
            cell_compute(&self.cells[a.cell_idx].regs, msg.as_ref(), operand, &zero)
        };

        let workers = self.config.workers.max(1);
        if workers == 1 || self.active.len() < 2 * workers {
            return self.active.iter().map(one_cell).collect();
        }

        let mut outcomes: Vec<ComputeOutcome> = vec![ComputeOutcome::default(); self.active.len()];
        let chunk_len = self.active.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for (chunk_idx, out_chunk) in outcomes.chunks_mut(chunk_len).enumerate() {
                let start = chunk_idx * chunk_len;
                let one_cell = &one_cell;
                scope.spawn(move || {
                    for (offset, slot) in out_chunk.iter_mut().enumerate() {
                        *slot = one_cell(&self.active[start + offset]);
                    }
                });
            }
        });
        outcomes
    }

    /// When the actuator has streamed its whole schedule, fold the pending
    /// contributions in summation-row order into the stage-output register
    /// and hand control to the next actuator.
    fn finalize_if_exhausted(&mut self, stage: usize, sum_len: usize) -> Result<bool> {
        if !self.actuators[stage].exhausted() {
            return Ok(false);
        }
        let out_reg = self.actuators[stage].id.output_register();
        for (pos, slots) in self.pending.iter().enumerate() {
            debug_assert_eq!(slots.len(), sum_len);
            let mut acc = self.kind.zero();
            for slot in slots {
                if let Some(v) = slot {
                    acc = acc + *v;
                }
            }
            self.cells[self.active[pos].cell_idx].regs.set(out_reg, acc);
        }
        self.stage_idx += 1;
        if self.stage_idx < 3 {
            let next_len = self.geometry(self.stage_idx).sum_len;
            for slots in &mut self.pending {
                slots.clear();
                slots.resize(next_len, None);
            }
        }
        Ok(true)
    }

    /// Run one full stage (1, 2, or 3); stages must run in order.
    pub fn run_stage(&mut self, stage: u8) -> Result<StageReport> {
        if self.is_finished() {
            return Err(Error::MachineFinished);
        }
        let expected = self.stage_idx as u8 + 1;
        if stage != expected {
            return Err(Error::OutOfOrderStage { requested: stage, expected });
        }
        loop {
            let trace = self.step()?;
            if trace.stage_completed {
                break;
            }
        }
        Ok(StageReport { stage, counters: self.counters[(stage - 1) as usize] })
    }

    /// Run every remaining stage and return the final tensor with the report.
    pub fn run_transform(&mut self) -> Result<(Tensor3, SimReport)> {
        while let Some(stage) = self.next_stage() {
            self.run_stage(stage)?;
        }
        Ok((self.register_tensor(RegId::Xddd), self.report()))
    }

    pub fn report(&self) -> SimReport {
        let mut totals = StageCounters::default();
        let mut stages = Vec::with_capacity(3);
        for (idx, counters) in self.counters.iter().enumerate() {
            totals.accumulate(counters);
            stages.push(StageReport { stage: idx as u8 + 1, counters: *counters });
        }
        SimReport {
            problem: ProblemInfo {
                n1: self.shape.n1,
                n2: self.shape.n2,
                n3: self.shape.n3,
                scalar_kind: self.kind,
            },
            core: CoreInfo { p1: self.config.p1, p2: self.config.p2, p3: self.config.p3 },
            weights: self.config.weights,
            lossy: self.config.zero_policy.lossy(),
            stages,
            totals,
            weighted_cost: totals.weighted_cost(&self.config.weights),
        }
    }
}

#[cfg(test)]
mod tests;
