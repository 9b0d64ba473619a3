//! Run accounting: per-stage and total counters, the weighted cost model,
//! and dense-equivalent savings. The JSON shape of `SimReport` is a stable
//! interface consumed by the command-line tools.

use serde::{Deserialize, Serialize};

use crate::scalar::ScalarKind;
use crate::tensor::Shape3;

/// Abstract cost per operation class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub mac: f64,
    pub send: f64,
    pub receive: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { mac: 1.0, send: 1.0, receive: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounters {
    pub time_steps: u64,
    pub macs_executed: u64,
    pub macs_skipped: u64,
    pub coeff_sends: u64,
    pub pivot_broadcast_sends: u64,
    pub bus_receives: u64,
    pub steps_saved: u64,
}

impl StageCounters {
    pub fn accumulate(&mut self, other: &StageCounters) {
        self.time_steps += other.time_steps;
        self.macs_executed += other.macs_executed;
        self.macs_skipped += other.macs_skipped;
        self.coeff_sends += other.coeff_sends;
        self.pivot_broadcast_sends += other.pivot_broadcast_sends;
        self.bus_receives += other.bus_receives;
        self.steps_saved += other.steps_saved;
    }

    pub fn weighted_cost(&self, w: &CostWeights) -> f64 {
        w.mac * self.macs_executed as f64
            + w.send * (self.coeff_sends + self.pivot_broadcast_sends) as f64
            + w.receive * self.bus_receives as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: u8,
    #[serde(flatten)]
    pub counters: StageCounters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub problem: ProblemInfo,
    pub core: CoreInfo,
    pub weights: CostWeights,
    /// True when an epsilon zero test was in effect.
    pub lossy: bool,
    pub stages: Vec<StageReport>,
    pub totals: StageCounters,
    pub weighted_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub scalar_kind: ScalarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreInfo {
    pub p1: usize,
    pub p2: usize,
    pub p3: usize,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn shape(&self) -> Shape3 {
        Shape3 { n1: self.problem.n1, n2: self.problem.n2, n3: self.problem.n3 }
    }
}

/// Dense-equivalent counter totals for a problem shape, derived analytically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseCounts {
    pub time_steps: u64,
    pub macs: u64,
    pub coeff_sends: u64,
    pub pivot_broadcast_sends: u64,
}

pub fn dense_counts(shape: Shape3) -> DenseCounts {
    let (n1, n2, n3) = (shape.n1 as u64, shape.n2 as u64, shape.n3 as u64);
    let volume = n1 * n2 * n3;
    DenseCounts {
        time_steps: n1 + n2 + n3,
        macs: volume * (n1 + n2 + n3),
        // stage 1: n3 steps, n2*n3 line injections per step; stage 2:
        // n1 steps of n1*n2; stage 3: n2 steps of n2*n3
        coeff_sends: n3 * n2 * n3 + n1 * n1 * n2 + n2 * n2 * n3,
        pivot_broadcast_sends: 3 * volume,
    }
}

/// Savings relative to the dense-equivalent run plus the weighted cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsopSummary {
    pub macs_executed: u64,
    pub macs_skipped: u64,
    pub steps_saved: u64,
    pub dense: DenseCounts,
    pub coeff_sends_saved: u64,
    pub pivot_sends_saved: u64,
    pub weighted_cost: f64,
}

pub fn esop_stats(report: &SimReport) -> EsopSummary {
    let dense = dense_counts(report.shape());
    let t = &report.totals;
    EsopSummary {
        macs_executed: t.macs_executed,
        macs_skipped: t.macs_skipped,
        steps_saved: t.steps_saved,
        dense,
        coeff_sends_saved: dense.coeff_sends - t.coeff_sends,
        pivot_sends_saved: dense.pivot_broadcast_sends - t.pivot_broadcast_sends,
        weighted_cost: t.weighted_cost(&report.weights),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_counts_for_2x3x4() {
        let d = dense_counts(Shape3 { n1: 2, n2: 3, n3: 4 });
        assert_eq!(d.time_steps, 9);
        assert_eq!(d.macs, 24 * 9);
        assert_eq!(d.coeff_sends, 4 * 12 + 2 * 6 + 3 * 12);
        assert_eq!(d.pivot_broadcast_sends, 72);
    }

    #[test]
    fn report_json_round_trips() {
        let report = SimReport {
            problem: ProblemInfo { n1: 2, n2: 3, n3: 4, scalar_kind: ScalarKind::Real64 },
            core: CoreInfo { p1: 4, p2: 4, p3: 4 },
            weights: CostWeights::default(),
            lossy: false,
            stages: vec![StageReport { stage: 1, counters: StageCounters::default() }],
            totals: StageCounters::default(),
            weighted_cost: 0.0,
        };
        let json = report.to_json();
        let back: SimReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("\"time_steps\""));
        assert!(json.contains("\"macs_executed\""));
        assert!(json.contains("\"coeff_sends\""));
        assert!(json.contains("\"pivot_broadcast_sends\""));
        assert!(json.contains("\"steps_saved\""));
    }
}
