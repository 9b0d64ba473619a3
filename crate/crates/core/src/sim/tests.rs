use super::*;
use crate::coeff::{make_coeff, CoeffMatrix, Normalization, TransformKind};
use crate::gen::{random_matrix, random_tensor};
use crate::kernels::{gemt_elementwise, gemt_staged_outer, GemtProblem};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

fn identity(n: usize) -> CoeffMatrix {
    CoeffMatrix::custom(Matrix::identity(n, ScalarKind::Real64))
}

fn dht(n: usize) -> CoeffMatrix {
    make_coeff(TransformKind::Dht, Normalization::Unnormalized, n).unwrap()
}

fn dense_problem(n1: usize, n2: usize, n3: usize, seed: u64) -> (Tensor3, CoeffMatrix, CoeffMatrix, CoeffMatrix) {
    let shape = Shape3::new(n1, n2, n3).unwrap();
    let x = random_tensor(shape, ScalarKind::Real64, seed, 0.0);
    (x, dht(n1), dht(n2), dht(n3))
}

#[test]
fn load_counts_active_and_idle_cells() {
    let (x, c1, c2, c3) = dense_problem(2, 3, 4, 1);
    let machine = load(CoreConfig::new(4, 4, 4), &x, &c1, &c2, &c3).unwrap();
    assert_eq!(machine.active_cell_count(), 24);
    assert_eq!(machine.cell_counters().count(), 64);
}

#[test]
fn load_rejects_rectangular_matrices() {
    let (x, c1, c2, _) = dense_problem(2, 3, 4, 2);
    let rect = CoeffMatrix::custom(random_matrix(3, 4, ScalarKind::Real64, 3));
    match load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &rect) {
        Err(Error::NonSquareMatrix { rows: 3, cols: 4 }) => {}
        other => panic!("expected square-matrix rejection, got {other:?}"),
    }
}

#[test]
fn load_rejects_undersized_core() {
    let (x, c1, c2, c3) = dense_problem(2, 3, 4, 4);
    assert!(matches!(
        load(CoreConfig::new(2, 3, 3), &x, &c1, &c2, &c3),
        Err(Error::CoreTooSmall { .. })
    ));
}

#[test]
fn loaded_registers_read_back_as_the_input() {
    let (x, c1, c2, c3) = dense_problem(2, 3, 4, 5);
    let machine = load(CoreConfig::new(5, 5, 5), &x, &c1, &c2, &c3).unwrap();
    assert!(machine.register_tensor(RegId::X).bitwise_eq(&x));
}

#[test]
fn dense_stage_one_step_counts() {
    let (x, c1, c2, c3) = dense_problem(2, 3, 4, 6);
    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    let trace = machine.step().unwrap();
    // face replication covers the n2 x n3 face; one pivot per (i1, i2)
    assert_eq!(trace.coeff_sends, 12);
    assert_eq!(trace.pivot_broadcast_sends, 6);
    assert_eq!(trace.macs_executed, 24);
    assert_eq!(trace.macs_skipped, 0);
}

#[test]
fn zero_pivot_column_silences_a_step() {
    let shape = Shape3::new(2, 3, 4).unwrap();
    let mut x = random_tensor(shape, ScalarKind::Real64, 7, 0.0);
    for i1 in 0..2 {
        for i2 in 0..3 {
            x.set(i1, i2, 0, Scalar::Real(0.0));
        }
    }
    let (_, c1, c2, c3) = dense_problem(2, 3, 4, 7);
    let mut machine = load(CoreConfig::fitted(shape), &x, &c1, &c2, &c3).unwrap();
    let before = machine.register_tensor(RegId::Xd);
    let trace = machine.step().unwrap();
    assert_eq!(trace.pivot_broadcast_sends, 0);
    assert_eq!(trace.macs_executed, 0);
    assert!(!trace.skipped_step, "the coefficient vector itself is dense");
    // the output register plane is untouched so far
    assert!(machine.register_tensor(RegId::Xd).bitwise_eq(&before));
    // downstream cells are parked until the next coefficient arrives
    assert!(machine.waiting_at(0, 0, 1));
    let trace = machine.step().unwrap();
    assert!(trace.macs_executed > 0);
    assert!(!machine.waiting_at(0, 0, 1));
}

#[test]
fn all_zero_coefficient_vector_saves_the_step() {
    let shape = Shape3::new(2, 2, 4).unwrap();
    let x = random_tensor(shape, ScalarKind::Real64, 8, 0.0);
    let mut m = Matrix::identity(4, ScalarKind::Real64);
    for c in 0..4 {
        m.set(1, c, Scalar::Real(0.0));
    }
    let c3 = CoeffMatrix::custom(m);
    let mut machine = load(CoreConfig::fitted(shape), &x, &identity(2), &identity(2), &c3).unwrap();
    machine.step().unwrap();
    let trace = machine.step().unwrap();
    assert!(trace.skipped_step);
    assert_eq!(trace.coeff_sends, 0);
    assert_eq!(trace.pivot_broadcast_sends, 0);
    let report = machine.run_stage(1).unwrap();
    assert_eq!(report.counters.steps_saved, 1);
    assert_eq!(report.counters.time_steps, 3);
}

#[test]
fn stage_one_with_identity_copies_input() {
    let (x, c1, c2, _) = dense_problem(2, 3, 4, 9);
    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &identity(4)).unwrap();
    let report = machine.run_stage(1).unwrap();
    assert_eq!(report.counters.time_steps, 4);
    assert!(machine.register_tensor(RegId::Xd).bitwise_eq(&x));
}

#[test]
fn stage_registers_match_the_trace_oracle_bitwise() {
    let (x, c1, c2, c3) = dense_problem(3, 2, 2, 10);
    let p = GemtProblem::forward(x.clone(), c1.clone(), c2.clone(), c3.clone()).unwrap();
    let oracle = gemt_staged_outer(&p).unwrap();

    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    machine.run_stage(1).unwrap();
    assert!(machine.register_tensor(RegId::Xd).bitwise_eq(&oracle.stages[0].result));
    machine.run_stage(2).unwrap();
    assert!(machine.register_tensor(RegId::Xdd).bitwise_eq(&oracle.stages[1].result));
    machine.run_stage(3).unwrap();
    assert!(machine.register_tensor(RegId::Xddd).bitwise_eq(&oracle.stages[2].result));
}

#[test]
fn zero_row_in_custom_matrix_shortens_the_stage() {
    let shape = Shape3::new(2, 2, 4).unwrap();
    let x = random_tensor(shape, ScalarKind::Real64, 11, 0.0);
    let mut m = random_matrix(4, 4, ScalarKind::Real64, 11);
    for c in 0..4 {
        m.set(2, c, Scalar::Real(0.0));
    }
    let c3 = CoeffMatrix::custom(m);
    let mut machine = load(CoreConfig::fitted(shape), &x, &identity(2), &identity(2), &c3).unwrap();
    let report = machine.run_stage(1).unwrap();
    assert_eq!(report.counters.time_steps, 3);
    assert_eq!(report.counters.steps_saved, 1);
}

#[test]
fn out_of_order_stage_is_rejected() {
    let (x, c1, c2, c3) = dense_problem(2, 2, 2, 12);
    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    assert!(matches!(machine.run_stage(2), Err(Error::OutOfOrderStage { requested: 2, expected: 1 })));
    machine.run_stage(1).unwrap();
    assert!(matches!(machine.run_stage(3), Err(Error::OutOfOrderStage { requested: 3, expected: 2 })));
}

#[test]
fn dense_transform_hits_the_step_and_mac_laws() {
    let (x, c1, c2, c3) = dense_problem(2, 3, 4, 13);
    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    let (output, report) = machine.run_transform().unwrap();
    assert_eq!(report.totals.time_steps, 9);
    assert_eq!(report.totals.macs_executed, 216);
    assert_eq!(report.totals.macs_skipped, 0);

    let p = GemtProblem::forward(x, c1, c2, c3).unwrap();
    let oracle = gemt_elementwise(&p).unwrap();
    let rel = output.max_abs_diff(&oracle) / oracle.max_magnitude().max(1.0);
    assert!(rel <= 1e-12, "rel error {rel}");
}

#[test]
fn zero_tensor_executes_no_macs_but_all_steps() {
    let shape = Shape3::new(2, 3, 4).unwrap();
    let x = Tensor3::zeros(shape, ScalarKind::Real64);
    let (_, c1, c2, c3) = dense_problem(2, 3, 4, 14);
    let mut machine = load(CoreConfig::fitted(shape), &x, &c1, &c2, &c3).unwrap();
    let (output, report) = machine.run_transform().unwrap();
    assert_eq!(report.totals.time_steps, 9);
    assert_eq!(report.totals.macs_executed, 0);
    assert!(output.data().iter().all(|s| s.is_exact_zero()));
}

#[test]
fn machine_cannot_step_after_finishing() {
    let (x, c1, c2, c3) = dense_problem(1, 1, 1, 15);
    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    machine.run_transform().unwrap();
    assert!(matches!(machine.step(), Err(Error::MachineFinished)));
    assert!(matches!(machine.run_stage(1), Err(Error::MachineFinished)));
}

#[test]
fn retagging_changes_traces_but_not_results() {
    let (x, c1, c2, c3) = dense_problem(3, 4, 2, 16);
    let mut base = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    let (base_out, base_report) = base.run_transform().unwrap();

    let c1r = c1.retag(&[2, 0, 1]).unwrap();
    let c2r = c2.retag(&[3, 2, 1, 0]).unwrap();
    let c3r = c3.retag(&[1, 0]).unwrap();
    let mut permuted = load(CoreConfig::fitted(x.shape()), &x, &c1r, &c2r, &c3r).unwrap();
    let first = permuted.step().unwrap();
    assert_eq!(first.row, 1, "schedule starts at the retagged row");
    let (out, report) = {
        while permuted.next_stage().is_some() {
            permuted.step().unwrap();
        }
        (permuted.register_tensor(RegId::Xddd), permuted.report())
    };
    assert!(out.bitwise_eq(&base_out));
    assert_eq!(report.totals.macs_executed, base_report.totals.macs_executed);
}

#[test]
fn idle_cells_contribute_nothing() {
    let (x, c1, c2, c3) = dense_problem(2, 2, 2, 17);
    let mut machine = load(CoreConfig::new(3, 4, 5), &x, &c1, &c2, &c3).unwrap();
    machine.run_transform().unwrap();
    for i1 in 0..3 {
        for i2 in 0..4 {
            for i3 in 0..5 {
                if i1 < 2 && i2 < 2 && i3 < 2 {
                    continue;
                }
                let c = machine.cell_counter_at(i1, i2, i3);
                assert_eq!(c, &CellCounters::default(), "idle cell ({i1},{i2},{i3}) moved");
            }
        }
    }
}

#[test]
fn sparse_run_is_bitwise_equal_to_dense_reference() {
    let shape = Shape3::new(4, 3, 5).unwrap();
    let x = random_tensor(shape, ScalarKind::Real64, 18, 0.6);
    let (_, c1, c2, c3) = dense_problem(4, 3, 5, 18);

    let mut skipping = load(CoreConfig::fitted(shape), &x, &c1, &c2, &c3).unwrap();
    let (out_skip, report_skip) = skipping.run_transform().unwrap();

    let dense_cfg = CoreConfig::fitted(shape).with_zero_policy(ZeroPolicy::Disabled);
    let mut dense = load(dense_cfg, &x, &c1, &c2, &c3).unwrap();
    let (out_dense, report_dense) = dense.run_transform().unwrap();

    assert!(out_skip.bitwise_eq(&out_dense));
    assert!(report_skip.totals.macs_executed < report_dense.totals.macs_executed);
    assert_eq!(
        report_skip.totals.macs_executed + report_skip.totals.macs_skipped,
        report_dense.totals.macs_executed
    );
}

#[test]
fn worker_count_does_not_change_bytes() {
    let shape = Shape3::new(4, 4, 4).unwrap();
    let x = random_tensor(shape, ScalarKind::Complex128, 19, 0.4);
    let c = |n| make_coeff(TransformKind::Dft, Normalization::Unnormalized, n).unwrap();
    let (c1, c2, c3) = (c(4), c(4), c(4));

    let mut reports = Vec::new();
    let mut outputs = Vec::new();
    for workers in [1, 2, 4, 7] {
        let cfg = CoreConfig::fitted(shape).with_workers(workers);
        let mut machine = load(cfg, &x, &c1, &c2, &c3).unwrap();
        let (out, report) = machine.run_transform().unwrap();
        outputs.push(out);
        reports.push(report.to_json());
    }
    for i in 1..reports.len() {
        assert_eq!(reports[0], reports[i]);
        assert!(outputs[0].bitwise_eq(&outputs[i]));
    }
}

#[test]
fn epsilon_policy_marks_run_lossy() {
    let shape = Shape3::new(2, 2, 2).unwrap();
    let mut x = random_tensor(shape, ScalarKind::Real64, 20, 0.0);
    x.set(0, 0, 0, Scalar::Real(1e-15));
    let (_, c1, c2, c3) = dense_problem(2, 2, 2, 20);

    let cfg = CoreConfig::fitted(shape).with_zero_policy(ZeroPolicy::Epsilon(1e-9));
    let mut machine = load(cfg, &x, &c1, &c2, &c3).unwrap();
    let (_, report) = machine.run_transform().unwrap();
    assert!(report.lossy);
    assert!(report.totals.macs_skipped > 0);
}

#[test]
fn esop_stats_reports_zero_savings_on_dense_runs() {
    let (x, c1, c2, c3) = dense_problem(3, 3, 3, 21);
    let mut machine = load(CoreConfig::fitted(x.shape()), &x, &c1, &c2, &c3).unwrap();
    let (_, report) = machine.run_transform().unwrap();
    let stats = esop_stats(&report);
    assert_eq!(stats.macs_skipped, 0);
    assert_eq!(stats.steps_saved, 0);
    assert_eq!(stats.coeff_sends_saved, 0);
    assert_eq!(stats.pivot_sends_saved, 0);
    assert_eq!(stats.dense.macs, report.totals.macs_executed);
    assert_eq!(stats.dense.coeff_sends, report.totals.coeff_sends);
    assert_eq!(stats.dense.pivot_broadcast_sends, report.totals.pivot_broadcast_sends);
    assert!(stats.weighted_cost > 0.0);
}

#[test]
fn one_zero_pivot_element_skips_a_whole_bus_row() {
    let shape = Shape3::new(2, 3, 4).unwrap();
    let mut x = random_tensor(shape, ScalarKind::Real64, 22, 0.0);
    x.set(1, 2, 0, Scalar::Real(0.0));
    let (_, c1, c2, c3) = dense_problem(2, 3, 4, 22);
    let mut machine = load(CoreConfig::fitted(shape), &x, &c1, &c2, &c3).unwrap();
    let report = machine.run_stage(1).unwrap();
    assert!(report.counters.macs_skipped >= 4, "the silent pivot parks its whole row of cells");
}

#[test]
fn zero_rows_map_to_saved_steps_in_stats() {
    let shape = Shape3::new(2, 2, 4).unwrap();
    let x = random_tensor(shape, ScalarKind::Real64, 23, 0.0);
    let mut m = random_matrix(4, 4, ScalarKind::Real64, 23);
    for c in 0..4 {
        m.set(1, c, Scalar::Real(0.0));
        m.set(3, c, Scalar::Real(0.0));
    }
    let c3 = CoeffMatrix::custom(m);
    let mut machine = load(CoreConfig::fitted(shape), &x, &identity(2), &identity(2), &c3).unwrap();
    let (_, report) = machine.run_transform().unwrap();
    assert_eq!(esop_stats(&report).steps_saved, 2);
    assert_eq!(report.totals.time_steps, (2 + 2 + 4) - 2);
}
