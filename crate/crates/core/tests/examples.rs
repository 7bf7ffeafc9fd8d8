#[path = "../examples/ingest_and_flips.rs"]
mod ingest_and_flips;
#[path = "../examples/prioritise_change_set.rs"]
mod prioritise_change_set;
#[path = "../examples/heatmap_flakiness.rs"]
mod heatmap_flakiness;
#[path = "../examples/alpha_sweep.rs"]
mod alpha_sweep;
#[path = "../examples/incremental_updates.rs"]
mod incremental_updates;
#[path = "../examples/resource_schedule.rs"]
mod resource_schedule;
#[path = "../examples/synth_history.rs"]
mod synth_history;
#[path = "../examples/compare_methods.rs"]
mod compare_methods;

#[test]
fn ingest_and_flips_runs() {
    let ledger = ingest_and_flips::run_example(None).unwrap();
    assert_eq!(ledger.events.len(), 6);
    assert!(ledger.predictable(4).contains("net_tx"));
}

#[test]
fn prioritise_change_set_runs() {
    assert_eq!(prioritise_change_set::run_example().unwrap().len(), 5);
}

#[test]
fn heatmap_flakiness_runs() {
    let dir = tempfile::tempdir().unwrap();
    let index = heatmap_flakiness::run_example(dir.path()).unwrap();
    assert!(!index.is_empty());
    assert!(dir.path().join("heatmap.csv").exists());
}

#[test]
fn alpha_sweep_runs() {
    let sweep = alpha_sweep::run_example(1).unwrap();
    assert_eq!(sweep.rows.len(), 11);
}

#[test]
fn incremental_updates_agree() {
    assert!(incremental_updates::run_example().unwrap() <= 1e-12);
}

#[test]
fn resource_schedule_runs() {
    let costs = resource_schedule::run_example().unwrap();
    assert_eq!(costs.len(), 15);
}

#[test]
fn synth_history_round_trips() {
    let mut buf = Vec::new();
    let out = synth_history::run_example(2, &mut buf).unwrap();
    let back = flipsense::ingest_str(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back, out.history);
}

#[test]
fn compare_methods_runs() {
    let reports = compare_methods::run_example(1).unwrap();
    assert_eq!(reports.len(), 15);
}
