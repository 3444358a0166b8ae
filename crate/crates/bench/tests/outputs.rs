use proxvr::metrics::{traces_from_csv, TraceMeta, TraceRecord, CSV_HEADER};
use proxvr::RunTrace;
use proxvr_bench::experiment::{summarize, Curve, CurvePoint};
use proxvr_bench::report::{emit_meta, meta_path, render_svg};
use proxvr_bench::{emit_csv, emit_svg, run_experiment, BenchError, ExperimentConfig, Summary};

fn config() -> ExperimentConfig {
    ExperimentConfig::from_file_text(
        "synthetic = n=96,d=6,seed=2\nsolver = proxsvrg,proxsaga,proxsgd\nseeds = 1..4\npasses = 5\nwarm-start = true\n",
    )
    .unwrap()
}

#[test]
fn identical_configs_give_identical_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_csv(&run_experiment(&config()).unwrap().traces, &a).unwrap();
    emit_csv(&run_experiment(&config()).unwrap().traces, &b).unwrap();
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
}

#[test]
fn csv_rows_match_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = run_experiment(&config()).unwrap();
    emit_csv(&out.traces, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let rows: usize = out.traces.iter().map(|t| t.len()).sum();
    assert_eq!(lines.count(), rows);
    let back = traces_from_csv(&text).unwrap();
    assert_eq!(back.len(), out.traces.len());
    for t in &back {
        assert!(t.records().windows(2).all(|w| w[1].passes > w[0].passes));
    }
}

#[test]
fn single_checkpoint_is_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let mut t = RunTrace::new(TraceMeta::new("proxgd", 0));
    t.record(TraceRecord {
        passes: 0.0,
        ifo: 0,
        po: 0,
        objective: -0.5,
        subopt: Some(0.25),
        gmap_sq: 1.0,
    })
    .unwrap();
    emit_csv(&[t], &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
}

#[test]
fn empty_trace_set_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("none.csv");
    assert!(matches!(emit_csv(&[], &path), Err(BenchError::Empty(_))));
    assert!(!path.exists());
    let svg = dir.path().join("none.svg");
    assert!(emit_svg(&Summary::default(), &svg).is_err());
    assert!(!svg.exists());
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("t.csv");
    let traces = run_experiment(&config()).unwrap().traces;
    let err = emit_csv(&traces, &path).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn meta_sidecar_lists_every_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let traces = run_experiment(&config()).unwrap().traces;
    emit_meta(&traces, &path).unwrap();
    let text = std::fs::read_to_string(meta_path(&path)).unwrap();
    assert_eq!(text.lines().count(), traces.len() + 1);
    assert!(text.contains("svrg-minibatch") && text.contains("saga-minibatch") && text.contains("eta0="));
}

#[test]
fn svg_is_well_formed_with_one_line_per_solver() {
    let out = run_experiment(&config()).unwrap();
    let svg = render_svg(&summarize(&out.traces)).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let lines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert_eq!(lines.len(), 3);
    let names: Vec<&str> = lines.iter().filter_map(|n| n.attribute("data-solver")).collect();
    assert_eq!(names, ["proxsvrg", "proxsaga", "proxsgd"]);
}

#[test]
fn one_solver_two_points_parses() {
    let summary = Summary {
        curves: vec![Curve {
            solver: "proxsaga".into(),
            points: vec![
                CurvePoint { passes: 1.0, subopt: 0.1 },
                CurvePoint { passes: 2.0, subopt: 0.01 },
            ],
        }],
    };
    let svg = render_svg(&summary).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let line = doc.descendants().find(|n| n.has_tag_name("polyline")).unwrap();
    assert_eq!(line.attribute("points").unwrap().split(' ').count(), 2);
}
