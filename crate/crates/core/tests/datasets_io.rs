use std::path::PathBuf;

use costeval::cost_model::{Orientation, RatingScale};
use costeval::datasets::{load_csv, write_csv, CostSource, Schema};
use costeval::{Error, Label};

fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn each_schema_derives_delta() {
    let dir = tempfile::tempdir().unwrap();

    let votes = load_csv(file(&dir, "v.csv", "f0,f1,n_yes,n_no\n0.5,1.2,10,0\n1,1,5,5\n"), &Schema::Votes).unwrap();
    assert_eq!(votes.name(), "v");
    assert_eq!(votes.cost_source(), CostSource::Votes);
    assert_eq!(votes.dim(), 2);
    assert!((votes.examples()[0].delta - 11f64.ln()).abs() < 1e-12);
    assert_eq!(votes.examples()[0].features, vec![0.5, 1.2]);
    assert_eq!(votes.examples()[1].delta, 0.0);

    let bp = load_csv(file(&dir, "t.csv", "f0,z\r\n1,150\r\n2,100\r\n"), &Schema::Threshold { tau: 130.0 }).unwrap();
    assert_eq!(bp.deltas().collect::<Vec<_>>(), vec![20.0, -30.0]);

    let scale = RatingScale::new(1.0, 7.0, 4.0, Orientation::MidpointMinusScore).unwrap();
    let rated = load_csv(file(&dir, "r.csv", "f0,score\n0,1\n0,7\n"), &Schema::Rating(scale)).unwrap();
    assert_eq!(rated.deltas().collect::<Vec<_>>(), vec![3.0, -3.0]);
    let out_of_scale = load_csv(file(&dir, "r2.csv", "f0,score\n0,9\n"), &Schema::Rating(scale));
    assert!(out_of_scale.is_err());

    let pre = load_csv(file(&dir, "p.csv", "f0,delta\n3,0\n"), &Schema::PrecomputedDelta).unwrap();
    assert_eq!(pre.examples()[0].label(), Label::Pos);
    assert_eq!(pre.examples()[0].cost(), 0.0);
}

#[test]
fn malformed_rows_report_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("f0,delta\n1,2\n1,x\n", 3),
        ("f0,delta\n1,2\n1,2,3\n", 3),
        ("f0,delta\n1,2\n1,2\nNaN,1\n", 4),
        ("f0,n_yes,n_no\n1,-2,3\n", 2),
    ];
    for (i, (body, line)) in cases.iter().enumerate() {
        let schema = if body.contains("n_yes") { Schema::Votes } else { Schema::PrecomputedDelta };
        match load_csv(file(&dir, &format!("bad{i}.csv"), body), &schema) {
            Err(Error::Parse { line: got, .. }) => assert_eq!(got, *line, "{body:?}"),
            other => panic!("{body:?}: {other:?}"),
        }
    }
    assert!(matches!(
        load_csv(file(&dir, "hdr.csv", "x,delta\n1,2\n"), &Schema::PrecomputedDelta),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(load_csv(dir.path().join("absent.csv"), &Schema::Votes), Err(Error::Io { .. })));
}

#[test]
fn precomputed_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let (ds, _) = costeval::synthetic::generate(&costeval::synthetic::SyntheticConfig {
        n: 200,
        dim: 7,
        seed: 31,
        ..Default::default()
    })
    .unwrap();
    let path = dir.path().join("synthetic-31.csv");
    write_csv(&ds, std::fs::File::create(&path).unwrap()).unwrap();
    let back = load_csv(&path, &Schema::PrecomputedDelta).unwrap();
    assert_eq!(back.examples(), ds.examples());
}
