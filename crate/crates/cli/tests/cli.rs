use crystalflex::framework::{gallery, GalleryName};
use crystalflex_cli::document::{parse_framework, serialize_framework, DocError};
use crystalflex_cli::{parse_complex, run_command, EXIT_FILE, EXIT_FLEXIBLE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<String> = std::iter::once("crystalflex".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let code = run_command(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn gallery_round_trip_exact() {
    for name in GalleryName::all() {
        let fw = gallery(name);
        let text = serialize_framework(&fw);
        let back = parse_framework(&text).unwrap();
        assert_eq!(fw, back, "round trip changed {name:?}");
    }
}

#[test]
fn rational_string_coordinates() {
    let text = r#"{
        "dimension": 1,
        "periods": [["1"]],
        "joints": [{"id": "a", "coords": ["1/3"]}, {"id": "b", "coords": [0.5]}],
        "edges": [{"v": "a", "k": [0], "w": "b", "l": [0]},
                  {"v": "b", "k": [0], "w": "a", "l": [1]}]
    }"#;
    let fw = parse_framework(text).unwrap();
    assert_eq!(
        fw.joints[0].coords[0],
        num::BigRational::new(1.into(), 3.into())
    );
    assert_eq!(
        fw.joints[1].coords[0],
        num::BigRational::new(1.into(), 2.into())
    );
}

#[test]
fn schema_error_names_edge_index() {
    let text = r#"{
        "dimension": 2,
        "periods": [["1","0"],["0","1"]],
        "joints": [{"id": "v", "coords": ["0","0"]}],
        "edges": [{"v": "v", "k": [0,0], "w": "v", "l": [1,0,0]}]
    }"#;
    match parse_framework(text) {
        Err(DocError::Schema(msg)) => assert!(msg.contains("edges[0]"), "{msg}"),
        other => panic!("expected schema error, got {other:?}"),
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dg.json");
    let p = path.to_str().unwrap();

    let (code, _, _) = run(&["gallery", "diag_grid", "--out", p]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = run(&["validate", p]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("joints=2"));

    let (code, out, _) = run(&["rigidity", p]);
    assert_eq!(code, EXIT_FLEXIBLE);
    assert!(out.contains("flexible"));
    assert!(out.contains("-1.0"), "spectrum point missing: {out}");

    let (code, out, _) = run(&["dimension", p]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "4");

    let (code, _, _) = run(&["nonsense", p]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["validate", "/nonexistent/file.json"]);
    assert_eq!(code, EXIT_FILE);
    let (code, _, _) = run(&["rum", p]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn one_dimensional_chain_reports_rigid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    std::fs::write(
        &path,
        r#"{
            "dimension": 1,
            "periods": [["1"]],
            "joints": [{"id": "a", "coords": ["0"]}, {"id": "b", "coords": ["1/2"]}],
            "edges": [{"v": "a", "k": [0], "w": "b", "l": [0]},
                      {"v": "b", "k": [0], "w": "a", "l": [1]}]
        }"#,
    )
    .unwrap();
    let (code, out, _) = run(&["rigidity", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("rigid"));
}

#[test]
fn csv_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let fw_path = dir.path().join("kagome.json");
    let p = fw_path.to_str().unwrap();
    run(&["gallery", "kagome_rational", "--out", p]);
    let csv1 = dir.path().join("a.csv");
    let csv2 = dir.path().join("b.csv");
    let (code, _, _) = run(&["rum", p, "--grid", "6", "--csv", csv1.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = run(&["rum", p, "--grid", "6", "--csv", csv2.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let a = std::fs::read(&csv1).unwrap();
    let b = std::fs::read(&csv2).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with(
        "omega_1_re,omega_1_im,omega_2_re,omega_2_im,rank,kernel_dim\n"
    ));
}

#[test]
fn flexes_subcommand_prints_basis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dg.json");
    let p = path.to_str().unwrap();
    run(&["gallery", "diag_grid", "--out", p]);
    let (code, out, _) = run(&["flexes", p, "--omega", "-1+0i,1+0i"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("dimension 1"), "{out}");
    assert!(out.contains("h[0]"));
}

#[test]
fn complex_literals() {
    let c = parse_complex("-1+0i").unwrap();
    assert_eq!((c.re, c.im), (-1.0, 0.0));
    let c = parse_complex("0.5-0.25i").unwrap();
    assert_eq!((c.re, c.im), (0.5, -0.25));
    let c = parse_complex("i").unwrap();
    assert_eq!((c.re, c.im), (0.0, 1.0));
    let c = parse_complex("-2i").unwrap();
    assert_eq!((c.re, c.im), (0.0, -2.0));
    let c = parse_complex("3").unwrap();
    assert_eq!((c.re, c.im), (3.0, 0.0));
    let c = parse_complex("1e-2+1e-3i").unwrap();
    assert_eq!((c.re, c.im), (0.01, 0.001));
    assert!(parse_complex("").is_err());
}

#[test]
fn spectrum_json_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dg.json");
    let p = path.to_str().unwrap();
    run(&["gallery", "diag_grid", "--out", p]);
    let (code, out, _) = run(&["spectrum", p, "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "finite");
    assert_eq!(v["points"].as_array().unwrap().len(), 2);

    let (code, out, _) = run(&["rigidity", p, "--json"]);
    assert_eq!(code, EXIT_FLEXIBLE);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["first_order_rigid"], "flexible");
    assert_eq!(v["framework"]["joints"], 2);
    assert!(v["tolerances"]["svd_tol"].as_f64().unwrap() > 0.0);
}
