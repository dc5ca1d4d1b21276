use std::path::{Path, PathBuf};
use std::process::Command;

use blf_cli::run_with_env;
use blf_core::catalog::{building_block, family_x, EntryName, InvariantReport};
use blf_core::chartforms::{verify_corner_sum_model, verify_focus_focus_model};
use blf_core::diagram::{
    corner_connected_sum, self_connected_sum, trade_corner_to_lefschetz, CornerRef,
};
use blf_core::io::format::to_canonical_json;
use blf_core::io::{parse_diagram, render, serialize_diagram};
use blf_core::FibrationDiagram;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn golden_bytes(name: &str) -> Vec<u8> {
    std::fs::read(golden(name)).unwrap()
}

fn golden_diagram(name: &str) -> FibrationDiagram {
    parse_diagram(&golden_bytes(name)).unwrap()
}

struct Outcome {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

fn blf(args: &[&str]) -> Outcome {
    blf_env(args, None)
}

fn blf_env(args: &[&str], seed: Option<&str>) -> Outcome {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("blf").chain(args.iter().copied());
    let code = run_with_env(argv, seed.map(String::from), &mut stdout, &mut stderr);
    Outcome {
        code,
        stdout,
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn path(name: &str) -> String {
    golden(name).to_string_lossy().into_owned()
}

#[test]
fn build_matches_library_and_golden() {
    let out = blf(&["catalog", "build", "cp2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lib = serialize_diagram(&building_block(EntryName::Cp2).unwrap().diagram);
    assert_eq!(out.stdout, lib);
    assert_eq!(out.stdout, golden_bytes("cp2.json"));

    let out = blf(&["catalog", "build", "X", "--n", "2", "--l", "1"]);
    assert_eq!(
        out.stdout,
        serialize_diagram(&family_x(2, 1).unwrap().diagram)
    );
    assert_eq!(out.stdout, golden_bytes("x_2_1.json"));
    assert_eq!(blf(&["catalog", "build", "X(2,1)"]).stdout, out.stdout);
}

#[test]
fn invariants_of_cp2() {
    let out = blf(&["invariants", &path("cp2.json")]);
    assert_eq!(out.code, 0);
    let lib = InvariantReport::of(&golden_diagram("cp2.json")).unwrap();
    assert_eq!(lib.chi, 3);
    assert_eq!(lib.total_parity, 1);
    assert_eq!(out.stdout, to_canonical_json(&lib));
    assert_eq!(out.stdout, golden_bytes("cp2_invariants.json"));
}

#[test]
fn surgery_verbs_match_library() {
    let cp2 = golden_diagram("cp2.json");
    let s4 = golden_diagram("s4.json");
    let x21 = golden_diagram("x_2_1.json");

    let out = blf(&[
        "sum",
        &path("cp2.json"),
        &path("s4.json"),
        "--at",
        "A:0",
        "B:1",
    ]);
    let lib = corner_connected_sum(&cp2, &CornerRef::Index(0), &s4, &CornerRef::Index(1)).unwrap();
    assert_eq!(out.stdout, serialize_diagram(&lib));
    assert_eq!(out.stdout, golden_bytes("cp2_sum_s4.json"));
    // Prefixes pick the diagram regardless of order.
    let swapped = blf(&[
        "sum",
        &path("cp2.json"),
        &path("s4.json"),
        "--at",
        "B:1",
        "A:0",
    ]);
    assert_eq!(swapped.stdout, out.stdout);

    let out = blf(&["selfsum", &path("x_2_1.json"), "--at", "0", "3"]);
    let lib = self_connected_sum(&x21, &CornerRef::Index(0), &CornerRef::Index(3)).unwrap();
    assert_eq!(out.stdout, serialize_diagram(&lib));
    assert_eq!(out.stdout, golden_bytes("x_2_1_selfsum.json"));

    let out = blf(&[
        "trade",
        "smooth",
        &path("s4.json"),
        "--corner",
        "1",
        "--record-cycles",
    ]);
    let lib = trade_corner_to_lefschetz(&s4, &CornerRef::Index(1), true).unwrap();
    assert_eq!(out.stdout, serialize_diagram(&lib));
    assert_eq!(out.stdout, golden_bytes("s4_smooth.json"));
}

#[test]
fn singularize_needs_evidence() {
    let smoothed = path("s4_smooth.json");
    let out = blf(&[
        "trade",
        "singularize",
        &smoothed,
        "--lefschetz",
        "L0",
        "--circle",
        "0",
    ]);
    assert_eq!(out.code, 2);

    let out = blf(&[
        "trade",
        "singularize",
        &smoothed,
        "--lefschetz",
        "L0",
        "--circle",
        "0",
        "--evidence",
        "1,1",
        "1,1",
        "b0",
    ]);
    assert_eq!(out.code, 2, "non-dual cycles must be rejected");

    let ok = blf(&[
        "trade",
        "singularize",
        &smoothed,
        "--lefschetz",
        "L0",
        "--circle",
        "0",
        "--evidence",
        "1,1",
        "1,0",
        "b0",
    ]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    let back = parse_diagram(&ok.stdout).unwrap();
    assert_eq!(back.corner_count(), 2);
    assert_eq!(back.lefschetz_count(), 0);

    let asserted = blf(&[
        "trade",
        "singularize",
        &smoothed,
        "--lefschetz",
        "L0",
        "--circle",
        "0",
        "--assert-dual-pair",
    ]);
    assert_eq!(asserted.code, 0);
}

#[test]
fn gcs_checks() {
    let out = blf(&["check", "gcs", &path("s4.json"), "--mode", "total"]);
    assert_eq!((out.code, out.stdout.as_slice()), (0, &b"false\n"[..]));
    let out = blf(&["check", "gcs", &path("cp2.json"), "--mode", "per-component"]);
    assert_eq!(out.stdout, b"true\n");
    let out = blf(&["check", "gcs", &path("cp2.json"), "--mode", "sideways"]);
    assert_eq!(out.code, 1);
    assert_eq!(
        blf(&["check", "valid", &path("cp2.json")]).stdout,
        b"valid\n"
    );
}

#[test]
fn render_matches_library_and_golden() {
    let out = blf(&["render", &path("s4.json")]);
    assert_eq!(out.code, 0);
    let lib = render(&golden_diagram("s4.json")).unwrap();
    assert_eq!(out.stdout, lib.as_bytes());
    assert_eq!(out.stdout, golden_bytes("s4.svg"));

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("s4.svg");
    let out = blf(&["render", &path("s4.json"), "-o", target.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(target).unwrap(), lib);
}

#[test]
fn verify_charts_seed_handling() {
    let out = blf(&["verify-charts", "--samples", "1000", "--seed", "7"]);
    assert_eq!(out.code, 0);
    let mut lib = to_canonical_json(&verify_corner_sum_model(1000, 7));
    lib.extend(to_canonical_json(&verify_focus_focus_model(1000, 7)));
    assert_eq!(out.stdout, lib);
    assert_eq!(out.stdout, golden_bytes("verify_charts.jsonl"));
    // Default seed.
    assert_eq!(blf(&["verify-charts", "--samples", "1000"]).stdout, lib);

    let env = blf_env(
        &["verify-charts", "--samples", "50", "--seed", "7"],
        Some("99"),
    );
    let mut expected = to_canonical_json(&verify_corner_sum_model(50, 99));
    expected.extend(to_canonical_json(&verify_focus_focus_model(50, 99)));
    assert_eq!(env.stdout, expected);

    assert_eq!(blf_env(&["verify-charts"], Some("seven")).code, 1);
}

#[test]
fn inadmissible_family_member_exits_2() {
    let out = blf(&["catalog", "build", "X", "--n", "1", "--l", "3"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("-2"), "{}", out.stderr);
    assert_eq!(blf(&["catalog", "build", "Y(0,0,0)"]).code, 2);
    assert_eq!(
        blf(&[
            "catalog",
            "build",
            "sphere_bundle_family",
            "--g",
            "0",
            "--h",
            "1"
        ])
        .code,
        2
    );
}

#[test]
fn io_and_parse_errors_exit_1() {
    assert_eq!(blf(&["invariants", "/nonexistent/diagram.json"]).code, 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{\"version\": 1,").unwrap();
    assert_eq!(blf(&["invariants", bad.to_str().unwrap()]).code, 1);
    std::fs::write(&bad, b"{\"version\": 9}").unwrap();
    assert_eq!(blf(&["invariants", bad.to_str().unwrap()]).code, 1);
    assert_eq!(blf(&["catalog", "build", "rp4"]).code, 1);
    assert_eq!(blf(&["frobnicate"]).code, 1);
    assert_eq!(blf(&["--help"]).code, 0);
}

#[test]
fn catalog_list_and_verify() {
    let list = blf(&["catalog", "list", "--max", "2"]);
    assert_eq!(list.code, 0);
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    std::fs::write(&manifest, &list.stdout).unwrap();

    let out = blf(&[
        "catalog",
        "verify",
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines = String::from_utf8(out.stdout).unwrap();
    let entries: serde_json::Value = serde_json::from_slice(&list.stdout).unwrap();
    assert_eq!(
        lines.lines().count(),
        entries["entries"].as_array().unwrap().len()
    );

    // Corrupt one expected parity.
    let mut v = entries.clone();
    let p = &mut v["entries"][0]["expected"]["total_parity"];
    *p = serde_json::json!(-p.as_i64().unwrap());
    std::fs::write(&manifest, serde_json::to_vec(&v).unwrap()).unwrap();
    let out = blf(&[
        "catalog",
        "verify",
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 2);
    let first: serde_json::Value = serde_json::from_str(
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .next()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(first["pass"], false);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("s4.json");
    let out = blf(&["catalog", "build", "s4", "-o", target.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(target).unwrap(), golden_bytes("s4.json"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_blf");
    let ok = Command::new(bin)
        .args(["catalog", "build", "s4"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(ok.stdout, golden_bytes("s4.json"));

    let bad = Command::new(bin)
        .args(["catalog", "build", "X", "--n", "1", "--l", "3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());

    let seeded = Command::new(bin)
        .args(["verify-charts", "--samples", "10"])
        .env("BLF_SEED", "3")
        .output()
        .unwrap();
    let mut expected = to_canonical_json(&verify_corner_sum_model(10, 3));
    expected.extend(to_canonical_json(&verify_focus_focus_model(10, 3)));
    assert_eq!(seeded.stdout, expected);
}
