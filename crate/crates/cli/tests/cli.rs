//! End-to-end tests of the `groupmagic` binary. Stdout of the stable
//! commands is compared against files in `tests/golden/`; set
//! `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use groupmagic::graphs::Graph;
use groupmagic::labelings::{verify_group, Labeling, LabelingFile, Verdict};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn groupmagic(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_groupmagic"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"))
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    assert_eq!(actual, expected, "stdout differs from {}", path.display());
}

#[test]
fn groups_order_8() {
    let run = groupmagic(&["groups", "--order", "8"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout, "Z8\nZ4xZ2\nZ2xZ2xZ2\n");
    golden("groups_8.txt", &run.stdout);
}

#[test]
fn groups_order_zero_is_rejected() {
    let run = groupmagic(&["groups", "--order", "0"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.starts_with("error:"));
}

#[test]
fn windmill_t2_certificate() {
    let run = groupmagic(&["windmill", "--t", "2"]);
    assert_eq!(run.code, 1);
    assert!(run
        .stdout
        .trim_end()
        .ends_with("3*a_c = -1*a : infeasible (positivity)"));
    golden("windmill_2.txt", &run.stdout);
}

#[test]
fn windmill_json_is_an_ordered_list() {
    let run = groupmagic(&["windmill", "--t", "3", "--json"]);
    assert_eq!(run.code, 1);
    let value: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    let steps = value["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3 * 3 + 1 + 3 * 3 + 2 + 2);
    assert!(steps
        .iter()
        .all(|s| s["name"].is_string() && s["equation"].is_string()));
    assert_eq!(
        steps.last().unwrap()["equation"],
        "3*a_c = -5*a : infeasible (positivity)"
    );
}

#[test]
fn windmill_rejects_t1() {
    assert_eq!(groupmagic(&["windmill", "--t", "1"]).code, 2);
}

#[test]
fn scan_kmn_small() {
    let run = groupmagic(&["scan-kmn", "--max", "6"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout.lines().count(), 15);
    for line in run.stdout.lines() {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 3);
        let (m, n): (usize, usize) = (fields[0].parse().unwrap(), fields[1].parse().unwrap());
        assert!(m < n);
        assert!(fields[2] == "FOUND" || fields[2] == "NONE");
    }
    golden("scan_kmn_6.txt", &run.stdout);
}

#[test]
fn construct_klein_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let labeling = dir.path().join("l.json");
    let product = dir.path().join("p.txt");
    let run = groupmagic(&[
        "construct",
        "--graph",
        "c4.txt",
        "--group",
        "Z2xZ2xZ4",
        "--method",
        "klein",
        "--out",
        labeling.to_str().unwrap(),
        "--product-out",
        product.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, "MAGIC mu=(1,1,0) theorem=klein\n");
    golden(
        "construct_klein_c4.json",
        &fs::read_to_string(&labeling).unwrap(),
    );

    let run = groupmagic(&[
        "verify",
        "--graph",
        product.to_str().unwrap(),
        "--labeling",
        labeling.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout, "MAGIC mu=(1,1,0)\n");
}

#[test]
fn construct_round_trip_matches_library_verdict() {
    // construct -> file -> parse -> verify gives the construction's mu
    for (graph, group, method) in [
        ("c5.txt", "Z20", "auto"),
        ("c5.txt", "Z2xZ2xZ5", "auto"),
        ("c4.txt", "Z16", "cyclic"),
        ("k3.txt", "Z4xZ3", "auto"),
        ("p4.txt", "Z2xZ2xZ4", "klein"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let labeling = dir.path().join("l.json");
        let product = dir.path().join("p.txt");
        let run = groupmagic(&[
            "construct",
            "--graph",
            graph,
            "--group",
            group,
            "--method",
            method,
            "--out",
            labeling.to_str().unwrap(),
            "--product-out",
            product.to_str().unwrap(),
            "--json",
        ]);
        assert_eq!(run.code, 0, "{graph} {group} {method}: {}", run.stderr);
        let record: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
        assert_eq!(record["status"], "magic");

        let g = Graph::parse_edge_list(&fs::read_to_string(&product).unwrap()).unwrap();
        let file = LabelingFile::from_json(&fs::read_to_string(&labeling).unwrap()).unwrap();
        let Labeling::Group(l) = file.decode().unwrap() else {
            panic!("expected a group labeling")
        };
        assert_eq!(l.group().to_string(), group);
        let Verdict::Magic { mu } = verify_group(&g, &l).unwrap() else {
            panic!("round trip lost magic property")
        };
        assert_eq!(serde_json::to_value(&mu).unwrap(), record["mu"]);

        let run = groupmagic(&[
            "verify",
            "--graph",
            product.to_str().unwrap(),
            "--labeling",
            labeling.to_str().unwrap(),
        ]);
        assert_eq!(run.stdout, format!("MAGIC mu={mu}\n"));
    }
}

#[test]
fn construct_precondition_failure_exits_2() {
    let run = groupmagic(&[
        "construct",
        "--graph",
        "p4.txt",
        "--group",
        "Z16",
        "--method",
        "cyclic",
    ]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("precondition"), "{}", run.stderr);

    let run = groupmagic(&["construct", "--graph", "c4.txt", "--group", "Z8"]);
    assert_eq!(run.code, 2);

    let run = groupmagic(&[
        "construct",
        "--method",
        "kpq",
        "--p",
        "3",
        "--q",
        "2",
        "--group",
        "Z20",
    ]);
    assert_eq!(run.code, 2);
}

#[test]
fn construct_kpq_to_stdout() {
    let run = groupmagic(&[
        "construct",
        "--method",
        "kpq",
        "--p",
        "2",
        "--q",
        "1",
        "--group",
        "Z4xZ3",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    golden("construct_kpq_2_1.txt", &run.stdout);
    assert!(run.stdout.ends_with("MAGIC mu=(3,0) theorem=kpq\n"));

    let run = groupmagic(&[
        "construct",
        "--method",
        "kpq",
        "--p",
        "2",
        "--q",
        "1",
        "--group",
        "Z4xZ3",
        "--graph",
        "k3.txt",
    ]);
    assert_eq!(run.code, 2, "K3 is not K_{{2,1}}");
}

#[test]
fn construct_compose() {
    let dir = tempfile::tempdir().unwrap();
    let product = dir.path().join("p.txt");
    let run = groupmagic(&[
        "construct",
        "--method",
        "compose",
        "--graph",
        "c4.txt",
        "--inner",
        "c4.txt",
        "--base",
        "c4_z4.json",
        "--prime",
        "2",
        "--group",
        "Z4xZ2xZ2",
        "--product-out",
        product.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(
        run.stdout.ends_with("MAGIC mu=(1,0,0) theorem=compose\n"),
        "{}",
        run.stdout
    );
    assert_eq!(
        fs::read_to_string(&product).unwrap().lines().next(),
        Some("n 16")
    );

    let run = groupmagic(&[
        "construct",
        "--method",
        "compose",
        "--graph",
        "c4.txt",
        "--inner",
        "c4.txt",
        "--prime",
        "2",
    ]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--base"), "{}", run.stderr);
}

#[test]
fn verify_reports_witnesses() {
    let run = groupmagic(&[
        "verify",
        "--graph",
        "c4.txt",
        "--labeling",
        "c4_z4_bad.json",
    ]);
    assert_eq!(run.code, 1);
    assert!(
        run.stdout.starts_with("NON-CONSTANT-WEIGHT witness=("),
        "{}",
        run.stdout
    );

    let run = groupmagic(&[
        "verify",
        "--graph",
        "c4.txt",
        "--labeling",
        "c4_z4_bad.json",
        "--json",
    ]);
    let record: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(record["status"], "non-constant-weight");
    assert!(record["witness"].is_array());
    assert!(record["mu"].is_null());
    for key in ["status", "mu", "witness", "theorem", "nodes", "elapsed"] {
        assert!(record.get(key).is_some(), "missing {key}");
    }

    let run = groupmagic(&["verify", "--graph", "c4.txt", "--labeling", "c4_z4.json"]);
    assert_eq!((run.code, run.stdout.as_str()), (0, "MAGIC mu=(1)\n"));

    let run = groupmagic(&[
        "verify",
        "--graph",
        "c4.txt",
        "--labeling",
        "c4_z4.json",
        "--classic",
    ]);
    assert_eq!(run.code, 2);
}

#[test]
fn verify_classic() {
    let run = groupmagic(&[
        "verify",
        "--graph",
        "c4.txt",
        "--labeling",
        "c4_classic.json",
        "--classic",
    ]);
    assert_eq!((run.code, run.stdout.as_str()), (0, "MAGIC mu=5\n"));
    let run = groupmagic(&[
        "verify",
        "--graph",
        "k3.txt",
        "--labeling",
        "c4_classic.json",
        "--classic",
    ]);
    assert_eq!(run.code, 2, "length mismatch is structural");
}

#[test]
fn search_outcomes_and_exit_codes() {
    let run = groupmagic(&[
        "search",
        "--graph",
        "c4.txt",
        "--group",
        "Z4",
        "--deterministic",
    ]);
    assert_eq!(run.code, 0);
    assert!(
        run.stdout.starts_with("FOUND mu=(3) nodes="),
        "{}",
        run.stdout
    );

    let run = groupmagic(&["search", "--graph", "k3.txt", "--group", "Z3", "--json"]);
    assert_eq!(run.code, 1);
    let record: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(record["status"], "none");
    assert!(record["nodes"].as_u64().unwrap() > 0);

    let run = groupmagic(&["search", "--graph", "c6.txt", "--classic"]);
    assert_eq!(run.code, 1);
    assert!(run.stdout.starts_with("NONE"));

    let run = groupmagic(&["search", "--graph", "c4.txt", "--group", "Z8"]);
    assert_eq!(run.code, 2, "order mismatch");

    let run = groupmagic(&["search", "--graph", "c4.txt", "--group", "Z4", "--classic"]);
    assert_eq!(run.code, 2, "group and classic conflict");
}

#[test]
fn search_budget_exceeded_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("w.txt");
    let random = groupmagic(&["random", "--n", "14", "--p", "0.5", "--seed", "3"]);
    fs::write(&graph, random.stdout).unwrap();
    let run = groupmagic(&[
        "search",
        "--graph",
        graph.to_str().unwrap(),
        "--classic",
        "--max-nodes",
        "5000",
    ]);
    assert_eq!(run.code, 4, "{}", run.stdout);
    assert!(run.stdout.starts_with("BUDGET-EXCEEDED"));
}

#[test]
fn search_writes_found_labeling() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("found.json");
    let run = groupmagic(&[
        "search",
        "--graph",
        "c4.txt",
        "--classic",
        "--deterministic",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0);
    let run = groupmagic(&[
        "verify",
        "--graph",
        "c4.txt",
        "--labeling",
        out.to_str().unwrap(),
        "--classic",
    ]);
    assert_eq!(run.stdout, "MAGIC mu=5\n");
}

#[test]
fn product_with_c4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.txt");
    let run = groupmagic(&[
        "product",
        "--outer",
        "k3.txt",
        "--inner",
        "c4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.code, 0);
    let g = Graph::parse_edge_list(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((g.order(), g.size()), (12, 3 * 4 + 3 * 16));

    let run = groupmagic(&["product", "--outer", "k1.txt", "--inner", "c4.txt"]);
    assert_eq!(run.code, 0);
    golden("product_k1_c4.txt", &run.stdout);

    let run = groupmagic(&["product", "--outer", "missing.txt", "--inner", "c4"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("missing.txt"));
}

#[test]
fn random_graph_is_seeded() {
    let a = groupmagic(&["random", "--n", "10", "--p", "0.5"]);
    let b = groupmagic(&["random", "--n", "10", "--p", "0.5"]);
    assert_eq!(a.stdout, b.stdout);
    let c = groupmagic(&["random", "--n", "10", "--p", "0.5", "--seed", "1"]);
    assert_ne!(a.stdout, c.stdout);
    assert!(Graph::parse_edge_list(&a.stdout).is_ok());
    golden("random_10_half.txt", &a.stdout);
    assert!(fixture("c4.txt").exists());
}
