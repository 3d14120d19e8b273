use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn small(file: &str) -> String {
    fixtures()
        .join("small-bisim")
        .join(file)
        .display()
        .to_string()
}

fn laxkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laxkit"))
        .args(args)
        .env_remove("LAXKIT_SEED")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn check_cert_on_worked_example() {
    let out = laxkit(&[
        "check-cert",
        "--system",
        &small("A.json"),
        "--system",
        &small("B.json"),
        "--lifting",
        &small("lifting.json"),
        "--cert",
        &small("certificate.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["ok"], true);
    assert_eq!(r["inputs"].as_array().unwrap().len(), 4);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let pairs = r["result"]["pairs"].as_array().unwrap();
    let forward: Vec<(&str, &str, &str)> = pairs
        .iter()
        .filter(|p| p["direction"] == "forward")
        .map(|p| {
            assert_eq!(p["slack"], "0");
            (
                p["a"].as_str().unwrap(),
                p["b"].as_str().unwrap(),
                p["lifted"].as_str().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        forward,
        [
            ("a1", "b1", "1/5"),
            ("a2", "b3", "1/10"),
            ("a3", "b2", "1/20")
        ]
    );
}

#[test]
fn dist_reports_exact_fixpoint() {
    let out = laxkit(&[
        "dist",
        "--system",
        &small("A.json"),
        "--system",
        &small("B.json"),
        "--lifting",
        &small("lifting.json"),
        "--trace",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["result"];
    assert_eq!(r["matrix"]["values"][0][0], "1/5");
    assert_eq!(r["residual"], "0");
    assert_eq!(r["converged"], true);
    assert_eq!(r["iterations"], 3);
    assert_eq!(r["trace"][0]["values"][0][0], "3/20");
}

#[test]
fn hausdorff_left_fails_converse_axiom() {
    let lifting = fixtures().join("hausdorff-left.json").display().to_string();
    let out = laxkit(&["axioms", "--lifting", &lifting, "--trials", "200"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let props = r["result"]["properties"].as_array().unwrap();
    let l0 = props.iter().find(|p| p["property"] == "L0").unwrap();
    assert!(l0["failures"].as_u64().unwrap() > 0);
    assert!(l0["counterexample"].is_object());
    for p in props {
        if !matches!(p["property"].as_str(), Some("L0" | "pseudometric")) {
            assert_eq!(p["failures"], 0, "{p}");
        }
    }
}

#[test]
fn output_is_reproducible_and_seed_is_echoed() {
    let lifting = fixtures().join("hausdorff-left.json").display().to_string();
    let args = [
        "--seed",
        "99",
        "axioms",
        "--lifting",
        &lifting,
        "--trials",
        "50",
    ];
    let first = laxkit(&args);
    let second = laxkit(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(report(&first)["seed"], 99);

    let env = Command::new(env!("CARGO_BIN_EXE_laxkit"))
        .args(["axioms", "--lifting", &lifting, "--trials", "50"])
        .env("LAXKIT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(env.stdout, first.stdout);
}

#[test]
fn malformed_input_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"functor\": {\"kind\": \"id\"},").unwrap();
    let out = laxkit(&[
        "dist",
        "--system",
        broken.to_str().unwrap(),
        "--lifting",
        &small("lifting.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let bad_state = dir.path().join("bad.json");
    let mut sys: Value =
        serde_json::from_str(&std::fs::read_to_string(small("A.json")).unwrap()).unwrap();
    sys["alpha"]["a1"] = serde_json::json!(["0.7", ["a2", "nowhere"]]);
    std::fs::write(&bad_state, sys.to_string()).unwrap();
    let out = laxkit(&[
        "dist",
        "--system",
        bad_state.to_str().unwrap(),
        "--lifting",
        &small("lifting.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.alpha.a1[1][1]"));

    assert_eq!(laxkit(&["dist"]).status.code(), Some(2));
}

#[test]
fn synthesized_formula_evaluates_to_the_distance() {
    let dir = tempfile::tempdir().unwrap();
    let formula = dir.path().join("phi.json");
    let out = laxkit(&[
        "synth",
        "--system",
        &small("A.json"),
        "--system",
        &small("B.json"),
        "--lifting",
        &small("lifting.json"),
        "--target",
        "b1",
        "--rank",
        "2",
        "--out",
        formula.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["gaps"]["a1"], "1/5");

    let eval = |system: &str, state: &str| {
        let out = laxkit(&[
            "logic",
            "eval",
            "--formula",
            formula.to_str().unwrap(),
            "--system",
            &small(system),
            "--state",
            state,
            "--lifting",
            &small("lifting.json"),
        ]);
        assert_eq!(out.status.code(), Some(0));
        report(&out)["result"]["value"]
            .as_str()
            .unwrap()
            .to_string()
    };
    let at_a1 = eval("A.json", "a1");
    let at_b1 = eval("B.json", "b1");
    // The witness for b1 vanishes at b1 and measures the distance elsewhere.
    assert_eq!((at_a1.as_str(), at_b1.as_str()), ("1/5", "0"));
}

#[test]
fn logic_distance_and_text_formulas() {
    let out = laxkit(&[
        "logic",
        "distance",
        "--system",
        &small("A.json"),
        "--system",
        &small("B.json"),
        "--lifting",
        &small("lifting.json"),
        "--rank",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["matrix"]["values"][0][0], "1/5");
    assert!(r["result"]["witnesses"]["b1"].is_object());

    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("phi.txt");
    std::fs::write(&text, "snd.<>(fst.@~0.2()) /\\ 0.9").unwrap();
    let out = laxkit(&[
        "logic",
        "eval",
        "--formula",
        text.to_str().unwrap(),
        "--system",
        &small("A.json"),
        "--state",
        "a1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // Successor labels 0.2 and 0.8: closeness to 0.2 is 1 at a2.
    assert_eq!(report(&out)["result"]["value"], "9/10");
}

#[test]
fn catalog_lists_dual_pairs() {
    let out = laxkit(&[
        "--format",
        "table",
        "catalog",
        "--functor",
        &small("A.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("snd.<>"));
    assert!(text.contains("fst.@~0.7"));
}
