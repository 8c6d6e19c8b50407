use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stablecut-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stablecut(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablecut"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of the first `key value` line.
fn field(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
        .to_string()
}

const C4: &str = "p msc 4 4\n1 2\n2 3\n3 4\n4 1\n";

#[test]
fn c4_solves_to_two_with_every_exact_solver() {
    let dir = scratch("c4");
    fs::write(dir.join("c4.msc"), C4).unwrap();
    for alg in ["dp-pseudo", "dp-degree", "brute"] {
        let o = stablecut(
            &dir,
            &["solve", "c4.msc", "--alg", alg, "--format", "structured"],
        );
        assert!(o.status.success());
        let r = stdout(&o);
        assert_eq!(field(&r, "weight"), "2");
        assert_eq!(field(&r, "stable"), "true");
        assert!(r.contains("begin assignment\n") && r.ends_with("end assignment\n"));
    }
    let o = stablecut(&dir, &["poa", "c4.msc", "--format", "structured"]);
    assert_eq!(field(&stdout(&o), "ratio"), "2/1");
}

#[test]
fn verify_lists_the_unstable_vertex() {
    let dir = scratch("verify");
    fs::write(dir.join("c4.msc"), C4).unwrap();
    fs::write(dir.join("bad.cut"), "p cut 4\n1 0\n2 0\n3 0\n4 1\n").unwrap();
    fs::write(dir.join("good.cut"), "p cut 4\n1 0\n2 1\n3 1\n4 0\n").unwrap();
    let o = stablecut(
        &dir,
        &["verify", "c4.msc", "bad.cut", "--format", "structured"],
    );
    assert_ne!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "unstable"), "2");
    let o = stablecut(
        &dir,
        &["verify", "c4.msc", "good.cut", "--format", "structured"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "unstable"), "none");
}

#[test]
fn generated_partition_target_solves_to_its_threshold() {
    let dir = scratch("generate");
    let o = stablecut(
        &dir,
        &[
            "generate",
            "--out",
            "pt",
            "partition-tree",
            "--values",
            "1,1,2",
        ],
    );
    assert!(o.status.success());
    let sidecar = fs::read_to_string(dir.join("pt.sidecar")).unwrap();
    assert_eq!(field(&sidecar, "threshold"), "6");
    let o = stablecut(
        &dir,
        &["solve", "pt.msc", "--td", "pt.td", "--format", "structured"],
    );
    assert_eq!(field(&stdout(&o), "weight"), "6");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = scratch("rerun");
    fs::write(
        dir.join("g.msc"),
        "p msc 6 8\n1 2 3\n2 3 5\n3 4 2\n4 5 7\n5 6 1\n6 1 4\n1 4 6\n2 5 2\n",
    )
    .unwrap();
    let runs: [&[&str]; 4] = [
        &["solve", "g.msc", "--alg", "local-search", "--seed", "7"],
        &["solve", "g.msc", "--alg", "approx", "--eps", "1/3"],
        &[
            "generate",
            "set-splitting",
            "--elements",
            "4",
            "--set",
            "1,2,3",
            "--set",
            "2,4",
            "--delta",
            "2",
        ],
        &["decompose", "g.msc", "--heuristic", "min-degree"],
    ];
    for args in runs {
        let mut args = args.to_vec();
        args.extend(["--format", "structured"]);
        let a = stablecut(&dir, &args);
        let b = stablecut(&dir, &args);
        assert!(
            a.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = scratch("errors");
    fs::write(dir.join("zero.msc"), "p msc 2 1\n1 2 0\n").unwrap();
    fs::write(dir.join("c4.msc"), C4).unwrap();
    fs::write(dir.join("big.msc"), "p msc 30 1\n1 2\n").unwrap();
    let code = |args: &[&str]| stablecut(&dir, args).status.code();
    assert_eq!(code(&["solve", "zero.msc"]), Some(2));
    assert_eq!(code(&["solve", "missing.msc"]), Some(2));
    assert_eq!(
        code(&["solve", "c4.msc", "--alg", "approx", "--eps", "3/5"]),
        Some(2)
    );
    assert_eq!(code(&["solve", "big.msc", "--alg", "brute"]), Some(3));
    assert_eq!(
        code(&["generate", "partition-tree", "--values", "1,2"]),
        Some(2)
    );
}

#[test]
fn extended_input_goes_through_the_rounded_solver() {
    let dir = scratch("extended");
    fs::write(
        dir.join("e.msc"),
        "p msc-ext 3 3\n1 2 1 1 1\n2 3 1 1 1\n1 3 1 1 1\n",
    )
    .unwrap();
    let o = stablecut(
        &dir,
        &[
            "solve",
            "e.msc",
            "--alg",
            "approx",
            "--format",
            "structured",
        ],
    );
    assert!(o.status.success());
    let r = stdout(&o);
    assert_eq!(field(&r, "weight"), "2");
    assert_eq!(field(&r, "rho_stable"), "true");
    assert_eq!(stablecut(&dir, &["solve", "e.msc"]).status.code(), Some(2));
}
