use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sygns(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sygns"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn lines(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn generate_convert_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(sygns(d, &["generate", "--n", "12", "--seed", "4", "--out", "g.jsonl"]));
    assert_eq!(lines(&d.join("g.jsonl")), 12);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("g.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["tool"], "sygns");
    assert_eq!(manifest["outputs"][0][1], 12);

    ok(sygns(d, &["convert", "--input", "g.jsonl", "--out-dir", "c"]));
    for mr in ["fol", "vf", "drs"] {
        let tsv = fs::read_to_string(d.join(format!("c/g.{mr}.tsv"))).unwrap();
        assert_eq!(tsv.lines().count(), 12);
        assert!(tsv.lines().all(|l| l.split('\t').count() == 2));
    }
    let clf = fs::read_to_string(d.join("c/g.clf")).unwrap();
    assert_eq!(clf.split("\n\n").count(), 12);

    let gold = sygns::dataset::read_jsonl(&d.join("g.jsonl")).unwrap();
    let preds: Vec<(String, String)> = gold.iter().map(|r| (r.id.clone(), r.vf.clone())).collect();
    sygns::dataset::write_predictions(&d.join("p.tsv"), &preds).unwrap();
    ok(sygns(
        d,
        &[
            "evaluate", "--gold", "g.jsonl", "--pred", "p.tsv", "--mr", "vf", "--metrics", "exact,polarity,entail",
            "--report", "r.json", "--table", "r.txt",
        ],
    ));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(report["metrics"]["exact"]["overall"], 1.0);
    assert_eq!(report["atp"]["both"], 1.0);
    assert!(fs::read_to_string(d.join("r.txt")).unwrap().contains("exact"));
}

#[test]
fn split_writes_every_partition() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(sygns(
        d,
        &["split", "--strategy", "systematicity_negation", "--pool", "400", "--train", "100", "--out-dir", "s"],
    ));
    let train = lines(&d.join("s/train.jsonl"));
    let valid = lines(&d.join("s/valid.jsonl"));
    assert_eq!(train + valid, 100);
    assert_eq!(valid, 10);
    assert_eq!(lines(&d.join("s/test.jsonl")), 300);
    let manifest = fs::read_to_string(d.join("s/manifest.json")).unwrap();
    assert!(manifest.contains("\"settings\""));
}

#[test]
fn config_file_defaults_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.toml"), "[generate]\nn = 7\nseed = 9\nout = \"a.jsonl\"\n").unwrap();
    ok(sygns(d, &["--config", "c.toml", "generate"]));
    assert_eq!(lines(&d.join("a.jsonl")), 7);
    ok(sygns(d, &["--config", "c.toml", "generate", "--n", "3", "--out", "b.jsonl"]));
    assert_eq!(lines(&d.join("b.jsonl")), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(sygns(d, &["split", "--strategy", "bogus"]).status.code(), Some(1));
    assert_eq!(sygns(d, &["convert", "--input", "missing.jsonl", "--out-dir", "c"]).status.code(), Some(2));
    ok(sygns(d, &["generate", "--n", "2", "--out", "g.jsonl"]));
    fs::write(d.join("p.tsv"), "pool-000000\tx\n").unwrap();
    let out = sygns(
        d,
        &[
            "evaluate", "--gold", "g.jsonl", "--pred", "p.tsv", "--mr", "fol", "--metrics", "entail",
            "--external", "no-such-prover {}", "--report", "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        sygns(d, &["evaluate", "--gold", "g.jsonl", "--pred", "p.tsv", "--mr", "fol", "--metrics", "counter", "--report", "r.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn prove_and_polarity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(sygns(
        d,
        &["prove", "--premise", "all x1 . ( dog ( x1 ) -> run ( x1 ) )", "--conclusion", "all x1 . ( ( dog ( x1 ) & small ( x1 ) ) -> run ( x1 ) )"],
    ));
    assert!(String::from_utf8_lossy(&out.stdout).contains("entails"));
    let out = ok(sygns(d, &["polarity", "--formula", "ALL AND DOG WILD RUN", "--mr", "vf"]));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "dog↓ wild↓ run↑");
}
