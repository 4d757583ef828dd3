use std::fs;
use std::path::Path;

use alaam::cli::{main as cli, EXIT_IO, EXIT_OK, EXIT_STATISTICAL, EXIT_USAGE};

fn write_inputs(dir: &Path) {
    let edges = "a b\nb c\nc a\nc d\nd e\ne f\nf d\nb e\n";
    fs::write(dir.join("edges.txt"), edges).unwrap();
    fs::write(dir.join("y.csv"), "id,outcome,age\nf,0,2\ne,1,3\nd,0,1\nc,1,5\nb,0,2\na,1,4\n").unwrap();
    fs::write(dir.join("zeros.csv"), "id,outcome\na,0\nb,0\nc,0\nd,0\ne,0\nf,0\n").unwrap();
}

fn run(dir: &Path, args: &[&str]) -> i32 {
    let mut full = vec!["alaam".to_string()];
    full.extend(args.iter().map(|a| a.replace("{}", &dir.display().to_string())));
    cli(full)
}

#[test]
fn stats_writes_tables_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    write_inputs(d.path());
    let code = run(d.path(), &["stats", "--graph", "{}/edges.txt", "--outcome", "{}/y.csv", "--out", "{}/o"]);
    assert_eq!(code, EXIT_OK);
    for f in ["stats.csv", "stats.txt", "outcome_degrees.csv", "node_ids.tsv", "manifest.json"] {
        assert!(d.path().join("o").join(f).exists(), "{f}");
    }
    let manifest = fs::read_to_string(d.path().join("o/manifest.json")).unwrap();
    assert!(manifest.contains("\"sha256\""));
    assert!(manifest.contains(&d.path().join("edges.txt").display().to_string()));
}

#[test]
fn rerun_reproduces_outputs_and_refuses_changed_inputs() {
    let d = tempfile::tempdir().unwrap();
    write_inputs(d.path());
    let code = run(
        d.path(),
        &[
            "simulate", "--graph", "{}/edges.txt", "--outcome", "{}/y.csv", "--effects", "Density,Contagion",
            "--theta", "-0.5,0.3", "--seed", "9", "--set", "samples=50", "--out", "{}/a",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let first = fs::read(d.path().join("a/samples.csv")).unwrap();
    assert_eq!(run(d.path(), &["rerun", "{}/a/manifest.json", "--out", "{}/b"]), EXIT_OK);
    assert_eq!(first, fs::read(d.path().join("b/samples.csv")).unwrap());

    fs::write(d.path().join("edges.txt"), "a b\nb c\nc a\nc d\nd e\ne f\nf d\n").unwrap();
    assert_eq!(run(d.path(), &["rerun", "{}/a/manifest.json", "--out", "{}/c"]), EXIT_USAGE);
    assert!(!d.path().join("c/samples.csv").exists());
    assert_eq!(run(d.path(), &["rerun", "{}/a/manifest.json", "--force", "--out", "{}/c"]), EXIT_OK);
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    write_inputs(d.path());
    let base = ["--graph", "{}/edges.txt", "--out", "{}/o"];
    let with = |extra: &[&'static str]| -> Vec<&str> { extra.iter().copied().chain(base).collect() };
    assert_eq!(run(d.path(), &with(&["simulate", "--effects", "NoSuchEffect"])), EXIT_USAGE);
    assert_eq!(run(d.path(), &with(&["simulate", "--effects", "Sender"])), EXIT_USAGE);
    assert_eq!(run(d.path(), &with(&["simulate", "--set", "bogus=1", "--effects", "Density"])), EXIT_USAGE);
    assert_eq!(run(d.path(), &with(&["estimate-sa", "--effects", "Density"])), EXIT_USAGE);
    assert_eq!(
        run(d.path(), &["simulate", "--graph", "{}/missing.txt", "--effects", "Density", "--out", "{}/o"]),
        EXIT_IO
    );
    assert_eq!(
        run(d.path(), &with(&["estimate-sa", "--outcome", "{}/zeros.csv", "--effects", "Density,Contagion"])),
        EXIT_STATISTICAL
    );
    assert_eq!(run(d.path(), &["--help"]), EXIT_OK);
    assert_eq!(run(d.path(), &["frobnicate"]), EXIT_USAGE);
}

#[test]
fn config_file_and_enumerate() {
    let d = tempfile::tempdir().unwrap();
    write_inputs(d.path());
    let cfg = format!(
        "# tiny model\ngraph = {}/edges.txt\neffect = Density -0.2\neffect = GWActivity 0.4\neffect = Contagion 0.1\n",
        d.path().display()
    );
    fs::write(d.path().join("run.cfg"), cfg).unwrap();
    assert_eq!(run(d.path(), &["enumerate", "--config", "{}/run.cfg", "--out", "{}/e"]), EXIT_OK);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("e/enumeration.json")).unwrap()).unwrap();
    assert_eq!(json["configurations"], 64);
    let probs = fs::read_to_string(d.path().join("e/probabilities.csv")).unwrap();
    let total: f64 = probs.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);

    fs::write(d.path().join("bad.cfg"), "graph = x\nthis line is wrong\n").unwrap();
    assert_eq!(run(d.path(), &["stats", "--config", "{}/bad.cfg", "--out", "{}/f"]), EXIT_USAGE);
}

#[test]
fn estimation_and_diagnostics_outputs() {
    let d = tempfile::tempdir().unwrap();
    write_inputs(d.path());
    let common = ["--graph", "{}/edges.txt", "--outcome", "{}/y.csv", "--effects", "Density,Contagion"];
    let args = |cmd: &'static str, out: &'static str, extra: &[&'static str]| -> Vec<&'static str> {
        let mut v = vec![cmd];
        v.extend(common);
        v.extend(extra);
        v.extend(["--out", out]);
        v
    };
    assert_eq!(run(d.path(), &args("estimate-ee", "{}/ee", &["--set", "replicates=2"])), EXIT_OK);
    assert!(d.path().join("ee/estimates.csv").exists());
    assert!(d.path().join("ee/trajectory.csv").exists());
    assert_eq!(run(d.path(), &args("gof", "{}/gof", &["--theta", "0,0", "--set", "samples=50"])), EXIT_OK);
    for f in ["gof.csv", "degree_distribution.csv", "degree_means.csv"] {
        assert!(d.path().join("gof").join(f).exists(), "{f}");
    }
    assert_eq!(run(d.path(), &args("degen-check", "{}/dg", &["--theta", "0,0"])), EXIT_OK);
    for f in ["degeneracy_summary.csv", "degeneracy_trace.csv", "degeneracy_histogram.csv"] {
        assert!(d.path().join("dg").join(f).exists(), "{f}");
    }
    let sweep = args("sweep", "{}/sw", &["--set", "varied=Contagion", "--set", "lo=-0.5", "--set", "hi=0.5", "--set", "step=0.05"]);
    assert_eq!(run(d.path(), &sweep), EXIT_OK);
    let table = fs::read_to_string(d.path().join("sw/sweep.csv")).unwrap();
    assert!(table.starts_with("theta,sample,Density,Contagion,mean_degree_y1\n"));
    assert!(d.path().join("sw/transition.txt").exists());
}
