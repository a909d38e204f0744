use std::fs;
use std::path::Path;
use std::process::Command;

use entroshrink::cli::run_with;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["entroshrink"];
    full.extend_from_slice(args);
    let code = run_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn value_lines(out: &str) -> Vec<&str> {
    out.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn freqs_shrink_reports_lambda_and_cells() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "8,2\n");
    let (code, out, _) = run(&["freqs", &f, "--estimator", "shrink"]);
    assert_eq!(code, 0);
    assert!(out.contains("lambda=0.197531"), "{out}");
    assert!(out.contains("0.740741") && out.contains("0.259259"), "{out}");
}

#[test]
fn freqs_ml() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "4\n6\n");
    let (code, out, _) = run(&["freqs", &f, "--estimator", "ml"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.400000") && out.contains("0.600000"), "{out}");
}

#[test]
fn freqs_bayes_needs_known_prior() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "3,1");
    let (code, out, _) = run(&["freqs", &f, "--estimator", "bayes", "--prior", "laplace"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.666667") && out.contains("0.333333"), "{out}");
    let (code, _, _) = run(&["freqs", &f, "--estimator", "bayes", "--prior", "bogus"]);
    assert_eq!(code, 2);
}

#[test]
fn negative_counts_are_usage_errors() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "-1,2");
    let (code, _, err) = run(&["freqs", &f]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn malformed_counts_are_format_errors() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "1,x,2");
    assert_eq!(run(&["entropy", &f]).0, 3);
}

#[test]
fn degenerate_counts_are_domain_errors() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "0,0,0");
    assert_eq!(run(&["entropy", &f, "--estimator", "ml"]).0, 4);
}

#[test]
fn entropy_examples() {
    let d = TempDir::new().unwrap();
    for (counts, est, expect) in [
        ("5,5", "ml", "0.693147"),
        ("2,2", "miller-madow", "0.818147"),
        ("2,1", "chao-shen", "1.066247"),
    ] {
        let f = write(&d, "c.txt", counts);
        let (code, out, err) = run(&["entropy", &f, "--estimator", est]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains(expect), "{est} on {counts}: {out}");
    }
}

#[test]
fn unknown_estimator_is_usage_error() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "5,5");
    assert_eq!(run(&["entropy", &f, "--estimator", "nsb"]).0, 2);
}

fn chain_matrix() -> String {
    // a -> b -> c with the a/c link weakened by two independent perturbations
    let a = [0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2];
    let b = [0, 1, 2, 0, 1, 2, 0, 1, 2, 1, 2, 0, 0, 1, 2, 0, 2, 2];
    let c = [0, 1, 2, 1, 1, 2, 0, 1, 0, 1, 2, 0, 2, 1, 2, 0, 2, 1];
    let row = |name: &str, v: &[i32]| {
        let mut s = name.to_string();
        for x in v {
            s.push_str(&format!(",{x}"));
        }
        s
    };
    format!("{}\n{}\n{}\n", row("a", &a), row("b", &b), row("c", &c))
}

fn pair_value(mi_out: &str, s: &str, t: &str) -> f64 {
    value_lines(mi_out)
        .iter()
        .find_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f.len() == 3 && f[0] == s && f[1] == t).then(|| f[2].parse().unwrap())
        })
        .unwrap()
}

#[test]
fn network_prunes_weakest_triangle_edge() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.csv", &chain_matrix());
    let (code, mi, err) = run(&["mi", "--input", &m, "--levels", "3", "--estimator", "ml"]);
    assert_eq!(code, 0, "{err}");
    let (ab, ac, bc) = (pair_value(&mi, "a", "b"), pair_value(&mi, "a", "c"), pair_value(&mi, "b", "c"));
    assert!(ac < ab && ac < bc, "{mi}");

    let (code, dot, _) = run(&["network", "--input", &m, "--levels", "3", "--estimator", "ml"]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("graph"));
    assert!(dot.contains("\"a\" -- \"b\"") && dot.contains("\"b\" -- \"c\""), "{dot}");
    assert!(!dot.contains("\"a\" -- \"c\""), "{dot}");

    let (code, csv, _) = run(&["network", "--input", &m, "--levels", "3", "--estimator", "ml", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().next(), Some("source,target,mi"));
    assert_eq!(csv.lines().count(), 3);

    let (code, xml, _) = run(&["network", "--input", &m, "--levels", "3", "--format", "graphml"]);
    assert_eq!(code, 0);
    assert!(xml.contains("<graphml"));
}

#[test]
fn discretize_reports_levels() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.csv", &chain_matrix());
    let (code, out, _) = run(&["discretize", "--input", &m, "--levels", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# levels=3"), "{out}");
    assert_eq!(value_lines(&out).len(), 3);
}

#[test]
fn bad_matrix_is_format_error() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.csv", "a,1,2,3\nb,1,oops,3\n");
    assert_eq!(run(&["mi", "--input", &m, "--levels", "2"]).0, 3);
    let m = write(&d, "r.csv", "a,1,2,3\nb,1,2\n");
    assert_eq!(run(&["mi", "--input", &m, "--levels", "2"]).0, 3);
}

#[test]
fn mi_on_wide_matrix_lists_every_pair() {
    let d = TempDir::new().unwrap();
    let mut text = String::new();
    for g in 0..102 {
        text.push_str(&format!("g{g}"));
        for s in 0..9 {
            text.push_str(&format!(",{}", ((g * 7 + s * 13) % 11) as f64 * 0.5));
        }
        text.push('\n');
    }
    let m = write(&d, "wide.csv", &text);
    let (code, out, err) = run(&["mi", "--input", &m, "--levels", "3"]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<_> = value_lines(&out).into_iter().filter(|l| *l != "source,target,mi").collect();
    assert_eq!(rows.len(), 5151);
    let (code, full, _) = run(&["mi", "--input", &m, "--levels", "3", "--full"]);
    assert_eq!(code, 0);
    assert!(value_lines(&full).len() >= 102);
}

#[test]
fn bench_is_reproducible_and_thread_independent() {
    let d = TempDir::new().unwrap();
    let args = |threads: &'static str| {
        vec!["bench", "--p", "20", "--n-grid", "5,50", "--runs", "10", "--seed", "7", "--threads", threads]
    };
    let (c1, a, _) = run(&args("1"));
    let (c2, b, _) = run(&args("1"));
    let (c3, c, _) = run(&args("3"));
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(a.starts_with("# seed=7"));

    let cfg = write(&d, "bench.cfg", "p = 20\nn_grid = 5,50\nruns = 10\nseed = 7\n");
    let (code, from_cfg, err) = run(&["bench", "--config", &cfg, "--threads", "2"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(from_cfg, a);
}

#[test]
fn js_demo_runs() {
    let (code, out, _) = run(&["js-demo", "--p", "10", "--draws", "2000"]);
    assert_eq!(code, 0);
    assert!(!out.is_empty());
    assert_eq!(run(&["js-demo", "--p", "2"]).0, 4);
}

#[test]
fn out_flag_writes_file() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "5,5");
    let target = d.path().join("h.txt");
    let (code, out, _) = run(&["entropy", &f, "--estimator", "ml", "--out", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(fs::read_to_string(&target).unwrap().contains("0.693147"));
}

#[test]
fn binary_help_and_exit_codes() {
    let exe = Path::new(env!("CARGO_BIN_EXE_entroshrink"));
    for sub in ["freqs", "entropy", "discretize", "mi", "network", "bench", "js-demo"] {
        let o = Command::new(exe).args([sub, "--help"]).output().unwrap();
        assert!(o.status.success(), "{sub} --help");
        assert!(!o.stdout.is_empty());
    }
    let o = Command::new(exe).arg("--help").output().unwrap();
    assert!(o.status.success());
    let o = Command::new(exe).arg("no-such-command").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let d = TempDir::new().unwrap();
    let f = write(&d, "c.txt", "5,5");
    let o = Command::new(exe).args(["entropy", &f, "--estimator", "ml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.693147"));
}
