//! Each subcommand must reproduce the library call bit for bit.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use freemoments::estimators::{
    check_g2_routes, check_info_noise_routes, g2_fixed_point, g2_moment_route, info_noise_forward,
    info_noise_inverse, InfoNoiseParams,
};
use freemoments::freeconv::{add_conv, add_deconv, mp_conv, mp_deconv, mult_conv, mult_deconv};
use freemoments::rmtsim::{
    mixed_moment_decay, simulate_info_noise, DecaySpec, EnsembleSpec, Factor, MixedTerm,
};
use freemoments::{AtomicMeasure, ExecMode, MomentSequence};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freemoments"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a `format: 1` CSV, after checking the header.
fn rows(text: &str, header: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("format: 1"));
    assert_eq!(lines.next(), Some(header));
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn column(text: &str, header: &str, col: usize) -> Vec<f64> {
    rows(text, header).iter().map(|r| r[col].parse().unwrap()).collect()
}

fn moments_out(args: &[&str]) -> Vec<f64> {
    column(&stdout_of(args), "k,m_k", 1)
}

struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    fn new() -> Self {
        Fixtures {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> String {
        let path: PathBuf = self.dir.path().join(name);
        std::fs::write(&path, format!("format: 1\n{body}")).unwrap();
        path.to_str().unwrap().to_owned()
    }

    fn moments(&self, name: &str, m: &[f64]) -> String {
        let body: Vec<String> = m.iter().map(|v| format!("{v:e}")).collect();
        self.file(name, &format!("moments: {}\n", body.join(" ")))
    }

    fn atoms(&self, name: &str, mu: &AtomicMeasure) -> String {
        let body: String = mu
            .atoms()
            .iter()
            .map(|(x, w)| format!("atom {x:e} {w:e}\n"))
            .collect();
        self.file(name, &body)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn seq(v: &[f64]) -> MomentSequence {
    MomentSequence::new(v.to_vec()).unwrap()
}

fn two_atoms() -> AtomicMeasure {
    AtomicMeasure::new(vec![(1.0, 0.5), (3.0, 0.5)]).unwrap()
}

const A: [f64; 6] = [1.5, 3.0, 7.25, 18.0, 47.5, 130.0];
const B: [f64; 6] = [0.75, 1.0, 1.6, 2.8, 5.2, 10.0];

#[test]
fn binary_operations_match_library() {
    let f = Fixtures::new();
    let (a, b) = (f.moments("a", &A), f.moments("b", &B));
    let (sa, sb) = (seq(&A), seq(&B));
    let cases: [(&str, MomentSequence); 4] = [
        ("conv-add", add_conv(&sa, &sb).unwrap()),
        ("deconv-add", add_deconv(&sa, &sb).unwrap()),
        ("conv-mult", mult_conv(&sa, &sb).unwrap()),
        ("deconv-mult", mult_deconv(&sa, &sb).unwrap()),
    ];
    for (cmd, expect) in cases {
        let got = moments_out(&[cmd, "--input", &a, "--input", &b]);
        assert_eq!(got, expect.as_slice(), "{cmd}");
    }
}

#[test]
fn marchenko_pastur_operations_match_library() {
    let f = Fixtures::new();
    let a = f.moments("a", &A);
    let got = moments_out(&["mp-conv", "--c", "0.3", "--input", &a]);
    assert_eq!(got, mp_conv(&seq(&A), 0.3).unwrap().as_slice());
    let got = moments_out(&["mp-deconv", "--c", "0.3", "--input", &a, "--order", "4"]);
    assert_eq!(got, mp_deconv(&seq(&A[..4]), 0.3).unwrap().as_slice());
}

#[test]
fn catalan_numbers_deconvolve_to_ones() {
    let f = Fixtures::new();
    let cat = f.moments("cat", &[1.0, 2.0, 5.0, 14.0, 42.0]);
    let got = moments_out(&["mp-deconv", "--c", "1", "--order", "5", "--input", &cat]);
    assert_eq!(got, vec![1.0; 5]);
}

#[test]
fn info_noise_and_denoise_match_library() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let gamma = two_atoms().moments(10).unwrap();
    let p = InfoNoiseParams::new(0.5, 0.25, 10).unwrap();
    let w = info_noise_forward(&gamma, &p).unwrap();
    let got = moments_out(&["info-noise", "--c", "0.5", "--sigma2", "0.25", "--input", &g]);
    assert_eq!(got, w.as_slice());

    let wf = f.moments("w", w.as_slice());
    let got = moments_out(&["denoise", "--c", "0.5", "--sigma2", "0.25", "--input", &wf]);
    assert_eq!(got, info_noise_inverse(&w, &p).unwrap().as_slice());
}

#[test]
fn zero_noise_echoes_input() {
    let f = Fixtures::new();
    let a = f.moments("a", &A);
    let got = moments_out(&["info-noise", "--c", "0.5", "--sigma2", "0", "--input", &a]);
    for (x, y) in got.iter().zip(&A) {
        assert!((x - y).abs() <= 1e-12 * y, "{x} vs {y}");
    }
}

#[test]
fn info_noise_then_denoise_through_files() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let w = f.path("w.csv");
    let back = f.path("back.csv");
    let common = ["--c", "0.5", "--sigma2", "0.25", "--order", "8"];
    let mut args = vec!["info-noise", "--input", &g, "--output", w.to_str().unwrap()];
    args.extend(common);
    stdout_of(&args);
    let mut args = vec!["denoise", "--input", w.to_str().unwrap(), "--output", back.to_str().unwrap()];
    args.extend(common);
    stdout_of(&args);
    let got = column(&std::fs::read_to_string(&back).unwrap(), "k,m_k", 1);
    let expect = two_atoms().moments(8).unwrap();
    for (x, y) in got.iter().zip(expect.as_slice()) {
        assert!((x - y).abs() <= 1e-10 * y, "{x} vs {y}");
    }
}

#[test]
fn g2_matches_library() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let out = stdout_of(&["g2", "--c", "0.5", "--z", "-5", "--z", "-10", "--input", &g]);
    let got = column(&out, "z,g2", 1);
    let expect: Vec<f64> = [-5.0, -10.0]
        .iter()
        .map(|&z| g2_fixed_point(&two_atoms(), 0.5, z).unwrap())
        .collect();
    assert_eq!(got, expect);

    let out = stdout_of(&[
        "g2", "--c", "0.5", "--z", "-10", "--support-bound", "2.5", "--input", &g,
    ]);
    let m = two_atoms().moments(40).unwrap();
    assert_eq!(column(&out, "z,g2", 1), vec![g2_moment_route(&m, 0.5, -10.0, 2.5).unwrap()]);
}

#[test]
fn simulate_matches_library_and_is_deterministic() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let args = [
        "simulate", "--n", "64", "--N", "128", "--sigma2", "0.25", "--seed", "42", "--reps", "4",
        "--input", &g,
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let mut spec = EnsembleSpec::new(64, 128, 0.25, two_atoms(), 42);
    spec.reps = 4;
    let est = simulate_info_noise(&spec, ExecMode::Parallel).unwrap();
    let text = String::from_utf8(first.stdout).unwrap();
    assert_eq!(column(&text, "k,m_k,stderr", 1), est.mean.as_slice());
    assert_eq!(column(&text, "k,m_k,stderr", 2), est.stderr);
}

#[test]
fn simulate_requires_a_seed() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let out = run(&["simulate", "--n", "8", "--N", "8", "--sigma2", "1", "--input", &g]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn mixed_decay_matches_library() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let out = stdout_of(&[
        "mixed-decay", "--c", "0.5", "--seed", "3", "--reps", "2", "--n", "16", "--n", "32",
        "--pattern", "noise,signal", "--input", &g,
    ]);
    let spec = DecaySpec {
        c: 0.5,
        gamma: two_atoms(),
        seed: 3,
        reps: 2,
    };
    let pattern = [MixedTerm::linear(Factor::Noise), MixedTerm::linear(Factor::Signal)];
    let points = mixed_moment_decay(&[16, 32], &spec, &pattern, ExecMode::Parallel).unwrap();
    let expect: Vec<f64> = points.iter().map(|p| p.mean).collect();
    assert_eq!(column(&out, "n,mean,stderr", 1), expect);
}

#[test]
fn validate_reports_both_checks() {
    let f = Fixtures::new();
    let g = f.atoms("g", &two_atoms());
    let out = stdout_of(&["validate", "--c", "0.5", "--sigma2", "0.25", "--input", &g]);
    let table = rows(&out, "check,z,first,second,diff,tolerance,pass");
    let p = InfoNoiseParams::new(0.5, 0.25, 40).unwrap();
    let zs = [-8.0, -10.0, -15.0];
    let mut expect = check_info_noise_routes(&two_atoms(), &p, &zs).unwrap();
    expect.extend(check_g2_routes(&two_atoms(), 0.5, &zs, 40, 3.0).unwrap());
    assert_eq!(table.len(), expect.len());
    for (row, c) in table.iter().zip(&expect) {
        assert_eq!(row[0], c.name);
        assert_eq!(row[2].parse::<f64>().unwrap(), c.first);
        assert_eq!(row[3].parse::<f64>().unwrap(), c.second);
        assert_eq!(row[6], "true");
    }
}

fn exit_code(args: &[&str]) -> Option<i32> {
    run(args).status.code()
}

#[test]
fn exit_codes() {
    let f = Fixtures::new();
    let a = f.moments("a", &A);
    let bad = f.file("bad", "moments: 1 two\n");
    let headerless = f.path("headerless");
    std::fs::write(&headerless, "moments: 1 2\n").unwrap();
    let missing = Path::new("/nonexistent/input");
    let zero_lead = f.moments("z", &[0.0, 1.0]);

    assert_eq!(exit_code(&["mp-conv", "--c", "1", "--input", &a]), Some(0));
    assert_eq!(exit_code(&["mp-conv", "--c", "1", "--input", &bad]), Some(2));
    assert_eq!(exit_code(&["mp-conv", "--c", "1", "--input", headerless.to_str().unwrap()]), Some(2));
    assert_eq!(exit_code(&["mp-conv", "--c", "1", "--input", missing.to_str().unwrap()]), Some(2));
    assert_eq!(exit_code(&["mp-conv", "--c", "1", "--input", &a, "--bogus"]), Some(2));
    assert_eq!(exit_code(&["no-such-command"]), Some(2));
    assert_eq!(exit_code(&["conv-add", "--input", &a]), Some(2));
    assert_eq!(exit_code(&["mp-conv", "--c=-1", "--input", &a]), Some(1));
    assert_eq!(exit_code(&["deconv-mult", "--input", &a, "--input", &zero_lead, "--order", "2"]), Some(1));
    assert_eq!(exit_code(&["g2", "--c", "0.5", "--z", "1", "--input", &f.atoms("g", &two_atoms())]), Some(1));
}
