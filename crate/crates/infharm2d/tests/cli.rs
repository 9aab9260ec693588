use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use infharm2d::formats::read_phase_csv;
use infharm2d::{eval, RunConfig};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_infharm2d"));
    cmd.args(args).env_remove("INFHARM2D_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn cfg(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write_cfg(dir: &Path, body: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_A: &str = "k.kind = example_a
grid.xmin = -1
grid.xmax = 1
grid.ymin = -1
grid.ymax = 1
grid.nx = 3
grid.ny = 3
";

#[test]
fn bundled_configs_verify() {
    for name in ["case_a.cfg", "case_b.cfg", "exp_diag.cfg", "negative_control.cfg"] {
        let out = run(&["verify", "--config", &cfg(name)], &[]);
        let stdout = text(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{name}\n{stdout}{}", text(&out.stderr));
        assert!(!stdout.contains("FAIL"), "{stdout}");
        assert!(stdout.lines().last().unwrap().starts_with("verify: PASS"));
    }
}

#[test]
fn verify_report_order() {
    let out = run(&["verify", "--config", &cfg("case_a.cfg")], &[]);
    let names: Vec<String> =
        text(&out.stdout).lines().filter_map(|l| l.split_whitespace().nth(1).map(String::from)).collect();
    let expected = [
        "sup_k",
        "residual_index_form",
        "residual_closed_form",
        "form_agreement",
        "fd_convergence",
        "oracle_agreement",
        "affine_on_omega1",
        "rank1_relations",
        "dichotomy",
        "jump_across_sigma",
        "jump_in_interiors",
        "negative_control",
        "junctions_corners",
        "e_infinity",
    ];
    assert_eq!(&names[..expected.len()], &expected);
}

#[test]
fn verification_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Right map, wrong oracle.
    let body =
        fs::read_to_string(configs().join("case_a.cfg")).unwrap().replace("verify.oracle = a", "verify.oracle = b");
    let out = run(&["verify", "--config", &write_cfg(dir.path(), &body)], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("FAIL  oracle_agreement"));

    // The non-solution checked as if it were a solution.
    let body = fs::read_to_string(configs().join("negative_control.cfg"))
        .unwrap()
        .replace("verify.expect = non_solution", "verify.expect = solution");
    let out = run(&["verify", "--config", &write_cfg(dir.path(), &body)], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("FAIL  residual_index_form"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let no_nx = write_cfg(dir.path(), &SMALL_A.replace("grid.nx = 3\n", ""));
    for sub in ["field", "phase", "interface", "verify"] {
        let out = run(&[sub, "--config", &no_nx], &[]);
        assert_eq!(out.status.code(), Some(2), "{sub}");
        assert!(text(&out.stderr).contains("grid.nx"), "{}", text(&out.stderr));
    }
    // The flag supplies the missing key.
    let out = run(&["field", "--config", &no_nx, "--nx", "3", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));

    assert_eq!(run(&["field", "--config", "/nonexistent/x.cfg"], &[]).status.code(), Some(2));
    assert_eq!(run(&["transmogrify"], &[]).status.code(), Some(2));
    assert_eq!(run(&["field"], &[]).status.code(), Some(2));
    assert_eq!(run(&["field", "--config", &no_nx, "--nx", "lots"], &[]).status.code(), Some(2));

    let good = write_cfg(dir.path(), SMALL_A);
    let out = run(&["phase", "--config", &good, "--tol-rank", "0"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("tol.rank"));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = run(&["field", "--config", &good, "--out", blocker.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("I/O error"), "{}", text(&out.stderr));

    let out = run(&["field", "--config", &good], &[("INFHARM2D_THREADS", "two")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("INFHARM2D_THREADS"));

    let help = run(&["--help"], &[]);
    assert_eq!(help.status.code(), Some(0));
    assert!(text(&help.stdout).contains("verify"));
}

/// `f(1) = ∫₀¹ e^{iK}` with `K(s) = s²/(s²+1)`, by composite Simpson.
fn simpson_f1() -> (f64, f64) {
    let n = 20_000;
    let h = 1.0 / n as f64;
    let (mut cx, mut cy) = (0.0, 0.0);
    for k in 0..=n {
        let s = k as f64 * h;
        let kk = s * s / (s * s + 1.0);
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        cx += w * kk.cos();
        cy += w * kk.sin();
    }
    (cx * h / 3.0, cy * h / 3.0)
}

#[test]
fn field_csv_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["field", "--config", &write_cfg(dir.path(), SMALL_A), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("field.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(csv.lines().next().unwrap(), "x,y,u1,u2,du11,du21,du12,du22,res1,res2,rank_indicator");
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.len() == 11));
    assert_eq!(&rows[0][..4], &[-1.0, -1.0, 0.0, 0.0]);
    assert_eq!(&rows[0][8..10], &[0.0, 0.0]);
    let r = &rows[5];
    assert_eq!(&r[..2], &[1.0, 0.0]);
    let (fx, fy) = simpson_f1();
    assert!((r[2] - fx).abs() < 1e-13 && (r[3] - fy).abs() < 1e-13, "{r:?} vs ({fx}, {fy})");
    assert_eq!(&r[8..10], &[0.0, 0.0]);
    // Column order: du11 = ∂u₁/∂x, du21 = ∂u₂/∂x; at (1, 0) ∂u/∂y = -f'(0) = (-1, 0).
    assert_eq!((r[6], r[7]), (-1.0, -0.0));
    assert!((r[4] - (0.5f64).cos()).abs() < 1e-15 && (r[5] - (0.5f64).sin()).abs() < 1e-15);
    assert_eq!(csv, fs::read_to_string(golden("small_a_field.csv")).unwrap());
}

#[test]
fn phase_outputs_are_deterministic_and_round_trip() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (d, threads) in dirs.iter().zip(["1", "3"]) {
        for sub in ["phase", "interface", "field"] {
            let out = run(
                &[
                    sub,
                    "--config",
                    &cfg("case_b.cfg"),
                    "--nx",
                    "121",
                    "--ny",
                    "121",
                    "--out",
                    d.path().to_str().unwrap(),
                ],
                &[("INFHARM2D_THREADS", threads)],
            );
            assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
        }
    }
    for f in ["phase.ppm", "phase.csv", "interface.csv", "interface_report.txt", "field.csv"] {
        let a = fs::read(dirs[0].path().join(f)).unwrap();
        let b = fs::read(dirs[1].path().join(f)).unwrap();
        assert!(a == b, "{f} differs between runs");
    }

    let c = RunConfig::load(&configs().join("case_b.cfg"), &[("grid.nx", "121".into()), ("grid.ny", "121".into())])
        .unwrap();
    let pm = eval::phase_map(&c.build_map().unwrap(), &c.grid, c.tol_rank).unwrap();
    let csv = fs::read(dirs[0].path().join("phase.csv")).unwrap();
    assert_eq!(read_phase_csv(&csv[..], c.tol_rank).unwrap(), pm);
}

#[test]
fn golden_phase_images() {
    let dir = tempfile::tempdir().unwrap();
    for (name, n) in [("case_a", "25"), ("case_b", "25")] {
        let out_dir = dir.path().join(name);
        let out = run(
            &[
                "phase",
                "--config",
                &cfg(&format!("{name}.cfg")),
                "--nx",
                n,
                "--ny",
                n,
                "--out",
                out_dir.to_str().unwrap(),
            ],
            &[],
        );
        assert_eq!(out.status.code(), Some(0));
        let got = fs::read(out_dir.join("phase.ppm")).unwrap();
        assert!(got == fs::read(golden(&format!("{name}_25.ppm"))).unwrap(), "{name} image changed");
    }
}

#[test]
fn zero_profile_is_uniformly_gray() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL_A.replace("example_a", "zero").replace("= 3", "= 17");
    let out = run(&["phase", "--config", &write_cfg(dir.path(), &body), "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let ppm = fs::read(dir.path().join("phase.ppm")).unwrap();
    let header = b"P6\n17 17\n255\n";
    assert_eq!(&ppm[..header.len()], header);
    assert!(ppm[header.len()..].iter().all(|&b| b == 96));
    assert_eq!(ppm.len(), header.len() + 3 * 17 * 17);
}

#[test]
fn interface_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = |name: &str| {
        let d = dir.path().join(name);
        let out = run(&["interface", "--config", &cfg(&format!("{name}.cfg")), "--out", d.to_str().unwrap()], &[]);
        assert_eq!(out.status.code(), Some(0));
        fs::read_to_string(d.join("interface_report.txt")).unwrap()
    };
    let parse = |s: &str| -> Vec<(String, f64, f64, f64)> {
        s.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(' ').collect();
                (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
            })
            .collect()
    };
    let a = parse(&report("case_a"));
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].0, "junction");
    assert!(a[0].1.abs() <= 0.05 && a[0].2.abs() <= 0.05 && a[0].3 == 3.0);

    let b = parse(&report("case_b"));
    let junctions: Vec<_> = b.iter().filter(|r| r.0 == "junction").collect();
    let corners: Vec<_> = b.iter().filter(|r| r.0 == "corner").collect();
    assert_eq!((junctions.len(), corners.len()), (2, 2));
    for j in junctions {
        assert!((j.1.abs() - 1.0).abs() <= 0.05 && (j.1 - j.2).abs() <= 0.1 && j.3 == 3.0);
    }
    for c in corners {
        assert!((c.1.abs() - 1.0).abs() <= 0.05 && (c.1 + c.2).abs() <= 0.1 && (c.3 - 90.0).abs() < 1.0);
    }
    assert_eq!(report("exp_diag"), "");
    assert_eq!(report("case_b"), fs::read_to_string(golden("case_b_interface_report.txt")).unwrap());
}
