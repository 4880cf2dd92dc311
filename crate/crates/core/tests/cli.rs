use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use nodeless::isospectral::ratio_r;

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
        .join("cli")
        .join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn nodeless(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodeless"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn profile_single_values() {
    let out = scratch("profile_single");
    let o = nodeless(&[
        "--out",
        out.to_str().unwrap(),
        "profile",
        "--kappa",
        "1",
        "--l",
        "1",
        "--quantity",
        "zero-mode",
        "--rho",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "rho,zero-mode\n1,0.353553390593\n");
    assert_eq!(
        fs::read_to_string(out.join("profile.csv")).unwrap(),
        stdout(&o)
    );

    let o = nodeless(&[
        "--out",
        out.to_str().unwrap(),
        "profile",
        "--kappa",
        "1",
        "--l",
        "0",
        "--lambda",
        "0.1",
        "--quantity",
        "ratio",
        "--rho",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = data_rows(&stdout(&o))[0][1];
    assert!((v - 0.3146018).abs() < 5e-8);
}

#[test]
fn profile_drops_singular_origin_with_notice() {
    let out = scratch("profile_origin");
    let o = nodeless(&[
        "--out",
        out.to_str().unwrap(),
        "profile",
        "--kappa",
        "1",
        "--l",
        "2",
        "--quantity",
        "impedance,zero-mode",
        "--start",
        "0",
        "--end",
        "2",
        "--count",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho = 0 dropped"));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], 0.5);
    assert!((rows[1][1] - 2f64.powf(2.5)).abs() < 1e-10);
}

#[test]
fn precision_flag_and_config_file() {
    let out = scratch("precision");
    fs::create_dir_all(&out).unwrap();
    let cfg = out.join("defaults.cfg");
    fs::write(&cfg, "# seeded defaults\nprecision = 4\n").unwrap();
    let base = [
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "profile",
        "--kappa",
        "1",
        "--l",
        "1",
        "--quantity",
        "zero-mode",
        "--rho",
        "1",
    ];
    assert_eq!(stdout(&nodeless(&base)), "rho,zero-mode\n1,0.3536\n");

    let mut flagged = base.to_vec();
    flagged.extend(["--precision", "6"]);
    assert_eq!(stdout(&nodeless(&flagged)), "rho,zero-mode\n1,0.353553\n");

    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(nodeless(&base).status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_2() {
    let out = scratch("invalid");
    let o = out.to_str().unwrap();
    for args in [
        vec![
            "--out",
            o,
            "profile",
            "--kappa",
            "-1",
            "--l",
            "0",
            "--quantity",
            "potential",
            "--rho",
            "1",
        ],
        vec![
            "--out",
            o,
            "profile",
            "--kappa",
            "1",
            "--l",
            "-1",
            "--quantity",
            "potential",
            "--rho",
            "1",
        ],
        vec![
            "--out",
            o,
            "profile",
            "--kappa",
            "1",
            "--l",
            "1",
            "--quantity",
            "ratio",
            "--rho",
            "1",
        ],
        vec![
            "--out",
            o,
            "profile",
            "--kappa",
            "1",
            "--l",
            "1",
            "--lambda",
            "0",
            "--quantity",
            "ratio",
            "--rho",
            "1",
        ],
        vec!["--out", o, "critical-l", "--kappa", "0"],
        vec!["--out", o, "reflect", "--strength", "2", "--k", "-1"],
        vec![
            "--out",
            o,
            "reflect",
            "--strength",
            "2",
            "--l",
            "1",
            "--k",
            "1",
        ],
        vec!["--out", o, "figures", "--figure", "4"],
        vec!["--out", o, "figures", "--lambda", "-0.5"],
        vec!["--out", o, "--precision", "0", "check"],
    ] {
        assert_eq!(nodeless(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn convergence_failure_exits_3() {
    let out = scratch("convergence");
    // no pocket is born for l in [8, 20]
    let o = nodeless(&[
        "--out",
        out.to_str().unwrap(),
        "critical-l",
        "--kappa",
        "1",
        "--l-min",
        "8",
        "--l-max",
        "20",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn critical_l_report() {
    let o = nodeless(&["critical-l", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(
        line.starts_with("l_star=6.87661 rho_star=1.59937 "),
        "{line}"
    );
    assert_eq!(line.lines().count(), 1);
}

#[test]
fn reflect_rows() {
    let out = scratch("reflect");
    let o = nodeless(&[
        "--out",
        out.to_str().unwrap(),
        "reflect",
        "--l",
        "0",
        "--k",
        "0.5,0.3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k,r2,t2,unitarity_residual\n"));
    let rows = data_rows(&text);
    assert_eq!(rows[0][0], 0.5);
    assert!((rows[0][1] - 0.15883).abs() < 1e-5);
    assert_eq!(rows[1][0], 0.3);
    assert_eq!(fs::read_to_string(out.join("reflect.csv")).unwrap(), text);
}

#[test]
fn figures_match_library_and_repeat_byte_for_byte() {
    let a = scratch("figures_a");
    let b = scratch("figures_b");
    for dir in [&a, &b] {
        let o = nodeless(&["--out", dir.to_str().unwrap(), "figures", "--svg"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for n in 1..=3u32 {
        let csv = fs::read_to_string(a.join(format!("fig{n}.csv"))).unwrap();
        assert_eq!(
            csv,
            fs::read_to_string(b.join(format!("fig{n}.csv"))).unwrap()
        );
        assert_eq!(
            fs::read(a.join(format!("fig{n}.svg"))).unwrap(),
            fs::read(b.join(format!("fig{n}.svg"))).unwrap()
        );
        assert!(!csv.contains('\r'));
        assert_eq!(
            csv.lines().next().unwrap(),
            "rho,lam_0.01,lam_0.1,lam_1,lam_10"
        );
        let rows = data_rows(&csv);
        assert_eq!(rows.len(), 601);
        assert_eq!(rows[0], vec![0.0, 0.01, 0.1, 1.0, 10.0]);
        for row in &rows {
            for (j, lam) in [0.01, 0.1, 1.0, 10.0].into_iter().enumerate() {
                let exact = ratio_r(n, lam, row[0]).unwrap();
                let emitted = nodeless::cli::format::format_sig(exact, 12);
                assert_eq!(emitted.parse::<f64>().unwrap(), row[j + 1]);
            }
        }
    }
    let svg = fs::read_to_string(a.join("fig1.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn check_suite_passes_and_is_deterministic() {
    let first = nodeless(&["check"]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    let second = nodeless(&["check"]);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn check_suite_catches_perturbed_coupling() {
    let o = nodeless(&["check", "--perturb-coupling", "0.01"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{text}");
    assert!(failed[0].contains("residual_zero_energy"));
}
