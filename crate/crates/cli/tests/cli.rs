use std::path::Path;
use std::process::{Command, Output};

fn esl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esl"))
        .current_dir(dir)
        .env_remove("ESL_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = esl(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    esl(dir, args).status.code().unwrap()
}

const PLANE_50: &str =
    "[scene]\nname = \"plane50\"\n[[scene.primitives]]\nkind = \"fronto_plane\"\ndepth = 0.5\n";

#[test]
fn config_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = ok(dir.path(), &["config"]);
    std::fs::write(dir.path().join("c.toml"), &first).unwrap();
    assert_eq!(ok(dir.path(), &["--config", "c.toml", "config"]), first);

    std::fs::write(dir.path().join("s.toml"), PLANE_50).unwrap();
    let custom = ok(dir.path(), &["--config", "s.toml", "config"]);
    assert!(custom.contains("depth = 0.5"));
    std::fs::write(dir.path().join("s2.toml"), &custom).unwrap();
    assert_eq!(ok(dir.path(), &["--config", "s2.toml", "config"]), custom);
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("unknown.toml"), "[esl]\nwindw = 3\n").unwrap();
    std::fs::write(d.join("syntax.toml"), "[esl\nwindow = 3\n").unwrap();
    std::fs::write(d.join("even.toml"), "[esl]\nwindow = 4\n").unwrap();
    let defaults = ok(d, &["config"]);
    std::fs::write(
        d.join("small.toml"),
        defaults.replace("width = 320", "width = 300"),
    )
    .unwrap();

    assert_eq!(code(d, &["--config", "unknown.toml", "config"]), 3);
    assert_eq!(code(d, &["--config", "even.toml", "config"]), 3);
    assert_eq!(code(d, &["--config", "syntax.toml", "config"]), 4);
    assert_eq!(code(d, &["--config", "missing.toml", "config"]), 5);
    assert_eq!(
        code(d, &["postproc", "--input", "nope.pfm", "--out", "x.pfm"]),
        5
    );
    assert_eq!(code(d, &["frobnicate"]), 2);

    ok(d, &["simulate", "--events", "ev.txt", "--gt", "gt.pfm"]);
    assert_eq!(
        code(
            d,
            &[
                "--config",
                "small.toml",
                "estimate",
                "--events",
                "ev.txt",
                "--out",
                "e.pfm"
            ]
        ),
        7
    );

    // An estimate with no valid pixel has no overlap with the ground truth.
    std::fs::write(d.join("empty.pfm"), b"Pf\n2 2\n-1.0\n").unwrap();
    let nan = f32::NAN.to_le_bytes();
    let mut bytes = std::fs::read(d.join("empty.pfm")).unwrap();
    for _ in 0..4 {
        bytes.extend_from_slice(&nan);
    }
    std::fs::write(d.join("empty.pfm"), bytes).unwrap();
    assert_eq!(
        code(d, &["eval", "--estimate", "empty.pfm", "--gt", "empty.pfm"]),
        6
    );
    assert_eq!(
        code(d, &["eval", "--estimate", "empty.pfm", "--gt", "gt.pfm"]),
        7
    );
}

#[test]
fn eval_of_identical_maps_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--events", "ev.txt", "--gt", "gt.pfm"]);
    let tsv = ok(
        d,
        &[
            "eval",
            "--estimate",
            "gt.pfm",
            "--gt",
            "gt.pfm",
            "--scene",
            "s",
            "--method",
            "m",
        ],
    );
    assert_eq!(tsv, "scene\tmethod\tFR\tRMSE_cm\ns\tm\t1.0000\t0.0000\n");
}

#[test]
fn noiseless_pipeline_is_within_one_disparity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("p.toml"), PLANE_50).unwrap();
    let cfg = ["--config", "p.toml"];
    ok(
        d,
        &[
            &cfg[..],
            &[
                "simulate",
                "--events",
                "ev.txt",
                "--gt",
                "gt.pfm",
                "--jitter-sigma",
                "0",
            ],
        ]
        .concat(),
    );
    for method in ["esl", "mc3d", "sgm"] {
        ok(
            d,
            &[
                &cfg[..],
                &[
                    "estimate", "--events", "ev.txt", "--method", method, "--out", "e.pfm",
                ],
            ]
            .concat(),
        );
        let tsv = ok(
            d,
            &[&cfg[..], &["eval", "--estimate", "e.pfm", "--gt", "gt.pfm"]].concat(),
        );
        let row = tsv.lines().nth(1).unwrap();
        let err: f64 = row.split('\t').nth(3).unwrap().parse().unwrap();
        assert!(row.starts_with("plane50\t"));
        assert!(err <= 0.38, "{method}: {err}");
    }
}

#[test]
fn seed_precedence_and_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("o.toml"),
        "[run]\noutput_dir = \"out\"\n[noise]\nseed = 1\n",
    )
    .unwrap();
    ok(d, &["--config", "o.toml", "simulate", "--events", "a.txt"]);
    let a = std::fs::read(d.join("out/a.txt")).unwrap();

    let with_env = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_esl"))
            .current_dir(d)
            .env("ESL_SEED", "99")
            .args(args)
            .output()
            .unwrap();
        assert!(out.status.success());
    };
    with_env(&["--config", "o.toml", "simulate", "--events", "b.txt"]);
    with_env(&[
        "--config", "o.toml", "simulate", "--events", "c.txt", "--seed", "1",
    ]);
    let b = std::fs::read(d.join("out/b.txt")).unwrap();
    let c = std::fs::read(d.join("out/c.txt")).unwrap();
    assert_ne!(a, b);
    assert_eq!(a, c);
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &["simulate", "--events", "ev.txt", "--jitter-sigma", "5"],
    );
    let mut outputs = Vec::new();
    for threads in ["1", "8", "3"] {
        for method in ["esl", "mc3d", "sgm"] {
            let out = format!("{method}{threads}.pfm");
            ok(
                d,
                &[
                    "--threads",
                    threads,
                    "estimate",
                    "--events",
                    "ev.txt",
                    "--method",
                    method,
                    "--out",
                    &out,
                ],
            );
            outputs.push((method, std::fs::read(d.join(out)).unwrap()));
        }
    }
    for (i, (m, bytes)) in outputs.iter().enumerate().skip(3) {
        assert_eq!(*m, outputs[i % 3].0);
        assert_eq!(bytes, &outputs[i % 3].1, "{m}");
    }
}

#[test]
fn help_lists_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let help = ok(dir.path(), &["--help"]);
    for key in [
        "jitter_sigma",
        "disparity_max",
        "tv_lambda",
        "output_dir",
        "pixels_per_line",
        "latency_est",
    ] {
        assert!(help.contains(key), "{key}");
    }
}
