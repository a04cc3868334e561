use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use esl_core::bench::{
    self, standard_rig, standard_scene, BenchConfig, BenchRow, Method, SceneKind,
};
use esl_core::metrics::spatial_variance;
use esl_core::simulator::{illuminated_ground_truth, matching_time_maps};
use esl_core::{
    estimate_disparity, fill_rate, mc3d_disparity, mc3d_legacy_interpolate, median_filter, rmse,
    sgm_disparity, signed_difference, simulate_scan, tv_denoise, DepthMap, DisparityMap, EslConfig,
    Grid, LegacyInterpolation, Mc3dConfig, NoiseConfig, ScanTiming, ScenePrimitive, SgmConfig,
    SimScene, TimeMap, TwoPlaneCalib,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tmap(grid: Grid<f64>) -> TimeMap<f64> {
    TimeMap::from_grid(grid, 0.0, 1e6)
}

fn c1_timing() -> Outcome {
    let t = ScanTiming::new(60.0f64, 1080, 1920, 0.0).map_err(|e| e.to_string())?;
    let dt_ns = t.dt() * 1e9;
    let line_us = t.dt_line_us();
    let ok = (dt_ns - 8.04).abs() / 8.04 < 0.01 && (line_us - 15.43).abs() / 15.43 < 0.01;
    check(ok, format!("dt = {dt_ns:.3} ns, dt_line = {line_us:.3} us"))
}

fn integer_fixture(
    seed: u64,
    w: usize,
    h: usize,
    dmax: usize,
    holes: f64,
) -> (TimeMap<f64>, TimeMap<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = Grid::from_fn(w, h, |x, y| {
        (!rng.random_bool(holes)).then(|| (7 * x + 3 * y) as f64 + rng.random_range(0..4) as f64)
    });
    let d_true = rng.random_range(1..dmax);
    let c = Grid::from_fn(w, h, |x, y| {
        if x < d_true || rng.random_bool(holes) {
            return None;
        }
        p.get(x - d_true, y)
            .map(|v| v + rng.random_range(-3i32..=3) as f64)
    });
    (tmap(c), tmap(p))
}

fn esl_brute_force(c: &TimeMap<f64>, p: &TimeMap<f64>, cfg: &EslConfig<f64>) -> DisparityMap<f64> {
    let (w, h) = (c.width(), c.height());
    let half = (cfg.window / 2) as isize;
    let need = cfg.min_valid_fraction * (cfg.window * cfg.window) as f64;
    Grid::from_fn(w, h, |x, y| {
        let mut best: Option<(f64, usize)> = None;
        for d in cfg.disparity_min..=cfg.disparity_max {
            let (xi, yi, di) = (x as isize, y as isize, d as isize);
            if xi - half - di < 0
                || yi - half < 0
                || xi + half >= w as isize
                || yi + half >= h as isize
            {
                continue;
            }
            let (mut sum, mut n) = (0.0, 0usize);
            for dx in -half..=half {
                for dy in -half..=half {
                    let (cx, cy) = ((xi + dx) as usize, (yi + dy) as usize);
                    if let (Some(a), Some(b)) = (c.get(cx, cy), p.get(cx - d, cy)) {
                        sum += (a - b) * (a - b);
                        n += 1;
                    }
                }
            }
            if n == 0 || (n as f64) < need {
                continue;
            }
            let cost = sum / n as f64;
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, d));
            }
        }
        best.map(|(_, d)| d as f64)
    })
}

fn sgm_oracle(c: &TimeMap<f64>, p: &TimeMap<f64>, cfg: &SgmConfig<f64>) -> Grid<f64> {
    let (w, h) = (c.width(), c.height());
    let n = cfg.disparity_max - cfg.disparity_min + 1;
    let mut raw = vec![vec![None; n]; w * h];
    let mut finite = Vec::new();
    for y in 0..h {
        for x in 0..w {
            for k in 0..n {
                let d = cfg.disparity_min + k;
                if d > x {
                    continue;
                }
                if let (Some(a), Some(b)) = (c.get(x, y), p.get(x - d, y)) {
                    raw[y * w + x][k] = Some((a - b).abs());
                    finite.push((a - b).abs());
                }
            }
        }
    }
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((finite.len() as f64) * 0.99).ceil() as usize;
    let invalid = 10.0 * finite[rank.max(1) - 1];
    let cost = |i: usize, k: usize| raw[i][k].unwrap_or(invalid);

    let mut total = vec![vec![0.0; n]; w * h];
    for (dx, dy) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
        let mut l = vec![vec![0.0; n]; w * h];
        let xs: Vec<usize> = if dx >= 0 {
            (0..w).collect()
        } else {
            (0..w).rev().collect()
        };
        let ys: Vec<usize> = if dy >= 0 {
            (0..h).collect()
        } else {
            (0..h).rev().collect()
        };
        for &y in &ys {
            for &x in &xs {
                let i = y * w + x;
                let (px, py) = (x as isize - dx, y as isize - dy);
                if px < 0 || py < 0 || px >= w as isize || py >= h as isize {
                    for k in 0..n {
                        l[i][k] = cost(i, k);
                    }
                    continue;
                }
                let prev = l[py as usize * w + px as usize].clone();
                let prev_min = prev.iter().copied().fold(f64::INFINITY, f64::min);
                for k in 0..n {
                    let mut best = f64::INFINITY;
                    for (j, &v) in prev.iter().enumerate() {
                        let pen = match k.abs_diff(j) {
                            0 => 0.0,
                            1 => cfg.p1,
                            _ => cfg.p2,
                        };
                        best = best.min(v + pen);
                    }
                    l[i][k] = cost(i, k) + (best - prev_min);
                }
            }
        }
        for i in 0..w * h {
            for k in 0..n {
                total[i][k] += l[i][k];
            }
        }
    }
    Grid::from_fn(w, h, |x, y| {
        let i = y * w + x;
        if raw[i].iter().all(Option::is_none) {
            return None;
        }
        let best = (1..n).fold(0, |b, k| if total[i][k] < total[i][b] { k } else { b });
        Some((cfg.disparity_min + best) as f64)
    })
}

fn random_maps(seed: u64, w: usize, h: usize, holes: f64) -> (TimeMap<f64>, TimeMap<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = || {
        Grid::from_fn(w, h, |_, _| {
            (!rng.random_bool(holes)).then(|| rng.random_range(0.0..50.0))
        })
    };
    let c = g();
    let p = g();
    (
        TimeMap::from_grid(c, 0.0, 50.0),
        TimeMap::from_grid(p, 0.0, 50.0),
    )
}

fn c2_oracles() -> Outcome {
    let start = Instant::now();
    let mut esl_fixtures = 0;
    for (seed, (w, h)) in [(16, 16), (32, 32), (64, 64), (48, 20), (64, 33)]
        .into_iter()
        .enumerate()
    {
        for window in [1, 3, 5, 7] {
            for (holes, frac) in [(0.0, 0.5), (0.2, 0.5), (0.4, 0.25), (0.1, 1.0)] {
                let dmax = (w / 2).min(24);
                let (c, p) = integer_fixture(seed as u64 * 100 + window as u64, w, h, dmax, holes);
                let cfg = EslConfig {
                    window,
                    disparity_min: 0,
                    disparity_max: dmax,
                    min_valid_fraction: frac,
                    ..EslConfig::default()
                };
                let got = estimate_disparity(&c, &p, &cfg).map_err(|e| e.to_string())?;
                if got != esl_brute_force(&c, &p, &cfg) {
                    return Err(format!("ESL differs on {w}x{h} W={window} holes={holes}"));
                }
                esl_fixtures += 1;
            }
        }
    }
    let mut sgm_fixtures = 0;
    for seed in 0..6u64 {
        let (c, p) = random_maps(seed, 16, 16, if seed % 2 == 0 { 0.0 } else { 0.2 });
        let cfg = SgmConfig {
            p1: 1.5 + seed as f64,
            p2: 9.0 + 2.0 * seed as f64,
            directions: 4,
            disparity_min: seed as usize % 3,
            disparity_max: 9,
        };
        if sgm_disparity(&c, &p, &cfg).map_err(|e| e.to_string())? != sgm_oracle(&c, &p, &cfg) {
            return Err(format!("SGM differs on seed {seed}"));
        }
        sgm_fixtures += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        secs < 10.0,
        format!("{esl_fixtures} ESL and {sgm_fixtures} SGM fixtures exact in {secs:.2} s"),
    )
}

fn c3_noiseless() -> Outcome {
    let (rig, timing) = standard_rig::<f64>();
    let z = 0.5;
    let scene = SimScene {
        primitives: vec![ScenePrimitive::FrontoPlane { depth: z }],
        rig,
        timing,
    };
    let bound = z * z / (scene.rig.baseline * scene.rig.focal()) * 100.0;
    let cfg = BenchConfig::<f64>::default();
    let noise = NoiseConfig {
        jitter_sigma: 0.0,
        ..cfg.noise
    };
    let start = Instant::now();
    let gt = illuminated_ground_truth(&scene);
    let mut parts = Vec::new();
    let mut ok = true;
    for (method, map) in
        bench::estimate_all(&scene, &noise, &cfg.esl, &cfg.sgm).map_err(|e| e.to_string())?
    {
        let err = rmse(&map, &gt).map_err(|e| e.to_string())? * 100.0;
        ok &= err <= bound;
        parts.push(format!("{} {err:.4}", method.name()));
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        ok && secs < 30.0,
        format!(
            "RMSE cm: {} (bound {bound:.4}, {secs:.1} s)",
            parts.join(", ")
        ),
    )
}

struct BenchTable {
    rows: HashMap<(String, Method, u64, bool), (f64, Option<f64>)>,
    secs: f64,
}

impl BenchTable {
    fn run() -> Result<Self, String> {
        let start = Instant::now();
        let rows: Vec<BenchRow<f64>> =
            bench::run_bench(&BenchConfig::default()).map_err(|e| e.to_string())?;
        let rows = rows
            .into_iter()
            .map(|r| {
                (
                    (r.scene, r.method, r.jitter.to_bits(), r.processed),
                    (r.fill_rate, r.rmse_cm),
                )
            })
            .collect();
        Ok(BenchTable {
            rows,
            secs: start.elapsed().as_secs_f64(),
        })
    }

    fn get(
        &self,
        scene: SceneKind,
        method: Method,
        jitter: f64,
        processed: bool,
    ) -> Result<(f64, f64), String> {
        match self.rows.get(&(
            scene.name().to_string(),
            method,
            jitter.to_bits(),
            processed,
        )) {
            Some((fr, Some(e))) => Ok((*fr, *e)),
            _ => Err(format!(
                "no RMSE for {} {} at {jitter}",
                scene.name(),
                method.name()
            )),
        }
    }
}

fn c4_ordering(t: &BenchTable) -> Outcome {
    let mut ok = t.secs < 180.0;
    let mut parts = Vec::new();
    for kind in SceneKind::ALL {
        let (fr_e, e) = t.get(kind, Method::Esl, 2.0, false)?;
        let (_, s) = t.get(kind, Method::Sgm, 2.0, false)?;
        let (fr_m, m) = t.get(kind, Method::Mc3d, 2.0, false)?;
        let ratio = e / m;
        ok &= e < s && s < m && fr_e >= fr_m && ratio <= 0.5;
        parts.push(format!(
            "{} {e:.3}<{s:.3}<{m:.3} FR {fr_e:.3}/{fr_m:.3} ratio {ratio:.3}",
            kind.name()
        ));
    }
    check(ok, parts.join("; "))
}

fn c5_jitter(t: &BenchTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in SceneKind::ALL {
        let levels = [0.0, 2.0, 8.0];
        let esl = levels
            .iter()
            .map(|&j| t.get(kind, Method::Esl, j, false).map(|v| v.1))
            .collect::<Result<Vec<_>, _>>()?;
        let mc3d = levels
            .iter()
            .map(|&j| t.get(kind, Method::Mc3d, j, false).map(|v| v.1))
            .collect::<Result<Vec<_>, _>>()?;
        let lo = esl.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = esl.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let variation = (hi - lo) / lo;
        let increasing = mc3d.windows(2).all(|w| w[0] < w[1]);
        ok &= variation < 0.25 && increasing;
        parts.push(format!(
            "{} ESL var {:.1}% MC3D {:.3}/{:.3}/{:.3}",
            kind.name(),
            variation * 100.0,
            mc3d[0],
            mc3d[1],
            mc3d[2]
        ));
    }
    check(ok, parts.join("; "))
}

fn c6_postproc(t: &BenchTable) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in SceneKind::ALL {
        for jitter in [2.0, 8.0] {
            let gain = |m| -> Result<f64, String> {
                let raw = t.get(kind, m, jitter, false)?.1;
                let proc = t.get(kind, m, jitter, true)?.1;
                Ok((raw - proc) / raw)
            };
            let (ge, gm) = (gain(Method::Esl)?, gain(Method::Mc3d)?);
            ok &= ge < gm;
            parts.push(format!(
                "{}@{jitter} {:.1}%<{:.1}%",
                kind.name(),
                ge * 100.0,
                gm * 100.0
            ));
        }
    }
    check(ok, parts.join("; "))
}

fn c7_window() -> Outcome {
    let start = Instant::now();
    let cfg = BenchConfig::<f64>::default();
    let windows = [3, 7, 15];
    let disparities =
        |kind: SceneKind, jitter: f64| -> Result<(SimScene<f64>, Vec<DisparityMap<f64>>), String> {
            let scene = standard_scene::<f64>(kind);
            let noise = NoiseConfig {
                jitter_sigma: jitter,
                ..cfg.noise
            };
            let stream = simulate_scan(&scene, &noise, 0).map_err(|e| e.to_string())?;
            let (c, p) =
                matching_time_maps(&scene, &stream, noise.latency).map_err(|e| e.to_string())?;
            let maps = windows
                .iter()
                .map(|&window| {
                    estimate_disparity(&c, &p, &EslConfig { window, ..cfg.esl })
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?;
            Ok((scene, maps))
        };

    let (_, plane) = disparities(SceneKind::Plane, 8.0)?;
    let variance = plane
        .iter()
        .map(|m| spatial_variance(m).ok_or("empty disparity map"))
        .collect::<Result<Vec<_>, _>>()?;

    let (step, maps) = disparities(SceneKind::OccludingStep, 2.0)?;
    let gt = illuminated_ground_truth(&step);
    let edge = maps
        .iter()
        .map(|m| {
            let (mut sum, mut n) = (0.0, 0usize);
            for y in 0..m.height() {
                for x in 216..236 {
                    if let (Some(d), Some(z)) = (m.get(x, y), gt.get(x, y)) {
                        sum += (d - step.rig.disparity_from_depth(z).unwrap()).abs();
                        n += 1;
                    }
                }
            }
            sum / n.max(1) as f64
        })
        .collect::<Vec<_>>();
    let secs = start.elapsed().as_secs_f64();
    let ok = variance.windows(2).all(|w| w[1] <= w[0])
        && edge.windows(2).all(|w| w[1] >= w[0])
        && secs < 60.0;
    check(
        ok,
        format!(
            "plane variance {:.4}/{:.4}/{:.4}, step edge error {:.3}/{:.3}/{:.3} px ({secs:.1} s)",
            variance[0], variance[1], variance[2], edge[0], edge[1], edge[2]
        ),
    )
}

fn c8_invariants() -> Outcome {
    let start = Instant::now();
    let cfg = BenchConfig::<f64>::default();

    // Latency immunity for all three estimators.
    for kind in [SceneKind::Sphere, SceneKind::SlantedPlane] {
        let scene = standard_scene::<f64>(kind);
        let run = |latency: f64| -> Result<_, String> {
            let noise = NoiseConfig {
                jitter_sigma: 2.0,
                latency,
                seed: 5,
                ..NoiseConfig::default()
            };
            let stream = simulate_scan(&scene, &noise, 0).map_err(|e| e.to_string())?;
            let (c, p) = matching_time_maps(&scene, &stream, latency).map_err(|e| e.to_string())?;
            let mc3d = mc3d_disparity(
                &c,
                &scene.timing,
                &scene.rig,
                &Mc3dConfig {
                    latency_est: latency,
                },
            );
            Ok((
                estimate_disparity(&c, &p, &cfg.esl).map_err(|e| e.to_string())?,
                mc3d.map_err(|e| e.to_string())?,
                sgm_disparity(&c, &p, &cfg.sgm).map_err(|e| e.to_string())?,
            ))
        };
        if run(0.0)? != run(120.0)? {
            return Err(format!("latency changed an estimate on {}", kind.name()));
        }
    }

    // Shift covariance.
    let (w, h, d0) = (80, 20, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let p = tmap(Grid::from_fn(w, h, |_, _| {
        Some(rng.random_range(0..1000) as f64)
    }));
    let c = p.shift_columns(d0 as isize);
    let shift_cfg = EslConfig {
        window: 5,
        disparity_min: 5,
        disparity_max: 40,
        min_valid_fraction: 1.0,
        ..EslConfig::default()
    };
    let base = estimate_disparity(&c, &p, &shift_cfg).map_err(|e| e.to_string())?;
    for k in [-3isize, -1, 1, 4] {
        let shifted =
            estimate_disparity(&c, &p.shift_columns(k), &shift_cfg).map_err(|e| e.to_string())?;
        let first = 2 + d0 + k.unsigned_abs() + k.max(0) as usize;
        for y in 0..h {
            for x in first..w {
                if let (Some(a), Some(b)) = (base.get(x, y), shifted.get(x, y)) {
                    if b != a - k as f64 {
                        return Err(format!("shift {k} broke covariance at ({x}, {y})"));
                    }
                }
            }
        }
    }

    // Argmin invariance under offset and scale.
    let (c, p) = integer_fixture(12, 64, 40, 20, 0.15);
    let esl = EslConfig {
        window: 7,
        disparity_max: 20,
        ..EslConfig::default()
    };
    let base = estimate_disparity(&c, &p, &esl).map_err(|e| e.to_string())?;
    let moved = estimate_disparity(&c.offset(1234.0), &p.offset(1234.0), &esl)
        .map_err(|e| e.to_string())?;
    let scaled =
        estimate_disparity(&c.scaled(3.0), &p.scaled(3.0), &esl).map_err(|e| e.to_string())?;
    if moved != base || scaled != base {
        return Err("offset or scale changed the argmin".into());
    }

    // Metrics, fill rate, TV and median on random maps.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let (mw, mh) = (rng.random_range(2..16), rng.random_range(2..16));
        let mut random_map = || -> DepthMap<f64> {
            Grid::from_fn(mw, mh, |_, _| {
                rng.random_bool(0.8).then(|| rng.random_range(0.2..2.0))
            })
        };
        let (a, b) = (random_map(), random_map());
        if let Ok(r) = rmse(&a, &b) {
            let d = signed_difference(&a, &b).map_err(|e| e.to_string())?;
            let ms = d.valid_values().map(|v| v * v).sum::<f64>() / d.valid_count() as f64;
            if (r * r - ms).abs() > 1e-12 * ms.max(1e-300) {
                return Err("rmse^2 differs from mean signed difference^2".into());
            }
        }
        if b.valid_count() > 0 {
            let mut prev = 0.0;
            for t in [0.001, 0.01, 0.05, 0.2, 0.5] {
                let fr = fill_rate(&a, &b, t).map_err(|e| e.to_string())?;
                if fr < prev {
                    return Err("fill rate decreased with a larger threshold".into());
                }
                prev = fr;
            }
        }
        let lambda = rng.random_range(0.001..0.5);
        let iterations = rng.random_range(1..60);
        let tv = tv_denoise(&a, lambda, iterations).map_err(|e| e.to_string())?;
        if tv.total_variation() > a.total_variation() * (1.0 + 1e-12) + 1e-12 {
            return Err("TV increased total variation".into());
        }
        let constant = Grid::filled(mw, mh, rng.random_range(0.1..5.0));
        for k in [3, 5, 7] {
            if median_filter(&constant, k).map_err(|e| e.to_string())? != constant {
                return Err("median moved a constant map".into());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, format!("all invariants hold ({secs:.1} s)"))
}

fn esl(dir: &Path, threads: usize, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_esl"))
        .current_dir(dir)
        .args(["--threads", &threads.to_string()])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "esl {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn pipeline(dir: &Path, threads: usize) -> Result<Vec<(String, Vec<u8>)>, String> {
    std::fs::write(
        dir.join("cfg.toml"),
        "[scene]\nname = \"sphere\"\n[[scene.primitives]]\nkind = \"sphere\"\ncenter = [0.11, 0.0, 0.7]\nradius = 0.2\n[noise]\njitter_sigma = 4.0\nburst_group = 2\ndropout_prob = 0.05\nseed = 11\n[run]\njitter_levels = [0.0, 2.0]\n",
    )
    .map_err(|e| e.to_string())?;
    let c = ["--config", "cfg.toml"];
    let run = |args: &[&str]| esl(dir, threads, &[&c[..], args].concat());
    run(&[
        "simulate", "--events", "ev.txt", "--gt", "gt.pfm", "--tau-c", "tc.pfm", "--tau-p",
        "tp.pfm",
    ])?;
    for m in ["esl", "mc3d", "sgm"] {
        let out = format!("{m}.pfm");
        run(&[
            "estimate", "--events", "ev.txt", "--method", m, "--out", &out,
        ])?;
        run(&["postproc", "--input", &out, "--out", &format!("{m}_pp.pfm")])?;
        run(&[
            "eval",
            "--estimate",
            &out,
            "--gt",
            "gt.pfm",
            "--out",
            &format!("{m}.tsv"),
        ])?;
    }
    run(&[
        "estimate",
        "--tau-c",
        "tc.pfm",
        "--tau-p",
        "tp.pfm",
        "--method",
        "esl",
        "--out",
        "esl_maps.pfm",
    ])?;
    run(&["render", "--input", "esl.pfm", "--out", "esl.ppm"])?;
    run(&["reference", "--out", "ref.pfm", "--passes", "3"])?;
    run(&["bench", "--config-scene", "--out", "bench.tsv"])?;
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    Ok(files)
}

fn c9_determinism() -> Outcome {
    let runs = [1usize, 8, 8]
        .iter()
        .map(|&threads| {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            pipeline(dir.path(), threads)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    check(
        same,
        format!(
            "{} output files compared across --threads 1, --threads 8 and a repeat",
            runs[0].len()
        ),
    )
}

fn c10_legacy() -> Outcome {
    let calib = TwoPlaneCalib::new(Grid::filled(3, 2, 50.0), Grid::filled(3, 2, 25.0), 0.3, 0.9)
        .map_err(|e| e.to_string())?;
    let at = |d: f64| {
        mc3d_legacy_interpolate(
            &Grid::filled(3, 2, d),
            &calib,
            LegacyInterpolation::AsPublished,
        )
        .ok()
        .and_then(|g| g.get(2, 1))
    };
    let got = [at(50.0), at(25.0), at(37.5)];
    let want = [Some(0.3), Some(0.3 + 0.9), Some(0.3 + 0.9 / 2.0)];
    check(got == want, format!("anchors {got:?}"))
}

fn main() {
    let table = BenchTable::run();
    let bench = |f: fn(&BenchTable) -> Outcome| -> Outcome {
        match &table {
            Ok(t) => f(t),
            Err(e) => Err(e.clone()),
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 timing fidelity", Box::new(c1_timing)),
        ("2 oracle equivalence", Box::new(c2_oracles)),
        ("3 noiseless correctness", Box::new(c3_noiseless)),
        ("4 comparative ordering", Box::new(|| bench(c4_ordering))),
        ("5 jitter robustness", Box::new(|| bench(c5_jitter))),
        (
            "6 post-processing marginality",
            Box::new(|| bench(c6_postproc)),
        ),
        ("7 window sensitivity", Box::new(c7_window)),
        ("8 invariant suites", Box::new(c8_invariants)),
        ("9 determinism", Box::new(c9_determinism)),
        ("10 legacy anchors", Box::new(c10_legacy)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
