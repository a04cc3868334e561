mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{MethodChoice, RunConfig};
use crate::error::CliError;

const CONFIG_HELP: &str = "\
CONFIGURATION FILE (--config, TOML; every section and key is optional):
  [rig]        camera, projector     tables with fx, fy, cx, cy (px), width, height
               baseline              camera-projector baseline, m
  [timing]     frequency             scan passes per second, Hz
               lines                 raster lines per pass (projector image width)
               pixels_per_line       pixels per line (projector image height)
               t0                    start of the pass, µs
  [scene]      name                  label written to evaluation tables
               primitives            array of tables tagged by kind:
                                       fronto_plane  depth
                                       slanted_plane normal = [x, y, z], center_depth
                                       sphere        center = [x, y, z], radius
                                       step_edge     near, far, split_column, near_side = left|right
  [noise]      jitter_sigma          Gaussian timestamp noise, µs
               latency               constant sensor delay, µs
               burst_group           rows sharing one timestamp (1 disables)
               dropout_prob          probability of losing an event
               seed                  RNG seed (ESL_SEED overrides it)
  [esl]        window                odd matching window side
               disparity_min, disparity_max   searched disparity range, px
               min_valid_fraction    fraction of the window that must be valid
               subpixel              parabolic refinement of the minimum
               tv_lambda             TV weight (m) applied to the ESL depth; omit to disable
               tv_iterations         TV iterations when tv_lambda is set
               seed_radius           search only the point-wise estimate +- radius; omit for full search
  [sgm]        p1, p2                smoothness penalties, µs
               directions            aggregation paths: 1, 2, 4 or 8
               disparity_min, disparity_max   searched disparity range, px
  [mc3d]       latency_est           latency removed before decoding, µs (defaults to noise.latency)
  [postproc]   median, inpaint, tv   enable each step
               median_kernel         odd median kernel side
               max_hole_radius       largest hole radius filled, px
               tv_lambda, tv_iterations   TV weight (m) and iteration count
  [run]        method                esl | mc3d | sgm
               output_dir            directory that relative output paths are resolved against
               jitter_levels         jitter sweep used by `bench`, µs
               fill_threshold        fill-rate tolerance as a fraction of mean depth

Command line flags override file values. `esl config` prints the effective configuration.";

#[derive(Debug, Parser)]
#[command(
    name = "esl",
    version,
    about = "Structured-light depth from an event camera and a scanning laser projector"
)]
#[command(after_long_help = CONFIG_HELP)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; the output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scan pass and write the event stream and ground truth.
    Simulate {
        /// Event stream output.
        #[arg(long)]
        events: PathBuf,
        /// Ground-truth depth (PFM), restricted to illuminated pixels.
        #[arg(long)]
        gt: Option<PathBuf>,
        /// Camera time map (PFM).
        #[arg(long)]
        tau_c: Option<PathBuf>,
        /// Projector time map on the camera grid (PFM).
        #[arg(long)]
        tau_p: Option<PathBuf>,
        /// Pass index; each pass draws independent noise.
        #[arg(long, default_value_t = 0)]
        pass: u64,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Estimate depth from an event stream or from time maps.
    Estimate {
        #[arg(long, conflicts_with = "tau_c", required_unless_present = "tau_c")]
        events: Option<PathBuf>,
        /// Camera time map (PFM) instead of an event stream.
        #[arg(long)]
        tau_c: Option<PathBuf>,
        /// Projector time map (PFM); computed from the timing when omitted.
        #[arg(long)]
        tau_p: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
        /// Depth map output (PFM).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        esl: EslArgs,
        #[command(flatten)]
        sgm: SgmArgs,
        #[command(flatten)]
        mc3d: Mc3dArgs,
    },
    /// Median filter, hole filling and TV smoothing of a depth map.
    Postproc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        post: PostprocArgs,
    },
    /// Compare a depth map against ground truth; writes a TSV row.
    Eval {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Scene label; defaults to scene.name.
        #[arg(long)]
        scene: Option<String>,
        /// Method label; defaults to run.method.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        fill_threshold: Option<f64>,
        /// TSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pseudocolor a PFM map into a PPM image.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Value mapped to the blue end; auto range when both bounds are omitted.
        #[arg(long, requires = "max")]
        min: Option<f64>,
        #[arg(long, requires = "min")]
        max: Option<f64>,
    },
    /// Compare all estimators over a jitter sweep on the standard scenes.
    Bench {
        /// TSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Jitter levels, µs (comma separated).
        #[arg(long, value_delimiter = ',')]
        jitter: Option<Vec<f64>>,
        /// Also run the occluding step and the sphere in front of a backdrop.
        #[arg(long)]
        extra_scenes: bool,
        /// Run the configured scene instead of the standard set.
        #[arg(long, conflicts_with = "extra_scenes")]
        config_scene: bool,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        esl: EslArgs,
        #[command(flatten)]
        sgm: SgmArgs,
        #[command(flatten)]
        post: PostprocArgs,
    },
    /// Average the point-wise estimate over many passes.
    Reference {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        passes: usize,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Print the effective configuration as TOML.
    Config {
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        esl: EslArgs,
        #[command(flatten)]
        sgm: SgmArgs,
        #[command(flatten)]
        mc3d: Mc3dArgs,
        #[command(flatten)]
        post: PostprocArgs,
    },
}

#[derive(Debug, Args, Default)]
struct NoiseArgs {
    /// Timestamp jitter, µs.
    #[arg(long)]
    jitter_sigma: Option<f64>,
    /// Sensor latency, µs.
    #[arg(long)]
    latency: Option<f64>,
    #[arg(long)]
    burst_group: Option<usize>,
    #[arg(long)]
    dropout_prob: Option<f64>,
    /// RNG seed; wins over ESL_SEED and the file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args, Default)]
struct EslArgs {
    #[arg(long)]
    window: Option<usize>,
    /// Lower end of the disparity search (ESL and SGM).
    #[arg(long)]
    disparity_min: Option<usize>,
    /// Upper end of the disparity search (ESL and SGM).
    #[arg(long)]
    disparity_max: Option<usize>,
    #[arg(long)]
    min_valid_fraction: Option<f64>,
    #[arg(long)]
    subpixel: Option<bool>,
    /// TV weight for the ESL depth, m.
    #[arg(long)]
    esl_tv_lambda: Option<f64>,
    /// Narrow the ESL search around the point-wise estimate.
    #[arg(long)]
    seed_radius: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct SgmArgs {
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    directions: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct Mc3dArgs {
    /// Latency removed before decoding, µs.
    #[arg(long)]
    latency_est: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct PostprocArgs {
    #[arg(long)]
    median: Option<bool>,
    #[arg(long)]
    inpaint: Option<bool>,
    #[arg(long)]
    tv: Option<bool>,
    #[arg(long)]
    median_kernel: Option<usize>,
    #[arg(long)]
    max_hole_radius: Option<usize>,
    #[arg(long)]
    tv_lambda: Option<f64>,
    #[arg(long)]
    tv_iterations: Option<usize>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl NoiseArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.noise.jitter_sigma, self.jitter_sigma);
        set(&mut cfg.noise.latency, self.latency);
        set(&mut cfg.noise.burst_group, self.burst_group);
        set(&mut cfg.noise.dropout_prob, self.dropout_prob);
        set(&mut cfg.noise.seed, self.seed);
    }
}

impl EslArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.esl.window, self.window);
        set(&mut cfg.esl.disparity_min, self.disparity_min);
        set(&mut cfg.esl.disparity_max, self.disparity_max);
        set(&mut cfg.sgm.disparity_min, self.disparity_min);
        set(&mut cfg.sgm.disparity_max, self.disparity_max);
        set(&mut cfg.esl.min_valid_fraction, self.min_valid_fraction);
        set(&mut cfg.esl.subpixel, self.subpixel);
        if self.esl_tv_lambda.is_some() {
            cfg.esl.tv_lambda = self.esl_tv_lambda;
        }
        if self.seed_radius.is_some() {
            cfg.esl.seed_radius = self.seed_radius;
        }
    }
}

impl SgmArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.sgm.p1, self.p1);
        set(&mut cfg.sgm.p2, self.p2);
        set(&mut cfg.sgm.directions, self.directions);
    }
}

impl Mc3dArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.latency_est.is_some() {
            cfg.mc3d.latency_est = self.latency_est;
        }
    }
}

impl PostprocArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.postproc;
        set(&mut p.median, self.median);
        set(&mut p.inpaint, self.inpaint);
        set(&mut p.tv, self.tv);
        set(&mut p.median_kernel, self.median_kernel);
        set(&mut p.max_hole_radius, self.max_hole_radius);
        set(&mut p.tv_lambda, self.tv_lambda);
        set(&mut p.tv_iterations, self.tv_iterations);
    }
}

/// File values, then ESL_SEED, then flags.
fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Ok(seed) = std::env::var("ESL_SEED") {
        cfg.noise.seed = seed
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("ESL_SEED={seed:?} is not a seed: {e}")))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = load_config(cli.config.as_ref())?;
    match &cli.command {
        Command::Simulate { noise, .. } | Command::Reference { noise, .. } => noise.apply(&mut cfg),
        Command::Estimate { esl, sgm, mc3d, .. } => {
            esl.apply(&mut cfg);
            sgm.apply(&mut cfg);
            mc3d.apply(&mut cfg);
        }
        Command::Postproc { post, .. } => post.apply(&mut cfg),
        Command::Bench {
            noise,
            esl,
            sgm,
            post,
            jitter,
            ..
        } => {
            noise.apply(&mut cfg);
            esl.apply(&mut cfg);
            sgm.apply(&mut cfg);
            post.apply(&mut cfg);
            set(&mut cfg.run.jitter_levels, jitter.clone());
        }
        Command::Config {
            noise,
            esl,
            sgm,
            mc3d,
            post,
        } => {
            noise.apply(&mut cfg);
            esl.apply(&mut cfg);
            sgm.apply(&mut cfg);
            mc3d.apply(&mut cfg);
            post.apply(&mut cfg);
        }
        Command::Eval { fill_threshold, .. } => set(&mut cfg.run.fill_threshold, *fill_threshold),
        Command::Render { .. } => {}
    }
    cfg.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, &cfg))
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            events,
            gt,
            tau_c,
            tau_p,
            pass,
            ..
        } => commands::simulate(
            cfg,
            events,
            gt.as_deref(),
            tau_c.as_deref(),
            tau_p.as_deref(),
            *pass,
        ),
        Command::Estimate {
            events,
            tau_c,
            tau_p,
            method,
            out,
            ..
        } => {
            let input = match (events, tau_c) {
                (Some(e), _) => commands::EstimateInput::Events(e),
                (None, Some(c)) => commands::EstimateInput::TimeMap(c),
                (None, None) => {
                    return Err(CliError::Config(
                        "estimate needs --events or --tau-c".into(),
                    ))
                }
            };
            commands::estimate(
                cfg,
                input,
                tau_p.as_deref(),
                method.unwrap_or(cfg.run.method),
                out,
            )
        }
        Command::Postproc { input, out, .. } => commands::postproc(cfg, input, out),
        Command::Eval {
            estimate,
            gt,
            scene,
            method,
            out,
            ..
        } => {
            let scene = scene.as_deref().unwrap_or(&cfg.scene.name);
            let method = method.as_deref().unwrap_or(cfg.run.method.name());
            commands::eval(cfg, estimate, gt, scene, method, out.as_deref())
        }
        Command::Render {
            input,
            out,
            min,
            max,
        } => commands::render(cfg, input, out, min.zip(*max)),
        Command::Bench {
            out,
            extra_scenes,
            config_scene,
            ..
        } => commands::bench(cfg, out.as_deref(), *extra_scenes, *config_scene),
        Command::Reference { out, passes, .. } => commands::reference(cfg, out, *passes),
        Command::Config { .. } => {
            print!("{}", cfg.to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("esl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
