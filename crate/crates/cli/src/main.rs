use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vss_core::bench::{self, BenchConfig, Preset};
use vss_core::config::{parse_config, SyntheticScene};
use vss_core::pipeline::{render_frame, synthetic_mesh};
use vss_core::scene::{self, Mesh};

#[derive(Parser)]
#[command(name = "vss", version, about = "Void space surface renderer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render one frame from a JSON config.
    Render {
        config: PathBuf,
        /// Output PNG, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write height field, regions, contours, AO and iso layers.
        #[arg(long)]
        dump_layers: bool,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Print run statistics as JSON on stdout.
        #[arg(long)]
        stats: bool,
    },
    /// Time the VSS stages over camera presets and contour strides.
    Bench {
        /// OBJ mesh (a `.scalars` sidecar next to it is picked up) or
        /// `builtin:vessel-tree` / `builtin:two-tubes`.
        scene: String,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
        steps: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "far,medium,close")]
        presets: Vec<PresetArg>,
        #[arg(long, default_value_t = 1280)]
        width: usize,
        #[arg(long, default_value_t = 720)]
        height: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-step height-field deviation (far preset) here.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
    /// Serve frames of a scene over HTTP.
    Serve {
        scene: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 2)]
        max_concurrent: usize,
        /// Static files (the browser viewer) served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// Write a built-in scene as OBJ plus scalar sidecar.
    GenScene {
        #[arg(value_enum)]
        kind: SceneArg,
        #[arg(long)]
        out: PathBuf,
        /// Sidecar path; defaults to the OBJ path with a `.scalars` extension.
        #[arg(long)]
        scalars: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Far,
    Medium,
    Close,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Far => Preset::Far,
            PresetArg::Medium => Preset::Medium,
            PresetArg::Close => Preset::Close,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SceneArg {
    VesselTree,
    TwoTubes,
}

impl From<SceneArg> for SyntheticScene {
    fn from(s: SceneArg) -> Self {
        match s {
            SceneArg::VesselTree => SyntheticScene::VesselTree,
            SceneArg::TwoTubes => SyntheticScene::TwoTubes,
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("VSS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .with_context(|| format!("VSS_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn load_scene(spec: &str) -> Result<Mesh> {
    match spec {
        "builtin:vessel-tree" => return Ok(synthetic_mesh(SyntheticScene::VesselTree)),
        "builtin:two-tubes" => return Ok(synthetic_mesh(SyntheticScene::TwoTubes)),
        _ => {}
    }
    let path = Path::new(spec);
    let sidecar = path.with_extension("scalars");
    let sidecar = sidecar.exists().then_some(sidecar);
    scene::load_mesh(path, sidecar.as_deref())
        .with_context(|| format!("loading scene {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn render(
    config: &Path,
    out: Option<PathBuf>,
    dump_layers: bool,
    width: Option<usize>,
    height: Option<usize>,
    stats: bool,
) -> Result<()> {
    let mut cfg = parse_config(config)?;
    if let Some(out) = out {
        cfg.output = out;
    }
    if let Some(w) = width {
        cfg.camera.width = w;
    }
    if let Some(h) = height {
        cfg.camera.height = h;
    }
    cfg.dump_layers |= dump_layers;
    let frame =
        render_frame(&cfg).map_err(|e| anyhow::anyhow!("stage `{}`: {}", e.stage, e.source))?;
    if let Some(dir) = cfg.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    frame.image.write_png(&cfg.output)?;
    log::info!("wrote {}", cfg.output.display());
    if cfg.dump_layers {
        let stem = cfg
            .output
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("frame")
            .to_string();
        for path in frame.dump_layers(&cfg.layer_dir(), &stem)? {
            log::info!("wrote {}", path.display());
        }
    }
    if stats {
        println!("{}", serde_json::to_string_pretty(&frame.stats)?);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Render {
            config,
            out,
            dump_layers,
            width,
            height,
            stats,
        } => render(&config, out, dump_layers, width, height, stats),
        Command::Bench {
            scene,
            repeats,
            steps,
            presets,
            width,
            height,
            p,
            out,
            artifacts,
        } => {
            let mesh = load_scene(&scene)?;
            let cfg = BenchConfig {
                width,
                height,
                steps: steps.clone(),
                repeats,
                presets: presets.into_iter().map(Preset::from).collect(),
                base: bench::BaseParams {
                    p,
                    ..bench::BaseParams::default()
                },
            };
            let start = std::time::Instant::now();
            let report = bench::run_benchmark(&mesh, &cfg)?;
            write_json(&out, &report)?;
            if let Some(path) = artifacts {
                let cam = bench::preset_camera(&mesh, Preset::Far, width, height)?;
                let input = bench::depth_buffer_input(&mesh, &cam)?;
                let (depth, map) = bench::prepare_void_map(&input, &cam)?;
                let dev = bench::compare_step_artifacts(&depth, &map, p, &steps)?;
                write_json(&path, &dev)?;
            }
            log::info!(
                "benchmark finished in {:.1} s",
                start.elapsed().as_secs_f64()
            );
            Ok(())
        }
        Command::Serve {
            scene,
            port,
            host,
            max_concurrent,
            static_dir,
        } => {
            let mesh = load_scene(&scene)?;
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .with_context(|| format!("bad listen address {host}:{port}"))?;
            let opts = vss_service::ServiceOptions {
                max_concurrent,
                static_dir,
            };
            let state = Arc::new(vss_service::AppState::new(mesh, &opts)?);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = vss_service::bind(addr).await?;
                vss_service::run(listener, state).await
            })?;
            Ok(())
        }
        Command::GenScene { kind, out, scalars } => {
            let mesh = synthetic_mesh(kind.into());
            let scalars = scalars.unwrap_or_else(|| out.with_extension("scalars"));
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            scene::write_mesh(&mesh, &out, Some(&scalars))?;
            if mesh.vertices.is_empty() {
                bail!("generated an empty mesh");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = init_threads().and_then(|_| run(cli)) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
