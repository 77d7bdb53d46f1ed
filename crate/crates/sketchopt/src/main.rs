use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sketchopt::docs::{to_bytes, ModelDoc, OptDoc};
use sketchopt::error::{Error, PipelineError, Result, Stage, StageExt};
use sketchopt::pipeline::{self, ParametrizeOptions, VarOverride, VectorizeOptions};
use sketchopt::{io, serve, synth};
use sketchopt_core::parametrizer::GroupCriterion;

#[derive(Parser)]
#[command(name = "sketchopt", version, about = "Annotated floorplan sketch to Pareto front of layout variants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct VectorizeArgs {
    /// Detection threshold as a fraction of the luminosity range.
    #[arg(long)]
    threshold: Option<f64>,
    /// Snap segments within this many degrees of horizontal/vertical.
    #[arg(long)]
    snap: Option<f64>,
}

#[derive(Args)]
struct ParametrizeArgs {
    /// Declare or override a variable: axis=<id>,lo=<v>,hi=<v>. Repeatable.
    #[arg(long = "var", value_name = "SPEC")]
    vars: Vec<String>,
    /// Endpoint snapping distance in pixels.
    #[arg(long)]
    snap_tol: Option<f64>,
    /// Largest distance from a mark to the wall axis it binds to, pixels.
    #[arg(long)]
    search_radius: Option<f64>,
    /// by_axis, by_connectivity or by_adjacent_nodes:<radius>.
    #[arg(long)]
    grouping: Option<String>,
}

#[derive(Args)]
struct OptArgs {
    /// Optimization settings (opt.json).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the settings file.
    #[arg(long)]
    seed: Option<u64>,
    /// No per-generation progress on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Trace a raster sketch (PNG, PGM, PFM) into scene.json.
    Vectorize {
        input: PathBuf,
        #[command(flatten)]
        opts: VectorizeArgs,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the parametric model (model.json) from scene.json.
    Parametrize {
        scene: PathBuf,
        #[command(flatten)]
        opts: ParametrizeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run NSGA-II over the model's variables and write session.json.
    Optimize {
        model: PathBuf,
        #[command(flatten)]
        opts: OptArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render one assignment of the model as SVG.
    Render {
        model: PathBuf,
        /// Comma-separated values in ascending variable id (default: all zero).
        #[arg(long, allow_hyphen_values = true)]
        vars: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vectorize, parametrize, optimize and render the front into a directory.
    Run {
        input: PathBuf,
        #[command(flatten)]
        vectorize: VectorizeArgs,
        #[command(flatten)]
        parametrize: ParametrizeArgs,
        #[command(flatten)]
        opts: OptArgs,
        /// Output directory.
        #[arg(long, default_value = "sketchopt-out")]
        out: PathBuf,
    },
    /// Serve a session read-only over HTTP for the explorer.
    Serve {
        session: PathBuf,
        model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of explorer assets served under `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Write a synthetic sketch as a 16-bit PNG.
    Synth {
        /// The bundled three-variable case study instead of a random plan.
        #[arg(long)]
        case_study: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1024)]
        size: usize,
        #[arg(long, default_value_t = 12)]
        walls: usize,
        #[arg(long, default_value_t = 0)]
        marks: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

impl VectorizeArgs {
    fn options(&self) -> VectorizeOptions {
        let mut o = VectorizeOptions { snap_tol_deg: self.snap, ..Default::default() };
        if let Some(t) = self.threshold {
            o.detector.threshold_fraction = t;
        }
        o
    }
}

impl ParametrizeArgs {
    fn options(&self) -> Result<ParametrizeOptions> {
        let mut o = ParametrizeOptions::default();
        if let Some(t) = self.snap_tol {
            o.snap_tol = t;
        }
        if let Some(r) = self.search_radius {
            o.annotation.search_radius = r;
        }
        if let Some(g) = &self.grouping {
            o.grouping = g.parse::<GroupCriterion>().map_err(|e| Error::Config(e.to_string()))?;
        }
        o.overrides = self.vars.iter().map(|s| s.parse::<VarOverride>()).collect::<Result<_>>()?;
        Ok(o)
    }
}

impl OptArgs {
    fn options(&self) -> Result<OptDoc> {
        let mut doc = match &self.config {
            Some(p) => OptDoc::parse(&read(p)?)?,
            None => OptDoc::default(),
        };
        if let Some(s) = self.seed {
            doc.seed = s;
        }
        Ok(doc)
    }

    fn progress(&self) -> impl FnMut(&sketchopt_core::nsga2::GenerationSnapshot, &[String]) + '_ {
        move |snap, labels| {
            if !self.quiet {
                eprintln!("{}", pipeline::progress_line(snap, labels));
            }
        }
    }
}

fn parse_genome(vars: Option<&str>, n: usize) -> Result<Vec<f64>> {
    match vars.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(vec![0.0; n]),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("'{t}' is not a number"))))
            .collect(),
    }
}

fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Vectorize { input, opts, out } => {
            let image = read(&input).stage(Stage::Vectorize)?;
            let doc = pipeline::vectorize_bytes(&image, &opts.options()).stage(Stage::Vectorize)?;
            emit(out.as_deref(), &to_bytes(&doc)).stage(Stage::Vectorize)
        }
        Command::Parametrize { scene, opts, out } => {
            let bytes = read(&scene).stage(Stage::Parametrize)?;
            let options = opts.options().stage(Stage::Parametrize)?;
            let doc = pipeline::parametrize_bytes(&bytes, &options).stage(Stage::Parametrize)?;
            for w in &doc.warnings {
                eprintln!("warning: {w}");
            }
            emit(out.as_deref(), &to_bytes(&doc)).stage(Stage::Parametrize)
        }
        Command::Optimize { model, opts, out } => {
            let bytes = read(&model).stage(Stage::Optimize)?;
            let opt = opts.options().stage(Stage::Optimize)?;
            let doc = pipeline::optimize_bytes(&bytes, &opt, opts.progress()).stage(Stage::Optimize)?;
            emit(out.as_deref(), &to_bytes(&doc)).stage(Stage::Optimize)
        }
        Command::Render { model, vars, out } => {
            let doc = ModelDoc::parse(&read(&model).stage(Stage::Render)?).stage(Stage::Render)?;
            let genome = parse_genome(vars.as_deref(), doc.variables.len()).stage(Stage::Render)?;
            let svg = pipeline::render_model(&doc, &genome).stage(Stage::Render)?;
            emit(out.as_deref(), svg.as_bytes()).stage(Stage::Render)
        }
        Command::Run { input, vectorize, parametrize, opts, out } => {
            let image = read(&input).stage(Stage::Vectorize)?;
            let popts = parametrize.options().stage(Stage::Parametrize)?;
            let opt = opts.options().stage(Stage::Optimize)?;
            let result = pipeline::run_bytes(&image, &vectorize.options(), &popts, &opt, opts.progress())?;
            let files = [("scene.json", &result.scene), ("model.json", &result.model), ("session.json", &result.session)];
            for (name, bytes) in files {
                write(&out.join(name), bytes).stage(Stage::Render)?;
            }
            for (name, svg) in &result.gallery {
                write(&out.join(name), svg.as_bytes()).stage(Stage::Render)?;
            }
            eprintln!("wrote {}", out.display());
            Ok(())
        }
        Command::Serve { session, model, port, assets } => {
            let state = serve::ServeState::new(
                read(&session).stage(Stage::Serve)?,
                &read(&model).stage(Stage::Serve)?,
                assets,
            )
            .stage(Stage::Serve)?;
            let server = serve::bind(&format!("127.0.0.1:{port}")).stage(Stage::Serve)?;
            eprintln!("serving on http://127.0.0.1:{port}/");
            serve::run(&server, &state, 4);
            Ok(())
        }
        Command::Synth { case_study, seed, size, walls, marks, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let plan = if case_study {
                synth::case_study()
            } else {
                let mut plan = synth::random_plan(&mut rng, size, walls, 20.0);
                synth::add_marks(&mut rng, &mut plan, marks);
                plan
            };
            let img = synth::render(&plan, synth::Ink::default(), &mut rng);
            let png = io::encode_png16(&img).stage(Stage::Render)?;
            write(&out, &png).stage(Stage::Render)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
