mod commands;
mod error;
mod io;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};
use crate::params::Params;

/// Inpainting of heavily corrupted grayscale images.
#[derive(Debug, Parser)]
#[command(name = "ahe", version)]
struct Cli {
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Overlay random line corruption and write the image with its mask.
    Corrupt(CorruptArgs),
    /// Reconstruct the bad pixels of an image.
    Inpaint(InpaintArgs),
    /// Corrupt a ground-truth image, reconstruct it with several methods and report metrics.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Plain,
    VarcoefDr,
    Ahe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMethod {
    Average,
    Median,
    Plain,
    VarcoefDr,
    Ahe,
}

/// Parameter sources shared by every subcommand.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Named parameter set: fig4, fig5w6, fig8, ahe-default.
    #[arg(long)]
    preset: Option<String>,
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` parameter; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target fraction of bad pixels.
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long)]
    line_width: Option<usize>,
    /// lines or pixels.
    #[arg(long)]
    pattern: Option<String>,
    /// Orientation layers.
    #[arg(long)]
    layers: Option<usize>,
    /// Angular diffusion intensity (plain).
    #[arg(long)]
    a: Option<f64>,
    /// Spatial diffusion intensity (plain).
    #[arg(long)]
    b: Option<f64>,
    /// gradient or trivial (plain).
    #[arg(long)]
    lift: Option<String>,
    /// Skip the restoration loop (plain).
    #[arg(long)]
    no_restore: bool,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// static or dynamic.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    b0: Option<f64>,
    #[arg(long)]
    b1: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
}

impl ParamArgs {
    /// Preset, then config file, then flags.
    pub fn resolve(&self) -> CliResult<Params> {
        let mut params = match &self.preset {
            Some(name) => {
                let preset = ahe_core::Preset::from_name(name)
                    .ok_or_else(|| CliError::usage(format!("unknown preset '{name}'")))?;
                params::preset_params(preset)
            }
            None => Params::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            params.overlay(&Params::parse_config(&text)?);
        }
        let mut flags = Params::default();
        let numeric: [(&str, Option<String>); 14] = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("fraction", self.fraction.map(|v| v.to_string())),
            ("line_width", self.line_width.map(|v| v.to_string())),
            ("layers", self.layers.map(|v| v.to_string())),
            ("a", self.a.map(|v| v.to_string())),
            ("b", self.b.map(|v| v.to_string())),
            ("iterations", self.iterations.map(|v| v.to_string())),
            ("epsilon", self.epsilon.map(|v| v.to_string())),
            ("a0", self.a0.map(|v| v.to_string())),
            ("a1", self.a1.map(|v| v.to_string())),
            ("b0", self.b0.map(|v| v.to_string())),
            ("b1", self.b1.map(|v| v.to_string())),
            ("sigma", self.sigma.map(|v| v.to_string())),
            ("restore", self.no_restore.then(|| "false".to_string())),
        ];
        for (key, value) in numeric {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        for (key, value) in [("pattern", &self.pattern), ("lift", &self.lift), ("mode", &self.mode)] {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        for pair in &self.set {
            flags.set_pair(pair)?;
        }
        params.overlay(&flags);
        Ok(params)
    }
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct InpaintArgs {
    #[arg(long)]
    input: PathBuf,
    /// Mask file (255 good, 0 bad); without it, white (value 0) pixels are bad.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "ahe")]
    method: Method,
    /// Directory receiving the intermediate images of the ahe method.
    #[arg(long)]
    emit_intermediates: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Ground-truth image.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    truth: Option<PathBuf>,
    /// Built-in test image: stripes, rings, blobs, bars, waves.
    #[arg(long)]
    synthetic: Option<String>,
    /// Side length for --synthetic.
    #[arg(long, default_value_t = 128)]
    size: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "average,median,ahe")]
    methods: Vec<BenchMethod>,
    /// Report file; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure threads: {e}")))?;
    }
    match cli.command {
        Command::Corrupt(args) => commands::corrupt(&args),
        Command::Inpaint(args) => commands::inpaint(&args),
        Command::Bench(args) => commands::bench(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
