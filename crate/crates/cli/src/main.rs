//! Command-line front end for the `heisiso` library.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "heisiso", version, about = "Heisenberg-group CC geometry: distances, set diameters, isodiametric checks")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Complex dimension of the group for profile inputs.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Worker threads; 1 selects the sequential code path.
    #[arg(long, global = true, env = "HEISISO_THREADS")]
    pub threads: Option<usize>,
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Encoding of reports; set files keep their own formats.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Radial grid size of the diameter search.
    #[arg(long, global = true, default_value_t = 128)]
    pub grid_r: usize,
    /// Angular grid size of the diameter search.
    #[arg(long, global = true, default_value_t = 64)]
    pub grid_theta: usize,
    /// Multistart refinements.
    #[arg(long, global = true, default_value_t = 16)]
    pub starts: usize,
    /// Boundary samples examined by `nc`.
    #[arg(long, global = true, default_value_t = 64)]
    pub nc_samples: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Inversion,
    Bisection,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpChoice {
    Radial,
    Offcenter,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartChoice {
    Ball,
    A,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distance between two points given as `x.. y.. t -- x.. y.. t`.
    Dist {
        #[arg(allow_negative_numbers = true, required = true)]
        p: Vec<f64>,
        #[arg(last = true, allow_negative_numbers = true, required = true)]
        q: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Method::Inversion)]
        method: Method,
    },
    /// Table `r,h,h_prime,h_second` of the unit-ball profile.
    Profile {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Profile CSV of A_λ.
    MakeA {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Section JSON of a perturbed A_λ.
    Perturb {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = BumpChoice::Radial)]
        bump: BumpChoice,
        /// Support as a fraction of the admissible radius (radial bumps).
        #[arg(long, default_value_t = 0.9)]
        fraction: f64,
        /// Centre offset as a fraction of the admissible radius (off-center bumps).
        #[arg(long, default_value_t = 0.4)]
        offset: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        angle: f64,
        /// Sign of the bump.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        sign: f64,
        /// Override the Lipschitz constant (the amplitude follows).
        #[arg(long)]
        lipschitz: Option<f64>,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 4000)]
        zcount: usize,
    },
    /// Volume of a set file.
    Volume { input: Option<PathBuf> },
    /// Diameter report of a set file.
    Diameter { input: Option<PathBuf> },
    /// Check of the diametral-partner condition.
    Nc {
        input: Option<PathBuf>,
        #[arg(long)]
        diam_hint: Option<f64>,
    },
    /// Steiner symmetrization.
    Symmetrize {
        input: Option<PathBuf>,
        /// Fibres used when the input is a profile.
        #[arg(long, default_value_t = 4000)]
        zcount: usize,
    },
    /// Vertical convex hull.
    Tco {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 4000)]
        zcount: usize,
    },
    /// Isodiametric ratio report.
    Ratio { input: Option<PathBuf> },
    /// Ratio comparison of two set files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Coordinate ascent toward the symmetric maximizer.
    Optimize {
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        max_sweeps: usize,
        #[arg(long, default_value_t = 1e-10)]
        step_tol: f64,
        #[arg(long, default_value_t = 1.0)]
        diameter: f64,
        #[arg(long, value_enum, default_value_t = StartChoice::Ball)]
        start: StartChoice,
        /// Also write the optimized profile CSV here.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Run the claim verification suite; exits nonzero on any failure.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
    },
    /// Section data `r,u,minus_u` (profiles) or `x,t_lo,t_hi` (sections along the x-axis).
    CrossSection { input: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cfg = CliConfig::parse();
    if let Some(t) = cfg.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
