//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Overrides;

const AFTER_HELP: &str = "\
Exit codes: 0 affirmative or verified, 1 negative verdict, 2 usage or numerical error.

Configuration file (--config FILE): UTF-8 lines of `key = value`, `#` starts a
comment. Keys: radial_steps, angles, t_steps, disk_steps, curve_samples,
membership_tol (number or `auto`), bezout_tol, winding_residue, rng_seed,
out_dir, format_version. Command-line flags override the file.";

#[derive(Debug, Parser)]
#[command(name = "conealg", version, about = "Cone and cylinder algebra toolkit", after_help = AFTER_HELP)]
pub struct Cli {
    /// Configuration file of `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Radial steps M of the polar grid [default: 64]
    #[arg(long, global = true, value_name = "M")]
    pub radial_steps: Option<usize>,

    /// Angles per circle, a power of two [default: 256]
    #[arg(long, global = true, value_name = "N")]
    pub angles: Option<usize>,

    /// Steps L of the t grid on the cylinder [default: 32]
    #[arg(long, global = true, value_name = "L")]
    pub t_steps: Option<usize>,

    /// Concentric circles per cone slice in spectrum scans [default: 32]
    #[arg(long, global = true)]
    pub disk_steps: Option<usize>,

    /// Points on witness zero curves [default: 4096]
    #[arg(long, global = true)]
    pub curve_samples: Option<usize>,

    /// Membership tolerance [default: 1e-8 * max(1, sup)]
    #[arg(long, global = true)]
    pub membership_tol: Option<f64>,

    /// Bezout residual tolerance [default: 1e-8]
    #[arg(long, global = true)]
    pub bezout_tol: Option<f64>,

    /// Largest accepted rounding residue of a winding number [default: 0.01]
    #[arg(long, global = true)]
    pub winding_residue: Option<f64>,

    /// Seed of the perturbation search [default: 1592598564]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for CSV, SVG and JSON artifacts [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            radial_steps: self.radial_steps,
            angles: self.angles,
            t_steps: self.t_steps,
            disk_steps: self.disk_steps,
            curve_samples: self.curve_samples,
            membership_tol: self.membership_tol,
            bezout_tol: self.bezout_tol,
            winding_residue: self.winding_residue,
            rng_seed: self.seed,
            out_dir: self.out_dir.clone(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FunctionArg {
    /// Expression in z, r = |z| and t
    #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
    pub f: String,

    /// Value at z = 0 when the expression cannot be evaluated there
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    pub origin: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algebra {
    Cone,
    Disk,
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    ConeBsr,
    CylBsr,
    Tsr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PeakKind {
    Exp,
    Origin,
    Quotient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    Tent,
    Zero,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test membership in the cone, disk or cylinder algebra
    Membership {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long, value_enum, default_value_t = Algebra::Cone)]
        algebra: Algebra,
        /// Write the Fourier coefficient table as CSV
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Evaluate the Gelfand transform at a point (w, t) of the cone
    Gelfand {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Decide invertibility in the cone algebra
    Invert {
        #[command(flatten)]
        f: FunctionArg,
        /// Modulus threshold [default: 1e-6 * max(1, sup)]
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Approximate by polynomials in z and |z| (or z and t with --cylinder)
    Approx {
        #[command(flatten)]
        f: FunctionArg,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        cylinder: bool,
        /// Write the approximating polynomial as JSON
        #[arg(long, value_name = "FILE")]
        poly: Option<PathBuf>,
    },
    /// Solve x f + y g = 1 on the cylinder for polynomials in z
    Bezout {
        #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
        f: String,
        #[arg(long = "g", value_name = "EXPR", allow_hyphen_values = true)]
        g: String,
    },
    /// Stable rank witnesses and the perturbation search
    Witness {
        #[arg(value_enum)]
        kind: WitnessKind,
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
        q: Option<String>,
        /// Search over the cylinder instead of the cone (tsr only)
        #[arg(long)]
        cylinder: bool,
        /// Required distance from a common zero (tsr only)
        #[arg(long, default_value_t = 1e-4)]
        margin: f64,
        /// Number of random shifts to try (tsr only)
        #[arg(long, default_value_t = 20)]
        max_tries: u32,
        /// Write the zero curve and restricted map as CSV (bsr only)
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Build and verify a peak function
    Peak {
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        a: String,
        #[arg(long, value_enum, default_value_t = PeakKind::Exp)]
        kind: PeakKind,
        #[arg(long, value_enum, default_value_t = ProfileKind::Tent)]
        profile: ProfileKind,
        /// Radius of the ball around the peak point excluded from the check
        #[arg(long, default_value_t = 0.05)]
        exclusion: f64,
    },
    /// Draw the figure for a saved report
    Render {
        #[arg(long, value_name = "REPORT")]
        input: PathBuf,
        #[arg(long, value_name = "FILE.svg")]
        out: PathBuf,
        /// Also write the underlying data as CSV
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Membership { .. } => "membership",
            Command::Gelfand { .. } => "gelfand",
            Command::Invert { .. } => "invert",
            Command::Approx { .. } => "approx",
            Command::Bezout { .. } => "bezout",
            Command::Witness { .. } => "witness",
            Command::Peak { .. } => "peak",
            Command::Render { .. } => "render",
        }
    }
}
