use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "compactness",
    version,
    about = "Lyapunov bounds and heteroclinic orbits for integrated-density systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary points, linearizations and trap-region checks (JSON).
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Shoot the heteroclinic orbit; prints a JSON summary.
    Trajectory {
        #[command(flatten)]
        model: ModelArgs,
        /// Launch offset along the unstable direction.
        #[arg(long)]
        eps: Option<f64>,
        /// Relative tolerance of the integrator.
        #[arg(long)]
        rtol: Option<f64>,
        /// Write the samples as CSV (t,x,y,V).
        #[arg(long, value_name = "CSV")]
        out: Option<PathBuf>,
    },
    /// Bound on the x-extent of the orbit (JSON), or a kappa sweep (CSV).
    Bound {
        #[command(flatten)]
        model: ModelArgs,
        /// Sweep kappa over A:B with N points (kappa model only).
        #[arg(long, value_name = "A:B:N", value_parser = parse_sweep)]
        sweep_kappa: Option<Sweep>,
        /// Write the sweep CSV here instead of stdout.
        #[arg(long, value_name = "CSV", requires = "sweep_kappa")]
        out: Option<PathBuf>,
    },
    /// Vector field and Lyapunov level grid; `.svg` renders, anything else is CSV.
    Portrait {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_name = "NX,NY", value_parser = parse_grid, default_value = "41,41")]
        grid: (usize, usize),
        #[arg(long, value_name = "CSV|SVG")]
        out: PathBuf,
    },
    /// Comparison table of compactness bounds 2GM/(Rc^2).
    Masstable {
        #[arg(long, conflicts_with = "markdown")]
        json: bool,
        #[arg(long)]
        markdown: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    #[value(alias = "nonrelativistic")]
    Nonrel,
    Stiff,
    Scaled,
    Kappa,
}

#[derive(Args, Clone, Copy, Debug)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// Equation-of-state ratio p / (c^2 rho) in (0, 1]; defaults to 1/3.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Scale sigma of the scaled law; defaults to 8 pi.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err("expected A:B:N".into());
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}"));
    let n = n.trim().parse::<usize>().map_err(|e| format!("{n}: {e}"))?;
    Ok(Sweep {
        lo: num(a)?,
        hi: num(b)?,
        n,
    })
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected NX,NY")?;
    let n = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v}: {e}"));
    Ok((n(a)?, n(b)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { model, json } => commands::analyze(model, json.as_deref()),
        Command::Trajectory {
            model,
            eps,
            rtol,
            out,
        } => commands::trajectory(model, eps, rtol, out.as_deref()),
        Command::Bound {
            model,
            sweep_kappa,
            out,
        } => commands::bound(model, sweep_kappa, out.as_deref()),
        Command::Portrait { model, grid, out } => commands::portrait(model, grid, &out),
        Command::Masstable { markdown, .. } => commands::masstable(markdown),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
