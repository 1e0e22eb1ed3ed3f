use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use compactness::astro::mass_radius_table;
use compactness::bounds::{bound_x, kappa_constants, sweep_kappa, write_sweep_csv};
use compactness::portrait::{default_window, portrait as build_portrait, render_svg};
use compactness::stability::analyze as stability;
use compactness::trajectory::{
    check_trap_region, shoot_heteroclinic, verify_lyapunov_monotone, IntegratorConfig,
};
use compactness::{make_model, Error, ModelSpec, Strategy, SystemModel};
use serde_json::{json, Value};

use crate::{ModelArgs, ModelName, Sweep};

const SCHEMA: u32 = 1;
const TRAP_SAMPLES: usize = 1000;

pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String, io::Error),
    /// The orbit reached the time limit without settling at (z, z).
    NotConverged,
}

impl CliError {
    /// A closed stdout (e.g. piped into `head`) is not worth reporting.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, CliError::Io(_, e) if e.kind() == io::ErrorKind::BrokenPipe)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(..) => 1,
            CliError::NotConverged => 4,
            CliError::Core(e) => match e {
                Error::InvalidSpec(_) | Error::InvalidInput(_) => 2,
                Error::NoRoot { .. } | Error::NonConvergence { .. } => 4,
                Error::Domain { .. }
                | Error::NonPositiveY(_)
                | Error::Ordering { .. }
                | Error::Hypothesis { .. }
                | Error::Unreachable { .. }
                | Error::LambertDomain { .. }
                | Error::DomainExit { .. }
                | Error::TrapViolation { .. } => 3,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::NotConverged => {
                f.write_str("trajectory did not reach (z, z) within max_time")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn spec_of(args: ModelArgs) -> Result<ModelSpec> {
    if args.kappa.is_some() && args.model != ModelName::Kappa {
        return Err(CliError::Usage(
            "--kappa only applies to --model kappa".into(),
        ));
    }
    if args.scale.is_some() && args.model != ModelName::Scaled {
        return Err(CliError::Usage(
            "--scale only applies to --model scaled".into(),
        ));
    }
    Ok(match args.model {
        ModelName::Nonrel => ModelSpec::nonrelativistic(),
        ModelName::Stiff => ModelSpec::stiff(),
        ModelName::Scaled => ModelSpec::scaled(args.scale.unwrap_or(ModelSpec::DEFAULT_SCALE)),
        ModelName::Kappa => ModelSpec::kappa(args.kappa.unwrap_or(1.0 / 3.0)),
    })
}

fn model_of(args: ModelArgs) -> Result<SystemModel> {
    Ok(make_model(spec_of(args)?)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn io_at(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Io(path.map_or("stdout".into(), |p| p.display().to_string()), e)
}

fn emit_json(value: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    match path {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")
                .and_then(|_| w.flush())
                .map_err(io_at(path))
        }
        None => write_stdout(format!("{text}\n").as_bytes()),
    }
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    let mut w = io::stdout().lock();
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(io_at(None))
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), json!(SCHEMA));
    }
    v
}

pub fn analyze(args: ModelArgs, json_path: Option<&Path>) -> Result<()> {
    let model = model_of(args)?;
    let z = model.z();
    let trap = check_trap_region(&model, TRAP_SAMPLES)?;
    let report = json!({
        "schema": SCHEMA,
        "model": model.spec(),
        "stationary_points": [[0.0, 0.0], [z, z]],
        "equilibrium": model.equilibrium(),
        "stability": stability(&model),
        "trap_region": trap,
    });
    emit_json(&report, json_path)
}

pub fn trajectory(
    args: ModelArgs,
    eps: Option<f64>,
    rtol: Option<f64>,
    out: Option<&Path>,
) -> Result<()> {
    let model = model_of(args)?;
    let mut cfg = IntegratorConfig::default();
    if let Some(e) = eps {
        cfg.eps_start = e;
    }
    if let Some(r) = rtol {
        cfg.rel_tol = r;
    }
    let traj = shoot_heteroclinic(&model, &cfg)?;
    if let Some(path) = out {
        let mut w = create(path)?;
        traj.write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(io_at(out))?;
    }
    let last = traj.last().copied();
    let bound = bound_x(&model)
        .ok()
        .map(|b| b.x_closed.unwrap_or(b.x_numeric));
    let summary = json!({
        "schema": SCHEMA,
        "model": model.spec(),
        "config": cfg,
        "converged": traj.converged,
        "max_x": traj.max_x,
        "t_max_x": traj.t_max_x,
        "steps": traj.steps,
        "samples": traj.samples.len(),
        "end": last.map(|s| json!({"t": s.t, "x": s.x, "y": s.y, "V": s.v})),
        "max_V_increase": verify_lyapunov_monotone(&traj).ok(),
        "bound_X": bound,
    });
    emit_json(&summary, None)?;
    if traj.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged)
    }
}

pub fn bound(args: ModelArgs, sweep: Option<Sweep>, out: Option<&Path>) -> Result<()> {
    if let Some(Sweep { lo, hi, n }) = sweep {
        if args.model != ModelName::Kappa {
            return Err(CliError::Usage(
                "--sweep-kappa requires --model kappa".into(),
            ));
        }
        if args.kappa.is_some() {
            return Err(CliError::Usage(
                "--sweep-kappa and --kappa are mutually exclusive".into(),
            ));
        }
        let rows = sweep_kappa(lo, hi, n, Strategy::default())?;
        return match out {
            Some(path) => {
                let mut w = create(path)?;
                write_sweep_csv(&rows, &mut w)
                    .and_then(|_| w.flush())
                    .map_err(io_at(out))
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                write_sweep_csv(&rows, &mut w)
                    .and_then(|_| w.flush())
                    .map_err(io_at(None))
            }
        };
    }
    let model = model_of(args)?;
    let report = bound_x(&model)?;
    let mut value = with_schema(serde_json::to_value(report).expect("report serializes"));
    if let Some(k) = model.kappa() {
        value["kappa_constants"] =
            serde_json::to_value(kappa_constants(k)?).expect("constants serialize");
    }
    emit_json(&value, None)
}

pub fn portrait(args: ModelArgs, (nx, ny): (usize, usize), out: &Path) -> Result<()> {
    let model = model_of(args)?;
    let (xr, yr) = default_window(&model);
    let p = build_portrait(&model, xr, yr, nx, ny, Strategy::default())?;
    let svg = out
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("svg"));
    let mut w = create(out)?;
    if svg {
        let orbit = shoot_heteroclinic(&model, &IntegratorConfig::default())?;
        let text = render_svg(&model, &p, Some(&orbit))?;
        w.write_all(text.as_bytes())
    } else {
        p.write_csv(&mut w)
    }
    .and_then(|_| w.flush())
    .map_err(io_at(Some(out)))
}

pub fn masstable(markdown: bool) -> Result<()> {
    let table = mass_radius_table()?;
    if markdown {
        write_stdout(table.to_markdown().as_bytes())
    } else {
        emit_json(
            &serde_json::to_value(&table).expect("table serializes"),
            None,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_mapping() {
        let code = |e: Error| CliError::Core(e).exit_code();
        assert_eq!(code(Error::InvalidSpec("k".into())), 2);
        assert_eq!(
            code(Error::DomainExit {
                t: 1.0,
                x: 1.0,
                y: 1.0
            }),
            3
        );
        assert_eq!(
            code(Error::Hypothesis {
                index: 2,
                x: 0.1,
                y: 0.1,
                detail: ""
            }),
            3
        );
        assert_eq!(
            code(Error::TrapViolation {
                check: "line",
                x: 0.1,
                y: 0.3,
                margin: 1.0
            }),
            3
        );
        assert_eq!(
            code(Error::NonConvergence {
                steps: 10,
                t: 1.0,
                distance: 0.1
            }),
            4
        );
        assert_eq!(CliError::NotConverged.exit_code(), 4);
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
    }
}
