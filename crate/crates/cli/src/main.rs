use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use qhj_cli::{check_suite, classical_table, error_kind, kernel_table, magnetic_suite, propagate_table, GaussianState, Limit, Report, Table};
use qhj_core::propagator::Grid;
use qhj_core::scenario::{parse_scenario, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qhj", version, about = "Quantum Hamilton-Jacobi propagators: checks and tables")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full invariant suite.
    Check {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample the kernel at time `t`.
    Kernel {
        config: PathBuf,
        #[arg(long)]
        t: f64,
        /// Target grid `a:b:dx`.
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Grid,
        /// Single source point; the target grid is reused when omitted.
        #[arg(long, allow_hyphen_values = true)]
        source: Option<f64>,
    },
    /// Propagate a Gaussian with the kernel.
    Propagate {
        config: PathBuf,
        /// `gaussian:x0,p0,w`.
        #[arg(long, value_parser = parse_gaussian, allow_hyphen_values = true)]
        psi0: GaussianState,
        #[arg(long)]
        t: f64,
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-10:10:0.01")]
        grid: Grid,
    },
    /// Classical trajectory against direct integration.
    Classical {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true)]
        v0: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 501)]
        samples: usize,
    },
    /// Field, spin, Pinney and frame checks for a magnetic config.
    Magnetic {
        config: PathBuf,
        #[arg(long)]
        suite: bool,
    },
}

fn parse_grid(text: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:dx, got {text:?}"));
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Grid::spanning(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

fn parse_gaussian(text: &str) -> Result<GaussianState, String> {
    let body = text
        .strip_prefix("gaussian:")
        .ok_or_else(|| format!("expected gaussian:x0,p0,w, got {text:?}"))?;
    let nums = body
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match nums[..] {
        [x0, p0, width] => Ok(GaussianState { x0, p0, width }),
        _ => Err(format!("expected three numbers, got {}", nums.len())),
    }
}

fn load(path: &Path) -> anyhow::Result<Result<Scenario, qhj_core::Error>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_scenario(&text))
}

fn write(dir: &Path, stem: &str, format: Format, csv: String, json: String) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let (ext, body) = match format {
        Format::Csv => ("csv", csv),
        Format::Json => ("json", json),
    };
    let path = dir.join(format!("{stem}.{ext}"));
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

fn emit_report(cli: &Cli, report: &Report) -> anyhow::Result<bool> {
    write(&cli.out, &format!("{}_report", report.suite), cli.format, report.to_csv(), report.to_json())?;
    for c in &report.checks {
        let value = c.value.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        let status = match (c.pass, c.limit) {
            (false, _) => "FAIL",
            (true, Limit::Reported) => "info",
            (true, _) => "ok",
        };
        println!("{status:<4} {:<30} {value:>11}  (tol {:.0e})", c.name, c.tolerance);
    }
    if !report.passed() {
        let failures: Vec<_> = report
            .failures()
            .iter()
            .map(|c| serde_json::json!({ "name": c.name, "value": c.value, "tolerance": c.tolerance, "error": c.error }))
            .collect();
        eprintln!("{}", serde_json::json!({ "suite": report.suite, "failures": failures }));
    }
    Ok(report.passed())
}

fn emit_table(cli: &Cli, stem: &str, table: &Table) -> anyhow::Result<()> {
    write(&cli.out, stem, cli.format, table.to_csv(), table.to_json())
}

fn run(cli: &Cli) -> anyhow::Result<Result<bool, qhj_core::Error>> {
    let config = match &cli.command {
        Command::Check { config, .. }
        | Command::Kernel { config, .. }
        | Command::Propagate { config, .. }
        | Command::Classical { config, .. }
        | Command::Magnetic { config, .. } => config,
    };
    let s = match load(config)? {
        Ok(s) => s,
        Err(e) => return Ok(Err(e)),
    };
    let outcome = match &cli.command {
        Command::Check { seed, .. } => check_suite(&s, *seed).map(|r| emit_report(cli, &r)),
        Command::Kernel { t, grid, source, .. } => {
            let sources = match source {
                Some(xs) => vec![*xs],
                None => grid.points(),
            };
            kernel_table(&s, *t, *grid, &sources).map(|table| emit_table(cli, "kernel", &table).map(|()| true))
        }
        Command::Propagate { psi0, t, grid, .. } => propagate_table(&s, *psi0, *t, *grid).map(|(table, report)| {
            emit_table(cli, "propagate", &table)?;
            emit_report(cli, &report)
        }),
        Command::Classical { x0, v0, tmax, samples, .. } => {
            if !(*tmax > 0.0) {
                bail!("--tmax must be positive");
            }
            classical_table(&s, *x0, *v0, *tmax, *samples).map(|(table, report)| {
                emit_table(cli, "classical", &table)?;
                emit_report(cli, &report)
            })
        }
        Command::Magnetic { suite, .. } => {
            if !suite {
                return Err(anyhow!("nothing to do: pass --suite"));
            }
            magnetic_suite(&s).map(|r| emit_report(cli, &r))
        }
    };
    match outcome {
        Ok(written) => Ok(Ok(written?)),
        Err(e) => Ok(Err(e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("{}", serde_json::json!({ "error": error_kind(&e), "message": e.to_string() }));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
