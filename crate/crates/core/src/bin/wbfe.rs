use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wbfe::integrator::Order;
use wbfe::runner::output::{write_table, write_text};
use wbfe::runner::protocols::{branch_table, preservation_table};
use wbfe::runner::{continuation_study, convergence_study, preservation_test, run_scenario, Scenario};

#[derive(Parser)]
#[command(
    name = "wbfe",
    version,
    about = "Well-balanced finite-volume runs for 1D hydrodynamics with free energy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    config: PathBuf,
    /// Override a scenario key, as `section.key=value`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, env = "WBFE_OUT_DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write snapshots, the time series and a report.
    Run(Common),
    /// Start from the discrete steady state and measure the drift at both orders.
    Preserve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5.0)]
        time: f64,
    },
    /// L1 errors on doubled meshes against a fine reference or the exact solution.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        cells: Option<Vec<usize>>,
        #[arg(long = "ref")]
        reference: Option<usize>,
        #[arg(long)]
        time: Option<f64>,
    },
    /// Follow steady states over decreasing noise values.
    Continue {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
    },
}

fn load(c: &Common) -> Result<Scenario, String> {
    let overrides = c
        .set
        .iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("override `{s}` is not of the form section.key=value"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Scenario::load(&c.config, &overrides).map_err(|e| format!("{}: {e}", c.config.display()))
}

fn prepare(dir: &Path) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))
}

fn execute(cmd: Command) -> Result<bool, String> {
    match cmd {
        Command::Run(c) => {
            let scn = load(&c)?;
            let report = run_scenario(&scn, Some(&c.out)).map_err(|e| e.to_string())?;
            print!("{}", report.summary());
            Ok(report.succeeded())
        }
        Command::Preserve { common: c, time } => {
            let scn = load(&c)?;
            prepare(&c.out)?;
            let rows = preservation_test(&scn, time).map_err(|e| e.to_string())?;
            let name = &scn.config.name;
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| vec![order_number(r.order), r.cells as f64, r.time, r.l1, r.linf])
                .collect();
            write_table(
                &c.out.join(format!("{name}_preservation.csv")),
                &["order", "cells", "time", "l1", "linf"],
                &table,
            )
            .map_err(|e| e.to_string())?;
            let text = preservation_table(&rows);
            write_text(&c.out.join(format!("{name}_preservation.txt")), &text).map_err(|e| e.to_string())?;
            print!("{text}");
            Ok(true)
        }
        Command::Converge {
            common: c,
            cells,
            reference,
            time,
        } => {
            let scn = load(&c)?;
            prepare(&c.out)?;
            let run = &scn.config.run;
            let cells = cells.unwrap_or_else(|| run.cells.clone());
            let t = time.unwrap_or(run.convergence_time);
            let table = convergence_study(&scn, &cells, reference.unwrap_or(run.reference_cells), t)
                .map_err(|e| e.to_string())?;
            let stem = format!("{}_convergence_order{}", scn.config.name, order_number(table.order));
            let rows: Vec<Vec<f64>> = table
                .rows
                .iter()
                .map(|r| vec![r.cells as f64, r.dx, r.time, r.error, r.order.unwrap_or(f64::NAN)])
                .collect();
            write_table(
                &c.out.join(format!("{stem}.csv")),
                &["cells", "dx", "time", "l1_error", "order"],
                &rows,
            )
            .map_err(|e| e.to_string())?;
            let text = table.render();
            write_text(&c.out.join(format!("{stem}.txt")), &text).map_err(|e| e.to_string())?;
            print!("{text}");
            Ok(true)
        }
        Command::Continue { common: c, sigmas } => {
            let scn = load(&c)?;
            prepare(&c.out)?;
            let sigmas = sigmas.unwrap_or_else(|| scn.config.run.sigmas.clone());
            let rows = continuation_study(&scn, &sigmas).map_err(|e| e.to_string())?;
            let name = &scn.config.name;
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.sigma,
                        r.center_of_mass,
                        r.time,
                        r.steps as f64,
                        r.a,
                        r.b,
                        r.cells as f64,
                    ]
                })
                .collect();
            write_table(
                &c.out.join(format!("{name}_branch.csv")),
                &["sigma", "center_of_mass", "time", "steps", "a", "b", "cells"],
                &table,
            )
            .map_err(|e| e.to_string())?;
            let text = branch_table(&rows);
            write_text(&c.out.join(format!("{name}_branch.txt")), &text).map_err(|e| e.to_string())?;
            print!("{text}");
            Ok(true)
        }
    }
}

fn order_number(o: Order) -> f64 {
    match o {
        Order::First => 1.0,
        Order::Second => 2.0,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
