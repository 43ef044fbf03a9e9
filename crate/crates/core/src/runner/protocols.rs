//! Single runs, steady-state preservation, convergence studies and
//! parameter continuation.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::ScenarioConfig;
use super::output::{self, describe_run, num};
use super::pchip::Pchip;
use super::scenario::{exact_density, initial_state, Scenario};
use crate::diagnostics::{center_of_mass, convergence_order, l1_error, support_mask, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::free_energy::{solve_discrete_steady_state, PressureLaw};
use crate::grid::{total_mass, Grid, State};
use crate::integrator::{run_partial, Monitors, Order, Scheme, SchemeConfig, StopReason};

/// Slack of the invariant monitors.
pub const MASS_TOLERANCE: f64 = 1e-12;
pub const ENERGY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub cells: usize,
    pub steps: usize,
    /// Steps retried with a halved time step.
    pub rejected: usize,
    pub stop: StopReason,
    pub snapshot_paths: Vec<PathBuf>,
    pub series_path: Option<PathBuf>,
    pub final_record: DiagnosticsRecord,
    pub final_state: State,
    pub monitors: Monitors,
    pub concentration_time: Option<f64>,
    pub error: Option<String>,
}

impl RunReport {
    /// Invariant breaches, if any.
    pub fn violations(&self) -> Vec<String> {
        let m = &self.monitors;
        let mut out = Vec::new();
        if m.max_mass_drift > MASS_TOLERANCE {
            out.push(format!("relative mass drift {:e}", m.max_mass_drift));
        }
        if m.min_density < 0.0 {
            out.push(format!("negative density {:e}", m.min_density));
        }
        if m.max_energy_increase > ENERGY_SLACK {
            out.push(format!("total energy rose by {:e}", m.max_energy_increase));
        }
        if m.max_dissipation > 0.0 {
            out.push(format!("positive dissipation {:e}", m.max_dissipation));
        }
        out
    }

    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.violations().is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = describe_run(
            &self.scenario,
            self.cells,
            &self.final_record,
            &self.monitors,
            self.stop,
            self.steps,
        );
        if self.rejected > 0 {
            let _ = writeln!(
                s,
                "  {} steps retried with half the time step to keep the density nonnegative",
                self.rejected
            );
        }
        if let Some(t) = self.concentration_time {
            let _ = writeln!(s, "  one cell holds over 99% of the mass from t = {t}");
        }
        for v in self.violations() {
            let _ = writeln!(s, "  MONITOR: {v}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(s, "  ERROR: {e}");
        }
        s
    }
}

/// Runs a scenario, writing snapshots, the time series and a report to
/// `out_dir` when given.
pub fn run_scenario(scn: &Scenario, out_dir: Option<&Path>) -> Result<RunReport> {
    let cfg = &scn.config;
    let g = scn.grid()?;
    let s0 = scn.initial_state(&g)?;
    let scheme = Scheme::new(&g, &cfg.model, &cfg.scheme)?;
    let (traj, error) = run_partial(&scheme, &s0)?;
    let error = error.map(|e| e.to_string());
    let mut report = RunReport {
        scenario: cfg.name.clone(),
        cells: g.len(),
        steps: traj.steps,
        rejected: traj.rejected,
        stop: traj.stop,
        snapshot_paths: Vec::new(),
        series_path: None,
        final_record: traj.records.last().expect("initial record").clone(),
        final_state: traj.last().clone(),
        monitors: traj.monitors,
        concentration_time: traj.concentration_time,
        error,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        for (k, (s, rec)) in traj.snapshots.iter().zip(&traj.records).enumerate() {
            let path = output::snapshot_path(dir, &cfg.name, k);
            output::write_snapshot(&path, &g, s, rec, cfg.scheme.eps_vac)?;
            report.snapshot_paths.push(path);
        }
        let series = dir.join(format!("{}_series.csv", cfg.name));
        output::write_series(&series, &traj.series, report.error.as_deref())?;
        report.series_path = Some(series);
        output::write_text(&dir.join(format!("{}_report.txt", cfg.name)), &report.summary())?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreservationRow {
    pub order: Order,
    pub cells: usize,
    pub time: f64,
    pub l1: f64,
    pub linf: f64,
}

/// Starts at the discrete steady state and measures how far the density
/// drifts by `t_end`, for both scheme orders.
pub fn preservation_test(scn: &Scenario, t_end: f64) -> Result<Vec<PreservationRow>> {
    let cfg = &scn.config;
    let g = scn.grid()?;
    let s0 = solve_discrete_steady_state(&g, &cfg.model, cfg.initial.mass)?;
    [Order::First, Order::Second]
        .into_iter()
        .map(|order| {
            let sc = SchemeConfig {
                order,
                t_end,
                snapshot_every: None,
                steady_tol: None,
                max_steps: None,
                diagnostics: false,
                ..cfg.scheme.clone()
            };
            let traj = Scheme::new(&g, &cfg.model, &sc)?.run(&s0)?;
            let last = traj.last();
            let mut l1 = 0.0;
            let mut linf = 0.0f64;
            for i in 0..g.len() {
                let d = (last.rho[i] - s0.rho[i]).abs();
                l1 += g.widths()[i] * d;
                linf = linf.max(d);
            }
            Ok(PreservationRow {
                order,
                cells: g.len(),
                time: last.time,
                l1,
                linf,
            })
        })
        .collect()
}

pub fn preservation_table(rows: &[PreservationRow]) -> String {
    let mut s = String::from("order  cells  time        L1 drift                 Linf drift\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<6} {:<6} {:<11} {}  {}",
            if r.order == Order::First { 1 } else { 2 },
            r.cells,
            r.time,
            num(r.l1),
            num(r.linf)
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub dx: f64,
    pub time: f64,
    pub error: f64,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub order: Order,
    /// Cell count of the reference run; `None` when the exact solution is used.
    pub reference_cells: Option<usize>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "order {} scheme, L1 error against {}\ncells  dx                       time   L1 error                 order\n",
            if self.order == Order::First { 1 } else { 2 },
            match self.reference_cells {
                Some(n) => format!("a {n}-cell reference"),
                None => "the exact solution".into(),
            }
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<6} {} {:<6} {}  {}",
                r.cells,
                num(r.dx),
                r.time,
                num(r.error),
                r.order.map_or("-".to_string(), |o| format!("{o:.2}"))
            );
        }
        s
    }
}

fn final_state(g: &Grid, cfg: &ScenarioConfig, base: &Path, t: f64) -> Result<State> {
    let s0 = initial_state(cfg, g, base)?;
    let sc = SchemeConfig {
        t_end: t,
        snapshot_every: None,
        steady_tol: None,
        max_steps: None,
        diagnostics: false,
        ..cfg.scheme.clone()
    };
    Ok(Scheme::new(g, &cfg.model, &sc)?.run(&s0)?.last().clone())
}

/// L1 errors on successively doubled meshes at time `t`, against the
/// exact solution when the scenario declares one and otherwise against a
/// `ref_cells` run, block-averaged onto each mesh.
pub fn convergence_study(scn: &Scenario, cells: &[usize], ref_cells: usize, t: f64) -> Result<ConvergenceTable> {
    let cfg = &scn.config;
    if cells.len() < 2 || cells.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidArgument("cell counts must double at each entry".into()));
    }
    let exact = cfg.initial.exact != super::config::ExactSolution::None;
    if !exact {
        if let Some(n) = cells.iter().find(|n| !ref_cells.is_multiple_of(**n)) {
            return Err(Error::IncompatibleGrids(format!(
                "{ref_cells} reference cells are not a multiple of {n}"
            )));
        }
    }
    let mut jobs: Vec<usize> = cells.to_vec();
    if !exact {
        jobs.insert(0, ref_cells);
    }
    let states: Vec<(usize, Grid, State)> = jobs
        .par_iter()
        .map(|&n| {
            let g = cfg.grid.with_cells(n)?;
            let s = final_state(&g, cfg, &scn.base_dir, t)?;
            Ok((n, g, s))
        })
        .collect::<Result<_>>()?;
    let reference = (!exact).then(|| states[0].2.rho.clone());
    let coarse = if exact { &states[..] } else { &states[1..] };
    let mut errors = Vec::with_capacity(coarse.len());
    for (_, g, s) in coarse {
        let target = match &reference {
            Some(r) => r.clone(),
            None => exact_density(cfg, g, t)?.expect("exact solution"),
        };
        let mask = cfg.run.mask.map(|m| {
            let block = crate::diagnostics::coarsen(&target, g.len()).expect("checked multiple");
            support_mask(&block, m.threshold, m.margin)
        });
        errors.push(l1_error(g, s, &target, mask.as_deref())?);
    }
    let orders = if errors.iter().all(|e| *e > 0.0) {
        convergence_order(&errors)?
    } else {
        vec![f64::NAN; errors.len() - 1]
    };
    let rows = coarse
        .iter()
        .zip(&errors)
        .enumerate()
        .map(|(k, ((n, g, s), e))| ConvergenceRow {
            cells: *n,
            dx: g.widths()[0],
            time: s.time,
            error: *e,
            order: (k > 0).then(|| orders[k - 1]),
        })
        .collect();
    Ok(ConvergenceTable {
        order: cfg.scheme.order,
        reference_cells: (!exact).then_some(ref_cells),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRow {
    pub sigma: f64,
    pub center_of_mass: f64,
    /// Time the run needed to settle.
    pub time: f64,
    pub steps: usize,
    pub a: f64,
    pub b: f64,
    pub cells: usize,
}

/// Relative density below which the continuation mesh may drop cells.
const NARROW_THRESHOLD: f64 = 1e-9;
/// Cells kept beyond the retained support on each side.
const NARROW_PAD: usize = 4;
/// Relative slope of the linear tilt applied to every continuation start.
const TILT: f64 = 1e-4;

/// Follows steady states over decreasing noise values, restarting each run
/// from the previous steady state on a mesh narrowed to its support. Each
/// start is tilted slightly towards the side of the initial centre of mass
/// so an unstable symmetric state cannot pass for a converged one.
pub fn continuation_study(scn: &Scenario, sigmas: &[f64]) -> Result<Vec<BranchRow>> {
    let cfg = &scn.config;
    if !matches!(cfg.model.pressure, PressureLaw::ScaledIdeal { .. }) {
        return Err(Error::InvalidArgument(
            "continuation needs the scaled ideal pressure".into(),
        ));
    }
    if sigmas.is_empty() || sigmas.iter().any(|s| !(*s > 0.0)) || sigmas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "noise values must be positive and decreasing".into(),
        ));
    }
    let tol = cfg.scheme.steady_tol.unwrap_or(1e-10);
    let mut g = scn.grid()?;
    let mut s = scn.initial_state(&g)?;
    let mass = total_mass(&g, &s);
    let side = if center_of_mass(&g, &s)? < 0.0 { -1.0 } else { 1.0 };
    let mut rows = Vec::with_capacity(sigmas.len());
    for (k, &sigma) in sigmas.iter().enumerate() {
        if k > 0 {
            (g, s) = narrow(&g, &s, mass)?;
        }
        let mut model = cfg.model.clone();
        model.pressure = PressureLaw::ScaledIdeal { sigma };
        let sc = SchemeConfig {
            steady_tol: Some(tol),
            snapshot_every: None,
            diagnostics: false,
            ..cfg.scheme.clone()
        };
        let start = tilt(&g, &s, side * TILT)?;
        let traj = Scheme::new(&g, &model, &sc)?.run(&start)?;
        if traj.stop != StopReason::Steady {
            return Err(Error::SteadyStateNotConverged {
                iterations: traj.steps,
                residual: f64::NAN,
            }
            .at_time(traj.last().time));
        }
        s = traj.last().clone();
        rows.push(BranchRow {
            sigma,
            center_of_mass: center_of_mass(&g, &s)?,
            time: s.time,
            steps: traj.steps,
            a: g.lower(),
            b: g.upper(),
            cells: g.len(),
        });
    }
    Ok(rows)
}

/// Multiplies the density by `1 + slope (x - c) / h` about the mesh centre
/// `c` with half-width `h`, keeping the mass, and restarts the clock.
fn tilt(g: &Grid, s: &State, slope: f64) -> Result<State> {
    let c = 0.5 * (g.lower() + g.upper());
    let h = 0.5 * (g.upper() - g.lower());
    let mass = total_mass(g, s);
    let rho: Vec<f64> = s
        .rho
        .iter()
        .zip(g.centers())
        .map(|(r, x)| r * (1.0 + slope * (x - c) / h))
        .collect();
    let scale = mass / total_mass(g, &State::at_rest(rho.clone())?);
    let mom = s.mom.iter().map(|m| m * scale).collect();
    State::new(rho.into_iter().map(|r| r * scale).collect(), mom)
}

/// Re-meshes onto the region where the density is not negligible.
fn narrow(g: &Grid, s: &State, mass: f64) -> Result<(Grid, State)> {
    let peak = s.rho.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..g.len()).filter(|&i| s.rho[i] > NARROW_THRESHOLD * peak).collect();
    let (first, last) = match (keep.first(), keep.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Ok((g.clone(), s.clone())),
    };
    let lo = first.saturating_sub(NARROW_PAD);
    let hi = (last + NARROW_PAD).min(g.len() - 1);
    let (a, b) = (g.faces()[lo], g.faces()[hi + 1]);
    if b - a > 0.8 * (g.upper() - g.lower()) {
        return Ok((g.clone(), s.clone()));
    }
    let fine = Grid::uniform(a, b, g.len())?;
    let p = Pchip::new(g.centers(), &s.rho)?;
    let rho: Vec<f64> = fine.centers().iter().map(|x| p.eval(*x).max(0.0)).collect();
    let total: f64 = rho.iter().zip(fine.widths()).map(|(r, w)| r * w).sum();
    let rho = rho.into_iter().map(|r| r * mass / total).collect();
    Ok((fine, State::at_rest(rho)?))
}

pub fn branch_table(rows: &[BranchRow]) -> String {
    let mut s = String::from("sigma        centre of mass           settle time  mesh\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<12} {}  {:<12.4} [{:.4}, {:.4}] x {}",
            r.sigma,
            num(r.center_of_mass),
            r.time,
            r.a,
            r.b,
            r.cells
        );
    }
    s
}
