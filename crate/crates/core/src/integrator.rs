//! Semidiscrete right-hand side and SSP-RK3 time stepping with walls.

use crate::diagnostics::{
    bulk_spread, record_with, series_with, variation_with, DiagnosticsRecord, SeriesRecord, BULK_FLOOR,
};
use crate::error::{Error, Result};
use crate::flux::{kinetic_flux, llf_face, max_speed_scaled, FaceFlux, FluxKind, KineticCfl};
use crate::free_energy::{FreeEnergyModel, PotentialOperator, PressureLaw};
use crate::grid::{total_mass, Grid, State, DEFAULT_EPS_VAC};
use crate::reconstruction::{
    first_order_sources, muscl_boundary_values, reconstruct_first_order, reconstruct_second_order,
    second_order_sources, Communication, Damping, HReconstruction, InterfaceRule, InterfaceStates, SourceTerms,
};

/// Densities above `-NEGATIVE_SLACK` are clamped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Times a step may be halved after producing a negative density.
pub const MAX_HALVINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub order: Order,
    pub flux: FluxKind,
    pub rule: InterfaceRule,
    pub h_reconstruction: HReconstruction,
    pub cfl: f64,
    pub gamma: f64,
    pub psi: Communication,
    pub eps_vac: f64,
    pub t_end: f64,
    /// Snapshot spacing in time; only the initial and final states when unset.
    pub snapshot_every: Option<f64>,
    pub kinetic_cfl: KineticCfl,
    /// Stop once `max |m| / max rho` and the variation spread both fall below this.
    pub steady_tol: Option<f64>,
    pub max_steps: Option<usize>,
    /// Stop once a single cell holds more than 99% of the mass.
    pub stop_on_concentration: bool,
    /// Record scalar diagnostics every step.
    pub diagnostics: bool,
    /// Accept a Lax-Friedrichs flux with a vacuum-forming pressure law.
    pub force: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            order: Order::First,
            flux: FluxKind::Llf,
            rule: InterfaceRule::Max,
            h_reconstruction: HReconstruction::Composite,
            cfl: 0.7,
            gamma: 1.0,
            psi: Communication::None,
            eps_vac: DEFAULT_EPS_VAC,
            t_end: 0.0,
            snapshot_every: None,
            kinetic_cfl: KineticCfl::Capped,
            steady_tol: None,
            max_steps: None,
            stop_on_concentration: false,
            diagnostics: true,
            force: false,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self, model: &FreeEnergyModel) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if !(self.eps_vac >= 0.0) {
            return Err(Error::InvalidArgument("eps_vac must be nonnegative".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be finite and nonnegative, got {}",
                self.t_end
            )));
        }
        if let Some(dt) = self.snapshot_every {
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("snapshot spacing must be positive".into()));
            }
        }
        if self.flux == FluxKind::Llf && model.pressure.forms_vacuum() && !self.force {
            return Err(Error::InvalidArgument(
                "the Lax-Friedrichs flux cannot handle vacuum; use the kinetic flux for power-law pressure".into(),
            ));
        }
        Ok(())
    }
}

/// Time derivative of `(rho, rho u)` per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
}

impl Rhs {
    pub fn max_abs(&self) -> f64 {
        self.rho.iter().chain(&self.mom).fold(0.0f64, |a, x| a.max(x.abs()))
    }
}

/// A scheme bound to a grid and model, with the kernel operators cached.
#[derive(Debug, Clone)]
pub struct Scheme {
    grid: Grid,
    model: FreeEnergyModel,
    op: PotentialOperator,
    damping: Damping,
    cfg: SchemeConfig,
}

impl Scheme {
    pub fn new(g: &Grid, model: &FreeEnergyModel, cfg: &SchemeConfig) -> Result<Self> {
        cfg.validate(model)?;
        if cfg.order == Order::Second && g.len() < 3 {
            return Err(Error::InvalidGrid("second order needs at least 3 cells".into()));
        }
        Ok(Scheme {
            grid: g.clone(),
            model: model.clone(),
            op: PotentialOperator::new(g, model)?,
            damping: Damping::new(g, cfg.gamma, cfg.psi)?,
            cfg: cfg.clone(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn model(&self) -> &FreeEnergyModel {
        &self.model
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn operator(&self) -> &PotentialOperator {
        &self.op
    }

    fn reconstruct(&self, s: &State) -> Result<(InterfaceStates, SourceTerms)> {
        s.check_grid(&self.grid)?;
        let law = self.model.pressure;
        let eps = self.cfg.eps_vac;
        let h = self.op.field(&s.rho)?;
        match self.cfg.order {
            Order::First => {
                let f = reconstruct_first_order(&self.grid, s, &h, law, self.cfg.rule, eps)?;
                let src = first_order_sources(&self.grid, s, law, &f, &self.damping, eps)?;
                Ok((f, src))
            }
            Order::Second => {
                let bv = muscl_boundary_values(&self.grid, s, &h, law, self.cfg.h_reconstruction, eps)?;
                let f = reconstruct_second_order(&bv, law, self.cfg.rule, eps);
                let src = second_order_sources(&self.grid, s, &bv, &f, law, &self.damping, eps)?;
                Ok((f, src))
            }
        }
    }

    fn speed_scale(&self, s: &State) -> Option<Vec<f64>> {
        match self.cfg.flux {
            FluxKind::Llf => self.op.speed_factor(&s.rho),
            FluxKind::Kinetic => None,
        }
    }

    pub fn rhs(&self, s: &State) -> Result<Rhs> {
        let (faces, sources) = self.reconstruct(s)?;
        self.assemble(&faces, &sources, self.speed_scale(s).as_deref())
    }

    /// Right-hand side together with the step the CFL rule allows at `s`.
    pub fn rhs_and_dt(&self, s: &State) -> Result<(Rhs, f64)> {
        let (faces, sources) = self.reconstruct(s)?;
        let scale = self.speed_scale(s);
        let dt = self.dt_from(s, &faces, scale.as_deref());
        Ok((self.assemble(&faces, &sources, scale.as_deref())?, dt))
    }

    fn assemble(&self, faces: &InterfaceStates, sources: &SourceTerms, scale: Option<&[f64]>) -> Result<Rhs> {
        let law = self.model.pressure;
        let fluxes = self.face_fluxes(law, faces, scale)?;
        let n = self.grid.len();
        let dx = self.grid.widths();
        let src = sources.momentum();
        let mut out = Rhs {
            rho: vec![0.0; n],
            mom: vec![0.0; n],
        };
        for i in 0..n {
            let right = if i + 1 < n { fluxes[i] } else { FaceFlux::default() };
            let left = if i > 0 { fluxes[i - 1] } else { FaceFlux::default() };
            out.rho[i] = -(right.mass - left.mass) / dx[i];
            out.mom[i] = -(right.momentum - left.momentum) / dx[i] + src[i];
        }
        Ok(out)
    }

    fn face_fluxes(&self, law: PressureLaw, f: &InterfaceStates, scale: Option<&[f64]>) -> Result<Vec<FaceFlux>> {
        let eps = self.cfg.eps_vac;
        (0..f.len())
            .map(|k| {
                let (rl, rr) = (f.rho_minus[k], f.rho_plus[k]);
                let (ml, mr) = (rl * f.u_minus[k], rr * f.u_plus[k]);
                match self.cfg.flux {
                    FluxKind::Llf => {
                        if law.forms_vacuum() {
                            if let Some(&density) = [rl, rr].iter().find(|r| **r <= eps) {
                                return Err(Error::FluxVacuumMismatch { density });
                            }
                        }
                        let c = scale.map_or(1.0, |s| s[k].max(s[k + 1]));
                        Ok(llf_face(law, rl, ml, rr, mr, c))
                    }
                    FluxKind::Kinetic => Ok(kinetic_flux((rl, ml), (rr, mr), law)),
                }
            })
            .collect()
    }

    /// Largest stable step, ignoring the end time; infinite for a silent
    /// state. Wave speeds are taken over the cells and both sides of every
    /// reconstructed interface.
    pub fn stable_dt(&self, s: &State) -> Result<f64> {
        let (faces, _) = self.reconstruct(s)?;
        Ok(self.dt_from(s, &faces, self.speed_scale(s).as_deref()))
    }

    fn dt_from(&self, s: &State, f: &InterfaceStates, scale: Option<&[f64]>) -> f64 {
        let nf = f.len();
        let mut rho = Vec::with_capacity(s.len() + 2 * nf);
        let mut mom = Vec::with_capacity(s.len() + 2 * nf);
        rho.extend_from_slice(&s.rho);
        mom.extend_from_slice(&s.mom);
        for k in 0..nf {
            rho.extend([f.rho_minus[k], f.rho_plus[k]]);
            mom.extend([f.rho_minus[k] * f.u_minus[k], f.rho_plus[k] * f.u_plus[k]]);
        }
        let scale = scale.map(|c| {
            let mut all = c.to_vec();
            for k in 0..nf {
                let m = c[k].max(c[k + 1]);
                all.extend([m, m]);
            }
            all
        });
        let speed = max_speed_scaled(
            &rho,
            &mom,
            self.model.pressure,
            self.cfg.flux,
            self.cfg.kinetic_cfl,
            self.cfg.eps_vac,
            scale.as_deref(),
        );
        if speed > 0.0 {
            self.cfg.cfl * self.grid.min_width() / speed
        } else {
            f64::INFINITY
        }
    }

    /// Stable step shortened so it never passes `t_end`.
    pub fn cfl_dt(&self, s: &State) -> Result<f64> {
        let remaining = self.cfg.t_end - s.time;
        let dt = self.stable_dt(s)?;
        Ok(if remaining > 0.0 { dt.min(remaining) } else { dt })
    }

    pub fn step(&self, s: &State, dt: f64) -> Result<State> {
        ssp_rk3_step_with(s, dt, self.cfg.eps_vac, |u| self.rhs(u))
    }

    pub fn run(&self, s0: &State) -> Result<Trajectory> {
        run_scheme(self, s0)
    }
}

pub fn semidiscrete_rhs(g: &Grid, s: &State, model: &FreeEnergyModel, cfg: &SchemeConfig) -> Result<Rhs> {
    Scheme::new(g, model, cfg)?.rhs(s)
}

pub fn cfl_dt(g: &Grid, s: &State, model: &FreeEnergyModel, cfg: &SchemeConfig) -> Result<f64> {
    Scheme::new(g, model, cfg)?.cfl_dt(s)
}

pub fn ssp_rk3_step(g: &Grid, s: &State, model: &FreeEnergyModel, cfg: &SchemeConfig, dt: f64) -> Result<State> {
    Scheme::new(g, model, cfg)?.step(s, dt)
}

pub fn run(g: &Grid, s0: &State, model: &FreeEnergyModel, cfg: &SchemeConfig) -> Result<Trajectory> {
    Scheme::new(g, model, cfg)?.run(s0)
}

/// Three-stage Shu-Osher step for an arbitrary right-hand side.
pub fn ssp_rk3_step_with(s: &State, dt: f64, eps_vac: f64, rhs: impl Fn(&State) -> Result<Rhs>) -> Result<State> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be finite and nonnegative, got {dt}"
        )));
    }
    if dt == 0.0 {
        return Ok(s.clone());
    }
    let l0 = rhs(s)?;
    rk3_from(s, &l0, dt, eps_vac, rhs)
}

/// RK3 step whose first-stage rate `l0` at `s` is already known.
fn rk3_from(s: &State, l0: &Rhs, dt: f64, eps_vac: f64, rhs: impl Fn(&State) -> Result<Rhs>) -> Result<State> {
    // integer weights over a common denominator
    let combine = |a: f64, base: &State, b: f64, stage: &State, l: &Rhs, d: f64| -> Result<State> {
        let n = base.len();
        let mut rho = Vec::with_capacity(n);
        let mut mom = Vec::with_capacity(n);
        for i in 0..n {
            rho.push((a * base.rho[i] + b * (stage.rho[i] + dt * l.rho[i])) / d);
            mom.push((a * base.mom[i] + b * (stage.mom[i] + dt * l.mom[i])) / d);
        }
        sanitize(&mut rho, &mut mom, eps_vac)?;
        Ok(State { rho, mom, time: s.time })
    };
    let s1 = combine(0.0, s, 1.0, s, l0, 1.0)?;
    let l1 = rhs(&s1)?;
    let s2 = combine(3.0, s, 1.0, &s1, &l1, 4.0)?;
    let l2 = rhs(&s2)?;
    let mut s3 = combine(1.0, s, 2.0, &s2, &l2, 3.0)?;
    s3.time = s.time + dt;
    Ok(s3)
}

/// Clamps roundoff negatives and damps the velocity of nearly dry cells,
/// `u -> 2 rho^2 u / (rho^2 + eps_vac)` while `rho^2 < eps_vac`.
fn sanitize(rho: &mut [f64], mom: &mut [f64], eps_vac: f64) -> Result<()> {
    for i in 0..rho.len() {
        let r = rho[i];
        if !r.is_finite() || r < -NEGATIVE_SLACK {
            return Err(Error::PositivityViolation { cell: i, value: r });
        }
        if r < 0.0 {
            rho[i] = 0.0;
        }
        let r2 = rho[i] * rho[i];
        if rho[i] <= eps_vac {
            mom[i] = 0.0;
        } else if r2 < eps_vac {
            mom[i] *= 2.0 * r2 / (r2 + eps_vac);
        }
        if !mom[i].is_finite() {
            return Err(Error::InvalidState(format!("non-finite momentum at cell {i}")));
        }
    }
    Ok(())
}

/// Running checks of the discrete invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitors {
    pub min_density: f64,
    /// Largest step-to-step increase of the total energy.
    pub max_energy_increase: f64,
    /// Largest value of the dissipation term (never positive in theory).
    pub max_dissipation: f64,
    /// Largest relative mass change from the initial state.
    pub max_mass_drift: f64,
}

impl Default for Monitors {
    fn default() -> Self {
        Monitors {
            min_density: f64::INFINITY,
            max_energy_increase: f64::NEG_INFINITY,
            max_dissipation: f64::NEG_INFINITY,
            max_mass_drift: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    EndTime,
    Steady,
    Concentrated,
    StepLimit,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<State>,
    /// Full records at each snapshot.
    pub records: Vec<DiagnosticsRecord>,
    /// Scalar records after each step, starting with the initial state.
    pub series: Vec<SeriesRecord>,
    pub steps: usize,
    /// Step attempts thrown away and retried with half the step.
    pub rejected: usize,
    pub monitors: Monitors,
    pub stop: StopReason,
    /// First time one cell held more than 99% of the mass.
    pub concentration_time: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.snapshots
            .last()
            .expect("trajectory always holds the initial state")
    }
}

fn concentrated(g: &Grid, s: &State, mass: f64) -> bool {
    s.rho.iter().zip(g.widths()).any(|(r, dx)| r * dx > 0.99 * mass)
}

fn run_scheme(scheme: &Scheme, s0: &State) -> Result<Trajectory> {
    match run_partial(scheme, s0)? {
        (_, Some(e)) => Err(e),
        (t, None) => Ok(t),
    }
}

/// Runs until done or until a step fails; the trajectory up to the failure
/// is returned alongside the error.
pub(crate) fn run_partial(scheme: &Scheme, s0: &State) -> Result<(Trajectory, Option<Error>)> {
    let g = &scheme.grid;
    let cfg = &scheme.cfg;
    s0.check_grid(g)?;
    let eps = cfg.eps_vac;
    let mut s = s0.clone();
    let mass0 = total_mass(g, &s);
    let series_of = |s: &State| series_with(g, &scheme.op, s, cfg.gamma, cfg.psi, eps);
    let record_of = |s: &State| record_with(g, &scheme.op, &scheme.model, s, eps);

    let mut traj = Trajectory {
        snapshots: vec![s.clone()],
        records: vec![record_of(&s)?],
        series: Vec::new(),
        steps: 0,
        rejected: 0,
        monitors: Monitors::default(),
        stop: StopReason::EndTime,
        concentration_time: None,
    };
    traj.monitors.min_density = s.rho.iter().copied().fold(f64::INFINITY, f64::min);
    let mut last_energy = None;
    if cfg.diagnostics {
        let r = series_of(&s)?;
        traj.monitors.max_dissipation = r.dissipation;
        last_energy = Some(r.total_energy);
        traj.series.push(r);
    }
    if mass0 > 0.0 && concentrated(g, &s, mass0) {
        traj.concentration_time = Some(s.time);
    }

    let mut next_snapshot = cfg.snapshot_every.map(|d| s.time + d);
    let mut advance = || -> Result<()> {
        while s.time < cfg.t_end {
            if cfg.max_steps.is_some_and(|m| traj.steps >= m) {
                traj.stop = StopReason::StepLimit;
                break;
            }
            let (l0, stable) = scheme.rhs_and_dt(&s).map_err(|e| e.at_time(s.time))?;
            let mut dt = stable.min(cfg.t_end - s.time);
            let mut target = cfg.t_end;
            if let Some(t) = next_snapshot {
                if t < cfg.t_end && s.time + dt >= t {
                    dt = t - s.time;
                    target = t;
                }
            }
            let mut halvings = 0;
            let mut next = loop {
                match rk3_from(&s, &l0, dt, eps, |u| scheme.rhs(u)) {
                    Err(Error::PositivityViolation { .. }) if halvings < MAX_HALVINGS => {
                        dt *= 0.5;
                        halvings += 1;
                        traj.rejected += 1;
                    }
                    other => break other.map_err(|e| e.at_time(s.time))?,
                }
            };
            // land exactly on the requested time
            if next.time >= target || (target - next.time) < 1e-14 * target.abs().max(1.0) {
                next.time = target;
            }
            s = next;
            traj.steps += 1;
            let m = &mut traj.monitors;
            m.min_density = s.rho.iter().copied().fold(m.min_density, f64::min);
            if mass0 > 0.0 {
                m.max_mass_drift = m.max_mass_drift.max(((total_mass(g, &s) - mass0) / mass0).abs());
            }
            if cfg.diagnostics {
                let r = series_of(&s).map_err(|e| e.at_time(s.time))?;
                if let Some(e) = last_energy {
                    m.max_energy_increase = m.max_energy_increase.max(r.total_energy - e);
                }
                m.max_dissipation = m.max_dissipation.max(r.dissipation);
                last_energy = Some(r.total_energy);
                traj.series.push(r);
            }
            if let Some(t) = next_snapshot {
                if s.time >= t && s.time < cfg.t_end {
                    traj.snapshots.push(s.clone());
                    traj.records.push(record_of(&s).map_err(|e| e.at_time(s.time))?);
                    next_snapshot = Some(t + cfg.snapshot_every.unwrap_or(f64::INFINITY));
                }
            }
            if traj.concentration_time.is_none() && mass0 > 0.0 && concentrated(g, &s, mass0) {
                traj.concentration_time = Some(s.time);
                if cfg.stop_on_concentration {
                    traj.stop = StopReason::Concentrated;
                    break;
                }
            }
            if let Some(tol) = cfg.steady_tol {
                if is_steady(scheme, &s, tol).map_err(|e| e.at_time(s.time))? {
                    traj.stop = StopReason::Steady;
                    break;
                }
            }
        }
        Ok(())
    };
    let outcome = advance().err();
    if traj.snapshots.last().map(|l| l.time) != Some(s.time) {
        match record_of(&s) {
            Ok(r) => {
                traj.snapshots.push(s.clone());
                traj.records.push(r);
            }
            Err(e) if outcome.is_none() => return Err(e),
            Err(_) => {}
        }
    }
    Ok((traj, outcome))
}

fn is_steady(scheme: &Scheme, s: &State, tol: f64) -> Result<bool> {
    let eps = scheme.cfg.eps_vac;
    let peak = s.rho.iter().copied().fold(0.0, f64::max);
    if s.mom.iter().any(|m| m.abs() > tol * peak) {
        return Ok(false);
    }
    let v = variation_with(&scheme.op, &s.rho, eps)?;
    Ok(bulk_spread(&s.rho, &v, BULK_FLOOR) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_energy::{solve_discrete_steady_state, ExternalPotential};
    use approx::assert_relative_eq;

    fn example_model() -> FreeEnergyModel {
        FreeEnergyModel::new(PressureLaw::IdealGas).with_potential(ExternalPotential::Quadratic { a: 1.0 })
    }

    #[test]
    fn flat_state_is_at_rest() {
        let g = Grid::uniform(0.0, 1.0, 8).unwrap();
        let s = State::at_rest(vec![0.7; 8]).unwrap();
        for order in [Order::First, Order::Second] {
            let cfg = SchemeConfig {
                order,
                ..SchemeConfig::default()
            };
            let r = semidiscrete_rhs(&g, &s, &FreeEnergyModel::new(PressureLaw::IdealGas), &cfg).unwrap();
            assert_eq!(r.max_abs(), 0.0);
        }
    }

    #[test]
    fn steady_state_rhs_vanishes() {
        let g = Grid::uniform(-5.0, 5.0, 50).unwrap();
        let m = example_model();
        let s = solve_discrete_steady_state(&g, &m, 1.0).unwrap();
        for order in [Order::First, Order::Second] {
            let cfg = SchemeConfig {
                order,
                ..SchemeConfig::default()
            };
            let r = semidiscrete_rhs(&g, &s, &m, &cfg).unwrap();
            assert!(r.max_abs() <= 1e-13, "{order:?} {}", r.max_abs());
        }
    }

    #[test]
    fn mass_rate_telescopes() {
        let g = Grid::uniform(-5.0, 5.0, 40).unwrap();
        let rho: Vec<f64> = g.centers().iter().map(|x| 1.0 + 0.5 * (x * 1.3).sin()).collect();
        let mom: Vec<f64> = g.centers().iter().map(|x| 0.3 * (x * 0.7).cos()).collect();
        let s = State::new(rho, mom).unwrap();
        for order in [Order::First, Order::Second] {
            let cfg = SchemeConfig {
                order,
                ..SchemeConfig::default()
            };
            let r = semidiscrete_rhs(&g, &s, &example_model(), &cfg).unwrap();
            let total: f64 = r.rho.iter().zip(g.widths()).map(|(d, w)| d * w).sum();
            assert!(total.abs() < 1e-13, "{total}");
        }
    }

    #[test]
    fn time_step_formula() {
        let g = Grid::uniform(0.0, 1.0, 10).unwrap();
        let s = State::at_rest(vec![1.0; 10]).unwrap();
        let cfg = SchemeConfig {
            t_end: 10.0,
            ..SchemeConfig::default()
        };
        let m = FreeEnergyModel::new(PressureLaw::IdealGas);
        assert_relative_eq!(cfl_dt(&g, &s, &m, &cfg).unwrap(), 0.07, max_relative = 1e-15);
        let g = Grid::uniform(0.0, 1.0, 5).unwrap();
        let s = State::new(vec![1.0; 5], vec![1.0; 5]).unwrap();
        assert_relative_eq!(cfl_dt(&g, &s, &m, &cfg).unwrap(), 0.07, max_relative = 1e-15);
        let short = SchemeConfig { t_end: 0.01, ..cfg };
        assert_eq!(cfl_dt(&g, &s, &m, &short).unwrap(), 0.01);
    }

    #[test]
    fn rk3_amplification() {
        let s = State::new(vec![1.0], vec![1.0]).unwrap();
        let decay = |u: &State| {
            Ok(Rhs {
                rho: u.rho.iter().map(|x| -x).collect(),
                mom: u.mom.iter().map(|x| -x).collect(),
            })
        };
        let out = ssp_rk3_step_with(&s, 0.1, 0.0, decay).unwrap();
        let expected = 1.0 - 0.1 + 0.01 / 2.0 - 0.001 / 6.0;
        assert_relative_eq!(out.rho[0], expected, max_relative = 1e-15);
        assert!((out.rho[0] - 0.9048333).abs() < 1e-7);
        assert_eq!(ssp_rk3_step_with(&s, 0.0, 0.0, decay).unwrap(), s);
        let plunge = |u: &State| {
            Ok(Rhs {
                rho: vec![-10.0 * u.rho[0].max(1.0)],
                mom: vec![0.0],
            })
        };
        assert!(matches!(
            ssp_rk3_step_with(&s, 1.0, 0.0, plunge),
            Err(Error::PositivityViolation { .. })
        ));
    }

    #[test]
    fn zero_end_time_gives_single_snapshot() {
        let g = Grid::uniform(-1.0, 1.0, 10).unwrap();
        let s = State::at_rest(vec![0.5; 10]).unwrap();
        let t = run(&g, &s, &example_model(), &SchemeConfig::default()).unwrap();
        assert_eq!(t.snapshots.len(), 1);
        assert_eq!(t.snapshots[0], s);
        assert_eq!(t.steps, 0);
    }

    #[test]
    fn snapshots_land_on_cadence() {
        let g = Grid::uniform(-5.0, 5.0, 20).unwrap();
        let s = solve_discrete_steady_state(&g, &example_model(), 1.0).unwrap();
        let cfg = SchemeConfig {
            t_end: 1.0,
            snapshot_every: Some(0.25),
            ..SchemeConfig::default()
        };
        let t = run(&g, &s, &example_model(), &cfg).unwrap();
        let times: Vec<f64> = t.snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(t.records.len(), 5);
    }

    #[test]
    fn refuses_llf_with_vacuum_law() {
        let m = FreeEnergyModel::new(PressureLaw::PowerLaw { m: 2.0 });
        assert!(SchemeConfig::default().validate(&m).is_err());
        let forced = SchemeConfig {
            force: true,
            ..SchemeConfig::default()
        };
        assert!(forced.validate(&m).is_ok());
        let g = Grid::uniform(0.0, 1.0, 4).unwrap();
        let s = State::at_rest(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            semidiscrete_rhs(&g, &s, &m, &forced),
            Err(Error::FluxVacuumMismatch { .. })
        ));
    }
}
