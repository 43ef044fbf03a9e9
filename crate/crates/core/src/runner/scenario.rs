//! Turning a scenario configuration into grids and initial states.

use std::path::{Path, PathBuf};

use super::config::{parse_config, ExactSolution, MomentumProfile, Profile, ScenarioConfig};
use crate::error::{Error, Result};
use crate::free_energy::solve_discrete_steady_state;
use crate::grid::{total_mass, Grid, State};
use crate::integrator::run;

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// A configuration together with the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl Scenario {
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config = super::config::parse_config_with(&text, overrides)?;
        Ok(Scenario {
            config,
            base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn from_config(config: ScenarioConfig) -> Self {
        Scenario {
            config,
            base_dir: PathBuf::new(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        self.config.grid.build()
    }

    pub fn initial_state(&self, g: &Grid) -> Result<State> {
        initial_state(&self.config, g, &self.base_dir)
    }
}

/// Five-point Gauss-Legendre cell averages of `f`.
pub fn cell_averages(g: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    g.faces()
        .windows(2)
        .map(|w| {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            0.5 * GAUSS_NODES
                .iter()
                .zip(GAUSS_WEIGHTS)
                .map(|(x, wt)| wt * f(mid + half * x))
                .sum::<f64>()
        })
        .collect()
}

/// Unnormalised analytic density of a profile, if it has one.
pub fn profile_density(p: &Profile) -> Option<Box<dyn Fn(f64) -> f64 + '_>> {
    match p {
        Profile::Cosine {
            offset,
            amplitude,
            period,
        } => Some(Box::new(move |x: f64| {
            offset + amplitude * (std::f64::consts::PI * x / period).cos()
        })),
        Profile::Gaussians {
            offset,
            centers,
            variances,
            weights,
        } => Some(Box::new(move |x: f64| {
            offset
                + centers
                    .iter()
                    .zip(variances)
                    .zip(weights)
                    .map(|((c, v), w)| w * (-(x - c) * (x - c) / (2.0 * v)).exp())
                    .sum::<f64>()
        })),
        _ => None,
    }
}

fn normalised(g: &Grid, avg: Vec<f64>, mass: f64) -> Result<(Vec<f64>, f64)> {
    if let Some(i) = avg.iter().position(|r| !(*r >= 0.0)) {
        return Err(Error::InvalidState(format!("initial density is negative at cell {i}")));
    }
    let total: f64 = avg.iter().zip(g.widths()).map(|(r, w)| r * w).sum();
    if !(total > 0.0) {
        return Err(Error::InvalidState("initial density has no mass".into()));
    }
    let scale = mass / total;
    Ok((avg.into_iter().map(|r| r * scale).collect(), scale))
}

fn momentum_for(g: &Grid, rho: &[f64], m: MomentumProfile) -> Vec<f64> {
    match m {
        MomentumProfile::Zero => vec![0.0; rho.len()],
        MomentumProfile::Sine { amplitude, period } => {
            cell_averages(g, |x| amplitude * (std::f64::consts::PI * x / period).sin())
        }
        MomentumProfile::Velocity(v) => rho.iter().map(|r| r * v).collect(),
    }
}

pub fn initial_state(cfg: &ScenarioConfig, g: &Grid, base: &Path) -> Result<State> {
    let ic = &cfg.initial;
    let rho = match &ic.profile {
        Profile::Steady => solve_discrete_steady_state(g, &cfg.model, ic.mass)?.rho,
        Profile::File(p) => read_snapshot(&base.join(p), g)?.rho,
        Profile::Chain(p) => {
            let path = base.join(p);
            let text = std::fs::read_to_string(&path)?;
            let source = parse_config(&text)?;
            let sg = source.grid.build()?;
            if sg.len() != g.len() || sg.faces() != g.faces() {
                return Err(Error::IncompatibleGrids(format!(
                    "chained scenario {} uses a different grid",
                    path.display()
                )));
            }
            let s0 = initial_state(&source, &sg, path.parent().unwrap_or(Path::new("")))?;
            let t = run(&sg, &s0, &source.model, &quiet(&source))?;
            let last = t.last().clone();
            let mass = total_mass(g, &last);
            last.rho.into_iter().map(|r| r * ic.mass / mass).collect()
        }
        p => {
            let f = profile_density(p).expect("analytic profile");
            normalised(g, cell_averages(g, f), ic.mass)?.0
        }
    };
    let mom = momentum_for(g, &rho, ic.momentum);
    State::new(rho, mom)
}

fn quiet(cfg: &ScenarioConfig) -> crate::integrator::SchemeConfig {
    crate::integrator::SchemeConfig {
        diagnostics: false,
        snapshot_every: None,
        ..cfg.scheme.clone()
    }
}

/// Exact density at time `t`, when the scenario declares one.
pub fn exact_density(cfg: &ScenarioConfig, g: &Grid, t: f64) -> Result<Option<Vec<f64>>> {
    if cfg.initial.exact == ExactSolution::None {
        return Ok(None);
    }
    let f = profile_density(&cfg.initial.profile)
        .ok_or_else(|| Error::InvalidArgument("a travelling exact solution needs an analytic profile".into()))?;
    let v = match cfg.initial.momentum {
        MomentumProfile::Velocity(v) => v,
        _ => {
            return Err(Error::InvalidArgument(
                "a travelling exact solution needs a constant velocity".into(),
            ))
        }
    };
    let (_, scale) = normalised(g, cell_averages(g, &f), cfg.initial.mass)?;
    Ok(Some(cell_averages(g, |x| scale * f(x - v * t))))
}

/// Reads the `rho` and `momentum` columns of a snapshot CSV.
pub fn read_snapshot(path: &Path, g: &Grid) -> Result<State> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidState(format!("{} has no `{name}` column", path.display())))
    };
    let (ri, mi) = (col("rho")?, col("momentum")?);
    let mut rho = Vec::new();
    let mut mom = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::InvalidState(format!("bad number in {}", path.display())))
        };
        rho.push(num(ri)?);
        mom.push(num(mi)?);
    }
    if rho.len() != g.len() {
        return Err(Error::IncompatibleGrids(format!(
            "{} holds {} cells, grid has {}",
            path.display(),
            rho.len(),
            g.len()
        )));
    }
    State::new(rho, mom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_uniform_grid;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let g = make_uniform_grid(0.0, 3.0, 3).unwrap();
        let avg = cell_averages(&g, |x| x.powi(9));
        assert!((avg[2] - (3f64.powi(10) - 2f64.powi(10)) / 10.0).abs() < 1e-9);
    }

    #[test]
    fn cosine_profile_has_unit_mass() {
        let g = make_uniform_grid(-5.0, 5.0, 400).unwrap();
        let p = Profile::Cosine {
            offset: 0.2,
            amplitude: 5.0,
            period: 10.0,
        };
        let f = profile_density(&p).unwrap();
        let (rho, scale) = normalised(&g, cell_averages(&g, f), 1.0).unwrap();
        let analytic = 1.0 / (0.2 * 10.0 + 5.0 * 20.0 / std::f64::consts::PI);
        assert!((scale - analytic).abs() / analytic < 1e-12);
        let total: f64 = rho.iter().sum::<f64>() * 10.0 / 400.0;
        assert!((total - 1.0).abs() < 1e-12);
    }
}
