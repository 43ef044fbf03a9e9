use super::hard_rods::HardRods;
use super::model::{kernel_convolver, FreeEnergyModel, InteractionKernel, Nonlinearity};
use super::pressure::PressureLaw;
use crate::convolution::Convolver;
use crate::error::{Error, Result};
use crate::grid::{weighted_sum, Grid, State};

#[derive(Debug, Clone)]
enum Interaction {
    None,
    Linear(Convolver),
    Nonlinear(Convolver, Nonlinearity),
    HardRods(HardRods),
}

/// Evaluates `H_i` and the discrete free energy for a fixed grid and model,
/// caching the kernel operator.
#[derive(Debug, Clone)]
pub struct PotentialOperator {
    grid: Grid,
    pressure: PressureLaw,
    external: Vec<f64>,
    interaction: Interaction,
}

impl PotentialOperator {
    pub fn new(grid: &Grid, model: &FreeEnergyModel) -> Result<Self> {
        model.validate()?;
        let external = model.potential.values(grid)?;
        let interaction = if let Some(length) = model.rod_length() {
            Interaction::HardRods(HardRods::new(grid, length))
        } else {
            match (model.kernel, model.nonlinearity) {
                (InteractionKernel::None, _) => Interaction::None,
                (w, Nonlinearity::Identity) => Interaction::Linear(kernel_convolver(grid, w)),
                (w, k) => Interaction::Nonlinear(kernel_convolver(grid, w), k),
            }
        };
        Ok(PotentialOperator {
            grid: grid.clone(),
            pressure: model.pressure,
            external,
            interaction,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn pressure(&self) -> PressureLaw {
        self.pressure
    }

    pub fn external(&self) -> &[f64] {
        &self.external
    }

    /// Whether `H` changes with the density.
    pub fn is_density_dependent(&self) -> bool {
        !matches!(self.interaction, Interaction::None)
    }

    /// `H_i = V_i + (dF_int / drho)_i`.
    pub fn field(&self, rho: &[f64]) -> Result<Vec<f64>> {
        self.check_len(rho)?;
        let mut h = self.interaction_variation(rho)?;
        for (hi, vi) in h.iter_mut().zip(&self.external) {
            *hi += vi;
        }
        Ok(h)
    }

    fn interaction_variation(&self, rho: &[f64]) -> Result<Vec<f64>> {
        match &self.interaction {
            Interaction::None => Ok(vec![0.0; rho.len()]),
            Interaction::Linear(w) => Ok(w.apply(rho)),
            // exact derivative of 1/2 sum_i dx_i rho_i K(c_i) for symmetric W
            Interaction::Nonlinear(w, k) => {
                let c = w.apply(rho);
                check_log_argument(*k, &c)?;
                let weighted: Vec<f64> = c.iter().zip(rho).map(|(ci, r)| k.derivative(*ci) * r).collect();
                let back = w.apply(&weighted);
                Ok(c.iter().zip(&back).map(|(ci, b)| 0.5 * k.eval(*ci) + 0.5 * b).collect())
            }
            Interaction::HardRods(r) => r.variation(&self.grid, rho),
        }
    }

    pub fn free_energy(&self, rho: &[f64]) -> Result<f64> {
        self.check_len(rho)?;
        let w = self.grid.widths();
        let local: f64 = w
            .iter()
            .zip(rho.iter().zip(&self.external))
            .map(|(dx, (r, v))| dx * (self.pressure.pi_unchecked(*r) + v * r))
            .sum();
        let nonlocal = match &self.interaction {
            Interaction::None => 0.0,
            Interaction::Linear(k) => 0.5 * weighted_sum(w, &mul(rho, &k.apply(rho))),
            Interaction::Nonlinear(k, nl) => {
                let c = k.apply(rho);
                check_log_argument(*nl, &c)?;
                let kc: Vec<f64> = c.iter().map(|x| nl.eval(*x)).collect();
                0.5 * weighted_sum(w, &mul(rho, &kc))
            }
            Interaction::HardRods(r) => r.excess_energy(&self.grid, rho)?,
        };
        Ok(local + nonlocal)
    }

    /// Per-cell factor multiplying the isothermal sound speed, for
    /// interactions that stiffen the pressure.
    pub fn speed_factor(&self, rho: &[f64]) -> Option<Vec<f64>> {
        match &self.interaction {
            Interaction::HardRods(r) => Some(r.speed_factor(rho)),
            _ => None,
        }
    }

    fn check_len(&self, rho: &[f64]) -> Result<()> {
        if rho.len() != self.grid.len() {
            return Err(Error::InvalidState(format!(
                "density has {} cells, grid {}",
                rho.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn check_log_argument(k: Nonlinearity, c: &[f64]) -> Result<()> {
    if k == Nonlinearity::LogComplement {
        if let Some(cell) = c.iter().position(|&x| x >= 1.0) {
            return Err(Error::Overpacked { cell, packing: c[cell] });
        }
    }
    Ok(())
}

/// Per-cell `H_i` for the given state.
pub fn potential_field(g: &Grid, s: &State, model: &FreeEnergyModel) -> Result<Vec<f64>> {
    s.check_grid(g)?;
    PotentialOperator::new(g, model)?.field(&s.rho)
}
