//! Exact excess free energy of a 1D hard-rod fluid.
//!
//! With `eta(x)` the mass within `[x - s/2, x + s/2]` and
//! `n0(x) = (rho(x + s/2) + rho(x - s/2)) / 2`, the excess energy is
//! `-int n0 ln(1 - eta)` and its variation is
//! `-ln(1 - int_{x-s}^{x} rho) / 2 - ln(1 - int_{x}^{x+s} rho) / 2 + int_{x-s/2}^{x+s/2} n0 / (1 - eta)`.

use super::model::{kernel_convolver, InteractionKernel};
use crate::convolution::Convolver;
use crate::error::{Error, Result};
use crate::grid::{Grid, State};

#[derive(Debug, Clone)]
pub(crate) struct HardRods {
    length: f64,
    overlap: Convolver,
}

impl HardRods {
    pub(crate) fn new(grid: &Grid, length: f64) -> Self {
        HardRods {
            length,
            overlap: kernel_convolver(grid, InteractionKernel::HardRodCharacteristic { length }),
        }
    }

    pub(crate) fn packing(&self, rho: &[f64]) -> Vec<f64> {
        self.overlap.apply(rho)
    }

    fn checked_packing(&self, rho: &[f64]) -> Result<Vec<f64>> {
        let eta = self.packing(rho);
        match eta.iter().position(|&e| e >= 1.0) {
            Some(cell) => Err(Error::Overpacked {
                cell,
                packing: eta[cell],
            }),
            None => Ok(eta),
        }
    }

    /// `n0` sampled at the cell centres.
    fn contact_density(&self, grid: &Grid, rho: &[f64]) -> Vec<f64> {
        let half = 0.5 * self.length;
        grid.centers()
            .iter()
            .map(|&x| 0.5 * (interpolate(grid, rho, x + half) + interpolate(grid, rho, x - half)))
            .collect()
    }

    pub(crate) fn variation(&self, grid: &Grid, rho: &[f64]) -> Result<Vec<f64>> {
        let eta = self.checked_packing(rho)?;
        let n0 = self.contact_density(grid, rho);
        let ratio: Vec<f64> = n0.iter().zip(&eta).map(|(n, e)| n / (1.0 - e)).collect();
        let smeared = self.overlap.apply(&ratio);
        let cum = CumulativeMass::new(grid, rho);
        let s = self.length;
        let mut out = Vec::with_capacity(rho.len());
        for (i, &x) in grid.centers().iter().enumerate() {
            let here = cum.at(x);
            let behind = here - cum.at(x - s);
            let ahead = cum.at(x + s) - here;
            if behind >= 1.0 || ahead >= 1.0 {
                return Err(Error::Overpacked {
                    cell: i,
                    packing: behind.max(ahead),
                });
            }
            out.push(-0.5 * (1.0 - behind).ln() - 0.5 * (1.0 - ahead).ln() + smeared[i]);
        }
        Ok(out)
    }

    pub(crate) fn excess_energy(&self, grid: &Grid, rho: &[f64]) -> Result<f64> {
        let eta = self.checked_packing(rho)?;
        let n0 = self.contact_density(grid, rho);
        Ok(grid
            .widths()
            .iter()
            .zip(n0.iter().zip(&eta))
            .map(|(dx, (n, e))| -dx * n * (1.0 - e).ln())
            .sum())
    }

    /// `1 / (1 - eta)`, the hard-rod enhancement of the isothermal sound speed.
    pub(crate) fn speed_factor(&self, rho: &[f64]) -> Vec<f64> {
        self.packing(rho)
            .into_iter()
            .map(|e| 1.0 / (1.0 - e.clamp(0.0, 0.999)))
            .collect()
    }
}

/// Piecewise-linear density through the cell centres, held constant out to
/// the walls and zero beyond them.
fn interpolate(grid: &Grid, rho: &[f64], x: f64) -> f64 {
    let c = grid.centers();
    let n = c.len();
    if x < grid.lower() || x > grid.upper() {
        return 0.0;
    }
    if x <= c[0] {
        return rho[0];
    }
    if x >= c[n - 1] {
        return rho[n - 1];
    }
    let j = c.partition_point(|&ci| ci <= x).clamp(1, n - 1);
    let t = (x - c[j - 1]) / (c[j] - c[j - 1]);
    rho[j - 1] + t * (rho[j] - rho[j - 1])
}

/// `R(x) = int_{-inf}^{x} rho`.
struct CumulativeMass<'a> {
    grid: &'a Grid,
    rho: &'a [f64],
    cum: Vec<f64>,
}

impl<'a> CumulativeMass<'a> {
    fn new(grid: &'a Grid, rho: &'a [f64]) -> Self {
        let mut cum = Vec::with_capacity(rho.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for (dx, r) in grid.widths().iter().zip(rho) {
            acc += dx * r;
            cum.push(acc);
        }
        CumulativeMass { grid, rho, cum }
    }

    fn at(&self, x: f64) -> f64 {
        if x <= self.grid.lower() {
            return 0.0;
        }
        if x >= self.grid.upper() {
            return self.cum[self.rho.len()];
        }
        let i = self.grid.locate(x).unwrap();
        self.cum[i] + (x - self.grid.faces()[i]) * self.rho[i]
    }
}

/// Mass within one rod length around each cell centre.
pub fn packing_fraction(g: &Grid, s: &State, rod_length: f64) -> Result<Vec<f64>> {
    if !(rod_length > 0.0) {
        return Err(Error::InvalidModel(format!(
            "rod length must be positive, got {rod_length}"
        )));
    }
    s.check_grid(g)?;
    Ok(HardRods::new(g, rod_length).packing(&s.rho))
}
