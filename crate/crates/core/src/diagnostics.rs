//! Energies, entropies, error norms and convergence orders.

use crate::error::{Error, Result};
use crate::free_energy::{FreeEnergyModel, PotentialOperator};
use crate::grid::{compensated_sum, total_mass, Grid, State, DEFAULT_EPS_VAC};
use crate::reconstruction::Communication;

/// Everything tracked about one state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub mass: f64,
    pub momentum: f64,
    pub kinetic: f64,
    pub free_energy: f64,
    pub total_energy: f64,
    pub center_of_mass: f64,
    /// `Pi'(rho_i) + H_i`, `None` on dry cells.
    pub variation: Vec<Option<f64>>,
    pub entropy: Vec<f64>,
}

/// Scalar part of a record, one per time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRecord {
    pub time: f64,
    pub mass: f64,
    pub momentum: f64,
    pub kinetic: f64,
    pub free_energy: f64,
    pub total_energy: f64,
    pub center_of_mass: f64,
    /// Right side of the energy identity; never positive.
    pub dissipation: f64,
}

pub fn discrete_free_energy(g: &Grid, s: &State, model: &FreeEnergyModel) -> Result<f64> {
    s.check_grid(g)?;
    PotentialOperator::new(g, model)?.free_energy(&s.rho)
}

/// `sum_i dx_i rho_i u_i^2 / 2`, with `u = 0` on dry cells.
pub fn kinetic_energy(g: &Grid, s: &State, eps_vac: f64) -> f64 {
    compensated_sum(g.widths().iter().zip(s.rho.iter().zip(&s.mom)).map(|(dx, (r, m))| {
        if *r > eps_vac {
            0.5 * dx * m * m / r
        } else {
            0.0
        }
    }))
}

pub fn total_energy(g: &Grid, s: &State, model: &FreeEnergyModel) -> Result<f64> {
    Ok(kinetic_energy(g, s, DEFAULT_EPS_VAC) + discrete_free_energy(g, s, model)?)
}

pub fn free_energy_variation(g: &Grid, s: &State, model: &FreeEnergyModel) -> Result<Vec<Option<f64>>> {
    s.check_grid(g)?;
    let op = PotentialOperator::new(g, model)?;
    variation_with(&op, &s.rho, DEFAULT_EPS_VAC)
}

pub(crate) fn variation_with(op: &PotentialOperator, rho: &[f64], eps_vac: f64) -> Result<Vec<Option<f64>>> {
    let law = op.pressure();
    let h = op.field(rho)?;
    Ok(rho
        .iter()
        .zip(&h)
        .map(|(r, hv)| (*r > eps_vac).then(|| law.pi_prime_unchecked(*r) + hv))
        .collect())
}

/// Densities below this fraction of the peak are left out of [`bulk_spread`].
pub const BULK_FLOOR: f64 = 1e-12;

/// [`variation_spread`] over the cells holding more than `floor` times the
/// peak density.
pub fn bulk_spread(rho: &[f64], variation: &[Option<f64>], floor: f64) -> f64 {
    let peak = rho.iter().copied().fold(0.0, f64::max);
    let kept: Vec<Option<f64>> = rho
        .iter()
        .zip(variation)
        .map(|(r, v)| if *r > floor * peak { *v } else { None })
        .collect();
    variation_spread(&kept)
}

/// Largest range of the variation over a connected piece of the support.
pub fn variation_spread(variation: &[Option<f64>]) -> f64 {
    let mut worst = 0.0f64;
    let mut range: Option<(f64, f64)> = None;
    for v in variation {
        match (v, range) {
            (Some(x), None) => range = Some((*x, *x)),
            (Some(x), Some((lo, hi))) => range = Some((lo.min(*x), hi.max(*x))),
            (None, Some((lo, hi))) => {
                worst = worst.max(hi - lo);
                range = None;
            }
            (None, None) => {}
        }
    }
    if let Some((lo, hi)) = range {
        worst = worst.max(hi - lo);
    }
    worst
}

/// `eta_i = Pi(rho_i) + rho_i u_i^2 / 2`.
pub fn entropy_field(g: &Grid, s: &State, model: &FreeEnergyModel) -> Result<Vec<f64>> {
    s.check_grid(g)?;
    Ok(entropy_with(model, s, DEFAULT_EPS_VAC))
}

fn entropy_with(model: &FreeEnergyModel, s: &State, eps_vac: f64) -> Vec<f64> {
    s.rho
        .iter()
        .zip(&s.mom)
        .map(|(r, m)| {
            if *r > eps_vac {
                model.pressure.pi_unchecked(*r) + 0.5 * m * m / r
            } else if *r > 0.0 {
                model.pressure.pi_unchecked(*r)
            } else {
                0.0
            }
        })
        .collect()
}

pub fn center_of_mass(g: &Grid, s: &State) -> Result<f64> {
    s.check_grid(g)?;
    let mass = total_mass(g, s);
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument("centre of mass of a state with no mass".into()));
    }
    let first = compensated_sum(
        g.widths()
            .iter()
            .zip(g.centers())
            .zip(&s.rho)
            .map(|((dx, x), r)| dx * x * r),
    );
    Ok(first / mass)
}

fn momentum_total(g: &Grid, s: &State) -> f64 {
    compensated_sum(g.widths().iter().zip(&s.mom).map(|(dx, m)| dx * m))
}

/// `-gamma sum dx rho u^2 - 1/2 sum sum dx_i dx_j psi_ij rho_i rho_j (u_i - u_j)^2`.
pub fn dissipation(g: &Grid, s: &State, gamma: f64, psi: Communication, eps_vac: f64) -> f64 {
    let u = s.velocity(eps_vac);
    let w = g.widths();
    let x = g.centers();
    let n = s.len();
    let linear = -gamma * compensated_sum((0..n).map(|i| w[i] * s.rho[i] * u[i] * u[i]));
    if psi.is_none() {
        return linear;
    }
    let mut pairs = 0.0;
    for i in 0..n {
        if s.rho[i] <= eps_vac {
            continue;
        }
        let mut row = 0.0;
        for j in 0..i {
            let du = u[i] - u[j];
            row += w[j] * psi.eval(x[i] - x[j]) * s.rho[j] * du * du;
        }
        pairs += w[i] * s.rho[i] * row;
    }
    linear - pairs
}

/// Full record, reusing a prepared operator.
pub(crate) fn record_with(
    g: &Grid,
    op: &PotentialOperator,
    model: &FreeEnergyModel,
    s: &State,
    eps_vac: f64,
) -> Result<DiagnosticsRecord> {
    let series = series_with(g, op, s, 0.0, Communication::None, eps_vac)?;
    Ok(DiagnosticsRecord {
        time: s.time,
        mass: series.mass,
        momentum: series.momentum,
        kinetic: series.kinetic,
        free_energy: series.free_energy,
        total_energy: series.total_energy,
        center_of_mass: series.center_of_mass,
        variation: variation_with(op, &s.rho, eps_vac)?,
        entropy: entropy_with(model, s, eps_vac),
    })
}

pub(crate) fn series_with(
    g: &Grid,
    op: &PotentialOperator,
    s: &State,
    gamma: f64,
    psi: Communication,
    eps_vac: f64,
) -> Result<SeriesRecord> {
    let kinetic = kinetic_energy(g, s, eps_vac);
    let free_energy = op.free_energy(&s.rho)?;
    Ok(SeriesRecord {
        time: s.time,
        mass: total_mass(g, s),
        momentum: momentum_total(g, s),
        kinetic,
        free_energy,
        total_energy: kinetic + free_energy,
        center_of_mass: center_of_mass(g, s).unwrap_or(f64::NAN),
        dissipation: dissipation(g, s, gamma, psi, eps_vac),
    })
}

pub fn diagnostics_record(g: &Grid, s: &State, model: &FreeEnergyModel) -> Result<DiagnosticsRecord> {
    s.check_grid(g)?;
    let op = PotentialOperator::new(g, model)?;
    record_with(g, &op, model, s, DEFAULT_EPS_VAC)
}

/// Block means of `fine` onto `cells` coarse cells.
pub fn coarsen(fine: &[f64], cells: usize) -> Result<Vec<f64>> {
    if cells == 0 || !fine.len().is_multiple_of(cells) {
        return Err(Error::IncompatibleGrids(format!(
            "{} cells do not coarsen onto {cells}",
            fine.len()
        )));
    }
    let k = fine.len() / cells;
    Ok(fine
        .chunks(k)
        .map(|c| compensated_sum(c.iter().copied()) / k as f64)
        .collect())
}

/// `sum_i dx_i |rho_i - rhobar_i|` against the block-averaged reference
/// density, optionally restricted to the masked cells.
pub fn l1_error(g: &Grid, s: &State, reference: &[f64], mask: Option<&[bool]>) -> Result<f64> {
    s.check_grid(g)?;
    let coarse = coarsen(reference, g.len())?;
    if let Some(m) = mask {
        if m.len() != g.len() {
            return Err(Error::IncompatibleGrids(format!(
                "mask has {} cells, grid {}",
                m.len(),
                g.len()
            )));
        }
    }
    Ok(compensated_sum(
        (0..g.len())
            .filter(|i| mask.is_none_or(|m| m[*i]))
            .map(|i| g.widths()[i] * (s.rho[i] - coarse[i]).abs()),
    ))
}

/// Cells where the reference exceeds `threshold` and lie more than `margin`
/// cells away from any cell that does not.
pub fn support_mask(reference: &[f64], threshold: f64, margin: usize) -> Vec<bool> {
    let n = reference.len();
    let wet: Vec<bool> = reference.iter().map(|r| *r > threshold).collect();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(margin);
            let hi = (i + margin).min(n - 1);
            (lo..=hi).all(|j| wet[j])
        })
        .collect()
}

/// `log2(e_k / e_{k+1})` for errors on successively halved meshes.
pub fn convergence_order(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::InvalidArgument("need at least two errors".into()));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::InvalidArgument(format!("errors must be positive, got {e}")));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_energy::{ExternalPotential, PressureLaw};
    use approx::assert_relative_eq;

    fn ideal() -> FreeEnergyModel {
        FreeEnergyModel::new(PressureLaw::IdealGas)
    }

    #[test]
    fn empty_state_has_no_energy() {
        let g = Grid::uniform(0.0, 1.0, 4).unwrap();
        let s = State::at_rest(vec![0.0; 4]).unwrap();
        assert_eq!(discrete_free_energy(&g, &s, &ideal()).unwrap(), 0.0);
        let law = PressureLaw::PowerLaw { m: 2.0 };
        assert_eq!(discrete_free_energy(&g, &s, &FreeEnergyModel::new(law)).unwrap(), 0.0);
        assert_eq!(entropy_field(&g, &s, &ideal()).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn hand_sums() {
        let g = Grid::uniform(0.0, 1.0, 2).unwrap();
        let s = State::at_rest(vec![1.0; 2]).unwrap();
        let m = ideal().with_potential(ExternalPotential::Custom(vec![2.0; 2]));
        assert_eq!(discrete_free_energy(&g, &s, &m).unwrap(), 1.0);
        let s = State::new(vec![1.0; 2], vec![2.0; 2]).unwrap();
        assert_eq!(total_energy(&g, &s, &ideal()).unwrap(), 1.0);
        assert_eq!(
            entropy_field(&g, &State::at_rest(vec![1.0; 2]).unwrap(), &ideal()).unwrap(),
            vec![-1.0; 2]
        );
        let law = PressureLaw::PowerLaw { m: 2.0 };
        let s = State::new(vec![2.0, 0.0], vec![2.0, 0.0]).unwrap();
        assert_eq!(
            entropy_field(&g, &s, &FreeEnergyModel::new(law)).unwrap(),
            vec![5.0, 0.0]
        );
    }

    #[test]
    fn uniform_variation_is_pi_prime() {
        let g = Grid::uniform(0.0, 1.0, 3).unwrap();
        let s = State::at_rest(vec![2.0; 3]).unwrap();
        let v = free_energy_variation(&g, &s, &ideal()).unwrap();
        assert!(v.iter().all(|x| *x == Some(2f64.ln())));
        let s = State::at_rest(vec![2.0, 0.0, 2.0]).unwrap();
        let law = PressureLaw::PowerLaw { m: 2.0 };
        let v = free_energy_variation(&g, &s, &FreeEnergyModel::new(law)).unwrap();
        assert_eq!(v[1], None);
    }

    #[test]
    fn spread_per_component() {
        let v = [Some(1.0), Some(1.0), None, Some(3.0), Some(3.5)];
        assert_eq!(variation_spread(&v), 0.5);
        assert_eq!(variation_spread(&[None, None]), 0.0);
    }

    #[test]
    fn centre_of_mass() {
        let g = Grid::uniform(-1.0, 1.0, 4).unwrap();
        let s = State::at_rest(vec![0.3, 1.0, 1.0, 0.3]).unwrap();
        assert!(center_of_mass(&g, &s).unwrap().abs() < 1e-14);
        let g = Grid::uniform(0.5, 1.5, 2).unwrap();
        assert_eq!(
            center_of_mass(&g, &State::at_rest(vec![2.0, 2.0]).unwrap()).unwrap(),
            1.0
        );
        let z = State::at_rest(vec![0.0; 2]).unwrap();
        assert!(center_of_mass(&g, &z).is_err());
    }

    #[test]
    fn errors_and_orders() {
        let g = Grid::uniform(0.0, 1.0, 2).unwrap();
        let s = State::at_rest(vec![1.0, 1.0]).unwrap();
        assert_eq!(l1_error(&g, &s, &s.rho, None).unwrap(), 0.0);
        assert_eq!(l1_error(&g, &s, &[1.5; 8], None).unwrap(), 0.5);
        assert_eq!(l1_error(&g, &s, &[1.5; 8], Some(&[true, false])).unwrap(), 0.25);
        assert!(l1_error(&g, &s, &[1.0; 5], None).is_err());
        let o = convergence_order(&[6.8797e-3, 3.4068e-3]).unwrap();
        assert!((o[0] - 1.01).abs() < 5e-3);
        let o = convergence_order(&[7.6166e-4, 2.0206e-4]).unwrap();
        assert!((o[0] - 1.91).abs() < 5e-3);
        assert_eq!(convergence_order(&[0.8, 0.2]).unwrap(), vec![2.0]);
        assert!(convergence_order(&[1.0]).is_err());
        assert!(convergence_order(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn coarsening_keeps_mass() {
        let fine: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let c = coarsen(&fine, 8).unwrap();
        assert_relative_eq!(
            c.iter().sum::<f64>() * 8.0,
            fine.iter().sum::<f64>(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn mask_stays_off_the_edge() {
        let r = [0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0];
        let m = support_mask(&r, 1e-3, 3);
        assert_eq!(m.iter().filter(|b| **b).count(), 1);
        assert!(m[5]);
    }

    #[test]
    fn dissipation_signs() {
        let g = Grid::uniform(-0.5, 1.5, 2).unwrap();
        let s = State::new(vec![1.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(dissipation(&g, &s, 1.0, Communication::None, 1e-12), -1.0);
        assert_eq!(dissipation(&g, &s, 0.0, Communication::Constant(1.0), 1e-12), -1.0);
    }
}
