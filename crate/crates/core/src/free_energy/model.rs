use std::f64::consts::PI;

use super::pressure::PressureLaw;
use crate::convolution::{Convolver, DenseMatrix};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// External potential `V(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExternalPotential {
    None,
    /// `a x^2 / 2`
    Quadratic {
        a: f64,
    },
    /// `a x^4 - b x^2`
    DoubleWell {
        a: f64,
        b: f64,
    },
    /// `x^4 / 4 - c x^2 / 2`
    Quartic {
        c: f64,
    },
    /// Values at the cell centres.
    Custom(Vec<f64>),
}

impl ExternalPotential {
    pub fn eval(&self, x: f64) -> Option<f64> {
        match *self {
            ExternalPotential::None => Some(0.0),
            ExternalPotential::Quadratic { a } => Some(0.5 * a * x * x),
            ExternalPotential::DoubleWell { a, b } => Some(a * x.powi(4) - b * x * x),
            ExternalPotential::Quartic { c } => Some(0.25 * x.powi(4) - 0.5 * c * x * x),
            ExternalPotential::Custom(_) => None,
        }
    }

    pub fn values(&self, grid: &Grid) -> Result<Vec<f64>> {
        let v = match self {
            ExternalPotential::Custom(v) => {
                if v.len() != grid.len() {
                    return Err(Error::InvalidModel(format!(
                        "tabulated potential has {} values for {} cells",
                        v.len(),
                        grid.len()
                    )));
                }
                v.clone()
            }
            p => grid.centers().iter().map(|&x| p.eval(x).unwrap()).collect(),
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel("external potential is not finite".into()));
        }
        Ok(v)
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, ExternalPotential::Custom(_))
    }
}

/// Interaction kernel `W(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InteractionKernel {
    None,
    /// `x^2 / 2`
    Quadratic,
    /// `|x|^alpha / alpha`, or `ln |x|` at `alpha = 0`; needs `alpha > -1`.
    Homogeneous {
        alpha: f64,
    },
    /// `-exp(-x^2 / 2) / sqrt(2 pi)`
    Morse,
    /// Indicator of `|x| <= length / 2`.
    HardRodCharacteristic {
        length: f64,
    },
}

impl InteractionKernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InteractionKernel::Homogeneous { alpha } if !(alpha > -1.0 && alpha.is_finite()) => {
                Err(Error::InvalidModel(format!(
                    "homogeneous kernel needs alpha > -1 for local integrability, got {alpha}"
                )))
            }
            InteractionKernel::HardRodCharacteristic { length } if !(length > 0.0) => Err(Error::InvalidModel(
                format!("rod length must be positive, got {length}"),
            )),
            _ => Ok(()),
        }
    }

    /// Pointwise value; infinite at the origin for singular homogeneous kernels.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            InteractionKernel::None => 0.0,
            InteractionKernel::Quadratic => 0.5 * x * x,
            InteractionKernel::Homogeneous { alpha } => {
                if alpha == 0.0 {
                    x.abs().ln()
                } else {
                    x.abs().powf(alpha) / alpha
                }
            }
            InteractionKernel::Morse => -(-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            InteractionKernel::HardRodCharacteristic { length } => {
                if x.abs() <= 0.5 * length {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Kernels that are not smooth at the origin are replaced by their exact
    /// average over the source cell.
    pub fn is_cell_averaged(&self) -> bool {
        matches!(
            self,
            InteractionKernel::Homogeneous { .. } | InteractionKernel::HardRodCharacteristic { .. }
        )
    }

    /// Mean of `W` over `[d - width/2, d + width/2]`.
    pub fn cell_average(&self, d: f64, width: f64) -> f64 {
        let (lo, hi) = (d - 0.5 * width, d + 0.5 * width);
        match *self {
            InteractionKernel::Homogeneous { alpha } => {
                let anti = |y: f64| -> f64 {
                    if y == 0.0 {
                        0.0
                    } else if alpha == 0.0 {
                        y * (y.abs().ln() - 1.0)
                    } else {
                        y.signum() * y.abs().powf(alpha + 1.0) / (alpha * (alpha + 1.0))
                    }
                };
                (anti(hi) - anti(lo)) / width
            }
            InteractionKernel::HardRodCharacteristic { length } => {
                let r = 0.5 * length;
                (hi.min(r) - lo.max(-r)).max(0.0) / width
            }
            _ => self.eval(d),
        }
    }

    /// `W_ij` for target cell `i` and source cell `j`.
    pub fn entry(&self, grid: &Grid, i: usize, j: usize) -> f64 {
        let d = grid.centers()[i] - grid.centers()[j];
        if self.is_cell_averaged() {
            self.cell_average(d, grid.widths()[j])
        } else {
            self.eval(d)
        }
    }
}

/// Nonlinearity `K` applied to `W * rho` in the interaction energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nonlinearity {
    Identity,
    /// `ln(1 - c)`
    LogComplement,
}

impl Nonlinearity {
    pub fn eval(&self, c: f64) -> f64 {
        match self {
            Nonlinearity::Identity => c,
            Nonlinearity::LogComplement => (1.0 - c).ln(),
        }
    }

    pub fn derivative(&self, c: f64) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::LogComplement => -1.0 / (1.0 - c),
        }
    }
}

/// Free energy `F = int Pi(rho) + int V rho + 1/2 int K(W * rho) rho`.
///
/// A hard-rod characteristic kernel combined with [`Nonlinearity::LogComplement`]
/// selects the exact 1D hard-rod excess functional instead of the generic
/// `K` form.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyModel {
    pub pressure: PressureLaw,
    pub potential: ExternalPotential,
    pub kernel: InteractionKernel,
    pub nonlinearity: Nonlinearity,
}

impl FreeEnergyModel {
    pub fn new(pressure: PressureLaw) -> Self {
        FreeEnergyModel {
            pressure,
            potential: ExternalPotential::None,
            kernel: InteractionKernel::None,
            nonlinearity: Nonlinearity::Identity,
        }
    }

    pub fn with_potential(mut self, v: ExternalPotential) -> Self {
        self.potential = v;
        self
    }

    pub fn with_kernel(mut self, w: InteractionKernel) -> Self {
        self.kernel = w;
        self
    }

    pub fn with_nonlinearity(mut self, k: Nonlinearity) -> Self {
        self.nonlinearity = k;
        self
    }

    /// Hard rods of the given length with the ideal-gas pressure.
    pub fn hard_rods(length: f64, potential: ExternalPotential) -> Self {
        FreeEnergyModel::new(PressureLaw::IdealGas)
            .with_potential(potential)
            .with_kernel(InteractionKernel::HardRodCharacteristic { length })
            .with_nonlinearity(Nonlinearity::LogComplement)
    }

    pub fn rod_length(&self) -> Option<f64> {
        match (self.kernel, self.nonlinearity) {
            (InteractionKernel::HardRodCharacteristic { length }, Nonlinearity::LogComplement) => Some(length),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.pressure.validate()?;
        self.kernel.validate()?;
        if self.nonlinearity == Nonlinearity::LogComplement && self.kernel == InteractionKernel::None {
            return Err(Error::InvalidModel("a nonlinearity needs an interaction kernel".into()));
        }
        Ok(())
    }
}

/// Matrix of `W_ij`: point values for smooth kernels, exact cell averages
/// over the source cell for singular ones.
pub fn kernel_matrix(g: &Grid, w: InteractionKernel) -> Result<DenseMatrix> {
    if w == InteractionKernel::None {
        return Err(Error::InvalidModel("no interaction kernel".into()));
    }
    w.validate()?;
    Ok(DenseMatrix::from_fn(g.len(), |i, j| w.entry(g, i, j)))
}

pub(crate) fn kernel_convolver(g: &Grid, w: InteractionKernel) -> Convolver {
    let h = g.uniform_width().unwrap_or(0.0);
    let toe = move |d: isize| {
        let x = d as f64 * h;
        if w.is_cell_averaged() {
            w.cell_average(x, h)
        } else {
            w.eval(x)
        }
    };
    Convolver::new(g, |i, j| w.entry(g, i, j), Some(&toe))
}
