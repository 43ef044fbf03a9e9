use crate::error::{Error, Result};

/// Pressure law `P` together with its internal energy density `Pi`, linked by
/// `rho Pi''(rho) = P'(rho)`.
///
/// | law              | `P`        | `Pi`                  | `Pi'`                     |
/// |------------------|------------|-----------------------|---------------------------|
/// | `IdealGas`       | `rho`      | `rho (ln rho - 1)`    | `ln rho`                  |
/// | `PowerLaw(m)`    | `rho^m`    | `rho^m / (m - 1)`     | `m rho^(m-1) / (m - 1)`   |
/// | `ScaledIdeal(s)` | `s rho`    | `s rho (ln rho - 1)`  | `s ln rho`                |
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PressureLaw {
    IdealGas,
    PowerLaw { m: f64 },
    ScaledIdeal { sigma: f64 },
}

impl PressureLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PressureLaw::IdealGas => Ok(()),
            PressureLaw::PowerLaw { m } if m.is_finite() && m > 1.0 => Ok(()),
            PressureLaw::PowerLaw { m } => Err(Error::InvalidModel(format!(
                "power-law exponent must exceed 1, got {m}"
            ))),
            PressureLaw::ScaledIdeal { sigma } if sigma.is_finite() && sigma > 0.0 => Ok(()),
            PressureLaw::ScaledIdeal { sigma } => Err(Error::InvalidModel(format!(
                "noise parameter must be positive (hyperbolicity is lost at 0), got {sigma}"
            ))),
        }
    }

    /// Whether compactly supported states (dry cells) can form.
    pub fn forms_vacuum(&self) -> bool {
        matches!(self, PressureLaw::PowerLaw { .. })
    }

    /// `inf Pi'` over positive densities, when finite.
    pub fn chemical_potential_floor(&self) -> Option<f64> {
        match self {
            PressureLaw::PowerLaw { .. } => Some(0.0),
            _ => None,
        }
    }

    pub fn pi(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho, "pi")?;
        Ok(self.pi_unchecked(rho))
    }

    pub fn pi_prime(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::NonPositiveDensity(rho));
        }
        Ok(self.pi_prime_unchecked(rho))
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho, "pressure")?;
        Ok(self.pressure_unchecked(rho))
    }

    #[inline]
    pub(crate) fn pi_unchecked(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::IdealGas => xlogx_minus_x(rho),
            PressureLaw::PowerLaw { m } => pow(rho, m) / (m - 1.0),
            PressureLaw::ScaledIdeal { sigma } => sigma * xlogx_minus_x(rho),
        }
    }

    #[inline]
    pub(crate) fn pi_prime_unchecked(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::IdealGas => rho.ln(),
            PressureLaw::PowerLaw { m } => m * pow(rho, m - 1.0) / (m - 1.0),
            PressureLaw::ScaledIdeal { sigma } => sigma * rho.ln(),
        }
    }

    #[inline]
    pub(crate) fn pressure_unchecked(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::IdealGas => rho,
            PressureLaw::PowerLaw { m } => pow(rho, m),
            PressureLaw::ScaledIdeal { sigma } => sigma * rho,
        }
    }

    /// Inverse of `Pi'`, extended by zero outside its range.
    #[inline]
    pub fn xi(&self, s: f64) -> f64 {
        match *self {
            PressureLaw::IdealGas => s.exp(),
            PressureLaw::PowerLaw { m } => {
                if s > 0.0 {
                    pow((m - 1.0) * s / m, 1.0 / (m - 1.0))
                } else {
                    0.0
                }
            }
            PressureLaw::ScaledIdeal { sigma } => (s / sigma).exp(),
        }
    }

    /// `P'(rho)`.
    #[inline]
    pub fn pressure_derivative(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::IdealGas => 1.0,
            PressureLaw::PowerLaw { m } => m * pow(rho.max(0.0), m - 1.0),
            PressureLaw::ScaledIdeal { sigma } => sigma,
        }
    }

    /// `P(rho) / rho`, the squared thermal speed of the kinetic representation.
    #[inline]
    pub fn thermal_speed_squared(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::IdealGas => 1.0,
            PressureLaw::PowerLaw { m } => pow(rho.max(0.0), m - 1.0),
            PressureLaw::ScaledIdeal { sigma } => sigma,
        }
    }
}

/// `x^p` for `x >= 0`, skipping the general routine for common exponents.
#[inline]
fn pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else if p == 0.5 {
        x.sqrt()
    } else if p == 3.0 {
        x * x * x
    } else if p == 1.5 {
        x * x.sqrt()
    } else {
        x.powf(p)
    }
}

#[inline]
fn xlogx_minus_x(rho: f64) -> f64 {
    if rho > 0.0 {
        rho * (rho.ln() - 1.0)
    } else {
        0.0
    }
}

fn check_nonnegative(rho: f64, op: &'static str) -> Result<()> {
    if rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeDensity { value: rho, op })
    }
}

pub fn pi(law: PressureLaw, rho: f64) -> Result<f64> {
    law.pi(rho)
}

pub fn pi_prime(law: PressureLaw, rho: f64) -> Result<f64> {
    law.pi_prime(rho)
}

pub fn xi(law: PressureLaw, s: f64) -> f64 {
    law.xi(s)
}

pub fn pressure(law: PressureLaw, rho: f64) -> Result<f64> {
    law.pressure(rho)
}
