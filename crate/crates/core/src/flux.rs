//! Numerical fluxes for the isentropic Euler part `(rho u, rho u^2 + P)`.

use crate::error::{Error, Result};
use crate::free_energy::PressureLaw;
use crate::grid::{cell_velocity, State};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    /// Local Lax-Friedrichs.
    Llf,
    /// Kinetic flux with a flat Maxwellian on `|w| <= sqrt 3`.
    Kinetic,
}

/// How the kinetic time step bounds the propagation speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KineticCfl {
    /// Largest of the density-aware support speed `|u| + sqrt(3 P / rho)`
    /// and the fixed estimate `|u| + 3^((m-1)/4)`.
    #[default]
    Capped,
    /// Only the fixed estimate `|u| + 3^((m-1)/4)`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FaceFlux {
    pub mass: f64,
    pub momentum: f64,
}

impl std::ops::Add for FaceFlux {
    type Output = FaceFlux;

    fn add(self, o: FaceFlux) -> FaceFlux {
        FaceFlux {
            mass: self.mass + o.mass,
            momentum: self.momentum + o.momentum,
        }
    }
}

/// `F(U) = (rho u, rho u^2 + P(rho))`.
pub fn physical_flux(law: PressureLaw, rho: f64, mom: f64) -> FaceFlux {
    let u = if rho > 0.0 { mom / rho } else { 0.0 };
    FaceFlux {
        mass: mom,
        momentum: mom * u + law.pressure_unchecked(rho.max(0.0)),
    }
}

/// Local Lax-Friedrichs flux between `ul = (rho, rho u)` and `ur`.
pub fn llf_flux(ul: (f64, f64), ur: (f64, f64), law: PressureLaw) -> Result<FaceFlux> {
    for rho in [ul.0, ur.0] {
        if rho < 0.0 {
            return Err(Error::NegativeDensity {
                value: rho,
                op: "llf_flux",
            });
        }
        if law.forms_vacuum() && rho <= crate::grid::DEFAULT_EPS_VAC {
            return Err(Error::FluxVacuumMismatch { density: rho });
        }
    }
    Ok(llf_face(law, ul.0, ul.1, ur.0, ur.1, 1.0))
}

/// `scale` multiplies the sound speed in the dissipation coefficient.
#[inline]
pub(crate) fn llf_face(law: PressureLaw, rl: f64, ml: f64, rr: f64, mr: f64, scale: f64) -> FaceFlux {
    let fl = physical_flux(law, rl, ml);
    let fr = physical_flux(law, rr, mr);
    let speed = |r: f64, m: f64| {
        let u = if r > 0.0 { m / r } else { 0.0 };
        u.abs() + scale * law.pressure_derivative(r).sqrt()
    };
    let lambda = speed(rl, ml).max(speed(rr, mr));
    FaceFlux {
        mass: 0.5 * (fl.mass + fr.mass - lambda * (rr - rl)),
        momentum: 0.5 * (fl.momentum + fr.momentum - lambda * (mr - ml)),
    }
}

/// Kinetic flux `A_-(ul) + A_+(ur)`.
pub fn kinetic_flux(ul: (f64, f64), ur: (f64, f64), law: PressureLaw) -> FaceFlux {
    let (right_moving, _) = kinetic_half_fluxes(law, ul.0, velocity_of(ul));
    let (_, left_moving) = kinetic_half_fluxes(law, ur.0, velocity_of(ur));
    right_moving + left_moving
}

fn velocity_of(u: (f64, f64)) -> f64 {
    cell_velocity(u.0, u.1, 0.0)
}

/// `(A_-, A_+)`: the moments `int xi (1, xi) M` over `xi >= 0` and `xi <= 0`
/// for a flat Maxwellian of density `rho`, mean `u` and thermal speed
/// `c = sqrt(P / rho)`, supported on `[u - sqrt 3 c, u + sqrt 3 c]`.
pub fn kinetic_half_fluxes(law: PressureLaw, rho: f64, u: f64) -> (FaceFlux, FaceFlux) {
    if !(rho > 0.0) {
        return (FaceFlux::default(), FaceFlux::default());
    }
    let c = law.thermal_speed_squared(rho).sqrt();
    let s = SQRT3 * c;
    let k = rho / (2.0 * s);
    let (lo, hi) = (u - s, u + s);
    let moments = |a: f64, b: f64| FaceFlux {
        mass: k * (b * b - a * a) / 2.0,
        momentum: k * (b * b * b - a * a * a) / 3.0,
    };
    (moments(lo.max(0.0), hi.max(0.0)), moments(lo.min(0.0), hi.min(0.0)))
}

/// Fastest signal speed over the cells of `s`; dry cells are skipped.
pub fn max_wave_speed(s: &State, law: PressureLaw, flux: FluxKind, eps_vac: f64) -> f64 {
    max_speed_scaled(&s.rho, &s.mom, law, flux, KineticCfl::Capped, eps_vac, None)
}

pub(crate) fn max_speed_scaled(
    rho: &[f64],
    mom: &[f64],
    law: PressureLaw,
    flux: FluxKind,
    kinetic: KineticCfl,
    eps_vac: f64,
    scale: Option<&[f64]>,
) -> f64 {
    let fixed = match law {
        PressureLaw::PowerLaw { m } => 3f64.powf((m - 1.0) / 4.0),
        _ => SQRT3 * law.thermal_speed_squared(1.0).sqrt(),
    };
    let mut best = 0.0f64;
    for i in 0..rho.len() {
        let r = rho[i];
        if r <= eps_vac {
            continue;
        }
        let u = (mom[i] / r).abs();
        let f = scale.map_or(1.0, |s| s[i]);
        let v = match flux {
            FluxKind::Llf => u + f * law.pressure_derivative(r).sqrt(),
            FluxKind::Kinetic => {
                let support = u + f * SQRT3 * law.thermal_speed_squared(r).sqrt();
                match kinetic {
                    KineticCfl::Capped => support.max(u + fixed),
                    KineticCfl::Fixed => u + fixed,
                }
            }
        };
        best = best.max(v);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn llf_consistency() {
        let f = llf_flux((1.0, 0.0), (1.0, 0.0), PressureLaw::IdealGas).unwrap();
        assert_eq!(
            f,
            FaceFlux {
                mass: 0.0,
                momentum: 1.0
            }
        );
        let law = PressureLaw::PowerLaw { m: 1.5 };
        let u = (0.7, -0.3);
        let f = llf_flux(u, u, law).unwrap();
        let exact = physical_flux(law, u.0, u.1);
        assert_relative_eq!(f.mass, exact.mass, max_relative = 1e-15);
        assert_relative_eq!(f.momentum, exact.momentum, max_relative = 1e-15);
    }

    /// F(UL) = (1, 2), F(UR) = (-1, 2), lambda = 2, UR - UL = (0, -2):
    /// the mass fluxes cancel and the dissipation adds 2 to the momentum flux.
    #[test]
    fn llf_opposing_streams() {
        let f = llf_flux((1.0, 1.0), (1.0, -1.0), PressureLaw::IdealGas).unwrap();
        assert_eq!(f.mass, 0.0);
        assert_eq!(f.momentum, 4.0);
    }

    #[test]
    fn llf_refuses_vacuum_with_power_law() {
        let law = PressureLaw::PowerLaw { m: 2.0 };
        assert!(matches!(
            llf_flux((0.0, 0.0), (1.0, 0.0), law),
            Err(Error::FluxVacuumMismatch { .. })
        ));
    }

    #[test]
    fn kinetic_half_moments_at_rest() {
        let law = PressureLaw::PowerLaw { m: 2.0 };
        let (am, ap) = kinetic_half_fluxes(law, 1.0, 0.0);
        assert_relative_eq!(am.mass, 3f64.sqrt() / 4.0, max_relative = 1e-15);
        assert_relative_eq!(am.momentum, 0.5, max_relative = 1e-15);
        assert_relative_eq!(ap.mass, -(3f64.sqrt()) / 4.0, max_relative = 1e-15);
        assert_relative_eq!(ap.momentum, 0.5, max_relative = 1e-15);
        let f = kinetic_flux((1.0, 0.0), (1.0, 0.0), law);
        assert!(f.mass.abs() < 1e-16);
        assert_relative_eq!(f.momentum, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn kinetic_vacuum_and_supersonic() {
        let law = PressureLaw::PowerLaw { m: 2.0 };
        assert_eq!(kinetic_flux((0.0, 0.0), (0.0, 0.0), law), FaceFlux::default());
        let (rho, u) = (0.5, 3.0);
        let (am, ap) = kinetic_half_fluxes(law, rho, u);
        let f = physical_flux(law, rho, rho * u);
        assert_relative_eq!(am.mass, f.mass, max_relative = 1e-14);
        assert_relative_eq!(am.momentum, f.momentum, max_relative = 1e-14);
        assert_eq!(ap, FaceFlux::default());
    }

    #[test]
    fn wave_speeds() {
        let s = State::at_rest(vec![1.0; 4]).unwrap();
        assert_eq!(max_wave_speed(&s, PressureLaw::IdealGas, FluxKind::Llf, 1e-12), 1.0);
        let s = State::new(vec![1.0; 4], vec![2.0; 4]).unwrap();
        let law = PressureLaw::PowerLaw { m: 2.0 };
        assert_relative_eq!(
            max_wave_speed(&s, law, FluxKind::Kinetic, 1e-12),
            2.0 + 3f64.sqrt(),
            max_relative = 1e-15
        );
        let z = State::at_rest(vec![0.0; 4]).unwrap();
        assert_eq!(max_wave_speed(&z, law, FluxKind::Kinetic, 1e-12), 0.0);
        assert_eq!(max_wave_speed(&z, PressureLaw::IdealGas, FluxKind::Llf, 1e-12), 0.0);
    }
}
