use proptest::prelude::*;

use wbfe::diagnostics::dissipation;
use wbfe::flux::{kinetic_flux, kinetic_half_fluxes, llf_flux, physical_flux, FluxKind};
use wbfe::free_energy::{ExternalPotential, FreeEnergyModel, InteractionKernel, PressureLaw};
use wbfe::grid::{Grid, State};
use wbfe::integrator::{cfl_dt, semidiscrete_rhs, ssp_rk3_step, Order, SchemeConfig};
use wbfe::reconstruction::Communication;

const EXPONENTS: [f64; 4] = [1.3, 1.5, 2.0, 3.0];

fn law() -> impl Strategy<Value = PressureLaw> {
    prop_oneof![
        Just(PressureLaw::IdealGas),
        prop::sample::select(EXPONENTS.to_vec()).prop_map(|m| PressureLaw::PowerLaw { m }),
        (1e-3f64..5.0).prop_map(|sigma| PressureLaw::ScaledIdeal { sigma }),
    ]
}

/// Composite Simpson over `[a, b]`; exact for the cubic moments of a flat
/// Maxwellian once the support is split at the origin.
fn simpson(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = 200;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

fn moments_by_quadrature(m: f64, rho: f64, u: f64, positive: bool) -> (f64, f64) {
    let c = rho.powf((m - 1.0) / 2.0);
    let half = 3f64.sqrt() * c;
    let height = rho / (2.0 * half);
    let (lo, hi) = (u - half, u + half);
    let (a, b) = if positive {
        (lo.max(0.0), hi.max(0.0))
    } else {
        (lo.min(0.0), hi.min(0.0))
    };
    if b <= a {
        return (0.0, 0.0);
    }
    (simpson(a, b, |v| v * height), simpson(a, b, |v| v * v * height))
}

fn random_density(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..2.0, n)
}

proptest! {
    #[test]
    fn xi_inverts_pi_prime(law in law(), e in -6.0f64..6.0) {
        let rho = 10f64.powf(e);
        let back = law.xi(law.pi_prime(rho).unwrap());
        prop_assert!((back - rho).abs() <= 1e-12 * rho, "{law:?}: {rho} -> {back}");
    }

    #[test]
    fn xi_vanishes_below_the_floor(m in prop::sample::select(EXPONENTS.to_vec()), s in -50.0f64..=0.0) {
        prop_assert_eq!(PressureLaw::PowerLaw { m }.xi(s), 0.0);
    }

    #[test]
    fn kinetic_half_fluxes_sum_to_the_physical_flux(
        m in prop::sample::select(EXPONENTS.to_vec()),
        rho in 1e-4f64..10.0,
        u in -5.0f64..5.0,
    ) {
        let law = PressureLaw::PowerLaw { m };
        let (plus, minus) = kinetic_half_fluxes(law, rho, u);
        let f = physical_flux(law, rho, rho * u);
        let sum = plus + minus;
        let scale = 1.0 + f.mass.abs() + f.momentum.abs();
        prop_assert!((sum.mass - f.mass).abs() <= 1e-12 * scale);
        prop_assert!((sum.momentum - f.momentum).abs() <= 1e-12 * scale);
        let q_plus = moments_by_quadrature(m, rho, u, true);
        let q_minus = moments_by_quadrature(m, rho, u, false);
        prop_assert!((plus.mass - q_plus.0).abs() <= 1e-8 * scale);
        prop_assert!((plus.momentum - q_plus.1).abs() <= 1e-8 * scale);
        prop_assert!((minus.mass - q_minus.0).abs() <= 1e-8 * scale);
        prop_assert!((minus.momentum - q_minus.1).abs() <= 1e-8 * scale);
    }

    #[test]
    fn numerical_fluxes_are_consistent(law in law(), rho in 1e-3f64..10.0, u in -5.0f64..5.0) {
        let f = physical_flux(law, rho, rho * u);
        let scale = 1.0 + f.mass.abs() + f.momentum.abs();
        let k = kinetic_flux((rho, rho * u), (rho, rho * u), law);
        prop_assert!((k.mass - f.mass).abs() <= 1e-12 * scale);
        prop_assert!((k.momentum - f.momentum).abs() <= 1e-12 * scale);
        if !law.forms_vacuum() || rho > 1e-2 {
            let l = llf_flux((rho, rho * u), (rho, rho * u), law).unwrap();
            prop_assert!((l.mass - f.mass).abs() <= 1e-12 * scale);
            prop_assert!((l.momentum - f.momentum).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn interior_fluxes_telescope(
        rho in random_density(24),
        mom in prop::collection::vec(-0.5f64..0.5, 24),
        second in any::<bool>(),
    ) {
        let g = Grid::uniform(-3.0, 3.0, 24).unwrap();
        let model = FreeEnergyModel::new(PressureLaw::IdealGas)
            .with_potential(ExternalPotential::Quadratic { a: 1.0 })
            .with_kernel(InteractionKernel::Quadratic);
        let cfg = SchemeConfig { order: if second { Order::Second } else { Order::First }, ..Default::default() };
        let s = State::new(rho, mom).unwrap();
        let r = semidiscrete_rhs(&g, &s, &model, &cfg).unwrap();
        let total: f64 = r.rho.iter().zip(g.widths()).map(|(d, w)| d * w).sum();
        prop_assert!(total.abs() <= 1e-13 * (1.0 + r.max_abs()));
    }

    #[test]
    fn mirrored_states_have_mirrored_rates(
        half in random_density(12),
        mhalf in prop::collection::vec(-0.5f64..0.5, 12),
        second in any::<bool>(),
    ) {
        let g = Grid::uniform(-3.0, 3.0, 24).unwrap();
        let model = FreeEnergyModel::new(PressureLaw::IdealGas)
            .with_potential(ExternalPotential::Quadratic { a: 1.0 })
            .with_kernel(InteractionKernel::Quadratic);
        let cfg = SchemeConfig {
            order: if second { Order::Second } else { Order::First },
            psi: Communication::Standard,
            ..Default::default()
        };
        let rho: Vec<f64> = half.iter().rev().chain(&half).copied().collect();
        let mom: Vec<f64> = mhalf.iter().rev().map(|m| -m).chain(mhalf.iter().copied()).collect();
        let r = semidiscrete_rhs(&g, &State::new(rho, mom).unwrap(), &model, &cfg).unwrap();
        let tol = 1e-12 * (1.0 + r.max_abs());
        for i in 0..24 {
            prop_assert!((r.rho[i] - r.rho[23 - i]).abs() <= tol);
            prop_assert!((r.mom[i] + r.mom[23 - i]).abs() <= tol);
        }
    }

    #[test]
    fn dissipation_is_never_positive(
        rho in random_density(16),
        mom in prop::collection::vec(-1.0f64..1.0, 16),
        gamma in 0.0f64..2.0,
        standard in any::<bool>(),
    ) {
        let g = Grid::uniform(-2.0, 2.0, 16).unwrap();
        let psi = if standard { Communication::Standard } else { Communication::None };
        prop_assert!(dissipation(&g, &State::new(rho, mom).unwrap(), gamma, psi, 1e-14) <= 0.0);
    }

    #[test]
    fn homogeneous_riemann_steps_stay_nonnegative(
        m in prop::sample::select(EXPONENTS.to_vec()),
        left in (0.0f64..3.0, -2.0f64..2.0),
        right in (0.0f64..3.0, -2.0f64..2.0),
        second in any::<bool>(),
    ) {
        let g = Grid::uniform(0.0, 1.0, 20).unwrap();
        let rho: Vec<f64> = (0..20).map(|i| if i < 10 { left.0 } else { right.0 }).collect();
        let mom: Vec<f64> = (0..20).map(|i| if i < 10 { left.0 * left.1 } else { right.0 * right.1 }).collect();
        let s = State::new(rho, mom).unwrap();
        let model = FreeEnergyModel::new(PressureLaw::PowerLaw { m });
        let cfg = SchemeConfig {
            order: if second { Order::Second } else { Order::First },
            flux: FluxKind::Kinetic,
            gamma: 0.0,
            t_end: 1.0,
            ..Default::default()
        };
        let dt = cfl_dt(&g, &s, &model, &cfg).unwrap();
        prop_assume!(dt.is_finite());
        let next = ssp_rk3_step(&g, &s, &model, &cfg, dt).unwrap();
        prop_assert!(next.rho.iter().all(|r| *r >= 0.0));
    }
}
