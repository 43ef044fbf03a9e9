//! Free-energy models: pressure laws, external potentials, interaction
//! kernels, and the resulting potential field `H`.

mod hard_rods;
mod model;
mod potential;
mod pressure;
mod steady;

pub use hard_rods::packing_fraction;
pub use model::{kernel_matrix, ExternalPotential, FreeEnergyModel, InteractionKernel, Nonlinearity};
pub use potential::{potential_field, PotentialOperator};
pub use pressure::{pi, pi_prime, pressure, xi, PressureLaw};
pub use steady::solve_discrete_steady_state;
