//! Momentum densities, semiclassical reference densities and Landau-level fillings.

mod husimi;
mod momentum;
mod montecarlo;

pub use husimi::{
    husimi_ll_filling, landau_states, laguerre, laguerre_all, laguerre_kernel, HusimiFilling, HusimiParams, HusimiResult,
};
pub use momentum::{
    momentum_density, normalized_position_profile, radial_symmetry_fraction, rescale_momentum_profile,
    MomentumDensity, MomentumProfile,
};
pub use montecarlo::{
    momentum_support_bound, tf_momentum_density_mc, tf_momentum_profile_mc, McEstimate, MIN_SAMPLES,
};
