//! Localizing matrices, positivity certificates and finite-dimensional
//! realizations of monotone and convex free functions.

mod butterfly;
mod continuation;
mod gram;
mod monotone;

pub use butterfly::{build_butterfly_realization, build_butterfly_realization_with, eval_butterfly, eval_butterfly_raw, ButterflyRealization};
pub use continuation::{pick_check, pick_value, random_tube_point, random_upper_half_plane_point, tube_bound_check, TubeBound};
pub use gram::{convex_gram, gns_factor, localizing_matrices, psd_check, GnsFactor, GramSpec, RANK_TOL};
pub use monotone::{build_monotone_realization, build_monotone_realization_with, eval_monotone, MonotoneRealization};
