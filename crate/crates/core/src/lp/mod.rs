//! Littlewood-Paley machinery: dyadic cutoffs, blocks, Besov and Sobolev
//! norms, and ratio checks for the Bernstein and interpolation lemmas.

mod besov;
mod blocks;
mod inequalities;
mod profile;

pub use besov::{
    besov_norm, besov_norm_vector, combine_blocks, sobolev_seminorm, BesovIndex, BesovNorm,
    BesovWarning, VectorConvention, TOP_BLOCK_THRESHOLD,
};
pub use blocks::{
    block_norms, dyadic_block, low_pass, magnitude_block_norms, BlockNorms, BlockRange,
};
pub use inequalities::{
    besov_interpolation_ratio, check_bernstein, interpolation_ratio, BernsteinReport,
    InterpolationSpec,
};
pub use profile::{build_profile, DyadicProfile, ANNULUS_INNER, ANNULUS_OUTER, BALL_RADIUS};
