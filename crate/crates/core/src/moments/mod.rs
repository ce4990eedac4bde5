//! Overlap-class cardinalities, exact first and second moments on small
//! instances, and the finite-`n` bounds on the second-moment ratio.

pub mod cardinality;
pub mod combinatorics;
pub mod enumerate;
pub mod second;

pub use cardinality::{
    bound_h_drl, bound_h_r_ell, count_h_dr, count_h_r, expected_common, expected_embeddings, ln_expected_common,
    ln_expected_embeddings,
};
pub use combinatorics::{binom, falling_factorial, multinomial, Neumaier};
pub use enumerate::{
    all_injections, all_partial_injections, injection_count, partial_injection_count, Enumeration, Merge,
};
pub use second::{
    common_bounds, correlation_bound, fold_pair_profiles, ln_correlation_bound, psi, ratio_decomposition, s_bound,
    second_moment_exact, t_dr, t_dr_exact_table, BoundMode, MomentBounds, RatioDecomposition, SecondMoment, TdrMode,
};
