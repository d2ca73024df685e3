//! Exact counts, singularity constants and offspring laws.

mod constants;
pub mod fixed;
mod laws;
mod leafcount;
mod series;

pub use constants::{
    default_constants, find_constants, find_constants_with_order, Constants, ConstantsReport, PhiSeries, Reported, DEFAULT_ORDER,
    DEFAULT_TOL,
};
pub use fixed::Fixed;
pub use laws::{
    biased_laws, eta_closed_form, eta_law, xi_zeta_law, BiasedLaws, LawSampler, OffspringLaw, XI_ZETA_TAIL,
};
pub use leafcount::{boltzmann_leafcount, leafcount_series};
pub use series::{
    factorial, labelled_cograph_count, labelled_counts, ratio_to_f64, scaled_unlabelled, unlabelled_cograph_count,
    unlabelled_counts, Coefficients, SeriesKind, SeriesTable,
};
