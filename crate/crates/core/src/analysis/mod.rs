//! Property checks: variograms and slope fits, positive definiteness,
//! metric self-similarity, isometry invariance, the existence table and the
//! circle non-uniqueness gap.

mod checks;
mod gap;
mod report;
mod variogram;

pub use checks::{
    existence_report, existence_table, expected_existence, psd_check, reference_manifolds, relative_deviation,
    self_similarity_check, stationarity_check, ExistenceRow, SELF_SIMILARITY_QUADRATURE, SELF_SIMILARITY_SPECTRAL,
    STATIONARITY_QUADRATURE, STATIONARITY_SPECTRAL,
};
pub use gap::{gap_direct, gap_series, nonuniqueness_gap, GapValue, DIRECT_TERMS};
pub use report::{digest, PropertyReport};
pub use variogram::{
    ensemble_pairs, holder_excess_check, holder_fit, holder_fit_capped, log_edges, variogram_analytic,
    variogram_at_distances, variogram_empirical, variogram_matching, HolderFit, VariogramBin, VariogramEstimate,
    VariogramMode, GUARD_FRACTION, MIN_FIT_BINS, MIN_PAIRS_PER_BIN, MIN_REPLICATES,
};
