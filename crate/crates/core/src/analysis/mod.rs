//! Recording analysis: impulse thresholding, burst segmentation, background
//! diagnostics, power clustering and model estimation.
//!
//! The estimation pipeline runs, in order:
//!
//! 1. [`impulse_mask`]: flag samples whose magnitude exceeds `α · W_rms`.
//! 2. [`detect_bursts`]: join flagged runs across short gaps and drop
//!    bursts shorter than the minimum duration.
//! 3. [`split_bursts`]: cut each burst at changes of its power level so that
//!    one segment carries one noise state.
//! 4. [`kmeans_1d`]: cluster segment powers into the `M − 1` impulsive states.
//! 5. [`estimate_profile`]: per-state occupancy, spread and run lengths.

mod bursts;
mod estimate;
mod kmeans;
mod mask;
mod stats;

pub use bursts::{detect_bursts, split_burst, split_bursts, BurstConfig, BurstEvent, SplitConfig};
pub use estimate::{
    background_kv, check_estimates, estimate_profile, events_csv, parse_estimates, AnalysisConfig, ClusterFeature,
    EstimationReport,
};
pub use kmeans::{kmeans_1d, KMeansResult};
pub use mask::{impulse_mask, impulse_mask_windowed, rms, ImpulseMask, ThresholdSegment};
pub use stats::{background_stats, BackgroundStats, ComponentStats, Histogram, MIN_BACKGROUND_SAMPLES};
