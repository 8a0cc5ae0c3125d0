//! Global heights, the adelic ball-volume convolution, counting predictions
//! and empirical checks of regularity and persistence of asymptotics.

mod height;
mod persistence;
mod predict;
mod regularity;
mod volume;

pub use height::{global_height, primitive_from_rationals, HeightProfile};
pub use persistence::{persistence_check, pgl2_measure_pair, pgl2_measure_pair_with, MeasurePair, PersistencePoint};
pub use predict::{prediction_n, LabeledPrediction, Prediction, PREDICTION_CUTOFF};
pub use regularity::{
    covering_number_box, regularity_report, tree_ball, BoxCovering, RegularityReport, ShiftRow, Verdict,
    DEFAULT_EPS, NON_REGULAR_GAP, REGULAR_GAP,
};
pub use volume::{
    adelic_ball_series, adelic_ball_volume, adelic_ball_volume_with, ArchimedeanTable, BallVolumeSeries,
    VolumeComponent, ARCH_TABLE_STEP,
};
