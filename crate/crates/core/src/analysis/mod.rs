//! Measure-theoretic, differential and structural properties of `f`.

pub mod derivative;
pub mod dimension;
pub mod integral;
pub mod structure;

pub use derivative::{
    derivative_ratio_sequence, digit_frequencies, increment_on_cylinder, sample_rng,
    sample_typical_digits, singularity_check, singularity_rate, total_increment, FrequencyTable,
    IncrementResult, SingularityCheck,
};
pub use dimension::{graph_dimension_bounds, moran_dimension, DimensionBounds, MoranResult};
pub use integral::{integral_closed_form, integral_riemann, IntegralResult};
pub use structure::{
    fixed_point_set, monotonicity_witness, FixedSetClass, FixedSetKind, MonotonicityWitness,
    PointPair,
};
