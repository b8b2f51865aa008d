//! Maximum potential number of edges (MPE) of encapsulated graphs of
//! absolute information hiding, and how it changes under transformation.
//!
//! * [`graph`]: region counts, static MPE, distribution spreads, efficiency
//! * [`transform`]: the five transformations and their closed-form deltas
//! * [`experiment`]: seeded random graphs and pile-up experiments
//! * [`persistence`]: graph files, node manifests and series CSV
//! * [`verify`]: randomized differential checks against pair enumeration
//! * [`cli`]: the `encg` command surface

pub mod cli;
pub mod experiment;
pub mod graph;
pub mod persistence;
pub mod transform;
pub mod verify;

pub use experiment::{
    generate_random_graph, run_batch, run_experiment, run_hidden_pile, run_violational_pile,
    ExperimentConfig, ExperimentSeries, PileMode, Preset, SeriesPoint, SourcePolicy, TargetChoice,
};
pub use graph::{
    brute_force_mpe, configuration_efficiency, external_mpe, hidden_stddev, internal_mpe, mpe,
    region_size, totals, violational_stddev, DistributionStats, EncapsulatedGraph, GraphError,
    MpeBreakdown, RegionSpec,
};
pub use persistence::{ingest_manifest, read_graph, write_graph, write_series_csv, FormatError};
pub use transform::{
    apply, apply_checked, apply_sequence, predict_delta, validate, CheckError, Checker,
    DeltaReport, TransformError, TransformKind, Transformation,
};
