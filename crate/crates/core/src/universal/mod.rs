//! Explicit constructions: witness generators, the step-by-step universal
//! series builder, universality verification, schedulers and span members.

pub mod builder;
pub mod enumeration;
pub mod schedule;
pub mod span;
pub mod table;
pub mod verify;
pub mod witness;

pub use builder::{
    build_universal_series, check_blocks, BlockIndex, BuildConfig, ConstructionTranscript, InvariantReport, Mode,
    StepRecord,
};
pub use enumeration::{CompactFamily, Repetition, TargetEnumeration, TargetFamily, TargetPoly};
pub use schedule::{schedule_systems, SystemCount};
pub use span::{build_span_member, SpanReport};
pub use table::{QSideTable, QTable};
pub use verify::{verify_universality, Verdict};
pub use witness::{type1_witness, type1_witness_qside, type2_witness, WitnessOptions, WitnessReport};
