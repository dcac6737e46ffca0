//! Free-group words, the Magnus embedding over `F_p`, the Zassenhaus
//! filtration, Golod-Shafarevich bookkeeping, and a staged construction of
//! relators that collides every enumerator of a supplied family while keeping
//! the presentation Golod-Shafarevich. Also coset semi-decision and sphere
//! density tools.

pub mod decision;
pub mod density;
pub mod enumerators;
pub mod forcing;
pub mod gs;
pub mod magnus;
pub mod words;
pub mod zassenhaus;

pub use decision::{closure_stream, coset_decide, distinct_filter, CosetOutcome};
pub use density::{DensityRecord, DensityReport, MembershipPredicate, PredicateSpec};
pub use enumerators::{Enumerator, EnumeratorKind, EnumeratorSpec, PowerSchedule};
pub use forcing::{ForcingConfig, ForcingState, RelatorRecord};
pub use gs::{DegreeHistogram, GsCertificate, Rational};
pub use magnus::{magnus_embed, SeriesContext, TruncatedSeries};
pub use words::{Alphabet, Letter, Word, WordIndex};
pub use zassenhaus::{degree, equal_mod_dn, DegreeValue, EqualityOracle};

/// Version of the command-line and file interfaces.
pub const INTERFACE_VERSION: &str = "1.0";
/// Version of the JSON config and output schemas.
pub const SCHEMA_VERSION: u32 = 1;
