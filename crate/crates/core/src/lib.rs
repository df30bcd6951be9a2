//! Diagnostic computation over provenance-tagged statistics.
//!
//! Source values are vetted and classified, indicator definitions are
//! evaluated in binary64, every result is written to an append-only audit log
//! that can be re-verified by recomputation, and only then are results mapped
//! to the action-capacity variables and used to assess hypotheses.

pub mod cfindex;
pub mod concentration;
pub mod error;
pub mod evidence;
pub mod fixtures;
pub mod formula;
pub mod framework;
pub mod indicator;
pub mod io;
pub mod ledger;
pub mod metrics;
pub mod pipeline;
pub mod quantity;
pub mod transform;

pub use error::{CalcError, DefinitionParseError, FrameworkError, IngestError, LedgerError};
pub use evidence::{EvidenceStatus, InterpretationBoundary};
pub use formula::FormulaId;
pub use indicator::{compute, DerivedIndicator, IndicatorDef, SourceRegistry, SourceValue};
pub use pipeline::{run_inputs, run_pipeline, PipelineConfig, PipelineError, PipelineInputs, ReportBundle};
pub use quantity::{Period, Quantity, Unit, UnitKind};
