//! Source vetting and the reproducibility audit trail.

pub mod audit;
pub mod vetting;

pub use audit::{
    record_audit, verify_audit_log, AuditFailure, AuditInput, AuditLog, AuditRecord, ResolveInput,
    VerifyReport,
};
pub use vetting::{vet_source, CandidateSource, Rejection, VetOutcome};
