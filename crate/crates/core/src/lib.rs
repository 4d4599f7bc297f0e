//! Core engine for non-destructive modernization of legacy clinical reporting
//! pipelines.
//!
//! The crate is organized around a typed Intermediate Representation (IR) for
//! rendered report tables and the machinery that bridges a legacy RTF-producing
//! pipeline to a modern IR-producing one:
//!
//! - [`ir`] — the cell-grid IR, its validity rules, construction from
//!   long-format statistics, numeric reconciliation, and hierarchy lints.
//! - [`render`] — JSON / HTML / RTF renderers over the IR, plus the canonical
//!   JSON reader.
//! - [`rtf`] — a tolerant RTF table parser and cell-text normalization /
//!   classification used on the legacy side.
//! - [`bridge`] — the legacy→native registry (bridge map), parameter
//!   resolution, and dual execution plans.
//! - [`compare`] — cell-level comparison with row/column alignment, verdicts,
//!   and the divergence taxonomy.
//! - [`gates`] — the staged verification workflow (gates A–G) and failure
//!   triage.
//! - [`analyzer`] — static analysis of SAS macro libraries: headers, call
//!   graph, complexity metrics, taxonomy, coverage, syntax smoke checks.
//! - [`audit`] — append-only audit log and hashed execution manifests.
//! - [`synth`] — seeded fixture generation with targeted divergence injection.

pub mod analyzer;
pub mod audit;
pub mod bridge;
pub mod compare;
pub mod gates;
pub mod ir;
pub mod render;
pub mod rtf;
pub mod synth;
