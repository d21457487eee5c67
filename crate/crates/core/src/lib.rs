//! Hybrid static-dynamic model-based GUI testing over declarative app
//! specifications.
//!
//! The pipeline extracts a windows transition graph from an [`appspec::AppSpec`],
//! orders its events, crawls a deterministic simulation of the app to infer a
//! finite state model, derives test suites from that model and scores them
//! with spec-level mutants.

pub mod appspec;
pub mod crawler;
pub mod digest;
pub mod event_tracking;
pub mod fixtures;
pub mod mutation;
pub mod pipeline;
pub mod runtime;
pub mod static_analysis;
pub mod testgen;
