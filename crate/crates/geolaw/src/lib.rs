//! Distribution-law analysis for entity-annotated corpora.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`corpus`] — parse CoNLL/BIO or JSON-lines annotations into an
//!    immutable [`corpus::Corpus`] with exact character offsets.
//! 2. [`stats`] — extract the seven distribution views over entity quantity,
//!    length, and inter-entity distance, plus binned percentage summaries.
//! 3. [`fitting`] — fit gamma-type, Gaussian, and Zipf curves by least
//!    squares and score them with R², KL, JS, and MAPE.
//! 4. [`cutoff`] — estimate the potential upper cutoff of a dimension from
//!    the fitted shape/rate by fixed-point iteration.
//!
//! [`genmodel`] holds a Bernoulli placement simulator that checks the
//! waiting-time account of the distance distribution, and [`report`] /
//! [`cli`] assemble everything into deterministic JSON/CSV outputs behind
//! the `geolaw` binary.

pub mod cli;
pub mod corpus;
pub mod cutoff;
pub mod fitting;
pub mod genmodel;
pub mod jsonfmt;
pub mod report;
pub mod stats;
