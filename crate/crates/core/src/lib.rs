//! Allocation-only core of the explicate phishing detector.
//!
//! Everything in this crate is pure computation over in-memory values:
//! email and URL parsing, text normalization, TF-IDF and domain features,
//! the logistic-regression scorer, LIME and linear SHAP explanations,
//! prompt rendering for the LLM layer, and evaluation metrics. File
//! formats, HTTP and the command line live in the `explicate` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classifier;
pub mod dataset;
pub mod email;
pub mod error;
pub mod eval;
pub mod features;
pub mod lime;
pub mod llm;
pub mod pipeline;
pub mod shap;
pub mod synth;
pub mod textprep;

pub use classifier::{LinearModel, Prediction, TrainConfig, Verdict};
pub use email::{parse_email, ParsedEmail, Url};
pub use error::Error;
pub use features::{ConceptGroup, FeatureRegistry, FeatureVector, LexiconConfig, Vocabulary};
pub use pipeline::{Detector, MODEL_FORMAT_VERSION};

pub type Result<T, E = Error> = core::result::Result<T, E>;
