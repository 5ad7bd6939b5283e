//! Std companion to `explicate-core`: CSV ingest, model and lexicon files,
//! layered configuration, the chat-completion client, evaluation reports,
//! the HTTP service and the command-line front end.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval_io;
pub mod ingest;
pub mod llm_client;
pub mod model_io;
pub mod service;

pub use explicate_core as core;
pub use error::{Error, Result};
