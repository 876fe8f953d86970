pub mod attention;
pub mod builder;
pub mod chunk;
pub mod cli;
pub mod config;
pub mod error;
pub mod graph;
pub mod linearizer;
pub mod metrics;
pub mod rag;

pub use error::{Error, Result};
