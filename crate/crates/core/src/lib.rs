pub mod bijection;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod samplers;
pub mod skeleton;
pub mod stats;
pub mod trees;

pub use error::{Error, ParseError, Result};
pub use graph::LabeledGraph;
