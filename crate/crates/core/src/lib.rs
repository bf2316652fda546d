//! Name-ethnicity classification and bibliometric analysis of publication
//! corpora.

pub mod bibliometrics;
pub mod classifier;
pub mod cli;
pub mod collab;
pub mod corpus;
pub mod features;
pub mod names;

pub use classifier::EthnicityLabel;
