//! Symbolic side of the pointer-network reasoning pipeline: logic data
//! types, EL+ and RDFS reasoners, knowledge-base generation, corpus
//! building and sequence preprocessing.

pub mod corpus;
pub mod el_reasoner;
pub mod generator;
pub mod logic;
pub mod preprocess;
pub mod rdfs_reasoner;
