//! Scenario loading, command bodies, randomized corpus generation, and
//! deterministic report assembly for the `coarse-dyn` binary.

pub mod commands;
pub mod corpus;
pub mod report;
pub mod scenario;
