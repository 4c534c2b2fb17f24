pub mod adversaries;
pub mod breadth;
pub mod cli;
pub mod collections;
pub mod conditions;
pub mod error;
pub mod generators;
pub mod sets;
pub mod sim;
