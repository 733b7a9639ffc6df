//! Siphons of chemical reaction networks: enumeration, relevance via
//! conservation laws and polyhedral geometry, and mass-action checks.

pub mod arith;
pub mod cas;
pub mod cli;
pub mod dynamics;
pub mod geometry;
pub mod lp;
pub mod network;
pub mod relevance;
pub mod report;
pub mod set;
pub mod siphons;
