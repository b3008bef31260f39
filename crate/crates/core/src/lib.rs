//! Private STL robustness monitoring: cleartext oracles, the monitor as a
//! sequential circuit, garbled evaluation of that circuit, and the two-party
//! session around it.

pub mod circuit;
pub mod cli;
pub mod gen;
pub mod mpc;
pub mod protocol;
pub mod robustness;
pub mod stl;
pub mod word;
