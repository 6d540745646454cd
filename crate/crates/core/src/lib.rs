//! Exact classification and evaluation of planar six-vertex partition functions.

pub mod classify;
pub mod cli;
pub mod cspsolve;
pub mod instance;
pub mod linalg;
pub mod matchgate;
pub mod loopspace;
pub mod membership;
pub mod mobius;
pub mod oracle;
pub mod reductions;
pub mod scalar;
pub mod signature;
