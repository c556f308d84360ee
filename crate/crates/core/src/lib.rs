//! Gap Max-Cut to binary CVP reduction, brute-force certification oracles,
//! meet-in-the-middle CVP solving over approximate-near-neighbor indexes, and
//! closed-form cost calculators.

pub mod ann;
pub mod cost;
pub mod error;
pub mod gen;
pub mod graph;
pub mod lattice;
pub mod mitm;
pub mod num_mode;
pub mod oracle;
pub mod pipeline;
pub mod reduce;

pub use error::Error;
pub use num_mode::{Num, PNorm, Rat};

/// Outcome of a gap decision problem, on either side of the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    PromiseViolation,
}

impl Decision {
    /// Process exit code for this outcome: 0 YES, 1 NO, 2 promise violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Decision::Yes => 0,
            Decision::No => 1,
            Decision::PromiseViolation => 2,
        }
    }
}
