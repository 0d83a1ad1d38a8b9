//! Rank certificates for families of quadric monomials on chains of loops.
//!
//! For a vertex-avoiding divisor class of rank `r` and degree `d` on a chain
//! of `g` loops, the products `psi_i + psi_j` of canonical basis functions
//! span the quadrics. This crate builds the divisor prescribed by the shape
//! of the parameters, selects a family of `min(C(r+2,2), 2d - g + 1)` pairs,
//! and certifies the family tropically independent by an excess ledger: any
//! dependence `theta` carries a nondecreasing excess along the chain, and
//! the ledger squeezes that excess above a floor on the left that exceeds
//! its cap on the right. Every ledger entry is replayed from exact
//! arithmetic on the chain, and the resulting [`MrcCertificate`] can be
//! re-verified from scratch.

pub mod build;
pub mod certify;
pub mod error;
pub mod low_degree;
pub mod pairs;
pub mod prefix;
pub mod replay;
pub mod window;

pub use build::{
    admissible_chain_for, classify, plan, plan_on, relation_cap, BuildPlan, InsertedLayout,
    InsertedLoop, PlanKind,
};
pub use certify::{
    certify_mrc, verify_certificate, BranchCert, ExcessLedger, LedgerStep, MrcCertificate,
    ShapeTag, Verdict,
};
pub use error::{MrcError, MrcResult};
pub use low_degree::{low_degree_certify, LowDegreeCertificate};
pub use pairs::{epsilon, excluded_count, pair_total, PairSet, Region};
pub use prefix::PrefixTable;
pub use replay::{replay_window, slope_gap, LoopTies, ReplayCtx, SlopeGapReport, WindowReport};
pub use window::{level, predicted_pairs, window, window_range, Window};
