//! Tropical dependence and independence of piecewise linear functions.
//!
//! A family `f_0, ..., f_n` on a metric graph is tropically dependent when
//! constants `b_i` exist such that `min_i (f_i + b_i)` is attained at least
//! twice at every point of the graph, and tropically independent otherwise.
//! This crate decides the question exactly: [`verify_twice`] certifies a
//! candidate set of constants by refining every edge at the breakpoints and
//! crossings of the shifted family, [`decide_dependence`] searches the space
//! of constants by gluing equal-slope pairs cell by cell and either produces
//! a verified witness or exhausts the search, and [`solve_pattern`] turns a
//! declared assignment of winning functions per edge into constants directly.
//!
//! For families of multiset witnesses `psi_I` on a chain of loops, the
//! [`theta`] module computes the minimum function, the chip distribution of
//! `m*D + div(theta)` over the loop regions, and the positional checks that
//! such a dependence must satisfy.

pub mod comb;
pub mod decide;
mod diff;
pub mod error;
pub mod pattern;
mod refine;
pub mod theta;
pub mod verify;

pub use comb::Combination;
pub use decide::{decide_dependence, DependenceOutcome, SearchTrace, DEFAULT_BUDGET};
pub use error::{IndepError, IndepResult};
pub use pattern::{solve_pattern, PatternRegion};
pub use theta::{region_index, theta_analysis, MultisetFamily, ThetaAnalysis};
pub use verify::{verify_twice, TwiceReport};
