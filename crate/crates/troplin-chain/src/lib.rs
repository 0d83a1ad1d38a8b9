//! Chains of loops with well-separated edge lengths.
//!
//! A chain of genus `g` is a metric graph made of `g` circles joined in a row
//! by bridges. When the edge lengths are chosen so that the loops are much
//! longer than they are wide, and the bridges longer still, divisor classes on
//! the chain admit a purely combinatorial classification: each class is
//! encoded by a chip count at the left endpoint together with one
//! counterclockwise coordinate per loop, and its rank is read off from an
//! associated lattice path. This crate builds such chains (see
//! [`make_admissible_chain`]), classifies divisor data on them, converts
//! between lattice paths and rectangular tableaux, and constructs the
//! canonical representatives `D_i` of a vertex-avoiding class along with exact
//! piecewise linear witnesses `psi_i`.

pub mod error;
pub mod model;
pub mod params;
pub mod path;
pub mod rep;
pub mod shape;
pub mod tableau;

pub use error::{ChainError, ChainResult};
pub use model::ChainModel;
pub use params::{make_admissible_chain, ChainParams};
pub use path::{rho, DivisorData, LingeringPath, Step};
pub use rep::CanonicalRep;
pub use shape::ShapeCase;
pub use tableau::{path_to_tableau, tableau_to_divisor, Tableau};
