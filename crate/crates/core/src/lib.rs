//! Harmonic end-functions on Cayley graph truncations.
//!
//! The crate builds finite balls of Cayley graphs for free groups and free
//! products of cyclic groups, solves Dirichlet problems whose boundary data
//! is a {0,1}-valued function on end classes, classifies necks against that
//! data, certifies energy lower bounds, and assembles the tree of walls cut
//! out by translates of the harmonic field.

pub mod ends;
pub mod error;
pub mod export;
pub mod group;
pub mod harmonic;
pub mod necks;
pub mod truncation;
pub mod walls;

pub use error::{Error, ErrorFamily, Result};
pub use group::{CyclicOrder, Group, Letter, Presentation, Syllable, Word};
pub use truncation::{build_net, build_truncation, Edge, Net, Truncation, VertexId};
