//! Relative curve counts on the plane blown up at `a` points of a conic and
//! one point off it, computed by a Caporaso–Harris-type recursion, and the
//! Gromov–Witten invariants of the del Pezzo surfaces of degree 3 and 2
//! derived from them.

pub mod cache;
pub mod engine;
pub mod error;
pub mod gw;
pub mod kernel;
pub mod lattice;
pub mod splitter;
pub mod tangency;
pub mod verify;
