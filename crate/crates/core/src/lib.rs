//! Constructive reduction from 3-SAT to the quiver-representation
//! indecomposability problem over finite fields, with the linear algebra
//! needed to check every step of it on concrete instances.

pub mod cnf;
pub mod gf;
pub mod matrix;
pub mod quiver;
pub mod roots;
pub mod reduction;
pub mod harness;
