//! Exact arithmetic for unitary similitude lattice combinatorics at an odd
//! prime: finite fields, truncated unramified rings with a Frobenius lift,
//! scaled-matrix lattice calculus, quadratic form invariants over Q_p, an
//! eight-dimensional standard isocrystal with its exterior-square quadratic
//! space and Clifford algebra, vertex lattice enumeration and the building
//! graph, Deligne-Lusztig-style stratification of isotropic flags over finite
//! fields, and the lattice-model correspondence tying the two sides together.

pub mod clifford;
pub mod config;
pub mod dieudonne;
pub mod error;
pub mod forms;
pub mod fq;
pub mod hodge;
pub mod rmatrix;
pub mod spaces;
pub mod strata;
pub mod vertex;
pub mod witt;

pub use config::{Context, PrimeConfig};
pub use error::{Error, Result};
