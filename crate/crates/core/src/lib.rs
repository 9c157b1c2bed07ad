//! Exact rational Khovanov homology, the Lee spectral sequence and
//! knight-move audits for knot diagrams.

pub mod audit;
pub mod exactla;
pub mod grading;
pub mod khcomplex;
pub mod knotio;
pub mod lee;
pub mod scalar;
pub mod scan;

pub use exactla::SparseMat;
pub use grading::{Bigrading, DimTable, Laurent1, Laurent2};
pub use khcomplex::{FilteredComplex, Theory};
pub use knotio::{Diagram, DiagramError};
pub use scalar::{Field, Fp};

/// Arbitrary-precision rationals with a machine-word fast path.
pub type Rat = scalar::Rat;
pub type RatMatrix = SparseMat<Rat>;
pub type RatComplex = FilteredComplex<Rat>;
/// Prime field used for cross-checks.
pub type ModField = Fp<2147483647>;
