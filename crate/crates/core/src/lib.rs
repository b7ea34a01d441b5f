//! Forward and inverse spectral problems for star graphs of Stieltjes strings.

pub mod approx;
pub mod cli;
pub mod error;
pub mod forward;
pub mod graph;
pub mod inverse;
pub mod io;
pub mod number;
pub mod oracle;
pub mod poly;
pub mod random;
pub mod ratfun;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeMeasure, GraphMeasure, PointMass, StarGraph};
pub use number::Q;
pub use poly::Poly;
pub use ratfun::{HerglotzCertificate, PartialFractions, RatFun};
pub use roots::{AlgebraicValue, RealRoot, RootGroup};
pub use spectral::{CouplingMatrix, SpectralBasis, SpectralData, Violation};
