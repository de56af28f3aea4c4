//! Numerical toolkit for the discrete-measure spectral problem
//!
//!   -f'' + f/4 = z omega f + z^2 v f
//!
//! covering the forward problem, reconstruction from Weyl functions and
//! spectral data, the interior inverse problem and conservative multipeakon
//! dynamics of the Camassa-Holm equation.

pub mod error;
pub mod evolution;
pub mod forward;
pub mod interior;
pub mod inverse;
pub mod io;
pub mod measures;
pub mod ratfun;
pub mod tolerances;

use serde::{Deserialize, Serialize};

pub use error::{Error, ErrorClass, Result};
pub use forward::{InteriorData, Pencil, SpectralData};
pub use measures::{Counts, PeakonMeasure, RawPoint};
pub use ratfun::{HerglotzRational, RealPolynomial, StieltjesCF};
pub use tolerances::Tolerances;

/// Half-line relative to a reference point a: `Plus` is [a, inf), `Minus` is (-inf, a).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}
