//! Padé approximants of power series, the chordal metric, constructive
//! polynomial/rational approximation on sampled compacts, and explicit
//! constructions of power series with universal Padé approximants.

pub mod error;
pub mod fitting;
pub mod geometry;
pub mod linalg;
pub mod num;
pub mod pade;
pub mod roots;
pub mod series;
pub mod sphere;
pub mod universal;

pub use error::{Error, Result};
pub use num::{Complex, ExtendedComplex};
pub use pade::{PadeConfig, PadeIndex, PadeResult};
pub use series::{Polynomial, PowerSeries, RationalFunction};
