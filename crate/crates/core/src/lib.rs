//! Degree-shaped polynomial Lax matrices and the integrable systems they carry.
//!
//! ```
//! use laxflow::flows::{integrate, FieldSpec};
//! use laxflow::{sov, spectral, PolyMatrix, SampleSlice, C64};
//!
//! let a = PolyMatrix::random(3, 2, 7, SampleSlice::SInfinity).unwrap();
//! assert_eq!(spectral::char_poly(&a).genus(), 4);
//!
//! let div = sov::sov_divisor(&a).unwrap();
//! assert_eq!(div.len(), 4);
//!
//! let traj = integrate(&a, FieldSpec::Projected { a: C64::new(0.5, 0.0), p: 1 }, 0.1, 1e-3).unwrap();
//! assert!(traj.conservation_drift < 1e-8);
//! ```

pub mod config;
pub mod error;
pub mod fixtures;
pub mod flows;
pub mod gauge;
pub mod linalg;
pub mod poisson;
pub mod poly;
pub mod polymat;
pub mod sov;
pub mod spectral;
pub mod verify;

pub use error::{LaxError, Result};
pub use poly::{Poly, C64};
pub use polymat::{BlockView, MatPoly, Node, PolyMatrix, SampleSlice};
