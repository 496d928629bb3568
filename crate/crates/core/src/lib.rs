//! Traveling waves of the fifth-order Korteweg–de Vries equation
//!
//! ```text
//! u_t + C u_x + γ u u_x + α u_xxx = β u_xxxxx
//! ```
//!
//! * [`elliptic`]: complete elliptic integrals, nome and Jacobi functions.
//! * [`waves`]: closed-form solitary and cnoidal profiles, conservation-law residuals.
//! * [`fourier`]: analytic Fourier coefficients, a DFT oracle and the PF(2) test.
//! * [`stability`]: norm derivatives, term-by-term sign analysis, Gegenbauer series.
//! * [`pde`]: integrating-factor RK4 pseudospectral solver and orbital distance.
//! * [`cli`]: command-line front end.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod fourier;
pub mod pde;
pub mod spectral;
pub mod stability;
pub mod waves;

pub use error::{Error, Result};
