//! Third-quantization toolkit for the Su-Schrieffer-Heeger chain with
//! boundary loss and gain.
//!
//! * [`model`]: chain parameters and Majorana-basis matrices.
//! * [`thirdq`]: rapidity spectra, Liouvillian spectra, gaps and stripes.
//! * [`analytic`]: bulk dispersion, quantization condition, dark and bound states.
//! * [`dynamics`]: Gaussian correlation-matrix dynamics and steady states.
//! * [`oracle`]: brute-force many-body superoperator for small chains.
//! * [`fitting`]: finite-size scaling fits of the Liouvillian gap.
//! * [`config`]: plain-text run configuration.

pub mod analytic;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod thirdq;

pub use error::{Error, Result};
pub use model::{DissipatorKind, DissipatorSpec, OpenChainModel, Side};
