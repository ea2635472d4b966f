//! Secret-key rates of discrete-modulated continuous-variable QKD
//! protocols under collective attacks.
//!
//! Two four-state protocols are modelled: photon-added-then-subtracted
//! coherent states (PASCS) and the plain coherent-state baseline. Alice
//! sends one of four phase-rotated signals with probability 1/4, Bob
//! measures a random quadrature by homodyne detection, and the key is
//! distilled with reverse reconciliation. Eve's information is bounded
//! by the Holevo quantity of the Gaussian protocol evaluated with the
//! discrete-modulation correlation.
//!
//! The crate is organized around pairs of independent computation
//! routes. Ensemble spectra have trigonometric closed forms, a
//! cancellation-free series and a Fock-space projection; the correlation
//! has a closed form and a purification contraction; the Holevo bound
//! has closed symplectic forms and a dense-matrix reference in
//! [`oracle`]. The `selftest` battery and the test suites hold the
//! routes against each other.
//!
//! ```
//! use cvqkd::channel::{ChannelParams, DetectionParams};
//! use cvqkd::keyrate::{key_rate, Conventions};
//! use cvqkd::modulation::{ModulationEnsemble, StateFamily};
//!
//! let ensemble = ModulationEnsemble::four_state(StateFamily::Pascs, 0.13)?;
//! let channel = ChannelParams::from_fiber(100.0, 0.2, 0.002)?;
//! let point = key_rate(&ensemble, &channel, &DetectionParams::ideal(), Conventions::default())?;
//! assert!(point.key_rate > 0.0);
//! # Ok::<(), cvqkd::Error>(())
//! ```

pub mod analysis;
pub mod channel;
pub mod error;
pub mod fock;
pub mod keyrate;
pub mod modulation;
pub mod oracle;
pub mod report;
pub mod selftest;

pub use analysis::{optimize_alpha, sweep_distance, SweepResult, SweepSpec};
pub use channel::{ChannelParams, DetectionParams, NoiseSignConvention};
pub use error::{Error, Result};
pub use fock::{FockVector, Truncation};
pub use keyrate::{key_rate, Conventions, MiConvention, RatePoint};
pub use modulation::{ModulationEnsemble, StateFamily};
