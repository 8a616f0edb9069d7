//! Conversion of bipartite pure states by local operations and classical
//! communication.
//!
//! The crate decides feasibility from Schmidt spectra (majorization), computes
//! the optimal conversion probability, synthesizes explicit protocols (Alice's
//! measurement contractions with Bob's conditional unitaries), and verifies
//! and simulates them. Everything is generic over the real scalar; the aliases
//! below fix it to `f64`.
//!
//! ```
//! use locc_core::{full_pipeline, verify, BipartiteState, ComplexMatrix};
//!
//! let a = BipartiteState::from_matrix(ComplexMatrix::diag(&[0.8f64.sqrt(), 0.2f64.sqrt()])).unwrap();
//! let bell = BipartiteState::from_matrix(ComplexMatrix::identity(2)).unwrap();
//! let protocol = full_pipeline(&a, &bell, None, 1e-9).unwrap();
//! assert!((protocol.declared_probability - 0.4).abs() < 1e-12);
//! assert!(verify(&protocol, &a, &bell, 1e-9).unwrap().pass);
//! ```

pub mod error;
pub mod linalg;
pub mod majorization;
pub mod protocol;
pub mod random;
pub mod scalar;
pub mod states;
pub mod verifier;

pub use error::{Error, Result};
pub use protocol::{full_pipeline, lo_popescu, synth_pure};
pub use scalar::Real;
pub use verifier::{simulate, simulate_parallel, verify};

pub type ComplexMatrix = linalg::Matrix<f64>;
pub type SvdFactors = linalg::Svd<f64>;
pub type SpectrumVector = majorization::Spectrum<f64>;
pub type TTransform = majorization::TTransform<f64>;
pub type BirkhoffDecomposition = majorization::BirkhoffDecomposition<f64>;
pub type BipartiteState = states::BipartiteState<f64>;
pub type SchmidtForm = states::SchmidtForm<f64>;
pub type InstrumentElement = protocol::InstrumentElement<f64>;
pub type Tail = protocol::Tail<f64>;
pub type PureTransform = protocol::PureTransform<f64>;
pub type Protocol = protocol::Protocol<f64>;
pub type VerificationReport = verifier::VerificationReport<f64>;
