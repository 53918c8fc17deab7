//! Exponential sums of linear recurrence sequences over prime fields,
//! Hecke-coefficient sequences of modular forms and the finite counting
//! problems built on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`ff`]: prime fields, extension fields, polynomial factorization.
//! * [`lrs`]: linear recurrence sequences, least periods and spectral
//!   decomposition into traces of root powers.
//! * [`expsum`]: complete and ranged exponential sums, nonlinearity sums.
//! * [`modforms`]: Ramanujan τ and Hecke prime-power recurrences.
//! * [`hypotheses`]: order/gcd hypothesis checkers and resultant certificates.
//! * [`waring`]: representation counts by cyclic convolution.
//! * [`density`]: GL₂(F_ℓ) eigenvalue-class counting.

pub mod arith;
pub mod density;
pub mod error;
pub mod expsum;
pub mod ff;
pub mod guard;
pub mod hypotheses;
pub mod lrs;
pub mod modforms;
pub mod waring;

pub use arith::Exponent;
pub use error::{Error, Result};
pub use density::DensityReport;
pub use expsum::SumProfile;
pub use ff::{ExtElem, ExtField, FiniteField, Poly, PolyFp, PrimeField};
pub use hypotheses::{ConditionReport, ExclusionCertificate};
pub use lrs::{LinRecSeq, Period, SpectralData};
pub use modforms::{HeckeParams, TauTable};
pub use waring::WaringTable;
