//! Distributed orthogonal space-time block codes for two-hop
//! amplify-and-forward relay networks.
//!
//! Relay `k` holds matrices `A_k`, `B_k` over `{0, ±1, ±j}` and forwards
//! `ρ_k (y_k A_k + y_k* B_k)`. The crate builds such codes ([`codebook`]),
//! checks them ([`verifier`]), simulates the network ([`channel`]), decodes
//! ([`decoder`]) and runs BER experiments ([`harness`]).

pub mod channel;
pub mod code;
pub mod codebook;
pub mod constellation;
pub mod decoder;
mod error;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod unit;
pub mod verifier;

pub use channel::{ChannelDraw, PowerConfig, ReceivedFrame, Scheme};
pub use code::{DistributedCode, RelayMatrixPair, Term, UnitMatrix};
pub use codebook::{construct, BoundFamily, RateBound, SearchResult};
pub use constellation::Constellation;
pub use decoder::{DecodePath, DecodeResult};
pub use error::{Error, Result};
pub use harness::{BerCurve, DiversityEstimate, ExperimentConfig};
pub use unit::{GaussianInt, GaussianUnit};
pub use verifier::{VerificationReport, Verdict, VerifiedCode, VerifyOptions};
