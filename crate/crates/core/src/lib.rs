//! Hierarchical classification with exact p-adic arithmetic.
//!
//! Points are rationals (plus the point at infinity). Their p-adic dendrogram
//! is the subtree of the Bruhat-Tits tree spanned by them, and every distance
//! is kept as an integer valuation, never as a float.
//!
//! - [`padic`]: valuations, norms, digit expansions, disks.
//! - [`dendrogram`]: construction, single-linkage cross-check, formats.
//! - [`hidden`]: hidden vertices and their counting bounds.
//! - [`family`]: time series of dendrograms, point insertion and removal,
//!   classifier distributions over attachment sites.
//! - [`encoding`]: embedding abstract dendrograms and strings as digit codes.
//! - [`cli`]: the `padic-dendro` command line.

pub mod cli;
pub mod dendrogram;
pub mod encoding;
pub mod error;
pub mod family;
pub mod hidden;
pub mod padic;

pub use dendrogram::{build_dendrogram, CanonicalSignature, Dendrogram, Node};
pub use error::{Error, Result};
pub use padic::{ExtendedPoint, Prime, Rational, Valuation};
