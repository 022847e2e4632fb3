//! Exact p-adic arithmetic on rationals: valuations, norms, digit expansions
//! and disks. Nothing here touches floating point except [`Norm::to_f64`],
//! which exists for display.

mod digits;
mod disk;
mod prime;
mod rational;
mod valuation;

pub use digits::{digits, PAdicApprox};
pub use disk::{disk_of, disk_relation, Disk, DiskRelation};
pub use prime::{is_prime, Prime};
pub use rational::Rational;
pub use valuation::{norm, pairwise_valuation, valuation, ExtendedPoint, Norm, Valuation};
