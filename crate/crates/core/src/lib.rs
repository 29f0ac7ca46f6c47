//! Colonization and collapse processes on homogeneous trees.
//!
//! Colonies sit on the vertices of a tree in which every vertex has `d + 1`
//! neighbours. Each colony is founded by one individual, grows for an
//! exponential lifetime and then collapses; the survivors of the collapse
//! scatter to neighbouring vertices and found new colonies on the empty ones.
//!
//! The crate has two halves that check each other:
//!
//! * [`survivor`], [`offspring`] and [`analysis`] evaluate the survivor law,
//!   the offspring laws of the self-avoiding and move-forward-or-die
//!   comparison processes, and every bound built from them (phase
//!   classification, survival sandwich, critical curves, reach and colony
//!   counts).
//! * [`sim`] is a discrete-event Monte Carlo simulator of the process and of
//!   the two comparison processes.
//!
//! [`specialfn`] holds the numerical primitives (surjection numbers, Gauss
//! hypergeometric function, Beta function, q-digamma) and [`cli`] the command
//! line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod offspring;
pub mod sim;

pub mod specialfn;
pub mod survivor;

pub use error::{Error, Result};
pub use offspring::{OffspringLaw, Provenance};
pub use survivor::{Catastrophe, Growth, Moment, SurvivorLaw};
