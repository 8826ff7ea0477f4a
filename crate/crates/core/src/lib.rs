//! Planning and verification for data protection in storage networks whose
//! nodes fail permanently and are never replaced.
//!
//! An `n`-node network starts with `M` units of data spread evenly across the
//! nodes. Nodes drop out one at a time until only `k` remain, and the data
//! must stay recoverable from any `k` survivors. Keeping it recoverable costs
//! traffic: before each loss the surviving nodes exchange coded data, and the
//! total exchanged over the whole lifetime is the *protection bandwidth*.
//!
//! This crate computes how little traffic suffices and what each node must
//! store along the way:
//!
//! * [`model`] — problem instances ([`ProblemSpec`]), storage/transmission
//!   profiles ([`ProtectionPlan`]), metrics, and feasibility checking.
//! * [`cuts`] — enumeration of every finite source/collector cut of the
//!   information flow graph, the constraint family the planner must satisfy.
//! * [`flowgraph`] — the explicit flow network and a max-flow min-cut oracle,
//!   independent of the enumeration in [`cuts`].
//! * [`lp`] — exact rational linear programs and a self-contained simplex
//!   solver (float arithmetic available as an opt-in cross-check).
//! * [`strategies`] — the optimal planner plus the two baselines it is
//!   measured against (minimum storage, stage-greedy minimum repair).
//! * [`rlnc`] — a random-linear-coding simulator over GF(2^8)/GF(2^16) that
//!   executes a plan packet by packet and verifies decodability.
//!
//! The crate is `no_std` (with `alloc`); everything that touches files,
//! terminals, or argument parsing lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cuts;
pub mod flowgraph;
pub mod gf;
pub mod lp;
pub mod model;
pub mod rlnc;
pub mod strategies;

mod ratio;
mod simplex;

pub use ratio::{rat, Rat};

pub use model::{ProblemSpec, ProtectionPlan, StrategyTag};
