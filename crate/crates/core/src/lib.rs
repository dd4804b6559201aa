//! Deterministic grid simulator for memetic evolution among small recurrent
//! agents.
//!
//! Every agent on a toroidal grid owns an evolved set of network weights. Each
//! step it buffers noisy copies of its neighbours' broadcasts, attends to one
//! of them through an entropy-targeted softmax, updates a global hidden state,
//! and emits a new ±1 message. Agents promote the neighbours whose messages
//! they found salient, and promoted agents replicate (with mutation) into an
//! adjacent site, optionally gated by a task fitness.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`message`], [`rng`], [`config`]: shared domain types.
//! * [`neural`]: all network maths.
//! * [`memetics`]: the per-step message exchange pipeline.
//! * [`evolution`]: promotion, fitness gating and replication.
//! * [`task`]: task environments and rollout fitness.
//! * [`census`]: meme accounting and statistics.
//! * [`harness`]: presets, runs, sweeps, checkpoints and output files.

pub mod census;
pub mod config;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod harness;
pub mod memetics;
pub mod message;
pub mod neural;
pub mod rng;
pub mod task;
pub mod world;

pub use config::{GridConfig, MessageShape};
pub use error::{Error, Result};
pub use grid::{GridDims, Site};
pub use message::{Message, NoisyMessage};
pub use rng::{Purpose, RngStream, StreamId};
pub use world::World;
