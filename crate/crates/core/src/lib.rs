//! Rate regions, channel orderings and capacity classes for discrete
//! memoryless broadcast channels carrying a common message to every receiver
//! and a nested private message to a subset of them.
//!
//! The crate is organized bottom-up:
//!
//! * [`probkit`]: distributions, channels, coding chains and mutual-information tables.
//! * [`ordering`]: degraded / less-noisy / more-capable tests with certificates.
//! * [`regions`]: halfspace descriptions of the achievable regions and their polygons.
//! * [`fme`]: exact Fourier–Motzkin projection and the split-rate elimination lemmas.
//! * [`optimize`]: supporting-line sweeps approximating unions over coding chains.
//! * [`classify`]: capacity-class detection and capacity reports.

pub mod broadcast;
pub mod classify;
pub mod config;
pub mod fme;
pub mod lp;
pub mod optimize;
pub mod oracle;
pub mod ordering;
pub mod probkit;
pub mod regions;
pub mod rng;

pub use broadcast::BroadcastSpec;
pub use config::SearchConfig;
pub use probkit::{ChannelMatrix, MarkovChain, MiTable, ProbError, ProbVector};
