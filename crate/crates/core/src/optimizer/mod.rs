//! Derivative-free optimization: Nelder-Mead and the adaption-scheduled FFD driver.

mod adaptive;
mod nelder_mead;

pub use adaptive::{run_with_adaption, AdaptionSchedule, AdaptiveProblem, AdaptiveRun};
pub use nelder_mead::{nelder_mead, Event, HistoryRecord, NmConfig, NmOutcome, RunHistory, Termination};
