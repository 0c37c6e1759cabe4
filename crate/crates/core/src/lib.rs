//! Scheduling toolkit for an aircraft repair shop.
//!
//! Static solvers pick due dates for repair jobs and schedule their operations
//! on capacitated trades so that expected wave coverage is maximal:
//!
//! * [`lbbd::solve_lbbd`]: logic-based Benders decomposition, exact.
//! * [`oracle::solve_global`]: exhaustive reference search, exact.
//! * [`dispatch::dispatch`]: rank-and-place heuristic.
//!
//! [`dynasim`] replays those solvers inside a seeded simulation of the shop
//! under rolling-horizon rescheduling.

pub mod budget;
pub mod dispatch;
pub mod dynasim;
pub mod error;
pub mod expectation;
pub mod genlab;
pub mod io;
pub mod lbbd;
pub mod master;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod par;
pub mod profile;
pub mod rng;
pub mod rssp;
pub mod testkit;
mod search;
