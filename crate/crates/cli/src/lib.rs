//! Command-line front end and HTTP session service for `cluster-core`.

pub mod commands;
pub mod error;
pub mod input;
pub mod server;
pub mod state;
