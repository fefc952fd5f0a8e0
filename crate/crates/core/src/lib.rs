//! Exact arithmetic for cluster algebras of geometric type.

pub mod acceptance;
pub mod cartan;
pub mod classify;
pub mod double_bruhat;
pub mod explorer;
pub mod laurent;
pub mod seed;
