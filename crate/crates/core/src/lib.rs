//! Exact straightedge-and-compass constructibility laboratory.

pub mod closure;
pub mod game;
pub mod geometry;
pub mod lab;
pub mod lang;
pub mod numbers;
