//! Command-line and HTTP front ends for the interrogative game engine.

pub mod commands;
pub mod http;
pub mod session;
