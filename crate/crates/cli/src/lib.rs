//! Command line and HTTP front end for the tutoring engine.

pub mod commands;
pub mod server;
