//! Command line and HTTP front end.

pub mod server;
