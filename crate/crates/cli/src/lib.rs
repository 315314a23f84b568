//! Library surface of the experiment runner; `main.rs` is a thin argument
//! parser over these entry points so tests can drive them directly.

pub mod config;
pub mod experiments;

pub use config::RunConfig;
