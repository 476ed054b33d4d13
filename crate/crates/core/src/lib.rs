//! Entanglement swapping between two partially entangled pure pairs.

pub mod bounds;
pub mod cli;
pub mod concentration;
pub mod criterion;
pub mod error;
pub mod qmath;
pub mod repeater;
pub mod states;

pub use error::{Error, Result};
