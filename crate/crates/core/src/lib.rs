//! Void space surfaces: depth cues synthesized in the empty screen regions
//! between rendered vessels.

pub mod bench;
pub mod config;
pub mod contour;
pub mod cues;
pub mod error;
pub mod imageio;
pub mod pipeline;
pub mod scene;
pub mod synthesis;
pub mod synthetic;

pub use error::{Error, Result};
