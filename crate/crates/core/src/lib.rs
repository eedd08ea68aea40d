pub mod error;
pub mod intertwiner;
pub mod lindblad;
pub mod lz;
pub mod numkit;
pub mod tfi;

pub use error::{ModelError, Result};
