//! Configuration, file formats, plotting and the command line for
//! `tsforge-core`.

pub mod cli;
pub mod config;
pub mod inspect;
pub mod manifest;
pub mod plot;
pub mod writer;

use tsforge_core::sim::{generate_manual, GenerationError};
use tsforge_core::{generate_dataset, GenerationResult};

pub use config::{load_config, parse_config, Config, ConfigError};
pub use manifest::Manifest;
pub use plot::emit_plot;
pub use writer::{read_manifest, write_dataset};

/// Runs the generation described by `config`.
pub fn generate(config: &Config) -> Result<GenerationResult, GenerationError> {
    match config {
        Config::Automatic(p) => generate_dataset(p),
        Config::Manual(m) => generate_manual(m),
    }
}
