//! Batch front-end: configuration, subcommands and deterministic output.

pub mod config;
pub mod run;
pub mod table;

pub use config::{parse_config, ConfigError, OutputFormat, RunConfig};
pub use run::{run, RunError, Subcommand};
pub use table::{format_sci, ResultTable, TableMeta};

/// Command-line overrides applied on top of a parsed configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda: Option<Vec<f64>>,
    pub offshell: Option<f64>,
    pub preset: Option<String>,
    pub workers: Option<usize>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        if let Some(l) = &self.lambda {
            cfg.regulators.lambda_list = l.clone();
        }
        if let Some(d) = self.offshell {
            cfg.dressing.offshell = d;
        }
        if let Some(p) = &self.preset {
            cfg.state.preset = p.clone();
        }
        if let Some(w) = self.workers {
            cfg.run.workers = w;
        }
        if let Some(f) = self.format {
            cfg.output.format = f;
        }
        cfg.validate()
    }
}
