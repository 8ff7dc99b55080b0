//! Seeded experiment scripts. Each experiment resolves the config, computes
//! its data and writes CSV/JSON/SVG files plus `report.json` into an output
//! directory. Identical config and seed give byte-identical files.

pub mod chi_curve;
pub mod config;
pub mod contextuality;
pub mod output;
pub mod ramsey;
pub mod sim;
pub mod spectroscopy;
pub mod spiral;
pub mod sweet_spot;
pub mod tomo;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

pub use config::{ExperimentConfig, ResolvedConfig};
pub use output::{Header, OutputSink, RunReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    ChiCurve,
    Spectroscopy,
    Spiral,
    Ramsey,
    StateTomo,
    ProcessTomo,
    Contextuality,
    SweetSpot,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::ChiCurve,
        Experiment::Spectroscopy,
        Experiment::Spiral,
        Experiment::Ramsey,
        Experiment::StateTomo,
        Experiment::ProcessTomo,
        Experiment::Contextuality,
        Experiment::SweetSpot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ChiCurve => "chi-curve",
            Experiment::Spectroscopy => "spectroscopy",
            Experiment::Spiral => "spiral",
            Experiment::Ramsey => "ramsey",
            Experiment::StateTomo => "state-tomo",
            Experiment::ProcessTomo => "process-tomo",
            Experiment::Contextuality => "contextuality",
            Experiment::SweetSpot => "sweet-spot",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Resolves `config`, runs `experiment` and writes its outputs into `out`.
pub fn run(experiment: Experiment, config: &ExperimentConfig, seed: u64, out: &Path) -> Result<RunReport> {
    let resolved = config.resolve()?;
    let header = Header::new(experiment.name(), &resolved.hash()?, seed);
    let mut sink = OutputSink::create(out, header)?;
    sink.json("config.resolved.json", &resolved)?;
    let r = &resolved;
    let summary = match experiment {
        Experiment::ChiCurve => chi_curve::write(&chi_curve::compute(r)?, &mut sink)?,
        Experiment::Spectroscopy => spectroscopy::write(&spectroscopy::compute(r)?, &mut sink)?,
        Experiment::Spiral => spiral::write(&spiral::compute(r, seed)?, &mut sink)?,
        Experiment::Ramsey => ramsey::write(&ramsey::compute(r, seed)?, r, &mut sink)?,
        Experiment::StateTomo => tomo::write_states(&tomo::compute_states(r, seed)?, &mut sink)?,
        Experiment::ProcessTomo => tomo::write_process(&tomo::process_tomography(r, seed)?, &mut sink)?,
        Experiment::Contextuality => contextuality::write(&contextuality::compute(r, seed)?, &mut sink)?,
        Experiment::SweetSpot => sweet_spot::write(&sweet_spot::compute(r)?, &mut sink)?,
    };
    sink.finish(summary)
}
