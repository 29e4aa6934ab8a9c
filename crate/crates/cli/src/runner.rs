//! Orchestration of a run: outputs, manifest, resume and replay.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::acceptance::{parse_acceptance_summary, run_suite, CriterionResult, Sizes};
use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::experiments::{Campaign, Output};
use crate::manifest::{outputs_intact, OutputDigest, RunManifest, TaskRecord};

#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    /// Experiments whose recorded outputs were found intact and kept.
    pub resumed: Vec<Experiment>,
    pub acceptance: Option<Vec<CriterionResult>>,
}

impl RunOutcome {
    pub fn acceptance_failures(&self) -> usize {
        self.acceptance.as_ref().map_or(0, |c| c.iter().filter(|c| !c.passed()).count())
    }
}

fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<Vec<OutputDigest>> {
    outputs
        .iter()
        .map(|o| {
            let path = dir.join(&o.file);
            std::fs::write(&path, &o.content).map_err(|e| CliError::io(&path, e))?;
            Ok(OutputDigest::of(&o.file, &o.content))
        })
        .collect()
}

/// Previous manifest in `dir` if it describes the same campaign.
fn resumable(dir: &Path, config: &ExperimentConfig) -> Option<RunManifest> {
    let old = RunManifest::load(dir).ok()?;
    (old.config.same_campaign(config) && old.version == env!("CARGO_PKG_VERSION")).then_some(old)
}

fn stored_acceptance(dir: &Path, record: &TaskRecord) -> Option<Vec<CriterionResult>> {
    let text = std::fs::read_to_string(dir.join("acceptance.json")).ok()?;
    let mut criteria = parse_acceptance_summary(&text).ok()?;
    for c in &mut criteria {
        let key = format!("criterion {}", c.id);
        c.seconds = record.timings.iter().find(|(k, _)| *k == key).map_or(0.0, |t| t.1);
    }
    Some(criteria)
}

/// Execute every experiment of `config` in order, writing each one's outputs
/// and then the manifest before moving on. Experiments already completed in
/// the same directory with intact outputs are not recomputed.
pub fn run(config: ExperimentConfig, sizes: &Sizes, mut log: impl FnMut(&str)) -> Result<RunOutcome> {
    config.validate()?;
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let previous = resumable(&dir, &config);
    let mut manifest = RunManifest::new(config.clone());
    manifest.save(&dir)?;
    let mut campaign = Campaign::new(config.clone())?;
    let mut resumed = Vec::new();
    let mut acceptance = None;

    for &e in &config.experiments {
        if let Some(record) = previous.as_ref().and_then(|m| m.task(e)).filter(|r| outputs_intact(&dir, r)) {
            if e == Experiment::Acceptance {
                acceptance = stored_acceptance(&dir, record);
                if acceptance.is_none() {
                    return Err(CliError::Corrupt("acceptance.json".into()));
                }
            }
            log(&format!("{e}: outputs intact, kept"));
            manifest.upsert(record.clone());
            manifest.save(&dir)?;
            resumed.push(e);
            continue;
        }
        log(&format!("{e}: running"));
        let start = Instant::now();
        let (outputs, timings) = if e == Experiment::Acceptance {
            let suite = run_suite(campaign.task_seed(e), sizes);
            for c in &suite.criteria {
                log(&c.line());
            }
            let timings = suite.criteria.iter().map(|c| (format!("criterion {}", c.id), c.seconds)).collect();
            acceptance = Some(suite.criteria);
            (suite.outputs, timings)
        } else {
            (campaign.execute(e)?, Vec::new())
        };
        let digests = write_outputs(&dir, &outputs)?;
        manifest.upsert(TaskRecord {
            experiment: e,
            seed: campaign.task_seed(e),
            seconds: start.elapsed().as_secs_f64(),
            outputs: digests,
            timings,
        });
        manifest.save(&dir)?;
        log(&format!("{e}: done in {:.1} s", start.elapsed().as_secs_f64()));
    }
    Ok(RunOutcome { manifest, resumed, acceptance })
}

#[derive(Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub file: String,
    pub expected: String,
    pub found: Option<String>,
}

/// Rerun the campaign recorded in `manifest` into `out` and compare every
/// output digest with the recorded one.
pub fn replay(manifest: &RunManifest, out: PathBuf, sizes: &Sizes) -> Result<Vec<Mismatch>> {
    let mut config = manifest.config.clone();
    config.output_dir = out;
    config.experiments = manifest.tasks.iter().map(|t| t.experiment).collect();
    if RunManifest::load(&config.output_dir).is_ok() {
        return Err(CliError::Replay(format!("{} already holds a run", config.output_dir.display())));
    }
    let fresh = run(config, sizes, |_| {})?;
    let mut mismatches = Vec::new();
    for t in &manifest.tasks {
        let new = fresh.manifest.task(t.experiment);
        for o in &t.outputs {
            let found = new.and_then(|n| n.outputs.iter().find(|x| x.file == o.file)).map(|x| x.sha256.clone());
            if found.as_deref() != Some(o.sha256.as_str()) {
                mismatches.push(Mismatch { file: o.file.clone(), expected: o.sha256.clone(), found });
            }
        }
    }
    Ok(mismatches)
}
