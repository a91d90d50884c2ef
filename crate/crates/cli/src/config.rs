use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use pdfa_synth::game::FinishPolicy;
use pdfa_synth::learning::LearnMode;
use pdfa_synth::pareto_synthesis::EnvPolicy;

/// Which Pareto point(s) to extract strategies for.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSelector {
    All,
    Index(usize),
    Vector(Vec<f64>),
}

impl FromStr for PointSelector {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "all" {
            return Ok(PointSelector::All);
        }
        if s.contains(',') {
            let v = s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| format!("point component `{x}`: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if v.iter().any(|x| !x.is_finite()) {
                return Err("point components must be finite".into());
            }
            return Ok(PointSelector::Vector(v));
        }
        s.parse::<usize>()
            .map(PointSelector::Index)
            .map_err(|_| format!("expected `all`, an index or a comma separated vector, got `{s}`"))
    }
}

/// `random`, `greedy:<component>` or `script:<a>,<b>,...`.
pub fn parse_env_policy(s: &str, seed: u64) -> Result<EnvPolicy, String> {
    if s == "random" {
        return Ok(EnvPolicy::Random { seed });
    }
    if let Some(c) = s.strip_prefix("greedy:") {
        let component = c.parse().map_err(|_| format!("bad component `{c}`"))?;
        return Ok(EnvPolicy::AdversarialGreedy { component });
    }
    if let Some(list) = s.strip_prefix("script:") {
        return Ok(EnvPolicy::Scripted(
            list.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect(),
        ));
    }
    Err(format!("unknown environment policy `{s}`"))
}

/// Everything a run needs, gathered from the command line.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub demos: Option<PathBuf>,
    pub safety: Option<String>,
    pub mode: LearnMode,
    pub alphas: Vec<f64>,
    pub pdfa: Option<PathBuf>,
    pub game: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub point: PointSelector,
    pub finish: FinishPolicy,
    pub env: EnvPolicy,
    pub episodes: usize,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            demos: None,
            safety: None,
            mode: LearnMode::Vanilla,
            alphas: vec![1.0],
            pdfa: None,
            game: None,
            grid: None,
            truth: None,
            point: PointSelector::All,
            finish: FinishPolicy::default(),
            env: EnvPolicy::Random { seed: 0 },
            episodes: 1,
            sizes: vec![5, 50, 500],
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        for p in [&self.demos, &self.pdfa, &self.game, &self.grid, &self.truth].into_iter().flatten() {
            if !p.exists() {
                bail!("input file {} does not exist", p.display());
            }
        }
        if let Some(f) = self.safety.as_deref().and_then(|s| s.strip_prefix('@')) {
            if !std::path::Path::new(f).exists() {
                bail!("safety formula file {f} does not exist");
            }
        }
        if self.game.is_some() && self.grid.is_some() {
            bail!("--game and --grid are mutually exclusive");
        }
        if self.alphas.is_empty() {
            bail!("at least one alpha is required");
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a.is_finite()) {
                bail!("alpha must be positive, got {a}");
            }
        }
        if self.episodes == 0 {
            bail!("episodes must be at least 1");
        }
        Ok(())
    }
}
