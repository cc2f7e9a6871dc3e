//! Experiment configuration, the strategy-comparison runner, CSV output and
//! the shipped benchmark fixtures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::{
    build_bounded_reach, build_recurrence, build_sequential, parse_automaton, AutomatonError,
    SymbolicAutomaton,
};
use crate::gridworld::{GridError, GridWorld};
use crate::learner::{binomial_ci, train, LearnerConfig, LearnerError};
use crate::predicate::{parse_predicate, Metric, Predicate, PredicateError};
use crate::product::{
    GuardSemantics, ProductError, ProductMDP, RewardConfig, RewardModel, RewardStrategy,
};

/// Environment variable holding the default comma-separated seed list.
pub const SEEDS_ENV: &str = "SYMSHAPE_SEEDS";

pub const CSV_HEADER: &str = "task,strategy,epoch,k,n,estimate,ci_low,ci_high";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Write(#[from] io::Error),
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// A task pattern instantiated by one of the automaton builders.
#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    BoundedReach { goal: Predicate, deadline: usize },
    Sequential { goals: Vec<Predicate> },
    Recurrence { a: Predicate, b: Predicate, gap: usize, span: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum AutomatonSource {
    /// Automaton file contents together with the name it was loaded from.
    Text { label: String, text: String },
    Pattern(Pattern),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: String,
    pub map_label: String,
    pub map_text: String,
    pub automaton: AutomatonSource,
    pub strategies: Vec<RewardStrategy>,
    pub semantics: GuardSemantics,
    pub metric: Metric,
    pub kappa: f64,
    pub d_max: Option<f64>,
    pub phi_cap: Option<f64>,
    pub learner: LearnerConfig,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::parse(&text, |name| read(&base.join(name)))
    }

    /// Parses the flat `key = value` format. `resolve` turns a referenced
    /// file name into its contents.
    pub fn parse(
        text: &str,
        resolve: impl Fn(&str) -> Result<String, HarnessError>,
    ) -> Result<Self, HarnessError> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Config {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            if entries.contains_key(&key) {
                return Err(HarnessError::Config {
                    line: idx + 1,
                    message: format!("`{key}` set twice"),
                });
            }
            entries.insert(key, (idx + 1, value.trim().to_string()));
        }
        let mut cfg = Entries { entries };
        let task = cfg.take("task").map(|(_, v)| v).unwrap_or_else(|| "task".into());
        let (_, map_label) = cfg.require("map")?;
        let map_text = resolve(&map_label)?;

        let automaton = match (cfg.take("automaton"), cfg.take("pattern")) {
            (Some(_), Some((line, _))) => {
                return Err(HarnessError::Config {
                    line,
                    message: "give either `automaton` or `pattern`, not both".into(),
                })
            }
            (Some((_, label)), None) => AutomatonSource::Text {
                text: resolve(&label)?,
                label,
            },
            (None, Some((line, pattern))) => AutomatonSource::Pattern(match pattern.as_str() {
                "bounded_reach" => Pattern::BoundedReach {
                    goal: cfg.predicate("goal")?,
                    deadline: cfg.parsed("deadline")?,
                },
                "sequential" => {
                    let (line, raw) = cfg.require("goals")?;
                    let goals = raw
                        .split(';')
                        .map(|g| parse_predicate(g.trim()))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| HarnessError::Config {
                            line,
                            message: e.to_string(),
                        })?;
                    Pattern::Sequential { goals }
                }
                "recurrence" => Pattern::Recurrence {
                    a: cfg.predicate("region_a")?,
                    b: cfg.predicate("region_b")?,
                    gap: cfg.parsed("gap")?,
                    span: cfg.parsed("span")?,
                },
                other => {
                    return Err(HarnessError::Config {
                        line,
                        message: format!("unknown pattern `{other}`"),
                    })
                }
            }),
            (None, None) => {
                return Err(HarnessError::Invalid(
                    "one of `automaton` or `pattern` is required".into(),
                ))
            }
        };

        let strategies = match cfg.take("strategies") {
            Some((line, raw)) => raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<RewardStrategy>()
                        .map_err(|message| HarnessError::Config { line, message })
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => RewardStrategy::ALL.to_vec(),
        };

        let defaults = LearnerConfig::default();
        let seeds = match cfg.take("seeds") {
            Some((line, raw)) => parse_seeds(&raw).map_err(|message| HarnessError::Config { line, message })?,
            None => match std::env::var(SEEDS_ENV) {
                Ok(raw) => parse_seeds(&raw).map_err(|m| HarnessError::Invalid(format!("{SEEDS_ENV}: {m}")))?,
                Err(_) => defaults.seeds.clone(),
            },
        };
        let learner = LearnerConfig {
            alpha: cfg.parsed_or("alpha", defaults.alpha)?,
            epsilon_start: cfg.parsed_or("epsilon_start", defaults.epsilon_start)?,
            epsilon_end: cfg.parsed_or("epsilon_end", defaults.epsilon_end)?,
            episodes: cfg.parsed_or("episodes", defaults.episodes)?,
            horizon: cfg.parsed_or("horizon", defaults.horizon)?,
            eval_interval: cfg.parsed_or("eval_interval", defaults.eval_interval)?,
            eval_episodes: cfg.parsed_or("eval_episodes", defaults.eval_episodes)?,
            seeds,
            discount: cfg.parsed_or("discount", defaults.discount)?,
        };
        let config = ExperimentConfig {
            task,
            map_label,
            map_text,
            automaton,
            strategies,
            semantics: cfg.parsed_or("semantics", GuardSemantics::Next)?,
            metric: cfg.parsed_or("metric", Metric::Manhattan)?,
            kappa: cfg.parsed_or("kappa", 1.0)?,
            d_max: cfg.optional("d_max")?,
            phi_cap: cfg.optional("phi_cap")?,
            learner,
            output: cfg.take("out").map(|(_, v)| PathBuf::from(v)),
        };
        if let Some((key, (line, _))) = cfg.entries.into_iter().next() {
            return Err(HarnessError::Config {
                line,
                message: format!("unknown key `{key}`"),
            });
        }
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        if self.strategies.is_empty() {
            return Err(HarnessError::Invalid("at least one strategy is required".into()));
        }
        if self.learner.seeds.is_empty() {
            return Err(HarnessError::Invalid("at least one seed is required".into()));
        }
        self.learner.check()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<GridWorld, HarnessError> {
        Ok(GridWorld::load_map(&self.map_text)?)
    }

    pub fn build_automaton(&self, env: &GridWorld) -> Result<SymbolicAutomaton, HarnessError> {
        let dom = env.domain();
        Ok(match &self.automaton {
            AutomatonSource::Text { text, .. } => parse_automaton(text)?,
            AutomatonSource::Pattern(Pattern::BoundedReach { goal, deadline }) => {
                build_bounded_reach(goal, *deadline, &dom)?
            }
            AutomatonSource::Pattern(Pattern::Sequential { goals }) => build_sequential(goals, &dom)?,
            AutomatonSource::Pattern(Pattern::Recurrence { a, b, gap, span }) => {
                build_recurrence(a, b, *gap, *span, &dom)?
            }
        })
    }

    pub fn product(&self) -> Result<ProductMDP, HarnessError> {
        let env = self.grid()?;
        let spec = self.build_automaton(&env)?;
        Ok(ProductMDP::new(env, spec, self.semantics)?)
    }

    pub fn reward_config(&self, p: &ProductMDP) -> Result<RewardConfig, HarnessError> {
        Ok(RewardConfig::resolve(
            p,
            self.metric,
            self.kappa,
            self.d_max,
            self.phi_cap,
        )?)
    }
}

fn parse_seeds(raw: &str) -> Result<Vec<u64>, String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|e| format!("bad seed `{s}`: {e}")))
        .collect()
}

struct Entries {
    entries: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<(usize, String), HarnessError> {
        self.take(key)
            .ok_or_else(|| HarnessError::Invalid(format!("missing `{key}`")))
    }

    fn predicate(&mut self, key: &str) -> Result<Predicate, HarnessError> {
        let (line, raw) = self.require(key)?;
        parse_predicate(&raw).map_err(|e| HarnessError::Config {
            line,
            message: e.to_string(),
        })
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        let (line, raw) = self.require(key)?;
        raw.parse().map_err(|e: T::Err| HarnessError::Config {
            line,
            message: format!("`{key}`: {e}"),
        })
    }

    fn optional<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        if self.entries.contains_key(key) {
            self.parsed(key).map(Some)
        } else {
            Ok(None)
        }
    }

    fn parsed_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.optional(key)?.unwrap_or(default))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub task: String,
    pub strategy: RewardStrategy,
    pub epoch: usize,
    pub k: u64,
    pub n: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Trains every strategy on every seed and pools checkpoint counts across seeds.
/// Rows come back sorted by strategy name, then epoch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    cfg.check()?;
    let p = cfg.product()?;
    let rcfg = cfg.reward_config(&p)?;
    let models = cfg
        .strategies
        .iter()
        .map(|&s| RewardModel::new(&p, s, rcfg))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, u64)> = (0..models.len())
        .flat_map(|m| cfg.learner.seeds.iter().map(move |&seed| (m, seed)))
        .collect();
    let curves = jobs
        .par_iter()
        .map(|&(m, seed)| train(&p, &models[m], &cfg.learner, seed).map(|(_, curve)| (m, curve)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut pooled: BTreeMap<(&str, usize), (RewardStrategy, u64, u64)> = BTreeMap::new();
    for (m, curve) in &curves {
        let strategy = models[*m].strategy();
        for row in &curve.rows {
            let entry = pooled
                .entry((strategy.name(), row.epoch))
                .or_insert((strategy, 0, 0));
            entry.1 += row.successes;
            entry.2 += row.trials;
        }
    }
    pooled
        .into_iter()
        .map(|((_, epoch), (strategy, k, n))| {
            let (ci_low, ci_high) = binomial_ci(k, n, 0.95)?;
            Ok(ResultRow {
                task: cfg.task.clone(),
                strategy,
                epoch,
                k,
                n,
                estimate: k as f64 / n as f64,
                ci_low,
                ci_high,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6},{:.6}",
            r.task, r.strategy, r.epoch, r.k, r.n, r.estimate, r.ci_low, r.ci_high
        )?;
    }
    Ok(())
}

/// One CSV grid of the symbolic potential per automaton location, top row
/// first (highest `y`), in location order.
pub fn potential_grids(
    p: &ProductMDP,
    rcfg: &RewardConfig,
) -> Result<Vec<(String, String)>, HarnessError> {
    let table = p.compute_potential(rcfg)?;
    let env = p.env();
    let mut grids = Vec::new();
    for q in p.spec().locations() {
        let mut csv = String::new();
        for y in (0..env.height() as i64).rev() {
            let row: Vec<String> = (0..env.width() as i64)
                .map(|x| {
                    let s = p.state(crate::gridworld::Cell::new(x, y), q);
                    format!("{}", table.get(s))
                })
                .collect();
            let _ = writeln!(csv, "{}", row.join(","));
        }
        grids.push((p.spec().name(q).to_string(), csv));
    }
    Ok(grids)
}

/// Named benchmark shipped with the crate.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub config: ExperimentConfig,
}

const FIXTURE_FILES: &[(&str, &str)] = &[
    ("reach.cfg", include_str!("../fixtures/reach.cfg")),
    ("reach.map", include_str!("../fixtures/reach.map")),
    ("recurrence.cfg", include_str!("../fixtures/recurrence.cfg")),
    ("recurrence.map", include_str!("../fixtures/recurrence.map")),
    ("sequential.cfg", include_str!("../fixtures/sequential.cfg")),
    ("sequential.map", include_str!("../fixtures/sequential.map")),
    ("sequential.aut", include_str!("../fixtures/sequential.aut")),
    ("branching.cfg", include_str!("../fixtures/branching.cfg")),
    ("branching.map", include_str!("../fixtures/branching.map")),
    ("branching.aut", include_str!("../fixtures/branching.aut")),
    ("bounded_reach.aut", include_str!("../fixtures/bounded_reach.aut")),
];

/// Contents of a shipped fixture file.
pub fn fixture_file(name: &str) -> Option<&'static str> {
    FIXTURE_FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn fixture(name: &str) -> Result<Fixture, HarnessError> {
    let (name, cfg_name) = match name {
        "reach" => ("reach", "reach.cfg"),
        "recurrence" => ("recurrence", "recurrence.cfg"),
        "sequential" => ("sequential", "sequential.cfg"),
        "branching" => ("branching", "branching.cfg"),
        other => return Err(HarnessError::Invalid(format!("unknown fixture `{other}`"))),
    };
    let text = fixture_file(cfg_name).expect("fixture config is embedded");
    let config = ExperimentConfig::parse(text, |file| {
        fixture_file(file)
            .map(str::to_string)
            .ok_or_else(|| HarnessError::Invalid(format!("no embedded fixture file `{file}`")))
    })?;
    Ok(Fixture { name, config })
}

/// The four benchmark tasks: reach, recurrence, sequential and branching.
pub fn fixtures() -> Vec<Fixture> {
    ["reach", "recurrence", "sequential", "branching"]
        .into_iter()
        .map(|n| fixture(n).expect("shipped fixtures parse"))
        .collect()
}
