//! Seeded random graphs and the pile-up experiments.
//!
//! A pile experiment starts from a random graph and repeatedly moves one
//! node of a single kind into a designated target region, recording the
//! distribution standard deviation, MPE and configuration efficiency after
//! every move.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    efficiency_from, hidden_stddev, mpe, violational_stddev, EncapsulatedGraph, RegionSpec,
};
use crate::transform::{CheckError, Checker, Transformation};

/// Which node kind is piled into the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PileMode {
    Hidden,
    Violational,
}

/// How the next donor region is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SourcePolicy {
    /// Exhaust the lowest-index donor before moving on.
    #[default]
    Drain,
    /// Cycle through donors one node at a time.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TargetChoice {
    /// Drawn from the seeded generator after the graph itself.
    #[default]
    Random,
    Index(usize),
}

/// Inclusive count range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountRange {
    pub min: u64,
    pub max: u64,
}

impl CountRange {
    pub const fn new(min: u64, max: u64) -> Self {
        CountRange { min, max }
    }

    pub const fn fixed(value: u64) -> Self {
        CountRange {
            min: value,
            max: value,
        }
    }
}

/// The four experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Hidden pile; one violational node per region, 0–30 hidden.
    Fig1,
    /// Violational pile; one hidden node per region, 0–30 violational.
    Fig3,
    /// Hidden pile; 0–30 hidden, 1–30 violational.
    Fig4,
    /// Violational pile; 0–30 hidden, 1–30 violational.
    Fig6,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig1, Preset::Fig3, Preset::Fig4, Preset::Fig6];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig6 => "fig6",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}` (expected fig1, fig3, fig4 or fig6)"))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Node count at or below which each pile step is also confirmed by
/// brute-force pair enumeration.
pub const DEFAULT_EXPERIMENT_ENUMERATION_LIMIT: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExperimentConfig {
    pub regions: usize,
    pub hidden: CountRange,
    pub violational: CountRange,
    pub mode: PileMode,
    pub target: TargetChoice,
    pub policy: SourcePolicy,
    pub seed: u64,
    pub enumeration_limit: u64,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset, seed: u64) -> Self {
        let (hidden, violational, mode) = match preset {
            Preset::Fig1 => (
                CountRange::new(0, 30),
                CountRange::fixed(1),
                PileMode::Hidden,
            ),
            Preset::Fig3 => (
                CountRange::fixed(1),
                CountRange::new(0, 30),
                PileMode::Violational,
            ),
            Preset::Fig4 => (
                CountRange::new(0, 30),
                CountRange::new(1, 30),
                PileMode::Hidden,
            ),
            Preset::Fig6 => (
                CountRange::new(0, 30),
                CountRange::new(1, 30),
                PileMode::Violational,
            ),
        };
        ExperimentConfig {
            regions: 100,
            hidden,
            violational,
            mode,
            target: TargetChoice::Random,
            policy: SourcePolicy::Drain,
            seed,
            enumeration_limit: DEFAULT_EXPERIMENT_ENUMERATION_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        for (kind, range) in [("hidden", self.hidden), ("violational", self.violational)] {
            if range.min > range.max {
                return Err(ExperimentError::InvalidRange {
                    kind,
                    min: range.min,
                    max: range.max,
                });
            }
        }
        let worst = self.regions as u128 * (self.hidden.max as u128 + self.violational.max as u128);
        if worst > crate::graph::MAX_NODES as u128 {
            return Err(ExperimentError::TooLarge);
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{kind} range is empty: min {min} > max {max}")]
    InvalidRange {
        kind: &'static str,
        min: u64,
        max: u64,
    },
    #[error("configured bounds can exceed the graph capacity")]
    TooLarge,
    #[error("pile experiments need at least two regions, got {0}")]
    TooFewRegions(usize),
    #[error("target region {target} out of range for {regions} regions")]
    TargetOutOfRange { target: usize, regions: usize },
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("step {step}: {source}")]
    Engine {
        step: u64,
        #[source]
        source: CheckError,
    },
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_graph(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> EncapsulatedGraph {
    let regions = (0..config.regions)
        .map(|_| {
            let hidden = rng.random_range(config.hidden.min..=config.hidden.max);
            let violational = rng.random_range(config.violational.min..=config.violational.max);
            RegionSpec::new(hidden, violational)
        })
        .collect();
    EncapsulatedGraph::new(regions).expect("config bounds checked against capacity")
}

/// Draws a graph with `config.regions` regions, each count uniform over its
/// inclusive range. Fully determined by `config.seed`.
pub fn generate_random_graph(
    config: &ExperimentConfig,
) -> Result<EncapsulatedGraph, ExperimentError> {
    config.validate()?;
    Ok(draw_graph(config, &mut rng_for(config.seed)))
}

/// The graph and resolved target a seeded run starts from.
pub fn prepare_run(
    config: &ExperimentConfig,
) -> Result<(EncapsulatedGraph, usize), ExperimentError> {
    config.validate()?;
    if config.regions < 2 {
        return Err(ExperimentError::TooFewRegions(config.regions));
    }
    let mut rng = rng_for(config.seed);
    let graph = draw_graph(config, &mut rng);
    let target = match config.target {
        TargetChoice::Random => rng.random_range(0..config.regions),
        TargetChoice::Index(i) if i < config.regions => i,
        TargetChoice::Index(target) => {
            return Err(ExperimentError::TargetOutOfRange {
                target,
                regions: config.regions,
            })
        }
    };
    Ok((graph, target))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub step: u64,
    pub stddev: f64,
    pub mpe: u64,
    pub ce: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSummary {
    pub nodes: u64,
    pub violational: u64,
    pub regions: usize,
}

impl GraphSummary {
    pub fn of(graph: &EncapsulatedGraph) -> Self {
        GraphSummary {
            nodes: graph.node_count(),
            violational: graph.violational_count(),
            regions: graph.region_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSeries {
    pub mode: PileMode,
    pub target: usize,
    pub policy: SourcePolicy,
    /// Set when the run came from a seeded config.
    pub config: Option<ExperimentConfig>,
    pub points: Vec<SeriesPoint>,
    /// Donor region of each move; `sources[i]` produced `points[i + 1]`.
    pub sources: Vec<usize>,
    pub final_graph: EncapsulatedGraph,
    pub summary: GraphSummary,
}

impl ExperimentSeries {
    pub fn first(&self) -> &SeriesPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &SeriesPoint {
        self.points
            .last()
            .expect("a series always holds its initial point")
    }

    pub fn steps(&self) -> u64 {
        self.last().step
    }

    /// Spread of the efficiency column, `max - min`.
    pub fn ce_range(&self) -> f64 {
        let (lo, hi) = self
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.ce), hi.max(p.ce))
            });
        hi - lo
    }
}

fn spare(region: RegionSpec, mode: PileMode) -> u64 {
    match mode {
        PileMode::Hidden => region.hidden,
        // every donor keeps one violational node so it stays reachable
        PileMode::Violational => region.violational.saturating_sub(1),
    }
}

fn point(graph: &EncapsulatedGraph, mode: PileMode, step: u64) -> SeriesPoint {
    let stats = match mode {
        PileMode::Hidden => hidden_stddev(graph),
        PileMode::Violational => violational_stddev(graph),
    }
    .expect("pile graphs have regions");
    let total = mpe(graph).total;
    SeriesPoint {
        step,
        stddev: stats.stddev,
        mpe: total,
        ce: efficiency_from(total, graph.node_count()),
    }
}

struct SourcePicker {
    policy: SourcePolicy,
    target: usize,
    cursor: usize,
}

impl SourcePicker {
    fn next(&mut self, graph: &EncapsulatedGraph, mode: PileMode) -> Option<usize> {
        let regions = graph.regions();
        let r = regions.len();
        let start = match self.policy {
            SourcePolicy::Drain => 0,
            SourcePolicy::RoundRobin => self.cursor,
        };
        let found = (0..r)
            .map(|offset| (start + offset) % r)
            .find(|&i| i != self.target && spare(regions[i], mode) > 0)?;
        self.cursor = (found + 1) % r;
        Some(found)
    }
}

/// Runs a pile experiment on an explicit graph.
pub fn run_pile(
    graph: &EncapsulatedGraph,
    target: usize,
    mode: PileMode,
    policy: SourcePolicy,
    checker: &Checker,
) -> Result<ExperimentSeries, ExperimentError> {
    let regions = graph.region_count();
    if regions < 2 {
        return Err(ExperimentError::TooFewRegions(regions));
    }
    if target >= regions {
        return Err(ExperimentError::TargetOutOfRange { target, regions });
    }

    let mut current = graph.clone();
    let mut points = vec![point(&current, mode, 0)];
    let mut sources = Vec::new();
    let mut picker = SourcePicker {
        policy,
        target,
        cursor: 0,
    };
    while let Some(from) = picker.next(&current, mode) {
        let t = match mode {
            PileMode::Hidden => Transformation::TranslateHidden {
                from,
                to: target,
                m: 1,
            },
            PileMode::Violational => Transformation::TranslateViolational {
                from,
                to: target,
                m: 1,
            },
        };
        let step = points.len() as u64;
        let (next, report) = checker
            .apply_checked(&current, &t)
            .map_err(|source| ExperimentError::Engine { step, source })?;
        let recorded = point(&next, mode, step);
        debug_assert_eq!(
            recorded.mpe as i64 - points[points.len() - 1].mpe as i64,
            report.total
        );
        points.push(recorded);
        sources.push(from);
        current = next;
    }

    Ok(ExperimentSeries {
        mode,
        target,
        policy,
        config: None,
        points,
        sources,
        summary: GraphSummary::of(&current),
        final_graph: current,
    })
}

/// Moves hidden nodes one at a time into `target` until no other region
/// holds any.
pub fn run_hidden_pile(
    graph: &EncapsulatedGraph,
    target: usize,
    policy: SourcePolicy,
) -> Result<ExperimentSeries, ExperimentError> {
    run_pile(
        graph,
        target,
        PileMode::Hidden,
        policy,
        &Checker::with_limit(DEFAULT_EXPERIMENT_ENUMERATION_LIMIT),
    )
}

/// Moves violational nodes one at a time into `target` until every other
/// region is down to at most one.
pub fn run_violational_pile(
    graph: &EncapsulatedGraph,
    target: usize,
    policy: SourcePolicy,
) -> Result<ExperimentSeries, ExperimentError> {
    run_pile(
        graph,
        target,
        PileMode::Violational,
        policy,
        &Checker::with_limit(DEFAULT_EXPERIMENT_ENUMERATION_LIMIT),
    )
}

/// Generates the seeded graph and runs the configured pile on it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSeries, ExperimentError> {
    let (graph, target) = prepare_run(config)?;
    let checker = Checker::with_limit(config.enumeration_limit);
    let mut series = run_pile(&graph, target, config.mode, config.policy, &checker)?;
    series.config = Some(*config);
    Ok(series)
}

/// Seed used for run `index` of a batch.
pub fn run_seed(master: u64, index: usize) -> u64 {
    master.wrapping_add(index as u64)
}

/// Runs `runs` experiments with seeds `seed, seed + 1, ...`, in run order.
pub fn run_batch(
    config: &ExperimentConfig,
    runs: usize,
) -> Result<Vec<ExperimentSeries>, ExperimentError> {
    if runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    config.validate()?;
    (0..runs)
        .map(|i| {
            run_experiment(&ExperimentConfig {
                seed: run_seed(config.seed, i),
                ..*config
            })
        })
        .collect()
}
