//! Encapsulated graphs of absolute information hiding and their static metrics.
//!
//! A graph is an ordered list of regions. Each region holds some information
//! hidden nodes (reachable only from inside the region) and some information
//! hiding violational nodes (reachable from anywhere). Only the counts matter:
//! a potential edge `(u, v)` exists iff `u != v` and `v` is in `u`'s region or
//! `v` is violational.

use std::fmt;

use thiserror::Error;

/// Largest total node count a graph may hold. Keeps `n * (n - 1)` and every
/// delta inside `i64`.
pub const MAX_NODES: u64 = i32::MAX as u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph holds {nodes} nodes, capacity is {MAX_NODES}")]
    CapacityExceeded { nodes: u128 },
    #[error("region index {index} out of range for a graph of {regions} regions")]
    RegionOutOfRange { index: usize, regions: usize },
    #[error("statistics need at least one region")]
    NoRegions,
    #[error("graph of {nodes} nodes exceeds the enumeration limit of {limit}")]
    EnumerationLimit { nodes: u64, limit: u64 },
}

/// Per-region node counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RegionSpec {
    pub hidden: u64,
    pub violational: u64,
}

impl RegionSpec {
    pub const EMPTY: RegionSpec = RegionSpec {
        hidden: 0,
        violational: 0,
    };

    pub const fn new(hidden: u64, violational: u64) -> Self {
        RegionSpec {
            hidden,
            violational,
        }
    }

    /// Total node count `|K|`.
    pub const fn size(&self) -> u64 {
        self.hidden + self.violational
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.hidden, self.violational)
    }
}

pub fn region_size(region: RegionSpec) -> u64 {
    region.size()
}

/// An ordered sequence of regions, indexed from zero.
///
/// The total node count never exceeds [`MAX_NODES`]; constructors reject
/// anything larger, so metric functions on a constructed graph are infallible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EncapsulatedGraph {
    regions: Vec<RegionSpec>,
}

impl EncapsulatedGraph {
    pub fn empty() -> Self {
        EncapsulatedGraph::default()
    }

    pub fn new(regions: Vec<RegionSpec>) -> Result<Self, GraphError> {
        let nodes: u128 = regions
            .iter()
            .map(|r| r.hidden as u128 + r.violational as u128)
            .sum();
        if nodes > MAX_NODES as u128 {
            return Err(GraphError::CapacityExceeded { nodes });
        }
        Ok(EncapsulatedGraph { regions })
    }

    /// Builds a graph from `(hidden, violational)` pairs.
    pub fn from_counts<I>(counts: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        Self::new(
            counts
                .into_iter()
                .map(|(h, v)| RegionSpec::new(h, v))
                .collect(),
        )
    }

    pub fn regions(&self) -> &[RegionSpec] {
        &self.regions
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn region(&self, index: usize) -> Result<RegionSpec, GraphError> {
        self.regions
            .get(index)
            .copied()
            .ok_or(GraphError::RegionOutOfRange {
                index,
                regions: self.regions.len(),
            })
    }

    /// Returns a copy with one more region appended.
    pub fn with_region(&self, region: RegionSpec) -> Result<Self, GraphError> {
        let mut regions = self.regions.clone();
        regions.push(region);
        Self::new(regions)
    }

    /// Returns a copy with region `index` replaced.
    pub fn with_region_replaced(
        &self,
        index: usize,
        region: RegionSpec,
    ) -> Result<Self, GraphError> {
        self.region(index)?;
        let mut regions = self.regions.clone();
        regions[index] = region;
        Self::new(regions)
    }

    /// Total node count `n`.
    pub fn node_count(&self) -> u64 {
        self.regions.iter().map(RegionSpec::size).sum()
    }

    /// Total violational node count `|h(G)|`.
    pub fn violational_count(&self) -> u64 {
        self.regions.iter().map(|r| r.violational).sum()
    }

    pub fn hidden_count(&self) -> u64 {
        self.regions.iter().map(|r| r.hidden).sum()
    }

    pub fn into_regions(self) -> Vec<RegionSpec> {
        self.regions
    }
}

impl fmt::Display for EncapsulatedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, region) in self.regions.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{region}")?;
        }
        Ok(())
    }
}

/// Node totals `(n, |h(G)|)`.
pub fn totals(graph: &EncapsulatedGraph) -> (u64, u64) {
    (graph.node_count(), graph.violational_count())
}

/// Internal MPE of a region: `|K| (|K| - 1)`.
pub fn internal_mpe(region: RegionSpec) -> u64 {
    let size = region.size();
    size * size.saturating_sub(1)
}

/// External MPE of region `index`: `|K_i| (|h(G)| - |h(K_i)|)`.
pub fn external_mpe(graph: &EncapsulatedGraph, index: usize) -> Result<u64, GraphError> {
    let region = graph.region(index)?;
    Ok(external_mpe_with(region, graph.violational_count()))
}

fn external_mpe_with(region: RegionSpec, graph_violational: u64) -> u64 {
    region.size() * (graph_violational - region.violational)
}

/// Internal and external split of a graph's maximum potential number of edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MpeBreakdown {
    pub internal: u64,
    pub external: u64,
    pub total: u64,
}

impl MpeBreakdown {
    pub fn new(internal: u64, external: u64) -> Self {
        MpeBreakdown {
            internal,
            external,
            total: internal + external,
        }
    }
}

pub fn mpe(graph: &EncapsulatedGraph) -> MpeBreakdown {
    let h = graph.violational_count();
    let (internal, external) = graph.regions.iter().fold((0u64, 0u64), |(si, se), &k| {
        (si + internal_mpe(k), se + external_mpe_with(k, h))
    });
    MpeBreakdown::new(internal, external)
}

/// Default node limit for [`brute_force_mpe`].
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 5000;

/// Counts permitted ordered node pairs by enumerating every pair of
/// materialised nodes. Quadratic; used as an independent check on [`mpe`].
pub fn brute_force_mpe(graph: &EncapsulatedGraph) -> Result<u64, GraphError> {
    brute_force_mpe_limited(graph, DEFAULT_ENUMERATION_LIMIT)
}

pub fn brute_force_mpe_limited(graph: &EncapsulatedGraph, limit: u64) -> Result<u64, GraphError> {
    let nodes = graph.node_count();
    if nodes > limit {
        return Err(GraphError::EnumerationLimit { nodes, limit });
    }
    // (region, violational?) per node
    let mut materialised = Vec::with_capacity(nodes as usize);
    for (i, region) in graph.regions.iter().enumerate() {
        materialised.extend(std::iter::repeat_n((i, false), region.hidden as usize));
        materialised.extend(std::iter::repeat_n((i, true), region.violational as usize));
    }
    let mut count = 0u64;
    for (u, &(u_region, _)) in materialised.iter().enumerate() {
        for (v, &(v_region, v_violational)) in materialised.iter().enumerate() {
            if u != v && (u_region == v_region || v_violational) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Per-region counts with their mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionStats {
    pub values: Vec<u64>,
    pub mean: f64,
    pub stddev: f64,
}

impl DistributionStats {
    pub fn from_values(values: Vec<u64>) -> Result<Self, GraphError> {
        if values.is_empty() {
            return Err(GraphError::NoRegions);
        }
        let r = values.len() as u128;
        let sum: u128 = values.iter().map(|&x| x as u128).sum();
        let sum_sq: u128 = values.iter().map(|&x| (x as u128) * (x as u128)).sum();
        // r^2 * variance, exact; zero iff all values are equal
        let scaled_variance = r * sum_sq - sum * sum;
        let stddev = (scaled_variance as f64).sqrt() / r as f64;
        Ok(DistributionStats {
            mean: sum as f64 / r as f64,
            stddev,
            values,
        })
    }
}

pub fn hidden_stddev(graph: &EncapsulatedGraph) -> Result<DistributionStats, GraphError> {
    DistributionStats::from_values(graph.regions.iter().map(|r| r.hidden).collect())
}

pub fn violational_stddev(graph: &EncapsulatedGraph) -> Result<DistributionStats, GraphError> {
    DistributionStats::from_values(graph.regions.iter().map(|r| r.violational).collect())
}

/// Configuration efficiency `1 - s(G) / (n (n - 1))`, or `1.0` when `n <= 1`.
pub fn configuration_efficiency(graph: &EncapsulatedGraph) -> f64 {
    efficiency_from(mpe(graph).total, graph.node_count())
}

pub(crate) fn efficiency_from(total_mpe: u64, nodes: u64) -> f64 {
    if nodes <= 1 {
        return 1.0;
    }
    let ceiling = nodes * (nodes - 1);
    1.0 - total_mpe as f64 / ceiling as f64
}
