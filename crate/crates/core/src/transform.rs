//! The five graph transformations and their closed-form MPE deltas.
//!
//! Two transformations are fundamental (adding violational or hidden nodes to
//! one region, with signed magnitude). The other three are compositions of
//! two fundamental steps: moving violational nodes, moving hidden nodes, and
//! converting hidden nodes into violational ones.

use std::fmt;

use thiserror::Error;

use crate::graph::{
    brute_force_mpe_limited, mpe, EncapsulatedGraph, GraphError, MpeBreakdown, RegionSpec,
    DEFAULT_ENUMERATION_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Hidden,
    Violational,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Hidden => "hidden",
            NodeKind::Violational => "violational",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    AddViolational,
    AddHidden,
    TranslateViolational,
    TranslateHidden,
    Convert,
}

impl TransformKind {
    pub const ALL: [TransformKind; 5] = [
        TransformKind::AddViolational,
        TransformKind::AddHidden,
        TransformKind::TranslateViolational,
        TransformKind::TranslateHidden,
        TransformKind::Convert,
    ];

    pub fn is_fundamental(self) -> bool {
        matches!(
            self,
            TransformKind::AddViolational | TransformKind::AddHidden
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::AddViolational => "add-violational",
            TransformKind::AddHidden => "add-hidden",
            TransformKind::TranslateViolational => "translate-violational",
            TransformKind::TranslateHidden => "translate-hidden",
            TransformKind::Convert => "convert",
        }
    }
}

/// A single graph edit.
///
/// Negative `m` on the single-region kinds removes nodes (for `Convert`,
/// turns violational nodes back into hidden ones). Translations carry
/// `m >= 0`; the direction is given by `from` and `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transformation {
    AddViolational { region: usize, m: i64 },
    AddHidden { region: usize, m: i64 },
    TranslateViolational { from: usize, to: usize, m: i64 },
    TranslateHidden { from: usize, to: usize, m: i64 },
    Convert { region: usize, m: i64 },
}

impl Transformation {
    pub fn kind(&self) -> TransformKind {
        match self {
            Transformation::AddViolational { .. } => TransformKind::AddViolational,
            Transformation::AddHidden { .. } => TransformKind::AddHidden,
            Transformation::TranslateViolational { .. } => TransformKind::TranslateViolational,
            Transformation::TranslateHidden { .. } => TransformKind::TranslateHidden,
            Transformation::Convert { .. } => TransformKind::Convert,
        }
    }

    pub fn magnitude(&self) -> i64 {
        match *self {
            Transformation::AddViolational { m, .. }
            | Transformation::AddHidden { m, .. }
            | Transformation::TranslateViolational { m, .. }
            | Transformation::TranslateHidden { m, .. }
            | Transformation::Convert { m, .. } => m,
        }
    }

    /// The same edit with magnitude negated. For translations this swaps
    /// source and target instead, keeping `m >= 0`.
    pub fn inverse(&self) -> Transformation {
        match *self {
            Transformation::AddViolational { region, m } => {
                Transformation::AddViolational { region, m: -m }
            }
            Transformation::AddHidden { region, m } => Transformation::AddHidden { region, m: -m },
            Transformation::TranslateViolational { from, to, m } => {
                Transformation::TranslateViolational {
                    from: to,
                    to: from,
                    m,
                }
            }
            Transformation::TranslateHidden { from, to, m } => Transformation::TranslateHidden {
                from: to,
                to: from,
                m,
            },
            Transformation::Convert { region, m } => Transformation::Convert { region, m: -m },
        }
    }

    /// The two fundamental steps a derived transformation is composed of, in
    /// application order. `None` for fundamental kinds.
    pub fn fundamental_steps(&self) -> Option<[Transformation; 2]> {
        match *self {
            Transformation::AddViolational { .. } | Transformation::AddHidden { .. } => None,
            Transformation::TranslateViolational { from, to, m } => Some([
                Transformation::AddViolational {
                    region: from,
                    m: -m,
                },
                Transformation::AddViolational { region: to, m },
            ]),
            Transformation::TranslateHidden { from, to, m } => Some([
                Transformation::AddHidden {
                    region: from,
                    m: -m,
                },
                Transformation::AddHidden { region: to, m },
            ]),
            Transformation::Convert { region, m } => Some([
                Transformation::AddHidden { region, m: -m },
                Transformation::AddViolational { region, m },
            ]),
        }
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Transformation::AddViolational { region, m }
            | Transformation::AddHidden { region, m }
            | Transformation::Convert { region, m } => {
                write!(f, "{} region={region} m={m}", self.kind().name())
            }
            Transformation::TranslateViolational { from, to, m }
            | Transformation::TranslateHidden { from, to, m } => {
                write!(f, "{} from={from} to={to} m={m}", self.kind().name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("region index {index} out of range for a graph of {regions} regions")]
    RegionOutOfRange { index: usize, regions: usize },
    #[error("translation source and target are both region {region}")]
    SameRegion { region: usize },
    #[error("translation magnitude must be non-negative, got {m}")]
    NegativeTranslation { m: i64 },
    #[error("region {region} has {available} {kind} nodes, {requested} requested (short by {shortfall})")]
    Underflow {
        region: usize,
        kind: NodeKind,
        available: u64,
        requested: u64,
        shortfall: u64,
    },
    #[error("transformation would exceed the graph capacity")]
    Capacity(#[source] GraphError),
}

/// Predicted MPE change. The internal/external split is only reported for
/// the two fundamental kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeltaReport {
    pub total: i64,
    pub internal: Option<i64>,
    pub external: Option<i64>,
}

impl DeltaReport {
    fn split(internal: i64, external: i64) -> Self {
        DeltaReport {
            total: internal + external,
            internal: Some(internal),
            external: Some(external),
        }
    }

    fn cumulative(total: i64) -> Self {
        DeltaReport {
            total,
            internal: None,
            external: None,
        }
    }
}

fn check_index(graph: &EncapsulatedGraph, index: usize) -> Result<RegionSpec, TransformError> {
    graph
        .region(index)
        .map_err(|_| TransformError::RegionOutOfRange {
            index,
            regions: graph.region_count(),
        })
}

fn check_removal(
    region: usize,
    kind: NodeKind,
    available: u64,
    m: i64,
) -> Result<(), TransformError> {
    let requested = m.unsigned_abs();
    if m < 0 && requested > available {
        return Err(TransformError::Underflow {
            region,
            kind,
            available,
            requested,
            shortfall: requested - available,
        });
    }
    Ok(())
}

fn check_translation(
    graph: &EncapsulatedGraph,
    from: usize,
    to: usize,
    m: i64,
) -> Result<(RegionSpec, RegionSpec), TransformError> {
    let source = check_index(graph, from)?;
    let target = check_index(graph, to)?;
    if from == to {
        return Err(TransformError::SameRegion { region: from });
    }
    if m < 0 {
        return Err(TransformError::NegativeTranslation { m });
    }
    Ok((source, target))
}

/// Checks that `t` names existing regions and keeps every count non-negative.
pub fn validate(graph: &EncapsulatedGraph, t: &Transformation) -> Result<(), TransformError> {
    match *t {
        Transformation::AddViolational { region, m } => {
            let k = check_index(graph, region)?;
            check_removal(region, NodeKind::Violational, k.violational, m)
        }
        Transformation::AddHidden { region, m } => {
            let k = check_index(graph, region)?;
            check_removal(region, NodeKind::Hidden, k.hidden, m)
        }
        Transformation::TranslateViolational { from, to, m } => {
            let (source, _) = check_translation(graph, from, to, m)?;
            check_removal(from, NodeKind::Violational, source.violational, -m)
        }
        Transformation::TranslateHidden { from, to, m } => {
            let (source, _) = check_translation(graph, from, to, m)?;
            check_removal(from, NodeKind::Hidden, source.hidden, -m)
        }
        Transformation::Convert { region, m } => {
            let k = check_index(graph, region)?;
            check_removal(region, NodeKind::Hidden, k.hidden, -m)?;
            check_removal(region, NodeKind::Violational, k.violational, m)
        }
    }?;
    let grows = t.kind().is_fundamental() && t.magnitude() > 0;
    if grows {
        let nodes = graph.node_count() as u128 + t.magnitude() as u128;
        if nodes > crate::graph::MAX_NODES as u128 {
            return Err(TransformError::Capacity(GraphError::CapacityExceeded {
                nodes,
            }));
        }
    }
    Ok(())
}

/// Closed-form MPE change of applying `t` to `graph`.
pub fn predict_delta(
    graph: &EncapsulatedGraph,
    t: &Transformation,
) -> Result<DeltaReport, TransformError> {
    validate(graph, t)?;
    let n = graph.node_count() as i64;
    let h = graph.violational_count() as i64;
    let size = |k: RegionSpec| k.size() as i64;
    let viol = |k: RegionSpec| k.violational as i64;
    let region = |i: usize| graph.regions()[i];

    let report = match *t {
        Transformation::AddViolational { region: x, m } => {
            let k = region(x);
            let internal = 2 * m * size(k) + m * m - m;
            let external = m * n - m * size(k) + m * h - m * viol(k);
            DeltaReport::split(internal, external)
        }
        Transformation::AddHidden { region: x, m } => {
            let k = region(x);
            let internal = 2 * m * size(k) + m * m - m;
            let external = m * h - m * viol(k);
            DeltaReport::split(internal, external)
        }
        Transformation::TranslateViolational { from, to, m } => {
            let (s, t) = (region(from), region(to));
            DeltaReport::cumulative(m * (size(t) - viol(t) - (size(s) - viol(s))))
        }
        Transformation::TranslateHidden { from, to, m } => {
            let (s, t) = (region(from), region(to));
            DeltaReport::cumulative(m * (2 * size(t) - 2 * size(s) + viol(s) - viol(t) + 2 * m))
        }
        Transformation::Convert { region: x, m } => {
            DeltaReport::cumulative(m * (n - size(region(x))))
        }
    };
    Ok(report)
}

fn shift(count: u64, by: i64) -> u64 {
    count
        .checked_add_signed(by)
        .expect("validated count stays non-negative")
}

/// Returns the transformed graph. `graph` itself is never modified.
pub fn apply(
    graph: &EncapsulatedGraph,
    t: &Transformation,
) -> Result<EncapsulatedGraph, TransformError> {
    validate(graph, t)?;
    let mut regions = graph.regions().to_vec();
    match *t {
        Transformation::AddViolational { region, m } => {
            regions[region].violational = shift(regions[region].violational, m);
        }
        Transformation::AddHidden { region, m } => {
            regions[region].hidden = shift(regions[region].hidden, m);
        }
        Transformation::TranslateViolational { from, to, m } => {
            regions[from].violational = shift(regions[from].violational, -m);
            regions[to].violational = shift(regions[to].violational, m);
        }
        Transformation::TranslateHidden { from, to, m } => {
            regions[from].hidden = shift(regions[from].hidden, -m);
            regions[to].hidden = shift(regions[to].hidden, m);
        }
        Transformation::Convert { region, m } => {
            regions[region].hidden = shift(regions[region].hidden, -m);
            regions[region].violational = shift(regions[region].violational, m);
        }
    }
    EncapsulatedGraph::new(regions).map_err(TransformError::Capacity)
}

/// Signature shared by [`predict_delta`] and any substitute predictor a
/// [`Checker`] is pointed at.
pub type Predictor = fn(&EncapsulatedGraph, &Transformation) -> Result<DeltaReport, TransformError>;

/// Which part of a checked application disagreed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStage {
    /// Closed-form total against recomputed `s(after) - s(before)`.
    Total,
    Internal,
    External,
    /// Derived-kind total against the sum of its two fundamental steps.
    Composition,
    /// Closed-form `s(G)` against brute-force enumeration.
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage:?} mismatch for {transformation} on {graph}: predicted {predicted}, recomputed {recomputed}")]
pub struct Mismatch {
    pub stage: CheckStage,
    pub transformation: Transformation,
    pub graph: EncapsulatedGraph,
    pub predicted: i64,
    pub recomputed: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Invalid(#[from] TransformError),
    #[error(transparent)]
    Mismatch(#[from] Box<Mismatch>),
}

/// Applies transformations while asserting that the closed-form delta agrees
/// with recomputation.
///
/// The recomputed MPE always uses the closed-form `s(G)`. When both the
/// before and after graphs hold at most `enumeration_limit` nodes, `s(G)` is
/// additionally confirmed by brute-force pair enumeration.
#[derive(Debug, Clone, Copy)]
pub struct Checker {
    pub enumeration_limit: u64,
    pub predictor: Predictor,
}

impl Default for Checker {
    fn default() -> Self {
        Checker {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            predictor: predict_delta,
        }
    }
}

impl Checker {
    /// Recomputation only; never enumerates pairs.
    pub fn shallow() -> Self {
        Checker {
            enumeration_limit: 0,
            ..Checker::default()
        }
    }

    pub fn with_limit(enumeration_limit: u64) -> Self {
        Checker {
            enumeration_limit,
            ..Checker::default()
        }
    }

    pub fn with_predictor(self, predictor: Predictor) -> Self {
        Checker { predictor, ..self }
    }

    fn measured(
        &self,
        graph: &EncapsulatedGraph,
        t: &Transformation,
    ) -> Result<MpeBreakdown, Box<Mismatch>> {
        let breakdown = mpe(graph);
        if graph.node_count() > 0 && graph.node_count() <= self.enumeration_limit {
            let counted = brute_force_mpe_limited(graph, self.enumeration_limit)
                .expect("node count checked against limit");
            if counted != breakdown.total {
                return Err(Box::new(Mismatch {
                    stage: CheckStage::Enumeration,
                    transformation: *t,
                    graph: graph.clone(),
                    predicted: breakdown.total as i64,
                    recomputed: counted as i64,
                }));
            }
        }
        Ok(breakdown)
    }

    pub fn apply_checked(
        &self,
        graph: &EncapsulatedGraph,
        t: &Transformation,
    ) -> Result<(EncapsulatedGraph, DeltaReport), CheckError> {
        let report = (self.predictor)(graph, t)?;
        let after = apply(graph, t)?;
        let before_mpe = self.measured(graph, t)?;
        let after_mpe = self.measured(&after, t)?;

        let mismatch = |stage, predicted: i64, recomputed: i64| -> CheckError {
            CheckError::Mismatch(Box::new(Mismatch {
                stage,
                transformation: *t,
                graph: graph.clone(),
                predicted,
                recomputed,
            }))
        };

        let recomputed = after_mpe.total as i64 - before_mpe.total as i64;
        if report.total != recomputed {
            return Err(mismatch(CheckStage::Total, report.total, recomputed));
        }
        match t.fundamental_steps() {
            None => {
                let internal = after_mpe.internal as i64 - before_mpe.internal as i64;
                let external = after_mpe.external as i64 - before_mpe.external as i64;
                let predicted_internal = report.internal.unwrap_or(i64::MIN);
                let predicted_external = report.external.unwrap_or(i64::MIN);
                if predicted_internal != internal {
                    return Err(mismatch(CheckStage::Internal, predicted_internal, internal));
                }
                if predicted_external != external {
                    return Err(mismatch(CheckStage::External, predicted_external, external));
                }
            }
            Some([first, second]) => {
                let first_delta = (self.predictor)(graph, &first)?.total;
                let midway = apply(graph, &first)?;
                let second_delta = (self.predictor)(&midway, &second)?.total;
                let composed = first_delta + second_delta;
                if composed != report.total {
                    return Err(mismatch(CheckStage::Composition, report.total, composed));
                }
            }
        }
        Ok((after, report))
    }
}

/// [`Checker::apply_checked`] with the default checker.
pub fn apply_checked(
    graph: &EncapsulatedGraph,
    t: &Transformation,
) -> Result<(EncapsulatedGraph, DeltaReport), CheckError> {
    Checker::default().apply_checked(graph, t)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} ({transformation}) is invalid: {source}")]
pub struct SequenceError {
    pub index: usize,
    pub transformation: Transformation,
    #[source]
    pub source: TransformError,
}

/// Folds `apply` over `ts`, returning the final graph and the cumulative delta.
/// Nothing is returned on failure; the input graph is untouched either way.
pub fn apply_sequence(
    graph: &EncapsulatedGraph,
    ts: &[Transformation],
) -> Result<(EncapsulatedGraph, i64), SequenceError> {
    let mut current = graph.clone();
    let mut cumulative = 0i64;
    for (index, t) in ts.iter().enumerate() {
        let step = predict_delta(&current, t)
            .and_then(|d| apply(&current, t).map(|g| (g, d)))
            .map_err(|source| SequenceError {
                index,
                transformation: *t,
                source,
            })?;
        cumulative += step.1.total;
        current = step.0;
    }
    Ok((current, cumulative))
}
