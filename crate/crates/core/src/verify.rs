//! Randomized differential check of every closed-form delta against
//! brute-force recomputation, plus the algebraic properties the formulas
//! imply.
//!
//! Case `i` of a run seeded with `s` draws from a ChaCha stream selected by
//! `(s, i)`, so any single case can be replayed on its own.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{brute_force_mpe_limited, mpe, EncapsulatedGraph, RegionSpec};
use crate::transform::{apply, CheckError, Checker, TransformError, TransformKind, Transformation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub cases: u64,
    pub max_regions: usize,
    pub max_count: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            cases: 1000,
            max_regions: 10,
            max_count: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// Closed-form delta equals recomputation (with split and composition checks).
    Oracle,
    /// Fundamental internal + external = total, each matching recomputation.
    Additivity,
    /// Adding violational beats adding hidden by `m (n - |K_x|)`.
    Dominance,
    /// Moving violational nodes between equal-hidden regions changes nothing.
    ZeroDelta,
    /// Conversion delta is `m (n - |K_x|)` with the sign of `m`.
    Conversion,
    /// A transformation followed by its inverse restores the graph.
    Reversibility,
    /// Appending an empty region leaves the MPE unchanged.
    EmptyRegion,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Oracle,
        Property::Additivity,
        Property::Dominance,
        Property::ZeroDelta,
        Property::Conversion,
        Property::Reversibility,
        Property::EmptyRegion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Oracle => "oracle",
            Property::Additivity => "additivity",
            Property::Dominance => "dominance",
            Property::ZeroDelta => "zero-delta",
            Property::Conversion => "conversion",
            Property::Reversibility => "reversibility",
            Property::EmptyRegion => "empty-region",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub cases: u64,
    /// Passed checks per property, in [`Property::ALL`] order.
    pub passed: [u64; 7],
}

impl VerifyReport {
    pub fn passed(&self, property: Property) -> u64 {
        self.passed[property as usize]
    }

    fn pass(&mut self, property: Property) {
        self.passed[property as usize] += 1;
    }
}

/// A failed check with enough context to replay it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyFailure {
    pub seed: u64,
    pub case: u64,
    pub property: Property,
    pub graph: EncapsulatedGraph,
    pub transformation: Option<Transformation>,
    pub detail: String,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FAIL {} seed={} case={} graph={}",
            self.property.name(),
            self.seed,
            self.case,
            self.graph
        )?;
        if let Some(t) = &self.transformation {
            write!(f, " transformation=[{t}]")?;
        }
        write!(f, ": {}", self.detail)
    }
}

impl std::error::Error for VerifyFailure {}

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

pub fn random_graph(rng: &mut impl Rng, max_regions: usize, max_count: u64) -> EncapsulatedGraph {
    let regions = rng.random_range(1..=max_regions.max(1));
    EncapsulatedGraph::new(
        (0..regions)
            .map(|_| {
                RegionSpec::new(
                    rng.random_range(0..=max_count),
                    rng.random_range(0..=max_count),
                )
            })
            .collect(),
    )
    .expect("small graphs fit")
}

fn signed_in(rng: &mut impl Rng, low: i64, high: i64) -> i64 {
    rng.random_range(low..=high)
}

fn two_regions(rng: &mut impl Rng, regions: usize) -> (usize, usize) {
    let from = rng.random_range(0..regions);
    let to = (from + rng.random_range(1..regions)) % regions;
    (from, to)
}

/// A transformation of `kind` that is valid on `graph`. Translations need at
/// least two regions.
pub fn random_transformation(
    rng: &mut impl Rng,
    graph: &EncapsulatedGraph,
    kind: TransformKind,
    max_count: u64,
) -> Transformation {
    let r = graph.region_count();
    let region = rng.random_range(0..r);
    let k = graph.regions()[region];
    let grow = max_count as i64;
    match kind {
        TransformKind::AddViolational => Transformation::AddViolational {
            region,
            m: signed_in(rng, -(k.violational as i64), grow),
        },
        TransformKind::AddHidden => Transformation::AddHidden {
            region,
            m: signed_in(rng, -(k.hidden as i64), grow),
        },
        TransformKind::TranslateViolational => {
            let (from, to) = two_regions(rng, r);
            let m = rng.random_range(0..=graph.regions()[from].violational) as i64;
            Transformation::TranslateViolational { from, to, m }
        }
        TransformKind::TranslateHidden => {
            let (from, to) = two_regions(rng, r);
            let m = rng.random_range(0..=graph.regions()[from].hidden) as i64;
            Transformation::TranslateHidden { from, to, m }
        }
        TransformKind::Convert => Transformation::Convert {
            region,
            m: signed_in(rng, -(k.violational as i64), k.hidden as i64),
        },
    }
}

fn random_kind(rng: &mut impl Rng, regions: usize) -> TransformKind {
    let kinds: &[TransformKind] = if regions >= 2 {
        &TransformKind::ALL
    } else {
        &[
            TransformKind::AddViolational,
            TransformKind::AddHidden,
            TransformKind::Convert,
        ]
    };
    kinds[rng.random_range(0..kinds.len())]
}

struct Case<'a> {
    seed: u64,
    case: u64,
    checker: &'a Checker,
    limit: u64,
}

impl Case<'_> {
    fn fail(
        &self,
        property: Property,
        graph: &EncapsulatedGraph,
        t: Option<Transformation>,
        detail: String,
    ) -> VerifyFailure {
        VerifyFailure {
            seed: self.seed,
            case: self.case,
            property,
            graph: graph.clone(),
            transformation: t,
            detail,
        }
    }

    fn predict(
        &self,
        property: Property,
        graph: &EncapsulatedGraph,
        t: &Transformation,
    ) -> Result<i64, VerifyFailure> {
        (self.checker.predictor)(graph, t)
            .map(|r| r.total)
            .map_err(|e: TransformError| {
                self.fail(property, graph, Some(*t), format!("rejected: {e}"))
            })
    }

    fn counted(&self, graph: &EncapsulatedGraph) -> i64 {
        brute_force_mpe_limited(graph, self.limit).expect("verification graphs stay small") as i64
    }

    /// Brute-force `s(t(G)) - s(G)`.
    fn counted_delta(
        &self,
        property: Property,
        graph: &EncapsulatedGraph,
        t: &Transformation,
    ) -> Result<i64, VerifyFailure> {
        let after = apply(graph, t)
            .map_err(|e| self.fail(property, graph, Some(*t), format!("apply failed: {e}")))?;
        Ok(self.counted(&after) - self.counted(graph))
    }

    fn expect_eq(
        &self,
        property: Property,
        graph: &EncapsulatedGraph,
        t: Option<Transformation>,
        what: &str,
        got: i64,
        want: i64,
    ) -> Result<(), VerifyFailure> {
        if got == want {
            Ok(())
        } else {
            Err(self.fail(
                property,
                graph,
                t,
                format!("{what}: got {got}, expected {want}"),
            ))
        }
    }

    fn run(
        &self,
        rng: &mut ChaCha8Rng,
        config: &VerifyConfig,
        report: &mut VerifyReport,
    ) -> Result<(), VerifyFailure> {
        let graph = random_graph(rng, config.max_regions, config.max_count);
        let r = graph.region_count();
        let n = graph.node_count() as i64;

        // oracle: one transformation of any kind
        let kind = random_kind(rng, r);
        let t = random_transformation(rng, &graph, kind, config.max_count);
        let (after, _) = self
            .checker
            .apply_checked(&graph, &t)
            .map_err(|e| match e {
                CheckError::Mismatch(m) => {
                    self.fail(Property::Oracle, &graph, Some(t), m.to_string())
                }
                CheckError::Invalid(e) => {
                    self.fail(Property::Oracle, &graph, Some(t), format!("rejected: {e}"))
                }
            })?;
        let counted = self.counted(&after) - self.counted(&graph);
        self.expect_eq(
            Property::Oracle,
            &graph,
            Some(t),
            "delta vs enumeration",
            self.predict(Property::Oracle, &graph, &t)?,
            counted,
        )?;
        report.pass(Property::Oracle);

        // additivity: a fundamental transformation's split against recomputed components
        let kind =
            [TransformKind::AddViolational, TransformKind::AddHidden][rng.random_range(0..2)];
        let t = random_transformation(rng, &graph, kind, config.max_count);
        let split = (self.checker.predictor)(&graph, &t).map_err(|e| {
            self.fail(
                Property::Additivity,
                &graph,
                Some(t),
                format!("rejected: {e}"),
            )
        })?;
        let (before_mpe, after_mpe) = (
            mpe(&graph),
            mpe(&apply(&graph, &t).expect("valid by construction")),
        );
        let internal = split.internal.unwrap_or(i64::MIN);
        let external = split.external.unwrap_or(i64::MIN);
        self.expect_eq(
            Property::Additivity,
            &graph,
            Some(t),
            "internal + external",
            internal.wrapping_add(external),
            split.total,
        )?;
        self.expect_eq(
            Property::Additivity,
            &graph,
            Some(t),
            "internal",
            internal,
            after_mpe.internal as i64 - before_mpe.internal as i64,
        )?;
        self.expect_eq(
            Property::Additivity,
            &graph,
            Some(t),
            "external",
            external,
            after_mpe.external as i64 - before_mpe.external as i64,
        )?;
        self.expect_eq(
            Property::Additivity,
            &graph,
            Some(t),
            "total vs enumeration",
            split.total,
            self.counted_delta(Property::Additivity, &graph, &t)?,
        )?;
        report.pass(Property::Additivity);

        // dominance
        let x = rng.random_range(0..r);
        let m = rng.random_range(1..=config.max_count.max(1)) as i64;
        let size = graph.regions()[x].size() as i64;
        let add_v = Transformation::AddViolational { region: x, m };
        let add_h = Transformation::AddHidden { region: x, m };
        let gap = self.predict(Property::Dominance, &graph, &add_v)?
            - self.predict(Property::Dominance, &graph, &add_h)?;
        self.expect_eq(
            Property::Dominance,
            &graph,
            Some(add_v),
            "violational minus hidden",
            gap,
            m * (n - size),
        )?;
        let counted_gap = self.counted_delta(Property::Dominance, &graph, &add_v)?
            - self.counted_delta(Property::Dominance, &graph, &add_h)?;
        self.expect_eq(
            Property::Dominance,
            &graph,
            Some(add_v),
            "enumerated gap",
            counted_gap,
            gap,
        )?;
        if gap < 0 || (gap == 0) != (n == size) {
            return Err(self.fail(
                Property::Dominance,
                &graph,
                Some(add_v),
                format!("gap {gap} with n={n}, |K_x|={size}"),
            ));
        }
        report.pass(Property::Dominance);

        // zero-delta: equalize two regions' hidden counts, then move violational nodes
        if r >= 2 {
            let (from, to) = two_regions(rng, r);
            let source = graph.regions()[from];
            let mut target = graph.regions()[to];
            target.hidden = source.hidden;
            let leveled = graph
                .with_region_replaced(to, target)
                .expect("same size class");
            let m = rng.random_range(0..=source.violational) as i64;
            let t = Transformation::TranslateViolational { from, to, m };
            self.expect_eq(
                Property::ZeroDelta,
                &leveled,
                Some(t),
                "predicted",
                self.predict(Property::ZeroDelta, &leveled, &t)?,
                0,
            )?;
            self.expect_eq(
                Property::ZeroDelta,
                &leveled,
                Some(t),
                "enumerated",
                self.counted_delta(Property::ZeroDelta, &leveled, &t)?,
                0,
            )?;
            report.pass(Property::ZeroDelta);
        }

        // conversion
        let t = random_transformation(rng, &graph, TransformKind::Convert, config.max_count);
        let Transformation::Convert { region: x, m } = t else {
            unreachable!()
        };
        let size = graph.regions()[x].size() as i64;
        let delta = self.predict(Property::Conversion, &graph, &t)?;
        self.expect_eq(
            Property::Conversion,
            &graph,
            Some(t),
            "predicted",
            delta,
            m * (n - size),
        )?;
        self.expect_eq(
            Property::Conversion,
            &graph,
            Some(t),
            "enumerated",
            self.counted_delta(Property::Conversion, &graph, &t)?,
            delta,
        )?;
        let expected_sign = if n == size { 0 } else { m.signum() };
        self.expect_eq(
            Property::Conversion,
            &graph,
            Some(t),
            "sign",
            delta.signum(),
            expected_sign,
        )?;
        let negated = self.predict(
            Property::Conversion,
            &graph,
            &Transformation::Convert { region: x, m: -m },
        );
        // the negated conversion is only valid when the other kind has enough nodes
        if let Ok(negated) = negated {
            self.expect_eq(
                Property::Conversion,
                &graph,
                Some(t),
                "negated m",
                negated,
                -delta,
            )?;
        }
        report.pass(Property::Conversion);

        // reversibility
        let kind = random_kind(rng, r);
        let t = random_transformation(rng, &graph, kind, config.max_count);
        let forward = self.predict(Property::Reversibility, &graph, &t)?;
        let moved = apply(&graph, &t).expect("valid by construction");
        let inverse = t.inverse();
        let backward = self.predict(Property::Reversibility, &moved, &inverse)?;
        let restored = apply(&moved, &inverse).expect("inverse of a valid step is valid");
        if restored != graph {
            return Err(self.fail(
                Property::Reversibility,
                &graph,
                Some(t),
                format!("restored to {restored}"),
            ));
        }
        self.expect_eq(
            Property::Reversibility,
            &graph,
            Some(t),
            "forward + backward",
            forward + backward,
            0,
        )?;
        report.pass(Property::Reversibility);

        // empty region append
        let padded = graph.with_region(RegionSpec::EMPTY).expect("no new nodes");
        if mpe(&padded) != mpe(&graph) {
            return Err(self.fail(
                Property::EmptyRegion,
                &graph,
                None,
                format!("{:?} vs {:?}", mpe(&padded), mpe(&graph)),
            ));
        }
        self.expect_eq(
            Property::EmptyRegion,
            &graph,
            None,
            "enumerated",
            self.counted(&padded),
            self.counted(&graph),
        )?;
        report.pass(Property::EmptyRegion);

        Ok(())
    }
}

/// Runs `config.cases` random cases through `checker`, stopping at the first
/// failure.
pub fn run_verification(
    config: &VerifyConfig,
    checker: &Checker,
) -> Result<VerifyReport, VerifyFailure> {
    // largest graph a case can produce: every region grown by max_count twice
    let bound = (config.max_regions.max(1) as u64 + 1) * (4 * config.max_count + 2);
    let mut report = VerifyReport::default();
    for case in 0..config.cases {
        let mut rng = case_rng(config.seed, case);
        let runner = Case {
            seed: config.seed,
            case,
            checker,
            limit: bound.max(checker.enumeration_limit),
        };
        runner.run(&mut rng, config, &mut report)?;
        report.cases += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{predict_delta, DeltaReport};

    #[test]
    fn default_run_passes() {
        let report = run_verification(
            &VerifyConfig {
                cases: 300,
                ..VerifyConfig::default()
            },
            &Checker::default(),
        )
        .unwrap();
        assert_eq!(report.cases, 300);
        for p in Property::ALL {
            assert!(report.passed(p) > 0, "{}", p.name());
        }
        assert_eq!(report.passed(Property::Oracle), 300);
    }

    #[test]
    fn single_case_is_repeatable() {
        let config = VerifyConfig {
            cases: 1,
            seed: 77,
            ..VerifyConfig::default()
        };
        let a = run_verification(&config, &Checker::default()).unwrap();
        let b = run_verification(&config, &Checker::default()).unwrap();
        assert_eq!(a, b);
        let mut r1 = case_rng(77, 5);
        let mut r2 = case_rng(77, 5);
        assert_eq!(random_graph(&mut r1, 10, 8), random_graph(&mut r2, 10, 8));
    }

    fn swapped_translation(
        graph: &EncapsulatedGraph,
        t: &Transformation,
    ) -> Result<DeltaReport, TransformError> {
        match *t {
            Transformation::TranslateHidden { from, to, m } => predict_delta(
                graph,
                &Transformation::TranslateHidden {
                    from: to,
                    to: from,
                    m,
                },
            )
            .or(predict_delta(graph, t)),
            _ => predict_delta(graph, t),
        }
    }

    fn dropped_m_squared(
        graph: &EncapsulatedGraph,
        t: &Transformation,
    ) -> Result<DeltaReport, TransformError> {
        let mut report = predict_delta(graph, t)?;
        if let Transformation::AddHidden { m, .. } = *t {
            report.total -= m * m;
        }
        Ok(report)
    }

    #[test]
    fn mutants_are_caught() {
        let config = VerifyConfig {
            cases: 500,
            ..VerifyConfig::default()
        };
        for mutant in [
            swapped_translation as crate::transform::Predictor,
            dropped_m_squared,
        ] {
            let failure =
                run_verification(&config, &Checker::default().with_predictor(mutant)).unwrap_err();
            assert!(failure.to_string().starts_with("FAIL"));
        }
    }
}
