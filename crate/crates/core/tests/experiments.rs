use encapsulation::experiment::{prepare_run, CountRange, ExperimentConfig, Preset};
use encapsulation::{
    apply, configuration_efficiency, hidden_stddev, mpe, run_batch, run_experiment,
    write_series_csv, EncapsulatedGraph, ExperimentSeries, PileMode, SourcePolicy, Transformation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rebuilds every intermediate graph of a seeded run from its move log.
fn replay(series: &ExperimentSeries) -> Vec<EncapsulatedGraph> {
    let (mut graph, target) = prepare_run(series.config.as_ref().unwrap()).unwrap();
    assert_eq!(target, series.target);
    let mut graphs = vec![graph.clone()];
    for &from in &series.sources {
        let t = match series.mode {
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
        graph = apply(&graph, &t).unwrap();
        graphs.push(graph.clone());
    }
    graphs
}

#[test]
fn runs_are_deterministic() {
    for preset in Preset::ALL {
        let config = ExperimentConfig::preset(preset, 99);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(write_series_csv(&a), write_series_csv(&b));
    }
}

#[test]
fn piles_conserve_node_totals() {
    for preset in Preset::ALL {
        for policy in [SourcePolicy::Drain, SourcePolicy::RoundRobin] {
            let config = ExperimentConfig {
                policy,
                ..ExperimentConfig::preset(preset, 7)
            };
            let series = run_experiment(&config).unwrap();
            let graphs = replay(&series);
            let (n, h) = (graphs[0].node_count(), graphs[0].violational_count());
            assert!(graphs
                .iter()
                .all(|g| g.node_count() == n && g.violational_count() == h));
            assert_eq!(series.summary.nodes, n);
            assert_eq!(series.summary.violational, h);
            assert_eq!(series.summary.regions, 100);
            assert_eq!(graphs.last().unwrap(), &series.final_graph);
        }
    }
}

#[test]
fn recorded_points_match_fresh_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for preset in Preset::ALL {
        let series = run_experiment(&ExperimentConfig::preset(preset, 31)).unwrap();
        let graphs = replay(&series);
        assert_eq!(graphs.len(), series.points.len());
        for _ in 0..12 {
            let i = rng.random_range(0..graphs.len());
            let p = &series.points[i];
            assert_eq!(p.step, i as u64);
            assert_eq!(p.mpe, mpe(&graphs[i]).total);
            assert_eq!(p.ce, configuration_efficiency(&graphs[i]));
        }
        assert!(series.points.windows(2).all(|w| w[1].step == w[0].step + 1));
    }
}

#[test]
fn hidden_pile_monotone_once_target_dominates() {
    for policy in [SourcePolicy::Drain, SourcePolicy::RoundRobin] {
        for seed in 0..5 {
            let config = ExperimentConfig {
                policy,
                ..ExperimentConfig::preset(Preset::Fig1, seed)
            };
            let series = run_experiment(&config).unwrap();
            let graphs = replay(&series);
            let t = series.target;
            let dominated_from = graphs.iter().position(|g| {
                let target_hidden = g.regions()[t].hidden;
                g.regions()
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == t || r.hidden <= target_hidden)
            });
            let start = dominated_from.expect("the target ends up holding every hidden node");
            for i in start..series.points.len() - 1 {
                assert!(
                    series.points[i + 1].stddev > series.points[i].stddev,
                    "seed {seed} step {i}"
                );
                assert!(
                    series.points[i + 1].mpe > series.points[i].mpe,
                    "seed {seed} step {i}"
                );
            }
            assert_eq!(
                hidden_stddev(&series.final_graph).unwrap().stddev,
                series.last().stddev
            );
        }
    }
}

#[test]
fn violational_pile_flat_when_hidden_even() {
    for seed in 0..5 {
        let config = ExperimentConfig {
            hidden: CountRange::fixed(4),
            ..ExperimentConfig::preset(Preset::Fig3, seed)
        };
        let series = run_experiment(&config).unwrap();
        assert!(series.steps() > 0);
        assert!(series
            .points
            .iter()
            .all(|p| p.mpe == series.first().mpe && p.ce == series.first().ce));
        // all donors left with at most one violational node
        let t = series.target;
        assert!(series
            .final_graph
            .regions()
            .iter()
            .enumerate()
            .all(|(i, r)| i == t || r.violational <= 1));
    }
}

#[test]
fn batch_matches_individual_runs() {
    let config = ExperimentConfig::preset(Preset::Fig4, 500);
    let batch = run_batch(&config, 4).unwrap();
    for (i, series) in batch.iter().enumerate() {
        assert_eq!(series.config.unwrap().seed, 500 + i as u64);
        assert_eq!(
            series,
            &run_experiment(&ExperimentConfig {
                seed: 500 + i as u64,
                ..config
            })
            .unwrap()
        );
    }
    let single = run_batch(&config, 1).unwrap();
    assert_eq!(single[0], run_experiment(&config).unwrap());
}

#[test]
fn csv_row_count_tracks_moves() {
    let series = run_experiment(&ExperimentConfig::preset(Preset::Fig1, 3)).unwrap();
    let start = &replay(&series)[0];
    let moved = start.hidden_count() - start.regions()[series.target].hidden;
    let csv = write_series_csv(&series);
    assert_eq!(csv.lines().count() as u64, moved + 2);
    let steps: Vec<u64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(steps.windows(2).all(|w| w[1] == w[0] + 1));
}
