//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use encapsulation::cli::{self, EXIT_OK};
use encapsulation::experiment::{prepare_run, run_seed};
use encapsulation::graph::RegionSpec;
use encapsulation::verify::{run_verification, Property, VerifyConfig};
use encapsulation::{
    apply, apply_checked, internal_mpe, predict_delta, read_graph, run_batch, run_experiment,
    write_graph, write_series_csv, Checker, EncapsulatedGraph, ExperimentConfig, ExperimentSeries,
    Preset, Transformation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn criterion_1_worked_example() -> Outcome {
    let sizes = [(9, 1), (10, 1), (8, 1)].map(|(h, v)| internal_mpe(RegionSpec::new(h, v)));
    let graph = EncapsulatedGraph::from_counts([(9, 1), (9, 1)]).unwrap();
    let t = Transformation::TranslateHidden {
        from: 0,
        to: 1,
        m: 1,
    };
    let predicted = predict_delta(&graph, &t).unwrap().total;
    let checked = apply_checked(&graph, &t).map(|(_, r)| r.total);
    check(
        sizes == [90, 110, 72] && predicted == 2 && checked == Ok(2),
        format!("internal MPE {sizes:?}, one hidden move delta {predicted:+}"),
    )
}

fn criterion_2_oracle_equivalence() -> Outcome {
    let o = cli::run([
        "encg",
        "verify",
        "--cases",
        "1000",
        "--max-regions",
        "10",
        "--max-count",
        "8",
    ]);
    let oracle_line = o
        .stdout
        .lines()
        .find(|l| l.starts_with("oracle"))
        .unwrap_or("")
        .to_string();
    check(
        o.code == EXIT_OK && o.stdout.contains("all 1000 cases passed"),
        format!(
            "exit {} ({}){}",
            o.code,
            oracle_line.split_whitespace().collect::<Vec<_>>().join(" "),
            o.stderr.trim()
        ),
    )
}

/// Expected configuration efficiency of the Figure-1 family at its start and
/// end, from the moments of the uniform hidden-count draw rather than from
/// the library: hidden ~ U{0..30} (mean 15, variance 80), one violational
/// node per region, 100 regions.
fn figure_one_calibration(nodes: f64) -> (f64, f64) {
    let r = 100.0;
    let mean_size = 16.0;
    let mean_size_sq = 80.0 + mean_size * mean_size;
    let ceiling = nodes * (nodes - 1.0);
    // start: s_in summed over regions, s_ex = every node reaches the other 99 violational nodes
    let initial_s = r * (mean_size_sq - mean_size) * (nodes / (r * mean_size)) + nodes * (r - 1.0);
    // end: target holds every hidden node plus its violational node
    let target = nodes - (r - 1.0);
    let final_s = target * (target - 1.0) + nodes * (r - 1.0);
    (1.0 - initial_s / ceiling, 1.0 - final_s / ceiling)
}

fn replay(series: &ExperimentSeries) -> Vec<EncapsulatedGraph> {
    let (mut graph, target) = prepare_run(series.config.as_ref().unwrap()).unwrap();
    let mut graphs = vec![graph.clone()];
    for &from in &series.sources {
        graph = apply(
            &graph,
            &Transformation::TranslateHidden {
                from,
                to: target,
                m: 1,
            },
        )
        .unwrap();
        graphs.push(graph.clone());
    }
    graphs
}

fn criterion_3_figure_one() -> Outcome {
    // n ~ 1600 with sd sqrt(100 * 80) ~ 89; calibrate over +-4 sd
    let spread = 4.0 * (100.0f64 * 80.0).sqrt();
    let worst = [1600.0 - spread, 1600.0, 1600.0 + spread].map(figure_one_calibration);
    let calibrated = worst.iter().all(|&(start, end)| start > 0.85 && end < 0.15);

    let batch = run_batch(&ExperimentConfig::preset(Preset::Fig1, 0), 10).unwrap();
    let falls = batch.iter().filter(|s| s.last().ce < s.first().ce).count();
    let thresholds = batch
        .iter()
        .filter(|s| s.first().ce > 0.85 && s.last().ce < 0.15)
        .count();
    let mut monotone = 0;
    for series in &batch {
        let graphs = replay(series);
        let t = series.target;
        let largest = |g: &EncapsulatedGraph| {
            let kt = g.regions()[t].size();
            g.regions()
                .iter()
                .enumerate()
                .all(|(i, r)| i == t || r.size() < kt)
        };
        let ok = (0..series.points.len() - 1)
            .filter(|&i| largest(&graphs[i]))
            .all(|i| series.points[i + 1].mpe > series.points[i].mpe);
        monotone += ok as usize;
    }
    check(
        calibrated && falls == 10 && thresholds >= 9 && monotone == 10,
        format!(
            "calibration start {:.4} end {:.4}; ce falls {falls}/10, thresholds {thresholds}/10, monotone {monotone}/10",
            worst[1].0, worst[1].1
        ),
    )
}

fn criterion_4_figure_three() -> Outcome {
    let batch = run_batch(&ExperimentConfig::preset(Preset::Fig3, 0), 10).unwrap();
    let constant = batch
        .iter()
        .filter(|s| {
            s.steps() > 0
                && s.points
                    .iter()
                    .all(|p| p.mpe == s.first().mpe && p.ce == s.first().ce)
        })
        .count();
    let steps: u64 = batch.iter().map(ExperimentSeries::steps).sum();
    check(
        constant == 10,
        format!("constant mpe and ce in {constant}/10 runs ({steps} moves total)"),
    )
}

fn criterion_5_figure_four() -> Outcome {
    let fig4 = run_batch(&ExperimentConfig::preset(Preset::Fig4, 0), 100).unwrap();
    let fig1 = run_batch(&ExperimentConfig::preset(Preset::Fig1, 0), 100).unwrap();
    let around_half = fig4
        .iter()
        .filter(|s| (0.4..=0.6).contains(&s.first().ce))
        .count();
    let falls = fig4.iter().filter(|s| s.last().ce < s.first().ce).count();
    let not_as_low = fig4
        .iter()
        .zip(&fig1)
        .filter(|(a, b)| a.last().ce > b.last().ce)
        .count();
    let mean_initial = fig4.iter().map(|s| s.first().ce).sum::<f64>() / 100.0;
    check(
        around_half >= 90 && falls == 100 && not_as_low >= 90,
        format!("initial ce in [0.4,0.6] {around_half}/100 (mean {mean_initial:.4}), falls {falls}/100, above fig1 end {not_as_low}/100"),
    )
}

fn criterion_6_figure_six() -> Outcome {
    let mut within = 0;
    let mut worst_ratio = 0.0f64;
    for i in 0..10 {
        let seed = run_seed(0, i);
        let hidden = run_experiment(&ExperimentConfig::preset(Preset::Fig4, seed)).unwrap();
        let violational = run_experiment(&ExperimentConfig::preset(Preset::Fig6, seed)).unwrap();
        let ratio = violational.ce_range() / hidden.ce_range();
        worst_ratio = worst_ratio.max(ratio);
        within += (ratio < 0.10) as usize;
    }
    check(
        within == 10,
        format!(
            "violational/hidden ce range < 10% in {within}/10 pairs (worst {:.2}%)",
            worst_ratio * 100.0
        ),
    )
}

fn criterion_7_properties() -> Outcome {
    let config = VerifyConfig {
        cases: 1000,
        max_regions: 10,
        max_count: 8,
        seed: 7,
    };
    match run_verification(&config, &Checker::default()) {
        Ok(report) => {
            let wanted = [
                Property::Dominance,
                Property::Conversion,
                Property::ZeroDelta,
                Property::EmptyRegion,
                Property::Reversibility,
            ];
            let counts: Vec<String> = wanted
                .iter()
                .map(|p| format!("{} {}", p.name(), report.passed(*p)))
                .collect();
            check(
                wanted.iter().all(|p| report.passed(*p) >= 500),
                counts.join(", "),
            )
        }
        Err(failure) => check(false, failure.to_string()),
    }
}

fn criterion_8_persistence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut round_trips = 0;
    for _ in 0..1000 {
        let regions = rng.random_range(0..50);
        let graph = EncapsulatedGraph::from_counts(
            (0..regions).map(|_| (rng.random_range(0..100_000), rng.random_range(0..100_000))),
        )
        .unwrap();
        round_trips += (read_graph(&write_graph(&graph)).as_ref() == Ok(&graph)) as usize;
    }
    let config = ExperimentConfig::preset(Preset::Fig4, 12);
    let a = write_series_csv(&run_experiment(&config).unwrap());
    let b = write_series_csv(&run_experiment(&config).unwrap());
    check(
        round_trips == 1000 && a == b,
        format!("round trips {round_trips}/1000, csv identical {}", a == b),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "1 worked example",
            Duration::from_secs(1),
            criterion_1_worked_example,
        ),
        (
            "2 oracle equivalence",
            Duration::from_secs(10),
            criterion_2_oracle_equivalence,
        ),
        (
            "3 figure 1/2",
            Duration::from_secs(5),
            criterion_3_figure_one,
        ),
        (
            "4 figure 3",
            Duration::from_secs(5),
            criterion_4_figure_three,
        ),
        (
            "5 figure 4/5",
            Duration::from_secs(30),
            criterion_5_figure_four,
        ),
        (
            "6 figure 6/7",
            Duration::from_secs(10),
            criterion_6_figure_six,
        ),
        (
            "7 property suite",
            Duration::from_secs(10),
            criterion_7_properties,
        ),
        (
            "8 persistence",
            Duration::from_secs(5),
            criterion_8_persistence,
        ),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < budget;
        let passed = outcome.passed && in_time;
        failures += !passed as usize;
        println!(
            "[{}] criterion {name}: {} ({:.2}s of {}s)",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
