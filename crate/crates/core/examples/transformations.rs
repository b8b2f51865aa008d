//! The five transformations on one graph: closed-form prediction next to
//! brute-force recomputation, then a composed sequence.
//!
//! ```text
//! cargo run --example transformations
//! ```

use encapsulation::{
    apply, apply_checked, apply_sequence, brute_force_mpe, predict_delta, EncapsulatedGraph,
    Transformation,
};

fn main() {
    let graph = EncapsulatedGraph::from_counts([(5, 3), (2, 1), (0, 0)]).unwrap();
    let s = brute_force_mpe(&graph).unwrap() as i64;
    println!("graph {graph}, s = {s}\n");

    let edits = [
        Transformation::AddViolational { region: 2, m: 2 },
        Transformation::AddHidden { region: 0, m: -3 },
        Transformation::TranslateViolational {
            from: 0,
            to: 1,
            m: 2,
        },
        Transformation::TranslateHidden {
            from: 0,
            to: 1,
            m: 4,
        },
        Transformation::Convert { region: 1, m: 1 },
        Transformation::Convert { region: 0, m: -2 },
    ];
    println!(
        "{:<40} {:>9} {:>11} {:>9}",
        "transformation", "predicted", "enumerated", "split"
    );
    for t in edits {
        let report = predict_delta(&graph, &t).unwrap();
        let counted = brute_force_mpe(&apply(&graph, &t).unwrap()).unwrap() as i64 - s;
        let split = match (report.internal, report.external) {
            (Some(i), Some(e)) => format!("{i:+}/{e:+}"),
            _ => "-".to_string(),
        };
        println!(
            "{:<40} {:>+9} {:>+11} {:>9}",
            t.to_string(),
            report.total,
            counted,
            split
        );
        apply_checked(&graph, &t).expect("prediction agrees with recomputation");
    }

    // invalid edits are rejected before anything changes
    let err = predict_delta(&graph, &Transformation::AddHidden { region: 1, m: -5 }).unwrap_err();
    println!("\nrejected: {err}");

    let sequence = [
        Transformation::AddHidden { region: 2, m: 6 },
        Transformation::TranslateHidden {
            from: 2,
            to: 0,
            m: 3,
        },
        Transformation::Convert { region: 0, m: 2 },
    ];
    let (end, cumulative) = apply_sequence(&graph, &sequence).unwrap();
    let recounted = brute_force_mpe(&end).unwrap() as i64 - s;
    println!("sequence ends at {end}: cumulative delta {cumulative:+} (enumerated {recounted:+})");
}
