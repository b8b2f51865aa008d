//! Randomized differential check of every delta formula against pair
//! enumeration, first with the real predictor and then with a deliberately
//! wrong one to show the harness catching it.
//!
//! ```text
//! cargo run --example verify_oracle
//! ```

use encapsulation::verify::{run_verification, Property, VerifyConfig};
use encapsulation::{
    predict_delta, Checker, DeltaReport, EncapsulatedGraph, TransformError, Transformation,
};

/// Forgets the `2m` term of the hidden translation formula.
fn missing_term(
    graph: &EncapsulatedGraph,
    t: &Transformation,
) -> Result<DeltaReport, TransformError> {
    let mut report = predict_delta(graph, t)?;
    if let Transformation::TranslateHidden { m, .. } = *t {
        report.total -= 2 * m * m;
    }
    Ok(report)
}

fn main() {
    let config = VerifyConfig {
        cases: 2000,
        ..VerifyConfig::default()
    };
    let report = run_verification(&config, &Checker::default())
        .expect("closed forms agree with enumeration");
    for p in Property::ALL {
        println!("{:<14} {:>5} passed", p.name(), report.passed(p));
    }

    match run_verification(&config, &Checker::default().with_predictor(missing_term)) {
        Ok(_) => println!("mutant survived"),
        Err(failure) => println!("\nmutant caught:\n{failure}"),
    }
}
