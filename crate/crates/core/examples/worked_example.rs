//! Static metrics of a small graph and the effect of moving one hidden node.
//!
//! Two regions of ten nodes each (nine hidden, one violational). Moving one
//! hidden node from the first region to the second raises the MPE by two.
//!
//! ```text
//! cargo run --example worked_example
//! ```

use encapsulation::{
    apply_checked, configuration_efficiency, hidden_stddev, internal_mpe, mpe, EncapsulatedGraph,
    Transformation,
};

fn print_graph(label: &str, graph: &EncapsulatedGraph) {
    let breakdown = mpe(graph);
    println!(
        "{label:<7} {graph}  s_in={} s_ex={} s={}  hidden sd={:.4}  ce={:.6}",
        breakdown.internal,
        breakdown.external,
        breakdown.total,
        hidden_stddev(graph).unwrap().stddev,
        configuration_efficiency(graph),
    );
}

fn main() {
    let graph = EncapsulatedGraph::from_counts([(9, 1), (9, 1)]).unwrap();
    print_graph("before", &graph);
    for region in graph.regions() {
        println!(
            "        region of {} nodes: internal MPE {}",
            region.size(),
            internal_mpe(*region)
        );
    }

    let t = Transformation::TranslateHidden {
        from: 0,
        to: 1,
        m: 1,
    };
    let (after, report) = apply_checked(&graph, &t).expect("valid move");
    print_graph("after", &after);
    for region in after.regions() {
        println!(
            "        region of {} nodes: internal MPE {}",
            region.size(),
            internal_mpe(*region)
        );
    }
    println!("{t}: delta {:+}", report.total);
}
