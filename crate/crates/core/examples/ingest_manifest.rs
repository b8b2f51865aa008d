//! From a node manifest (module, node, visibility) to a graph file and its
//! metrics.
//!
//! ```text
//! cargo run --example ingest_manifest
//! ```

use encapsulation::cli::summary;
use encapsulation::{ingest_manifest, read_graph, write_graph};

const MANIFEST: &str = "\
encn 1
# region node visibility
parser   lexer        h
parser   grammar      h
parser   parse        v
storage  pages        h
storage  cache        h
storage  btree        h
storage  open         v
storage  close        v
api      handlers     v
";

fn main() {
    let graph = ingest_manifest(MANIFEST).expect("well-formed manifest");
    let file = write_graph(&graph);
    print!("{file}\n{}", summary(&graph));
    assert_eq!(read_graph(&file).unwrap(), graph);
}
