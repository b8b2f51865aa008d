//! Line-oriented text formats.
//!
//! * graph files: `encg 1` header, then `<hidden> <violational>` per region
//! * node manifests: `encn 1` header, then `<region> <node> <h|v>` per node
//! * series CSV: `step,stddev,mpe,ce` with reals at six decimal places
//!
//! Blank lines and lines starting with `#` are ignored when reading.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::experiment::ExperimentSeries;
use crate::graph::{EncapsulatedGraph, GraphError, RegionSpec};

pub const GRAPH_HEADER: &str = "encg 1";
pub const MANIFEST_HEADER: &str = "encn 1";
pub const SERIES_HEADER: &str = "step,stddev,mpe,ce";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("missing `{expected}` header")]
    MissingHeader { expected: &'static str },
    #[error("line {line}: unsupported header `{found}` (expected `{expected}`)")]
    UnsupportedHeader {
        line: usize,
        found: String,
        expected: &'static str,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate node `{node}` in region `{region}`")]
    DuplicateNode {
        line: usize,
        region: String,
        node: String,
    },
    #[error("line {line}: visibility must be `h` or `v`, got `{found}`")]
    BadVisibility { line: usize, found: String },
    #[error(transparent)]
    Capacity(#[from] GraphError),
}

/// Content lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| !line.trim().is_empty() && !line.starts_with('#'))
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    expected: &'static str,
) -> Result<(), FormatError> {
    match lines.next() {
        None => Err(FormatError::MissingHeader { expected }),
        Some((_, line)) if line == expected => Ok(()),
        Some((line, found)) => {
            let magic = expected.split(' ').next().unwrap_or(expected);
            if found.split(' ').next() == Some(magic) {
                Err(FormatError::UnsupportedHeader {
                    line,
                    found: found.to_string(),
                    expected,
                })
            } else {
                Err(FormatError::MissingHeader { expected })
            }
        }
    }
}

fn parse_count(field: &str, line: usize) -> Result<u64, FormatError> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(FormatError::Malformed {
            line,
            message: format!("`{field}` is not an unsigned decimal count"),
        });
    }
    field.parse().map_err(|_| FormatError::Malformed {
        line,
        message: format!("count `{field}` is too large"),
    })
}

pub fn read_graph(text: &str) -> Result<EncapsulatedGraph, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, GRAPH_HEADER)?;
    let mut regions = Vec::new();
    for (line, content) in lines {
        let fields: Vec<&str> = content.split(' ').collect();
        let [hidden, violational] = fields.as_slice() else {
            return Err(FormatError::Malformed {
                line,
                message: format!("expected `<hidden> <violational>`, got `{content}`"),
            });
        };
        regions.push(RegionSpec::new(
            parse_count(hidden, line)?,
            parse_count(violational, line)?,
        ));
    }
    Ok(EncapsulatedGraph::new(regions)?)
}

pub fn write_graph(graph: &EncapsulatedGraph) -> String {
    let mut out = String::with_capacity(8 + graph.region_count() * 6);
    out.push_str(GRAPH_HEADER);
    out.push('\n');
    for region in graph.regions() {
        let _ = writeln!(out, "{} {}", region.hidden, region.violational);
    }
    out
}

/// Counts hidden and violational nodes per region name. Regions are indexed
/// in order of first appearance.
pub fn ingest_manifest(text: &str) -> Result<EncapsulatedGraph, FormatError> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, MANIFEST_HEADER)?;
    let mut index_of: HashMap<&str, usize> = HashMap::new();
    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut regions: Vec<RegionSpec> = Vec::new();
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [region, node, visibility] = fields.as_slice() else {
            return Err(FormatError::Malformed {
                line,
                message: format!("expected `<region> <node> <h|v>`, got `{content}`"),
            });
        };
        let is_violational = match *visibility {
            "h" => false,
            "v" => true,
            other => {
                return Err(FormatError::BadVisibility {
                    line,
                    found: other.to_string(),
                })
            }
        };
        if !seen.insert((region, node)) {
            return Err(FormatError::DuplicateNode {
                line,
                region: region.to_string(),
                node: node.to_string(),
            });
        }
        let next = regions.len();
        let index = *index_of.entry(region).or_insert(next);
        if index == next {
            regions.push(RegionSpec::EMPTY);
        }
        if is_violational {
            regions[index].violational += 1;
        } else {
            regions[index].hidden += 1;
        }
    }
    Ok(EncapsulatedGraph::new(regions)?)
}

pub fn write_series_csv(series: &ExperimentSeries) -> String {
    let mut out = String::with_capacity(32 * (series.points.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for p in &series.points {
        let _ = writeln!(out, "{},{:.6},{},{:.6}", p.step, p.stddev, p.mpe, p.ce);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_hidden_pile, SourcePolicy};

    fn g(counts: &[(u64, u64)]) -> EncapsulatedGraph {
        EncapsulatedGraph::from_counts(counts.iter().copied()).unwrap()
    }

    #[test]
    fn reads_graph_files() {
        assert_eq!(read_graph("encg 1\n9 1\n9 1\n"), Ok(g(&[(9, 1), (9, 1)])));
        assert_eq!(read_graph("encg 1\n"), Ok(EncapsulatedGraph::empty()));
        assert_eq!(
            read_graph("# worked example\nencg 1\n\n9 1\n# second\n9 1"),
            Ok(g(&[(9, 1), (9, 1)]))
        );
        assert_eq!(read_graph("encg 1\r\n3 4\r\n"), Ok(g(&[(3, 4)])));
    }

    #[test]
    fn rejects_bad_graph_files() {
        assert!(matches!(
            read_graph("encg 2\n9 1\n"),
            Err(FormatError::UnsupportedHeader { line: 1, .. })
        ));
        assert_eq!(
            read_graph(""),
            Err(FormatError::MissingHeader {
                expected: GRAPH_HEADER
            })
        );
        assert_eq!(
            read_graph("9 1\n"),
            Err(FormatError::MissingHeader {
                expected: GRAPH_HEADER
            })
        );
        for bad in [
            "encg 1\n9 1\n-3 1\n",
            "encg 1\n9 1\n+3 1\n",
            "encg 1\n9 1\nx 1\n",
            "encg 1\n9 1\n3  1\n",
            "encg 1\n9 1\n3\n",
            "encg 1\n9 1\n1 2 3\n",
        ] {
            match read_graph(bad) {
                Err(FormatError::Malformed { line, .. }) => assert_eq!(line, 3, "{bad:?}"),
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
        assert!(matches!(
            read_graph("encg 1\n99999999999999999999999 1\n"),
            Err(FormatError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            read_graph("encg 1\n2147483647 1\n"),
            Err(FormatError::Capacity(_))
        ));
    }

    #[test]
    fn writes_graph_files() {
        assert_eq!(write_graph(&g(&[(9, 1), (0, 2)])), "encg 1\n9 1\n0 2\n");
        assert_eq!(write_graph(&EncapsulatedGraph::empty()), "encg 1\n");
    }

    #[test]
    fn ingests_manifests() {
        assert_eq!(
            ingest_manifest("encn 1\ncore a h\ncore b v\nutil c v\n"),
            Ok(g(&[(1, 1), (0, 1)]))
        );
        assert_eq!(ingest_manifest("encn 1\n"), Ok(EncapsulatedGraph::empty()));
        assert!(matches!(
            ingest_manifest("encn 1\ncore a h\ncore a h\n"),
            Err(FormatError::DuplicateNode { line: 3, .. })
        ));
        assert!(matches!(
            ingest_manifest("encn 1\ncore a x\n"),
            Err(FormatError::BadVisibility { line: 2, .. })
        ));
        assert!(matches!(
            ingest_manifest("encn 1\ncore a\n"),
            Err(FormatError::Malformed { line: 2, .. })
        ));
        assert_eq!(
            ingest_manifest("core a h\n"),
            Err(FormatError::MissingHeader {
                expected: MANIFEST_HEADER
            })
        );
        // same node name in different regions is fine
        assert_eq!(
            ingest_manifest("encn 1\ncore a h\nutil a h\n"),
            Ok(g(&[(1, 0), (1, 0)]))
        );
    }

    #[test]
    fn series_csv() {
        let single =
            run_hidden_pile(&g(&[(0, 1), (9, 1), (9, 1)]), 0, SourcePolicy::Drain).unwrap();
        let text = write_series_csv(&single);
        assert_eq!(text.lines().count(), single.points.len() + 1);
        assert_eq!(text.lines().next(), Some(SERIES_HEADER));

        let still = run_hidden_pile(&g(&[(0, 1), (0, 1)]), 0, SourcePolicy::Drain).unwrap();
        assert_eq!(
            write_series_csv(&still),
            "step,stddev,mpe,ce\n0,0.000000,2,0.000000\n"
        );
    }

    #[test]
    fn series_csv_single_point_worked_example() {
        let mut series = run_hidden_pile(&g(&[(9, 1), (9, 1)]), 1, SourcePolicy::Drain).unwrap();
        series.points.truncate(1);
        assert_eq!(
            write_series_csv(&series),
            "step,stddev,mpe,ce\n0,0.000000,200,0.473684\n"
        );
        series.points.clear();
        assert_eq!(write_series_csv(&series), "step,stddev,mpe,ce\n");
    }
}
