//! Raw dataset adapters. Each one reads a dataset's native files and writes
//! an edge list plus a `token cluster` label file; the core library only
//! ever reads those.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

/// A labelled vertex and the fields an adapter compares.
struct Record<T> {
    id: String,
    cluster: String,
    data: T,
}

/// Edge lists can't hold whitespace inside a token.
fn token(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join("_")
}

fn data_lines<R: BufRead>(input: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            l.as_ref()
                .map(|s| !s.trim().is_empty() && !s.starts_with('#'))
                .unwrap_or(true)
        })
}

/// Counts written by an adapter.
#[derive(Debug, Default, PartialEq)]
pub struct ImportSummary {
    pub vertices: usize,
    pub edges: usize,
}

fn write_pairwise<T: Sync>(
    records: &[Record<T>],
    similar: impl Fn(&T, &T) -> bool + Sync,
    mut edges: impl Write,
    mut labels: impl Write,
) -> Result<ImportSummary> {
    let neighbours: Vec<Vec<usize>> = (0..records.len())
        .into_par_iter()
        .map(|u| {
            (u + 1..records.len())
                .filter(|&v| similar(&records[u].data, &records[v].data))
                .collect()
        })
        .collect();
    let m: usize = neighbours.iter().map(Vec::len).sum();
    writeln!(edges, "# n={} m={m}", records.len())?;
    for (u, row) in neighbours.iter().enumerate() {
        for &v in row {
            writeln!(edges, "{} {}", records[u].id, records[v].id)?;
        }
    }
    for r in records {
        writeln!(labels, "{} {}", r.id, r.cluster)?;
    }
    Ok(ImportSummary {
        vertices: records.len(),
        edges: m,
    })
}

fn check_unique<T>(records: &[Record<T>]) -> Result<()> {
    let mut seen = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        if let Some(j) = seen.insert(r.id.as_str(), i) {
            bail!(
                "record id `{}` appears twice (records {} and {})",
                r.id,
                j + 1,
                i + 1
            );
        }
    }
    Ok(())
}

/// Records `id<TAB>cluster<TAB>text...`, joined when the Jaro similarity of
/// their texts is at least `threshold`.
pub fn jaro<R: BufRead>(
    input: R,
    threshold: f64,
    edges: impl Write,
    labels: impl Write,
) -> Result<ImportSummary> {
    let mut records = Vec::new();
    for (line_no, line) in data_lines(input) {
        let line = line?;
        let mut fields = line.split('\t');
        let (Some(id), Some(cluster)) = (fields.next(), fields.next()) else {
            bail!("line {line_no}: expected `id<TAB>cluster<TAB>text`");
        };
        let text = fields.collect::<Vec<_>>().join(" ");
        records.push(Record {
            id: token(id),
            cluster: token(cluster),
            data: text.trim().to_owned(),
        });
    }
    check_unique(&records)?;
    write_pairwise(
        &records,
        |a, b| strsim::jaro(a, b) >= threshold,
        edges,
        labels,
    )
}

/// A citation network in LINQS form: a `cites` file of `cited citing`
/// pairs and a `content` file of `id features... label` rows.
pub fn cites<R1: BufRead, R2: BufRead>(
    cites: R1,
    content: R2,
    mut edges: impl Write,
    mut labels: impl Write,
) -> Result<ImportSummary> {
    let mut ids = Vec::new();
    for (line_no, line) in data_lines(content) {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            bail!("content line {line_no}: expected `id features... label`");
        }
        writeln!(labels, "{} {}", fields[0], fields[fields.len() - 1])?;
        ids.push(fields[0].to_owned());
    }
    let mut pairs = Vec::new();
    for (line_no, line) in data_lines(cites) {
        let line = line?;
        let mut fields = line.split_whitespace();
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => pairs.push((a.to_owned(), b.to_owned())),
            _ => bail!("cites line {line_no}: expected two ids"),
        }
    }
    writeln!(edges, "# citation pairs={}", pairs.len())?;
    for (a, b) in &pairs {
        writeln!(edges, "{a} {b}")?;
    }
    Ok(ImportSummary {
        vertices: ids.len(),
        edges: pairs.len(),
    })
}

/// UCI mushroom rows `class,f1,...,fk`. The class is the cluster and is
/// dropped from the comparison; two rows are joined when they differ on at
/// most `floor(k/2)` of the remaining features.
pub fn mushrooms<R: BufRead>(
    input: R,
    edges: impl Write,
    labels: impl Write,
) -> Result<ImportSummary> {
    let mut records: Vec<Record<Vec<String>>> = Vec::new();
    for (line_no, line) in data_lines(input) {
        let line = line?;
        let mut fields = line.trim().split(',').map(str::to_owned);
        let class = fields.next().context("empty row")?;
        let features: Vec<String> = fields.collect();
        if let Some(first) = records.first() {
            if first.data.len() != features.len() {
                bail!(
                    "line {line_no}: {} features, expected {}",
                    features.len(),
                    first.data.len()
                );
            }
        }
        records.push(Record {
            id: format!("m{}", records.len()),
            cluster: token(&class),
            data: features,
        });
    }
    let allowed = records.first().map_or(0, |r| r.data.len() / 2);
    write_pairwise(
        &records,
        |a, b| a.iter().zip(b).filter(|(x, y)| x != y).count() <= allowed,
        edges,
        labels,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(
        f: impl FnOnce(&mut Vec<u8>, &mut Vec<u8>) -> Result<ImportSummary>,
    ) -> (String, String, ImportSummary) {
        let (mut e, mut l) = (Vec::new(), Vec::new());
        let s = f(&mut e, &mut l).unwrap();
        (
            String::from_utf8(e).unwrap(),
            String::from_utf8(l).unwrap(),
            s,
        )
    }

    #[test]
    fn jaro_threshold() {
        let input = "a\t1\tmartha\nb\t1\tmarhta\nc\t2\tzzzzzz\n";
        let (edges, labels, s) = run(|e, l| jaro(input.as_bytes(), 0.5, e, l));
        assert_eq!(
            s,
            ImportSummary {
                vertices: 3,
                edges: 1
            }
        );
        assert!(edges.ends_with("a b\n"));
        assert_eq!(labels, "a 1\nb 1\nc 2\n");
    }

    #[test]
    fn jaro_rejects_duplicates_and_short_rows() {
        let mut sink = Vec::new();
        assert!(jaro("a\t1\tx\na\t2\ty\n".as_bytes(), 0.5, &mut sink, Vec::new()).is_err());
        assert!(jaro("a-without-tab\n".as_bytes(), 0.5, &mut sink, Vec::new()).is_err());
    }

    #[test]
    fn mushroom_rule_uses_floor_of_half() {
        // five features: at most two may differ
        let rows = "e,a,a,a,a,a\ne,a,a,a,b,b\np,a,a,b,b,b\n";
        let (edges, labels, s) = run(|e, l| mushrooms(rows.as_bytes(), e, l));
        assert_eq!(s.edges, 2);
        assert!(edges.contains("m0 m1\n") && edges.contains("m1 m2\n"));
        assert!(labels.contains("m2 p\n"));
    }

    #[test]
    fn citation_files() {
        let content = "10 0 1 0 Theory\n11 1 1 0 Neural\n";
        let cites = "10 11\n11 12\n";
        let (edges, labels, s) =
            run(|e, l| super::cites(cites.as_bytes(), content.as_bytes(), e, l));
        assert_eq!(
            s,
            ImportSummary {
                vertices: 2,
                edges: 2
            }
        );
        assert!(edges.contains("11 12\n"));
        assert_eq!(labels, "10 Theory\n11 Neural\n");
    }
}
