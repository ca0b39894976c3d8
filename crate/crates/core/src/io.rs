//! Graph and result files.
//!
//! Edges: `girg-edges v1 n=<n> m=<m>` then one `u v` line per edge, u < v,
//! ascending. Vertices: `girg-verts v1 n=<n> d=<d>` then `id weight x_1 ..
//! x_d` lines with floats printed as `{:.16e}` (17 significant digits, so
//! every f64 round-trips bit-exactly). All text files end with one LF and
//! contain nothing platform-dependent, which keeps reruns byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::TorusPoint;
use crate::graph::Graph;
use crate::model::VertexData;
use crate::{Real, VertexId};

fn edges_path(stem: &Path) -> PathBuf {
    stem.with_extension("edges")
}

fn verts_path(stem: &Path) -> PathBuf {
    stem.with_extension("verts")
}

/// Write `<stem>.edges` and, when the graph carries vertex data,
/// `<stem>.verts`.
pub fn save_graph(g: &Graph, stem: &Path) -> Result<()> {
    let path = edges_path(stem);
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(
        out,
        "girg-edges v1 n={} m={}",
        g.vertex_count(),
        g.edge_count()
    )?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;

    if let Some(data) = g.vertex_data() {
        let path = verts_path(stem);
        let mut out = BufWriter::new(File::create(&path)?);
        let d = data.first().map_or(0, |v| v.position.dim());
        writeln!(out, "girg-verts v1 n={} d={}", g.vertex_count(), d)?;
        for (id, v) in data.iter().enumerate() {
            write!(out, "{id} {:.16e}", v.weight)?;
            for k in 0..d {
                write!(out, " {:.16e}", v.position[k])?;
            }
            writeln!(out)?;
        }
        out.flush()?;
    }
    Ok(())
}

/// Load `<stem>.edges` plus `<stem>.verts` when the latter exists.
pub fn load_graph(stem: &Path) -> Result<Graph> {
    let epath = edges_path(stem);
    let shown = epath.display().to_string();
    let file = File::open(&epath)
        .map_err(|e| Error::format(shown.clone(), format!("cannot open: {e}")))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format(shown.clone(), "missing header"))?
        .map_err(Error::Io)?;
    let (n, m) = parse_header(&header, "girg-edges", 'n', 'm')
        .ok_or_else(|| Error::format(shown.clone(), "malformed header"))?;
    let mut edges: Vec<(VertexId, VertexId)> = Vec::with_capacity(m);
    for line in lines {
        let line = line.map_err(Error::Io)?;
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_ascii_whitespace();
        let (u, v) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (
                a.parse::<VertexId>()
                    .map_err(|_| Error::format(shown.clone(), "bad edge endpoint"))?,
                b.parse::<VertexId>()
                    .map_err(|_| Error::format(shown.clone(), "bad edge endpoint"))?,
            ),
            _ => return Err(Error::format(shown, "edge line must be `u v`")),
        };
        if u >= v {
            return Err(Error::format(shown, "edges must satisfy u < v"));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::format(
            shown,
            format!("header claims m={m} but file has {} edges", edges.len()),
        ));
    }

    let vpath = verts_path(stem);
    let data = if vpath.exists() {
        Some(load_vertex_data(&vpath, n)?)
    } else {
        None
    };
    Graph::from_edges(n, &edges, data).map_err(|e| Error::format(shown, e.to_string()))
}

fn load_vertex_data(path: &Path, n: usize) -> Result<Vec<VertexData>> {
    let shown = path.display().to_string();
    let file = File::open(path)
        .map_err(|e| Error::format(shown.clone(), format!("cannot open: {e}")))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format(shown.clone(), "missing header"))?
        .map_err(Error::Io)?;
    let (vn, d) = parse_header(&header, "girg-verts", 'n', 'd')
        .ok_or_else(|| Error::format(shown.clone(), "malformed header"))?;
    if vn != n {
        return Err(Error::format(
            shown,
            format!("vertex file has n={vn} but edge file has n={n}"),
        ));
    }
    if d == 0 {
        return Err(Error::format(shown, "dimension must be at least 1"));
    }
    let mut data = Vec::with_capacity(n);
    for line in lines {
        let line = line.map_err(Error::Io)?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if fields.len() != d + 2 {
            return Err(Error::format(
                shown,
                format!("vertex line needs {} fields, got {}", d + 2, fields.len()),
            ));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| Error::format(shown.clone(), "bad vertex id"))?;
        if id != data.len() {
            return Err(Error::format(shown, "vertex ids must ascend from 0"));
        }
        let weight: Real = fields[1]
            .parse()
            .map_err(|_| Error::format(shown.clone(), "bad weight"))?;
        if !(weight >= 1.0) {
            return Err(Error::format(shown, "weights must be >= 1"));
        }
        let mut coords = Vec::with_capacity(d);
        for f in &fields[2..] {
            coords.push(
                f.parse::<Real>()
                    .map_err(|_| Error::format(shown.clone(), "bad coordinate"))?,
            );
        }
        let position = TorusPoint::new(coords)
            .map_err(|e| Error::format(shown.clone(), e.to_string()))?;
        data.push(VertexData { weight, position });
    }
    if data.len() != n {
        return Err(Error::format(
            shown,
            format!("header claims n={n} but file has {} vertices", data.len()),
        ));
    }
    Ok(data)
}

/// Parse `girg-<kind> v1 <a>=<x> <b>=<y>`.
fn parse_header(line: &str, magic: &str, a: char, b: char) -> Option<(usize, usize)> {
    let mut it = line.split_ascii_whitespace();
    if it.next() != Some(magic) || it.next() != Some("v1") {
        return None;
    }
    let x = it.next()?.strip_prefix(a)?.strip_prefix('=')?.parse().ok()?;
    let y = it.next()?.strip_prefix(b)?.strip_prefix('=')?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((x, y))
}

/// One long-format result record.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub seed: u64,
    pub metric: String,
    pub key: String,
    pub value: String,
}

impl ResultRow {
    pub fn new(
        experiment: impl Into<String>,
        seed: u64,
        metric: impl Into<String>,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Self {
        ResultRow {
            experiment: experiment.into(),
            seed,
            metric: metric.into(),
            key: key.into(),
            value: value.into(),
        }
    }
}

/// Shortest round-trip decimal rendering of a float (Rust's Display).
pub fn format_real(x: Real) -> String {
    format!("{x}")
}

/// Write `experiment,seed,metric,key,value` rows in the given order.
/// Fields must stay free of commas and line breaks.
pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let shown = path.display().to_string();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "experiment,seed,metric,key,value")?;
    for row in rows {
        for field in [&row.experiment, &row.metric, &row.key, &row.value] {
            if field.contains(',') || field.contains('\n') {
                return Err(Error::format(
                    shown,
                    format!("field {field:?} contains a separator"),
                ));
            }
        }
        writeln!(
            out,
            "{},{},{},{},{}",
            row.experiment, row.seed, row.metric, row.key, row.value
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Same rows as a JSON array (for --format json).
pub fn write_results_json(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let array: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "experiment": r.experiment,
                "seed": r.seed,
                "metric": r.metric,
                "key": r.key,
                "value": r.value,
            })
        })
        .collect();
    write_summary_json(path, &serde_json::Value::Array(array))
}

/// Pretty JSON plus a trailing newline; key order is insertion order, so a
/// deterministic caller gets deterministic bytes.
pub fn write_summary_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use crate::model::ModelParams;
    use crate::sampler::{sample_graph_naive, sample_vertices};

    #[test]
    fn graph_roundtrip_with_data_is_bit_exact() {
        let p = ModelParams::new(80, 2, 2.5, 1.5, Geometry::Mcd, 12);
        let g = sample_graph_naive(&p).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("g");
        save_graph(&g, &stem).unwrap();
        let back = load_graph(&stem).unwrap();
        assert_eq!(g.edges(), back.edges());
        assert_eq!(g.vertex_data().unwrap(), back.vertex_data().unwrap());
    }

    #[test]
    fn graph_roundtrip_without_data() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 3)], None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("bare");
        save_graph(&g, &stem).unwrap();
        let back = load_graph(&stem).unwrap();
        assert_eq!(back.vertex_count(), 4);
        assert_eq!(back.edge_count(), 3);
        assert!(back.vertex_data().is_none());
    }

    #[test]
    fn extreme_weights_survive_the_roundtrip() {
        // 17 significant digits must reproduce any f64 exactly, including
        // the heavy-tail outliers.
        let p = ModelParams::new(2000, 1, 2.05, 1.5, Geometry::Mcd, 3);
        let data = sample_vertices(&p).unwrap();
        let g = Graph::from_edges(2000, &[], Some(data.clone())).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("w");
        save_graph(&g, &stem).unwrap();
        let back = load_graph(&stem).unwrap();
        for (a, b) in data.iter().zip(back.vertex_data().unwrap()) {
            assert_eq!(a.weight.to_bits(), b.weight.to_bits());
            for k in 0..a.position.dim() {
                assert_eq!(a.position[k].to_bits(), b.position[k].to_bits());
            }
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("bad");
        let write = |text: &str| std::fs::write(edges_path(&stem), text).unwrap();

        write("girg-edges v2 n=2 m=0\n");
        assert!(matches!(load_graph(&stem), Err(Error::Format { .. })));
        write("girg-edges v1 n=2 m=2\n0 1\n");
        assert!(load_graph(&stem).unwrap_err().to_string().contains("m=2"));
        write("girg-edges v1 n=2 m=1\n1 0\n");
        assert!(load_graph(&stem).unwrap_err().to_string().contains("u < v"));
        write("girg-edges v1 n=2 m=2\n0 1\n0 1\n");
        assert!(load_graph(&stem).is_err()); // duplicate pair
        write("girg-edges v1 n=2 m=1\n0 5\n");
        assert!(load_graph(&stem).is_err()); // endpoint out of range

        write("girg-edges v1 n=2 m=0\n");
        std::fs::write(verts_path(&stem), "girg-verts v1 n=3 d=1\n").unwrap();
        let err = load_graph(&stem).unwrap_err().to_string();
        assert!(err.contains("n=3"), "{err}");
        std::fs::write(
            verts_path(&stem),
            "girg-verts v1 n=2 d=1\n0 1.0e0 5.0e-1\n1 0.5e0 1.0e-1\n",
        )
        .unwrap();
        assert!(load_graph(&stem).unwrap_err().to_string().contains(">= 1"));
    }

    #[test]
    fn results_csv_bytes_are_pinned() {
        let rows = vec![
            ResultRow::new("strips", 1, "m", "", "20"),
            ResultRow::new("strips", 1, "ell", "", format_real(0.05)),
            ResultRow::new("expansion", 2, "worst_ratio", "s=4", format_real(1.5)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_results_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "experiment,seed,metric,key,value\n\
             strips,1,m,,20\n\
             strips,1,ell,,0.05\n\
             expansion,2,worst_ratio,s=4,1.5\n"
        );
        let bad = vec![ResultRow::new("a,b", 1, "m", "", "1")];
        assert!(write_results_csv(&path, &bad).is_err());
    }

    #[test]
    fn format_real_round_trips() {
        for x in [
            0.1,
            1.0 / 3.0,
            0.05,
            1e-300,
            123456789.123456789,
            f64::MIN_POSITIVE,
        ] {
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}
