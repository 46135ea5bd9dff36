//! File formats: connectivity CSV, packed-binary matrices, graph JSON.

use crate::error::{CoreError, Result};
use crate::graph::{ConnectivityMatrix, FunctionalGraph};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

pub const PACKED_MAGIC: &[u8; 4] = b"CYCG";
pub const PACKED_VERSION: u32 = 1;

/// Parse a square numeric matrix from headerless comma-separated text.
pub fn parse_matrix_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| CoreError::Parse {
                    line: lineno + 1,
                    msg: format!("bad number {f:?}: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CoreError::Format("empty matrix file".into()));
    }
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CoreError::NonSquare(format!(
                "{n} rows but row {i} has {} columns",
                row.len()
            )));
        }
    }
    Ok(rows)
}

pub fn write_matrix_csv(path: &Path, values: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    for row in values {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// 16-byte header: magic "CYCG", u32 version, u32 n, u32 reserved (all LE),
/// followed by n*n little-endian f64 values, row-major.
pub fn write_packed(path: &Path, values: &[Vec<f64>]) -> Result<()> {
    let n = values.len() as u32;
    let mut f = std::fs::File::create(path)?;
    f.write_all(PACKED_MAGIC)?;
    f.write_all(&PACKED_VERSION.to_le_bytes())?;
    f.write_all(&n.to_le_bytes())?;
    f.write_all(&0u32.to_le_bytes())?;
    let mut buf = Vec::with_capacity(values.len() * values.len() * 8);
    for row in values {
        for &v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_packed(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut f = std::fs::File::open(path)?;
    let mut header = [0u8; 16];
    f.read_exact(&mut header)
        .map_err(|_| CoreError::Format("packed file shorter than 16-byte header".into()))?;
    if &header[0..4] != PACKED_MAGIC {
        return Err(CoreError::Format("bad magic, expected CYCG".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != PACKED_VERSION {
        return Err(CoreError::Format(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let mut buf = Vec::new();
    f.read_to_end(&mut buf)?;
    if buf.len() != n * n * 8 {
        return Err(CoreError::Format(format!(
            "expected {} payload bytes for n={n}, found {}",
            n * n * 8,
            buf.len()
        )));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let off = (i * n + j) * 8;
            row.push(f64::from_le_bytes(buf[off..off + 8].try_into().unwrap()));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Peek the file header to decide between packed-binary and CSV.
pub fn detect_format(path: &Path) -> Result<MatrixFormat> {
    let mut f = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    match f.read_exact(&mut magic) {
        Ok(()) if &magic == PACKED_MAGIC => Ok(MatrixFormat::PackedBinary),
        _ => Ok(MatrixFormat::Csv),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    Csv,
    PackedBinary,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n_nodes: usize,
    edges: Vec<[usize; 2]>,
    signals: Vec<f64>,
}

pub fn write_graph_json(path: &Path, g: &FunctionalGraph) -> Result<()> {
    let doc = GraphJson {
        n_nodes: g.n_nodes,
        edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        signals: g.edge_signals.clone(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap())?;
    Ok(())
}

pub fn read_graph_json(path: &Path) -> Result<FunctionalGraph> {
    let text = std::fs::read_to_string(path)?;
    let doc: GraphJson = serde_json::from_str(&text)
        .map_err(|e| CoreError::Format(format!("graph json: {e}")))?;
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|&[i, j]| (i, j)).collect();
    FunctionalGraph::new(doc.n_nodes, edges, doc.signals)
}

/// Matrix loader shared by `load_connectivity` and the CLI.
pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<Vec<Vec<f64>>> {
    match format {
        MatrixFormat::Csv => parse_matrix_csv(&std::fs::read_to_string(path)?),
        MatrixFormat::PackedBinary => read_packed(path),
    }
}

/// Export matrix rows from a [`ConnectivityMatrix`].
pub fn connectivity_rows(cm: &ConnectivityMatrix) -> Vec<Vec<f64>> {
    (0..cm.n_nodes)
        .map(|i| (0..cm.n_nodes).map(|j| cm.get(i, j)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rejects_ragged() {
        assert!(matches!(
            parse_matrix_csv("1,2\n3\n"),
            Err(CoreError::NonSquare(_))
        ));
    }

    #[test]
    fn csv_parses_whitespace() {
        let m = parse_matrix_csv("0, 0.5\n0.5, 0\n").unwrap();
        assert_eq!(m[0][1], 0.5);
    }

    #[test]
    fn packed_roundtrip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let vals = vec![
            vec![0.0, 0.1 + 0.2, -1.5e-300],
            vec![0.1 + 0.2, 0.0, f64::MIN_POSITIVE],
            vec![-1.5e-300, f64::MIN_POSITIVE, 0.0],
        ];
        write_packed(&path, &vals).unwrap();
        let back = read_packed(&path).unwrap();
        for (a, b) in vals.iter().flatten().zip(back.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn packed_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        std::fs::write(&path, b"JUNKJUNKJUNKJUNK").unwrap();
        assert!(matches!(read_packed(&path), Err(CoreError::Format(_))));
    }
}
