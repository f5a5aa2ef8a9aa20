//! Position files (`id,x,y[,z]`, zero-based ids, meters) and edge lists (`i,j`).

use super::{Realization, WsnGraph};
use crate::output::fmt_f64;
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad header {0:?}; expected id,x[,y[,z]]")]
    BadHeader(Vec<String>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] super::GraphError),
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// Reads positions; rows may appear in any order but ids must cover `0..n`.
pub fn read_positions<R: Read>(reader: R, radius: f64) -> Result<Realization, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let dim = header.len().saturating_sub(1);
    if dim == 0 || dim > 3 || header[0] != "id" || header[1..] != AXES[..dim] {
        return Err(IoError::BadHeader(header));
    }
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let parse_err = |msg: String| IoError::Parse { line, msg };
        let id: usize = rec[0]
            .parse()
            .map_err(|e| parse_err(format!("id {:?}: {e}", &rec[0])))?;
        let coords = (1..=dim)
            .map(|c| {
                rec[c]
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("coordinate {:?}: {e}", &rec[c])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((id, coords));
    }
    rows.sort_by_key(|(id, _)| *id);
    for (expected, (id, _)) in rows.iter().enumerate() {
        if *id != expected {
            return Err(IoError::Parse {
                line: 0,
                msg: format!("ids must be 0..{} without gaps; missing {expected}", rows.len()),
            });
        }
    }
    let coords = rows.into_iter().flat_map(|(_, c)| c).collect();
    Ok(Realization::new(dim, coords, radius)?)
}

pub fn read_positions_file(path: &Path, radius: f64) -> Result<Realization, IoError> {
    read_positions(std::fs::File::open(path)?, radius)
}

pub fn write_positions<W: Write>(writer: W, x: &Realization) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id"];
    header.extend_from_slice(&AXES[..x.dim()]);
    w.write_record(&header)?;
    for i in 0..x.len() {
        let mut rec = vec![i.to_string()];
        rec.extend(x.position(i).iter().map(|&c| fmt_f64(c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edges<W: Write>(writer: W, g: &WsnGraph) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j"])?;
    for &(i, j) in g.edges() {
        w.write_record([i.to_string(), j.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edges<R: Read>(reader: R, n_vertices: usize) -> Result<WsnGraph, IoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut edges = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |c: usize| {
            rec[c].trim().parse::<usize>().map_err(|e| IoError::Parse {
                line: k + 2,
                msg: e.to_string(),
            })
        };
        edges.push((parse(0)?, parse(1)?));
    }
    Ok(WsnGraph::new(n_vertices, edges)?)
}
