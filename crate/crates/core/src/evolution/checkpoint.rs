//! Checkpoint CSV: a `# t=…,h=…,dt=…,L=…` comment line followed by
//! `edge_id,x,re_u,im_u` rows. Other `#` lines are ignored on reading.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::GraphState;
use crate::line::LineSamples;
use crate::scalar::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointHeader {
    pub t: f64,
    pub h: f64,
    pub dt: f64,
    pub truncation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T: Real> {
    pub header: CheckpointHeader,
    /// Samples per edge id, in increasing id order.
    pub edges: Vec<(usize, LineSamples<T>)>,
}

fn write_rows<W: Write, T: Real>(
    mut w: W,
    header: CheckpointHeader,
    rows: impl Iterator<Item = (usize, T, T, T)>,
) -> Result<()> {
    writeln!(
        w,
        "# t={},h={},dt={},L={}",
        header.t, header.h, header.dt, header.truncation
    )?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["edge_id", "x", "re_u", "im_u"])?;
    for (e, x, a, b) in rows {
        csv.write_record([
            e.to_string(),
            x.to_f64_lossy().to_string(),
            a.to_f64_lossy().to_string(),
            b.to_f64_lossy().to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_graph_checkpoint<W: Write, T: Real>(w: W, state: &GraphState<T>, dt: T) -> Result<()> {
    let header = CheckpointHeader {
        t: state.time.to_f64_lossy(),
        h: state.grid.edges.first().map_or(0.0, |g| g.h.to_f64_lossy()),
        dt: dt.to_f64_lossy(),
        truncation: state.grid.truncation().to_f64_lossy(),
    };
    let rows = state.values.iter().enumerate().flat_map(|(e, v)| {
        let g = state.grid.edges[e];
        v.iter().enumerate().map(move |(i, z)| (e, g.node(i), z.re, z.im))
    });
    write_rows(w, header, rows)
}

pub fn write_line_checkpoint<W: Write, T: Real>(w: W, samples: &LineSamples<T>, t: T, dt: T) -> Result<()> {
    let x = &samples.x;
    let header = CheckpointHeader {
        t: t.to_f64_lossy(),
        h: if x.len() > 1 { (x[1] - x[0]).to_f64_lossy() } else { 0.0 },
        dt: dt.to_f64_lossy(),
        truncation: x
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), T::max)
            .to_f64_lossy(),
    };
    write_rows(w, header, x.iter().zip(&samples.u).map(|(&x, z)| (0, x, z.re, z.im)))
}

fn parse_header(line: &str) -> Option<CheckpointHeader> {
    let body = line.trim_start_matches('#').trim();
    let mut t = None;
    let mut h = None;
    let mut dt = None;
    let mut l = None;
    for part in body.split(',') {
        let (k, v) = part.split_once('=')?;
        let v: f64 = v.trim().parse().ok()?;
        match k.trim() {
            "t" => t = Some(v),
            "h" => h = Some(v),
            "dt" => dt = Some(v),
            "L" => l = Some(v),
            _ => return None,
        }
    }
    Some(CheckpointHeader {
        t: t?,
        h: h?,
        dt: dt?,
        truncation: l?,
    })
}

pub fn read_checkpoint<R: BufRead, T: Real>(r: R) -> Result<Checkpoint<T>> {
    let mut header = None;
    let mut body = String::new();
    for line in r.lines() {
        let line = line?;
        if line.starts_with('#') {
            if let Some(hd) = parse_header(&line) {
                header = Some(hd);
            }
        } else {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let header = header.ok_or_else(|| Error::Parse("missing `# t=…,h=…,dt=…,L=…` line".into()))?;
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let mut edges: std::collections::BTreeMap<usize, (Vec<T>, Vec<_>)> = Default::default();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::Parse(format!("expected 4 columns, got {}", rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("column {i}: {e}")))
        };
        let e: usize = rec[0]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("edge id: {e}")))?;
        let entry = edges.entry(e).or_default();
        entry.0.push(T::lit(num(1)?));
        entry.1.push(c(T::lit(num(2)?), T::lit(num(3)?)));
    }
    let edges = edges
        .into_iter()
        .map(|(e, (x, u))| Ok((e, LineSamples::new(x, u)?)))
        .collect::<Result<_>>()?;
    Ok(Checkpoint { header, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_star;
    use crate::scalar::Cplx;

    #[test]
    fn graph_round_trip() {
        let (g, grid) = build_star(3, 2.0, 0.125).unwrap();
        let s = GraphState::from_fn(g, grid, |e, x| Cplx::new(x * e as f64, -x));
        let mut buf = Vec::new();
        write_graph_checkpoint(&mut buf, &s, 0.01).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# t=0,h=0.125,dt=0.01,L=2\nedge_id,x,re_u,im_u\n"));
        let back: Checkpoint<f64> = read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back.edges.len(), 3);
        for (e, samples) in &back.edges {
            assert_eq!(samples.u, s.values[*e]);
        }
    }

    #[test]
    fn missing_header_is_an_error() {
        let text = "edge_id,x,re_u,im_u\n0,0,1,0\n";
        assert!(read_checkpoint::<_, f64>(text.as_bytes()).is_err());
    }
}
