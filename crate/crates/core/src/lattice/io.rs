//! Plain-text lattice files.
//!
//! ```text
//! p 8
//! q 3
//! refinement_level 1
//! vertex_count 16
//! edges 24
//! 0 1 b
//! ...
//! faces 6
//! r 0 1 2 3 4 5 6 7
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are skipped on input.

use std::fmt::Write as _;

use super::{Color, Edge, Face, LatticeError, Tiling};

pub fn emit(t: &Tiling) -> String {
    let mut s = String::new();
    writeln!(s, "p {}", t.p).unwrap();
    writeln!(s, "q {}", t.q).unwrap();
    writeln!(s, "refinement_level {}", t.refinement_level).unwrap();
    writeln!(s, "vertex_count {}", t.vertex_count).unwrap();
    writeln!(s, "edges {}", t.edges.len()).unwrap();
    for e in &t.edges {
        writeln!(s, "{} {} {}", e.u, e.v, e.color.as_char()).unwrap();
    }
    writeln!(s, "faces {}", t.faces.len()).unwrap();
    for f in &t.faces {
        s.push(f.color.as_char());
        for v in &f.vertices {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Parse and validate a lattice file.
pub fn parse(text: &str) -> Result<Tiling, LatticeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines.next().ok_or_else(|| LatticeError::Parse { line: 0, msg: format!("unexpected end of file, wanted {what}") })
    };
    let header = |(line, l): (usize, &str), key: &str| -> Result<usize, LatticeError> {
        let mut it = l.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(k), Some(v), None) if k == key => {
                v.parse().map_err(|_| LatticeError::Parse { line, msg: format!("bad {key} value {v:?}") })
            }
            _ => Err(LatticeError::Parse { line, msg: format!("expected `{key} <n>`") }),
        }
    };
    let p = header(next("p")?, "p")?;
    let q = header(next("q")?, "q")?;
    let level = header(next("refinement_level")?, "refinement_level")?;
    let n = header(next("vertex_count")?, "vertex_count")?;
    let ne = header(next("edges")?, "edges")?;
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (line, l) = next("edge")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        let bad = || LatticeError::Parse { line, msg: format!("expected `u v color`, got {l:?}") };
        if parts.len() != 3 {
            return Err(bad());
        }
        let u = parts[0].parse().map_err(|_| bad())?;
        let v = parts[1].parse().map_err(|_| bad())?;
        let color = color_token(parts[2]).ok_or_else(bad)?;
        edges.push(Edge { u, v, color });
    }
    let nf = header(next("faces")?, "faces")?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = next("face")?;
        let mut parts = l.split_whitespace();
        let bad = || LatticeError::Parse { line, msg: format!("expected `color v0 v1 ...`, got {l:?}") };
        let color = parts.next().and_then(color_token).ok_or_else(bad)?;
        let vertices = parts.map(|x| x.parse().map_err(|_| bad())).collect::<Result<Vec<usize>, _>>()?;
        faces.push(Face { color, vertices });
    }
    if let Some((line, _)) = lines.next() {
        return Err(LatticeError::Parse { line, msg: "trailing content".into() });
    }
    Tiling::new(p, q, level, n, edges, faces)
}

fn color_token(s: &str) -> Option<Color> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Color::from_char(c),
        _ => None,
    }
}
