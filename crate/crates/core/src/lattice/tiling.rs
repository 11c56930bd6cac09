use std::collections::HashMap;
use std::fmt;

use super::{Color, LatticeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub color: Color,
}

impl Edge {
    /// The endpoint of this edge that is not `w`.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub color: Color,
    /// Boundary cycle, consistently oriented across the surface.
    pub vertices: Vec<usize>,
}

/// A compact trivalent tiling with three-colored faces.
///
/// Vertices are qubits `0..vertex_count`. Lookups are derived once at
/// construction; the raw parts stay public for serialization.
#[derive(Clone, Debug)]
pub struct Tiling {
    pub p: usize,
    pub q: usize,
    pub refinement_level: usize,
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    vertex_edges: Vec<Vec<usize>>,
    edge_lookup: HashMap<(usize, usize), usize>,
    face_edges: Vec<Vec<Option<usize>>>,
    edge_faces: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
}

impl PartialEq for Tiling {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.q == other.q
            && self.refinement_level == other.refinement_level
            && self.vertex_count == other.vertex_count
            && self.edges == other.edges
            && self.faces == other.faces
    }
}

impl Eq for Tiling {}

impl Tiling {
    /// Build lookups without checking the tiling invariants.
    ///
    /// Fails only when an index is out of range, since nothing else can be
    /// derived in that case.
    pub fn from_parts(
        p: usize,
        q: usize,
        refinement_level: usize,
        vertex_count: usize,
        edges: Vec<Edge>,
        faces: Vec<Face>,
    ) -> Result<Self, LatticeError> {
        let mut vertex_edges = vec![Vec::new(); vertex_count];
        let mut edge_lookup = HashMap::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            for w in [e.u, e.v] {
                if w >= vertex_count {
                    return Err(LatticeError::Malformed(format!(
                        "edge {k} references vertex {w} but vertex_count is {vertex_count}"
                    )));
                }
            }
            if e.u != e.v {
                vertex_edges[e.u].push(k);
                vertex_edges[e.v].push(k);
            }
            edge_lookup.entry(key(e.u, e.v)).or_insert(k);
        }
        let mut face_edges = Vec::with_capacity(faces.len());
        let mut edge_faces = vec![Vec::new(); edges.len()];
        let mut vertex_faces = vec![Vec::new(); vertex_count];
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&w) = f.vertices.iter().find(|&&w| w >= vertex_count) {
                return Err(LatticeError::Malformed(format!(
                    "face {fi} references vertex {w} but vertex_count is {vertex_count}"
                )));
            }
            let m = f.vertices.len();
            let mut fe = Vec::with_capacity(m);
            for i in 0..m {
                let a = f.vertices[i];
                let b = f.vertices[(i + 1) % m];
                let e = edge_lookup.get(&key(a, b)).copied();
                if let Some(e) = e {
                    edge_faces[e].push(fi);
                }
                fe.push(e);
            }
            for &w in &f.vertices {
                if !vertex_faces[w].contains(&fi) {
                    vertex_faces[w].push(fi);
                }
            }
            face_edges.push(fe);
        }
        Ok(Tiling {
            p,
            q,
            refinement_level,
            vertex_count,
            edges,
            faces,
            vertex_edges,
            edge_lookup,
            face_edges,
            edge_faces,
            vertex_faces,
        })
    }

    /// Build and validate; any invariant violation is an error.
    pub fn new(
        p: usize,
        q: usize,
        refinement_level: usize,
        vertex_count: usize,
        edges: Vec<Edge>,
        faces: Vec<Face>,
    ) -> Result<Self, LatticeError> {
        let t = Self::from_parts(p, q, refinement_level, vertex_count, edges, faces)?;
        let report = t.validate();
        if report.is_ok() {
            Ok(t)
        } else {
            Err(LatticeError::Invalid(report))
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_count
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Genus from the Euler characteristic.
    pub fn genus(&self) -> Result<usize, LatticeError> {
        let chi = self.euler_characteristic();
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(LatticeError::Malformed(format!("Euler characteristic {chi} is not 2 - 2g")));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    /// Number of logical qubits, 2g.
    pub fn logical_qubits(&self) -> Result<usize, LatticeError> {
        Ok(2 * self.genus()?)
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&key(a, b)).copied()
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    /// Boundary edges of face `f` in cycle order. Panics on an unvalidated
    /// tiling whose face has a missing edge.
    pub fn face_edges(&self, f: usize) -> Vec<usize> {
        self.face_edges[f].iter().map(|e| e.expect("validated tiling")).collect()
    }

    pub fn edges_of_color(&self, c: Color) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().enumerate().filter(move |(_, e)| e.color == c).map(|(k, _)| k)
    }

    /// The edge at `v` that does not lie on face `f` (trivalent tilings).
    pub fn off_face_edge(&self, v: usize, f: usize) -> Option<usize> {
        let fe = &self.face_edges[f];
        self.vertex_edges[v].iter().copied().find(|e| !fe.contains(&Some(*e)))
    }

    /// Edges at `v` in counter-clockwise order, derived from face orientation.
    ///
    /// A face traversing `u -> v -> w` occupies the sector from `vw` to `vu`,
    /// so the successor of `vw` around `v` is `vu`.
    pub fn rotation(&self, v: usize) -> Result<Vec<usize>, LatticeError> {
        let edges = &self.vertex_edges[v];
        let mut succ: HashMap<usize, usize> = HashMap::new();
        for &fi in &self.vertex_faces[v] {
            let f = &self.faces[fi];
            let m = f.vertices.len();
            for i in 0..m {
                if f.vertices[i] != v {
                    continue;
                }
                let u = f.vertices[(i + m - 1) % m];
                let w = f.vertices[(i + 1) % m];
                let (Some(vu), Some(vw)) = (self.edge_between(v, u), self.edge_between(v, w)) else {
                    return Err(LatticeError::Malformed(format!("face {fi} has a missing edge at vertex {v}")));
                };
                if succ.insert(vw, vu).is_some() {
                    return Err(LatticeError::Malformed(format!(
                        "inconsistent face orientation at vertex {v}"
                    )));
                }
            }
        }
        let Some(&start) = edges.first() else { return Ok(Vec::new()) };
        let mut order = vec![start];
        let mut cur = start;
        while order.len() < edges.len() {
            cur = *succ.get(&cur).ok_or_else(|| {
                LatticeError::Malformed(format!("vertex {v} rotation is not a single cycle"))
            })?;
            if cur == start {
                break;
            }
            order.push(cur);
        }
        if order.len() != edges.len() || succ.get(order.last().unwrap()) != Some(&start) {
            return Err(LatticeError::Malformed(format!("vertex {v} rotation is not a single cycle")));
        }
        Ok(order)
    }

    /// Check every tiling invariant and report all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();
        let n = self.vertex_count;
        let m = self.edges.len();

        let mut seen = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.u == e.v {
                out.push(Violation::SelfLoop { edge: k });
            } else if let Some(&first) = seen.get(&key(e.u, e.v)) {
                out.push(Violation::ParallelEdge { edge: k, first });
            } else {
                seen.insert(key(e.u, e.v), k);
            }
        }
        for v in 0..n {
            let d = self.vertex_edges[v].len();
            if d != 3 {
                out.push(Violation::VertexDegree { vertex: v, degree: d });
            }
        }
        for (fi, fe) in self.face_edges.iter().enumerate() {
            let f = &self.faces[fi];
            let len = f.vertices.len();
            for (i, e) in fe.iter().enumerate() {
                if e.is_none() {
                    out.push(Violation::MissingFaceEdge {
                        face: fi,
                        u: f.vertices[i],
                        v: f.vertices[(i + 1) % len],
                    });
                }
            }
            let mut sorted = f.vertices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != len || len < 3 {
                out.push(Violation::DegenerateFace { face: fi });
            }
            if self.refinement_level <= 1 {
                if len != self.p {
                    out.push(Violation::FaceSize { face: fi, size: len, allowed: vec![self.p] });
                }
            } else if len != 6 && len != self.p {
                out.push(Violation::FaceSize { face: fi, size: len, allowed: vec![6, self.p] });
            }
        }
        for (k, faces) in self.edge_faces.iter().enumerate() {
            if faces.len() != 2 {
                out.push(Violation::EdgeFaceCount { edge: k, count: faces.len() });
                continue;
            }
            let (fa, fb) = (faces[0], faces[1]);
            let (ca, cb) = (self.faces[fa].color, self.faces[fb].color);
            if ca == cb {
                out.push(Violation::AdjacentFacesShareColor { edge: k, faces: (fa, fb), color: ca });
            }
            let ec = self.edges[k].color;
            for (f, c) in [(fa, ca), (fb, cb)] {
                if c == ec {
                    out.push(Violation::EdgeColorClash { edge: k, face: f, color: ec });
                }
            }
            if ca != cb && ec != ca && ec != cb && ec != Color::third(ca, cb) {
                // unreachable with three colours, kept for clarity of intent
                out.push(Violation::EdgeColorClash { edge: k, face: fa, color: ec });
            }
            // consistent orientation: the two faces traverse the edge in opposite directions
            let e = self.edges[k];
            let da = self.traversal_direction(fa, e.u, e.v);
            let db = self.traversal_direction(fb, e.u, e.v);
            if let (Some(da), Some(db)) = (da, db) {
                if da == db {
                    out.push(Violation::InconsistentOrientation { edge: k });
                }
            }
        }
        if 3 * n != 2 * m {
            out.push(Violation::DoubleCounting { what: "3|V| = 2|E|", lhs: 3 * n, rhs: 2 * m });
        }
        let incidences: usize = self.faces.iter().map(|f| f.vertices.len()).sum();
        if incidences != 2 * m {
            out.push(Violation::DoubleCounting { what: "sum |f| = 2|E|", lhs: incidences, rhs: 2 * m });
        }
        let chi = self.euler_characteristic();
        if chi > 2 || (2 - chi) % 2 != 0 {
            out.push(Violation::EulerCharacteristic { chi });
        } else if self.refinement_level <= 1 && self.q >= 3 && self.p >= 3 {
            if let Ok(g) = genus(self.p, self.q, m) {
                if g as i64 != (2 - chi) / 2 {
                    out.push(Violation::GenusMismatch { euler: ((2 - chi) / 2) as usize, formula: g });
                }
            }
        }
        ValidationReport { violations: out }
    }

    // true when face `f` walks u -> v, false when v -> u, None if the edge is not on f
    fn traversal_direction(&self, f: usize, u: usize, v: usize) -> Option<bool> {
        let vs = &self.faces[f].vertices;
        let m = vs.len();
        for i in 0..m {
            let a = vs[i];
            let b = vs[(i + 1) % m];
            if a == u && b == v {
                return Some(true);
            }
            if a == v && b == u {
                return Some(false);
            }
        }
        None
    }
}

#[inline]
fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Genus of a compact `{p, q}` tiling with `num_edges` edges:
/// `g = 1 - |E| (1/p + 1/q - 1/2)`.
pub fn genus(p: usize, q: usize, num_edges: usize) -> Result<usize, LatticeError> {
    let bad = || LatticeError::InvalidParameters { p, q, num_edges };
    if p < 3 || q < 3 {
        return Err(bad());
    }
    // g = (2pq - |E| (2q + 2p - pq)) / (2pq), all in integers
    let (p_, q_, e_) = (p as i128, q as i128, num_edges as i128);
    let num = 2 * p_ * q_ - e_ * (2 * q_ + 2 * p_ - p_ * q_);
    let den = 2 * p_ * q_;
    if num < 0 || num % den != 0 {
        return Err(bad());
    }
    Ok((num / den) as usize)
}

/// One violated tiling invariant, with the offending element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    VertexDegree { vertex: usize, degree: usize },
    SelfLoop { edge: usize },
    ParallelEdge { edge: usize, first: usize },
    EdgeFaceCount { edge: usize, count: usize },
    AdjacentFacesShareColor { edge: usize, faces: (usize, usize), color: Color },
    EdgeColorClash { edge: usize, face: usize, color: Color },
    MissingFaceEdge { face: usize, u: usize, v: usize },
    DegenerateFace { face: usize },
    FaceSize { face: usize, size: usize, allowed: Vec<usize> },
    InconsistentOrientation { edge: usize },
    DoubleCounting { what: &'static str, lhs: usize, rhs: usize },
    EulerCharacteristic { chi: i64 },
    GenusMismatch { euler: usize, formula: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexDegree { vertex, degree } => {
                write!(f, "vertex {vertex} has degree {degree}, expected 3")
            }
            Violation::SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            Violation::ParallelEdge { edge, first } => {
                write!(f, "edge {edge} duplicates edge {first}")
            }
            Violation::EdgeFaceCount { edge, count } => {
                write!(f, "edge {edge} lies on {count} faces, expected 2")
            }
            Violation::AdjacentFacesShareColor { edge, faces, color } => write!(
                f,
                "adjacent faces share color: faces {} and {} across edge {edge} are both {color}",
                faces.0, faces.1
            ),
            Violation::EdgeColorClash { edge, face, color } => {
                write!(f, "edge color clashes with face: edge {edge} and face {face} are both {color}")
            }
            Violation::MissingFaceEdge { face, u, v } => {
                write!(f, "face {face} steps {u} -> {v} but no such edge exists")
            }
            Violation::DegenerateFace { face } => write!(f, "face {face} repeats a vertex or is too short"),
            Violation::FaceSize { face, size, allowed } => {
                write!(f, "face {face} has {size} sides, allowed {allowed:?}")
            }
            Violation::InconsistentOrientation { edge } => {
                write!(f, "both faces traverse edge {edge} in the same direction")
            }
            Violation::DoubleCounting { what, lhs, rhs } => {
                write!(f, "double counting fails: {what} ({lhs} != {rhs})")
            }
            Violation::EulerCharacteristic { chi } => {
                write!(f, "Euler characteristic {chi} is not of the form 2 - 2g")
            }
            Violation::GenusMismatch { euler, formula } => {
                write!(f, "genus from Euler characteristic is {euler} but the {{p,q}} formula gives {formula}")
            }
        }
    }
}

/// Result of [`Tiling::validate`]; empty means every invariant holds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
