use crate::anyon::Pauli;
use crate::lattice::Tiling;
use crate::stabsim::PauliString;

use super::{CircuitError, CircuitOptions, Detector, Family, Instant, MeasurementCircuit, Site, Step};

/// Checks whose outcome product equals one plaquette operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference {
    /// First step of the inference.
    pub time: usize,
    /// `(step, edge)` pairs.
    pub checks: Vec<(usize, usize)>,
}

/// One point on a plaquette stream: an anchor or an inference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub at: Instant,
    pub outcomes: Vec<usize>,
}

fn plaquette(t: &Tiling, face: usize, pauli: Pauli) -> PauliString {
    PauliString::from_paulis(t.num_vertices(), t.faces[face].vertices.iter().map(|&v| (v, pauli)))
}

fn boundary_of_color(t: &Tiling, face: usize, color: crate::lattice::Color) -> Vec<usize> {
    let mut es: Vec<usize> = t.face_edges(face).into_iter().filter(|&e| t.edges[e].color == color).collect();
    es.sort_unstable();
    es
}

fn product(t: &Tiling, checks: &[(usize, usize)], steps: &[Step]) -> PauliString {
    let mut p = PauliString::identity(t.num_vertices());
    for &(s, e) in checks {
        let edge = t.edges[e];
        p.mul_single(edge.u, steps[s].basis);
        p.mul_single(edge.v, steps[s].basis);
    }
    p
}

/// All inferences of plaquette `(face, pauli)` along the schedule.
///
/// HCF infers a plaquette in one step, from the alternating half of its
/// boundary measured in `pauli`. HF needs two consecutive steps whose edge
/// colors both differ from the face color.
pub fn plaquette_inference_sets(
    t: &Tiling,
    family: Family,
    steps: &[Step],
    face: usize,
    pauli: Pauli,
) -> Result<Vec<Inference>, CircuitError> {
    let c = t.faces[face].color;
    let target = plaquette(t, face, pauli);
    let mut out = Vec::new();
    for (s, step) in steps.iter().enumerate() {
        let checks: Vec<(usize, usize)> = match family {
            Family::Hcf => {
                if step.basis != pauli || step.color == c {
                    continue;
                }
                boundary_of_color(t, face, step.color).into_iter().map(|e| (s, e)).collect()
            }
            Family::Hf => {
                if s == 0 || step.color == c || steps[s - 1].color == c {
                    continue;
                }
                let prev = &steps[s - 1];
                let mut v: Vec<(usize, usize)> =
                    boundary_of_color(t, face, prev.color).into_iter().map(|e| (s - 1, e)).collect();
                v.extend(boundary_of_color(t, face, step.color).into_iter().map(|e| (s, e)));
                v
            }
        };
        if product(t, &checks, steps) != target {
            if family == Family::Hf {
                // this step pair infers a different Pauli type for the face
                continue;
            }
            return Err(CircuitError::Cover { face, pauli, time: s });
        }
        out.push(Inference { time: checks[0].0, checks });
    }
    Ok(out)
}

/// Pauli type of a face's stabilizer under the HF schedule: the basis measured
/// on edges of the face's own color.
fn hf_face_type(steps: &[Step], color: crate::lattice::Color) -> Pauli {
    steps.iter().find(|s| s.color == color).map(|s| s.basis).expect("every color is scheduled")
}

enum Item {
    Event(Event),
    Break,
}

fn stream(c: &MeasurementCircuit, t: &Tiling, face: usize, pauli: Pauli) -> Result<Vec<Item>, CircuitError> {
    let s_op = plaquette(t, face, pauli);
    let verts = &t.faces[face].vertices;
    let mut items = Vec::new();
    if c.basis == pauli {
        items.push(Item::Event(Event { at: Instant::Prep, outcomes: Vec::new() }));
    }
    let mut inferences = plaquette_inference_sets(t, c.family, &c.steps, face, pauli)?.into_iter().peekable();
    for (s, step) in c.steps.iter().enumerate() {
        let randomizes = verts.iter().any(|&v| {
            t.vertex_edges(v).iter().any(|&e| {
                t.edges[e].color == step.color && {
                    let m = PauliString::from_paulis(
                        t.num_vertices(),
                        [(t.edges[e].u, step.basis), (t.edges[e].v, step.basis)],
                    );
                    !m.commutes(&s_op)
                }
            })
        });
        if randomizes {
            items.push(Item::Break);
        }
        // an inference is complete once its last step has been measured
        while let Some(inf) = inferences.peek() {
            if inf.checks.last().unwrap().0 != s {
                break;
            }
            let mut outcomes: Vec<usize> =
                inf.checks.iter().map(|&(ts, e)| c.check_index(ts, e).expect("edge measured at step")).collect();
            outcomes.sort_unstable();
            items.push(Item::Event(Event { at: Instant::Step(inf.time), outcomes }));
            inferences.next();
        }
    }
    if c.basis == pauli {
        let mut outcomes: Vec<usize> = verts.iter().map(|&v| c.readout_index(v)).collect();
        outcomes.sort_unstable();
        items.push(Item::Event(Event { at: Instant::Readout, outcomes }));
    }
    Ok(items)
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        if i + 1 < v.len() && v[i] == v[i + 1] {
            i += 2;
        } else {
            out.push(v[i]);
            i += 1;
        }
    }
    out
}

/// Emit detectors for every plaquette stream.
///
/// Streams are cut into windows at steps that randomize the plaquette. HCF
/// pairs events within a window disjointly (1st with 2nd, 3rd with 4th), so
/// neighbouring detectors share no outcomes. HF compares every consecutive
/// pair, so neighbours share one two-step inference.
pub(super) fn attach_detectors(
    c: &mut MeasurementCircuit,
    t: &Tiling,
    options: CircuitOptions,
) -> Result<(), CircuitError> {
    let mut dets = Vec::new();
    for (f, face) in t.faces.iter().enumerate() {
        let types: Vec<Pauli> = match c.family {
            Family::Hf => vec![hf_face_type(&c.steps, face.color)],
            Family::Hcf if options.both_sectors => vec![Pauli::X, Pauli::Z],
            Family::Hcf => vec![c.basis],
        };
        for pauli in types {
            let items = stream(c, t, f, pauli)?;
            let mut windows: Vec<Vec<Event>> = vec![Vec::new()];
            for it in items {
                match it {
                    Item::Break => windows.push(Vec::new()),
                    Item::Event(e) => windows.last_mut().unwrap().push(e),
                }
            }
            for w in windows {
                let pairs: Vec<(&Event, &Event)> = match c.family {
                    Family::Hcf => w.chunks_exact(2).map(|p| (&p[0], &p[1])).collect(),
                    Family::Hf => w.windows(2).map(|p| (&p[0], &p[1])).collect(),
                };
                for (a, b) in pairs {
                    dets.push(Detector {
                        site: Site::Face(f),
                        color: face.color,
                        pauli,
                        first: a.at,
                        second: b.at,
                        outcomes: xor_sorted(&a.outcomes, &b.outcomes),
                        reference: false,
                    });
                }
            }
        }
    }
    if c.family == Family::Hf && options.check_anchors {
        dets.extend(check_anchors(c, t));
    }
    dets.sort_by_key(|d| (d.second, d.first, d.site, d.pauli));
    c.detectors = dets;
    Ok(())
}

/// Single-check detectors on the first and last layers, where those layers
/// are measured in the memory basis: right after the prep each check is
/// fixed, and right before readout it equals the product of its two readouts.
fn check_anchors(c: &MeasurementCircuit, t: &Tiling) -> Vec<Detector> {
    let mut out = Vec::new();
    let last = c.steps.len() - 1;
    for (s, at) in [(0, Instant::Prep), (last, Instant::Readout)] {
        let step = &c.steps[s];
        if step.basis != c.basis {
            continue;
        }
        for &e in &step.edges {
            let mut outcomes = vec![c.check_index(s, e).expect("edge measured at step")];
            if at == Instant::Readout {
                outcomes.extend([c.readout_index(t.edges[e].u), c.readout_index(t.edges[e].v)]);
            }
            outcomes.sort_unstable();
            let (first, second) = if at == Instant::Prep { (at, Instant::Step(s)) } else { (Instant::Step(s), at) };
            out.push(Detector {
                site: Site::Edge(e),
                color: step.color,
                pauli: step.basis,
                first,
                second,
                outcomes,
                reference: false,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_schedule;
    use crate::lattice::{build_base_lattice, Color};

    #[test]
    fn hcf_green_z_inferred_from_red_and_blue_steps() {
        let t = build_base_lattice("hcf16").unwrap();
        let steps = build_schedule(Family::Hcf, &t, 1).unwrap();
        let g = t.faces.iter().position(|f| f.color == Color::Green).unwrap();
        let inf = plaquette_inference_sets(&t, Family::Hcf, &steps, g, Pauli::Z).unwrap();
        let times: Vec<usize> = inf.iter().map(|i| i.time).collect();
        assert_eq!(times, vec![3, 5]);
        assert!(inf.iter().all(|i| i.checks.len() == 4));
    }

    #[test]
    fn hcf_x_inferences_cover_octagons() {
        let t = build_base_lattice("hcf16").unwrap();
        let steps = build_schedule(Family::Hcf, &t, 1).unwrap();
        for f in 0..t.num_faces() {
            for inf in plaquette_inference_sets(&t, Family::Hcf, &steps, f, Pauli::X).unwrap() {
                assert_eq!(inf.checks.len(), 4);
                let mut qs: Vec<usize> =
                    inf.checks.iter().flat_map(|&(_, e)| [t.edges[e].u, t.edges[e].v]).collect();
                qs.sort_unstable();
                let mut fv = t.faces[f].vertices.clone();
                fv.sort_unstable();
                assert_eq!(qs, fv);
            }
        }
    }

    #[test]
    fn hf_blue_faces_use_leading_and_trailing_pairs() {
        let t = build_base_lattice("hcf16").unwrap();
        let steps = build_schedule(Family::Hf, &t, 4).unwrap();
        for (f, face) in t.faces.iter().enumerate() {
            let ty = hf_face_type(&steps, face.color);
            let inf = plaquette_inference_sets(&t, Family::Hf, &steps, f, ty).unwrap();
            let pairs: Vec<Vec<usize>> =
                inf.iter().map(|i| {
                    let mut s: Vec<usize> = i.checks.iter().map(|c| c.0).collect();
                    s.dedup();
                    s
                }).collect();
            if face.color == Color::Blue {
                assert_eq!(ty, Pauli::Z);
                assert_eq!(pairs[..2], [vec![0, 1], vec![3, 4]]);
                assert_eq!(pairs[2..4], [vec![6, 7], vec![9, 10]]);
            }
        }
    }
}
