//! Plain-text DEM files.
//!
//! ```text
//! detectors 120
//! observables 4
//! error(0.0011) D3 D17 L0
//! ```
//!
//! Probabilities use the shortest decimal that parses back to the same
//! `f64`, so a file round-trips bit for bit. Provenance is not stored.

use std::fmt::Write as _;

use super::{DemError, DetectorErrorModel, FaultMechanism};

pub fn emit(model: &DetectorErrorModel) -> String {
    let mut s = String::new();
    writeln!(s, "detectors {}", model.num_detectors).unwrap();
    writeln!(s, "observables {}", model.num_observables).unwrap();
    for m in &model.mechanisms {
        write!(s, "error({:?})", m.p).unwrap();
        for d in &m.detectors {
            write!(s, " D{d}").unwrap();
        }
        for o in &m.observables {
            write!(s, " L{o}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn parse(text: &str) -> Result<DetectorErrorModel, DemError> {
    let mut nd = None;
    let mut no = None;
    let mut mechanisms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| DemError::Parse { line, msg };
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut toks = l.split_whitespace();
        let head = toks.next().unwrap();
        let count = |t: Option<&str>| -> Result<usize, DemError> {
            let t = t.ok_or_else(|| err("missing count".into()))?;
            t.parse().map_err(|_| err(format!("bad count {t:?}")))
        };
        if head == "detectors" {
            nd = Some(count(toks.next())?);
            continue;
        }
        if head == "observables" {
            no = Some(count(toks.next())?);
            continue;
        }
        let p = head
            .strip_prefix("error(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| err(format!("unknown record {head:?}")))?;
        let p: f64 = p.parse().map_err(|_| err(format!("bad probability {p:?}")))?;
        if !(p > 0.0 && p < 1.0) {
            return Err(err(format!("probability {p} outside (0, 1)")));
        }
        let (nd, no) = match (nd, no) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(err("error record before the detectors/observables header".into())),
        };
        let mut detectors = Vec::new();
        let mut observables = Vec::new();
        for t in toks {
            let (list, limit, rest) = match t.split_at(1) {
                ("D", r) => (&mut detectors, nd, r),
                ("L", r) => (&mut observables, no, r),
                _ => return Err(err(format!("bad target {t:?}"))),
            };
            let k: usize = rest.parse().map_err(|_| err(format!("bad target {t:?}")))?;
            if k >= limit {
                return Err(err(format!("target {t} out of range")));
            }
            list.push(k);
        }
        for list in [&mut detectors, &mut observables] {
            let n = list.len();
            list.sort_unstable();
            list.dedup();
            if list.len() != n {
                return Err(err("repeated target".into()));
            }
        }
        mechanisms.push(FaultMechanism { p, detectors, observables, provenance: Vec::new() });
    }
    Ok(DetectorErrorModel {
        num_detectors: nd.ok_or_else(|| DemError::Parse { line: 0, msg: "missing `detectors` header".into() })?,
        num_observables: no.ok_or_else(|| DemError::Parse { line: 0, msg: "missing `observables` header".into() })?,
        mechanisms,
    })
}
