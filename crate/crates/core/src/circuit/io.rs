//! Plain-text circuit files.
//!
//! ```text
//! family hcf
//! qubits 16
//! basis Z
//! STEP r X 0:0-3 2:0-8 ...          edge:u-v per check
//! DETECTOR 3 b Z 3 7 0 : 12 13 ...   site color pauli first second reference : outcomes
//!                                   (site is a face, or e<edge> for a check anchor)
//! OBSERVABLE 0 Z 0 : 5 9 ...        loop basis reference : outcomes
//! NOISE 0 DEPOLARIZE2 0 3 0.001     time channel args p
//! ```
//!
//! Measurement indices follow execution order: each step's checks in the
//! listed order, then one readout per qubit. Observable supports are not
//! stored.

use std::fmt::Write as _;

use crate::anyon::Pauli;
use crate::lattice::Color;

use super::{
    Channel, CircuitError, Detector, Family, Instant, MeasKind, Measurement, MeasurementCircuit, NoiseSite,
    Observable, Site, Step,
};

pub fn emit(c: &MeasurementCircuit) -> String {
    let mut s = String::new();
    writeln!(s, "family {}", c.family).unwrap();
    writeln!(s, "qubits {}", c.num_qubits).unwrap();
    writeln!(s, "basis {}", c.basis).unwrap();
    for (t, step) in c.steps.iter().enumerate() {
        write!(s, "STEP {} {}", step.color.as_char(), step.basis).unwrap();
        for m in c.step_range(t) {
            let meas = &c.measurements[m];
            let MeasKind::Check { edge } = meas.kind else { unreachable!() };
            write!(s, " {edge}:{}-{}", meas.qubits[0], meas.qubits[1]).unwrap();
        }
        s.push('\n');
    }
    for d in &c.detectors {
        write!(
            s,
            "DETECTOR {} {} {} {} {} {} :",
            d.site,
            d.color.as_char(),
            d.pauli,
            d.first,
            d.second,
            u8::from(d.reference)
        )
        .unwrap();
        for o in &d.outcomes {
            write!(s, " {o}").unwrap();
        }
        s.push('\n');
    }
    for o in &c.observables {
        write!(s, "OBSERVABLE {} {} {} :", o.loop_index, o.basis, u8::from(o.reference)).unwrap();
        for x in &o.outcomes {
            write!(s, " {x}").unwrap();
        }
        s.push('\n');
    }
    for n in &c.noise {
        write!(s, "NOISE {} {}", n.time, n.channel.name()).unwrap();
        match n.channel {
            Channel::PrepFlip { qubit, pauli } => write!(s, " {qubit} {pauli}"),
            Channel::Depolarize1 { qubit } => write!(s, " {qubit}"),
            Channel::Depolarize2 { qubits } => write!(s, " {} {}", qubits[0], qubits[1]),
            Channel::MeasFlip { measurement } => write!(s, " {measurement}"),
            Channel::Correlated { qubits, measurement } => {
                write!(s, " {} {} {measurement}", qubits[0], qubits[1])
            }
        }
        .unwrap();
        writeln!(s, " {:?}", n.p).unwrap();
    }
    s
}

struct Cursor<'a> {
    line: usize,
    toks: std::str::SplitWhitespace<'a>,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> CircuitError {
        CircuitError::Parse { line: self.line, msg: msg.into() }
    }

    fn word(&mut self) -> Result<&'a str, CircuitError> {
        self.toks.next().ok_or_else(|| self.err("unexpected end of line"))
    }

    fn num<T: std::str::FromStr>(&mut self) -> Result<T, CircuitError> {
        let w = self.word()?;
        w.parse().map_err(|_| self.err(format!("bad number {w:?}")))
    }

    fn pauli(&mut self) -> Result<Pauli, CircuitError> {
        let w = self.word()?;
        single_char(w).and_then(Pauli::from_char).ok_or_else(|| self.err(format!("bad Pauli {w:?}")))
    }

    fn color(&mut self) -> Result<Color, CircuitError> {
        let w = self.word()?;
        single_char(w).and_then(Color::from_char).ok_or_else(|| self.err(format!("bad color {w:?}")))
    }

    fn instant(&mut self) -> Result<Instant, CircuitError> {
        match self.word()? {
            "P" => Ok(Instant::Prep),
            "R" => Ok(Instant::Readout),
            w => w.parse().map(Instant::Step).map_err(|_| self.err(format!("bad instant {w:?}"))),
        }
    }

    fn site(&mut self) -> Result<Site, CircuitError> {
        let w = self.word()?;
        let parsed = match w.strip_prefix('e') {
            Some(e) => e.parse().map(Site::Edge),
            None => w.parse().map(Site::Face),
        };
        parsed.map_err(|_| self.err(format!("bad detector site {w:?}")))
    }

    fn flag(&mut self) -> Result<bool, CircuitError> {
        match self.word()? {
            "0" => Ok(false),
            "1" => Ok(true),
            w => Err(self.err(format!("bad flag {w:?}"))),
        }
    }

    fn colon_then_list(&mut self) -> Result<Vec<usize>, CircuitError> {
        if self.word()? != ":" {
            return Err(self.err("expected ':'"));
        }
        let mut v = Vec::new();
        while let Some(w) = self.toks.next() {
            v.push(w.parse().map_err(|_| self.err(format!("bad index {w:?}")))?);
        }
        Ok(v)
    }

    fn done(&mut self) -> Result<(), CircuitError> {
        match self.toks.next() {
            None => Ok(()),
            Some(w) => Err(self.err(format!("trailing token {w:?}"))),
        }
    }
}

fn single_char(s: &str) -> Option<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

pub fn parse(text: &str) -> Result<MeasurementCircuit, CircuitError> {
    let mut family = None;
    let mut qubits = None;
    let mut basis = None;
    let mut steps = Vec::new();
    let mut checks: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    let mut detectors = Vec::new();
    let mut observables = Vec::new();
    let mut noise = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut cur = Cursor { line: i + 1, toks: l.split_whitespace() };
        match cur.word()? {
            "family" => family = Some(cur.word()?.parse::<Family>()?),
            "qubits" => qubits = Some(cur.num::<usize>()?),
            "basis" => basis = Some(cur.pauli()?),
            "STEP" => {
                let color = cur.color()?;
                let b = cur.pauli()?;
                let mut edges = Vec::new();
                let mut cs = Vec::new();
                for tok in cur.toks.by_ref() {
                    let bad = || CircuitError::Parse { line: i + 1, msg: format!("bad check {tok:?}") };
                    let (e, rest) = tok.split_once(':').ok_or_else(bad)?;
                    let (u, v) = rest.split_once('-').ok_or_else(bad)?;
                    let e: usize = e.parse().map_err(|_| bad())?;
                    edges.push(e);
                    cs.push((e, u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?));
                }
                steps.push(Step { color, basis: b, edges });
                checks.push(cs);
            }
            "DETECTOR" => {
                let site = cur.site()?;
                let color = cur.color()?;
                let pauli = cur.pauli()?;
                let first = cur.instant()?;
                let second = cur.instant()?;
                let reference = cur.flag()?;
                let outcomes = cur.colon_then_list()?;
                detectors.push(Detector { site, color, pauli, first, second, outcomes, reference });
            }
            "OBSERVABLE" => {
                let loop_index = cur.num()?;
                let b = cur.pauli()?;
                let reference = cur.flag()?;
                let outcomes = cur.colon_then_list()?;
                observables.push(Observable { loop_index, basis: b, support: Vec::new(), outcomes, reference });
            }
            "NOISE" => {
                let time = cur.num()?;
                let channel = match cur.word()? {
                    "PREP_FLIP" => Channel::PrepFlip { qubit: cur.num()?, pauli: cur.pauli()? },
                    "DEPOLARIZE1" => Channel::Depolarize1 { qubit: cur.num()? },
                    "DEPOLARIZE2" => Channel::Depolarize2 { qubits: [cur.num()?, cur.num()?] },
                    "MEAS_FLIP" => Channel::MeasFlip { measurement: cur.num()? },
                    "CORRELATED" => Channel::Correlated { qubits: [cur.num()?, cur.num()?], measurement: cur.num()? },
                    w => return Err(cur.err(format!("unknown channel {w:?}"))),
                };
                let p = cur.num()?;
                cur.done()?;
                noise.push(NoiseSite { time, channel, p });
            }
            w => return Err(cur.err(format!("unknown record {w:?}"))),
        }
    }
    let missing = |what: &str| CircuitError::Parse { line: 0, msg: format!("missing `{what}` header") };
    let family = family.ok_or_else(|| missing("family"))?;
    let n = qubits.ok_or_else(|| missing("qubits"))?;
    let basis = basis.ok_or_else(|| missing("basis"))?;

    let mut measurements = Vec::new();
    let mut step_offsets = Vec::with_capacity(steps.len() + 1);
    for (t, (step, cs)) in steps.iter().zip(&checks).enumerate() {
        step_offsets.push(measurements.len());
        for &(edge, u, v) in cs {
            measurements.push(Measurement { time: t, basis: step.basis, qubits: vec![u, v], kind: MeasKind::Check { edge } });
        }
    }
    step_offsets.push(measurements.len());
    for q in 0..n {
        measurements.push(Measurement {
            time: steps.len(),
            basis,
            qubits: vec![q],
            kind: MeasKind::Readout { qubit: q },
        });
    }
    let total = measurements.len();
    let in_range = |v: &[usize]| v.iter().all(|&x| x < total);
    if !detectors.iter().all(|d: &Detector| in_range(&d.outcomes))
        || !observables.iter().all(|o: &Observable| in_range(&o.outcomes))
    {
        return Err(CircuitError::Parse { line: 0, msg: "outcome index out of range".into() });
    }
    Ok(MeasurementCircuit { family, num_qubits: n, basis, steps, measurements, noise, detectors, observables, step_offsets })
}
