//! Verification oracles: classical reversible replay and dense statevectors.

use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::circuit_ir::{Gate, GateKind, Schedule};
use crate::{Error, Result};

pub const MAX_WIRES: usize = 14;

/// One bit per logical label. Labels never written read as 0.
pub type ClassicalState = HashMap<String, bool>;

/// Permutation semantics. A SWAP moves two qubits on the lattice but each state
/// travels with its label, so it leaves the label-indexed state unchanged.
pub fn classical_run(schedule: &Schedule, inputs: &ClassicalState) -> Result<ClassicalState> {
    let mut st = inputs.clone();
    for g in schedule.gates() {
        classical_apply(&mut st, g)?;
    }
    Ok(st)
}

pub fn classical_apply(st: &mut ClassicalState, g: &Gate) -> Result<()> {
    let get = |st: &ClassicalState, l: &str| st.get(l).copied().unwrap_or(false);
    let ops = &g.operands;
    match g.kind {
        GateKind::X => {
            let v = get(st, &ops[0]);
            st.insert(ops[0].clone(), !v);
        }
        GateKind::CNOT => {
            if get(st, &ops[0]) {
                let v = get(st, &ops[1]);
                st.insert(ops[1].clone(), !v);
            }
        }
        GateKind::Toffoli => {
            if get(st, &ops[0]) && get(st, &ops[1]) {
                let v = get(st, &ops[2]);
                st.insert(ops[2].clone(), !v);
            }
        }
        GateKind::SWAP => {}
        k => return Err(Error::UnsupportedGate(format!("{k:?} in classical replay"))),
    }
    Ok(())
}

/// Dense state over an ordered wire list; wire 0 is the most significant bit.
#[derive(Debug, Clone)]
pub struct QuantumState {
    pub wires: Vec<String>,
    pub amps: Vec<Complex64>,
}

impl QuantumState {
    pub fn basis(wires: &[String], bits: &[bool]) -> Result<QuantumState> {
        if wires.len() > MAX_WIRES {
            return Err(Error::Capacity(format!(
                "{} wires exceeds the {MAX_WIRES}-wire limit",
                wires.len()
            )));
        }
        let k = wires.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << k];
        let mut idx = 0;
        for (i, b) in bits.iter().enumerate() {
            if *b {
                idx |= 1 << (k - 1 - i);
            }
        }
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(QuantumState {
            wires: wires.to_vec(),
            amps,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn bit(&self, wire: &str) -> Result<usize> {
        let i = self
            .wires
            .iter()
            .position(|w| w == wire)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown wire {wire}")))?;
        Ok(self.wires.len() - 1 - i)
    }

    fn apply_1q(&mut self, b: usize, m: [[Complex64; 2]; 2]) {
        let mask = 1 << b;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn phase_if(&mut self, mask: usize, ph: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= ph;
            }
        }
    }

    fn flip_if(&mut self, ctrl: usize, target: usize) {
        let t = 1 << target;
        for i in 0..self.amps.len() {
            if i & ctrl == ctrl && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Projects `b` onto |outcome>, without renormalising.
    fn project(&mut self, b: usize, outcome: bool) {
        let mask = 1 << b;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }
}

/// An outcome branch: measurement records so far and the unnormalised state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub records: Vec<bool>,
    pub state: QuantumState,
}

impl Branch {
    pub fn probability(&self) -> f64 {
        self.state.norm_sqr()
    }

    pub fn normalised(&self) -> QuantumState {
        let n = self.probability().sqrt();
        QuantumState {
            wires: self.state.wires.clone(),
            amps: self.state.amps.iter().map(|a| a / n).collect(),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn apply(br: &mut Branch, g: &Gate) -> Result<Option<Branch>> {
    let st = &mut br.state;
    let b = |st: &QuantumState, i: usize| st.bit(&g.operands[i]);
    let w = FRAC_1_SQRT_2;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match g.kind {
        GateKind::H => st.apply_1q(b(st, 0)?, [[c(w, 0.0), c(w, 0.0)], [c(w, 0.0), c(-w, 0.0)]]),
        GateKind::X => st.apply_1q(b(st, 0)?, [[zero, one], [one, zero]]),
        GateKind::T => st.phase_if(1 << b(st, 0)?, c(w, w)),
        GateKind::Tdag => st.phase_if(1 << b(st, 0)?, c(w, -w)),
        GateKind::S => st.phase_if(1 << b(st, 0)?, c(0.0, 1.0)),
        GateKind::Sdag => st.phase_if(1 << b(st, 0)?, c(0.0, -1.0)),
        GateKind::CZ => st.phase_if((1 << b(st, 0)?) | (1 << b(st, 1)?), c(-1.0, 0.0)),
        GateKind::CCZ => st.phase_if(
            (1 << b(st, 0)?) | (1 << b(st, 1)?) | (1 << b(st, 2)?),
            c(-1.0, 0.0),
        ),
        GateKind::CNOT => st.flip_if(1 << b(st, 0)?, b(st, 1)?),
        GateKind::Toffoli => st.flip_if((1 << b(st, 0)?) | (1 << b(st, 1)?), b(st, 2)?),
        GateKind::SWAP => {
            let (p, q) = (b(st, 0)?, b(st, 1)?);
            st.flip_if(1 << p, q);
            st.flip_if(1 << q, p);
            st.flip_if(1 << p, q);
        }
        GateKind::ClassicallyControlledCZ => {
            let rec = g
                .condition
                .ok_or_else(|| Error::InvalidArgument("classically controlled CZ without record".into()))?;
            let fire = *br.records.get(rec).ok_or_else(|| {
                Error::Schedule(format!("measurement record {rec} used before it exists"))
            })?;
            if fire {
                let st = &mut br.state;
                st.phase_if((1 << b(st, 0)?) | (1 << b(st, 1)?), c(-1.0, 0.0));
            }
        }
        GateKind::MeasureX | GateKind::MeasureZ => {
            // projective measurement, then the qubit is reset to |0>
            let q = b(st, 0)?;
            let hm = [[c(w, 0.0), c(w, 0.0)], [c(w, 0.0), c(-w, 0.0)]];
            if g.kind == GateKind::MeasureX {
                st.apply_1q(q, hm);
            }
            let mut other = br.clone();
            br.state.project(q, false);
            br.records.push(false);
            other.state.project(q, true);
            other.state.apply_1q(q, [[zero, one], [one, zero]]);
            other.records.push(true);
            return Ok(Some(other));
        }
    }
    Ok(None)
}

/// Runs a schedule; each measurement forks the branch set. Branches with zero
/// weight are dropped.
pub fn statevector_run(schedule: &Schedule, initial: &QuantumState) -> Result<Vec<Branch>> {
    if initial.wires.len() > MAX_WIRES {
        return Err(Error::Capacity(format!("{} wires", initial.wires.len())));
    }
    let mut branches = vec![Branch {
        records: vec![],
        state: initial.clone(),
    }];
    for g in schedule.gates() {
        let mut forked = Vec::new();
        for br in branches.iter_mut() {
            if let Some(o) = apply(br, g)? {
                forked.push(o);
            }
        }
        branches.extend(forked);
        branches.retain(|b| b.probability() > 1e-24);
    }
    Ok(branches)
}

/// Reference behaviour on the data wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Identity,
    Toffoli,
    Ccz,
    /// Controlled-S: phase i on |11>.
    Cs,
    /// Target (starting at 0) ends as a AND b, any phase per basis state.
    And,
}

impl Reference {
    /// Image of a data basis state and its phase.
    fn image(self, bits: &[bool]) -> (Vec<bool>, Complex64) {
        let mut out = bits.to_vec();
        let mut ph = c(1.0, 0.0);
        match self {
            Reference::Identity => {}
            Reference::Toffoli | Reference::And => {
                if bits[0] && bits[1] {
                    out[2] = !out[2];
                }
            }
            Reference::Ccz => {
                if bits[0] && bits[1] && bits[2] {
                    ph = c(-1.0, 0.0);
                }
            }
            Reference::Cs => {
                if bits[0] && bits[1] {
                    ph = c(0.0, 1.0);
                }
            }
        }
        (out, ph)
    }

    pub fn data_width(self) -> usize {
        match self {
            Reference::Cs => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquivReport {
    pub equivalent: bool,
    pub worst_deviation: f64,
    pub branches: usize,
    pub detail: String,
}

/// Checks the schedule against `reference` on `data` wires, with every other wire
/// starting and ending in |0>. Each measurement branch must realise the reference
/// up to one complex scalar, so the overall check is up to global phase.
pub fn assert_equiv(
    schedule: &Schedule,
    reference: Reference,
    data: &[&str],
    ancillae: &[&str],
    tol: f64,
) -> Result<EquivReport> {
    if data.len() != reference.data_width() {
        return Err(Error::InvalidArgument(format!(
            "{reference:?} acts on {} data wires",
            reference.data_width()
        )));
    }
    let mut wires: Vec<String> = data.iter().map(|s| s.to_string()).collect();
    wires.extend(ancillae.iter().map(|s| s.to_string()));
    for w in schedule.wires() {
        if !wires.contains(&w) {
            return Err(Error::InvalidArgument(format!("wire {w} not declared")));
        }
    }
    let k = wires.len();
    let d = data.len();
    // records -> list of (input index, output state)
    let mut by_branch: BTreeMap<Vec<bool>, Vec<(usize, QuantumState)>> = BTreeMap::new();
    for x in 0..(1usize << d) {
        if reference == Reference::And && x & 1 == 1 {
            continue;
        }
        let mut bits = vec![false; k];
        for (i, b) in bits.iter_mut().enumerate().take(d) {
            *b = (x >> (d - 1 - i)) & 1 == 1;
        }
        let init = QuantumState::basis(&wires, &bits)?;
        for br in statevector_run(schedule, &init)? {
            by_branch.entry(br.records.clone()).or_default().push((x, br.state));
        }
    }
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for (rec, cols) in &by_branch {
        let mut scale: Option<Complex64> = None;
        for (x, out) in cols {
            let bits: Vec<bool> = (0..d).map(|i| (x >> (d - 1 - i)) & 1 == 1).collect();
            let (img, ph) = reference.image(&bits);
            let mut idx = 0;
            for (i, b) in img.iter().enumerate() {
                if *b {
                    idx |= 1 << (k - 1 - i);
                }
            }
            let got = out.amps[idx];
            let factor = if reference == Reference::And {
                // relative phase is free, only the magnitude must agree
                let s = scale.get_or_insert(c(got.norm(), 0.0)).re;
                if got.norm() > 0.0 {
                    got / got.norm() * s
                } else {
                    c(s, 0.0)
                }
            } else {
                *scale.get_or_insert(got / ph) * ph
            };
            for (i, a) in out.amps.iter().enumerate() {
                let want = if i == idx { factor } else { c(0.0, 0.0) };
                let dev = (a - want).norm();
                if dev > worst {
                    worst = dev;
                    detail = format!("branch {rec:?}, input {x:0d$b}, amplitude {i}: got {a}, want {want}");
                }
            }
        }
    }
    Ok(EquivReport {
        equivalent: worst <= tol,
        worst_deviation: worst,
        branches: by_branch.len(),
        detail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_ir::{cnot, h, toffoli, x};

    #[test]
    fn hadamard_on_zero() {
        let w = vec!["q".to_string()];
        let st = QuantumState::basis(&w, &[false]).unwrap();
        let out = statevector_run(&Schedule::from_layers(vec![vec![h("q")]]), &st).unwrap();
        assert_eq!(out.len(), 1);
        for a in &out[0].state.amps {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
    }

    #[test]
    fn classical_toffoli_chain() {
        let s = Schedule::from_layers(vec![vec![x("a")], vec![cnot("a", "b")], vec![toffoli("a", "b", "c")]]);
        let out = classical_run(&s, &ClassicalState::new()).unwrap();
        assert!(out["a"] && out["b"] && out["c"]);
    }

    #[test]
    fn classical_rejects_hadamard() {
        let s = Schedule::from_layers(vec![vec![h("a")]]);
        assert!(matches!(
            classical_run(&s, &ClassicalState::new()),
            Err(Error::UnsupportedGate(_))
        ));
    }

    #[test]
    fn capacity_limit() {
        let w: Vec<String> = (0..15).map(|i| format!("q{i}")).collect();
        assert!(matches!(
            QuantumState::basis(&w, &[]),
            Err(Error::Capacity(_))
        ));
    }
}
