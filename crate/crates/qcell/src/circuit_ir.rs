//! Gate-level IR: gates grouped into disjoint-support moments, plus metrics.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::lattice::Site;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    T,
    Tdag,
    S,
    Sdag,
    X,
    CNOT,
    CZ,
    SWAP,
    Toffoli,
    CCZ,
    MeasureX,
    MeasureZ,
    ClassicallyControlledCZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        use GateKind::*;
        match self {
            H | T | Tdag | S | Sdag | X | MeasureX | MeasureZ => 1,
            CNOT | CZ | SWAP | ClassicallyControlledCZ => 2,
            Toffoli | CCZ => 3,
        }
    }

    pub fn is_t(self) -> bool {
        matches!(self, GateKind::T | GateKind::Tdag)
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, GateKind::MeasureX | GateKind::MeasureZ)
    }
}

/// A gate on logical labels. For CNOT and Toffoli the target is the last operand.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub operands: Vec<String>,
    /// Index of the measurement record this gate is conditioned on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<usize>,
    /// Set on SWAPs that only shuffle qubits inside a storage queue.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub storage: bool,
}

impl Gate {
    pub fn new(kind: GateKind, operands: &[&str]) -> Result<Gate> {
        Gate::from_labels(kind, operands.iter().map(|s| s.to_string()).collect())
    }

    pub fn from_labels(kind: GateKind, operands: Vec<String>) -> Result<Gate> {
        let g = Gate {
            kind,
            operands,
            condition: None,
            storage: false,
        };
        g.check()?;
        Ok(g)
    }

    pub fn conditioned(mut self, record: usize) -> Gate {
        self.condition = Some(record);
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.operands.len() != self.kind.arity() {
            return Err(Error::InvalidArgument(format!(
                "{:?} takes {} operands, got {}",
                self.kind,
                self.kind.arity(),
                self.operands.len()
            )));
        }
        for (i, a) in self.operands.iter().enumerate() {
            if self.operands[..i].contains(a) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate operand {a} in {:?}",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

pub fn h(q: &str) -> Gate {
    Gate::new(GateKind::H, &[q]).unwrap()
}
pub fn t(q: &str) -> Gate {
    Gate::new(GateKind::T, &[q]).unwrap()
}
pub fn tdg(q: &str) -> Gate {
    Gate::new(GateKind::Tdag, &[q]).unwrap()
}
pub fn s(q: &str) -> Gate {
    Gate::new(GateKind::S, &[q]).unwrap()
}
pub fn x(q: &str) -> Gate {
    Gate::new(GateKind::X, &[q]).unwrap()
}
pub fn cnot(c: &str, tg: &str) -> Gate {
    Gate::new(GateKind::CNOT, &[c, tg]).unwrap()
}
pub fn cz(a: &str, b: &str) -> Gate {
    Gate::new(GateKind::CZ, &[a, b]).unwrap()
}
pub fn swap(a: &str, b: &str) -> Gate {
    Gate::new(GateKind::SWAP, &[a, b]).unwrap()
}
pub fn toffoli(c1: &str, c2: &str, tg: &str) -> Gate {
    Gate::new(GateKind::Toffoli, &[c1, c2, tg]).unwrap()
}
pub fn ccz(a: &str, b: &str, c: &str) -> Gate {
    Gate::new(GateKind::CCZ, &[a, b, c]).unwrap()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Moment {
    pub gates: Vec<Gate>,
}

impl Moment {
    pub fn touches(&self, label: &str) -> bool {
        self.gates.iter().any(|g| g.operands.iter().any(|o| o == label))
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = HashSet::new();
        self.gates
            .iter()
            .flat_map(|g| g.operands.iter())
            .all(|o| seen.insert(o.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendMode {
    NewMoment,
    EarliestFit,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub moments: Vec<Moment>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn from_layers(layers: Vec<Vec<Gate>>) -> Self {
        Schedule {
            moments: layers.into_iter().map(|gates| Moment { gates }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.moments.iter().flat_map(|m| m.gates.iter())
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates().filter(|g| g.kind == kind).count()
    }

    /// Labels in order of first appearance.
    pub fn wires(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in self.gates() {
            for o in &g.operands {
                if seen.insert(o.clone()) {
                    out.push(o.clone());
                }
            }
        }
        out
    }

    pub fn append(&mut self, gate: Gate, mode: AppendMode) -> Result<()> {
        gate.check()?;
        if mode == AppendMode::NewMoment {
            self.moments.push(Moment { gates: vec![gate] });
            return Ok(());
        }
        let mut after = None;
        for (i, m) in self.moments.iter().enumerate().rev() {
            if gate.operands.iter().any(|o| m.touches(o)) {
                after = Some(i);
                break;
            }
        }
        if let Some(rec) = gate.condition {
            if let Some(i) = self.measurement_moment(rec) {
                after = Some(after.map_or(i, |a: usize| a.max(i)));
            }
        }
        let slot = after.map_or(0, |i| i + 1);
        if slot < self.moments.len() {
            self.moments[slot].gates.push(gate);
        } else {
            self.moments.push(Moment { gates: vec![gate] });
        }
        Ok(())
    }

    pub fn extend(&mut self, other: &Schedule) {
        self.moments.extend(other.moments.iter().cloned());
    }

    fn measurement_moment(&self, record: usize) -> Option<usize> {
        let mut k = 0;
        for (i, m) in self.moments.iter().enumerate() {
            for g in &m.gates {
                if g.kind.is_measurement() {
                    if k == record {
                        return Some(i);
                    }
                    k += 1;
                }
            }
        }
        None
    }

    pub fn is_valid(&self) -> bool {
        self.moments.iter().all(|m| m.is_disjoint())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialises")
    }

    pub fn from_json(s: &str) -> Result<Schedule> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// Per-kind weights for the critical-path depth.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthPolicy {
    pub name: &'static str,
    pub weights: HashMap<GateKind, u32>,
    /// Single-qubit Cliffords cost nothing and CNOT fan-outs from one control share a layer.
    pub merge_free_singles: bool,
}

impl DepthPolicy {
    fn base(name: &'static str, swap: u32, merge: bool) -> DepthPolicy {
        use GateKind::*;
        let mut weights = HashMap::new();
        for k in [
            H, T, Tdag, S, Sdag, X, CNOT, CZ, Toffoli, CCZ, MeasureX, MeasureZ,
            ClassicallyControlledCZ,
        ] {
            weights.insert(k, 1);
        }
        weights.insert(SWAP, swap);
        if merge {
            for k in [H, S, Sdag, X] {
                weights.insert(k, 0);
            }
        }
        DepthPolicy {
            name,
            weights,
            merge_free_singles: merge,
        }
    }

    /// Unit CNOTs, free single-qubit Cliffords, fan-out CNOTs merged. Gives 7 on the T-depth-2 Toffoli.
    pub fn parallel() -> DepthPolicy {
        DepthPolicy::base("parallel", 1, true)
    }

    /// Every gate costs one layer. Gives 9 on the T-depth-2 Toffoli.
    pub fn strict() -> DepthPolicy {
        DepthPolicy::base("strict", 1, false)
    }

    /// Strict, with a SWAP expanded into three CNOTs.
    pub fn swap_as_three_cnots() -> DepthPolicy {
        DepthPolicy::base("swap3", 3, false)
    }

    /// Strict, with a SWAP into a known |0> site costing two CNOTs.
    pub fn swap_as_two_cnots() -> DepthPolicy {
        DepthPolicy::base("swap2", 2, false)
    }

    pub fn all() -> Vec<DepthPolicy> {
        vec![
            DepthPolicy::parallel(),
            DepthPolicy::strict(),
            DepthPolicy::swap_as_three_cnots(),
            DepthPolicy::swap_as_two_cnots(),
        ]
    }

    pub fn weight(&self, k: GateKind) -> u32 {
        self.weights.get(&k).copied().unwrap_or(1)
    }
}

/// Weighted critical path over the moments, in execution order.
pub fn depth(schedule: &Schedule, policy: &DepthPolicy) -> u32 {
    let mut ready: HashMap<&str, u32> = HashMap::new();
    // control -> (start layer, end layer) of the last CNOT fan-out group
    let mut fanout: HashMap<&str, (u32, u32)> = HashMap::new();
    let mut total = 0;
    for g in schedule.gates() {
        let w = policy.weight(g.kind);
        let mut start = g
            .operands
            .iter()
            .map(|o| ready.get(o.as_str()).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        if policy.merge_free_singles && g.kind == GateKind::CNOT {
            let (c, tg) = (g.operands[0].as_str(), g.operands[1].as_str());
            if let Some(&(s0, e0)) = fanout.get(c) {
                let t_ready = ready.get(tg).copied().unwrap_or(0);
                if ready.get(c).copied().unwrap_or(0) == e0 && t_ready <= s0 {
                    start = s0;
                }
            }
            fanout.insert(c, (start, start + w));
        } else {
            for o in &g.operands {
                fanout.remove(o.as_str());
            }
        }
        let end = start + w;
        for o in &g.operands {
            let r = ready.entry(o.as_str()).or_insert(0);
            *r = (*r).max(end);
        }
        total = total.max(end);
    }
    total
}

/// (T-count, number of moments holding a T or T-dagger).
pub fn t_metrics(schedule: &Schedule) -> (usize, usize) {
    let count = schedule.gates().filter(|g| g.kind.is_t()).count();
    let depth = schedule
        .moments
        .iter()
        .filter(|m| m.gates.iter().any(|g| g.kind.is_t()))
        .count();
    (count, depth)
}

/// Bijection between logical labels and lattice sites.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mapping {
    to_site: BTreeMap<String, Site>,
    #[serde(skip)]
    to_label: HashMap<Site, String>,
}

impl Mapping {
    pub fn new() -> Self {
        Mapping::default()
    }

    pub fn insert(&mut self, label: &str, site: Site) -> Result<()> {
        if self.to_site.contains_key(label) {
            return Err(Error::InvalidArgument(format!("label {label} already mapped")));
        }
        if let Some(other) = self.to_label.get(&site) {
            return Err(Error::InvalidArgument(format!("site {site} already holds {other}")));
        }
        self.to_site.insert(label.to_string(), site);
        self.to_label.insert(site, label.to_string());
        Ok(())
    }

    pub fn site(&self, label: &str) -> Option<Site> {
        self.to_site.get(label).copied()
    }

    pub fn label(&self, site: &Site) -> Option<&str> {
        self.to_label.get(site).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.to_site.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_site.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Site)> {
        self.to_site.iter()
    }

    pub fn swap_labels(&mut self, a: &str, b: &str) -> Result<()> {
        let sa = self
            .site(a)
            .ok_or_else(|| Error::Schedule(format!("unmapped label {a}")))?;
        let sb = self
            .site(b)
            .ok_or_else(|| Error::Schedule(format!("unmapped label {b}")))?;
        self.to_site.insert(a.to_string(), sb);
        self.to_site.insert(b.to_string(), sa);
        self.to_label.insert(sa, b.to_string());
        self.to_label.insert(sb, a.to_string());
        Ok(())
    }

    pub fn swap_sites(&mut self, p: &Site, q: &Site) -> Result<()> {
        let a = self
            .label(p)
            .ok_or_else(|| Error::Schedule(format!("empty site {p}")))?
            .to_string();
        let b = self
            .label(q)
            .ok_or_else(|| Error::Schedule(format!("empty site {q}")))?
            .to_string();
        self.swap_labels(&a, &b)
    }

    /// Rebuilds the reverse index, needed after deserialising.
    pub fn reindex(&mut self) {
        self.to_label = self.to_site.iter().map(|(l, s)| (*s, l.clone())).collect();
    }
}

/// SWAP count and depth, skipping SWAPs whose two sites both lie in `storage`.
pub fn swap_metrics(
    schedule: &Schedule,
    mapping0: &Mapping,
    storage: &HashSet<Site>,
) -> Result<(usize, usize)> {
    let mut m = mapping0.clone();
    let (mut count, mut depth) = (0, 0);
    for moment in &schedule.moments {
        let mut counted = false;
        for g in moment.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
            let (a, b) = (&g.operands[0], &g.operands[1]);
            let sa = m.site(a).ok_or_else(|| Error::Schedule(format!("unmapped {a}")))?;
            let sb = m.site(b).ok_or_else(|| Error::Schedule(format!("unmapped {b}")))?;
            if !(storage.contains(&sa) && storage.contains(&sb)) {
                count += 1;
                counted = true;
            }
        }
        for g in moment.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
            m.swap_labels(&g.operands[0], &g.operands[1])?;
        }
        if counted {
            depth += 1;
        }
    }
    Ok((count, depth))
}

/// SWAP count and depth over every SWAP, no storage exclusion.
pub fn swap_metrics_all(schedule: &Schedule) -> (usize, usize) {
    let count = schedule.count(GateKind::SWAP);
    let depth = schedule
        .moments
        .iter()
        .filter(|m| m.gates.iter().any(|g| g.kind == GateKind::SWAP))
        .count();
    (count, depth)
}

/// Two Toffoli/CCZ gates can run in parallel after Clifford+T lowering unless one
/// targets a qubit the other uses as a control.
pub fn can_parallelize_toffoli(g1: &Gate, g2: &Gate) -> Result<bool> {
    for g in [g1, g2] {
        if !matches!(g.kind, GateKind::Toffoli | GateKind::CCZ) {
            return Err(Error::InvalidArgument(format!(
                "expected Toffoli or CCZ, got {:?}",
                g.kind
            )));
        }
    }
    let conflict = |a: &Gate, b: &Gate| {
        a.kind == GateKind::Toffoli
            && b.kind == GateKind::Toffoli
            && b.operands[..2].contains(&a.operands[2])
    };
    Ok(!(conflict(g1, g2) || conflict(g2, g1)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub swap_count: usize,
    pub swap_depth: usize,
    pub t_count: usize,
    pub t_depth: usize,
    pub total_depth: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn earliest_fit_packs_disjoint_gates() {
        let mut s = Schedule::new();
        s.append(cnot("a", "b"), AppendMode::EarliestFit).unwrap();
        assert_eq!(s.len(), 1);
        s.append(cnot("c", "d"), AppendMode::EarliestFit).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.moments[0].gates.len(), 2);
        s.append(h("a"), AppendMode::EarliestFit).unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn duplicate_operand_rejected() {
        assert!(matches!(
            Gate::new(GateKind::CNOT, &["a", "a"]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn empty_schedule_metrics() {
        let s = Schedule::new();
        assert_eq!(depth(&s, &DepthPolicy::strict()), 0);
        assert_eq!(swap_metrics_all(&s), (0, 0));
        assert_eq!(t_metrics(&s), (0, 0));
    }

    #[test]
    fn fanout_merges_under_parallel_policy() {
        let s = Schedule::from_layers(vec![vec![cnot("c", "x")], vec![cnot("c", "y")]]);
        assert_eq!(depth(&s, &DepthPolicy::parallel()), 1);
        assert_eq!(depth(&s, &DepthPolicy::strict()), 2);
    }

    #[test]
    fn toffoli_parallelism() {
        let a = toffoli("1", "2", "3");
        let b = toffoli("3", "4", "5");
        assert!(!can_parallelize_toffoli(&a, &b).unwrap());
        assert!(can_parallelize_toffoli(&a, &toffoli("4", "5", "6")).unwrap());
        assert!(can_parallelize_toffoli(&ccz("1", "2", "3"), &ccz("2", "3", "4")).unwrap());
        assert!(can_parallelize_toffoli(&a, &cnot("1", "2")).is_err());
    }

    #[test]
    fn mapping_swap_is_involution() {
        let mut m = Mapping::new();
        m.insert("a", Site::new(0, 0, 0)).unwrap();
        m.insert("b", Site::new(1, 0, 0)).unwrap();
        let before = m.clone();
        m.swap_labels("a", "b").unwrap();
        assert_eq!(m.site("a"), Some(Site::new(1, 0, 0)));
        m.swap_labels("a", "b").unwrap();
        assert_eq!(m, before);
    }
}
