//! Greedy SWAP router on a bare grid, the baseline the tiled schedule is compared against.
//!
//! Gates are routed in program order with no lookahead. A two-qubit gate moves
//! its first operand next to the second. A three-qubit gate keeps one operand as
//! the corner of an L and moves the other two onto perpendicular neighbours,
//! choosing the corner and arms with the smallest total distance and moving the
//! nearer operand first. Paths are breadth-first, exploring x, then y, then z.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::circuit_ir::{swap, swap_metrics_all, AppendMode, Gate, GateKind, Mapping, Schedule};
use crate::lattice::{is_adjacent, Lattice, Site};
use crate::scheduler::{full_multiplier_schedule, ScheduleOptions};
use crate::{Error, Result};

/// Neighbours in tie-break order.
fn ordered_neighbours(lat: &Lattice, s: &Site) -> Vec<Site> {
    let ds = [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)];
    ds.iter().map(|d| s.offset(*d)).filter(|n| lat.contains(n)).collect()
}

/// Shortest path from `from` to `to` that avoids `blocked`.
fn path(lat: &Lattice, from: Site, to: Site, blocked: &HashSet<Site>) -> Option<Vec<Site>> {
    let mut prev = vec![None; lat.size()];
    let mut seen = vec![false; lat.size()];
    let mut q = VecDeque::from([from]);
    seen[lat.index(&from)] = true;
    while let Some(s) = q.pop_front() {
        if s == to {
            let mut out = vec![s];
            let mut cur = s;
            while let Some(p) = prev[lat.index(&cur)] {
                out.push(p);
                cur = p;
            }
            out.reverse();
            return Some(out);
        }
        for n in ordered_neighbours(lat, &s) {
            let i = lat.index(&n);
            if !seen[i] && (!blocked.contains(&n) || n == to) {
                seen[i] = true;
                prev[i] = Some(s);
                q.push_back(n);
            }
        }
    }
    None
}

struct Router<'a> {
    lat: &'a Lattice,
    m: Mapping,
    out: Schedule,
}

impl Router<'_> {
    fn site(&self, l: &str) -> Result<Site> {
        self.m.site(l).ok_or_else(|| Error::Schedule(format!("unmapped {l}")))
    }

    /// Walks `label` to `dest` along a shortest path avoiding `blocked`.
    fn walk(&mut self, label: &str, dest: Site, blocked: &HashSet<Site>) -> Result<()> {
        let from = self.site(label)?;
        let p = path(self.lat, from, dest, blocked)
            .ok_or_else(|| Error::Capacity(format!("no free path for {label} to {dest}")))?;
        for w in p.windows(2) {
            let other = self.m.label(&w[1]).expect("lattice is fully labelled").to_string();
            self.out.append(swap(label, &other), AppendMode::EarliestFit)?;
            self.m.swap_labels(label, &other)?;
        }
        Ok(())
    }

    fn route_pair(&mut self, g: &Gate) -> Result<()> {
        let (a, b) = (&g.operands[0], &g.operands[1]);
        let (sa, sb) = (self.site(a)?, self.site(b)?);
        if !is_adjacent(&sa, &sb) {
            let blocked = HashSet::from([sb]);
            let p = path(self.lat, sa, sb, &HashSet::new())
                .ok_or_else(|| Error::Capacity(format!("{a} cannot reach {b}")))?;
            let dest = p[p.len() - 2];
            self.walk(a, dest, &blocked)?;
        }
        Ok(())
    }

    fn route_triple(&mut self, g: &Gate) -> Result<()> {
        let ops: Vec<Site> = g.operands.iter().map(|o| self.site(o)).collect::<Result<_>>()?;
        if is_l(&ops) {
            return Ok(());
        }
        // (cost, corner, first mover, its arm, second mover, its arm)
        let mut best: Option<(u32, usize, usize, Site, usize, Site)> = None;
        for c in 0..3 {
            let corner = ops[c];
            let others: Vec<usize> = (0..3).filter(|&i| i != c).collect();
            let arms = ordered_neighbours(self.lat, &corner);
            for &s1 in &arms {
                for &s2 in &arms {
                    if s1 == s2 || s1.manhattan(&s2) != 2 || collinear(&corner, &s1, &s2) {
                        continue;
                    }
                    let (i, j) = (others[0], others[1]);
                    let (di, dj) = (ops[i].manhattan(&s1), ops[j].manhattan(&s2));
                    let cand = if di <= dj { (di + dj, c, i, s1, j, s2) } else { (di + dj, c, j, s2, i, s1) };
                    if best.is_none_or(|b| cand.0 < b.0) {
                        best = Some(cand);
                    }
                }
            }
        }
        let (_, c, i, si, j, sj) = best.ok_or_else(|| Error::Capacity("no L-triple fits the lattice".into()))?;
        let corner = ops[c];
        let li = g.operands[i].clone();
        let lj = g.operands[j].clone();
        self.walk(&li, si, &HashSet::from([corner]))?;
        let placed = self.site(&li)?;
        self.walk(&lj, sj, &HashSet::from([corner, placed]))?;
        Ok(())
    }
}

fn collinear(a: &Site, b: &Site, c: &Site) -> bool {
    (a.x == b.x && b.x == c.x && a.y == b.y && b.y == c.y)
        || (a.x == b.x && b.x == c.x && a.z == b.z && b.z == c.z)
        || (a.y == b.y && b.y == c.y && a.z == b.z && b.z == c.z)
}

/// Three sites forming an L: one is adjacent to both others, which are not in line.
pub fn is_l(s: &[Site]) -> bool {
    s.len() == 3
        && (0..3).any(|c| {
            let (a, b) = (s[(c + 1) % 3], s[(c + 2) % 3]);
            is_adjacent(&s[c], &a) && is_adjacent(&s[c], &b) && !collinear(&s[c], &a, &b)
        })
}

/// `mapping` with every empty lattice site given a placeholder label `free{i}`.
pub fn fill_free(mapping: &Mapping, lattice: &Lattice) -> Result<Mapping> {
    let mut m = mapping.clone();
    let mut k = 0;
    for s in lattice.sites() {
        if m.label(&s).is_none() {
            m.insert(&format!("free{k}"), s)?;
            k += 1;
        }
    }
    Ok(m)
}

/// Routes `circuit` on `lattice`. Empty sites are filled by `fill_free` so every
/// SWAP has two operands; the returned mapping includes the placeholders.
pub fn greedy_route(circuit: &Schedule, lattice: &Lattice, mapping0: &Mapping) -> Result<(Schedule, Mapping)> {
    if mapping0.len() > lattice.size() {
        return Err(Error::Capacity(format!(
            "{} qubits do not fit {} sites",
            mapping0.len(),
            lattice.size()
        )));
    }
    for (_, s) in mapping0.iter() {
        if !lattice.contains(s) {
            return Err(Error::Capacity(format!("{s} lies outside the lattice")));
        }
    }
    let mut r = Router {
        lat: lattice,
        m: fill_free(mapping0, lattice)?,
        out: Schedule::new(),
    };
    for g in circuit.gates() {
        if g.operands.len() > 3 {
            return Err(Error::UnsupportedGate(format!("{:?} on {} qubits", g.kind, g.operands.len())));
        }
        match g.operands.len() {
            2 => r.route_pair(g)?,
            3 => r.route_triple(g)?,
            _ => {}
        }
        r.out.append(g.clone(), AppendMode::EarliestFit)?;
    }
    Ok((r.out, r.m))
}

/// Adjacency violations of a routed schedule: SWAPs and two-qubit gates on
/// adjacent sites, three-qubit gates on an L.
pub fn validate_routed(schedule: &Schedule, lattice: &Lattice, mapping0: &Mapping) -> Result<Vec<String>> {
    let mut m = mapping0.clone();
    let mut bad = Vec::new();
    for (i, mo) in schedule.moments.iter().enumerate() {
        for g in &mo.gates {
            let ps: Vec<Site> = g
                .operands
                .iter()
                .map(|o| m.site(o).ok_or_else(|| Error::Schedule(format!("unmapped {o}"))))
                .collect::<Result<_>>()?;
            if ps.iter().any(|p| !lattice.contains(p)) {
                bad.push(format!("moment {i}: {:?} leaves the lattice", g.kind));
            }
            let ok = match ps.len() {
                2 => is_adjacent(&ps[0], &ps[1]),
                3 => is_l(&ps),
                _ => true,
            };
            if !ok {
                bad.push(format!("moment {i}: {:?} on {:?} is not local", g.kind, g.operands));
            }
        }
        for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
            m.swap_labels(&g.operands[0], &g.operands[1])?;
        }
    }
    Ok(bad)
}

/// The logical circuit of the multiplier: the tiled schedule without its SWAPs.
pub fn multiplier_circuit(n: usize) -> Result<(Schedule, Lattice, Mapping)> {
    let ms = full_multiplier_schedule(n, ScheduleOptions::default())?;
    let mut c = Schedule::new();
    for g in ms.schedule.gates().filter(|g| g.kind != GateKind::SWAP) {
        c.append(g.clone(), AppendMode::EarliestFit)?;
    }
    Ok((c, ms.layout.lattice.clone(), ms.mapping0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRow {
    pub n: usize,
    #[serde(rename = "tiled_swapC")]
    pub tiled_swap_c: usize,
    #[serde(rename = "tiled_swapD")]
    pub tiled_swap_d: usize,
    #[serde(rename = "routed_swapC")]
    pub routed_swap_c: usize,
    #[serde(rename = "routed_swapD")]
    pub routed_swap_d: usize,
}

impl CompareRow {
    /// Routed over tiled, for count and depth.
    pub fn ratios(&self) -> (f64, f64) {
        (
            self.routed_swap_c as f64 / self.tiled_swap_c as f64,
            self.routed_swap_d as f64 / self.tiled_swap_d as f64,
        )
    }

    pub fn dominated(&self) -> bool {
        self.tiled_swap_c < self.routed_swap_c && self.tiled_swap_d < self.routed_swap_d
    }
}

pub fn compare_one(n: usize) -> Result<CompareRow> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("comparison needs n >= 2, got {n}")));
    }
    let ms = full_multiplier_schedule(n, ScheduleOptions::default())?;
    let tiled = ms.metrics()?;
    let (circuit, lat, m0) = multiplier_circuit(n)?;
    let (routed, _) = greedy_route(&circuit, &lat, &m0)?;
    let (rc, rd) = swap_metrics_all(&routed);
    Ok(CompareRow {
        n,
        tiled_swap_c: tiled.swap_count,
        tiled_swap_d: tiled.swap_depth,
        routed_swap_c: rc,
        routed_swap_d: rd,
    })
}

pub fn compare(ns: std::ops::RangeInclusive<usize>) -> Result<Vec<CompareRow>> {
    ns.map(compare_one).collect()
}

pub fn to_csv(rows: &[CompareRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["n", "tiled_swapC", "tiled_swapD", "routed_swapC", "routed_swapD"])
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
