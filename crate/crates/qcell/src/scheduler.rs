//! SWAP schedules for the tiled multiplier.
//!
//! The multiplier is P ^= A.B_0 (the Toffoli step) followed by controlled
//! additions of A into the window P_j..P_{j+n} for j = 1..n-1, each followed by
//! a reset that moves the tower back into the adder arrangement for the next
//! window. The regular part of every step moves data one cube at a time along
//! fixed corner paths; the short logistics segments around the bottom of the
//! tower (queue traffic, parking of the carry and the scratch bit) are found by
//! an exact 0-1 breadth-first search over the positions of a few movers.
//!
//! Moments are either SWAP-only, gate-only, or storage-only. Storage moments
//! hold queue shifts, which are excluded from SWAP metrics.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cells::Layout;
use crate::circuit_ir::{swap, toffoli, cnot, Gate, GateKind, Mapping, Moment, Schedule};
use crate::decomp::toffoli_cube_lowering;
use crate::lattice::{is_adjacent, Site};
use crate::tiler::{self, Tower};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentClass {
    Swap,
    Gate,
    Storage,
}

/// Class of a moment from its contents; None for a mixed moment.
pub fn moment_class(m: &Moment) -> Option<MomentClass> {
    let swaps = m.gates.iter().filter(|g| g.kind == GateKind::SWAP).count();
    let stored = m.gates.iter().filter(|g| g.storage).count();
    if swaps == 0 {
        Some(MomentClass::Gate)
    } else if swaps != m.gates.len() {
        None
    } else if stored == swaps {
        Some(MomentClass::Storage)
    } else if stored == 0 {
        Some(MomentClass::Swap)
    } else {
        None
    }
}

/// Placement rules of the tower. Sites not in `data` hold ancillae.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub tower: Tower,
    pub used: HashSet<Site>,
    pub queue: HashSet<Site>,
}

impl Geometry {
    pub fn new(layout: &Layout) -> Result<Geometry> {
        let n = tiler::width_of(layout)?;
        Ok(Geometry {
            tower: Tower { n },
            used: layout.used_sites().into_iter().collect(),
            queue: layout.queue_sites().into_iter().collect(),
        })
    }

    fn cube_box(&self, ps: &[Site]) -> Option<Vec<Site>> {
        self.tower.cube_of(ps).map(|k| self.tower.cube_box(k))
    }

    /// For three corners pairwise two steps apart inside one cube: the corner
    /// next to all three, then the three corners completing each pair's face.
    pub fn tripod(&self, ps: &[Site; 3]) -> Option<(Site, Vec<Site>)> {
        let bx = self.cube_box(ps)?;
        for i in 0..3 {
            for j in i + 1..3 {
                if ps[i].manhattan(&ps[j]) != 2 {
                    return None;
                }
            }
        }
        let v = *bx.iter().find(|b| ps.iter().all(|p| is_adjacent(b, p)))?;
        let pairs = bx
            .iter()
            .filter(|b| !ps.contains(b) && **b != v && b.manhattan(&v) == 2)
            .copied()
            .collect();
        Some((v, pairs))
    }

    /// Checks one gate against site occupancy. On success returns the ancilla
    /// sites the gate relies on.
    pub fn check(
        &self,
        kind: GateKind,
        ps: &[Site],
        is_data: &dyn Fn(&Site) -> bool,
    ) -> std::result::Result<Vec<Site>, String> {
        match kind {
            GateKind::SWAP => {
                if !ps.iter().all(|p| self.used.contains(p)) {
                    Err("swap leaves the used sites".into())
                } else if is_adjacent(&ps[0], &ps[1]) {
                    Ok(vec![])
                } else if ps[0].manhattan(&ps[1]) == 2 && ps[0].z == ps[1].z {
                    Err("diagonal swap".into())
                } else {
                    Err("swap between non-adjacent sites".into())
                }
            }
            GateKind::CNOT | GateKind::CZ => {
                if is_adjacent(&ps[0], &ps[1]) {
                    return Ok(vec![]);
                }
                if ps[0].manhattan(&ps[1]) != 2 {
                    return Err("two-qubit gate too far apart".into());
                }
                let bx = self.cube_box(ps).ok_or("two-qubit gate outside one cube")?;
                bx.iter()
                    .find(|b| is_adjacent(b, &ps[0]) && is_adjacent(b, &ps[1]) && !is_data(b))
                    .map(|b| vec![*b])
                    .ok_or_else(|| "no clean bridge corner".to_string())
            }
            GateKind::Toffoli | GateKind::CCZ => {
                let (v, pairs) = self
                    .tripod(&[ps[0], ps[1], ps[2]])
                    .ok_or("three-qubit gate not on a cube tripod")?;
                let mut anc = vec![v];
                anc.extend(pairs);
                match anc.iter().find(|s| is_data(s)) {
                    Some(s) => Err(format!("cube corner {s} holds data")),
                    None => Ok(anc),
                }
            }
            _ => Ok(vec![]),
        }
    }

    /// Gate check against a full mapping.
    pub fn check_mapped(&self, g: &Gate, m: &Mapping) -> std::result::Result<Vec<Site>, String> {
        let mut ps = Vec::new();
        for o in &g.operands {
            ps.push(m.site(o).ok_or_else(|| format!("unmapped {o}"))?);
        }
        let is_data = |s: &Site| m.label(s).is_some_and(|l| !tiler::is_ancilla(l));
        self.check(g.kind, &ps, &is_data)
    }
}

/// One step of a planned segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlanOp {
    Swap(Site, Site),
    Event(usize),
}

/// Moment builder with class-aware earliest-fit packing.
#[derive(Debug, Clone)]
struct Builder {
    geo: Geometry,
    schedule: Schedule,
    classes: Vec<MomentClass>,
    tags: Vec<Vec<usize>>,
    last: HashMap<String, usize>,
    floor: usize,
    mapping: Mapping,
    step: usize,
}

impl Builder {
    fn site(&self, l: &str) -> Result<Site> {
        self.mapping
            .site(l)
            .ok_or_else(|| Error::Schedule(format!("unmapped label {l}")))
    }

    fn label(&self, s: &Site) -> Result<String> {
        self.mapping
            .label(s)
            .map(str::to_string)
            .ok_or_else(|| Error::Schedule(format!("empty site {s}")))
    }

    fn is_data(&self, s: &Site) -> bool {
        self.mapping.label(s).is_some_and(|l| !tiler::is_ancilla(l))
    }

    fn push(&mut self, g: Gate, class: MomentClass, touch: Vec<String>) {
        let slot = g
            .operands
            .iter()
            .chain(touch.iter())
            .filter_map(|l| self.last.get(l))
            .map(|i| i + 1)
            .max()
            .unwrap_or(0)
            .max(self.floor);
        let at = (slot..self.classes.len()).find(|&i| self.classes[i] == class);
        let at = match at {
            Some(i) => i,
            None => {
                self.schedule.moments.push(Moment::default());
                self.classes.push(class);
                self.tags.push(Vec::new());
                self.classes.len() - 1
            }
        };
        for l in g.operands.iter().chain(touch.iter()) {
            self.last.insert(l.clone(), at);
        }
        self.schedule.moments[at].gates.push(g);
        self.tags[at].push(self.step);
    }

    fn gate(&mut self, g: Gate) -> Result<()> {
        let anc = self
            .geo
            .check_mapped(&g, &self.mapping)
            .map_err(|e| Error::Schedule(format!("{:?} {:?}: {e}", g.kind, g.operands)))?;
        let touch = anc.iter().map(|s| self.label(s)).collect::<Result<Vec<_>>>()?;
        self.push(g, MomentClass::Gate, touch);
        Ok(())
    }

    fn swap_sites(&mut self, p: Site, q: Site, storage: bool) -> Result<()> {
        if !is_adjacent(&p, &q) || !self.geo.used.contains(&p) || !self.geo.used.contains(&q) {
            return Err(Error::Schedule(format!("illegal swap {p} {q}")));
        }
        let (a, b) = (self.label(&p)?, self.label(&q)?);
        let mut g = swap(&a, &b);
        g.storage = storage;
        let class = if storage { MomentClass::Storage } else { MomentClass::Swap };
        self.push(g, class, vec![]);
        self.mapping.swap_sites(&p, &q)
    }

    /// Moves a label one step onto a site holding an ancilla.
    fn mv(&mut self, l: &str, to: Site) -> Result<()> {
        if self.is_data(&to) {
            return Err(Error::Schedule(format!("{l} cannot move onto {to}, it holds {}", self.label(&to)?)));
        }
        let from = self.site(l)?;
        self.swap_sites(from, to, false)
    }

    fn exchange(&mut self, a: &str, b: &str) -> Result<()> {
        let (p, q) = (self.site(a)?, self.site(b)?);
        self.swap_sites(p, q, false)
    }

    fn barrier(&mut self) {
        self.floor = self.classes.len();
    }

    fn free_move(&self, p: &Site, q: &Site) -> bool {
        self.geo.queue.contains(p) && self.geo.queue.contains(q)
    }

    /// Exact minimum-cost sequence of mover steps that fires every event in
    /// order and ends in a goal configuration. Only movers change place; a mover
    /// may step onto an ancilla or another mover. Queue-internal steps are free.
    fn plan(
        &self,
        movers: &[String],
        region: &[Site],
        events: &[Gate],
        goal: &dyn Fn(&[Site]) -> bool,
    ) -> Result<Vec<PlanOp>> {
        let idx: HashMap<Site, usize> = region.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let start: Vec<Site> = movers.iter().map(|l| self.site(l)).collect::<Result<_>>()?;
        for s in &start {
            if !idx.contains_key(s) {
                return Err(Error::Schedule(format!("mover at {s} outside the search region")));
            }
        }
        let fixed: HashSet<Site> = self
            .mapping
            .iter()
            .filter(|(l, _)| !tiler::is_ancilla(l) && !movers.contains(l))
            .map(|(_, s)| *s)
            .collect();
        let ev_sites = |ps: &[Site], g: &Gate| -> Vec<Site> {
            g.operands
                .iter()
                .map(|o| match movers.iter().position(|m| m == o) {
                    Some(j) => ps[j],
                    None => self.mapping.site(o).expect("event operand mapped"),
                })
                .collect()
        };
        let fire = |ps: &[Site], mut i: usize| -> usize {
            let is_data = |s: &Site| fixed.contains(s) || ps.contains(s);
            while i < events.len() {
                let g = &events[i];
                if self.geo.check(g.kind, &ev_sites(ps, g), &is_data).is_err() {
                    break;
                }
                i += 1;
            }
            i
        };
        let enc = |ps: &[Site], i: usize| -> u64 {
            let mut k = i as u64;
            for p in ps {
                k = (k << 8) | idx[p] as u64;
            }
            k
        };
        let dec = |mut k: u64| -> (Vec<Site>, usize) {
            let mut ps = vec![Site::new(0, 0, 0); movers.len()];
            for j in (0..movers.len()).rev() {
                ps[j] = region[(k & 0xff) as usize];
                k >>= 8;
            }
            (ps, k as usize)
        };
        let i0 = fire(&start, 0);
        let k0 = enc(&start, i0);
        // key -> (cost, parent key, step taken)
        let mut best: HashMap<u64, Visit> = HashMap::new();
        best.insert(k0, (0, u64::MAX, None));
        let mut dq = VecDeque::from([k0]);
        let mut done = HashSet::new();
        while let Some(k) = dq.pop_front() {
            if !done.insert(k) {
                continue;
            }
            let d = best[&k].0;
            let (ps, i) = dec(k);
            if i == events.len() && goal(&ps) {
                let mut ops = Vec::new();
                let mut cur = k;
                loop {
                    let (_, par, step) = best[&cur];
                    let (_, ci) = dec(cur);
                    let Some((p, q)) = step else {
                        ops.extend((0..ci).rev().map(PlanOp::Event));
                        break;
                    };
                    let (_, pi) = dec(par);
                    ops.extend((pi..ci).rev().map(PlanOp::Event));
                    ops.push(PlanOp::Swap(p, q));
                    cur = par;
                }
                ops.reverse();
                return Ok(ops);
            }
            for j in 0..ps.len() {
                let p = ps[j];
                for q in p.neighbours() {
                    if !idx.contains_key(&q) || fixed.contains(&q) || !self.geo.used.contains(&q) {
                        continue;
                    }
                    let mut nps = ps.clone();
                    nps[j] = q;
                    if let Some(o) = ps.iter().position(|s| *s == q) {
                        nps[o] = p;
                    }
                    let ni = fire(&nps, i);
                    let nk = enc(&nps, ni);
                    let c = if self.free_move(&p, &q) { 0 } else { 1 };
                    if best.get(&nk).is_none_or(|e| e.0 > d + c) {
                        best.insert(nk, (d + c, k, Some((p, q))));
                        if c == 0 {
                            dq.push_front(nk);
                        } else {
                            dq.push_back(nk);
                        }
                    }
                }
            }
        }
        Err(Error::Schedule(format!("no logistics plan for movers {movers:?}")))
    }

    fn run_plan(&mut self, ops: &[PlanOp], events: &[Gate]) -> Result<()> {
        for op in ops {
            match *op {
                PlanOp::Swap(p, q) => {
                    let free = self.free_move(&p, &q);
                    self.swap_sites(p, q, free)?
                }
                PlanOp::Event(i) => self.gate(events[i].clone())?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleOptions {
    /// Hand the Toffoli step's closing logistics (last product bit restacked,
    /// B_0 out, B_1 and the first carry bits in) to the first adder step, with
    /// no barrier in between. The Toffoli step keeps only its per-cube blocks.
    pub optimize_toffoli_depth: bool,
    /// Replace every cube Toffoli by its Clifford+T circuit on the cube's ancillae.
    pub lower_clifford_t: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInfo {
    pub name: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplierSchedule {
    pub n: usize,
    pub schedule: Schedule,
    pub classes: Vec<MomentClass>,
    /// Step index of every gate, parallel to `schedule.moments[i].gates`.
    pub tags: Vec<Vec<usize>>,
    pub steps: Vec<StepInfo>,
    pub layout: Layout,
    pub mapping0: Mapping,
    pub final_mapping: Mapping,
}

/// Incremental construction of the multiplier, one step at a time.
#[derive(Debug, Clone)]
pub struct Scheduler {
    n: usize,
    opts: ScheduleOptions,
    layout: Layout,
    mapping0: Mapping,
    steps: Vec<StepInfo>,
    b: Builder,
    tail_pending: bool,
}

use tiler::{a, b, p, Z};

type Visit = (u32, u64, Option<(Site, Site)>);

impl Scheduler {
    pub fn new(n: usize, opts: ScheduleOptions) -> Result<Scheduler> {
        let layout = tiler::build_multiplier_layout(n as i64)?;
        let mapping0 = tiler::initial_mapping(&layout, n)?;
        let b = Builder {
            geo: Geometry::new(&layout)?,
            schedule: Schedule::new(),
            classes: Vec::new(),
            tags: Vec::new(),
            last: HashMap::new(),
            floor: 0,
            mapping: mapping0.clone(),
            step: 0,
        };
        Ok(Scheduler {
            n,
            opts,
            layout,
            mapping0,
            steps: Vec::new(),
            b,
            tail_pending: false,
        })
    }

    pub fn mapping(&self) -> &Mapping {
        &self.b.mapping
    }

    fn t(&self, ring: i32, level: i32) -> Site {
        self.b.geo.tower.site(ring, level)
    }

    fn ni(&self) -> i32 {
        self.n as i32
    }

    fn begin(&mut self, name: String) {
        if !self.tail_pending {
            self.b.barrier();
        }
        self.b.step = self.steps.len();
        self.steps.push(StepInfo { name });
    }

    /// Tower levels n-2..n plus the queue sites next to them.
    fn bottom_region(&self) -> Vec<Site> {
        let n = self.ni();
        let mut out: Vec<Site> = ((n - 2).max(0)..=n)
            .flat_map(|lv| (0..4).map(move |r| (r, lv)))
            .map(|(r, lv)| self.t(r, lv))
            .collect();
        out.extend(
            [tiler::YELLOW, tiler::HOLDING]
                .iter()
                .flat_map(|q| self.layout.queues[*q].iter().take(3).copied()),
        );
        out
    }

    fn queue(&self, name: &str) -> Vec<Site> {
        self.layout.queues.get(name).cloned().unwrap_or_default()
    }

    /// Walks a queued label towards the queue head until it is at most `to`
    /// sites from it. These are storage moves.
    fn bring(&mut self, queue: &str, label: &str, to: usize) -> Result<()> {
        let chain = self.queue(queue);
        let s = self.b.site(label)?;
        let Some(mut i) = chain.iter().position(|c| *c == s) else {
            return Ok(());
        };
        while i > to {
            self.b.swap_sites(chain[i], chain[i - 1], true)?;
            i -= 1;
        }
        Ok(())
    }

    /// Frees the entry of a storage chain holding `held` items by pushing them
    /// one site deeper.
    fn make_room(&mut self, queue: &str, held: usize) -> Result<()> {
        let chain = self.queue(queue);
        if held >= chain.len() {
            return Err(Error::Capacity(format!("storage {queue} is full")));
        }
        for i in (0..held).rev() {
            self.b.swap_sites(chain[i], chain[i + 1], true)?;
        }
        Ok(())
    }

    fn plan_and_run(
        &mut self,
        movers: &[String],
        events: &[Gate],
        goal: &dyn Fn(&[Site]) -> bool,
    ) -> Result<()> {
        let region = self.bottom_region();
        let ops = self.b.plan(movers, &region, events, goal)?;
        self.b.run_plan(&ops, events)
    }

    /// Shared-control Toffolis P_k ^= A_k.B_0, walking B_0 down the tower, then
    /// the queue traffic into the first adder arrangement.
    pub fn toffoli_step(&mut self) -> Result<()> {
        self.begin("toffoli".into());
        let n = self.ni();
        let c = b(0);
        let pi = |k: i32| p(k as usize);
        let ai = |k: i32| a(k as usize);
        for k in 0..n - 1 {
            self.b.gate(toffoli(&c, &ai(k), &pi(k)))?;
            if k > 0 {
                self.b.mv(&pi(k - 1), self.t(n + 3 - k, k - 2))?;
            }
            self.b.mv(&c, self.t(n + 2 - k, k))?;
            self.b.mv(&ai(k), self.t(n + 3 - k, k + 1))?;
            self.b.exchange(&c, &pi(k))?;
            self.b.mv(&ai(k), self.t(n + 3 - k, k))?;
        }
        self.b.gate(toffoli(&c, &ai(n - 1), &pi(n - 1)))?;
        if n < 2 {
            return Ok(());
        }
        if self.opts.optimize_toffoli_depth {
            self.tail_pending = true;
            return Ok(());
        }
        self.toffoli_tail()
    }

    fn toffoli_tail(&mut self) -> Result<()> {
        let n = self.ni();
        let (pi, ai) = (|k: i32| p(k as usize), |k: i32| a(k as usize));
        self.b.mv(&pi(n - 2), self.t(4, n - 3))?;
        // B_0 leaves for the yellow queue, B_1 takes the adder's control corner
        let yellow: HashSet<Site> = self.queue(tiler::YELLOW).into_iter().collect();
        let (xc, a_home, p_home) = (self.t(1, n), self.t(4, n - 1), self.t(3, n - 2));
        // P_n goes to the top product corner of the first window, then P_{n+1}
        // to the carry corner
        let bh = self.t(2, n - 1);
        let movers = [b(0), b(1), ai(n - 1), pi(n - 1), p(self.n)];
        self.plan_and_run(&movers, &[], &|ps| {
            yellow.contains(&ps[0]) && ps[1] == xc && ps[2] == a_home && ps[3] == p_home && ps[4] == bh
        })?;
        let ch = self.t(3, n);
        self.plan_and_run(&[p(self.n + 1)], &[], &|ps| ps[0] == ch)
    }
}

/// Gates of the controlled adder of window j before its carry loop: the
/// partial sums, the top carry, the carry chain and the scratch-bit Toffolis.
pub fn adder_prefix(n: usize, j: usize) -> Vec<Gate> {
    let (c, cout, w) = (b(j), p(j + n), |i: usize| p(j + i));
    let mut out = Vec::new();
    for i in 1..n {
        out.push(cnot(&a(i), &w(i)));
    }
    out.push(toffoli(&c, &a(n - 1), &cout));
    for i in (1..n.saturating_sub(1)).rev() {
        out.push(cnot(&a(i), &a(i + 1)));
    }
    for i in 0..n - 1 {
        out.push(toffoli(&w(i), &a(i), &a(i + 1)));
    }
    out.push(toffoli(&w(n - 1), &a(n - 1), Z));
    out.push(toffoli(&c, Z, &cout));
    out.push(toffoli(&w(n - 1), &a(n - 1), Z));
    out
}

/// Gates after the carry loop: undo the carry chain and the partial sums.
pub fn adder_suffix(n: usize, j: usize) -> Vec<Gate> {
    let w = |i: usize| p(j + i);
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        out.push(cnot(&a(i), &a(i + 1)));
    }
    for i in 1..n {
        out.push(cnot(&a(i), &w(i)));
    }
    out
}

impl Scheduler {
    /// Controlled addition of A into P_j..P_{j+n} with control B_j.
    pub fn ctrl_add_step(&mut self, j: usize) -> Result<()> {
        if j == 0 || j >= self.n {
            return Err(Error::InvalidArgument(format!("adder window {j} outside 1..{}", self.n)));
        }
        self.begin(format!("ctrl_add_{j}"));
        if self.tail_pending {
            self.tail_pending = false;
            self.toffoli_tail()?;
        }
        let n = self.ni();
        let nu = self.n;
        let c = b(j);
        let w = |i: i32| p(j + i as usize);
        let ai = |i: i32| a(i as usize);
        let mut park: HashSet<Site> = self
            .bottom_region()
            .into_iter()
            .filter(|s| self.b.geo.queue.contains(s))
            .collect();
        park.insert(self.t(1, n));
        let (cs, bs) = (self.t(2, n - 1), self.t(3, n));
        let movers = [c.clone(), p(j + nu), Z.to_string(), w(n - 1)];
        let events = adder_prefix(nu, j);
        self.plan_and_run(&movers, &events, &|ps| {
            ps[0] == cs && ps[3] == bs && park.contains(&ps[1]) && park.contains(&ps[2])
        })?;
        for k in (1..n).rev() {
            self.b.gate(toffoli(&c, &ai(k), &w(k)))?;
            self.b.gate(toffoli(&w(k - 1), &ai(k - 1), &ai(k)))?;
            self.b.mv(&c, self.t(n + 2 - k, k))?;
            self.b.mv(&w(k - 1), self.t(n + 3 - k, k - 1))?;
            self.b.exchange(&c, &ai(k))?;
            self.b.exchange(&c, &w(k - 1))?;
            self.b.mv(&ai(k), self.t(n + 1 - k, k))?;
            self.b.mv(&c, self.t(n + 2 - k, k - 1))?;
        }
        self.b.gate(toffoli(&c, &ai(0), &w(0)))?;
        for g in adder_suffix(nu, j) {
            self.b.gate(g)?;
        }
        Ok(())
    }

    /// Parks B_j and P_j in storage and shifts the tower one window down: the
    /// adder register turns back two corners per level, the product register
    /// rises two levels. Then the next control and carry come out of the queues.
    pub fn reset_step(&mut self, j: usize) -> Result<()> {
        if j == 0 || j + 1 >= self.n {
            return Err(Error::InvalidArgument(format!("no reset after window {j}")));
        }
        self.begin(format!("reset_{j}"));
        let n = self.ni();
        let nu = self.n;
        let w = |i: i32| p(j + i as usize);
        let ai = |i: i32| a(i as usize);
        let tw = self.b.geo.tower;
        self.make_room(tiler::B_STORAGE, j - 1)?;
        self.b.mv(&b(j), tw.b_entry())?;
        self.make_room(tiler::P_STORAGE, j)?;
        self.b.mv(&w(0), self.t(n + 2, 0))?;
        for k in 1..n {
            self.b.mv(&w(k), self.t(n + 2 - k, k))?;
            self.b.mv(&ai(k), self.t(n - k, k))?;
        }
        self.b.mv(&w(0), tw.p_entry())?;
        for k in 1..n {
            self.b.mv(&w(k), self.t(n + 2 - k, k - 1))?;
            self.b.mv(&ai(k), self.t(n - 1 - k, k))?;
        }
        let (c, carry, cout) = (b(j + 1), p(j + nu), p(j + 1 + nu));
        self.bring(tiler::YELLOW, &c, 2)?;
        self.bring(tiler::HOLDING, &cout, 2)?;
        let home = self.queue(tiler::YELLOW)[0];
        let goal = [self.t(1, n), self.t(2, n - 1), self.t(3, n), home];
        let movers = [c, carry, cout, Z.to_string()];
        self.plan_and_run(&movers, &[], &|ps| ps == goal)
    }

    pub fn finish(self) -> MultiplierSchedule {
        let mut out = MultiplierSchedule {
            n: self.n,
            schedule: self.b.schedule,
            classes: self.b.classes,
            tags: self.b.tags,
            steps: self.steps,
            layout: self.layout,
            mapping0: self.mapping0,
            final_mapping: self.b.mapping,
        };
        if self.opts.lower_clifford_t {
            lower_toffolis(&mut out);
        }
        out
    }
}

pub fn full_multiplier_schedule(n: usize, opts: ScheduleOptions) -> Result<MultiplierSchedule> {
    if n == 0 {
        return Err(Error::InvalidArgument("operand width must be at least 1".into()));
    }
    let mut s = Scheduler::new(n, opts)?;
    s.toffoli_step()?;
    for j in 1..n {
        s.ctrl_add_step(j)?;
        if j + 1 < n {
            s.reset_step(j)?;
        }
    }
    Ok(s.finish())
}

/// Site a Toffoli's tile uses for the parity of operands `x` and `y`.
fn face_corner(v: Site, pairs: &[Site], x: Site, y: Site) -> Option<Site> {
    let _ = v;
    pairs.iter().copied().find(|s| is_adjacent(s, &x) && is_adjacent(s, &y))
}

/// Expands every gate moment holding Toffolis into the nine moments of the cube
/// lowering, on the ancilla labels occupying the cube at that time.
fn lower_toffolis(ms: &mut MultiplierSchedule) {
    let geo = Geometry::new(&ms.layout).expect("multiplier layout");
    let mut m = ms.mapping0.clone();
    let (mut moments, mut classes, mut tags) = (Vec::new(), Vec::new(), Vec::new());
    for ((mo, cl), tg) in ms.schedule.moments.iter().zip(&ms.classes).zip(&ms.tags) {
        let has_tof = mo.gates.iter().any(|g| g.kind == GateKind::Toffoli);
        if !has_tof {
            for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
                m.swap_labels(&g.operands[0], &g.operands[1]).expect("swap of mapped labels");
            }
            moments.push(mo.clone());
            classes.push(*cl);
            tags.push(tg.clone());
            continue;
        }
        let mut sub: Vec<(Moment, Vec<usize>)> = vec![(Moment::default(), Vec::new()); 9];
        for (g, t) in mo.gates.iter().zip(tg) {
            if g.kind != GateKind::Toffoli {
                sub[0].0.gates.push(g.clone());
                sub[0].1.push(*t);
                continue;
            }
            let s: Vec<Site> = g.operands.iter().map(|o| m.site(o).expect("mapped")).collect();
            let (v, pairs) = geo.tripod(&[s[0], s[1], s[2]]).expect("validated tripod");
            let lab = |x: Site| m.label(&x).expect("occupied").to_string();
            let ab = lab(face_corner(v, &pairs, s[0], s[1]).expect("face corner"));
            let ac = lab(face_corner(v, &pairs, s[0], s[2]).expect("face corner"));
            let bc = lab(face_corner(v, &pairs, s[1], s[2]).expect("face corner"));
            let low = toffoli_cube_lowering(
                &g.operands[0],
                &g.operands[1],
                &g.operands[2],
                [&lab(v), &ab, &ac, &bc],
            );
            for (i, lm) in low.moments.into_iter().enumerate() {
                for lg in lm.gates {
                    sub[i].0.gates.push(lg);
                    sub[i].1.push(*t);
                }
            }
        }
        for (sm, st) in sub.into_iter().filter(|(sm, _)| !sm.gates.is_empty()) {
            moments.push(sm);
            classes.push(MomentClass::Gate);
            tags.push(st);
        }
    }
    ms.schedule.moments = moments;
    ms.classes = classes;
    ms.tags = tags;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub moment: usize,
    pub gate: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Moments in which a label appears twice.
    pub overlapping_moments: Vec<usize>,
    pub final_mapping: Mapping,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.overlapping_moments.is_empty()
    }
}

fn describe(g: &Gate) -> String {
    format!("{:?}({})", g.kind, g.operands.join(","))
}

/// Replays the schedule on the layout: SWAPs must join edge-adjacent used
/// sites, CNOTs must be adjacent or bridged through a clean cube corner,
/// Toffolis must sit on a cube tripod whose remaining face corners are clean,
/// and no moment may mix SWAPs with other gates.
pub fn validate_schedule(schedule: &Schedule, layout: &Layout, mapping0: &Mapping) -> Result<ValidationReport> {
    let geo = Geometry::new(layout)?;
    let mut m = mapping0.clone();
    let mut violations = Vec::new();
    let mut overlapping = Vec::new();
    for (i, mo) in schedule.moments.iter().enumerate() {
        if !mo.is_disjoint() {
            overlapping.push(i);
        }
        if moment_class(mo).is_none() {
            violations.push(Violation {
                moment: i,
                gate: String::new(),
                reason: "moment mixes SWAPs with other gates".into(),
            });
        }
        for g in &mo.gates {
            if let Err(reason) = geo.check_mapped(g, &m) {
                violations.push(Violation {
                    moment: i,
                    gate: describe(g),
                    reason,
                });
            }
        }
        for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
            m.swap_labels(&g.operands[0], &g.operands[1])?;
        }
    }
    Ok(ValidationReport {
        violations,
        overlapping_moments: overlapping,
        final_mapping: m,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub name: String,
    pub swap_count: usize,
    pub swap_depth: usize,
}

impl MultiplierSchedule {
    pub fn validate(&self) -> Result<ValidationReport> {
        validate_schedule(&self.schedule, &self.layout, &self.mapping0)
    }

    fn storage(&self) -> HashSet<Site> {
        self.layout.queue_sites().into_iter().collect()
    }

    /// Counted SWAPs per moment: (moment, step) pairs, skipping SWAPs with both
    /// sites in a queue.
    fn counted(&self) -> Result<Vec<(usize, usize)>> {
        let storage = self.storage();
        let mut m = self.mapping0.clone();
        let mut out = Vec::new();
        for (i, (mo, tg)) in self.schedule.moments.iter().zip(&self.tags).enumerate() {
            for (g, t) in mo.gates.iter().zip(tg) {
                if g.kind != GateKind::SWAP {
                    continue;
                }
                let sa = m.site(&g.operands[0]).ok_or_else(|| Error::Schedule("unmapped".into()))?;
                let sb = m.site(&g.operands[1]).ok_or_else(|| Error::Schedule("unmapped".into()))?;
                if !(storage.contains(&sa) && storage.contains(&sb)) {
                    out.push((i, *t));
                }
            }
            for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
                m.swap_labels(&g.operands[0], &g.operands[1])?;
            }
        }
        Ok(out)
    }

    pub fn step_metrics(&self) -> Result<Vec<StepMetrics>> {
        let counted = self.counted()?;
        Ok(self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let mine: Vec<usize> = counted.iter().filter(|(_, t)| *t == k).map(|(i, _)| *i).collect();
                let moments: HashSet<usize> = mine.iter().copied().collect();
                StepMetrics {
                    name: s.name.clone(),
                    swap_count: mine.len(),
                    swap_depth: moments.len(),
                }
            })
            .collect())
    }

    /// Metrics of the named kind of step: "toffoli", "ctrl_add_j" or "reset_j".
    pub fn step(&self, name: &str) -> Result<StepMetrics> {
        self.step_metrics()?
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no step {name}")))
    }

    pub fn metrics(&self) -> Result<crate::circuit_ir::MetricsReport> {
        let counted = self.counted()?;
        let depth: HashSet<usize> = counted.iter().map(|(i, _)| *i).collect();
        let (t_count, t_depth) = crate::circuit_ir::t_metrics(&self.schedule);
        Ok(crate::circuit_ir::MetricsReport {
            swap_count: counted.len(),
            swap_depth: depth.len(),
            t_count,
            t_depth,
            total_depth: crate::circuit_ir::depth(&self.schedule, &crate::circuit_ir::DepthPolicy::strict()),
        })
    }

    /// Site pairs of every SWAP, per moment; empty for gate moments.
    pub fn timeline(&self) -> Result<Vec<Vec<(Site, Site)>>> {
        let mut m = self.mapping0.clone();
        let mut out = Vec::new();
        for mo in &self.schedule.moments {
            let mut row = Vec::new();
            for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
                let sa = m.site(&g.operands[0]).ok_or_else(|| Error::Schedule("unmapped".into()))?;
                let sb = m.site(&g.operands[1]).ok_or_else(|| Error::Schedule("unmapped".into()))?;
                row.push((sa, sb));
            }
            for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
                m.swap_labels(&g.operands[0], &g.operands[1])?;
            }
            out.push(row);
        }
        Ok(out)
    }

    /// One line per moment: index, class, step and contents.
    pub fn ascii_timeline(&self) -> Result<String> {
        let tl = self.timeline()?;
        let mut out = String::new();
        for (i, mo) in self.schedule.moments.iter().enumerate() {
            let step = self.tags[i].first().map(|t| self.steps[*t].name.as_str()).unwrap_or("");
            let body = match self.classes[i] {
                MomentClass::Gate => mo.gates.iter().map(describe).collect::<Vec<_>>().join(" "),
                _ => tl[i].iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(" "),
            };
            let class = match self.classes[i] {
                MomentClass::Swap => "swap",
                MomentClass::Gate => "gate",
                MomentClass::Storage => "store",
            };
            writeln!(out, "{i:4} {class:5} {step:12} {body}").expect("write to string");
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut v = BTreeMap::new();
        v.insert("n", serde_json::json!(self.n));
        v.insert("steps", serde_json::json!(self.steps));
        v.insert("classes", serde_json::json!(self.classes));
        v.insert("schedule", serde_json::to_value(&self.schedule).expect("schedule serialises"));
        serde_json::to_string_pretty(&v).expect("json")
    }
}

/// Every (A, B) pair for n <= 4, otherwise 256 pairs spread over the input space.
pub fn product_pairs(n: usize) -> Vec<(u64, u64)> {
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    if n <= 4 {
        return (0..=mask).flat_map(|x| (0..=mask).map(move |y| (x, y))).collect();
    }
    // splitmix64 for a fixed, reproducible spread including the extremes
    let mut s = 0x5eed_u64;
    let mut next = || {
        s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let mut out = vec![(0, 0), (mask, mask), (mask, 1), (1, mask)];
    while out.len() < 256 {
        out.push((next() & mask, next() & mask));
    }
    out
}

/// Pairs whose simulated product is wrong, or that change A or leave Z set.
pub fn product_failures(ms: &MultiplierSchedule, pairs: &[(u64, u64)]) -> Result<Vec<(u64, u64)>> {
    let n = ms.n;
    let mut bad = Vec::new();
    for &(x, y) in pairs {
        let mut st = HashMap::new();
        for i in 0..n {
            st.insert(a(i), x >> i & 1 == 1);
            st.insert(b(i), y >> i & 1 == 1);
        }
        let out = crate::sim::classical_run(&ms.schedule, &st)?;
        let bit = |l: &str| out.get(l).copied().unwrap_or(false);
        let prod: u128 = (0..2 * n).map(|i| (bit(&p(i)) as u128) << i).sum();
        let a_kept = (0..n).all(|i| bit(&a(i)) == (x >> i & 1 == 1));
        if prod != x as u128 * y as u128 || !a_kept || bit(Z) {
            bad.push((x, y));
        }
    }
    Ok(bad)
}
