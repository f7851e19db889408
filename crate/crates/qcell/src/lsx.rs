//! Lattice-surgery programs from routed schedules.
//!
//! Every lattice site is a surface-code patch. An in-layer CNOT goes through a
//! mediating ancilla patch: the edge patch between adjacent operands, or the
//! bridging corner for operands two steps apart. It is emitted as
//! InitPlus(anc), ZZ merge/split of control and ancilla, XX merge/split of
//! ancilla and target, MeasureX(anc). In 3d mode a CNOT between stacked patches
//! is a single transversal CNOT. SWAPs are three alternating CNOTs. Other
//! single-qubit gates pass through as opaque instructions.
//!
//! Each patch has Z boundaries on one axis and X boundaries on the other. A
//! merge needs the right boundary type facing the ancilla, otherwise the patch
//! is rotated first. All operations cost one step.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cells::Layout;
use crate::circuit_ir::{GateKind, Mapping, Schedule};
use crate::lattice::{is_adjacent, Site};
use crate::tiler;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "2d")]
    TwoD,
    #[serde(rename = "3d")]
    ThreeD,
}

impl Mode {
    /// Simultaneous CNOTs one patch may take part in within a step.
    pub fn bound(self) -> usize {
        match self {
            Mode::TwoD => 2,
            Mode::ThreeD => 4,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "2d" => Ok(Mode::TwoD),
            "3d" => Ok(Mode::ThreeD),
            _ => Err(Error::InvalidArgument(format!("mode must be 2d or 3d, got {s}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::TwoD => "2d",
            Mode::ThreeD => "3d",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Patch {
    Site(Site),
    /// Ancilla region on the edge between two adjacent sites.
    Edge(Site, Site),
}

impl Patch {
    fn edge(a: Site, b: Site) -> Patch {
        if a <= b {
            Patch::Edge(a, b)
        } else {
            Patch::Edge(b, a)
        }
    }
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Patch::Site(s) => write!(f, "{s}"),
            Patch::Edge(a, b) => write!(f, "{a}|{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    ZZ,
    XX,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LsKind {
    InitPlus,
    InitZero,
    MergeSplit(Boundary),
    MeasureZ,
    MeasureX,
    TransversalCNOT,
    PatchRotate,
    /// A single-patch gate carried through unchanged, e.g. T.
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LsInstruction {
    pub kind: LsKind,
    pub patches: Vec<Patch>,
    /// Mediating ancilla patch of a merge/split CNOT.
    pub ancilla: Option<Patch>,
    /// Index of the CNOT this instruction belongs to, in program order.
    pub cnot: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LsProgram {
    pub mode: Mode,
    pub steps: Vec<Vec<LsInstruction>>,
}

impl LsProgram {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn instructions(&self) -> impl Iterator<Item = &LsInstruction> {
        self.steps.iter().flatten()
    }

    /// Merge/split CNOT patterns (counted once each, by their InitPlus).
    pub fn pattern_count(&self) -> usize {
        self.instructions().filter(|i| i.kind == LsKind::InitPlus && i.cnot.is_some()).count()
    }

    pub fn transversal_count(&self) -> usize {
        self.instructions().filter(|i| i.kind == LsKind::TransversalCNOT).count()
    }

    pub fn rotation_count(&self) -> usize {
        self.instructions().filter(|i| i.kind == LsKind::PatchRotate).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serialises")
    }

    /// One line per step.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            let body: Vec<String> = step
                .iter()
                .map(|ins| {
                    let ps: Vec<String> = ins.patches.iter().map(|p| p.to_string()).collect();
                    format!("{:?}[{}]", ins.kind, ps.join(" "))
                })
                .collect();
            out.push_str(&format!("{i:4} {}\n", body.join(" ")));
        }
        out
    }
}

/// CNOTs an extracted program must reproduce: each CNOT once, each SWAP three times.
pub fn cnot_equivalents(schedule: &Schedule) -> usize {
    schedule.count(GateKind::CNOT) + 3 * schedule.count(GateKind::SWAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Use {
    Control,
    Target,
    Exclusive,
}

impl Use {
    fn commutes(self, other: Use) -> bool {
        matches!((self, other), (Use::Control, Use::Control) | (Use::Target, Use::Target))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Channel {
    Surgery,
    Transversal,
    None,
}

/// One packable operation: its instructions and the patches it occupies.
struct Unit {
    instrs: Vec<LsInstruction>,
    uses: Vec<(Patch, Use, Channel)>,
}

/// Greedy earliest-fit packer. A unit goes after every step holding an
/// operation on one of its patches it does not commute with, into the first
/// step with room under the parallel bound.
struct Packer {
    mode: Mode,
    steps: Vec<Vec<LsInstruction>>,
    // per patch: (step, use, channel)
    uses: HashMap<Patch, Vec<(usize, Use, Channel)>>,
}

impl Packer {
    fn fits(&self, s: usize, p: &Patch, ch: Channel) -> bool {
        let here = self.uses.get(p).map(|v| v.iter().filter(|u| u.0 == s).collect::<Vec<_>>());
        let here = here.unwrap_or_default();
        match ch {
            Channel::None => here.is_empty(),
            _ => {
                let same = here.iter().filter(|u| u.2 == ch).count();
                let total = here.len();
                let per = match (self.mode, ch) {
                    (Mode::TwoD, Channel::Surgery) => 2,
                    (Mode::ThreeD, _) => 2,
                    _ => 0,
                };
                same < per && total < self.mode.bound()
            }
        }
    }

    fn place(&mut self, u: Unit) {
        let mut s = 0;
        for (p, us, _) in &u.uses {
            if let Some(v) = self.uses.get(p) {
                for (st, other, _) in v {
                    if !us.commutes(*other) {
                        s = s.max(st + 1);
                    }
                }
            }
        }
        while !u.uses.iter().all(|(p, _, ch)| self.fits(s, p, *ch)) {
            s += 1;
        }
        while self.steps.len() <= s {
            self.steps.push(Vec::new());
        }
        for (p, us, ch) in &u.uses {
            self.uses.entry(*p).or_default().push((s, *us, *ch));
        }
        self.steps[s].extend(u.instrs);
    }
}

/// Axis of a unit step between two sites.
fn axis(a: &Site, b: &Site) -> u8 {
    if a.x != b.x {
        0
    } else if a.y != b.y {
        1
    } else {
        2
    }
}

pub fn extract_ls(schedule: &Schedule, layout: &Layout, mapping0: &Mapping, mode: Mode) -> Result<LsProgram> {
    if mode == Mode::TwoD && layout.lattice.dimensionality() == 3 {
        return Err(Error::Mode("2d extraction needs a planar layout".into()));
    }
    let mut m = mapping0.clone();
    let mut packer = Packer {
        mode,
        steps: Vec::new(),
        uses: HashMap::new(),
    };
    // axis along which each patch's Z boundaries face; X boundaries face the other in-plane axis
    let mut z_axis: HashMap<Site, u8> = HashMap::new();
    let mut k = 0usize;
    let site = |m: &Mapping, l: &str| m.site(l).ok_or_else(|| Error::Schedule(format!("unmapped {l}")));
    for mo in &schedule.moments {
        for g in &mo.gates {
            match g.kind {
                GateKind::CNOT => {
                    let (c, t) = (site(&m, &g.operands[0])?, site(&m, &g.operands[1])?);
                    cnot_unit(&mut packer, &mut z_axis, &m, mode, c, t, k)?;
                    k += 1;
                }
                GateKind::SWAP => {
                    let (a, b) = (site(&m, &g.operands[0])?, site(&m, &g.operands[1])?);
                    for (c, t) in [(a, b), (b, a), (a, b)] {
                        cnot_unit(&mut packer, &mut z_axis, &m, mode, c, t, k)?;
                        k += 1;
                    }
                }
                GateKind::Toffoli | GateKind::CCZ | GateKind::CZ | GateKind::ClassicallyControlledCZ => {
                    return Err(Error::UnsupportedGate(format!(
                        "{:?} has no lattice-surgery form here; lower it to CNOTs first",
                        g.kind
                    )));
                }
                kind => {
                    let s = site(&m, &g.operands[0])?;
                    let lk = match kind {
                        GateKind::MeasureX => LsKind::MeasureX,
                        GateKind::MeasureZ => LsKind::MeasureZ,
                        _ => LsKind::Opaque(format!("{kind:?}")),
                    };
                    packer.place(Unit {
                        instrs: vec![LsInstruction {
                            kind: lk,
                            patches: vec![Patch::Site(s)],
                            ancilla: None,
                            cnot: None,
                        }],
                        uses: vec![(Patch::Site(s), Use::Exclusive, Channel::None)],
                    });
                }
            }
        }
        for g in mo.gates.iter().filter(|g| g.kind == GateKind::SWAP) {
            m.swap_labels(&g.operands[0], &g.operands[1])?;
        }
    }
    Ok(LsProgram {
        mode,
        steps: packer.steps,
    })
}

fn rotate(packer: &mut Packer, z_axis: &mut HashMap<Site, u8>, s: Site, want_z: u8) {
    let cur = *z_axis.entry(s).or_insert(want_z);
    if cur != want_z {
        z_axis.insert(s, want_z);
        packer.place(Unit {
            instrs: vec![LsInstruction {
                kind: LsKind::PatchRotate,
                patches: vec![Patch::Site(s)],
                ancilla: None,
                cnot: None,
            }],
            uses: vec![(Patch::Site(s), Use::Exclusive, Channel::None)],
        });
    }
}

/// Requires the boundary a merge uses on `s` to face along `ax`.
fn face(packer: &mut Packer, z_axis: &mut HashMap<Site, u8>, s: Site, ax: u8, b: Boundary) {
    if ax == 2 {
        return;
    }
    let want_z = match b {
        Boundary::ZZ => ax,
        Boundary::XX => 1 - ax,
    };
    rotate(packer, z_axis, s, want_z);
}

#[allow(clippy::too_many_arguments)]
fn cnot_unit(
    packer: &mut Packer,
    z_axis: &mut HashMap<Site, u8>,
    m: &Mapping,
    mode: Mode,
    c: Site,
    t: Site,
    k: usize,
) -> Result<()> {
    let (pc, pt) = (Patch::Site(c), Patch::Site(t));
    if mode == Mode::ThreeD && (c.x, c.y) == (t.x, t.y) && c.z.abs_diff(t.z) == 1 {
        packer.place(Unit {
            instrs: vec![LsInstruction {
                kind: LsKind::TransversalCNOT,
                patches: vec![pc, pt],
                ancilla: None,
                cnot: Some(k),
            }],
            uses: vec![(pc, Use::Control, Channel::Transversal), (pt, Use::Target, Channel::Transversal)],
        });
        return Ok(());
    }
    let anc = if is_adjacent(&c, &t) {
        if c.z != t.z {
            return Err(Error::Mode(format!("stacked CNOT {c} {t} needs 3d mode")));
        }
        Patch::edge(c, t)
    } else if c.manhattan(&t) == 2 {
        // bridge corner holding an ancilla, preferring the control's layer
        let mut cands: Vec<Site> = c
            .neighbours()
            .into_iter()
            .filter(|s| is_adjacent(s, &t))
            .filter(|s| m.label(s).is_none_or(tiler::is_ancilla))
            .collect();
        cands.sort_by_key(|s| (s.z != c.z, *s));
        let b = *cands
            .first()
            .ok_or_else(|| Error::Schedule(format!("no bridge ancilla between {c} and {t}")))?;
        if mode == Mode::TwoD && b.z != c.z {
            return Err(Error::Mode("bridge leaves the plane".into()));
        }
        Patch::Site(b)
    } else {
        return Err(Error::Schedule(format!("CNOT between distant patches {c} {t}")));
    };
    let (ca, ta) = match anc {
        Patch::Edge(..) => (axis(&c, &t), axis(&c, &t)),
        Patch::Site(b) => (axis(&c, &b), axis(&b, &t)),
    };
    face(packer, z_axis, c, ca, Boundary::ZZ);
    face(packer, z_axis, t, ta, Boundary::XX);
    let ins = |kind, patches| LsInstruction {
        kind,
        patches,
        ancilla: Some(anc),
        cnot: Some(k),
    };
    let ch = |s: &Site, p: &Site| if s.z == p.z { Channel::Surgery } else { Channel::Transversal };
    let bridge = match anc {
        Patch::Site(b) => b,
        Patch::Edge(..) => c,
    };
    packer.place(Unit {
        instrs: vec![
            ins(LsKind::InitPlus, vec![anc]),
            ins(LsKind::MergeSplit(Boundary::ZZ), vec![pc, anc]),
            ins(LsKind::MergeSplit(Boundary::XX), vec![anc, pt]),
            ins(LsKind::MeasureX, vec![anc]),
        ],
        uses: vec![
            (pc, Use::Control, ch(&c, &bridge)),
            (pt, Use::Target, ch(&t, &bridge)),
            (anc, Use::Exclusive, Channel::None),
        ],
    });
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LsReport {
    pub mode: Mode,
    pub bound: usize,
    /// Largest number of CNOTs one patch takes part in within a step.
    pub max_per_patch: usize,
    pub violations: Vec<String>,
}

impl LsReport {
    pub fn satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for LsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.satisfied() { "satisfied" } else { "violated" };
        write!(f, "parallel bound {}: {verdict}", self.bound)
    }
}

/// Checks every step: per data patch at most two merge/split CNOTs (plus, in
/// 3d, at most two transversal ones), each ancilla patch serving one CNOT, and
/// merge operands adjacent.
pub fn validate_ls(program: &LsProgram, mode: Mode) -> LsReport {
    let mut violations = Vec::new();
    let mut max_per = 0;
    for (i, step) in program.steps.iter().enumerate() {
        // patch -> (surgery cnots, transversal cnots)
        let mut per: BTreeMap<Patch, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        let mut anc_users: BTreeMap<Patch, Vec<usize>> = BTreeMap::new();
        for ins in step {
            match &ins.kind {
                LsKind::MergeSplit(_) => {
                    let k = ins.cnot.unwrap_or(usize::MAX);
                    for p in &ins.patches {
                        if Some(*p) == ins.ancilla {
                            let e = anc_users.entry(*p).or_default();
                            if !e.contains(&k) {
                                e.push(k);
                            }
                        } else {
                            let e = &mut per.entry(*p).or_default().0;
                            if !e.contains(&k) {
                                e.push(k);
                            }
                        }
                    }
                    if let [a, b] = ins.patches[..] {
                        if !merge_adjacent(&a, &b) {
                            violations.push(format!("step {i}: merge of non-adjacent patches {a} and {b}"));
                        }
                    }
                }
                LsKind::TransversalCNOT => {
                    if mode == Mode::TwoD {
                        violations.push(format!("step {i}: transversal CNOT in 2d"));
                    }
                    if let [Patch::Site(a), Patch::Site(b)] = ins.patches[..] {
                        if (a.x, a.y) != (b.x, b.y) || a.z.abs_diff(b.z) != 1 {
                            violations.push(format!("step {i}: transversal CNOT on unstacked {a} {b}"));
                        }
                    }
                    for p in &ins.patches {
                        per.entry(*p).or_default().1.push(ins.cnot.unwrap_or(usize::MAX));
                    }
                }
                _ => {}
            }
        }
        for (p, (ls, tr)) in &per {
            let total = ls.len() + tr.len();
            max_per = max_per.max(total);
            if ls.len() > 2 || tr.len() > if mode == Mode::ThreeD { 2 } else { 0 } || total > mode.bound() {
                violations.push(format!(
                    "step {i}: patch {p} in {} surgery and {} transversal CNOTs",
                    ls.len(),
                    tr.len()
                ));
            }
        }
        for (p, users) in &anc_users {
            if users.len() > 1 {
                violations.push(format!("step {i}: ancilla {p} shared by {} CNOTs", users.len()));
            }
        }
    }
    LsReport {
        mode,
        bound: mode.bound(),
        max_per_patch: max_per,
        violations,
    }
}

fn merge_adjacent(a: &Patch, b: &Patch) -> bool {
    match (a, b) {
        (Patch::Site(s), Patch::Edge(p, q)) | (Patch::Edge(p, q), Patch::Site(s)) => s == p || s == q,
        (Patch::Site(s), Patch::Site(t)) => is_adjacent(s, t),
        _ => false,
    }
}
