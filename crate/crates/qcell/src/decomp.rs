//! Clifford+T decompositions of CCZ, Toffoli, logical AND and controlled-S.
//!
//! Wire order is always [controls.., target, ancillae..]. Every ancilla starts
//! and ends in |0>. The T/T-dagger signs follow the phase polynomial
//! 4abc = a + b + c - (a^b) - (a^c) - (b^c) + (a^b^c).

use crate::circuit_ir::{cnot, cz, h, s, t, tdg, Gate, GateKind, Schedule};
use crate::sim::Reference;

/// A named decomposition with its wire roles.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub name: &'static str,
    pub schedule: Schedule,
    pub data: Vec<&'static str>,
    pub ancillae: Vec<&'static str>,
    pub reference: Reference,
}

impl Decomposition {
    pub fn wires(&self) -> Vec<&'static str> {
        self.data.iter().chain(self.ancillae.iter()).copied().collect()
    }
}

fn layers(ls: Vec<Vec<Gate>>) -> Schedule {
    Schedule::from_layers(ls.into_iter().filter(|l| !l.is_empty()).collect())
}

// Parity computation of the T-depth-1 CCZ: v = a^b^c, ab, ac, bc.
fn ccz_compute(a: &str, b: &str, c: &str, v: &str, ab: Option<&str>, ac: &str, bc: &str) -> Vec<Vec<Gate>> {
    let mut l2 = vec![cnot(b, v), cnot(c, bc)];
    let mut l3 = vec![cnot(c, v), cnot(a, ac)];
    if let Some(ab) = ab {
        l2.push(cnot(a, ab));
        l3.push(cnot(b, ab));
    }
    vec![vec![cnot(a, v), cnot(b, bc), cnot(c, ac)], l2, l3]
}

fn mirrored(compute: &[Vec<Gate>]) -> Vec<Vec<Gate>> {
    compute.iter().rev().cloned().collect()
}

/// CCZ on (a, b, c) with ancillae v, ab, ac, bc: 18 CNOTs, seven T gates in one moment.
pub fn ccz_tdepth1() -> Schedule {
    ccz_on("a", "b", "c", ["v", "ab", "ac", "bc"])
}

pub fn ccz_on(a: &str, b: &str, c: &str, anc: [&str; 4]) -> Schedule {
    let [v, ab, ac, bc] = anc;
    let comp = ccz_compute(a, b, c, v, Some(ab), ac, bc);
    let mut ls = comp.clone();
    ls.push(vec![t(a), t(b), t(c), t(v), tdg(ab), tdg(ac), tdg(bc)]);
    ls.extend(mirrored(&comp));
    layers(ls)
}

/// Toffoli as the CCZ conjugated by H on the target. This is the lowering used on
/// the cube tile.
pub fn toffoli_cube_lowering(c1: &str, c2: &str, target: &str, anc: [&str; 4]) -> Schedule {
    let mut out = Schedule::from_layers(vec![vec![h(target)]]);
    out.extend(&ccz_on(c1, c2, target, anc));
    out.moments.push(crate::circuit_ir::Moment { gates: vec![h(target)] });
    out
}

/// Logical AND into c (which must start at |0>): the CCZ circuit without the ab
/// parity and its three T gates, with the target conjugated by H and closed by S.
pub fn and_4anc() -> Schedule {
    let (a, b, c, v, ac, bc) = ("a", "b", "c", "v", "ac", "bc");
    let comp = ccz_compute(a, b, c, v, None, ac, bc);
    let mut ls = vec![vec![h(c)]];
    ls.extend(comp.clone());
    ls.push(vec![t(c), t(v), tdg(ac), tdg(bc)]);
    ls.extend(mirrored(&comp));
    ls.push(vec![h(c)]);
    ls.push(vec![s(c)]);
    layers(ls)
}

/// Logical AND with three ancillae (x, v, bc). The T on the target moves onto
/// its copy x, which lets two parity CNOTs go.
pub fn and_3anc() -> Schedule {
    let (a, b, c, x, v, bc) = ("a", "b", "c", "x", "v", "bc");
    let comp = vec![
        vec![cnot(c, x), cnot(b, v)],
        vec![cnot(a, c), cnot(b, bc)],
        vec![cnot(c, v), cnot(x, bc)],
    ];
    let mut ls = vec![vec![h(c)]];
    ls.extend(comp.clone());
    ls.push(vec![t(x), tdg(c), tdg(bc), t(v)]);
    ls.extend(mirrored(&comp));
    ls.push(vec![h(c)]);
    ls.push(vec![s(c)]);
    layers(ls)
}

/// Controlled-S on (a, b) with one ancilla, depth five.
pub fn controlled_s() -> Schedule {
    let (a, b, anc) = ("a", "b", "anc");
    layers(vec![
        vec![cnot(a, anc)],
        vec![cnot(b, anc)],
        vec![t(a), t(b), tdg(anc)],
        vec![cnot(b, anc)],
        vec![cnot(a, anc)],
    ])
}

/// Controlled-S with each CNOT written as H.CZ.H on the ancilla.
pub fn controlled_s_b() -> Schedule {
    let (a, b, anc) = ("a", "b", "anc");
    let via_cz = |c: &str| vec![vec![h(anc)], vec![cz(c, anc)], vec![h(anc)]];
    let mut ls = via_cz(a);
    ls.extend(via_cz(b));
    ls.push(vec![t(a), t(b), tdg(anc)]);
    ls.extend(via_cz(b));
    ls.extend(via_cz(a));
    layers(ls)
}

/// Toffoli with T-depth two and 14 CNOTs, on the planar tile. The first T moment
/// carries the AND phases, the second the T-dagger on a^b that finishes the
/// controlled-S part. v is the ancilla targeted at the crossing of the sticks.
pub fn toffoli_tdepth2() -> Schedule {
    let (a, b, c, v, ac, bc) = ("a", "b", "c", "v", "ac", "bc");
    layers(vec![
        vec![h(c), cnot(a, ac), cnot(b, bc)],
        vec![cnot(c, v)],
        vec![cnot(c, ac), cnot(a, v)],
        vec![cnot(c, bc), cnot(b, v)],
        vec![t(a), t(b), t(c), tdg(ac), tdg(bc), t(v)],
        vec![cnot(c, v), cnot(a, ac), cnot(b, bc)],
        vec![tdg(v), cnot(c, ac)],
        vec![cnot(a, v), cnot(c, bc)],
        vec![cnot(b, v), h(c)],
    ])
}

/// Toffoli from a logical AND into w, a CNOT onto the target, and a
/// measurement-based uncompute of w whose CZ correction goes through ancilla v.
pub fn toffoli_mb() -> Schedule {
    let (a, b, tg, w, v, ac, bc) = ("a", "b", "t", "w", "v", "ac", "bc");
    let comp = ccz_compute(a, b, w, v, None, ac, bc);
    let mut ls = vec![vec![h(w)]];
    ls.extend(comp.clone());
    ls.push(vec![t(w), t(v), tdg(ac), tdg(bc)]);
    ls.extend(mirrored(&comp));
    ls.push(vec![h(w)]);
    ls.push(vec![s(w)]);
    ls.push(vec![cnot(w, tg)]);
    ls.push(vec![Gate::new(GateKind::MeasureX, &[w]).unwrap(), cnot(a, v)]);
    ls.push(vec![Gate::new(GateKind::ClassicallyControlledCZ, &[v, b])
        .unwrap()
        .conditioned(0)]);
    ls.push(vec![cnot(a, v)]);
    layers(ls)
}

pub fn catalogue() -> Vec<Decomposition> {
    vec![
        Decomposition {
            name: "ccz_tdepth1",
            schedule: ccz_tdepth1(),
            data: vec!["a", "b", "c"],
            ancillae: vec!["v", "ab", "ac", "bc"],
            reference: Reference::Ccz,
        },
        Decomposition {
            name: "and_4anc",
            schedule: and_4anc(),
            data: vec!["a", "b", "c"],
            ancillae: vec!["v", "ac", "bc"],
            reference: Reference::And,
        },
        Decomposition {
            name: "and_3anc",
            schedule: and_3anc(),
            data: vec!["a", "b", "c"],
            ancillae: vec!["x", "v", "bc"],
            reference: Reference::And,
        },
        Decomposition {
            name: "controlled_s",
            schedule: controlled_s(),
            data: vec!["a", "b"],
            ancillae: vec!["anc"],
            reference: Reference::Cs,
        },
        Decomposition {
            name: "controlled_s_b",
            schedule: controlled_s_b(),
            data: vec!["a", "b"],
            ancillae: vec!["anc"],
            reference: Reference::Cs,
        },
        Decomposition {
            name: "toffoli_tdepth2",
            schedule: toffoli_tdepth2(),
            data: vec!["a", "b", "c"],
            ancillae: vec!["v", "ac", "bc"],
            reference: Reference::Toffoli,
        },
        Decomposition {
            name: "toffoli_mb",
            schedule: toffoli_mb(),
            data: vec!["a", "b", "t"],
            ancillae: vec!["w", "v", "ac", "bc"],
            reference: Reference::Toffoli,
        },
        Decomposition {
            name: "toffoli_cube",
            schedule: toffoli_cube_lowering("a", "b", "c", ["v", "ab", "ac", "bc"]),
            data: vec!["a", "b", "c"],
            ancillae: vec!["v", "ab", "ac", "bc"],
            reference: Reference::Toffoli,
        },
    ]
}

pub fn by_name(name: &str) -> Option<Decomposition> {
    catalogue().into_iter().find(|d| d.name == name)
}
