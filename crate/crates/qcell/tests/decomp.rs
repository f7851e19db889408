use qcell::circuit_ir::{depth, t_metrics, DepthPolicy, GateKind};
use qcell::decomp::{self, by_name, catalogue};
use qcell::sim::{assert_equiv, statevector_run, QuantumState, Reference};
use std::collections::HashMap;

const TOL: f64 = 1e-10;

fn check(name: &str) -> qcell::sim::EquivReport {
    let d = by_name(name).unwrap();
    assert_equiv(&d.schedule, d.reference, &d.data, &d.ancillae, TOL).unwrap()
}

#[test]
fn every_decomposition_matches_its_reference() {
    for d in catalogue() {
        let r = assert_equiv(&d.schedule, d.reference, &d.data, &d.ancillae, TOL).unwrap();
        assert!(r.equivalent, "{}: {} ({})", d.name, r.worst_deviation, r.detail);
    }
}

#[test]
fn ccz_flips_phase_of_all_ones() {
    let d = by_name("ccz_tdepth1").unwrap();
    let wires: Vec<String> = d.wires().iter().map(|s| s.to_string()).collect();
    let mut bits = vec![false; 7];
    bits[..3].copy_from_slice(&[true, true, true]);
    let out = statevector_run(&d.schedule, &QuantumState::basis(&wires, &bits).unwrap()).unwrap();
    assert_eq!(out.len(), 1);
    let idx = 0b1110000;
    assert!((out[0].state.amps[idx].re + 1.0).abs() < TOL);
    let zero = statevector_run(&d.schedule, &QuantumState::basis(&wires, &[false; 7]).unwrap()).unwrap();
    assert!((zero[0].state.amps[0].re - 1.0).abs() < TOL);
}

#[test]
fn and_is_not_a_toffoli() {
    let d = by_name("and_3anc").unwrap();
    let r = assert_equiv(&d.schedule, Reference::Toffoli, &d.data, &d.ancillae, TOL).unwrap();
    assert!(!r.equivalent);
}

#[test]
fn measurement_based_toffoli_has_two_branches() {
    let r = check("toffoli_mb");
    assert!(r.equivalent);
    assert_eq!(r.branches, 2);
    let d = by_name("toffoli_mb").unwrap();
    let wires: Vec<String> = d.wires().iter().map(|s| s.to_string()).collect();
    let mut bits = vec![false; 7];
    bits[0] = true;
    bits[1] = true;
    let out = statevector_run(&d.schedule, &QuantumState::basis(&wires, &bits).unwrap()).unwrap();
    assert_eq!(out.len(), 2);
    let p: f64 = out.iter().map(|b| b.probability()).sum();
    assert!((p - 1.0).abs() < 1e-9);
    for b in &out {
        let st = b.normalised();
        assert!((st.amps[0b1110000].norm() - 1.0).abs() < TOL);
    }
}

#[test]
fn t_counts_and_depths() {
    assert_eq!(t_metrics(&decomp::ccz_tdepth1()), (7, 1));
    assert_eq!(t_metrics(&decomp::and_4anc()), (4, 1));
    assert_eq!(t_metrics(&decomp::and_3anc()), (4, 1));
    assert_eq!(t_metrics(&decomp::toffoli_tdepth2()).1, 2);
    assert_eq!(t_metrics(&decomp::toffoli_mb()).0, 4);
    assert_eq!(t_metrics(&decomp::controlled_s()), (3, 1));
}

#[test]
fn cnot_counts() {
    assert_eq!(decomp::toffoli_tdepth2().count(GateKind::CNOT), 14);
    let ccz = decomp::ccz_tdepth1().count(GateKind::CNOT);
    assert_eq!(decomp::and_4anc().count(GateKind::CNOT), ccz - 4);
    assert_eq!(decomp::and_3anc().count(GateKind::CNOT), ccz - 6);
}

fn kinds(s: &qcell::circuit_ir::Schedule) -> HashMap<GateKind, usize> {
    let mut m = HashMap::new();
    for g in s.gates() {
        *m.entry(g.kind).or_insert(0) += 1;
    }
    m
}

#[test]
fn derivation_chain_is_multiset_arithmetic() {
    let ccz = kinds(&decomp::ccz_tdepth1());
    let a4 = kinds(&decomp::and_4anc());
    let a3 = kinds(&decomp::and_3anc());
    assert_eq!(a4[&GateKind::CNOT] + 4, ccz[&GateKind::CNOT]);
    let tk = |m: &HashMap<GateKind, usize>| m.get(&GateKind::T).unwrap_or(&0) + m.get(&GateKind::Tdag).unwrap_or(&0);
    assert_eq!(tk(&a4) + 3, tk(&ccz));
    // target conjugation
    assert_eq!(a4[&GateKind::H], 2);
    assert_eq!(a4[&GateKind::S], 1);
    assert_eq!(a3[&GateKind::CNOT] + 2, a4[&GateKind::CNOT]);
    assert_eq!(a3[&GateKind::T], a4[&GateKind::T]);
    assert_eq!(a3[&GateKind::Tdag], a4[&GateKind::Tdag]);
}

#[test]
fn depth_under_each_policy() {
    let td2 = decomp::toffoli_tdepth2();
    for p in DepthPolicy::all() {
        let d = depth(&td2, &p);
        assert!((6..=9).contains(&d), "{} gives {d}", p.name);
    }
    assert_eq!(depth(&decomp::and_3anc(), &DepthPolicy::parallel()), 7);
    assert_eq!(depth(&decomp::controlled_s(), &DepthPolicy::strict()), 5);
    assert!(depth(&decomp::controlled_s_b(), &DepthPolicy::strict()) > 5);
}
