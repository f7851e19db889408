use proptest::prelude::*;

use qcell::circuit_ir::{cnot, h, swap, toffoli, AppendMode, Gate, GateKind, Mapping, Schedule};
use qcell::lattice::Site;

fn gate(k: u8, a: usize, b: usize, c: usize) -> Option<Gate> {
    let l = |i: usize| format!("q{i}");
    match k {
        0 => Some(h(&l(a))),
        1 if a != b => Some(cnot(&l(a), &l(b))),
        2 if a != b => Some(swap(&l(a), &l(b))),
        3 if a != b && b != c && a != c => Some(toffoli(&l(a), &l(b), &l(c))),
        _ => None,
    }
}

#[test]
fn repeated_operand_is_rejected() {
    assert!(Gate::new(GateKind::CNOT, &["a", "a"]).is_err());
    assert!(Gate::new(GateKind::CNOT, &["a"]).is_err());
}

#[test]
fn mapping_rejects_double_occupancy() {
    let mut m = Mapping::new();
    m.insert("a", Site::new(0, 0, 0)).unwrap();
    assert!(m.insert("b", Site::new(0, 0, 0)).is_err());
}

proptest! {
    #[test]
    fn earliest_fit_keeps_moments_disjoint_and_order(
        gs in prop::collection::vec((0u8..4, 0usize..6, 0usize..6, 0usize..6), 0..40)
    ) {
        let mut s = Schedule::new();
        let mut order = Vec::new();
        for (k, a, b, c) in gs {
            if let Some(g) = gate(k, a, b, c) {
                order.push(g.clone());
                s.append(g, AppendMode::EarliestFit).unwrap();
            }
        }
        prop_assert!(s.is_valid());
        prop_assert!(s.moments.iter().all(|m| m.is_disjoint()));
        // per wire, gates keep their program order
        for w in s.wires() {
            let want: Vec<&Gate> = order.iter().filter(|g| g.operands.contains(&w)).collect();
            let got: Vec<&Gate> = s.gates().filter(|g| g.operands.contains(&w)).collect();
            prop_assert_eq!(want, got);
        }
        let back = Schedule::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn swapping_labels_twice_restores_the_mapping(n in 2usize..8, i in 0usize..8, j in 0usize..8) {
        let mut m = Mapping::new();
        for k in 0..n {
            m.insert(&format!("q{k}"), Site::new(k as i32, 0, 0)).unwrap();
        }
        let (a, b) = (format!("q{}", i % n), format!("q{}", j % n));
        prop_assume!(a != b);
        let before = m.clone();
        m.swap_labels(&a, &b).unwrap();
        prop_assert_eq!(m.site(&a), before.site(&b));
        prop_assert_eq!(m.label(&before.site(&a).unwrap()), Some(b.as_str()));
        m.swap_labels(&a, &b).unwrap();
        prop_assert_eq!(m, before);
    }
}
