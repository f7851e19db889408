use qcell::cells::{place, toffoli_cube, Layout};
use qcell::lattice::{grid, Site};
use qcell::tiler::{self, build_multiplier_layout, initial_mapping, qubit_count, Tower};

#[test]
fn qubit_count_formula() {
    assert_eq!(qubit_count(4).unwrap(), 48);
    assert_eq!(qubit_count(1).unwrap(), 18);
    assert_eq!(qubit_count(2).unwrap(), 30);
    assert!(qubit_count(0).is_err());
}

#[test]
fn layout_size_matches_qubit_count() {
    for n in 1..=16 {
        let l = build_multiplier_layout(n).unwrap();
        assert_eq!(l.lattice.size(), qubit_count(n).unwrap());
        assert_eq!(l.placements.len(), n as usize);
        assert_eq!(l.lattice.dims.0, 2);
        assert_eq!(l.lattice.dims.1, 3);
    }
}

#[test]
fn usage_ratio_at_four() {
    let l = build_multiplier_layout(4).unwrap();
    assert_eq!(l.usage_ratio().to_string(), "33/48");
}

#[test]
fn single_cube_ratios() {
    let l = place(&Layout::new(grid(2, 2, 2).unwrap()), &toffoli_cube(), Site::new(0, 0, 0), 0).unwrap();
    assert_eq!(l.usage_ratio().to_string(), "7/8");
    assert_eq!(l.effectiveness_ratio().to_string(), "3/8");
    assert_eq!(Layout::new(grid(2, 2, 2).unwrap()).usage_ratio().num, 0);
}

#[test]
fn placement_bounds() {
    let l = Layout::new(grid(2, 3, 8).unwrap());
    assert!(place(&l, &toffoli_cube(), Site::new(0, 0, 0), 0).is_ok());
    assert!(place(&l, &toffoli_cube(), Site::new(0, 0, 7), 0).is_err());
}

#[test]
fn mapping_is_bijection_onto_used_sites() {
    for n in 1..=8usize {
        let l = build_multiplier_layout(n as i64).unwrap();
        let m = initial_mapping(&l, n).unwrap();
        let used = l.used_sites();
        assert_eq!(m.len(), used.len());
        for (_, s) in m.iter() {
            assert!(used.contains(s));
        }
    }
}

#[test]
fn z_sits_in_the_yellow_queue() {
    let l = build_multiplier_layout(4).unwrap();
    let m = initial_mapping(&l, 4).unwrap();
    assert!(l.queues[tiler::YELLOW].contains(&m.site(tiler::Z).unwrap()));
    let bs = l.queues[tiler::YELLOW]
        .iter()
        .filter(|s| m.label(s).unwrap().starts_with('B'))
        .count();
    assert_eq!(bs, 3);
}

#[test]
fn smallest_mapping() {
    let l = build_multiplier_layout(1).unwrap();
    let m = initial_mapping(&l, 1).unwrap();
    let data: Vec<&String> = m.iter().map(|(l, _)| l).filter(|l| !tiler::is_ancilla(l)).collect();
    assert_eq!(data, vec!["A0", "B0", "P0", "P1", "Z"]);
}

#[test]
fn cubes_share_one_face() {
    let tw = Tower { n: 4 };
    for k in 0..3 {
        let lo: std::collections::BTreeSet<_> = tw.cube_box(k).into_iter().collect();
        let hi: std::collections::BTreeSet<_> = tw.cube_box(k + 1).into_iter().collect();
        assert_eq!(lo.intersection(&hi).count(), 4);
    }
    let l = build_multiplier_layout(4).unwrap();
    assert_eq!(l.placement_sites().len() + l.spares.len(), 20);
}

#[test]
fn layouts_build_for_all_small_widths() {
    for n in 1..=8 {
        let l = tiler::build_multiplier_layout(n).unwrap();
        let want = if n == 1 { 10 } else { 8 * n as usize + 1 };
        assert_eq!(l.used_sites().len(), want, "n = {n}");
        tiler::initial_mapping(&l, n as usize).unwrap();
    }
}
