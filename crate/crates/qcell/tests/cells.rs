use qcell::cells::{and_tile, same_names, tdepth2_tile, tile_by_name, tile_supports, toffoli_cube, Role};
use qcell::circuit_ir::{cnot, Schedule};
use qcell::decomp;

#[test]
fn cube_supports_its_lowering() {
    let s = decomp::toffoli_cube_lowering("a", "b", "c", ["v", "ab", "ac", "bc"]);
    assert!(tile_supports(&toffoli_cube(), &s, &same_names(&["a", "b", "c", "v", "ab", "ac", "bc"])).unwrap());
}

#[test]
fn planar_tiles_support_their_circuits() {
    let td2 = decomp::toffoli_tdepth2();
    assert!(tile_supports(&tdepth2_tile(), &td2, &same_names(&["a", "b", "c", "v", "ac", "bc"])).unwrap());
    let mb = decomp::toffoli_mb();
    assert!(tile_supports(&and_tile(), &mb, &same_names(&["a", "b", "t", "w", "v", "ac", "bc"])).unwrap());
}

#[test]
fn missing_stick_is_not_supported() {
    // the two controls of the planar tile share no stick
    let s = Schedule::from_layers(vec![vec![cnot("a", "b")]]);
    assert!(!tile_supports(&tdepth2_tile(), &s, &same_names(&["a", "b"])).unwrap());
    // a diagonal of the cube is not an edge
    let s = Schedule::from_layers(vec![vec![cnot("a", "bc")]]);
    assert!(!tile_supports(&toffoli_cube(), &s, &same_names(&["a", "bc"])).unwrap());
}

#[test]
fn unassigned_wire_is_an_error() {
    let s = Schedule::from_layers(vec![vec![cnot("a", "zz")]]);
    assert!(tile_supports(&toffoli_cube(), &s, &same_names(&["a"])).is_err());
}

#[test]
fn tiles_are_well_formed() {
    for t in [toffoli_cube(), tdepth2_tile(), and_tile()] {
        assert!(t.is_well_formed(), "{}", t.name);
        assert_eq!(tile_by_name(&t.name).unwrap(), t);
    }
    assert!(!toffoli_cube().is_planar());
    assert!(tdepth2_tile().is_planar() && and_tile().is_planar());
    assert_eq!(toffoli_cube().count_role(Role::Ancilla), 4);
    assert_eq!(toffoli_cube().count_role(Role::Control), 2);
}
