use fences_core::selfdual::{
    check_uniform_conjecture, involution_of, prime_map, scan_codimensions, verify_self_dual,
    verify_sufficient_conditions, Conjecture,
};
use fences_core::{Fence, FenceError, FenceShape, IdealIndex};

#[test]
fn palindromic_odd_fences_are_self_dual() {
    for shape in FenceShape::all_up_to(10).into_iter().filter(|s| s.is_palindromic()) {
        let f = Fence::new(shape.clone()).unwrap();
        if shape.segments() % 2 == 0 {
            assert!(matches!(involution_of(&f), Err(FenceError::NotSelfDual(_))), "{f}");
            continue;
        }
        let idx = IdealIndex::new(&f);
        let report = verify_self_dual(&idx).unwrap();
        assert_eq!(report.ideals, idx.len());
        assert!(report.dihedral_orbits <= report.rowmotion_orbits);
    }
}

#[test]
fn prime_map_is_an_involution() {
    let f = Fence::new("F(3,1,3)".parse().unwrap()).unwrap();
    let kappa = involution_of(&f).unwrap();
    for &i in IdealIndex::new(&f).ideals() {
        assert_eq!(prime_map(&f, &kappa, prime_map(&f, &kappa, i)), i);
    }
}

#[test]
fn uniform_conjectures_hold_on_small_cases() {
    for conj in [Conjecture::IdealCardinality, Conjecture::PeaksMinusValleys, Conjecture::OppositeShared] {
        for (a, t) in [(2, 3), (3, 3), (2, 5)] {
            let r = check_uniform_conjecture(conj, a, t).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }
}

#[test]
fn codimension_scan_counts_every_fence() {
    let r = scan_codimensions(3, 8).unwrap();
    let total: usize = r.codimensions.unwrap().values().sum();
    assert_eq!(total, FenceShape::all_with_segments(3, 8).len());
}

#[test]
fn sufficiency_data_is_consistent() {
    for s in ["F(2,2,2)", "F(3,1,3)", "F(2,3,3,3,2)"] {
        let f = Fence::new(s.parse().unwrap()).unwrap();
        let r = verify_sufficient_conditions(&IdealIndex::new(&f)).unwrap();
        assert!(r.consistent, "{r:?}");
    }
}
