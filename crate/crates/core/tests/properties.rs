//! Cross-module properties that exercise the whole pipeline beyond the
//! per-module unit tests: the n = 6 differential checks, commutation with
//! an explicit legal pair, and report determinism.

use gridups_core::complex::{
    build_t_complex, check_boundary_squared, check_degree_homogeneity,
};
use gridups_core::grid::{preset_torus, preset_unknot, Axis, InterchangeKind};
use gridups_core::homology::decompose;
use gridups_core::poly::RationalT;
use gridups_core::upsilon::{invariance_audit, upsilon_at, upsilon_profile, AuditConfig};
use gridups_core::EvalOptions;

fn t(p: u32, q: u32) -> RationalT {
    RationalT::new(p, q).unwrap()
}

#[test]
fn differential_checks_at_n6() {
    let d = preset_unknot(6).unwrap();
    let c = build_t_complex(&d, t(1, 2), &EvalOptions::default()).unwrap();
    assert_eq!(c.generator_count(), 720);
    assert!(check_degree_homogeneity(&c));
    assert!(check_boundary_squared(&c));
    assert_eq!(decompose(&c).unwrap().rank(), 32);
}

#[test]
fn explicit_commutation_preserves_upsilon() {
    // the unknotted trefoil has both interchange kinds available
    let d = preset_torus(2, 3).unwrap().cross_commute(Axis::Cols, 0).unwrap();
    let mut found = None;
    'search: for axis in [Axis::Rows, Axis::Cols] {
        for i in 0..d.n() {
            if d.classify_adjacent_interchange(axis, i).unwrap() == InterchangeKind::Commutation {
                found = Some((axis, i));
                break 'search;
            }
        }
    }
    let (axis, i) = found.expect("a commutation pair exists on this diagram");
    let moved = d.commute(axis, i).unwrap();
    let tv = t(1, 2);
    assert_eq!(upsilon_at(&d, tv).unwrap(), upsilon_at(&moved, tv).unwrap());
}

#[test]
fn trefoil_profile_csv_is_frozen() {
    let profile = upsilon_profile(&preset_torus(2, 3).unwrap(), 4).unwrap();
    assert_eq!(
        profile.to_csv(),
        "t,upsilon\n0,0\n1/4,-1/4\n1/2,-1/2\n3/4,-3/4\n1,-1\n5/4,-3/4\n3/2,-1/2\n7/4,-1/4\n2,0\n"
    );
    let json = profile.to_json();
    assert!(json.contains(r#""denominator":4"#));
    assert!(json.contains(r#"{"t":"1/2","upsilon":"-1/2"}"#));
    assert!(json.contains(r#""segments":[-1,-1,-1,-1,1,1,1,1]"#));
    assert!(json.contains(r#""symmetric":true"#));
}

#[test]
fn rank_lemma_on_move_perturbed_diagrams() {
    use gridups_core::grid::random_moves;
    for (start, seed) in [
        (preset_unknot(2).unwrap(), 4u64),
        (preset_unknot(3).unwrap(), 9),
        (preset_torus(2, 3).unwrap(), 1),
    ] {
        let d = random_moves(&start, seed, 8, 6).pop().unwrap().1;
        let c = build_t_complex(&d, t(1, 2), &EvalOptions::default()).unwrap();
        let dec = decompose(&c).unwrap();
        assert_eq!(dec.rank(), 1usize << (d.n() - 1), "seed {seed}, n = {}", d.n());
    }
}

#[test]
fn tau_matches_first_profile_segment() {
    use gridups_core::upsilon::tau_of;
    for d in [
        preset_unknot(3).unwrap(),
        preset_torus(2, 3).unwrap(),
        preset_torus(2, 3).unwrap().mirror(),
    ] {
        let profile = upsilon_profile(&d, 4).unwrap();
        assert_eq!(tau_of(&d).unwrap(), -profile.segments[0]);
    }
}

#[test]
fn audit_reports_are_reproducible() {
    let cfg = AuditConfig {
        seed: 11,
        moves: 8,
        max_n: 6,
        t_values: vec![t(1, 2)],
        compare_towers: true,
    };
    let d = preset_unknot(3).unwrap();
    let opts = EvalOptions::default();
    let a = invariance_audit(&d, &cfg, &opts).unwrap();
    let b = invariance_audit(&d, &cfg, &opts).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.pass);
    assert_eq!(a.towers_equal, Some(true));
}
