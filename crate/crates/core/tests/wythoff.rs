use std::collections::HashSet;

use polywythoff::fixture::{builtin, TailTriangleFixture};
use polywythoff::group::{GroupElement, DEFAULT_CAP};
use polywythoff::poset::{FaceKind, FaceRep, FlagGraph};
use polywythoff::selftest::random_quotients;
use polywythoff::ttgroup::{CheckMethod, TailTriangleCGroup};
use polywythoff::wythoff::{build_polytope, SemiregularPolytope};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn certified(name: &str) -> TailTriangleCGroup {
    let fx = TailTriangleFixture::parse(builtin(name).unwrap()).unwrap();
    fx.to_group(DEFAULT_CAP).unwrap().certify(CheckMethod::Both).unwrap()
}

/// The right coset a face stands for, as a set of elements.
fn coset(g: &TailTriangleCGroup, poly: &SemiregularPolytope, face: usize) -> HashSet<GroupElement> {
    let f = poly.face(face);
    let set = match f.kind {
        FaceKind::Sub(j) => g.face_set(j),
        FaceKind::FacetP => g.facet_p_set(),
        FaceKind::FacetQ => g.facet_q_set(),
        other => panic!("no coset for {other:?}"),
    };
    let FaceRep::Element(rep) = &f.rep else { panic!("face without representative") };
    g.subgroup(set).unwrap().elements().iter().map(|h| h.compose(rep).unwrap()).collect()
}

#[test]
fn flags_meet_in_exactly_one_element() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for name in ["tomotope.tt", "m66_240a.tt", "b3_digon.tt", "d4.tt"] {
        let g = certified(name);
        let poly = build_polytope(&g).unwrap();
        let flags = poly.flags();
        assert_eq!(flags.len(), 2 * g.order(), "{name}");
        for flag in flags.choose_multiple(&mut rng, 40) {
            let mut common = coset(&g, &poly, flag[0] as usize);
            for &f in &flag[1..] {
                let next = coset(&g, &poly, f as usize);
                common.retain(|x| next.contains(x));
                assert!(!common.is_empty(), "{name}: chain lost its common representative");
            }
            assert_eq!(common.len(), 1, "{name}");
        }
    }
}

#[test]
fn incident_faces_share_a_representative() {
    let g = certified("tomotope.tt");
    let poly = build_polytope(&g).unwrap();
    for (lo, hi) in poly.covers() {
        let (a, b) = (poly.face(lo).rank, poly.face(hi).rank);
        if a < 0 || b > poly.n() as i32 {
            continue;
        }
        let (ca, cb) = (coset(&g, &poly, lo), coset(&g, &poly, hi));
        assert!(ca.iter().any(|x| cb.contains(x)));
    }
}

#[test]
fn random_c_group_quotients_build_polytopes() {
    let mut built = 0;
    for g in random_quotients(2024, 40, 10_000) {
        let Ok(c) = g.certify(CheckMethod::Both) else { continue };
        let poly = build_polytope(&c).unwrap();
        poly.verify().unwrap();
        assert_eq!(poly.flags().len(), 2 * c.order());
        let facets = poly.faces_of_rank(c.n() as i32).len();
        let index = |set| c.order() / c.subgroup(set).unwrap().order();
        assert_eq!(facets, index(c.facet_p_set()) + index(c.facet_q_set()));
        assert!(FlagGraph::new(poly.poset()).unwrap().components() == 1);
        built += 1;
    }
    assert!(built >= 5, "only {built} quotients were C-groups");
}

#[test]
fn sections_over_co_rank_two_faces_alternate() {
    for (name, size) in [("tomotope.tt", 4), ("m66_240a.tt", 4), ("b3_digon.tt", 6), ("d4.tt", 4)] {
        let poly = build_polytope(&certified(name)).unwrap();
        for s in poly.two_sections() {
            assert_eq!(s.size, size, "{name}");
            assert!(s.alternating, "{name}");
        }
    }
}
