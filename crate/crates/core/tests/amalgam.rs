use polywythoff::amalgam::{ridge_walk, AmalgamContext, AmalgamError, AmalgamWord, FaceType, Side};
use polywythoff::fixture::{builtin, StringFixture, TailTriangleFixture};
use polywythoff::group::{GroupElement, DEFAULT_CAP};
use polywythoff::poset::poset_isomorphic;
use polywythoff::wythoff::build_regular;
use proptest::prelude::*;

fn gens(name: &str) -> Vec<GroupElement> {
    StringFixture::parse(builtin(&format!("{name}.sc")).unwrap()).unwrap().generators()
}

fn ctx(p: &str, q: &str) -> AmalgamContext {
    AmalgamContext::new(&gens(p), &gens(q), DEFAULT_CAP).unwrap()
}

/// Generators of the finite tomotope group in letter order `α_0, α_1, α_2, β`.
fn tomotope_letters() -> Vec<GroupElement> {
    let g = TailTriangleFixture::parse(builtin("tomotope.tt").unwrap()).unwrap().to_group(DEFAULT_CAP).unwrap();
    g.generators().to_vec()
}

fn evaluate(images: &[GroupElement], letters: &[usize]) -> GroupElement {
    letters.iter().fold(images[0].identity_like(), |acc, &l| acc.compose(&images[l]).unwrap())
}

fn letters(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..4, 0..max_len)
}

#[test]
fn shared_facet_groups_must_match() {
    let err = AmalgamContext::new(&gens("tetrahedron"), &gens("square"), DEFAULT_CAP).unwrap_err();
    assert_eq!(err, AmalgamError::RankMismatch(3, 2));
    // reversing the octahedron's generators gives the cube, whose facets are squares
    let cube: Vec<GroupElement> = gens("octahedron").into_iter().rev().collect();
    let err = AmalgamContext::new(&gens("tetrahedron"), &cube, DEFAULT_CAP).unwrap_err();
    assert_eq!(err, AmalgamError::FacetMismatch);
    let triangle_facets = gens("triangle");
    let hexagon = gens("hexagon");
    assert!(AmalgamContext::new(&triangle_facets, &hexagon, DEFAULT_CAP).is_ok());
}

#[test]
fn factor_elements_embed_faithfully() {
    let c = ctx("tetrahedron", "octahedron");
    for (side, name) in [(Side::P, "tetrahedron"), (Side::Q, "octahedron")] {
        let g = polywythoff::group::FiniteGroup::closure(&gens(name), DEFAULT_CAP).unwrap();
        let mut seen = std::collections::HashSet::new();
        for x in g.elements() {
            let w = c.embed(side, x).unwrap();
            assert!(w.len() <= 1);
            assert_eq!(c.evaluate_in(side, &w).unwrap().as_ref(), Some(x));
            assert!(seen.insert(w));
        }
        for a in g.elements().iter().step_by(5) {
            for b in g.elements().iter().step_by(3) {
                let lhs = c.multiply(&c.embed(side, a).unwrap(), &c.embed(side, b).unwrap()).unwrap();
                assert_eq!(lhs, c.embed(side, &a.compose(b).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn alternating_generators_never_cancel() {
    for (p, q) in [("triangle", "triangle"), ("tetrahedron", "octahedron"), ("square", "hexagon")] {
        let c = ctx(p, q);
        let n = c.n();
        for m in 0..=50 {
            let w = c.dihedral_power(m);
            assert_eq!(w.len(), 2 * m);
            assert_eq!(w.kappa(), 0);
            // each factor is the single generator itself
            let spelled = c.letters(&w).unwrap();
            assert_eq!(spelled, (0..m).flat_map(|_| [n - 1, n]).collect::<Vec<_>>());
        }
    }
}

#[test]
fn ball_interiors_are_stable() {
    let c = ctx("triangle", "square");
    let mut previous = c.ball(0);
    for r in 1..=8 {
        let ball = c.ball(r);
        for key in previous.keys() {
            let old = previous.face_id(key).unwrap();
            let new = ball.face_id(key).expect("balls are nested");
            assert_eq!(previous.poset.face(old).rank, ball.poset.face(new).rank);
            for &lo in previous.poset.down(old) {
                if let Some(lo_key) = previous.keys().get(lo.wrapping_sub(1)) {
                    assert!(ball.poset.is_cover(ball.face_id(lo_key).unwrap(), new));
                }
            }
        }
        previous = ball;
    }
}

#[test]
fn complete_facets_are_copies_of_the_factors() {
    for (p, q, r) in [("triangle", "square", 4), ("tetrahedron", "octahedron", 2), ("hexagon", "hexagon", 3)] {
        let c = ctx(p, q);
        let models = [build_regular(&gens(p), DEFAULT_CAP).unwrap(), build_regular(&gens(q), DEFAULT_CAP).unwrap()];
        let ball = c.ball(r);
        let facets = ball.complete_facets();
        assert!(!facets.is_empty());
        for f in facets {
            let (section, _) = ball.poset.section(ball.poset.bottom().unwrap(), f);
            let which = match ball.keys()[f - 1].0 {
                FaceType::Facet(Side::P) => 0,
                _ => 1,
            };
            assert!(poset_isomorphic(&section, &models[which]).is_some(), "{p}/{q} facet {f}");
        }
    }
}

#[test]
fn ridge_sections_are_open_alternating_paths() {
    for (p, q) in [("triangle", "triangle"), ("triangle", "square"), ("tetrahedron", "octahedron"), ("hexagon", "hexagon")] {
        let c = ctx(p, q);
        for r in 0..=12 {
            let walk = ridge_walk(&c, r);
            assert!(walk.open && walk.alternating, "{p}/{q} radius {r}: {walk:?}");
            assert_eq!((walk.ridges, walk.facets), (2 * r + 1, 2 * r + 2));
        }
    }
}

#[test]
fn ridge_walk_agrees_with_the_ball() {
    let c = ctx("triangle", "square");
    for r in 0..=3 {
        let ball = c.ball(r);
        let base = ball.face_id(&(FaceType::Sub(0), c.identity())).unwrap();
        assert_eq!(ball.poset.up(base).len(), ridge_walk(&c, r).ridges);
    }
}

#[test]
fn regular_exactly_when_factors_agree() {
    assert!(ctx("tetrahedron", "tetrahedron").universal_is_regular());
    assert!(!ctx("tetrahedron", "octahedron").universal_is_regular());
    assert!(!ctx("triangle", "square").universal_is_regular());
    assert!(ctx("hexagon", "hexagon").universal_is_regular());
}

#[test]
fn word_text_round_trips() {
    let c = ctx("tetrahedron", "hemioctahedron");
    let w = c.parse_word("a2 b a1 a2 b a0").unwrap();
    let text = c.format_word(&w).unwrap();
    assert_eq!(c.parse_word(&text).unwrap(), w);
    assert!(c.parse_word("a3").is_err());
    assert!(c.parse_word("c").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn normal_forms_respect_the_tomotope_quotient(a in letters(24), b in letters(24)) {
        let c = ctx("tetrahedron", "hemioctahedron");
        let images = tomotope_letters();
        let (wa, wb) = (c.normalize(&a).unwrap(), c.normalize(&b).unwrap());
        prop_assert_eq!(evaluate(&images, &c.letters(&wa).unwrap()), evaluate(&images, &a));
        let product = c.multiply(&wa, &wb).unwrap();
        let mut ab = a.clone();
        ab.extend(&b);
        prop_assert_eq!(&product, &c.normalize(&ab).unwrap());
        if wa == wb {
            prop_assert_eq!(evaluate(&images, &a), evaluate(&images, &b));
        }
        let quotient = c.multiply(&wa, &c.inverse(&wb).unwrap()).unwrap();
        prop_assert_eq!(quotient.is_identity(), wa == wb);
        prop_assert!(c.multiply(&wa, &c.inverse(&wa).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn normalization_is_idempotent(a in letters(30)) {
        let c = ctx("tetrahedron", "octahedron");
        let w = c.normalize(&a).unwrap();
        prop_assert_eq!(c.normalize(&c.letters(&w).unwrap()).unwrap(), w.clone());
        for pair in w.taus().windows(2) {
            prop_assert_ne!(pair[0].0, pair[1].0);
        }
    }

    #[test]
    fn plus_membership_matches_generation(a in letters(20), j in -1isize..=1) {
        let c = ctx("tetrahedron", "octahedron");
        let allowed: Vec<usize> = a.iter().copied().filter(|&l| l as isize > j).collect();
        prop_assert!(c.in_plus(&c.normalize(&allowed).unwrap(), j).unwrap());
        let w = c.normalize(&a).unwrap();
        if c.in_plus(&w, j).unwrap() {
            // the tomotope image lies in the matching subgroup
            let images = tomotope_letters();
            let sub = polywythoff::group::FiniteGroup::closure(&images[(j + 1) as usize..], DEFAULT_CAP).unwrap();
            prop_assert!(sub.contains(&evaluate(&images, &a)));
        }
    }

    #[test]
    fn shared_part_is_the_intersection(a in letters(20)) {
        let c = ctx("tetrahedron", "octahedron");
        let w = c.normalize(&a).unwrap();
        let both = c.in_face_group(&w, FaceType::Facet(Side::P)).unwrap()
            && c.in_face_group(&w, FaceType::Facet(Side::Q)).unwrap();
        prop_assert_eq!(both, c.in_face_group(&w, FaceType::Ridge).unwrap());
        let only_p: Vec<usize> = a.iter().copied().filter(|&l| l < 3).collect();
        prop_assert!(c.in_face_group(&c.normalize(&only_p).unwrap(), FaceType::Facet(Side::P)).unwrap());
    }

    #[test]
    fn canonical_forms_name_cosets(a in letters(16), b in letters(16), t in 0usize..5) {
        let c = ctx("tetrahedron", "octahedron");
        let x = [FaceType::Sub(0), FaceType::Sub(1), FaceType::Ridge, FaceType::Facet(Side::P), FaceType::Facet(Side::Q)][t];
        let (wa, wb) = (c.normalize(&a).unwrap(), c.normalize(&b).unwrap());
        let (ca, cb) = (c.canonical(&wa, x).unwrap(), c.canonical(&wb, x).unwrap());
        prop_assert!(ca.len() <= wa.len());
        prop_assert_eq!(c.canonical(&ca, x).unwrap(), ca.clone());
        let back: AmalgamWord = c.multiply(&wa, &c.inverse(&ca).unwrap()).unwrap();
        prop_assert!(c.in_face_group(&back, x).unwrap());
        let same_coset = c.in_face_group(&c.multiply(&wa, &c.inverse(&wb).unwrap()).unwrap(), x).unwrap();
        prop_assert_eq!(same_coset, ca == cb);
    }

    #[test]
    fn canonical_forms_absorb_the_face_group(a in letters(16), g in letters(12), t in 0usize..5) {
        let c = ctx("triangle", "square");
        let x = [FaceType::Sub(0), FaceType::Ridge, FaceType::Facet(Side::P), FaceType::Facet(Side::Q), FaceType::Ridge][t];
        let allowed: Vec<usize> = g
            .into_iter()
            .map(|l| l % 3)
            .filter(|&l| match x {
                FaceType::Sub(_) => l != 0,
                FaceType::Ridge => l == 0,
                FaceType::Facet(Side::P) => l < 2,
                FaceType::Facet(Side::Q) => l != 1,
            })
            .collect();
        let h = c.normalize(&allowed).unwrap();
        prop_assert!(c.in_face_group(&h, x).unwrap());
        let w = c.normalize(&a.into_iter().map(|l| l % 3).collect::<Vec<_>>()).unwrap();
        let moved = c.multiply(&h, &w).unwrap();
        prop_assert_eq!(c.canonical(&moved, x).unwrap(), c.canonical(&w, x).unwrap());
    }
}
