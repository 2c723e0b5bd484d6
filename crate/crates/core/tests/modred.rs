use std::collections::{HashMap, VecDeque};

use polywythoff::fixture::{builtin, ModredFixture, TailTriangleFixture};
use polywythoff::group::{FiniteGroup, GroupElement, DEFAULT_CAP};
use polywythoff::modred::{rescale, search_lengths, three_ringings, LengthOutcome, ModPGroupSpec, Rational, Ringing};
use polywythoff::wythoff::{build_polytope, Classification};

fn diagram64(p: u32) -> ModPGroupSpec {
    let fx = ModredFixture::parse(builtin("diagram64.mr").unwrap()).unwrap();
    rescale(&fx.diagram, &fx.lengths).unwrap().reduce_mod_p(p).unwrap()
}

fn mats(spec: &ModPGroupSpec) -> Vec<GroupElement> {
    spec.generators().iter().cloned().map(GroupElement::Mat).collect()
}

/// Whether `gens[i] ↦ images[i]` extends to an isomorphism of the generated groups.
fn generator_map_is_isomorphism(gens: &[GroupElement], images: &[GroupElement]) -> bool {
    let a = FiniteGroup::closure(gens, DEFAULT_CAP).unwrap();
    let b = FiniteGroup::closure(images, DEFAULT_CAP).unwrap();
    if a.order() != b.order() {
        return false;
    }
    let mut map: HashMap<usize, GroupElement> = HashMap::from([(0, b.identity().clone())]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let y = map[&x].clone();
        for (g, h) in gens.iter().zip(images) {
            let xg = a.index_of(&a.element(x).compose(g).unwrap()).unwrap();
            let yh = y.compose(h).unwrap();
            match map.get(&xg) {
                Some(prev) if *prev != yh => return false,
                Some(_) => {}
                None => {
                    map.insert(xg, yh);
                    queue.push_back(xg);
                }
            }
        }
    }
    let distinct: std::collections::HashSet<_> = map.values().collect();
    distinct.len() == a.order()
}

#[test]
fn g3_is_translations_by_octahedral_point_group() {
    let spec = diagram64(3);
    let g = FiniteGroup::closure(&mats(&spec), DEFAULT_CAP).unwrap();
    assert_eq!(g.order(), 1296);
    let translations: Vec<GroupElement> = g
        .elements()
        .iter()
        .filter(|x| matches!(x, GroupElement::Mat(m) if spec.moves_into_radical(m)))
        .cloned()
        .collect();
    assert_eq!(translations.len(), 27);
    let t = g.subgroup(&translations).unwrap();
    assert_eq!(t.order(), 27);
    for x in g.generators() {
        for y in t.elements() {
            let conj = x.inverse().compose(y).unwrap().compose(x).unwrap();
            assert!(t.contains(&conj));
        }
    }
    let point = g.subgroup(&mats(&spec)[..3]).unwrap();
    assert_eq!(point.order(), 48);
    assert_eq!(point.intersect(&t).unwrap().order(), 1);
    assert!(spec.is_singular());
}

#[test]
fn only_one_length_system_survives_mod_2() {
    let fx = ModredFixture::parse(builtin("diagram64.mr").unwrap()).unwrap();
    let outcomes = search_lengths(&fx.diagram, 2, DEFAULT_CAP).unwrap();
    let winners: Vec<&Vec<Rational>> = outcomes
        .iter()
        .filter(|(_, o)| matches!(o, LengthOutcome::CGroup { order: 96 }))
        .map(|(l, _)| l)
        .collect();
    assert_eq!(winners.len(), 1);
    let l = winners[0];
    let scale = l[0];
    let ratios: Vec<Rational> = l.iter().map(|x| x / scale).collect();
    let expected: Vec<Rational> = [1, 1, 2, 4].iter().map(|&x| Rational::from_integer(x)).collect();
    assert_eq!(ratios, expected);
    assert!(outcomes.iter().all(|(_, o)| !matches!(o, LengthOutcome::CGroup { order } if *order != 96)));
}

#[test]
fn g2_matches_the_tomotope_group() {
    let spec = diagram64(2);
    let g = mats(&spec);
    let tomo = TailTriangleFixture::parse(builtin("tomotope.tt").unwrap()).unwrap().to_group(DEFAULT_CAP).unwrap();
    let t = tomo.generators();
    // (r0, r1, r2, s2) ↦ (ρ0, ρ1, ρ3, ρ0ρ2)
    let images = [t[0].clone(), t[1].clone(), t[3].clone(), t[0].compose(&t[2]).unwrap()];
    assert!(generator_map_is_isomorphism(&g, &images));
}

#[test]
fn g2_ringings() {
    let spec = diagram64(2);
    let c = spec.certify_ringing(Ringing::First, DEFAULT_CAP).unwrap();
    let poly = build_polytope(&c).unwrap();
    assert_eq!(poly.f_vector().to_string(), "(3, 12, 16, 4+4)");
    assert!(matches!(poly.classify(), Classification::Regular { aut_order: 192, .. }));
    for (r, fvec) in [(Ringing::Second, "(4, 12, 12, 4+3)"), (Ringing::Third, "(4, 12, 12, 3+4)")] {
        let poly = build_polytope(&spec.certify_ringing(r, DEFAULT_CAP).unwrap()).unwrap();
        assert_eq!(poly.f_vector().to_string(), fvec);
        assert!(matches!(poly.classify(), Classification::TwoOrbit { .. }));
    }
}

#[test]
fn g3_ringings_isomorphism_pattern() {
    let report = three_ringings(&diagram64(3), DEFAULT_CAP).unwrap();
    let fvecs: Vec<String> = report.polytopes.iter().map(|(_, _, p)| p.f_vector().to_string()).collect();
    assert_eq!(fvecs, ["(27, 162, 216, 27+54)", "(54, 162, 162, 27+27)", "(27, 162, 216, 27+54)"]);
    let pairs: Vec<(u8, u8, bool)> = report.pairs.iter().map(|(a, b, iso)| (a.number(), b.number(), *iso)).collect();
    assert_eq!(pairs, [(1, 2, false), (1, 3, true), (2, 3, false)]);
}

#[test]
fn non_crystallographic_input_is_rejected() {
    let d: polywythoff::ttgroup::TailTriangleDiagram = "tail=[3] triangle=(4,inf,inf)".parse().unwrap();
    let lengths = polywythoff::modred::parse_lengths("1,1,2,4").unwrap();
    assert!(rescale(&d, &lengths).is_err());
}
