use polywythoff::fixture::{builtin, ModredFixture, TailTriangleFixture};
use polywythoff::group::DEFAULT_CAP;
use polywythoff::modred::{rescale, Ringing};
use polywythoff::selftest::random_quotients;
use polywythoff::ttgroup::{CheckMethod, TailTriangleGroup, TtError};

fn fixture_group(name: &str) -> TailTriangleGroup {
    TailTriangleFixture::parse(builtin(name).unwrap()).unwrap().to_group(DEFAULT_CAP).unwrap()
}

/// Rank-parameter-3 groups from fixtures, reductions and random quotients.
fn rank_three_groups() -> Vec<TailTriangleGroup> {
    let mut out: Vec<TailTriangleGroup> = ["tomotope.tt", "d4.tt"].into_iter().map(fixture_group).collect();
    for (name, p) in [("diagram64.mr", 2), ("diagram64.mr", 3), ("d4_coxeter.mr", 3)] {
        let fx = ModredFixture::parse(builtin(name).unwrap()).unwrap();
        let spec = rescale(&fx.diagram, &fx.lengths).unwrap().reduce_mod_p(p).unwrap();
        for r in Ringing::ALL {
            out.push(spec.ringing_group(r, DEFAULT_CAP).unwrap());
        }
    }
    out.extend(random_quotients(7, 60, 10_000).into_iter().filter(|g| g.n() == 3));
    out
}

#[test]
fn rank_three_shortcut_agrees_with_the_full_check() {
    let mut compared = 0;
    let mut failing = 0;
    for g in rank_three_groups() {
        let full = g.check_intersection_full().unwrap();
        match g.check_intersection_rank3_shortcut() {
            Ok(short) => {
                assert_eq!(short.passed(), full.passed(), "shortcut disagrees on {}", g.diagram());
                compared += 1;
                failing += usize::from(!full.passed());
            }
            Err(TtError::PreconditionFailed { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(compared >= 15, "only {compared} groups met the preconditions");
    eprintln!("{compared} groups compared, {failing} failing the intersection condition");
}

#[test]
fn reduced_and_full_checks_agree() {
    for g in rank_three_groups() {
        let full = g.check_intersection_full().unwrap();
        if let Ok(reduced) = g.check_intersection_reduced() {
            assert_eq!(reduced.passed(), full.passed(), "{}", g.diagram());
        }
    }
}

#[test]
fn failed_relations_name_the_generators() {
    let err = TailTriangleFixture::parse(builtin("bad_commutation.tt").unwrap()).unwrap().to_group(DEFAULT_CAP).unwrap_err();
    assert!(matches!(err, TtError::CommutationViolation(..)));
    assert!(err.to_string().contains("must commute"));
}

#[test]
fn certification_methods_agree_on_fixtures() {
    for name in ["tomotope.tt", "m66_240a.tt", "b3_digon.tt", "d4.tt"] {
        let orders: Vec<usize> = [CheckMethod::Full, CheckMethod::Reduced, CheckMethod::Both]
            .into_iter()
            .map(|m| fixture_group(name).certify(m).unwrap().order())
            .collect();
        assert!(orders.windows(2).all(|w| w[0] == w[1]), "{name}");
    }
}
