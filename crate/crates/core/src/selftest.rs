//! The acceptance suite as data: every check produces a row of expected and computed
//! values, grouped by criterion number.

use std::fmt::{self, Display};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amalgam::{ridge_walk, AmalgamContext, AmalgamWord, FaceType, Side};
use crate::fixture::{builtin, dihedral_fixture, StringFixture, TailTriangleFixture, BUILTIN};
use crate::group::{element_order, ElementOrder, FiniteGroup, GroupElement, Perm, DEFAULT_CAP};
use crate::modred::{is_crystallographic, parse_lengths, rescale, three_ringings, IntegralReflectionSystem, Ringing};
use crate::poset::{poset_isomorphic, FaceKind, FacePoset};
use crate::reference;
use crate::ttgroup::{CheckMethod, TailTriangleDiagram, TailTriangleGroup, TtError};
use crate::wythoff::{analyse, build_polytope, Classification, SemiregularPolytope};

/// One verified quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestOptions {
    /// Skip rows over primes `p ≥ 5` and balls of radius above 6.
    pub quick: bool,
    /// Add the expensive rows (larger primes).
    pub large: bool,
    pub cap: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { quick: false, large: false, cap: DEFAULT_CAP }
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "tomotope"),
    (2, "{6,6} polyhedron with group of order 240"),
    (3, "B3 digon example"),
    (4, "polygons from dihedral groups"),
    (5, "D4 diagram ringings"),
    (6, "reduction of the (4,inf,2) diagram with lengths 1,1,2,4"),
    (7, "other ringings at p = 3"),
    (8, "amalgamated free products"),
    (9, "reduced versus full intersection check"),
    (10, "crystallographic criterion"),
];

struct Rows {
    criterion: u8,
    rows: Vec<Check>,
}

impl Rows {
    fn check(&mut self, name: impl Into<String>, expected: impl Display, computed: impl Display) {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        let passed = expected == computed;
        self.rows.push(Check { criterion: self.criterion, name: name.into(), expected, computed, passed });
    }

    fn truth(&mut self, name: impl Into<String>, holds: bool) {
        self.check(name, "yes", yes(holds));
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

trait Context<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T, E: Display> Context<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

type Step = Result<(), String>;

/// Runs one criterion; a pipeline error becomes a failing row.
pub fn criterion(number: u8, opts: &SelftestOptions) -> Vec<Check> {
    let mut rows = Rows { criterion: number, rows: Vec::new() };
    let outcome = match number {
        1 => tomotope(&mut rows),
        2 => hexagonal_pair(&mut rows),
        3 => digon_example(&mut rows),
        4 => polygons(&mut rows),
        5 => d4_ringings(&mut rows, opts),
        6 => diagram_64(&mut rows, opts),
        7 => other_ringings(&mut rows, opts),
        8 => amalgams(&mut rows, opts),
        9 => reduced_check(&mut rows, opts),
        10 => crystallographic(&mut rows),
        _ => Err(format!("there is no criterion {number}")),
    };
    if let Err(e) = outcome {
        rows.check("pipeline completes", "ok", format!("error: {e}"));
    }
    rows.rows
}

pub fn run(opts: &SelftestOptions) -> Vec<Check> {
    CRITERIA.iter().flat_map(|&(n, _)| criterion(n, opts)).collect()
}

/// Whether every row of a criterion passed.
pub fn criterion_passed(checks: &[Check], number: u8) -> bool {
    checks.iter().filter(|c| c.criterion == number).all(|c| c.passed)
}

/// Fixed-width table of all rows.
pub fn render_table(checks: &[Check]) -> String {
    let width = |f: fn(&Check) -> &str, title: &str| {
        checks.iter().map(|c| f(c).chars().count()).chain([title.len()]).max().unwrap_or(0)
    };
    let (wn, we) = (width(|c| &c.name, "check"), width(|c| &c.expected, "expected"));
    let mut out = format!("{:>2}  {:<wn$}  {:<we$}  {}  {}\n", "#", "check", "expected", "computed", "");
    for c in checks {
        out.push_str(&format!(
            "{:>2}  {:<wn$}  {:<we$}  {}  {}\n",
            c.criterion,
            c.name,
            c.expected,
            c.computed,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    out
}

impl Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: expected {}, computed {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.computed
        )
    }
}

fn load_tt(name: &str) -> Result<TailTriangleGroup, String> {
    let text = builtin(name).ok_or_else(|| format!("no fixture {name}"))?;
    TailTriangleFixture::parse(text).ctx(name)?.to_group(DEFAULT_CAP).ctx(name)
}

fn string_gens(name: &str) -> Result<Vec<GroupElement>, String> {
    let text = builtin(name).ok_or_else(|| format!("no fixture {name}"))?;
    Ok(StringFixture::parse(text).ctx(name)?.generators())
}

fn aut_order(c: &Classification) -> usize {
    match c {
        Classification::Regular { aut_order, .. } | Classification::TwoOrbit { aut_order } => *aut_order,
    }
}

fn facets_of(poly: &SemiregularPolytope, kind: FaceKind) -> Vec<usize> {
    poly.faces_of_rank(poly.n() as i32).iter().copied().filter(|&f| poly.face(f).kind == kind).collect()
}

fn iso(a: &FacePoset, b: &FacePoset) -> bool {
    poset_isomorphic(a, b).is_some()
}

fn counts(p: &FacePoset) -> String {
    let c: Vec<String> = p.f_vector().counts.iter().map(|x| x.to_string()).collect();
    format!("({})", c.join(", "))
}

/// Sorted set of polygon sizes among the facets of a polyhedron, as `{a},{b}`.
fn facet_polygons(poly: &SemiregularPolytope) -> Result<String, String> {
    let mut sizes = Vec::new();
    for kind in [FaceKind::FacetP, FaceKind::FacetQ] {
        for f in facets_of(poly, kind) {
            sizes.push(poly.facet_section(f).ctx("facet")?.faces_of_rank(0).len());
        }
    }
    sizes.sort_unstable();
    sizes.dedup();
    Ok(sizes.iter().map(|s| format!("{{{s}}}")).collect::<Vec<_>>().join(","))
}

fn tomotope(rows: &mut Rows) -> Step {
    let g = load_tt("tomotope.tt")?;
    rows.check("group order", 96, g.order());
    let full = g.check_intersection_full().ctx("full check")?.passed();
    let reduced = g.check_intersection_reduced().ctx("reduced check")?.passed();
    rows.truth("full intersection check passes", full);
    rows.truth("reduced intersection check passes", reduced);
    rows.truth("the two checks agree", full == reduced);
    let c = g.certify(CheckMethod::Both).ctx("certify")?;
    let poly = build_polytope(&c).ctx("build")?;
    let report = analyse(&c, &poly).ctx("analyse")?;
    rows.check("f-vector", "(4, 12, 16, 4+4)", &report.f_vector);
    rows.check("flags", 192, report.flags);
    rows.check(
        "edge 2-sections",
        "4-gons alternating P/Q",
        format!(
            "{}-gons {}",
            report.two_section_size.map_or("mixed".to_string(), |s| s.to_string()),
            if report.two_sections_alternate { "alternating P/Q" } else { "not alternating" }
        ),
    );
    let tetra = reference::simplex(3);
    let hemi = reference::hemi_octahedron();
    let all = |kind, model: &FacePoset| -> Result<bool, String> {
        for f in facets_of(&poly, kind) {
            if !iso(&poly.facet_section(f).ctx("facet")?, model) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    rows.truth("P facets are tetrahedra", all(FaceKind::FacetP, &tetra)?);
    rows.truth("Q facets are hemi-octahedra", all(FaceKind::FacetQ, &hemi)?);
    rows.check("classification", "TwoOrbit", &report.classification);
    rows.check("automorphism group order", 96, aut_order(&report.classification));
    Ok(())
}

fn hexagonal_pair(rows: &mut Rows) -> Step {
    let g = load_tt("m66_240a.tt")?;
    rows.check("group order", 240, g.order());
    let c = g.certify(CheckMethod::Both).ctx("certify")?;
    let poly = build_polytope(&c).ctx("build")?;
    let report = analyse(&c, &poly).ctx("analyse")?;
    rows.truth("polytope axioms hold", poly.verify().is_ok());
    rows.check("flags", 480, report.flags);
    rows.check("facet types", "{6}", facet_polygons(&poly)?);
    let split = report.f_vector.facet_split.map_or("none".to_string(), |(p, q)| format!("{p}+{q}"));
    rows.check("hexagons of each kind", "20+20", split);
    rows.check("classification", "TwoOrbit", &report.classification);
    Ok(())
}

fn digon_example(rows: &mut Rows) -> Step {
    let g = load_tt("b3_digon.tt")?;
    rows.check("group order", 48, g.order());
    // face counts from subgroup indices
    let index = |set| -> Result<String, String> { Ok((g.order() / g.subgroup(set).ctx("subgroup")?.order()).to_string()) };
    let mut expected = (0..g.n() - 1).map(|j| index(g.face_set(j))).collect::<Result<Vec<_>, _>>()?;
    expected.push(index(g.ridge_set())?);
    expected.push(format!("{}+{}", index(g.facet_p_set())?, index(g.facet_q_set())?));
    let expected = format!("({})", expected.join(", "));
    let c = g.certify(CheckMethod::Both).ctx("certify")?;
    let poly = build_polytope(&c).ctx("build")?;
    let report = analyse(&c, &poly).ctx("analyse")?;
    rows.check("2-face types", "{2},{4}", facet_polygons(&poly)?);
    let hexagon = reference::polygon(6);
    let mut all = true;
    for &v in poly.faces_of_rank(0) {
        all &= iso(&poly.vertex_figure(v).ctx("vertex figure")?, &hexagon);
    }
    rows.truth("every vertex figure is a hexagon", all);
    rows.check("2-sections over vertices", 6, report.two_section_size.unwrap_or(0));
    rows.check("f-vector equals |Γ|/|Γ_j|", expected, &report.f_vector);
    Ok(())
}

fn polygons(rows: &mut Rows) -> Step {
    for k in 2..=5usize {
        let g = dihedral_fixture(k).to_group(DEFAULT_CAP).ctx("dihedral")?;
        let c = g.certify(CheckMethod::Full).ctx("certify")?;
        let poly = build_polytope(&c).ctx("build")?;
        rows.check(format!("k={k}: f-vector"), format!("({}, {k}+{k})", 2 * k), poly.f_vector());
        rows.truth(format!("k={k}: diamond and connectivity"), poly.verify().is_ok());
        rows.truth(format!("k={k}: isomorphic to the {}-gon", 2 * k), iso(poly.poset(), &reference::polygon(2 * k)));
    }
    Ok(())
}

fn system(diagram: &str, lengths: &str) -> Result<IntegralReflectionSystem, String> {
    let d: TailTriangleDiagram = diagram.parse().ctx("diagram")?;
    rescale(&d, &parse_lengths(lengths).ctx("lengths")?).ctx("rescale")
}

fn d4_ringings(rows: &mut Rows, opts: &SelftestOptions) -> Step {
    let sys = system("tail=[3] triangle=(3,3,2)", "1,1,1,1")?;
    let primes: &[u32] = if opts.quick { &[3] } else { &[3, 5] };
    let cube = reference::cube(4);
    let cross = reference::cross_polytope(4);
    for &p in primes {
        let spec = sys.reduce_mod_p(p).ctx("reduce")?;
        let rr = three_ringings(&spec, opts.cap).ctx("ringings")?;
        rows.truth(format!("p={p}: ringings pairwise isomorphic"), rr.pairs.iter().all(|x| x.2));
        rows.truth(
            format!("p={p}: every ringing regular"),
            rr.polytopes.iter().all(|(_, _, poly)| poly.classify().is_regular()),
        );
        let (_, _, poly) = &rr.polytopes[0];
        rows.check(format!("p={p}: f-vector"), "(16, 32, 24, 4+4)", poly.f_vector());
        rows.check(format!("p={p}: automorphism group order"), 384, aut_order(&poly.classify()));
        rows.truth(format!("p={p}: isomorphic to brute-force 4-cube"), iso(poly.poset(), &cube));
        rows.truth(format!("p={p}: isomorphic to brute-force 16-cell"), iso(poly.poset(), &cross));
    }
    Ok(())
}

fn diagram_64(rows: &mut Rows, opts: &SelftestOptions) -> Step {
    let sys = system("tail=[3] triangle=(4,inf,2)", "1,1,2,4")?;
    let g2 = sys.reduce_mod_p(2).ctx("reduce")?;
    rows.check("p=2: group order", 96, g2.to_group(opts.cap).ctx("group")?.order());
    let c = g2.certify_ringing(Ringing::First, opts.cap).ctx("certify")?;
    let poly = build_polytope(&c).ctx("build")?;
    let report = analyse(&c, &poly).ctx("analyse")?;
    rows.check("p=2: classification", "Regular", &report.classification);
    rows.check("p=2: vertices", 3, poly.faces_of_rank(0).len());
    rows.check("p=2: flags", 192, report.flags);
    let gens = g2.generators();
    let r1s2 = GroupElement::Mat(gens[1].clone()).compose(&GroupElement::Mat(gens[3].clone())).ctx("product")?;
    let period = match element_order(&r1s2, 1 << 16) {
        ElementOrder::Finite(m) => m.to_string(),
        ElementOrder::Unbounded => "unbounded".into(),
    };
    rows.check("p=2: period of r1 s2", 4, period);
    let vf = poly.vertex_figure(poly.faces_of_rank(0)[0]).ctx("vertex figure")?;
    let flat = reference::square_torus(2, 0);
    rows.check("p=2: vertex-figure f-vector vs brute-force {4,4}_(2,0)", counts(&flat), counts(&vf));
    rows.truth("p=2: vertex figure isomorphic to {4,4}_(2,0)", iso(&vf, &flat));
    rows.truth("p=2: vertex figure isomorphic to {4,4}_(2,2)", iso(&vf, &reference::square_torus(2, 2)));
    let g3 = sys.reduce_mod_p(3).ctx("reduce")?;
    rows.check("p=3: group order", 1296, g3.to_group(opts.cap).ctx("group")?.order());
    let disc = match g3.discriminant() {
        Some(0) => "0 (singular)".to_string(),
        Some(d) => d.to_string(),
        None => "undefined".into(),
    };
    rows.check("p=3: discriminant mod 3", "0 (singular)", disc);
    rows.truth("p=3: reduced form is degenerate", g3.is_singular());
    Ok(())
}

fn other_ringings(rows: &mut Rows, opts: &SelftestOptions) -> Step {
    let sys = system("tail=[3] triangle=(4,inf,2)", "1,1,2,4")?;
    let g3 = sys.reduce_mod_p(3).ctx("reduce")?;
    let c = g3.certify_ringing(Ringing::Third, opts.cap).ctx("certify third ringing")?;
    let poly = build_polytope(&c).ctx("build")?;
    let (tetra, octa) = (reference::simplex(3), reference::cross_polytope(3));
    let (mut t, mut o, mut other) = (0, 0, 0);
    for kind in [FaceKind::FacetP, FaceKind::FacetQ] {
        for f in facets_of(&poly, kind) {
            let s = poly.facet_section(f).ctx("facet")?;
            match s.faces_of_rank(0).len() {
                4 if iso(&s, &tetra) => t += 1,
                6 if iso(&s, &octa) => o += 1,
                _ => other += 1,
            }
        }
    }
    rows.check(
        "third ringing: facets",
        "54 tetrahedra + 27 octahedra",
        format!("{t} tetrahedra + {o} octahedra{}", if other > 0 { format!(" + {other} other") } else { String::new() }),
    );
    let c = g3.certify_ringing(Ringing::Second, opts.cap).ctx("certify second ringing")?;
    let poly = build_polytope(&c).ctx("build")?;
    rows.check("second ringing: classification", "Regular", poly.classify());
    rows.truth("second ringing: isomorphic to brute-force {4,3,4}_(3,3,0)", iso(poly.poset(), &reference::cubic_torus_ss0(3)));
    if opts.large && !opts.quick {
        let g5 = sys.reduce_mod_p(5).ctx("reduce")?;
        for r in Ringing::ALL {
            let c = g5.certify_ringing(r, opts.cap).ctx("certify at p=5")?;
            let poly = build_polytope(&c).ctx("build")?;
            rows.truth(format!("p=5: ringing {} satisfies the polytope axioms", r.number()), poly.verify().is_ok());
        }
    }
    Ok(())
}

fn random_letters(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..=n)).collect()
}

fn evaluate(images: &[GroupElement], letters: &[usize]) -> Result<GroupElement, String> {
    let mut x = images[0].identity_like();
    for &l in letters {
        x = x.compose(&images[l]).ctx("evaluate")?;
    }
    Ok(x)
}

fn amalgams(rows: &mut Rows, opts: &SelftestOptions) -> Step {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a11a);
    let tetra = string_gens("tetrahedron.sc")?;
    let hemi = string_gens("hemioctahedron.sc")?;
    let octa = string_gens("octahedron.sc")?;
    let tomo = load_tt("tomotope.tt")?;
    let images = tomo.generators().to_vec();
    let c = AmalgamContext::new(&tetra, &hemi, opts.cap).ctx("context")?;
    let n = c.n();

    // inserting trivial subwords (v·reverse(v), relators of either factor) never changes the form
    let relators: [&[usize]; 4] =
        [&[0, 1, 0, 1, 0, 1], &[1, 2, 1, 2, 1, 2], &[1, 3, 1, 3, 1, 3, 1, 3], &[0, 1, 3, 0, 1, 3, 0, 1, 3]];
    let (mut unique, mut idempotent, mut consistent) = (true, true, true);
    for _ in 0..10_000 {
        let a = random_letters(&mut rng, n, 24);
        let w = c.normalize(&a).ctx("normalize")?;
        let mut b = a.clone();
        let at = rng.gen_range(0..=b.len());
        let mut insert = random_letters(&mut rng, n, 6);
        let back: Vec<usize> = insert.iter().rev().copied().collect();
        insert.extend(back);
        if rng.gen_bool(0.5) {
            insert.extend_from_slice(relators.choose(&mut rng).expect("nonempty"));
        }
        b.splice(at..at, insert);
        unique &= c.normalize(&b).ctx("normalize")? == w;
        idempotent &= c.normalize(&c.letters(&w).ctx("letters")?).ctx("normalize")? == w;
        consistent &= evaluate(&images, &c.letters(&w).ctx("letters")?)? == evaluate(&images, &a)?;
    }
    rows.truth("10^4 words: equal elements give equal normal forms", unique);
    rows.truth("10^4 words: normalization is idempotent", idempotent);
    rows.truth("10^4 words: normal forms agree in the tomotope quotient", consistent);

    let c2 = AmalgamContext::new(&tetra, &octa, opts.cap).ctx("context")?;
    let mut homomorphic = true;
    for (side, gens) in [(Side::P, &tetra), (Side::Q, &octa)] {
        let g = FiniteGroup::closure(gens, opts.cap).ctx("closure")?;
        for _ in 0..500 {
            let x = g.element(rng.gen_range(0..g.order()));
            let y = g.element(rng.gen_range(0..g.order()));
            let lhs = c2.multiply(&c2.embed(side, x).ctx("embed")?, &c2.embed(side, y).ctx("embed")?).ctx("multiply")?;
            let rhs = c2.embed(side, &x.compose(y).ctx("compose")?).ctx("embed")?;
            homomorphic &= lhs == rhs;
        }
    }
    rows.truth("10^3 pairs: facet groups embed homomorphically", homomorphic);

    let images_p: Vec<AmalgamWord> = FiniteGroup::closure(&tetra, opts.cap)
        .ctx("closure")?
        .elements()
        .iter()
        .map(|x| c2.embed(Side::P, x))
        .collect::<Result<_, _>>()
        .ctx("embed")?;
    let images_q: Vec<AmalgamWord> = FiniteGroup::closure(&octa, opts.cap)
        .ctx("closure")?
        .elements()
        .iter()
        .map(|x| c2.embed(Side::Q, x))
        .collect::<Result<_, _>>()
        .ctx("embed")?;
    let common = images_p.iter().filter(|w| images_q.contains(w)).count();
    rows.check("Γ(P) ∩ Γ(Q) has the order of Γ(K)", c2.shared_order(), common);
    let mut membership = true;
    for _ in 0..1000 {
        let w = c2.normalize(&random_letters(&mut rng, n, 16)).ctx("normalize")?;
        let both = c2.in_face_group(&w, FaceType::Facet(Side::P)).ctx("member")?
            && c2.in_face_group(&w, FaceType::Facet(Side::Q)).ctx("member")?;
        membership &= both == c2.in_face_group(&w, FaceType::Ridge).ctx("member")?;
    }
    rows.truth("word-level Γ(P) ∩ Γ(Q) = Γ(K)", membership);

    let nontrivial = (1..=50).all(|m| {
        let w = c2.dihedral_power(m);
        !w.is_identity() && w.len() == 2 * m
    });
    rows.truth("(α_{n-1}β)^m ≠ 1 for m ≤ 50", nontrivial);

    let radius = if opts.quick { 6 } else { 12 };
    let tri = string_gens("triangle.sc")?;
    let c3 = AmalgamContext::new(&tri, &tri, opts.cap).ctx("context")?;
    let mut nested = true;
    let mut previous = c3.ball(0);
    for r in 1..=radius {
        let ball = c3.ball(r);
        for key in previous.keys() {
            let (Some(old), Some(new)) = (previous.face_id(key), ball.face_id(key)) else {
                nested = false;
                continue;
            };
            for &lo in previous.poset.down(old) {
                if let Some(k) = previous.keys().get(lo.wrapping_sub(1)) {
                    nested &= ball.face_id(k).is_some_and(|l| ball.poset.is_cover(l, new));
                }
            }
        }
        previous = ball;
    }
    rows.truth(format!("balls nested up to radius {radius}"), nested);
    let mut walks = true;
    for ctx in [&c, &c2, &c3] {
        for r in 0..=radius {
            let walk = ridge_walk(ctx, r);
            walks &= walk.open && walk.alternating && walk.ridges == 2 * r + 1;
        }
    }
    rows.truth(format!("ridge sections open with P/Q alternation up to radius {radius}"), walks);

    let same = AmalgamContext::new(&tetra, &tetra, opts.cap).ctx("context")?;
    let class = |regular: bool| if regular { "Regular" } else { "TwoOrbit" };
    rows.check("({3,3},{3,3})", "Regular", class(same.universal_is_regular()));
    rows.check("({3,3},{3,4})", "TwoOrbit", class(c2.universal_is_regular()));
    Ok(())
}

/// Every non-identity involution on `degree` points.
fn involutions(degree: usize) -> Vec<Perm> {
    fn extend(images: &mut Vec<u32>, next: usize, out: &mut Vec<Perm>) {
        let d = images.len();
        let Some(i) = (next..d).find(|&i| images[i] == 0) else {
            if images.iter().enumerate().any(|(i, &x)| x as usize != i + 1) {
                out.push(Perm::from_images(images).expect("involution"));
            }
            return;
        };
        images[i] = i as u32 + 1;
        extend(images, i + 1, out);
        for j in i + 1..d {
            if images[j] == 0 {
                images[i] = j as u32 + 1;
                images[j] = i as u32 + 1;
                extend(images, i + 1, out);
                images[j] = 0;
            }
        }
        images[i] = 0;
    }
    let mut out = Vec::new();
    extend(&mut vec![0; degree], 0, &mut out);
    out
}

/// `(full passes, reduced passes)`; a failed precondition of the reduced check counts as failure.
fn both_checks(g: &TailTriangleGroup) -> Result<(bool, bool), String> {
    let full = g.check_intersection_full().ctx("full")?.passed();
    let reduced = match g.check_intersection_reduced() {
        Ok(o) => o.passed(),
        Err(TtError::PreconditionFailed { .. }) => false,
        Err(e) => return Err(format!("reduced: {e}")),
    };
    Ok((full, reduced))
}

/// Random tail-triangle quotients: involutions on at most 7 points with the forced commutations.
pub fn random_quotients(seed: u64, count: usize, cap: usize) -> Vec<TailTriangleGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=3usize);
        let inv = involutions(rng.gen_range(4..=7));
        let pick = |rng: &mut ChaCha8Rng, from: &[Perm]| from.choose(rng).cloned();
        let a0 = pick(&mut rng, &inv).expect("involutions exist");
        let commuting: Vec<Perm> =
            inv.iter().filter(|x| x.compose(&a0).ok() == a0.compose(x).ok()).cloned().collect();
        let mut alphas = vec![a0, pick(&mut rng, &inv).expect("nonempty")];
        let beta = if n == 3 {
            alphas.push(pick(&mut rng, &commuting).expect("a0 commutes with itself"));
            pick(&mut rng, &commuting).expect("nonempty")
        } else {
            pick(&mut rng, &inv).expect("nonempty")
        };
        let alphas = alphas.into_iter().map(GroupElement::Perm).collect();
        if let Ok(g) = TailTriangleGroup::verify(alphas, GroupElement::Perm(beta), cap) {
            out.push(g);
        }
    }
    out
}

fn reduced_check(rows: &mut Rows, opts: &SelftestOptions) -> Step {
    for (name, text) in BUILTIN.iter().filter(|(n, _)| n.ends_with(".tt")) {
        let fixture = TailTriangleFixture::parse(text).ctx(name)?;
        match fixture.to_group(opts.cap) {
            Ok(g) => {
                let (full, reduced) = both_checks(&g)?;
                rows.check(format!("{name}: full / reduced"), format!("{0} / {0}", yes(full)), format!("{} / {}", yes(full), yes(reduced)));
            }
            Err(e) => rows.check(format!("{name}: rejected before the checks"), "CommutationViolation", format!("{e:?}").split('(').next().unwrap_or("")),
        }
    }
    let sys = system("tail=[3] triangle=(4,inf,2)", "1,1,2,4")?;
    for p in [2, 3] {
        let spec = sys.reduce_mod_p(p).ctx("reduce")?;
        for r in Ringing::ALL {
            let g = spec.ringing_group(r, opts.cap).ctx("ringing")?;
            let (full, reduced) = both_checks(&g)?;
            rows.check(
                format!("p={p} ringing {}: full / reduced", r.number()),
                format!("{0} / {0}", yes(full)),
                format!("{} / {}", yes(full), yes(reduced)),
            );
        }
    }
    let quotients = random_quotients(0x0c0ffee, 20, 10_000);
    let (mut agree, mut passes) = (0, 0);
    for g in &quotients {
        let (full, reduced) = both_checks(g)?;
        agree += usize::from(full == reduced);
        passes += usize::from(full);
    }
    rows.check("20 random quotients: checks agree", 20, agree);
    rows.truth("random quotients include C-groups and non-C-groups", passes > 0 && passes < 20);
    Ok(())
}

/// Hand-enumerated diagrams with the expected verdict.
pub const CRYSTALLOGRAPHIC_TABLE: [(&str, bool); 12] = [
    ("tail=[3] triangle=(4,inf,2)", true),
    ("tail=[3] triangle=(3,3,2)", true),
    ("tail=[3] triangle=(3,3,3)", true),
    ("tail=[3] triangle=(4,3,3)", false),
    ("tail=[] triangle=(3,4,3)", false),
    ("tail=[3] triangle=(4,4,3)", true),
    ("tail=[3] triangle=(6,3,3)", false),
    ("tail=[3] triangle=(6,6,3)", true),
    ("tail=[5] triangle=(3,3,2)", false),
    ("tail=[] triangle=(4,6,3)", false),
    ("tail=[4] triangle=(4,inf,inf)", false),
    ("tail=[3] triangle=(8,3,2)", false),
];

fn crystallographic(rows: &mut Rows) -> Step {
    for (text, expected) in CRYSTALLOGRAPHIC_TABLE {
        let d: TailTriangleDiagram = text.parse().ctx(text)?;
        rows.check(text, yes(expected), yes(is_crystallographic(&d).is_ok()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn involution_counts() {
        // 1 + C(d,2) + ... minus the identity: 9 on 4 points, 231 on 7
        assert_eq!(involutions(4).len(), 9);
        assert_eq!(involutions(7).len(), 231);
    }

    #[test]
    fn random_quotients_are_deterministic() {
        let a: Vec<usize> = random_quotients(7, 5, 10_000).iter().map(|g| g.order()).collect();
        let b: Vec<usize> = random_quotients(7, 5, 10_000).iter().map(|g| g.order()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn table_rendering() {
        let checks = criterion(10, &SelftestOptions::default());
        assert_eq!(checks.len(), 12);
        let table = render_table(&checks);
        assert_eq!(table.lines().count(), 13);
        assert!(criterion_passed(&checks, 10));
    }

    #[test]
    fn unknown_criterion_fails() {
        let rows = criterion(11, &SelftestOptions::default());
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].passed);
    }
}
