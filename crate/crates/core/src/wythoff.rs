//! The coset construction of the alternating semiregular polytope of a tail-triangle
//! C-group, plus the checks that tie its sections and flags back to the group.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::Serialize;

use crate::group::{Cosets, FiniteGroup, GroupElement, GroupError};
use crate::poset::{self, Defect, FaceKind, FacePoset, FaceRep, FlagGraph};
use crate::ttgroup::{CheckMethod, Label, TailTriangleCGroup, TtError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WythoffError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    TailTriangle(#[from] TtError),
    #[error("face {face} has rank {found}, expected {expected}")]
    RankMismatch { face: usize, expected: i32, found: i32 },
    #[error("poset is not a polytope: {0}")]
    NotPolytope(#[from] Defect),
}

/// One family of coset faces: all right cosets of `subgroup`, at `rank`.
struct Layer {
    rank: i32,
    kind: FaceKind,
    subgroup: FiniteGroup,
}

/// Faces of a coset poset, remembered per layer so the group action can be replayed.
#[derive(Debug, Clone)]
struct CosetIndex {
    cosets: Vec<Cosets>,
    /// `ids[layer][coset]` is the face id.
    ids: Vec<Vec<usize>>,
    /// `(layer, coset)` of each proper face.
    origin: Vec<Option<(usize, u32)>>,
}

/// Builds the poset whose proper faces are the right cosets of each layer, with
/// covers between cosets of consecutive ranks that share an element.
fn coset_poset(group: &FiniteGroup, top_rank: i32, layers: &[Layer]) -> Result<(FacePoset, CosetIndex), GroupError> {
    let positions = group.sorted_positions();
    let cosets = layers
        .iter()
        .map(|l| group.right_cosets_with(&l.subgroup, &positions))
        .collect::<Result<Vec<_>, _>>()?;
    let mut poset = FacePoset::new(top_rank);
    let mut origin = vec![None];
    let bottom = poset.add_face(-1, FaceKind::Bottom, FaceRep::None);
    let mut ids = vec![Vec::new(); layers.len()];
    let mut order: Vec<usize> = (0..layers.len()).collect();
    order.sort_by_key(|&l| (layers[l].rank, layers[l].kind));
    for &l in &order {
        for (c, &rep) in cosets[l].reps.iter().enumerate() {
            let rep = FaceRep::Element(group.element(rep as usize).clone());
            ids[l].push(poset.add_face(layers[l].rank, layers[l].kind, rep));
            origin.push(Some((l, c as u32)));
        }
    }
    let top = poset.add_face(top_rank, FaceKind::Top(top_rank as usize), FaceRep::None);
    origin.push(None);
    let mut pairs = Vec::new();
    for a in 0..layers.len() {
        for b in 0..layers.len() {
            if layers[b].rank == layers[a].rank + 1 {
                pairs.push((a, b));
            }
        }
    }
    for x in 0..group.order() {
        for &(a, b) in &pairs {
            poset.add_cover(ids[a][cosets[a].coset_of[x] as usize], ids[b][cosets[b].coset_of[x] as usize]);
        }
    }
    for (l, layer) in layers.iter().enumerate() {
        if layer.rank == 0 {
            for &f in &ids[l] {
                poset.add_cover(bottom, f);
            }
        }
        if layer.rank == top_rank - 1 {
            for &f in &ids[l] {
                poset.add_cover(f, top);
            }
        }
    }
    poset.finish();
    Ok((poset, CosetIndex { cosets, ids, origin }))
}

/// The regular polytope of a string C-group `⟨ρ_0..ρ_{d-1}⟩`: `j`-faces are the
/// right cosets of the subgroup generated by every `ρ_i` except `ρ_j`.
pub fn build_regular(gens: &[GroupElement], cap: usize) -> Result<FacePoset, GroupError> {
    let group = FiniteGroup::closure(gens, cap)?;
    let d = gens.len();
    let layers = (0..d)
        .map(|j| {
            let others: Vec<GroupElement> =
                gens.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, g)| g.clone()).collect();
            Ok(Layer { rank: j as i32, kind: FaceKind::Sub(j), subgroup: group.subgroup(&others)? })
        })
        .collect::<Result<Vec<_>, GroupError>>()?;
    Ok(coset_poset(&group, d as i32, &layers)?.0)
}

/// The polytope built from a certified tail-triangle C-group.
#[derive(Debug, Clone)]
pub struct SemiregularPolytope {
    poset: FacePoset,
    index: CosetIndex,
    group: Arc<FiniteGroup>,
    gens: Vec<GroupElement>,
    n: usize,
    schlafli_tail: Vec<Label>,
    k: u32,
}

/// Constructs the faces of every rank as cosets and records covering incidences.
///
/// Facet cosets of `Γ_n^P` and `Γ_n^Q` live in separate layers and are never
/// compared with each other, so they stay distinct and unrelated.
pub fn build_polytope(g: &TailTriangleCGroup) -> Result<SemiregularPolytope, WythoffError> {
    let n = g.n();
    let mut layers = Vec::with_capacity(n + 2);
    for j in 0..n {
        layers.push(Layer { rank: j as i32, kind: FaceKind::Sub(j), subgroup: g.subgroup(g.face_set(j))? });
    }
    layers.push(Layer { rank: n as i32, kind: FaceKind::FacetP, subgroup: g.subgroup(g.facet_p_set())? });
    layers.push(Layer { rank: n as i32, kind: FaceKind::FacetQ, subgroup: g.subgroup(g.facet_q_set())? });
    let group = g.shared_group();
    let (poset, index) = coset_poset(&group, n as i32 + 1, &layers)?;
    let diagram = g.diagram();
    let schlafli_tail = (1..n).map(|i| diagram.label(i - 1, i)).collect();
    let k = diagram.k().finite().expect("finite groups have finite labels");
    Ok(SemiregularPolytope { poset, index, group, gens: g.generators().to_vec(), n, schlafli_tail, k })
}

impl Deref for SemiregularPolytope {
    type Target = FacePoset;
    fn deref(&self) -> &FacePoset {
        &self.poset
    }
}

/// Result of walking one co-rank-2 section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSection {
    /// The `(n-2)`-face at the bottom of the section.
    pub face: usize,
    /// Number of facets around it.
    pub size: usize,
    /// Facets form one cycle with `P` and `Q` kinds alternating.
    pub alternating: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Classification {
    Regular { aut_order: usize, schlafli: Vec<String> },
    TwoOrbit { aut_order: usize },
}

impl Classification {
    pub fn is_regular(&self) -> bool {
        matches!(self, Classification::Regular { .. })
    }

    pub fn aut_order(&self) -> usize {
        match self {
            Classification::Regular { aut_order, .. } | Classification::TwoOrbit { aut_order } => *aut_order,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_regular() { "Regular" } else { "TwoOrbit" })
    }
}

/// Flag count and orbit structure under the right action of the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlagOrbits {
    pub flags: usize,
    pub orbit_sizes: Vec<usize>,
}

impl FlagOrbits {
    pub fn orbits(&self) -> usize {
        self.orbit_sizes.len()
    }
}

impl SemiregularPolytope {
    pub fn poset(&self) -> &FacePoset {
        &self.poset
    }

    pub fn into_poset(self) -> FacePoset {
        self.poset
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Order of `α_{n-1}β`.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Runs axioms A, B and C.
    pub fn verify(&self) -> Result<(), Defect> {
        poset::verify_axiom_a(&self.poset)?;
        poset::verify_diamond(&self.poset)?;
        poset::verify_strong_connectivity(&self.poset)
    }

    /// Face permutation induced by right multiplication with `g`.
    fn face_action(&self, g: &GroupElement) -> Result<Vec<usize>, GroupError> {
        let rmul = self.group.right_multiplication(g)?;
        Ok((0..self.poset.len())
            .map(|f| match self.index.origin[f] {
                None => f,
                Some((l, c)) => {
                    let cosets = &self.index.cosets[l];
                    let moved = rmul[cosets.reps[c as usize] as usize];
                    self.index.ids[l][cosets.coset_of[moved as usize] as usize]
                }
            })
            .collect())
    }

    /// Orbits of the group on faces of one rank.
    pub fn face_orbits(&self, rank: i32) -> usize {
        let actions: Vec<Vec<usize>> =
            self.gens.iter().map(|g| self.face_action(g).expect("generators lie in the group")).collect();
        let faces = self.poset.faces_of_rank(rank);
        let mut seen: HashMap<usize, ()> = HashMap::new();
        let mut orbits = 0;
        for &start in faces {
            if seen.insert(start, ()).is_some() {
                continue;
            }
            orbits += 1;
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for act in &actions {
                    if seen.insert(act[f], ()).is_none() {
                        stack.push(act[f]);
                    }
                }
            }
        }
        orbits
    }

    /// Enumerates flags and splits them into orbits under the generators' action.
    pub fn flag_orbits(&self) -> FlagOrbits {
        let flags = self.poset.flags();
        let index: HashMap<&[u32], usize> = flags.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        let actions: Vec<Vec<usize>> =
            self.gens.iter().map(|g| self.face_action(g).expect("generators lie in the group")).collect();
        let mut seen = vec![false; flags.len()];
        let mut orbit_sizes = Vec::new();
        let mut image = Vec::with_capacity(self.n + 1);
        for start in 0..flags.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut size = 0;
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                size += 1;
                for act in &actions {
                    image.clear();
                    image.extend(flags[f].iter().map(|&x| act[x as usize] as u32));
                    let next = index[image.as_slice()];
                    if !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
            orbit_sizes.push(size);
        }
        FlagOrbits { flags: flags.len(), orbit_sizes }
    }

    /// Decides whether swapping `α_{n-1}` and `β` while fixing the other generators
    /// extends to an automorphism of the group.
    pub fn diagram_swap_automorphism(&self) -> Option<Vec<u32>> {
        let n = self.n;
        let tables: Vec<Vec<u32>> = self
            .gens
            .iter()
            .map(|g| self.group.right_multiplication(g).expect("generators lie in the group"))
            .collect();
        let swapped = |i: usize| match i {
            i if i == n => n - 1,
            i if i + 1 == n => n,
            i => i,
        };
        const UNSET: u32 = u32::MAX;
        let mut map = vec![UNSET; self.group.order()];
        map[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let y = map[x] as usize;
            for i in 0..=n {
                let (xi, yi) = (tables[i][x] as usize, tables[swapped(i)][y]);
                if map[xi] == UNSET {
                    map[xi] = yi;
                    queue.push_back(xi);
                } else if map[xi] != yi {
                    return None;
                }
            }
        }
        let mut hit = vec![false; map.len()];
        for &y in &map {
            if std::mem::replace(&mut hit[y as usize], true) {
                return None;
            }
        }
        Some(map)
    }

    pub fn classify(&self) -> Classification {
        let order = self.group.order();
        if self.diagram_swap_automorphism().is_some() {
            let mut schlafli: Vec<String> = self.schlafli_tail.iter().map(Label::to_string).collect();
            schlafli.push((2 * self.k).to_string());
            Classification::Regular { aut_order: 2 * order, schlafli }
        } else {
            Classification::TwoOrbit { aut_order: order }
        }
    }

    /// Walks every section over an `(n-2)`-face.
    pub fn two_sections(&self) -> Vec<TwoSection> {
        let p = &self.poset;
        let mut out = Vec::new();
        for &face in p.faces_of_rank(self.n as i32 - 2) {
            let ridges = p.up(face);
            let in_section = |r: &usize| ridges.binary_search(r).is_ok();
            let mut alternating = ridges.iter().all(|&r| {
                let kinds: Vec<FaceKind> = p.up(r).iter().map(|&f| p.face(f).kind).collect();
                kinds.len() == 2 && kinds.contains(&FaceKind::FacetP) && kinds.contains(&FaceKind::FacetQ)
            });
            let mut facets: Vec<usize> = ridges.iter().flat_map(|&r| p.up(r).iter().copied()).collect();
            facets.sort_unstable();
            facets.dedup();
            if alternating && !ridges.is_empty() {
                // walk ridge -> facet -> other ridge and count the cycle through ridges[0]
                let (start, mut ridge) = (ridges[0], ridges[0]);
                let mut facet = p.up(ridge)[0];
                let mut steps = 0;
                loop {
                    steps += 1;
                    let sides: Vec<usize> = p.down(facet).iter().copied().filter(in_section).collect();
                    let [a, b] = sides[..] else {
                        alternating = false;
                        break;
                    };
                    ridge = if a == ridge { b } else { a };
                    if ridge == start {
                        break;
                    }
                    let ups = p.up(ridge);
                    facet = if ups[0] == facet { ups[1] } else { ups[0] };
                }
                alternating &= steps == facets.len();
            }
            out.push(TwoSection { face, size: facets.len(), alternating });
        }
        out
    }

    fn expect_rank(&self, face: usize, expected: i32) -> Result<(), WythoffError> {
        let found = self.poset.face(face).rank;
        if found == expected {
            Ok(())
        } else {
            Err(WythoffError::RankMismatch { face, expected, found })
        }
    }

    /// The section above a vertex.
    pub fn vertex_figure(&self, vertex: usize) -> Result<FacePoset, WythoffError> {
        self.expect_rank(vertex, 0)?;
        Ok(self.poset.section(vertex, self.poset.top().expect("built posets have a top")).0)
    }

    /// The section below a facet.
    pub fn facet_section(&self, facet: usize) -> Result<FacePoset, WythoffError> {
        self.expect_rank(facet, self.n as i32)?;
        Ok(self.poset.section(self.poset.bottom().expect("built posets have a bottom"), facet).0)
    }

    /// Text export with a closing summary line.
    pub fn export(&self) -> String {
        let mut s = self.poset.export();
        s.push_str(&self.summary_line());
        s.push('\n');
        s
    }

    pub fn summary_line(&self) -> String {
        let orbits = self.flag_orbits();
        format!(
            "fvec = {} flags={} orbits={} class={}",
            self.poset.f_vector(),
            orbits.flags,
            orbits.orbits(),
            self.classify()
        )
    }
}

/// The model vertex figure: the polytope of `Γ_0 = ⟨α_1..α_{n-1}, β⟩` with the ring
/// moved to `α_1`; for `n = 1` a single edge.
pub fn vertex_figure_model(g: &TailTriangleCGroup) -> Result<FacePoset, WythoffError> {
    if g.n() == 1 {
        return Ok(crate::reference::segment());
    }
    let base = g.vertex_figure_group()?.certify(CheckMethod::Full)?;
    Ok(build_polytope(&base)?.into_poset())
}

/// Which facet family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetKind {
    P,
    Q,
}

/// The regular polytope of `Γ_n^P` or `Γ_n^Q`, built as a string C-group.
pub fn facet_model(g: &TailTriangleCGroup, kind: FacetKind) -> Result<FacePoset, WythoffError> {
    let set = match kind {
        FacetKind::P => g.facet_p_set(),
        FacetKind::Q => g.facet_q_set(),
    };
    Ok(build_regular(&g.elements_of(set), g.cap())?)
}

/// A polytope checked end to end: axioms, two-sections, sections against their
/// models, flag orbits and classification.
#[derive(Debug, Clone, Serialize)]
pub struct PolytopeReport {
    pub f_vector: poset::FVector,
    pub flags: usize,
    pub orbits: usize,
    pub two_section_size: Option<usize>,
    pub two_sections_alternate: bool,
    pub vertex_figure_matches: bool,
    pub facets_match: bool,
    pub vertex_transitive: bool,
    pub classification: Classification,
}

/// Verifies the polytope axioms and every structural claim tying sections to the group.
pub fn analyse(g: &TailTriangleCGroup, poly: &SemiregularPolytope) -> Result<PolytopeReport, WythoffError> {
    poly.verify()?;
    let sections = poly.two_sections();
    let two_section_size = match sections.first() {
        Some(s) if sections.iter().all(|t| t.size == s.size) => Some(s.size),
        _ => None,
    };
    let two_sections_alternate = sections.iter().all(|s| s.alternating);
    let vertex = poly.faces_of_rank(0)[0];
    let vf = poly.vertex_figure(vertex)?;
    let vertex_figure_matches = poset::poset_isomorphic(&vf, &vertex_figure_model(g)?).is_some();
    let p_model = facet_model(g, FacetKind::P)?;
    let q_model = facet_model(g, FacetKind::Q)?;
    let mut facets_match = true;
    for &f in poly.faces_of_rank(g.n() as i32) {
        let model = if poly.face(f).kind == FaceKind::FacetP { &p_model } else { &q_model };
        facets_match &= poset::poset_isomorphic(&poly.facet_section(f)?, model).is_some();
    }
    let orbits = poly.flag_orbits();
    Ok(PolytopeReport {
        f_vector: poly.f_vector(),
        flags: orbits.flags,
        orbits: orbits.orbits(),
        two_section_size,
        two_sections_alternate,
        vertex_figure_matches,
        facets_match,
        vertex_transitive: poly.face_orbits(0) == 1,
        classification: poly.classify(),
    })
}

/// Flag graph of a built polytope; fails if the poset is not thin.
pub fn flag_graph(poly: &SemiregularPolytope) -> Result<FlagGraph, Defect> {
    FlagGraph::new(poly.poset())
}
