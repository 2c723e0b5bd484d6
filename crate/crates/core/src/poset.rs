//! Ranked face posets stored as Hasse diagrams, with the polytope axiom checks,
//! flag enumeration, sections and isomorphism testing.

use std::collections::HashMap;
use std::fmt;

use crate::group::GroupElement;

/// Which distinguished subgroup a coset face comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceKind {
    /// The least face, rank -1.
    Bottom,
    /// A coset of `Γ_j`, rank `j`.
    Sub(usize),
    FacetP,
    FacetQ,
    /// The greatest face; holds its rank.
    Top(usize),
    /// A face with no coset origin (reference posets, sections of them).
    Plain,
}

impl fmt::Display for FaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceKind::Bottom => f.write_str("G_-1"),
            FaceKind::Sub(j) => write!(f, "G_{j}"),
            FaceKind::FacetP => f.write_str("P"),
            FaceKind::FacetQ => f.write_str("Q"),
            FaceKind::Top(r) => write!(f, "G_{r}"),
            FaceKind::Plain => f.write_str("F"),
        }
    }
}

/// A face's representative, for export.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceRep {
    None,
    Element(GroupElement),
    Text(String),
}

impl fmt::Display for FaceRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceRep::None => f.write_str("-"),
            FaceRep::Element(g) => write!(f, "{g}"),
            FaceRep::Text(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub rank: i32,
    pub kind: FaceKind,
    pub rep: FaceRep,
}

/// Face counts of the proper ranks; the top proper rank is split by facet kind
/// when the faces there carry `P`/`Q` tags.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FVector {
    pub counts: Vec<usize>,
    pub facet_split: Option<(usize, usize)>,
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        let last = self.counts.len().saturating_sub(1);
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match self.facet_split {
                Some((p, q)) if i == last => write!(f, "{p}+{q}")?,
                _ => write!(f, "{c}")?,
            }
        }
        f.write_str(")")
    }
}

/// A violated polytope axiom, with the faces involved.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Defect {
    #[error("rank {rank} has {count} faces where exactly one is required")]
    ImproperFaceCount { rank: i32, count: usize },
    #[error("cover {lower} -> {upper} skips a rank")]
    RankGap { lower: usize, upper: usize },
    #[error("face {face} lies in no maximal chain")]
    Dangling { face: usize },
    #[error("faces {lower} < {upper} have {count} faces between them, not 2")]
    Diamond { lower: usize, upper: usize, count: usize },
    #[error("section {upper}/{lower} is disconnected")]
    Disconnected { lower: usize, upper: usize },
}

/// A ranked poset with ranks `-1..=top_rank`, stored as covering relations.
#[derive(Debug, Clone)]
pub struct FacePoset {
    top_rank: i32,
    faces: Vec<Face>,
    by_rank: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl FacePoset {
    pub fn new(top_rank: i32) -> Self {
        assert!(top_rank >= 0, "top rank must be non-negative");
        FacePoset {
            top_rank,
            faces: Vec::new(),
            by_rank: vec![Vec::new(); top_rank as usize + 2],
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    pub fn add_face(&mut self, rank: i32, kind: FaceKind, rep: FaceRep) -> usize {
        assert!((-1..=self.top_rank).contains(&rank), "rank {rank} outside -1..={}", self.top_rank);
        let id = self.faces.len();
        self.faces.push(Face { rank, kind, rep });
        self.by_rank[(rank + 1) as usize].push(id);
        self.up.push(Vec::new());
        self.down.push(Vec::new());
        id
    }

    /// Records `lower ⋖ upper`; duplicates are removed by [`finish`](Self::finish).
    pub fn add_cover(&mut self, lower: usize, upper: usize) {
        self.up[lower].push(upper);
        self.down[upper].push(lower);
    }

    /// Sorts and deduplicates the cover lists.
    pub fn finish(&mut self) {
        for list in self.up.iter_mut().chain(self.down.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
    }

    /// The rank of the greatest face, `n+1` for an `(n+1)`-polytope.
    pub fn rank(&self) -> i32 {
        self.top_rank
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn faces_of_rank(&self, rank: i32) -> &[usize] {
        &self.by_rank[(rank + 1) as usize]
    }

    pub fn up(&self, id: usize) -> &[usize] {
        &self.up[id]
    }

    pub fn down(&self, id: usize) -> &[usize] {
        &self.down[id]
    }

    pub fn covers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.up.iter().enumerate().flat_map(|(lo, ups)| ups.iter().map(move |&hi| (lo, hi)))
    }

    pub fn cover_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    pub fn is_cover(&self, lower: usize, upper: usize) -> bool {
        self.up[lower].binary_search(&upper).is_ok()
    }

    pub fn bottom(&self) -> Option<usize> {
        match self.faces_of_rank(-1) {
            [b] => Some(*b),
            _ => None,
        }
    }

    pub fn top(&self) -> Option<usize> {
        match self.faces_of_rank(self.top_rank) {
            [t] => Some(*t),
            _ => None,
        }
    }

    pub fn f_vector(&self) -> FVector {
        let counts: Vec<usize> = (0..self.top_rank).map(|r| self.faces_of_rank(r).len()).collect();
        let facets = if self.top_rank > 0 { self.faces_of_rank(self.top_rank - 1) } else { &[] };
        let p = facets.iter().filter(|&&f| self.faces[f].kind == FaceKind::FacetP).count();
        let q = facets.iter().filter(|&&f| self.faces[f].kind == FaceKind::FacetQ).count();
        let facet_split = (p + q > 0).then_some((p, q));
        FVector { counts, facet_split }
    }

    /// Marks every face `≥ from`.
    pub fn upset(&self, from: usize) -> Vec<bool> {
        self.reach(from, &self.up)
    }

    /// Marks every face `≤ from`.
    pub fn downset(&self, from: usize) -> Vec<bool> {
        self.reach(from, &self.down)
    }

    fn reach(&self, from: usize, edges: &[Vec<usize>]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(x) = stack.pop() {
            for &y in &edges[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// `a ≤ b` in the order generated by the covers.
    pub fn is_below(&self, a: usize, b: usize) -> bool {
        self.upset(a)[b]
    }

    /// The section `hi/lo` as a standalone poset, re-ranked so that `lo` has rank -1.
    ///
    /// Returns the section and, for each of its faces, the originating face id.
    pub fn section(&self, lo: usize, hi: usize) -> (FacePoset, Vec<usize>) {
        let above = self.upset(lo);
        let below = self.downset(hi);
        assert!(above[hi], "section bounds must satisfy lo <= hi");
        let shift = self.faces[lo].rank + 1;
        let top_rank = self.faces[hi].rank - shift;
        let mut out = FacePoset::new(top_rank);
        let mut new_id = HashMap::new();
        let mut origin = Vec::new();
        for r in self.faces[lo].rank..=self.faces[hi].rank {
            for &f in self.faces_of_rank(r) {
                if above[f] && below[f] {
                    let face = &self.faces[f];
                    let kind = if f == lo {
                        FaceKind::Bottom
                    } else if f == hi {
                        FaceKind::Top(top_rank as usize)
                    } else {
                        face.kind
                    };
                    new_id.insert(f, out.add_face(face.rank - shift, kind, face.rep.clone()));
                    origin.push(f);
                }
            }
        }
        for (&old, &new) in &new_id {
            for up in &self.up[old] {
                if let Some(&n2) = new_id.get(up) {
                    out.add_cover(new, n2);
                }
            }
        }
        out.finish();
        (out, origin)
    }

    /// All maximal chains of proper faces (ranks `0..top_rank`), in depth-first order
    /// through the sorted cover lists.
    pub fn flags(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let Some(bottom) = self.bottom() else { return out };
        let proper = self.top_rank as usize;
        let mut chain = Vec::with_capacity(proper);
        self.extend_flags(bottom, proper, &mut chain, &mut out);
        out
    }

    fn extend_flags(&self, face: usize, proper: usize, chain: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if chain.len() == proper {
            out.push(chain.clone());
            return;
        }
        for &next in &self.up[face] {
            chain.push(next as u32);
            self.extend_flags(next, proper, chain, out);
            chain.pop();
        }
    }

    /// Text export: one `face` line per face, then one `cover` line per covering pair.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for (id, face) in self.faces.iter().enumerate() {
            s.push_str(&format!("face {id} rank={} kind={} rep={}\n", face.rank, face.kind, face.rep));
        }
        for (lo, hi) in self.covers() {
            s.push_str(&format!("cover {lo} {hi}\n"));
        }
        s
    }
}

/// Axiom A: one least and one greatest face, covers between consecutive ranks,
/// and every face on some maximal chain.
pub fn verify_axiom_a(p: &FacePoset) -> Result<(), Defect> {
    for rank in [-1, p.rank()] {
        let count = p.faces_of_rank(rank).len();
        if count != 1 {
            return Err(Defect::ImproperFaceCount { rank, count });
        }
    }
    for (lo, hi) in p.covers() {
        if p.face(hi).rank != p.face(lo).rank + 1 {
            return Err(Defect::RankGap { lower: lo, upper: hi });
        }
    }
    for id in 0..p.len() {
        let rank = p.face(id).rank;
        if (rank < p.rank() && p.up(id).is_empty()) || (rank > -1 && p.down(id).is_empty()) {
            return Err(Defect::Dangling { face: id });
        }
    }
    Ok(())
}

/// Axiom B: exactly two faces strictly between any `F < G` with rank difference 2.
pub fn verify_diamond(p: &FacePoset) -> Result<(), Defect> {
    let mut count = vec![0u32; p.len()];
    let mut touched = Vec::new();
    for lower in 0..p.len() {
        for &mid in p.up(lower) {
            for &upper in p.up(mid) {
                if count[upper] == 0 {
                    touched.push(upper);
                }
                count[upper] += 1;
            }
        }
        for upper in touched.drain(..) {
            if count[upper] != 2 {
                return Err(Defect::Diamond { lower, upper, count: count[upper] as usize });
            }
            count[upper] = 0;
        }
    }
    Ok(())
}

/// Axiom C: in every section `G/F` of rank at least 2, the graph on the section's
/// facets, joined through shared section ridges, is connected.
pub fn verify_strong_connectivity(p: &FacePoset) -> Result<(), Defect> {
    let mut in_upset = vec![u32::MAX; p.len()];
    let mut in_down = vec![u32::MAX; p.len()];
    let mut visited = vec![u32::MAX; p.len()];
    let mut stamp = 0u32;
    for lower in 0..p.len() {
        let lower_rank = p.face(lower).rank;
        let above = p.upset(lower);
        for (f, &a) in above.iter().enumerate() {
            if a {
                in_upset[f] = lower as u32;
            }
        }
        for upper in (0..p.len()).filter(|&u| above[u] && p.face(u).rank - lower_rank >= 3) {
            stamp += 1;
            let facets: Vec<usize> = p.down(upper).iter().copied().filter(|&h| in_upset[h] == lower as u32).collect();
            for &h in &facets {
                in_down[h] = stamp;
            }
            let mut stack = vec![facets[0]];
            visited[facets[0]] = stamp;
            let mut reached = 1;
            while let Some(h) = stack.pop() {
                for &ridge in p.down(h) {
                    if in_upset[ridge] != lower as u32 {
                        continue;
                    }
                    for &next in p.up(ridge) {
                        if in_down[next] == stamp && visited[next] != stamp {
                            visited[next] = stamp;
                            reached += 1;
                            stack.push(next);
                        }
                    }
                }
            }
            if reached != facets.len() {
                return Err(Defect::Disconnected { lower, upper });
            }
        }
    }
    Ok(())
}

/// Flags with their adjacency: `adjacent[f][i]` is the flag differing from `f` at rank `i`.
#[derive(Debug, Clone)]
pub struct FlagGraph {
    pub flags: Vec<Vec<u32>>,
    pub adjacent: Vec<Vec<u32>>,
}

impl FlagGraph {
    /// Fails when some flag has no unique `i`-adjacent flag.
    pub fn new(p: &FacePoset) -> Result<Self, Defect> {
        let flags = p.flags();
        let index: HashMap<&[u32], u32> =
            flags.iter().enumerate().map(|(i, f)| (f.as_slice(), i as u32)).collect();
        let bottom = p.bottom().ok_or(Defect::ImproperFaceCount { rank: -1, count: p.faces_of_rank(-1).len() })?;
        let top = p.top().ok_or(Defect::ImproperFaceCount { rank: p.rank(), count: p.faces_of_rank(p.rank()).len() })?;
        let proper = p.rank() as usize;
        let mut adjacent = Vec::with_capacity(flags.len());
        let mut scratch = Vec::with_capacity(proper);
        for flag in &flags {
            let mut row = Vec::with_capacity(proper);
            for i in 0..proper {
                let lower = if i == 0 { bottom } else { flag[i - 1] as usize };
                let upper = if i + 1 == proper { top } else { flag[i + 1] as usize };
                let mut others = p.up(lower).iter().filter(|&&m| m != flag[i] as usize && p.is_cover(m, upper));
                let (Some(&other), None) = (others.next(), others.next()) else {
                    let count = p.up(lower).iter().filter(|&&m| p.is_cover(m, upper)).count();
                    return Err(Defect::Diamond { lower, upper, count });
                };
                scratch.clear();
                scratch.extend_from_slice(flag);
                scratch[i] = other as u32;
                row.push(index[scratch.as_slice()]);
            }
            adjacent.push(row);
        }
        Ok(FlagGraph { flags, adjacent })
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// Number of connected components of the flag graph.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for &g in &self.adjacent[f] {
                    if !seen[g as usize] {
                        seen[g as usize] = true;
                        stack.push(g as usize);
                    }
                }
            }
        }
        count
    }
}

/// Extends `a`'s flag 0 ↦ `b`'s flag `target` along adjacency; returns the face map
/// if the extension is a well-defined incidence-preserving bijection.
fn propagate(pa: &FacePoset, a: &FlagGraph, pb: &FacePoset, b: &FlagGraph, target: usize) -> Option<Vec<usize>> {
    const UNSET: u32 = u32::MAX;
    let mut image = vec![UNSET; a.len()];
    let mut used = vec![false; b.len()];
    image[0] = target as u32;
    used[target] = true;
    let mut stack = vec![0usize];
    while let Some(f) = stack.pop() {
        let g = image[f] as usize;
        for i in 0..a.adjacent[f].len() {
            let fa = a.adjacent[f][i] as usize;
            let gb = b.adjacent[g][i];
            if image[fa] == UNSET {
                if used[gb as usize] {
                    return None;
                }
                image[fa] = gb;
                used[gb as usize] = true;
                stack.push(fa);
            } else if image[fa] != gb {
                return None;
            }
        }
    }
    if image.contains(&UNSET) {
        return None;
    }
    let mut face_map = vec![usize::MAX; pa.len()];
    for (f, flag) in a.flags.iter().enumerate() {
        let other = &b.flags[image[f] as usize];
        for (x, y) in flag.iter().zip(other) {
            let slot = &mut face_map[*x as usize];
            if *slot == usize::MAX {
                *slot = *y as usize;
            } else if *slot != *y as usize {
                return None;
            }
        }
    }
    if let (Some(ba), Some(bb)) = (pa.bottom(), pb.bottom()) {
        face_map[ba] = bb;
    }
    if let (Some(ta), Some(tb)) = (pa.top(), pb.top()) {
        face_map[ta] = tb;
    }
    let mut hit = vec![false; pb.len()];
    for &y in &face_map {
        if y == usize::MAX || std::mem::replace(&mut hit[y], true) {
            return None;
        }
    }
    pa.covers().all(|(lo, hi)| pb.is_cover(face_map[lo], face_map[hi])).then_some(face_map)
}

/// A rank- and incidence-preserving bijection `a → b`, if one exists.
///
/// Both posets must satisfy the diamond condition with connected flag graphs; the
/// search maps one base flag of `a` to each flag of `b` in turn and propagates.
pub fn poset_isomorphic(a: &FacePoset, b: &FacePoset) -> Option<Vec<usize>> {
    if a.rank() != b.rank() || a.len() != b.len() || a.cover_count() != b.cover_count() {
        return None;
    }
    if a.f_vector().counts != b.f_vector().counts {
        return None;
    }
    let fa = FlagGraph::new(a).ok()?;
    let fb = FlagGraph::new(b).ok()?;
    if fa.len() != fb.len() || fa.is_empty() {
        return None;
    }
    (0..fb.len()).find_map(|t| propagate(a, &fa, b, &fb, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn polygon_checks() {
        let hexagon = reference::polygon(6);
        assert!(verify_axiom_a(&hexagon).is_ok());
        assert!(verify_diamond(&hexagon).is_ok());
        assert!(verify_strong_connectivity(&hexagon).is_ok());
        assert_eq!(hexagon.f_vector().to_string(), "(6, 6)");
        assert_eq!(hexagon.flags().len(), 12);
        assert_eq!(FlagGraph::new(&hexagon).unwrap().components(), 1);
    }

    #[test]
    fn two_hexagons_share_no_flag_path() {
        let p = reference::disjoint_polygons(6, 2);
        assert!(verify_diamond(&p).is_ok());
        assert!(matches!(verify_strong_connectivity(&p), Err(Defect::Disconnected { .. })));
        assert_eq!(FlagGraph::new(&p).unwrap().components(), 2);
    }

    #[test]
    fn deleting_a_face_breaks_diamond() {
        let tet = reference::simplex(3);
        let mut broken = FacePoset::new(tet.rank());
        // same poset without the last facet
        let drop = *tet.faces_of_rank(2).last().unwrap();
        let mut map = HashMap::new();
        for (id, f) in tet.faces().iter().enumerate() {
            if id != drop {
                map.insert(id, broken.add_face(f.rank, f.kind, f.rep.clone()));
            }
        }
        for (lo, hi) in tet.covers() {
            if let (Some(&a), Some(&b)) = (map.get(&lo), map.get(&hi)) {
                broken.add_cover(a, b);
            }
        }
        broken.finish();
        assert!(matches!(verify_diamond(&broken), Err(Defect::Diamond { count: 1, .. })));
        assert!(FlagGraph::new(&broken).is_err());
    }

    #[test]
    fn isomorphism_basics() {
        let t1 = reference::simplex(3);
        let t2 = reference::simplex(3);
        assert!(poset_isomorphic(&t1, &t2).is_some());
        assert!(poset_isomorphic(&t1, &reference::hemi_octahedron()).is_none());
        assert!(poset_isomorphic(&reference::cube(3), &reference::cross_polytope(3)).is_none());
        assert!(poset_isomorphic(&reference::polygon(5), &reference::polygon(5)).is_some());
    }

    #[test]
    fn sections_rerank() {
        let cube = reference::cube(3);
        let top = cube.top().unwrap();
        let v = cube.faces_of_rank(0)[0];
        let (vf, origin) = cube.section(v, top);
        assert_eq!(vf.rank(), 2);
        assert_eq!(vf.f_vector().counts, vec![3, 3]);
        assert_eq!(origin[0], v);
        assert!(poset_isomorphic(&vf, &reference::polygon(3)).is_some());
        let bottom = cube.bottom().unwrap();
        let facet = cube.faces_of_rank(2)[0];
        let (sq, _) = cube.section(bottom, facet);
        assert!(poset_isomorphic(&sq, &reference::polygon(4)).is_some());
    }

    #[test]
    fn export_lists_faces_and_covers() {
        let digon = reference::polygon(2);
        let text = digon.export();
        assert_eq!(text.lines().filter(|l| l.starts_with("face ")).count(), 6);
        assert_eq!(text.lines().filter(|l| l.starts_with("cover ")).count(), 2 + 4 + 2);
        assert!(text.starts_with("face 0 rank=-1 kind=G_-1 rep=-\n"));
    }

    #[test]
    fn f_vector_display() {
        let fv = FVector { counts: vec![4, 12, 16, 8], facet_split: Some((4, 4)) };
        assert_eq!(fv.to_string(), "(4, 12, 16, 4+4)");
    }
}
