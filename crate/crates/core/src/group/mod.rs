//! Exact finite-group arithmetic: elements, closures, cosets and intersections.

mod matrix;
mod perm;

use std::collections::HashMap;
use std::fmt;

pub use matrix::{is_prime, MatModP};
pub use perm::Perm;

/// Default bound on the number of elements a closure may produce.
pub const DEFAULT_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("cannot combine a permutation with a matrix")]
    KindMismatch,
    #[error("permutation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("matrix shapes differ: mod {0} dim {1} vs mod {2} dim {3}")]
    ShapeMismatch(u32, usize, u32, usize),
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("element {0} does not lie in the parent group")]
    NotSubgroup(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A permutation or an invertible matrix over `Z_p`.
///
/// The derived order compares image arrays / entry arrays lexicographically and is
/// the total order used to pick canonical coset representatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Perm(Perm),
    Mat(MatModP),
}

impl GroupElement {
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        match (self, other) {
            (GroupElement::Perm(a), GroupElement::Perm(b)) => a.compose(b).map(GroupElement::Perm),
            (GroupElement::Mat(a), GroupElement::Mat(b)) => a.compose(b).map(GroupElement::Mat),
            _ => Err(GroupError::KindMismatch),
        }
    }

    /// Product of two elements already known to share a group.
    pub(crate) fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Perm(a), GroupElement::Perm(b)) => {
                GroupElement::Perm(a.compose_unchecked(b))
            }
            (GroupElement::Mat(a), GroupElement::Mat(b)) => {
                GroupElement::Mat(a.compose_unchecked(b))
            }
            _ => panic!("mixed element kinds inside one group"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Perm(p) => GroupElement::Perm(p.inverse()),
            GroupElement::Mat(m) => GroupElement::Mat(m.inverse()),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Perm(p) => p.is_identity(),
            GroupElement::Mat(m) => m.is_identity(),
        }
    }

    /// The identity of the group this element lives in.
    pub fn identity_like(&self) -> GroupElement {
        match self {
            GroupElement::Perm(p) => GroupElement::Perm(Perm::identity(p.degree())),
            GroupElement::Mat(m) => GroupElement::Mat(MatModP::identity(m.modulus(), m.dim())),
        }
    }

    /// Parses either cycle notation (needs `degree`) or `mod p dim d [..]`.
    pub fn parse(text: &str, degree: usize) -> Result<GroupElement, GroupError> {
        let t = text.trim();
        if t.starts_with("mod") {
            MatModP::parse(t).map(GroupElement::Mat)
        } else {
            Perm::parse(t, degree).map(GroupElement::Perm)
        }
    }

    pub fn pow(&self, mut e: u64) -> GroupElement {
        let mut result = self.identity_like();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Perm(p) => fmt::Display::fmt(p, f),
            GroupElement::Mat(m) => fmt::Display::fmt(m, f),
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Perm> for GroupElement {
    fn from(p: Perm) -> Self {
        GroupElement::Perm(p)
    }
}

impl From<MatModP> for GroupElement {
    fn from(m: MatModP) -> Self {
        GroupElement::Mat(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u64),
    Unbounded,
}

/// Least `m ≥ 1` with `g^m = 1`, or `Unbounded` once `m` would exceed `cap`.
pub fn element_order(g: &GroupElement, cap: u64) -> ElementOrder {
    let mut x = g.clone();
    for m in 1..=cap {
        if x.is_identity() {
            return ElementOrder::Finite(m);
        }
        x = x.mul(g);
    }
    ElementOrder::Unbounded
}

/// A finite group with its full element list in breadth-first insertion order.
///
/// Element 0 is always the identity.
#[derive(Clone)]
pub struct FiniteGroup {
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, u32>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl FiniteGroup {
    /// Breadth-first closure of `generators`; fails once more than `cap` elements appear.
    pub fn closure(generators: &[GroupElement], cap: usize) -> Result<Self, GroupError> {
        let first = generators.first().ok_or(GroupError::EmptyGenerators)?;
        for g in &generators[1..] {
            first.compose(g)?;
        }
        Self::closure_from(first.identity_like(), generators.to_vec(), cap)
    }

    fn closure_from(
        identity: GroupElement,
        generators: Vec<GroupElement>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(identity, 0u32);
        let mut head = 0;
        while head < elements.len() {
            for g in &generators {
                let y = elements[head].mul(g);
                if !index.contains_key(&y) {
                    if elements.len() >= cap {
                        return Err(GroupError::CapExceeded(cap));
                    }
                    index.insert(y.clone(), elements.len() as u32);
                    elements.push(y);
                }
            }
            head += 1;
        }
        Ok(FiniteGroup { generators, elements, index })
    }

    /// The trivial group containing only `identity`.
    pub fn trivial(identity: GroupElement) -> Self {
        let mut index = HashMap::new();
        index.insert(identity.clone(), 0);
        FiniteGroup { generators: Vec::new(), elements: vec![identity], index }
    }

    /// The subgroup generated by `gens`, which must lie in `self`.
    pub fn subgroup(&self, gens: &[GroupElement]) -> Result<FiniteGroup, GroupError> {
        for g in gens {
            if !self.contains(g) {
                return Err(GroupError::NotSubgroup(g.to_string()));
            }
        }
        if gens.is_empty() {
            return Ok(FiniteGroup::trivial(self.identity().clone()));
        }
        Self::closure_from(self.identity().clone(), gens.to_vec(), self.order())
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> &GroupElement {
        &self.elements[0]
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    /// Index of `elements[a] · elements[b]`.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        let prod = self.elements[a].mul(&self.elements[b]);
        self.index[&prod] as usize
    }

    /// For every element `x`, the index of `x · g`; `g` must lie in the group.
    pub fn right_multiplication(&self, g: &GroupElement) -> Result<Vec<u32>, GroupError> {
        if !self.contains(g) {
            return Err(GroupError::NotSubgroup(g.to_string()));
        }
        Ok(self.elements.iter().map(|x| self.index[&x.mul(g)]).collect())
    }

    /// Full Cayley table, row `a` holding the indices of `a · b`.
    pub fn multiplication_table(&self) -> Vec<Vec<u32>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| self.index[&a.mul(b)]).collect())
            .collect()
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        let gens_in = self.generators.iter().all(|g| other.contains(g));
        gens_in && self.identity() == other.identity()
    }

    /// Position of every element in the sorted order of elements.
    pub fn sorted_positions(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.order() as u32).collect();
        order.sort_unstable_by(|&a, &b| self.elements[a as usize].cmp(&self.elements[b as usize]));
        let mut pos = vec![0u32; self.order()];
        for (rank, &i) in order.iter().enumerate() {
            pos[i as usize] = rank as u32;
        }
        pos
    }

    /// Right cosets `H·g` of the subgroup `h`, ordered by canonical representative.
    pub fn right_cosets(&self, h: &FiniteGroup) -> Result<Cosets, GroupError> {
        if !h.is_subgroup_of(self) {
            return Err(GroupError::NotSubgroup(format!("subgroup of order {}", h.order())));
        }
        let positions = self.sorted_positions();
        self.right_cosets_with(h, &positions)
    }

    /// As [`right_cosets`](Self::right_cosets), reusing precomputed sort positions.
    pub fn right_cosets_with(&self, h: &FiniteGroup, positions: &[u32]) -> Result<Cosets, GroupError> {
        const UNSET: u32 = u32::MAX;
        let mut raw_of = vec![UNSET; self.order()];
        let mut minimal: Vec<u32> = Vec::new();
        for g in 0..self.order() {
            if raw_of[g] != UNSET {
                continue;
            }
            let id = minimal.len() as u32;
            let mut best = g as u32;
            for x in h.elements() {
                let y = self
                    .index_of(&x.mul(&self.elements[g]))
                    .ok_or_else(|| GroupError::NotSubgroup(x.to_string()))?;
                raw_of[y] = id;
                if positions[y] < positions[best as usize] {
                    best = y as u32;
                }
            }
            minimal.push(best);
        }
        let mut order: Vec<usize> = (0..minimal.len()).collect();
        order.sort_unstable_by_key(|&c| positions[minimal[c] as usize]);
        let mut relabel = vec![0u32; minimal.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new as u32;
        }
        Ok(Cosets {
            coset_of: raw_of.into_iter().map(|c| relabel[c as usize]).collect(),
            reps: order.iter().map(|&c| minimal[c]).collect(),
        })
    }

    /// Set intersection of two subgroups of a common parent, as a group.
    pub fn intersect(&self, other: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
        self.identity().compose(other.identity())?;
        let (small, large) = if self.order() <= other.order() { (self, other) } else { (other, self) };
        let mut current = FiniteGroup::trivial(small.identity().clone());
        let mut gens = Vec::new();
        for x in small.elements() {
            if large.contains(x) && !current.contains(x) {
                gens.push(x.clone());
                current = Self::closure_from(small.identity().clone(), gens.clone(), small.order())?;
            }
        }
        Ok(current)
    }

    /// An element of `self` outside `other`, if any.
    pub fn element_outside(&self, other: &FiniteGroup) -> Option<&GroupElement> {
        self.elements.iter().find(|x| !other.contains(x))
    }
}

/// A right-coset decomposition of a group by a subgroup.
#[derive(Debug, Clone)]
pub struct Cosets {
    /// Coset number of every element of the parent group.
    pub coset_of: Vec<u32>,
    /// Parent index of each coset's minimal element, in increasing element order.
    pub reps: Vec<u32>,
}

impl Cosets {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(s: &str, n: usize) -> GroupElement {
        GroupElement::parse(s, n).unwrap()
    }

    fn s4() -> FiniteGroup {
        FiniteGroup::closure(&[perm("(1,2)", 4), perm("(2,3)", 4), perm("(3,4)", 4)], 100).unwrap()
    }

    #[test]
    fn closure_orders() {
        assert_eq!(s4().order(), 24);
        assert_eq!(FiniteGroup::closure(&[perm("(1,2)", 2)], 10).unwrap().order(), 2);
        assert!(s4().identity().is_identity());
    }

    #[test]
    fn closure_cap_and_errors() {
        let gens = [perm("(1,2)", 4), perm("(1,2,3,4)", 4)];
        assert_eq!(FiniteGroup::closure(&gens, 23).unwrap_err(), GroupError::CapExceeded(23));
        assert_eq!(FiniteGroup::closure(&[], 10).unwrap_err(), GroupError::EmptyGenerators);
        let mixed = [perm("(1,2)", 2), GroupElement::Mat(MatModP::identity(2, 2))];
        assert_eq!(FiniteGroup::closure(&mixed, 10).unwrap_err(), GroupError::KindMismatch);
    }

    #[test]
    fn subgroups_and_cosets() {
        let g = s4();
        let h = g.subgroup(&[perm("(1,2)", 4), perm("(2,3)", 4)]).unwrap();
        assert_eq!(h.order(), 6);
        let cosets = g.right_cosets(&h).unwrap();
        assert_eq!(cosets.count(), 4);
        assert!(g.element(cosets.reps[0] as usize).is_identity());
        for (c, &rep) in cosets.reps.iter().enumerate() {
            let members: Vec<_> = (0..g.order()).filter(|&x| cosets.coset_of[x] == c as u32).collect();
            assert_eq!(members.len(), 6);
            assert!(members.iter().all(|&x| g.element(x) >= g.element(rep as usize)));
        }
        assert_eq!(g.subgroup(&[]).unwrap().order(), 1);
        let outside = perm("(1,5)", 5);
        assert!(g.subgroup(&[outside]).is_err());
    }

    #[test]
    fn intersections() {
        let g = s4();
        let a = g.subgroup(&[perm("(1,2)", 4), perm("(2,3)", 4)]).unwrap();
        let b = g.subgroup(&[perm("(2,3)", 4), perm("(3,4)", 4)]).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.order(), 2);
        assert!(i.contains(&perm("(2,3)", 4)));
        assert_eq!(b.intersect(&a).unwrap().order(), 2);
        assert_eq!(a.intersect(&a).unwrap().order(), 6);
    }

    #[test]
    fn element_orders() {
        assert_eq!(element_order(&perm("()", 3), 10), ElementOrder::Finite(1));
        assert_eq!(element_order(&perm("(1,2,3)", 3), 10), ElementOrder::Finite(3));
        assert_eq!(element_order(&perm("(1,2,3)", 3), 2), ElementOrder::Unbounded);
        assert_eq!(perm("(1,2,3,4)", 4).pow(4), perm("()", 4));
    }

    #[test]
    fn multiplication_tables_agree() {
        let g = s4();
        let table = g.multiplication_table();
        let right = g.right_multiplication(&perm("(2,3)", 4)).unwrap();
        let t = g.index_of(&perm("(2,3)", 4)).unwrap();
        for x in 0..g.order() {
            assert_eq!(table[x][t], right[x]);
            assert_eq!(g.mul_index(x, t), right[x] as usize);
        }
    }
}
