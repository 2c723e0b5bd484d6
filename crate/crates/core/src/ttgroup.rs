//! Tail-triangle diagrams and groups, with the full and reduced intersection checks.
//!
//! Generators are indexed `0..n` for `α_0..α_{n-1}` and `n` for `β`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::group::{element_order, ElementOrder, FiniteGroup, GroupElement, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TtError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("need at least one alpha generator")]
    NoAlphas,
    #[error("generator {} is not an involution", generator_name(*.0, *.1))]
    NotInvolution(usize, usize),
    #[error("generators {} and {} must commute", generator_name(*.0, *.2), generator_name(*.1, *.2))]
    CommutationViolation(usize, usize, usize),
    #[error("generators {} and {} coincide", generator_name(*.0, *.2), generator_name(*.1, *.2))]
    RepeatedGenerator(usize, usize, usize),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("{subgroup} is not a C-group: {reason}")]
    PreconditionFailed { subgroup: &'static str, reason: String },
    #[error("intersection condition fails: {0}")]
    IntersectionFailure(IntersectionWitness),
    #[error("full and reduced intersection checks disagree")]
    CheckersDisagree,
}

/// `a<i>` for alphas, `b` for beta, given the rank parameter `n`.
pub fn generator_name(i: usize, n: usize) -> String {
    if i == n {
        "b".to_string()
    } else {
        format!("a{i}")
    }
}

/// A branch label: a finite order `≥ 2`, or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    Finite(u32),
    Infinite,
}

impl Label {
    pub fn finite(self) -> Option<u32> {
        match self {
            Label::Finite(m) => Some(m),
            Label::Infinite => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Label {
    type Err = TtError;
    fn from_str(s: &str) -> Result<Self, TtError> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(Label::Infinite);
        }
        match s.parse::<u32>() {
            Ok(m) if m >= 2 => Ok(Label::Finite(m)),
            _ => Err(TtError::InvalidDiagram(format!("bad label `{s}`"))),
        }
    }
}

/// Symmetric label table of a tail-triangle diagram on `n+1` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailTriangleDiagram {
    n: usize,
    table: Vec<Vec<Label>>,
}

/// Whether the pair `(i, j)` is forced to commute by the diagram shape.
fn must_commute(i: usize, j: usize, n: usize) -> bool {
    let (lo, hi) = (i.min(j), i.max(j));
    if hi == n {
        lo + 2 < n
    } else {
        hi - lo > 1
    }
}

impl TailTriangleDiagram {
    /// `tail` holds `p_1..p_{n-2}`; `triangle` is `(p_{n-1}, q_{n-1}, k)`.
    pub fn from_parts(tail: &[Label], triangle: (Label, Label, Label)) -> Self {
        let n = tail.len() + 2;
        let mut table = vec![vec![Label::Finite(2); n + 1]; n + 1];
        for (i, &label) in tail.iter().enumerate() {
            table[i][i + 1] = label;
            table[i + 1][i] = label;
        }
        let (p, q, k) = triangle;
        let set = |t: &mut Vec<Vec<Label>>, a: usize, b: usize, l: Label| {
            t[a][b] = l;
            t[b][a] = l;
        };
        set(&mut table, n - 2, n - 1, p);
        set(&mut table, n - 2, n, q);
        set(&mut table, n - 1, n, k);
        TailTriangleDiagram { n, table }
    }

    /// The rank-1 diagram: two nodes joined by `k`.
    pub fn dihedral(k: Label) -> Self {
        TailTriangleDiagram { n: 1, table: vec![vec![Label::Finite(2), k], vec![k, Label::Finite(2)]] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.table[i][j]
    }

    /// `p_1..p_{n-2}`.
    pub fn tail(&self) -> Vec<Label> {
        (1..self.n.saturating_sub(1)).map(|i| self.table[i - 1][i]).collect()
    }

    /// `(p_{n-1}, q_{n-1}, k)`; `None` for the rank-1 diagram.
    pub fn triangle(&self) -> Option<(Label, Label, Label)> {
        let n = self.n;
        (n >= 2).then(|| (self.table[n - 2][n - 1], self.table[n - 2][n], self.table[n - 1][n]))
    }

    pub fn k(&self) -> Label {
        self.table[self.n - 1][self.n]
    }
}

impl fmt::Display for TailTriangleDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.triangle() {
            None => write!(f, "k={}", self.k()),
            Some((p, q, k)) => {
                let tail: Vec<String> = self.tail().iter().map(Label::to_string).collect();
                write!(f, "tail=[{}] triangle=({p},{q},{k})", tail.join(","))
            }
        }
    }
}

impl FromStr for TailTriangleDiagram {
    type Err = TtError;

    /// Parses `tail=[p1,...] triangle=(p,q,k)` or `k=<k>`.
    fn from_str(s: &str) -> Result<Self, TtError> {
        let bad = || TtError::InvalidDiagram(format!("expected `tail=[..] triangle=(p,q,k)`, got `{s}`"));
        let s = s.trim();
        if let Some(k) = s.strip_prefix("k=") {
            return Ok(TailTriangleDiagram::dihedral(k.parse()?));
        }
        let rest = s.strip_prefix("tail=[").ok_or_else(bad)?;
        let (tail_text, rest) = rest.split_once(']').ok_or_else(bad)?;
        let tri = rest.trim().strip_prefix("triangle=(").ok_or_else(bad)?;
        let tri = tri.trim_end().strip_suffix(')').ok_or_else(bad)?;
        let tail = if tail_text.trim().is_empty() {
            Vec::new()
        } else {
            tail_text.split(',').map(str::parse).collect::<Result<Vec<Label>, _>>()?
        };
        let tri: Vec<Label> = tri.split(',').map(str::parse).collect::<Result<_, _>>()?;
        let [p, q, k] = tri.as_slice() else { return Err(bad()) };
        Ok(TailTriangleDiagram::from_parts(&tail, (*p, *q, *k)))
    }
}

/// A set of generator indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenSet(pub u32);

impl GenSet {
    pub fn range(lo: usize, hi: usize) -> GenSet {
        GenSet((lo..hi).fold(0, |m, i| m | 1 << i))
    }

    pub fn with(self, i: usize) -> GenSet {
        GenSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> GenSet {
        GenSet(self.0 & !(1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset(self, other: GenSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: GenSet) -> GenSet {
        GenSet(self.0 & other.0)
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Evidence that `⟨left⟩ ∩ ⟨right⟩` is larger than it should be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionWitness {
    pub left: GenSet,
    pub right: GenSet,
    pub element: GroupElement,
}

impl fmt::Display for IntersectionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {} lies in <{:#b}> and <{:#b}> but not in the expected intersection",
            self.element, self.left.0, self.right.0
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntersectionOutcome {
    Pass,
    Fail(IntersectionWitness),
}

impl IntersectionOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, IntersectionOutcome::Pass)
    }
}

/// Element of `a ∩ b` outside `expected`; `expected ⊆ a ∩ b` is assumed.
fn excess<'a>(a: &'a FiniteGroup, b: &'a FiniteGroup, expected: &FiniteGroup) -> Option<&'a GroupElement> {
    let (small, large) = if a.order() <= b.order() { (a, b) } else { (b, a) };
    small.elements().iter().find(|x| large.contains(x) && !expected.contains(x))
}

/// Caches `⟨I⟩` by generator subset.
struct SubsetClosures<'a> {
    group: &'a FiniteGroup,
    gens: &'a [GroupElement],
    cache: HashMap<GenSet, FiniteGroup>,
}

impl<'a> SubsetClosures<'a> {
    fn new(group: &'a FiniteGroup, gens: &'a [GroupElement]) -> Self {
        SubsetClosures { group, gens, cache: HashMap::new() }
    }

    fn get(&mut self, set: GenSet) -> Result<&FiniteGroup, GroupError> {
        if !self.cache.contains_key(&set) {
            let gens: Vec<GroupElement> = set.indices().map(|i| self.gens[i].clone()).collect();
            let sub = self.group.subgroup(&gens)?;
            self.cache.insert(set, sub);
        }
        Ok(&self.cache[&set])
    }

    fn check_pair(&mut self, left: GenSet, right: GenSet, expected: GenSet) -> Result<Option<IntersectionWitness>, GroupError> {
        self.get(left)?;
        self.get(right)?;
        self.get(expected)?;
        let found = excess(&self.cache[&left], &self.cache[&right], &self.cache[&expected]);
        Ok(found.map(|x| IntersectionWitness { left, right, element: x.clone() }))
    }
}

/// `⟨I⟩ ∩ ⟨J⟩ = ⟨I ∩ J⟩` for every pair of subsets of `gens`, where `group = ⟨gens⟩`.
fn all_subset_pairs(group: &FiniteGroup, gens: &[GroupElement]) -> Result<IntersectionOutcome, GroupError> {
    let m = gens.len();
    let mut subsets: Vec<GenSet> = (0..1u32 << m).map(GenSet).collect();
    subsets.sort_by_key(|s| (s.len(), s.0));
    let mut closures = SubsetClosures::new(group, gens);
    for (a, &left) in subsets.iter().enumerate() {
        for &right in &subsets[a + 1..] {
            if left.is_subset(right) || right.is_subset(left) {
                continue;
            }
            if let Some(w) = closures.check_pair(left, right, left.intersection(right))? {
                return Ok(IntersectionOutcome::Fail(w));
            }
        }
    }
    Ok(IntersectionOutcome::Pass)
}

fn order_of_product(a: &GroupElement, b: &GroupElement, bound: usize) -> ElementOrder {
    element_order(&a.mul(b), bound as u64)
}

/// Result of checking an ordered involution list for the string C-group axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StringCheck {
    Pass,
    NotInvolution(usize),
    CommutationViolation(usize, usize),
    Intersection(IntersectionWitness),
}

impl StringCheck {
    pub fn passed(&self) -> bool {
        matches!(self, StringCheck::Pass)
    }
}

impl fmt::Display for StringCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringCheck::Pass => f.write_str("pass"),
            StringCheck::NotInvolution(i) => write!(f, "generator {i} is not an involution"),
            StringCheck::CommutationViolation(i, j) => write!(f, "generators {i} and {j} do not commute"),
            StringCheck::Intersection(w) => write!(f, "{w}"),
        }
    }
}

/// Checks involutions, string commutation and the intersection condition.
pub fn is_string_c_group(gens: &[GroupElement], cap: usize) -> Result<StringCheck, GroupError> {
    for (i, g) in gens.iter().enumerate() {
        if g.is_identity() || !g.mul(g).is_identity() {
            return Ok(StringCheck::NotInvolution(i));
        }
    }
    for i in 0..gens.len() {
        for j in i + 2..gens.len() {
            let prod = gens[i].mul(&gens[j]);
            if !prod.mul(&prod).is_identity() {
                return Ok(StringCheck::CommutationViolation(i, j));
            }
        }
    }
    if gens.is_empty() {
        return Ok(StringCheck::Pass);
    }
    let group = FiniteGroup::closure(gens, cap)?;
    Ok(match all_subset_pairs(&group, gens)? {
        IntersectionOutcome::Pass => StringCheck::Pass,
        IntersectionOutcome::Fail(w) => StringCheck::Intersection(w),
    })
}

/// Orders of consecutive generator products.
pub fn schlafli_type(gens: &[GroupElement], cap: usize) -> Vec<Label> {
    gens.windows(2)
        .map(|w| match order_of_product(&w[0], &w[1], cap) {
            ElementOrder::Finite(m) => Label::Finite(m as u32),
            ElementOrder::Unbounded => Label::Infinite,
        })
        .collect()
}

/// Involutions `α_0..α_{n-1}, β` satisfying the tail-triangle commutations.
#[derive(Debug, Clone)]
pub struct TailTriangleGroup {
    n: usize,
    gens: Vec<GroupElement>,
    group: Arc<FiniteGroup>,
    diagram: TailTriangleDiagram,
    cap: usize,
}

impl TailTriangleGroup {
    /// Closes the group, measures every pair order and checks the required commutations.
    pub fn verify(alphas: Vec<GroupElement>, beta: GroupElement, cap: usize) -> Result<Self, TtError> {
        let n = alphas.len();
        if n == 0 {
            return Err(TtError::NoAlphas);
        }
        let mut gens = alphas;
        gens.push(beta);
        for g in &gens[1..] {
            gens[0].compose(g)?;
        }
        for (i, g) in gens.iter().enumerate() {
            if g.is_identity() || !g.mul(g).is_identity() {
                return Err(TtError::NotInvolution(i, n));
            }
        }
        for i in 0..=n {
            for j in i + 1..=n {
                if gens[i] == gens[j] {
                    return Err(TtError::RepeatedGenerator(i, j, n));
                }
                if must_commute(i, j, n) {
                    let prod = gens[i].mul(&gens[j]);
                    if !prod.mul(&prod).is_identity() {
                        return Err(TtError::CommutationViolation(i, j, n));
                    }
                }
            }
        }
        let group = FiniteGroup::closure(&gens, cap)?;
        let mut table = vec![vec![Label::Finite(2); n + 1]; n + 1];
        for i in 0..=n {
            for j in i + 1..=n {
                let label = match order_of_product(&gens[i], &gens[j], group.order()) {
                    ElementOrder::Finite(m) => Label::Finite(m as u32),
                    ElementOrder::Unbounded => unreachable!("element orders divide the group order"),
                };
                table[i][j] = label;
                table[j][i] = label;
            }
        }
        let diagram = TailTriangleDiagram { n, table };
        Ok(TailTriangleGroup { n, gens, group: Arc::new(group), diagram, cap })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.gens
    }

    pub fn alphas(&self) -> &[GroupElement] {
        &self.gens[..self.n]
    }

    pub fn beta(&self) -> &GroupElement {
        &self.gens[self.n]
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn shared_group(&self) -> Arc<FiniteGroup> {
        Arc::clone(&self.group)
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn diagram(&self) -> &TailTriangleDiagram {
        &self.diagram
    }

    pub fn all_generators(&self) -> GenSet {
        GenSet::range(0, self.n + 1)
    }

    /// `Γ_j`: for `j ≤ n-2` every generator except `α_j`; for `j = n-1` the ridge group.
    pub fn face_set(&self, j: usize) -> GenSet {
        assert!(j < self.n, "face rank {j} out of range");
        if j + 1 == self.n {
            self.ridge_set()
        } else {
            self.all_generators().without(j)
        }
    }

    /// `⟨α_0..α_{n-2}⟩`.
    pub fn ridge_set(&self) -> GenSet {
        GenSet::range(0, self.n - 1)
    }

    /// `⟨α_0..α_{n-1}⟩`.
    pub fn facet_p_set(&self) -> GenSet {
        GenSet::range(0, self.n)
    }

    /// `⟨α_0..α_{n-2}, β⟩`.
    pub fn facet_q_set(&self) -> GenSet {
        self.ridge_set().with(self.n)
    }

    /// `Γ_i⁺ = ⟨α_{i+1}..α_{n-1}, β⟩` for `-1 ≤ i ≤ n-2`.
    pub fn plus_set(&self, i: isize) -> GenSet {
        GenSet::range((i + 1) as usize, self.n + 1)
    }

    pub fn elements_of(&self, set: GenSet) -> Vec<GroupElement> {
        set.indices().map(|i| self.gens[i].clone()).collect()
    }

    pub fn subgroup(&self, set: GenSet) -> Result<FiniteGroup, GroupError> {
        self.group.subgroup(&self.elements_of(set))
    }

    /// `Γ_0 = ⟨α_1..α_{n-1}, β⟩` as a tail-triangle group of rank parameter `n-1`.
    pub fn vertex_figure_group(&self) -> Result<TailTriangleGroup, TtError> {
        if self.n < 2 {
            return Err(TtError::InvalidDiagram("rank parameter 1 has no vertex-figure group".into()));
        }
        TailTriangleGroup::verify(self.gens[1..self.n].to_vec(), self.beta().clone(), self.cap)
    }

    /// The intersection condition over every pair of generator subsets.
    pub fn check_intersection_full(&self) -> Result<IntersectionOutcome, TtError> {
        Ok(all_subset_pairs(&self.group, &self.gens)?)
    }

    fn reduced_preconditions(&self) -> Result<(), TtError> {
        let facets = [("facet-P group", self.facet_p_set()), ("facet-Q group", self.facet_q_set())];
        for (name, set) in facets {
            let check = is_string_c_group(&self.elements_of(set), self.cap)?;
            if !check.passed() {
                return Err(TtError::PreconditionFailed { subgroup: name, reason: check.to_string() });
            }
        }
        let base = self.vertex_figure_group()?;
        match base.check_intersection_reduced() {
            Ok(IntersectionOutcome::Pass) => Ok(()),
            Ok(IntersectionOutcome::Fail(w)) => Err(TtError::PreconditionFailed {
                subgroup: "vertex-figure group",
                reason: w.to_string(),
            }),
            Err(TtError::PreconditionFailed { reason, .. }) => {
                Err(TtError::PreconditionFailed { subgroup: "vertex-figure group", reason })
            }
            Err(e) => Err(e),
        }
    }

    /// The `2n-1` intersections that suffice once the facet groups and `Γ_0` are C-groups.
    ///
    /// For `n = 1` this is the full check on the dihedral group.
    pub fn check_intersection_reduced(&self) -> Result<IntersectionOutcome, TtError> {
        if self.n == 1 {
            return self.check_intersection_full();
        }
        self.reduced_preconditions()?;
        let n = self.n;
        let mut closures = SubsetClosures::new(&self.group, &self.gens);
        let mut pairs = vec![(self.facet_p_set(), self.facet_q_set(), self.ridge_set())];
        for i in 0..n - 1 {
            let plus = self.plus_set(i as isize);
            pairs.push((plus, self.facet_p_set(), GenSet::range(i + 1, n)));
            pairs.push((plus, self.facet_q_set(), GenSet::range(i + 1, n - 1).with(n)));
        }
        for (left, right, expected) in pairs {
            if let Some(w) = closures.check_pair(left, right, expected)? {
                return Ok(IntersectionOutcome::Fail(w));
            }
        }
        Ok(IntersectionOutcome::Pass)
    }

    /// For `n = 3`: only the mutual intersections of the three 3-generator subgroups
    /// `⟨α_0,α_1,α_2⟩`, `⟨α_0,α_1,β⟩`, `⟨α_1,α_2,β⟩`, under the reduced-check preconditions.
    pub fn check_intersection_rank3_shortcut(&self) -> Result<IntersectionOutcome, TtError> {
        if self.n != 3 {
            return Err(TtError::InvalidDiagram("the shortcut applies to n = 3 only".into()));
        }
        self.reduced_preconditions()?;
        let (p, q, base) = (self.facet_p_set(), self.facet_q_set(), self.plus_set(0));
        let mut closures = SubsetClosures::new(&self.group, &self.gens);
        for (left, right) in [(p, q), (base, p), (base, q)] {
            if let Some(w) = closures.check_pair(left, right, left.intersection(right))? {
                return Ok(IntersectionOutcome::Fail(w));
            }
        }
        Ok(IntersectionOutcome::Pass)
    }

    /// Runs the chosen intersection check(s) and returns a certified C-group.
    pub fn certify(self, method: CheckMethod) -> Result<TailTriangleCGroup, TtError> {
        let full = match method {
            CheckMethod::Reduced => None,
            _ => Some(self.check_intersection_full()?),
        };
        let reduced = match method {
            CheckMethod::Full => None,
            _ => Some(self.check_intersection_reduced()?),
        };
        if let (Some(f), Some(r)) = (&full, &reduced) {
            if f.passed() != r.passed() {
                return Err(TtError::CheckersDisagree);
            }
        }
        for outcome in full.iter().chain(reduced.iter()) {
            if let IntersectionOutcome::Fail(w) = outcome {
                return Err(TtError::IntersectionFailure(w.clone()));
            }
        }
        let report = Certification { full: full.is_some(), reduced: reduced.is_some() };
        Ok(TailTriangleCGroup { group: self, report })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    Full,
    Reduced,
    Both,
}

/// Which checkers passed while certifying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certification {
    pub full: bool,
    pub reduced: bool,
}

/// A tail-triangle group whose intersection condition has been verified.
#[derive(Debug, Clone)]
pub struct TailTriangleCGroup {
    group: TailTriangleGroup,
    report: Certification,
}

impl TailTriangleCGroup {
    pub fn certification(&self) -> Certification {
        self.report
    }

    pub fn into_inner(self) -> TailTriangleGroup {
        self.group
    }
}

impl std::ops::Deref for TailTriangleCGroup {
    type Target = TailTriangleGroup;
    fn deref(&self) -> &TailTriangleGroup {
        &self.group
    }
}
