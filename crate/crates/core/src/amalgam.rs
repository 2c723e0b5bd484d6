//! Exact arithmetic in the amalgamated free product `Π = Γ(P) ∗_{Γ(K)} Γ(Q)` of two
//! finite string C-groups sharing their facet group, and bounded exploration of the
//! universal semiregular polytope it acts on.
//!
//! Elements are kept in reduced form `κ·τ_1⋯τ_m`: `κ` in the shared group `K`, each
//! `τ_i` a non-identity transversal element, sides alternating.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::group::{FiniteGroup, GroupElement, GroupError};
use crate::poset::{FaceKind, FacePoset, FaceRep};
use crate::ttgroup::is_string_c_group;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AmalgamError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the {0} group is not a string C-group: {1}")]
    NotCGroup(Side, String),
    #[error("facet groups have ranks {0} and {1}")]
    RankMismatch(usize, usize),
    #[error("the shared generators do not induce an isomorphism of facet groups")]
    FacetMismatch,
    #[error("words come from different amalgam contexts")]
    ContextMismatch,
    #[error("unknown generator `{0}`")]
    BadLetter(String),
    #[error("no subgroup of that kind at rank {0}")]
    InvalidRank(isize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    P,
    Q,
}

impl Side {
    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::P => "P",
            Side::Q => "Q",
        })
    }
}

/// Which family of faces: cosets of `Γ_j` (`j ≤ n-2`), of `K` (ridges), or of a facet group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceType {
    Sub(usize),
    Ridge,
    Facet(Side),
}

impl FaceType {
    pub fn rank(self, n: usize) -> usize {
        match self {
            FaceType::Sub(j) => j,
            FaceType::Ridge => n - 1,
            FaceType::Facet(_) => n,
        }
    }

    fn kind(self, n: usize) -> FaceKind {
        match self {
            FaceType::Sub(j) => FaceKind::Sub(j),
            FaceType::Ridge => FaceKind::Sub(n - 1),
            FaceType::Facet(Side::P) => FaceKind::FacetP,
            FaceType::Facet(Side::Q) => FaceKind::FacetQ,
        }
    }
}

/// An element of `Π` in reduced form; `taus[i] = (side, index into that side's transversal)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmalgamWord {
    context: u64,
    kappa: u32,
    taus: Vec<(Side, u32)>,
}

impl AmalgamWord {
    /// Number of transversal elements.
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.kappa == 0 && self.taus.is_empty()
    }

    /// Index of the leading element in the shared group.
    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn taus(&self) -> &[(Side, u32)] {
        &self.taus
    }
}

/// Per-face-type lookup tables over one factor group.
#[derive(Debug, Clone)]
struct CosetTables {
    /// Least element of `H·x`, for `H` the face group met with this factor.
    orbit_min: Vec<u32>,
    /// Least element of `H·x ∩ K` as a `K` index, when nonempty.
    strip: Vec<Option<u32>>,
}

/// One factor `Γ(P)` or `Γ(Q)` with its transversal tower.
#[derive(Debug, Clone)]
struct Factor {
    group: FiniteGroup,
    /// Generator indices `a_0..a_{n-1}` in `group`.
    gens: Vec<u32>,
    inverse: Vec<u32>,
    from_k: Vec<u32>,
    to_k: Vec<Option<u32>>,
    /// Transversal of `K`; entry 0 is the identity.
    transversal: Vec<u32>,
    /// Largest `j` with the transversal element in `T_j`.
    level: Vec<usize>,
    /// `h = κ·τ` as `(κ, transversal index)`.
    decomp: Vec<(u32, u32)>,
    words: Vec<Vec<usize>>,
    tables: HashMap<FaceType, CosetTables>,
}

impl Factor {
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.group.mul_index(a as usize, b as usize) as u32
    }
}

static NEXT_CONTEXT: AtomicU64 = AtomicU64::new(1);

/// Shortest generator words for every element, following breadth-first closure order.
fn shortest_words(group: &FiniteGroup, gens: &[u32], letters: &[usize]) -> Vec<Vec<usize>> {
    let mut words: Vec<Option<Vec<usize>>> = vec![None; group.order()];
    words[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (&g, &letter) in gens.iter().zip(letters) {
            let y = group.mul_index(x, g as usize);
            if words[y].is_none() {
                let mut w = words[x].clone().expect("visited");
                w.push(letter);
                words[y] = Some(w);
                queue.push_back(y);
            }
        }
    }
    words.into_iter().map(|w| w.expect("generators span the group")).collect()
}

fn inverse_table(group: &FiniteGroup) -> Vec<u32> {
    group.elements().iter().map(|g| group.index_of(&g.inverse()).expect("closed under inverses") as u32).collect()
}

fn subgroup_of(group: &FiniteGroup, gens: &[u32]) -> Result<FiniteGroup, GroupError> {
    let elems: Vec<GroupElement> = gens.iter().map(|&g| group.element(g as usize).clone()).collect();
    group.subgroup(&elems)
}

fn member_mask(group: &FiniteGroup, sub: &FiniteGroup) -> Vec<bool> {
    group.elements().iter().map(|g| sub.contains(g)).collect()
}

/// The amalgam of two string C-groups of rank `n` whose first `n-1` generators
/// generate isomorphic facet groups.
#[derive(Debug, Clone)]
pub struct AmalgamContext {
    id: u64,
    n: usize,
    k: FiniteGroup,
    k_gens: Vec<u32>,
    k_inverse: Vec<u32>,
    k_words: Vec<Vec<usize>>,
    factors: [Factor; 2],
    /// `plus_kappa[j+1]`: membership in `⟨α_{j+1}..α_{n-2}⟩`, for `-1 ≤ j ≤ n-2`.
    plus_kappa: Vec<Vec<bool>>,
    /// `face_kappa[j]`: membership in `⟨α_i : i ≤ n-2, i ≠ j⟩`.
    face_kappa: Vec<Vec<bool>>,
    /// Least element of `(X ∩ K)·κ` per face type.
    k_orbit_min: HashMap<FaceType, Vec<u32>>,
}

/// A generator-respecting map between two groups, built breadth-first; `None` if it
/// is not a well-defined bijective homomorphism.
fn generator_isomorphism(
    from: &FiniteGroup,
    from_gens: &[u32],
    to: &FiniteGroup,
    to_gens: &[u32],
) -> Option<Vec<u32>> {
    if from.order() != to.order() || from_gens.len() != to_gens.len() {
        return None;
    }
    const UNSET: u32 = u32::MAX;
    let mut map = vec![UNSET; from.order()];
    map[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let y = map[x] as usize;
        for (&a, &b) in from_gens.iter().zip(to_gens) {
            let (xa, yb) = (from.mul_index(x, a as usize), to.mul_index(y, b as usize) as u32);
            if map[xa] == UNSET {
                map[xa] = yb;
                queue.push_back(xa);
            } else if map[xa] != yb {
                return None;
            }
        }
    }
    let mut hit = vec![false; to.order()];
    for &y in &map {
        if y == UNSET || std::mem::replace(&mut hit[y as usize], true) {
            return None;
        }
    }
    Some(map)
}

impl AmalgamContext {
    /// Builds the context from the standard generators of `Γ(P)` and `Γ(Q)`.
    pub fn new(p_gens: &[GroupElement], q_gens: &[GroupElement], cap: usize) -> Result<Self, AmalgamError> {
        let n = p_gens.len();
        if n == 0 || q_gens.len() != n {
            return Err(AmalgamError::RankMismatch(n, q_gens.len()));
        }
        for (side, gens) in [(Side::P, p_gens), (Side::Q, q_gens)] {
            let check = is_string_c_group(gens, cap)?;
            if !check.passed() {
                return Err(AmalgamError::NotCGroup(side, check.to_string()));
            }
        }
        let groups = [FiniteGroup::closure(p_gens, cap)?, FiniteGroup::closure(q_gens, cap)?];
        let gen_index = |g: &FiniteGroup, gens: &[GroupElement]| -> Vec<u32> {
            gens.iter().map(|x| g.index_of(x).expect("generator in closure") as u32).collect()
        };
        let gens = [gen_index(&groups[0], p_gens), gen_index(&groups[1], q_gens)];
        let k = if n == 1 {
            FiniteGroup::trivial(groups[0].identity().clone())
        } else {
            groups[0].subgroup(&p_gens[..n - 1])?
        };
        let k_gens = gen_index(&k, &p_gens[..n - 1]);
        // K inside each factor
        let k_in_q = if n == 1 {
            FiniteGroup::trivial(groups[1].identity().clone())
        } else {
            groups[1].subgroup(&q_gens[..n - 1])?
        };
        let k_in_q_gens = gen_index(&k_in_q, &q_gens[..n - 1]);
        let to_q = generator_isomorphism(&k, &k_gens, &k_in_q, &k_in_q_gens).ok_or(AmalgamError::FacetMismatch)?;
        let from_k = [
            k.elements().iter().map(|x| groups[0].index_of(x).expect("K in P") as u32).collect::<Vec<_>>(),
            to_q.iter().map(|&y| groups[1].index_of(k_in_q.element(y as usize)).expect("K in Q") as u32).collect(),
        ];
        let k_inverse = inverse_table(&k);
        let k_letters: Vec<usize> = (0..n - 1).collect();
        let k_words = shortest_words(&k, &k_gens, &k_letters);

        let [gp, gq] = groups;
        let [fp, fq] = from_k;
        let [gens_p, gens_q] = gens;
        let factors = [
            Self::factor(Side::P, n, gp, gens_p, fp, k.order())?,
            Self::factor(Side::Q, n, gq, gens_q, fq, k.order())?,
        ];

        let k_sub = |idx: Vec<u32>| -> Result<Vec<bool>, GroupError> {
            let sub = subgroup_of(&k, &idx)?;
            Ok(member_mask(&k, &sub))
        };
        let plus_kappa = (-1..=n as isize - 2)
            .map(|j| k_sub(k_gens[(j + 1) as usize..].to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        let face_kappa = (0..n.saturating_sub(1))
            .map(|j| k_sub(k_gens.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &g)| g).collect()))
            .collect::<Result<Vec<_>, _>>()?;

        let mut ctx = AmalgamContext {
            id: NEXT_CONTEXT.fetch_add(1, Ordering::Relaxed),
            n,
            k,
            k_gens,
            k_inverse,
            k_words,
            factors,
            plus_kappa,
            face_kappa,
            k_orbit_min: HashMap::new(),
        };
        ctx.build_coset_tables()?;
        Ok(ctx)
    }

    /// Transversal tower of `K` in one factor: `T_{n-1} = {1, a_{n-1}}`, then for `j`
    /// downward each `T_j ⊇ T_{j+1}` is completed to a transversal of `⟨a_j..a_{n-2}⟩`
    /// in `⟨a_j..a_{n-1}⟩` by least new representatives.
    fn factor(side: Side, n: usize, group: FiniteGroup, gens: Vec<u32>, from_k: Vec<u32>, k_order: usize) -> Result<Factor, AmalgamError> {
        let positions = group.sorted_positions();
        let mut to_k = vec![None; group.order()];
        for (ki, &x) in from_k.iter().enumerate() {
            to_k[x as usize] = Some(ki as u32);
        }
        let mut transversal = vec![0u32];
        let mut level = vec![n - 1];
        for j in (0..n).rev() {
            let lower = subgroup_of(&group, &gens[j..n - 1])?;
            let upper = subgroup_of(&group, &gens[j..n])?;
            let cosets = group.right_cosets_with(&lower, &positions)?;
            let mut covered = vec![false; cosets.count()];
            for &t in &transversal {
                if std::mem::replace(&mut covered[cosets.coset_of[t as usize] as usize], true) {
                    return Err(AmalgamError::NotCGroup(side, format!("transversal tower collides at level {j}")));
                }
            }
            let mut members: Vec<u32> =
                upper.elements().iter().map(|x| group.index_of(x).expect("subgroup") as u32).collect();
            members.sort_by_key(|&x| positions[x as usize]);
            for x in members {
                let c = cosets.coset_of[x as usize] as usize;
                if !covered[c] {
                    covered[c] = true;
                    transversal.push(x);
                    level.push(j);
                }
            }
        }
        debug_assert_eq!(transversal.len() * k_order, group.order());
        let inverse = inverse_table(&group);
        let mut tau_of_coset = HashMap::new();
        let k_sub = subgroup_of(&group, &from_k)?;
        let k_cosets = group.right_cosets_with(&k_sub, &positions)?;
        for (ti, &t) in transversal.iter().enumerate() {
            tau_of_coset.insert(k_cosets.coset_of[t as usize], ti as u32);
        }
        let decomp = (0..group.order())
            .map(|h| {
                let ti = tau_of_coset[&k_cosets.coset_of[h]];
                let kappa = group.mul_index(h, inverse[transversal[ti as usize] as usize] as usize);
                (to_k[kappa].expect("h·τ⁻¹ lies in K"), ti)
            })
            .collect();
        let letters: Vec<usize> = (0..n).collect();
        let words = shortest_words(&group, &gens, &letters);
        Ok(Factor { group, gens, inverse, from_k, to_k, transversal, level, decomp, words, tables: HashMap::new() })
    }

    pub fn face_types(&self) -> Vec<FaceType> {
        let mut out: Vec<FaceType> = (0..self.n.saturating_sub(1)).map(FaceType::Sub).collect();
        out.extend([FaceType::Ridge, FaceType::Facet(Side::P), FaceType::Facet(Side::Q)]);
        out
    }

    /// Generators (as factor indices) of the face group met with one factor.
    fn face_group_in(&self, x: FaceType, side: Side) -> Vec<u32> {
        let f = &self.factors[side.index()];
        match x {
            FaceType::Sub(j) => f.gens.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &g)| g).collect(),
            FaceType::Ridge => f.gens[..self.n - 1].to_vec(),
            FaceType::Facet(s) if s == side => f.gens.clone(),
            FaceType::Facet(_) => f.gens[..self.n - 1].to_vec(),
        }
    }

    fn build_coset_tables(&mut self) -> Result<(), AmalgamError> {
        for x in self.face_types() {
            for side in [Side::P, Side::Q] {
                let gens = self.face_group_in(x, side);
                let f = &self.factors[side.index()];
                let h = subgroup_of(&f.group, &gens)?;
                let cosets = f.group.right_cosets(&h)?;
                let mut best: Vec<Option<u32>> = vec![None; cosets.count()];
                for (e, &c) in cosets.coset_of.iter().enumerate() {
                    if let Some(ki) = f.to_k[e] {
                        let slot = &mut best[c as usize];
                        if slot.is_none_or(|b| self.k.element(ki as usize) < self.k.element(b as usize)) {
                            *slot = Some(ki);
                        }
                    }
                }
                let tables = CosetTables {
                    orbit_min: cosets.coset_of.iter().map(|&c| cosets.reps[c as usize]).collect(),
                    strip: cosets.coset_of.iter().map(|&c| best[c as usize]).collect(),
                };
                self.factors[side.index()].tables.insert(x, tables);
            }
            let k_gens: Vec<u32> = match x {
                FaceType::Sub(j) => self.k_gens.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &g)| g).collect(),
                _ => self.k_gens.clone(),
            };
            let h = subgroup_of(&self.k, &k_gens)?;
            let cosets = self.k.right_cosets(&h)?;
            self.k_orbit_min.insert(x, cosets.coset_of.iter().map(|&c| cosets.reps[c as usize]).collect());
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shared_order(&self) -> usize {
        self.k.order()
    }

    pub fn factor_order(&self, side: Side) -> usize {
        self.factors[side.index()].group.order()
    }

    /// `T_{side,j}` as group elements.
    pub fn tower(&self, side: Side, j: usize) -> Vec<GroupElement> {
        let f = &self.factors[side.index()];
        f.transversal
            .iter()
            .zip(&f.level)
            .filter(|&(_, &l)| l >= j)
            .map(|(&t, _)| f.group.element(t as usize).clone())
            .collect()
    }

    pub fn transversal_len(&self, side: Side) -> usize {
        self.factors[side.index()].transversal.len()
    }

    pub fn identity(&self) -> AmalgamWord {
        AmalgamWord { context: self.id, kappa: 0, taus: Vec::new() }
    }

    fn check(&self, w: &AmalgamWord) -> Result<(), AmalgamError> {
        if w.context == self.id {
            Ok(())
        } else {
            Err(AmalgamError::ContextMismatch)
        }
    }

    /// Moves the shared element `kappa`, sitting just after `taus[..upto]`, to the front.
    fn absorb_left(&self, w: &mut AmalgamWord, upto: usize, mut kappa: u32) {
        for i in (0..upto).rev() {
            let (side, t) = w.taus[i];
            let f = &self.factors[side.index()];
            let h = f.mul(f.transversal[t as usize], f.from_k[kappa as usize]);
            let (k2, t2) = f.decomp[h as usize];
            w.taus[i].1 = t2;
            kappa = k2;
        }
        w.kappa = self.k.mul_index(w.kappa as usize, kappa as usize) as u32;
    }

    /// Right-multiplies by the factor element `g` (an index in `side`'s group).
    fn push_element(&self, w: &mut AmalgamWord, side: Side, g: u32) {
        let f = &self.factors[side.index()];
        match w.taus.last().copied() {
            Some((last_side, t)) if last_side == side => {
                let h = f.mul(f.transversal[t as usize], g);
                let (kappa, t2) = f.decomp[h as usize];
                let m = w.taus.len();
                if t2 == 0 {
                    w.taus.pop();
                    self.push_shared(w, kappa);
                } else {
                    w.taus[m - 1].1 = t2;
                    self.absorb_left(w, m - 1, kappa);
                }
            }
            _ => {
                let (kappa, t2) = f.decomp[g as usize];
                let m = w.taus.len();
                self.absorb_left(w, m, kappa);
                if t2 != 0 {
                    w.taus.push((side, t2));
                }
            }
        }
    }

    /// Right-multiplies by a shared element.
    fn push_shared(&self, w: &mut AmalgamWord, kappa: u32) {
        match w.taus.last().copied() {
            None => w.kappa = self.k.mul_index(w.kappa as usize, kappa as usize) as u32,
            Some((side, _)) => {
                let g = self.factors[side.index()].from_k[kappa as usize];
                self.push_element(w, side, g);
            }
        }
    }

    /// Right-multiplies by generator `i`: `α_i` for `i < n`, `β` for `i = n`.
    fn push_letter(&self, w: &mut AmalgamWord, i: usize) {
        if i + 1 < self.n {
            self.push_shared(w, self.k_gens[i]);
        } else if i + 1 == self.n {
            self.push_element(w, Side::P, self.factors[0].gens[i]);
        } else {
            self.push_element(w, Side::Q, self.factors[1].gens[self.n - 1]);
        }
    }

    /// Reduced form of a product of generators (`0..n` for `α_i`, `n` for `β`).
    pub fn normalize(&self, letters: &[usize]) -> Result<AmalgamWord, AmalgamError> {
        let mut w = self.identity();
        for &i in letters {
            if i > self.n {
                return Err(AmalgamError::BadLetter(i.to_string()));
            }
            self.push_letter(&mut w, i);
        }
        Ok(w)
    }

    /// Parses whitespace-separated generator names `a0 … a<n-1> b`; `1` and `|` are skipped.
    pub fn parse_word(&self, text: &str) -> Result<AmalgamWord, AmalgamError> {
        let letters = text
            .split_whitespace()
            .filter(|t| *t != "1" && *t != "|")
            .map(|t| self.letter_index(t))
            .collect::<Result<Vec<_>, _>>()?;
        self.normalize(&letters)
    }

    fn letter_index(&self, token: &str) -> Result<usize, AmalgamError> {
        if token == "b" {
            return Ok(self.n);
        }
        token
            .strip_prefix('a')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&i| i < self.n)
            .ok_or_else(|| AmalgamError::BadLetter(token.to_string()))
    }

    fn letter_name(&self, i: usize) -> String {
        if i == self.n {
            "b".into()
        } else {
            format!("a{i}")
        }
    }

    /// Letters spelling `w`: a shortest word for `κ`, then one for each `τ_i`.
    pub fn letters(&self, w: &AmalgamWord) -> Result<Vec<usize>, AmalgamError> {
        self.check(w)?;
        let mut out = self.k_words[w.kappa as usize].clone();
        for &(side, t) in &w.taus {
            let f = &self.factors[side.index()];
            for &l in &f.words[f.transversal[t as usize] as usize] {
                out.push(if side == Side::Q && l + 1 == self.n { self.n } else { l });
            }
        }
        Ok(out)
    }

    /// `κ | τ_1 | … | τ_m` with each part spelled in generator names.
    pub fn format_word(&self, w: &AmalgamWord) -> Result<String, AmalgamError> {
        self.check(w)?;
        let spell = |letters: &[usize]| -> String {
            if letters.is_empty() {
                "1".into()
            } else {
                letters.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
            }
        };
        let mut parts = vec![spell(&self.k_words[w.kappa as usize])];
        for &(side, t) in &w.taus {
            let f = &self.factors[side.index()];
            let letters: Vec<usize> = f.words[f.transversal[t as usize] as usize]
                .iter()
                .map(|&l| if side == Side::Q && l + 1 == self.n { self.n } else { l })
                .collect();
            parts.push(spell(&letters));
        }
        Ok(parts.join(" | "))
    }

    pub fn multiply(&self, a: &AmalgamWord, b: &AmalgamWord) -> Result<AmalgamWord, AmalgamError> {
        self.check(a)?;
        self.check(b)?;
        let mut w = a.clone();
        self.push_shared(&mut w, b.kappa);
        for &(side, t) in &b.taus {
            let f = &self.factors[side.index()];
            self.push_element(&mut w, side, f.transversal[t as usize]);
        }
        Ok(w)
    }

    pub fn inverse(&self, a: &AmalgamWord) -> Result<AmalgamWord, AmalgamError> {
        self.check(a)?;
        let mut w = self.identity();
        for &(side, t) in a.taus.iter().rev() {
            let f = &self.factors[side.index()];
            self.push_element(&mut w, side, f.inverse[f.transversal[t as usize] as usize]);
        }
        self.push_shared(&mut w, self.k_inverse[a.kappa as usize]);
        Ok(w)
    }

    /// The image of a factor element in `Π`.
    pub fn embed(&self, side: Side, g: &GroupElement) -> Result<AmalgamWord, AmalgamError> {
        let f = &self.factors[side.index()];
        let idx = f.group.index_of(g).ok_or_else(|| GroupError::NotSubgroup(g.to_string()))?;
        let mut w = self.identity();
        self.push_element(&mut w, side, idx as u32);
        Ok(w)
    }

    /// Evaluates a word back in a factor group, if it lies there.
    pub fn evaluate_in(&self, side: Side, w: &AmalgamWord) -> Result<Option<GroupElement>, AmalgamError> {
        self.check(w)?;
        let f = &self.factors[side.index()];
        let mut x = f.from_k[w.kappa as usize];
        match w.taus.as_slice() {
            [] => {}
            [(s, t)] if *s == side => x = f.mul(x, f.transversal[*t as usize]),
            _ => return Ok(None),
        }
        Ok(Some(f.group.element(x as usize).clone()))
    }

    fn tau_level(&self, side: Side, t: u32) -> usize {
        self.factors[side.index()].level[t as usize]
    }

    /// Membership in `Π_j⁺ = ⟨α_{j+1}..α_{n-1}, β⟩`, `-1 ≤ j ≤ n-2`.
    pub fn in_plus(&self, w: &AmalgamWord, j: isize) -> Result<bool, AmalgamError> {
        self.check(w)?;
        if j < -1 || j > self.n as isize - 2 {
            return Err(AmalgamError::InvalidRank(j));
        }
        let need = (j + 1) as usize;
        Ok(self.plus_kappa[need][w.kappa as usize] && w.taus.iter().all(|&(s, t)| self.tau_level(s, t) >= need))
    }

    /// Membership in the subgroup whose cosets are faces of type `x`.
    pub fn in_face_group(&self, w: &AmalgamWord, x: FaceType) -> Result<bool, AmalgamError> {
        self.check(w)?;
        Ok(match x {
            FaceType::Sub(j) => {
                if j + 1 >= self.n {
                    return Err(AmalgamError::InvalidRank(j as isize));
                }
                self.face_kappa[j][w.kappa as usize] && w.taus.iter().all(|&(s, t)| self.tau_level(s, t) > j)
            }
            FaceType::Ridge => w.taus.is_empty(),
            FaceType::Facet(side) => match w.taus.as_slice() {
                [] => true,
                [(s, _)] => *s == side,
                _ => false,
            },
        })
    }

    /// A canonical representative of the right coset `X·w`, of least length.
    ///
    /// Leading transversal elements are stripped while the running prefix can be
    /// pushed back into `K` by the face group; the first one that cannot be is replaced
    /// by the least element of its coset.
    pub fn canonical(&self, w: &AmalgamWord, x: FaceType) -> Result<AmalgamWord, AmalgamError> {
        self.check(w)?;
        if let FaceType::Sub(j) = x {
            if j + 1 >= self.n {
                return Err(AmalgamError::InvalidRank(j as isize));
            }
        }
        let mut cur = w.kappa;
        for (i, &(side, t)) in w.taus.iter().enumerate() {
            let f = &self.factors[side.index()];
            let tables = &f.tables[&x];
            let y = f.mul(f.from_k[cur as usize], f.transversal[t as usize]);
            match tables.strip[y as usize] {
                Some(k) => cur = k,
                None => {
                    let (kappa, t2) = f.decomp[tables.orbit_min[y as usize] as usize];
                    let mut taus = vec![(side, t2)];
                    taus.extend_from_slice(&w.taus[i + 1..]);
                    return Ok(AmalgamWord { context: self.id, kappa, taus });
                }
            }
        }
        Ok(AmalgamWord { context: self.id, kappa: self.k_orbit_min[&x][cur as usize], taus: Vec::new() })
    }

    /// `⟨α_{n-1}, β⟩` words of each length alternate single generators: the
    /// `m`-th power of `α_{n-1}β` has `2m` transversal elements.
    pub fn dihedral_power(&self, m: usize) -> AmalgamWord {
        let letters: Vec<usize> = (0..m).flat_map(|_| [self.n - 1, self.n]).collect();
        self.normalize(&letters).expect("valid letters")
    }

    /// Whether the generator map `Γ(P) → Γ(Q)` (identity on the shared generators,
    /// `α_{n-1} ↦ β`) is an isomorphism; then the universal polytope is regular.
    pub fn universal_is_regular(&self) -> bool {
        let [p, q] = &self.factors;
        generator_isomorphism(&p.group, &p.gens, &q.group, &q.gens).is_some()
    }

    /// Every face whose canonical representative has at most `radius` transversal elements.
    pub fn ball(&self, radius: usize) -> Ball {
        let mut seen: BTreeMap<(FaceType, AmalgamWord), ()> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for x in self.face_types() {
            for kappa in 0..self.k.order() as u32 {
                let w = AmalgamWord { context: self.id, kappa, taus: Vec::new() };
                let c = self.canonical(&w, x).expect("own word");
                if seen.insert((x, c.clone()), ()).is_none() {
                    queue.push_back((x, c));
                }
            }
        }
        while let Some((x, c)) = queue.pop_front() {
            if c.len() >= radius {
                continue;
            }
            for side in [Side::P, Side::Q] {
                let f = &self.factors[side.index()];
                for &t in &f.transversal[1..] {
                    let mut w = c.clone();
                    self.push_element(&mut w, side, t);
                    let c2 = self.canonical(&w, x).expect("own word");
                    if c2.len() <= radius && seen.insert((x, c2.clone()), ()).is_none() {
                        queue.push_back((x, c2));
                    }
                }
            }
        }
        let mut keys: Vec<(FaceType, AmalgamWord)> = seen.into_keys().collect();
        keys.sort_by(|a, b| {
            (a.0.rank(self.n), a.0, a.1.len(), &a.1).cmp(&(b.0.rank(self.n), b.0, b.1.len(), &b.1))
        });
        let mut poset = FacePoset::new(self.n as i32 + 1);
        let bottom = poset.add_face(-1, FaceKind::Bottom, FaceRep::None);
        let mut index = HashMap::new();
        for key in &keys {
            let rep = FaceRep::Text(self.format_word(&key.1).expect("own word"));
            let id = poset.add_face(key.0.rank(self.n) as i32, key.0.kind(self.n), rep);
            index.insert(key.clone(), id);
        }
        let top = poset.add_face(self.n as i32 + 1, FaceKind::Top(self.n + 1), FaceRep::None);
        for (key, &id) in &index {
            let (x, c) = key;
            match x.rank(self.n) {
                0 => poset.add_cover(bottom, id),
                r if r == self.n => poset.add_cover(id, top),
                _ => {}
            }
            for (lower_type, h) in self.lower_faces(*x) {
                let mut w = h.clone();
                w = self.multiply(&w, c).expect("own words");
                let lower = self.canonical(&w, lower_type).expect("own word");
                if let Some(&lo) = index.get(&(lower_type, lower)) {
                    poset.add_cover(lo, id);
                }
            }
        }
        poset.finish();
        Ball { radius, poset, keys, index }
    }

    /// For faces of type `x`, the type one rank down and left multipliers `h` such
    /// that the faces covered by `X·μ` are exactly the cosets of `h·μ`.
    fn lower_faces(&self, x: FaceType) -> Vec<(FaceType, AmalgamWord)> {
        let shared = |mask: Option<&Vec<bool>>| -> Vec<AmalgamWord> {
            (0..self.k.order() as u32)
                .filter(|&k| mask.is_none_or(|m| m[k as usize]))
                .map(|kappa| AmalgamWord { context: self.id, kappa, taus: Vec::new() })
                .collect()
        };
        match x {
            FaceType::Sub(0) => Vec::new(),
            FaceType::Sub(j) => shared(Some(&self.face_kappa[j])).into_iter().map(|h| (FaceType::Sub(j - 1), h)).collect(),
            FaceType::Ridge if self.n == 1 => Vec::new(),
            FaceType::Ridge => shared(None).into_iter().map(|h| (FaceType::Sub(self.n - 2), h)).collect(),
            FaceType::Facet(side) => {
                let f = &self.factors[side.index()];
                (0..f.group.order() as u32)
                    .map(|g| {
                        let mut w = self.identity();
                        self.push_element(&mut w, side, g);
                        (FaceType::Ridge, w)
                    })
                    .collect()
            }
        }
    }
}

/// A finite piece of the universal polytope: faces of canonical length `≤ radius`,
/// with covers among them, plus a least and a greatest face.
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: usize,
    pub poset: FacePoset,
    /// Face keys in poset order (the improper faces excluded).
    keys: Vec<(FaceType, AmalgamWord)>,
    index: HashMap<(FaceType, AmalgamWord), usize>,
}

impl Ball {
    pub fn keys(&self) -> &[(FaceType, AmalgamWord)] {
        &self.keys
    }

    /// Poset id of a proper face key.
    pub fn face_id(&self, key: &(FaceType, AmalgamWord)) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Facets with every face below them inside the ball.
    pub fn complete_facets(&self) -> Vec<usize> {
        self.keys
            .iter()
            .enumerate()
            .filter(|(_, (x, w))| matches!(x, FaceType::Facet(_)) && w.len() < self.radius)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Shape of the ridge-facet graph around the base `(n-2)`-face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RidgeWalk {
    pub ridges: usize,
    pub facets: usize,
    /// The graph is a simple path (no closed cycle).
    pub open: bool,
    /// Every ridge lies in one facet of each kind.
    pub alternating: bool,
}

/// Walks the ridges `K·w` over the base `(n-2)`-face for every `w ∈ ⟨α_{n-1}, β⟩`
/// of length at most `radius`, with the facets `Γ(P)·w`, `Γ(Q)·w` through them.
pub fn ridge_walk(ctx: &AmalgamContext, radius: usize) -> RidgeWalk {
    let n = ctx.n();
    let mut words = vec![Vec::new()];
    for first in [n - 1, n] {
        for len in 1..=radius {
            words.push((0..len).map(|i| if i % 2 == 0 { first } else { 2 * n - 1 - first }).collect::<Vec<_>>());
        }
    }
    let mut ridge_ids: HashMap<AmalgamWord, usize> = HashMap::new();
    let mut facet_ids: HashMap<(Side, AmalgamWord), usize> = HashMap::new();
    let mut edges = Vec::new();
    for letters in &words {
        let w = ctx.normalize(letters).expect("valid letters");
        let ridge = ctx.canonical(&w, FaceType::Ridge).expect("own word");
        let next = ridge_ids.len();
        let r = *ridge_ids.entry(ridge).or_insert(next);
        for side in [Side::P, Side::Q] {
            let facet = ctx.canonical(&w, FaceType::Facet(side)).expect("own word");
            let next = facet_ids.len();
            let f = *facet_ids.entry((side, facet)).or_insert(next);
            edges.push((r, f));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let (ridges, facets) = (ridge_ids.len(), facet_ids.len());
    let mut degree = vec![0usize; ridges];
    let mut parent: Vec<usize> = (0..ridges + facets).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut cycle = false;
    for &(r, f) in &edges {
        degree[r] += 1;
        let (a, b) = (root(&mut parent, r), root(&mut parent, ridges + f));
        if a == b {
            cycle = true;
        }
        parent[a] = b;
    }
    let connected = edges.len() + 1 == ridges + facets;
    RidgeWalk { ridges, facets, open: !cycle && connected, alternating: degree.iter().all(|&d| d == 2) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::{builtin, StringFixture};
    use crate::group::DEFAULT_CAP;

    fn gens(name: &str) -> Vec<GroupElement> {
        StringFixture::parse(builtin(&format!("{name}.sc")).unwrap()).unwrap().generators()
    }

    fn ctx(p: &str, q: &str) -> AmalgamContext {
        AmalgamContext::new(&gens(p), &gens(q), DEFAULT_CAP).unwrap()
    }

    #[test]
    fn transversal_sizes() {
        let t = ctx("triangle", "triangle");
        assert_eq!((t.transversal_len(Side::P), t.transversal_len(Side::Q)), (3, 3));
        let to = ctx("tetrahedron", "octahedron");
        assert_eq!((to.transversal_len(Side::P), to.transversal_len(Side::Q)), (4, 8));
        assert_eq!(to.tower(Side::P, 2).len(), 2);
        assert_eq!(to.tower(Side::Q, 1).len(), 4);
    }

    #[test]
    fn towers_are_nested() {
        let c = ctx("tetrahedron", "octahedron");
        for side in [Side::P, Side::Q] {
            for j in 0..2 {
                let lower = c.tower(side, j + 1);
                let upper = c.tower(side, j);
                assert!(lower.iter().all(|t| upper.contains(t)));
            }
            assert!(c.tower(side, 2)[0].is_identity());
        }
    }

    #[test]
    fn basic_normal_forms() {
        let c = ctx("tetrahedron", "tetrahedron");
        assert!(c.normalize(&[0, 0]).unwrap().is_identity());
        let a2 = c.normalize(&[2]).unwrap();
        assert_eq!(a2.kappa(), 0);
        assert_eq!(a2.taus().len(), 1);
        assert_eq!(a2.taus()[0].0, Side::P);
        for m in 1..=50 {
            assert_eq!(c.dihedral_power(m).len(), 2 * m);
        }
    }

    #[test]
    fn mismatched_facets_are_rejected() {
        assert!(matches!(
            AmalgamContext::new(&gens("triangle"), &gens("tetrahedron"), DEFAULT_CAP),
            Err(AmalgamError::RankMismatch(2, 3))
        ));
        let c1 = ctx("triangle", "square");
        let c2 = ctx("triangle", "square");
        assert_eq!(c1.multiply(&c1.identity(), &c2.identity()), Err(AmalgamError::ContextMismatch));
    }

    #[test]
    fn regularity_of_universal_polytope() {
        assert!(ctx("tetrahedron", "tetrahedron").universal_is_regular());
        assert!(!ctx("tetrahedron", "octahedron").universal_is_regular());
        assert!(ctx("hexagon", "hexagon").universal_is_regular());
    }

    #[test]
    fn radius_zero_ball_is_two_base_flags() {
        let c = ctx("triangle", "triangle");
        let b = c.ball(0);
        // the base edge K, its two vertices, and the two polygons through it
        assert_eq!(b.poset.faces_of_rank(0).len(), 2);
        assert_eq!(b.poset.faces_of_rank(1).len(), 1);
        assert_eq!(b.poset.faces_of_rank(2).len(), 2);
    }
}
