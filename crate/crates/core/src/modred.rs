//! Crystallographic tail-triangle Coxeter groups as integral reflection groups,
//! reduced modulo a prime.
//!
//! All arithmetic is exact: the only trigonometric input is `4cos²(π/m)`, which is
//! an integer for every crystallographic label.

use std::fmt;

use num_integer::{Integer, Roots};
use num_rational::Ratio;

use crate::group::{is_prime, GroupElement, GroupError, MatModP};
use crate::ttgroup::{CheckMethod, Label, TailTriangleCGroup, TailTriangleDiagram, TailTriangleGroup, TtError};
use crate::wythoff::{build_polytope, SemiregularPolytope, WythoffError};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModredError {
    #[error("diagram is not crystallographic: {0}")]
    NotCrystallographic(String),
    #[error("constant between nodes {0} and {1} is not an integer for these lengths")]
    NonIntegralSystem(usize, usize),
    #[error("bad squared lengths: {0}")]
    BadLengths(String),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("ringings are defined for the rank parameter 3 only, got {0}")]
    WrongRank(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    TailTriangle(#[from] TtError),
    #[error(transparent)]
    Wythoff(#[from] WythoffError),
}

/// `4cos²(π/m)` for the crystallographic labels.
pub fn four_cos_squared(label: Label) -> Option<i64> {
    match label {
        Label::Finite(2) => Some(0),
        Label::Finite(3) => Some(1),
        Label::Finite(4) => Some(2),
        Label::Finite(6) => Some(3),
        Label::Infinite => Some(4),
        Label::Finite(_) => None,
    }
}

/// Checks the label set and, when the triangle is a genuine circuit, that it
/// carries zero or two branches labelled 4 and zero or two labelled 6.
pub fn is_crystallographic(d: &TailTriangleDiagram) -> Result<(), String> {
    let n = d.n();
    for i in 0..=n {
        for j in i + 1..=n {
            let l = d.label(i, j);
            if four_cos_squared(l).is_none() {
                return Err(format!("label {l} between nodes {i} and {j} is not 2, 3, 4, 6 or inf"));
            }
        }
    }
    if let Some((p, q, k)) = d.triangle() {
        let circuit = [p, q, k];
        if circuit.iter().all(|&l| l != Label::Finite(2)) {
            for m in [4, 6] {
                let count = circuit.iter().filter(|&&l| l == Label::Finite(m)).count();
                if count % 2 == 1 {
                    return Err(format!("triangle ({p},{q},{k}) has {count} branch(es) labelled {m}"));
                }
            }
        }
    }
    Ok(())
}

/// Parses `1,1,2,4` (entries may be fractions such as `1/2`).
pub fn parse_lengths(text: &str) -> Result<Vec<Rational>, ModredError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<Rational>().map_err(|_| ModredError::BadLengths(format!("cannot read `{s}`")))
        })
        .collect()
}

/// Integer structure constants for a rescaled root basis `c_0..c_{n-1}, d`.
///
/// `constants[i][j]` is the coefficient in `g_i(e_j) = e_j + constants[i][j]·e_i`;
/// the diagonal is `-2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralReflectionSystem {
    diagram: TailTriangleDiagram,
    squared_lengths: Vec<Rational>,
    constants: Vec<Vec<i64>>,
}

/// `sqrt(x)` when `x` is the square of a rational.
fn rational_sqrt(x: Rational) -> Option<Rational> {
    let (n, d) = (*x.numer(), *x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (rn * rn == n && rd * rd == d).then(|| Rational::new(rn, rd))
}

/// Scales the roots to the given squared lengths and solves for the constants.
pub fn rescale(d: &TailTriangleDiagram, squared_lengths: &[Rational]) -> Result<IntegralReflectionSystem, ModredError> {
    is_crystallographic(d).map_err(ModredError::NotCrystallographic)?;
    let dim = d.n() + 1;
    if squared_lengths.len() != dim {
        return Err(ModredError::BadLengths(format!("need {dim} lengths, got {}", squared_lengths.len())));
    }
    if squared_lengths.iter().any(|x| *x <= Rational::from(0)) {
        return Err(ModredError::BadLengths("lengths must be positive".into()));
    }
    let mut constants = vec![vec![0i64; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            if i == j {
                constants[i][j] = -2;
                continue;
            }
            let c = four_cos_squared(d.label(i, j)).expect("checked crystallographic");
            // constants[i][j]² = 4cos²·N_j/N_i and the constant is non-negative
            let square = Rational::from(c) * squared_lengths[j] / squared_lengths[i];
            let root = rational_sqrt(square).filter(|r| r.is_integer()).ok_or(ModredError::NonIntegralSystem(i, j))?;
            constants[i][j] = root.to_integer();
        }
    }
    Ok(IntegralReflectionSystem { diagram: d.clone(), squared_lengths: squared_lengths.to_vec(), constants })
}

fn determinant(mut m: Vec<Vec<Rational>>) -> Rational {
    let dim = m.len();
    let mut det = Rational::from(1);
    for col in 0..dim {
        let Some(pivot) = (col..dim).find(|&r| m[r][col] != Rational::from(0)) else {
            return Rational::from(0);
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..dim {
            let factor = m[r][col] / m[col][col];
            let pivot = m[col].clone();
            for (x, y) in m[r].iter_mut().zip(&pivot).skip(col) {
                *x -= factor * y;
            }
        }
    }
    det
}

impl IntegralReflectionSystem {
    pub fn dim(&self) -> usize {
        self.constants.len()
    }

    pub fn diagram(&self) -> &TailTriangleDiagram {
        &self.diagram
    }

    pub fn squared_lengths(&self) -> &[Rational] {
        &self.squared_lengths
    }

    pub fn constant(&self, i: usize, j: usize) -> i64 {
        self.constants[i][j]
    }

    /// Integer matrix of generator `i`, row-major; column `j` is the image of `e_j`.
    pub fn generator_matrix(&self, i: usize) -> Vec<i64> {
        let dim = self.dim();
        let mut m = vec![0i64; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                m[r * dim + c] = i64::from(r == c) + if r == i { self.constants[i][c] } else { 0 };
            }
        }
        m
    }

    /// Inner products of the rescaled basis: `N_i` on the diagonal, `-constants[i][j]·N_i/2` off it.
    pub fn gram(&self) -> Vec<Vec<Rational>> {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Rational::from(-self.constants[i][j]) * self.squared_lengths[i] / Rational::from(2))
                    .collect()
            })
            .collect()
    }

    pub fn discriminant(&self) -> Rational {
        determinant(self.gram())
    }

    /// Reduces the generators and the (integrally rescaled) form mod `p`.
    pub fn reduce_mod_p(&self, p: u32) -> Result<ModPGroupSpec, ModredError> {
        if !is_prime(p) {
            return Err(ModredError::NotPrime(p));
        }
        let dim = self.dim();
        let generators = (0..dim)
            .map(|i| MatModP::new(p, dim, &self.generator_matrix(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let gram = self.gram();
        let scale = gram.iter().flatten().fold(1i64, |acc, x| acc.lcm(x.denom()));
        let p64 = p as i64;
        let form = gram
            .iter()
            .flatten()
            .map(|x| (x * Rational::from(scale)).to_integer().rem_euclid(p64) as u32)
            .collect();
        let disc = self.discriminant();
        let discriminant = (disc.denom() % p64 != 0).then(|| {
            let inv = MatModP::new(p, 1, &[*disc.denom()]).expect("denominator is a unit").inverse().entry(0, 0);
            (disc.numer().rem_euclid(p64) as u64 * inv as u64 % p as u64) as u32
        });
        Ok(ModPGroupSpec { p, system: self.clone(), generators, form, form_scale: scale, discriminant })
    }
}

impl fmt::Display for IntegralReflectionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths: Vec<String> = self.squared_lengths.iter().map(Rational::to_string).collect();
        writeln!(f, "diagram = {}", self.diagram)?;
        writeln!(f, "lengths = {}", lengths.join(","))?;
        for row in &self.constants {
            let row: Vec<String> = row.iter().map(i64::to_string).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// A reflection system reduced modulo `p`.
#[derive(Debug, Clone)]
pub struct ModPGroupSpec {
    p: u32,
    system: IntegralReflectionSystem,
    generators: Vec<MatModP>,
    /// `form_scale · Gram`, reduced mod `p`, row-major.
    form: Vec<u32>,
    form_scale: i64,
    /// The discriminant mod `p`, when its denominator is a unit.
    discriminant: Option<u32>,
}

/// Which pair of nodes of the `n = 3` star plays the role of `(α_2, β)`.
///
/// The star has hub `r1` joined to `r0`, `r2` and `s2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ringing {
    /// `(α_0, α_1, α_2, β) = (r0, r1, r2, s2)`.
    First,
    /// `(r2, r1, r0, s2)`.
    Second,
    /// `(s2, r1, r2, r0)`.
    Third,
}

impl Ringing {
    pub const ALL: [Ringing; 3] = [Ringing::First, Ringing::Second, Ringing::Third];

    pub fn order(self) -> [usize; 4] {
        match self {
            Ringing::First => [0, 1, 2, 3],
            Ringing::Second => [2, 1, 0, 3],
            Ringing::Third => [3, 1, 2, 0],
        }
    }

    pub fn from_number(k: u8) -> Option<Ringing> {
        match k {
            1 => Some(Ringing::First),
            2 => Some(Ringing::Second),
            3 => Some(Ringing::Third),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl ModPGroupSpec {
    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn system(&self) -> &IntegralReflectionSystem {
        &self.system
    }

    pub fn generators(&self) -> &[MatModP] {
        &self.generators
    }

    pub fn discriminant(&self) -> Option<u32> {
        self.discriminant
    }

    /// The integer the Gram matrix was multiplied by before reduction.
    pub fn form_scale(&self) -> i64 {
        self.form_scale
    }

    /// The reduced form is degenerate (its scaled determinant vanishes mod `p`).
    pub fn is_singular(&self) -> bool {
        let dim = self.system.dim();
        let entries: Vec<i64> = self.form.iter().map(|&x| x as i64).collect();
        MatModP::new(self.p, dim, &entries).is_err()
    }

    /// `x ↦ (form_scale·B) x` applied to column `col` of `m`, mod `p`.
    fn form_times(&self, m: &MatModP) -> Vec<u32> {
        let dim = self.system.dim();
        let p = self.p as u64;
        let mut out = vec![0u32; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let acc: u64 = (0..dim).map(|k| self.form[r * dim + k] as u64 * m.entry(k, c) as u64).sum();
                out[r * dim + c] = (acc % p) as u32;
            }
        }
        out
    }

    /// Whether `m` preserves the reduced form: `mᵀ B m = B`.
    pub fn preserves_form(&self, m: &MatModP) -> bool {
        let bm = self.form_times(m);
        let dim = self.system.dim();
        let p = self.p as u64;
        (0..dim).all(|r| {
            (0..dim).all(|c| {
                let acc: u64 = (0..dim).map(|k| m.entry(k, r) as u64 * bm[k * dim + c] as u64).sum();
                (acc % p) as u32 == self.form[r * dim + c]
            })
        })
    }

    /// Whether `m - I` maps every vector into the radical of the form.
    pub fn moves_into_radical(&self, m: &MatModP) -> bool {
        let dim = self.system.dim();
        let p = self.p as u64;
        let bm = self.form_times(m);
        (0..dim * dim).all(|i| (bm[i] as u64 + p - self.form[i] as u64).is_multiple_of(p))
    }

    fn elements(&self, order: [usize; 4]) -> (Vec<GroupElement>, GroupElement) {
        let alphas = order[..3].iter().map(|&i| GroupElement::Mat(self.generators[i].clone())).collect();
        (alphas, GroupElement::Mat(self.generators[order[3]].clone()))
    }

    /// The group with generators in diagram order, as a tail-triangle group.
    pub fn to_group(&self, cap: usize) -> Result<TailTriangleGroup, ModredError> {
        let mut gens: Vec<GroupElement> = self.generators.iter().cloned().map(GroupElement::Mat).collect();
        let beta = gens.pop().expect("at least two generators");
        Ok(TailTriangleGroup::verify(gens, beta, cap)?)
    }

    /// The group with generators permuted by `ringing`; the diagram must be the `n = 3` star.
    pub fn ringing_group(&self, ringing: Ringing, cap: usize) -> Result<TailTriangleGroup, ModredError> {
        if self.system.diagram().n() != 3 {
            return Err(ModredError::WrongRank(self.system.diagram().n()));
        }
        let (alphas, beta) = self.elements(ringing.order());
        Ok(TailTriangleGroup::verify(alphas, beta, cap)?)
    }

    /// Certifies the given ringing with the reduced intersection check.
    pub fn certify_ringing(&self, ringing: Ringing, cap: usize) -> Result<TailTriangleCGroup, ModredError> {
        Ok(self.ringing_group(ringing, cap)?.certify(CheckMethod::Reduced)?)
    }
}

/// Polytopes of all three ringings and which pairs are isomorphic.
pub struct RingingReport {
    pub polytopes: Vec<(Ringing, TailTriangleCGroup, SemiregularPolytope)>,
    /// `(a, b, isomorphic)` for each pair `a < b`.
    pub pairs: Vec<(Ringing, Ringing, bool)>,
}

pub fn three_ringings(spec: &ModPGroupSpec, cap: usize) -> Result<RingingReport, ModredError> {
    let mut polytopes = Vec::new();
    for ringing in Ringing::ALL {
        let g = spec.certify_ringing(ringing, cap)?;
        let poly = build_polytope(&g)?;
        polytopes.push((ringing, g, poly));
    }
    let mut pairs = Vec::new();
    for a in 0..3 {
        for b in a + 1..3 {
            let iso = crate::poset::poset_isomorphic(&polytopes[a].2, &polytopes[b].2).is_some();
            pairs.push((polytopes[a].0, polytopes[b].0, iso));
        }
    }
    Ok(RingingReport { polytopes, pairs })
}

/// Outcome for one candidate length vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LengthOutcome {
    NonIntegral(usize, usize),
    NotCGroup(String),
    CGroup { order: usize },
}

/// Tries every length vector in `{1,2,3,4,6}^{n+1}` (up to overall scaling) and reports
/// which give a tail-triangle C-group mod `p`.
pub fn search_lengths(d: &TailTriangleDiagram, p: u32, cap: usize) -> Result<Vec<(Vec<Rational>, LengthOutcome)>, ModredError> {
    is_crystallographic(d).map_err(ModredError::NotCrystallographic)?;
    if !is_prime(p) {
        return Err(ModredError::NotPrime(p));
    }
    const CHOICES: [i64; 5] = [1, 2, 3, 4, 6];
    let dim = d.n() + 1;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for code in 0..CHOICES.len().pow(dim as u32) {
        let lengths: Vec<Rational> =
            (0..dim).map(|i| Rational::from(CHOICES[code / CHOICES.len().pow(i as u32) % CHOICES.len()])).collect();
        let normalized: Vec<Rational> = lengths.iter().map(|x| x / lengths[0]).collect();
        if !seen.insert(normalized) {
            continue;
        }
        let outcome = match rescale(d, &lengths) {
            Err(ModredError::NonIntegralSystem(i, j)) => LengthOutcome::NonIntegral(i, j),
            Err(e) => return Err(e),
            Ok(sys) => {
                let spec = sys.reduce_mod_p(p)?;
                match spec.to_group(cap).and_then(|g| Ok(g.certify(CheckMethod::Reduced)?)) {
                    Ok(g) => LengthOutcome::CGroup { order: g.order() },
                    Err(e) => LengthOutcome::NotCGroup(e.to_string()),
                }
            }
        };
        out.push((lengths, outcome));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_CAP;

    fn diagram64() -> TailTriangleDiagram {
        "tail=[3] triangle=(4,inf,2)".parse().unwrap()
    }

    fn lengths(s: &str) -> Vec<Rational> {
        parse_lengths(s).unwrap()
    }

    #[test]
    fn crystallographic_rules() {
        assert!(is_crystallographic(&diagram64()).is_ok());
        let five: TailTriangleDiagram = "tail=[5] triangle=(3,3,2)".parse().unwrap();
        assert!(is_crystallographic(&five).unwrap_err().contains('5'));
        let one_four: TailTriangleDiagram = "tail=[3] triangle=(4,3,3)".parse().unwrap();
        assert!(is_crystallographic(&one_four).is_err());
        let two_fours: TailTriangleDiagram = "tail=[3] triangle=(4,4,3)".parse().unwrap();
        assert!(is_crystallographic(&two_fours).is_ok());
        // a label 2 on the triangle leaves a tree, so the circuit rule is vacuous
        let tree: TailTriangleDiagram = "tail=[] triangle=(4,3,2)".parse().unwrap();
        assert!(is_crystallographic(&tree).is_ok());
    }

    #[test]
    fn constants_for_the_4_inf_diagram() {
        let sys = rescale(&diagram64(), &lengths("1,1,2,4")).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let product = sys.constant(i, j) * sys.constant(j, i);
                let expected = if i == j { 4 } else { four_cos_squared(sys.diagram().label(i, j)).unwrap() };
                assert_eq!(product, expected, "({i},{j})");
                assert!(i == j || sys.constant(i, j) >= 0);
            }
        }
        assert_eq!((sys.constant(1, 2), sys.constant(2, 1)), (2, 1));
        assert_eq!((sys.constant(1, 3), sys.constant(3, 1)), (4, 1));
        assert_eq!(sys.discriminant(), Rational::from(-6));
    }

    #[test]
    fn equal_lengths_fail_on_the_label_4_pair() {
        let err = rescale(&diagram64(), &lengths("1,1,1,1")).unwrap_err();
        assert_eq!(err, ModredError::NonIntegralSystem(1, 2));
    }

    #[test]
    fn simply_laced_constants_are_zero_or_one() {
        let d: TailTriangleDiagram = "tail=[3] triangle=(3,3,2)".parse().unwrap();
        let sys = rescale(&d, &lengths("1,1,1,1")).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!([0, 1].contains(&sys.constant(i, j)));
                }
            }
        }
    }

    #[test]
    fn reduced_generators_are_involutive_isometries() {
        let sys = rescale(&diagram64(), &lengths("1,1,2,4")).unwrap();
        for p in [2, 3, 5, 7] {
            let spec = sys.reduce_mod_p(p).unwrap();
            for m in spec.generators() {
                assert!(m.compose(m).unwrap().is_identity());
                assert!(spec.preserves_form(m), "p = {p}");
            }
            assert_eq!(spec.discriminant(), Some((-6i64).rem_euclid(p as i64) as u32));
            assert_eq!(spec.is_singular(), p <= 3);
        }
        assert!(matches!(sys.reduce_mod_p(4), Err(ModredError::NotPrime(4))));
    }

    #[test]
    fn orders_mod_2_and_3() {
        let sys = rescale(&diagram64(), &lengths("1,1,2,4")).unwrap();
        let g2 = sys.reduce_mod_p(2).unwrap().to_group(DEFAULT_CAP).unwrap();
        assert_eq!(g2.order(), 96);
        assert_eq!(g2.diagram().label(1, 3), Label::Finite(4));
        let g3 = sys.reduce_mod_p(3).unwrap().to_group(DEFAULT_CAP).unwrap();
        assert_eq!(g3.order(), 1296);
    }

    #[test]
    fn ringing_permutations() {
        assert_eq!(Ringing::Second.order(), [2, 1, 0, 3]);
        assert_eq!(Ringing::from_number(3), Some(Ringing::Third));
        assert_eq!(Ringing::Third.number(), 3);
        assert_eq!(Ringing::from_number(4), None);
    }
}
