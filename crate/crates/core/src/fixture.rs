//! Line-oriented fixture files for tail-triangle groups and string C-groups.
//!
//! ```text
//! tail-triangle n=3 degree=12
//! alpha0 = (5,10)(6,9)(7,12)(8,11)
//! ...
//! beta = (5,8)(6,7)(9,12)(10,11)
//! expect order=96
//! ```
//!
//! String C-groups use the header `string-c-group rank=<n> degree=<N>` and lines
//! `rho<i> = <cycles>`. Reflection data for reduction mod p uses the header `modred`
//! and lines `diagram = tail=[..] triangle=(p,q,k)` and `lengths = l_0,..,l_n`. Blank lines and `#` comments are skipped when parsing and
//! dropped when printing; canonical text round-trips byte for byte.

use std::fmt;

use crate::group::{GroupElement, Perm};
use crate::modred::{parse_lengths, Rational};
use crate::ttgroup::{TailTriangleDiagram, TailTriangleGroup, TtError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FixtureError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FixtureError {
    FixtureError { line, message: message.into() }
}

/// Built-in copies of the shipped fixtures, keyed by file name.
pub const BUILTIN: &[(&str, &str)] = &[
    ("tomotope.tt", include_str!("../fixtures/tomotope.tt")),
    ("m66_240a.tt", include_str!("../fixtures/m66_240a.tt")),
    ("b3_digon.tt", include_str!("../fixtures/b3_digon.tt")),
    ("d4.tt", include_str!("../fixtures/d4.tt")),
    ("bad_commutation.tt", include_str!("../fixtures/bad_commutation.tt")),
    ("triangle.sc", include_str!("../fixtures/triangle.sc")),
    ("square.sc", include_str!("../fixtures/square.sc")),
    ("hexagon.sc", include_str!("../fixtures/hexagon.sc")),
    ("tetrahedron.sc", include_str!("../fixtures/tetrahedron.sc")),
    ("octahedron.sc", include_str!("../fixtures/octahedron.sc")),
    ("hemioctahedron.sc", include_str!("../fixtures/hemioctahedron.sc")),
    ("diagram64.mr", include_str!("../fixtures/diagram64.mr")),
    ("d4_coxeter.mr", include_str!("../fixtures/d4_coxeter.mr")),
];

/// Looks up a built-in fixture by file name, with or without its extension.
pub fn builtin(name: &str) -> Option<&'static str> {
    let base = name.rsplit('/').next().unwrap_or(name);
    BUILTIN
        .iter()
        .find(|(file, _)| *file == base || file.split('.').next() == Some(base))
        .map(|(_, text)| *text)
}

/// Meaningful lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses `word key=value key=value` and returns the values in `keys` order.
fn parse_header(line_no: usize, line: &str, word: &str, keys: &[&str]) -> Result<Vec<usize>, FixtureError> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(word) {
        return Err(err(line_no, format!("expected header starting with `{word}`")));
    }
    let pairs: Vec<(&str, &str)> = parts
        .map(|p| p.split_once('=').ok_or_else(|| err(line_no, format!("bad header field `{p}`"))))
        .collect::<Result<_, _>>()?;
    keys.iter()
        .map(|key| {
            let (_, v) = pairs
                .iter()
                .find(|(k, _)| k == key)
                .ok_or_else(|| err(line_no, format!("header lacks `{key}=`")))?;
            v.parse().map_err(|_| err(line_no, format!("bad value `{v}` for `{key}`")))
        })
        .collect()
}

fn parse_expect(line_no: usize, rest: &str) -> Result<u64, FixtureError> {
    let v = rest
        .trim()
        .strip_prefix("order=")
        .ok_or_else(|| err(line_no, "expected `expect order=<m>`"))?;
    v.parse().map_err(|_| err(line_no, format!("bad order `{v}`")))
}

/// Generator lines `<prefix><i> = <cycles>` (plus `beta` when `with_beta`).
struct Body {
    indexed: Vec<Option<Perm>>,
    beta: Option<Perm>,
    expect_order: Option<u64>,
}

fn parse_body<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    prefix: &str,
    count: usize,
    degree: usize,
    with_beta: bool,
) -> Result<Body, FixtureError> {
    let mut body = Body { indexed: vec![None; count], beta: None, expect_order: None };
    for (no, line) in lines {
        if let Some(rest) = line.strip_prefix("expect") {
            if body.expect_order.replace(parse_expect(no, rest)?).is_some() {
                return Err(err(no, "duplicate `expect` line"));
            }
            continue;
        }
        let (name, value) = line.split_once('=').ok_or_else(|| err(no, "expected `<name> = <cycles>`"))?;
        let (name, value) = (name.trim(), value.trim());
        let perm = Perm::parse(value, degree).map_err(|e| err(no, e.to_string()))?;
        let slot = if with_beta && name == "beta" {
            &mut body.beta
        } else {
            let i: usize = name
                .strip_prefix(prefix)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(no, format!("unknown generator name `{name}`")))?;
            body.indexed.get_mut(i).ok_or_else(|| err(no, format!("generator index {i} out of range")))?
        };
        if slot.replace(perm).is_some() {
            return Err(err(no, format!("generator `{name}` given twice")));
        }
    }
    Ok(body)
}

fn write_perm_line(f: &mut fmt::Formatter<'_>, name: &str, p: &Perm) -> fmt::Result {
    writeln!(f, "{name} = {p}")
}

/// A tail-triangle group given by permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailTriangleFixture {
    pub degree: usize,
    pub alphas: Vec<Perm>,
    pub beta: Perm,
    pub expect_order: Option<u64>,
}

impl TailTriangleFixture {
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut lines = content_lines(text);
        let (no, header) = lines.next().ok_or_else(|| err(1, "empty fixture"))?;
        let vals = parse_header(no, header, "tail-triangle", &["n", "degree"])?;
        let (n, degree) = (vals[0], vals[1]);
        if n == 0 {
            return Err(err(no, "n must be at least 1"));
        }
        let body = parse_body(lines, "alpha", n, degree, true)?;
        let last = text.lines().count().max(1);
        let alphas = body
            .indexed
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| err(last, format!("missing alpha{i}"))))
            .collect::<Result<_, _>>()?;
        let beta = body.beta.ok_or_else(|| err(last, "missing beta"))?;
        Ok(TailTriangleFixture { degree, alphas, beta, expect_order: body.expect_order })
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn to_group(&self, cap: usize) -> Result<TailTriangleGroup, TtError> {
        let alphas = self.alphas.iter().cloned().map(GroupElement::Perm).collect();
        TailTriangleGroup::verify(alphas, GroupElement::Perm(self.beta.clone()), cap)
    }
}

impl fmt::Display for TailTriangleFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tail-triangle n={} degree={}", self.n(), self.degree)?;
        for (i, a) in self.alphas.iter().enumerate() {
            write_perm_line(f, &format!("alpha{i}"), a)?;
        }
        write_perm_line(f, "beta", &self.beta)?;
        if let Some(m) = self.expect_order {
            writeln!(f, "expect order={m}")?;
        }
        Ok(())
    }
}

/// A string C-group candidate given by permutations `ρ_0..ρ_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringFixture {
    pub degree: usize,
    pub rhos: Vec<Perm>,
    pub expect_order: Option<u64>,
}

impl StringFixture {
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut lines = content_lines(text);
        let (no, header) = lines.next().ok_or_else(|| err(1, "empty fixture"))?;
        let vals = parse_header(no, header, "string-c-group", &["rank", "degree"])?;
        let (rank, degree) = (vals[0], vals[1]);
        let body = parse_body(lines, "rho", rank, degree, false)?;
        let last = text.lines().count().max(1);
        let rhos = body
            .indexed
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| err(last, format!("missing rho{i}"))))
            .collect::<Result<_, _>>()?;
        Ok(StringFixture { degree, rhos, expect_order: body.expect_order })
    }

    pub fn rank(&self) -> usize {
        self.rhos.len()
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.rhos.iter().cloned().map(GroupElement::Perm).collect()
    }
}

impl fmt::Display for StringFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "string-c-group rank={} degree={}", self.rank(), self.degree)?;
        for (i, r) in self.rhos.iter().enumerate() {
            write_perm_line(f, &format!("rho{i}"), r)?;
        }
        if let Some(m) = self.expect_order {
            writeln!(f, "expect order={m}")?;
        }
        Ok(())
    }
}

/// A tail-triangle diagram with squared root lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModredFixture {
    pub diagram: TailTriangleDiagram,
    pub lengths: Vec<Rational>,
}

impl ModredFixture {
    pub fn parse(text: &str) -> Result<Self, FixtureError> {
        let mut lines = content_lines(text);
        let (no, header) = lines.next().ok_or_else(|| err(1, "empty fixture"))?;
        if header != "modred" {
            return Err(err(no, "expected header `modred`"));
        }
        let (mut diagram, mut lengths) = (None, None);
        for (no, line) in lines {
            let (key, value) = line.split_once('=').ok_or_else(|| err(no, "expected `<key> = <value>`"))?;
            let fresh = match key.trim() {
                "diagram" => diagram.replace(value.parse::<TailTriangleDiagram>().map_err(|e| err(no, e.to_string()))?).is_none(),
                "lengths" => lengths.replace(parse_lengths(value).map_err(|e| err(no, e.to_string()))?).is_none(),
                other => return Err(err(no, format!("unknown key `{other}`"))),
            };
            if !fresh {
                return Err(err(no, format!("`{}` given twice", key.trim())));
            }
        }
        let last = text.lines().count().max(1);
        Ok(ModredFixture {
            diagram: diagram.ok_or_else(|| err(last, "missing `diagram`"))?,
            lengths: lengths.ok_or_else(|| err(last, "missing `lengths`"))?,
        })
    }
}

impl fmt::Display for ModredFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modred")?;
        writeln!(f, "diagram = {}", self.diagram)?;
        let lengths: Vec<String> = self.lengths.iter().map(|l| l.to_string()).collect();
        writeln!(f, "lengths = {}", lengths.join(","))
    }
}

/// Generators of the dihedral group of order `2k` as a rank-1 tail-triangle fixture.
///
/// Points `1..=2k` stand for `Z_{2k}`; the generators are the reflections `i ↦ -i`
/// and `i ↦ 2-i`, whose product is rotation by 2.
pub fn dihedral_fixture(k: usize) -> TailTriangleFixture {
    let m = 2 * k as i64;
    let reflection = |a: i64| {
        let images: Vec<u32> = (0..m).map(|i| ((a - i).rem_euclid(m) + 1) as u32).collect();
        Perm::from_images(&images).expect("reflection is a bijection")
    };
    TailTriangleFixture {
        degree: 2 * k,
        alphas: vec![reflection(0)],
        beta: reflection(2),
        expect_order: Some(2 * k as u64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tail_triangle_fixtures_round_trip() {
        for (name, text) in BUILTIN.iter().filter(|(n, _)| n.ends_with(".tt")) {
            let fx = TailTriangleFixture::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(fx.to_string(), *text, "{name}");
        }
    }

    #[test]
    fn builtin_string_fixtures_round_trip() {
        for (name, text) in BUILTIN.iter().filter(|(n, _)| n.ends_with(".sc")) {
            let fx = StringFixture::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(fx.to_string(), *text, "{name}");
        }
    }

    #[test]
    fn builtin_modred_fixtures_round_trip() {
        for (name, text) in BUILTIN.iter().filter(|(n, _)| n.ends_with(".mr")) {
            let fx = ModredFixture::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(fx.to_string(), *text, "{name}");
            assert_eq!(fx.lengths.len(), fx.diagram.n() + 1);
        }
        let e = ModredFixture::parse("modred\ndiagram = tail=[3] triangle=(4,inf,2)\n").unwrap_err();
        assert!(e.message.contains("lengths"));
        let e = ModredFixture::parse("modred\nlengths = 1,x\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn lookup_by_name() {
        assert!(builtin("tomotope.tt").is_some());
        assert!(builtin("tomotope").is_some());
        assert!(builtin("some/dir/d4.tt").is_some());
        assert!(builtin("nope.tt").is_none());
    }

    #[test]
    fn comments_are_skipped() {
        let text = "# header comment\ntail-triangle n=1 degree=2\n\nalpha0 = (1,2)\n# x\nbeta = ()\n";
        let fx = TailTriangleFixture::parse(text).unwrap();
        assert_eq!(fx.to_string(), "tail-triangle n=1 degree=2\nalpha0 = (1,2)\nbeta = ()\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = TailTriangleFixture::parse("tail-triangle n=1 degree=2\nalpha0 = (1,3)\nbeta = (1,2)\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = TailTriangleFixture::parse("tail-triangle n=2 degree=2\nalpha0 = (1,2)\nbeta = (1,2)\n").unwrap_err();
        assert!(e.message.contains("alpha1"));
        let e = TailTriangleFixture::parse("string-c-group rank=1 degree=2\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = TailTriangleFixture::parse("tail-triangle n=1\n").unwrap_err();
        assert!(e.message.contains("degree"));
        let e = TailTriangleFixture::parse("tail-triangle n=1 degree=2\ngamma = (1,2)\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn dihedral_generators() {
        let fx = dihedral_fixture(3);
        let g = fx.to_group(100).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.diagram().k(), crate::ttgroup::Label::Finite(3));
        let fx2 = dihedral_fixture(2);
        assert_eq!(fx2.to_group(100).unwrap().order(), 4);
    }
}
