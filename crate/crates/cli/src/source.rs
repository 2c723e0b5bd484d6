//! Resolving command-line inputs into groups.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use polywythoff::fixture::{builtin, ModredFixture, StringFixture, TailTriangleFixture};
use polywythoff::group::GroupElement;
use polywythoff::modred::{parse_lengths, rescale, ModPGroupSpec, Rational, Ringing};
use polywythoff::ttgroup::{TailTriangleDiagram, TailTriangleGroup};

use crate::InputError;

/// Where a tail-triangle group comes from.
#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// A `.tt` or `.mr` fixture: a built-in name (with or without extension) or a file path.
    #[arg(long, conflicts_with = "modred")]
    pub fixture: Option<String>,
    /// A diagram `tail=[..] triangle=(p,q,k)` to reduce modulo a prime.
    #[arg(long)]
    pub modred: Option<String>,
    /// Squared root lengths, overriding those of a `.mr` fixture.
    #[arg(long)]
    pub lengths: Option<String>,
    #[arg(long)]
    pub prime: Option<u32>,
    /// Which node pair of the star plays `(a2, b)`: 1, 2 or 3.
    #[arg(long, default_value_t = 1)]
    pub ringing: u8,
    /// Allow primes `p ≥ 5`.
    #[arg(long)]
    pub large: bool,
}

/// Reads a fixture by path, falling back to the built-in set.
pub fn fixture_text(name: &str) -> Result<(String, String)> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        return Ok((name.to_string(), text));
    }
    for candidate in [name.to_string(), format!("{name}.tt"), format!("{name}.mr"), format!("{name}.sc")] {
        if let Some(text) = builtin(&candidate) {
            return Ok((candidate, text.to_string()));
        }
    }
    Err(InputError::new(format!("no fixture file or built-in fixture named `{name}`")).into())
}

fn first_word(text: &str) -> &str {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .and_then(|l| l.split_whitespace().next())
        .unwrap_or("")
}

/// A modular reduction request before it is carried out.
pub struct ModredInput {
    pub diagram: TailTriangleDiagram,
    pub lengths: Option<Vec<Rational>>,
    pub prime: Option<u32>,
}

impl ModredInput {
    pub fn spec(&self, large: bool) -> Result<ModPGroupSpec> {
        let lengths = self.lengths.as_ref().ok_or_else(|| InputError::new("a reflection system needs --lengths"))?;
        let p = self.prime.ok_or_else(|| InputError::new("a reflection system needs --prime"))?;
        check_prime_gate(p, large)?;
        let system = rescale(&self.diagram, lengths).map_err(input)?;
        system.reduce_mod_p(p).map_err(input)
    }
}

pub fn check_prime_gate(p: u32, large: bool) -> Result<()> {
    if p >= 5 && !large {
        return Err(InputError::new(format!("prime {p} builds a large group; pass --large to allow p ≥ 5")).into());
    }
    Ok(())
}

fn input(e: impl std::fmt::Display) -> anyhow::Error {
    InputError::new(e.to_string()).into()
}

pub enum Resolved {
    TailTriangle { description: String, fixture: TailTriangleFixture },
    Modred { description: String, input: ModredInput },
}

impl SourceArgs {
    pub fn resolve(&self) -> Result<Resolved> {
        let lengths = self.lengths.as_deref().map(parse_lengths).transpose().map_err(input)?;
        if let Some(spec) = &self.modred {
            let diagram = spec.parse::<TailTriangleDiagram>().map_err(input)?;
            let description = format!("modred {diagram}");
            return Ok(Resolved::Modred { description, input: ModredInput { diagram, lengths, prime: self.prime } });
        }
        let name = self.fixture.as_deref().ok_or_else(|| InputError::new("give --fixture or --modred"))?;
        let (label, text) = fixture_text(name)?;
        match first_word(&text) {
            "tail-triangle" => {
                if self.lengths.is_some() || self.prime.is_some() {
                    bail!(InputError::new("--lengths and --prime apply to reflection systems only"));
                }
                let fixture = TailTriangleFixture::parse(&text).map_err(|e| input(format!("{label}: {e}")))?;
                Ok(Resolved::TailTriangle { description: format!("fixture {label}"), fixture })
            }
            "modred" => {
                let fx = ModredFixture::parse(&text).map_err(|e| input(format!("{label}: {e}")))?;
                let input = ModredInput { diagram: fx.diagram, lengths: lengths.or(Some(fx.lengths)), prime: self.prime };
                Ok(Resolved::Modred { description: format!("fixture {label}"), input })
            }
            other => Err(InputError::new(format!("{label}: header `{other}` does not describe a tail-triangle group")).into()),
        }
    }

    pub fn ringing(&self) -> Result<Ringing> {
        Ringing::from_number(self.ringing).ok_or_else(|| InputError::new(format!("ringing must be 1, 2 or 3, not {}", self.ringing)).into())
    }

    /// The unverified group together with a one-line description of the input.
    pub fn group(&self, cap: usize) -> Result<(String, TailTriangleGroup)> {
        match self.resolve()? {
            Resolved::TailTriangle { description, fixture } => Ok((description, fixture.to_group(cap)?)),
            Resolved::Modred { description, input } => {
                let spec = input.spec(self.large)?;
                let ringing = self.ringing()?;
                let g = spec.ringing_group(ringing, cap)?;
                Ok((format!("{description} mod {} ringing {}", spec.prime(), ringing.number()), g))
            }
        }
    }
}

/// Generators of a string C-group fixture, used as an amalgam factor.
pub fn string_generators(name: &str) -> Result<(String, Vec<GroupElement>)> {
    let (label, text) = fixture_text(name)?;
    if first_word(&text) != "string-c-group" {
        return Err(anyhow!(InputError::new(format!("{label} is not a string C-group fixture"))));
    }
    let fx = StringFixture::parse(&text).map_err(|e| input(format!("{label}: {e}")))?;
    Ok((label, fx.generators()))
}
