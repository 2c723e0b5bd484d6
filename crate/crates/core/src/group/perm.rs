use std::fmt;

use super::GroupError;

/// A permutation of the points `1..=N`, acting on the right: `i^(ab) = (i^a)^b`.
///
/// Points are stored 0-based; every public accessor speaks 1-based points.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u32]>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm { images: (0..degree as u32).collect() }
    }

    /// Builds a permutation from its 1-based image list.
    pub fn from_images(images: &[u32]) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for (i, &img) in images.iter().enumerate() {
            if img == 0 || img as usize > n {
                return Err(GroupError::InvalidPermutation(format!(
                    "image {img} of point {} outside 1..={n}",
                    i + 1
                )));
            }
            let z = img as usize - 1;
            if std::mem::replace(&mut seen[z], true) {
                return Err(GroupError::InvalidPermutation(format!("point {img} is hit twice")));
            }
            zero_based.push(z as u32);
        }
        Ok(Perm { images: zero_based.into() })
    }

    /// Builds a permutation of `1..=degree` from disjoint cycles of 1-based points.
    pub fn from_cycles(cycles: &[Vec<u32>], degree: usize) -> Result<Self, GroupError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for &pt in cycle {
                if pt == 0 || pt as usize > degree {
                    return Err(GroupError::InvalidPermutation(format!(
                        "point {pt} outside 1..={degree}"
                    )));
                }
                if std::mem::replace(&mut used[pt as usize - 1], true) {
                    return Err(GroupError::InvalidPermutation(format!(
                        "point {pt} appears in two cycles"
                    )));
                }
            }
            for (i, &pt) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                images[pt as usize - 1] = next - 1;
            }
        }
        Ok(Perm { images: images.into() })
    }

    /// Parses disjoint-cycle notation such as `(5,10)(6,9)`; `()` is the identity.
    pub fn parse(text: &str, degree: usize) -> Result<Self, GroupError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut cycles = Vec::new();
        let mut rest = compact.as_str();
        if rest.is_empty() {
            return Err(GroupError::Parse("empty permutation text".into()));
        }
        while !rest.is_empty() {
            let body_end = match (rest.strip_prefix('('), rest.find(')')) {
                (Some(_), Some(end)) => end,
                _ => return Err(GroupError::Parse(format!("malformed cycle text `{text}`"))),
            };
            let body = &rest[1..body_end];
            if !body.is_empty() {
                let cycle = body
                    .split(',')
                    .map(|s| {
                        s.parse::<u32>()
                            .map_err(|_| GroupError::Parse(format!("bad point `{s}` in `{text}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                cycles.push(cycle);
            }
            rest = &rest[body_end + 1..];
        }
        Perm::from_cycles(&cycles, degree)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `i`.
    pub fn image(&self, i: u32) -> u32 {
        self.images[i as usize - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// The product `self · other`: apply `self` first, then `other`.
    pub fn compose(&self, other: &Perm) -> Result<Perm, GroupError> {
        if self.degree() != other.degree() {
            return Err(GroupError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Perm) -> Perm {
        Perm { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv.into() }
    }

    /// Disjoint cycles of length at least 2, each starting at its smallest point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32 + 1);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, pt) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{pt}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}; {}]", self.degree(), self)
    }
}
