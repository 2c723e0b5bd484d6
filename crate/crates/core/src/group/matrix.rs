use std::fmt;

use super::GroupError;

/// An invertible `dim × dim` matrix over `Z_p`, entries row-major in `0..p`.
///
/// Group product is the matrix product `A·B`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatModP {
    p: u32,
    dim: usize,
    entries: Box<[u32]>,
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a != 0
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Row-reduces a copy of `m` and returns (determinant, inverse if nonsingular).
fn gauss_jordan(p: u32, dim: usize, m: &[u32]) -> (u32, Option<Vec<u32>>) {
    let p64 = p as u64;
    let mut a: Vec<u64> = m.iter().map(|&x| x as u64).collect();
    let mut inv: Vec<u64> = (0..dim * dim).map(|i| u64::from(i / dim == i % dim)).collect();
    let mut det = 1u64;
    for col in 0..dim {
        let Some(pivot) = (col..dim).find(|&r| a[r * dim + col] != 0) else {
            return (0, None);
        };
        if pivot != col {
            for c in 0..dim {
                a.swap(pivot * dim + c, col * dim + c);
                inv.swap(pivot * dim + c, col * dim + c);
            }
            det = (p64 - det) % p64;
        }
        let pv = a[col * dim + col];
        det = det * pv % p64;
        let pinv = inv_mod(pv as u32, p) as u64;
        for c in 0..dim {
            a[col * dim + c] = a[col * dim + c] * pinv % p64;
            inv[col * dim + c] = inv[col * dim + c] * pinv % p64;
        }
        for r in 0..dim {
            let factor = a[r * dim + col];
            if r == col || factor == 0 {
                continue;
            }
            for c in 0..dim {
                a[r * dim + c] = (a[r * dim + c] + (p64 - factor) * a[col * dim + c]) % p64;
                inv[r * dim + c] = (inv[r * dim + c] + (p64 - factor) * inv[col * dim + c]) % p64;
            }
        }
    }
    (det as u32, Some(inv.into_iter().map(|x| x as u32).collect()))
}

impl MatModP {
    /// Reduces integer entries mod `p` and checks invertibility.
    pub fn new(p: u32, dim: usize, entries: &[i64]) -> Result<Self, GroupError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        if entries.len() != dim * dim || dim == 0 {
            return Err(GroupError::InvalidMatrix(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let reduced: Box<[u32]> =
            entries.iter().map(|&x| x.rem_euclid(p as i64) as u32).collect();
        let m = MatModP { p, dim, entries: reduced };
        if m.determinant() == 0 {
            return Err(GroupError::InvalidMatrix(format!("singular mod {p}: {m}")));
        }
        Ok(m)
    }

    pub fn identity(p: u32, dim: usize) -> Self {
        let entries = (0..dim * dim).map(|i| u32::from(i / dim == i % dim)).collect();
        MatModP { p, dim, entries }
    }

    /// Parses `mod <p> dim <d> [e00,e01,...]`.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let bad = || GroupError::Parse(format!("malformed matrix text `{text}`"));
        let (head, body) = text.split_once('[').ok_or_else(bad)?;
        let body = body.trim().strip_suffix(']').ok_or_else(bad)?;
        let words: Vec<&str> = head.split_whitespace().collect();
        let [m, p, d, dim] = words.as_slice() else { return Err(bad()) };
        if *m != "mod" || *d != "dim" {
            return Err(bad());
        }
        let p: u32 = p.parse().map_err(|_| bad())?;
        let dim: usize = dim.parse().map_err(|_| bad())?;
        let entries = body
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        MatModP::new(p, dim, &entries)
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, &x)| x == u32::from(i / self.dim == i % self.dim))
    }

    pub fn determinant(&self) -> u32 {
        gauss_jordan(self.p, self.dim, &self.entries).0
    }

    pub fn compose(&self, other: &MatModP) -> Result<MatModP, GroupError> {
        if self.p != other.p || self.dim != other.dim {
            return Err(GroupError::ShapeMismatch(self.p, self.dim, other.p, other.dim));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &MatModP) -> MatModP {
        let d = self.dim;
        let p = self.p as u64;
        let mut out = vec![0u32; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    acc += self.entries[r * d + k] as u64 * other.entries[k * d + c] as u64;
                }
                out[r * d + c] = (acc % p) as u32;
            }
        }
        MatModP { p: self.p, dim: d, entries: out.into() }
    }

    pub fn inverse(&self) -> MatModP {
        let inv = gauss_jordan(self.p, self.dim, &self.entries)
            .1
            .expect("MatModP is invertible by construction");
        MatModP { p: self.p, dim: self.dim, entries: inv.into() }
    }

    pub fn transpose(&self) -> MatModP {
        let d = self.dim;
        let entries = (0..d * d).map(|i| self.entries[(i % d) * d + i / d]).collect();
        MatModP { p: self.p, dim: d, entries }
    }
}

impl fmt::Display for MatModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mod {} dim {} [", self.p, self.dim)?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for MatModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u32> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn parse_print_round_trip() {
        let m = MatModP::parse("mod 5 dim 2 [1,2,3,4]").unwrap();
        assert_eq!(m.to_string(), "mod 5 dim 2 [1,2,3,4]");
        assert_eq!(MatModP::parse(&m.to_string()).unwrap(), m);
        assert_eq!(MatModP::parse("mod 3 dim 2 [-1, 0, 0, 4]").unwrap().to_string(), "mod 3 dim 2 [2,0,0,1]");
    }

    #[test]
    fn rejects_singular_and_bad_modulus() {
        assert!(MatModP::new(3, 2, &[1, 1, 1, 1]).is_err());
        assert!(matches!(MatModP::new(4, 1, &[1]), Err(GroupError::NotPrime(4))));
        assert!(MatModP::new(3, 2, &[1, 0, 0]).is_err());
    }

    #[test]
    fn inverse_and_determinant() {
        let m = MatModP::new(7, 3, &[2, 1, 0, 0, 3, 5, 1, 0, 1]).unwrap();
        assert!(m.compose(&m.inverse()).unwrap().is_identity());
        assert!(m.inverse().compose(&m).unwrap().is_identity());
        // det = 2*(3-0) - 1*(0-5) + 0 = 11 = 4 mod 7
        assert_eq!(m.determinant(), 4);
    }
}
