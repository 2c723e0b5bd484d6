//! Face posets of familiar polytopes built from geometry rather than groups.
//!
//! These serve as independent oracles: the coset construction never touches them.

use std::collections::{BTreeSet, HashMap};

use crate::poset::{FaceKind, FacePoset, FaceRep};

fn set_text(vs: &[usize]) -> String {
    let inner: Vec<String> = vs.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// Builds a poset whose proper faces are the given vertex sets, ordered by inclusion.
/// `layers[r]` holds the faces of rank `r`; only atomic posets can be described this way.
fn from_vertex_sets(layers: &[Vec<Vec<usize>>]) -> FacePoset {
    let rank = layers.len() as i32;
    let mut p = FacePoset::new(rank);
    let bottom = p.add_face(-1, FaceKind::Bottom, FaceRep::None);
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for (r, layer) in layers.iter().enumerate() {
        ids.push(layer.iter().map(|vs| p.add_face(r as i32, FaceKind::Plain, FaceRep::Text(set_text(vs)))).collect());
    }
    let top = p.add_face(rank, FaceKind::Top(rank as usize), FaceRep::None);
    for &v in &ids[0] {
        p.add_cover(bottom, v);
    }
    for &f in ids.last().expect("at least one proper rank") {
        p.add_cover(f, top);
    }
    for r in 1..layers.len() {
        for (hi, upper) in layers[r].iter().enumerate() {
            for (lo, lower) in layers[r - 1].iter().enumerate() {
                if lower.iter().all(|v| upper.binary_search(v).is_ok()) {
                    p.add_cover(ids[r - 1][lo], ids[r][hi]);
                }
            }
        }
    }
    p.finish();
    p
}

/// The rank-1 polytope: two vertices between the least and greatest faces.
pub fn segment() -> FacePoset {
    from_vertex_sets(&[vec![vec![0], vec![1]]])
}

/// The `k`-gon (any `k >= 2`; `k = 2` is the digon).
pub fn polygon(k: usize) -> FacePoset {
    disjoint_polygons(k, 1)
}

/// `copies` disjoint `k`-gons sharing only the least and greatest faces.
/// For `copies > 1` this fails strong connectivity.
pub fn disjoint_polygons(k: usize, copies: usize) -> FacePoset {
    assert!(k >= 2 && copies >= 1);
    let mut p = FacePoset::new(2);
    let bottom = p.add_face(-1, FaceKind::Bottom, FaceRep::None);
    let mut verts = Vec::new();
    for c in 0..copies {
        for i in 0..k {
            verts.push(p.add_face(0, FaceKind::Plain, FaceRep::Text(format!("v{}", c * k + i + 1))));
        }
    }
    let mut edges = Vec::new();
    for c in 0..copies {
        for i in 0..k {
            edges.push(p.add_face(1, FaceKind::Plain, FaceRep::Text(format!("e{}", c * k + i + 1))));
        }
    }
    let top = p.add_face(2, FaceKind::Top(2), FaceRep::None);
    for c in 0..copies {
        for i in 0..k {
            let e = edges[c * k + i];
            p.add_cover(bottom, verts[c * k + i]);
            p.add_cover(verts[c * k + i], e);
            p.add_cover(verts[c * k + (i + 1) % k], e);
            p.add_cover(e, top);
        }
    }
    p.finish();
    p
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// The `n`-simplex (rank `n`).
pub fn simplex(n: usize) -> FacePoset {
    let layers: Vec<_> = (1..=n).map(|k| subsets_of_size(n + 1, k)).collect();
    from_vertex_sets(&layers)
}

/// Proper faces of the `n`-dimensional cross-polytope as vertex sets; vertex `2i`
/// is `+e_i` and `2i+1` is `-e_i`.
fn cross_polytope_layers(n: usize) -> Vec<Vec<Vec<usize>>> {
    (1..=n)
        .map(|k| {
            subsets_of_size(2 * n, k)
                .into_iter()
                .filter(|s| s.windows(2).all(|w| w[0] / 2 != w[1] / 2))
                .collect()
        })
        .collect()
}

/// The `n`-dimensional cross-polytope; `n = 4` is the 16-cell.
pub fn cross_polytope(n: usize) -> FacePoset {
    from_vertex_sets(&cross_polytope_layers(n))
}

/// The `n`-cube, with vertices the 0/1 vectors read as bitmasks.
pub fn cube(n: usize) -> FacePoset {
    let mut layers = vec![Vec::new(); n];
    // a face is fixed coordinates `base` outside the free set `free`
    for free in 0u32..(1 << n) {
        let k = free.count_ones() as usize;
        if k == n {
            continue;
        }
        for base in 0u32..(1 << n) {
            if base & free != 0 {
                continue;
            }
            let mut verts: Vec<usize> = (0u32..(1 << n)).filter(|v| v & !free == base).map(|v| v as usize).collect();
            verts.sort_unstable();
            layers[k].push(verts);
        }
    }
    from_vertex_sets(&layers)
}

/// The hemi-octahedron: the octahedron with antipodal faces identified.
pub fn hemi_octahedron() -> FacePoset {
    let layers = cross_polytope_layers(3);
    let antipode = |vs: &[usize]| -> Vec<usize> {
        let mut w: Vec<usize> = vs.iter().map(|v| v ^ 1).collect();
        w.sort_unstable();
        w
    };
    let mut p = FacePoset::new(3);
    let bottom = p.add_face(-1, FaceKind::Bottom, FaceRep::None);
    let mut orbit_of: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
    for (r, layer) in layers.iter().enumerate() {
        let mut ids = HashMap::new();
        for f in layer {
            let key = f.clone().min(antipode(f));
            if let std::collections::hash_map::Entry::Vacant(slot) = ids.entry(key) {
                let id = p.add_face(r as i32, FaceKind::Plain, FaceRep::Text(set_text(slot.key())));
                slot.insert(id);
            }
        }
        orbit_of.push(layer.iter().map(|f| (f.clone(), ids[&f.clone().min(antipode(f))])).collect());
    }
    let top = p.add_face(3, FaceKind::Top(3), FaceRep::None);
    for &v in orbit_of[0].values() {
        p.add_cover(bottom, v);
    }
    for &f in orbit_of[2].values() {
        p.add_cover(f, top);
    }
    for r in 1..3 {
        for upper in &layers[r] {
            for lower in &layers[r - 1] {
                if lower.iter().all(|v| upper.binary_search(v).is_ok()) {
                    p.add_cover(orbit_of[r - 1][lower], orbit_of[r][upper]);
                }
            }
        }
    }
    p.finish();
    p
}

/// Row-style Hermite normal form of the lattice spanned by `gens` in `Z^d`: rows are
/// upper triangular with positive pivots. The lattice must have full rank.
fn hermite_rows(d: usize, gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
    let mut basis = Vec::with_capacity(d);
    for col in 0..d {
        // Euclid on column `col` until at most one row has a nonzero entry there
        loop {
            let mut live: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            if live.len() <= 1 {
                break;
            }
            live.sort_by_key(|&r| rows[r][col].abs());
            let pivot = rows[live[0]].clone();
            for &r in &live[1..] {
                let q = rows[r][col].div_euclid(pivot[col]);
                for c in 0..d {
                    rows[r][c] -= q * pivot[c];
                }
            }
        }
        let pos = rows.iter().position(|r| r[col] != 0).expect("lattice must have full rank");
        let mut pivot = rows.swap_remove(pos);
        if pivot[col] < 0 {
            pivot.iter_mut().for_each(|x| *x = -*x);
        }
        basis.push(pivot);
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    basis
}

/// Reduces points of `Z^d` to canonical representatives modulo a full-rank lattice.
struct LatticeQuotient {
    rows: Vec<Vec<i64>>,
}

impl LatticeQuotient {
    fn new(d: usize, gens: &[Vec<i64>]) -> Self {
        LatticeQuotient { rows: hermite_rows(d, gens) }
    }

    fn index(&self) -> usize {
        self.rows.iter().enumerate().map(|(i, r)| r[i] as usize).product()
    }

    fn reduce(&self, x: &mut [i64]) {
        for (i, row) in self.rows.iter().enumerate() {
            let q = x[i].div_euclid(row[i]);
            for (xc, rc) in x.iter_mut().zip(row) {
                *xc -= q * rc;
            }
        }
    }

    /// Canonical points, one per class.
    fn points(&self) -> Vec<Vec<i64>> {
        let d = self.rows.len();
        let mut out = vec![Vec::new()];
        for i in 0..d {
            let next: Vec<Vec<i64>> = out
                .iter()
                .flat_map(|p: &Vec<i64>| {
                    (0..self.rows[i][i]).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
            out = next;
        }
        out
    }
}

/// The cubical tessellation of `Z^d` modulo the lattice spanned by `gens`: an
/// `(d+1)`-polytope whose faces are unit cells `x + [0,1]^S`.
pub fn cubic_torus(d: usize, gens: &[Vec<i64>]) -> FacePoset {
    let lattice = LatticeQuotient::new(d, gens);
    let points = lattice.points();
    debug_assert_eq!(points.len(), lattice.index());
    let mut p = FacePoset::new(d as i32 + 1);
    let bottom = p.add_face(-1, FaceKind::Bottom, FaceRep::None);
    let mut id: HashMap<(Vec<i64>, u32), usize> = HashMap::new();
    let mut by_rank: Vec<Vec<u32>> = vec![Vec::new(); d + 1];
    for s in 0u32..(1 << d) {
        by_rank[s.count_ones() as usize].push(s);
    }
    for (k, dirs) in by_rank.iter().enumerate() {
        for &s in dirs {
            for x in &points {
                let text = format!("{:?}+{}", x, set_text(&(0..d).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>()));
                id.insert((x.clone(), s), p.add_face(k as i32, FaceKind::Plain, FaceRep::Text(text)));
            }
        }
    }
    let top = p.add_face(d as i32 + 1, FaceKind::Top(d + 1), FaceRep::None);
    for x in &points {
        p.add_cover(bottom, id[&(x.clone(), 0)]);
        p.add_cover(id[&(x.clone(), (1 << d) - 1)], top);
    }
    for s in 1u32..(1 << d) {
        for x in &points {
            let upper = id[&(x.clone(), s)];
            for i in (0..d).filter(|i| s >> i & 1 == 1) {
                let t = s & !(1 << i);
                p.add_cover(id[&(x.clone(), t)], upper);
                let mut y = x.clone();
                y[i] += 1;
                lattice.reduce(&mut y);
                p.add_cover(id[&(y, t)], upper);
            }
        }
    }
    p.finish();
    p
}

/// The toroidal map `{4,4}_(s,t)`.
pub fn square_torus(s: i64, t: i64) -> FacePoset {
    cubic_torus(2, &[vec![s, t], vec![-t, s]])
}

/// The cubic toroid `{4,3,4}_(s,s,0)`: the lattice of all permutations and sign
/// changes of `(s,s,0)`.
pub fn cubic_torus_ss0(s: i64) -> FacePoset {
    let mut gens = BTreeSet::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        for (sa, sb) in [(s, s), (s, -s)] {
            let mut v = vec![0; 3];
            v[a] = sa;
            v[b] = sb;
            gens.insert(v);
        }
    }
    cubic_torus(3, &gens.into_iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{verify_axiom_a, verify_diamond, verify_strong_connectivity};

    fn assert_polytope(p: &FacePoset) {
        verify_axiom_a(p).unwrap();
        verify_diamond(p).unwrap();
        verify_strong_connectivity(p).unwrap();
    }

    #[test]
    fn classical_f_vectors() {
        let cases: Vec<(FacePoset, Vec<usize>)> = vec![
            (simplex(3), vec![4, 6, 4]),
            (simplex(4), vec![5, 10, 10, 5]),
            (cube(3), vec![8, 12, 6]),
            (cube(4), vec![16, 32, 24, 8]),
            (cross_polytope(3), vec![6, 12, 8]),
            (cross_polytope(4), vec![8, 24, 32, 16]),
            (hemi_octahedron(), vec![3, 6, 4]),
        ];
        for (p, fv) in cases {
            assert_eq!(p.f_vector().counts, fv);
            assert_polytope(&p);
        }
    }

    #[test]
    fn flag_counts_match_group_orders() {
        assert_eq!(simplex(3).flags().len(), 24);
        assert_eq!(cube(4).flags().len(), 384);
        assert_eq!(cross_polytope(4).flags().len(), 384);
        assert_eq!(hemi_octahedron().flags().len(), 24);
    }

    #[test]
    fn hermite_reduction() {
        let q = LatticeQuotient::new(2, &[vec![2, 2], vec![-2, 2]]);
        assert_eq!(q.index(), 8);
        let mut x = vec![5, -3];
        q.reduce(&mut x);
        assert!(q.points().contains(&x));
        let fcc = LatticeQuotient::new(3, &[vec![3, 3, 0], vec![3, -3, 0], vec![0, 3, 3], vec![0, 3, -3], vec![3, 0, 3], vec![3, 0, -3]]);
        assert_eq!(fcc.index(), 54);
    }

    #[test]
    fn tori() {
        let t20 = square_torus(2, 0);
        assert_eq!(t20.f_vector().counts, vec![4, 8, 4]);
        assert_polytope(&t20);
        let t22 = square_torus(2, 2);
        assert_eq!(t22.f_vector().counts, vec![8, 16, 8]);
        assert_polytope(&t22);
        let t33 = cubic_torus_ss0(3);
        assert_eq!(t33.f_vector().counts, vec![54, 162, 162, 54]);
        assert_eq!(t33.flags().len(), 2592);
        assert_polytope(&t33);
    }
}
