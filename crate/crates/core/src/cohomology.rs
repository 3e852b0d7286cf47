//! The CW cochain complex of the compactified surface induced by a
//! triangulation: coboundary matrices, cocycle subgroups over Z_N, the
//! per-edge weight map from balanced vectors to cochains, and homology
//! counts over Z_2.

use num_bigint::BigInt;
use num_integer::Integer;


use crate::error::{Error, Result};
use crate::matrix::IntMat;
use crate::quiver::{VertexId, VertexTable};
use crate::surface::Triangulation;
use crate::zlattice::{congruence_kernel, kernel_mod, snf_invariants, Congruence, Lattice};

/// CW structure of the compactified surface: 0-cells are the punctures,
/// 1-cells the edges, 2-cells the faces. Boundary 1-cells are oriented along
/// the positive boundary orientation; interior 1-cells keep their intrinsic
/// orientation.
pub struct CWComplex {
    pub n_punctures: usize,
    pub n_edges: usize,
    pub n_faces: usize,
    /// delta_0: C^0 -> C^1 as an (E x P) integer matrix.
    pub d0: IntMat,
    /// delta_1: C^1 -> C^2 as an (F x E) integer matrix.
    pub d1: IntMat,
    /// Per edge: true when the cell orientation equals the intrinsic one.
    pub cell_positive: Vec<bool>,
    pub boundary_edge: Vec<bool>,
}

pub fn cw_complex(tri: &Triangulation) -> CWComplex {
    let ne = tri.n_edges();
    let np = tri.n_punctures();
    let nf = tri.n_faces();
    let mut cell_positive = vec![true; ne];
    let mut boundary_edge = vec![false; ne];
    for e in 0..ne {
        if tri.is_boundary_edge(e) {
            boundary_edge[e] = true;
            cell_positive[e] = tri.boundary_edge_positive(e);
        }
    }
    let mut d0 = IntMat::zeros(ne, np);
    for e in 0..ne {
        let (s, t) = tri.edge_endpoints(e);
        let (s, t) = if cell_positive[e] { (s, t) } else { (t, s) };
        // loops at a single puncture contribute zero
        d0[(e, t)] += BigInt::from(1);
        d0[(e, s)] -= BigInt::from(1);
    }
    let mut d1 = IntMat::zeros(nf, ne);
    for (f, face) in tri.faces().iter().enumerate() {
        for s in 0..3 {
            let e = face.edges[s];
            let walk_matches_intrinsic = !face.flips[s];
            let sign = if walk_matches_intrinsic == cell_positive[e] { 1 } else { -1 };
            d1[(f, e)] += BigInt::from(sign);
        }
    }
    CWComplex { n_punctures: np, n_edges: ne, n_faces: nf, d0, d1, cell_positive, boundary_edge }
}

impl CWComplex {
    /// Cocycles over Z_N as a lattice in Z^E containing N Z^E.
    pub fn z1_lattice(&self, n: &BigInt) -> Lattice {
        kernel_mod(&self.d1.transpose(), n)
    }

    pub fn z1_order(&self, n: &BigInt) -> BigInt {
        self.z1_lattice(n).order_mod(n)
    }

    /// `Z^1(Z_n)_l`: cocycles that are l-multiples of cochains.
    pub fn z1_l_lattice(&self, n: &BigInt, l: &BigInt) -> Lattice {
        let g = l.gcd(n);
        congruence_kernel(
            self.n_edges,
            &[
                Congruence::new(IntMat::identity(self.n_edges), g),
                Congruence::new(self.d1.transpose(), n.clone()),
            ],
        )
    }

    /// `C^1_{boundary,d}`: cochains that are multiples of d on boundary cells.
    pub fn c1_boundary_lattice(&self, n: &BigInt, d: &BigInt) -> Lattice {
        let g = d.gcd(n);
        let cols: Vec<usize> =
            (0..self.n_edges).filter(|&e| self.boundary_edge[e]).collect();
        let rows: Vec<usize> = (0..self.n_edges).collect();
        let sel = IntMat::identity(self.n_edges).submatrix(&rows, &cols);
        congruence_kernel(self.n_edges, &[Congruence::new(sel, g)])
    }

    /// `Z^1(Z_n)_l` intersected with `C^1_{boundary,d}`.
    pub fn z1_l_boundary_lattice(&self, n: &BigInt, l: &BigInt, d: &BigInt) -> Lattice {
        let gl = l.gcd(n);
        let gd = d.gcd(n);
        let cols: Vec<usize> =
            (0..self.n_edges).filter(|&e| self.boundary_edge[e]).collect();
        let rows: Vec<usize> = (0..self.n_edges).collect();
        let sel = IntMat::identity(self.n_edges).submatrix(&rows, &cols);
        congruence_kernel(
            self.n_edges,
            &[
                Congruence::new(IntMat::identity(self.n_edges), gl),
                Congruence::new(self.d1.transpose(), n.clone()),
                Congruence::new(sel, gd),
            ],
        )
    }

    /// Order of the first homology group with Z_2 coefficients, from the
    /// chain complex ranks over F_2.
    pub fn h1_z2_order(&self) -> BigInt {
        let rank2 = |m: &IntMat| -> usize {
            snf_invariants(m).iter().filter(|d| d.is_odd()).count()
        };
        let r1 = rank2(&self.d0); // boundary C_1 -> C_0 is the transpose; rank is equal
        let r2 = rank2(&self.d1);
        BigInt::from(2).pow((self.n_edges - r1 - r2) as u32)
    }
}

/// The per-edge weight of a balanced vector: for each 1-cell, the common
/// ratio of the vertex values against (1, 2, ..., n-1) mod n, read along the
/// cell orientation. Returns one value in `[0, n)` per edge.
pub fn j_map(
    cw: &CWComplex,
    base: &Triangulation,
    table: &VertexTable,
    order: &[VertexId],
    k: &[BigInt],
) -> Result<Vec<BigInt>> {
    assert_eq!(order.len(), k.len());
    let n = BigInt::from(table.n);
    let index: std::collections::BTreeMap<VertexId, usize> =
        order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = Vec::with_capacity(base.n_edges());
    for e in 0..base.n_edges() {
        let mut vals = Vec::new();
        for t in 1..table.n {
            let pos = if cw.cell_positive[e] { t } else { table.n - t };
            let v = table.edge_vertex_id(e, pos);
            let &idx = index.get(&v).ok_or_else(|| {
                Error::Lattice("vector does not cover the edge vertices".into())
            })?;
            vals.push(k[idx].mod_floor(&n));
        }
        let s = vals[0].clone();
        for (t, val) in vals.iter().enumerate() {
            let want = (BigInt::from(t as u32 + 1) * &s).mod_floor(&n);
            if &want != val {
                return Err(Error::Lattice(format!(
                    "edge {e}: vertex values are not proportional to (1,2,..,n-1) mod n"
                )));
            }
        }
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{annulus, genus_one_boundary, polygon};

    #[test]
    fn delta_composition_zero() {
        for tri in [polygon(3).unwrap(), polygon(5).unwrap(), annulus(2, 2).unwrap(),
                    genus_one_boundary(1, 1).unwrap()] {
            let cw = cw_complex(&tri);
            assert!(cw.d1.mul(&cw.d0).is_zero(), "d1 d0 != 0 for {tri:?}");
        }
    }

    #[test]
    fn cocycle_counts() {
        // |Z^1(Z_k)| = k^{r} for the zoo
        for tri in [polygon(3).unwrap(), polygon(4).unwrap(), annulus(1, 2).unwrap(),
                    genus_one_boundary(1, 1).unwrap()] {
            let r = tri.surface().r_sigma() as u32;
            let cw = cw_complex(&tri);
            for k in 2..=6u32 {
                let kk = BigInt::from(k);
                assert_eq!(
                    cw.z1_order(&kk),
                    BigInt::from(k).pow(r),
                    "Z1 count for {tri:?} k={k}"
                );
            }
        }
    }

    #[test]
    fn h1_counts() {
        for (tri, g, b) in [
            (polygon(3).unwrap(), 0u32, 1u32),
            (annulus(2, 2).unwrap(), 0, 2),
            (genus_one_boundary(1, 1).unwrap(), 1, 1),
            (genus_one_boundary(1, 2).unwrap(), 1, 1),
        ] {
            let cw = cw_complex(&tri);
            assert_eq!(
                cw.h1_z2_order(),
                BigInt::from(2).pow(2 * g + b - 1),
                "H1(Z2) for {tri:?}"
            );
        }
    }

    #[test]
    fn z1_z2_intersection_is_h1() {
        // cocycles mod 2 vanishing-on-boundary have the homology order
        for tri in [polygon(4).unwrap(), annulus(2, 1).unwrap(), genus_one_boundary(1, 2).unwrap()] {
            let cw = cw_complex(&tri);
            let two = BigInt::from(2);
            let l = cw.z1_l_boundary_lattice(&two, &BigInt::from(1), &two);
            assert_eq!(l.order_mod(&two), cw.h1_z2_order(), "{tri:?}");
        }
    }
}
