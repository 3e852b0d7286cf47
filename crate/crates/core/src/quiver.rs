//! Small vertices of the n-triangulation, the weighted quiver matrix and its
//! companion bilinear form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::IntMat;
use crate::surface::{
    EdgeId, ExtendedTriangulation, FaceId, MuEdgeRole, MuTriangulation, Triangulation,
};

pub type Coord = (u32, u32, u32);
pub type VertexId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Interior(FaceId),
    /// On an edge, at position `pos` (1..n-1) along the edge's intrinsic
    /// orientation.
    OnEdge { edge: EdgeId, pos: u32 },
}

#[derive(Clone, Debug)]
pub struct VertexData {
    pub incarnations: Vec<(FaceId, Coord)>,
    pub location: Location,
}

/// All small vertices of the n-triangulation of a glued surface, with a
/// deterministic canonical enumeration (interior of each face first, then
/// edge vertices).
pub struct VertexTable {
    pub n: u32,
    verts: Vec<VertexData>,
    by_face_coord: BTreeMap<(FaceId, Coord), VertexId>,
    edge_vertex: BTreeMap<(EdgeId, u32), VertexId>,
}

impl VertexTable {
    pub fn new(tri: &Triangulation, n: u32) -> Self {
        assert!(n >= 2);
        let mut verts: Vec<VertexData> = Vec::new();
        let mut by_face_coord = BTreeMap::new();
        let mut edge_vertex: BTreeMap<(EdgeId, u32), VertexId> = BTreeMap::new();

        // Interior vertices, face-major.
        for f in 0..tri.n_faces() {
            for i in 1..n {
                for j in 1..n.saturating_sub(i) {
                    let k = n - i - j;
                    let id = verts.len();
                    verts.push(VertexData {
                        incarnations: vec![(f, (i, j, k))],
                        location: Location::Interior(f),
                    });
                    by_face_coord.insert((f, (i, j, k)), id);
                }
            }
        }
        // Edge vertices (interior and boundary edges of the surface alike).
        for e in 0..tri.n_edges() {
            for pos in 1..n {
                let id = verts.len();
                verts.push(VertexData {
                    incarnations: Vec::new(),
                    location: Location::OnEdge { edge: e, pos },
                });
                edge_vertex.insert((e, pos), id);
            }
        }
        // Per-face incarnations of edge vertices. Slot s runs from corner s
        // to corner s+1; position l in the slot direction has coordinates
        // (n-l,l,0), (0,n-l,l), (l,0,n-l) for slots 0,1,2.
        for (f, face) in tri.faces().iter().enumerate() {
            for s in 0..3 {
                let e = face.edges[s];
                for l in 1..n {
                    let pos = if face.flips[s] { n - l } else { l };
                    let id = edge_vertex[&(e, pos)];
                    let coord = match s {
                        0 => (n - l, l, 0),
                        1 => (0, n - l, l),
                        _ => (l, 0, n - l),
                    };
                    verts[id].incarnations.push((f, coord));
                    by_face_coord.insert((f, coord), id);
                }
            }
        }
        VertexTable { n, verts, by_face_coord, edge_vertex }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertex(&self, v: VertexId) -> &VertexData {
        &self.verts[v]
    }

    pub fn at(&self, f: FaceId, coord: Coord) -> VertexId {
        self.by_face_coord[&(f, coord)]
    }

    /// Stable label: smallest (face, coordinate) incarnation.
    pub fn label(&self, v: VertexId) -> String {
        let (f, (i, j, k)) =
            self.verts[v].incarnations.iter().min().expect("vertex without incarnation");
        format!("f{f}:{i}.{j}.{k}")
    }

    /// Vertices in the interior of the surface (not on boundary edges), in
    /// canonical order (smallest incarnation).
    pub fn interior_order(&self, tri: &Triangulation) -> Vec<VertexId> {
        let mut ids: Vec<VertexId> = (0..self.verts.len())
            .filter(|&v| match self.verts[v].location {
                Location::Interior(_) => true,
                Location::OnEdge { edge, .. } => !tri.is_boundary_edge(edge),
            })
            .collect();
        ids.sort_by_key(|&v| self.verts[v].incarnations.iter().min().cloned());
        ids
    }

    pub fn edge_vertex_id(&self, e: EdgeId, pos: u32) -> VertexId {
        self.edge_vertex[&(e, pos)]
    }

    /// Per-edge vertex list along the edge's intrinsic orientation.
    pub fn edge_vertices_intrinsic(&self, e: EdgeId) -> Vec<VertexId> {
        (1..self.n).map(|pos| self.edge_vertex[&(e, pos)]).collect()
    }
}

// ---------------------------------------------------------------------------
// Local quiver of the n-triangulated triangle
// ---------------------------------------------------------------------------

fn is_corner(n: u32, c: Coord) -> bool {
    c.0 == n || c.1 == n || c.2 == n
}

fn shares_zero(a: Coord, b: Coord) -> bool {
    (a.0 == 0 && b.0 == 0) || (a.1 == 0 && b.1 == 0) || (a.2 == 0 && b.2 == 0)
}

/// Arrows of the quiver of one n-triangulated triangle: `(from, to, weight)`,
/// weight 1 along the boundary and 2 in the interior. Arrow directions follow
/// the boundary cycle and are parallel-transported inward.
pub fn local_arrows(n: u32) -> Vec<(Coord, Coord, i64)> {
    let mut out = Vec::new();
    let deltas: [(i64, i64, i64); 3] = [(1, -1, 0), (0, 1, -1), (-1, 0, 1)];
    for i in 0..=n {
        for j in 0..=(n - i) {
            let k = n - i - j;
            let v = (i, j, k);
            if is_corner(n, v) {
                continue;
            }
            for d in deltas {
                let ui = i as i64 + d.0;
                let uj = j as i64 + d.1;
                let uk = k as i64 + d.2;
                if ui < 0 || uj < 0 || uk < 0 {
                    continue;
                }
                let u = (ui as u32, uj as u32, uk as u32);
                if is_corner(n, u) {
                    continue;
                }
                let w = if shares_zero(v, u) { 1 } else { 2 };
                out.push((v, u, w));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The signed adjacency matrix and the companion form
// ---------------------------------------------------------------------------

/// Signed adjacency matrix of the glued weighted quiver, indexed by `order`.
pub fn q_matrix(tri: &Triangulation, table: &VertexTable, order: &[VertexId]) -> IntMat {
    let index: BTreeMap<VertexId, usize> =
        order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut q = IntMat::zeros(order.len(), order.len());
    let arrows = local_arrows(table.n);
    for f in 0..tri.n_faces() {
        for &(a, b, w) in &arrows {
            let va = table.at(f, a);
            let vb = table.at(f, b);
            let (Some(&ia), Some(&ib)) = (index.get(&va), index.get(&vb)) else {
                continue;
            };
            q[(ia, ib)] += BigInt::from(w);
            q[(ib, ia)] -= BigInt::from(w);
        }
    }
    q
}

/// The companion bilinear form: `-Q/2` off boundary edges; on a boundary edge
/// the identity minus the adjacency along the edge.
pub fn h_matrix(tri: &Triangulation, table: &VertexTable, order: &[VertexId]) -> Result<IntMat> {
    let q = q_matrix(tri, table, order);
    let boundary_edge_of = |v: VertexId| -> Option<EdgeId> {
        match table.vertex(v).location {
            Location::OnEdge { edge, .. } if tri.is_boundary_edge(edge) => Some(edge),
            _ => None,
        }
    };
    let mut h = IntMat::zeros(order.len(), order.len());
    for (i, &vi) in order.iter().enumerate() {
        let ei = boundary_edge_of(vi);
        for (j, &vj) in order.iter().enumerate() {
            let same_edge = ei.is_some() && ei == boundary_edge_of(vj);
            if same_edge {
                if i == j {
                    h[(i, j)] = BigInt::from(1);
                } else if q[(i, j)] == BigInt::from(1) {
                    h[(i, j)] = BigInt::from(-1);
                }
            } else {
                let (half, rem) = (-&q[(i, j)]).div_rem(&BigInt::from(2));
                if !rem.is_zero() {
                    return Err(Error::Identity(format!(
                        "odd quiver entry between vertices not on a common boundary edge ({i},{j})"
                    )));
                }
                h[(i, j)] = half;
            }
        }
    }
    Ok(h)
}

/// Submatrix of `m` (indexed by `from_rows` x `from_cols`) on the given
/// vertex lists.
pub fn restrict(
    m: &IntMat,
    from_rows: &[VertexId],
    from_cols: &[VertexId],
    rows: &[VertexId],
    cols: &[VertexId],
) -> Result<IntMat> {
    let rindex: BTreeMap<VertexId, usize> =
        from_rows.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let cindex: BTreeMap<VertexId, usize> =
        from_cols.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let rid: Vec<usize> = rows
        .iter()
        .map(|v| {
            rindex.get(v).copied().ok_or_else(|| Error::Lattice(format!("unknown row vertex {v}")))
        })
        .collect::<Result<_>>()?;
    let cid: Vec<usize> = cols
        .iter()
        .map(|v| {
            cindex.get(v).copied().ok_or_else(|| Error::Lattice(format!("unknown col vertex {v}")))
        })
        .collect::<Result<_>>()?;
    Ok(m.submatrix(&rid, &cid))
}

/// Per-face projection vector: the s-th barycentric coordinate, summed over
/// the incarnations of each vertex in the face (zero elsewhere).
pub fn pr_vector(table: &VertexTable, order: &[VertexId], f: FaceId, s: usize) -> Vec<BigInt> {
    order
        .iter()
        .map(|&v| {
            let mut total = 0u32;
            for &(vf, c) in &table.vertex(v).incarnations {
                if vf == f {
                    total += match s {
                        0 => c.0,
                        1 => c.1,
                        _ => c.2,
                    };
                }
            }
            BigInt::from(total)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Vertex sets for the extended and special triangulations
// ---------------------------------------------------------------------------

/// Ordered vertex sets of an extended triangulation: the interior part, the
/// boundary sets W and U ordered lexicographically by
/// (component, edge, coordinate) read backwards, and the combined index sets.
pub struct VertexSets {
    pub table: VertexTable,
    /// Interior small vertices of the extended surface.
    pub interior: Vec<VertexId>,
    /// Boundary vertices on the second slots of attached triangles.
    pub w_set: Vec<VertexId>,
    /// Boundary vertices on the third slots of attached triangles.
    pub u_set: Vec<VertexId>,
    /// interior ++ w_set
    pub v_x: Vec<VertexId>,
    /// interior ++ u_set
    pub v_a: Vec<VertexId>,
    /// interior ++ w_set ++ u_set
    pub vbar: Vec<VertexId>,
    /// Per attached triangle (input order): (w_1..w_{n-1}, u_1..u_{n-1}).
    pub per_triangle: Vec<(Vec<VertexId>, Vec<VertexId>)>,
    /// Boundary component of each W entry (parallel to w_set).
    pub w_components: Vec<usize>,
}

pub fn vertex_sets(ext: &ExtendedTriangulation, n: u32) -> VertexSets {
    let table = VertexTable::new(&ext.tri, n);
    let interior = table.interior_order(&ext.tri);
    let b = ext.base.boundary().len();
    // Sort key (b-i, r_i-j, n-k) ascending, with i = component+1, j = pos+1.
    let mut w_entries: Vec<((usize, usize, u32), VertexId, usize)> = Vec::new();
    let mut u_entries: Vec<((usize, usize, u32), VertexId)> = Vec::new();
    for att in &ext.attached {
        let r_i = ext.base.boundary()[att.component].edges.len();
        for k in 1..n {
            let w = table.at(att.face, (0, k, n - k));
            let u = table.at(att.face, (k, 0, n - k));
            let key = (b - 1 - att.component, r_i - 1 - att.position, n - k);
            w_entries.push((key, w, att.component));
            u_entries.push((key, u));
        }
    }
    w_entries.sort_by_key(|e| e.0);
    u_entries.sort_by_key(|e| e.0);
    let w_set: Vec<VertexId> = w_entries.iter().map(|e| e.1).collect();
    let w_components: Vec<usize> = w_entries.iter().map(|e| e.2).collect();
    let u_set: Vec<VertexId> = u_entries.iter().map(|e| e.1).collect();
    let per_triangle: Vec<(Vec<VertexId>, Vec<VertexId>)> = ext
        .attached
        .iter()
        .map(|att| {
            (
                (1..n).map(|k| table.at(att.face, (0, k, n - k))).collect(),
                (1..n).map(|k| table.at(att.face, (k, 0, n - k))).collect(),
            )
        })
        .collect();
    let mut v_x = interior.clone();
    v_x.extend_from_slice(&w_set);
    let mut v_a = interior.clone();
    v_a.extend_from_slice(&u_set);
    let mut vbar = interior.clone();
    vbar.extend_from_slice(&w_set);
    vbar.extend_from_slice(&u_set);
    VertexSets { table, interior, w_set, u_set, v_x, v_a, vbar, per_triangle, w_components }
}

/// Boundary structure of the special triangulation: per component, the edges
/// relabelled so that the w/u alternation starts the cycle and the leftover
/// edge of an odd component comes last.
pub struct MuVertexSets {
    pub table: VertexTable,
    pub interior: Vec<VertexId>,
    /// Per component: the block vertex lists.
    pub components: Vec<MuComponent>,
    /// interior ++ concatenated (W_i, U_i, V_i) blocks.
    pub vbar: Vec<VertexId>,
}

pub struct MuComponent {
    pub w: Vec<VertexId>,
    pub u: Vec<VertexId>,
    pub v: Vec<VertexId>,
    pub r: usize,
}

pub fn mu_vertex_sets(mu: &MuTriangulation, n: u32) -> Result<MuVertexSets> {
    let table = VertexTable::new(&mu.tri, n);
    let interior = table.interior_order(&mu.tri);
    let mut components = Vec::new();
    for comp in mu.tri.boundary() {
        let r = comp.edges.len();
        // Rotate the cyclic edge list so a W edge leads and an A edge (when
        // present) trails.
        let roles: Vec<MuEdgeRole> = comp.edges.iter().map(|e| mu.roles[e]).collect();
        // Fully degenerate component (no ears at all, e.g. the bare
        // triangle): every boundary vertex goes into the leftover set.
        if !roles.contains(&MuEdgeRole::W) {
            let mut v = Vec::new();
            for &e in comp.edges.iter().rev() {
                let mut along = boundary_vertices_positive(&table, &mu.tri, e);
                along.reverse();
                v.extend(along);
            }
            components.push(MuComponent { w: Vec::new(), u: Vec::new(), v, r });
            continue;
        }
        let rot = if r == 1 {
            0
        } else if let Some(a_pos) = roles.iter().position(|&x| x == MuEdgeRole::A) {
            (a_pos + 1) % r
        } else {
            roles
                .iter()
                .position(|&x| x == MuEdgeRole::W)
                .ok_or_else(|| Error::Triangulation("component without w edges".into()))?
        };
        let edges: Vec<EdgeId> = (0..r).map(|i| comp.edges[(rot + i) % r]).collect();
        // Sanity: alternation w,u,w,u,...,(a).
        if r > 1 {
            for (p, &e) in edges.iter().enumerate() {
                let want = if p + 1 == r && r % 2 == 1 {
                    MuEdgeRole::A
                } else if p % 2 == 0 {
                    MuEdgeRole::W
                } else {
                    MuEdgeRole::U
                };
                if mu.roles[&e] != want {
                    return Err(Error::Triangulation(format!(
                        "boundary edge role pattern broken at position {p} of a component"
                    )));
                }
            }
        }
        // W_i: lexicographic on (r_i - j, n - k): larger edge labels first,
        // larger coordinates first. Ear w_k has coordinate (0,k,n-k).
        let mut w = Vec::new();
        let mut u = Vec::new();
        for &e in edges.iter().rev() {
            match mu.roles[&e] {
                MuEdgeRole::W => {
                    let ear = mu.ears.iter().find(|ear| ear.w_edge == e).unwrap();
                    for k in (1..n).rev() {
                        w.push(table.at(ear.face, (0, k, n - k)));
                    }
                }
                MuEdgeRole::U => {
                    let ear = mu.ears.iter().find(|ear| ear.u_edge == e).unwrap();
                    for k in (1..n).rev() {
                        u.push(table.at(ear.face, (k, 0, n - k)));
                    }
                }
                MuEdgeRole::A => {}
            }
        }
        // V_i: the a vertices of the leftover edge, largest label first.
        let mut v = Vec::new();
        if r % 2 == 1 {
            let a_edge = *edges.last().unwrap();
            let mut along = boundary_vertices_positive(&table, &mu.tri, a_edge);
            along.reverse();
            v = along;
        }
        components.push(MuComponent { w, u, v, r });
    }
    let mut vbar = interior.clone();
    for c in &components {
        vbar.extend_from_slice(&c.w);
        vbar.extend_from_slice(&c.u);
        vbar.extend_from_slice(&c.v);
    }
    Ok(MuVertexSets { table, interior, components, vbar })
}

/// Vertices on a boundary edge by position along the positive boundary
/// orientation.
pub fn boundary_vertices_positive(
    table: &VertexTable,
    tri: &Triangulation,
    e: EdgeId,
) -> Vec<VertexId> {
    let positive = tri.boundary_edge_positive(e);
    (1..table.n)
        .map(|t| {
            let pos = if positive { t } else { table.n - t };
            table.edge_vertex_id(e, pos)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{annulus, attach_triangles, polygon};

    #[test]
    fn cardinalities() {
        // triangle n=2: |Vbar| = 3; n=3: 7
        for (n, want) in [(2u32, 3usize), (3, 7), (4, 12)] {
            let t = polygon(3).unwrap();
            let table = VertexTable::new(&t, n);
            let s = t.surface();
            let expect = (n as i64 * n as i64 - 1) * s.r_sigma()
                - (n as i64 * (n as i64 - 1) / 2) * s.boundary_edge_count() as i64;
            assert_eq!(table.len() as i64, expect);
            assert_eq!(table.len(), want);
        }
        // Lemma cardinalities over a small zoo.
        for tri in [polygon(3).unwrap(), polygon(5).unwrap(), annulus(2, 2).unwrap()] {
            for n in 2..5u32 {
                let s = tri.surface().clone();
                let table = VertexTable::new(&tri, n);
                let expect = (n as i64 * n as i64 - 1) * s.r_sigma()
                    - (n as i64 * (n as i64 - 1) / 2) * s.boundary_edge_count() as i64;
                assert_eq!(table.len() as i64, expect, "vbar count for n={n}");
                let ext = attach_triangles(&tri).unwrap();
                let sets = vertex_sets(&ext, n);
                assert_eq!(sets.v_x.len() as i64, (n as i64 * n as i64 - 1) * s.r_sigma());
                assert_eq!(sets.v_x.len(), sets.v_a.len());
                assert_eq!(sets.w_set.len(), s.w_count(n));
                assert_eq!(sets.u_set.len(), s.w_count(n));
            }
        }
    }

    #[test]
    fn triangle_q_and_h_n2() {
        let t = polygon(3).unwrap();
        let table = VertexTable::new(&t, 2);
        let order: Vec<VertexId> = (0..table.len()).collect();
        let q = q_matrix(&t, &table, &order);
        assert!(q.is_antisymmetric());
        // cyclic with entries of absolute value 2
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(&q[(i, j)] * &q[(i, j)], BigInt::from(4));
                }
            }
        }
        let h = h_matrix(&t, &table, &order).unwrap();
        for i in 0..3 {
            assert_eq!(h[(i, i)], BigInt::from(1));
        }
        // H = I - Q/2 for the one-triangle surface at n=2
        let expect = IntMat::identity(3).sub(&q.div_exact(&BigInt::from(2)));
        assert_eq!(h, expect);
    }

    #[test]
    fn glued_edge_cancellation() {
        // square fan, n=3: arrows along the interior diagonal cancel.
        let t = polygon(4).unwrap();
        let table = VertexTable::new(&t, 3);
        let order: Vec<VertexId> = (0..table.len()).collect();
        let q = q_matrix(&t, &table, &order);
        assert!(q.is_antisymmetric());
        let d = t.interior_edges()[0];
        let vs = table.edge_vertices_intrinsic(d);
        assert_eq!(vs.len(), 2);
        let (a, b) = (vs[0], vs[1]);
        let (ia, ib) = (order.iter().position(|&x| x == a).unwrap(), order.iter().position(|&x| x == b).unwrap());
        assert!(q[(ia, ib)].is_zero(), "glued-edge arrows must cancel to weight 0");
    }

    #[test]
    fn pr_vectors_sum() {
        let t = polygon(4).unwrap();
        for n in 2..5u32 {
            let table = VertexTable::new(&t, n);
            let order: Vec<VertexId> = (0..table.len()).collect();
            for f in 0..t.n_faces() {
                let p1 = pr_vector(&table, &order, f, 0);
                let p2 = pr_vector(&table, &order, f, 1);
                let p3 = pr_vector(&table, &order, f, 2);
                for (idx, &v) in order.iter().enumerate() {
                    let total = &p1[idx] + &p2[idx] + &p3[idx];
                    let in_face =
                        table.vertex(v).incarnations.iter().filter(|&&(vf, _)| vf == f).count();
                    assert_eq!(total, BigInt::from(n) * BigInt::from(in_face));
                }
            }
        }
    }

    #[test]
    fn restrict_full_is_identity() {
        let t = polygon(3).unwrap();
        let table = VertexTable::new(&t, 3);
        let order: Vec<VertexId> = (0..table.len()).collect();
        let q = q_matrix(&t, &table, &order);
        let r = restrict(&q, &order, &order, &order, &order).unwrap();
        assert_eq!(r, q);
        assert!(restrict(&q, &order, &order, &[999], &order).is_err());
    }
}
