//! Punctured bordered surfaces and their ideal triangulations, given as
//! purely combinatorial gluing data: faces with three cyclically ordered edge
//! slots, each slot recording the orientation of the face side against the
//! edge's intrinsic orientation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Surface
// ---------------------------------------------------------------------------

/// A punctured bordered surface without interior punctures: a genus together
/// with the puncture count of each boundary circle of the compactification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface {
    genus: u32,
    punctures: Vec<u32>,
}

impl Surface {
    pub fn new(genus: u32, punctures: Vec<u32>) -> Result<Self> {
        if punctures.is_empty() {
            return Err(Error::Surface(
                "no boundary components: an essentially bordered surface needs at least one"
                    .into(),
            ));
        }
        if punctures.iter().any(|&r| r == 0) {
            return Err(Error::Surface(
                "boundary component without punctures: every boundary circle must carry at least one puncture"
                    .into(),
            ));
        }
        Ok(Surface { genus, punctures })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Puncture counts per boundary component.
    pub fn punctures(&self) -> &[u32] {
        &self.punctures
    }

    /// Number of boundary components of the compactified surface.
    pub fn b(&self) -> usize {
        self.punctures.len()
    }

    /// Euler characteristic `2 - 2g - b`.
    pub fn chi(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.b() as i64
    }

    /// Number of boundary edges (intervals) of the open surface.
    pub fn boundary_edge_count(&self) -> usize {
        self.punctures.iter().map(|&r| r as usize).sum()
    }

    /// `r(Sigma) = #boundary edges - chi`.
    pub fn r_sigma(&self) -> i64 {
        self.boundary_edge_count() as i64 - self.chi()
    }

    /// Number of boundary components with an even number of punctures.
    pub fn even_components(&self) -> usize {
        self.punctures.iter().filter(|&&r| r % 2 == 0).count()
    }

    /// `|W| = (n-1) * #boundary edges`.
    pub fn w_count(&self, n: u32) -> usize {
        (n as usize - 1) * self.boundary_edge_count()
    }

    /// Monogons and bigons (and nothing else here) are not triangulable.
    pub fn is_triangulable(&self) -> bool {
        !(self.genus == 0 && self.punctures.len() == 1 && self.punctures[0] < 3)
    }
}

// ---------------------------------------------------------------------------
// Triangulation
// ---------------------------------------------------------------------------

pub type FaceId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug)]
pub struct FaceSlots {
    /// Edges in counterclockwise slot order; slot `s` joins corner `s` to
    /// corner `s+1` of the face.
    pub edges: [EdgeId; 3],
    /// `flips[s]` is true when the face side runs against the edge's
    /// intrinsic orientation.
    pub flips: [bool; 3],
}

#[derive(Clone, Debug)]
pub struct BoundaryComponent {
    /// Boundary edges in cyclic order along the positive orientation.
    pub edges: Vec<EdgeId>,
}

#[derive(Clone)]
pub struct Triangulation {
    faces: Vec<FaceSlots>,
    edge_names: Vec<String>,
    /// Per edge: incident (face, slot) pairs (1 = boundary, 2 = interior).
    incidence: Vec<Vec<(FaceId, u8)>>,
    /// Per face corner: global puncture id.
    corner_puncture: Vec<[usize; 3]>,
    n_punctures: usize,
    boundary: Vec<BoundaryComponent>,
    surface: Surface,
}

impl Triangulation {
    /// Validate gluing data and derive the surface. When `declared` is given,
    /// the derived surface must match it.
    pub fn new(
        faces: Vec<FaceSlots>,
        edge_names: Vec<String>,
        declared: Option<&Surface>,
    ) -> Result<Self> {
        let n_edges = edge_names.len();
        if faces.is_empty() {
            return Err(Error::Triangulation("no faces".into()));
        }
        let mut incidence: Vec<Vec<(FaceId, u8)>> = vec![Vec::new(); n_edges];
        for (f, face) in faces.iter().enumerate() {
            if face.edges[0] == face.edges[1]
                || face.edges[1] == face.edges[2]
                || face.edges[0] == face.edges[2]
            {
                return Err(Error::Triangulation(format!(
                    "face {f} is self-folded (uses an edge twice)"
                )));
            }
            for s in 0..3 {
                let e = face.edges[s];
                if e >= n_edges {
                    return Err(Error::Triangulation(format!("face {f} uses unknown edge {e}")));
                }
                incidence[e].push((f, s as u8));
            }
        }
        for (e, slots) in incidence.iter().enumerate() {
            match slots.len() {
                1 => {}
                2 => {
                    let (f1, s1) = slots[0];
                    let (f2, s2) = slots[1];
                    if faces[f1].flips[s1 as usize] == faces[f2].flips[s2 as usize] {
                        return Err(Error::Triangulation(format!(
                            "edge {} glued orientation-inconsistently (non-orientable gluing)",
                            edge_names[e]
                        )));
                    }
                }
                k => {
                    return Err(Error::Triangulation(format!(
                        "edge {} appears in {k} face slots; each edge must be used once (boundary) or twice (interior)",
                        edge_names[e]
                    )));
                }
            }
        }

        // Connectivity over faces.
        let mut seen = vec![false; faces.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for s in 0..3 {
                for &(g, _) in &incidence[faces[f].edges[s]] {
                    if !seen[g] {
                        seen[g] = true;
                        stack.push(g);
                    }
                }
            }
        }
        if seen.iter().any(|&x| !x) {
            return Err(Error::Triangulation("glued complex is disconnected".into()));
        }

        // Punctures: union-find over face corners.
        let n_corners = 3 * faces.len();
        let mut parent: Vec<usize> = (0..n_corners).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
            let (ra, rb) = (find(parent, a), find(parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        // Intrinsic start corner of the edge in slot (f, s).
        let start_corner = |faces: &[FaceSlots], f: usize, s: usize| -> usize {
            if faces[f].flips[s] {
                3 * f + (s + 1) % 3
            } else {
                3 * f + s
            }
        };
        let end_corner = |faces: &[FaceSlots], f: usize, s: usize| -> usize {
            if faces[f].flips[s] {
                3 * f + s
            } else {
                3 * f + (s + 1) % 3
            }
        };
        for slots in &incidence {
            if slots.len() == 2 {
                let (f1, s1) = slots[0];
                let (f2, s2) = slots[1];
                union(
                    &mut parent,
                    start_corner(&faces, f1, s1 as usize),
                    start_corner(&faces, f2, s2 as usize),
                );
                union(
                    &mut parent,
                    end_corner(&faces, f1, s1 as usize),
                    end_corner(&faces, f2, s2 as usize),
                );
            }
        }
        let mut puncture_ids: BTreeMap<usize, usize> = BTreeMap::new();
        let mut corner_puncture = vec![[0usize; 3]; faces.len()];
        for f in 0..faces.len() {
            for c in 0..3 {
                let root = find(&mut parent, 3 * f + c);
                let next = puncture_ids.len();
                let id = *puncture_ids.entry(root).or_insert(next);
                corner_puncture[f][c] = id;
            }
        }
        let n_punctures = puncture_ids.len();

        // Manifold check: the corner fan around each puncture is a single
        // interval ending on boundary slots on both sides.
        {
            let mut class_size = vec![0usize; n_punctures];
            for f in 0..faces.len() {
                for c in 0..3 {
                    class_size[corner_puncture[f][c]] += 1;
                }
            }
            let mut visited_from = vec![0usize; n_punctures];
            for f in 0..faces.len() {
                for c in 0..3 {
                    // Fan start: the slot ending at corner c is a boundary edge.
                    let s_in = (c + 2) % 3;
                    if incidence[faces[f].edges[s_in]].len() == 1 {
                        let p = corner_puncture[f][c];
                        let (mut cf, mut cc) = (f, c);
                        loop {
                            visited_from[p] += 1;
                            let s_out = cc;
                            let e = faces[cf].edges[s_out];
                            if incidence[e].len() == 1 {
                                break;
                            }
                            let &(of, os) = incidence[e]
                                .iter()
                                .find(|&&(of, os)| (of, os as usize) != (cf, s_out))
                                .unwrap();
                            cf = of;
                            cc = (os as usize + 1) % 3;
                        }
                    }
                }
            }
            for p in 0..n_punctures {
                if visited_from[p] != class_size[p] {
                    return Err(Error::Triangulation(format!(
                        "puncture {p} is not a manifold boundary point (interior puncture or pinched vertex)"
                    )));
                }
            }
        }

        // Boundary components. A boundary edge is positively oriented along
        // its face walk; the successor starts at this edge's end puncture.
        let boundary_edges: Vec<EdgeId> =
            (0..n_edges).filter(|&e| incidence[e].len() == 1).collect();
        if boundary_edges.is_empty() {
            return Err(Error::Triangulation("surface has empty boundary".into()));
        }
        let mut starts: BTreeMap<usize, EdgeId> = BTreeMap::new();
        let mut ends: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for &e in &boundary_edges {
            let (f, s) = incidence[e][0];
            let sp = corner_puncture[f][s as usize];
            let ep = corner_puncture[f][(s as usize + 1) % 3];
            if starts.insert(sp, e).is_some() {
                return Err(Error::Triangulation(format!(
                    "puncture {sp} starts two boundary edges (pinched boundary)"
                )));
            }
            ends.insert(e, ep);
        }
        let mut used = vec![false; n_edges];
        let mut boundary = Vec::new();
        for &e0 in &boundary_edges {
            if used[e0] {
                continue;
            }
            let mut cycle = vec![e0];
            used[e0] = true;
            let mut cur = e0;
            loop {
                let ep = ends[&cur];
                let &next = starts.get(&ep).ok_or_else(|| {
                    Error::Triangulation(format!("boundary walk stuck at puncture {ep}"))
                })?;
                if next == e0 {
                    break;
                }
                if used[next] {
                    return Err(Error::Triangulation("boundary walk revisits an edge".into()));
                }
                used[next] = true;
                cycle.push(next);
                cur = next;
            }
            boundary.push(BoundaryComponent { edges: cycle });
        }
        if boundary.iter().map(|c| c.edges.len()).sum::<usize>() != boundary_edges.len() {
            return Err(Error::Triangulation("boundary edges not covered by the walk".into()));
        }

        // Every puncture must lie on the boundary.
        if starts.len() != n_punctures {
            return Err(Error::Triangulation(
                "interior puncture detected; only boundary punctures are representable".into(),
            ));
        }

        // Euler characteristic and genus.
        let chi = n_punctures as i64 - n_edges as i64 + faces.len() as i64;
        let b = boundary.len() as i64;
        let two_g = 2 - b - chi;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::Triangulation(format!(
                "Euler characteristic {chi} inconsistent with an orientable surface with {b} boundary circles"
            )));
        }
        let genus = (two_g / 2) as u32;
        let derived =
            Surface::new(genus, boundary.iter().map(|c| c.edges.len() as u32).collect())?;
        if let Some(decl) = declared {
            let mut a = decl.punctures.clone();
            let mut d = derived.punctures.clone();
            a.sort_unstable();
            d.sort_unstable();
            if decl.genus != derived.genus || a != d {
                return Err(Error::Triangulation(format!(
                    "declared surface (genus {}, punctures {:?}) does not match glued surface (genus {}, punctures {:?})",
                    decl.genus, decl.punctures, derived.genus, derived.punctures
                )));
            }
        }

        Ok(Triangulation {
            faces,
            edge_names,
            incidence,
            corner_puncture,
            n_punctures,
            boundary,
            surface: derived,
        })
    }

    pub fn faces(&self) -> &[FaceSlots] {
        &self.faces
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_names.len()
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e]
    }

    pub fn n_punctures(&self) -> usize {
        self.n_punctures
    }

    pub fn incidence(&self, e: EdgeId) -> &[(FaceId, u8)] {
        &self.incidence[e]
    }

    pub fn is_boundary_edge(&self, e: EdgeId) -> bool {
        self.incidence[e].len() == 1
    }

    pub fn boundary_edges(&self) -> Vec<EdgeId> {
        (0..self.n_edges()).filter(|&e| self.is_boundary_edge(e)).collect()
    }

    pub fn interior_edges(&self) -> Vec<EdgeId> {
        (0..self.n_edges()).filter(|&e| !self.is_boundary_edge(e)).collect()
    }

    pub fn boundary(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn corner_puncture(&self, f: FaceId, c: usize) -> usize {
        self.corner_puncture[f][c]
    }

    /// Start/end punctures of an edge along its intrinsic orientation.
    pub fn edge_endpoints(&self, e: EdgeId) -> (usize, usize) {
        let (f, s) = self.incidence[e][0];
        let (f, s) = (f, s as usize);
        if self.faces[f].flips[s] {
            (self.corner_puncture[f][(s + 1) % 3], self.corner_puncture[f][s])
        } else {
            (self.corner_puncture[f][s], self.corner_puncture[f][(s + 1) % 3])
        }
    }

    /// True when the edge's intrinsic orientation agrees with the positive
    /// boundary orientation (face walk); meaningful for boundary edges.
    pub fn boundary_edge_positive(&self, e: EdgeId) -> bool {
        let (f, s) = self.incidence[e][0];
        !self.faces[f].flips[s as usize]
    }

    /// Component and position of a boundary edge.
    pub fn boundary_position(&self, e: EdgeId) -> Option<(usize, usize)> {
        for (ci, comp) in self.boundary.iter().enumerate() {
            if let Some(pos) = comp.edges.iter().position(|&x| x == e) {
                return Some((ci, pos));
            }
        }
        None
    }
}

impl std::fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Triangulation(faces={}, edges={}, punctures={}, surface=({}, {:?}))",
            self.faces.len(),
            self.n_edges(),
            self.n_punctures,
            self.surface.genus(),
            self.surface.punctures()
        )
    }
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Fan triangulation of an N-gon with optional side pairings. Pairing `(i,j)`
/// glues side `i` to side `j` with reversed orientation. Unpaired sides
/// become boundary edges.
fn polygon_with_pairings(n_sides: usize, pairings: &[(usize, usize)]) -> Result<Triangulation> {
    assert!(n_sides >= 3);
    let mut paired_with = vec![None; n_sides];
    for &(i, j) in pairings {
        assert!(i < n_sides && j < n_sides && i != j);
        paired_with[i] = Some(j);
        paired_with[j] = Some(i);
    }
    let mut side_edge = vec![usize::MAX; n_sides];
    let mut side_flip = vec![false; n_sides];
    let mut edge_names = Vec::new();
    for i in 0..n_sides {
        match paired_with[i] {
            None => {
                side_edge[i] = edge_names.len();
                edge_names.push(format!("s{i}"));
            }
            Some(j) if j > i => {
                side_edge[i] = edge_names.len();
                side_edge[j] = edge_names.len();
                side_flip[j] = true;
                edge_names.push(format!("s{i}~s{j}"));
            }
            Some(_) => {}
        }
    }
    let mut diag_edge = vec![usize::MAX; n_sides];
    for (i, d) in diag_edge.iter_mut().enumerate().take(n_sides - 1).skip(2) {
        *d = edge_names.len();
        edge_names.push(format!("d{i}"));
    }
    // Faces (c0, c_i, c_{i+1}) for i = 1..N-2.
    let mut faces = Vec::new();
    for i in 1..n_sides - 1 {
        let (e0, f0) = if i == 1 { (side_edge[0], side_flip[0]) } else { (diag_edge[i], false) };
        let (e1, f1) = (side_edge[i], side_flip[i]);
        let (e2, f2) = if i + 1 == n_sides - 1 {
            (side_edge[n_sides - 1], side_flip[n_sides - 1])
        } else {
            (diag_edge[i + 1], true)
        };
        faces.push(FaceSlots { edges: [e0, e1, e2], flips: [f0, f1, f2] });
    }
    Triangulation::new(faces, edge_names, None)
}

/// Fan triangulation of a disk with `k >= 3` boundary punctures.
pub fn polygon(k: usize) -> Result<Triangulation> {
    if k < 3 {
        return Err(Error::Surface(format!(
            "polygon with {k} punctures is not triangulable (monogon/bigon)"
        )));
    }
    polygon_with_pairings(k, &[])
}

/// Annulus with `r1` and `r2` boundary punctures on its two circles.
pub fn annulus(r1: usize, r2: usize) -> Result<Triangulation> {
    if r1 == 0 || r2 == 0 {
        return Err(Error::Surface("annulus components need at least one puncture".into()));
    }
    let n = r1 + r2 + 2;
    polygon_with_pairings(n, &[(r1, n - 1)])
}

/// Genus-`g` surface with one boundary circle carrying `r` punctures, via the
/// standard 4g-gon commutator word followed by `r` free sides.
pub fn genus_one_boundary(g: usize, r: usize) -> Result<Triangulation> {
    if g == 0 {
        return polygon(r);
    }
    if r == 0 {
        return Err(Error::Surface("boundary circle needs at least one puncture".into()));
    }
    let n = 4 * g + r;
    let mut pairs = Vec::new();
    for h in 0..g {
        pairs.push((4 * h, 4 * h + 2));
        pairs.push((4 * h + 1, 4 * h + 3));
    }
    polygon_with_pairings(n, &pairs)
}

/// General builder for `(g, [r_1..r_b])`: handle pairings, then cut-arc
/// pairings for every boundary circle after the first.
pub fn build_triangulation(surface: &Surface) -> Result<Triangulation> {
    if !surface.is_triangulable() {
        return Err(Error::Surface(format!(
            "surface (genus {}, punctures {:?}) is not triangulable",
            surface.genus(),
            surface.punctures()
        )));
    }
    let g = surface.genus() as usize;
    let rs = surface.punctures();
    let mut pairs = Vec::new();
    for h in 0..g {
        pairs.push((4 * h, 4 * h + 2));
        pairs.push((4 * h + 1, 4 * h + 3));
    }
    let mut pos = 4 * g;
    for &r in &rs[1..] {
        let cut = pos;
        let cut_back = pos + r as usize + 1;
        pairs.push((cut, cut_back));
        pos = cut_back + 1;
    }
    let n = pos + rs[0] as usize;
    let tri = polygon_with_pairings(n, &pairs)?;
    let mut want = rs.to_vec();
    let mut got = tri.surface().punctures().to_vec();
    want.sort_unstable();
    got.sort_unstable();
    if tri.surface().genus() != surface.genus() || want != got {
        return Err(Error::Triangulation(format!(
            "generator produced (genus {}, punctures {:?}) instead of (genus {}, punctures {:?})",
            tri.surface().genus(),
            tri.surface().punctures(),
            surface.genus(),
            surface.punctures()
        )));
    }
    Ok(tri)
}

// ---------------------------------------------------------------------------
// Extended triangulation (one triangle attached to every boundary edge)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct AttachedTriangle {
    pub face: FaceId,
    /// The edge this triangle is glued along (the triangle's first slot).
    pub base_edge: EdgeId,
    /// New boundary edge carrying the w vertices (second slot).
    pub w_edge: EdgeId,
    /// New boundary edge carrying the u vertices (third slot).
    pub u_edge: EdgeId,
    /// Boundary component of the base edge and its position along the
    /// component's positive orientation.
    pub component: usize,
    pub position: usize,
}

#[derive(Clone, Debug)]
pub struct ExtendedTriangulation {
    pub tri: Triangulation,
    pub base: Triangulation,
    pub attached: Vec<AttachedTriangle>,
}

/// Attach a triangle to every boundary edge of `base`, glued along the
/// triangle's first slot.
pub fn attach_triangles(base: &Triangulation) -> Result<ExtendedTriangulation> {
    let mut faces: Vec<FaceSlots> = base.faces().to_vec();
    let mut edge_names: Vec<String> =
        (0..base.n_edges()).map(|e| base.edge_name(e).to_string()).collect();
    let mut attached = Vec::new();
    for (ci, comp) in base.boundary().iter().enumerate() {
        for (pos, &e) in comp.edges.iter().enumerate() {
            let w_edge = edge_names.len();
            edge_names.push(format!("w@{}", base.edge_name(e)));
            let u_edge = edge_names.len();
            edge_names.push(format!("u@{}", base.edge_name(e)));
            // The base slot runs along the positive boundary direction; the
            // attached triangle must induce the opposite direction on e.
            let attach_flip = base.boundary_edge_positive(e);
            let face = faces.len();
            faces.push(FaceSlots {
                edges: [e, w_edge, u_edge],
                flips: [attach_flip, false, false],
            });
            attached.push(AttachedTriangle {
                face,
                base_edge: e,
                w_edge,
                u_edge,
                component: ci,
                position: pos,
            });
        }
    }
    let tri = Triangulation::new(faces, edge_names, None)?;
    Ok(ExtendedTriangulation { tri, base: base.clone(), attached })
}

// ---------------------------------------------------------------------------
// The special triangulation of the reduced case
// ---------------------------------------------------------------------------

/// Role of a boundary edge of the special triangulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuEdgeRole {
    W,
    U,
    /// Leftover boundary edge of an odd component (carries the a vertices).
    A,
}

#[derive(Clone, Debug)]
pub struct MuTriangulation {
    pub tri: Triangulation,
    /// Ear faces, glued along their first slot (an interior arc).
    pub ears: Vec<AttachedTriangle>,
    /// Role of every boundary edge.
    pub roles: BTreeMap<EdgeId, MuEdgeRole>,
}

/// Strategy for triangulating what remains after the boundary ears are
/// carved off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InteriorChoice {
    #[default]
    Fan,
}

/// Build the special triangulation: per boundary component, `floor(r_i/2)`
/// ear triangles (plus the extra triangle of the odd rule), the remaining
/// surface triangulated by `interior_choice`.
pub fn build_mu(surface: &Surface, _interior_choice: InteriorChoice) -> Result<MuTriangulation> {
    if !surface.is_triangulable() {
        return Err(Error::Surface(format!(
            "surface (genus {}, punctures {:?}) is not triangulable",
            surface.genus(),
            surface.punctures()
        )));
    }
    let g = surface.genus() as usize;
    let rs: Vec<usize> = surface.punctures().iter().map(|&r| r as usize).collect();

    // Degenerate small polygons get explicit triangulations (shared arcs).
    if g == 0 && rs.len() == 1 && rs[0] <= 5 {
        return mu_small_polygon(rs[0]);
    }

    // Inner surface after carving the ears.
    let inner_rs: Vec<u32> = rs.iter().map(|&r| inner_count(r)).collect();
    let inner_surface = Surface::new(surface.genus(), inner_rs)?;
    if !inner_surface.is_triangulable() {
        return Err(Error::Surface(format!(
            "ear construction leaves a non-triangulable core for (genus {}, punctures {:?})",
            surface.genus(),
            surface.punctures()
        )));
    }
    let inner = build_triangulation(&inner_surface)?;

    let mut faces: Vec<FaceSlots> = inner.faces().to_vec();
    let mut edge_names: Vec<String> =
        (0..inner.n_edges()).map(|e| inner.edge_name(e).to_string()).collect();
    let mut ears: Vec<AttachedTriangle> = Vec::new();
    let mut roles: BTreeMap<EdgeId, MuEdgeRole> = BTreeMap::new();

    let attach_ear = |faces: &mut Vec<FaceSlots>,
                      edge_names: &mut Vec<String>,
                      glue_edge: EdgeId,
                      glue_flip: bool,
                      tag: &str|
     -> (FaceId, EdgeId, EdgeId) {
        let w_edge = edge_names.len();
        edge_names.push(format!("w{tag}"));
        let u_edge = edge_names.len();
        edge_names.push(format!("u{tag}"));
        let face = faces.len();
        faces
            .push(FaceSlots { edges: [glue_edge, w_edge, u_edge], flips: [glue_flip, false, false] });
        (face, w_edge, u_edge)
    };

    if inner.boundary().len() != rs.len() {
        return Err(Error::Triangulation("inner boundary component count mismatch".into()));
    }
    // Match inner components to outer components by their reduced counts.
    let mut outer_taken = vec![false; rs.len()];
    for comp in inner.boundary() {
        let have = comp.edges.len() as u32;
        let oi = (0..rs.len())
            .find(|&i| !outer_taken[i] && inner_count(rs[i]) == have)
            .ok_or_else(|| Error::Triangulation("cannot match inner component".into()))?;
        outer_taken[oi] = true;
        let r = rs[oi];
        if r == 1 {
            roles.insert(comp.edges[0], MuEdgeRole::A);
            continue;
        }
        let n_plain = if r % 2 == 0 { r / 2 } else { (r - 1) / 2 - 1 };
        for (idx, &arc) in comp.edges.iter().enumerate() {
            let glue_flip = inner.boundary_edge_positive(arc);
            if idx < n_plain {
                let (face, w_edge, u_edge) =
                    attach_ear(&mut faces, &mut edge_names, arc, glue_flip, &format!("_{oi}_{idx}"));
                roles.insert(w_edge, MuEdgeRole::W);
                roles.insert(u_edge, MuEdgeRole::U);
                ears.push(AttachedTriangle {
                    face,
                    base_edge: arc,
                    w_edge,
                    u_edge,
                    component: oi,
                    position: idx,
                });
            } else {
                // Odd component: tail triangle carrying the leftover boundary
                // edge, with the last ear on its second arc.
                let ear_arc = edge_names.len();
                edge_names.push(format!("arc_{oi}_tail"));
                let a_edge = edge_names.len();
                edge_names.push(format!("a_{oi}"));
                faces.push(FaceSlots {
                    edges: [arc, ear_arc, a_edge],
                    flips: [glue_flip, false, false],
                });
                roles.insert(a_edge, MuEdgeRole::A);
                let (eface, w_edge, u_edge) = attach_ear(
                    &mut faces,
                    &mut edge_names,
                    ear_arc,
                    true,
                    &format!("_{oi}_{idx}"),
                );
                roles.insert(w_edge, MuEdgeRole::W);
                roles.insert(u_edge, MuEdgeRole::U);
                ears.push(AttachedTriangle {
                    face: eface,
                    base_edge: ear_arc,
                    w_edge,
                    u_edge,
                    component: oi,
                    position: idx,
                });
            }
        }
    }
    let tri = Triangulation::new(faces, edge_names, Some(surface))?;
    Ok(MuTriangulation { tri, ears, roles })
}

fn inner_count(outer_r: usize) -> u32 {
    match outer_r {
        1 => 1,
        r if r % 2 == 0 => (r / 2) as u32,
        r => ((r - 1) / 2) as u32,
    }
}

/// Explicit special triangulations of the disk with 3, 4 or 5 punctures,
/// where the generic ear construction degenerates into shared arcs.
fn mu_small_polygon(k: usize) -> Result<MuTriangulation> {
    let mut roles = BTreeMap::new();
    let mut ears = Vec::new();
    let tri = match k {
        3 => {
            // Single face; no ears exist. All boundary edges carry a vertices.
            let tri = polygon(3)?;
            for e in tri.boundary_edges() {
                roles.insert(e, MuEdgeRole::A);
            }
            tri
        }
        4 => {
            // Two ears sharing the single diagonal.
            let names = vec!["e1", "e2", "e3", "e4", "d"];
            let faces = vec![
                FaceSlots { edges: [4, 0, 1], flips: [false, false, false] },
                FaceSlots { edges: [4, 2, 3], flips: [true, false, false] },
            ];
            let tri =
                Triangulation::new(faces, names.into_iter().map(String::from).collect(), None)?;
            for (w, u) in [(0usize, 1usize), (2, 3)] {
                roles.insert(w, MuEdgeRole::W);
                roles.insert(u, MuEdgeRole::U);
            }
            ears.push(AttachedTriangle {
                face: 0,
                base_edge: 4,
                w_edge: 0,
                u_edge: 1,
                component: 0,
                position: 0,
            });
            ears.push(AttachedTriangle {
                face: 1,
                base_edge: 4,
                w_edge: 2,
                u_edge: 3,
                component: 0,
                position: 1,
            });
            tri
        }
        5 => {
            // Ears (a13; e1, e2), (a35; e3, e4) and tail (a13, a35, e5).
            let names = vec!["e1", "e2", "e3", "e4", "e5", "a13", "a35"];
            let faces = vec![
                FaceSlots { edges: [5, 0, 1], flips: [false, false, false] },
                FaceSlots { edges: [6, 2, 3], flips: [false, false, false] },
                FaceSlots { edges: [5, 6, 4], flips: [true, true, false] },
            ];
            let tri =
                Triangulation::new(faces, names.into_iter().map(String::from).collect(), None)?;
            for (w, u) in [(0usize, 1usize), (2, 3)] {
                roles.insert(w, MuEdgeRole::W);
                roles.insert(u, MuEdgeRole::U);
            }
            roles.insert(4, MuEdgeRole::A);
            ears.push(AttachedTriangle {
                face: 0,
                base_edge: 5,
                w_edge: 0,
                u_edge: 1,
                component: 0,
                position: 0,
            });
            ears.push(AttachedTriangle {
                face: 1,
                base_edge: 6,
                w_edge: 2,
                u_edge: 3,
                component: 0,
                position: 1,
            });
            tri
        }
        _ => unreachable!(),
    };
    Ok(MuTriangulation { tri, ears, roles })
}

// ---------------------------------------------------------------------------
// Spec file format (versioned schema)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SpecFile {
    schema: u32,
    surface: SpecSurface,
    faces: Vec<SpecFace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary: Option<Vec<SpecBoundary>>,
}

#[derive(Serialize, Deserialize)]
struct SpecSurface {
    genus: u32,
    punctures: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SpecFace {
    edges: Vec<String>,
    flips: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct SpecBoundary {
    component: usize,
    edges_ccw: Vec<String>,
}

/// Parse and validate a triangulation spec document.
pub fn load_triangulation(json: &str) -> Result<Triangulation> {
    let spec: SpecFile =
        serde_json::from_str(json).map_err(|e| Error::SpecFile(format!("parse error: {e}")))?;
    if spec.schema != 1 {
        return Err(Error::SpecFile(format!("unsupported schema version {}", spec.schema)));
    }
    let declared = Surface::new(spec.surface.genus, spec.surface.punctures.clone())?;
    let mut edge_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut edge_names: Vec<String> = Vec::new();
    let mut faces = Vec::new();
    for (fi, f) in spec.faces.iter().enumerate() {
        if f.edges.len() != 3 || f.flips.len() != 3 {
            return Err(Error::SpecFile(format!(
                "face {fi} must have exactly 3 edges and 3 flips"
            )));
        }
        let mut edges = [0usize; 3];
        let mut flips = [false; 3];
        for s in 0..3 {
            let name = &f.edges[s];
            let next = edge_names.len();
            let id = *edge_ids.entry(name.clone()).or_insert_with(|| {
                edge_names.push(name.clone());
                next
            });
            edges[s] = id;
            flips[s] = f.flips[s];
        }
        faces.push(FaceSlots { edges, flips });
    }
    let tri = Triangulation::new(faces, edge_names, Some(&declared))?;
    if let Some(decl_boundary) = &spec.boundary {
        for db in decl_boundary {
            let ids: Vec<usize> = db
                .edges_ccw
                .iter()
                .map(|n| {
                    edge_ids
                        .get(n)
                        .copied()
                        .ok_or_else(|| Error::SpecFile(format!("unknown boundary edge {n}")))
                })
                .collect::<Result<_>>()?;
            let matched = tri.boundary().iter().any(|comp| {
                comp.edges.len() == ids.len()
                    && (0..comp.edges.len()).any(|shift| {
                        (0..comp.edges.len())
                            .all(|i| comp.edges[(shift + i) % comp.edges.len()] == ids[i])
                    })
            });
            if !matched {
                return Err(Error::SpecFile(format!(
                    "declared boundary component {} does not match the glued boundary",
                    db.component
                )));
            }
        }
    }
    Ok(tri)
}

/// Serialize a triangulation back into the spec document format.
pub fn triangulation_to_spec(tri: &Triangulation) -> String {
    let spec = SpecFile {
        schema: 1,
        surface: SpecSurface {
            genus: tri.surface().genus(),
            punctures: tri.surface().punctures().to_vec(),
        },
        faces: tri
            .faces()
            .iter()
            .map(|f| SpecFace {
                edges: f.edges.iter().map(|&e| tri.edge_name(e).to_string()).collect(),
                flips: f.flips.to_vec(),
            })
            .collect(),
        boundary: Some(
            tri.boundary()
                .iter()
                .enumerate()
                .map(|(ci, comp)| SpecBoundary {
                    component: ci,
                    edges_ccw: comp.edges.iter().map(|&e| tri.edge_name(e).to_string()).collect(),
                })
                .collect(),
        ),
    };
    serde_json::to_string_pretty(&spec).expect("spec serialization")
}
