//! Crease-fitted triangular meshes: structured construction, edge
//! classification, and conforming adaptive refinement by newest-vertex
//! bisection with crease re-projection.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::FoldError;

pub const FOLD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct Vertex {
    pub pos: [f64; 2],
    pub on_fold: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Triangle {
    /// Vertex ids, counter-clockwise.
    pub v: [usize; 3],
    /// Local index of the refinement ("newest-vertex") edge; edge i is the
    /// edge opposite vertex i.
    pub refine_edge: u8,
    pub parent: Option<usize>,
    pub level: u32,
    /// 1 or 2: which side of the fold the triangle lies on (1 if no fold).
    pub subdomain: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    Interior,
    Dirichlet,
    Neumann,
    Crease,
}

impl EdgeTag {
    /// Member of Γ̃_h = interior ∪ Dirichlet ∪ crease.
    pub fn in_gamma_tilde(self) -> bool {
        !matches!(self, EdgeTag::Neumann)
    }

    /// Strictly inside the domain (interior or crease).
    pub fn is_interior(self) -> bool {
        matches!(self, EdgeTag::Interior | EdgeTag::Crease)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Edge {
    pub v: [usize; 2],
    /// Adjacent triangles; `other` is None on the boundary.
    pub owner: usize,
    pub other: Option<usize>,
    pub tag: EdgeTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldKind {
    Polyline,
    Smooth,
}

/// The crease curve. Either a vertical line segment x = const or the graph
/// of a function y = f(x); both partition the domain into Ω₁ and Ω₂.
#[derive(Clone)]
pub enum FoldCurve {
    Vertical {
        x: f64,
        y0: f64,
        y1: f64,
    },
    Graph {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        x0: f64,
        x1: f64,
        kind: FoldKind,
    },
}

impl fmt::Debug for FoldCurve {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldCurve::Vertical { x, y0, y1 } => {
                write!(fm, "FoldCurve::Vertical {{ x: {x}, y: [{y0}, {y1}] }}")
            }
            FoldCurve::Graph { x0, x1, kind, .. } => {
                write!(fm, "FoldCurve::Graph {{ x: [{x0}, {x1}], kind: {kind:?} }}")
            }
        }
    }
}

impl FoldCurve {
    pub fn project(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            FoldCurve::Vertical { x, y0, y1 } => [*x, p[1].clamp(*y0, *y1)],
            FoldCurve::Graph { f, x0, x1, .. } => {
                let x = p[0].clamp(*x0, *x1);
                [x, f(x)]
            }
        }
    }

    /// 1 = Ω₁, 2 = Ω₂. The unit normal on crease edges points from Ω₁ to Ω₂.
    pub fn side(&self, p: [f64; 2]) -> u8 {
        match self {
            FoldCurve::Vertical { x, .. } => {
                if p[0] < *x {
                    1
                } else {
                    2
                }
            }
            FoldCurve::Graph { f, .. } => {
                if p[1] < f(p[0]) {
                    1
                } else {
                    2
                }
            }
        }
    }

    pub fn endpoints(&self) -> [[f64; 2]; 2] {
        match self {
            FoldCurve::Vertical { x, y0, y1 } => [[*x, *y0], [*x, *y1]],
            FoldCurve::Graph { f, x0, x1, .. } => [[*x0, f(*x0)], [*x1, f(*x1)]],
        }
    }
}

/// Domain shapes supported by the structured generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructuredDomain {
    UnitSquare,
    /// (-1,1)² minus the open upper-right quadrant (0,1)².
    LShape,
}

impl StructuredDomain {
    /// Unit-square blocks by lower-left corner.
    fn blocks(self) -> &'static [[i64; 2]] {
        match self {
            StructuredDomain::UnitSquare => &[[0, 0]],
            StructuredDomain::LShape => &[[-1, -1], [0, -1], [-1, 0]],
        }
    }

    fn contains_cell(self, cx: i64, cy: i64, n: i64) -> bool {
        let bx = cx.div_euclid(n);
        let by = cy.div_euclid(n);
        self.blocks().contains(&[bx, by])
    }

    fn on_boundary(self, p: [f64; 2], tol: f64) -> bool {
        let near = |a: f64, b: f64| (a - b).abs() <= tol;
        match self {
            StructuredDomain::UnitSquare => {
                near(p[0], 0.0) || near(p[0], 1.0) || near(p[1], 0.0) || near(p[1], 1.0)
            }
            StructuredDomain::LShape => {
                let inside = |v: f64| (-1.0 - tol..=1.0 + tol).contains(&v);
                if !inside(p[0]) || !inside(p[1]) {
                    return false;
                }
                near(p[0], -1.0)
                    || near(p[1], -1.0)
                    || (near(p[0], 1.0) && p[1] <= tol)
                    || (near(p[1], 1.0) && p[0] <= tol)
                    || (near(p[0], 0.0) && p[1] >= -tol)
                    || (near(p[1], 0.0) && p[0] >= -tol)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    /// Edge id of each triangle's local edges.
    pub tri_edges: Vec<[usize; 3]>,
    pub fold: Option<FoldCurve>,
}

fn sorted_pair(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Local edge i of a triangle connects vertices (i+1)%3 and (i+2)%3.
pub fn local_edge_vertices(tri: &Triangle, i: usize) -> (usize, usize) {
    (tri.v[(i + 1) % 3], tri.v[(i + 2) % 3])
}

impl Mesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn tri_area(&self, t: usize) -> f64 {
        let v = self.triangles[t].v;
        signed_area(
            self.vertices[v[0]].pos,
            self.vertices[v[1]].pos,
            self.vertices[v[2]].pos,
        )
    }

    /// h_T = diam T (the longest edge for a triangle).
    pub fn tri_diameter(&self, t: usize) -> f64 {
        let v = self.triangles[t].v;
        let p = [
            self.vertices[v[0]].pos,
            self.vertices[v[1]].pos,
            self.vertices[v[2]].pos,
        ];
        dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
    }

    pub fn tri_centroid(&self, t: usize) -> [f64; 2] {
        let v = self.triangles[t].v;
        let mut c = [0.0; 2];
        for &vi in &v {
            c[0] += self.vertices[vi].pos[0] / 3.0;
            c[1] += self.vertices[vi].pos[1] / 3.0;
        }
        c
    }

    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let v = self.triangles[t].v;
            for i in 0..3 {
                let a = self.vertices[v[i]].pos;
                let b = self.vertices[v[(i + 1) % 3]].pos;
                let c = self.vertices[v[(i + 2) % 3]].pos;
                let u = [b[0] - a[0], b[1] - a[1]];
                let w = [c[0] - a[0], c[1] - a[1]];
                let dot = u[0] * w[0] + u[1] * w[1];
                let cross = u[0] * w[1] - u[1] * w[0];
                min = min.min(cross.atan2(dot).abs());
            }
        }
        min
    }

    /// Unit normal (out of the owner T₊), unit tangent, length, midpoint.
    pub fn edge_geometry(&self, e: usize) -> Result<([f64; 2], [f64; 2], f64, [f64; 2]), FoldError> {
        let edge = self.edges.get(e).ok_or(FoldError::InvalidEdge(e))?;
        let owner = &self.triangles[edge.owner];
        // find the owner's local traversal of this edge (CCW order)
        let mut found = None;
        for i in 0..3 {
            let (a, b) = local_edge_vertices(owner, i);
            if sorted_pair(a, b) == sorted_pair(edge.v[0], edge.v[1]) {
                found = Some((a, b));
            }
        }
        let (a, b) = found.expect("owner must contain its edge");
        let pa = self.vertices[a].pos;
        let pb = self.vertices[b].pos;
        let d = [pb[0] - pa[0], pb[1] - pa[1]];
        let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let tau = [d[0] / len, d[1] / len];
        // outward normal of a CCW triangle along edge a->b
        let n = [tau[1], -tau[0]];
        let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        Ok((n, tau, len, mid))
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let edge = &self.edges[e];
        dist(self.vertices[edge.v[0]].pos, self.vertices[edge.v[1]].pos)
    }

    /// All triangles whose closure contains `p` (barycentric tolerance 1e-12).
    pub fn triangles_containing(&self, p: [f64; 2]) -> Vec<usize> {
        let mut out = Vec::new();
        for t in 0..self.triangles.len() {
            let v = self.triangles[t].v;
            let a = self.vertices[v[0]].pos;
            let b = self.vertices[v[1]].pos;
            let c = self.vertices[v[2]].pos;
            let area = signed_area(a, b, c);
            let l0 = signed_area(p, b, c) / area;
            let l1 = signed_area(a, p, c) / area;
            let l2 = signed_area(a, b, p) / area;
            let tol = 1e-12;
            if l0 >= -tol && l1 >= -tol && l2 >= -tol {
                out.push(t);
            }
        }
        out
    }

    /// Re-tag boundary edges from a midpoint predicate. Interior and crease
    /// edges are untouched.
    pub fn set_boundary_tags(&mut self, tag_of: &dyn Fn([f64; 2]) -> EdgeTag) {
        for e in 0..self.edges.len() {
            if self.edges[e].other.is_none() {
                let (_, _, _, mid) = self.edge_geometry(e).unwrap();
                self.edges[e].tag = tag_of(mid);
            }
        }
    }

    /// Swap the orientation owner of an interior edge (test hook; assembled
    /// systems must be invariant under this).
    pub fn flip_edge_owner(&mut self, e: usize) {
        if let Some(other) = self.edges[e].other {
            let owner = self.edges[e].owner;
            self.edges[e].owner = other;
            self.edges[e].other = Some(owner);
        }
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        // positive areas, distinct vertices
        for t in 0..self.triangles.len() {
            let v = self.triangles[t].v;
            if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
                return Err(format!("triangle {t} has repeated vertices"));
            }
            if self.tri_area(t) <= 0.0 {
                return Err(format!("triangle {t} has non-positive area"));
            }
        }
        // conformity: interior edges have exactly two adjacent triangles
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for i in 0..3 {
                let (a, b) = local_edge_vertices(tri, i);
                *count.entry(sorted_pair(a, b)).or_insert(0) += 1;
            }
        }
        for e in &self.edges {
            let c = count[&sorted_pair(e.v[0], e.v[1])];
            match (c, e.other.is_some()) {
                (2, true) | (1, false) => {}
                _ => return Err(format!("edge {:?} adjacency mismatch ({c})", e.v)),
            }
            if c > 2 {
                return Err(format!("edge {:?} shared by {c} triangles", e.v));
            }
            if e.tag == EdgeTag::Crease && e.other.is_none() {
                return Err(format!("crease edge {:?} on the boundary", e.v));
            }
        }
        // Euler relation for a simply connected triangulated disk
        let euler =
            self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64;
        if euler != 1 {
            return Err(format!("Euler relation violated: V - E + T = {euler}"));
        }
        // fitted property
        if let Some(fold) = &self.fold {
            for e in &self.edges {
                if e.tag == EdgeTag::Crease {
                    for &vi in &e.v {
                        let p = self.vertices[vi].pos;
                        let q = fold.project(p);
                        if dist(p, q) > FOLD_TOL {
                            return Err(format!("crease vertex {p:?} off the fold curve"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Conforming refinement: bisect every marked triangle at least once,
    /// closing the mesh by extra bisections. Crease-edge midpoints are
    /// projected back onto the fold curve.
    pub fn refine(&self, marked: &BTreeSet<usize>) -> Result<Mesh, FoldError> {
        if let Some(&bad) = marked.iter().find(|&&t| t >= self.triangles.len()) {
            return Err(FoldError::InvalidTriangle(bad));
        }
        if marked.is_empty() {
            return Ok(self.clone());
        }

        // closure on edge marks: a triangle with any marked edge must have a
        // marked refinement edge
        let mut marked_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &t in marked {
            let tri = &self.triangles[t];
            let (a, b) = local_edge_vertices(tri, tri.refine_edge as usize);
            marked_edges.insert(sorted_pair(a, b));
        }
        loop {
            let mut grew = false;
            for tri in &self.triangles {
                let any = (0..3).any(|i| {
                    let (a, b) = local_edge_vertices(tri, i);
                    marked_edges.contains(&sorted_pair(a, b))
                });
                if any {
                    let (a, b) = local_edge_vertices(tri, tri.refine_edge as usize);
                    if marked_edges.insert(sorted_pair(a, b)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }

        // old tag lookup
        let mut tag_of: HashMap<(usize, usize), EdgeTag> = HashMap::new();
        for e in &self.edges {
            tag_of.insert(sorted_pair(e.v[0], e.v[1]), e.tag);
        }

        // midpoints (BTreeSet iteration keeps vertex numbering deterministic)
        let mut vertices = self.vertices.clone();
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut new_tags: HashMap<(usize, usize), EdgeTag> = tag_of.clone();
        for &(a, b) in &marked_edges {
            let pa = vertices[a].pos;
            let pb = vertices[b].pos;
            let mut mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            let tag = tag_of[&(a, b)];
            let mut on_fold = false;
            if tag == EdgeTag::Crease {
                let fold = self.fold.as_ref().expect("crease edge without a fold");
                let proj = fold.project(mid);
                if dist(proj, mid) > 0.5 * dist(pa, pb) {
                    return Err(FoldError::ProjectionFailure(mid));
                }
                mid = proj;
                on_fold = true;
            }
            let id = vertices.len();
            vertices.push(Vertex { pos: mid, on_fold });
            midpoint.insert((a, b), id);
            new_tags.insert(sorted_pair(a, id), tag);
            new_tags.insert(sorted_pair(id, b), tag);
        }

        // bisect, recursing into children whose refinement edge is marked
        let mut triangles: Vec<Triangle> = Vec::new();
        fn bisect(
            tri: Triangle,
            root: usize,
            midpoint: &BTreeMap<(usize, usize), usize>,
            out: &mut Vec<Triangle>,
        ) {
            let re = tri.refine_edge as usize;
            let (p, q) = local_edge_vertices(&tri, re);
            let r = tri.v[re];
            match midpoint.get(&sorted_pair(p, q)) {
                None => out.push(tri),
                Some(&m) => {
                    let child_a = Triangle {
                        v: [p, m, r],
                        refine_edge: 1,
                        parent: Some(root),
                        level: tri.level + 1,
                        subdomain: tri.subdomain,
                    };
                    let child_b = Triangle {
                        v: [m, q, r],
                        refine_edge: 0,
                        parent: Some(root),
                        level: tri.level + 1,
                        subdomain: tri.subdomain,
                    };
                    bisect(child_a, root, midpoint, out);
                    bisect(child_b, root, midpoint, out);
                }
            }
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            bisect(*tri, t, &midpoint, &mut triangles);
        }

        let mesh = build_from_parts(vertices, triangles, &new_tags, self.fold.clone())?;
        debug_assert_eq!(mesh.check_invariants(), Ok(()));
        Ok(mesh)
    }
}

/// Assemble edge tables, owners, and tags from raw vertices/triangles.
fn build_from_parts(
    vertices: Vec<Vertex>,
    triangles: Vec<Triangle>,
    tags: &HashMap<(usize, usize), EdgeTag>,
    fold: Option<FoldCurve>,
) -> Result<Mesh, FoldError> {
    for (t, tri) in triangles.iter().enumerate() {
        let a = signed_area(
            vertices[tri.v[0]].pos,
            vertices[tri.v[1]].pos,
            vertices[tri.v[2]].pos,
        );
        if a <= 1e-15 {
            let _ = t;
            return Err(FoldError::DegenerateTriangle(a));
        }
    }
    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut tri_edges = vec![[usize::MAX; 3]; triangles.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = local_edge_vertices(tri, i);
            let key = sorted_pair(a, b);
            match edge_ids.get(&key) {
                None => {
                    let id = edges.len();
                    edge_ids.insert(key, id);
                    edges.push(Edge {
                        v: [key.0, key.1],
                        owner: t,
                        other: None,
                        tag: EdgeTag::Interior,
                    });
                    tri_edges[t][i] = id;
                }
                Some(&id) => {
                    edges[id].other = Some(t);
                    tri_edges[t][i] = id;
                }
            }
        }
    }
    for e in edges.iter_mut() {
        let key = sorted_pair(e.v[0], e.v[1]);
        e.tag = match tags.get(&key) {
            Some(&t) => t,
            None => {
                if e.other.is_none() {
                    EdgeTag::Dirichlet
                } else {
                    EdgeTag::Interior
                }
            }
        };
        // crease orientation: T₊ is the Ω₁ triangle so n points Ω₁ → Ω₂
        if e.tag == EdgeTag::Crease {
            let other = e.other.ok_or_else(|| {
                FoldError::FoldNotResolvable("crease edge on the boundary".into())
            })?;
            if triangles[e.owner].subdomain != 1 {
                if triangles[other].subdomain == 1 {
                    let o = e.owner;
                    e.owner = other;
                    e.other = Some(o);
                }
            }
        }
    }
    Ok(Mesh {
        vertices,
        triangles,
        edges,
        tri_edges,
        fold,
    })
}

/// Longest edge; ties broken by the smallest opposite-vertex (global) index.
fn init_refine_edge(vertices: &[Vertex], v: [usize; 3]) -> u8 {
    let mut best = 0usize;
    let mut best_len = -1.0f64;
    for i in 0..3 {
        let a = vertices[v[(i + 1) % 3]].pos;
        let b = vertices[v[(i + 2) % 3]].pos;
        let len = dist(a, b);
        let better = len > best_len * (1.0 + 1e-12)
            || ((len - best_len).abs() <= 1e-12 * best_len.max(1.0) && v[i] < v[best]);
        if better {
            best = i;
            best_len = len;
        }
    }
    best as u8
}

/// Structured crease-fitted mesh on a supported domain, n subdivisions per
/// unit length. Graph folds are fitted by snapping one vertex per grid
/// column onto the curve and orienting cell diagonals along the chain.
pub fn build_structured(
    domain: StructuredDomain,
    n: usize,
    fold: Option<FoldCurve>,
) -> Result<Mesh, FoldError> {
    if n < 1 {
        return Err(FoldError::FoldNotResolvable("n must be at least 1".into()));
    }
    let h = 1.0 / n as f64;
    let nn = n as i64;

    if let Some(f) = &fold {
        for p in f.endpoints() {
            if !domain.on_boundary(p, 1e-9) {
                return Err(FoldError::FoldEndpointOffBoundary(p));
            }
        }
    }

    // grid extents over all blocks
    let blocks = domain.blocks();
    let gx0 = blocks.iter().map(|b| b[0]).min().unwrap() * nn;
    let gx1 = (blocks.iter().map(|b| b[0]).max().unwrap() + 1) * nn;
    let gy0 = blocks.iter().map(|b| b[1]).min().unwrap() * nn;
    let gy1 = (blocks.iter().map(|b| b[1]).max().unwrap() + 1) * nn;

    let coord = |ix: i64, iy: i64| [ix as f64 * h, iy as f64 * h];
    let cell_active = |cx: i64, cy: i64| domain.contains_cell(cx, cy, nn);
    let vertex_active = |ix: i64, iy: i64| {
        [(ix - 1, iy - 1), (ix, iy - 1), (ix - 1, iy), (ix, iy)]
            .iter()
            .any(|&(cx, cy)| cx >= gx0 && cy >= gy0 && cx < gx1 && cy < gy1 && cell_active(cx, cy))
    };

    let mut vid: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    for iy in gy0..=gy1 {
        for ix in gx0..=gx1 {
            if vertex_active(ix, iy) {
                vid.insert((ix, iy), vertices.len());
                vertices.push(Vertex {
                    pos: coord(ix, iy),
                    on_fold: false,
                });
            }
        }
    }

    // fold fitting
    let mut chain: Vec<usize> = Vec::new(); // vertex ids along the fold
    let mut diag_override: HashMap<(i64, i64), bool> = HashMap::new(); // true = "\"
    match &fold {
        None => {}
        Some(FoldCurve::Vertical { x, .. }) => {
            let col = x / h;
            if (col - col.round()).abs() > 1e-9 {
                return Err(FoldError::FoldNotResolvable(format!(
                    "flat fold x = {x} does not lie on a grid line for n = {n}"
                )));
            }
            let ix = col.round() as i64;
            for iy in gy0..=gy1 {
                if let Some(&v) = vid.get(&(ix, iy)) {
                    chain.push(v);
                    vertices[v].on_fold = true;
                }
            }
            if chain.len() < 2 {
                return Err(FoldError::FoldNotResolvable(
                    "flat fold column has no interior vertices".into(),
                ));
            }
        }
        Some(f @ FoldCurve::Graph { x0, x1, .. }) => {
            let c0 = (x0 / h).round() as i64;
            let c1 = (x1 / h).round() as i64;
            if (x0 / h - c0 as f64).abs() > 1e-9 || (x1 / h - c1 as f64).abs() > 1e-9 {
                return Err(FoldError::FoldNotResolvable(
                    "fold x-range must start and end on grid columns".into(),
                ));
            }
            let mut rows: Vec<i64> = Vec::new();
            for ix in c0..=c1 {
                let x = ix as f64 * h;
                let y = f.project([x, 0.0])[1];
                let r = (y / h).round() as i64;
                let key = (ix, r);
                let &v = vid.get(&key).ok_or_else(|| {
                    FoldError::FoldNotResolvable(format!("fold leaves the domain near x = {x}"))
                })?;
                vertices[v].pos = [x, y];
                vertices[v].on_fold = true;
                chain.push(v);
                if let Some(&prev) = rows.last() {
                    let dr = r - prev;
                    match dr {
                        0 => {}
                        1 => {
                            diag_override.insert((ix - 1, prev), false); // "/"
                        }
                        -1 => {
                            diag_override.insert((ix - 1, r), true); // "\"
                        }
                        _ => {
                            return Err(FoldError::FoldNotResolvable(format!(
                                "fold too steep between columns near x = {x}"
                            )));
                        }
                    }
                }
                rows.push(r);
            }
        }
    }

    // triangles
    let mut triangles: Vec<Triangle> = Vec::new();
    for cy in gy0..gy1 {
        for cx in gx0..gx1 {
            if !cell_active(cx, cy) {
                continue;
            }
            let v00 = vid[&(cx, cy)];
            let v10 = vid[&(cx + 1, cy)];
            let v01 = vid[&(cx, cy + 1)];
            let v11 = vid[&(cx + 1, cy + 1)];
            let backslash = *diag_override.get(&(cx, cy)).unwrap_or(&false);
            let tris: [[usize; 3]; 2] = if backslash {
                [[v00, v10, v01], [v10, v11, v01]]
            } else {
                [[v00, v10, v11], [v00, v11, v01]]
            };
            for v in tris {
                triangles.push(Triangle {
                    v,
                    refine_edge: init_refine_edge(&vertices, v),
                    parent: None,
                    level: 0,
                    subdomain: 1,
                });
            }
        }
    }

    // subdomain classification
    if let Some(f) = &fold {
        for t in 0..triangles.len() {
            let v = triangles[t].v;
            let mut c = [0.0; 2];
            for &vi in &v {
                c[0] += vertices[vi].pos[0] / 3.0;
                c[1] += vertices[vi].pos[1] / 3.0;
            }
            triangles[t].subdomain = f.side(c);
        }
    }

    // crease tags along the chain
    let mut tags: HashMap<(usize, usize), EdgeTag> = HashMap::new();
    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    for tri in &triangles {
        for i in 0..3 {
            let (a, b) = local_edge_vertices(tri, i);
            present.insert(sorted_pair(a, b));
        }
    }
    for w in chain.windows(2) {
        let key = sorted_pair(w[0], w[1]);
        if !present.contains(&key) {
            return Err(FoldError::FoldNotResolvable(
                "fold chain does not follow mesh edges".into(),
            ));
        }
        tags.insert(key, EdgeTag::Crease);
    }

    let mesh = build_from_parts(vertices, triangles, &tags, fold)?;
    mesh.check_invariants()
        .map_err(FoldError::FoldNotResolvable)?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flat_fold() -> FoldCurve {
        FoldCurve::Vertical { x: 0.5, y0: 0.0, y1: 1.0 }
    }

    #[test]
    fn unit_square_counts() {
        let m = build_structured(StructuredDomain::UnitSquare, 2, None).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_triangles(), 8);
        assert_eq!(m.num_edges(), 16);
        m.check_invariants().unwrap();
    }

    #[test]
    fn flat_fold_crease_edges() {
        let m = build_structured(StructuredDomain::UnitSquare, 2, Some(flat_fold())).unwrap();
        let creases: Vec<_> = m
            .edges
            .iter()
            .filter(|e| e.tag == EdgeTag::Crease)
            .collect();
        assert_eq!(creases.len(), 2);
        for e in creases {
            for &v in &e.v {
                assert!((m.vertices[v].pos[0] - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn odd_n_flat_fold_rejected() {
        let err = build_structured(StructuredDomain::UnitSquare, 1, Some(flat_fold()));
        assert!(err.is_err());
    }

    #[test]
    fn crease_normal_points_from_omega1_to_omega2() {
        let m = build_structured(StructuredDomain::UnitSquare, 4, Some(flat_fold())).unwrap();
        for (ei, e) in m.edges.iter().enumerate() {
            if e.tag == EdgeTag::Crease {
                let (n, tau, h, _) = m.edge_geometry(ei).unwrap();
                assert!((n[0] - 1.0).abs() < 1e-14 && n[1].abs() < 1e-14);
                assert!((n[0] * tau[0] + n[1] * tau[1]).abs() < 1e-14);
                assert!((h - 0.25).abs() < 1e-14);
                assert_eq!(m.triangles[e.owner].subdomain, 1);
            }
        }
    }

    #[test]
    fn edge_geometry_axis_aligned() {
        let m = build_structured(StructuredDomain::UnitSquare, 2, None).unwrap();
        for ei in 0..m.num_edges() {
            let (n, tau, h, _) = m.edge_geometry(ei).unwrap();
            assert!((n[0] * n[0] + n[1] * n[1] - 1.0).abs() < 1e-14);
            assert!((tau[0] * tau[0] + tau[1] * tau[1] - 1.0).abs() < 1e-14);
            assert!((n[0] * tau[0] + n[1] * tau[1]).abs() < 1e-14);
            // n rotated 90° is ±τ
            let rot = [-n[1], n[0]];
            let d = (rot[0] * tau[0] + rot[1] * tau[1]).abs();
            assert!((d - 1.0).abs() < 1e-14);
            assert!(h > 0.0);
        }
    }

    #[test]
    fn refine_empty_marking_is_identity() {
        let m = build_structured(StructuredDomain::UnitSquare, 2, Some(flat_fold())).unwrap();
        let r = m.refine(&BTreeSet::new()).unwrap();
        assert_eq!(r.num_triangles(), m.num_triangles());
        assert_eq!(r.num_vertices(), m.num_vertices());
    }

    #[test]
    fn single_bisection() {
        // one triangle alone: marked -> two children sharing the new vertex
        let vertices = vec![
            Vertex { pos: [0.0, 0.0], on_fold: false },
            Vertex { pos: [1.0, 0.0], on_fold: false },
            Vertex { pos: [0.0, 1.0], on_fold: false },
        ];
        let v = [0usize, 1, 2];
        let tri = Triangle {
            v,
            refine_edge: init_refine_edge(&vertices, v),
            parent: None,
            level: 0,
            subdomain: 1,
        };
        let mesh = build_from_parts(vertices, vec![tri], &HashMap::new(), None).unwrap();
        let r = mesh.refine(&BTreeSet::from([0])).unwrap();
        assert_eq!(r.num_triangles(), 2);
        assert_eq!(r.triangles[0].level, 1);
        r.check_invariants().unwrap();
    }

    #[test]
    fn crease_bisection_projects_midpoint() {
        let m = build_structured(StructuredDomain::UnitSquare, 2, Some(flat_fold())).unwrap();
        // mark a crease-adjacent triangle repeatedly until a crease edge splits
        let mut mesh = m;
        for _ in 0..4 {
            let t = mesh
                .edges
                .iter()
                .find(|e| e.tag == EdgeTag::Crease)
                .map(|e| e.owner)
                .unwrap();
            mesh = mesh.refine(&BTreeSet::from([t])).unwrap();
        }
        for v in &mesh.vertices {
            if v.on_fold {
                assert!((v.pos[0] - 0.5).abs() < 1e-15);
            }
        }
        mesh.check_invariants().unwrap();
    }

    #[test]
    fn random_refinement_keeps_invariants_and_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut mesh =
            build_structured(StructuredDomain::UnitSquare, 2, Some(flat_fold())).unwrap();
        let min0 = mesh.min_angle();
        for _round in 0..12 {
            let nt = mesh.num_triangles();
            let marked: BTreeSet<usize> =
                (0..nt).filter(|_| rng.random::<f64>() < 0.25).collect();
            mesh = mesh.refine(&marked).unwrap();
            mesh.check_invariants().unwrap();
        }
        assert!(mesh.min_angle() >= min0 / 2.0 - 1e-12);
    }

    #[test]
    fn refinement_is_deterministic() {
        let build = || {
            let mut mesh =
                build_structured(StructuredDomain::UnitSquare, 4, Some(flat_fold())).unwrap();
            for round in 0..5 {
                let nt = mesh.num_triangles();
                let marked: BTreeSet<usize> = (0..nt).filter(|t| (t + round) % 3 == 0).collect();
                mesh = mesh.refine(&marked).unwrap();
            }
            mesh
        };
        let a = build();
        let b = build();
        assert_eq!(a.num_vertices(), b.num_vertices());
        for (va, vb) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(va.pos, vb.pos);
        }
        for (ta, tb) in a.triangles.iter().zip(&b.triangles) {
            assert_eq!(ta.v, tb.v);
        }
    }

    #[test]
    fn l_shape_builds_and_refines() {
        let fold = FoldCurve::Graph {
            f: Arc::new(|x: f64| (std::f64::consts::PI * (x + 1.0)).sin() / 6.0 - 0.5),
            x0: -1.0,
            x1: 1.0,
            kind: FoldKind::Smooth,
        };
        let mut mesh = build_structured(StructuredDomain::LShape, 4, Some(fold)).unwrap();
        mesh.check_invariants().unwrap();
        assert!(mesh.edges.iter().any(|e| e.tag == EdgeTag::Crease));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let nt = mesh.num_triangles();
            let marked: BTreeSet<usize> = (0..nt).filter(|_| rng.random::<f64>() < 0.2).collect();
            mesh = mesh.refine(&marked).unwrap();
            mesh.check_invariants().unwrap();
        }
        // crease vertices stay on the (smooth) curve
        let fold = mesh.fold.clone().unwrap();
        for e in &mesh.edges {
            if e.tag == EdgeTag::Crease {
                for &v in &e.v {
                    let p = mesh.vertices[v].pos;
                    let q = fold.project(p);
                    assert!(super::dist(p, q) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn v_fold_builds() {
        let fold = FoldCurve::Graph {
            f: Arc::new(|x: f64| 0.5 * (1.0 + (x - 0.5).abs())),
            x0: 0.0,
            x1: 1.0,
            kind: FoldKind::Polyline,
        };
        let mesh = build_structured(StructuredDomain::UnitSquare, 4, Some(fold)).unwrap();
        mesh.check_invariants().unwrap();
        // tip of the V is a mesh vertex
        assert!(mesh
            .vertices
            .iter()
            .any(|v| v.on_fold && (v.pos[0] - 0.5).abs() < 1e-14 && (v.pos[1] - 0.5).abs() < 1e-14));
    }
}
