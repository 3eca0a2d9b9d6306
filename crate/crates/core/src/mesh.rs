//! Triangulations of the unit square with the edge topology needed by DG
//! assembly: incidence, oriented unit normals and boundary classification.
//!
//! Boundary edges on `{x = 0} ∪ {y = 0}` are Dirichlet, those on
//! `{x = 1} ∪ {y = 1}` are Neumann.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tensor::{norm, sub, Point, Vec2};

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeTag {
    Interior,
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInfo {
    pub endpoints: [usize; 2],
    /// One (boundary) or two (interior) triangle indices, ascending.
    pub incident: Vec<usize>,
    /// Unit normal: outward on the boundary, from `incident[0]` towards
    /// `incident[1]` on interior edges.
    pub normal: Vec2,
    pub length: f64,
    pub tag: EdgeTag,
}

impl EdgeInfo {
    pub fn is_interior(&self) -> bool {
        self.tag == EdgeTag::Interior
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    /// Local edge `i` joins vertex `i` to vertex `(i + 1) % 3`.
    pub edge_lengths: [f64; 3],
    pub outward_normals: [Vec2; 3],
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<EdgeInfo>,
    /// Edge index of local edge `i` of each triangle.
    triangle_edges: Vec<[usize; 3]>,
    n_subdivisions: Option<usize>,
    h: f64,
}

impl TriMesh {
    /// Structured `n × n` triangulation of the unit square. Every cell is
    /// split along its lower-left to upper-right diagonal.
    pub fn structured(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Mesh("number of subdivisions must be positive".into()));
        }
        let nv = n + 1;
        let step = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity(nv * nv);
        for j in 0..nv {
            for i in 0..nv {
                vertices.push([i as f64 * step, j as f64 * step]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v0 = j * nv + i;
                let v1 = v0 + 1;
                let v2 = v0 + nv;
                let v3 = v2 + 1;
                triangles.push([v0, v1, v3]);
                triangles.push([v0, v3, v2]);
            }
        }
        let mut mesh = Self::from_parts(vertices, triangles)?;
        mesh.n_subdivisions = Some(n);
        Ok(mesh)
    }

    /// Builds the edge topology for an arbitrary triangulation of the unit
    /// square. Clockwise triangles are reoriented.
    pub fn from_parts(vertices: Vec<Point>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter_mut().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!(
                    "triangle {t} references vertex {v}, but there are only {} vertices",
                    vertices.len()
                )));
            }
            let area = signed_area(&vertices, tri);
            if area.abs() < 1e-300 {
                return Err(Error::Mesh(format!("triangle {t} is degenerate")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut by_key: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for local in 0..3 {
                let a = tri[local];
                let b = tri[(local + 1) % 3];
                by_key.entry((a.min(b), a.max(b))).or_default().push((t, local));
            }
        }

        let mut edges = Vec::with_capacity(by_key.len());
        let mut triangle_edges = vec![[usize::MAX; 3]; triangles.len()];
        for ((a, b), mut owners) in by_key {
            if owners.len() > 2 {
                return Err(Error::Mesh(format!("edge ({a}, {b}) has more than two triangles")));
            }
            owners.sort_unstable();
            for &(t, local) in &owners {
                triangle_edges[t][local] = edges.len();
            }
            let (first, local) = owners[0];
            let normal = outward_normal(&vertices, &triangles[first], local);
            let length = norm(sub(vertices[b], vertices[a]));
            let tag = if owners.len() == 2 {
                EdgeTag::Interior
            } else {
                let mid = [
                    0.5 * (vertices[a][0] + vertices[b][0]),
                    0.5 * (vertices[a][1] + vertices[b][1]),
                ];
                if mid[0].abs() < BOUNDARY_TOL || mid[1].abs() < BOUNDARY_TOL {
                    EdgeTag::Dirichlet
                } else {
                    EdgeTag::Neumann
                }
            };
            edges.push(EdgeInfo {
                endpoints: [a, b],
                incident: owners.iter().map(|&(t, _)| t).collect(),
                normal,
                length,
                tag,
            });
        }

        let h = triangles
            .iter()
            .map(|tri| {
                (0..3)
                    .map(|i| norm(sub(vertices[tri[(i + 1) % 3]], vertices[tri[i]])))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);

        Ok(Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            n_subdivisions: None,
            h,
        })
    }

    /// Parses the plain-text format: a header `nv nt`, then `nv` lines
    /// `x y`, then `nt` lines `v0 v1 v2`. Boundary classification is
    /// recomputed from the coordinates.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, what: &str| Error::Mesh(format!("line {line}: {what}"));

        let (ln, header) = lines.next().ok_or_else(|| Error::Mesh("empty mesh file".into()))?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(ln, "expected `nv nt`"))?;
        let [nv, nt] = counts[..] else {
            return Err(bad(ln, "expected `nv nt`"));
        };

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines.next().ok_or_else(|| Error::Mesh("truncated vertex list".into()))?;
            let xy: Vec<f64> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(ln, "expected `x y`"))?;
            let [x, y] = xy[..] else {
                return Err(bad(ln, "expected `x y`"));
            };
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines.next().ok_or_else(|| Error::Mesh("truncated triangle list".into()))?;
            let v: Vec<usize> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| bad(ln, "expected `v0 v1 v2`"))?;
            let [a, b, c] = v[..] else {
                return Err(bad(ln, "expected `v0 v1 v2`"));
            };
            triangles.push([a, b, c]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(bad(ln, "unexpected trailing content"));
        }
        Self::from_parts(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[EdgeInfo] {
        &self.edges
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Edge indices of the three local edges of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn n_subdivisions(&self) -> Option<usize> {
        self.n_subdivisions
    }

    /// Maximum element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_vertices(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn element_geometry(&self, t: usize) -> Result<ElementGeometry> {
        let tri = self
            .triangles
            .get(t)
            .ok_or(Error::IndexOutOfRange { index: t, len: self.triangles.len() })?;
        let mut edge_lengths = [0.0; 3];
        let mut outward_normals = [[0.0; 2]; 3];
        for i in 0..3 {
            edge_lengths[i] = norm(sub(self.vertices[tri[(i + 1) % 3]], self.vertices[tri[i]]));
            outward_normals[i] = outward_normal(&self.vertices, tri, i);
        }
        Ok(ElementGeometry {
            area: signed_area(&self.vertices, tri),
            edge_lengths,
            outward_normals,
        })
    }

    /// Neighbouring triangles sharing an edge with `t`, ascending.
    pub fn neighbours(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.triangle_edges[t]
            .iter()
            .flat_map(|&e| self.edges[e].incident.iter().copied())
            .filter(|&o| o != t)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Convenience wrapper for [`TriMesh::structured`].
pub fn build_structured_mesh(n: usize) -> Result<TriMesh> {
    TriMesh::structured(n)
}

fn signed_area(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Outward unit normal of local edge `local` of a counterclockwise triangle.
fn outward_normal(vertices: &[Point], tri: &[usize; 3], local: usize) -> Vec2 {
    let a = vertices[tri[local]];
    let b = vertices[tri[(local + 1) % 3]];
    let d = sub(b, a);
    let len = norm(d);
    // For counterclockwise orientation the interior lies to the left of a→b.
    [d[1] / len, -d[0] / len]
}
