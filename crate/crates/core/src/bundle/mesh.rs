//! Triangle meshes with vertex gluing, used for the closures of the graphs
//! of `v_k` in the unit tangent bundle.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{sasaki_embedding, BUNDLE_TOL};
use crate::error::{Error, Result};
use crate::minimizers::canonical_field;
use crate::sphere::{embed, field_vector_on_meridian, Vec3};

pub const MESH_SIDECAR_VERSION: u32 = 1;

/// How vertex coordinates are interpreted for areas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    Euclidean,
    /// Six coordinates `(p, w)`; areas are Sasaki areas.
    UnitTangentBundle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub dim: usize,
    pub ambient: Ambient,
    pub vertices: Vec<Vec<f64>>,
    /// Triangles over raw vertex indices.
    pub faces: Vec<[usize; 3]>,
    /// Representative of each vertex after gluing.
    pub identifications: Vec<usize>,
    /// Edges (between representatives) that border a single face.
    pub boundary_tags: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientability {
    pub orientable: bool,
    /// Two faces across an edge whose orientations cannot be reconciled.
    pub conflict: Option<(usize, usize)>,
}

type EdgeMap = HashMap<(usize, usize), Vec<(usize, bool)>>;

impl SurfaceMesh {
    pub fn new(
        dim: usize,
        ambient: Ambient,
        vertices: Vec<Vec<f64>>,
        faces: Vec<[usize; 3]>,
        identifications: Vec<usize>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if vertices.iter().any(|v| v.len() != dim) {
            return bad(format!("every vertex must have {dim} coordinates"));
        }
        if identifications.len() != vertices.len() {
            return bad("one identification entry per vertex is required".into());
        }
        let n = vertices.len();
        if identifications.iter().enumerate().any(|(i, &r)| r >= n || identifications[r] != r || r > i) {
            return bad("identifications must map to self-representing earlier vertices".into());
        }
        if faces.iter().flatten().any(|&v| v >= n) {
            return bad("face references a missing vertex".into());
        }
        if ambient == Ambient::UnitTangentBundle && dim != 6 {
            return bad("unit tangent bundle meshes have 6 coordinates".into());
        }
        let mut mesh = Self {
            dim,
            ambient,
            vertices,
            faces,
            identifications,
            boundary_tags: Vec::new(),
        };
        let edges = mesh.edge_map();
        let mut tags: Vec<[usize; 2]> = edges
            .iter()
            .filter(|(_, f)| f.len() == 1)
            .map(|(&(a, b), _)| [a, b])
            .collect();
        tags.sort_unstable();
        mesh.boundary_tags = tags;
        Ok(mesh)
    }

    fn rep(&self, v: usize) -> usize {
        self.identifications[v]
    }

    fn rep_face(&self, f: &[usize; 3]) -> [usize; 3] {
        [self.rep(f[0]), self.rep(f[1]), self.rep(f[2])]
    }

    /// Undirected edges with the faces on them; the flag records whether
    /// the face traverses the edge from the smaller to the larger index.
    fn edge_map(&self) -> EdgeMap {
        let mut edges: EdgeMap = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            let r = self.rep_face(f);
            for e in 0..3 {
                let (a, b) = (r[e], r[(e + 1) % 3]);
                edges
                    .entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((fi, a < b));
            }
        }
        edges
    }

    pub fn vertex_count(&self) -> usize {
        let mut used = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &v in f {
                used[self.rep(v)] = true;
            }
        }
        used.iter().filter(|&&u| u).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_map().len()
    }

    /// `V - E + F` of the glued complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Every edge borders exactly two faces.
    pub fn is_closed(&self) -> bool {
        self.edge_map().values().all(|f| f.len() == 2)
    }

    /// Breadth-first propagation of a face orientation across shared
    /// edges; a face reached with both orientations proves the surface is
    /// non-orientable.
    pub fn orientability(&self) -> Orientability {
        let edges = self.edge_map();
        let mut flip: Vec<Option<bool>> = vec![None; self.faces.len()];
        let mut queue = VecDeque::new();
        for start in 0..self.faces.len() {
            if flip[start].is_some() {
                continue;
            }
            flip[start] = Some(false);
            queue.push_back(start);
            while let Some(fi) = queue.pop_front() {
                let r = self.rep_face(&self.faces[fi]);
                let my_flip = flip[fi].expect("queued faces are oriented");
                for e in 0..3 {
                    let (a, b) = (r[e], r[(e + 1) % 3]);
                    let my_dir = (a < b) != my_flip;
                    for &(other, dir) in &edges[&(a.min(b), a.max(b))] {
                        if other == fi {
                            continue;
                        }
                        // neighbours must traverse the shared edge the other way
                        let needed = dir == my_dir;
                        match flip[other] {
                            None => {
                                flip[other] = Some(needed);
                                queue.push_back(other);
                            }
                            Some(f) if f != needed => {
                                return Orientability {
                                    orientable: false,
                                    conflict: Some((fi, other)),
                                };
                            }
                            Some(_) => {}
                        }
                    }
                }
            }
        }
        Orientability {
            orientable: true,
            conflict: None,
        }
    }

    /// Sum of triangle areas; Sasaki areas for unit tangent bundle meshes.
    pub fn surface_area(&self) -> f64 {
        let points: Vec<Vec<f64>> = match self.ambient {
            Ambient::Euclidean => self.vertices.clone(),
            Ambient::UnitTangentBundle => self
                .vertices
                .iter()
                .map(|v| {
                    let p = Vec3::new(v[0], v[1], v[2]);
                    let w = Vec3::new(v[3], v[4], v[5]);
                    sasaki_embedding(&p, &w).iter().cloned().collect()
                })
                .collect(),
        };
        self.faces
            .iter()
            .map(|f| triangle_area(&points[f[0]], &points[f[1]], &points[f[2]]))
            .sum()
    }

    /// Largest violation of the bundle constraints over all vertices.
    pub fn max_bundle_residual(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| {
                let p = Vec3::new(v[0], v[1], v[2]);
                let w = Vec3::new(v[3], v[4], v[5]);
                (p.norm() - 1.0)
                    .abs()
                    .max((w.norm() - 1.0).abs())
                    .max(p.dot(&w).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest distance between a vertex and its representative.
    pub fn max_gluing_gap(&self) -> f64 {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = &self.vertices[self.rep(i)];
                v.iter().zip(r).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// OFF text: `OFF` for three coordinates, `nOFF` with the dimension
    /// otherwise. Faces use raw vertex indices.
    pub fn write_off<W: Write>(&self, mut out: W) -> Result<()> {
        if self.dim == 3 {
            writeln!(out, "OFF")?;
        } else {
            writeln!(out, "nOFF")?;
            writeln!(out, "{}", self.dim)?;
        }
        writeln!(out, "{} {} 0", self.vertices.len(), self.faces.len())?;
        for v in &self.vertices {
            let row: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        for f in &self.faces {
            writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        Ok(())
    }

    pub fn sidecar(&self) -> serde_json::Value {
        let glued: Vec<[usize; 2]> = self
            .identifications
            .iter()
            .enumerate()
            .filter(|(i, r)| *i != **r)
            .map(|(i, &r)| [i, r])
            .collect();
        let o = self.orientability();
        serde_json::json!({
            "version": MESH_SIDECAR_VERSION,
            "dim": self.dim,
            "ambient": self.ambient,
            "vertex_count": self.vertices.len(),
            "face_count": self.faces.len(),
            "identifications": glued,
            "boundary_edges": self.boundary_tags,
            "euler_characteristic": self.euler_characteristic(),
            "orientable": o.orientable,
        })
    }

    /// Writes `path` as OFF and `path` with extension `json` as the sidecar.
    pub fn export(&self, path: &Path) -> Result<std::path::PathBuf> {
        let file = std::fs::File::create(path)?;
        self.write_off(std::io::BufWriter::new(file))?;
        let side = path.with_extension("json");
        std::fs::write(&side, serde_json::to_string_pretty(&self.sidecar())?)?;
        Ok(side)
    }
}

fn triangle_area(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let u: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let v: Vec<f64> = c.iter().zip(a).map(|(x, y)| x - y).collect();
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let uv: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
    0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
}

/// The unit square as two triangles in the plane.
pub fn flat_square_mesh() -> SurfaceMesh {
    SurfaceMesh::new(
        2,
        Ambient::Euclidean,
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        vec![[0, 1, 2], [0, 2, 3]],
        vec![0, 1, 2, 3],
    )
    .expect("valid square")
}

/// Gluing of a polar ring of `n` vertices for a field of index `m` there:
/// the limit directions turn `m` times around the fiber, so for `m = 0` the
/// ring is a single point and for even `m ≠ 0` antipodal meridians meet.
fn ring_representative(m: i64, j: usize, n: usize) -> usize {
    if m == 0 {
        0
    } else if m % 2 == 0 {
        j % (n / 2)
    } else {
        j
    }
}

/// The closure of the graph of `v_k` (phase 0) in `T¹S²`: an
/// `n_alpha × n_beta` latitude/longitude lattice with rows at
/// `α_i = -π/2 + (i + 1) π/(n_alpha + 1)`, plus a ring of limit points over
/// each pole glued according to the index there.
///
/// For `k ≥ 4` both rings close up into Moebius bands and the surface is a
/// Klein bottle. For `k = 2` the index at `S` is zero, the southern ring
/// collapses to a point and the surface is a projective plane.
pub fn graph_surface_mesh(k: i64, n_alpha: usize, n_beta: usize) -> Result<SurfaceMesh> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::InvalidIndex {
            k,
            reason: "graph closures are meshed for even k >= 2",
        });
    }
    if n_alpha < 2 || n_beta < 4 || !n_beta.is_multiple_of(2) {
        return Err(Error::InvalidConfig(
            "graph mesh needs n_alpha >= 2 and an even n_beta >= 4".into(),
        ));
    }
    let field = canonical_field(k, 0.0)?;
    let alpha = |i: usize| -FRAC_PI_2 + PI * (i + 1) as f64 / (n_alpha + 1) as f64;
    let beta = |j: usize| TAU * j as f64 / n_beta as f64;
    let vertex = |a: f64, b: f64, p: Vec3| -> Vec<f64> {
        let w = field_vector_on_meridian(&field, a, b);
        vec![p.x, p.y, p.z, w.x, w.y, w.z]
    };

    let lattice = n_alpha * n_beta;
    let north0 = lattice;
    let south0 = lattice + n_beta;
    let mut vertices = Vec::with_capacity(lattice + 2 * n_beta);
    for i in 0..n_alpha {
        for j in 0..n_beta {
            vertices.push(vertex(alpha(i), beta(j), embed(alpha(i), beta(j))));
        }
    }
    for j in 0..n_beta {
        vertices.push(vertex(FRAC_PI_2, beta(j), Vec3::new(0.0, 0.0, 1.0)));
    }
    for j in 0..n_beta {
        vertices.push(vertex(-FRAC_PI_2, beta(j), Vec3::new(0.0, 0.0, -1.0)));
    }

    let mut identifications: Vec<usize> = (0..vertices.len()).collect();
    let (m_north, m_south) = (k, 2 - k);
    for j in 0..n_beta {
        identifications[north0 + j] = north0 + ring_representative(m_north, j, n_beta);
        identifications[south0 + j] = south0 + ring_representative(m_south, j, n_beta);
    }

    let lat = |i: usize, j: usize| i * n_beta + j % n_beta;
    let mut quads: Vec<[usize; 4]> = Vec::with_capacity((n_alpha + 1) * n_beta);
    for j in 0..n_beta {
        let j1 = (j + 1) % n_beta;
        quads.push([south0 + j, south0 + j1, lat(0, j1), lat(0, j)]);
    }
    for i in 0..n_alpha - 1 {
        for j in 0..n_beta {
            quads.push([lat(i, j), lat(i, j + 1), lat(i + 1, j + 1), lat(i + 1, j)]);
        }
    }
    for j in 0..n_beta {
        let j1 = (j + 1) % n_beta;
        quads.push([lat(n_alpha - 1, j), lat(n_alpha - 1, j1), north0 + j1, north0 + j]);
    }
    let mut faces = Vec::with_capacity(2 * quads.len());
    for [a, b, c, d] in quads {
        for tri in [[a, b, c], [a, c, d]] {
            let r = tri.map(|v| identifications[v]);
            // triangles with a collapsed edge carry no area or topology
            if r[0] != r[1] && r[1] != r[2] && r[0] != r[2] {
                faces.push(tri);
            }
        }
    }
    let mesh = SurfaceMesh::new(6, Ambient::UnitTangentBundle, vertices, faces, identifications)?;
    debug_assert!(mesh.max_bundle_residual() < BUNDLE_TOL);
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_square() {
        let m = flat_square_mesh();
        assert!((m.surface_area() - 1.0).abs() < 1e-15);
        assert_eq!(m.euler_characteristic(), 1);
        assert!(m.orientability().orientable);
        assert_eq!(m.boundary_tags.len(), 4);
    }

    #[test]
    fn torus_is_orientable() {
        let n = 6;
        let id = |i: usize, j: usize| (i % n) * n + j % n;
        let vertices = (0..n * n).map(|v| vec![v as f64, 0.0, 0.0]).collect();
        let mut faces = Vec::new();
        for i in 0..n {
            for j in 0..n {
                faces.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
                faces.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
            }
        }
        let m = SurfaceMesh::new(3, Ambient::Euclidean, vertices, faces, (0..n * n).collect()).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.is_closed());
        assert!(m.orientability().orientable);
    }

    #[test]
    fn closures_by_k() {
        let m = graph_surface_mesh(4, 8, 16).unwrap();
        assert!(m.is_closed());
        assert_eq!(m.euler_characteristic(), 0);
        assert!(!m.orientability().orientable);
        assert!(m.max_gluing_gap() < 1e-12);
        assert!(m.max_bundle_residual() < 1e-12);

        let m = graph_surface_mesh(2, 8, 16).unwrap();
        assert!(m.is_closed());
        assert_eq!(m.euler_characteristic(), 1);
        assert!(!m.orientability().orientable);
        assert!(m.max_gluing_gap() < 1e-12);

        assert!(graph_surface_mesh(3, 8, 16).is_err());
        assert!(graph_surface_mesh(4, 8, 15).is_err());
    }

    #[test]
    fn off_output() {
        let m = flat_square_mesh();
        let mut buf = Vec::new();
        m.write_off(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[..3], ["nOFF", "2", "4 2 0"]);
        assert_eq!(lines.last(), Some(&"3 0 2 3"));
    }
}
