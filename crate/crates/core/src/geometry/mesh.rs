//! Closed triangle meshes read from ASCII OFF files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::quadrature::SurfaceQuadrature;
use crate::{Error, Result, Vec3};

/// Triangles with area at or below this are rejected.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Closed, consistently oriented triangle surface with outward orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Validates the manifold conditions and flips every triangle when the
    /// signed volume comes out negative.
    pub fn new(vertices: Vec<Vec3>, mut triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::NonManifold("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::NonManifold(format!("triangle {t} references a missing vertex")));
            }
            let area = triangle_area(&vertices[tri[0]], &vertices[tri[1]], &vertices[tri[2]]);
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::NonManifold(format!("triangle {t} is degenerate (area {area:e})")));
            }
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &triangles {
            for e in 0..3 {
                *directed.entry((tri[e], tri[(e + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            let back = directed.get(&(b, a)).copied().unwrap_or(0);
            if count + back != 2 {
                return Err(Error::NonManifold(format!(
                    "edge ({a}, {b}) is shared by {} triangles",
                    count + back
                )));
            }
            if count != 1 {
                return Err(Error::Orientation(format!("edge ({a}, {b}) is traversed twice in the same direction")));
            }
        }
        let volume = signed_volume(&vertices, &triangles);
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        if volume.abs() <= 1e-12 * scale.powi(3) {
            return Err(Error::Orientation(format!("signed volume {volume:e} is too small to orient")));
        }
        if volume < 0.0 {
            for tri in &mut triangles {
                tri.swap(1, 2);
            }
        }
        Ok(Self { vertices, triangles })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn volume(&self) -> f64 {
        signed_volume(&self.vertices, &self.triangles)
    }

    pub fn centroid(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let _ = writeln!(s, "{} {} 0", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }

    /// Icosahedron subdivided `levels` times with vertices projected onto the
    /// sphere of radius `radius` about the origin.
    pub fn icosphere(radius: f64, levels: usize) -> Result<Self> {
        let p = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            (-1.0, p, 0.0), (1.0, p, 0.0), (-1.0, -p, 0.0), (1.0, -p, 0.0),
            (0.0, -1.0, p), (0.0, 1.0, p), (0.0, -1.0, -p), (0.0, 1.0, -p),
            (p, 0.0, -1.0), (p, 0.0, 1.0), (-p, 0.0, -1.0), (-p, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut triangles: Vec<[usize; 3]> = vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..levels {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec3>| {
                *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    vertices.push(((vertices[a] + vertices[b]) / 2.0).normalize());
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(4 * triangles.len());
            for [a, b, c] in triangles {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        for v in &mut vertices {
            *v *= radius;
        }
        Self::new(vertices, triangles)
    }

    /// Axis-aligned cube with the given edge length centered at the origin.
    pub fn cube(edge: f64) -> Result<Self> {
        let h = edge / 2.0;
        let vertices = (0..8)
            .map(|i| {
                let s = |bit: usize| if i & bit != 0 { h } else { -h };
                Vec3::new(s(1), s(2), s(4))
            })
            .collect();
        let quads = [[0, 2, 3, 1], [4, 5, 7, 6], [0, 1, 5, 4], [2, 6, 7, 3], [0, 4, 6, 2], [1, 3, 7, 5]];
        let triangles = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        Self::new(vertices, triangles)
    }
}

fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

fn signed_volume(vertices: &[Vec3], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| vertices[t[0]].dot(&vertices[t[1]].cross(&vertices[t[2]])) / 6.0)
        .sum()
}

/// Parses ASCII OFF text: `OFF`, a counts line, vertex lines and face lines
/// with a leading 3. `#` starts a comment.
pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: &str| Error::MeshParse { line, message: message.to_string() };

    let (line, header) = lines.next().ok_or_else(|| err(0, "empty file"))?;
    // the counts may follow the keyword on the same line
    let rest = header.strip_prefix("OFF").ok_or_else(|| err(line, "missing OFF header"))?.trim();
    let (line, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| err(line, "missing counts line"))?
    } else {
        (line, rest)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, "invalid count")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(err(line, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file in vertex list"))?;
        let xyz: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| t.parse().map_err(|_| err(line, "invalid coordinate")))
            .collect::<Result<_>>()?;
        if xyz.len() != 3 || xyz.iter().any(|v| !v.is_finite()) {
            return Err(err(line, "vertex needs three finite coordinates"));
        }
        vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file in face list"))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(line, "invalid face index")))
            .collect::<Result<_>>()?;
        if idx.first() != Some(&3) || idx.len() < 4 {
            return Err(err(line, "only triangular faces are supported"));
        }
        triangles.push([idx[1], idx[2], idx[3]]);
    }
    TriMesh::new(vertices, triangles)
}

pub fn load_mesh(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_off(&text)
}

/// Edge-midpoint rule on every triangle after `refinement` uniform
/// subdivisions (4^refinement sub-triangles per face); normals are the face
/// normals of the outward-oriented mesh.
pub fn mesh_quadrature(mesh: &TriMesh, refinement: usize) -> SurfaceQuadrature {
    let parts = 1usize << refinement;
    let mut nodes = Vec::new();
    let mut normals = Vec::new();
    let mut weights = Vec::new();
    let mut longest: f64 = 0.0;
    for tri in mesh.triangles() {
        let [a, b, c] = tri.map(|i| mesh.vertices[i]);
        longest = longest.max((b - a).norm()).max((c - b).norm()).max((a - c).norm());
        let normal = (b - a).cross(&(c - a)).normalize();
        let lattice = |i: usize, j: usize| a + (b - a) * (i as f64 / parts as f64) + (c - a) * (j as f64 / parts as f64);
        let mut push = |p: Vec3, q: Vec3, r: Vec3| {
            let w = triangle_area(&p, &q, &r) / 3.0;
            for m in [(p + q) / 2.0, (q + r) / 2.0, (r + p) / 2.0] {
                nodes.push(m);
                normals.push(normal);
                weights.push(w);
            }
        };
        for i in 0..parts {
            for j in 0..parts - i {
                push(lattice(i, j), lattice(i + 1, j), lattice(i, j + 1));
                if i + j + 1 < parts {
                    push(lattice(i + 1, j), lattice(i + 1, j + 1), lattice(i, j + 1));
                }
            }
        }
    }
    SurfaceQuadrature { nodes, normals, weights, spacing: longest / parts as f64, center: mesh.centroid() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn cube_area_is_exact() {
        let q = mesh_quadrature(&TriMesh::cube(2.0).unwrap(), 2);
        assert_relative_eq!(q.area(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(q.enclosed_volume(), 8.0, max_relative = 1e-12);
        for (s, n) in q.nodes.iter().zip(&q.normals) {
            assert!(s.dot(n) > 0.0);
        }
    }

    #[test]
    fn icosphere_area_within_one_percent() {
        let mesh = TriMesh::icosphere(1.0, 3).unwrap();
        let text = mesh.to_off();
        let parsed = parse_off(&text).unwrap();
        let q = mesh_quadrature(&parsed, 3);
        assert!((q.area() - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "area {}", q.area());
    }

    #[test]
    fn reversed_orientation_is_fixed() {
        let cube = TriMesh::cube(1.0).unwrap();
        let flipped: Vec<[usize; 3]> = cube.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
        let m = TriMesh::new(cube.vertices().to_vec(), flipped).unwrap();
        assert!(m.volume() > 0.0);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let cube = TriMesh::cube(2.0).unwrap();
        let mut tris = cube.triangles().to_vec();
        tris.pop();
        assert!(matches!(TriMesh::new(cube.vertices().to_vec(), tris), Err(Error::NonManifold(_))));
    }

    #[test]
    fn inconsistent_orientation_is_rejected() {
        let cube = TriMesh::cube(2.0).unwrap();
        let mut tris = cube.triangles().to_vec();
        tris[0].swap(1, 2);
        assert!(matches!(TriMesh::new(cube.vertices().to_vec(), tris), Err(Error::Orientation(_))));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_off("PLY\n"), Err(Error::MeshParse { .. })));
        assert!(matches!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n"), Err(Error::MeshParse { .. })));
        assert!(matches!(
            parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n4 0 1 2 3\n"),
            Err(Error::MeshParse { .. })
        ));
        let degenerate = "OFF 4 4 0\n0 0 0\n1 0 0\n2 0 0\n0 0 1\n3 0 1 2\n3 0 3 1\n3 1 3 2\n3 2 3 0\n";
        assert!(parse_off(degenerate).is_err());
    }
}
