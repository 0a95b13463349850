//! Triangle meshes in R^3 and exact point-to-mesh distance queries.

use crate::error::{Error, Result};
use std::io::{BufRead, BufReader};
use std::path::Path;

type Vec3 = [f64; 3];

#[inline]
fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn norm2(a: Vec3) -> f64 {
    dot(a, a)
}

#[inline]
fn axpy(a: Vec3, s: f64, d: Vec3) -> Vec3 {
    [a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]]
}

/// Squared distance from `p` to the closed triangle `(a, b, c)`, covering the
/// interior, edge and vertex cases. Barycentric region classification after
/// Ericson.
pub(crate) fn point_triangle_dist2(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return norm2(ap); // vertex a
    }

    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return norm2(bp); // vertex b
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return norm2(sub(p, axpy(a, v, ab))); // edge ab
    }

    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return norm2(cp); // vertex c
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return norm2(sub(p, axpy(a, w, ac))); // edge ac
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return norm2(sub(p, axpy(b, w, sub(c, b)))); // edge bc
    }

    // interior
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    let closest = [
        a[0] + ab[0] * v + ac[0] * w,
        a[1] + ab[1] * v + ac[1] * w,
        a[2] + ab[2] * v + ac[2] * w,
    ];
    norm2(sub(p, closest))
}

/// An immutable triangle mesh in R^3.
///
/// Degenerate (zero-area) triangles are dropped at construction. Every query
/// is exact: it minimizes the point-triangle distance over all triangles,
/// with a bounding-sphere rejection test that never changes the result.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    /// (center, radius) per triangle for cheap rejection.
    spheres: Vec<(Vec3, f64)>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[u32; 3]>) -> Result<TriangleMesh> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("mesh has no vertices".into()));
        }
        for v in &vertices {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("non-finite mesh vertex".into()));
            }
        }
        let nv = vertices.len() as u32;
        let mut kept = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&i| i >= nv) {
                return Err(Error::InvalidInput(format!("triangle references vertex {} out of range", t.iter().max().unwrap())));
            }
            let [a, b, c] = [vertices[t[0] as usize], vertices[t[1] as usize], vertices[t[2] as usize]];
            let area2 = norm2(cross(sub(b, a), sub(c, a)));
            if area2 > 0.0 {
                kept.push(t);
            }
        }
        if kept.is_empty() {
            return Err(Error::InvalidInput("mesh has no non-degenerate triangles".into()));
        }
        let spheres = kept
            .iter()
            .map(|t| {
                let [a, b, c] = [vertices[t[0] as usize], vertices[t[1] as usize], vertices[t[2] as usize]];
                let center = [
                    (a[0] + b[0] + c[0]) / 3.0,
                    (a[1] + b[1] + c[1]) / 3.0,
                    (a[2] + b[2] + c[2]) / 3.0,
                ];
                let r2 = norm2(sub(a, center)).max(norm2(sub(b, center))).max(norm2(sub(c, center)));
                (center, r2.sqrt())
            })
            .collect();
        Ok(TriangleMesh { vertices, triangles: kept, spheres })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub(crate) fn distance_unchecked(&self, q: &[f64]) -> f64 {
        let p = [q[0], q[1], q[2]];
        let mut best = f64::INFINITY;
        for (t, (center, radius)) in self.triangles.iter().zip(&self.spheres) {
            let lower = norm2(sub(p, *center)).sqrt() - radius;
            if lower > 0.0 && lower * lower >= best {
                continue;
            }
            let d2 = point_triangle_dist2(
                p,
                self.vertices[t[0] as usize],
                self.vertices[t[1] as usize],
                self.vertices[t[2] as usize],
            );
            if d2 < best {
                best = d2;
            }
        }
        best.sqrt()
    }
}

/// Exact Euclidean distance from a 3-d query point to the mesh surface.
pub fn distance_to_mesh(mesh: &TriangleMesh, q: &[f64]) -> Result<f64> {
    if q.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: q.len() });
    }
    Ok(mesh.distance_unchecked(q))
}

/// Loads an ASCII OFF file. Faces with more than three vertices are
/// fan-triangulated; zero-area faces are dropped.
pub fn load_off<P: AsRef<Path>>(path: P) -> Result<TriangleMesh> {
    let file = std::fs::File::open(path)?;
    parse_off(BufReader::new(file))
}

pub fn parse_off<R: BufRead>(reader: R) -> Result<TriangleMesh> {
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let data = line.split('#').next().unwrap_or("");
        for tok in data.split_whitespace() {
            tokens.push((lineno + 1, tok.to_string()));
        }
    }
    let mut pos = 0;
    let next = |pos: &mut usize| -> Result<(usize, String)> {
        if *pos >= tokens.len() {
            return Err(Error::Parse { line: tokens.last().map_or(0, |t| t.0), msg: "unexpected end of file".into() });
        }
        let t = tokens[*pos].clone();
        *pos += 1;
        Ok(t)
    };

    let (line, magic) = next(&mut pos)?;
    if magic != "OFF" {
        return Err(Error::Parse { line, msg: format!("expected OFF header, got {magic}") });
    }
    let parse_usize = |t: (usize, String)| -> Result<usize> {
        t.1.parse().map_err(|_| Error::Parse { line: t.0, msg: format!("expected integer, got {}", t.1) })
    };
    let parse_f64 = |t: (usize, String)| -> Result<f64> {
        t.1.parse().map_err(|_| Error::Parse { line: t.0, msg: format!("expected number, got {}", t.1) })
    };
    let nv = parse_usize(next(&mut pos)?)?;
    let nf = parse_usize(next(&mut pos)?)?;
    let _ne = parse_usize(next(&mut pos)?)?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let x = parse_f64(next(&mut pos)?)?;
        let y = parse_f64(next(&mut pos)?)?;
        let z = parse_f64(next(&mut pos)?)?;
        vertices.push([x, y, z]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let k_tok = next(&mut pos)?;
        let k_line = k_tok.0;
        let k = parse_usize(k_tok)?;
        if k < 3 {
            return Err(Error::Parse { line: k_line, msg: format!("face with {k} vertices") });
        }
        let mut ids = Vec::with_capacity(k);
        for _ in 0..k {
            ids.push(parse_usize(next(&mut pos)?)? as u32);
        }
        for i in 1..k - 1 {
            triangles.push([ids[0], ids[i], ids[i + 1]]);
        }
    }
    TriangleMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_triangle() -> TriangleMesh {
        TriangleMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn interior_projection() {
        let m = unit_triangle();
        assert_eq!(distance_to_mesh(&m, &[0.25, 0.25, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn nearest_feature_is_a_vertex() {
        let m = unit_triangle();
        assert_eq!(distance_to_mesh(&m, &[2.0, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn on_edge_point_has_zero_distance() {
        let m = unit_triangle();
        assert_eq!(distance_to_mesh(&m, &[0.5, 0.5, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let m = unit_triangle();
        assert!(distance_to_mesh(&m, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn brute_force_agreement_on_random_queries() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // A small fan of triangles around the origin.
        let mut vertices = vec![[0.0, 0.0, 0.0]];
        for k in 0..8 {
            let a = k as f64 * std::f64::consts::PI / 4.0;
            vertices.push([a.cos(), a.sin(), (k % 3) as f64 * 0.2]);
        }
        let triangles: Vec<[u32; 3]> = (1..8).map(|k| [0, k, k + 1]).collect();
        let mesh = TriangleMesh::new(vertices.clone(), triangles.clone()).unwrap();
        for _ in 0..500 {
            let q = [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            ];
            let direct = triangles
                .iter()
                .map(|t| {
                    point_triangle_dist2(
                        q,
                        vertices[t[0] as usize],
                        vertices[t[1] as usize],
                        vertices[t[2] as usize],
                    )
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            assert_eq!(mesh.distance_unchecked(&q), direct);
        }
    }

    #[test]
    fn off_roundtrip_with_fan_triangulation() {
        let text = "OFF\n# comment\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let mesh = parse_off(std::io::Cursor::new(text)).unwrap();
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(mesh.triangle_count(), 2);
        assert_eq!(mesh.distance_unchecked(&[0.5, 0.5, 2.0]), 2.0);
    }

    #[test]
    fn degenerate_faces_are_dropped() {
        let mesh = TriangleMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        assert_eq!(mesh.triangle_count(), 1);
    }
}
