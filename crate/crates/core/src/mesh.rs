//! Structured segment/rectangle meshes, straight-edged quadrilateral mesh
//! import, and global C0 DoF numbering for any element degree.
//!
//! Mesh file format (UTF-8, whitespace-delimited, 0-based indices):
//!
//! ```text
//! $vertices N
//! x y          (N lines)
//! $elements M
//! v0 v1 v2 v3  (M lines, counterclockwise)
//! ```

use std::collections::HashMap;
use std::io::BufRead;

use crate::ref_element::{gauss_lobatto, MAX_DEGREE};
use crate::{Error, Result};

/// A tessellation into segments (1D) or straight-edged quadrilaterals (2D),
/// immutable after construction.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<[f64; 2]>,
    conn: Vec<usize>,
    nodes_per_elem: usize,
}

/// Jacobian of the geometric map at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct Jacobian {
    /// row-major [dx/dxi, dx/deta; dy/dxi, dy/deta] (1D uses the (0,0) entry)
    pub j: [[f64; 2]; 2],
    pub det: f64,
}

impl Jacobian {
    /// Physical gradient from a reference gradient: J^{-T} grad_ref.
    #[inline]
    pub fn to_physical_gradient(&self, dim: usize, g: [f64; 2]) -> [f64; 2] {
        if dim == 1 {
            [g[0] / self.j[0][0], 0.0]
        } else {
            let inv_det = 1.0 / self.det;
            [
                inv_det * (self.j[1][1] * g[0] - self.j[1][0] * g[1]),
                inv_det * (-self.j[0][1] * g[0] + self.j[0][0] * g[1]),
            ]
        }
    }
}

impl Mesh {
    /// Uniform partition of [a, b] into `n_elem` segments.
    pub fn segment(a: f64, b: f64, n_elem: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::Parameter(format!("need a < b, got [{a}, {b}]")));
        }
        if n_elem == 0 {
            return Err(Error::Parameter("n_elem must be positive".into()));
        }
        let h = (b - a) / n_elem as f64;
        let vertices = (0..=n_elem).map(|i| [a + i as f64 * h, 0.0]).collect();
        let mut conn = Vec::with_capacity(2 * n_elem);
        for e in 0..n_elem {
            conn.push(e);
            conn.push(e + 1);
        }
        Ok(Mesh {
            dim: 1,
            vertices,
            conn,
            nodes_per_elem: 2,
        })
    }

    /// nx-by-ny axis-aligned quads covering [0, lx] x [0, ly].
    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if lx <= 0.0 || ly <= 0.0 {
            return Err(Error::Parameter(format!(
                "side lengths must be positive, got {lx} x {ly}"
            )));
        }
        if nx == 0 || ny == 0 {
            return Err(Error::Parameter("element counts must be positive".into()));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]);
            }
        }
        let mut conn = Vec::with_capacity(4 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let v0 = j * (nx + 1) + i;
                conn.extend_from_slice(&[v0, v0 + 1, v0 + nx + 2, v0 + nx + 1]);
            }
        }
        Ok(Mesh {
            dim: 2,
            vertices,
            conn,
            nodes_per_elem: 4,
        })
    }

    /// Read a quadrilateral mesh in the crate's plain-text format.
    pub fn import_quads<R: BufRead>(reader: R) -> Result<Self> {
        let mut vertices: Vec<[f64; 2]> = Vec::new();
        let mut conn: Vec<usize> = Vec::new();
        let mut expect_vertices = 0usize;
        let mut expect_elements = 0usize;

        #[derive(PartialEq)]
        enum Section {
            None,
            Vertices,
            Elements,
        }
        let mut section = Section::None;
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let mut tokens = text.split_whitespace();
            let first = tokens.next().unwrap();
            match first {
                "$vertices" => {
                    expect_vertices = tokens
                        .next()
                        .ok_or_else(|| parse_err(lineno, "missing vertex count".into()))?
                        .parse()
                        .map_err(|e| parse_err(lineno, format!("bad vertex count: {e}")))?;
                    section = Section::Vertices;
                }
                "$elements" => {
                    expect_elements = tokens
                        .next()
                        .ok_or_else(|| parse_err(lineno, "missing element count".into()))?
                        .parse()
                        .map_err(|e| parse_err(lineno, format!("bad element count: {e}")))?;
                    section = Section::Elements;
                }
                _ => match section {
                    Section::Vertices => {
                        let x: f64 = first
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad x coordinate: {e}")))?;
                        let y: f64 = tokens
                            .next()
                            .ok_or_else(|| parse_err(lineno, "missing y coordinate".into()))?
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad y coordinate: {e}")))?;
                        vertices.push([x, y]);
                    }
                    Section::Elements => {
                        let mut quad = [0usize; 4];
                        quad[0] = first
                            .parse()
                            .map_err(|e| parse_err(lineno, format!("bad vertex index: {e}")))?;
                        for q in quad.iter_mut().skip(1) {
                            *q = tokens
                                .next()
                                .ok_or_else(|| {
                                    parse_err(lineno, "element needs 4 vertex indices".into())
                                })?
                                .parse()
                                .map_err(|e| parse_err(lineno, format!("bad vertex index: {e}")))?;
                        }
                        for &v in &quad {
                            if v >= vertices.len() {
                                return Err(parse_err(
                                    lineno,
                                    format!(
                                        "vertex index {v} out of range (have {})",
                                        vertices.len()
                                    ),
                                ));
                            }
                        }
                        conn.extend_from_slice(&quad);
                    }
                    Section::None => {
                        return Err(parse_err(lineno, format!("unexpected token '{first}'")))
                    }
                },
            }
        }
        if vertices.len() != expect_vertices {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "expected {expect_vertices} vertices, found {}",
                    vertices.len()
                ),
            });
        }
        if conn.len() / 4 != expect_elements {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "expected {expect_elements} elements, found {}",
                    conn.len() / 4
                ),
            });
        }
        let mesh = Mesh {
            dim: 2,
            vertices,
            conn,
            nodes_per_elem: 4,
        };
        mesh.validate_geometry()?;
        Ok(mesh)
    }

    /// Positive Jacobian check. The determinant of a bilinear map is
    /// bilinear in (xi, eta), so positivity at the four corners implies
    /// positivity on the whole element.
    fn validate_geometry(&self) -> Result<()> {
        if self.dim == 2 {
            for e in 0..self.n_elements() {
                for corner in [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]] {
                    let det = self.jacobian(e, corner).det;
                    if det <= 0.0 {
                        return Err(Error::Geometry(format!(
                            "element {e} has non-positive Jacobian ({det:.3e}) — \
                             tangled or clockwise vertex order"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_elements(&self) -> usize {
        self.conn.len() / self.nodes_per_elem
    }

    pub fn vertex(&self, v: usize) -> [f64; 2] {
        self.vertices[v]
    }

    pub fn element(&self, e: usize) -> &[usize] {
        &self.conn[e * self.nodes_per_elem..(e + 1) * self.nodes_per_elem]
    }

    /// Map a reference point to physical coordinates (affine in 1D,
    /// bilinear on quads).
    pub fn map_to_physical(&self, e: usize, xi: [f64; 2]) -> [f64; 2] {
        let vs = self.element(e);
        if self.dim == 1 {
            let a = self.vertices[vs[0]][0];
            let b = self.vertices[vs[1]][0];
            [0.5 * (a + b) + 0.5 * xi[0] * (b - a), 0.0]
        } else {
            let shapes = bilinear_shapes(xi);
            let mut p = [0.0, 0.0];
            for (k, &v) in vs.iter().enumerate() {
                p[0] += shapes[k] * self.vertices[v][0];
                p[1] += shapes[k] * self.vertices[v][1];
            }
            p
        }
    }

    pub fn jacobian(&self, e: usize, xi: [f64; 2]) -> Jacobian {
        let vs = self.element(e);
        if self.dim == 1 {
            let h = self.vertices[vs[1]][0] - self.vertices[vs[0]][0];
            Jacobian {
                j: [[0.5 * h, 0.0], [0.0, 1.0]],
                det: 0.5 * h,
            }
        } else {
            let ds = bilinear_shape_derivs(xi);
            let mut j = [[0.0; 2]; 2];
            for (k, &v) in vs.iter().enumerate() {
                let [x, y] = self.vertices[v];
                j[0][0] += ds[k][0] * x;
                j[0][1] += ds[k][1] * x;
                j[1][0] += ds[k][0] * y;
                j[1][1] += ds[k][1] * y;
            }
            Jacobian {
                j,
                det: j[0][0] * j[1][1] - j[0][1] * j[1][0],
            }
        }
    }

    /// Measure of one element (exact for straight edges).
    pub fn element_measure(&self, e: usize) -> f64 {
        if self.dim == 1 {
            let vs = self.element(e);
            self.vertices[vs[1]][0] - self.vertices[vs[0]][0]
        } else {
            // shoelace formula on the quad
            let vs = self.element(e);
            let mut a = 0.0;
            for k in 0..4 {
                let [x0, y0] = self.vertices[vs[k]];
                let [x1, y1] = self.vertices[vs[(k + 1) % 4]];
                a += x0 * y1 - x1 * y0;
            }
            0.5 * a
        }
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_elements())
            .map(|e| self.element_measure(e))
            .sum()
    }
}

fn bilinear_shapes(xi: [f64; 2]) -> [f64; 4] {
    let [x, y] = xi;
    [
        0.25 * (1.0 - x) * (1.0 - y),
        0.25 * (1.0 + x) * (1.0 - y),
        0.25 * (1.0 + x) * (1.0 + y),
        0.25 * (1.0 - x) * (1.0 + y),
    ]
}

fn bilinear_shape_derivs(xi: [f64; 2]) -> [[f64; 2]; 4] {
    let [x, y] = xi;
    [
        [-0.25 * (1.0 - y), -0.25 * (1.0 - x)],
        [0.25 * (1.0 - y), -0.25 * (1.0 + x)],
        [0.25 * (1.0 + y), 0.25 * (1.0 + x)],
        [-0.25 * (1.0 + y), 0.25 * (1.0 - x)],
    ]
}

/// Global continuous-Galerkin DoF numbering for one element degree.
///
/// Numbering is entity-lexicographic and deterministic: mesh vertices
/// first, then edges sorted by (low, high) vertex pair, then element
/// interiors in element order.
#[derive(Debug, Clone)]
pub struct DofMap {
    degree: usize,
    n_dofs: usize,
    dofs_per_elem: usize,
    element_to_global: Vec<usize>,
    dof_coords: Vec<[f64; 2]>,
}

impl DofMap {
    pub fn build(mesh: &Mesh, degree: usize) -> Result<Self> {
        if degree < 1 || degree > MAX_DEGREE {
            return Err(Error::Parameter(format!(
                "degree must be in 1..={MAX_DEGREE}, got {degree}"
            )));
        }
        match mesh.dim() {
            1 => Ok(Self::build_1d(mesh, degree)),
            _ => Ok(Self::build_2d(mesh, degree)),
        }
    }

    fn build_1d(mesh: &Mesh, p: usize) -> Self {
        let n_v = mesh.n_vertices();
        let n_e = mesh.n_elements();
        let n_dofs = n_v + n_e * (p - 1);
        let nodes = gauss_lobatto(p);
        let mut element_to_global = Vec::with_capacity(n_e * (p + 1));
        let mut dof_coords = vec![[0.0, 0.0]; n_dofs];
        for (v, &c) in mesh.vertices.iter().enumerate() {
            dof_coords[v] = c;
        }
        for e in 0..n_e {
            let vs = mesh.element(e);
            for i in 0..=p {
                let g = if i == 0 {
                    vs[0]
                } else if i == p {
                    vs[1]
                } else {
                    let g = n_v + e * (p - 1) + (i - 1);
                    dof_coords[g] = mesh.map_to_physical(e, [nodes[i], 0.0]);
                    g
                };
                element_to_global.push(g);
            }
        }
        DofMap {
            degree: p,
            n_dofs,
            dofs_per_elem: p + 1,
            element_to_global,
            dof_coords,
        }
    }

    fn build_2d(mesh: &Mesh, p: usize) -> Self {
        let n_v = mesh.n_vertices();
        let n_e = mesh.n_elements();
        let nodes = gauss_lobatto(p);
        // collect unique edges, sorted by (low, high) vertex pair
        let mut edge_set: Vec<(usize, usize)> = Vec::new();
        for e in 0..n_e {
            let vs = mesh.element(e);
            for k in 0..4 {
                let (a, b) = (vs[k], vs[(k + 1) % 4]);
                edge_set.push((a.min(b), a.max(b)));
            }
        }
        edge_set.sort_unstable();
        edge_set.dedup();
        let edge_index: HashMap<(usize, usize), usize> =
            edge_set.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let n_edges = edge_set.len();
        let per_edge = p - 1;
        let per_interior = (p - 1) * (p - 1);
        let n_dofs = n_v + n_edges * per_edge + n_e * per_interior;
        let edge_base = n_v;
        let interior_base = n_v + n_edges * per_edge;

        let mut dof_coords = vec![[0.0, 0.0]; n_dofs];
        for (v, &c) in mesh.vertices.iter().enumerate() {
            dof_coords[v] = c;
        }
        // edge node coordinates along the canonical low -> high direction
        for (i, &(lo, hi)) in edge_set.iter().enumerate() {
            let a = mesh.vertices[lo];
            let b = mesh.vertices[hi];
            for k in 0..per_edge {
                let t = 0.5 * (nodes[k + 1] + 1.0);
                dof_coords[edge_base + i * per_edge + k] =
                    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            }
        }

        let n1 = p + 1;
        let mut element_to_global = Vec::with_capacity(n_e * n1 * n1);
        for e in 0..n_e {
            let vs = mesh.element(e);
            // local edges in traversal order: bottom, right, top, left
            let local_edges = [
                (vs[0], vs[1]), // j = 0
                (vs[1], vs[2]), // i = p
                (vs[3], vs[2]), // j = p
                (vs[0], vs[3]), // i = 0
            ];
            for j in 0..n1 {
                for i in 0..n1 {
                    let g = match (i, j) {
                        (0, 0) => vs[0],
                        (x, 0) if x == p => vs[1],
                        (x, y) if x == p && y == p => vs[2],
                        (0, y) if y == p => vs[3],
                        (x, 0) => edge_dof(&edge_index, edge_base, per_edge, local_edges[0], x - 1),
                        (x, y) if x == p => {
                            edge_dof(&edge_index, edge_base, per_edge, local_edges[1], y - 1)
                        }
                        (x, y) if y == p => {
                            edge_dof(&edge_index, edge_base, per_edge, local_edges[2], x - 1)
                        }
                        (0, y) => edge_dof(&edge_index, edge_base, per_edge, local_edges[3], y - 1),
                        (x, y) => {
                            let g =
                                interior_base + e * per_interior + (y - 1) * (p - 1) + (x - 1);
                            dof_coords[g] = mesh.map_to_physical(e, [nodes[x], nodes[y]]);
                            g
                        }
                    };
                    element_to_global.push(g);
                }
            }
        }
        DofMap {
            degree: p,
            n_dofs,
            dofs_per_elem: n1 * n1,
            element_to_global,
            dof_coords,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn dofs_per_elem(&self) -> usize {
        self.dofs_per_elem
    }

    pub fn global_ids(&self, e: usize) -> &[usize] {
        &self.element_to_global[e * self.dofs_per_elem..(e + 1) * self.dofs_per_elem]
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    /// Evaluate a coefficient vector at a reference point of one element.
    pub fn eval_local(
        &self,
        u: &[f64],
        e: usize,
        basis: &crate::ref_element::BasisTable,
        xi: [f64; 2],
    ) -> f64 {
        let vals = basis.eval_at(xi);
        self.global_ids(e)
            .iter()
            .zip(vals)
            .map(|(&g, v)| u[g] * v)
            .sum()
    }
}

fn edge_dof(
    edge_index: &HashMap<(usize, usize), usize>,
    edge_base: usize,
    per_edge: usize,
    (a, b): (usize, usize),
    pos: usize,
) -> usize {
    let key = (a.min(b), a.max(b));
    let idx = edge_index[&key];
    let slot = if a < b { pos } else { per_edge - 1 - pos };
    edge_base + idx * per_edge + slot
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ref_element::BasisTable;

    #[test]
    fn segment_examples() {
        let m = Mesh::segment(0.0, 1.0, 1).unwrap();
        assert_eq!(m.n_elements(), 1);
        assert!((m.total_measure() - 1.0).abs() < 1e-15);

        let m = Mesh::segment(0.0, 1.0, 100).unwrap();
        assert_eq!(m.n_elements(), 100);
        assert!((m.element_measure(37) - 0.01).abs() < 1e-15);

        let m = Mesh::segment(0.0, 1.0, 35).unwrap();
        assert_eq!(m.n_elements(), 35);
        assert!(Mesh::segment(1.0, 0.0, 4).is_err());
        assert!(Mesh::segment(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn rectangle_examples() {
        assert_eq!(Mesh::rectangle(1.0, 1.0, 12, 12).unwrap().n_elements(), 144);
        assert_eq!(
            Mesh::rectangle(1.0, 1.0, 256, 256).unwrap().n_elements(),
            65536
        );
        let m = Mesh::rectangle(2.0, 1.0, 2, 1).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert!((m.element_measure(0) - 1.0).abs() < 1e-14);
        assert!((m.total_measure() - 2.0).abs() < 1e-14);
        assert!(Mesh::rectangle(0.0, 1.0, 2, 2).is_err());
        assert!(Mesh::rectangle(1.0, 1.0, 0, 2).is_err());
    }

    #[test]
    fn elements_cover_domain() {
        let m = Mesh::rectangle(2.0, 1.0, 7, 3).unwrap();
        assert!((m.total_measure() - 2.0).abs() < 1e-10 * 2.0);
        // quadrature-based measure agrees
        let basis = BasisTable::with_default_quadrature(1, 2).unwrap();
        let mut q_measure = 0.0;
        for e in 0..m.n_elements() {
            for (q, w) in basis.quad_weights().iter().enumerate() {
                q_measure += w * m.jacobian(e, basis.quad_points()[q]).det;
            }
        }
        assert!((q_measure - 2.0).abs() < 1e-12);
    }

    #[test]
    fn import_unit_square() {
        let text = "$vertices 4\n0 0\n1 0\n1 1\n0 1\n$elements 1\n0 1 2 3\n";
        let m = Mesh::import_quads(text.as_bytes()).unwrap();
        assert_eq!(m.n_elements(), 1);
        assert!((m.total_measure() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn import_trapezoid_two_quads() {
        // trapezoid (0,0),(2,0),(1.5,1),(0.5,1) split down the middle;
        // shoelace oracle gives area 1.5
        let text = "$vertices 6\n0 0\n1 0\n2 0\n1.5 1\n1 1\n0.5 1\n\
                    $elements 2\n0 1 4 5\n1 2 3 4\n";
        let m = Mesh::import_quads(text.as_bytes()).unwrap();
        assert_eq!(m.n_elements(), 2);
        let shoelace: f64 = {
            let pts = [[0.0, 0.0], [2.0, 0.0], [1.5, 1.0], [0.5, 1.0]];
            let mut a = 0.0;
            for k in 0..4 {
                let [x0, y0] = pts[k];
                let [x1, y1] = pts[(k + 1) % 4];
                a += x0 * y1 - x1 * y0;
            }
            0.5 * a
        };
        assert!((shoelace - 1.5).abs() < 1e-15);
        assert!((m.total_measure() - shoelace).abs() < 1e-12);
    }

    #[test]
    fn import_rejects_clockwise_quad() {
        let text = "$vertices 4\n0 0\n1 0\n1 1\n0 1\n$elements 1\n0 3 2 1\n";
        match Mesh::import_quads(text.as_bytes()) {
            Err(Error::Geometry(msg)) => assert!(msg.contains("element 0")),
            other => panic!("expected geometry error, got {other:?}"),
        }
    }

    #[test]
    fn import_reports_line_numbers() {
        let text = "$vertices 2\n0 0\nnot-a-number 1\n";
        match Mesh::import_quads(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "$vertices 1\n0 0\n$elements 1\n0 1 2 3\n";
        assert!(matches!(
            Mesh::import_quads(text.as_bytes()),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn dof_counts() {
        let m = Mesh::segment(0.0, 1.0, 100).unwrap();
        assert_eq!(DofMap::build(&m, 1).unwrap().n_dofs(), 101);
        let m = Mesh::segment(0.0, 1.0, 35).unwrap();
        assert_eq!(DofMap::build(&m, 3).unwrap().n_dofs(), 3 * 35 + 1);
        let m = Mesh::rectangle(1.0, 1.0, 12, 12).unwrap();
        assert_eq!(DofMap::build(&m, 1).unwrap().n_dofs(), 169);
        // (p nx + 1)(p ny + 1) on a structured rectangle
        let m = Mesh::rectangle(1.0, 1.0, 4, 3).unwrap();
        assert_eq!(DofMap::build(&m, 3).unwrap().n_dofs(), 13 * 10);
    }

    #[test]
    fn equal_complexity_means_equal_dofs_1d() {
        // complexity = degree x n_elem; meshes of equal complexity have
        // n_dofs differing by at most 1 (here: exactly p*n + 1)
        for (p, n) in [(1, 60), (2, 30), (3, 20), (4, 15), (5, 12), (6, 10)] {
            let m = Mesh::segment(0.0, 1.0, n).unwrap();
            let d = DofMap::build(&m, p).unwrap();
            assert_eq!(d.n_dofs(), 61);
        }
    }

    #[test]
    fn shared_dofs_have_consistent_coordinates() {
        let m = Mesh::rectangle(1.0, 1.0, 3, 2).unwrap();
        for p in [2, 3, 5] {
            let d = DofMap::build(&m, p).unwrap();
            let basis = BasisTable::with_default_quadrature(p, 2).unwrap();
            // evaluating the element map at each local node must land on
            // the stored coordinate of its global dof
            for e in 0..m.n_elements() {
                for (loc, &g) in d.global_ids(e).iter().enumerate() {
                    let xi = basis.nodes()[loc];
                    let x = m.map_to_physical(e, xi);
                    let c = d.dof_coords()[g];
                    assert!(
                        (x[0] - c[0]).abs() + (x[1] - c[1]).abs() < 1e-12,
                        "p={p} elem={e} local={loc}"
                    );
                }
            }
        }
    }

    #[test]
    fn patch_test_reproduces_polynomials() {
        // interpolate a global polynomial of degree <= p at the dof
        // coordinates; element-wise evaluation must reproduce it
        let m = Mesh::rectangle(1.5, 1.0, 3, 2).unwrap();
        for p in [1, 2, 4] {
            let d = DofMap::build(&m, p).unwrap();
            let basis = BasisTable::with_default_quadrature(p, 2).unwrap();
            let poly = |x: f64, y: f64| {
                (0..=p).map(|k| x.powi(k as i32)).sum::<f64>() + 0.5 * y.powi(p as i32)
            };
            let u: Vec<f64> = d.dof_coords().iter().map(|c| poly(c[0], c[1])).collect();
            for e in 0..m.n_elements() {
                for &xi in &[[-0.37, 0.61], [0.92, -0.14], [0.0, 0.0]] {
                    let x = m.map_to_physical(e, xi);
                    let got = d.eval_local(&u, e, &basis, xi);
                    let expect = poly(x[0], x[1]);
                    assert!((got - expect).abs() < 1e-12, "p={p} e={e}");
                }
            }
        }
    }
}
