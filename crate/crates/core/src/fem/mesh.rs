//! Meshes: storage, validity checks, the crack-tip boundary-layer and graded
//! interval generators, and a plain-text import/export format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::element::ElementShape;
use crate::{Error, Result};

/// One geometric element: a shape plus its corner node ids. Geometry is
/// straight-sided; higher-order field nodes are generated by the dof map.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshElement {
    pub shape: ElementShape,
    pub nodes: Vec<u32>,
}

/// A boundary facet: an element together with one of its local edges
/// (for 1D meshes, one of its endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub element: u32,
    pub edge: u8,
}

/// An unstructured 1D/2D mesh with named boundary tags.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub dim: u8,
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<MeshElement>,
    pub boundary: BTreeMap<String, Vec<Facet>>,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Corner coordinates of an element, padded to four entries.
    pub fn corners(&self, elem: usize) -> [[f64; 2]; 4] {
        let mut out = [[0.0; 2]; 4];
        for (k, &n) in self.elements[elem].nodes.iter().enumerate() {
            out[k] = self.nodes[n as usize];
        }
        out
    }

    pub fn facets(&self, tag: &str) -> Result<&[Facet]> {
        self.boundary
            .get(tag)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Mesh(format!("unknown boundary tag `{tag}`")))
    }

    /// Mesh node ids lying on a tagged boundary, sorted and deduplicated.
    pub fn boundary_nodes(&self, tag: &str) -> Result<Vec<u32>> {
        let mut out = Vec::new();
        for f in self.facets(tag)? {
            let el = &self.elements[f.element as usize];
            if self.dim == 1 {
                out.push(el.nodes[f.edge as usize]);
            } else {
                let (a, b) = el.shape.edges()[f.edge as usize];
                out.push(el.nodes[a]);
                out.push(el.nodes[b]);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Validates connectivity, Jacobian positivity at the corners and that
    /// every facet refers to a valid element edge.
    pub fn validate(&self) -> Result<()> {
        for (e, el) in self.elements.iter().enumerate() {
            if el.nodes.len() != el.shape.corner_count() {
                return Err(Error::Mesh(format!(
                    "element {e}: expected {} corner nodes, got {}",
                    el.shape.corner_count(),
                    el.nodes.len()
                )));
            }
            for &n in &el.nodes {
                if n as usize >= self.nodes.len() {
                    return Err(Error::Mesh(format!("element {e} references node {n}")));
                }
            }
            let c = self.corners(e);
            match el.shape {
                ElementShape::Interval => {
                    if c[1][0] - c[0][0] <= 0.0 && self.dim == 1 {
                        return Err(Error::Mesh(format!("element {e}: non-positive length")));
                    }
                }
                ElementShape::Triangle => {
                    let det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1])
                        - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
                    if det <= 0.0 {
                        return Err(Error::Mesh(format!(
                            "element {e}: non-positive Jacobian ({det:.3e})"
                        )));
                    }
                }
                ElementShape::Quad => {
                    // check the bilinear Jacobian at all four corners
                    for k in 0..4 {
                        let p = ElementShape::Quad.corner_ref_positions()[k];
                        let det = quad_jacobian_det(&c, p);
                        if det <= 0.0 {
                            return Err(Error::Mesh(format!(
                                "element {e}: non-positive Jacobian at corner {k} ({det:.3e})"
                            )));
                        }
                    }
                }
            }
        }
        for (tag, facets) in &self.boundary {
            for f in facets {
                let el = self
                    .elements
                    .get(f.element as usize)
                    .ok_or_else(|| Error::Mesh(format!("tag `{tag}`: bad element {}", f.element)))?;
                if (f.edge as usize) >= el.shape.edges().len() {
                    return Err(Error::Mesh(format!("tag `{tag}`: bad edge {}", f.edge)));
                }
            }
        }
        Ok(())
    }

    /// Writes the plain-text format: node table, element table, tag table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim {}", self.dim).unwrap();
        writeln!(s, "nodes {}", self.nodes.len()).unwrap();
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(s, "{} {:.17e} {:.17e}", i, n[0], n[1]).unwrap();
        }
        writeln!(s, "elements {}", self.elements.len()).unwrap();
        for (i, el) in self.elements.iter().enumerate() {
            write!(s, "{} {}", i, el.shape.name()).unwrap();
            for &n in &el.nodes {
                write!(s, " {n}").unwrap();
            }
            writeln!(s).unwrap();
        }
        writeln!(s, "tags {}", self.boundary.len()).unwrap();
        for (tag, facets) in &self.boundary {
            writeln!(s, "{} {}", tag, facets.len()).unwrap();
            for f in facets {
                writeln!(s, "{} {}", f.element, f.edge).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut next = |what: &str| -> Result<&str> {
            lines
                .next()
                .ok_or_else(|| Error::Mesh(format!("truncated mesh file at {what}")))
        };
        let bad = |l: &str| Error::Mesh(format!("malformed mesh line `{l}`"));

        let l = next("dim")?;
        let dim: u8 = l
            .strip_prefix("dim ")
            .ok_or_else(|| bad(l))?
            .trim()
            .parse()
            .map_err(|_| bad(l))?;

        let l = next("nodes")?;
        let n_nodes: usize = l
            .strip_prefix("nodes ")
            .ok_or_else(|| bad(l))?
            .trim()
            .parse()
            .map_err(|_| bad(l))?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let l = next("node row")?;
            let mut it = l.split_whitespace().skip(1);
            let x: f64 = it.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
            let y: f64 = it.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
            nodes.push([x, y]);
        }

        let l = next("elements")?;
        let n_el: usize = l
            .strip_prefix("elements ")
            .ok_or_else(|| bad(l))?
            .trim()
            .parse()
            .map_err(|_| bad(l))?;
        let mut elements = Vec::with_capacity(n_el);
        for _ in 0..n_el {
            let l = next("element row")?;
            let mut it = l.split_whitespace().skip(1);
            let shape = ElementShape::from_name(it.next().ok_or_else(|| bad(l))?)?;
            let ids: Vec<u32> = it
                .map(|t| t.parse().map_err(|_| bad(l)))
                .collect::<Result<_>>()?;
            elements.push(MeshElement { shape, nodes: ids });
        }

        let l = next("tags")?;
        let n_tags: usize = l
            .strip_prefix("tags ")
            .ok_or_else(|| bad(l))?
            .trim()
            .parse()
            .map_err(|_| bad(l))?;
        let mut boundary = BTreeMap::new();
        for _ in 0..n_tags {
            let l = next("tag header")?;
            let mut it = l.split_whitespace();
            let name = it.next().ok_or_else(|| bad(l))?.to_string();
            let count: usize = it.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
            let mut facets = Vec::with_capacity(count);
            for _ in 0..count {
                let l = next("facet row")?;
                let mut it = l.split_whitespace();
                let element: u32 = it.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
                let edge: u8 = it.next().ok_or_else(|| bad(l))?.parse().map_err(|_| bad(l))?;
                facets.push(Facet { element, edge });
            }
            boundary.insert(name, facets);
        }

        let mesh = Mesh { dim, nodes, elements, boundary };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

fn quad_jacobian_det(c: &[[f64; 2]; 4], p: [f64; 2]) -> f64 {
    let (xi, eta) = (p[0], p[1]);
    // bilinear shape gradients
    let dn = [
        [-(1.0 - eta) / 4.0, -(1.0 - xi) / 4.0],
        [(1.0 - eta) / 4.0, -(1.0 + xi) / 4.0],
        [(1.0 + eta) / 4.0, (1.0 + xi) / 4.0],
        [-(1.0 + eta) / 4.0, (1.0 - xi) / 4.0],
    ];
    let mut j = [[0.0; 2]; 2];
    for k in 0..4 {
        j[0][0] += c[k][0] * dn[k][0];
        j[0][1] += c[k][0] * dn[k][1];
        j[1][0] += c[k][1] * dn[k][0];
        j[1][1] += c[k][1] * dn[k][1];
    }
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Builds a graded 1D mesh on `[0, length]` with endpoint tags `symmetry`
/// (x = 0) and `surface` (x = length). Element sizes follow a geometric
/// progression; `grading` is the last/first size ratio, so `grading < 1`
/// refines toward the surface end.
pub fn build_interval_mesh(length: f64, n_elements: usize, grading: f64) -> Result<Mesh> {
    if length <= 0.0 {
        return Err(Error::Mesh("interval length must be positive".into()));
    }
    if n_elements < 2 {
        return Err(Error::Mesh("need at least 2 elements".into()));
    }
    if grading <= 0.0 {
        return Err(Error::Mesh("grading must be positive".into()));
    }
    let n = n_elements;
    let rho = grading.powf(1.0 / (n as f64 - 1.0));
    // first size from the geometric sum h0 * (1 + rho + ... + rho^(n-1)) = L
    let sum = if (rho - 1.0).abs() < 1e-14 {
        n as f64
    } else {
        (rho.powi(n as i32) - 1.0) / (rho - 1.0)
    };
    let h0 = length / sum;
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push([0.0, 0.0]);
    let mut x = 0.0;
    for i in 0..n {
        x += h0 * rho.powi(i as i32);
        nodes.push([x, 0.0]);
    }
    // land exactly on the endpoint
    nodes[n][0] = length;
    let elements = (0..n)
        .map(|i| MeshElement {
            shape: ElementShape::Interval,
            nodes: vec![i as u32, i as u32 + 1],
        })
        .collect();
    let mut boundary = BTreeMap::new();
    boundary.insert("symmetry".to_string(), vec![Facet { element: 0, edge: 0 }]);
    boundary.insert(
        "surface".to_string(),
        vec![Facet { element: n as u32 - 1, edge: 1 }],
    );
    let mesh = Mesh { dim: 1, nodes, elements, boundary };
    mesh.validate()?;
    Ok(mesh)
}

/// Refinement level for [`build_boundary_layer_mesh`]; the characteristic
/// crack-tip element size is `0.08 * tip_opening / 2^(level-1)`.
pub const DEFAULT_REFINEMENT: u32 = 2;

/// Builds the half-symmetric crack-tip boundary-layer mesh: a blunted notch
/// of initial diameter `tip_opening` (radius b0/2 around the origin),
/// spider-web quadrilaterals with geometric radial grading out to
/// `outer_radius`, and the two rings nearest the tip split into triangles.
///
/// Boundary tags: `crack-tip` (notch arc), `crack-wall` (the flank at
/// theta = pi), `symmetry` (the ligament at theta = 0) and `remote` (the
/// outer arc where boundary-layer displacements are applied).
pub fn build_boundary_layer_mesh(
    outer_radius: f64,
    tip_opening: f64,
    refinement: u32,
) -> Result<Mesh> {
    if tip_opening <= 0.0 {
        return Err(Error::Mesh("tip opening must be positive".into()));
    }
    if refinement < 1 {
        return Err(Error::Mesh("refinement level must be >= 1".into()));
    }
    let r0 = tip_opening / 2.0;
    if outer_radius < 1e3 * tip_opening {
        return Err(Error::Mesh(
            "outer radius must be at least 1000x the tip opening".into(),
        ));
    }

    let target = 0.08 * tip_opening / 2f64.powi(refinement as i32 - 1);
    let n_theta = ((std::f64::consts::PI * r0 / target).ceil() as usize).max(8);
    let growth = 1.18;

    // radial stations, geometric growth from the notch
    let mut radii = vec![r0];
    let mut dr = target;
    let mut r = r0;
    loop {
        let remaining = outer_radius - r;
        if remaining <= dr * 1.5 {
            radii.push(outer_radius);
            break;
        }
        r += dr;
        radii.push(r);
        dr *= growth;
    }
    let n_r = radii.len() - 1; // rings
    let n_t = n_theta; // angular sectors

    // nodes on the polar grid, theta in [0, pi]
    let mut nodes = Vec::with_capacity((n_r + 1) * (n_t + 1));
    for &ri in &radii {
        for k in 0..=n_t {
            let theta = std::f64::consts::PI * k as f64 / n_t as f64;
            nodes.push([ri * theta.cos(), ri * theta.sin()]);
        }
    }
    let node_id = |ring: usize, k: usize| (ring * (n_t + 1) + k) as u32;

    // Each sector quad has CCW corners a (inner, theta_k), d (outer, theta_k),
    // c (outer, theta_{k+1}), b (inner, theta_{k+1}). Rings near the tip are
    // split into the CCW triangles (a, d, c) and (a, c, b).
    let tri_rings = 2.min(n_r);
    let mut elements = Vec::new();
    let mut first_elem_of_ring = Vec::with_capacity(n_r);
    for ring in 0..n_r {
        first_elem_of_ring.push(elements.len());
        for k in 0..n_t {
            let a = node_id(ring, k);
            let b = node_id(ring, k + 1);
            let c = node_id(ring + 1, k + 1);
            let d = node_id(ring + 1, k);
            if ring < tri_rings {
                elements.push(MeshElement {
                    shape: ElementShape::Triangle,
                    nodes: vec![a, d, c],
                });
                elements.push(MeshElement {
                    shape: ElementShape::Triangle,
                    nodes: vec![a, c, b],
                });
            } else {
                elements.push(MeshElement {
                    shape: ElementShape::Quad,
                    nodes: vec![a, d, c, b],
                });
            }
        }
    }
    let is_tri_ring = |ring: usize| ring < tri_rings;

    let mut boundary: BTreeMap<String, Vec<Facet>> = BTreeMap::new();
    // crack tip: inner arc of ring 0, edge b -> a of the second triangle
    let tip = (0..n_t)
        .map(|k| {
            if is_tri_ring(0) {
                Facet { element: (first_elem_of_ring[0] + 2 * k + 1) as u32, edge: 2 }
            } else {
                Facet { element: (first_elem_of_ring[0] + k) as u32, edge: 3 }
            }
        })
        .collect();
    boundary.insert("crack-tip".to_string(), tip);

    // symmetry plane (theta = 0, k = 0) and crack wall (theta = pi, k = n_t-1)
    let mut sym = Vec::new();
    let mut wall = Vec::new();
    for ring in 0..n_r {
        let base = first_elem_of_ring[ring];
        if is_tri_ring(ring) {
            sym.push(Facet { element: base as u32, edge: 0 }); // a -> d on tri (a,d,c)
            wall.push(Facet { element: (base + 2 * (n_t - 1) + 1) as u32, edge: 1 }); // c -> b
        } else {
            sym.push(Facet { element: base as u32, edge: 0 }); // a -> d
            wall.push(Facet { element: (base + n_t - 1) as u32, edge: 2 }); // c -> b
        }
    }
    boundary.insert("symmetry".to_string(), sym);
    boundary.insert("crack-wall".to_string(), wall);

    // remote arc: outer edge of the last ring
    let base = first_elem_of_ring[n_r - 1];
    let remote = (0..n_t)
        .map(|k| {
            if is_tri_ring(n_r - 1) {
                Facet { element: (base + 2 * k) as u32, edge: 1 } // d -> c on tri (a,d,c)
            } else {
                Facet { element: (base + k) as u32, edge: 1 } // d -> c
            }
        })
        .collect();
    boundary.insert("remote".to_string(), remote);

    let mesh = Mesh { dim: 2, nodes, elements, boundary };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_interval_bisection() {
        let m = build_interval_mesh(1.0, 2, 1.0).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.nodes[0][0], 0.0);
        assert_relative_eq!(m.nodes[1][0], 0.5, max_relative = 1e-14);
        assert_eq!(m.nodes[2][0], 1.0);
    }

    #[test]
    fn interval_grading_ratio() {
        let m = build_interval_mesh(1.0, 4, 8.0).unwrap();
        let h = |i: usize| m.nodes[i + 1][0] - m.nodes[i][0];
        assert_relative_eq!(h(3) / h(0), 8.0, max_relative = 1e-12);
    }

    #[test]
    fn interval_fine_near_surface_for_grading_below_one() {
        let m = build_interval_mesh(2e-3, 1000, 0.02).unwrap();
        assert_eq!(m.n_elements(), 1000);
        let first = m.nodes[1][0] - m.nodes[0][0];
        let last = m.nodes[1000][0] - m.nodes[999][0];
        assert!(last < first, "finest elements must sit at the surface end");
        assert_relative_eq!(m.nodes[1000][0], 2e-3, max_relative = 1e-12);
    }

    #[test]
    fn boundary_layer_tip_facet_size() {
        let m = build_boundary_layer_mesh(0.15, 10e-6, DEFAULT_REFINEMENT).unwrap();
        let mut min_len = f64::INFINITY;
        for f in m.facets("crack-tip").unwrap() {
            let el = &m.elements[f.element as usize];
            let (a, b) = el.shape.edges()[f.edge as usize];
            let pa = m.nodes[el.nodes[a] as usize];
            let pb = m.nodes[el.nodes[b] as usize];
            let len = ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt();
            min_len = min_len.min(len);
        }
        assert!(
            (0.2e-6..=0.8e-6).contains(&min_len),
            "tip facet length {min_len:.3e} outside [0.2, 0.8] um"
        );
    }

    #[test]
    fn boundary_layer_refinement_halves_tip_size() {
        // measure the tip facet as arc length so chord shortening does not
        // obscure the exact geometric halving of the angular division
        let tip_size = |level| {
            let m = build_boundary_layer_mesh(1.0, 1e-3, level).unwrap();
            let f = m.facets("crack-tip").unwrap()[0];
            let el = &m.elements[f.element as usize];
            let (a, b) = el.shape.edges()[f.edge as usize];
            let pa = m.nodes[el.nodes[a] as usize];
            let pb = m.nodes[el.nodes[b] as usize];
            let r0 = 0.5e-3;
            r0 * (pa[1].atan2(pa[0]) - pb[1].atan2(pb[0])).abs()
        };
        assert!(tip_size(2) <= 0.5 * tip_size(1) * (1.0 + 1e-12));
    }

    #[test]
    fn boundary_layer_is_valid_and_tagged() {
        let m = build_boundary_layer_mesh(0.15, 10e-6, 1).unwrap();
        m.validate().unwrap();
        for tag in ["crack-tip", "crack-wall", "symmetry", "remote"] {
            assert!(!m.facets(tag).unwrap().is_empty());
        }
        // symmetry nodes sit on y = 0, remote nodes on r = R
        for n in m.boundary_nodes("symmetry").unwrap() {
            assert!(m.nodes[n as usize][1].abs() < 1e-12 * 0.15);
        }
        for n in m.boundary_nodes("remote").unwrap() {
            let p = m.nodes[n as usize];
            assert_relative_eq!((p[0].powi(2) + p[1].powi(2)).sqrt(), 0.15, max_relative = 1e-12);
        }
    }

    #[test]
    fn degenerate_geometry_rejected() {
        assert!(build_boundary_layer_mesh(0.15, 0.0, 1).is_err());
        assert!(build_boundary_layer_mesh(0.15, -1.0, 1).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let m = build_boundary_layer_mesh(0.15, 10e-6, 1).unwrap();
        let text = m.to_text();
        let m2 = Mesh::from_text(&text).unwrap();
        assert_eq!(m, m2);
        // deterministic ordering
        assert_eq!(text, m2.to_text());
    }
}
