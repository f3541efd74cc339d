//! Per-field degree-of-freedom maps supporting mixed interpolation orders on
//! a shared geometric mesh (e.g. quadratic displacements with linear
//! concentration). Field nodes beyond the mesh vertices (edge and interior
//! nodes) are generated here with a canonical global numbering.

use std::collections::HashMap;

use super::element::{ElementFamily, ElementShape};
use super::geometry::Geometry;
use super::mesh::Mesh;
use crate::{Error, Result};

/// Specification of one solution field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: String,
    pub order: u8,
    pub components: u8,
}

impl FieldSpec {
    pub fn scalar(name: &str, order: u8) -> Self {
        FieldSpec { name: name.to_string(), order, components: 1 }
    }

    pub fn vector(name: &str, order: u8, components: u8) -> Self {
        FieldSpec { name: name.to_string(), order, components }
    }
}

/// Layout of one field: its family per element shape, its node set and the
/// element connectivity in field-node numbering.
#[derive(Debug, Clone)]
pub struct FieldLayout {
    pub spec: FieldSpec,
    /// First global equation of this field.
    pub offset: usize,
    /// Coordinates of every field node.
    pub coords: Vec<[f64; 2]>,
    /// Per element: field-node ids in local layout order.
    pub elem_nodes: Vec<Vec<u32>>,
}

impl FieldLayout {
    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.coords.len() * self.spec.components as usize
    }

    /// Global equation index of (node, component).
    pub fn dof(&self, node: usize, comp: usize) -> usize {
        self.offset + node * self.spec.components as usize + comp
    }

    pub fn family(&self, shape: ElementShape) -> ElementFamily {
        ElementFamily { shape, order: self.spec.order }
    }

    /// Field nodes lying on the given local edge of an element, ordered
    /// along the edge.
    pub fn edge_nodes(&self, mesh: &Mesh, elem: usize, edge: usize) -> Vec<u32> {
        let shape = mesh.elements[elem].shape;
        if shape == ElementShape::Interval {
            let (a, _) = shape.edges()[edge];
            return vec![self.elem_nodes[elem][a]];
        }
        let fam = self.family(shape);
        fam.edge_local_nodes(edge)
            .iter()
            .map(|&l| self.elem_nodes[elem][l])
            .collect()
    }
}

/// Equation numbering for a set of fields over one mesh. Fields are stacked
/// in declaration order; within a field, dofs are node-major.
#[derive(Debug, Clone)]
pub struct DofMap {
    fields: Vec<FieldLayout>,
    n_dofs: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, specs: &[FieldSpec]) -> Result<Self> {
        let mut fields = Vec::with_capacity(specs.len());
        let mut offset = 0usize;
        for spec in specs {
            if !(1..=3).contains(&spec.order) {
                return Err(Error::DofMap(format!(
                    "field `{}`: unsupported order {}",
                    spec.name, spec.order
                )));
            }
            let layout = build_layout(mesh, spec, offset)?;
            offset += layout.n_dofs();
            fields.push(layout);
        }
        Ok(DofMap { fields, n_dofs: offset })
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn field(&self, idx: usize) -> &FieldLayout {
        &self.fields[idx]
    }

    pub fn field_by_name(&self, name: &str) -> Result<&FieldLayout> {
        self.fields
            .iter()
            .find(|f| f.spec.name == name)
            .ok_or_else(|| Error::DofMap(format!("unknown field `{name}`")))
    }

    /// Field node ids on a tagged boundary, sorted and deduplicated.
    pub fn boundary_field_nodes(&self, mesh: &Mesh, field: usize, tag: &str) -> Result<Vec<u32>> {
        let layout = &self.fields[field];
        let mut out = Vec::new();
        for f in mesh.facets(tag)? {
            out.extend(layout.edge_nodes(mesh, f.element as usize, f.edge as usize));
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

fn build_layout(mesh: &Mesh, spec: &FieldSpec, offset: usize) -> Result<FieldLayout> {
    let p = spec.order as usize;
    // vertex field-nodes keep the mesh numbering; edge/interior nodes follow
    let mut coords: Vec<[f64; 2]> = mesh.nodes.clone();
    // (min corner, max corner, slot) -> field node
    let mut edge_map: HashMap<(u32, u32, usize), u32> = HashMap::new();
    let mut elem_nodes = Vec::with_capacity(mesh.n_elements());

    for (e, el) in mesh.elements.iter().enumerate() {
        let fam = ElementFamily::new(el.shape, spec.order)?;
        let geo = Geometry::of(mesh, e);
        let ref_nodes = fam.ref_nodes();
        let mut locals = vec![u32::MAX; fam.node_count()];

        // corners
        for (k, &mesh_node) in el.nodes.iter().enumerate() {
            locals[k] = mesh_node;
        }

        // edge interior nodes (2D shapes, order >= 2)
        if el.shape != ElementShape::Interval && p >= 2 {
            let nc = el.shape.corner_count();
            for (edge, &(a, b)) in el.shape.edges().iter().enumerate() {
                let (na, nb) = (el.nodes[a], el.nodes[b]);
                for slot in 0..p - 1 {
                    let local = nc + edge * (p - 1) + slot;
                    // canonical slot indexed from the lower-numbered corner
                    let key = if na < nb {
                        (na, nb, slot)
                    } else {
                        (nb, na, p - 2 - slot)
                    };
                    let id = *edge_map.entry(key).or_insert_with(|| {
                        let id = coords.len() as u32;
                        coords.push(geo.map(ref_nodes[local]));
                        id
                    });
                    locals[local] = id;
                }
            }
        }

        // remaining nodes (interval interiors and cell interiors) are private
        for (local, &xi) in ref_nodes.iter().enumerate() {
            if locals[local] == u32::MAX {
                locals[local] = coords.len() as u32;
                coords.push(geo.map(xi));
            }
        }
        elem_nodes.push(locals);
    }

    Ok(FieldLayout { spec: spec.clone(), offset, coords, elem_nodes })
}
