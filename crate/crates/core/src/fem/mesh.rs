use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangulated plane-strain specimen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub nodes: Vec<[f64; 2]>,
    /// Counter-clockwise linear triangles.
    pub elements: Vec<[usize; 3]>,
    /// Named node sets, e.g. `bottom` and `top`.
    pub sets: BTreeMap<String, Vec<usize>>,
}

/// Circular hole `(cx, cy, radius)`.
pub type Hole = (f64, f64, f64);

impl Mesh2D {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn set(&self, name: &str) -> Result<&[usize]> {
        self.sets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidArgument(format!("mesh has no node set `{name}`")))
    }

    /// Signed area of element `e`.
    pub fn area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e].map(|n| self.nodes[n]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Reference shape-function gradients `∂N_a/∂X` of element `e`.
    pub fn shape_gradients(&self, e: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.elements[e].map(|n| self.nodes[n]);
        let two_a = 2.0 * self.area(e);
        [
            [(b[1] - c[1]) / two_a, (c[0] - b[0]) / two_a],
            [(c[1] - a[1]) / two_a, (a[0] - c[0]) / two_a],
            [(a[1] - b[1]) / two_a, (b[0] - a[0]) / two_a],
        ]
    }

    /// Lumped nodal areas (one third of each adjacent element).
    pub fn tributary_areas(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_nodes()];
        for (e, el) in self.elements.iter().enumerate() {
            let a = self.area(e) / 3.0;
            for &n in el {
                w[n] += a;
            }
        }
        w
    }

    /// Edges with their multiplicity (1 for boundary edges).
    pub fn edges(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for el in &self.elements {
            for k in 0..3 {
                let (a, b) = (el[k], el[(k + 1) % 3]);
                *out.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        self.edges().into_iter().filter(|&(_, m)| m == 1).map(|(e, _)| e).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (e, el) in self.elements.iter().enumerate() {
            if el.iter().any(|&n| n >= self.n_nodes()) {
                return Err(Error::Structure(format!("element {e} references a missing node")));
            }
            if !(self.area(e) > 0.0) {
                return Err(Error::Structure(format!("element {e} has non-positive area {}", self.area(e))));
            }
        }
        for (name, nodes) in &self.sets {
            if nodes.iter().any(|&n| n >= self.n_nodes()) {
                return Err(Error::Structure(format!("node set `{name}` references a missing node")));
            }
        }
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mesh: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Legacy ASCII VTK with optional nodal vector fields (2 values per node).
    pub fn write_vtk<W: Write>(&self, out: &mut W, fields: &[(&str, &[f64])]) -> Result<()> {
        writeln!(out, "# vtk DataFile Version 3.0\nhyperdisc mesh\nASCII\nDATASET UNSTRUCTURED_GRID")?;
        writeln!(out, "POINTS {} double", self.n_nodes())?;
        for p in &self.nodes {
            writeln!(out, "{} {} 0", p[0], p[1])?;
        }
        writeln!(out, "CELLS {} {}", self.elements.len(), 4 * self.elements.len())?;
        for el in &self.elements {
            writeln!(out, "3 {} {} {}", el[0], el[1], el[2])?;
        }
        writeln!(out, "CELL_TYPES {}", self.elements.len())?;
        for _ in &self.elements {
            writeln!(out, "5")?;
        }
        if !fields.is_empty() {
            writeln!(out, "POINT_DATA {}", self.n_nodes())?;
        }
        for (name, v) in fields {
            if v.len() != self.n_dofs() {
                return Err(Error::InvalidArgument(format!("field `{name}` has {} values", v.len())));
            }
            writeln!(out, "VECTORS {name} double")?;
            for n in 0..self.n_nodes() {
                writeln!(out, "{} {} 0", v[2 * n], v[2 * n + 1])?;
            }
        }
        Ok(())
    }
}

/// Structured triangulation of `[0, width] × [0, height]` with `nx × ny`
/// cells, each split along alternating diagonals. Node sets: `bottom`, `top`,
/// `left`, `right`.
pub fn plate(width: f64, height: f64, nx: usize, ny: usize) -> Result<Mesh2D> {
    if nx == 0 || ny == 0 || !(width > 0.0) || !(height > 0.0) {
        return Err(Error::InvalidArgument(format!("bad plate {width}x{height} with {nx}x{ny} cells")));
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([width * i as f64 / nx as f64, height * j as f64 / ny as f64]);
        }
    }
    let mut elements = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            } else {
                elements.push([a, b, d]);
                elements.push([b, c, d]);
            }
        }
    }
    let mut sets = BTreeMap::new();
    sets.insert("bottom".into(), (0..=nx).map(|i| id(i, 0)).collect());
    sets.insert("top".into(), (0..=nx).map(|i| id(i, ny)).collect());
    sets.insert("left".into(), (0..=ny).map(|j| id(0, j)).collect());
    sets.insert("right".into(), (0..=ny).map(|j| id(nx, j)).collect());
    Ok(Mesh2D { nodes, elements, sets })
}

/// Plate with circular holes: elements whose centroid lies inside a hole are
/// removed, nodes on the new boundary are pulled radially onto the circle
/// where that keeps every adjacent element well shaped, and unused nodes are
/// dropped.
pub fn plate_with_holes(width: f64, height: f64, nx: usize, ny: usize, holes: &[Hole]) -> Result<Mesh2D> {
    let base = plate(width, height, nx, ny)?;
    let inside = |p: [f64; 2]| holes.iter().any(|&(cx, cy, r)| (p[0] - cx).powi(2) + (p[1] - cy).powi(2) < r * r);
    let centroid = |el: &[usize; 3]| {
        let s = el.iter().fold([0.0, 0.0], |acc, &n| [acc[0] + base.nodes[n][0], acc[1] + base.nodes[n][1]]);
        [s[0] / 3.0, s[1] / 3.0]
    };
    let (kept, removed): (Vec<[usize; 3]>, Vec<[usize; 3]>) = base.elements.iter().partition(|el| !inside(centroid(el)));
    if kept.is_empty() {
        return Err(Error::InvalidArgument("holes remove every element".into()));
    }
    let mut mesh = Mesh2D { nodes: base.nodes.clone(), elements: kept, sets: base.sets.clone() };
    let mut on_hole: Vec<usize> = removed.iter().flatten().copied().collect();
    on_hole.sort_unstable();
    on_hole.dedup();
    let original_area: Vec<f64> = (0..mesh.elements.len()).map(|e| mesh.area(e)).collect();
    let mut adjacent: HashMap<usize, Vec<usize>> = HashMap::new();
    for (e, el) in mesh.elements.iter().enumerate() {
        for &n in el {
            adjacent.entry(n).or_default().push(e);
        }
    }
    for n in on_hole {
        let p = mesh.nodes[n];
        let Some(&(cx, cy, r)) = holes
            .iter()
            .min_by(|a, b| {
                let da = ((p[0] - a.0).hypot(p[1] - a.1) - a.2).abs();
                let db = ((p[0] - b.0).hypot(p[1] - b.1) - b.2).abs();
                da.total_cmp(&db)
            })
        else {
            continue;
        };
        let d = (p[0] - cx).hypot(p[1] - cy);
        if d == 0.0 {
            continue;
        }
        let target = [cx + (p[0] - cx) * r / d, cy + (p[1] - cy) * r / d];
        let on_edge = target[0] < 0.0 || target[0] > width || target[1] < 0.0 || target[1] > height;
        if on_edge {
            continue;
        }
        mesh.nodes[n] = target;
        let ok = adjacent
            .get(&n)
            .is_none_or(|es| es.iter().all(|&e| mesh.area(e) > 0.25 * original_area[e]));
        if !ok {
            mesh.nodes[n] = p;
        }
    }
    compact(&mut mesh);
    mesh.validate()?;
    Ok(mesh)
}

/// Default desk-scale specimen: 3 × 5 plate, three holes of radius 0.4 on the
/// vertical centerline.
pub fn default_specimen() -> Mesh2D {
    let holes = [(1.5, 1.25, 0.4), (1.5, 2.5, 0.4), (1.5, 3.75, 0.4)];
    plate_with_holes(3.0, 5.0, 8, 14, &holes).expect("default specimen is valid")
}

fn compact(mesh: &mut Mesh2D) {
    let mut map = vec![usize::MAX; mesh.n_nodes()];
    let mut nodes = Vec::new();
    for el in &mesh.elements {
        for &n in el {
            if map[n] == usize::MAX {
                map[n] = usize::MAX - 1;
            }
        }
    }
    for (n, slot) in map.iter_mut().enumerate() {
        if *slot != usize::MAX {
            *slot = nodes.len();
            nodes.push(mesh.nodes[n]);
        }
    }
    for el in &mut mesh.elements {
        *el = el.map(|n| map[n]);
    }
    for set in mesh.sets.values_mut() {
        *set = set.iter().filter(|&&n| map[n] != usize::MAX).map(|&n| map[n]).collect();
    }
    mesh.nodes = nodes;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_plate_two_divisions() {
        let m = plate(1.0, 1.0, 2, 2).unwrap();
        assert_eq!(m.elements.len(), 8);
        assert_eq!(m.n_nodes(), 9);
        assert!((0..8).all(|e| m.area(e) > 0.0));
        let total: f64 = m.tributary_areas().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shape_gradients_sum_to_zero() {
        let m = default_specimen();
        for e in 0..m.elements.len() {
            let g = m.shape_gradients(e);
            for k in 0..2 {
                assert!((g[0][k] + g[1][k] + g[2][k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn default_specimen_size() {
        let m = default_specimen();
        m.validate().unwrap();
        assert!((150..=230).contains(&m.elements.len()), "{} elements", m.elements.len());
        assert_eq!(m.set("top").unwrap().len(), 9);
        assert_eq!(m.set("bottom").unwrap().len(), 9);
    }

    #[test]
    fn vtk_has_all_sections() {
        let m = plate(1.0, 1.0, 1, 1).unwrap();
        let u = vec![0.0; m.n_dofs()];
        let mut buf = Vec::new();
        m.write_vtk(&mut buf, &[("u", &u)]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("POINTS 4 double") && s.contains("CELLS 2 8") && s.contains("VECTORS u double"));
    }
}
