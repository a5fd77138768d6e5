use super::lattice::{local_coords, FfdLattice, LatticeBounds};
use super::Vec3;
use crate::error::{Error, Result};
use crate::par;

/// Triangle mesh with an optional per-vertex design-surface tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    surface_tag: Option<Vec<bool>>,
}

impl Mesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, surface_tag: Option<Vec<bool>>) -> Result<Self> {
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        for (f, t) in triangles.iter().enumerate() {
            if let Some(&bad) = t.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {f} references vertex {bad} of {}",
                    vertices.len()
                )));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::InvalidMesh(format!("triangle {f} repeats a vertex: {t:?}")));
            }
        }
        if let Some(tag) = &surface_tag {
            if tag.len() != vertices.len() {
                return Err(Error::InvalidMesh(format!(
                    "surface tag has {} entries for {} vertices",
                    tag.len(),
                    vertices.len()
                )));
            }
        }
        Ok(Self {
            vertices,
            triangles,
            surface_tag,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn surface_tag(&self) -> Option<&[bool]> {
        self.surface_tag.as_deref()
    }

    pub fn with_surface_tag(mut self, tag: Vec<bool>) -> Result<Self> {
        if tag.len() != self.vertices.len() {
            return Err(Error::InvalidMesh("surface tag length mismatch".into()));
        }
        self.surface_tag = Some(tag);
        Ok(self)
    }

    /// Indices of design-surface vertices.
    pub fn tagged_vertices(&self) -> Vec<usize> {
        match &self.surface_tag {
            Some(tag) => tag.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| i).collect(),
            None => Vec::new(),
        }
    }

    /// Same connectivity and tags, new positions.
    pub(crate) fn with_vertices(&self, vertices: Vec<Vec3>) -> Self {
        debug_assert_eq!(vertices.len(), self.vertices.len());
        Self {
            vertices,
            triangles: self.triangles.clone(),
            surface_tag: self.surface_tag.clone(),
        }
    }

    /// Largest Euclidean distance between corresponding vertices.
    pub fn max_vertex_distance(&self, other: &Mesh) -> f64 {
        self.vertices
            .iter()
            .zip(&other.vertices)
            .map(|(a, b)| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())
            .fold(0.0, f64::max)
    }
}

/// A mesh together with the cached local coordinates of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedMesh {
    reference: Mesh,
    bounds: LatticeBounds,
    local: Vec<Option<Vec3>>,
}

impl EmbeddedMesh {
    pub fn reference(&self) -> &Mesh {
        &self.reference
    }

    pub fn bounds(&self) -> &LatticeBounds {
        &self.bounds
    }

    pub fn local(&self) -> &[Option<Vec3>] {
        &self.local
    }

    pub fn is_inside(&self, vertex: usize) -> bool {
        self.local[vertex].is_some()
    }

    pub fn inside_count(&self) -> usize {
        self.local.iter().filter(|l| l.is_some()).count()
    }
}

pub fn embed_mesh(mesh: &Mesh, bounds: &LatticeBounds) -> EmbeddedMesh {
    let local = par::map_indexed(mesh.vertices(), |_, &v| local_coords(v, bounds));
    EmbeddedMesh {
        reference: mesh.clone(),
        bounds: *bounds,
        local,
    }
}

fn check_bounds(embedded: &EmbeddedMesh, lattice: &FfdLattice) -> Result<()> {
    if embedded.bounds != *lattice.bounds() {
        return Err(Error::BoundsMismatch);
    }
    Ok(())
}

fn displaced(vertex: &Vec3, local: &Option<Vec3>, lattice: &FfdLattice) -> Vec3 {
    match local {
        None => *vertex,
        Some(l) => {
            let d = lattice.displacement_at(*l);
            // a zero shift keeps the sign of a -0.0 coordinate
            let shift = |c: usize| if d[c] == 0.0 { vertex[c] } else { vertex[c] + d[c] };
            [shift(0), shift(1), shift(2)]
        }
    }
}

/// Moves every inside vertex by the lattice displacement field.
///
/// Runs over vertices in parallel when the `parallel` feature is enabled.
pub fn apply_deformation(embedded: &EmbeddedMesh, lattice: &FfdLattice) -> Result<Mesh> {
    check_bounds(embedded, lattice)?;
    let verts = par::map_indexed(embedded.reference.vertices(), |i, v| {
        displaced(v, &embedded.local[i], lattice)
    });
    Ok(embedded.reference.with_vertices(verts))
}

/// Single-threaded [`apply_deformation`].
pub fn apply_deformation_seq(embedded: &EmbeddedMesh, lattice: &FfdLattice) -> Result<Mesh> {
    check_bounds(embedded, lattice)?;
    let verts = par::map_indexed_seq(embedded.reference.vertices(), |i, v| {
        displaced(v, &embedded.local[i], lattice)
    });
    Ok(embedded.reference.with_vertices(verts))
}

/// Rayon-parallel [`apply_deformation`].
#[cfg(feature = "parallel")]
pub fn apply_deformation_par(embedded: &EmbeddedMesh, lattice: &FfdLattice) -> Result<Mesh> {
    check_bounds(embedded, lattice)?;
    let verts = par::map_indexed_par(embedded.reference.vertices(), |i, v| {
        displaced(v, &embedded.local[i], lattice)
    });
    Ok(embedded.reference.with_vertices(verts))
}

/// Output of [`rebaseline`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rebaselined {
    pub embedded: EmbeddedMesh,
    pub lattice: FfdLattice,
    /// Vertices that were inside before and left the bounds during deformation.
    pub escaped: usize,
}

/// Absorbs the current deformation into the reference mesh and resets the
/// lattice to zero displacements over the same bounds and degrees.
///
/// Vertices that left the box are marked outside and stay fixed afterwards.
pub fn rebaseline(embedded: &EmbeddedMesh, lattice: &FfdLattice) -> Result<Rebaselined> {
    let deformed = apply_deformation(embedded, lattice)?;
    let next = embed_mesh(&deformed, &embedded.bounds);
    let escaped = embedded
        .local
        .iter()
        .zip(&next.local)
        .filter(|(before, after)| before.is_some() && after.is_none())
        .count();
    Ok(Rebaselined {
        embedded: next,
        lattice: lattice.zeroed(),
        escaped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_mesh() -> Mesh {
        let mut v = Vec::new();
        for i in 0..5 {
            for j in 0..4 {
                v.push([i as f64 * 0.25, j as f64 / 3.0, 0.5 + 0.1 * (i as f64).sin()]);
            }
        }
        let mut t = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                let a = i * 4 + j;
                t.push([a, a + 4, a + 1]);
                t.push([a + 1, a + 4, a + 5]);
            }
        }
        Mesh::new(v, t, None).unwrap()
    }

    #[test]
    fn mesh_validation() {
        assert!(Mesh::new(vec![[0.0; 3]; 3], vec![[0, 1, 3]], None).is_err());
        assert!(Mesh::new(vec![[0.0; 3]; 3], vec![[0, 1, 1]], None).is_err());
        assert!(Mesh::new(vec![[0.0; 3]; 3], vec![[0, 1, 2]], Some(vec![true])).is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let mesh = grid_mesh();
        let bounds = LatticeBounds::new([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]).unwrap();
        let e = embed_mesh(&mesh, &bounds);
        assert_eq!(e.inside_count(), mesh.vertices().len());
        for (v, l) in mesh.vertices().iter().zip(e.local()) {
            let back = bounds.from_local(l.unwrap());
            for a in 0..3 {
                assert!((back[a] - v[a]).abs() <= 1e-12 * bounds.span()[a]);
            }
        }
    }

    #[test]
    fn outside_mesh_is_never_moved() {
        let mesh = grid_mesh();
        let bounds = LatticeBounds::new([5.0; 3], [6.0; 3]).unwrap();
        let e = embed_mesh(&mesh, &bounds);
        assert_eq!(e.inside_count(), 0);
        let lattice = FfdLattice::with_displacements(bounds, [1, 1, 1], vec![[1.0, 2.0, 3.0]; 8]).unwrap();
        assert_eq!(apply_deformation(&e, &lattice).unwrap(), mesh);
    }

    #[test]
    fn bounds_mismatch_rejected() {
        let mesh = grid_mesh();
        let e = embed_mesh(&mesh, &LatticeBounds::unit());
        let other = LatticeBounds::new([0.0; 3], [1.0, 1.0, 2.0]).unwrap();
        let lattice = FfdLattice::zeros(other, [1, 1, 1]).unwrap();
        assert_eq!(apply_deformation(&e, &lattice), Err(Error::BoundsMismatch));
        assert_eq!(rebaseline(&e, &lattice).map(|_| ()), Err(Error::BoundsMismatch));
    }

    #[test]
    fn uniform_displacement_translates() {
        let mesh = grid_mesh();
        let e = embed_mesh(&mesh, &LatticeBounds::unit());
        let lattice = FfdLattice::with_displacements(LatticeBounds::unit(), [2, 1, 1], vec![[0.0, 0.0, 0.05]; 12]).unwrap();
        let out = apply_deformation(&e, &lattice).unwrap();
        for (a, b) in out.vertices().iter().zip(mesh.vertices()) {
            assert_eq!((a[0], a[1]), (b[0], b[1]));
            assert!((a[2] - b[2] - 0.05).abs() < 1e-15);
        }
        assert_eq!(out.triangles(), mesh.triangles());
    }

    #[test]
    fn escaping_vertices_are_flagged() {
        let mesh = grid_mesh();
        let e = embed_mesh(&mesh, &LatticeBounds::unit());
        let lattice = FfdLattice::with_displacements(LatticeBounds::unit(), [1, 1, 1], vec![[0.0, 0.0, 2.0]; 8]).unwrap();
        let r = rebaseline(&e, &lattice).unwrap();
        assert_eq!(r.escaped, mesh.vertices().len());
        assert_eq!(r.embedded.inside_count(), 0);
        assert!(r.lattice.is_zero());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_sequential() {
        let mesh = grid_mesh();
        let e = embed_mesh(&mesh, &LatticeBounds::unit());
        let mut lattice = FfdLattice::zeros(LatticeBounds::unit(), [3, 2, 1]).unwrap();
        for (n, d) in lattice.displacements_mut().iter_mut().enumerate() {
            *d = [0.01 * n as f64, -0.02, 0.003 * (n as f64).cos()];
        }
        assert_eq!(apply_deformation_par(&e, &lattice).unwrap(), apply_deformation_seq(&e, &lattice).unwrap());
    }
}
