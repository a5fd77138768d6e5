//! A rectangular NACA 0012 wing surface and seeded surface-fit targets.
//!
//! The upper surface carries the design tag. Upper and lower surfaces share
//! horizontal projections, so only one of them can be matched by nearest
//! horizontal projection.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ffd::{apply_deformation, embed_mesh, DofMap, FreezeSpec, LatticeBounds, Mesh};
use crate::objectives::SurfaceTarget;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingSpec {
    pub chord: f64,
    pub span: f64,
    /// Maximum thickness as a fraction of chord.
    pub thickness: f64,
    pub chord_stations: usize,
    pub span_stations: usize,
}

impl Default for WingSpec {
    fn default() -> Self {
        Self {
            chord: 1.0,
            span: 2.0,
            thickness: 0.12,
            chord_stations: 41,
            span_stations: 9,
        }
    }
}

impl WingSpec {
    /// Half-thickness of the symmetric four-digit section with a closed trailing edge.
    pub fn half_thickness(&self, x: f64) -> f64 {
        let u = (x / self.chord).clamp(0.0, 1.0);
        5.0 * self.thickness
            * self.chord
            * (0.2969 * u.sqrt() - 0.1260 * u - 0.3516 * u * u + 0.2843 * u.powi(3) - 0.1036 * u.powi(4))
    }

    /// Lattice fitted to the planform with vertical room of one chord-thickness each side.
    pub fn lattice_bounds(&self) -> LatticeBounds {
        let h = self.thickness * self.chord;
        LatticeBounds::new([0.0, 0.0, -h], [self.chord, self.span, h]).expect("positive wing dimensions")
    }

    /// Triangulated upper and lower surfaces with shared leading and trailing edges.
    pub fn mesh(&self) -> Mesh {
        let nc = self.chord_stations.max(3);
        let ns = self.span_stations.max(2);
        let xs: Vec<f64> = (0..nc)
            .map(|s| 0.5 * self.chord * (1.0 - (std::f64::consts::PI * s as f64 / (nc - 1) as f64).cos()))
            .collect();
        let ys: Vec<f64> = (0..ns).map(|r| self.span * r as f64 / (ns - 1) as f64).collect();
        let mut vertices = Vec::new();
        let mut tag = Vec::new();
        // upper[r][s] and lower[r][s]; lower shares the first and last station
        let mut upper = vec![vec![0usize; nc]; ns];
        let mut lower = vec![vec![0usize; nc]; ns];
        for (r, &y) in ys.iter().enumerate() {
            for (s, &x) in xs.iter().enumerate() {
                let z = if s == 0 || s == nc - 1 { 0.0 } else { self.half_thickness(x) };
                upper[r][s] = vertices.len();
                vertices.push([x, y, z]);
                tag.push(true);
            }
            for (s, &x) in xs.iter().enumerate() {
                if s == 0 || s == nc - 1 {
                    lower[r][s] = upper[r][s];
                } else {
                    lower[r][s] = vertices.len();
                    vertices.push([x, y, -self.half_thickness(x)]);
                    tag.push(false);
                }
            }
        }
        let mut triangles = Vec::new();
        for r in 0..ns - 1 {
            for s in 0..nc - 1 {
                let (a, b, c, d) = (upper[r][s], upper[r][s + 1], upper[r + 1][s], upper[r + 1][s + 1]);
                triangles.push([a, b, d]);
                triangles.push([a, d, c]);
                let (a, b, c, d) = (lower[r][s], lower[r][s + 1], lower[r + 1][s], lower[r + 1][s + 1]);
                triangles.push([a, d, b]);
                triangles.push([a, c, d]);
            }
        }
        Mesh::new(vertices, triangles, Some(tag)).expect("generated wing mesh is valid")
    }
}

/// How a seeded target is generated: random vertical displacements of a finer
/// lattice with the default freezing, applied to the wing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub degrees: [usize; 3],
    /// Displacements are drawn uniformly from `[-amplitude, amplitude]`.
    pub amplitude: f64,
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self {
            degrees: [3, 1, 1],
            amplitude: 0.05,
        }
    }
}

/// Deforms `mesh` with a seeded random lattice and samples its design surface.
pub fn seeded_target(
    mesh: &Mesh,
    bounds: LatticeBounds,
    spec: TargetSpec,
    seed: u64,
) -> Result<(SurfaceTarget, Mesh)> {
    let dofs = DofMap::new(spec.degrees, &FreezeSpec::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design: Vec<f64> = (0..dofs.len())
        .map(|_| rng.random_range(-spec.amplitude..=spec.amplitude))
        .collect();
    let lattice = dofs.decode(&design, bounds)?;
    let deformed = apply_deformation(&embed_mesh(mesh, &bounds), &lattice)?;
    let target = SurfaceTarget::from_mesh(&deformed, dofs.motion())?;
    Ok((target, deformed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_is_closed_and_twelve_percent_thick() {
        let w = WingSpec::default();
        assert_eq!(w.half_thickness(0.0), 0.0);
        assert!(w.half_thickness(1.0).abs() < 1e-12);
        let max = (0..1000).map(|i| w.half_thickness(i as f64 / 999.0)).fold(0.0, f64::max);
        assert!((2.0 * max - 0.12).abs() < 1e-3);
    }

    #[test]
    fn wing_mesh_is_inside_its_lattice() {
        let w = WingSpec::default();
        let mesh = w.mesh();
        let e = embed_mesh(&mesh, &w.lattice_bounds());
        assert_eq!(e.inside_count(), mesh.vertices().len());
        let tagged = mesh.tagged_vertices().len();
        assert_eq!(tagged, w.chord_stations * w.span_stations);
    }

    #[test]
    fn seeded_targets_are_reproducible() {
        let w = WingSpec::default();
        let mesh = w.mesh();
        let (a, _) = seeded_target(&mesh, w.lattice_bounds(), TargetSpec::default(), 7).unwrap();
        let (b, _) = seeded_target(&mesh, w.lattice_bounds(), TargetSpec::default(), 7).unwrap();
        let (c, _) = seeded_target(&mesh, w.lattice_bounds(), TargetSpec::default(), 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
