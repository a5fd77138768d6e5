//! Cost functions: the penalized drag/lift cost computed from supplied
//! coefficients, and geometric surface-fit objectives that stand in for a flow
//! solver.

use crate::error::{Error, Result};
use crate::ffd::{apply_deformation, Axis, DofMap, EmbeddedMesh, FfdLattice, LatticeBounds, Mesh, Vec3};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroCoefficients {
    pub lift: f64,
    pub drag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub weight: f64,
    pub lift_floor: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            weight: 1e4,
            lift_floor: 0.999,
        }
    }
}

/// `C_D / C_D0 + weight * max(0, lift_floor - C_L / C_L0)`.
pub fn penalized_cost(current: AeroCoefficients, baseline: AeroCoefficients, config: PenaltyConfig) -> f64 {
    current.drag / baseline.drag + config.weight * (config.lift_floor - current.lift / baseline.lift).max(0.0)
}

/// Target surface samples matched to mesh vertices by nearest horizontal projection.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceTarget {
    points: Vec<Vec3>,
    vertical: Axis,
}

impl SurfaceTarget {
    pub fn new(points: Vec<Vec3>, vertical: Axis) -> Result<Self> {
        if points.is_empty() || points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::EmptyTarget);
        }
        let target = Self { points, vertical };
        let (h0, h1) = target.horizontal_axes();
        let first = target.points[0];
        if target.points.iter().all(|p| p[h0] == first[h0] && p[h1] == first[h1]) && target.points.len() > 1 {
            return Err(Error::EmptyTarget);
        }
        Ok(target)
    }

    /// Samples the tagged vertices of a mesh.
    pub fn from_mesh(mesh: &Mesh, vertical: Axis) -> Result<Self> {
        let tagged = mesh.tagged_vertices();
        if tagged.is_empty() {
            return Err(Error::NoSurfaceTag);
        }
        Self::new(tagged.iter().map(|&i| mesh.vertices()[i]).collect(), vertical)
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn vertical(&self) -> Axis {
        self.vertical
    }

    fn horizontal_axes(&self) -> (usize, usize) {
        match self.vertical {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }

    /// Index of the sample nearest to `p` in the horizontal plane; ties go to the lowest index.
    pub fn nearest(&self, p: &Vec3) -> usize {
        let (h0, h1) = self.horizontal_axes();
        let mut best = (f64::INFINITY, 0);
        for (i, q) in self.points.iter().enumerate() {
            let d = (p[h0] - q[h0]).powi(2) + (p[h1] - q[h1]).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// Mean squared vertical distance from each tagged vertex to its matched target sample.
pub fn surface_mismatch(mesh: &Mesh, target: &SurfaceTarget) -> Result<f64> {
    let tagged = mesh.tagged_vertices();
    if tagged.is_empty() {
        return Err(Error::NoSurfaceTag);
    }
    let v = target.vertical.index();
    let verts = mesh.vertices();
    let sq = par::map_indexed(&tagged, |_, &i| {
        let p = &verts[i];
        let q = &target.points[target.nearest(p)];
        (p[v] - q[v]).powi(2)
    });
    Ok(sq.iter().sum::<f64>() / tagged.len() as f64)
}

/// Design-vector objective: decode, deform, compare against a target surface.
#[derive(Debug, Clone)]
pub struct WingFitProblem {
    embedded: EmbeddedMesh,
    bounds: LatticeBounds,
    dofs: DofMap,
    target: SurfaceTarget,
}

impl WingFitProblem {
    pub fn new(mesh: &Mesh, bounds: LatticeBounds, dofs: DofMap, target: SurfaceTarget) -> Result<Self> {
        if mesh.tagged_vertices().is_empty() {
            return Err(Error::NoSurfaceTag);
        }
        Ok(Self {
            embedded: crate::ffd::embed_mesh(mesh, &bounds),
            bounds,
            dofs,
            target,
        })
    }

    pub fn embedded(&self) -> &EmbeddedMesh {
        &self.embedded
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn target(&self) -> &SurfaceTarget {
        &self.target
    }

    pub fn bounds(&self) -> LatticeBounds {
        self.bounds
    }

    pub fn lattice(&self, design: &[f64]) -> Result<FfdLattice> {
        self.dofs.decode(design, self.bounds)
    }

    pub fn mesh_for(&self, design: &[f64]) -> Result<Mesh> {
        apply_deformation(&self.embedded, &self.lattice(design)?)
    }

    pub fn evaluate(&self, design: &[f64]) -> Result<f64> {
        surface_mismatch(&self.mesh_for(design)?, &self.target)
    }

    /// Mesh-level objective, as used by the adaptive driver.
    pub fn mesh_objective(&self) -> impl Fn(&Mesh) -> f64 + Sync + '_ {
        move |mesh| surface_mismatch(mesh, &self.target).unwrap_or(f64::INFINITY)
    }
}
