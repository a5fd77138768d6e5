use super::Vec3;
use crate::bernstein::{BernsteinBasis, MAX_DEGREE};
use crate::error::{Error, Result};

/// Inclusive tolerance, relative to the span, for inside tests.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Corners of the deformation region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeBounds {
    min: Vec3,
    max: Vec3,
}

impl LatticeBounds {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        for a in 0..3 {
            if !(min[a].is_finite() && max[a].is_finite()) {
                return Err(Error::InvalidLattice("non-finite bounds".into()));
            }
            if !(max[a] > min[a]) {
                return Err(Error::InvalidLattice(format!(
                    "max must exceed min on every axis (axis {a}: {} .. {})",
                    min[a], max[a]
                )));
            }
        }
        Ok(Self { min, max })
    }

    pub fn unit() -> Self {
        Self {
            min: [0.0; 3],
            max: [1.0; 3],
        }
    }

    pub fn min(&self) -> Vec3 {
        self.min
    }

    pub fn max(&self) -> Vec3 {
        self.max
    }

    pub fn span(&self) -> Vec3 {
        [
            self.max[0] - self.min[0],
            self.max[1] - self.min[1],
            self.max[2] - self.min[2],
        ]
    }

    /// Maps local coordinates back to space.
    pub fn from_local(&self, local: Vec3) -> Vec3 {
        let s = self.span();
        [
            self.min[0] + local[0] * s[0],
            self.min[1] + local[1] * s[1],
            self.min[2] + local[2] * s[2],
        ]
    }
}

/// `(ξ, η, ζ)` of `point`, or `None` when it lies outside the box.
///
/// Components within `1e-12` of the boundary (relative to the span) count as
/// inside and are clamped to `[0, 1]`.
pub fn local_coords(point: Vec3, bounds: &LatticeBounds) -> Option<Vec3> {
    let span = bounds.span();
    let mut out = [0.0; 3];
    for a in 0..3 {
        let u = (point[a] - bounds.min[a]) / span[a];
        if !(u >= -BOUNDARY_TOLERANCE && u <= 1.0 + BOUNDARY_TOLERANCE) {
            return None;
        }
        out[a] = u.clamp(0.0, 1.0);
    }
    Some(out)
}

/// Regular grid of control points `P⁰_ijk`, indexed `[(i * (m+1) + j) * (l+1) + k]`.
pub fn initial_control_grid(bounds: &LatticeBounds, degrees: [usize; 3]) -> Result<Vec<Vec3>> {
    if degrees.iter().any(|&d| d == 0) {
        return Err(Error::InvalidLattice(format!(
            "control grid needs degree >= 1 on every axis, got {degrees:?}"
        )));
    }
    let [n, m, l] = degrees;
    let mut out = Vec::with_capacity((n + 1) * (m + 1) * (l + 1));
    for i in 0..=n {
        for j in 0..=m {
            for k in 0..=l {
                out.push(bounds.from_local([
                    i as f64 / n as f64,
                    j as f64 / m as f64,
                    k as f64 / l as f64,
                ]));
            }
        }
    }
    Ok(out)
}

/// Bounds, tensor degrees and control-point displacements `ΔP_ijk`.
#[derive(Debug, Clone, PartialEq)]
pub struct FfdLattice {
    bounds: LatticeBounds,
    degrees: [usize; 3],
    displacements: Vec<Vec3>,
}

impl FfdLattice {
    pub fn zeros(bounds: LatticeBounds, degrees: [usize; 3]) -> Result<Self> {
        let count = Self::count_for(degrees)?;
        Ok(Self {
            bounds,
            degrees,
            displacements: vec![[0.0; 3]; count],
        })
    }

    pub fn with_displacements(bounds: LatticeBounds, degrees: [usize; 3], displacements: Vec<Vec3>) -> Result<Self> {
        let count = Self::count_for(degrees)?;
        if displacements.len() != count {
            return Err(Error::DimensionMismatch(format!(
                "degrees {degrees:?} need {count} displacements, got {}",
                displacements.len()
            )));
        }
        if displacements.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidLattice("non-finite displacement".into()));
        }
        Ok(Self {
            bounds,
            degrees,
            displacements,
        })
    }

    fn count_for(degrees: [usize; 3]) -> Result<usize> {
        if degrees.iter().any(|&d| d > crate::bernstein::MAX_DEGREE as usize) {
            return Err(Error::InvalidLattice(format!("degrees {degrees:?} too large")));
        }
        Ok(degrees.iter().map(|d| d + 1).product())
    }

    pub fn bounds(&self) -> &LatticeBounds {
        &self.bounds
    }

    pub fn degrees(&self) -> [usize; 3] {
        self.degrees
    }

    pub fn displacements(&self) -> &[Vec3] {
        &self.displacements
    }

    pub fn displacements_mut(&mut self) -> &mut [Vec3] {
        &mut self.displacements
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let [_, m, l] = self.degrees;
        (i * (m + 1) + j) * (l + 1) + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.displacements[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Vec3) {
        let idx = self.index(i, j, k);
        self.displacements[idx] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.displacements.iter().flatten().all(|&v| v == 0.0)
    }

    /// Same bounds and degrees, all displacements zero.
    pub fn zeroed(&self) -> Self {
        Self {
            bounds: self.bounds,
            degrees: self.degrees,
            displacements: vec![[0.0; 3]; self.displacements.len()],
        }
    }

    /// Tensor-product displacement at a local coordinate already known to be in range.
    pub(crate) fn displacement_at(&self, local: Vec3) -> Vec3 {
        let [n, m, l] = self.degrees;
        // degrees were validated at construction and local is in [0,1]
        let mut buf = [[0.0; MAX_DEGREE as usize + 1]; 3];
        for (axis, (deg, out)) in [n, m, l].into_iter().zip(buf.iter_mut()).enumerate() {
            BernsteinBasis::new(deg as u32)
                .and_then(|b| b.eval_into(local[axis], &mut out[..=deg]))
                .expect("valid basis");
        }
        let (bi, bj, bk) = (&buf[0][..=n], &buf[1][..=m], &buf[2][..=l]);
        let mut out = [0.0; 3];
        let mut idx = 0;
        for wi in bi {
            for wj in bj {
                let wij = wi * wj;
                for wk in bk {
                    let w = wij * wk;
                    let d = &self.displacements[idx];
                    out[0] += w * d[0];
                    out[1] += w * d[1];
                    out[2] += w * d[2];
                    idx += 1;
                }
            }
        }
        out
    }
}

/// `Δq = Σ B_i(ξ) B_j(η) B_k(ζ) ΔP_ijk`.
pub fn deform_point(lattice: &FfdLattice, local: Vec3) -> Result<Vec3> {
    if let Some(&u) = local.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(Error::ParameterOutOfRange(u));
    }
    Ok(lattice.displacement_at(local))
}
