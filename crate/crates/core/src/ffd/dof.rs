use super::lattice::{FfdLattice, LatticeBounds};
use crate::error::{Error, Result};

/// A lattice direction; `Z` is vertical (thickness).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Axis::X),
            1 => Some(Axis::Y),
            2 => Some(Axis::Z),
            _ => None,
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "i" | "xi" => Ok(Axis::X),
            "y" | "j" | "eta" => Ok(Axis::Y),
            "z" | "k" | "zeta" | "vertical" => Ok(Axis::Z),
            other => Err(format!("unknown axis '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneIndex {
    At(usize),
    /// The last plane, `i = n_i` for the i-axis.
    Last,
}

/// All control points whose index along `axis` equals `index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrozenPlane {
    pub axis: Axis,
    pub index: PlaneIndex,
}

impl std::str::FromStr for FrozenPlane {
    type Err = String;
    /// Parses `i=0`, `i=max`, `k=1`, ...
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (axis, idx) = s
            .split_once('=')
            .ok_or_else(|| format!("frozen plane '{s}' is not of the form axis=index"))?;
        let axis: Axis = axis.parse()?;
        let index = match idx.trim() {
            "max" | "last" | "n" => PlaneIndex::Last,
            v => PlaneIndex::At(v.parse().map_err(|_| format!("bad plane index '{v}'"))?),
        };
        Ok(FrozenPlane { axis, index })
    }
}

/// Which control points are frozen and which axis the free ones move along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreezeSpec {
    pub planes: Vec<FrozenPlane>,
    pub motion: Axis,
}

impl Default for FreezeSpec {
    /// Leading and trailing planes `i = 0` and `i = n_i` frozen; vertical motion.
    fn default() -> Self {
        Self {
            planes: vec![
                FrozenPlane {
                    axis: Axis::X,
                    index: PlaneIndex::At(0),
                },
                FrozenPlane {
                    axis: Axis::X,
                    index: PlaneIndex::Last,
                },
            ],
            motion: Axis::Z,
        }
    }
}

/// Mapping between a flat design vector and lattice displacements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    degrees: [usize; 3],
    motion: Axis,
    /// Flat indices `(i*(m+1)+j)*(l+1)+k` of free control points, ascending.
    free: Vec<usize>,
    frozen: Vec<[usize; 3]>,
}

impl DofMap {
    pub fn new(degrees: [usize; 3], spec: &FreezeSpec) -> Result<Self> {
        let [n, m, l] = degrees;
        let is_frozen = |ijk: [usize; 3]| {
            spec.planes.iter().any(|p| {
                let a = p.axis.index();
                let at = match p.index {
                    PlaneIndex::At(v) => v,
                    PlaneIndex::Last => degrees[a],
                };
                ijk[a] == at
            })
        };
        let mut free = Vec::new();
        let mut frozen = Vec::new();
        let mut flat = 0;
        for i in 0..=n {
            for j in 0..=m {
                for k in 0..=l {
                    if is_frozen([i, j, k]) {
                        frozen.push([i, j, k]);
                    } else {
                        free.push(flat);
                    }
                    flat += 1;
                }
            }
        }
        if free.is_empty() {
            return Err(Error::NothingFree);
        }
        Ok(Self {
            degrees,
            motion: spec.motion,
            free,
            frozen,
        })
    }

    /// Number of design variables.
    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn degrees(&self) -> [usize; 3] {
        self.degrees
    }

    pub fn motion(&self) -> Axis {
        self.motion
    }

    pub fn frozen(&self) -> &[[usize; 3]] {
        &self.frozen
    }

    /// Writes the design into the motion component of the free control points;
    /// every other component is zero.
    pub fn decode(&self, design: &[f64], bounds: LatticeBounds) -> Result<FfdLattice> {
        let mut lattice = FfdLattice::zeros(bounds, self.degrees)?;
        self.decode_into(design, &mut lattice)?;
        Ok(lattice)
    }

    pub fn decode_into(&self, design: &[f64], lattice: &mut FfdLattice) -> Result<()> {
        if design.len() != self.free.len() {
            return Err(Error::DimensionMismatch(format!(
                "design has {} entries, lattice exposes {}",
                design.len(),
                self.free.len()
            )));
        }
        if lattice.degrees() != self.degrees {
            return Err(Error::DimensionMismatch("lattice degrees differ from the DOF map".into()));
        }
        let axis = self.motion.index();
        let disp = lattice.displacements_mut();
        disp.iter_mut().for_each(|d| *d = [0.0; 3]);
        for (&idx, &v) in self.free.iter().zip(design) {
            disp[idx][axis] = v;
        }
        Ok(())
    }

    /// Reads the motion component of the free control points.
    pub fn encode(&self, lattice: &FfdLattice) -> Result<Vec<f64>> {
        if lattice.degrees() != self.degrees {
            return Err(Error::DimensionMismatch("lattice degrees differ from the DOF map".into()));
        }
        let axis = self.motion.index();
        Ok(self.free.iter().map(|&i| lattice.displacements()[i][axis]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_dof_counts() {
        let spec = FreezeSpec::default();
        assert_eq!(DofMap::new([3, 1, 1], &spec).unwrap().len(), 8);
        assert_eq!(DofMap::new([6, 1, 1], &spec).unwrap().len(), 20);
        assert_eq!(DofMap::new([9, 1, 1], &spec).unwrap().len(), 32);
        assert_eq!(DofMap::new([4, 1, 1], &spec).unwrap().len(), 12);
    }

    #[test]
    fn freezing_everything_is_rejected() {
        assert_eq!(DofMap::new([1, 1, 1], &FreezeSpec::default()), Err(Error::NothingFree));
        let spec = FreezeSpec {
            planes: vec!["k=0".parse().unwrap(), "k=max".parse().unwrap(), "j=1".parse().unwrap()],
            motion: Axis::Z,
        };
        assert_eq!(DofMap::new([3, 1, 1], &spec), Err(Error::NothingFree));
    }

    #[test]
    fn decode_writes_only_motion_axis_of_free_points() {
        let map = DofMap::new([3, 1, 1], &FreezeSpec::default()).unwrap();
        let design: Vec<f64> = (1..=8).map(f64::from).collect();
        let lattice = map.decode(&design, LatticeBounds::unit()).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                assert_eq!(lattice.get(0, j, k), [0.0; 3]);
                assert_eq!(lattice.get(3, j, k), [0.0; 3]);
            }
        }
        assert_eq!(lattice.get(1, 0, 0), [0.0, 0.0, 1.0]);
        assert_eq!(lattice.get(2, 1, 1), [0.0, 0.0, 8.0]);
        assert!(map.decode(&design[..7], LatticeBounds::unit()).is_err());
    }

    #[test]
    fn plane_parsing() {
        let p: FrozenPlane = "i=max".parse().unwrap();
        assert_eq!(p, FrozenPlane { axis: Axis::X, index: PlaneIndex::Last });
        let p: FrozenPlane = "k = 2".parse().unwrap();
        assert_eq!(p, FrozenPlane { axis: Axis::Z, index: PlaneIndex::At(2) });
        assert!("q=1".parse::<FrozenPlane>().is_err());
        assert!("i1".parse::<FrozenPlane>().is_err());
    }

    proptest! {
        #[test]
        fn encode_is_left_inverse_of_decode(design in prop::collection::vec(-1.0f64..1.0, 20)) {
            let map = DofMap::new([6, 1, 1], &FreezeSpec::default()).unwrap();
            let lattice = map.decode(&design, LatticeBounds::unit()).unwrap();
            prop_assert_eq!(map.encode(&lattice).unwrap(), design);
        }
    }
}
