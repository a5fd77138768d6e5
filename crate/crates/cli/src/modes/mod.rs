pub mod analyze;
pub mod deform;
pub mod optimize;
pub mod reconstruct;

use crate::config::{parse_auto, parse_triple, Settings};
use crate::error::{CliError, CliResult};
use crate::input::{bounding_box, read_mesh};
use crate::output::Artifacts;
use ffd_adapt::ffd::{Axis, FreezeSpec, FrozenPlane, LatticeBounds, Mesh};
use ffd_adapt::wing::WingSpec;

/// What a mode produced: files, `[result]` entries for the summary, console lines.
#[derive(Debug, Default)]
pub struct ModeOutput {
    pub artifacts: Artifacts,
    pub result: Vec<(String, String)>,
    pub lines: Vec<String>,
}

impl ModeOutput {
    pub fn result(&mut self, key: &str, value: String) {
        self.result.push((key.to_string(), value));
    }

    pub fn line(&mut self, line: String) {
        self.lines.push(line);
    }
}

/// The input mesh and, when it was generated, the wing it came from.
pub struct Geometry {
    pub mesh: Mesh,
    pub wing: Option<WingSpec>,
}

pub fn resolve_geometry(s: &Settings) -> CliResult<Geometry> {
    if let Some(path) = s.input_path("paths", "mesh")? {
        return Ok(Geometry {
            mesh: read_mesh(&path)?,
            wing: None,
        });
    }
    let d = WingSpec::default();
    let wing = WingSpec {
        chord: s.value("wing", "chord", &d.chord.to_string())?,
        span: s.value("wing", "span", &d.span.to_string())?,
        thickness: s.value("wing", "thickness", &d.thickness.to_string())?,
        chord_stations: s.value("wing", "chord_stations", &d.chord_stations.to_string())?,
        span_stations: s.value("wing", "span_stations", &d.span_stations.to_string())?,
    };
    if !(wing.chord > 0.0 && wing.span > 0.0 && wing.thickness > 0.0) || wing.chord_stations < 3 || wing.span_stations < 2
    {
        return Err(CliError::Config(
            "wing needs positive chord, span, thickness, at least 3 chord and 2 span stations".into(),
        ));
    }
    Ok(Geometry {
        mesh: wing.mesh(),
        wing: Some(wing),
    })
}

/// `[lattice] min`/`max`, defaulting to the wing's box or the mesh bounding box.
pub fn resolve_bounds(s: &Settings, geometry: &Geometry) -> CliResult<LatticeBounds> {
    let parse_corner = |text: &str| -> Result<Option<[f64; 3]>, String> {
        match parse_auto(text) {
            Ok(None) => Ok(None),
            _ => parse_triple::<f64>(text).map(Some),
        }
    };
    let min = s.value_with("lattice", "min", "auto", parse_corner)?;
    let max = s.value_with("lattice", "max", "auto", parse_corner)?;
    let (auto_min, auto_max) = match geometry.wing {
        Some(w) => {
            let b = w.lattice_bounds();
            (b.min(), b.max())
        }
        None => bounding_box(geometry.mesh.vertices()),
    };
    LatticeBounds::new(min.unwrap_or(auto_min), max.unwrap_or(auto_max))
        .map_err(|e| CliError::input("lattice bounds", e))
}

pub fn resolve_degrees(s: &Settings) -> CliResult<[usize; 3]> {
    let degrees = s.value_with("lattice", "degrees", "3,1,1", parse_triple::<usize>)?;
    if degrees.contains(&0) {
        return Err(CliError::Config("lattice.degrees must all be at least 1".into()));
    }
    Ok(degrees)
}

pub fn resolve_freeze(s: &Settings) -> CliResult<FreezeSpec> {
    let planes = s.value_with("lattice", "freeze", "i=0, i=max", |text| {
        if text.trim().eq_ignore_ascii_case("none") {
            return Ok(Vec::new());
        }
        text.split(',').map(|p| p.trim().parse::<FrozenPlane>()).collect()
    })?;
    let motion: Axis = s.value("lattice", "motion", "z")?;
    Ok(FreezeSpec { planes, motion })
}
