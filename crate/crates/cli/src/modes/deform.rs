use super::{resolve_bounds, resolve_degrees, resolve_geometry, ModeOutput};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::input::{obj_bytes, read_displacement_table};
use crate::output::format_real;
use ffd_adapt::ffd::{apply_deformation, embed_mesh, FfdLattice, Mesh};

pub struct DeformConfig {
    pub mesh: Mesh,
    pub lattice: FfdLattice,
}

pub fn resolve(s: &Settings) -> CliResult<DeformConfig> {
    let geometry = resolve_geometry(s)?;
    let bounds = resolve_bounds(s, &geometry)?;
    let degrees = resolve_degrees(s)?;
    let path = s
        .input_path("paths", "displacements")?
        .ok_or_else(|| CliError::Config("deform needs paths.displacements (CSV i,j,k,dx,dy,dz)".into()))?;
    let table = read_displacement_table(&path, degrees)?;
    let lattice = FfdLattice::with_displacements(bounds, degrees, table)
        .map_err(|e| CliError::input(path.display().to_string(), e))?;
    Ok(DeformConfig {
        mesh: geometry.mesh,
        lattice,
    })
}

pub fn execute(cfg: &DeformConfig) -> CliResult<ModeOutput> {
    let embedded = embed_mesh(&cfg.mesh, cfg.lattice.bounds());
    let deformed = apply_deformation(&embedded, &cfg.lattice)?;
    let mut out = ModeOutput::default();
    out.result("vertices", cfg.mesh.vertices().len().to_string());
    out.result("inside", embedded.inside_count().to_string());
    out.result("max_displacement", format_real(cfg.mesh.max_vertex_distance(&deformed)));
    out.line(format!(
        "moved {} of {} vertices",
        embedded.inside_count(),
        cfg.mesh.vertices().len()
    ));
    out.artifacts.add("deformed.obj", obj_bytes(&deformed));
    Ok(out)
}
