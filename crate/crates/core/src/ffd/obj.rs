//! Minimal Wavefront OBJ reader and writer for triangle meshes.
//!
//! Only `v` and `f` records are interpreted; polygons are fan-triangulated and
//! face tokens such as `3/1/2` keep their position index. Faces listed under a
//! group or object named `design` tag their vertices as the design surface.

use std::io::{BufRead, Write};

use super::mesh::Mesh;
use super::Vec3;
use crate::error::{Error, Result};

/// Group or object name whose faces mark the design surface.
pub const DESIGN_GROUP: &str = "design";

pub fn read_obj<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles = Vec::new();
    let mut tagged_faces: Vec<usize> = Vec::new();
    let mut in_design = false;
    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.map_err(|e| Error::ObjParse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>().map_err(|_| Error::ObjParse {
                            line: line_no,
                            msg: format!("bad coordinate '{t}'"),
                        })
                    })
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(Error::ObjParse {
                        line: line_no,
                        msg: "vertex needs three coordinates".into(),
                    });
                }
                vertices.push([coords[0], coords[1], coords[2]]);
            }
            Some("f") => {
                let idx: Vec<usize> = tokens
                    .map(|t| resolve_index(t, vertices.len(), line_no))
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(Error::ObjParse {
                        line: line_no,
                        msg: "face needs at least three vertices".into(),
                    });
                }
                for w in 1..idx.len() - 1 {
                    if in_design {
                        tagged_faces.push(triangles.len());
                    }
                    triangles.push([idx[0], idx[w], idx[w + 1]]);
                }
            }
            Some("g") | Some("o") => {
                in_design = tokens.any(|name| name == DESIGN_GROUP);
            }
            _ => {}
        }
    }
    let tag = if tagged_faces.is_empty() {
        None
    } else {
        let mut tag = vec![false; vertices.len()];
        for f in tagged_faces {
            for &v in &triangles[f] {
                tag[v] = true;
            }
        }
        Some(tag)
    };
    Mesh::new(vertices, triangles, tag)
}

fn resolve_index(token: &str, count: usize, line: usize) -> Result<usize> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| Error::ObjParse {
        line,
        msg: format!("bad face index '{token}'"),
    })?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        count as i64 + raw
    } else {
        -1
    };
    if idx < 0 || idx as usize >= count {
        return Err(Error::ObjParse {
            line,
            msg: format!("face index {raw} out of range ({count} vertices so far)"),
        });
    }
    Ok(idx as usize)
}

/// Writes `v x y z` lines with shortest round-trip formatting and 1-based `f i j k` lines.
///
/// Triangle order is preserved; runs of triangles whose vertices are all on the
/// design surface are written under `g design`, the others under `g body`.
pub fn write_obj<W: Write>(mesh: &Mesh, mut out: W) -> std::io::Result<()> {
    for v in mesh.vertices() {
        writeln!(out, "v {} {} {}", v[0], v[1], v[2])?;
    }
    let tag = mesh.surface_tag();
    let mut group: Option<bool> = None;
    for t in mesh.triangles() {
        if let Some(tag) = tag {
            let design = t.iter().all(|&i| tag[i]);
            if group != Some(design) {
                writeln!(out, "g {}", if design { DESIGN_GROUP } else { "body" })?;
                group = Some(design);
            }
        }
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}
