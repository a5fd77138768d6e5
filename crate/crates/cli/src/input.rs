use crate::error::{CliError, CliResult};
use ffd_adapt::ffd::{obj, Mesh, Vec3};
use std::path::Path;

/// Reads the named real-valued columns of a headed CSV file, in file order.
pub fn read_columns(path: &Path, columns: &[&str]) -> CliResult<Vec<Vec<f64>>> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let index: Vec<usize> = columns
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h.eq_ignore_ascii_case(c))
                .ok_or_else(|| bad(format!("missing column '{c}'")))
        })
        .collect::<CliResult<_>>()?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let row = index
            .iter()
            .map(|&i| {
                let cell = record.get(i).unwrap_or("");
                cell.parse::<f64>()
                    .map_err(|_| bad(format!("row {}: '{cell}' is not a number", line + 2)))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(rows)
}

pub fn read_mesh(path: &Path) -> CliResult<Mesh> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    obj::read_obj(std::io::BufReader::new(file)).map_err(|e| CliError::input(path.display().to_string(), e))
}

pub fn obj_bytes(mesh: &Mesh) -> Vec<u8> {
    let mut buf = Vec::new();
    // writing into a Vec cannot fail
    obj::write_obj(mesh, &mut buf).expect("in-memory write");
    buf
}

/// A mesh with every vertex tagged when the file carried no design group.
pub fn tagged_or_all(mesh: &Mesh) -> CliResult<Mesh> {
    if !mesh.tagged_vertices().is_empty() {
        return Ok(mesh.clone());
    }
    Ok(mesh.clone().with_surface_tag(vec![true; mesh.vertices().len()])?)
}

/// Axis-aligned bounding box of a point set.
pub fn bounding_box(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for c in 0..3 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    (lo, hi)
}

/// Parses a displacement table with columns `i,j,k,dx,dy,dz` covering every
/// control point of a lattice of the given degrees exactly once.
pub fn read_displacement_table(path: &Path, degrees: [usize; 3]) -> CliResult<Vec<Vec3>> {
    let rows = read_columns(path, &["i", "j", "k", "dx", "dy", "dz"])?;
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let [n, m, l] = degrees;
    let count = (n + 1) * (m + 1) * (l + 1);
    if rows.len() != count {
        return Err(bad(format!(
            "displacement table has {} rows, lattice {n}x{m}x{l} needs {count}",
            rows.len()
        )));
    }
    let mut out = vec![[0.0; 3]; count];
    let mut seen = vec![false; count];
    for (r, row) in rows.iter().enumerate() {
        let mut idx = [0usize; 3];
        for c in 0..3 {
            let v = row[c];
            if v.fract() != 0.0 || v < 0.0 || v > degrees[c] as f64 {
                return Err(bad(format!(
                    "row {}: index {v} out of range 0..={} on axis {c}",
                    r + 2,
                    degrees[c]
                )));
            }
            idx[c] = v as usize;
        }
        let flat = (idx[0] * (m + 1) + idx[1]) * (l + 1) + idx[2];
        if std::mem::replace(&mut seen[flat], true) {
            return Err(bad(format!("row {}: control point {idx:?} listed twice", r + 2)));
        }
        out[flat] = [row[3], row[4], row[5]];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn displacement_table_shape_checks() {
        let dir = tempfile::tempdir().unwrap();
        let mut ok = String::from("i,j,k,dx,dy,dz\n");
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    ok += &format!("{i},{j},{k},0,0,{}\n", i + j + k);
                }
            }
        }
        let p = write(dir.path(), "ok.csv", &ok);
        let d = read_displacement_table(&p, [1, 1, 1]).unwrap();
        assert_eq!(d[7], [0.0, 0.0, 3.0]);
        assert!(read_displacement_table(&p, [2, 1, 1]).is_err());
        let dup = ok.replace("1,1,1,0,0,3", "1,1,0,0,0,3");
        assert!(read_displacement_table(&write(dir.path(), "dup.csv", &dup), [1, 1, 1]).is_err());
        let range = ok.replace("1,1,1,0,0,3", "1,1,2,0,0,3");
        assert!(read_displacement_table(&write(dir.path(), "range.csv", &range), [1, 1, 1]).is_err());
    }

    #[test]
    fn columns_by_name_in_any_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", "z,x,y\n3,1,2\n6,4,5\n");
        assert_eq!(read_columns(&p, &["x", "y", "z"]).unwrap(), vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        let p = write(dir.path(), "bad.csv", "x,y\n1,abc\n");
        assert!(read_columns(&p, &["x", "y"]).is_err());
    }
}
