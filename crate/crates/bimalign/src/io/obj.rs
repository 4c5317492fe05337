//! Minimal ASCII OBJ support: `v`/`f` records, fan triangulation for
//! polygons. Vertex coordinates are written with Rust's shortest
//! round-trip float formatting, so export→ingest reproduces geometry
//! bit-exactly.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scene::{BuildingScene, Triangle};

pub fn read_obj(path: &Path) -> Result<Vec<Triangle>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut triangles: Vec<Triangle> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let coords: Vec<f64> = fields
                    .take(3)
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::parse(path, format!("line {}: bad vertex: {e}", lineno + 1)))?;
                if coords.len() != 3 {
                    return Err(Error::parse(
                        path,
                        format!("line {}: vertex needs 3 coordinates", lineno + 1),
                    ));
                }
                vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for field in fields {
                    // "i", "i/j", "i/j/k", "i//k" — the vertex index leads.
                    let vi = field.split('/').next().unwrap_or("");
                    let i: i64 = vi.parse().map_err(|e| {
                        Error::parse(path, format!("line {}: bad face index: {e}", lineno + 1))
                    })?;
                    if i < 0 {
                        return Err(Error::parse(
                            path,
                            format!("line {}: negative face indices unsupported", lineno + 1),
                        ));
                    }
                    if i == 0 || i as usize > vertices.len() {
                        return Err(Error::parse(
                            path,
                            format!("line {}: face index {} out of range", lineno + 1, i),
                        ));
                    }
                    idx.push((i - 1) as usize);
                }
                if idx.len() < 3 {
                    return Err(Error::parse(
                        path,
                        format!("line {}: face needs at least 3 vertices", lineno + 1),
                    ));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([vertices[idx[0]], vertices[idx[k]], vertices[idx[k + 1]]]);
                }
            }
            // Ignore comments and records we do not model (vn, vt, o, g, ...)
            _ => {}
        }
    }
    Ok(triangles)
}

pub fn write_obj(path: &Path, triangles: &[Triangle]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for tri in triangles {
            for v in tri {
                writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
            }
        }
        for i in 0..triangles.len() {
            let base = 3 * i + 1;
            writeln!(w, "f {} {} {}", base, base + 1, base + 2)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Export one OBJ per entity into `dir`, named `<entity_id>.obj` so that
/// ingesting the directory reproduces the scene.
pub fn export_scene(dir: &Path, scene: &BuildingScene) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for mesh in &scene.meshes {
        let path = dir.join(format!("{}.obj", mesh.entity_id));
        write_obj(&path, &mesh.triangles)?;
    }
    Ok(())
}
