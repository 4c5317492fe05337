//! ASCII PLY point clouds: float x/y/z plus a uchar semantic class code.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scene::{SemanticClass, SemanticPointCloud};

pub fn write_ply(path: &Path, cloud: &SemanticPointCloud) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "ply")?;
        writeln!(w, "format ascii 1.0")?;
        writeln!(w, "element vertex {}", cloud.points.len())?;
        writeln!(w, "property float x")?;
        writeln!(w, "property float y")?;
        writeln!(w, "property float z")?;
        writeln!(w, "property uchar class")?;
        writeln!(w, "end_header")?;
        for (p, class) in &cloud.points {
            writeln!(w, "{} {} {} {}", p.x as f32, p.y as f32, p.z as f32, class.code())?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn read_ply(path: &Path) -> Result<SemanticPointCloud> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = std::io::BufReader::new(file);
    let mut lines = reader.lines();

    let mut vertex_count: Option<usize> = None;
    let mut properties: Vec<String> = Vec::new();
    loop {
        let line = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::parse(path, "truncated header")),
        };
        let line = line.trim().to_string();
        if line == "end_header" {
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["ply"] => {}
            ["format", "ascii", _] => {}
            ["format", other, ..] => {
                return Err(Error::parse(path, format!("unsupported PLY format '{other}'")))
            }
            ["comment", ..] => {}
            ["element", "vertex", n] => {
                vertex_count = Some(n.parse().map_err(|_| {
                    Error::parse(path, format!("bad vertex count '{n}'"))
                })?);
            }
            ["element", other, ..] => {
                return Err(Error::parse(path, format!("unsupported PLY element '{other}'")))
            }
            ["property", _, name] => properties.push(name.to_string()),
            _ => {}
        }
    }

    let count = vertex_count.ok_or_else(|| Error::parse(path, "missing vertex element"))?;
    let find = |name: &str| properties.iter().position(|p| p == name);
    let (ix, iy, iz) = match (find("x"), find("y"), find("z")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::parse(path, "PLY must carry x, y, z properties")),
    };
    let iclass = find("class");

    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let line = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::parse(path, "fewer vertices than declared")),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < properties.len() {
            return Err(Error::parse(path, format!("short vertex line '{line}'")));
        }
        let parse = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| Error::parse(path, format!("bad float '{}': {e}", fields[i])))
        };
        let p = Vector3::new(parse(ix)?, parse(iy)?, parse(iz)?);
        let class = match iclass {
            Some(i) => {
                let code: u8 = fields[i]
                    .parse()
                    .map_err(|e| Error::parse(path, format!("bad class code: {e}")))?;
                SemanticClass::from_code(code).unwrap_or(SemanticClass::Clutter)
            }
            None => SemanticClass::Clutter,
        };
        points.push((p, class));
    }
    Ok(SemanticPointCloud::new(points))
}
