//! The BIM side of the pipeline: semantic building geometry, either
//! procedurally generated from a room-list spec or ingested from a
//! directory of per-entity OBJ files, plus uniform surface sampling into
//! labeled point clouds.

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed set of semantic labels. The discriminant order is the on-disk
/// encoding used by the PLY `class` property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticClass {
    Wall = 0,
    Column = 1,
    Floor = 2,
    Ceiling = 3,
    Window = 4,
    Door = 5,
    Clutter = 6,
}

impl SemanticClass {
    pub const ALL: [SemanticClass; 7] = [
        SemanticClass::Wall,
        SemanticClass::Column,
        SemanticClass::Floor,
        SemanticClass::Ceiling,
        SemanticClass::Window,
        SemanticClass::Door,
        SemanticClass::Clutter,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SemanticClass::Wall => "wall",
            SemanticClass::Column => "column",
            SemanticClass::Floor => "floor",
            SemanticClass::Ceiling => "ceiling",
            SemanticClass::Window => "window",
            SemanticClass::Door => "door",
            SemanticClass::Clutter => "clutter",
        }
    }

    /// Strict name lookup; `None` for anything outside the closed set.
    pub fn from_name(name: &str) -> Option<SemanticClass> {
        SemanticClass::ALL.iter().copied().find(|c| c.name() == name)
    }

    /// Ingestion rule: unknown class names map to clutter with a warning.
    pub fn from_name_lossy(name: &str) -> SemanticClass {
        SemanticClass::from_name(name).unwrap_or_else(|| {
            log::warn!("unknown semantic class '{name}', mapping to clutter");
            SemanticClass::Clutter
        })
    }

    pub fn from_code(code: u8) -> Option<SemanticClass> {
        SemanticClass::ALL.get(code as usize).copied()
    }

    pub fn code(&self) -> u8 {
        *self as u8
    }
}

impl std::fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub type Triangle = [Vector3<f64>; 3];

/// One labeled building entity as a triangle soup.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticMesh {
    pub entity_id: String,
    pub class: SemanticClass,
    pub triangles: Vec<Triangle>,
}

impl SemanticMesh {
    pub fn new(entity_id: impl Into<String>, class: SemanticClass, triangles: Vec<Triangle>) -> Result<Self> {
        let entity_id = entity_id.into();
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
                return Err(Error::InvalidScene(format!(
                    "entity {entity_id}: non-finite vertex in triangle {i}"
                )));
            }
            if triangle_area(t) <= 1e-12 {
                return Err(Error::InvalidScene(format!(
                    "entity {entity_id}: degenerate triangle {i} (area <= 1e-12)"
                )));
            }
        }
        Ok(SemanticMesh {
            entity_id,
            class,
            triangles,
        })
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(triangle_area).sum()
    }
}

pub fn triangle_area(t: &Triangle) -> f64 {
    0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).norm()
}

/// A complete semantic building model.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildingScene {
    pub meshes: Vec<SemanticMesh>,
    pub floor_z: f64,
    pub ceiling_z: f64,
}

impl BuildingScene {
    /// Meshes are kept sorted by entity id so that generated and ingested
    /// scenes sample identically.
    pub fn new(mut meshes: Vec<SemanticMesh>, floor_z: f64, ceiling_z: f64) -> Result<Self> {
        if ceiling_z <= floor_z {
            return Err(Error::InvalidScene(format!(
                "ceiling_z {ceiling_z} must exceed floor_z {floor_z}"
            )));
        }
        if !meshes.iter().any(|m| m.class == SemanticClass::Wall) {
            return Err(Error::InvalidScene("scene has no wall mesh".into()));
        }
        if !meshes.iter().any(|m| m.class == SemanticClass::Floor) {
            return Err(Error::InvalidScene("scene has no floor mesh".into()));
        }
        meshes.sort_by(|a, b| a.entity_id.cmp(&b.entity_id));
        Ok(BuildingScene {
            meshes,
            floor_z,
            ceiling_z,
        })
    }

    /// Axis-aligned XY bounds over all vertices.
    pub fn xy_bounds(&self) -> (Vector2<f64>, Vector2<f64>) {
        let mut min = Vector2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vector2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for mesh in &self.meshes {
            for tri in &mesh.triangles {
                for v in tri {
                    min.x = min.x.min(v.x);
                    min.y = min.y.min(v.y);
                    max.x = max.x.max(v.x);
                    max.y = max.y.max(v.y);
                }
            }
        }
        (min, max)
    }

    pub fn total_area(&self) -> f64 {
        self.meshes.iter().map(|m| m.area()).sum()
    }
}

/// 3D points with semantic labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticPointCloud {
    pub points: Vec<(Vector3<f64>, SemanticClass)>,
}

impl SemanticPointCloud {
    pub fn new(points: Vec<(Vector3<f64>, SemanticClass)>) -> Self {
        SemanticPointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = &Vector3<f64>> {
        self.points.iter().map(|(p, _)| p)
    }
}

/// JSON scene description: rooms are interior rectangles, walls are boxes
/// of the given thickness placed outside them, columns are square posts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub rooms: Vec<RoomSpec>,
    pub wall_thickness: f64,
    pub floor_z: f64,
    pub ceiling_z: f64,
    #[serde(default)]
    pub columns: Vec<ColumnSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSpec {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub x: f64,
    pub y: f64,
    pub size: f64,
}

/// Vertical quad between 2D endpoints `a` and `b`, spanning [z0, z1].
fn vertical_quad(a: Vector2<f64>, b: Vector2<f64>, z0: f64, z1: f64) -> [Triangle; 2] {
    let p00 = Vector3::new(a.x, a.y, z0);
    let p10 = Vector3::new(b.x, b.y, z0);
    let p11 = Vector3::new(b.x, b.y, z1);
    let p01 = Vector3::new(a.x, a.y, z1);
    [[p00, p10, p11], [p00, p11, p01]]
}

/// Horizontal quad over [min, max] at height z.
fn horizontal_quad(min: Vector2<f64>, max: Vector2<f64>, z: f64) -> [Triangle; 2] {
    let p00 = Vector3::new(min.x, min.y, z);
    let p10 = Vector3::new(max.x, min.y, z);
    let p11 = Vector3::new(max.x, max.y, z);
    let p01 = Vector3::new(min.x, max.y, z);
    [[p00, p10, p11], [p00, p11, p01]]
}

#[derive(Clone, Copy)]
enum Side {
    South, // y = y0, outside is -y
    North, // y = y1, outside is +y
    West,  // x = x0, outside is -x
    East,  // x = x1, outside is +x
}

/// Procedurally build a semantic scene from a room-list spec.
///
/// Each room contributes four wall entities (with sections removed where
/// the wall edge runs through another room's interior, which is how
/// overlapping rooms become connected spaces), one floor and one ceiling
/// slab. Columns are four-sided posts. Output is deterministic.
pub fn generate_scene(spec: &SceneSpec) -> Result<BuildingScene> {
    if spec.rooms.is_empty() {
        return Err(Error::InvalidSpec("scene spec has no rooms".into()));
    }
    if !(spec.wall_thickness > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "wall_thickness must be positive, got {}",
            spec.wall_thickness
        )));
    }
    if spec.ceiling_z <= spec.floor_z {
        return Err(Error::InvalidSpec(format!(
            "ceiling_z {} must exceed floor_z {}",
            spec.ceiling_z, spec.floor_z
        )));
    }
    for (i, r) in spec.rooms.iter().enumerate() {
        if !(r.w > 0.0 && r.h > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "room {i} has zero or negative area ({} x {})",
                r.w, r.h
            )));
        }
    }
    for (i, c) in spec.columns.iter().enumerate() {
        if !(c.size > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "column {i} has non-positive size {}",
                c.size
            )));
        }
    }

    let t = spec.wall_thickness;
    let (z0, z1) = (spec.floor_z, spec.ceiling_z);
    let mut meshes = Vec::new();
    let mut wall_idx = 0usize;

    for (ri, room) in spec.rooms.iter().enumerate() {
        let (x0, y0, x1, y1) = (room.x, room.y, room.x + room.w, room.y + room.h);
        for side in [Side::South, Side::North, Side::West, Side::East] {
            // The edge parametrized along its axis, plus the fixed coordinate.
            let (lo, hi) = match side {
                Side::South | Side::North => (x0, x1),
                Side::West | Side::East => (y0, y1),
            };
            // Remove the portions of this edge that run strictly inside
            // another room's open interior; those become openings.
            let mut intervals = vec![(lo, hi)];
            for (rj, other) in spec.rooms.iter().enumerate() {
                if rj == ri {
                    continue;
                }
                let (ox0, oy0, ox1, oy1) = (other.x, other.y, other.x + other.w, other.y + other.h);
                let fixed_inside = match side {
                    Side::South => y0 > oy0 && y0 < oy1,
                    Side::North => y1 > oy0 && y1 < oy1,
                    Side::West => x0 > ox0 && x0 < ox1,
                    Side::East => x1 > ox0 && x1 < ox1,
                };
                if !fixed_inside {
                    continue;
                }
                let (cut_lo, cut_hi) = match side {
                    Side::South | Side::North => (ox0, ox1),
                    Side::West | Side::East => (oy0, oy1),
                };
                intervals = subtract_interval(&intervals, cut_lo, cut_hi);
            }

            for (a, b) in intervals {
                if b - a <= 1e-9 {
                    continue;
                }
                // Extend the outer face past original room corners so
                // adjacent walls close up; clipped (doorway) ends stay flush.
                let ext_lo = if (a - lo).abs() < 1e-12 { a - t } else { a };
                let ext_hi = if (b - hi).abs() < 1e-12 { b + t } else { b };
                let mut tris = Vec::with_capacity(8);
                let (inner_a, inner_b, outer_a, outer_b, cap_axis) = match side {
                    Side::South => (
                        Vector2::new(a, y0),
                        Vector2::new(b, y0),
                        Vector2::new(ext_lo, y0 - t),
                        Vector2::new(ext_hi, y0 - t),
                        (Vector2::new(0.0, -t), Vector2::new(ext_lo, y0), Vector2::new(ext_hi, y0)),
                    ),
                    Side::North => (
                        Vector2::new(a, y1),
                        Vector2::new(b, y1),
                        Vector2::new(ext_lo, y1 + t),
                        Vector2::new(ext_hi, y1 + t),
                        (Vector2::new(0.0, t), Vector2::new(ext_lo, y1), Vector2::new(ext_hi, y1)),
                    ),
                    Side::West => (
                        Vector2::new(x0, a),
                        Vector2::new(x0, b),
                        Vector2::new(x0 - t, ext_lo),
                        Vector2::new(x0 - t, ext_hi),
                        (Vector2::new(-t, 0.0), Vector2::new(x0, ext_lo), Vector2::new(x0, ext_hi)),
                    ),
                    Side::East => (
                        Vector2::new(x1, a),
                        Vector2::new(x1, b),
                        Vector2::new(x1 + t, ext_lo),
                        Vector2::new(x1 + t, ext_hi),
                        (Vector2::new(t, 0.0), Vector2::new(x1, ext_lo), Vector2::new(x1, ext_hi)),
                    ),
                };
                tris.extend(vertical_quad(inner_a, inner_b, z0, z1));
                tris.extend(vertical_quad(outer_a, outer_b, z0, z1));
                let (cap_offset, cap_start_in, cap_end_in) = cap_axis;
                tris.extend(vertical_quad(cap_start_in, cap_start_in + cap_offset, z0, z1));
                tris.extend(vertical_quad(cap_end_in, cap_end_in + cap_offset, z0, z1));
                meshes.push(SemanticMesh::new(
                    format!("wall_{wall_idx:03}"),
                    SemanticClass::Wall,
                    tris,
                )?);
                wall_idx += 1;
            }
        }

        // Slabs span the room plus its wall band.
        let slab_min = Vector2::new(x0 - t, y0 - t);
        let slab_max = Vector2::new(x1 + t, y1 + t);
        meshes.push(SemanticMesh::new(
            format!("floor_{ri:03}"),
            SemanticClass::Floor,
            horizontal_quad(slab_min, slab_max, z0).to_vec(),
        )?);
        meshes.push(SemanticMesh::new(
            format!("ceiling_{ri:03}"),
            SemanticClass::Ceiling,
            horizontal_quad(slab_min, slab_max, z1).to_vec(),
        )?);
    }

    for (ci, col) in spec.columns.iter().enumerate() {
        let h = col.size / 2.0;
        let corners = [
            Vector2::new(col.x - h, col.y - h),
            Vector2::new(col.x + h, col.y - h),
            Vector2::new(col.x + h, col.y + h),
            Vector2::new(col.x - h, col.y + h),
        ];
        let mut tris = Vec::with_capacity(8);
        for k in 0..4 {
            tris.extend(vertical_quad(corners[k], corners[(k + 1) % 4], z0, z1));
        }
        meshes.push(SemanticMesh::new(
            format!("column_{ci:03}"),
            SemanticClass::Column,
            tris,
        )?);
    }

    BuildingScene::new(meshes, spec.floor_z, spec.ceiling_z)
}

/// Subtract the open interval (lo, hi) from each of `intervals`.
fn subtract_interval(intervals: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in intervals {
        if hi <= a || lo >= b {
            out.push((a, b));
            continue;
        }
        if lo > a {
            out.push((a, lo));
        }
        if hi < b {
            out.push((hi, b));
        }
    }
    out
}

/// Stable 64-bit FNV-1a over the entity id, mixed with the global seed, so
/// per-mesh sampling streams are independent of mesh order and safe to run
/// in parallel.
fn entity_seed(global_seed: u64, entity_id: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in entity_id.as_bytes() {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ global_seed.wrapping_mul(0x9e3779b97f4a7c15)
}

/// Uniform area-weighted surface sampling.
///
/// Per triangle the expected count is area times density, realized as
/// floor(expected) points plus one more with probability frac(expected),
/// so density is unbiased regardless of tessellation. Points are drawn
/// area-uniformly via barycentric folding. Deterministic for a fixed seed.
pub fn sample_uniform(scene: &BuildingScene, density: f64, seed: u64) -> Result<SemanticPointCloud> {
    if !(density > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling density must be positive, got {density}"
        )));
    }
    let per_mesh: Vec<Vec<(Vector3<f64>, SemanticClass)>> = scene
        .meshes
        .par_iter()
        .map(|mesh| {
            let mut rng = ChaCha8Rng::seed_from_u64(entity_seed(seed, &mesh.entity_id));
            let mut points = Vec::new();
            for tri in &mesh.triangles {
                let expected = triangle_area(tri) * density;
                let mut n = expected.floor() as usize;
                if rng.gen::<f64>() < expected.fract() {
                    n += 1;
                }
                for _ in 0..n {
                    let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
                    if u + v > 1.0 {
                        u = 1.0 - u;
                        v = 1.0 - v;
                    }
                    let p = tri[0] + (tri[1] - tri[0]) * u + (tri[2] - tri[0]) * v;
                    points.push((p, mesh.class));
                }
            }
            points
        })
        .collect();
    Ok(SemanticPointCloud::new(per_mesh.into_iter().flatten().collect()))
}

/// Build a scene from a directory of per-entity OBJ files.
///
/// The filename prefix before the first underscore is the class name
/// (`wall_01.obj`, `column_a.obj`, ...); unknown prefixes become clutter.
/// Files are read in lexicographic order; `floor_z`/`ceiling_z` are the
/// median z of floor/ceiling vertices.
pub fn ingest_obj_directory(path: &std::path::Path) -> Result<BuildingScene> {
    let entries = std::fs::read_dir(path).map_err(|e| Error::io(path, e))?;
    let mut files: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "obj").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidScene(format!(
            "no .obj files found in {}",
            path.display()
        )));
    }

    let mut meshes = Vec::new();
    for file in &files {
        let stem = file
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::parse(file.clone(), "non-UTF-8 filename"))?
            .to_string();
        let class_name = stem.split('_').next().unwrap_or("");
        let class = SemanticClass::from_name_lossy(class_name);
        let triangles = crate::io::obj::read_obj(file)?;
        if triangles.is_empty() {
            log::warn!("{}: no faces, skipping", file.display());
            continue;
        }
        meshes.push(SemanticMesh::new(stem, class, triangles)?);
    }

    let floor_z = median_z(&meshes, SemanticClass::Floor)
        .ok_or_else(|| Error::InvalidScene("no floor mesh in OBJ directory".into()))?;
    let ceiling_z = median_z(&meshes, SemanticClass::Ceiling).unwrap_or(floor_z + 3.0);
    BuildingScene::new(meshes, floor_z, ceiling_z)
}

fn median_z(meshes: &[SemanticMesh], class: SemanticClass) -> Option<f64> {
    let mut zs: Vec<f64> = meshes
        .iter()
        .filter(|m| m.class == class)
        .flat_map(|m| m.triangles.iter().flatten().map(|v| v.z))
        .collect();
    if zs.is_empty() {
        return None;
    }
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(zs[zs.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    pub(crate) fn single_room_spec() -> SceneSpec {
        SceneSpec {
            rooms: vec![RoomSpec { x: 0.0, y: 0.0, w: 4.0, h: 3.0 }],
            wall_thickness: 0.1,
            floor_z: 0.0,
            ceiling_z: 2.5,
            columns: vec![],
        }
    }

    #[test]
    fn single_room_entity_breakdown() {
        let scene = generate_scene(&single_room_spec()).unwrap();
        let count = |class: SemanticClass| scene.meshes.iter().filter(|m| m.class == class).count();
        assert_eq!(count(SemanticClass::Wall), 4);
        assert_eq!(count(SemanticClass::Floor), 1);
        assert_eq!(count(SemanticClass::Ceiling), 1);
        assert_eq!(scene.meshes.len(), 6);
        assert_eq!(scene.floor_z, 0.0);
        assert_eq!(scene.ceiling_z, 2.5);
    }

    #[test]
    fn column_adds_four_faces() {
        let mut spec = single_room_spec();
        spec.columns.push(ColumnSpec { x: 2.0, y: 1.5, size: 0.3 });
        let scene = generate_scene(&spec).unwrap();
        let columns: Vec<_> = scene
            .meshes
            .iter()
            .filter(|m| m.class == SemanticClass::Column)
            .collect();
        assert_eq!(columns.len(), 1);
        // 4 vertical faces, 2 triangles each.
        assert_eq!(columns[0].triangles.len(), 8);
        assert_eq!(scene.meshes.len(), 7);
    }

    #[test]
    fn empty_room_list_is_invalid() {
        let mut spec = single_room_spec();
        spec.rooms.clear();
        assert!(generate_scene(&spec).is_err());
    }

    #[test]
    fn zero_area_room_is_invalid() {
        let mut spec = single_room_spec();
        spec.rooms.push(RoomSpec { x: 5.0, y: 5.0, w: 0.0, h: 2.0 });
        assert!(generate_scene(&spec).is_err());
    }

    #[test]
    fn overlapping_rooms_open_a_passage() {
        // Two rooms overlapping in x ∈ [6, 10]: the shared edge portions
        // must be removed so the rooms connect.
        let spec = SceneSpec {
            rooms: vec![
                RoomSpec { x: 0.0, y: 0.0, w: 10.0, h: 4.0 },
                RoomSpec { x: 6.0, y: 0.0, w: 4.0, h: 8.0 },
            ],
            wall_thickness: 0.1,
            floor_z: 0.0,
            ceiling_z: 2.5,
            columns: vec![],
        };
        let scene = generate_scene(&spec).unwrap();
        // No wall vertex may fall strictly inside either room's interior
        // (shrunk a little to ignore boundary vertices).
        for mesh in scene.meshes.iter().filter(|m| m.class == SemanticClass::Wall) {
            for tri in &mesh.triangles {
                for v in tri {
                    for r in &spec.rooms {
                        let inside = v.x > r.x + 1e-9
                            && v.x < r.x + r.w - 1e-9
                            && v.y > r.y + 1e-9
                            && v.y < r.y + r.h - 1e-9;
                        assert!(!inside, "wall vertex {v:?} intrudes into room {r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn sample_count_matches_area_density() {
        // Unit square (2 triangles), density 100 → 100 ± 10 points.
        let square = SemanticMesh::new(
            "floor_000",
            SemanticClass::Floor,
            horizontal_quad(Vector2::new(0.0, 0.0), Vector2::new(1.0, 1.0), 0.0).to_vec(),
        )
        .unwrap();
        let wall = SemanticMesh::new(
            "wall_000",
            SemanticClass::Wall,
            vertical_quad(Vector2::new(0.0, 0.0), Vector2::new(1.0, 0.0), 0.0, 1.0).to_vec(),
        )
        .unwrap();
        let scene = BuildingScene::new(vec![square, wall], 0.0, 1.0).unwrap();
        let cloud = sample_uniform(&scene, 100.0, 42).unwrap();
        let floor_points: Vec<_> = cloud
            .points
            .iter()
            .filter(|(_, c)| *c == SemanticClass::Floor)
            .collect();
        let n = floor_points.len() as i64;
        assert!((n - 100).abs() <= 10, "expected 100 ± 10, got {n}");
        for (p, _) in &floor_points {
            assert!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0);
            assert_eq!(p.z, 0.0);
        }
    }

    #[test]
    fn floor_slab_density() {
        let scene = generate_scene(&single_room_spec()).unwrap();
        let cloud = sample_uniform(&scene, 100.0, 3).unwrap();
        let floor_count = cloud
            .points
            .iter()
            .filter(|(_, c)| *c == SemanticClass::Floor)
            .count() as f64;
        // Slab spans the room plus wall band: 4.2 x 3.2 m.
        let expected = 4.2 * 3.2 * 100.0;
        assert!(
            (floor_count - expected).abs() < 4.0 * expected.sqrt(),
            "floor count {floor_count} vs expected {expected}"
        );
    }

    #[test]
    fn sampling_deterministic() {
        let scene = generate_scene(&single_room_spec()).unwrap();
        let a = sample_uniform(&scene, 200.0, 9).unwrap();
        let b = sample_uniform(&scene, 200.0, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn samples_lie_on_source_triangles() {
        let mut spec = single_room_spec();
        spec.columns.push(ColumnSpec { x: 1.0, y: 1.0, size: 0.4 });
        let scene = generate_scene(&spec).unwrap();
        let cloud = sample_uniform(&scene, 150.0, 11).unwrap();
        'point: for (p, class) in &cloud.points {
            for mesh in scene.meshes.iter().filter(|m| m.class == *class) {
                for tri in &mesh.triangles {
                    let n = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
                    let dist = n.normalize().dot(&(p - tri[0])).abs();
                    if dist < 1e-9 {
                        // Barycentric membership check.
                        let v0 = tri[1] - tri[0];
                        let v1 = tri[2] - tri[0];
                        let v2 = p - tri[0];
                        let d00 = v0.dot(&v0);
                        let d01 = v0.dot(&v1);
                        let d11 = v1.dot(&v1);
                        let d20 = v2.dot(&v0);
                        let d21 = v2.dot(&v1);
                        let denom = d00 * d11 - d01 * d01;
                        let b1 = (d11 * d20 - d01 * d21) / denom;
                        let b2 = (d00 * d21 - d01 * d20) / denom;
                        let b0 = 1.0 - b1 - b2;
                        if (-1e-9..=1.0 + 1e-9).contains(&b0)
                            && (-1e-9..=1.0 + 1e-9).contains(&b1)
                            && (-1e-9..=1.0 + 1e-9).contains(&b2)
                        {
                            continue 'point;
                        }
                    }
                }
            }
            panic!("sampled point {p:?} ({class}) not on any triangle of its class");
        }
    }

    #[test]
    fn per_class_share_matches_area_share() {
        // Big scene so every class exceeds 10 m².
        let spec = SceneSpec {
            rooms: vec![RoomSpec { x: 0.0, y: 0.0, w: 12.0, h: 10.0 }],
            wall_thickness: 0.2,
            floor_z: 0.0,
            ceiling_z: 3.0,
            columns: vec![],
        };
        let scene = generate_scene(&spec).unwrap();
        let total_area = scene.total_area();
        let cloud = sample_uniform(&scene, 400.0, 5).unwrap();
        let total = cloud.len() as f64;
        let mut counts: HashMap<SemanticClass, usize> = HashMap::new();
        for (_, c) in &cloud.points {
            *counts.entry(*c).or_default() += 1;
        }
        for class in [SemanticClass::Wall, SemanticClass::Floor, SemanticClass::Ceiling] {
            let area: f64 = scene
                .meshes
                .iter()
                .filter(|m| m.class == class)
                .map(|m| m.area())
                .sum();
            assert!(area >= 10.0, "class {class} area {area} too small for the test");
            let area_share = area / total_area;
            let point_share = counts[&class] as f64 / total;
            let rel = (point_share - area_share).abs() / area_share;
            assert!(rel < 0.05, "{class}: point share {point_share} vs area share {area_share}");
        }
    }

    #[test]
    fn ingest_roundtrip_bit_exact() {
        let mut spec = single_room_spec();
        spec.columns.push(ColumnSpec { x: 3.0, y: 1.0, size: 0.25 });
        let scene = generate_scene(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        crate::io::obj::export_scene(dir.path(), &scene).unwrap();
        let ingested = ingest_obj_directory(dir.path()).unwrap();
        assert_eq!(scene.meshes.len(), ingested.meshes.len());
        for (a, b) in scene.meshes.iter().zip(&ingested.meshes) {
            assert_eq!(a.entity_id, b.entity_id);
            assert_eq!(a.class, b.class);
            assert_eq!(a.triangles, b.triangles, "entity {}", a.entity_id);
        }
        let sample_a = sample_uniform(&scene, 321.0, 17).unwrap();
        let sample_b = sample_uniform(&ingested, 321.0, 17).unwrap();
        assert_eq!(sample_a, sample_b);
    }

    #[test]
    fn ingest_unknown_class_maps_to_clutter() {
        let scene = generate_scene(&single_room_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        crate::io::obj::export_scene(dir.path(), &scene).unwrap();
        // A slab entity: unknown prefix.
        std::fs::copy(
            dir.path().join("floor_000.obj"),
            dir.path().join("slab_000.obj"),
        )
        .unwrap();
        let ingested = ingest_obj_directory(dir.path()).unwrap();
        let slab = ingested.meshes.iter().find(|m| m.entity_id == "slab_000").unwrap();
        assert_eq!(slab.class, SemanticClass::Clutter);
    }

    #[test]
    fn ingest_without_floor_fails() {
        let scene = generate_scene(&single_room_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        crate::io::obj::export_scene(dir.path(), &scene).unwrap();
        std::fs::remove_file(dir.path().join("floor_000.obj")).unwrap();
        // Without a floor there is no reference height.
        assert!(ingest_obj_directory(dir.path()).is_err());
    }

    #[test]
    fn ingest_skips_empty_obj() {
        let scene = generate_scene(&single_room_spec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        crate::io::obj::export_scene(dir.path(), &scene).unwrap();
        std::fs::write(dir.path().join("wall_999.obj"), "v 0 0 0\nv 1 0 0\n").unwrap();
        let ingested = ingest_obj_directory(dir.path()).unwrap();
        assert!(ingested.meshes.iter().all(|m| m.entity_id != "wall_999"));
    }

    #[test]
    fn class_codes_round_trip() {
        for class in SemanticClass::ALL {
            assert_eq!(SemanticClass::from_code(class.code()), Some(class));
            assert_eq!(SemanticClass::from_name(class.name()), Some(class));
        }
        assert_eq!(SemanticClass::from_name("slab"), None);
        assert_eq!(SemanticClass::from_name_lossy("slab"), SemanticClass::Clutter);
    }
}
