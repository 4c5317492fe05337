//! Reduce a semantic point cloud to a 2D vectorized floor plan: wall and
//! column line segments plus floor/ceiling planes, the reference map the
//! optimizer registers against.
//!
//! The extraction chain per class is slab filter → occupancy raster →
//! connected components → boundary contours (outer and hole boundaries) →
//! Douglas–Peucker simplification → collinear merge → length filter.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Plane, Segment2D};
use crate::scene::{SemanticClass, SemanticPointCloud};

/// Tunable extraction parameters with the documented defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloorplanParams {
    /// Raster cell size, meters.
    pub resolution: f64,
    /// Cell occupancy threshold: occupied iff at least this many points.
    pub min_hits: usize,
    /// Half height of the slab band around floor level, meters.
    pub half_band: f64,
    /// Segments shorter than this are dropped, meters.
    pub min_segment_length: f64,
}

impl Default for FloorplanParams {
    fn default() -> Self {
        FloorplanParams {
            resolution: 0.02,
            min_hits: 2,
            half_band: 0.20,
            min_segment_length: 0.05,
        }
    }
}

/// The registration reference: 2D segments (wall/column) plus horizontal
/// floor and ceiling planes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFloorPlan {
    pub segments: Vec<Segment2D>,
    pub floor: Plane,
    pub ceiling: Plane,
}

impl VectorFloorPlan {
    pub fn segments_of(&self, class: SemanticClass) -> impl Iterator<Item = &Segment2D> {
        self.segments.iter().filter(move |s| s.class == class)
    }
}

/// Binary occupancy grid for one semantic class.
#[derive(Debug, Clone)]
pub struct OccupancyRaster {
    pub resolution: f64,
    /// World coordinates of the (0,0) cell corner.
    pub origin: Vector2<f64>,
    pub width: usize,
    pub height: usize,
    pub grid: Vec<bool>,
    pub class: SemanticClass,
}

impl OccupancyRaster {
    pub fn occupied(&self, ix: i64, iy: i64) -> bool {
        if ix < 0 || iy < 0 || ix >= self.width as i64 || iy >= self.height as i64 {
            return false;
        }
        self.grid[iy as usize * self.width + ix as usize]
    }

    /// World coordinates of a cell center.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Vector2<f64> {
        Vector2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }
}

/// XY coordinates of the points of `class` within ±`half_band` of `floor_z`.
pub fn slab_filter(
    cloud: &SemanticPointCloud,
    floor_z: f64,
    half_band: f64,
    class: SemanticClass,
) -> Result<Vec<Vector2<f64>>> {
    if !(half_band > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "half_band must be positive, got {half_band}"
        )));
    }
    Ok(cloud
        .points
        .iter()
        .filter(|(p, c)| *c == class && (p.z - floor_z).abs() <= half_band)
        .map(|(p, _)| Vector2::new(p.x, p.y))
        .collect())
}

/// Bin 2D points into an occupancy grid. A cell is occupied iff at least
/// `min_hits` points fall in it. The origin snaps to the resolution grid.
pub fn rasterize(
    points: &[Vector2<f64>],
    resolution: f64,
    min_hits: usize,
    class: SemanticClass,
) -> Result<OccupancyRaster> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if points.is_empty() {
        return Ok(OccupancyRaster {
            resolution,
            origin: Vector2::zeros(),
            width: 0,
            height: 0,
            grid: Vec::new(),
            class,
        });
    }
    let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let origin = Vector2::new(
        (min_x / resolution).floor() * resolution,
        (min_y / resolution).floor() * resolution,
    );
    let cells: Vec<(usize, usize)> = points
        .iter()
        .map(|p| {
            (
                ((p.x - origin.x) / resolution).floor() as usize,
                ((p.y - origin.y) / resolution).floor() as usize,
            )
        })
        .collect();
    let width = cells.iter().map(|(x, _)| x + 1).max().unwrap();
    let height = cells.iter().map(|(_, y)| y + 1).max().unwrap();
    let mut hits = vec![0usize; width * height];
    for (x, y) in cells {
        hits[y * width + x] += 1;
    }
    Ok(OccupancyRaster {
        resolution,
        origin,
        width,
        height,
        grid: hits.iter().map(|&h| h >= min_hits).collect(),
        class,
    })
}

/// Extract line segments from an occupancy raster.
///
/// Components use 8-connectivity; each yields its outer boundary contour
/// plus one contour per enclosed hole (so both faces of a wall slab are
/// recovered). Contours are simplified with Douglas–Peucker at
/// ε = 2·resolution, nearly collinear consecutive edges are merged
/// (angle < 2°, gap < 3·resolution), and segments shorter than
/// `min_segment_length` are dropped.
pub fn vectorize(raster: &OccupancyRaster, min_segment_length: f64) -> Vec<Segment2D> {
    let mut segments = Vec::new();
    if raster.width == 0 || raster.height == 0 {
        return segments;
    }
    let eps = 2.0 * raster.resolution;
    let gap = 3.0 * raster.resolution;

    for contour in trace_contours(raster) {
        let pts: Vec<Vector2<f64>> = contour
            .iter()
            .map(|&(x, y)| raster.cell_center(x, y))
            .collect();
        let simplified = simplify_closed(&pts, eps);
        let merged = merge_collinear(&simplified, 2.0, gap);
        for window in merged.windows(2) {
            let (a, b) = (window[0], window[1]);
            if (b - a).norm() >= min_segment_length.max(1e-6) {
                if let Ok(seg) = Segment2D::new(a, b, raster.class) {
                    segments.push(seg);
                }
            }
        }
    }
    segments
}

/// Full plan extraction. Wall and column segments come from the slab band
/// around `floor_z`; the floor plane is the median z of floor points, the
/// ceiling plane the median z of ceiling points falling back to
/// `ceiling_z` when the cloud has none.
pub fn build_floorplan(
    cloud: &SemanticPointCloud,
    floor_z: f64,
    ceiling_z: f64,
    params: &FloorplanParams,
) -> Result<VectorFloorPlan> {
    let mut segments = Vec::new();
    for class in [SemanticClass::Wall, SemanticClass::Column] {
        let slab = slab_filter(cloud, floor_z, params.half_band, class)?;
        let raster = rasterize(&slab, params.resolution, params.min_hits, class)?;
        segments.extend(vectorize(&raster, params.min_segment_length));
    }
    if !segments.iter().any(|s| s.class == SemanticClass::Wall) {
        return Err(Error::EmptyPlan(
            "no wall segments recovered from the slab band".into(),
        ));
    }

    let floor_med = median(
        cloud
            .points
            .iter()
            .filter(|(_, c)| *c == SemanticClass::Floor)
            .map(|(p, _)| p.z),
    )
    .ok_or_else(|| Error::EmptyPlan("cloud has no floor points".into()))?;
    let ceiling_med = median(
        cloud
            .points
            .iter()
            .filter(|(_, c)| *c == SemanticClass::Ceiling)
            .map(|(p, _)| p.z),
    )
    .unwrap_or(ceiling_z);

    Ok(VectorFloorPlan {
        segments,
        floor: Plane::horizontal(floor_med),
        ceiling: Plane::horizontal(ceiling_med),
    })
}

fn median(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(v[v.len() / 2])
}

// ---------------------------------------------------------------------
// Contour tracing
// ---------------------------------------------------------------------

/// Clockwise Moore neighborhood starting east, for tracing on a grid whose
/// y axis points up in world coordinates.
const MOORE: [(i64, i64); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// All boundary contours of the raster: the outer boundary of every
/// 8-connected component plus the boundary around every enclosed hole.
fn trace_contours(raster: &OccupancyRaster) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (raster.width, raster.height);
    let mut contours = Vec::new();

    // Label foreground components (8-connectivity).
    let mut label = vec![0usize; w * h];
    let mut next_label = 0usize;
    let mut component_start = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if raster.grid[y * w + x] && label[y * w + x] == 0 {
                next_label += 1;
                component_start.push((x, y));
                let mut stack = vec![(x as i64, y as i64)];
                label[y * w + x] = next_label;
                while let Some((cx, cy)) = stack.pop() {
                    for (dx, dy) in MOORE {
                        let (nx, ny) = (cx + dx, cy + dy);
                        if nx >= 0
                            && ny >= 0
                            && (nx as usize) < w
                            && (ny as usize) < h
                            && raster.grid[ny as usize * w + nx as usize]
                            && label[ny as usize * w + nx as usize] == 0
                        {
                            label[ny as usize * w + nx as usize] = next_label;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }

    // Outer contours: start at each component's scan-order first cell,
    // entered from the west.
    for &(sx, sy) in &component_start {
        contours.push(moore_trace(raster, (sx as i64, sy as i64), (sx as i64 - 1, sy as i64)));
    }

    // Holes: background regions (4-connectivity) not reachable from the
    // raster border. The cell west of a hole's scan-order first cell is
    // foreground; trace from there around the hole.
    let mut bg_label = vec![0u8; w * h]; // 0 unvisited, 1 outside, 2 hole
    let mut queue = std::collections::VecDeque::new();
    for y in 0..h {
        for x in [0, w.saturating_sub(1)] {
            if !raster.grid[y * w + x] && bg_label[y * w + x] == 0 {
                bg_label[y * w + x] = 1;
                queue.push_back((x as i64, y as i64));
            }
        }
    }
    for x in 0..w {
        for y in [0, h.saturating_sub(1)] {
            if !raster.grid[y * w + x] && bg_label[y * w + x] == 0 {
                bg_label[y * w + x] = 1;
                queue.push_back((x as i64, y as i64));
            }
        }
    }
    while let Some((cx, cy)) = queue.pop_front() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (cx + dx, cy + dy);
            if nx >= 0
                && ny >= 0
                && (nx as usize) < w
                && (ny as usize) < h
                && !raster.grid[ny as usize * w + nx as usize]
                && bg_label[ny as usize * w + nx as usize] == 0
            {
                bg_label[ny as usize * w + nx as usize] = 1;
                queue.push_back((nx, ny));
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if !raster.grid[y * w + x] && bg_label[y * w + x] == 0 {
                // Scan-order first cell of a new hole; flood it.
                let mut hole = vec![(x as i64, y as i64)];
                bg_label[y * w + x] = 2;
                let mut i = 0;
                while i < hole.len() {
                    let (cx, cy) = hole[i];
                    i += 1;
                    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                        let (nx, ny) = (cx + dx, cy + dy);
                        if nx >= 0
                            && ny >= 0
                            && (nx as usize) < w
                            && (ny as usize) < h
                            && !raster.grid[ny as usize * w + nx as usize]
                            && bg_label[ny as usize * w + nx as usize] == 0
                        {
                            bg_label[ny as usize * w + nx as usize] = 2;
                            hole.push((nx, ny));
                        }
                    }
                }
                // First cell in scan order: its west neighbor is foreground
                // (a 4-adjacent background cell would be part of the hole).
                let start_fg = (x as i64 - 1, y as i64);
                debug_assert!(raster.occupied(start_fg.0, start_fg.1));
                contours.push(moore_trace(raster, start_fg, (x as i64, y as i64)));
            }
        }
    }

    contours
}

/// Moore-neighbor tracing with Jacob's stopping criterion: walk clockwise
/// from the backtrack cell until the start cell is re-entered from the
/// same direction.
fn moore_trace(
    raster: &OccupancyRaster,
    start: (i64, i64),
    backtrack: (i64, i64),
) -> Vec<(usize, usize)> {
    let mut contour = vec![(start.0 as usize, start.1 as usize)];
    let mut current = start;
    let mut back = backtrack;
    let initial = (start, backtrack);
    loop {
        // Index of the backtrack cell in the Moore ring around current.
        let rel = (back.0 - current.0, back.1 - current.1);
        let start_idx = MOORE.iter().position(|&d| d == rel).expect("backtrack adjacent");
        let mut found = None;
        for k in 1..=8 {
            let d = MOORE[(start_idx + k) % 8];
            let cand = (current.0 + d.0, current.1 + d.1);
            if raster.occupied(cand.0, cand.1) {
                // Backtrack = the free cell scanned just before it.
                let prev = MOORE[(start_idx + k - 1) % 8];
                found = Some((cand, (current.0 + prev.0, current.1 + prev.1)));
                break;
            }
        }
        match found {
            None => break, // isolated cell
            Some((next, next_back)) => {
                current = next;
                back = next_back;
                if (current, back) == initial {
                    break;
                }
                contour.push((current.0 as usize, current.1 as usize));
                if contour.len() > 4 * raster.width * raster.height {
                    debug_assert!(false, "contour tracing runaway");
                    break;
                }
            }
        }
    }
    contour
}

// ---------------------------------------------------------------------
// Simplification
// ---------------------------------------------------------------------

fn perpendicular_distance(p: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len < 1e-12 {
        return (p - a).norm();
    }
    ((p.x - a.x) * d.y - (p.y - a.y) * d.x).abs() / len
}

fn douglas_peucker(pts: &[Vector2<f64>], eps: f64, out: &mut Vec<Vector2<f64>>) {
    if pts.len() < 2 {
        out.extend_from_slice(pts);
        return;
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    let mut max_d = 0.0;
    let mut max_i = 0;
    for (i, p) in pts.iter().enumerate().skip(1).take(pts.len() - 2) {
        let d = perpendicular_distance(p, &first, &last);
        if d > max_d {
            max_d = d;
            max_i = i;
        }
    }
    if max_d > eps {
        douglas_peucker(&pts[..=max_i], eps, out);
        out.pop(); // avoid duplicating the split point
        douglas_peucker(&pts[max_i..], eps, out);
    } else {
        out.push(first);
        out.push(last);
    }
}

/// Douglas–Peucker for a closed contour: split at the point farthest from
/// the start, simplify both halves, stitch back into a closed polyline
/// (first point repeated at the end).
fn simplify_closed(pts: &[Vector2<f64>], eps: f64) -> Vec<Vector2<f64>> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let far = pts
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            (*a - pts[0])
                .norm()
                .partial_cmp(&(*b - pts[0]).norm())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    if far == 0 {
        return pts.to_vec();
    }
    let mut closed: Vec<Vector2<f64>> = pts.to_vec();
    closed.push(pts[0]);
    let mut out = Vec::new();
    douglas_peucker(&closed[..=far], eps, &mut out);
    out.pop();
    douglas_peucker(&closed[far..], eps, &mut out);
    out
}

fn edges_collinear(a: &Vector2<f64>, b: &Vector2<f64>, cos_tol: f64) -> bool {
    let (la, lb) = (a.norm(), b.norm());
    la > 1e-12 && lb > 1e-12 && a.dot(b) / (la * lb) > cos_tol
}

/// Merge consecutive nearly collinear edges (direction difference below
/// `angle_deg`), and bridge jog edges shorter than `max_gap` whose
/// surrounding edges are collinear. Runs to a fixpoint.
fn merge_collinear(pts: &[Vector2<f64>], angle_deg: f64, max_gap: f64) -> Vec<Vector2<f64>> {
    let cos_tol = (angle_deg * crate::geometry::RAD_PER_DEG).cos();
    let mut out: Vec<Vector2<f64>> = pts.to_vec();
    loop {
        let mut changed = false;
        // Drop interior vertices on straight runs.
        let mut i = 1;
        while i + 1 < out.len() {
            let prev = out[i] - out[i - 1];
            let next = out[i + 1] - out[i];
            if edges_collinear(&prev, &next, cos_tol) {
                out.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        // Bridge short jogs between collinear runs.
        let mut i = 1;
        while i + 2 < out.len() {
            let before = out[i] - out[i - 1];
            let jog = out[i + 1] - out[i];
            let after = out[i + 2] - out[i + 1];
            if jog.norm() < max_gap && edges_collinear(&before, &after, cos_tol) {
                out.remove(i + 1);
                out.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        // Seam of a closed loop: merge the last edge into the first.
        if out.len() > 3 && (out[0] - out[out.len() - 1]).norm() < 1e-12 {
            let last = out[out.len() - 1] - out[out.len() - 2];
            let first = out[1] - out[0];
            if edges_collinear(&last, &first, cos_tol) {
                // Drop the repeated start, re-close the loop at the
                // second-to-last vertex.
                out.pop();
                out[0] = out[out.len() - 1];
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}
