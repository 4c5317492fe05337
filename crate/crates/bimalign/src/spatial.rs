//! Exact kd-tree for nearest-neighbor and fixed-radius queries.
//!
//! Results must agree with a brute-force scan bit-for-bit: queries return
//! exact squared distances, and ties on distance resolve to the lowest
//! point index, the same rule a linear scan with strict `<` produces.

/// Balanced kd-tree over `[f64; D]` points, built by median splits.
pub struct KdTree<const D: usize> {
    points: Vec<[f64; D]>,
    // Tree stored implicitly: nodes[k] is the point index at node k.
    nodes: Vec<Node>,
    root: Option<usize>,
}

struct Node {
    point: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

fn dist2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut acc = 0.0;
    for k in 0..D {
        let d = a[k] - b[k];
        acc += d * d;
    }
    acc
}

impl<const D: usize> KdTree<D> {
    pub fn build(points: Vec<[f64; D]>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::with_capacity(points.len());
        let root = Self::build_rec(&points, &mut order[..], 0, &mut nodes);
        KdTree { points, nodes, root }
    }

    fn build_rec(
        points: &[[f64; D]],
        order: &mut [usize],
        depth: usize,
        nodes: &mut Vec<Node>,
    ) -> Option<usize> {
        if order.is_empty() {
            return None;
        }
        let axis = depth % D;
        // Median by (coordinate, index) so the structure is deterministic
        // even with duplicate coordinates.
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            points[a][axis]
                .partial_cmp(&points[b][axis])
                .unwrap()
                .then(a.cmp(&b))
        });
        let point = order[mid];
        let node_idx = nodes.len();
        nodes.push(Node {
            point,
            axis,
            left: None,
            right: None,
        });
        let (lo, hi) = order.split_at_mut(mid);
        let left = Self::build_rec(points, lo, depth + 1, nodes);
        let right = Self::build_rec(points, &mut hi[1..], depth + 1, nodes);
        nodes[node_idx].left = left;
        nodes[node_idx].right = right;
        Some(node_idx)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> &[f64; D] {
        &self.points[index]
    }

    /// Nearest point to `query`: (point index, squared distance). Ties on
    /// distance go to the lowest index.
    pub fn nearest(&self, query: &[f64; D]) -> Option<(usize, f64)> {
        let root = self.root?;
        let mut best: Option<(usize, f64)> = None;
        self.nearest_rec(root, query, &mut best);
        best
    }

    fn nearest_rec(&self, node_idx: usize, query: &[f64; D], best: &mut Option<(usize, f64)>) {
        let node = &self.nodes[node_idx];
        let d2 = dist2(query, &self.points[node.point]);
        let better = match *best {
            None => true,
            Some((bi, bd)) => d2 < bd || (d2 == bd && node.point < bi),
        };
        if better {
            *best = Some((node.point, d2));
        }
        let delta = query[node.axis] - self.points[node.point][node.axis];
        let (near, far) = if delta < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if let Some(n) = near {
            self.nearest_rec(n, query, best);
        }
        if let Some(f) = far {
            // The far side can still hold an equal-distance lower index,
            // so prune only when strictly farther.
            if best.map(|(_, bd)| delta * delta <= bd).unwrap_or(true) {
                self.nearest_rec(f, query, best);
            }
        }
    }

    /// Indices of all points within `radius` (inclusive) of `query`,
    /// in ascending index order.
    pub fn within_radius(&self, query: &[f64; D], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(root) = self.root {
            self.radius_rec(root, query, radius * radius, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn radius_rec(&self, node_idx: usize, query: &[f64; D], r2: f64, out: &mut Vec<usize>) {
        let node = &self.nodes[node_idx];
        if dist2(query, &self.points[node.point]) <= r2 {
            out.push(node.point);
        }
        let delta = query[node.axis] - self.points[node.point][node.axis];
        let (near, far) = if delta < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if let Some(n) = near {
            self.radius_rec(n, query, r2, out);
        }
        if let Some(f) = far {
            if delta * delta <= r2 {
                self.radius_rec(f, query, r2, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points<const D: usize>(n: usize, seed: u64) -> Vec<[f64; D]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| std::array::from_fn(|_| rng.gen::<f64>() * 10.0 - 5.0))
            .collect()
    }

    fn brute_nearest<const D: usize>(points: &[[f64; D]], q: &[f64; D]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            let d2 = dist2(q, p);
            if best.map(|(_, bd)| d2 < bd).unwrap_or(true) {
                best = Some((i, d2));
            }
        }
        best
    }

    #[test]
    fn nearest_matches_brute_force_exactly() {
        let points = random_points::<3>(1000, 1);
        let tree = KdTree::build(points.clone());
        let queries = random_points::<3>(500, 2);
        for q in &queries {
            let (ti, td) = tree.nearest(q).unwrap();
            let (bi, bd) = brute_nearest(&points, q).unwrap();
            assert_eq!(td, bd);
            assert_eq!(ti, bi);
        }
    }

    #[test]
    fn nearest_with_duplicates_ties_to_lowest_index() {
        let mut points = random_points::<2>(100, 3);
        // Exact duplicates at various indices.
        let dup = points[40];
        points.push(dup);
        points.push(dup);
        let tree = KdTree::build(points.clone());
        let (i, d) = tree.nearest(&dup).unwrap();
        assert_eq!(d, 0.0);
        assert_eq!(i, 40);
    }

    #[test]
    fn within_radius_matches_brute_force() {
        let points = random_points::<3>(800, 4);
        let tree = KdTree::build(points.clone());
        let queries = random_points::<3>(100, 5);
        for q in &queries {
            let got = tree.within_radius(q, 1.5);
            let want: Vec<usize> = points
                .iter()
                .enumerate()
                .filter(|(_, p)| dist2(q, p) <= 1.5 * 1.5)
                .map(|(i, _)| i)
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn empty_tree() {
        let tree: KdTree<3> = KdTree::build(vec![]);
        assert!(tree.nearest(&[0.0; 3]).is_none());
        assert!(tree.within_radius(&[0.0; 3], 1.0).is_empty());
    }
}
