use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::{GridRect, HeightField};
use crate::error::{Error, Result};
use crate::geom::Domain;

/// Index of a node inside its [`TerrainTree`]. Ids are assigned in build
/// order and are stable for a given set of build inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How many bytes a node costs to move from the terrain server.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeModel {
    pub header_bytes: u64,
    pub bytes_per_sample: u64,
    /// Samples shipped per node. `None` ships every covered sample; `Some(n)`
    /// ships a fixed `n`-sample tile at every level of the tree.
    pub tile_samples: Option<usize>,
    pub multiplier: f64,
}

impl Default for SizeModel {
    fn default() -> Self {
        Self {
            header_bytes: 64,
            bytes_per_sample: 4,
            tile_samples: None,
            multiplier: 1.0,
        }
    }
}

impl SizeModel {
    /// Fixed-size tiles of `n` samples.
    pub fn tiled(n: usize) -> Self {
        Self {
            tile_samples: Some(n),
            ..Self::default()
        }
    }

    pub fn node_bytes(&self, point_count: usize) -> u64 {
        let samples = self.tile_samples.unwrap_or(point_count) as u64;
        let raw = self.header_bytes + self.bytes_per_sample * samples;
        (raw as f64 * self.multiplier).round() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Error threshold in meters; nodes above it are subdivided.
    pub alpha: f64,
    /// 2 (longest-axis bisection) or 4 (quadtree).
    pub max_children: usize,
    /// Nodes covering at most this many samples are never subdivided.
    pub max_points: usize,
    pub size_model: SizeModel,
}

impl TreeParams {
    pub fn new(alpha: f64, max_children: usize, max_points: usize) -> Self {
        Self {
            alpha,
            max_children,
            max_points,
            size_model: SizeModel::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.max_children != 2 && self.max_children != 4 {
            return Err(Error::invalid(format!(
                "max_children must be 2 or 4, got {}",
                self.max_children
            )));
        }
        if self.max_points < 4 {
            return Err(Error::invalid(format!(
                "max_points must be >= 4, got {}",
                self.max_points
            )));
        }
        if !(self.size_model.multiplier > 0.0) {
            return Err(Error::invalid("size multiplier must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerrainNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub rect: GridRect,
    pub domain: Domain,
    pub level: u32,
    /// Heights at the (i0, j0), (i1, j0), (i1, j1), (i0, j1) corners.
    pub corner_heights: [f64; 4],
    /// Max vertical deviation between the field and the corner surface.
    pub error: f64,
    pub max_height: f64,
    pub point_count: usize,
    pub children: Vec<NodeId>,
    pub data_size: u64,
}

impl TerrainNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Height of the node's bilinear corner surface at sample `(i, j)`.
    #[inline]
    pub fn surface_at(&self, i: usize, j: usize) -> f64 {
        surface(&self.rect, &self.corner_heights, i, j)
    }
}

#[inline]
fn surface(r: &GridRect, c: &[f64; 4], i: usize, j: usize) -> f64 {
    let tx = (i - r.i0) as f64 / r.span_x() as f64;
    let ty = (j - r.j0) as f64 / r.span_y() as f64;
    (1.0 - tx) * (1.0 - ty) * c[0] + tx * (1.0 - ty) * c[1] + tx * ty * c[2] + (1.0 - tx) * ty * c[3]
}

fn corners(field: &HeightField, r: &GridRect) -> [f64; 4] {
    [
        field.at(r.i0, r.j0),
        field.at(r.i1, r.j0),
        field.at(r.i1, r.j1),
        field.at(r.i0, r.j1),
    ]
}

/// (max |h - surface|, max h) over the closed rectangle.
fn scan(field: &HeightField, r: &GridRect, c: &[f64; 4]) -> (f64, f64) {
    let mut err = 0.0f64;
    let mut top = f64::NEG_INFINITY;
    for j in r.j0..=r.j1 {
        for i in r.i0..=r.i1 {
            let h = field.at(i, j);
            err = err.max((h - surface(r, c, i, j)).abs());
            top = top.max(h);
        }
    }
    (err, top)
}

/// Maximum vertical distance between the field and the node's corner
/// surface, over every sample inside the node's rectangle.
pub fn node_error(field: &HeightField, node: &TerrainNode) -> Result<f64> {
    let r = &node.rect;
    if !field.contains_rect(r) || r.span_x() == 0 || r.span_y() == 0 {
        return Err(Error::invalid(format!(
            "node rectangle {r:?} is not inside the {}x{} field",
            field.width(),
            field.height()
        )));
    }
    Ok(scan(field, r, &corners(field, r)).0)
}

/// Immutable multi-resolution terrain tree. Node 0 is the root.
#[derive(Debug, Clone)]
pub struct TerrainTree {
    nodes: Vec<TerrainNode>,
    params: TreeParams,
    field: Arc<HeightField>,
}

impl TerrainTree {
    /// Builds the tree top-down. A node is split while its error exceeds
    /// `alpha` and it covers more than `max_points` samples.
    pub fn build(field: Arc<HeightField>, params: TreeParams) -> Result<Self> {
        params.validate()?;
        let mut nodes: Vec<TerrainNode> = Vec::new();
        let root = field.full_rect();
        nodes.push(make_node(&field, &params, NodeId(0), None, root, 0));

        // Breadth-first: ids grow level by level.
        let mut next = 0;
        while next < nodes.len() {
            let (rect, error, level) = {
                let n = &nodes[next];
                (n.rect, n.error, n.level)
            };
            if error > params.alpha && rect.point_count() > params.max_points {
                let parts = split(&rect, params.max_children);
                if parts.len() >= 2 {
                    let parent = NodeId(next as u32);
                    let mut ids = Vec::with_capacity(parts.len());
                    for part in parts {
                        let id = NodeId(nodes.len() as u32);
                        nodes.push(make_node(&field, &params, id, Some(parent), part, level + 1));
                        ids.push(id);
                    }
                    nodes[next].children = ids;
                }
            }
            next += 1;
        }
        Ok(Self {
            nodes,
            params,
            field,
        })
    }

    pub fn root(&self) -> &TerrainNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &TerrainNode {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[TerrainNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn field(&self) -> &HeightField {
        &self.field
    }

    pub fn shared_field(&self) -> Arc<HeightField> {
        Arc::clone(&self.field)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TerrainNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    /// Walks the tree top-down and returns the cut where descent stops.
    ///
    /// Subtrees whose node fails `keep` are pruned; an internal node is
    /// expanded when `descend` holds, otherwise it is emitted. Leaves that
    /// pass `keep` are always emitted. Output is in depth-first order.
    pub fn cut(
        &self,
        mut keep: impl FnMut(&TerrainNode) -> bool,
        mut descend: impl FnMut(&TerrainNode) -> bool,
    ) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![NodeId(0)];
        while let Some(id) = stack.pop() {
            let n = self.node(id);
            if !keep(n) {
                continue;
            }
            if !n.is_leaf() && descend(n) {
                stack.extend(n.children.iter().rev().copied());
            } else {
                out.push(id);
            }
        }
        out
    }

    /// Coarsest nodes intersecting `region` whose error is within
    /// `max_error` (or that are leaves). The result tiles the part of the
    /// region covered by the tree, with disjoint interiors.
    pub fn query_nodes(&self, region: &Domain, max_error: f64) -> Vec<NodeId> {
        self.cut(|n| n.domain.intersects(region), |n| n.error > max_error)
    }

    /// Leaves of the subtree rooted at `id`.
    pub fn leaves_under(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(id) = stack.pop() {
            let n = self.node(id);
            if n.is_leaf() {
                out.push(id);
            } else {
                stack.extend(n.children.iter().rev().copied());
            }
        }
        out
    }

    pub fn is_ancestor_or_self(&self, ancestor: NodeId, mut id: NodeId) -> bool {
        loop {
            if id == ancestor {
                return true;
            }
            match self.node(id).parent {
                Some(p) => id = p,
                None => return false,
            }
        }
    }
}

fn make_node(
    field: &HeightField,
    params: &TreeParams,
    id: NodeId,
    parent: Option<NodeId>,
    rect: GridRect,
    level: u32,
) -> TerrainNode {
    let corner_heights = corners(field, &rect);
    let (error, max_height) = scan(field, &rect, &corner_heights);
    let point_count = rect.point_count();
    TerrainNode {
        id,
        parent,
        rect,
        domain: field.rect_domain(&rect),
        level,
        corner_heights,
        error,
        max_height,
        point_count,
        children: Vec::new(),
        data_size: params.size_model.node_bytes(point_count),
    }
}

/// Midpoint split on grid lines. Children share their boundary samples.
fn split(r: &GridRect, max_children: usize) -> Vec<GridRect> {
    let can_x = r.span_x() >= 2;
    let can_y = r.span_y() >= 2;
    let mid_x = r.i0 + r.span_x() / 2;
    let mid_y = r.j0 + r.span_y() / 2;
    let halves_x = || {
        [
            GridRect { i1: mid_x, ..*r },
            GridRect { i0: mid_x, ..*r },
        ]
    };
    let halves_y = || {
        [
            GridRect { j1: mid_y, ..*r },
            GridRect { j0: mid_y, ..*r },
        ]
    };
    match (max_children, can_x, can_y) {
        (_, false, false) => Vec::new(),
        (4, true, true) => vec![
            GridRect { i0: r.i0, i1: mid_x, j0: r.j0, j1: mid_y },
            GridRect { i0: mid_x, i1: r.i1, j0: r.j0, j1: mid_y },
            GridRect { i0: r.i0, i1: mid_x, j0: mid_y, j1: r.j1 },
            GridRect { i0: mid_x, i1: r.i1, j0: mid_y, j1: r.j1 },
        ],
        (4, true, false) => halves_x().to_vec(),
        (4, false, true) => halves_y().to_vec(),
        _ => {
            // Bisect the longer axis; ties go to x.
            if can_x && r.span_x() >= r.span_y() {
                halves_x().to_vec()
            } else if can_y {
                halves_y().to_vec()
            } else {
                halves_x().to_vec()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(w: usize, h: usize, f: impl FnMut(usize, usize) -> f64) -> Arc<HeightField> {
        Arc::new(HeightField::from_fn(w, h, 1.0, Point::origin(), f).unwrap())
    }

    fn random_field(seed: u64, w: usize, h: usize) -> Arc<HeightField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        field(w, h, |_, _| rng.gen_range(0.0..500.0))
    }

    #[test]
    fn flat_field_is_single_leaf() {
        let f = field(17, 9, |_, _| 100.0);
        for alpha in [0.0, 1.0, 50.0] {
            let t = TerrainTree::build(f.clone(), TreeParams::new(alpha, 4, 4)).unwrap();
            assert_eq!(t.len(), 1);
            assert_eq!(t.root().error, 0.0);
        }
    }

    #[test]
    fn planar_ramp_is_single_leaf() {
        let f = field(33, 33, |i, _| i as f64);
        let t = TerrainTree::build(f, TreeParams::new(0.001, 4, 16)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.root().error, 0.0);
    }

    #[test]
    fn center_spike_error() {
        let f = field(3, 3, |i, j| if (i, j) == (1, 1) { 10.0 } else { 0.0 });
        let t = TerrainTree::build(f.clone(), TreeParams::new(100.0, 4, 4)).unwrap();
        assert_eq!(node_error(&f, t.root()).unwrap(), 10.0);
    }

    #[test]
    fn node_error_rejects_outside_rect() {
        let f = field(5, 5, |_, _| 0.0);
        let t = TerrainTree::build(f, TreeParams::new(0.0, 4, 4)).unwrap();
        let small = field(3, 3, |_, _| 0.0);
        assert!(node_error(&small, t.root()).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        let f = field(5, 5, |_, _| 0.0);
        assert!(TerrainTree::build(f.clone(), TreeParams::new(-1.0, 4, 4)).is_err());
        assert!(TerrainTree::build(f.clone(), TreeParams::new(1.0, 3, 4)).is_err());
        assert!(TerrainTree::build(f, TreeParams::new(1.0, 4, 3)).is_err());
    }

    #[test]
    fn children_tile_parent() {
        for (d, seed) in [(2usize, 1u64), (4, 2), (4, 3), (2, 4)] {
            let f = random_field(seed, 21, 13);
            let t = TerrainTree::build(f, TreeParams::new(1.0, d, 4)).unwrap();
            for n in t.nodes() {
                if n.is_leaf() {
                    continue;
                }
                assert!(n.error > t.alpha());
                assert!((2..=d).contains(&n.children.len()));
                let area: f64 = n.children.iter().map(|c| t.node(*c).domain.area()).sum();
                assert_eq!(area, n.domain.area());
                for (a, ca) in n.children.iter().enumerate() {
                    let da = t.node(*ca).domain;
                    assert!(n.domain.contains(&da));
                    for cb in &n.children[a + 1..] {
                        assert!(!da.overlaps_interior(&t.node(*cb).domain));
                    }
                }
            }
        }
    }

    #[test]
    fn bisection_follows_longer_axis() {
        let f = random_field(9, 9, 5);
        let t = TerrainTree::build(f, TreeParams::new(0.0, 2, 4)).unwrap();
        let kids: Vec<_> = t.root().children.iter().map(|c| t.node(*c).rect).collect();
        assert_eq!(kids[0], GridRect { i0: 0, i1: 4, j0: 0, j1: 4 });
        assert_eq!(kids[1], GridRect { i0: 4, i1: 8, j0: 0, j1: 4 });
    }

    #[test]
    fn build_is_deterministic() {
        let f = random_field(5, 17, 17);
        let a = TerrainTree::build(f.clone(), TreeParams::new(2.0, 4, 8)).unwrap();
        let b = TerrainTree::build(f, TreeParams::new(2.0, 4, 8)).unwrap();
        assert_eq!(a.nodes(), b.nodes());
    }

    #[test]
    fn size_models() {
        let m = SizeModel::default();
        assert_eq!(m.node_bytes(16), 16 * 4 + 64);
        assert_eq!(SizeModel::tiled(16).node_bytes(289), 16 * 4 + 64);
        let doubled = SizeModel { multiplier: 2.0, ..m };
        assert_eq!(doubled.node_bytes(1), 136);
    }

    #[test]
    fn query_everything_at_infinite_error() {
        let f = random_field(7, 17, 17);
        let t = TerrainTree::build(f.clone(), TreeParams::new(1.0, 4, 4)).unwrap();
        assert_eq!(t.query_nodes(&f.domain(), f64::INFINITY), vec![NodeId(0)]);
        assert!(t
            .query_nodes(&Domain::new(100.0, 200.0, 0.0, 1.0), 0.0)
            .is_empty());
    }
}
