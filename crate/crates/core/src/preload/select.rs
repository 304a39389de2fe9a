use std::collections::BTreeSet;

use super::region::{PreloadConfig, PreloadRegion};
use super::state::AircraftState;
use crate::gaze::InterestList;
use crate::geom::{Domain, Triangle};
use crate::terrain::{NodeId, TerrainNode, TerrainTree};

/// Nodes chosen for one frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Selection {
    /// Antichain of the tree, depth-first order.
    pub nodes: Vec<NodeId>,
    /// Subset of `nodes` refined because of an interest spot.
    pub interest: BTreeSet<NodeId>,
    pub bytes: u64,
    /// Base nodes merged into parents to respect the byte budget.
    pub coarsened: usize,
    pub over_budget: bool,
}

/// Chooses which terrain nodes to preload each frame.
///
/// Without a route every node outside interest spots is held to
/// `base_error`. With a planned route the bound grows with the closest
/// planned viewing distance to each node, so terrain far below or beside
/// the flight path is served coarser. Both bounds depend only on the node and the trip plan, never on
/// the current frame, so a leaf always maps to the same selected ancestor.
/// A planned route also clips the view to a corridor of `route_corridor`
/// metres either side of the flight path.
#[derive(Debug, Clone)]
pub struct Planner<'t> {
    tree: &'t TerrainTree,
    cfg: PreloadConfig,
    /// Per-node planned viewing distance over `lod_reference_agl`, capped
    /// at `lod_max_scale`.
    range_scale: Option<Vec<f64>>,
    /// Nodes touching the route corridor.
    corridor: Option<Vec<bool>>,
}

const ROUTE_SAMPLES: usize = 512;

impl<'t> Planner<'t> {
    pub fn new(tree: &'t TerrainTree, cfg: PreloadConfig) -> Self {
        Self {
            tree,
            cfg,
            range_scale: None,
            corridor: None,
        }
    }

    pub fn with_route(tree: &'t TerrainTree, cfg: PreloadConfig, route: &[AircraftState]) -> Self {
        if route.is_empty() {
            return Self::new(tree, cfg);
        }
        let stride = route.len().div_ceil(ROUTE_SAMPLES).max(1);
        let plan: Vec<&AircraftState> = route.iter().step_by(stride).collect();
        let range_scale = tree
            .nodes()
            .iter()
            .map(|n| {
                // Closest planned viewing distance: horizontal gap to the
                // node plus height above its highest sample.
                let range = plan
                    .iter()
                    .map(|s| {
                        let flat = n.domain.distance_to(s.position);
                        flat.hypot((s.altitude - n.max_height).max(0.0))
                    })
                    .fold(f64::INFINITY, f64::min);
                (range / cfg.lod_reference_agl).min(cfg.lod_max_scale)
            })
            .collect();
        let corridor = (cfg.route_corridor > 0.0).then(|| {
            let path: Vec<_> = plan
                .iter()
                .map(|s| s.position)
                .chain(route.last().map(|s| s.position))
                .collect();
            tree.nodes()
                .iter()
                .map(|n| {
                    path.windows(2)
                        .any(|w| n.domain.distance_to_segment(w[0], w[1]) <= cfg.route_corridor)
                        || n.domain.distance_to(path[0]) <= cfg.route_corridor
                })
                .collect()
        });
        Self {
            tree,
            cfg,
            range_scale: Some(range_scale),
            corridor,
        }
    }

    pub fn config(&self) -> &PreloadConfig {
        &self.cfg
    }

    /// Error bound outside interest spots. Route-aware planners scale
    /// `base_error` by viewing distance, never below `fine_error`.
    pub fn base_tolerance(&self, id: NodeId) -> f64 {
        match &self.range_scale {
            Some(k) => (self.cfg.base_error * k[id.index()]).max(self.cfg.fine_error),
            None => self.cfg.base_error,
        }
    }

    /// Error bound inside interest spots. Route-aware planners scale
    /// `fine_error` by the same distance factor as the base bound, keeping
    /// the gap between gazed-at and peripheral terrain constant.
    pub fn interest_tolerance(&self, id: NodeId) -> f64 {
        match &self.range_scale {
            Some(k) => (self.cfg.fine_error * k[id.index()]).min(self.base_tolerance(id)),
            None => self.cfg.fine_error,
        }
    }

    /// Whether `n` lies inside the corridor; always true without a route.
    pub fn in_corridor(&self, id: NodeId) -> bool {
        self.corridor.as_ref().map_or(true, |c| c[id.index()])
    }

    fn keep(&self, tri: &Triangle, n: &TerrainNode) -> bool {
        self.in_corridor(n.id) && tri.intersects_domain(&n.domain)
    }

    pub fn select(&self, region: &PreloadRegion, interests: &InterestList) -> Selection {
        let tri = region.triangle();
        // Every spot counts, even one out of view: whether a node is refined
        // must not depend on the frame.
        let discs: Vec<Domain> = interests
            .spots()
            .iter()
            .map(|s| Domain::around(s.location, s.radius))
            .collect();
        let in_interest = |n: &TerrainNode| discs.iter().any(|d| d.intersects(&n.domain));

        let nodes = self.tree.cut(
            |n| self.keep(&tri, n),
            |n| {
                let bound = if in_interest(n) {
                    self.interest_tolerance(n.id)
                } else {
                    self.base_tolerance(n.id)
                };
                n.error > bound
            },
        );
        let interest: BTreeSet<NodeId> = nodes
            .iter()
            .copied()
            .filter(|id| in_interest(self.tree.node(*id)))
            .collect();
        let bytes = self.bytes(&nodes);
        let mut sel = Selection {
            nodes,
            interest,
            bytes,
            coarsened: 0,
            over_budget: false,
        };
        if sel.bytes > self.cfg.max_bytes_per_frame {
            self.coarsen(&mut sel, &tri);
        }
        sel
    }

    fn bytes(&self, nodes: &[NodeId]) -> u64 {
        nodes.iter().map(|id| self.tree.node(*id).data_size).sum()
    }

    /// Merges base nodes into their parents, farthest from the apex first,
    /// until the selection fits the budget. Interest nodes are never merged.
    fn coarsen(&self, sel: &mut Selection, tri: &Triangle) {
        let apex = tri.0[0];
        let mut current: BTreeSet<NodeId> = sel.nodes.iter().copied().collect();
        let mut bytes = sel.bytes;
        while bytes > self.cfg.max_bytes_per_frame {
            let mut base: Vec<NodeId> = current
                .iter()
                .copied()
                .filter(|id| !sel.interest.contains(id))
                .collect();
            base.sort_by(|a, b| {
                let da = self.tree.node(*a).domain.distance_to(apex);
                let db = self.tree.node(*b).domain.distance_to(apex);
                db.total_cmp(&da).then(a.cmp(b))
            });
            let merge = base.into_iter().find_map(|id| {
                let parent = self.tree.node(id).parent?;
                let covered: Vec<NodeId> = current
                    .iter()
                    .copied()
                    .filter(|c| self.tree.is_ancestor_or_self(parent, *c))
                    .collect();
                (!covered.iter().any(|c| sel.interest.contains(c))).then_some((parent, covered))
            });
            let Some((parent, covered)) = merge else {
                sel.over_budget = true;
                break;
            };
            for c in &covered {
                current.remove(c);
                bytes -= self.tree.node(*c).data_size;
            }
            current.insert(parent);
            bytes += self.tree.node(parent).data_size;
            sel.coarsened += covered.len();
        }
        // restore depth-first order
        let order = self.tree.cut(|n| self.keep(tri, n), |n| !current.contains(&n.id));
        sel.nodes = order.into_iter().filter(|id| current.contains(id)).collect();
        sel.bytes = bytes;
    }
}

/// Nodes to preload this frame under `cfg` with no planned route.
pub fn select_preload_set(
    tree: &TerrainTree,
    region: &PreloadRegion,
    interests: &InterestList,
    cfg: &PreloadConfig,
) -> Vec<NodeId> {
    Planner::new(tree, *cfg).select(region, interests).nodes
}

/// Full-resolution reference: every leaf touching the region's triangle.
pub fn baseline_set(tree: &TerrainTree, region: &PreloadRegion) -> Vec<NodeId> {
    let tri = region.triangle();
    tree.cut(|n| tri.intersects_domain(&n.domain), |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaze::{InterestList, InterestSpot};
    use crate::geom::Point;
    use crate::terrain::{HeightField, TreeParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn tree(seed: u64, n: usize, alpha: f64) -> TerrainTree {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = HeightField::from_fn(n, n, 10.0, Point::origin(), |_, _| rng.gen_range(0.0..200.0))
            .unwrap();
        TerrainTree::build(Arc::new(f), TreeParams::new(alpha, 4, 4)).unwrap()
    }

    fn covering_region(t: &TerrainTree) -> PreloadRegion {
        let d = t.field().domain();
        // apex below the field, opening wide enough to swallow it
        let apex = Point::new(d.center().x, d.y_min - 1.0);
        PreloadRegion::new(apex, 0.0, 4.0 * d.height(), 1.4, 1.4)
    }

    #[test]
    fn unbounded_error_selects_root() {
        let t = tree(1, 17, 1.0);
        let cfg = PreloadConfig {
            base_error: f64::INFINITY,
            ..PreloadConfig::default()
        };
        let sel = select_preload_set(&t, &covering_region(&t), &InterestList::new(4), &cfg);
        assert_eq!(sel, vec![NodeId(0)]);
    }

    #[test]
    fn interest_disc_is_served_at_leaf_level() {
        let t = tree(2, 33, 5.0);
        let center = t.field().domain().center();
        let list = InterestList::from_spots(vec![InterestSpot::new(center, 10.0, 40.0, "t")], 4);
        let cfg = PreloadConfig {
            base_error: 1e9,
            fine_error: t.alpha(),
            ..PreloadConfig::default()
        };
        let sel = Planner::new(&t, cfg).select(&covering_region(&t), &list);
        let in_disc: Vec<_> = sel
            .nodes
            .iter()
            .filter(|id| t.node(**id).domain.intersects_disc(center, 40.0))
            .collect();
        assert!(!in_disc.is_empty());
        for id in in_disc {
            assert!(t.node(*id).is_leaf());
            assert!(sel.interest.contains(id));
        }
        assert!(sel.nodes.len() < t.leaves().count());
    }

    #[test]
    fn budget_coarsens_far_nodes_first() {
        let t = tree(3, 33, 1.0);
        let region = covering_region(&t);
        let full = Planner::new(&t, PreloadConfig { base_error: 1.0, ..Default::default() })
            .select(&region, &InterestList::new(1));
        let cfg = PreloadConfig {
            base_error: 1.0,
            max_bytes_per_frame: full.bytes / 2,
            ..Default::default()
        };
        let sel = Planner::new(&t, cfg).select(&region, &InterestList::new(1));
        assert!(sel.bytes <= cfg.max_bytes_per_frame);
        assert!(sel.coarsened > 0 && !sel.over_budget);
        assert_eq!(sel.bytes, sel.nodes.iter().map(|id| t.node(*id).data_size).sum::<u64>());
        // still an antichain
        for a in &sel.nodes {
            for b in &sel.nodes {
                assert!(a == b || !t.is_ancestor_or_self(*a, *b));
            }
        }
        let near: Vec<_> = sel.nodes.iter().filter(|id| t.node(**id).domain.distance_to(region.apex) < 20.0).collect();
        assert!(near.iter().all(|id| t.node(**id).is_leaf()));
    }

    #[test]
    fn impossible_budget_is_flagged() {
        let t = tree(4, 17, 1.0);
        let cfg = PreloadConfig {
            base_error: 1.0,
            max_bytes_per_frame: 1,
            ..Default::default()
        };
        let sel = Planner::new(&t, cfg).select(&covering_region(&t), &InterestList::new(1));
        assert!(sel.over_budget);
        assert_eq!(sel.nodes, vec![NodeId(0)]);
    }

    #[test]
    fn route_tolerance_tracks_clearance() {
        let t = tree(5, 33, 1.0);
        let cfg = PreloadConfig::default();
        let d = t.field().domain();
        let low = AircraftState::level(d.center(), 0.0, 50.0, 0.0);
        let high = AircraftState::level(d.center(), 1e6, 50.0, 0.0);
        let p_low = Planner::with_route(&t, cfg, &[low]);
        let p_high = Planner::with_route(&t, cfg, &[high]);
        assert_eq!(p_low.base_tolerance(NodeId(0)), cfg.fine_error);
        assert_eq!(p_high.base_tolerance(NodeId(0)), cfg.base_error * cfg.lod_max_scale);
        assert_eq!(p_low.interest_tolerance(NodeId(0)), 0.0);
        assert_eq!(p_high.interest_tolerance(NodeId(0)), cfg.fine_error * cfg.lod_max_scale);
        let flat = Planner::new(&t, cfg);
        assert_eq!(flat.interest_tolerance(NodeId(0)), cfg.fine_error);
    }
}
