//! Brute-force reference implementations shared by the integration suites.
//! Nothing here reuses the library's geometry or traversal code.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use gazelod::geom::Point;
use gazelod::gaze::InterestList;
use gazelod::preload::PreloadRegion;
use gazelod::terrain::{HeightField, NodeId, TerrainNode, TerrainTree, TreeParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Rough random field: white noise on top of a random plane, so that some
/// subtrees are smooth and some are not.
pub fn random_field(rng: &mut ChaCha8Rng, w: usize, h: usize, cell: f64) -> HeightField {
    let (a, b) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let amp = rng.gen_range(0.0..200.0);
    let smooth = rng.gen_bool(0.3);
    let mut noise = || rng.gen_range(0.0..1.0);
    HeightField::from_fn(w, h, cell, Point::new(-100.0, 50.0), |i, j| {
        let base = a * i as f64 + b * j as f64;
        if smooth && (i + j) % 3 != 0 {
            base
        } else {
            base + amp * noise()
        }
    })
    .unwrap()
}

pub fn random_tree(rng: &mut ChaCha8Rng, max_side: usize) -> TerrainTree {
    let w = rng.gen_range(2..=max_side);
    let h = rng.gen_range(2..=max_side);
    let field = random_field(rng, w, h, 10.0);
    let params = TreeParams::new(
        rng.gen_range(0.0..60.0),
        if rng.gen_bool(0.5) { 2 } else { 4 },
        rng.gen_range(4..=20),
    );
    TerrainTree::build(Arc::new(field), params).unwrap()
}

/// Max |h - bilinear(corners)| over the samples of `n`, straight from the
/// elevations.
pub fn brute_leaf_error(field: &HeightField, n: &TerrainNode) -> f64 {
    let r = n.rect;
    let (h00, h10) = (field.at(r.i0, r.j0), field.at(r.i1, r.j0));
    let (h11, h01) = (field.at(r.i1, r.j1), field.at(r.i0, r.j1));
    let mut worst = 0.0f64;
    for j in r.j0..=r.j1 {
        for i in r.i0..=r.i1 {
            let u = (i - r.i0) as f64 / (r.i1 - r.i0) as f64;
            let v = (j - r.j0) as f64 / (r.j1 - r.j0) as f64;
            let top = h00 + (h10 - h00) * u;
            let bottom = h01 + (h11 - h01) * u;
            let z = top + (bottom - top) * v;
            worst = worst.max((field.at(i, j) - z).abs());
        }
    }
    worst
}

pub fn samples_covered(n: &TerrainNode) -> usize {
    (n.rect.i0..=n.rect.i1).count() * (n.rect.j0..=n.rect.j1).count()
}

/// Proper ancestors of `id`, nearest first.
pub fn ancestors(tree: &TerrainTree, id: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut cur = tree.node(id).parent;
    while let Some(p) = cur {
        out.push(p);
        cur = tree.node(p).parent;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn of(n: &TerrainNode) -> Self {
        Self {
            x0: n.domain.x_min,
            x1: n.domain.x_max,
            y0: n.domain.y_min,
            y1: n.domain.y_max,
        }
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }
}

/// Exhaustive cut: a node is chosen when it touches the region, is fine
/// enough (or a leaf), and every ancestor touches the region but is too
/// coarse.
pub fn oracle_cut(
    tree: &TerrainTree,
    touches: impl Fn(&TerrainNode) -> bool,
    bound: impl Fn(&TerrainNode) -> f64,
) -> BTreeSet<NodeId> {
    tree.nodes()
        .iter()
        .filter(|n| touches(n) && (n.is_leaf() || n.error <= bound(n)))
        .filter(|n| {
            ancestors(tree, n.id).into_iter().all(|a| {
                let a = tree.node(a);
                touches(a) && a.error > bound(a)
            })
        })
        .map(|n| n.id)
        .collect()
}

/// Closed triangle/rectangle intersection by clipping the triangle against
/// the rectangle's four half-planes.
pub fn triangle_touches_rect(tri: [Point; 3], r: &Rect) -> bool {
    let mut poly: Vec<(f64, f64)> = tri.iter().map(|p| (p.x, p.y)).collect();
    let planes: [(usize, f64, bool); 4] = [(0, r.x0, true), (0, r.x1, false), (1, r.y0, true), (1, r.y1, false)];
    for (axis, lim, keep_above) in planes {
        let inside = |p: &(f64, f64)| {
            let c = if axis == 0 { p.0 } else { p.1 };
            if keep_above {
                c >= lim
            } else {
                c <= lim
            }
        };
        let mut out = Vec::new();
        for k in 0..poly.len() {
            let a = poly[k];
            let b = poly[(k + 1) % poly.len()];
            let (ia, ib) = (inside(&a), inside(&b));
            if ia {
                out.push(a);
            }
            if ia != ib {
                let (ca, cb) = if axis == 0 { (a.0, b.0) } else { (a.1, b.1) };
                let t = (lim - ca) / (cb - ca);
                out.push((a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t));
            }
        }
        if out.is_empty() {
            return false;
        }
        poly = out;
    }
    true
}

pub fn region_triangle(region: &PreloadRegion) -> [Point; 3] {
    let (s, c) = region.heading.sin_cos();
    let fwd = (-s, c);
    let left = (-c, -s);
    let d = region.distance;
    let far = (region.apex.x + fwd.0 * d, region.apex.y + fwd.1 * d);
    let wl = d * region.sigma_l.tan();
    let wr = d * region.sigma_r.tan();
    [
        region.apex,
        Point::new(far.0 + left.0 * wl, far.1 + left.1 * wl),
        Point::new(far.0 - left.0 * wr, far.1 - left.1 * wr),
    ]
}

/// Whether `n` falls under some interest spot's square footprint.
pub fn under_interest(n: &TerrainNode, interests: &InterestList) -> bool {
    let r = Rect::of(n);
    interests.spots().iter().any(|s| {
        let sq = Rect {
            x0: s.location.x - s.radius,
            x1: s.location.x + s.radius,
            y0: s.location.y - s.radius,
            y1: s.location.y + s.radius,
        };
        r.overlaps(&sq)
    })
}

/// Random view region somewhere around the field.
pub fn random_region(rng: &mut ChaCha8Rng, field: &HeightField) -> PreloadRegion {
    let d = field.domain();
    let apex = Point::new(
        rng.gen_range(d.x_min - 100.0..d.x_max + 100.0),
        rng.gen_range(d.y_min - 100.0..d.y_max + 100.0),
    );
    PreloadRegion::new(
        apex,
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        rng.gen_range(10.0..600.0),
        rng.gen_range(0.02..1.5),
        rng.gen_range(0.02..1.5),
    )
}
