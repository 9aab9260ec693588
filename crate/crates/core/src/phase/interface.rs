//! Interface graph extraction: the band nodes of a phase map are linked into
//! a graph, traced into polylines between junctions and endpoints, and the
//! polylines are simplified to expose corners.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::{PhaseLabel, PhaseMap};
use crate::linalg2::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceOptions {
    /// Interior polyline vertices turning by more than this are corners.
    pub corner_deg: f64,
    /// Vertices turning by less than this are merged away.
    pub collinear_deg: f64,
    /// Branch points closer than this many grid steps form one junction.
    pub junction_radius: f64,
    /// Douglas–Peucker tolerance, in grid steps, removing grid staircases.
    pub simplify_tol: f64,
}

impl Default for InterfaceOptions {
    fn default() -> Self {
        InterfaceOptions { corner_deg: 20.0, collinear_deg: 1.0, junction_radius: 2.0, simplify_tol: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphNode {
    pub i: usize,
    pub j: usize,
    pub pos: Vec2,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    /// Graph node indices in tracing order.
    pub nodes: Vec<usize>,
    pub points: Vec<Vec2>,
    /// Indices into `points` that survive simplification (always includes both ends).
    pub kept: Vec<usize>,
    pub closed: bool,
}

impl Polyline {
    pub fn simplified(&self) -> Vec<Vec2> {
        self.kept.iter().map(|&k| self.points[k]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub pos: Vec2,
    pub degree: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub pos: Vec2,
    pub angle_deg: f64,
    pub polyline: usize,
    /// Index into the polyline's `points`.
    pub vertex: usize,
}

/// The discrete interface Σ as a graph of polylines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterfaceGraph {
    /// Grid step `max(hx, hy)` of the source phase map.
    pub h: f64,
    pub nodes: Vec<GraphNode>,
    pub polylines: Vec<Polyline>,
    pub junctions: Vec<Junction>,
    pub corners: Vec<Corner>,
}

impl InterfaceGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Polyline sub-ranges (inclusive point index bounds) free of corners.
    pub fn smooth_pieces(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (p, line) in self.polylines.iter().enumerate() {
            let mut cuts: Vec<usize> = self.corners.iter().filter(|c| c.polyline == p).map(|c| c.vertex).collect();
            cuts.sort_unstable();
            let mut start = 0;
            for c in cuts.into_iter().chain(core::iter::once(line.points.len() - 1)) {
                if c > start || line.points.len() == 1 {
                    out.push((p, start, c));
                }
                start = c;
            }
        }
        out
    }
}

fn turning_angle_deg(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    let (u, v) = (b - a, c - b);
    let denom = u.norm() * v.norm();
    if denom == 0.0 {
        return 0.0;
    }
    libm::acos((u.dot(v) / denom).clamp(-1.0, 1.0)).to_degrees()
}

fn douglas_peucker(points: &[Vec2], eps: f64) -> Vec<usize> {
    let n = points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let (pa, pb) = (points[a], points[b]);
        let chord = pb - pa;
        let len = chord.norm();
        let mut worst = (0.0, a);
        for (k, &p) in points.iter().enumerate().take(b).skip(a + 1) {
            let d = if len == 0.0 { (p - pa).norm() } else { chord.cross(p - pa).abs() / len };
            if d > worst.0 {
                worst = (d, k);
            }
        }
        if worst.0 > eps {
            keep[worst.1] = true;
            stack.push((a, worst.1));
            stack.push((worst.1, b));
        }
    }
    (0..n).filter(|&k| keep[k]).collect()
}

fn merge_collinear(points: &[Vec2], kept: &mut Vec<usize>, collinear_deg: f64) {
    let mut k = 1;
    while k + 1 < kept.len() {
        let angle = turning_angle_deg(points[kept[k - 1]], points[kept[k]], points[kept[k + 1]]);
        if angle < collinear_deg {
            kept.remove(k);
        } else {
            k += 1;
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Traces Σ (the band nodes) into an interface graph.
///
/// Band nodes are linked to their 4-neighbours in the band, and diagonally
/// when no shared 4-neighbour is in the band. Nodes of degree ≥ 3 within
/// `junction_radius` steps of each other form a junction. Polylines run
/// between junctions and endpoints; closed loops are traced separately.
pub fn extract_interface(pm: &PhaseMap, opts: &InterfaceOptions) -> InterfaceGraph {
    let g = pm.grid;
    let h = g.h();
    let mut graph = InterfaceGraph { h, ..InterfaceGraph::default() };
    let has_two = pm.count(PhaseLabel::TwoDim) > 0;
    if !has_two || pm.count(PhaseLabel::TwoDim) == g.len() {
        return graph;
    }

    let mut id = vec![usize::MAX; g.len()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            if pm.label(i, j) == PhaseLabel::InterfaceBand {
                id[g.index(i, j)] = graph.nodes.len();
                graph.nodes.push(GraphNode { i, j, pos: Vec2::new(g.x(i), g.y(j)), degree: 0 });
            }
        }
    }
    let in_band = |a: Option<(usize, usize)>| a.map(|(i, j)| id[g.index(i, j)]).filter(|&k| k != usize::MAX);

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes.len()];
    for (n, node) in graph.nodes.iter().enumerate() {
        let (i, j) = (node.i, node.j);
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if let Some(m) = in_band(pm.offset(i, j, di, dj)) {
                adj[n].push(m);
            }
        }
        for (di, dj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let Some(m) = in_band(pm.offset(i, j, di, dj)) else { continue };
            let bridged = in_band(pm.offset(i, j, di, 0)).is_some() || in_band(pm.offset(i, j, 0, dj)).is_some();
            if !bridged {
                adj[n].push(m);
            }
        }
    }
    for (node, a) in graph.nodes.iter_mut().zip(&adj) {
        node.degree = a.len();
    }

    // Junction clusters.
    let branch: Vec<usize> = (0..graph.nodes.len()).filter(|&n| adj[n].len() >= 3).collect();
    let mut uf = UnionFind((0..graph.nodes.len()).collect());
    let radius = opts.junction_radius * h;
    for (a_idx, &a) in branch.iter().enumerate() {
        for &b in &branch[a_idx + 1..] {
            if (graph.nodes[a].pos - graph.nodes[b].pos).max_abs() <= radius + 1e-9 * h {
                uf.union(a, b);
            }
        }
    }
    let mut cluster_of = vec![usize::MAX; graph.nodes.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    for &n in &branch {
        let next = clusters.len();
        let c = *by_root.entry(uf.find(n)).or_insert(next);
        if c == next {
            clusters.push(Vec::new());
        }
        cluster_of[n] = c;
        clusters[c].push(n);
    }
    let terminal = |n: usize| cluster_of[n] != usize::MAX || adj[n].len() != 2;

    // Trace polylines.
    let edge = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut traces: Vec<(Vec<usize>, bool)> = Vec::new();
    for t in 0..graph.nodes.len() {
        if !terminal(t) {
            continue;
        }
        if adj[t].is_empty() {
            traces.push((vec![t], false));
            continue;
        }
        for &nb in &adj[t] {
            if visited.contains(&edge(t, nb)) {
                continue;
            }
            visited.insert(edge(t, nb));
            if cluster_of[t] != usize::MAX && cluster_of[t] == cluster_of[nb] {
                continue;
            }
            let mut path = vec![t, nb];
            let (mut prev, mut cur) = (t, nb);
            while !terminal(cur) {
                let Some(&next) = adj[cur].iter().find(|&&m| m != prev) else { break };
                if !visited.insert(edge(cur, next)) {
                    break;
                }
                path.push(next);
                prev = cur;
                cur = next;
            }
            traces.push((path, false));
        }
    }
    for start in 0..graph.nodes.len() {
        let Some(&first) = adj[start].iter().find(|&&m| !visited.contains(&edge(start, m))) else { continue };
        visited.insert(edge(start, first));
        let mut path = vec![start, first];
        let (mut prev, mut cur) = (start, first);
        while cur != start {
            let Some(&next) = adj[cur].iter().find(|&&m| m != prev && !visited.contains(&edge(cur, m))) else {
                break;
            };
            visited.insert(edge(cur, next));
            path.push(next);
            prev = cur;
            cur = next;
        }
        let closed = cur == start;
        traces.push((path, closed));
    }

    // Junction degrees from polyline ends.
    let mut ends = vec![0usize; clusters.len()];
    for (path, closed) in &traces {
        if *closed {
            continue;
        }
        for &e in [path[0], path[path.len() - 1]].iter().take(if path.len() > 1 { 2 } else { 1 }) {
            if cluster_of[e] != usize::MAX {
                ends[cluster_of[e]] += 1;
            }
        }
    }
    for (c, members) in clusters.into_iter().enumerate() {
        if ends[c] < 3 {
            continue;
        }
        let mut centroid = Vec2::ZERO;
        for &m in &members {
            centroid += graph.nodes[m].pos;
        }
        let pos = centroid * (1.0 / members.len() as f64);
        graph.junctions.push(Junction { pos, degree: ends[c], members });
    }

    // Simplify and find corners.
    for (path, closed) in traces {
        let points: Vec<Vec2> = path.iter().map(|&n| graph.nodes[n].pos).collect();
        let mut kept = douglas_peucker(&points, opts.simplify_tol * h);
        merge_collinear(&points, &mut kept, opts.collinear_deg);
        let p = graph.polylines.len();
        for w in kept.windows(3) {
            let angle = turning_angle_deg(points[w[0]], points[w[1]], points[w[2]]);
            if angle > opts.corner_deg {
                graph.corners.push(Corner { pos: points[w[1]], angle_deg: angle, polyline: p, vertex: w[1] });
            }
        }
        if closed && kept.len() >= 4 {
            let angle = turning_angle_deg(points[kept[kept.len() - 2]], points[0], points[kept[1]]);
            if angle > opts.corner_deg {
                graph.corners.push(Corner { pos: points[0], angle_deg: angle, polyline: p, vertex: 0 });
            }
        }
        graph.polylines.push(Polyline { nodes: path, points, kept, closed });
    }
    graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::GridSpec;

    fn map_from(grid: GridSpec, band: impl Fn(f64, f64) -> bool, one: impl Fn(f64, f64) -> bool) -> PhaseMap {
        let mut labels = Vec::new();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = (grid.x(i), grid.y(j));
                labels.push(if band(x, y) {
                    PhaseLabel::InterfaceBand
                } else if one(x, y) {
                    PhaseLabel::OneDim
                } else {
                    PhaseLabel::TwoDim
                });
            }
        }
        PhaseMap::from_parts(grid, 1e-8, labels, vec![0.0; grid.len()]).unwrap()
    }

    #[test]
    fn douglas_peucker_keeps_real_corner() {
        let pts: Vec<Vec2> =
            (0..=10).map(|k| Vec2::new(k as f64, 0.0)).chain((1..=10).map(|k| Vec2::new(10.0, k as f64))).collect();
        let kept = douglas_peucker(&pts, 0.5);
        assert_eq!(kept, vec![0, 10, 20]);
    }

    #[test]
    fn staircase_collapses_to_one_segment() {
        let pts: Vec<Vec2> = (0..20).map(|k| Vec2::new((k / 2) as f64 + (k % 2) as f64, (k / 2) as f64)).collect();
        let mut kept = douglas_peucker(&pts, 0.75);
        merge_collinear(&pts, &mut kept, 1.0);
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn straight_line_has_no_features() {
        let grid = GridSpec::square(-1.0, 1.0, 21).unwrap();
        let pm = map_from(grid, |x, y| x == y, |_, _| false);
        let ig = extract_interface(&pm, &InterfaceOptions::default());
        assert_eq!(ig.polylines.len(), 1);
        assert!(ig.junctions.is_empty() && ig.corners.is_empty());
        assert_eq!(ig.polylines[0].simplified().len(), 2);
    }

    #[test]
    fn closed_square_loop_has_four_corners() {
        let grid = GridSpec::square(-2.0, 2.0, 41).unwrap();
        let on = |t: f64| (t.abs() - 1.0).abs() < 1e-9;
        let inside = |t: f64| t.abs() <= 1.0 + 1e-9;
        let pm = map_from(grid, |x, y| (on(x) && inside(y)) || (on(y) && inside(x)), |x, y| inside(x) && inside(y));
        let ig = extract_interface(&pm, &InterfaceOptions::default());
        assert_eq!(ig.polylines.len(), 1);
        assert!(ig.polylines[0].closed);
        assert!(ig.junctions.is_empty());
        assert_eq!(ig.corners.len(), 4);
        assert!(ig.corners.iter().all(|c| (c.angle_deg - 90.0).abs() < 1e-9));
    }

    #[test]
    fn t_junction() {
        let grid = GridSpec::square(-1.0, 1.0, 41).unwrap();
        let pm = map_from(grid, |x, y| y.abs() < 1e-9 || (x.abs() < 1e-9 && y < 0.0), |_, _| false);
        let ig = extract_interface(&pm, &InterfaceOptions::default());
        assert_eq!(ig.junctions.len(), 1);
        assert_eq!(ig.junctions[0].degree, 3);
        assert!(ig.junctions[0].pos.max_abs() < 1e-12);
        assert_eq!(ig.polylines.len(), 3);
    }

    #[test]
    fn all_two_dim_yields_empty_graph() {
        let grid = GridSpec::square(-1.0, 1.0, 5).unwrap();
        let pm = map_from(grid, |_, _| false, |_, _| false);
        assert!(extract_interface(&pm, &InterfaceOptions::default()).is_empty());
    }
}
