//! Entropy-maximal floodings on metric trees.
//!
//! On a tree the maximizing flooding is explicit: the single source sits at
//! the centroid (the unique point whose removal leaves components of length
//! at most `zeta/2`), each arm moves at a rate proportional to the
//! uncovered length beyond it, and the maximal entropy has the closed form
//!
//! ```text
//! beta* = -zeta + zeta log zeta - integral_S log |D^v_y| dy
//! ```
//!
//! where `|D^v_y|` is the length of the side of `y` away from `v`. With
//! `M` sources the supremum decomposes over partitions of the tree into
//! `M` subtrees, each flooded from its own centroid; the optimizer
//! enumerates cut-edge multisets and refines cut offsets by grid-seeded
//! golden-section search.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::entropy::{beta, xlogx};
use crate::flooding::{structure_checks, Dir, Flooding, RatePolicy, StageCtx};
use crate::graph::{CombGraph, Component, GraphError, GraphPoint, MetricGraph};
use crate::TOL;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("NotATree: operation requires a tree metric graph")]
    NotATree,
    #[error("InfeasibleM: cannot place {m} sources on this tree")]
    InfeasibleM { m: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("Flood: {0}")]
    Flood(String),
}

/// Mass hanging off vertex `v` through incident edge `e` (including `e`).
fn branch_masses(g: &MetricGraph) -> Vec<Vec<f64>> {
    // masses[v][k] matches g.incident_edges(v)[k].
    let n = g.vertex_count();
    let mut masses = vec![Vec::new(); n];
    for v in 0..n {
        masses[v] = vec![0.0; g.degree(v)];
    }
    // Iterative post-order from vertex 0.
    let mut order = Vec::with_capacity(n);
    let mut parent_edge = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![0usize];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(eid, at_tail) in g.incident_edges(v) {
            let w = if at_tail { g.edges()[eid].head } else { g.edges()[eid].tail };
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                parent_edge[w] = eid;
                stack.push(w);
            }
        }
    }
    // Downward masses (away from the root).
    let mut down = vec![0.0; g.edge_count()];
    for &v in order.iter().rev() {
        if parent[v] == usize::MAX {
            continue;
        }
        let mut sum = g.edge_len(parent_edge[v]);
        for &(eid, _) in g.incident_edges(v) {
            if eid != parent_edge[v] {
                sum += down[eid];
            }
        }
        down[parent_edge[v]] = sum;
    }
    let zeta = g.total_length();
    for v in 0..n {
        for (k, &(eid, _)) in g.incident_edges(v).iter().enumerate() {
            let toward_root = parent_edge[v] == eid;
            // Through the parent edge: everything outside v's own subtree,
            // plus the edge itself.
            masses[v][k] =
                if toward_root { zeta - down[eid] + g.edge_len(eid) } else { down[eid] };
        }
    }
    masses
}

/// The unique point of a metric tree whose removal leaves components of
/// length at most `zeta/2`.
pub fn centroid(g: &MetricGraph) -> Result<GraphPoint, TreeError> {
    if !g.is_tree() {
        return Err(TreeError::NotATree);
    }
    let zeta = g.total_length();
    let half = zeta / 2.0;
    let masses = branch_masses(g);
    let mut v = 0usize;
    let mut steps = 0;
    loop {
        steps += 1;
        if steps > g.vertex_count() + 1 {
            return Err(TreeError::Flood("centroid walk failed to converge".into()));
        }
        let heavy = g
            .incident_edges(v)
            .iter()
            .enumerate()
            .find(|(k, _)| masses[v][*k] > half + TOL);
        let (k, &(eid, at_tail)) = match heavy {
            None => return Ok(g.vertex_point(v)),
            Some((k, e)) => (k, e),
        };
        // Mass strictly on v's side of the edge interior.
        let side_v = zeta - masses[v][k];
        let s = half - side_v; // distance from v along the edge
        let len = g.edge_len(eid);
        if s >= len - TOL {
            v = if at_tail { g.edges()[eid].head } else { g.edges()[eid].tail };
            continue;
        }
        let offset = if at_tail { s } else { len - s };
        return Ok(g.point(eid, offset)?);
    }
}

/// Centroids of a combinatorial tree: vertices whose removal leaves
/// subtrees of at most `N/2` vertices. One or two results; two are adjacent.
pub fn discrete_centroids(g: &CombGraph) -> Result<Vec<usize>, TreeError> {
    if !g.is_tree() {
        return Err(TreeError::NotATree);
    }
    let n = g.vertex_count();
    let mut out = Vec::new();
    for v in 0..n {
        let ok = g.adj[v].iter().all(|&w| 2 * g.side_count(w, v) <= n);
        if ok {
            out.push(v);
        }
    }
    Ok(out)
}

/// Rate policy realizing the entropy maximum on trees: each arm's rate is
/// the uncovered length strictly beyond it (within its destined territory,
/// for multi-source floodings) divided by the total uncovered length.
pub struct ProportionalPolicy {
    territories: Option<Vec<Vec<(usize, f64, f64)>>>,
}

impl ProportionalPolicy {
    /// Single-source form: territory is the whole tree.
    pub fn single() -> Self {
        ProportionalPolicy { territories: None }
    }

    /// Multi-source form with one territory (interval list) per source.
    pub fn with_territories(territories: Vec<Vec<(usize, f64, f64)>>) -> Self {
        ProportionalPolicy { territories: Some(territories) }
    }
}

fn interval_overlap(a: &[(usize, f64, f64)], b: &[(usize, f64, f64)]) -> f64 {
    let mut sum = 0.0;
    for &(e1, lo1, hi1) in a {
        for &(e2, lo2, hi2) in b {
            if e1 == e2 {
                sum += (hi1.min(hi2) - lo1.max(lo2)).max(0.0);
            }
        }
    }
    sum
}

impl RatePolicy for ProportionalPolicy {
    fn rates(&mut self, ctx: &StageCtx) -> Vec<f64> {
        let masses: Vec<f64> = (0..ctx.arms.len())
            .map(|i| {
                let region = ctx.uncovered_beyond(i);
                match &self.territories {
                    None => region.iter().map(|&(_, lo, hi)| hi - lo).sum(),
                    Some(t) => interval_overlap(&region, &t[ctx.arms[i].component]),
                }
            })
            .collect();
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return masses;
        }
        masses.iter().map(|&m| m / total).collect()
    }
}

/// `integral_S log |D^v_y| dy`, evaluated segment-by-segment in closed form
/// using the antiderivative `(u + gamma) log (u + gamma) - u`.
pub fn log_side_mass_integral(g: &MetricGraph, v: GraphPoint) -> Result<f64, TreeError> {
    if !g.is_tree() {
        return Err(TreeError::NotATree);
    }
    let masses = branch_masses(g);
    // Beyond-mass at vertex w, excluding incident edge `skip`.
    let gamma_at = |w: usize, skip: usize| -> f64 {
        g.incident_edges(w)
            .iter()
            .enumerate()
            .filter(|(_, &(eid, _))| eid != skip)
            .map(|(k, _)| masses[w][k])
            .sum()
    };
    // Directed segments away from v: (length, mass strictly beyond far end).
    let mut segments: Vec<(f64, f64)> = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new(); // (vertex, edge arrived through)
    match g.vertex_of(v) {
        Some(w) => {
            for &(eid, at_tail) in g.incident_edges(w) {
                let far = if at_tail { g.edges()[eid].head } else { g.edges()[eid].tail };
                segments.push((g.edge_len(eid), gamma_at(far, eid)));
                stack.push((far, eid));
            }
        }
        None => {
            let e = &g.edges()[v.edge];
            segments.push((v.offset, gamma_at(e.tail, v.edge)));
            segments.push((e.len - v.offset, gamma_at(e.head, v.edge)));
            stack.push((e.tail, v.edge));
            stack.push((e.head, v.edge));
        }
    }
    while let Some((w, via)) = stack.pop() {
        for &(eid, at_tail) in g.incident_edges(w) {
            if eid == via {
                continue;
            }
            let far = if at_tail { g.edges()[eid].head } else { g.edges()[eid].tail };
            segments.push((g.edge_len(eid), gamma_at(far, eid)));
            stack.push((far, eid));
        }
    }
    let mut integral = 0.0;
    for (len, gamma) in segments {
        integral += xlogx(gamma + len) - len - xlogx(gamma);
    }
    Ok(integral)
}

/// Closed-form supremum of `beta` over single-source floodings rooted at `v`.
pub fn beta_star_single(g: &MetricGraph, v: GraphPoint) -> Result<f64, TreeError> {
    let zeta = g.total_length();
    Ok(-zeta + xlogx(zeta) - log_side_mass_integral(g, v)?)
}

/// Decomposition of a tree into `M` subtree territories with their sources.
#[derive(Debug, Clone)]
pub struct PartitionPlan {
    pub cuts: Vec<GraphPoint>,
    pub components: Vec<Component>,
    pub sources: Vec<GraphPoint>,
    pub objective: f64,
    /// True when an optimal cut landed at the boundary of its search box
    /// (i.e. at a vertex).
    pub boundary_cut: bool,
}

/// Result of the tree optimizer.
pub struct OptimalFlooding {
    pub flooding: Flooding,
    pub plan: PartitionPlan,
    pub beta_star: f64,
}

/// Entropy-maximal flooding on a metric tree with `M` sources.
pub fn optimal_flooding(g: &Arc<MetricGraph>, m: usize) -> Result<OptimalFlooding, TreeError> {
    if !g.is_tree() {
        return Err(TreeError::NotATree);
    }
    if m == 0 {
        return Err(TreeError::InfeasibleM { m });
    }
    let zeta = g.total_length();
    if m == 1 {
        let v = centroid(g)?;
        let b = beta_star_single(g, v)?;
        let mut policy = ProportionalPolicy::single();
        let flooding = crate::flooding::simulate(g, &[v], &mut policy)
            .map_err(|e| TreeError::Flood(e.to_string()))?;
        let whole = Component {
            intervals: (0..g.edge_count()).map(|e| vec![(0.0, g.edge_len(e))]).collect(),
            length: zeta,
        };
        let plan = PartitionPlan {
            cuts: Vec::new(),
            components: vec![whole],
            sources: vec![v],
            objective: b,
            boundary_cut: false,
        };
        return Ok(OptimalFlooding { flooding, plan, beta_star: b });
    }

    let cuts_needed = m - 1;
    let multisets = edge_multisets(g.edge_count(), cuts_needed);
    let best = multisets
        .par_iter()
        .filter_map(|edges| optimize_offsets(g, edges, m).map(|r| (edges.clone(), r)))
        .reduce_with(|a, b| {
            let (fa, fb) = ((a.1).1, (b.1).1);
            if fb > fa + 1e-12 {
                b
            } else if fa > fb + 1e-12 {
                a
            } else if cut_key(&b.0, &(b.1).0) < cut_key(&a.0, &(a.1).0) {
                b
            } else {
                a
            }
        });
    let (edges, (offsets, objective)) = best.ok_or(TreeError::InfeasibleM { m })?;

    let cuts: Vec<GraphPoint> = edges
        .iter()
        .zip(&offsets)
        .map(|(&e, &off)| GraphPoint { edge: e, offset: off })
        .collect();
    let comps = g.components_after_removal(&cuts);
    if comps.len() != m {
        return Err(TreeError::InfeasibleM { m });
    }
    let mut sources = Vec::with_capacity(m);
    for c in &comps {
        let ex = c.extract(g)?;
        let v_local = centroid(&ex.graph)?;
        sources.push(ex.to_parent(g, v_local));
    }
    let territories: Vec<Vec<(usize, f64, f64)>> = comps
        .iter()
        .map(|c| {
            c.intervals
                .iter()
                .enumerate()
                .flat_map(|(e, ivs)| ivs.iter().map(move |&(lo, hi)| (e, lo, hi)))
                .collect()
        })
        .collect();
    let mut policy = ProportionalPolicy::with_territories(territories);
    let flooding = crate::flooding::simulate(g, &sources, &mut policy)
        .map_err(|e| TreeError::Flood(e.to_string()))?;
    let boundary_cut = cuts
        .iter()
        .any(|c| c.offset <= 1e-6 || c.offset >= g.edge_len(c.edge) - 1e-6);
    let plan = PartitionPlan { cuts, components: comps, sources, objective, boundary_cut };
    Ok(OptimalFlooding { flooding, plan, beta_star: objective })
}

fn cut_key(edges: &[usize], offsets: &[f64]) -> Vec<(usize, i64)> {
    edges
        .iter()
        .zip(offsets)
        .map(|(&e, &o)| (e, (o * 1e9) as i64))
        .collect()
}

/// Multisets of edge ids of the given size (combinations with repetition).
fn edge_multisets(edge_count: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, from: usize, n: usize, left: usize) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for e in from..n {
            current.push(e);
            rec(out, current, e, n, left - 1);
            current.pop();
        }
    }
    rec(&mut out, &mut current, 0, edge_count, size);
    out
}

/// Partition objective for fixed cut points: each component flooded from
/// its centroid. Returns `None` when the cuts do not split into the right
/// number of components.
fn partition_objective(g: &MetricGraph, cuts: &[GraphPoint], m: usize) -> Option<f64> {
    let comps = g.components_after_removal(cuts);
    if comps.len() != m {
        return None;
    }
    let zeta = g.total_length();
    let mut obj = -zeta + xlogx(zeta);
    for c in &comps {
        let ex = c.extract(g).ok()?;
        let v = centroid(&ex.graph).ok()?;
        obj -= log_side_mass_integral(&ex.graph, v).ok()?;
    }
    Some(obj)
}

/// Coordinate-descent offset optimization for one cut-edge multiset:
/// 20-point grid seeding plus golden-section refinement per coordinate.
fn optimize_offsets(
    g: &MetricGraph,
    edges: &[usize],
    m: usize,
) -> Option<(Vec<f64>, f64)> {
    const OFFSET_TOL: f64 = 1e-7;
    let margin = 1e-9;
    let mut offsets: Vec<f64> = {
        // Spread cuts sharing an edge evenly.
        let mut counts: Vec<usize> = Vec::new();
        let mut nth: Vec<usize> = Vec::new();
        for (i, &e) in edges.iter().enumerate() {
            let k = edges[..i].iter().filter(|&&x| x == e).count();
            nth.push(k);
            counts.push(edges.iter().filter(|&&x| x == e).count());
        }
        edges
            .iter()
            .zip(nth.iter().zip(&counts))
            .map(|(&e, (&k, &c))| g.edge_len(e) * (k + 1) as f64 / (c + 1) as f64)
            .collect()
    };
    let eval = |offsets: &[f64]| -> f64 {
        // Reject collided cuts on a shared edge.
        for (i, (&e1, &o1)) in edges.iter().zip(offsets).enumerate() {
            for (&e2, &o2) in edges[i + 1..].iter().zip(&offsets[i + 1..]) {
                if e1 == e2 && (o1 - o2).abs() <= TOL {
                    return f64::NEG_INFINITY;
                }
            }
        }
        let cuts: Vec<GraphPoint> = edges
            .iter()
            .zip(offsets)
            .map(|(&e, &o)| GraphPoint { edge: e, offset: o })
            .collect();
        partition_objective(g, &cuts, m).unwrap_or(f64::NEG_INFINITY)
    };
    let mut best = eval(&offsets);
    for _round in 0..50 {
        let before = best;
        for i in 0..offsets.len() {
            let len = g.edge_len(edges[i]);
            let (lo, hi) = (margin, len - margin);
            // Grid seed.
            let mut grid_best = (offsets[i], best);
            for k in 0..=20 {
                let x = lo + (hi - lo) * k as f64 / 20.0;
                let mut trial = offsets.to_vec();
                trial[i] = x;
                let v = eval(&trial);
                if v > grid_best.1 {
                    grid_best = (x, v);
                }
            }
            // Golden refinement around the best grid cell.
            let step = (hi - lo) / 20.0;
            let (a, b) = ((grid_best.0 - step).max(lo), (grid_best.0 + step).min(hi));
            let f1 = |x: f64| {
                let mut trial = offsets.to_vec();
                trial[i] = x;
                eval(&trial)
            };
            let (x, v) = golden_max(f1, a, b, OFFSET_TOL);
            if v > best {
                best = v;
                offsets[i] = x;
            } else if grid_best.1 > best {
                best = grid_best.1;
                offsets[i] = grid_best.0;
            }
        }
        if best - before <= 1e-12 {
            break;
        }
    }
    best.is_finite().then_some((offsets, best))
}

/// Golden-section maximization on `[lo, hi]` to an argument tolerance.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// One item of the optimality checklist.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct OptimalityReport {
    pub checks: Vec<PropertyCheck>,
}

impl OptimalityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the structural properties every entropy-maximal flooding must
/// satisfy: nondecreasing arm counts, no dormant arms, no leaf covered
/// early, exactly `M` components, no loops, sources at the centroids of
/// their covered components, proportional rate ratios, and equal meeting
/// speeds at the final stage. Component/centroid/ratio items apply on
/// trees; the rest apply on any graph.
pub fn verify_optimality_properties(f: &Flooding, m: usize) -> OptimalityReport {
    let g = f.graph();
    let zeta = g.total_length();
    let is_tree = g.is_tree();
    let rep = structure_checks(f);
    let mut checks = Vec::new();

    let nondecreasing = rep.m_sequence.windows(2).all(|w| w[0] <= w[1]);
    checks.push(PropertyCheck {
        name: "m_nondecreasing",
        pass: nondecreasing,
        witness: (!nondecreasing).then(|| format!("m sequence {:?}", rep.m_sequence)),
    });

    checks.push(PropertyCheck {
        name: "no_dormant_arms",
        pass: rep.dormant_arms.is_empty(),
        witness: rep
            .dormant_arms
            .first()
            .map(|&(k, j)| format!("arm {j} of stage {k} rested then resumed")),
    });

    // No vertex of degree 1 covered before the terminal time.
    let mut leaf_witness = None;
    'leaf: for s in f.stages() {
        for &t in &[0.5 * (s.t_start + s.t_end), s.t_end] {
            if t >= zeta - 1e-6 {
                continue;
            }
            let cs = f.covered_at(t).expect("in range");
            for v in 0..g.vertex_count() {
                if g.degree(v) == 1 && cs.vertex_covered(g, v) {
                    leaf_witness = Some(format!("leaf {} covered at t={t}", g.vertex_name(v)));
                    break 'leaf;
                }
            }
        }
    }
    checks.push(PropertyCheck {
        name: "no_leaf_before_terminal",
        pass: leaf_witness.is_none(),
        witness: leaf_witness,
    });

    if is_tree {
        let bad = rep
            .component_counts
            .iter()
            .enumerate()
            .find(|(_, &c)| c != m);
        checks.push(PropertyCheck {
            name: "component_count_constant",
            pass: bad.is_none(),
            witness: bad.map(|(k, &c)| format!("stage {k} has {c} components, expected {m}")),
        });
    }

    let looped = rep.has_loop.iter().position(|&l| l);
    checks.push(PropertyCheck {
        name: "no_loops",
        pass: looped.is_none(),
        witness: looped.map(|k| format!("loop within stage {k}")),
    });

    if is_tree {
        checks.push(check_sources_are_centroids(f, m));
        checks.push(check_rate_ratios(f));
        checks.push(check_meeting_speeds(f));
    }

    OptimalityReport { checks }
}

fn check_sources_are_centroids(f: &Flooding, _m: usize) -> PropertyCheck {
    let g = f.graph();
    let mut witness = None;
    'outer: for s in f.stages() {
        let t = 0.5 * (s.t_start + s.t_end);
        let cs = f.covered_at(t).expect("in range");
        let comps = cs.components(g);
        for (si, &src) in f.sources().iter().enumerate() {
            let comp = comps.iter().find(|ivs| {
                ivs.iter().any(|&(e, lo, hi)| {
                    point_on_interval(g, src, e, lo, hi)
                })
            });
            let Some(comp) = comp else { continue };
            let ivs: Vec<(usize, f64, f64)> =
                comp.iter().copied().filter(|&(_, lo, hi)| hi - lo > TOL).collect();
            if ivs.is_empty() {
                continue; // isolated point component is trivially centered
            }
            let mut intervals = vec![Vec::new(); g.edge_count()];
            let mut length = 0.0;
            for (e, lo, hi) in ivs {
                intervals[e].push((lo, hi));
                length += hi - lo;
            }
            let comp = Component { intervals, length };
            let Ok(ex) = comp.extract(g) else { continue };
            let Ok(c_local) = centroid(&ex.graph) else { continue };
            let c_parent = ex.to_parent(g, c_local);
            let d = g.distance(src, c_parent);
            if d > 1e-6 {
                witness = Some(format!(
                    "source {si} at t={t}: centroid of covered component is {d:.3e} away"
                ));
                break 'outer;
            }
        }
    }
    PropertyCheck { name: "sources_are_centroids", pass: witness.is_none(), witness }
}

fn point_on_interval(g: &MetricGraph, p: GraphPoint, e: usize, lo: f64, hi: f64) -> bool {
    if p.edge == e && p.offset >= lo - TOL && p.offset <= hi + TOL {
        return true;
    }
    if let Some(v) = g.vertex_of(p) {
        for &(eid, at_tail) in g.incident_edges(v) {
            if eid != e {
                continue;
            }
            let end = if at_tail { 0.0 } else { g.edge_len(eid) };
            if end >= lo - TOL && end <= hi + TOL {
                return true;
            }
        }
    }
    false
}

/// Rate ratios must match the ratios of uncovered lengths beyond each arm
/// within its territory (both within one source component and across).
fn check_rate_ratios(f: &Flooding) -> PropertyCheck {
    let g = f.graph();
    // Final territories: everything each component's arms ever swept.
    let m = f.sources().len();
    let mut territories: Vec<Vec<(usize, f64, f64)>> = vec![Vec::new(); m];
    for s in f.stages() {
        for a in &s.arms {
            let from = a.anchor;
            let to = a.position_at(s.duration());
            territories[a.component].push((a.edge, from.min(to), from.max(to)));
        }
    }
    let mut witness = None;
    'outer: for (k, s) in f.stages().iter().enumerate() {
        let t = 0.5 * (s.t_start + s.t_end);
        let cs = f.covered_at(t).expect("in range");
        let views: Vec<crate::flooding::ArmView> = s
            .arms
            .iter()
            .map(|a| crate::flooding::ArmView {
                edge: a.edge,
                pos: a.position_at(t - s.t_start),
                dir: a.dir,
                component: a.component,
            })
            .collect();
        let ctx = StageCtx { graph: g, t, arms: &views, covered: &cs };
        let masses: Vec<f64> = (0..views.len())
            .map(|i| interval_overlap(&ctx.uncovered_beyond(i), &territories[views[i].component]))
            .collect();
        let total_mass: f64 = masses.iter().sum();
        if total_mass <= TOL {
            continue;
        }
        for (i, a) in s.arms.iter().enumerate() {
            let expected = masses[i] / total_mass;
            if (a.rate - expected).abs() > 1e-6 {
                witness = Some(format!(
                    "stage {k} arm {i}: rate {} vs proportional {expected}",
                    a.rate
                ));
                break 'outer;
            }
        }
    }
    PropertyCheck { name: "rate_ratios", pass: witness.is_none(), witness }
}

/// Arms that meet at the terminal time must move at equal speeds.
fn check_meeting_speeds(f: &Flooding) -> PropertyCheck {
    let Some(last) = f.stages().last() else {
        return PropertyCheck { name: "equal_meeting_speeds", pass: true, witness: None };
    };
    let dt = last.duration();
    let mut witness = None;
    for (i, a) in last.arms.iter().enumerate() {
        for (j, b) in last.arms.iter().enumerate().skip(i + 1) {
            if a.edge != b.edge || a.dir == b.dir {
                continue;
            }
            let (pa, pb) = (a.position_at(dt), b.position_at(dt));
            // Meeting pair: same final point, approaching each other.
            let meets = (pa - pb).abs() <= 10.0 * TOL
                && ((a.dir == Dir::Up && a.anchor < b.anchor) || (b.dir == Dir::Up && b.anchor < a.anchor));
            // Rates inherit the cut-offset tolerance of the optimizer.
            if meets && (a.rate - b.rate).abs() > 1e-6 {
                witness = Some(format!(
                    "final-stage arms {i},{j} meet with rates {} != {}",
                    a.rate, b.rate
                ));
            }
        }
    }
    PropertyCheck { name: "equal_meeting_speeds", pass: witness.is_none(), witness }
}

/// Convenience wrapper asserting the optimizer's flooding agrees with the
/// closed form.
pub fn beta_of(f: &Flooding) -> Result<f64, TreeError> {
    beta(f).map(|r| r.beta).map_err(|e| TreeError::Flood(e.to_string()))
}
