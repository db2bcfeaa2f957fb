//! Floodings: staged piecewise-linear growth of closed subsets of a metric
//! graph.
//!
//! A flooding starts from a finite set of source points and grows along
//! "arms" (outward boundary normals), each moving at a constant rate within
//! a stage; the rates of all arms sum to one, so covered length equals
//! elapsed time. A stage ends at the first event: an arm reaches a vertex
//! (spawning one arm per uncovered incident direction) or two arms meet
//! inside an edge (annihilating). Event times are solved exactly from the
//! linear arm equations rather than time-stepped; simultaneous events
//! within [`TOL`] are coalesced into one stage boundary.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Dsu, GraphPoint, MetricGraph};
use crate::TOL;

#[derive(Debug, Error)]
pub enum FloodError {
    #[error("BadPolicy: {0}")]
    BadPolicy(String),
    #[error("StallDetected: all rates are zero on a nonempty boundary at t={0}")]
    StallDetected(f64),
    #[error("TimeOutOfRange: t={t} outside [0, {zeta}]")]
    TimeOutOfRange { t: f64, zeta: f64 },
    #[error("GraphMismatch: floodings live on different graphs")]
    GraphMismatch,
    #[error("DuplicateSource: sources must be distinct points")]
    DuplicateSource,
    #[error("NoSources: a flooding needs at least one source")]
    NoSources,
    #[error("Invariant: {0}")]
    Invariant(String),
}

/// Direction of travel along an edge: `Up` increases the offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Up,
    Down,
}

impl Dir {
    pub fn sign(self) -> f64 {
        match self {
            Dir::Up => 1.0,
            Dir::Down => -1.0,
        }
    }
}

/// Closed covered subset of `S`: sorted disjoint intervals per edge.
/// Zero-length intervals represent isolated points (sources, fresh peaks).
#[derive(Debug, Clone, Default)]
pub struct CoveredSet {
    per_edge: Vec<Vec<(f64, f64)>>,
}

impl CoveredSet {
    pub fn new(edge_count: usize) -> Self {
        CoveredSet { per_edge: vec![Vec::new(); edge_count] }
    }

    pub fn intervals(&self, edge: usize) -> &[(f64, f64)] {
        &self.per_edge[edge]
    }

    pub fn all_intervals(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.per_edge
            .iter()
            .enumerate()
            .flat_map(|(e, ivs)| ivs.iter().map(move |&(lo, hi)| (e, lo, hi)))
    }

    /// Inserts `[lo, hi]`, merging with intervals it touches (1e-12 slack —
    /// true numerical abutment only, so sub-tolerance gaps between distinct
    /// arms survive until the event logic closes them).
    pub fn insert(&mut self, edge: usize, lo: f64, hi: f64) {
        const MERGE: f64 = 1e-12;
        let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let ivs = &mut self.per_edge[edge];
        let mut i = 0;
        while i < ivs.len() {
            let (a, b) = ivs[i];
            if b < lo - MERGE {
                i += 1;
                continue;
            }
            if a > hi + MERGE {
                break;
            }
            lo = lo.min(a);
            hi = hi.max(b);
            ivs.remove(i);
        }
        ivs.insert(i.min(ivs.len()), (lo, hi));
        let mut j = 0;
        while j + 1 < ivs.len() {
            if ivs[j + 1].0 - ivs[j].1 <= MERGE {
                let merged = (ivs[j].0, ivs[j].1.max(ivs[j + 1].1));
                ivs[j] = merged;
                ivs.remove(j + 1);
            } else {
                j += 1;
            }
        }
    }

    pub fn measure(&self) -> f64 {
        self.per_edge.iter().flatten().map(|&(a, b)| b - a).sum()
    }

    /// Point membership; vertex points are checked on every incident edge.
    pub fn contains(&self, g: &MetricGraph, p: GraphPoint) -> bool {
        let hit = |edge: usize, off: f64| {
            self.per_edge[edge].iter().any(|&(a, b)| off >= a - TOL && off <= b + TOL)
        };
        if hit(p.edge, p.offset) {
            return true;
        }
        if let Some(v) = g.vertex_of(p) {
            return self.vertex_covered(g, v);
        }
        false
    }

    pub fn vertex_covered(&self, g: &MetricGraph, v: usize) -> bool {
        g.incident_edges(v).iter().any(|&(eid, at_tail)| {
            let end = if at_tail { 0.0 } else { g.edge_len(eid) };
            self.per_edge[eid].iter().any(|&(a, b)| end >= a - TOL && end <= b + TOL)
        })
    }

    /// Number of connected components (intervals glued at shared vertices).
    pub fn component_count(&self, g: &MetricGraph) -> usize {
        self.components(g).len()
    }

    /// Connected components as interval groups.
    pub fn components(&self, g: &MetricGraph) -> Vec<Vec<(usize, f64, f64)>> {
        let mut ids = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, ivs) in self.per_edge.iter().enumerate() {
            for i in 0..ivs.len() {
                index.insert((e, i), ids.len());
                ids.push((e, i));
            }
        }
        let mut dsu = Dsu::new(ids.len());
        for v in 0..g.vertex_count() {
            let mut touching: Vec<usize> = Vec::new();
            for &(eid, at_tail) in g.incident_edges(v) {
                let end = if at_tail { 0.0 } else { g.edge_len(eid) };
                for (i, &(a, b)) in self.per_edge[eid].iter().enumerate() {
                    if end >= a - TOL && end <= b + TOL {
                        touching.push(index[&(eid, i)]);
                    }
                }
            }
            for w in touching.windows(2) {
                dsu.union(w[0], w[1]);
            }
        }
        let mut groups: HashMap<usize, Vec<(usize, f64, f64)>> = HashMap::new();
        for (i, &(e, k)) in ids.iter().enumerate() {
            let (lo, hi) = self.per_edge[e][k];
            groups.entry(dsu.find(i)).or_default().push((e, lo, hi));
        }
        let mut out: Vec<Vec<(usize, f64, f64)>> = groups.into_values().collect();
        out.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        out
    }

    /// True if the covered set contains a topological loop (a cycle of
    /// fully covered edges).
    pub fn has_loop(&self, g: &MetricGraph) -> bool {
        let mut dsu = Dsu::new(g.vertex_count());
        for (e, ivs) in self.per_edge.iter().enumerate() {
            let full = ivs.len() == 1 && ivs[0].0 <= TOL && ivs[0].1 >= g.edge_len(e) - TOL;
            if full {
                let edge = &g.edges()[e];
                if !dsu.union(edge.tail, edge.head) {
                    return true;
                }
            }
        }
        false
    }

    /// Measure of the overlap with an interval list.
    pub fn overlap(&self, regions: &[(usize, f64, f64)]) -> f64 {
        regions
            .iter()
            .map(|&(e, lo, hi)| {
                self.per_edge[e]
                    .iter()
                    .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
                    .sum::<f64>()
            })
            .sum()
    }
}

/// One arm of a stage: boundary point `anchor` on `edge` moving in `dir`
/// at constant `rate`; `component` is the source territory it grew from.
#[derive(Debug, Clone, Copy)]
pub struct ArmRecord {
    pub edge: usize,
    pub anchor: f64,
    pub dir: Dir,
    pub rate: f64,
    pub component: usize,
}

impl ArmRecord {
    pub fn position_at(&self, dt: f64) -> f64 {
        self.anchor + self.dir.sign() * self.rate * dt
    }
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub t_start: f64,
    pub t_end: f64,
    pub arms: Vec<ArmRecord>,
}

impl Stage {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// A complete flooding: sources, stages, and the underlying graph.
///
/// Immutable once built; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Flooding {
    graph: Arc<MetricGraph>,
    sources: Vec<GraphPoint>,
    stages: Vec<Stage>,
}

impl Flooding {
    /// Assembles a flooding from explicit stage data, validating the stage
    /// invariants (contiguous times, simplex rates, terminal coverage time).
    pub fn from_parts(
        graph: Arc<MetricGraph>,
        sources: Vec<GraphPoint>,
        stages: Vec<Stage>,
    ) -> Result<Self, FloodError> {
        if sources.is_empty() {
            return Err(FloodError::NoSources);
        }
        let zeta = graph.total_length();
        let mut t = 0.0;
        for (i, s) in stages.iter().enumerate() {
            if (s.t_start - t).abs() > 1e-6 {
                return Err(FloodError::Invariant(format!(
                    "stage {i} starts at {} but previous ended at {t}",
                    s.t_start
                )));
            }
            if s.t_end <= s.t_start + 1e-12 {
                return Err(FloodError::Invariant(format!("stage {i} has no duration")));
            }
            let sum: f64 = s.arms.iter().map(|a| a.rate).sum();
            if s.arms.iter().any(|a| a.rate < -1e-12) || (sum - 1.0).abs() > TOL {
                return Err(FloodError::BadPolicy(format!(
                    "stage {i} rates sum to {sum}, expected 1"
                )));
            }
            t = s.t_end;
        }
        if (t - zeta).abs() > 1e-6 {
            return Err(FloodError::Invariant(format!(
                "flooding ends at {t}, total length is {zeta}"
            )));
        }
        Ok(Flooding { graph, sources, stages })
    }

    pub fn graph(&self) -> &Arc<MetricGraph> {
        &self.graph
    }

    pub fn sources(&self) -> &[GraphPoint] {
        &self.sources
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn total_time(&self) -> f64 {
        self.graph.total_length()
    }

    /// The covered set `f(t)`.
    pub fn covered_at(&self, t: f64) -> Result<CoveredSet, FloodError> {
        let zeta = self.graph.total_length();
        if !(-TOL..=zeta + TOL).contains(&t) {
            return Err(FloodError::TimeOutOfRange { t, zeta });
        }
        let mut cs = CoveredSet::new(self.graph.edge_count());
        for s in &self.sources {
            cs.insert(s.edge, s.offset, s.offset);
        }
        for stage in &self.stages {
            if stage.t_start >= t {
                break;
            }
            let dt = (t.min(stage.t_end) - stage.t_start).max(0.0);
            for arm in &stage.arms {
                let from = arm.anchor;
                let to = arm.position_at(dt);
                cs.insert(arm.edge, from, to);
            }
        }
        Ok(cs)
    }

    /// Outward normals of `f(t)` as `(point, direction)` pairs; at a stage
    /// boundary the incoming stage's post-event arms are returned.
    pub fn boundary_arms(&self, t: f64) -> Result<Vec<(GraphPoint, Dir)>, FloodError> {
        let zeta = self.graph.total_length();
        if !(0.0..zeta - TOL).contains(&t) {
            return Err(FloodError::TimeOutOfRange { t, zeta });
        }
        let stage = self
            .stages
            .iter()
            .find(|s| t >= s.t_start - TOL && t < s.t_end - TOL)
            .ok_or(FloodError::TimeOutOfRange { t, zeta })?;
        let dt = (t - stage.t_start).max(0.0);
        Ok(stage
            .arms
            .iter()
            .map(|a| (GraphPoint { edge: a.edge, offset: a.position_at(dt) }, a.dir))
            .collect())
    }

    /// Deterministic text trace: one `stage k t_start t_end` record per
    /// stage followed by one `edge_id anchor_offset direction rate` line
    /// per arm.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for (k, s) in self.stages.iter().enumerate() {
            let _ = writeln!(out, "stage {} {} {}", k + 1, s.t_start, s.t_end);
            for a in &s.arms {
                let sign = if a.dir == Dir::Up { 1 } else { -1 };
                let _ = writeln!(out, "{} {} {} {}", a.edge, a.anchor, sign, a.rate);
            }
        }
        out
    }
}

/// View of one active arm handed to rate policies.
#[derive(Debug, Clone, Copy)]
pub struct ArmView {
    pub edge: usize,
    pub pos: f64,
    pub dir: Dir,
    pub component: usize,
}

/// Stage context handed to a [`RatePolicy`] at each stage boundary.
pub struct StageCtx<'a> {
    pub graph: &'a MetricGraph,
    pub t: f64,
    pub arms: &'a [ArmView],
    pub covered: &'a CoveredSet,
}

impl StageCtx<'_> {
    /// Uncovered region strictly beyond arm `i`, in its direction of travel:
    /// the interval list of uncovered points reachable from the arm without
    /// crossing covered territory.
    pub fn uncovered_beyond(&self, i: usize) -> Vec<(usize, f64, f64)> {
        let arm = self.arms[i];
        uncovered_region(self.graph, self.covered, arm.edge, arm.pos, arm.dir)
    }

    pub fn remaining_length(&self) -> f64 {
        self.graph.total_length() - self.covered.measure()
    }
}

fn uncovered_region(
    g: &MetricGraph,
    covered: &CoveredSet,
    edge: usize,
    pos: f64,
    dir: Dir,
) -> Vec<(usize, f64, f64)> {
    let mut acc = CoveredSet::new(g.edge_count());
    let mut visited = vec![false; g.vertex_count()];
    let mut stack = vec![(edge, pos, dir)];
    while let Some((e, p, d)) = stack.pop() {
        let len = g.edge_len(e);
        let ivs = covered.intervals(e);
        let (lo, hi, end_vertex) = match d {
            Dir::Up => {
                let stop = ivs
                    .iter()
                    .map(|&(a, _)| a)
                    .filter(|&a| a > p + TOL)
                    .fold(len, f64::min);
                let at_end = stop >= len - TOL;
                (p, stop, at_end.then(|| g.edges()[e].head))
            }
            Dir::Down => {
                let stop = ivs
                    .iter()
                    .map(|&(_, b)| b)
                    .filter(|&b| b < p - TOL)
                    .fold(0.0, f64::max);
                let at_end = stop <= TOL;
                (stop, p, at_end.then(|| g.edges()[e].tail))
            }
        };
        if hi - lo > TOL {
            acc.insert(e, lo, hi);
        }
        if let Some(w) = end_vertex {
            if !visited[w] && !covered.vertex_covered(g, w) {
                visited[w] = true;
                for &(gid, at_tail) in g.incident_edges(w) {
                    if gid == e {
                        continue;
                    }
                    let (start, d2) = if at_tail { (0.0, Dir::Up) } else { (g.edge_len(gid), Dir::Down) };
                    stack.push((gid, start, d2));
                }
            }
        }
    }
    acc.all_intervals().collect()
}

/// Stage-wise rate assignment: returns one nonnegative rate per arm,
/// summing to one. Policies may carry state (seeded randomness).
pub trait RatePolicy {
    fn rates(&mut self, ctx: &StageCtx) -> Vec<f64>;
}

impl<F: FnMut(&StageCtx) -> Vec<f64>> RatePolicy for F {
    fn rates(&mut self, ctx: &StageCtx) -> Vec<f64> {
        self(ctx)
    }
}

/// Equal rate `1/m` on every arm.
pub struct UniformPolicy;

impl RatePolicy for UniformPolicy {
    fn rates(&mut self, ctx: &StageCtx) -> Vec<f64> {
        let m = ctx.arms.len();
        vec![1.0 / m as f64; m]
    }
}

/// Uniform draw from the rate simplex at every stage (challenger policy).
pub struct RandomSimplexPolicy {
    rng: ChaCha8Rng,
}

impl RandomSimplexPolicy {
    pub fn new(seed: u64) -> Self {
        RandomSimplexPolicy { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl RatePolicy for RandomSimplexPolicy {
    fn rates(&mut self, ctx: &StageCtx) -> Vec<f64> {
        let m = ctx.arms.len();
        let mut v: Vec<f64> = (0..m)
            .map(|_| -(1.0 - self.rng.gen::<f64>()).ln())
            .collect();
        let sum: f64 = v.iter().sum();
        for x in &mut v {
            *x /= sum;
        }
        v
    }
}

struct ArmState {
    edge: usize,
    pos: f64,
    dir: Dir,
    component: usize,
    alive: bool,
}

/// Simulates a flooding from `sources` under `policy` until the graph is
/// fully covered.
pub fn simulate<P: RatePolicy>(
    graph: &Arc<MetricGraph>,
    sources: &[GraphPoint],
    policy: &mut P,
) -> Result<Flooding, FloodError> {
    if sources.is_empty() {
        return Err(FloodError::NoSources);
    }
    for (i, a) in sources.iter().enumerate() {
        for b in &sources[i + 1..] {
            if graph.same_point(*a, *b) {
                return Err(FloodError::DuplicateSource);
            }
        }
    }
    let zeta = graph.total_length();
    let mut covered = CoveredSet::new(graph.edge_count());
    let mut arms: Vec<ArmState> = Vec::new();
    for (ci, s) in sources.iter().enumerate() {
        covered.insert(s.edge, s.offset, s.offset);
        match graph.vertex_of(*s) {
            Some(v) => {
                for &(eid, at_tail) in graph.incident_edges(v) {
                    let (pos, dir) =
                        if at_tail { (0.0, Dir::Up) } else { (graph.edge_len(eid), Dir::Down) };
                    arms.push(ArmState { edge: eid, pos, dir, component: ci, alive: true });
                }
            }
            None => {
                arms.push(ArmState { edge: s.edge, pos: s.offset, dir: Dir::Down, component: ci, alive: true });
                arms.push(ArmState { edge: s.edge, pos: s.offset, dir: Dir::Up, component: ci, alive: true });
            }
        }
    }

    let mut stages: Vec<Stage> = Vec::new();
    let mut t = 0.0;
    let stage_cap = graph.vertex_count() + graph.edge_count() + sources.len() + 8;

    while arms.iter().any(|a| a.alive) {
        arms.retain(|a| a.alive);
        let views: Vec<ArmView> = arms
            .iter()
            .map(|a| ArmView { edge: a.edge, pos: a.pos, dir: a.dir, component: a.component })
            .collect();
        let ctx = StageCtx { graph, t, arms: &views, covered: &covered };
        let rates = policy.rates(&ctx);
        if rates.len() != arms.len() {
            return Err(FloodError::BadPolicy(format!(
                "policy returned {} rates for {} arms",
                rates.len(),
                arms.len()
            )));
        }
        if rates.iter().any(|&z| z < -TOL || !z.is_finite()) {
            return Err(FloodError::BadPolicy("negative or non-finite rate".into()));
        }
        let sum: f64 = rates.iter().sum();
        if sum.abs() <= TOL {
            return Err(FloodError::StallDetected(t));
        }
        if (sum - 1.0).abs() > TOL {
            return Err(FloodError::BadPolicy(format!("rates sum to {sum}, expected 1")));
        }
        let rates: Vec<f64> = rates.iter().map(|&z| z.max(0.0)).collect();

        // Earliest event over all gaps adjacent to moving arms.
        let mut dt_min = f64::INFINITY;
        for (i, arm) in arms.iter().enumerate() {
            let z = rates[i];
            if z <= 0.0 {
                continue;
            }
            // Forward target: the facing arm across this gap (if any), the
            // start of static coverage, or the edge end.
            let (target, partner) = forward_target(graph, &covered, &arms, arm);
            let dist = (target - arm.pos).abs();
            let combined = z + partner.map_or(0.0, |j| rates[j]);
            if combined > 0.0 {
                dt_min = dt_min.min(dist / combined);
            }
        }
        if !dt_min.is_finite() {
            return Err(FloodError::Invariant(format!("no reachable event at t={t}")));
        }
        let dt = dt_min;

        stages.push(Stage {
            t_start: t,
            t_end: t + dt,
            arms: arms
                .iter()
                .zip(&rates)
                .map(|(a, &z)| ArmRecord {
                    edge: a.edge,
                    anchor: a.pos,
                    dir: a.dir,
                    rate: z,
                    component: a.component,
                })
                .collect(),
        });

        // Advance and extend coverage.
        for (arm, &z) in arms.iter_mut().zip(&rates) {
            if z <= 0.0 {
                continue;
            }
            let new_pos = (arm.pos + arm.dir.sign() * z * dt)
                .clamp(0.0, graph.edge_len(arm.edge));
            covered.insert(arm.edge, arm.pos, new_pos);
            arm.pos = new_pos;
        }
        t += dt;

        transition(graph, &mut covered, &mut arms, t)?;

        if stages.len() > stage_cap {
            return Err(FloodError::Invariant(format!(
                "stage bound exceeded ({} stages)",
                stages.len()
            )));
        }
    }

    if (covered.measure() - zeta).abs() > 1e-6 {
        return Err(FloodError::Invariant(format!(
            "flooding stopped at measure {} of {zeta}",
            covered.measure()
        )));
    }
    Flooding::from_parts(Arc::clone(graph), sources.to_vec(), stages)
}

/// Where arm travel is next obstructed: the facing arm across its gap
/// (returned as a partner index), static coverage, or the edge end.
fn forward_target(
    g: &MetricGraph,
    covered: &CoveredSet,
    arms: &[ArmState],
    arm: &ArmState,
) -> (f64, Option<usize>) {
    let len = g.edge_len(arm.edge);
    let ivs = covered.intervals(arm.edge);
    let target = match arm.dir {
        Dir::Up => ivs
            .iter()
            .map(|&(a, _)| a)
            .filter(|&a| a > arm.pos + TOL)
            .fold(len, f64::min),
        Dir::Down => ivs
            .iter()
            .map(|&(_, b)| b)
            .filter(|&b| b < arm.pos - TOL)
            .fold(0.0, f64::max),
    };
    // A facing arm at the target position closes the gap from the far side.
    let partner = arms.iter().position(|o| {
        o.alive
            && o.edge == arm.edge
            && o.dir != arm.dir
            && (o.pos - target).abs() <= TOL
            && match arm.dir {
                Dir::Up => o.pos > arm.pos + TOL && o.dir == Dir::Down,
                Dir::Down => o.pos < arm.pos - TOL && o.dir == Dir::Up,
            }
    });
    (target, partner)
}

/// Post-advance event processing: vertex arrivals (with spawning), arm
/// meetings, and removal of arms whose forward gap vanished.
fn transition(
    g: &MetricGraph,
    covered: &mut CoveredSet,
    arms: &mut Vec<ArmState>,
    _t: f64,
) -> Result<(), FloodError> {
    // Vertex arrivals first: ties between a meeting and a vertex hit go to
    // the vertex.
    let mut arrivals: Vec<(usize, usize)> = Vec::new(); // (vertex, arm index)
    for (i, arm) in arms.iter_mut().enumerate() {
        if !arm.alive {
            continue;
        }
        let len = g.edge_len(arm.edge);
        let at = match arm.dir {
            Dir::Up if arm.pos >= len - TOL => Some(g.edges()[arm.edge].head),
            Dir::Down if arm.pos <= TOL => Some(g.edges()[arm.edge].tail),
            _ => None,
        };
        if let Some(v) = at {
            arm.pos = if arm.dir == Dir::Up { len } else { 0.0 };
            covered.insert(arm.edge, arm.pos, arm.pos);
            arm.alive = false;
            arrivals.push((v, i));
        }
    }
    arrivals.sort();

    // Meetings: facing pairs whose gap has closed.
    loop {
        let mut met: Option<(usize, usize)> = None;
        'outer: for i in 0..arms.len() {
            if !arms[i].alive || arms[i].dir != Dir::Up {
                continue;
            }
            for j in 0..arms.len() {
                if i == j || !arms[j].alive || arms[j].dir != Dir::Down {
                    continue;
                }
                if arms[i].edge == arms[j].edge && arms[j].pos - arms[i].pos <= TOL
                    && arms[j].pos >= arms[i].pos - 10.0 * TOL
                {
                    met = Some((i, j));
                    break 'outer;
                }
            }
        }
        match met {
            Some((i, j)) => {
                let meet = 0.5 * (arms[i].pos + arms[j].pos);
                covered.insert(arms[i].edge, arms[i].pos.min(meet), arms[j].pos.max(meet));
                arms[i].alive = false;
                arms[j].alive = false;
            }
            None => break,
        }
    }

    // Arms absorbed by static coverage (their forward gap vanished).
    for arm in arms.iter_mut() {
        if !arm.alive {
            continue;
        }
        let ivs = covered.intervals(arm.edge);
        let inside = ivs.iter().any(|&(a, b)| match arm.dir {
            Dir::Up => arm.pos >= a - TOL && arm.pos < b - TOL,
            Dir::Down => arm.pos > a + TOL && arm.pos <= b + TOL,
        });
        if inside {
            arm.alive = false;
        }
    }

    // Spawn new arms at arrival vertices, one per uncovered direction.
    let mut spawned: HashSet<(usize, bool)> = HashSet::new();
    for &(v, ai) in &arrivals {
        let component = arms[ai].component;
        for &(eid, at_tail) in g.incident_edges(v) {
            if spawned.contains(&(eid, at_tail)) {
                continue;
            }
            let end = if at_tail { 0.0 } else { g.edge_len(eid) };
            let covered_here = covered
                .intervals(eid)
                .iter()
                .any(|&(a, b)| end >= a - TOL && end <= b + TOL);
            if covered_here {
                continue;
            }
            let dir = if at_tail { Dir::Up } else { Dir::Down };
            let occupied = arms.iter().any(|o| {
                o.alive && o.edge == eid && o.dir == dir && (o.pos - end).abs() <= TOL
            });
            if occupied {
                continue;
            }
            spawned.insert((eid, at_tail));
            arms.push(ArmState { edge: eid, pos: end, dir, component, alive: true });
        }
    }

    Ok(())
}

/// Hausdorff distance between two covered sets, estimated on a `delta`-net
/// (error at most ~2 delta).
pub fn hausdorff_distance(
    g: &MetricGraph,
    a: &CoveredSet,
    b: &CoveredSet,
    net: &[GraphPoint],
) -> f64 {
    let one_sided = |from: &CoveredSet, to: &CoveredSet| -> f64 {
        let mut sup: f64 = 0.0;
        let mut candidates: Vec<GraphPoint> = Vec::new();
        for (e, lo, hi) in from.all_intervals() {
            candidates.push(GraphPoint { edge: e, offset: lo });
            candidates.push(GraphPoint { edge: e, offset: hi });
        }
        for p in net {
            if from.intervals(p.edge).iter().any(|&(a2, b2)| p.offset >= a2 - TOL && p.offset <= b2 + TOL) {
                candidates.push(*p);
            }
        }
        for p in candidates {
            sup = sup.max(point_to_set(g, p, to));
        }
        sup
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Distance from a point to a covered set (0 if the point lies inside).
pub fn point_to_set(g: &MetricGraph, p: GraphPoint, set: &CoveredSet) -> f64 {
    let mut best = f64::INFINITY;
    for (e, lo, hi) in set.all_intervals() {
        if e == p.edge && p.offset >= lo - TOL && p.offset <= hi + TOL {
            return 0.0;
        }
        let d = g
            .distance(p, GraphPoint { edge: e, offset: lo })
            .min(g.distance(p, GraphPoint { edge: e, offset: hi }));
        if d < best {
            best = d;
        }
    }
    best
}

/// Flooding distance `sup_t dist_H(f(t), g(t))` on a time grid of step
/// `delta`, with a matching `delta`-net for the Hausdorff estimates; the
/// 1-Lipschitz property bounds the total error by ~2 delta.
pub fn flooding_distance_with_resolution(
    f: &Flooding,
    g: &Flooding,
    delta: f64,
) -> Result<f64, FloodError> {
    if !same_graph(f.graph(), g.graph()) {
        return Err(FloodError::GraphMismatch);
    }
    let zeta = f.total_time();
    let steps = (zeta / delta).ceil().max(1.0) as usize;
    let net = f.graph().sample_net(delta);
    let mut sup: f64 = 0.0;
    for i in 0..=steps {
        let t = zeta * i as f64 / steps as f64;
        let a = f.covered_at(t)?;
        let b = g.covered_at(t)?;
        sup = sup.max(hausdorff_distance(f.graph(), &a, &b, &net));
    }
    Ok(sup)
}

/// Flooding distance at the default resolution `zeta / 1000`.
pub fn flooding_distance(f: &Flooding, g: &Flooding) -> Result<f64, FloodError> {
    let delta = f.total_time() / 1000.0;
    flooding_distance_with_resolution(f, g, delta)
}

fn same_graph(a: &Arc<MetricGraph>, b: &Arc<MetricGraph>) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    a.edge_count() == b.edge_count()
        && a.vertex_count() == b.vertex_count()
        && a.edges()
            .iter()
            .zip(b.edges())
            .all(|(x, y)| x.tail == y.tail && x.head == y.head && (x.len - y.len).abs() <= TOL)
}

/// Structural diagnostics used by the optimality property suite.
#[derive(Debug, Clone)]
pub struct StructureReport {
    /// Arm count per stage.
    pub m_sequence: Vec<usize>,
    /// Connected components of `f(t)` at each stage midpoint.
    pub component_counts: Vec<usize>,
    /// Loop presence at each stage midpoint.
    pub has_loop: Vec<bool>,
    /// `(stage index, arm index)` of arms that rested a full stage at the
    /// same anchor and then resumed growing.
    pub dormant_arms: Vec<(usize, usize)>,
}

pub fn structure_checks(f: &Flooding) -> StructureReport {
    let g = f.graph();
    let mut m_sequence = Vec::new();
    let mut component_counts = Vec::new();
    let mut has_loop = Vec::new();
    for s in f.stages() {
        m_sequence.push(s.arms.len());
        let mid = 0.5 * (s.t_start + s.t_end);
        let cs = f.covered_at(mid).expect("midpoint in range");
        component_counts.push(cs.component_count(g));
        has_loop.push(cs.has_loop(g));
    }
    let mut dormant_arms = Vec::new();
    let stages = f.stages();
    for k in 1..stages.len() {
        for (j, arm) in stages[k].arms.iter().enumerate() {
            if arm.rate <= 1e-12 {
                continue;
            }
            let rested = stages[k - 1].arms.iter().any(|prev| {
                prev.rate <= 1e-12
                    && prev.edge == arm.edge
                    && prev.dir == arm.dir
                    && (prev.anchor - arm.anchor).abs() <= TOL
            });
            if rested {
                dormant_arms.push((k, j));
            }
        }
    }
    StructureReport { m_sequence, component_counts, has_loop, dormant_arms }
}
