//! Finite metric graphs and points on them.
//!
//! A metric graph is a finite simple connected graph with positive edge
//! lengths, realized as the metric space `S` obtained by gluing the
//! intervals `[0, len(e)]` at shared vertices. Points of `S` are
//! `(edge, offset)` pairs; pairs describing the same vertex are identified
//! by canonicalization (lowest incident edge id wins), so point equality is
//! plain field comparison.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::TOL;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("DisconnectedGraph: the edge list does not describe a connected graph")]
    DisconnectedGraph,
    #[error("SelfLoop: edge {0} connects a vertex to itself")]
    SelfLoop(String),
    #[error("ParallelEdge: duplicate edge between {0} and {1}")]
    ParallelEdge(String, String),
    #[error("NonpositiveLength: edge between {0} and {1} has length {2}")]
    NonpositiveLength(String, String, f64),
    #[error("InvalidPoint: offset {offset} outside [0, {len}] on edge {edge}")]
    InvalidPoint { edge: usize, offset: f64, len: f64 },
    #[error("NotATree: operation requires a tree metric graph")]
    NotATree,
    #[error("CoincidentPoints: the two points are equal")]
    CoincidentPoints,
    #[error("EmptyGraph: at least one edge is required")]
    EmptyGraph,
    #[error("ParseError: line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Point of the metric space `S` in canonical form.
///
/// Canonical form: a point sitting at a vertex is represented on the
/// lowest-id edge incident to that vertex, with offset exactly `0.0` or
/// exactly the edge length. Build points through [`MetricGraph::point`] or
/// [`MetricGraph::vertex_point`] to maintain this.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub len: f64,
}

/// Finite simple connected graph with positive edge lengths.
///
/// Immutable after construction; all operations are read-only, so a graph
/// can be shared freely across threads (typically behind an [`Arc`]).
#[derive(Debug, Clone)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    /// Per vertex: (edge id, endpoint is tail?) for each incident edge, ascending edge id.
    incident: Vec<Vec<(usize, bool)>>,
    /// All-pairs shortest vertex-to-vertex distances.
    vdist: Vec<Vec<f64>>,
    total_len: f64,
}

impl MetricGraph {
    /// Builds and validates a metric graph from `(tail, head, length)` triples.
    ///
    /// Vertex identifiers are arbitrary tokens; edge ids are assigned in
    /// input order and stay stable.
    pub fn from_edges<S: AsRef<str>>(list: &[(S, S, f64)]) -> Result<Arc<Self>, GraphError> {
        if list.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut id_of = |tok: &str, names: &mut Vec<String>| -> usize {
            *index.entry(tok.to_owned()).or_insert_with(|| {
                names.push(tok.to_owned());
                names.len() - 1
            })
        };
        let mut edges = Vec::with_capacity(list.len());
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        for (u, v, len) in list {
            let (u, v, len) = (u.as_ref(), v.as_ref(), *len);
            let a = id_of(u, &mut names);
            let b = id_of(v, &mut names);
            if a == b {
                return Err(GraphError::SelfLoop(u.to_owned()));
            }
            if !(len > 0.0) || !len.is_finite() {
                return Err(GraphError::NonpositiveLength(u.to_owned(), v.to_owned(), len));
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key, ()).is_some() {
                return Err(GraphError::ParallelEdge(u.to_owned(), v.to_owned()));
            }
            edges.push(Edge { tail: a, head: b, len });
        }
        let n = names.len();
        let mut incident = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            incident[e.tail].push((id, true));
            incident[e.head].push((id, false));
        }
        // BFS connectivity over vertices.
        let mut reached = vec![false; n];
        let mut queue = vec![0usize];
        reached[0] = true;
        while let Some(v) = queue.pop() {
            for &(eid, at_tail) in &incident[v] {
                let w = if at_tail { edges[eid].head } else { edges[eid].tail };
                if !reached[w] {
                    reached[w] = true;
                    queue.push(w);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(GraphError::DisconnectedGraph);
        }
        let total_len = edges.iter().map(|e| e.len).sum();
        let vdist = floyd_warshall(n, &edges);
        Ok(Arc::new(MetricGraph { names, edges, incident, vdist, total_len }))
    }

    /// Parses the text format: one `u v length` edge per line, `#` comments.
    pub fn parse(text: &str) -> Result<Arc<Self>, GraphError> {
        let mut list: Vec<(String, String, f64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (u, v, len) = match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), Some(l)) => (u, v, l),
                _ => {
                    return Err(GraphError::Parse {
                        line: i + 1,
                        reason: "expected `u v length`".into(),
                    })
                }
            };
            if it.next().is_some() {
                return Err(GraphError::Parse { line: i + 1, reason: "trailing tokens".into() });
            }
            let len: f64 = len.parse().map_err(|_| GraphError::Parse {
                line: i + 1,
                reason: format!("bad length `{len}`"),
            })?;
            list.push((u.to_owned(), v.to_owned(), len));
        }
        Self::from_edges(&list)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_len(&self, e: usize) -> f64 {
        self.edges[e].len
    }

    /// Total length `zeta` of all edges.
    pub fn total_length(&self) -> f64 {
        self.total_len
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn incident_edges(&self, v: usize) -> &[(usize, bool)] {
        &self.incident[v]
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.names.len()
    }

    /// Vertex-to-vertex shortest path distance.
    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.vdist[u][v]
    }

    /// Canonical point at a vertex: lowest incident edge id, endpoint offset.
    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        let &(eid, at_tail) = &self.incident[v][0];
        GraphPoint { edge: eid, offset: if at_tail { 0.0 } else { self.edges[eid].len } }
    }

    /// Canonicalizes `(edge, offset)`, snapping offsets within [`TOL`] of an
    /// endpoint onto the vertex representative.
    pub fn point(&self, edge: usize, offset: f64) -> Result<GraphPoint, GraphError> {
        let len = self.edges[edge].len;
        if !(-TOL..=len + TOL).contains(&offset) {
            return Err(GraphError::InvalidPoint { edge, offset, len });
        }
        if offset <= TOL {
            return Ok(self.vertex_point(self.edges[edge].tail));
        }
        if offset >= len - TOL {
            return Ok(self.vertex_point(self.edges[edge].head));
        }
        Ok(GraphPoint { edge, offset })
    }

    /// If `p` sits at a vertex, returns its id.
    pub fn vertex_of(&self, p: GraphPoint) -> Option<usize> {
        let e = &self.edges[p.edge];
        if p.offset <= TOL {
            Some(e.tail)
        } else if p.offset >= e.len - TOL {
            Some(e.head)
        } else {
            None
        }
    }

    pub fn same_point(&self, p: GraphPoint, q: GraphPoint) -> bool {
        self.distance(p, q) <= TOL
    }

    /// Metric distance between two points of `S`.
    ///
    /// Minimum over the four endpoint routes (offset to an endpoint of one
    /// edge, vertex-to-vertex shortest path, offset from an endpoint of the
    /// other); for points on the same edge the direct `|x - y|` is also a
    /// candidate, which matters on graphs with cycles.
    pub fn distance(&self, p: GraphPoint, q: GraphPoint) -> f64 {
        let (e, x) = (p.edge, p.offset);
        let (g, y) = (q.edge, q.offset);
        let (le, lg) = (self.edges[e].len, self.edges[g].len);
        let (u1, u2) = (self.edges[e].tail, self.edges[e].head);
        let (v1, v2) = (self.edges[g].tail, self.edges[g].head);
        let mut best = f64::INFINITY;
        if e == g {
            best = (x - y).abs();
        }
        let four = [
            x + self.vdist[u1][v1] + y,
            x + self.vdist[u1][v2] + (lg - y),
            (le - x) + self.vdist[u2][v1] + y,
            (le - x) + self.vdist[u2][v2] + (lg - y),
        ];
        for d in four {
            if d < best {
                best = d;
            }
        }
        best
    }

    /// Total length of the set of points whose geodesic from `v` passes
    /// through `y` (the side of `y` away from `v`). Requires a tree.
    pub fn side_mass(&self, v: GraphPoint, y: GraphPoint) -> Result<f64, GraphError> {
        if !self.is_tree() {
            return Err(GraphError::NotATree);
        }
        if self.same_point(v, y) {
            return Err(GraphError::CoincidentPoints);
        }
        let comps = self.components_after_removal(&[y]);
        for c in &comps {
            if c.contains(self, v) {
                return Ok(self.total_len - c.length);
            }
        }
        // v must land in some component of S minus {y} since v != y.
        unreachable!("point not found in any component");
    }

    /// Connected components of `S` minus a finite cut set, with exact lengths.
    pub fn components_after_removal(&self, cut: &[GraphPoint]) -> Vec<Component> {
        // Split each edge at its interior cut offsets; vertices in the cut
        // set disconnect the segments that meet there.
        let mut cut_offsets: Vec<Vec<f64>> = vec![Vec::new(); self.edges.len()];
        let mut vertex_cut = vec![false; self.names.len()];
        for p in cut {
            match self.vertex_of(*p) {
                Some(v) => vertex_cut[v] = true,
                None => cut_offsets[p.edge].push(p.offset),
            }
        }
        for offs in &mut cut_offsets {
            offs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            offs.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        }
        // Segment list per edge; union-find over segments plus vertices.
        #[derive(Clone, Copy)]
        struct Seg {
            edge: usize,
            lo: f64,
            hi: f64,
        }
        let mut segs: Vec<Seg> = Vec::new();
        let mut seg_touch: Vec<(Option<usize>, Option<usize>)> = Vec::new(); // vertex at lo / hi end
        for (eid, e) in self.edges.iter().enumerate() {
            let mut bounds = vec![0.0];
            bounds.extend_from_slice(&cut_offsets[eid]);
            bounds.push(e.len);
            for w in bounds.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                if hi - lo <= TOL {
                    continue;
                }
                let at_lo = (lo <= TOL && !vertex_cut[e.tail]).then_some(e.tail);
                let at_hi = (hi >= e.len - TOL && !vertex_cut[e.head]).then_some(e.head);
                segs.push(Seg { edge: eid, lo, hi });
                seg_touch.push((at_lo, at_hi));
            }
        }
        let n_seg = segs.len();
        let mut dsu = Dsu::new(n_seg + self.names.len());
        for (i, touch) in seg_touch.iter().enumerate() {
            if let Some(v) = touch.0 {
                dsu.union(i, n_seg + v);
            }
            if let Some(v) = touch.1 {
                dsu.union(i, n_seg + v);
            }
        }
        let mut by_root: HashMap<usize, Component> = HashMap::new();
        for (i, s) in segs.iter().enumerate() {
            let r = dsu.find(i);
            let comp = by_root.entry(r).or_insert_with(|| Component {
                intervals: vec![Vec::new(); self.edges.len()],
                length: 0.0,
            });
            comp.intervals[s.edge].push((s.lo, s.hi));
            comp.length += s.hi - s.lo;
        }
        let mut comps: Vec<Component> = by_root.into_values().collect();
        for c in &mut comps {
            for iv in &mut c.intervals {
                iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            }
        }
        // Deterministic order: by first occupied (edge, offset).
        comps.sort_by(|a, b| {
            let ka = a.first_key();
            let kb = b.first_key();
            ka.partial_cmp(&kb).unwrap()
        });
        comps
    }

    /// Subdivision graph: each edge `e` becomes a path of
    /// `ceil(n * len(e))` equal sub-edges.
    pub fn subdivide(self: &Arc<Self>, n: usize) -> SubdivisionGraph {
        assert!(n >= 1, "subdivision level must be >= 1");
        let parent = Arc::clone(self);
        let mut points: Vec<GraphPoint> = Vec::new();
        // Parent vertices keep their ids at the front.
        for v in 0..self.names.len() {
            points.push(self.vertex_point(v));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.names.len()];
        let mut sub_edges: Vec<SubEdge> = Vec::new();
        let mut chains: Vec<Vec<usize>> = Vec::new();
        for (eid, e) in self.edges.iter().enumerate() {
            let k = (n as f64 * e.len).ceil() as usize;
            let step = e.len / k as f64;
            let mut chain = Vec::with_capacity(k);
            let mut prev = e.tail;
            for i in 1..=k {
                let node = if i == k {
                    e.head
                } else {
                    points.push(GraphPoint { edge: eid, offset: i as f64 * step });
                    adj.push(Vec::new());
                    points.len() - 1
                };
                let lo = (i - 1) as f64 * step;
                let hi = if i == k { e.len } else { i as f64 * step };
                sub_edges.push(SubEdge { parent_edge: eid, from: prev, to: node, lo, hi });
                chain.push(sub_edges.len() - 1);
                adj[prev].push(node);
                adj[node].push(prev);
                prev = node;
            }
            chains.push(chain);
        }
        let comb = CombGraph { adj };
        SubdivisionGraph {
            parent,
            n,
            points,
            sub_edges,
            chains,
            comb,
            parent_vertices: self.names.len(),
        }
    }

    /// Combinatorial skeleton (vertices and edges, lengths dropped).
    pub fn combinatorial(&self) -> CombGraph {
        let mut adj = vec![Vec::new(); self.names.len()];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        CombGraph { adj }
    }

    /// Evenly spaced sample points covering every edge, spacing <= `delta`.
    pub fn sample_net(&self, delta: f64) -> Vec<GraphPoint> {
        let mut net = Vec::new();
        for (eid, e) in self.edges.iter().enumerate() {
            let k = (e.len / delta).ceil().max(1.0) as usize;
            for i in 0..=k {
                net.push(GraphPoint { edge: eid, offset: e.len * i as f64 / k as f64 });
            }
        }
        net
    }
}

/// One connected component of `S` minus a cut set: closed intervals per edge.
#[derive(Debug, Clone)]
pub struct Component {
    /// Indexed by parent edge id; sorted disjoint `(lo, hi)` intervals.
    pub intervals: Vec<Vec<(f64, f64)>>,
    pub length: f64,
}

impl Component {
    pub fn contains(&self, g: &MetricGraph, p: GraphPoint) -> bool {
        let hit = |edge: usize, off: f64| {
            self.intervals[edge].iter().any(|&(lo, hi)| off >= lo - TOL && off <= hi + TOL)
        };
        if hit(p.edge, p.offset) {
            return true;
        }
        // A vertex point may be represented on any incident edge.
        if let Some(v) = g.vertex_of(p) {
            for &(eid, at_tail) in g.incident_edges(v) {
                let off = if at_tail { 0.0 } else { g.edge_len(eid) };
                if hit(eid, off) {
                    return true;
                }
            }
        }
        false
    }

    fn first_key(&self) -> (usize, f64) {
        for (e, iv) in self.intervals.iter().enumerate() {
            if let Some(&(lo, _)) = iv.first() {
                return (e, lo);
            }
        }
        (usize::MAX, 0.0)
    }

    /// Measure of the intersection with `(edge, lo, hi)`.
    pub fn overlap(&self, edge: usize, lo: f64, hi: f64) -> f64 {
        self.intervals[edge]
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }

    /// Materializes the closure of this component as a standalone metric
    /// graph plus a map back to parent coordinates. Fails if the component
    /// closure is not simple (never the case for tree components).
    pub fn extract(&self, g: &MetricGraph) -> Result<ExtractedGraph, GraphError> {
        let mut names: HashMap<String, ()> = HashMap::new();
        let mut list: Vec<(String, String, f64)> = Vec::new();
        let mut spans: Vec<(usize, f64, f64)> = Vec::new();
        let name_of = |g: &MetricGraph, edge: usize, off: f64| -> String {
            let e = &g.edges[edge];
            if off <= TOL {
                format!("v{}", e.tail)
            } else if off >= e.len - TOL {
                format!("v{}", e.head)
            } else {
                format!("c{}_{:.12}", edge, off)
            }
        };
        for (eid, ivs) in self.intervals.iter().enumerate() {
            for &(lo, hi) in ivs {
                let a = name_of(g, eid, lo);
                let b = name_of(g, eid, hi);
                names.insert(a.clone(), ());
                names.insert(b.clone(), ());
                list.push((a, b, hi - lo));
                spans.push((eid, lo, hi));
            }
        }
        let graph = MetricGraph::from_edges(&list)?;
        Ok(ExtractedGraph { graph, spans })
    }
}

/// A component rebuilt as its own metric graph; `spans[i]` gives the parent
/// `(edge, lo, hi)` interval realized by extracted edge `i` (oriented lo->hi).
pub struct ExtractedGraph {
    pub graph: Arc<MetricGraph>,
    pub spans: Vec<(usize, f64, f64)>,
}

impl ExtractedGraph {
    pub fn to_parent(&self, parent: &MetricGraph, p: GraphPoint) -> GraphPoint {
        let (edge, lo, _hi) = self.spans[p.edge];
        parent.point(edge, lo + p.offset).expect("span offset in range")
    }
}

/// Sub-edge of a subdivision graph: spans `[lo, hi]` on a parent edge.
#[derive(Debug, Clone, Copy)]
pub struct SubEdge {
    pub parent_edge: usize,
    pub from: usize,
    pub to: usize,
    pub lo: f64,
    pub hi: f64,
}

impl SubEdge {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Subdivision graph of a metric graph: isometric to the parent, with
/// `ceil(n * len(e))` equal-length sub-edges per parent edge.
#[derive(Debug, Clone)]
pub struct SubdivisionGraph {
    pub parent: Arc<MetricGraph>,
    pub n: usize,
    /// Sub-vertex id -> location on the parent graph. Parent vertices come
    /// first and keep their parent ids.
    points: Vec<GraphPoint>,
    sub_edges: Vec<SubEdge>,
    /// Per parent edge: sub-edge ids in tail-to-head order.
    chains: Vec<Vec<usize>>,
    comb: CombGraph,
    parent_vertices: usize,
}

impl SubdivisionGraph {
    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn total_length(&self) -> f64 {
        self.sub_edges.iter().map(|s| s.len()).sum()
    }

    pub fn point_of(&self, sub_vertex: usize) -> GraphPoint {
        self.points[sub_vertex]
    }

    pub fn is_parent_vertex(&self, sub_vertex: usize) -> bool {
        sub_vertex < self.parent_vertices
    }

    pub fn sub_edges(&self) -> &[SubEdge] {
        &self.sub_edges
    }

    pub fn chain(&self, parent_edge: usize) -> &[usize] {
        &self.chains[parent_edge]
    }

    pub fn combinatorial(&self) -> &CombGraph {
        &self.comb
    }

    /// Sub-edge id connecting two adjacent sub-vertices.
    pub fn sub_edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.sub_edges
            .iter()
            .position(|s| (s.from == a && s.to == b) || (s.from == b && s.to == a))
    }
}

/// Plain adjacency-list graph used for labelings and discrete centroids.
#[derive(Debug, Clone)]
pub struct CombGraph {
    pub adj: Vec<Vec<usize>>,
}

impl CombGraph {
    pub fn path(n: usize) -> Self {
        let mut adj = vec![Vec::new(); n];
        for i in 0..n.saturating_sub(1) {
            adj[i].push(i + 1);
            adj[i + 1].push(i);
        }
        CombGraph { adj }
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.adj[0].push(n - 1);
            g.adj[n - 1].push(0);
        }
        g
    }

    /// Star with one center (vertex 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut adj = vec![Vec::new(); leaves + 1];
        for i in 1..=leaves {
            adj[0].push(i);
            adj[i].push(0);
        }
        CombGraph { adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.vertex_count() && self.is_connected()
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Vertex count on `v`'s side when edge `(v, away)` is removed (tree only).
    pub fn side_count(&self, v: usize, away: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        seen[away] = true;
        seen[v] = true;
        let mut stack = vec![v];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count
    }
}

fn floyd_warshall(n: usize, edges: &[Edge]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in edges {
        if e.len < d[e.tail][e.head] {
            d[e.tail][e.head] = e.len;
            d[e.head][e.tail] = e.len;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Union-find over segment/vertex indices.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if the two were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
