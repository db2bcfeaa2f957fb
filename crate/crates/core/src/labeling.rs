//! Random and exhaustive labelings of combinatorial graphs.
//!
//! A labeling is a bijection from vertices to `{1..N}`; a peak is a vertex
//! whose label exceeds all of its neighbors'. Labelings conditioned on a
//! fixed peak count drive the empirical floodings: descending through the
//! labels of a subdivision graph traces out a piecewise-linear growth
//! process on the parent metric graph.

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::flooding::{ArmRecord, Dir, Flooding, Stage};
use crate::graph::{CombGraph, GraphPoint, SubdivisionGraph};

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("TooLarge: {n} vertices exceeds the exhaustive-enumeration guard of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("BudgetExhausted: {found} of {want} samples after {budget} draws")]
    BudgetExhausted { found: usize, want: usize, budget: u64 },
    #[error("NotATree: operation requires a tree")]
    NotATree,
    #[error("NotAdjacent: vertices {0} and {1} do not share an edge")]
    NotAdjacent(usize, usize),
    #[error("NotABijection: labels must be a permutation of 1..=N")]
    NotABijection,
    #[error("PartsMismatch: parts sum to {got}, expected {want}")]
    PartsMismatch { got: u64, want: u64 },
    #[error("NoPeaks: labeling has no peaks")]
    NoPeaks,
    #[error("Flood: {0}")]
    Flood(String),
}

const ENUM_GUARD: usize = 12;

/// Bijection from vertices to `{1..N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
}

impl Labeling {
    pub fn new(labels: Vec<usize>) -> Result<Self, LabelError> {
        let n = labels.len();
        let mut seen = vec![false; n + 1];
        for &l in &labels {
            if l == 0 || l > n || seen[l] {
                return Err(LabelError::NotABijection);
            }
            seen[l] = true;
        }
        Ok(Labeling { labels })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `inverse()[k]` is the vertex with label `k + 1`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut r = vec![0; self.labels.len()];
        for (v, &l) in self.labels.iter().enumerate() {
            r[l - 1] = v;
        }
        r
    }
}

/// Peaks of a labeling, ascending by vertex id, with their label values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakSet {
    pub vertices: Vec<usize>,
    pub values: Vec<usize>,
}

impl PeakSet {
    pub fn count(&self) -> usize {
        self.vertices.len()
    }
}

pub fn find_peaks(g: &CombGraph, lab: &Labeling) -> PeakSet {
    let mut vertices = Vec::new();
    let mut values = Vec::new();
    for v in 0..g.vertex_count() {
        if g.adj[v].iter().all(|&w| lab.label(w) < lab.label(v)) {
            vertices.push(v);
            values.push(lab.label(v));
        }
    }
    PeakSet { vertices, values }
}

fn peak_count_of(g: &CombGraph, labels: &[usize]) -> usize {
    (0..g.vertex_count())
        .filter(|&v| g.adj[v].iter().all(|&w| labels[w] < labels[v]))
        .count()
}

/// Visits every labeling of `g` (all `N!` permutations, Heap's algorithm).
pub fn for_each_labeling<F: FnMut(&[usize])>(
    g: &CombGraph,
    mut visit: F,
) -> Result<(), LabelError> {
    let n = g.vertex_count();
    if n > ENUM_GUARD {
        return Err(LabelError::TooLarge { n, max: ENUM_GUARD });
    }
    let mut labels: Vec<usize> = (1..=n).collect();
    let mut c = vec![0usize; n];
    visit(&labels);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                labels.swap(0, i);
            } else {
                labels.swap(c[i], i);
            }
            visit(&labels);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

/// Exact count of labelings with exactly `m` peaks.
pub fn enumerate_by_peak_count(g: &CombGraph, m: usize) -> Result<u64, LabelError> {
    let mut count = 0u64;
    for_each_labeling(g, |labels| {
        if peak_count_of(g, labels) == m {
            count += 1;
        }
    })?;
    Ok(count)
}

/// Exact distribution of peak counts over all `N!` labelings.
pub fn peak_count_distribution(g: &CombGraph) -> Result<Vec<u64>, LabelError> {
    let mut hist = vec![0u64; g.vertex_count() + 1];
    for_each_labeling(g, |labels| {
        hist[peak_count_of(g, labels)] += 1;
    })?;
    Ok(hist)
}

/// Exact per-vertex peak counts among labelings with exactly `m` peaks.
pub fn peak_location_counts(g: &CombGraph, m: usize) -> Result<Vec<u64>, LabelError> {
    let mut counts = vec![0u64; g.vertex_count()];
    for_each_labeling(g, |labels| {
        let mut peaks = Vec::new();
        for v in 0..g.vertex_count() {
            if g.adj[v].iter().all(|&w| labels[w] < labels[v]) {
                peaks.push(v);
            }
        }
        if peaks.len() == m {
            for v in peaks {
                counts[v] += 1;
            }
        }
    })?;
    Ok(counts)
}

/// One accepted draw from the conditioned distribution.
#[derive(Debug, Clone)]
pub struct ConditionedSample {
    pub trial: u64,
    pub labeling: Labeling,
}

#[derive(Debug, Clone)]
pub struct SampleRun {
    pub samples: Vec<ConditionedSample>,
    /// Trials examined to produce the samples.
    pub draws: u64,
    pub acceptance_rate: f64,
}

/// I.i.d. samples of the uniform labeling conditioned on exactly `m` peaks,
/// by rejection. Trial `i` draws from its own counter-based stream, so the
/// output is reproducible under any parallelism.
pub fn sample_conditioned(
    g: &CombGraph,
    m: usize,
    want: usize,
    seed: u64,
    budget: u64,
) -> Result<SampleRun, LabelError> {
    let n = g.vertex_count();
    let chunk: u64 = 8192;
    let mut samples: Vec<ConditionedSample> = Vec::with_capacity(want);
    let mut start = 0u64;
    while start < budget && samples.len() < want {
        let end = (start + chunk).min(budget);
        let mut accepted: Vec<ConditionedSample> = (start..end)
            .into_par_iter()
            .filter_map(|trial| {
                let mut rng = trial_stream(seed, trial);
                let mut labels: Vec<usize> = (1..=n).collect();
                labels.shuffle(&mut rng);
                if peak_count_of(g, &labels) == m {
                    Some(ConditionedSample { trial, labeling: Labeling { labels } })
                } else {
                    None
                }
            })
            .collect();
        accepted.sort_by_key(|s| s.trial);
        samples.extend(accepted);
        start = end;
    }
    if samples.len() < want {
        return Err(LabelError::BudgetExhausted { found: samples.len(), want, budget });
    }
    samples.truncate(want);
    let draws = samples.last().map(|s| s.trial + 1).unwrap_or(0);
    let acceptance_rate = want as f64 / draws.max(1) as f64;
    Ok(SampleRun { samples, draws, acceptance_rate })
}

/// Counter-based RNG stream: independent per trial index, reproducible
/// under any parallelism.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Per-vertex probability that the unique peak sits there, on a tree:
/// proportional to the number of descending labelings rooted at the vertex,
/// `N! / prod_u n_v(u)` with `n_v(u)` the rooted subtree sizes.
pub fn single_peak_weights(g: &CombGraph) -> Result<Vec<f64>, LabelError> {
    if !g.is_tree() {
        return Err(LabelError::NotATree);
    }
    let n = g.vertex_count();
    let mut logw = vec![0.0f64; n];
    for v in 0..n {
        let sizes = rooted_subtree_sizes(g, v);
        logw[v] = -sizes.iter().map(|&s| (s as f64).ln()).sum::<f64>();
    }
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = logw.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = w.iter().sum();
    for x in &mut w {
        *x /= sum;
    }
    Ok(w)
}

/// Subtree sizes `n_root(u)` for every `u`, rooted at `root`.
fn rooted_subtree_sizes(g: &CombGraph, root: usize) -> Vec<usize> {
    let n = g.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    let mut stack = vec![root];
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &w in &g.adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                stack.push(w);
            }
        }
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    size
}

/// Exact sample from the uniform distribution over single-peak labelings
/// of a tree: choose the peak by its exact probability, then assign label
/// sets to subtrees by uniform splits (a uniform linear extension of the
/// rooted tree).
pub fn sample_single_peak_tree(g: &CombGraph, rng: &mut impl Rng) -> Result<Labeling, LabelError> {
    let weights = single_peak_weights(g)?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut root = 0;
    for (v, &w) in weights.iter().enumerate() {
        acc += w;
        if u <= acc {
            root = v;
            break;
        }
    }
    let n = g.vertex_count();
    let size = rooted_subtree_sizes(g, root);
    let mut labels = vec![0usize; n];
    // (vertex, parent, label pool sorted ascending)
    let mut stack: Vec<(usize, usize, Vec<usize>)> =
        vec![(root, usize::MAX, (1..=n).collect())];
    while let Some((v, parent, mut pool)) = stack.pop() {
        labels[v] = pool.pop().expect("pool holds the subtree size");
        let children: Vec<usize> = g.adj[v].iter().copied().filter(|&w| w != parent).collect();
        if children.is_empty() {
            continue;
        }
        pool.shuffle(rng);
        let mut cursor = 0;
        for &c in &children {
            let take = size[c];
            let mut part: Vec<usize> = pool[cursor..cursor + take].to_vec();
            cursor += take;
            part.sort_unstable();
            stack.push((c, v, part));
        }
    }
    Ok(Labeling { labels })
}

/// Exact single-peak location odds for adjacent tree vertices, with the
/// descendant-count ratio they must equal.
#[derive(Debug, Clone, Copy)]
pub struct PeakRatio {
    /// `p_v / p_y` from exhaustive enumeration.
    pub odds: f64,
    /// `n_y(v) / n_v(y)`.
    pub descendant_ratio: f64,
}

pub fn peak_ratio_check(g: &CombGraph, v: usize, y: usize) -> Result<PeakRatio, LabelError> {
    if !g.is_tree() {
        return Err(LabelError::NotATree);
    }
    if !g.adj[v].contains(&y) {
        return Err(LabelError::NotAdjacent(v, y));
    }
    let counts = peak_location_counts(g, 1)?;
    let odds = counts[v] as f64 / counts[y] as f64;
    let descendant_ratio = g.side_count(v, y) as f64 / g.side_count(y, v) as f64;
    Ok(PeakRatio { odds, descendant_ratio })
}

/// The empirical flooding built from a labeling of a subdivision graph,
/// together with the indices of its defining events (vertex hit, edge
/// exhausted, peak added).
pub struct EmpiricalFlooding {
    pub flooding: Flooding,
    pub event_indices: Vec<usize>,
}

struct Run {
    component: usize,
    parent_edge: usize,
    anchor: f64,
    dir: Dir,
    length: f64,
    tip: usize,
}

/// Builds the flooding traced out by descending through the labels: cluster
/// growth maps to arms sweeping parent-edge intervals, with stage
/// boundaries at parent-vertex hits, parent-edge exhaustions, and new
/// peaks. Stage times equal covered length, and per-stage arm rates are the
/// per-arm shares of the length covered in that stage.
pub fn empirical_flooding(
    sub: &SubdivisionGraph,
    lab: &Labeling,
) -> Result<EmpiricalFlooding, LabelError> {
    let comb = sub.combinatorial();
    let n = comb.vertex_count();
    assert_eq!(lab.len(), n, "labeling must cover the subdivision graph");
    let peaks = find_peaks(comb, lab);
    if peaks.count() == 0 {
        return Err(LabelError::NoPeaks);
    }
    // Sources ordered by decreasing peak label; component ids follow.
    let mut peak_order: Vec<usize> = peaks.vertices.clone();
    peak_order.sort_by_key(|&v| std::cmp::Reverse(lab.label(v)));
    let component_of_peak: HashMap<usize, usize> =
        peak_order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let sources: Vec<GraphPoint> = peak_order.iter().map(|&v| sub.point_of(v)).collect();

    let r = lab.inverse();
    let mut covered = vec![false; n];
    let mut vertex_component = vec![usize::MAX; n];
    let mut edges_remaining: Vec<usize> =
        (0..sub.parent.edge_count()).map(|e| sub.chain(e).len()).collect();

    let mut stages: Vec<Stage> = Vec::new();
    let mut event_indices: Vec<usize> = Vec::new();
    let mut runs: Vec<Run> = Vec::new();
    let mut t_prev = 0.0;
    let mut covered_len = 0.0;

    for k in 0..n {
        let v = r[n - 1 - k];
        let mut is_event = false;

        if k == 0 {
            covered[v] = true;
            vertex_component[v] = component_of_peak[&v];
            continue;
        }

        let neighbors: Vec<usize> =
            comb.adj[v].iter().copied().filter(|&u| covered[u]).collect();
        covered[v] = true;

        if neighbors.is_empty() {
            // A fresh peak starts its own cluster.
            vertex_component[v] = component_of_peak[&v];
            is_event = true;
        } else {
            // Tips of this stage's runs extend; older coverage anchors new
            // runs. Each newly covered sub-edge goes to exactly one run.
            let mut joined = usize::MAX;
            for &u in &neighbors {
                let se_id = sub
                    .sub_edge_between(u, v)
                    .expect("covered neighbor shares a sub-edge");
                let se = sub.sub_edges()[se_id];
                covered_len += se.len();
                if let Some(run) = runs.iter_mut().find(|r| r.tip == u) {
                    run.length += se.len();
                    run.tip = v;
                    if joined == usize::MAX {
                        joined = run.component;
                    }
                } else {
                    // Anchor at u's end of the sub-edge, growing toward v.
                    let (anchor, dir) = if se.from == u {
                        (se.lo, Dir::Up)
                    } else {
                        (se.hi, Dir::Down)
                    };
                    let component = vertex_component[u];
                    runs.push(Run {
                        component,
                        parent_edge: se.parent_edge,
                        anchor,
                        dir,
                        length: se.len(),
                        tip: v,
                    });
                    if joined == usize::MAX {
                        joined = component;
                    }
                }
                edges_remaining[se.parent_edge] -= 1;
                if edges_remaining[se.parent_edge] == 0 {
                    is_event = true; // parent edge exhausted
                }
            }
            vertex_component[v] = joined;
        }

        if sub.is_parent_vertex(v) {
            is_event = true;
        }

        if is_event {
            event_indices.push(k);
            let delta = covered_len - t_prev;
            if delta > 1e-15 {
                let arms: Vec<ArmRecord> = runs
                    .iter()
                    .map(|r| ArmRecord {
                        edge: r.parent_edge,
                        anchor: r.anchor,
                        dir: r.dir,
                        rate: r.length / delta,
                        component: r.component,
                    })
                    .collect();
                stages.push(Stage { t_start: t_prev, t_end: covered_len, arms });
                t_prev = covered_len;
            }
            runs.clear();
        }
    }

    let flooding = Flooding::from_parts(sub.parent.clone(), sources, stages)
        .map_err(|e| LabelError::Flood(e.to_string()))?;
    Ok(EmpiricalFlooding { flooding, event_indices })
}

/// Exact multinomial coefficient `N! / (N_1! ... N_K!)`.
pub fn multinomial_count(n: u64, parts: &[u64]) -> Result<BigUint, LabelError> {
    let got: u64 = parts.iter().sum();
    if got != n {
        return Err(LabelError::PartsMismatch { got, want: n });
    }
    // Product of binomials over the running total keeps intermediates exact.
    let mut result = BigUint::from(1u32);
    let mut total = 0u64;
    for &p in parts {
        total += p;
        result *= binomial(total, p);
    }
    Ok(result)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut num = BigUint::from(1u32);
    for i in 0..k {
        num *= n - i;
        num /= i + 1;
    }
    num
}

/// Natural log of a positive big integer via its top bits.
pub fn log_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v: u64 = x.try_into().map(|v: u64| v).unwrap_or(u64::MAX);
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top: BigUint = x >> shift;
    let mantissa: u64 = (&top).try_into().unwrap_or(u64::MAX);
    (mantissa as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Leading-order Stirling value `n (a log a - sum_j a_j log a_j)` for the
/// log-multinomial with parts `floor(n a_j)`; exact values differ by
/// `O(log n)`.
pub fn log_multinomial_asymptotic(n: f64, a: &[f64]) -> f64 {
    let total: f64 = a.iter().sum();
    let x = crate::entropy::xlogx(total) - a.iter().map(|&v| crate::entropy::xlogx(v)).sum::<f64>();
    n * x
}

/// Simulates the reversed ball-removal process behind the occupancy law of
/// large numbers: `N` balls in boxes of sizes `parts`, removed in uniform
/// random order; returns `sup_{t, j} | count_j(ceil(N t)) - N_j t |`.
pub fn occupancy_lln_check(parts: &[u64], grid: &[f64], seed: u64) -> f64 {
    let n: u64 = parts.iter().sum();
    let mut balls: Vec<usize> = parts
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat(j).take(c as usize))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    balls.shuffle(&mut rng);
    let mut checkpoints: Vec<(u64, f64)> = grid
        .iter()
        .map(|&t| (((n as f64) * t).ceil().clamp(0.0, n as f64) as u64, t))
        .collect();
    checkpoints.sort_by(|a, b| a.0.cmp(&b.0));
    let mut dev: f64 = 0.0;
    let mut counts = vec![0u64; parts.len()];
    let mut ci = 0;
    for taken in 0..=n {
        while ci < checkpoints.len() && checkpoints[ci].0 == taken {
            let t = checkpoints[ci].1;
            for (j, &c) in counts.iter().enumerate() {
                dev = dev.max((c as f64 - parts[j] as f64 * t).abs());
            }
            ci += 1;
        }
        if taken < n {
            counts[balls[taken as usize]] += 1;
        }
    }
    dev
}
