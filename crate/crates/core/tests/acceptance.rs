//! Acceptance suite: one test per gate, each printing a pass/fail line.
//!
//! Gates cover the known optima (circle, segment, stars, regular trees),
//! closed-form consistency on a random tree corpus, the optimality
//! property checklist, the exhaustive-enumeration oracle for conditioned
//! labelings, the labeling-convergence trend, exact multinomial counting,
//! and the event-driven simulator against a brute-force time stepper.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use floodgraph::entropy::beta;
use floodgraph::experiments::{
    circle_graph, regular_tree, run_circle, run_convergence, run_regular_tree, run_segment,
    run_star_m1, run_star_m2, ConvergenceConfig,
};
use floodgraph::flooding::{simulate, StageCtx, UniformPolicy};
use floodgraph::graph::{CombGraph, GraphPoint, MetricGraph};
use floodgraph::labeling::{
    log_biguint, log_multinomial_asymptotic, multinomial_count, peak_count_distribution,
    peak_location_counts, peak_ratio_check, trial_stream,
};
use floodgraph::tree::{
    beta_star_single, centroid, optimal_flooding, verify_optimality_properties,
    ProportionalPolicy,
};

fn gate(name: &str, pass: bool, detail: &str) {
    println!("{}: criterion {name} {}", if pass { "PASS" } else { "FAIL" }, detail);
    assert!(pass, "criterion {name} failed: {detail}");
}

#[test]
fn criterion_01_circle_optimum() {
    let start = std::time::Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for m in 1..=3 {
        let rep = run_circle(m);
        if !rep.pass() {
            ok = false;
            detail = rep.render();
        }
    }
    let elapsed = start.elapsed();
    gate(
        "1 (circle beta = zeta log 2M, equally spaced sources)",
        ok && elapsed.as_secs_f64() < 1.0,
        &format!("{detail}runtime {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_star_single_source() {
    let start = std::time::Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for (r1, r2, r3) in [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (4.0, 1.0, 1.0), (3.0, 1.0, 1.0)] {
        let rep = run_star_m1(r1, r2, r3);
        if !rep.pass() {
            ok = false;
            detail = rep.render();
        }
    }
    let elapsed = start.elapsed();
    gate(
        "2 (star M=1 geometry, rates, closed form)",
        ok && elapsed.as_secs_f64() < 5.0,
        &format!("{detail}runtime {elapsed:.2?}"),
    );
}

#[test]
fn criterion_03_star_two_sources_symmetric() {
    let start = std::time::Instant::now();
    let rep = run_star_m2(1.0, 1.0, 1.0);
    let elapsed = start.elapsed();
    gate(
        "3 (star M=2 symmetric geometry and rates)",
        rep.pass() && elapsed.as_secs_f64() < 60.0,
        &format!("{}runtime {elapsed:.2?}", if rep.pass() { String::new() } else { rep.render() }),
    );
}

#[test]
fn criterion_04_star_two_sources_classification() {
    let start = std::time::Instant::now();
    let long = run_star_m2(200.0, 1.0, 0.5);
    let mixed = run_star_m2(1.0, 5.0 / 6.0, 2.0 / 5.0);
    let elapsed = start.elapsed();
    gate(
        "4 (star M=2 scenario classification)",
        long.pass() && mixed.pass() && elapsed.as_secs_f64() < 120.0,
        &format!(
            "{}{}runtime {elapsed:.2?}",
            if long.pass() { String::new() } else { long.render() },
            if mixed.pass() { String::new() } else { mixed.render() }
        ),
    );
}

#[test]
fn criterion_05_regular_tree() {
    let start = std::time::Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for depth in [2, 3] {
        let rep = run_regular_tree(2, depth);
        if !rep.pass() {
            ok = false;
            detail = rep.render();
        }
    }
    let elapsed = start.elapsed();
    gate(
        "5 (regular tree M=2 sources at root and neighbor)",
        ok && elapsed.as_secs_f64() < 300.0,
        &format!("{detail}runtime {elapsed:.2?}"),
    );
}

fn random_tree(rng: &mut ChaCha8Rng, max_edges: usize) -> Arc<MetricGraph> {
    let edges = rng.gen_range(1..=max_edges);
    let mut list: Vec<(String, String, f64)> = Vec::new();
    for i in 0..edges {
        let parent = rng.gen_range(0..=i);
        let len = 0.1 + rng.gen::<f64>() * 2.9;
        list.push((format!("v{parent}"), format!("v{}", i + 1), len));
    }
    MetricGraph::from_edges(&list).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, g: &MetricGraph) -> GraphPoint {
    let e = rng.gen_range(0..g.edge_count());
    g.point(e, rng.gen::<f64>() * g.edge_len(e)).unwrap()
}

#[test]
fn criterion_06_closed_form_consistency() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    for _ in 0..50 {
        let g = random_tree(&mut rng, 20);
        let opt = optimal_flooding(&g, 1).unwrap();
        let b = beta(&opt.flooding).unwrap().beta;
        let closed = beta_star_single(&g, opt.plan.sources[0]).unwrap();
        assert!(
            (b - closed).abs() <= 1e-9,
            "beta {b} vs closed form {closed} on a {}-edge tree",
            g.edge_count()
        );
        let c = centroid(&g).unwrap();
        let best = beta_star_single(&g, c).unwrap();
        for _ in 0..100 {
            let p = random_point(&mut rng, &g);
            let probe = beta_star_single(&g, p).unwrap();
            assert!(probe <= best + 1e-9, "probe beat the centroid: {probe} > {best}");
        }
    }
    let elapsed = start.elapsed();
    gate(
        "6 (closed form matches simulation; centroid is argmax)",
        elapsed.as_secs_f64() < 120.0,
        &format!("50 trees x 100 probes, runtime {elapsed:.2?}"),
    );
}

#[test]
fn criterion_07_optimality_property_suite() {
    let start = std::time::Instant::now();

    // Every optimizer output passes the checklist.
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut optima: Vec<(Arc<MetricGraph>, usize)> = vec![
        (MetricGraph::from_edges(&[("c", "l1", 1.0), ("c", "l2", 1.0), ("c", "l3", 1.0)]).unwrap(), 1),
        (MetricGraph::from_edges(&[("c", "l1", 3.0), ("c", "l2", 1.0), ("c", "l3", 1.0)]).unwrap(), 1),
        (MetricGraph::from_edges(&[("c", "l1", 1.0), ("c", "l2", 1.0), ("c", "l3", 1.0)]).unwrap(), 2),
        (MetricGraph::from_edges(&[("a", "b", 1.0)]).unwrap(), 2),
        (regular_tree(2, 2), 2),
    ];
    for _ in 0..5 {
        optima.push((random_tree(&mut rng, 10), 1));
    }
    for (g, m) in &optima {
        let opt = optimal_flooding(g, *m).unwrap();
        let rep = verify_optimality_properties(&opt.flooding, *m);
        assert!(
            rep.all_pass(),
            "optimum on {} edges with M={m} failed: {:?}",
            g.edge_count(),
            rep.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
        );
    }

    // Corrupted floodings fail the matching check.
    // (a) Parked arm -> dormant.
    let g = MetricGraph::from_edges(&[("c", "l1", 1.0), ("c", "l2", 1.0), ("c", "l3", 1.0)]).unwrap();
    let mut park = |ctx: &StageCtx| {
        let m = ctx.arms.len();
        let mut v = vec![0.0; m];
        if ctx.t < 1.0 - 1e-12 {
            v[0] = 1.0;
        } else {
            for x in v.iter_mut() {
                *x = 1.0 / m as f64;
            }
        }
        v
    };
    let f = simulate(&g, &[g.vertex_point(0)], &mut park).unwrap();
    let rep = verify_optimality_properties(&f, 1);
    assert!(!rep.get("no_dormant_arms").unwrap().pass, "parked arm not flagged");

    // (b) Early merge -> component count drops below M.
    let seg = MetricGraph::from_edges(&[("a", "b", 1.0)]).unwrap();
    let f = simulate(
        &seg,
        &[seg.point(0, 0.3).unwrap(), seg.point(0, 0.5).unwrap()],
        &mut UniformPolicy,
    )
    .unwrap();
    let rep = verify_optimality_properties(&f, 2);
    assert!(
        !rep.get("component_count_constant").unwrap().pass,
        "early merge not flagged"
    );

    // (c) Wrong rates -> proportionality or centroid check fails.
    let g = MetricGraph::from_edges(&[("c", "l1", 3.0), ("c", "l2", 1.0), ("c", "l3", 1.0)]).unwrap();
    let f = simulate(&g, &[g.vertex_point(0)], &mut UniformPolicy).unwrap();
    let rep = verify_optimality_properties(&f, 1);
    assert!(
        !rep.get("rate_ratios").unwrap().pass
            || !rep.get("sources_are_centroids").unwrap().pass,
        "wrong rates not flagged"
    );

    let elapsed = start.elapsed();
    gate(
        "7 (optimality checklist on optima and corruptions)",
        elapsed.as_secs_f64() < 60.0,
        &format!("runtime {elapsed:.2?}"),
    );
}

fn fixture_graphs() -> Vec<(String, CombGraph)> {
    let mut out = Vec::new();
    for n in 3..=7 {
        out.push((format!("path{n}"), CombGraph::path(n)));
    }
    for leaves in 2..=6 {
        out.push((format!("star{leaves}"), CombGraph::star(leaves)));
    }
    for n in 4..=7 {
        out.push((format!("cycle{n}"), CombGraph::cycle(n)));
    }
    // Complete binary tree on 7 vertices.
    let mut adj = vec![Vec::new(); 7];
    for (p, c) in [(0usize, 1usize), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)] {
        adj[p].push(c);
        adj[c].push(p);
    }
    out.push(("binary7".into(), CombGraph { adj }));
    out
}

#[test]
fn criterion_08_enumeration_oracle() {
    let start = std::time::Instant::now();
    let trials: usize = 100_000;
    for (name, g) in fixture_graphs() {
        let n = g.vertex_count();
        let total: f64 = (1..=n).map(|k| k as f64).product();
        let exact_hist = peak_count_distribution(&g).unwrap();
        // Uniform draws once; peak counts and single-peak locations.
        let mut count_hist = vec![0u64; n + 1];
        let mut loc_hist = vec![0u64; n];
        for trial in 0..trials {
            let mut rng = trial_stream(800, trial as u64);
            let mut labels: Vec<usize> = (1..=n).collect();
            use rand::seq::SliceRandom;
            labels.shuffle(&mut rng);
            let peaks: Vec<usize> = (0..n)
                .filter(|&v| g.adj[v].iter().all(|&w| labels[w] < labels[v]))
                .collect();
            count_hist[peaks.len()] += 1;
            if peaks.len() == 1 {
                loc_hist[peaks[0]] += 1;
            }
        }
        for m in 0..=n {
            let p = exact_hist[m] as f64 / total;
            let freq = count_hist[m] as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (freq - p).abs() <= 3.0 * sigma + 1e-12,
                "{name}: peak count {m}: freq {freq} vs exact {p} (3 sigma {})",
                3.0 * sigma
            );
        }
        let exact_loc = peak_location_counts(&g, 1).unwrap();
        let exact_total: u64 = exact_hist[1];
        let accepted: u64 = loc_hist.iter().sum();
        for v in 0..n {
            let p = exact_loc[v] as f64 / exact_total as f64;
            let freq = loc_hist[v] as f64 / accepted as f64;
            let sigma = (p * (1.0 - p) / accepted as f64).sqrt();
            assert!(
                (freq - p).abs() <= 3.0 * sigma + 1e-12,
                "{name}: peak location {v}: freq {freq} vs exact {p}"
            );
        }
        // Exact location odds on trees equal the descendant-count ratio.
        if g.is_tree() {
            for v in 0..n {
                for &y in g.adj[v].clone().iter() {
                    let r = peak_ratio_check(&g, v, y).unwrap();
                    assert!(
                        (r.odds - r.descendant_ratio).abs() <= 1e-9,
                        "{name}: odds {} vs ratio {}",
                        r.odds,
                        r.descendant_ratio
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    gate(
        "8 (sampled histograms match enumeration; exact peak odds)",
        elapsed.as_secs_f64() < 180.0,
        &format!("runtime {elapsed:.2?}"),
    );
}

// Known red: the 3-star closeness gate ("median beta within 0.1 of beta*
// at n=16") does not hold at this subdivision level. The gap is 0.276-0.285
// across seeds and scales like ~4.4/n (0.14 at n=32), driven by peak
// displacement from the centroid and O(1/sqrt(n)) share fluctuations; beta
// scales with zeta=3, so the absolute tolerance that the segment meets at
// zeta=1 (gap 0.096) needs n >~ 48 here. The gate is kept as stated rather
// than loosened; every trend gate and the segment gate pass.
#[test]
fn criterion_09_convergence_trend() {
    let start = std::time::Instant::now();
    let cfg = ConvergenceConfig {
        n_list: vec![4, 8, 16],
        m: 1,
        trials: 200,
        seed: 900,
        eps: 0.1,
        budget: 10_000_000,
    };
    let seg = MetricGraph::from_edges(&[("a", "b", 1.0)]).unwrap();
    let seg_res = run_convergence(&seg, &cfg).unwrap();
    let star =
        MetricGraph::from_edges(&[("c", "l1", 1.0), ("c", "l2", 1.0), ("c", "l3", 1.0)]).unwrap();
    let star_res = run_convergence(&star, &cfg).unwrap();
    let elapsed = start.elapsed();
    let ok = seg_res.report.pass() && star_res.report.pass();
    gate(
        "9 (median beta nondecreasing and near beta*, distance shrinking)",
        ok && elapsed.as_secs_f64() < 600.0,
        &format!(
            "\nsegment:\n{}\nstar:\n{}runtime {elapsed:.2?}",
            seg_res.csv, star_res.csv
        ),
    );
}

fn integer_partitions(n: u64) -> Vec<Vec<u64>> {
    fn rec(n: u64, max: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(current.clone());
            return;
        }
        let mut k = max.min(n);
        while k >= 1 {
            current.push(k);
            rec(n - k, k, current, out);
            current.pop();
            k -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_10_multinomial() {
    let start = std::time::Instant::now();
    // Exact counts match the factorial formula for all partitions of N <= 12.
    let factorial = |k: u64| -> BigUint {
        let mut f = BigUint::from(1u32);
        for i in 2..=k {
            f *= i;
        }
        f
    };
    for n in 1..=12u64 {
        for parts in integer_partitions(n) {
            let expected = {
                let mut denom = BigUint::from(1u32);
                for &p in &parts {
                    denom *= factorial(p);
                }
                factorial(n) / denom
            };
            let got = multinomial_count(n, &parts).unwrap();
            assert_eq!(got, expected, "partition {parts:?} of {n}");
        }
    }
    // Stirling leading order within 3 log n.
    for &n in &[100u64, 1000, 10000] {
        for a in [vec![0.5, 0.5], vec![1.0 / 3.0; 3]] {
            let parts: Vec<u64> = a.iter().map(|&x| (n as f64 * x).floor() as u64).collect();
            let total: u64 = parts.iter().sum();
            let exact = log_biguint(&multinomial_count(total, &parts).unwrap());
            let approx = log_multinomial_asymptotic(n as f64, &a);
            assert!(
                (exact - approx).abs() <= 3.0 * (n as f64).ln(),
                "n={n} a={a:?}: exact {exact} vs leading {approx}"
            );
        }
    }
    let elapsed = start.elapsed();
    gate(
        "10 (exact multinomial counts and Stirling leading order)",
        elapsed.as_secs_f64() < 10.0,
        &format!("runtime {elapsed:.2?}"),
    );
}

// ---------------------------------------------------------------------
// Criterion 11: brute-force time-stepped oracle for the event-driven
// simulator. Fixed steps of zeta/1e5; event times located by bisection
// inside the step; transitions re-derived from the geometry. Shares no
// event-solving code with the production simulator.
// ---------------------------------------------------------------------

#[derive(Clone, Copy)]
struct OArm {
    edge: usize,
    pos: f64,
    sign: f64,
}

struct Oracle {
    g: Arc<MetricGraph>,
    covered: Vec<Vec<(f64, f64)>>,
    arms: Vec<OArm>,
    t: f64,
}

impl Oracle {
    fn new(g: &Arc<MetricGraph>, sources: &[GraphPoint]) -> Self {
        let mut covered = vec![Vec::new(); g.edge_count()];
        let mut arms = Vec::new();
        for s in sources {
            covered[s.edge].push((s.offset, s.offset));
            match g.vertex_of(*s) {
                Some(v) => {
                    for &(eid, at_tail) in g.incident_edges(v) {
                        let (pos, sign) =
                            if at_tail { (0.0, 1.0) } else { (g.edge_len(eid), -1.0) };
                        arms.push(OArm { edge: eid, pos, sign });
                    }
                }
                None => {
                    arms.push(OArm { edge: s.edge, pos: s.offset, sign: -1.0 });
                    arms.push(OArm { edge: s.edge, pos: s.offset, sign: 1.0 });
                }
            }
        }
        let mut o = Oracle { g: Arc::clone(g), covered, arms, t: 0.0 };
        for e in 0..o.covered.len() {
            o.normalize(e);
        }
        o
    }

    fn normalize(&mut self, e: usize) {
        self.covered[e].sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for &(lo, hi) in &self.covered[e] {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + 1e-12 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        self.covered[e] = merged;
    }

    fn add_cover(&mut self, e: usize, a: f64, b: f64) {
        self.covered[e].push((a.min(b), a.max(b)));
        self.normalize(e);
    }

    fn end_covered(&self, e: usize, end: f64) -> bool {
        self.covered[e].iter().any(|&(a, b)| end >= a - 1e-9 && end <= b + 1e-9)
    }

    fn vertex_covered(&self, v: usize) -> bool {
        self.g.incident_edges(v).iter().any(|&(eid, at_tail)| {
            let end = if at_tail { 0.0 } else { self.g.edge_len(eid) };
            self.end_covered(eid, end)
        })
    }

    /// Any event strictly inside an advance of `dt` (or right at it)?
    fn event_within(&self, rates: &[f64], dt: f64) -> bool {
        for (i, arm) in self.arms.iter().enumerate() {
            let np = arm.pos + arm.sign * rates[i] * dt;
            if np < -1e-15 || np > self.g.edge_len(arm.edge) + 1e-15 {
                return true;
            }
            if rates[i] <= 0.0 {
                continue;
            }
            // Crossing into covered territory ahead.
            for &(a, b) in &self.covered[arm.edge] {
                if arm.sign > 0.0 && a > arm.pos + 1e-12 && np >= a - 1e-15 {
                    return true;
                }
                if arm.sign < 0.0 && b < arm.pos - 1e-12 && np <= b + 1e-15 {
                    return true;
                }
            }
        }
        // Facing arms crossing.
        for (i, a) in self.arms.iter().enumerate() {
            for (j, b) in self.arms.iter().enumerate() {
                if i >= j || a.edge != b.edge || a.sign * b.sign >= 0.0 {
                    continue;
                }
                let (lo, hi) = if a.sign > 0.0 { (a, b) } else { (b, a) };
                if lo.pos >= hi.pos - 1e-12 {
                    continue;
                }
                let (zi, zj) = if a.sign > 0.0 { (rates[i], rates[j]) } else { (rates[j], rates[i]) };
                if lo.pos + zi * dt >= hi.pos - zj * dt - 1e-15 {
                    return true;
                }
            }
        }
        false
    }

    fn advance_exact(&mut self, rates: &[f64], dt: f64) {
        for (i, arm) in self.arms.iter_mut().enumerate() {
            let np = (arm.pos + arm.sign * rates[i] * dt).clamp(0.0, self.g.edge_len(arm.edge));
            if rates[i] > 0.0 {
                self.covered[arm.edge].push((arm.pos.min(np), arm.pos.max(np)));
            }
            arm.pos = np;
        }
        for e in 0..self.covered.len() {
            self.normalize(e);
        }
        self.t += dt;
    }

    /// Process arrivals/meetings after advancing to an event time.
    /// Returns true if the arm set changed (policy must be re-queried).
    fn transition(&mut self) -> bool {
        let mut changed = false;
        // Vertex arrivals.
        let mut arrivals: Vec<usize> = Vec::new();
        let mut keep: Vec<OArm> = Vec::new();
        for arm in &self.arms {
            let len = self.g.edge_len(arm.edge);
            let at_head = arm.sign > 0.0 && arm.pos >= len - 1e-9;
            let at_tail = arm.sign < 0.0 && arm.pos <= 1e-9;
            if at_head || at_tail {
                let v = if at_head { self.g.edges()[arm.edge].head } else { self.g.edges()[arm.edge].tail };
                arrivals.push(v);
                changed = true;
            } else {
                keep.push(*arm);
            }
        }
        self.arms = keep;
        // Meetings: facing pairs that touched or crossed.
        loop {
            let mut hit: Option<(usize, usize)> = None;
            'scan: for i in 0..self.arms.len() {
                for j in i + 1..self.arms.len() {
                    let (a, b) = (self.arms[i], self.arms[j]);
                    if a.edge != b.edge || a.sign * b.sign >= 0.0 {
                        continue;
                    }
                    let (lo, hi) = if a.sign > 0.0 { (a.pos, b.pos) } else { (b.pos, a.pos) };
                    // Touching or just crossed; back-to-back pairs (the two
                    // ends of one covered interval) have hi << lo.
                    if hi - lo <= 1e-9 && hi - lo >= -1e-8 {
                        hit = Some((i, j));
                        break 'scan;
                    }
                }
            }
            match hit {
                Some((i, j)) => {
                    let e = self.arms[i].edge;
                    let (p, q) = (self.arms[i].pos, self.arms[j].pos);
                    self.add_cover(e, p.min(q), p.max(q));
                    self.arms.remove(j);
                    self.arms.remove(i);
                    changed = true;
                }
                None => break,
            }
        }
        // Arms swallowed by coverage (no gap ahead).
        let covered = &self.covered;
        let g = &self.g;
        self.arms.retain(|arm| {
            let inside = covered[arm.edge].iter().any(|&(a, b)| {
                if arm.sign > 0.0 {
                    arm.pos >= a - 1e-9 && arm.pos < b - 1e-9
                } else {
                    arm.pos > a + 1e-9 && arm.pos <= b + 1e-9
                }
            });
            !inside
        });
        let _ = g;
        // Spawns.
        arrivals.sort_unstable();
        arrivals.dedup();
        for v in arrivals {
            for &(eid, at_tail) in self.g.incident_edges(v) {
                let end = if at_tail { 0.0 } else { self.g.edge_len(eid) };
                if self.end_covered(eid, end) {
                    continue;
                }
                let sign = if at_tail { 1.0 } else { -1.0 };
                let already = self
                    .arms
                    .iter()
                    .any(|o| o.edge == eid && (o.pos - end).abs() <= 1e-9 && o.sign == sign);
                if !already {
                    self.arms.push(OArm { edge: eid, pos: end, sign });
                    changed = true;
                }
            }
        }
        changed
    }

    fn measure(&self) -> f64 {
        self.covered.iter().flatten().map(|&(a, b)| b - a).sum()
    }
}

/// Runs the oracle until `t_stop`, querying `next_rates` whenever the arm
/// set changes, and returns the covered intervals at `t_stop`.
fn oracle_run(
    g: &Arc<MetricGraph>,
    sources: &[GraphPoint],
    next_rates: &mut dyn FnMut(usize) -> Vec<f64>,
    t_stop: f64,
) -> Vec<Vec<(f64, f64)>> {
    let zeta = g.total_length();
    let step = zeta / 1e5;
    let mut o = Oracle::new(g, sources);
    let mut rates = next_rates(o.arms.len());
    let mut guard = 0usize;
    while o.t < t_stop - 1e-12 && !o.arms.is_empty() {
        guard += 1;
        assert!(guard < 3_000_000, "oracle failed to terminate");
        let dt = step.min(t_stop - o.t);
        if !o.event_within(&rates, dt) {
            o.advance_exact(&rates, dt);
            continue;
        }
        // Bisect the event time inside (0, dt].
        let (mut lo, mut hi) = (0.0f64, dt);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if o.event_within(&rates, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        o.advance_exact(&rates, hi);
        if o.transition() && !o.arms.is_empty() {
            rates = next_rates(o.arms.len());
        }
    }
    o.covered.clone()
}

/// Replicates the production random-simplex rate stream.
struct SimplexStream {
    rng: ChaCha8Rng,
}

impl SimplexStream {
    fn new(seed: u64) -> Self {
        SimplexStream { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn next(&mut self, m: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..m).map(|_| -(1.0 - self.rng.gen::<f64>()).ln()).collect();
        let s: f64 = v.iter().sum();
        for x in &mut v {
            *x /= s;
        }
        v
    }
}

fn random_graph_with_cycles(rng: &mut ChaCha8Rng) -> Arc<MetricGraph> {
    let n_extra = rng.gen_range(0..=2);
    loop {
        let verts = rng.gen_range(3..=7usize);
        let mut list: Vec<(String, String, f64)> = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 1..verts {
            let p = rng.gen_range(0..i);
            pairs.push((p, i));
            list.push((format!("v{p}"), format!("v{i}"), 0.1 + rng.gen::<f64>() * 2.9));
        }
        let mut tries = 0;
        let mut added = 0;
        while added < n_extra && tries < 20 {
            tries += 1;
            let a = rng.gen_range(0..verts);
            let b = rng.gen_range(0..verts);
            let key = (a.min(b), a.max(b));
            if a != b && !pairs.contains(&key) {
                pairs.push(key);
                list.push((format!("v{}", key.0), format!("v{}", key.1), 0.1 + rng.gen::<f64>() * 2.9));
                added += 1;
            }
        }
        if let Ok(g) = MetricGraph::from_edges(&list) {
            return g;
        }
    }
}

#[test]
fn criterion_11_simulation_oracle() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1100);
    for trial in 0..100u64 {
        let g = random_graph_with_cycles(&mut rng);
        let zeta = g.total_length();
        let n_sources = rng.gen_range(1..=2usize);
        let mut sources = Vec::new();
        while sources.len() < n_sources {
            let p = random_point(&mut rng, &g);
            if sources.iter().all(|&q| g.distance(p, q) > 0.05) {
                sources.push(p);
            }
        }
        let policy_seed = 5000 + trial;
        let mut policy = floodgraph::RandomSimplexPolicy::new(policy_seed);
        let f = simulate(&g, &sources, &mut policy).expect("simulate");

        // Compare covered sets at a few query times on a delta-net.
        let net = g.sample_net(zeta / 200.0);
        for frac in [0.19, 0.52, 0.83] {
            let t = frac * zeta;
            let mut stream = SimplexStream::new(policy_seed);
            let oracle_cov = oracle_run(&g, &sources, &mut |m| stream.next(m), t);
            let prod = f.covered_at(t).unwrap();
            // Measures agree.
            let om: f64 = oracle_cov.iter().flatten().map(|&(a, b)| b - a).sum();
            assert!(
                (om - prod.measure()).abs() <= 1e-6,
                "trial {trial}: measure {om} vs {} at t={t}",
                prod.measure()
            );
            // Net membership agrees except within 1e-6 of a boundary.
            for p in &net {
                let in_prod = prod
                    .intervals(p.edge)
                    .iter()
                    .any(|&(a, b)| p.offset >= a - 1e-9 && p.offset <= b + 1e-9);
                let in_orac = oracle_cov[p.edge]
                    .iter()
                    .any(|&(a, b)| p.offset >= a - 1e-9 && p.offset <= b + 1e-9);
                if in_prod != in_orac {
                    let near_boundary = prod
                        .intervals(p.edge)
                        .iter()
                        .chain(oracle_cov[p.edge].iter())
                        .any(|&(a, b)| (p.offset - a).abs() <= 1e-6 || (p.offset - b).abs() <= 1e-6);
                    assert!(
                        near_boundary,
                        "trial {trial}: net point ({}, {}) coverage mismatch at t={t}",
                        p.edge, p.offset
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    gate(
        "11 (event-driven simulator matches brute-force stepper)",
        elapsed.as_secs_f64() < 120.0,
        &format!("100 triples, runtime {elapsed:.2?}"),
    );
}

#[test]
fn stage_bound_holds_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..30 {
        let g = random_graph_with_cycles(&mut rng);
        let src = random_point(&mut rng, &g);
        let f = simulate(&g, &[src], &mut UniformPolicy).unwrap();
        assert!(f.stage_count() <= g.vertex_count() + g.edge_count() + 1);
    }
    for _ in 0..20 {
        let g = random_tree(&mut rng, 12);
        let f = simulate(&g, &[centroid(&g).unwrap()], &mut ProportionalPolicy::single()).unwrap();
        assert!(f.stage_count() <= g.vertex_count() + g.edge_count() + 1);
    }
}

#[test]
fn beta_star_monotone_in_sources() {
    // Adding a source cannot decrease the achievable entropy.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..6 {
        let g = random_tree(&mut rng, 6);
        let b1 = optimal_flooding(&g, 1).unwrap().beta_star;
        let b2 = optimal_flooding(&g, 2).unwrap().beta_star;
        assert!(b2 >= b1 - 1e-9, "beta*(2) = {b2} < beta*(1) = {b1}");
        let b3 = optimal_flooding(&g, 3).unwrap().beta_star;
        assert!(b3 >= b2 - 1e-9, "beta*(3) = {b3} < beta*(2) = {b2}");
    }
}

#[test]
fn circle_graph_is_isometric_circle() {
    // Guard for the circle fixture used by criterion 1.
    let g = circle_graph();
    assert!((g.total_length() - 1.0).abs() < 1e-12);
    assert_eq!(g.edge_count(), 3);
}
