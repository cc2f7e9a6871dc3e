//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};
use proptest::prelude::*;
use symshape::predicate::Comparator;
use symshape::{Metric, Predicate, SymbolicAutomaton};

pub fn eval(p: &Predicate, x: i64, y: i64) -> bool {
    match p {
        Predicate::True => true,
        Predicate::False => false,
        Predicate::Atom { var, op, constant } => {
            let lhs = if var == "x" { x } else { y };
            match op {
                Comparator::Lt => lhs < *constant,
                Comparator::Le => lhs <= *constant,
                Comparator::Gt => lhs > *constant,
                Comparator::Ge => lhs >= *constant,
                Comparator::Eq => lhs == *constant,
            }
        }
        Predicate::Not(a) => !eval(a, x, y),
        Predicate::And(a, b) => eval(a, x, y) && eval(b, x, y),
    }
}

pub fn dist(m: Metric, a: (i64, i64), b: (i64, i64)) -> f64 {
    let dx = (a.0 - b.0).abs() as f64;
    let dy = (a.1 - b.1).abs() as f64;
    match m {
        Metric::Manhattan => dx + dy,
        Metric::Euclidean => (dx * dx + dy * dy).sqrt(),
        Metric::Chebyshev => dx.max(dy),
    }
}

pub fn cells(w: i64, h: i64) -> Vec<(i64, i64)> {
    (0..w).flat_map(|x| (0..h).map(move |y| (x, y))).collect()
}

pub fn members(p: &Predicate, w: i64, h: i64) -> Vec<(i64, i64)> {
    cells(w, h).into_iter().filter(|&(x, y)| eval(p, x, y)).collect()
}

pub fn brute_vpd(p: &Predicate, v: (i64, i64), w: i64, h: i64, m: Metric) -> f64 {
    let mut best = f64::INFINITY;
    for c in cells(w, h) {
        if eval(p, c.0, c.1) {
            let d = dist(m, v, c);
            if d < best {
                best = d;
            }
        }
    }
    best
}

pub fn brute_hausdorff(a: &Predicate, b: &Predicate, w: i64, h: i64, m: Metric) -> f64 {
    let sa = members(a, w, h);
    let sb = members(b, w, h);
    if sa.is_empty() || sb.is_empty() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for &p in &sa {
        let mut near = f64::INFINITY;
        for &q in &sb {
            near = near.min(dist(m, p, q));
        }
        worst = worst.max(near);
    }
    for &q in &sb {
        let mut near = f64::INFINITY;
        for &p in &sa {
            near = near.min(dist(m, p, q));
        }
        worst = worst.max(near);
    }
    worst
}

fn atom(max: i64) -> impl Strategy<Value = Predicate> {
    let ops = prop_oneof![
        Just(Comparator::Lt),
        Just(Comparator::Le),
        Just(Comparator::Gt),
        Just(Comparator::Ge),
        Just(Comparator::Eq),
    ];
    (prop_oneof![Just("x"), Just("y")], ops, -1..=max + 1)
        .prop_map(|(var, op, c)| Predicate::atom(var, op, c))
}

/// Random predicates over variables `x` and `y` with constants around `0..=max`.
pub fn predicate(max: i64) -> impl Strategy<Value = Predicate> {
    let leaf = prop_oneof![
        1 => Just(Predicate::True),
        1 => Just(Predicate::False),
        8 => atom(max),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Predicate::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Predicate::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Predicate::or(a, b)),
        ]
    })
}

pub fn metric() -> impl Strategy<Value = Metric> {
    prop_oneof![
        Just(Metric::Manhattan),
        Just(Metric::Euclidean),
        Just(Metric::Chebyshev)
    ]
}

/// Shortest simple path length from every location to an accepting one,
/// by exhaustive depth-first enumeration.
pub fn simple_path_eta(a: &SymbolicAutomaton) -> Vec<Option<usize>> {
    let n = a.location_count();
    let mut succ: Vec<HashSet<usize>> = vec![HashSet::new(); n];
    for t in a.transitions() {
        if t.from != t.to {
            succ[t.from.0].insert(t.to.0);
        }
    }
    let accepting: Vec<bool> = a.locations().map(|q| a.is_accepting(q)).collect();
    fn search(
        q: usize,
        depth: usize,
        on_path: &mut Vec<bool>,
        succ: &[HashSet<usize>],
        accepting: &[bool],
        best: &mut Option<usize>,
    ) {
        if accepting[q] {
            *best = Some(best.map_or(depth, |b| b.min(depth)));
            return;
        }
        for &r in &succ[q] {
            if !on_path[r] {
                on_path[r] = true;
                search(r, depth + 1, on_path, succ, accepting, best);
                on_path[r] = false;
            }
        }
    }
    (0..n)
        .map(|q| {
            let mut best = None;
            let mut on_path = vec![false; n];
            on_path[q] = true;
            search(q, 0, &mut on_path, &succ, &accepting, &mut best);
            best
        })
        .collect()
}

/// Subtask progress per transition via petgraph's Dijkstra on the reversed
/// line graph, one search from a virtual sink joined to every transition into F.
pub fn dijkstra_phi_sym(a: &SymbolicAutomaton, m: Metric) -> Vec<f64> {
    let dom = a.domain();
    let (w, h) = (dom.ranges()[0].1 + 1, dom.ranges()[1].1 + 1);
    let trs = a.transitions();
    let sets: Vec<Vec<(i64, i64)>> = trs.iter().map(|t| members(&t.guard, w, h)).collect();
    let mut g: DiGraph<(), f64> = DiGraph::new();
    let nodes: Vec<NodeIndex> = trs.iter().map(|_| g.add_node(())).collect();
    let sink = g.add_node(());
    for (i, t) in trs.iter().enumerate() {
        if a.is_accepting(t.to) {
            g.add_edge(sink, nodes[i], 0.0);
            continue;
        }
        for (j, u) in trs.iter().enumerate() {
            if u.from == t.to && u.from != u.to {
                let hd = hausdorff_sets(&sets[i], &sets[j], m);
                if hd.is_finite() {
                    g.add_edge(nodes[j], nodes[i], hd);
                }
            }
        }
    }
    let found = dijkstra(&g, sink, None, |e| *e.weight());
    nodes
        .iter()
        .map(|n| found.get(n).copied().unwrap_or(f64::INFINITY))
        .collect()
}

pub fn hausdorff_sets(sa: &[(i64, i64)], sb: &[(i64, i64)], m: Metric) -> f64 {
    if sa.is_empty() || sb.is_empty() {
        return f64::INFINITY;
    }
    let directed = |xs: &[(i64, i64)], ys: &[(i64, i64)]| {
        xs.iter()
            .map(|&p| ys.iter().map(|&q| dist(m, p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(sa, sb).max(directed(sb, sa))
}

/// Direct reading of "alternate between A and B, consecutive visits at most
/// `gap` steps apart, for `span` steps": find the greedy visit times and
/// check every waiting stretch, including the one before the first visit and
/// the one after the last.
pub fn recurrence_oracle(trace: &[(bool, bool)], gap: usize, span: usize) -> bool {
    let steps = &trace[..span.min(trace.len())];
    if steps.len() < span {
        return false;
    }
    let mut need: Option<bool> = None; // Some(true) = need A next
    let mut visits = vec![0usize];
    for (i, &(in_a, in_b)) in steps.iter().enumerate() {
        let pos = i + 1;
        let hit = match need {
            None if in_a => Some(false),
            None if in_b => Some(true),
            None => None,
            Some(true) if in_a => Some(false),
            Some(false) if in_b => Some(true),
            _ => None,
        };
        if let Some(next) = hit {
            need = Some(next);
            visits.push(pos);
        }
    }
    let inner_ok = visits.windows(2).all(|w| w[1] - w[0] <= gap);
    let tail = span - visits.last().unwrap();
    inner_ok && tail < gap
}

/// Breadth-first reachability over a directed adjacency list.
pub fn reachable(adj: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}
