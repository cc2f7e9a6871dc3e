//! Symbolic automata: locations joined by predicate-guarded transitions.
//!
//! Besides the run semantics this module computes the three automaton-level
//! quantities the reward strategies need: the task progress level (shortest
//! distance to acceptance), the per-transition symbolic subtask progress, and
//! the progress-level potential used by the automaton-only shaping baseline.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::predicate::{
    parse_predicate, Domain, Metric, Predicate, PredicateError, Valuation, ValueSet,
};

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Guard {
        line: usize,
        #[source]
        source: PredicateError,
    },
    #[error("unknown location `{0}`")]
    UnknownLocation(String),
    #[error("duplicate location `{0}`")]
    DuplicateLocation(String),
    #[error("duplicate transition {0} -> {1}")]
    DuplicateTransition(String, String),
    #[error("missing `{0}` declaration")]
    MissingDeclaration(&'static str),
    #[error("`{0}` declared more than once")]
    RepeatedDeclaration(&'static str),
    #[error("automaton has no transitions")]
    NoTransitions,
    #[error("no transition enabled from {location} on {valuation}")]
    Blocked {
        location: String,
        valuation: Valuation,
    },
    #[error("transitions {location} -> {first} and {location} -> {second} both enabled on {valuation}")]
    Ambiguous {
        location: String,
        first: String,
        second: String,
        valuation: Valuation,
    },
    #[error("invalid builder parameters: {0}")]
    InvalidParameters(String),
    #[error("goal predicate `{0}` is unsatisfiable over the domain")]
    EmptyGoal(String),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: LocationId,
    pub to: LocationId,
    pub guard: Predicate,
}

#[derive(Debug, Clone)]
pub struct SymbolicAutomaton {
    domain: Domain,
    locations: Vec<String>,
    initial: LocationId,
    accepting: Vec<bool>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl SymbolicAutomaton {
    /// Assembles an automaton from named parts. Guards must only mention
    /// variables of `domain`; duplicate `(from, to)` pairs are rejected.
    pub fn new(
        domain: Domain,
        locations: Vec<String>,
        initial: &str,
        accepting: &[&str],
        transitions: Vec<(String, String, Predicate)>,
    ) -> Result<Self, AutomatonError> {
        let mut index = HashMap::new();
        for (i, name) in locations.iter().enumerate() {
            if index.insert(name.clone(), LocationId(i)).is_some() {
                return Err(AutomatonError::DuplicateLocation(name.clone()));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| AutomatonError::UnknownLocation(name.to_string()))
        };
        let initial = lookup(initial)?;
        let mut accepting_flags = vec![false; locations.len()];
        for name in accepting {
            accepting_flags[lookup(name)?.0] = true;
        }
        if transitions.is_empty() {
            return Err(AutomatonError::NoTransitions);
        }
        let mut outgoing = vec![Vec::new(); locations.len()];
        let mut built: Vec<Transition> = Vec::with_capacity(transitions.len());
        for (from, to, guard) in transitions {
            let from_id = lookup(&from)?;
            let to_id = lookup(&to)?;
            guard.check_variables(&domain)?;
            if outgoing[from_id.0]
                .iter()
                .any(|&t: &usize| built[t].to == to_id)
            {
                return Err(AutomatonError::DuplicateTransition(from, to));
            }
            outgoing[from_id.0].push(built.len());
            built.push(Transition {
                from: from_id,
                to: to_id,
                guard,
            });
        }
        Ok(SymbolicAutomaton {
            domain,
            locations,
            initial,
            accepting: accepting_flags,
            transitions: built,
            outgoing,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn locations(&self) -> impl Iterator<Item = LocationId> {
        (0..self.locations.len()).map(LocationId)
    }

    pub fn name(&self, q: LocationId) -> &str {
        &self.locations[q.0]
    }

    pub fn location(&self, name: &str) -> Option<LocationId> {
        self.locations.iter().position(|n| n == name).map(LocationId)
    }

    pub fn initial(&self) -> LocationId {
        self.initial
    }

    pub fn is_accepting(&self, q: LocationId) -> bool {
        self.accepting[q.0]
    }

    pub fn accepting(&self) -> impl Iterator<Item = LocationId> + '_ {
        self.locations().filter(|q| self.accepting[q.0])
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Indices into [`transitions`](Self::transitions) of the edges leaving `q`.
    pub fn outgoing(&self, q: LocationId) -> &[usize] {
        &self.outgoing[q.0]
    }

    pub fn transition(&self, from: LocationId, to: LocationId) -> Option<&Transition> {
        self.outgoing[from.0]
            .iter()
            .map(|&t| &self.transitions[t])
            .find(|t| t.to == to)
    }

    /// Index of the transition `from -> to`.
    pub fn transition_index(&self, from: LocationId, to: LocationId) -> Option<usize> {
        self.outgoing[from.0]
            .iter()
            .copied()
            .find(|&t| self.transitions[t].to == to)
    }

    /// Fires the unique enabled transition out of `q` on valuation `v`.
    pub fn step(&self, q: LocationId, v: &Valuation) -> Result<LocationId, AutomatonError> {
        let mut fired: Option<LocationId> = None;
        for &t in &self.outgoing[q.0] {
            let tr = &self.transitions[t];
            if tr.guard.satisfies(&self.domain, v)? {
                if let Some(first) = fired {
                    return Err(AutomatonError::Ambiguous {
                        location: self.name(q).to_string(),
                        first: self.name(first).to_string(),
                        second: self.name(tr.to).to_string(),
                        valuation: v.clone(),
                    });
                }
                fired = Some(tr.to);
            }
        }
        fired.ok_or_else(|| AutomatonError::Blocked {
            location: self.name(q).to_string(),
            valuation: v.clone(),
        })
    }

    /// Runs the trace from the initial location; true iff the run ends accepting.
    pub fn accepts(&self, trace: &[Valuation]) -> Result<bool, AutomatonError> {
        let mut q = self.initial;
        for v in trace {
            q = self.step(q, v)?;
        }
        Ok(self.is_accepting(q))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if !self.accepting.iter().any(|&a| a) {
            violations.push(Violation::NoAcceptingLocation);
        }
        for tr in &self.transitions {
            if self.is_accepting(tr.from) && !self.is_accepting(tr.to) {
                violations.push(Violation::LeavesAcceptance {
                    from: self.name(tr.from).to_string(),
                    to: self.name(tr.to).to_string(),
                });
            }
        }
        for q in self.locations() {
            let edges = &self.outgoing[q.0];
            let mut overlaps: BTreeMap<(usize, usize), Valuation> = BTreeMap::new();
            let mut uncovered = None;
            for v in self.domain.valuations() {
                let enabled: Vec<usize> = edges
                    .iter()
                    .copied()
                    .filter(|&t| {
                        self.transitions[t]
                            .guard
                            .satisfies(&self.domain, &v)
                            .unwrap_or(false)
                    })
                    .collect();
                if enabled.is_empty() && uncovered.is_none() {
                    uncovered = Some(v.clone());
                }
                for (i, &a) in enabled.iter().enumerate() {
                    for &b in &enabled[i + 1..] {
                        overlaps.entry((a, b)).or_insert_with(|| v.clone());
                    }
                }
            }
            for ((a, b), witness) in overlaps {
                violations.push(Violation::Nondeterministic {
                    location: self.name(q).to_string(),
                    first: self.name(self.transitions[a].to).to_string(),
                    second: self.name(self.transitions[b].to).to_string(),
                    witness,
                });
            }
            if let Some(witness) = uncovered {
                violations.push(Violation::Incomplete {
                    location: self.name(q).to_string(),
                    witness,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Task progress level: unweighted distance to the nearest accepting
    /// location, ignoring self-loops. `None` when acceptance is unreachable.
    pub fn compute_eta(&self) -> ProgressLevels {
        let mut levels = vec![None; self.location_count()];
        let mut predecessors = vec![Vec::new(); self.location_count()];
        for tr in &self.transitions {
            if tr.from != tr.to {
                predecessors[tr.to.0].push(tr.from);
            }
        }
        let mut queue = VecDeque::new();
        for q in self.accepting() {
            levels[q.0] = Some(0);
            queue.push_back(q);
        }
        while let Some(q) = queue.pop_front() {
            let next = levels[q.0].map(|l| l + 1);
            for &p in &predecessors[q.0] {
                if levels[p.0].is_none() {
                    levels[p.0] = next;
                    queue.push_back(p);
                }
            }
        }
        ProgressLevels { levels }
    }

    pub fn guard_value_sets(&self) -> Result<Vec<ValueSet>, AutomatonError> {
        self.transitions
            .iter()
            .map(|tr| tr.guard.value_set(&self.domain).map_err(Into::into))
            .collect()
    }

    /// Symbolic subtask progress for every transition.
    ///
    /// Solved as a shortest-path problem on the line graph of the automaton:
    /// transitions into accepting locations are sources at 0, and a transition
    /// `(q, q')` relaxes through each non-self-loop successor `(q', q'')` with
    /// weight equal to the Hausdorff distance between their guard sets.
    pub fn compute_phi_sym(&self, metric: Metric) -> Result<SubtaskProgress, AutomatonError> {
        let sets = self.guard_value_sets()?;
        let n = self.transitions.len();
        let mut values = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for (t, tr) in self.transitions.iter().enumerate() {
            if self.is_accepting(tr.to) {
                values[t] = 0.0;
                heap.push(Pending { cost: 0.0, transition: t });
            }
        }
        // incoming[q] = transitions that end in q and are not already sources.
        let mut incoming = vec![Vec::new(); self.location_count()];
        for (t, tr) in self.transitions.iter().enumerate() {
            if !self.is_accepting(tr.to) {
                incoming[tr.to.0].push(t);
            }
        }
        let mut weights: HashMap<(usize, usize), f64> = HashMap::new();
        while let Some(Pending { cost, transition }) = heap.pop() {
            if cost > values[transition] {
                continue;
            }
            let succ = &self.transitions[transition];
            if succ.from == succ.to {
                continue;
            }
            for &pred in &incoming[succ.from.0] {
                let w = *weights
                    .entry((pred, transition))
                    .or_insert_with(|| sets[pred].hausdorff(&sets[transition], metric));
                let candidate = cost + w;
                if candidate < values[pred] {
                    values[pred] = candidate;
                    heap.push(Pending {
                        cost: candidate,
                        transition: pred,
                    });
                }
            }
        }
        Ok(SubtaskProgress { values })
    }

    /// The progress-level potential of the automaton-only shaping baseline.
    pub fn compute_lavaei(&self, eta: &ProgressLevels, kappa: f64) -> LavaeiPotential {
        let eta_max = 1 + eta.levels.iter().flatten().copied().max().unwrap_or(0);
        // Unreachable locations sit at the level just beyond the worst finite one.
        let level = |q: usize| eta.levels[q].unwrap_or(eta_max) as f64;
        let init_level = level(self.initial.0);
        let denom = 1.0 - eta_max as f64;
        let values = (0..self.location_count())
            .map(|q| match eta.levels[q] {
                Some(0) => 1.0,
                _ if denom == 0.0 => 0.0,
                _ => kappa * (level(q) - init_level) / denom,
            })
            .collect();
        LavaeiPotential {
            kappa,
            eta_max,
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    cost: f64,
    transition: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.transition.cmp(&self.transition))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoAcceptingLocation,
    LeavesAcceptance {
        from: String,
        to: String,
    },
    Nondeterministic {
        location: String,
        first: String,
        second: String,
        witness: Valuation,
    },
    Incomplete {
        location: String,
        witness: Valuation,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAcceptingLocation => write!(f, "no accepting location"),
            Violation::LeavesAcceptance { from, to } => write!(
                f,
                "not terminally accepting: accepting {from} has a transition to non-accepting {to}"
            ),
            Violation::Nondeterministic {
                location,
                first,
                second,
                witness,
            } => write!(
                f,
                "nondeterministic: guards of {location} -> {first} and {location} -> {second} both hold at {witness}"
            ),
            Violation::Incomplete { location, witness } => write!(
                f,
                "incomplete: no guard out of {location} holds at {witness}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: automaton is terminally accepting, deterministic and complete");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgressLevels {
    levels: Vec<Option<usize>>,
}

impl ProgressLevels {
    /// `None` stands for an infinite level.
    pub fn get(&self, q: LocationId) -> Option<usize> {
        self.levels[q.0]
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.levels
    }
}

/// Symbolic subtask progress, indexed like [`SymbolicAutomaton::transitions`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubtaskProgress {
    values: Vec<f64>,
}

impl SubtaskProgress {
    pub fn get(&self, transition: usize) -> f64 {
        self.values[transition]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LavaeiPotential {
    pub kappa: f64,
    pub eta_max: usize,
    values: Vec<f64>,
}

impl LavaeiPotential {
    pub fn get(&self, q: LocationId) -> f64 {
        self.values[q.0]
    }

    /// Shaping reward for an automaton move `from -> to`.
    pub fn reward(&self, from: LocationId, to: LocationId) -> f64 {
        self.values[to.0] - self.values[from.0]
    }
}

/// Parses the line-oriented automaton format:
///
/// ```text
/// vars: x 0 5, y 0 5
/// states: q0 qF
/// init: q0
/// accepting: qF
/// q0 -> qF : (x >= 4) & (y >= 4)
/// q0 -> q0 : !((x >= 4) & (y >= 4))
/// qF -> qF : true
/// ```
pub fn parse_automaton(text: &str) -> Result<SymbolicAutomaton, AutomatonError> {
    let mut vars: Option<Domain> = None;
    let mut states: Option<Vec<String>> = None;
    let mut init: Option<String> = None;
    let mut accepting: Option<Vec<String>> = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| AutomatonError::Syntax {
            line: line_no,
            message,
        };
        if let Some((lhs, rhs)) = line.split_once("->") {
            let from = lhs.trim();
            let (to, guard) = rhs
                .split_once(':')
                .ok_or_else(|| syntax("transition is missing `: <guard>`".into()))?;
            let to = to.trim();
            if from.is_empty() || to.is_empty() || from.contains(' ') || to.contains(' ') {
                return Err(syntax(format!("malformed transition `{line}`")));
            }
            let guard = parse_predicate(guard.trim()).map_err(|source| AutomatonError::Guard {
                line: line_no,
                source,
            })?;
            edges.push((from.to_string(), to.to_string(), guard));
            edge_lines.push(line_no);
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| syntax(format!("unrecognised line `{line}`")))?;
        let value = value.trim();
        match key.trim() {
            "vars" => {
                if vars.is_some() {
                    return Err(AutomatonError::RepeatedDeclaration("vars"));
                }
                let mut decl = Vec::new();
                for item in value.split(',') {
                    let parts: Vec<&str> = item.split_whitespace().collect();
                    let [name, lo, hi] = parts[..] else {
                        return Err(syntax(format!("expected `name lo hi`, got `{}`", item.trim())));
                    };
                    let parse = |s: &str| {
                        s.parse::<i64>()
                            .map_err(|_| syntax(format!("invalid bound `{s}`")))
                    };
                    decl.push((name.to_string(), parse(lo)?, parse(hi)?));
                }
                vars = Some(Domain::new(decl).map_err(|e| syntax(e.to_string()))?);
            }
            "states" => {
                if states.is_some() {
                    return Err(AutomatonError::RepeatedDeclaration("states"));
                }
                states = Some(value.split_whitespace().map(String::from).collect());
            }
            "init" => {
                if init.is_some() {
                    return Err(AutomatonError::RepeatedDeclaration("init"));
                }
                if value.split_whitespace().count() != 1 {
                    return Err(syntax("`init` takes exactly one location".into()));
                }
                init = Some(value.to_string());
            }
            "accepting" => {
                if accepting.is_some() {
                    return Err(AutomatonError::RepeatedDeclaration("accepting"));
                }
                accepting = Some(value.split_whitespace().map(String::from).collect());
            }
            other => return Err(syntax(format!("unknown declaration `{other}`"))),
        }
    }

    let domain = vars.ok_or(AutomatonError::MissingDeclaration("vars"))?;
    let states = states.ok_or(AutomatonError::MissingDeclaration("states"))?;
    let init = init.ok_or(AutomatonError::MissingDeclaration("init"))?;
    let accepting = accepting.ok_or(AutomatonError::MissingDeclaration("accepting"))?;
    let accepting: Vec<&str> = accepting.iter().map(String::as_str).collect();
    for ((_, _, guard), line) in edges.iter().zip(&edge_lines) {
        guard
            .check_variables(&domain)
            .map_err(|source| AutomatonError::Guard {
                line: *line,
                source,
            })?;
    }
    SymbolicAutomaton::new(domain, states, &init, &accepting, edges)
}

impl fmt::Display for SymbolicAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self
            .domain
            .variables()
            .iter()
            .zip(self.domain.ranges())
            .map(|(name, (lo, hi))| format!("{name} {lo} {hi}"))
            .collect();
        writeln!(f, "vars: {}", vars.join(", "))?;
        writeln!(f, "states: {}", self.locations.join(" "))?;
        writeln!(f, "init: {}", self.name(self.initial))?;
        let acc: Vec<&str> = self.accepting().map(|q| self.name(q)).collect();
        writeln!(f, "accepting: {}", acc.join(" "))?;
        for tr in &self.transitions {
            writeln!(
                f,
                "{} -> {} : {}",
                self.name(tr.from),
                self.name(tr.to),
                tr.guard
            )?;
        }
        Ok(())
    }
}

fn require_nonempty(goal: &Predicate, dom: &Domain) -> Result<(), AutomatonError> {
    if goal.value_set(dom)?.is_empty() {
        return Err(AutomatonError::EmptyGoal(goal.to_string()));
    }
    Ok(())
}

/// Reach `goal` within `deadline` steps: a counter chain `q0..q{deadline-1}`,
/// an accepting sink `qF` and a reject sink `qR`.
pub fn build_bounded_reach(
    goal: &Predicate,
    deadline: usize,
    dom: &Domain,
) -> Result<SymbolicAutomaton, AutomatonError> {
    if deadline == 0 {
        return Err(AutomatonError::InvalidParameters(
            "deadline must be at least 1".into(),
        ));
    }
    require_nonempty(goal, dom)?;
    let mut locations: Vec<String> = (0..deadline).map(|i| format!("q{i}")).collect();
    locations.push("qF".into());
    locations.push("qR".into());
    let mut edges = Vec::new();
    for i in 0..deadline {
        let next = if i + 1 < deadline {
            format!("q{}", i + 1)
        } else {
            "qR".to_string()
        };
        edges.push((format!("q{i}"), "qF".to_string(), goal.clone()));
        edges.push((format!("q{i}"), next, Predicate::not(goal.clone())));
    }
    edges.push(("qF".into(), "qF".into(), Predicate::True));
    edges.push(("qR".into(), "qR".into(), Predicate::True));
    SymbolicAutomaton::new(dom.clone(), locations, "q0", &["qF"], edges)
}

/// Visit every goal in order. Locations `q0..q{n-1}` wait on their goal with a
/// complement self-loop; `qF` is the accepting sink.
pub fn build_sequential(
    goals: &[Predicate],
    dom: &Domain,
) -> Result<SymbolicAutomaton, AutomatonError> {
    if goals.is_empty() {
        return Err(AutomatonError::InvalidParameters(
            "at least one goal is required".into(),
        ));
    }
    for g in goals {
        require_nonempty(g, dom)?;
    }
    let n = goals.len();
    let name = |i: usize| if i == n { "qF".to_string() } else { format!("q{i}") };
    let locations: Vec<String> = (0..=n).map(name).collect();
    let mut edges = Vec::new();
    for (i, g) in goals.iter().enumerate() {
        edges.push((name(i), name(i + 1), g.clone()));
        edges.push((name(i), name(i), Predicate::not(g.clone())));
    }
    edges.push((name(n), name(n), Predicate::True));
    SymbolicAutomaton::new(dom.clone(), locations, "q0", &["qF"], edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Phase {
    Either,
    NeedA,
    NeedB,
}

impl Phase {
    fn tag(self) -> &'static str {
        match self {
            Phase::Either => "e",
            Phase::NeedA => "a",
            Phase::NeedB => "b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum RecurrenceNode {
    Track { phase: Phase, since: usize, time: usize },
    Accept,
    Reject,
}

impl RecurrenceNode {
    fn name(self) -> String {
        match self {
            RecurrenceNode::Track { phase, since, time } => {
                format!("{}{since}t{time}", phase.tag())
            }
            RecurrenceNode::Accept => "qF".into(),
            RecurrenceNode::Reject => "qR".into(),
        }
    }
}

/// Alternate between regions `a` and `b`, with consecutive visits at most
/// `gap` steps apart (the first visit counts from time 0), for `horizon` steps.
///
/// Locations track the region needed next, the steps since the last visit and
/// the global time; only locations reachable from the start are emitted.
/// A step landing in both regions while either is acceptable counts as `a`.
pub fn build_recurrence(
    a: &Predicate,
    b: &Predicate,
    gap: usize,
    horizon: usize,
    dom: &Domain,
) -> Result<SymbolicAutomaton, AutomatonError> {
    if gap == 0 || horizon < gap {
        return Err(AutomatonError::InvalidParameters(format!(
            "need 1 <= gap <= horizon, got gap={gap}, horizon={horizon}"
        )));
    }
    require_nonempty(a, dom)?;
    require_nonempty(b, dom)?;

    let in_a = a.clone();
    let in_b_only = Predicate::and(b.clone(), Predicate::not(a.clone()));
    let in_neither = Predicate::and(Predicate::not(a.clone()), Predicate::not(b.clone()));
    let not_a = Predicate::not(a.clone());
    let not_b = Predicate::not(b.clone());

    let advance = |phase: Phase, visited: bool, since: usize, time: usize| {
        if !visited && since + 1 >= gap {
            return RecurrenceNode::Reject;
        }
        if time + 1 >= horizon {
            return RecurrenceNode::Accept;
        }
        let (phase, since) = if visited { (phase, 0) } else { (phase, since + 1) };
        RecurrenceNode::Track {
            phase,
            since,
            time: time + 1,
        }
    };

    let start = RecurrenceNode::Track {
        phase: Phase::Either,
        since: 0,
        time: 0,
    };
    let mut order = vec![start];
    let mut seen: HashMap<RecurrenceNode, usize> = HashMap::from([(start, 0)]);
    let mut edges: Vec<(RecurrenceNode, RecurrenceNode, Predicate)> = Vec::new();
    let mut cursor = 0;
    while cursor < order.len() {
        let node = order[cursor];
        cursor += 1;
        let RecurrenceNode::Track { phase, since, time } = node else {
            edges.push((node, node, Predicate::True));
            continue;
        };
        let classes: Vec<(Predicate, RecurrenceNode)> = match phase {
            Phase::Either => vec![
                (in_a.clone(), advance(Phase::NeedB, true, since, time)),
                (in_b_only.clone(), advance(Phase::NeedA, true, since, time)),
                (in_neither.clone(), advance(Phase::Either, false, since, time)),
            ],
            Phase::NeedB => vec![
                (b.clone(), advance(Phase::NeedA, true, since, time)),
                (not_b.clone(), advance(Phase::NeedB, false, since, time)),
            ],
            Phase::NeedA => vec![
                (a.clone(), advance(Phase::NeedB, true, since, time)),
                (not_a.clone(), advance(Phase::NeedA, false, since, time)),
            ],
        };
        // Classes sharing a target are merged into one disjunctive guard.
        let mut merged: Vec<(RecurrenceNode, Predicate)> = Vec::new();
        for (guard, target) in classes {
            match merged.iter_mut().find(|(t, _)| *t == target) {
                Some((_, g)) => *g = Predicate::or(g.clone(), guard),
                None => merged.push((target, guard)),
            }
        }
        for (target, guard) in merged {
            if !seen.contains_key(&target) {
                seen.insert(target, order.len());
                order.push(target);
            }
            edges.push((node, target, guard));
        }
    }
    for sink in [RecurrenceNode::Accept, RecurrenceNode::Reject] {
        if !seen.contains_key(&sink) {
            seen.insert(sink, order.len());
            order.push(sink);
            edges.push((sink, sink, Predicate::True));
        }
    }
    let locations: Vec<String> = order.iter().map(|n| n.name()).collect();
    let edges = edges
        .into_iter()
        .map(|(from, to, g)| (from.name(), to.name(), g))
        .collect();
    SymbolicAutomaton::new(dom.clone(), locations, &start.name(), &["qF"], edges)
}
