//! Product of a grid MDP with a symbolic automaton, its reward strategies and
//! exact finite-horizon dynamic programming over it.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::automaton::{
    AutomatonError, LavaeiPotential, LocationId, SymbolicAutomaton, ValidationReport,
};
use crate::gridworld::{sample_outcome, Action, Cell, GridWorld, ACTION_COUNT};
use crate::predicate::{Metric, Valuation};

#[derive(Debug, Error)]
pub enum ProductError {
    #[error("automaton domain does not match a {width}x{height} grid: {detail}")]
    DomainMismatch {
        width: usize,
        height: usize,
        detail: String,
    },
    #[error("automaton is not valid:\n{0}")]
    InvalidAutomaton(ValidationReport),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("invalid reward configuration: {0}")]
    InvalidConfig(String),
}

/// Which valuation drives the automaton on a product step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuardSemantics {
    /// The arriving cell `s'` fires the guard.
    #[default]
    Next,
    /// The departing cell `s` fires the guard.
    Current,
}

impl FromStr for GuardSemantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "next" => Ok(GuardSemantics::Next),
            "current" => Ok(GuardSemantics::Current),
            other => Err(format!("unknown guard semantics `{other}`")),
        }
    }
}

/// Product states are dense indices `location * cells + cell`.
pub type StateId = usize;

#[derive(Debug, Clone)]
pub struct ProductMDP {
    env: GridWorld,
    spec: SymbolicAutomaton,
    semantics: GuardSemantics,
    cells: usize,
    /// `next_location[q * cells + c]`: automaton successor of `q` on cell `c`.
    next_location: Vec<u32>,
    /// Environment outcomes for `cell * ACTION_COUNT + action`.
    moves: Vec<Vec<(u32, f64)>>,
}

impl ProductMDP {
    pub fn new(
        env: GridWorld,
        spec: SymbolicAutomaton,
        semantics: GuardSemantics,
    ) -> Result<Self, ProductError> {
        let dom = spec.domain();
        let expected = env.domain();
        if dom != &expected {
            let found: Vec<String> = dom
                .variables()
                .iter()
                .zip(dom.ranges())
                .map(|(v, (lo, hi))| format!("{v} {lo} {hi}"))
                .collect();
            return Err(ProductError::DomainMismatch {
                width: env.width(),
                height: env.height(),
                detail: format!("found vars `{}`", found.join(", ")),
            });
        }
        let report = spec.validate();
        if !report.is_valid() {
            return Err(ProductError::InvalidAutomaton(report));
        }
        let cells = env.cell_count();
        let mut next_location = Vec::with_capacity(cells * spec.location_count());
        for q in spec.locations() {
            for c in env.cells() {
                next_location.push(spec.step(q, &crate::gridworld::valuation_of(c))?.0 as u32);
            }
        }
        let mut moves = Vec::with_capacity(cells * ACTION_COUNT);
        for c in env.cells() {
            for a in Action::ALL {
                let outcomes = if env.is_obstacle(c) {
                    vec![(env.cell_index(c) as u32, 1.0)]
                } else {
                    env.transition_dist(c, a)
                        .expect("free cell in bounds")
                        .outcomes()
                        .iter()
                        .map(|&(cell, p)| (env.cell_index(cell) as u32, p))
                        .collect()
                };
                moves.push(outcomes);
            }
        }
        Ok(ProductMDP {
            env,
            spec,
            semantics,
            cells,
            next_location,
            moves,
        })
    }

    pub fn env(&self) -> &GridWorld {
        &self.env
    }

    pub fn spec(&self) -> &SymbolicAutomaton {
        &self.spec
    }

    pub fn semantics(&self) -> GuardSemantics {
        self.semantics
    }

    pub fn state_count(&self) -> usize {
        self.cells * self.spec.location_count()
    }

    pub fn state(&self, cell: Cell, q: LocationId) -> StateId {
        q.0 * self.cells + self.env.cell_index(cell)
    }

    pub fn cell(&self, state: StateId) -> Cell {
        self.env.cell_at(state % self.cells)
    }

    pub fn location(&self, state: StateId) -> LocationId {
        LocationId(state / self.cells)
    }

    pub fn initial_state(&self) -> StateId {
        self.state(self.env.start(), self.spec.initial())
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.spec.is_accepting(self.location(state))
    }

    /// States whose cell is not an obstacle.
    pub fn is_reachable_cell(&self, state: StateId) -> bool {
        !self.env.is_obstacle(self.cell(state))
    }

    fn next_loc(&self, q: usize, cell: usize) -> usize {
        self.next_location[q * self.cells + cell] as usize
    }

    /// Product successors of `state` under `a`, with probabilities summing to one.
    pub fn successors(
        &self,
        state: StateId,
        a: Action,
    ) -> impl Iterator<Item = (StateId, f64)> + '_ {
        let cell = state % self.cells;
        let q = state / self.cells;
        let fixed = match self.semantics {
            GuardSemantics::Current => Some(self.next_loc(q, cell)),
            GuardSemantics::Next => None,
        };
        self.moves[cell * ACTION_COUNT + a.index()]
            .iter()
            .map(move |&(c, p)| {
                let c = c as usize;
                let q_next = fixed.unwrap_or_else(|| self.next_loc(q, c));
                (q_next * self.cells + c, p)
            })
    }

    pub fn step<R: Rng + ?Sized>(&self, state: StateId, a: Action, rng: &mut R) -> StateId {
        let cell = state % self.cells;
        let q = state / self.cells;
        let c = sample_outcome(&self.moves[cell * ACTION_COUNT + a.index()], rng) as usize;
        let q_next = match self.semantics {
            GuardSemantics::Next => self.next_loc(q, c),
            GuardSemantics::Current => self.next_loc(q, cell),
        };
        q_next * self.cells + c
    }

    /// Largest metric distance between two cells of the grid.
    pub fn diameter(&self, metric: Metric) -> f64 {
        let far = Valuation::new([self.env.width() as i64 - 1, self.env.height() as i64 - 1]);
        metric
            .distance(&Valuation::new([0, 0]), &far)
            .expect("same dimension")
    }

    pub fn sparse_reward(&self, from: StateId, to: StateId, cfg: &RewardConfig) -> f64 {
        if self.is_accepting(to) && !self.is_accepting(from) {
            cfg.d_max
        } else {
            0.0
        }
    }

    pub fn shaped_reward(
        &self,
        from: StateId,
        to: StateId,
        table: &PotentialTable,
        cfg: &RewardConfig,
    ) -> f64 {
        self.sparse_reward(from, to, cfg) + table.get(from) - table.get(to)
    }

    pub fn lavaei_reward(&self, from: StateId, to: StateId, lp: &LavaeiPotential) -> f64 {
        lp.reward(self.location(from), self.location(to))
    }

    /// Symbolic potential before capping; unreachable continuations are infinite.
    pub fn raw_potential(&self, metric: Metric) -> Result<Vec<f64>, ProductError> {
        let spec = &self.spec;
        let eta = spec.compute_eta();
        let phi_sym = spec.compute_phi_sym(metric)?;
        let sets = spec.guard_value_sets()?;
        let dom = spec.domain();
        let mut values = vec![0.0; self.state_count()];
        for q in spec.locations() {
            if spec.is_accepting(q) {
                continue;
            }
            for c in self.env.cells() {
                let v = crate::gridworld::valuation_of(c);
                let mut best = f64::INFINITY;
                for &t in spec.outgoing(q) {
                    let tr = &spec.transitions()[t];
                    let progresses = eta.get(q) != eta.get(tr.to);
                    if !progresses && tr.guard.satisfies(dom, &v).map_err(AutomatonError::from)? {
                        continue;
                    }
                    best = best.min(sets[t].distance_to(metric, &v) + phi_sym.get(t));
                }
                values[self.state(c, q)] = best;
            }
        }
        Ok(values)
    }

    pub fn compute_potential(&self, cfg: &RewardConfig) -> Result<PotentialTable, ProductError> {
        let raw = self.raw_potential(cfg.metric)?;
        Ok(PotentialTable::from_raw(&raw, cfg.phi_cap))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig {
    pub d_max: f64,
    pub metric: Metric,
    pub phi_cap: f64,
    pub kappa: f64,
}

impl RewardConfig {
    /// Fills unset values: `d_max` is one more than the larger of the grid
    /// diameter and the largest finite potential, and `phi_cap` defaults to `d_max`.
    pub fn resolve(
        p: &ProductMDP,
        metric: Metric,
        kappa: f64,
        d_max: Option<f64>,
        phi_cap: Option<f64>,
    ) -> Result<Self, ProductError> {
        let d_max = match d_max {
            Some(d) => d,
            None => {
                let largest = p
                    .raw_potential(metric)?
                    .into_iter()
                    .filter(|v| v.is_finite())
                    .fold(0.0, f64::max);
                p.diameter(metric).max(largest) + 1.0
            }
        };
        let cfg = RewardConfig {
            d_max,
            metric,
            phi_cap: phi_cap.unwrap_or(d_max),
            kappa,
        };
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ProductError> {
        if !(self.d_max > 0.0 && self.d_max.is_finite()) {
            return Err(ProductError::InvalidConfig(format!("d_max must be positive, got {}", self.d_max)));
        }
        if !(self.phi_cap > 0.0 && self.phi_cap.is_finite()) {
            return Err(ProductError::InvalidConfig(format!(
                "phi_cap must be positive and finite, got {}",
                self.phi_cap
            )));
        }
        if !(self.kappa > 0.0) {
            return Err(ProductError::InvalidConfig(format!("kappa must be positive, got {}", self.kappa)));
        }
        Ok(())
    }
}

/// Symbolic potential per product state, zero on accepting states and capped.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTable {
    values: Vec<f64>,
}

impl PotentialTable {
    fn from_raw(raw: &[f64], cap: f64) -> Self {
        PotentialTable {
            values: raw.iter().map(|&v| v.min(cap)).collect(),
        }
    }

    pub fn get(&self, state: StateId) -> f64 {
        self.values[state]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RewardStrategy {
    Sparse,
    SymbolicShaped,
    LavaeiShaped,
}

impl RewardStrategy {
    pub const ALL: [RewardStrategy; 3] = [
        RewardStrategy::Sparse,
        RewardStrategy::SymbolicShaped,
        RewardStrategy::LavaeiShaped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RewardStrategy::Sparse => "sparse",
            RewardStrategy::SymbolicShaped => "symbolic_shaped",
            RewardStrategy::LavaeiShaped => "lavaei_shaped",
        }
    }
}

impl fmt::Display for RewardStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RewardStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sparse" => Ok(RewardStrategy::Sparse),
            "symbolic_shaped" => Ok(RewardStrategy::SymbolicShaped),
            "lavaei_shaped" => Ok(RewardStrategy::LavaeiShaped),
            other => Err(format!("unknown reward strategy `{other}`")),
        }
    }
}

/// A reward strategy bound to the tables it needs on one product.
#[derive(Debug, Clone)]
pub struct RewardModel {
    strategy: RewardStrategy,
    cfg: RewardConfig,
    accepting: Vec<bool>,
    potential: Option<PotentialTable>,
    lavaei: Option<LavaeiPotential>,
    location_of: Vec<u32>,
}

impl RewardModel {
    pub fn new(
        p: &ProductMDP,
        strategy: RewardStrategy,
        cfg: RewardConfig,
    ) -> Result<Self, ProductError> {
        cfg.check()?;
        let potential = match strategy {
            RewardStrategy::SymbolicShaped => Some(p.compute_potential(&cfg)?),
            _ => None,
        };
        let lavaei = match strategy {
            RewardStrategy::LavaeiShaped => {
                Some(p.spec().compute_lavaei(&p.spec().compute_eta(), cfg.kappa))
            }
            _ => None,
        };
        Ok(RewardModel {
            strategy,
            cfg,
            accepting: (0..p.state_count()).map(|s| p.is_accepting(s)).collect(),
            potential,
            lavaei,
            location_of: (0..p.state_count()).map(|s| p.location(s).0 as u32).collect(),
        })
    }

    pub fn strategy(&self) -> RewardStrategy {
        self.strategy
    }

    pub fn config(&self) -> &RewardConfig {
        &self.cfg
    }

    pub fn potential(&self) -> Option<&PotentialTable> {
        self.potential.as_ref()
    }

    pub fn lavaei(&self) -> Option<&LavaeiPotential> {
        self.lavaei.as_ref()
    }

    #[inline]
    pub fn reward(&self, from: StateId, to: StateId) -> f64 {
        let sparse = if self.accepting[to] && !self.accepting[from] {
            self.cfg.d_max
        } else {
            0.0
        };
        match self.strategy {
            RewardStrategy::Sparse => sparse,
            RewardStrategy::SymbolicShaped => {
                let phi = self.potential.as_ref().expect("built with potential");
                sparse + phi.get(from) - phi.get(to)
            }
            RewardStrategy::LavaeiShaped => {
                let lp = self.lavaei.as_ref().expect("built with lavaei potential");
                lp.reward(
                    LocationId(self.location_of[from] as usize),
                    LocationId(self.location_of[to] as usize),
                )
            }
        }
    }
}

/// A tabular policy over product states.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// One action per state, used at every step.
    Deterministic(Vec<Action>),
    /// An action distribution per state, used at every step.
    Stochastic(Vec<[f64; ACTION_COUNT]>),
    /// One action per state for each step `t = 0..N`.
    TimeIndexed(Vec<Vec<Action>>),
}

impl Policy {
    pub fn uniform(states: usize) -> Self {
        Policy::Stochastic(vec![[1.0 / ACTION_COUNT as f64; ACTION_COUNT]; states])
    }

    pub fn probabilities(&self, t: usize, state: StateId) -> [f64; ACTION_COUNT] {
        let point = |a: Action| {
            let mut probs = [0.0; ACTION_COUNT];
            probs[a.index()] = 1.0;
            probs
        };
        match self {
            Policy::Deterministic(actions) => point(actions[state]),
            Policy::Stochastic(dists) => dists[state],
            Policy::TimeIndexed(steps) => point(steps[t.min(steps.len() - 1)][state]),
        }
    }

    pub fn action<R: Rng + ?Sized>(&self, t: usize, state: StateId, rng: &mut R) -> Action {
        match self {
            Policy::Deterministic(actions) => actions[state],
            Policy::TimeIndexed(steps) => steps[t.min(steps.len() - 1)][state],
            Policy::Stochastic(dists) => {
                let outcomes: Vec<(Action, f64)> = Action::ALL
                    .iter()
                    .copied()
                    .zip(dists[state].iter().copied())
                    .collect();
                sample_outcome(&outcomes, rng)
            }
        }
    }
}

/// Optimal finite-horizon values and the greedy policy achieving them.
#[derive(Debug, Clone)]
pub struct DpSolution {
    /// `values[t][state]`: optimal expected reward collected from step `t` to the horizon.
    pub values: Vec<Vec<f64>>,
    pub policy: Policy,
}

impl DpSolution {
    pub fn initial_value(&self, p: &ProductMDP) -> f64 {
        self.values[0][p.initial_state()]
    }
}

/// Backward induction over `t = N-1 .. 0`; ties go to the lowest action index.
pub fn value_iteration(p: &ProductMDP, model: &RewardModel, horizon: usize) -> DpSolution {
    let n = p.state_count();
    let mut values = vec![vec![0.0; n]; horizon + 1];
    let mut steps = vec![vec![Action::Up; n]; horizon];
    for t in (0..horizon).rev() {
        let (head, tail) = values.split_at_mut(t + 1);
        let next = &tail[0];
        let current = &mut head[t];
        for s in 0..n {
            if !p.is_reachable_cell(s) {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut best_action = Action::Up;
            for a in Action::ALL {
                let q: f64 = p
                    .successors(s, a)
                    .map(|(s2, prob)| prob * (model.reward(s, s2) + next[s2]))
                    .sum();
                if q > best {
                    best = q;
                    best_action = a;
                }
            }
            current[s] = best;
            steps[t][s] = best_action;
        }
    }
    DpSolution {
        values,
        policy: Policy::TimeIndexed(steps),
    }
}

/// Exact expected total reward of `policy` from the initial state over `horizon` steps.
pub fn expected_return(
    p: &ProductMDP,
    policy: &Policy,
    model: &RewardModel,
    horizon: usize,
) -> f64 {
    let n = p.state_count();
    let mut next = vec![0.0; n];
    let mut current = vec![0.0; n];
    for t in (0..horizon).rev() {
        for s in 0..n {
            if !p.is_reachable_cell(s) {
                continue;
            }
            let probs = policy.probabilities(t, s);
            let mut total = 0.0;
            for a in Action::ALL {
                let pa = probs[a.index()];
                if pa == 0.0 {
                    continue;
                }
                let q: f64 = p
                    .successors(s, a)
                    .map(|(s2, prob)| prob * (model.reward(s, s2) + next[s2]))
                    .sum();
                total += pa * q;
            }
            current[s] = total;
        }
        std::mem::swap(&mut current, &mut next);
    }
    next[p.initial_state()]
}

/// Probability that `policy` is in an accepting state after `horizon` steps,
/// by forward propagation of the state distribution.
pub fn acceptance_probability_exact(p: &ProductMDP, policy: &Policy, horizon: usize) -> f64 {
    let n = p.state_count();
    let mut mass = vec![0.0; n];
    mass[p.initial_state()] = 1.0;
    let mut next = vec![0.0; n];
    for t in 0..horizon {
        next.iter_mut().for_each(|m| *m = 0.0);
        for (s, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let probs = policy.probabilities(t, s);
            for a in Action::ALL {
                let pa = probs[a.index()];
                if pa == 0.0 {
                    continue;
                }
                for (s2, prob) in p.successors(s, a) {
                    next[s2] += m * pa * prob;
                }
            }
        }
        std::mem::swap(&mut mass, &mut next);
    }
    mass.iter()
        .enumerate()
        .filter(|&(s, _)| p.is_accepting(s))
        .map(|(_, m)| m)
        .sum()
}
