//! Episodic tabular Q-learning on a product MDP, Monte Carlo policy
//! evaluation and binomial confidence intervals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::gridworld::{Action, ACTION_COUNT};
use crate::product::{Policy, ProductMDP, RewardModel, StateId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error("confidence interval needs at least one trial")]
    NoTrials,
    #[error("{successes} successes out of {trials} trials")]
    InvalidCounts { successes: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub alpha: f64,
    /// Exploration rate at the first episode.
    pub epsilon_start: f64,
    /// Exploration rate at the last episode; equal to the start for a constant rate.
    pub epsilon_end: f64,
    pub episodes: usize,
    pub horizon: usize,
    pub eval_interval: usize,
    pub eval_episodes: usize,
    pub seeds: Vec<u64>,
    pub discount: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            alpha: 0.1,
            epsilon_start: 0.3,
            epsilon_end: 0.05,
            episodes: 1000,
            horizon: 15,
            eval_interval: 50,
            eval_episodes: 100,
            seeds: vec![0, 1, 2, 3, 4],
            discount: 1.0,
        }
    }
}

impl LearnerConfig {
    pub fn check(&self) -> Result<(), LearnerError> {
        let fail = |msg: String| Err(LearnerError::InvalidConfig(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        for eps in [self.epsilon_start, self.epsilon_end] {
            if !(0.0..=1.0).contains(&eps) {
                return fail(format!("epsilon must lie in [0, 1], got {eps}"));
            }
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return fail(format!("discount must lie in (0, 1], got {}", self.discount));
        }
        if self.episodes == 0 || self.horizon == 0 || self.eval_interval == 0 || self.eval_episodes == 0 {
            return fail("episodes, horizon, eval_interval and eval_episodes must be positive".into());
        }
        if self.eval_interval > self.episodes {
            return fail(format!(
                "eval_interval {} exceeds episodes {}",
                self.eval_interval, self.episodes
            ));
        }
        Ok(())
    }

    /// Linearly decayed exploration rate for a zero-based episode index.
    pub fn epsilon(&self, episode: usize) -> f64 {
        if self.episodes <= 1 {
            return self.epsilon_start;
        }
        let frac = episode as f64 / (self.episodes - 1) as f64;
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: Vec<[f64; ACTION_COUNT]>,
}

impl QTable {
    pub fn zeros(states: usize) -> Self {
        QTable {
            values: vec![[0.0; ACTION_COUNT]; states],
        }
    }

    pub fn get(&self, state: StateId, a: Action) -> f64 {
        self.values[state][a.index()]
    }

    pub fn set(&mut self, state: StateId, a: Action, value: f64) {
        self.values[state][a.index()] = value;
    }

    pub fn row(&self, state: StateId) -> &[f64; ACTION_COUNT] {
        &self.values[state]
    }

    pub fn state_count(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self, state: StateId) -> f64 {
        self.values[state].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest-index maximising action.
    pub fn argmax(&self, state: StateId) -> Action {
        let row = &self.values[state];
        let mut best = 0;
        for i in 1..ACTION_COUNT {
            if row[i] > row[best] {
                best = i;
            }
        }
        Action::ALL[best]
    }

    fn argmax_random_tie<R: Rng + ?Sized>(&self, state: StateId, rng: &mut R) -> Action {
        let row = &self.values[state];
        let best = self.max(state);
        let ties = row.iter().filter(|&&v| v == best).count();
        let mut pick = rng.gen_range(0..ties);
        for (i, &v) in row.iter().enumerate() {
            if v == best {
                if pick == 0 {
                    return Action::ALL[i];
                }
                pick -= 1;
            }
        }
        unreachable!("at least one action attains the maximum")
    }
}

pub fn greedy_policy(q: &QTable) -> Policy {
    Policy::Deterministic((0..q.state_count()).map(|s| q.argmax(s)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub epoch: usize,
    pub seed: u64,
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl CurveRow {
    pub fn new(epoch: usize, seed: u64, successes: u64, trials: u64) -> Result<Self, LearnerError> {
        let (ci_low, ci_high) = binomial_ci(successes, trials, 0.95)?;
        Ok(CurveRow {
            epoch,
            seed,
            successes,
            trials,
            estimate: successes as f64 / trials as f64,
            ci_low,
            ci_high,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LearningCurve {
    pub rows: Vec<CurveRow>,
}

/// Number of episodes whose final state is accepting.
pub fn evaluate<R: Rng + ?Sized>(
    p: &ProductMDP,
    policy: &Policy,
    episodes: usize,
    horizon: usize,
    rng: &mut R,
) -> u64 {
    let mut successes = 0;
    for _ in 0..episodes {
        let mut s = p.initial_state();
        for t in 0..horizon {
            let a = policy.action(t, s, rng);
            s = p.step(s, a, rng);
        }
        if p.is_accepting(s) {
            successes += 1;
        }
    }
    successes
}

/// Separate random streams for behaviour and for checkpoint evaluation.
fn streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let train = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = ChaCha8Rng::seed_from_u64(seed);
    eval.set_stream(1);
    (train, eval)
}

/// Runs `cfg.episodes` episodes of exactly `cfg.horizon` steps with
/// epsilon-greedy exploration; greedy ties in the behaviour policy are broken
/// uniformly at random. Every `eval_interval` episodes the greedy policy is
/// frozen and evaluated on `eval_episodes` fresh episodes.
pub fn train(
    p: &ProductMDP,
    model: &RewardModel,
    cfg: &LearnerConfig,
    seed: u64,
) -> Result<(QTable, LearningCurve), LearnerError> {
    cfg.check()?;
    let (mut rng, mut eval_rng) = streams(seed);
    let mut q = QTable::zeros(p.state_count());
    let mut curve = LearningCurve::default();
    for episode in 0..cfg.episodes {
        let epsilon = cfg.epsilon(episode);
        let mut s = p.initial_state();
        for t in 0..cfg.horizon {
            let a = if rng.gen::<f64>() < epsilon {
                Action::ALL[rng.gen_range(0..ACTION_COUNT)]
            } else {
                q.argmax_random_tie(s, &mut rng)
            };
            let s2 = p.step(s, a, &mut rng);
            let r = model.reward(s, s2);
            let bootstrap = if t + 1 == cfg.horizon {
                0.0
            } else {
                cfg.discount * q.max(s2)
            };
            let old = q.get(s, a);
            q.set(s, a, old + cfg.alpha * (r + bootstrap - old));
            s = s2;
        }
        let done = episode + 1;
        if done % cfg.eval_interval == 0 {
            let policy = greedy_policy(&q);
            let k = evaluate(p, &policy, cfg.eval_episodes, cfg.horizon, &mut eval_rng);
            curve
                .rows
                .push(CurveRow::new(done, seed, k, cfg.eval_episodes as u64)?);
        }
    }
    Ok((q, curve))
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn binomial_ci(k: u64, n: u64, level: f64) -> Result<(f64, f64), LearnerError> {
    if n == 0 {
        return Err(LearnerError::NoTrials);
    }
    if k > n {
        return Err(LearnerError::InvalidCounts {
            successes: k,
            trials: n,
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(LearnerError::InvalidConfig(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let n_f = n as f64;
    let p_hat = k as f64 / n_f;
    let z2 = z * z;
    let centre = p_hat + z2 / (2.0 * n_f);
    let spread = z * (p_hat * (1.0 - p_hat) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    let denom = 1.0 + z2 / n_f;
    let mut lo = ((centre - spread) / denom).max(0.0);
    let mut hi = ((centre + spread) / denom).min(1.0);
    if k == 0 {
        lo = 0.0;
    }
    if k == n {
        hi = 1.0;
    }
    Ok((lo.min(p_hat), hi.max(p_hat)))
}
