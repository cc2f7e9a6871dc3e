//! Reinforcement learning against symbolic-automaton task specifications.
//!
//! The crate builds the product of a slippery gridworld with a symbolic
//! automaton, derives sparse and potential-shaped rewards from the automaton's
//! guards, trains tabular Q-learning agents and evaluates them exactly (by
//! dynamic programming) or by Monte Carlo.
//!
//! Module map:
//! - [`predicate`]: guard language, value sets, point/set distances
//! - [`automaton`]: symbolic automata, progress levels, subtask progress, builders
//! - [`gridworld`]: the nine-action slip MDP and its map format
//! - [`product`]: product MDP, reward strategies, exact DP
//! - [`learner`]: Q-learning, evaluation, Wilson intervals
//! - [`harness`]: experiment configs, runner, CSV and potential dumps, fixtures

pub mod automaton;
pub mod gridworld;
pub mod harness;
pub mod learner;
pub mod predicate;
pub mod product;

pub use automaton::{parse_automaton, LocationId, SymbolicAutomaton, ValidationReport};
pub use gridworld::{Action, Cell, GridWorld};
pub use predicate::{parse_predicate, Domain, Metric, Predicate, Valuation};
pub use product::{GuardSemantics, Policy, ProductMDP, RewardConfig, RewardModel, RewardStrategy};
