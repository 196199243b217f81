use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::advice::{self, AdviceMessage, AdviceTranscript};
use super::chance::{Chance, ChanceStats, Replay};
use super::{Adviser, OnlineAlgorithm, OnlineProblem};
use crate::error::{Error, Result};

/// Exact mode refuses to grow a tree past this many branches.
pub const DEFAULT_BRANCH_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    Exact,
    Sample(u64),
}

/// One leaf of the execution tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<A> {
    pub outputs: Vec<A>,
    pub cost: f64,
    pub probability: f64,
    pub stats: ChanceStats,
}

#[derive(Debug, Clone)]
pub struct OutcomeDistribution<A> {
    pub branches: Vec<Branch<A>>,
    pub advice: Option<AdviceTranscript>,
}

impl<A: Clone + PartialEq> OutcomeDistribution<A> {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn expected_cost(&self) -> f64 {
        expected_cost(self)
    }

    /// Probability of producing exactly `outputs`.
    pub fn probability_of(&self, outputs: &[A]) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.outputs == outputs)
            .map(|b| b.probability)
            .sum()
    }

    /// Probability mass by projected output, summed over branches with the
    /// same projection.
    pub fn marginal<K: PartialEq>(&self, project: impl Fn(&[A]) -> K) -> Vec<(K, f64, f64)> {
        let mut out: Vec<(K, f64, f64)> = Vec::new();
        for b in &self.branches {
            let key = project(&b.outputs);
            match out.iter_mut().find(|(k, _, _)| *k == key) {
                Some(entry) => entry.1 += b.probability,
                None => out.push((key, b.probability, b.cost)),
            }
        }
        out
    }

    /// Multiset equality of `(outputs, cost, probability)` with probabilities
    /// compared within `tol`.
    pub fn same_branches(&self, other: &Self, tol: f64) -> bool {
        if self.branches.len() != other.branches.len() {
            return false;
        }
        let mut used = vec![false; other.branches.len()];
        self.branches.iter().all(|a| {
            let hit = other.branches.iter().enumerate().find(|(i, b)| {
                !used[*i]
                    && a.outputs == b.outputs
                    && (a.cost - b.cost).abs() <= tol
                    && (a.probability - b.probability).abs() <= tol
            });
            match hit {
                Some((i, _)) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
    }
}

/// `Σ probability · cost`.
pub fn expected_cost<A>(dist: &OutcomeDistribution<A>) -> f64 {
    dist.branches.iter().map(|b| b.probability * b.cost).sum()
}

/// One sampled execution.
#[derive(Debug, Clone)]
pub struct RunRecord<A> {
    pub outputs: Vec<A>,
    pub cost: f64,
    pub stats: ChanceStats,
    pub advice: Option<AdviceTranscript>,
}

#[derive(Debug, Clone)]
pub enum GameResult<A> {
    Exact(OutcomeDistribution<A>),
    Sampled(RunRecord<A>),
}

fn prepare_advice<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    instance: &P::Instance,
    adviser: Option<&Adviser<P::Instance>>,
) -> Result<Option<(AdviceMessage, AdviceTranscript)>>
where
    P: OnlineProblem,
    Alg: OnlineAlgorithm<P>,
{
    problem.validate(instance)?;
    match (algorithm.resources().advice, adviser) {
        (Some(kind), Some(adviser)) => Ok(Some(advice::deliver(kind, &adviser(instance))?)),
        (None, None) => Ok(None),
        (Some(_), None) => Err(Error::Configuration(format!(
            "{} expects advice but no adviser was supplied",
            algorithm.name()
        ))),
        (None, Some(_)) => Err(Error::Configuration(format!(
            "{} takes no advice but an adviser was supplied",
            algorithm.name()
        ))),
    }
}

fn audit<P: OnlineProblem, Alg: OnlineAlgorithm<P>>(algorithm: &Alg, stats: ChanceStats) -> Result<()> {
    let declared = algorithm.resources();
    let held = algorithm.qubits_in_use();
    if held > declared.qubits {
        return Err(Error::QubitBudgetExceeded {
            declared: declared.qubits,
            used: held,
        });
    }
    if stats.random_bits > declared.random_bits {
        return Err(Error::Protocol(format!(
            "{} read {} random bits but declared {}",
            algorithm.name(),
            stats.random_bits,
            declared.random_bits
        )));
    }
    Ok(())
}

struct Child<Alg, R> {
    algorithm: Alg,
    value: R,
    probability: f64,
    stats: ChanceStats,
}

/// Runs `f` on clones of `start` under every combination of branch choices.
fn expand<Alg: Clone, R>(
    start: &Alg,
    qubit_budget: usize,
    cap: usize,
    mut f: impl FnMut(&mut Alg, &mut Chance<'_>) -> Result<R>,
) -> Result<Vec<Child<Alg, R>>> {
    let mut children = Vec::new();
    let mut script = Vec::new();
    loop {
        let mut replay = Replay::new(script);
        let mut algorithm = start.clone();
        let (value, stats) = {
            let mut chance = Chance::replay(&mut replay, qubit_budget);
            let value = f(&mut algorithm, &mut chance)?;
            (value, chance.stats())
        };
        children.push(Child {
            algorithm,
            value,
            probability: replay.probability,
            stats,
        });
        if children.len() > cap {
            return Err(Error::BranchCapExceeded { cap });
        }
        match replay.next_script() {
            Some(next) => script = next,
            None => return Ok(children),
        }
    }
}

struct Node<Alg, A> {
    algorithm: Alg,
    outputs: Vec<A>,
    probability: f64,
    stats: ChanceStats,
}

/// Expands every branch of the game and returns the full distribution.
pub fn run_exact<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    instance: &P::Instance,
    adviser: Option<&Adviser<P::Instance>>,
) -> Result<OutcomeDistribution<P::Answer>>
where
    P: OnlineProblem,
    Alg: OnlineAlgorithm<P>,
{
    run_exact_capped(problem, algorithm, instance, adviser, DEFAULT_BRANCH_CAP)
}

pub(crate) fn run_exact_capped<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    instance: &P::Instance,
    adviser: Option<&Adviser<P::Instance>>,
    cap: usize,
) -> Result<OutcomeDistribution<P::Answer>>
where
    P: OnlineProblem,
    Alg: OnlineAlgorithm<P>,
{
    let advice = prepare_advice(problem, algorithm, instance, adviser)?;
    let budget = algorithm.resources().qubits;
    let n = problem.len(instance);

    let mut stack: Vec<Node<Alg, P::Answer>> = match &advice {
        Some((message, _)) => expand(algorithm, budget, cap, |a, c| a.receive_advice(message.clone(), c))?
            .into_iter()
            .rev()
            .map(|c| Node {
                algorithm: c.algorithm,
                outputs: Vec::with_capacity(n),
                probability: c.probability,
                stats: c.stats,
            })
            .collect(),
        None => vec![Node {
            algorithm: algorithm.clone(),
            outputs: Vec::with_capacity(n),
            probability: 1.0,
            stats: ChanceStats::default(),
        }],
    };

    let mut branches = Vec::new();
    while let Some(mut node) = stack.pop() {
        audit(&node.algorithm, node.stats)?;
        let position = node.outputs.len();
        if position == n {
            node.algorithm.finish()?;
            let cost = problem.cost(instance, &node.outputs)?;
            branches.push(Branch {
                outputs: node.outputs,
                cost,
                probability: node.probability,
                stats: node.stats,
            });
            continue;
        }
        let request = problem.request(instance, position);
        let children = expand(&node.algorithm, budget, cap, |a, c| a.step(&request, c))?;
        for child in children.into_iter().rev() {
            let mut outputs = node.outputs.clone();
            outputs.push(child.value);
            stack.push(Node {
                algorithm: child.algorithm,
                outputs,
                probability: node.probability * child.probability,
                stats: node.stats.merge(child.stats),
            });
        }
        if branches.len() + stack.len() > cap {
            return Err(Error::BranchCapExceeded { cap });
        }
    }

    Ok(OutcomeDistribution {
        branches,
        advice: advice.map(|(_, t)| t),
    })
}

/// Plays one game, drawing every random bit and measurement from `seed`.
pub fn run_sampled<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    instance: &P::Instance,
    adviser: Option<&Adviser<P::Instance>>,
    seed: u64,
) -> Result<RunRecord<P::Answer>>
where
    P: OnlineProblem,
    Alg: OnlineAlgorithm<P>,
{
    let advice = prepare_advice(problem, algorithm, instance, adviser)?;
    let budget = algorithm.resources().qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut algorithm = algorithm.clone();
    let mut chance = Chance::sample(&mut rng, budget);
    let transcript = match advice {
        Some((message, transcript)) => {
            algorithm.receive_advice(message, &mut chance)?;
            Some(transcript)
        }
        None => None,
    };
    let n = problem.len(instance);
    let mut outputs = Vec::with_capacity(n);
    for i in 0..n {
        let request = problem.request(instance, i);
        outputs.push(algorithm.step(&request, &mut chance)?);
        audit(&algorithm, chance.stats())?;
    }
    algorithm.finish()?;
    let cost = problem.cost(instance, &outputs)?;
    Ok(RunRecord {
        outputs,
        cost,
        stats: chance.stats(),
        advice: transcript,
    })
}

pub fn run_game<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    instance: &P::Instance,
    adviser: Option<&Adviser<P::Instance>>,
    mode: ExecutionMode,
) -> Result<GameResult<P::Answer>>
where
    P: OnlineProblem,
    Alg: OnlineAlgorithm<P>,
{
    match mode {
        ExecutionMode::Exact => run_exact(problem, algorithm, instance, adviser).map(GameResult::Exact),
        ExecutionMode::Sample(seed) => {
            run_sampled(problem, algorithm, instance, adviser, seed).map(GameResult::Sampled)
        }
    }
}
