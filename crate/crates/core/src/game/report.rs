use serde::{Deserialize, Serialize};

use super::engine::{run_exact, run_sampled};
use super::{AdviceTranscript, Adviser, OnlineAlgorithm, OnlineProblem};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EvalMode {
    Exact,
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub mode: EvalMode,
    /// Fan out over the rayon pool (ignored without the `parallel` feature).
    pub parallel: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            mode: EvalMode::Exact,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceEvaluation {
    pub index: usize,
    pub expected_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
    /// Leaves of the execution tree in exact mode, trials in Monte-Carlo mode.
    pub branch_count: usize,
    pub advice: Option<AdviceTranscript>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitiveReport {
    pub evaluations: Vec<InstanceEvaluation>,
    /// `max E[cost]/opt` over the family.
    pub strict_ratio: f64,
    /// Index of the instance attaining `strict_ratio`.
    pub witness: usize,
}

impl CompetitiveReport {
    pub fn from_evaluations(evaluations: Vec<InstanceEvaluation>) -> Result<Self> {
        let (witness, strict_ratio) = evaluations
            .iter()
            .map(|e| (e.index, e.ratio))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::EmptyFamily)?;
        Ok(Self {
            evaluations,
            strict_ratio,
            witness,
        })
    }

    /// Smallest `α ≥ 0` with `E[cost] ≤ c·opt + α` on every instance.
    pub fn additive_slack(&self, c: f64) -> f64 {
        self.evaluations
            .iter()
            .map(|e| e.expected_cost - c * e.opt_cost)
            .fold(0.0, f64::max)
    }
}

/// Evaluates one instance of a family.
pub fn evaluate_instance<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    instance: &P::Instance,
    index: usize,
    adviser: Option<&Adviser<P::Instance>>,
    options: EvalOptions,
) -> Result<InstanceEvaluation>
where
    P: OnlineProblem + Sync,
    Alg: OnlineAlgorithm<P> + Sync,
    P::Instance: Sync,
{
    let opt_cost = problem.opt_cost(instance)?;
    let (expected_cost, branch_count, advice) = match options.mode {
        EvalMode::Exact => {
            let dist = run_exact(problem, algorithm, instance, adviser)?;
            (dist.expected_cost(), dist.len(), dist.advice)
        }
        EvalMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::Configuration("Monte-Carlo mode needs at least one trial".into()));
            }
            let trial = |t: usize| {
                run_sampled(problem, algorithm, instance, adviser, par::derive_seed(seed, index as u64, t as u64))
                    .map(|run| (run.cost, run.advice))
            };
            let runs: Vec<_> = if options.parallel {
                par::map_range(trials, trial)
            } else {
                (0..trials).map(trial).collect()
            };
            let mut total = 0.0;
            let mut advice = None;
            for run in runs {
                let (cost, transcript) = run?;
                total += cost;
                advice = transcript;
            }
            (total / trials as f64, trials, advice)
        }
    };
    Ok(InstanceEvaluation {
        index,
        expected_cost,
        opt_cost,
        ratio: expected_cost / opt_cost,
        branch_count,
        advice,
    })
}

pub fn evaluate_family<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    family: &[P::Instance],
    adviser: Option<&Adviser<P::Instance>>,
    options: EvalOptions,
) -> Result<CompetitiveReport>
where
    P: OnlineProblem + Sync,
    Alg: OnlineAlgorithm<P> + Sync,
    P::Instance: Sync,
{
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let eval = |i: usize, inst: &P::Instance| evaluate_instance(problem, algorithm, inst, i, adviser, options);
    let results = if options.parallel {
        par::map(family, eval)
    } else {
        par::map_sequential(family, eval)
    };
    CompetitiveReport::from_evaluations(results.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Exact strict competitive ratio over a finite family.
pub fn strict_competitive_ratio<P, Alg>(
    problem: &P,
    algorithm: &Alg,
    family: &[P::Instance],
    adviser: Option<&Adviser<P::Instance>>,
) -> Result<CompetitiveReport>
where
    P: OnlineProblem + Sync,
    Alg: OnlineAlgorithm<P> + Sync,
    P::Instance: Sync,
{
    evaluate_family(problem, algorithm, family, adviser, EvalOptions::default())
}
