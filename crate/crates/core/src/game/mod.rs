//! The request–answer game.
//!
//! An [`OnlineProblem`] hands out requests one at a time; an
//! [`OnlineAlgorithm`] commits an answer to each before seeing the next. All
//! randomness and measurement goes through [`Chance`], which lets
//! [`run_exact`] expand every branch and [`run_sampled`] draw a single trace.

mod advice;
mod chance;
mod emulation;
mod engine;
mod report;

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

pub use advice::{advice_transmit, deliver, AdviceMessage, AdviceTranscript, ChannelKind};
pub use chance::{Chance, ChanceStats};
pub(crate) use chance::Replay;
pub use emulation::{wrap_randomized_as_quantum, QuantumEmulation};
pub use engine::{
    expected_cost, run_exact, run_game, run_sampled, Branch, ExecutionMode, GameResult,
    OutcomeDistribution, RunRecord, DEFAULT_BRANCH_CAP,
};
pub use report::{
    evaluate_family, evaluate_instance, strict_competitive_ratio, CompetitiveReport, EvalMode,
    EvalOptions, InstanceEvaluation,
};

use crate::bits::BitString;
use crate::error::Result;

pub trait OnlineProblem {
    type Instance;
    type Request;
    type Answer: Clone + PartialEq + Debug;

    fn validate(&self, instance: &Self::Instance) -> Result<()>;
    /// Number of requests in `instance`.
    fn len(&self, instance: &Self::Instance) -> usize;
    /// The `index`-th request. The engine asks for it only once the answer to
    /// every earlier request is committed.
    fn request(&self, instance: &Self::Instance, index: usize) -> Self::Request;
    /// Cost of a complete output; errors on infeasible outputs.
    fn cost(&self, instance: &Self::Instance, output: &[Self::Answer]) -> Result<f64>;
    /// Cost of an optimal offline solution.
    fn opt_cost(&self, instance: &Self::Instance) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Deterministic,
    Randomized,
    Quantum,
    Hybrid,
}

/// Declared memory, randomness, and advice of an algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub classical_bits: usize,
    pub qubits: usize,
    /// Upper bound on random-tape bits read in one run.
    pub random_bits: usize,
    pub advice: Option<ChannelKind>,
}

impl Resources {
    pub const NONE: Resources = Resources {
        classical_bits: 0,
        qubits: 0,
        random_bits: 0,
        advice: None,
    };
}

/// An online algorithm. The state is cloned at every branch point in exact
/// mode, so it should stay small.
pub trait OnlineAlgorithm<P: OnlineProblem + ?Sized>: Clone {
    fn name(&self) -> String;
    fn kind(&self) -> AlgorithmKind;
    fn resources(&self) -> Resources;

    /// Called once before the first request when [`Resources::advice`] is set.
    fn receive_advice(&mut self, _advice: AdviceMessage, _chance: &mut Chance<'_>) -> Result<()> {
        Err(crate::Error::Configuration(format!("{} takes no advice", self.name())))
    }

    fn step(&mut self, request: &P::Request, chance: &mut Chance<'_>) -> Result<P::Answer>;

    /// Called after the last request.
    fn finish(&mut self) -> Result<()> {
        Ok(())
    }

    /// Qubits held between steps.
    fn qubits_in_use(&self) -> usize {
        0
    }
}

/// Adviser: sees the whole instance and writes the advice string.
pub type Adviser<I> = dyn Fn(&I) -> BitString + Sync;
