//! The only door an algorithm has to randomness and measurement.
//!
//! In exact mode every call becomes a branch point that the engine later
//! revisits with each alternative; in sample mode the call draws from a seeded
//! generator.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcore::{self, BranchOutcome, QuantumRegister, PRUNE_THRESHOLD};

/// Counters accumulated along one execution path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChanceStats {
    pub random_bits: usize,
    pub measurements: usize,
    pub peak_qubits: usize,
}

impl ChanceStats {
    pub(crate) fn merge(self, other: ChanceStats) -> ChanceStats {
        ChanceStats {
            random_bits: self.random_bits + other.random_bits,
            measurements: self.measurements + other.measurements,
            peak_qubits: self.peak_qubits.max(other.peak_qubits),
        }
    }
}

/// Forced choices for one replay of a step, plus what was observed.
#[derive(Debug, Default)]
pub(crate) struct Replay {
    script: Vec<usize>,
    cursor: usize,
    /// `(chosen option, number of options)` per branch point.
    pub(crate) trail: Vec<(usize, usize)>,
    pub(crate) probability: f64,
}

impl Replay {
    pub(crate) fn new(script: Vec<usize>) -> Self {
        Self {
            script,
            cursor: 0,
            trail: Vec::new(),
            probability: 1.0,
        }
    }

    /// The next script in depth-first order, or `None` once every
    /// combination of the trail has been visited.
    pub(crate) fn next_script(&self) -> Option<Vec<usize>> {
        let depth = self.trail.iter().rposition(|&(c, n)| c + 1 < n)?;
        let mut script: Vec<usize> = self.trail[..depth].iter().map(|&(c, _)| c).collect();
        script.push(self.trail[depth].0 + 1);
        Some(script)
    }
}

enum Source<'a> {
    Replay(&'a mut Replay),
    Sample(&'a mut ChaCha8Rng),
}

pub struct Chance<'a> {
    source: Source<'a>,
    qubit_budget: usize,
    emulate_coins: bool,
    stats: ChanceStats,
}

impl<'a> Chance<'a> {
    pub(crate) fn replay(replay: &'a mut Replay, qubit_budget: usize) -> Self {
        Self {
            source: Source::Replay(replay),
            qubit_budget,
            emulate_coins: false,
            stats: ChanceStats::default(),
        }
    }

    pub(crate) fn sample(rng: &'a mut ChaCha8Rng, qubit_budget: usize) -> Self {
        Self {
            source: Source::Sample(rng),
            qubit_budget,
            emulate_coins: false,
            stats: ChanceStats::default(),
        }
    }

    pub fn stats(&self) -> ChanceStats {
        self.stats
    }

    /// Picks an index of `weights`, a probability vector. Zero-weight entries
    /// are never chosen.
    pub fn branch(&mut self, weights: &[f64]) -> Result<usize> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain(format!("invalid branch weights {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("branch weights sum to {total}")));
        }
        let options: Vec<usize> = (0..weights.len())
            .filter(|&i| weights[i] >= PRUNE_THRESHOLD)
            .collect();
        let kept: f64 = options.iter().map(|&i| weights[i]).sum();
        match &mut self.source {
            Source::Replay(replay) => {
                let pos = match replay.script.get(replay.cursor) {
                    Some(&p) => p,
                    None => 0,
                };
                replay.cursor += 1;
                // A replay that diverges means the step is not a function of
                // its choices.
                let choice = *options.get(pos).ok_or_else(|| {
                    Error::Protocol("algorithm step is not deterministic given its branch choices".into())
                })?;
                replay.trail.push((pos, options.len()));
                replay.probability *= weights[choice] / kept;
                Ok(choice)
            }
            Source::Sample(rng) => {
                let u: f64 = rng.gen::<f64>() * kept;
                let mut acc = 0.0;
                for &i in &options {
                    acc += weights[i];
                    if u < acc {
                        return Ok(i);
                    }
                }
                Ok(*options.last().expect("weights sum to one"))
            }
        }
    }

    /// A fair random bit. Inside [`Chance::with_emulated_coins`] the bit is
    /// produced by measuring `H|0⟩` instead of reading the random tape.
    pub fn coin(&mut self) -> Result<bool> {
        if self.emulate_coins {
            let outcome = self.measure(&qcore::coin_state(), &[0])?;
            return Ok(outcome.outcome == 1);
        }
        self.stats.random_bits += 1;
        Ok(self.branch(&[0.5, 0.5])? == 1)
    }

    /// Measures `qubits` of `register`, returning the observed outcome and
    /// the collapsed register.
    pub fn measure(&mut self, register: &QuantumRegister, qubits: &[usize]) -> Result<BranchOutcome> {
        self.audit_qubits(register.num_qubits())?;
        let mut branches = register.measure_branches(qubits)?;
        let weights: Vec<f64> = branches.iter().map(|b| b.probability).collect();
        let pick = self.branch(&weights)?;
        self.stats.measurements += 1;
        Ok(branches.swap_remove(pick))
    }

    /// Measures `qubits` but only reveals whether the outcome satisfies
    /// `event`; the register is consumed. Branches two ways at most.
    pub fn measure_event(
        &mut self,
        register: &QuantumRegister,
        qubits: &[usize],
        event: impl Fn(u64) -> bool,
    ) -> Result<bool> {
        self.audit_qubits(register.num_qubits())?;
        let hit: f64 = register
            .outcome_probabilities(qubits)?
            .iter()
            .enumerate()
            .filter(|(o, _)| event(*o as u64))
            .map(|(_, p)| p)
            .sum();
        let hit = hit.clamp(0.0, 1.0);
        self.stats.measurements += 1;
        Ok(self.branch(&[1.0 - hit, hit])? == 1)
    }

    /// Records that `qubits` qubits are live and checks the declared budget.
    pub fn audit_qubits(&mut self, qubits: usize) -> Result<()> {
        self.stats.peak_qubits = self.stats.peak_qubits.max(qubits);
        if qubits > self.qubit_budget {
            return Err(Error::QubitBudgetExceeded {
                declared: self.qubit_budget,
                used: qubits,
            });
        }
        Ok(())
    }

    /// Runs `f` with every `coin()` served by a measured qubit.
    pub fn with_emulated_coins<R>(&mut self, f: impl FnOnce(&mut Chance<'a>) -> R) -> R {
        let previous = std::mem::replace(&mut self.emulate_coins, true);
        let out = f(self);
        self.emulate_coins = previous;
        out
    }
}
