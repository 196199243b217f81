use super::{AdviceMessage, AlgorithmKind, Chance, OnlineAlgorithm, OnlineProblem, Resources};
use crate::error::Result;

/// A randomized algorithm whose random tape is replaced by measurements of a
/// single qubit prepared as `H|0⟩`.
#[derive(Debug, Clone)]
pub struct QuantumEmulation<A> {
    inner: A,
}

impl<A> QuantumEmulation<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }
}

pub fn wrap_randomized_as_quantum<A>(algorithm: A) -> QuantumEmulation<A> {
    QuantumEmulation { inner: algorithm }
}

impl<P, A> OnlineAlgorithm<P> for QuantumEmulation<A>
where
    P: OnlineProblem,
    A: OnlineAlgorithm<P>,
{
    fn name(&self) -> String {
        format!("quantum({})", self.inner.name())
    }

    fn kind(&self) -> AlgorithmKind {
        if self.inner.resources().classical_bits == 0 {
            AlgorithmKind::Quantum
        } else {
            AlgorithmKind::Hybrid
        }
    }

    fn resources(&self) -> Resources {
        let inner = self.inner.resources();
        Resources {
            qubits: inner.qubits + 1,
            random_bits: 0,
            ..inner
        }
    }

    fn receive_advice(&mut self, advice: AdviceMessage, chance: &mut Chance<'_>) -> Result<()> {
        let inner = &mut self.inner;
        chance.with_emulated_coins(|c| inner.receive_advice(advice, c))
    }

    fn step(&mut self, request: &P::Request, chance: &mut Chance<'_>) -> Result<P::Answer> {
        let inner = &mut self.inner;
        chance.with_emulated_coins(|c| inner.step(request, c))
    }

    fn finish(&mut self) -> Result<()> {
        OnlineAlgorithm::<P>::finish(&mut self.inner)
    }

    fn qubits_in_use(&self) -> usize {
        self.inner.qubits_in_use()
    }
}
