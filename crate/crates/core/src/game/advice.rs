//! Advice delivery over the three channel kinds.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Result;
use crate::game::Chance;
use crate::qcore::{self, QuantumRegister};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    ClassicalBits,
    PrivateQubits,
    SharedEpr,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [Self::ClassicalBits, Self::PrivateQubits, Self::SharedEpr];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ClassicalBits => "classical-bits",
            Self::PrivateQubits => "private-qubits",
            Self::SharedEpr => "shared-epr",
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" | "classical-bits" => Ok(Self::ClassicalBits),
            "private" | "private-qubits" => Ok(Self::PrivateQubits),
            "epr" | "shared-epr" => Ok(Self::SharedEpr),
            other => Err(crate::Error::Configuration(format!("unknown channel kind '{other}'"))),
        }
    }
}

/// Traffic on an advice channel.
///
/// `adviser_bits`/`adviser_qubits` count adviser→algorithm traffic and are
/// what the advice complexity measures. `setup_qubits` are the EPR halves the
/// algorithm hands the adviser before the game starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdviceTranscript {
    pub kind: ChannelKind,
    pub advice_bits: usize,
    pub adviser_bits: usize,
    pub adviser_qubits: usize,
    pub setup_qubits: usize,
}

impl AdviceTranscript {
    /// Advice units charged to the algorithm: bits on a classical channel,
    /// qubits otherwise.
    pub fn advice_units(&self) -> usize {
        match self.kind {
            ChannelKind::ClassicalBits => self.adviser_bits,
            _ => self.adviser_qubits,
        }
    }
}

/// What reaches the algorithm.
#[derive(Debug, Clone)]
pub enum AdviceMessage {
    Bits(BitString),
    /// One basis-state qubit per advice bit.
    Qubits(Vec<QuantumRegister>),
}

impl AdviceMessage {
    /// Classical content of the message; qubits are measured on receipt.
    pub fn into_bits(self, chance: &mut Chance<'_>) -> Result<BitString> {
        match self {
            AdviceMessage::Bits(b) => Ok(b),
            AdviceMessage::Qubits(qs) => qs
                .iter()
                .map(|q| Ok(chance.measure(q, &[0])?.outcome == 1))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AdviceMessage::Bits(b) => b.len(),
            AdviceMessage::Qubits(q) => q.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Superdense transport: pairs of bits over fresh EPR pairs, odd lengths
/// padded with a trailing 0 that the receiver drops.
fn superdense_transfer(bits: &BitString) -> Result<BitString> {
    let mut padded: Vec<bool> = bits.iter().collect();
    if padded.len() % 2 == 1 {
        padded.push(false);
    }
    let mut received = Vec::with_capacity(padded.len());
    for pair in padded.chunks_exact(2) {
        let encoded = qcore::make_epr_pair().apply_all(&qcore::superdense_encode([pair[0], pair[1]]))?;
        received.extend(qcore::superdense_decode(&encoded)?);
    }
    received.truncate(bits.len());
    Ok(received.into())
}

/// Prepares `bits` for the algorithm over `kind`.
pub fn deliver(kind: ChannelKind, bits: &BitString) -> Result<(AdviceMessage, AdviceTranscript)> {
    let b = bits.len();
    let (message, transcript) = match kind {
        ChannelKind::ClassicalBits => (
            AdviceMessage::Bits(bits.clone()),
            AdviceTranscript { kind, advice_bits: b, adviser_bits: b, adviser_qubits: 0, setup_qubits: 0 },
        ),
        ChannelKind::PrivateQubits => (
            AdviceMessage::Qubits(bits.iter().map(QuantumRegister::bit).collect()),
            AdviceTranscript { kind, advice_bits: b, adviser_bits: 0, adviser_qubits: b, setup_qubits: 0 },
        ),
        ChannelKind::SharedEpr => {
            let pairs = b.div_ceil(2);
            (
                AdviceMessage::Bits(superdense_transfer(bits)?),
                AdviceTranscript { kind, advice_bits: b, adviser_bits: 0, adviser_qubits: pairs, setup_qubits: pairs },
            )
        }
    };
    Ok((message, transcript))
}

/// Sends `bits` over `kind` and returns what the algorithm reads.
pub fn advice_transmit(kind: ChannelKind, bits: &BitString) -> Result<(BitString, AdviceTranscript)> {
    let (message, transcript) = deliver(kind, bits)?;
    let received = match message {
        AdviceMessage::Bits(b) => b,
        AdviceMessage::Qubits(qs) => qs
            .iter()
            .map(|q| {
                let branches = q.measure_branches(&[0])?;
                debug_assert_eq!(branches.len(), 1);
                Ok(branches[0].outcome == 1)
            })
            .collect::<Result<BitString>>()?,
    };
    Ok((received, transcript))
}
