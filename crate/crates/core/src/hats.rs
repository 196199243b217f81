//! Shared shape of the guardian/prisoner parity problems: the input is
//! `2, X_1, 2, X_2, 2, X_3`, each guardian `j` must announce
//! `z_j = f(X_j) ⊕ … ⊕ f(X_3)` for a block function `f`, and the output costs
//! `r` when all three guardians are right and `w` otherwise.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::game::{AlgorithmKind, Chance, OnlineAlgorithm, OnlineProblem, Replay};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    /// A guardian position, written `2`.
    Marker,
}

impl Symbol {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Marker => '2',
        }
    }
}

/// Parses a line over `{0,1,2}`; whitespace and commas are ignored.
pub fn parse_symbols(line: &str) -> Result<Vec<Symbol>> {
    line.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(Symbol::Zero),
            '1' => Ok(Symbol::One),
            '2' => Ok(Symbol::Marker),
            other => Err(Error::Validation(format!("symbol '{other}' is not in {{0,1,2}}"))),
        })
        .collect()
}

pub struct SymbolLine<'a>(pub &'a [Symbol]);

impl fmt::Display for SymbolLine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

/// Marker positions and block ranges of a well-formed input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatsLayout {
    pub markers: [usize; 3],
    pub blocks: [Range<usize>; 3],
}

impl HatsLayout {
    pub fn parse(symbols: &[Symbol]) -> Result<Self> {
        let markers: Vec<usize> = symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Symbol::Marker)
            .map(|(i, _)| i)
            .collect();
        if markers.len() != 3 {
            return Err(Error::Validation(format!(
                "expected exactly three '2' symbols, found {}",
                markers.len()
            )));
        }
        if markers[0] != 0 {
            return Err(Error::Validation("input must start with '2'".into()));
        }
        let blocks = [
            markers[0] + 1..markers[1],
            markers[1] + 1..markers[2],
            markers[2] + 1..symbols.len(),
        ];
        Ok(Self {
            markers: [markers[0], markers[1], markers[2]],
            blocks,
        })
    }

    pub fn block_lengths(&self) -> [usize; 3] {
        self.blocks.clone().map(|b| b.len())
    }

    pub fn block_bits(&self, symbols: &[Symbol], i: usize) -> Vec<bool> {
        symbols[self.blocks[i].clone()]
            .iter()
            .map(|s| *s == Symbol::One)
            .collect()
    }

    /// The answers given at the three marker positions.
    pub fn guardian_answers(&self, output: &[bool]) -> Result<[bool; 3]> {
        let mut answers = [false; 3];
        for (j, &pos) in self.markers.iter().enumerate() {
            answers[j] = *output
                .get(pos)
                .ok_or_else(|| Error::Validation("output shorter than input".into()))?;
        }
        Ok(answers)
    }
}

/// `2, X_1, 2, X_2, 2, X_3`.
pub fn assemble(blocks: [&[bool]; 3]) -> Vec<Symbol> {
    let mut symbols = Vec::with_capacity(3 + blocks.iter().map(|b| b.len()).sum::<usize>());
    for block in blocks {
        symbols.push(Symbol::Marker);
        symbols.extend(block.iter().map(|&b| Symbol::from_bit(b)));
    }
    symbols
}

/// `z_j = v_j ⊕ … ⊕ v_3`.
pub fn suffix_parities(values: [bool; 3]) -> [bool; 3] {
    let z3 = values[2];
    let z2 = values[1] ^ z3;
    let z1 = values[0] ^ z2;
    [z1, z2, z3]
}

/// `r` when every guardian matches `z`, else `w`.
pub fn hats_cost(z: [bool; 3], answers: [bool; 3], r: f64, w: f64) -> f64 {
    if z == answers {
        r
    } else {
        w
    }
}

/// Block predicate whose value the guardians' parities are built from.
pub trait BlockFunction {
    fn eval(&self, block: &[bool]) -> Result<bool>;
    /// A valid block of length `len` on which the function equals `value`.
    fn block_with_value(&self, len: usize, value: bool) -> Result<Vec<bool>>;
}

/// Runs `algorithm` on a prefix, asserting it never consults randomness.
pub(crate) fn feed_deterministic<P, A>(algorithm: &A, prefix: &[Symbol]) -> Result<Vec<bool>>
where
    P: OnlineProblem<Request = Symbol, Answer = bool>,
    A: OnlineAlgorithm<P>,
{
    let mut algorithm = algorithm.clone();
    let budget = algorithm.resources().qubits;
    let mut answers = Vec::with_capacity(prefix.len());
    for symbol in prefix {
        let mut replay = Replay::new(Vec::new());
        let answer = {
            let mut chance = Chance::replay(&mut replay, budget);
            algorithm.step(symbol, &mut chance)?
        };
        if !replay.trail.is_empty() {
            return Err(Error::Precondition(
                "adversary targets deterministic algorithms, but this one branched".into(),
            ));
        }
        answers.push(answer);
    }
    Ok(answers)
}

/// The constructive adversary against deterministic algorithms without
/// advice: blocks 1 and 2 evaluate to 0, the algorithm's three guardian
/// answers are read off, and block 3 is chosen against their majority so
/// every `z_j` disagrees with at least two answers.
pub fn adversary_blocks<P, A, F>(algorithm: &A, function: &F, block_len: usize) -> Result<[Vec<bool>; 3]>
where
    P: OnlineProblem<Request = Symbol, Answer = bool>,
    A: OnlineAlgorithm<P>,
    F: BlockFunction,
{
    if algorithm.kind() != AlgorithmKind::Deterministic || algorithm.resources().advice.is_some() {
        return Err(Error::Precondition(format!(
            "{} is not a deterministic algorithm without advice",
            algorithm.name()
        )));
    }
    let zero = function.block_with_value(block_len, false)?;
    let prefix = assemble([&zero, &zero, &[]]);
    let answers = feed_deterministic::<P, A>(algorithm, &prefix)?;
    let markers = [0, 1 + zero.len(), 2 + 2 * zero.len()];
    let votes = markers.iter().filter(|&&p| answers[p]).count();
    let majority = votes >= 2;
    let third = function.block_with_value(block_len, !majority)?;
    Ok([zero.clone(), zero, third])
}
