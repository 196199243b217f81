//! Parity-for-Number-of-Hats: three blocks of bits whose ones come in whole
//! multiples of `2^k`, and guardians who must announce the parity of those
//! multiples over the remaining blocks.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::{
    AdviceMessage, AlgorithmKind, Chance, ChannelKind, OnlineAlgorithm, OnlineProblem, Resources,
};
use crate::hats::{self, BlockFunction, HatsLayout, Symbol};
use crate::qcore::{self, GateSpec, QuantumRegister};

/// Largest `k` accepted; keeps `2^k` block sizes at desk scale.
pub const MAX_K: u32 = 16;

/// `PartialMOD_n^k(X)`: for `#_1(X) = v·2^k` with `v ≥ 2`, returns `v mod 2`.
pub fn partial_mod(block: &[bool], k: u32) -> Result<bool> {
    let ones = block.iter().filter(|&&b| b).count() as u64;
    let unit = 1u64 << k;
    if !ones.is_multiple_of(unit) {
        return Err(Error::Domain(format!("{ones} ones is not a multiple of 2^{k}")));
    }
    let v = ones / unit;
    if v < 2 {
        return Err(Error::Domain(format!("multiplicity {v} is below 2")));
    }
    Ok(v % 2 == 1)
}

/// [`partial_mod`] as a block function, for the shared adversary.
#[derive(Debug, Clone, Copy)]
pub struct PartialMod {
    pub k: u32,
}

impl BlockFunction for PartialMod {
    fn eval(&self, block: &[bool]) -> Result<bool> {
        partial_mod(block, self.k)
    }

    /// Ones first: `2·2^k` ones for value 0, `3·2^k` for value 1.
    fn block_with_value(&self, len: usize, value: bool) -> Result<Vec<bool>> {
        let ones = (if value { 3 } else { 2 }) << self.k;
        if ones > len {
            return Err(Error::Precondition(format!(
                "a block of length {len} cannot hold {ones} ones"
            )));
        }
        Ok((0..len).map(|i| i < ones).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnhParams {
    pub k: u32,
    pub r: f64,
    pub w: f64,
}

impl PnhParams {
    pub fn new(k: u32, r: f64, w: f64) -> Result<Self> {
        if k > MAX_K {
            return Err(Error::Configuration(format!("k = {k} exceeds {MAX_K}")));
        }
        if !(r > 0.0 && r < w && w.is_finite()) {
            return Err(Error::Configuration(format!("need 0 < r < w, got r = {r}, w = {w}")));
        }
        Ok(Self { k, r, w })
    }

    /// Smallest admissible block length, `2^{k+1}`.
    pub fn min_block_len(&self) -> usize {
        2 << self.k
    }
}

/// A validated `(n, k, r, w)`-PNH input.
#[derive(Debug, Clone, PartialEq)]
pub struct PnhInstance {
    symbols: Vec<Symbol>,
    layout: HatsLayout,
    k: u32,
    partial_mods: [bool; 3],
    multiplicities: [u64; 3],
}

impl PnhInstance {
    pub fn new(symbols: Vec<Symbol>, k: u32) -> Result<Self> {
        if k > MAX_K {
            return Err(Error::Validation(format!("k = {k} exceeds {MAX_K}")));
        }
        let layout = HatsLayout::parse(&symbols)?;
        let min_len = 2usize << k;
        let mut partial_mods = [false; 3];
        let mut multiplicities = [0; 3];
        for i in 0..3 {
            let block = layout.block_bits(&symbols, i);
            if block.len() < min_len {
                return Err(Error::Validation(format!(
                    "block {} has length {} < 2^(k+1) = {min_len}",
                    i + 1,
                    block.len()
                )));
            }
            partial_mods[i] = partial_mod(&block, k)
                .map_err(|e| Error::Validation(format!("block {}: {e}", i + 1)))?;
            multiplicities[i] = block.iter().filter(|&&b| b).count() as u64 >> k;
        }
        Ok(Self {
            symbols,
            layout,
            k,
            partial_mods,
            multiplicities,
        })
    }

    pub fn from_blocks(blocks: [&[bool]; 3], k: u32) -> Result<Self> {
        Self::new(hats::assemble(blocks), k)
    }

    /// Parses a line of `0`, `1`, `2` symbols.
    pub fn parse(line: &str, k: u32) -> Result<Self> {
        Self::new(hats::parse_symbols(line)?, k)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn layout(&self) -> &HatsLayout {
        &self.layout
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn block(&self, i: usize) -> Vec<bool> {
        self.layout.block_bits(&self.symbols, i)
    }

    pub fn block_lengths(&self) -> [usize; 3] {
        self.layout.block_lengths()
    }

    /// `v_i` with `#_1(X_i) = v_i·2^k`.
    pub fn multiplicities(&self) -> [u64; 3] {
        self.multiplicities
    }

    pub fn partial_mods(&self) -> [bool; 3] {
        self.partial_mods
    }

    /// Correct guardian answers `z_1, z_2, z_3`.
    pub fn z(&self) -> [bool; 3] {
        hats::suffix_parities(self.partial_mods)
    }

    pub fn to_line(&self) -> String {
        hats::SymbolLine(&self.symbols).to_string()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PnhProblem {
    pub params: PnhParams,
}

impl PnhProblem {
    pub fn new(params: PnhParams) -> Self {
        Self { params }
    }
}

impl OnlineProblem for PnhProblem {
    type Instance = PnhInstance;
    type Request = Symbol;
    type Answer = bool;

    fn validate(&self, instance: &PnhInstance) -> Result<()> {
        if instance.k != self.params.k {
            return Err(Error::Validation(format!(
                "instance built for k = {}, problem has k = {}",
                instance.k, self.params.k
            )));
        }
        Ok(())
    }

    fn len(&self, instance: &PnhInstance) -> usize {
        instance.len()
    }

    fn request(&self, instance: &PnhInstance, index: usize) -> Symbol {
        instance.symbols[index]
    }

    fn cost(&self, instance: &PnhInstance, output: &[bool]) -> Result<f64> {
        if output.len() != instance.len() {
            return Err(Error::Validation(format!(
                "output has {} answers for {} requests",
                output.len(),
                instance.len()
            )));
        }
        let answers = instance.layout.guardian_answers(output)?;
        Ok(hats::hats_cost(instance.z(), answers, self.params.r, self.params.w))
    }

    fn opt_cost(&self, _instance: &PnhInstance) -> Result<f64> {
        Ok(self.params.r)
    }
}

/// `pnh_cost`.
pub fn pnh_cost(params: &PnhParams, instance: &PnhInstance, output: &[bool]) -> Result<f64> {
    PnhProblem::new(*params).cost(instance, output)
}

/// `pnh_opt_cost`: the offline optimum always answers correctly.
pub fn pnh_opt_cost(params: &PnhParams, _instance: &PnhInstance) -> f64 {
    params.r
}

/// The adviser's single bit: `z_1`.
pub fn pnh_adviser(instance: &PnhInstance) -> BitString {
    BitString::from(vec![instance.z()[0]])
}

// ---------------------------------------------------------------------------
// Instance families

/// Block lengths used by the enumerated family: `2^{k+1}`, `3·2^k`, `2^{k+2}`.
pub fn family_block_lengths(k: u32) -> [usize; 3] {
    [2 << k, 3 << k, 4 << k]
}

fn ones_first(len: usize, ones: usize) -> Vec<bool> {
    (0..len).map(|i| i < ones).collect()
}

/// Every combination of block lengths from [`family_block_lengths`] and
/// admissible multiplicities, ones placed first in each block.
pub fn enumerate_family(k: u32) -> Vec<PnhInstance> {
    let lengths = family_block_lengths(k);
    let unit = 1usize << k;
    let mut choices = Vec::new();
    for &m in &lengths {
        for v in 2..=m / unit {
            choices.push(ones_first(m, v * unit));
        }
    }
    let mut family = Vec::with_capacity(choices.len().pow(3));
    for a in &choices {
        for b in &choices {
            for c in &choices {
                family.push(PnhInstance::from_blocks([a, b, c], k).expect("enumerated blocks are valid"));
            }
        }
    }
    family
}

/// Same multiplicities, ones scattered within each block.
pub fn shuffled(instance: &PnhInstance, seed: u64) -> PnhInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<Vec<bool>> = (0..3)
        .map(|i| {
            let mut b = instance.block(i);
            b.shuffle(&mut rng);
            b
        })
        .collect();
    PnhInstance::from_blocks([&blocks[0], &blocks[1], &blocks[2]], instance.k).expect("shuffle keeps counts")
}

/// `count` random instances: lengths in `[2^{k+1}, 2^{k+2}]`, random
/// admissible multiplicities, scattered ones.
pub fn random_family(k: u32, count: usize, seed: u64) -> Vec<PnhInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = 1usize << k;
    (0..count)
        .map(|_| {
            let blocks: Vec<Vec<bool>> = (0..3)
                .map(|_| {
                    let m = rng.gen_range(2 * unit..=4 * unit);
                    let v = rng.gen_range(2..=m / unit);
                    let mut b = ones_first(m, v * unit);
                    b.shuffle(&mut rng);
                    b
                })
                .collect();
            PnhInstance::from_blocks([&blocks[0], &blocks[1], &blocks[2]], k).expect("valid by construction")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Algorithms

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InitialQubit {
    /// `H|0⟩`, a guess for `z_1`.
    Superposition,
    /// `|z_1⟩` received from the adviser.
    Advice,
}

/// Single-qubit algorithm: measure a guess for `z_1`, rotate by `π/2^{k+1}`
/// on every one, measure again at each later guardian.
///
/// After a block with `v·2^k` ones the qubit has turned by `v·π/2`, i.e. it
/// flipped exactly when `v` is odd.
#[derive(Debug, Clone)]
pub struct QuantumParity {
    k: u32,
    initial: InitialQubit,
    qubit: Option<QuantumRegister>,
    markers: u8,
}

impl QuantumParity {
    pub fn rotation_angle(&self) -> f64 {
        PI / f64::from(2u32 << self.k)
    }
}

/// Algorithm 1: pure quantum, one qubit, no advice.
pub fn alg1_quantum(k: u32) -> QuantumParity {
    QuantumParity {
        k,
        initial: InitialQubit::Superposition,
        qubit: None,
        markers: 0,
    }
}

/// The same circuit started from an advice qubit `|z_1⟩`.
pub fn alg_advice_1qubit(k: u32) -> QuantumParity {
    QuantumParity {
        initial: InitialQubit::Advice,
        ..alg1_quantum(k)
    }
}

impl OnlineAlgorithm<PnhProblem> for QuantumParity {
    fn name(&self) -> String {
        match self.initial {
            InitialQubit::Superposition => "pnh-quantum-1qubit".into(),
            InitialQubit::Advice => "pnh-quantum-advice-qubit".into(),
        }
    }

    fn kind(&self) -> AlgorithmKind {
        AlgorithmKind::Quantum
    }

    fn resources(&self) -> Resources {
        Resources {
            classical_bits: 0,
            qubits: 1,
            random_bits: 0,
            advice: (self.initial == InitialQubit::Advice).then_some(ChannelKind::PrivateQubits),
        }
    }

    fn receive_advice(&mut self, advice: AdviceMessage, _chance: &mut Chance<'_>) -> Result<()> {
        match (self.initial, advice) {
            (InitialQubit::Advice, AdviceMessage::Qubits(mut qubits)) if qubits.len() == 1 => {
                self.qubit = qubits.pop();
                Ok(())
            }
            (InitialQubit::Advice, _) => Err(Error::Configuration(
                "expects exactly one advice qubit over a private-qubit channel".into(),
            )),
            (InitialQubit::Superposition, _) => Err(Error::Configuration("takes no advice".into())),
        }
    }

    fn step(&mut self, request: &Symbol, chance: &mut Chance<'_>) -> Result<bool> {
        match request {
            Symbol::Marker => {
                self.markers += 1;
                let register = if self.markers == 1 && self.initial == InitialQubit::Superposition {
                    qcore::coin_state()
                } else {
                    self.qubit
                        .take()
                        .ok_or_else(|| Error::Protocol("qubit missing at a guardian".into()))?
                };
                let outcome = chance.measure(&register, &[0])?;
                self.qubit = Some(outcome.post_state);
                Ok(outcome.outcome == 1)
            }
            Symbol::One if (1..=2).contains(&self.markers) => {
                let qubit = self
                    .qubit
                    .as_ref()
                    .ok_or_else(|| Error::Protocol("qubit missing inside a block".into()))?;
                self.qubit = Some(qubit.apply(&GateSpec::rot(self.rotation_angle(), 0))?);
                Ok(false)
            }
            // The third block is never read.
            _ => Ok(false),
        }
    }

    fn qubits_in_use(&self) -> usize {
        self.qubit.as_ref().map_or(0, |q| q.num_qubits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ParitySource {
    Guess,
    Advice(ChannelKind),
}

/// Keeps a bit `p`, flips it every `2^k` ones, and answers `p` at every
/// guardian. `p` starts as a fair coin or as the adviser's `z_1`.
#[derive(Debug, Clone)]
pub struct GuessCount {
    k: u32,
    source: ParitySource,
    parity: bool,
    counter: u64,
    markers: u8,
}

/// Randomized: guess `z_1`, then count.
pub fn alg_guess_count(k: u32) -> GuessCount {
    GuessCount {
        k,
        source: ParitySource::Guess,
        parity: false,
        counter: 0,
        markers: 0,
    }
}

/// Deterministic with one advice bit (classical or as a private qubit that
/// is measured on receipt).
pub fn alg_advice_1bit(k: u32, channel: ChannelKind) -> Result<GuessCount> {
    if channel == ChannelKind::SharedEpr {
        return Err(Error::Configuration(
            "one advice bit is sent classically or as a private qubit".into(),
        ));
    }
    Ok(GuessCount {
        source: ParitySource::Advice(channel),
        ..alg_guess_count(k)
    })
}

impl OnlineAlgorithm<PnhProblem> for GuessCount {
    fn name(&self) -> String {
        match self.source {
            ParitySource::Guess => "pnh-guess-count".into(),
            ParitySource::Advice(_) => "pnh-advice-bit".into(),
        }
    }

    fn kind(&self) -> AlgorithmKind {
        match self.source {
            ParitySource::Guess => AlgorithmKind::Randomized,
            ParitySource::Advice(_) => AlgorithmKind::Deterministic,
        }
    }

    fn resources(&self) -> Resources {
        Resources {
            // counter mod 2^k, the parity bit, and the guardian count
            classical_bits: self.k as usize + 1 + 2,
            // a private advice qubit is measured on receipt
            qubits: usize::from(self.source == ParitySource::Advice(ChannelKind::PrivateQubits)),
            random_bits: usize::from(self.source == ParitySource::Guess),
            advice: match self.source {
                ParitySource::Guess => None,
                ParitySource::Advice(c) => Some(c),
            },
        }
    }

    fn receive_advice(&mut self, advice: AdviceMessage, chance: &mut Chance<'_>) -> Result<()> {
        if matches!(self.source, ParitySource::Guess) {
            return Err(Error::Configuration("takes no advice".into()));
        }
        let bits = advice.into_bits(chance)?;
        if bits.len() != 1 {
            return Err(Error::Protocol(format!("expected one advice bit, got {}", bits.len())));
        }
        self.parity = bits.get(0).unwrap_or(false);
        Ok(())
    }

    fn step(&mut self, request: &Symbol, chance: &mut Chance<'_>) -> Result<bool> {
        match request {
            Symbol::Marker => {
                self.markers += 1;
                if self.markers == 1 && self.source == ParitySource::Guess {
                    self.parity = chance.coin()?;
                }
                Ok(self.parity)
            }
            Symbol::One if (1..=2).contains(&self.markers) => {
                self.counter += 1;
                if self.counter == 1 << self.k {
                    self.counter = 0;
                    self.parity = !self.parity;
                }
                Ok(false)
            }
            _ => Ok(false),
        }
    }
}

/// Answers every guardian with an independent fair coin.
#[derive(Debug, Clone, Default)]
pub struct BlindGuess;

pub fn alg_blind_guess() -> BlindGuess {
    BlindGuess
}

impl OnlineAlgorithm<PnhProblem> for BlindGuess {
    fn name(&self) -> String {
        "pnh-blind-guess".into()
    }

    fn kind(&self) -> AlgorithmKind {
        AlgorithmKind::Randomized
    }

    fn resources(&self) -> Resources {
        Resources {
            random_bits: 3,
            ..Resources::NONE
        }
    }

    fn step(&mut self, request: &Symbol, chance: &mut Chance<'_>) -> Result<bool> {
        match request {
            Symbol::Marker => chance.coin(),
            _ => Ok(false),
        }
    }
}

/// Simple deterministic guardian strategies used as adversary targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Constant(bool),
    /// Repeats the most recent input bit (0 before any).
    LastBit,
    /// Majority of the input bits read so far, ties to 0.
    MajoritySoFar,
    /// Parity of the ones read so far.
    ParityOfOnesSoFar,
    /// 0, 1, 0 at the three guardians.
    Alternating,
    /// Counts multiplicities exactly and assumes the unseen suffix is even.
    TrackPartialMod,
}

impl Strategy {
    pub fn corpus() -> Vec<Strategy> {
        vec![
            Strategy::Constant(false),
            Strategy::Constant(true),
            Strategy::LastBit,
            Strategy::MajoritySoFar,
            Strategy::ParityOfOnesSoFar,
            Strategy::Alternating,
            Strategy::TrackPartialMod,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct DeterministicStrategy {
    k: u32,
    strategy: Strategy,
    last_bit: bool,
    ones: u64,
    zeros: u64,
    markers: u8,
    counter: u64,
    parity: bool,
}

/// `k` only matters for [`Strategy::TrackPartialMod`].
pub fn deterministic_strategy(strategy: Strategy, k: u32) -> DeterministicStrategy {
    DeterministicStrategy {
        k,
        strategy,
        last_bit: false,
        ones: 0,
        zeros: 0,
        markers: 0,
        counter: 0,
        parity: false,
    }
}

impl DeterministicStrategy {
    fn answer(&mut self, request: &Symbol) -> bool {
        match request {
            Symbol::Marker => {
                self.markers += 1;
                match self.strategy {
                    Strategy::Constant(b) => b,
                    Strategy::LastBit => self.last_bit,
                    Strategy::MajoritySoFar => self.ones > self.zeros,
                    Strategy::ParityOfOnesSoFar => self.ones % 2 == 1,
                    Strategy::Alternating => self.markers.is_multiple_of(2),
                    Strategy::TrackPartialMod => self.parity,
                }
            }
            Symbol::One | Symbol::Zero => {
                let bit = *request == Symbol::One;
                self.last_bit = bit;
                if bit {
                    self.ones += 1;
                    self.counter += 1;
                    if self.counter == 1 << self.k {
                        self.counter = 0;
                        self.parity = !self.parity;
                    }
                } else {
                    self.zeros += 1;
                }
                false
            }
        }
    }
}

/// Works for any guardian problem over `{0,1,2}`.
impl<P> OnlineAlgorithm<P> for DeterministicStrategy
where
    P: OnlineProblem<Request = Symbol, Answer = bool>,
{
    fn name(&self) -> String {
        format!("deterministic-{:?}", self.strategy).to_lowercase()
    }

    fn kind(&self) -> AlgorithmKind {
        AlgorithmKind::Deterministic
    }

    fn resources(&self) -> Resources {
        Resources {
            classical_bits: 64,
            ..Resources::NONE
        }
    }

    fn step(&mut self, request: &Symbol, _chance: &mut Chance<'_>) -> Result<bool> {
        Ok(self.answer(request))
    }
}

/// Builds the input on which a deterministic, advice-free algorithm answers
/// at least two guardians wrongly (block length `3·2^k`).
pub fn adversary_unrestricted<A>(algorithm: &A, params: &PnhParams) -> Result<PnhInstance>
where
    A: OnlineAlgorithm<PnhProblem>,
{
    let function = PartialMod { k: params.k };
    let [x1, x2, x3] = hats::adversary_blocks::<PnhProblem, A, _>(algorithm, &function, 3 << params.k)?;
    PnhInstance::from_blocks([&x1, &x2, &x3], params.k)
}

// ---------------------------------------------------------------------------
// Fooling pairs for bounded-memory readers

/// Deterministic finite reader over bits: `transitions[state][bit]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteReader {
    pub start: usize,
    pub transitions: Vec<[usize; 2]>,
}

/// Largest reader [`fooling_pair_search`] accepts.
pub const MAX_READER_STATES: usize = 1 << 20;

impl FiniteReader {
    /// One state; remembers nothing.
    pub fn stateless() -> Self {
        Self {
            start: 0,
            transitions: vec![[0, 0]],
        }
    }

    /// Counts ones modulo `modulus`.
    pub fn ones_counter(modulus: usize) -> Self {
        Self {
            start: 0,
            transitions: (0..modulus).map(|s| [s, (s + 1) % modulus]).collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    pub fn run(&self, input: &[bool]) -> usize {
        input
            .iter()
            .fold(self.start, |s, &b| self.transitions[s][usize::from(b)])
    }
}

/// Searches for two valid `PartialMOD` blocks of length `len` that drive
/// `reader` to the same state but have different `PartialMOD` values.
///
/// Layered reachability over `(state, ones so far)`; returns `None` when no
/// such pair exists at this length.
pub fn fooling_pair_search(
    reader: &FiniteReader,
    k: u32,
    len: usize,
) -> Result<Option<(Vec<bool>, Vec<bool>)>> {
    let states = reader.num_states();
    if states == 0 || states > MAX_READER_STATES {
        return Err(Error::Capacity(format!(
            "reader has {states} states, limit is {MAX_READER_STATES}"
        )));
    }
    if reader.start >= states || reader.transitions.iter().flatten().any(|&t| t >= states) {
        return Err(Error::Validation("transition table points outside the state set".into()));
    }
    let width = len + 1;
    let cell = |state: usize, ones: usize| state * width + ones;
    // parent[layer][cell] = (previous cell, bit) for reachable cells
    let mut parents: Vec<Vec<Option<(usize, bool)>>> = Vec::with_capacity(len);
    let mut frontier = vec![false; states * width];
    frontier[cell(reader.start, 0)] = true;
    for _ in 0..len {
        let mut next = vec![false; states * width];
        let mut parent = vec![None; states * width];
        for (idx, _) in frontier.iter().enumerate().filter(|(_, &r)| r) {
            let (state, ones) = (idx / width, idx % width);
            for bit in [false, true] {
                let target = cell(reader.transitions[state][usize::from(bit)], ones + usize::from(bit));
                if !next[target] {
                    next[target] = true;
                    parent[target] = Some((idx, bit));
                }
            }
        }
        parents.push(parent);
        frontier = next;
    }

    let unit = 1usize << k;
    let trace = |mut idx: usize| -> Vec<bool> {
        let mut bits = vec![false; len];
        for layer in (0..len).rev() {
            let (prev, bit) = parents[layer][idx].expect("reachable cell has a parent");
            bits[layer] = bit;
            idx = prev;
        }
        bits
    };
    for state in 0..states {
        let mut witness = [None, None];
        for ones in (0..=len).filter(|o| o % unit == 0 && o / unit >= 2) {
            if frontier[cell(state, ones)] {
                let slot = &mut witness[(ones / unit) % 2];
                slot.get_or_insert(cell(state, ones));
            }
        }
        if let [Some(even), Some(odd)] = witness {
            return Ok(Some((trace(even), trace(odd))));
        }
    }
    Ok(None)
}
