//! Parity-Number-of-Equality-Hats: the guardian problem with the block
//! function replaced by half-equality, a streaming fingerprint equality test,
//! and the quantum guessing algorithm built on it.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{AlgorithmKind, Chance, OnlineAlgorithm, OnlineProblem, Resources};
use crate::hats::{self, BlockFunction, HatsLayout, Symbol};
use crate::par;
use crate::qcore::{self, GateSpec, QuantumRegister};

/// `EQ_m`: whether the two halves of an even-length block agree.
pub fn eq_m(block: &[bool]) -> Result<bool> {
    if block.len() < 2 || block.len() % 2 == 1 {
        return Err(Error::Domain(format!("EQ needs an even length of at least 2, got {}", block.len())));
    }
    let (a, b) = block.split_at(block.len() / 2);
    Ok(a == b)
}

#[derive(Debug, Clone, Copy)]
pub struct EqFunction;

impl BlockFunction for EqFunction {
    fn eval(&self, block: &[bool]) -> Result<bool> {
        eq_m(block)
    }

    /// All zeros for 1, a single leading one for 0.
    fn block_with_value(&self, len: usize, value: bool) -> Result<Vec<bool>> {
        if len < 2 || len % 2 == 1 {
            return Err(Error::Precondition(format!("block length {len} is not even and at least 2")));
        }
        Ok((0..len).map(|i| !value && i == 0).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnehParams {
    pub r: f64,
    pub w: f64,
}

impl PnehParams {
    pub fn new(r: f64, w: f64) -> Result<Self> {
        if !(r > 0.0 && r < w && w.is_finite()) {
            return Err(Error::Configuration(format!("need 0 < r < w, got r = {r}, w = {w}")));
        }
        Ok(Self { r, w })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnehInstance {
    symbols: Vec<Symbol>,
    layout: HatsLayout,
    eq: [bool; 3],
}

impl PnehInstance {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let layout = HatsLayout::parse(&symbols)?;
        let mut eq = [false; 3];
        for (i, value) in eq.iter_mut().enumerate() {
            *value = eq_m(&layout.block_bits(&symbols, i))
                .map_err(|e| Error::Validation(format!("block {}: {e}", i + 1)))?;
        }
        Ok(Self { symbols, layout, eq })
    }

    pub fn from_blocks(blocks: [&[bool]; 3]) -> Result<Self> {
        Self::new(hats::assemble(blocks))
    }

    pub fn parse(line: &str) -> Result<Self> {
        Self::new(hats::parse_symbols(line)?)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn layout(&self) -> &HatsLayout {
        &self.layout
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

    /// `EQ(X_1), EQ(X_2), EQ(X_3)`.
    pub fn eq_values(&self) -> [bool; 3] {
        self.eq
    }

    pub fn z(&self) -> [bool; 3] {
        hats::suffix_parities(self.eq)
    }

    pub fn to_line(&self) -> String {
        hats::SymbolLine(&self.symbols).to_string()
    }
}

/// A random instance whose blocks have length `2·half_len` and the given EQ
/// values.
pub fn class_instance(eq: [bool; 3], half_len: usize, seed: u64) -> Result<PnehInstance> {
    if half_len == 0 {
        return Err(Error::Precondition("half length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<Vec<bool>> = eq
        .iter()
        .map(|&equal| {
            let first: Vec<bool> = (0..half_len).map(|_| rng.gen()).collect();
            let mut second = first.clone();
            if !equal {
                let flips: Vec<usize> = (0..half_len).filter(|_| rng.gen()).collect();
                let forced = rng.gen_range(0..half_len);
                for i in flips.into_iter().chain([forced]) {
                    second[i] = !second[i];
                }
                if second == first {
                    second[forced] = !second[forced];
                }
            }
            first.into_iter().chain(second).collect()
        })
        .collect();
    PnehInstance::from_blocks([&blocks[0], &blocks[1], &blocks[2]])
}

/// `per_class` seeded instances for each of the eight EQ patterns.
pub fn class_family(half_len: usize, per_class: usize, seed: u64) -> Result<Vec<PnehInstance>> {
    let mut family = Vec::with_capacity(8 * per_class);
    for class in 0..8u64 {
        for j in 0..per_class {
            family.push(class_instance(eq_class(class as u8), half_len, par::derive_seed(seed, class, j as u64))?);
        }
    }
    Ok(family)
}

/// The EQ pattern `b1 b2 b3` of a class index, `b1` most significant.
pub fn eq_class(class: u8) -> [bool; 3] {
    [class & 4 != 0, class & 2 != 0, class & 1 != 0]
}

pub fn class_index(eq: [bool; 3]) -> u8 {
    (u8::from(eq[0]) << 2) | (u8::from(eq[1]) << 1) | u8::from(eq[2])
}

#[derive(Debug, Clone, Copy)]
pub struct PnehProblem {
    pub params: PnehParams,
}

impl PnehProblem {
    pub fn new(params: PnehParams) -> Self {
        Self { params }
    }
}

impl OnlineProblem for PnehProblem {
    type Instance = PnehInstance;
    type Request = Symbol;
    type Answer = bool;

    fn validate(&self, _instance: &PnehInstance) -> Result<()> {
        Ok(())
    }

    fn len(&self, instance: &PnehInstance) -> usize {
        instance.len()
    }

    fn request(&self, instance: &PnehInstance, index: usize) -> Symbol {
        instance.symbols[index]
    }

    fn cost(&self, instance: &PnehInstance, output: &[bool]) -> Result<f64> {
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

    fn opt_cost(&self, _instance: &PnehInstance) -> Result<f64> {
        Ok(self.params.r)
    }
}

/// Expected cost of the guessing algorithm with an exact one-sided error
/// `epsilon`, by EQ pattern of the first two blocks.
pub fn pneh_expected_cost_closed_form(eq: [bool; 3], r: f64, w: f64, epsilon: f64) -> f64 {
    match (eq[0], eq[1]) {
        (false, false) => {
            r * (1.0 - epsilon).powi(2) / 2.0 + w * ((1.0 - epsilon * epsilon) / 2.0 + epsilon)
        }
        (true, true) => r / 2.0 + w / 2.0,
        _ => r * (1.0 - epsilon) / 2.0 + w * (1.0 + epsilon) / 2.0,
    }
}

/// Builds the input on which a deterministic, advice-free algorithm answers
/// at least two guardians wrongly.
pub fn adversary_unrestricted<A>(algorithm: &A, block_len: usize) -> Result<PnehInstance>
where
    A: OnlineAlgorithm<PnehProblem>,
{
    let [x1, x2, x3] = hats::adversary_blocks::<PnehProblem, A, _>(algorithm, &EqFunction, block_len)?;
    PnehInstance::from_blocks([&x1, &x2, &x3])
}

// ---------------------------------------------------------------------------
// Fingerprinting

/// Largest half-block length accepted.
pub const MAX_FINGERPRINT_L: u32 = 16;
/// Coefficient draws tried by [`build_fingerprint_config`].
pub const FINGERPRINT_ATTEMPTS: u64 = 10;

/// Coefficients for the equality fingerprint of two `L`-bit halves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintConfig {
    #[serde(rename = "L")]
    pub l: u32,
    pub epsilon: f64,
    pub t: usize,
    #[serde(rename = "K")]
    pub k: Vec<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerprintVerification {
    pub max_accept: f64,
    /// A nonzero difference attaining `max_accept`.
    pub worst_d: u64,
    pub passed: bool,
}

impl FingerprintConfig {
    pub fn q(&self) -> u64 {
        1 << self.l
    }

    /// Index qubits.
    pub fn tau(&self) -> usize {
        self.t.trailing_zeros() as usize
    }

    /// Fingerprint register width: index qubits plus the target.
    pub fn width(&self) -> usize {
        self.tau() + 1
    }

    /// Checks everything except the error bound.
    pub fn check_shape(&self) -> Result<()> {
        check_parameters(self.l, self.epsilon, self.t)?;
        if self.k.len() != self.t {
            return Err(Error::Validation(format!("K has {} entries, t = {}", self.k.len(), self.t)));
        }
        if let Some(bad) = self.k.iter().find(|&&k| k == 0 || k >= self.q()) {
            return Err(Error::Validation(format!("coefficient {bad} is outside [1, {}]", self.q() - 1)));
        }
        Ok(())
    }

    /// `((1/t)·Σ cos(2π·k_i·D/q))²`.
    pub fn accept_probability(&self, d: u64) -> f64 {
        let q = self.q();
        let d = d % q;
        let mean = self
            .k
            .iter()
            .map(|&k| (2.0 * PI * ((k * d) % q) as f64 / q as f64).cos())
            .sum::<f64>()
            / self.k.len() as f64;
        mean * mean
    }

    /// Exhaustive check over every nonzero `D`.
    pub fn verify(&self) -> Result<FingerprintVerification> {
        self.check_shape()?;
        let probs = par::map_range((self.q() - 1) as usize, |i| self.accept_probability(i as u64 + 1));
        let (worst, max_accept) = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &p)| (i as u64 + 1, p))
            .unwrap_or((0, 0.0));
        Ok(FingerprintVerification {
            max_accept,
            worst_d: worst,
            passed: max_accept <= self.epsilon,
        })
    }

    /// Signed weight of position `j` (0-based) of a `2L` block, mod `q`.
    pub fn weight(&self, j: usize) -> u64 {
        let l = self.l as usize;
        let q = self.q();
        if j < l {
            (1u64 << j) % q
        } else {
            (q - (1u64 << (j - l)) % q) % q
        }
    }
}

fn check_parameters(l: u32, epsilon: f64, t: usize) -> Result<()> {
    if l == 0 || l > MAX_FINGERPRINT_L {
        return Err(Error::Precondition(format!("L = {l} is outside 1..={MAX_FINGERPRINT_L}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon = {epsilon} is outside (0, 1)")));
    }
    if !t.is_power_of_two() {
        return Err(Error::Precondition(format!("t = {t} is not a power of two")));
    }
    if t.trailing_zeros() as usize + 1 > qcore::MAX_QUBITS {
        return Err(Error::Precondition(format!("t = {t} needs too many index qubits")));
    }
    Ok(())
}

/// Draws `K` uniformly from `[1, q-1]^t` and keeps the first draw whose
/// exhaustive verification passes.
pub fn build_fingerprint_config(l: u32, epsilon: f64, t: usize, seed: u64) -> Result<FingerprintConfig> {
    check_parameters(l, epsilon, t)?;
    let q = 1u64 << l;
    let mut best = f64::INFINITY;
    for attempt in 0..FINGERPRINT_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(seed, 0, attempt));
        let k = if q == 2 {
            vec![1; t]
        } else {
            (0..t).map(|_| rng.gen_range(1..q)).collect()
        };
        let config = FingerprintConfig { l, epsilon, t, k, seed };
        let verdict = config.verify()?;
        if verdict.passed {
            return Ok(config);
        }
        best = best.min(verdict.max_accept);
    }
    Err(Error::SearchFailure {
        attempts: FINGERPRINT_ATTEMPTS as usize,
        best,
    })
}

/// `H^⊗τ` on the index register plus a target in `|0⟩`.
pub fn fp_init(config: &FingerprintConfig) -> Result<QuantumRegister> {
    let reg = QuantumRegister::new(config.width())?;
    Ok(reg.apply_all(&(0..config.tau()).map(GateSpec::h).collect::<Vec<_>>())?)
}

/// Feeds one input bit carrying `weight` (already reduced mod `q`).
pub fn fp_feed(config: &FingerprintConfig, state: &QuantumRegister, bit: bool, weight: u64) -> Result<QuantumRegister> {
    if !bit {
        return Ok(state.clone());
    }
    let q = config.q();
    let angles: Vec<f64> = config
        .k
        .iter()
        .map(|&k| 2.0 * PI * ((k * (weight % q)) % q) as f64 / q as f64)
        .collect();
    let controls: Vec<usize> = (0..config.tau()).collect();
    Ok(state.apply_index_controlled_rot(&controls, config.tau(), &angles)?)
}

/// The register right before measurement: `H^⊗τ` on the index qubits.
pub fn fp_unmeasured(config: &FingerprintConfig, state: &QuantumRegister) -> Result<QuantumRegister> {
    Ok(state.apply_all(&(0..config.tau()).map(GateSpec::h).collect::<Vec<_>>())?)
}

/// Measures the whole register and accepts iff every qubit reads 0.
pub fn fp_finalize(config: &FingerprintConfig, state: &QuantumRegister, chance: &mut Chance<'_>) -> Result<bool> {
    let ready = fp_unmeasured(config, state)?;
    let qubits: Vec<usize> = (0..config.width()).collect();
    chance.measure_event(&ready, &qubits, |o| o == 0)
}

/// Exact acceptance probability of a state without measuring it.
pub fn fp_accept_probability(config: &FingerprintConfig, state: &QuantumRegister) -> Result<f64> {
    let ready = fp_unmeasured(config, state)?;
    let qubits: Vec<usize> = (0..config.width()).collect();
    Ok(ready.outcome_probabilities(&qubits)?[0])
}

/// One block of the stream, with the feed count enforced.
#[derive(Debug, Clone)]
pub struct FingerprintSession {
    config: Arc<FingerprintConfig>,
    state: QuantumRegister,
    fed: usize,
}

impl FingerprintSession {
    pub fn new(config: Arc<FingerprintConfig>) -> Result<Self> {
        let state = fp_init(&config)?;
        Ok(Self { config, state, fed: 0 })
    }

    pub fn block_len(&self) -> usize {
        2 * self.config.l as usize
    }

    pub fn feed(&mut self, bit: bool) -> Result<()> {
        if self.fed == self.block_len() {
            return Err(Error::Protocol(format!("block longer than 2L = {}", self.block_len())));
        }
        self.state = fp_feed(&self.config, &self.state, bit, self.config.weight(self.fed))?;
        self.fed += 1;
        Ok(())
    }

    fn check_complete(&self) -> Result<()> {
        if self.fed != self.block_len() {
            return Err(Error::Protocol(format!(
                "fed {} bits, expected 2L = {}",
                self.fed,
                self.block_len()
            )));
        }
        Ok(())
    }

    pub fn accept_probability(&self) -> Result<f64> {
        self.check_complete()?;
        fp_accept_probability(&self.config, &self.state)
    }

    pub fn finalize(self, chance: &mut Chance<'_>) -> Result<bool> {
        self.check_complete()?;
        fp_finalize(&self.config, &self.state, chance)
    }

    pub fn qubits(&self) -> usize {
        self.state.num_qubits()
    }
}

/// Streams a whole block and returns the exact acceptance probability.
pub fn fingerprint_accept_probability(config: &Arc<FingerprintConfig>, block: &[bool]) -> Result<f64> {
    let mut session = FingerprintSession::new(Arc::clone(config))?;
    for &bit in block {
        session.feed(bit)?;
    }
    session.accept_probability()
}

/// `D = x - y mod q` for a `2L` block, bit `j` of each half weighing `2^j`.
pub fn half_difference(block: &[bool], l: u32) -> u64 {
    let q = 1u64 << l;
    let value = |half: &[bool]| {
        half.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .fold(0u64, |acc, (j, _)| (acc + (1u64 << j)) % q)
    };
    let (a, b) = block.split_at(block.len() / 2);
    (value(a) + q - value(b)) % q
}

// ---------------------------------------------------------------------------
// The guessing algorithm

#[derive(Debug, Clone)]
pub enum Alg2Mode {
    /// Streams each block through the fingerprint.
    Fingerprint(Arc<FingerprintConfig>),
    /// Reports `EQ = 1` exactly, and `EQ = 0` as 1 with probability exactly
    /// `epsilon`.
    Idealized { epsilon: f64 },
}

#[derive(Debug, Clone)]
enum BlockReader {
    Idle,
    Fingerprint(FingerprintSession),
    Oracle(Vec<bool>),
}

/// Guesses `z_1` with a measured `H|0⟩`, then updates the guess by the
/// reported EQ value of each of the first two blocks via a CNOT.
#[derive(Debug, Clone)]
pub struct Alg2 {
    mode: Alg2Mode,
    psi: Option<QuantumRegister>,
    reader: BlockReader,
    markers: u8,
}

pub fn alg2_quantum(mode: Alg2Mode) -> Result<Alg2> {
    match &mode {
        Alg2Mode::Fingerprint(config) => {
            let verdict = config.verify().map_err(|e| Error::Configuration(e.to_string()))?;
            if !verdict.passed {
                return Err(Error::Configuration(format!(
                    "fingerprint config accepts unequal halves with probability {}",
                    verdict.max_accept
                )));
            }
        }
        Alg2Mode::Idealized { epsilon } => {
            if !(0.0..=1.0).contains(epsilon) {
                return Err(Error::Configuration(format!("epsilon = {epsilon} is outside [0, 1]")));
            }
        }
    }
    Ok(Alg2 {
        mode,
        psi: None,
        reader: BlockReader::Idle,
        markers: 0,
    })
}

impl Alg2 {
    fn start_block(&self) -> Result<BlockReader> {
        Ok(match &self.mode {
            Alg2Mode::Fingerprint(config) => BlockReader::Fingerprint(FingerprintSession::new(Arc::clone(config))?),
            Alg2Mode::Idealized { .. } => BlockReader::Oracle(Vec::new()),
        })
    }

    /// The reported EQ value of the block just read.
    fn finish_block(&mut self, chance: &mut Chance<'_>) -> Result<bool> {
        match std::mem::replace(&mut self.reader, BlockReader::Idle) {
            BlockReader::Fingerprint(session) => {
                if session.fed != session.block_len() {
                    return Err(Error::Configuration(format!(
                        "block has {} bits but the fingerprint expects 2L = {}",
                        session.fed,
                        session.block_len()
                    )));
                }
                session.finalize(chance)
            }
            BlockReader::Oracle(bits) => {
                let epsilon = match self.mode {
                    Alg2Mode::Idealized { epsilon } => epsilon,
                    Alg2Mode::Fingerprint(_) => unreachable!(),
                };
                if eq_m(&bits)? {
                    Ok(true)
                } else {
                    Ok(chance.branch(&[1.0 - epsilon, epsilon])? == 1)
                }
            }
            BlockReader::Idle => Err(Error::Protocol("no block in progress".into())),
        }
    }
}

impl OnlineAlgorithm<PnehProblem> for Alg2 {
    fn name(&self) -> String {
        match self.mode {
            Alg2Mode::Fingerprint(_) => "pneh-fingerprint".into(),
            Alg2Mode::Idealized { .. } => "pneh-idealized".into(),
        }
    }

    fn kind(&self) -> AlgorithmKind {
        AlgorithmKind::Quantum
    }

    fn resources(&self) -> Resources {
        let qubits = match &self.mode {
            Alg2Mode::Fingerprint(config) => config.width() + 1,
            Alg2Mode::Idealized { .. } => 2,
        };
        Resources {
            qubits,
            ..Resources::NONE
        }
    }

    fn step(&mut self, request: &Symbol, chance: &mut Chance<'_>) -> Result<bool> {
        match request {
            Symbol::Marker => {
                self.markers += 1;
                let y = if self.markers == 1 {
                    chance.measure(&qcore::coin_state(), &[0])?.outcome == 1
                } else {
                    let v = self.finish_block(chance)?;
                    let psi = self
                        .psi
                        .take()
                        .ok_or_else(|| Error::Protocol("guess qubit missing".into()))?;
                    let joint = QuantumRegister::bit(v).tensor(&psi)?.apply(&GateSpec::cnot(0, 1))?;
                    chance.measure(&joint, &[1])?.outcome == 1
                };
                self.psi = Some(QuantumRegister::bit(y));
                if self.markers < 3 {
                    self.reader = self.start_block()?;
                }
                Ok(y)
            }
            bit => {
                let bit = *bit == Symbol::One;
                match &mut self.reader {
                    BlockReader::Fingerprint(session) => {
                        if session.fed == session.block_len() {
                            return Err(Error::Configuration(format!(
                                "block is longer than 2L = {}",
                                session.block_len()
                            )));
                        }
                        session.feed(bit)?;
                    }
                    BlockReader::Oracle(bits) => bits.push(bit),
                    BlockReader::Idle => {}
                }
                Ok(false)
            }
        }
    }

    fn qubits_in_use(&self) -> usize {
        let reader = match &self.reader {
            BlockReader::Fingerprint(session) => session.qubits(),
            _ => 0,
        };
        reader + self.psi.as_ref().map_or(0, |q| q.num_qubits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::run_exact;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn eq_examples() {
        assert!(eq_m(&bits("0101")).unwrap());
        assert!(!eq_m(&bits("0110")).unwrap());
        assert!(!eq_m(&bits("10")).unwrap());
        assert!(eq_m(&bits("11")).unwrap());
        assert!(matches!(eq_m(&bits("101")), Err(Error::Domain(_))));
        assert!(PnehInstance::parse("2 101 2 11 2 11").is_err());
    }

    #[test]
    fn closed_form_examples() {
        let cost = |c: u8| pneh_expected_cost_closed_form(eq_class(c), 1.0, 3.0, 0.25);
        assert!((cost(0) - 2.4375).abs() < 1e-12);
        assert!((cost(1) - 2.4375).abs() < 1e-12);
        for c in 2..=5 {
            assert!((cost(c) - 2.25).abs() < 1e-12);
        }
        assert!((cost(6) - 2.0).abs() < 1e-12 && (cost(7) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn config_preconditions() {
        assert!(matches!(build_fingerprint_config(4, 0.25, 3, 1), Err(Error::Precondition(_))));
        assert!(matches!(build_fingerprint_config(0, 0.25, 4, 1), Err(Error::Precondition(_))));
        assert!(matches!(build_fingerprint_config(4, 1.0, 4, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn length_one_halves_never_verify() {
        let config = FingerprintConfig { l: 1, epsilon: 0.25, t: 2, k: vec![1, 1], seed: 0 };
        let verdict = config.verify().unwrap();
        assert!(!verdict.passed);
        assert!((verdict.max_accept - 1.0).abs() < 1e-12);
        assert!(matches!(
            build_fingerprint_config(1, 0.25, 2, 0),
            Err(Error::SearchFailure { .. })
        ));
    }

    #[test]
    fn small_config_is_one_sided() {
        let config = Arc::new(build_fingerprint_config(4, 0.25, 64, 7).unwrap());
        assert!(config.verify().unwrap().passed);
        for x in 0u32..256 {
            let block: Vec<bool> = (0..8).map(|i| x >> i & 1 == 1).collect();
            let p = fingerprint_accept_probability(&config, &block).unwrap();
            let d = half_difference(&block, 4);
            assert!((p - config.accept_probability(d)).abs() < 1e-9);
            if eq_m(&block).unwrap() {
                assert_eq!(d, 0);
                assert!((p - 1.0).abs() < 1e-9);
            } else {
                assert!(p <= 0.25 + 1e-9);
            }
        }
    }

    #[test]
    fn session_counts_feeds() {
        let config = Arc::new(build_fingerprint_config(2, 0.25, 8, 3).unwrap());
        let mut session = FingerprintSession::new(Arc::clone(&config)).unwrap();
        session.feed(true).unwrap();
        assert!(matches!(session.accept_probability(), Err(Error::Protocol(_))));
        for _ in 0..3 {
            session.feed(false).unwrap();
        }
        assert!(matches!(session.feed(true), Err(Error::Protocol(_))));
    }

    #[test]
    fn idealized_class_examples() {
        let problem = PnehProblem::new(PnehParams::new(1.0, 3.0).unwrap());
        let alg = alg2_quantum(Alg2Mode::Idealized { epsilon: 0.25 }).unwrap();
        let check = |eq: [bool; 3], y: [bool; 3], p: f64, cost: f64| {
            let inst = class_instance(eq, 3, 11).unwrap();
            let dist = run_exact(&problem, &alg, &inst, None).unwrap();
            let hit: Vec<_> = dist
                .branches
                .iter()
                .filter(|b| inst.layout().guardian_answers(&b.outputs).unwrap() == y)
                .collect();
            let total: f64 = hit.iter().map(|b| b.probability).sum();
            assert!((total - p).abs() < 1e-12, "{eq:?} {y:?}: {total} vs {p}");
            assert!(hit.iter().all(|b| b.cost == cost));
        };
        check([true, true, false], [false, true, false], 0.5, 1.0);
        check([false, false, false], [false, false, false], 0.75f64.powi(2) / 2.0, 1.0);
        check([false, true, true], [false, false, true], 0.75 / 2.0, 1.0);
    }

    #[test]
    fn fingerprint_mode_checks_block_length() {
        let problem = PnehProblem::new(PnehParams::new(1.0, 3.0).unwrap());
        let config = Arc::new(build_fingerprint_config(2, 0.25, 8, 3).unwrap());
        let alg = alg2_quantum(Alg2Mode::Fingerprint(config)).unwrap();
        let good = class_instance([true, false, true], 2, 5).unwrap();
        assert!(run_exact(&problem, &alg, &good, None).is_ok());
        let bad = class_instance([true, false, true], 3, 5).unwrap();
        assert!(matches!(run_exact(&problem, &alg, &bad, None), Err(Error::Configuration(_))));
    }
}
