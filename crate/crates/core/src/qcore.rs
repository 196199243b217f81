//! Dense state-vector simulator for the handful of qubits the online
//! algorithms need.
//!
//! Qubit 0 is the most significant bit of a basis index, so the two-qubit
//! basis state `|q0 q1⟩` lives at index `2*q0 + q1`. Every operation returns a
//! new register; registers are plain values and can be moved across threads.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;
/// Norm and unitarity tolerance.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Measurement branches below this probability are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
/// Two states are considered equal when `|⟨a|b⟩|² ≥ 1 - FIDELITY_TOLERANCE`.
pub const FIDELITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("register of {requested} qubits exceeds simulator capacity of {MAX_QUBITS}")]
    CapacityExceeded { requested: usize },
    #[error("a register needs at least one qubit")]
    EmptyRegister,
    #[error("qubit {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("gate {gate} expects {expected} target(s), got {got}")]
    GateArity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gate targets must be distinct")]
    DuplicateTargets,
    #[error("measurement needs at least one qubit")]
    EmptyMeasurement,
    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("rotation table has {got} angles, index register needs {expected}")]
    AngleTable { expected: usize, got: usize },
    #[error("state is not a superdense codeword (best fidelity {best})")]
    DecodeIntegrity { best: f64 },
}

pub type Result<T> = std::result::Result<T, QuantumError>;

/// Normalized amplitude vector over `num_qubits` qubits.
#[derive(Clone, PartialEq)]
pub struct QuantumRegister {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl fmt::Debug for QuantumRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuantumRegister[{}](", self.num_qubits)?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() > PRUNE_THRESHOLD {
                write!(f, " {:+.6}{:+.6}i|{:0w$b}⟩", a.re, a.im, i, w = self.num_qubits)?;
            }
        }
        write!(f, " )")
    }
}

fn check_capacity(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(QuantumError::EmptyRegister);
    }
    if num_qubits > MAX_QUBITS {
        return Err(QuantumError::CapacityExceeded {
            requested: num_qubits,
        });
    }
    Ok(())
}

impl QuantumRegister {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(QuantumError::QubitOutOfRange {
                index,
                num_qubits,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Single-qubit basis state `|bit⟩`.
    pub fn bit(bit: bool) -> Self {
        Self::basis(1, bit as usize).expect("one qubit always fits")
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QuantumError::BadLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_capacity(num_qubits)?;
        let reg = Self {
            num_qubits,
            amplitudes,
        };
        let norm = reg.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(reg)
    }

    /// Builds a register from real amplitudes.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`; zero for registers of different widths.
    pub fn fidelity(&self, other: &Self) -> f64 {
        if self.num_qubits != other.num_qubits {
            return 0.0;
        }
        self.inner(other).norm_sqr()
    }

    /// Equality up to global phase.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.fidelity(other) >= 1.0 - FIDELITY_TOLERANCE
    }

    /// `self ⊗ other`; the qubits of `self` come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_capacity(self.num_qubits + other.num_qubits)?;
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        })
    }

    fn bit_mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.num_qubits {
            return Err(QuantumError::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1 << (self.num_qubits - 1 - qubit))
    }

    /// Applies a 2×2 matrix to `target` on the subspace where every mask in
    /// `controls` is set.
    fn apply_single(&mut self, m: &[[Complex64; 2]; 2], target: usize, controls: usize) {
        for i in 0..self.amplitudes.len() {
            if i & target != 0 || i & controls != controls {
                continue;
            }
            let j = i | target;
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Returns `U·self` for the gate's unitary lifted to this register.
    pub fn apply(&self, gate: &GateSpec) -> Result<Self> {
        gate.validate()?;
        let mut out = self.clone();
        let masks = gate
            .targets
            .iter()
            .map(|&q| self.bit_mask(q))
            .collect::<Result<Vec<_>>>()?;
        let m = gate.kind.base_matrix();
        if gate.kind.is_controlled() {
            out.apply_single(&m, masks[1], masks[0]);
        } else {
            out.apply_single(&m, masks[0], 0);
        }
        Ok(out)
    }

    pub fn apply_all<'a>(&self, gates: impl IntoIterator<Item = &'a GateSpec>) -> Result<Self> {
        gates.into_iter().try_fold(self.clone(), |s, g| s.apply(g))
    }

    /// Rotates `target` by `angles[i]` on the branch where the `controls`
    /// register (read most significant first) holds the value `i`.
    ///
    /// Block-diagonal in the control basis, one `ROT` per block, so it is
    /// unitary for any angle table.
    pub fn apply_index_controlled_rot(
        &self,
        controls: &[usize],
        target: usize,
        angles: &[f64],
    ) -> Result<Self> {
        let expected = 1usize << controls.len();
        if angles.len() != expected {
            return Err(QuantumError::AngleTable {
                expected,
                got: angles.len(),
            });
        }
        let target_mask = self.bit_mask(target)?;
        let control_masks = controls
            .iter()
            .map(|&q| self.bit_mask(q))
            .collect::<Result<Vec<_>>>()?;
        if control_masks.contains(&target_mask) {
            return Err(QuantumError::DuplicateTargets);
        }
        let rotations: Vec<_> = angles.iter().map(|&t| GateKind::Rot(t).base_matrix()).collect();
        let mut out = self.clone();
        for i in 0..out.amplitudes.len() {
            if i & target_mask != 0 {
                continue;
            }
            let index = control_masks
                .iter()
                .fold(0usize, |acc, &m| (acc << 1) | usize::from(i & m != 0));
            let m = &rotations[index];
            let j = i | target_mask;
            let (a0, a1) = (out.amplitudes[i], out.amplitudes[j]);
            out.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
            out.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(out)
    }

    /// Joint outcome distribution of `qubits`. The outcome value lists the
    /// measured qubits most significant first, in the order given.
    pub fn outcome_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(QuantumError::EmptyMeasurement);
        }
        let masks = qubits
            .iter()
            .map(|&q| self.bit_mask(q))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = masks.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != masks.len() {
            return Err(QuantumError::DuplicateTargets);
        }
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[outcome_of(i, &masks)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Every outcome of measuring `qubits` with its collapsed state.
    ///
    /// Outcomes under [`PRUNE_THRESHOLD`] are dropped and the survivors'
    /// probabilities renormalized.
    pub fn measure_branches(&self, qubits: &[usize]) -> Result<Vec<BranchOutcome>> {
        let probs = self.outcome_probabilities(qubits)?;
        let masks: Vec<usize> = qubits.iter().map(|&q| self.bit_mask(q).unwrap()).collect();
        let kept: f64 = probs.iter().filter(|&&p| p >= PRUNE_THRESHOLD).sum();
        let mut branches = Vec::new();
        for (outcome, &p) in probs.iter().enumerate() {
            if p < PRUNE_THRESHOLD {
                continue;
            }
            let scale = 1.0 / p.sqrt();
            let amplitudes = self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if outcome_of(i, &masks) == outcome {
                        a * scale
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            branches.push(BranchOutcome {
                outcome: outcome as u64,
                width: qubits.len(),
                probability: p / kept,
                post_state: Self {
                    num_qubits: self.num_qubits,
                    amplitudes,
                },
            });
        }
        Ok(branches)
    }

    /// Draws one outcome of measuring `qubits`.
    pub fn measure_sample<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<BranchOutcome> {
        let mut branches = self.measure_branches(qubits)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = branches.len() - 1;
        for (i, b) in branches.iter().enumerate() {
            acc += b.probability;
            if u < acc {
                pick = i;
                break;
            }
        }
        Ok(branches.swap_remove(pick))
    }

    pub fn measure(&self, qubits: &[usize], mode: MeasureMode) -> Result<Measurement> {
        match mode {
            MeasureMode::Branch => Ok(Measurement::Branches(self.measure_branches(qubits)?)),
            MeasureMode::Sample(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(Measurement::Sampled(self.measure_sample(qubits, &mut rng)?))
            }
        }
    }
}

fn outcome_of(index: usize, masks: &[usize]) -> usize {
    masks
        .iter()
        .fold(0usize, |acc, &m| (acc << 1) | usize::from(index & m != 0))
}

/// `init_register`.
pub fn init_register(num_qubits: usize) -> Result<QuantumRegister> {
    QuantumRegister::new(num_qubits)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    /// Real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
    Rot(f64),
    Cnot,
    /// `Rot(θ)` on the target when the control is set.
    CRot(f64),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Rot(_) => "ROT",
            GateKind::Cnot => "CNOT",
            GateKind::CRot(_) => "CROT",
        }
    }

    pub fn is_controlled(&self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::CRot(_))
    }

    /// The 2×2 block acting on the (target) qubit.
    fn base_matrix(&self) -> [[Complex64; 2]; 2] {
        let c = |x: f64| Complex64::new(x, 0.0);
        match *self {
            GateKind::H => [
                [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
                [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
            ],
            GateKind::X | GateKind::Cnot => [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
            GateKind::Z => [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]],
            GateKind::Rot(t) | GateKind::CRot(t) => {
                [[c(t.cos()), c(-t.sin())], [c(t.sin()), c(t.cos())]]
            }
        }
    }
}

/// A gate from the fixed gate set plus the qubits it acts on (control first).
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateSpec {
    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, targets: vec![q] }
    }
    pub fn x(q: usize) -> Self {
        Self { kind: GateKind::X, targets: vec![q] }
    }
    pub fn z(q: usize) -> Self {
        Self { kind: GateKind::Z, targets: vec![q] }
    }
    pub fn rot(theta: f64, q: usize) -> Self {
        Self { kind: GateKind::Rot(theta), targets: vec![q] }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, targets: vec![control, target] }
    }
    pub fn crot(theta: f64, control: usize, target: usize) -> Self {
        Self { kind: GateKind::CRot(theta), targets: vec![control, target] }
    }

    fn validate(&self) -> Result<()> {
        let expected = if self.kind.is_controlled() { 2 } else { 1 };
        if self.targets.len() != expected {
            return Err(QuantumError::GateArity {
                gate: self.kind.name(),
                expected,
                got: self.targets.len(),
            });
        }
        if expected == 2 && self.targets[0] == self.targets[1] {
            return Err(QuantumError::DuplicateTargets);
        }
        Ok(())
    }

    /// Explicit matrix of the gate on its own qubits (control first for
    /// controlled gates, so 4×4 there and 2×2 otherwise).
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let base = self.kind.base_matrix();
        if !self.kind.is_controlled() {
            return base.iter().map(|row| row.to_vec()).collect();
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut m = vec![vec![zero; 4]; 4];
        m[0][0] = one;
        m[1][1] = one;
        for r in 0..2 {
            for c in 0..2 {
                m[2 + r][2 + c] = base[r][c];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    Sample(u64),
    Branch,
}

#[derive(Debug, Clone)]
pub enum Measurement {
    Sampled(BranchOutcome),
    Branches(Vec<BranchOutcome>),
}

/// One measurement outcome with its probability and collapsed state.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    /// Measured bits, first measured qubit most significant.
    pub outcome: u64,
    pub width: usize,
    pub probability: f64,
    pub post_state: QuantumRegister,
}

impl BranchOutcome {
    pub fn bits(&self) -> Vec<bool> {
        (0..self.width)
            .map(|i| self.outcome >> (self.width - 1 - i) & 1 == 1)
            .collect()
    }
}

/// `measure` with an explicit mode.
pub fn measure(state: &QuantumRegister, qubits: &[usize], mode: MeasureMode) -> Result<Measurement> {
    state.measure(qubits, mode)
}

/// `H|0⟩`, the state a quantum coin is measured in.
pub fn coin_state() -> QuantumRegister {
    QuantumRegister::bit(false)
        .apply(&GateSpec::h(0))
        .expect("H on one qubit")
}

/// Exact distribution of the quantum coin as `(bit, probability)` pairs.
pub fn quantum_coin_branches() -> Vec<(bool, f64)> {
    coin_state()
        .measure_branches(&[0])
        .expect("single qubit measurement")
        .into_iter()
        .map(|b| (b.outcome == 1, b.probability))
        .collect()
}

/// One seeded toss of the quantum coin.
pub fn quantum_coin_sample(seed: u64) -> bool {
    match coin_state().measure(&[0], MeasureMode::Sample(seed)) {
        Ok(Measurement::Sampled(b)) => b.outcome == 1,
        _ => unreachable!("sample mode returns a single outcome"),
    }
}

/// `√½|01⟩ − √½|10⟩`.
pub fn make_epr_pair() -> QuantumRegister {
    QuantumRegister::from_real(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]).expect("normalized")
}

/// Qubit of an EPR pair held by the adviser; the algorithm keeps qubit 1.
pub const ADVISER_QUBIT: usize = 0;

/// Operator sequence the adviser applies to its half of the pair:
/// `00 → I`, `01 → X`, `10 → Z`, `11 → Z then X`.
pub fn superdense_encode(bits: [bool; 2]) -> Vec<GateSpec> {
    match bits {
        [false, false] => vec![],
        [false, true] => vec![GateSpec::x(ADVISER_QUBIT)],
        [true, false] => vec![GateSpec::z(ADVISER_QUBIT)],
        [true, true] => vec![GateSpec::z(ADVISER_QUBIT), GateSpec::x(ADVISER_QUBIT)],
    }
}

/// The four states `superdense_encode` can produce from the EPR pair, in
/// bit-pair order `00, 01, 10, 11`.
pub fn superdense_codewords() -> &'static [QuantumRegister; 4] {
    static CODEWORDS: OnceLock<[QuantumRegister; 4]> = OnceLock::new();
    CODEWORDS.get_or_init(|| {
        let epr = make_epr_pair();
        [[false, false], [false, true], [true, false], [true, true]]
            .map(|b| epr.apply_all(&superdense_encode(b)).expect("two-qubit gates"))
    })
}

/// Recovers the two bits carried by an encoded pair.
///
/// CNOT then H maps the codewords onto basis states; the measured pair is
/// the bitwise complement of the encoded one under the fixed encoding.
pub fn superdense_decode(state: &QuantumRegister) -> Result<[bool; 2]> {
    let best = superdense_codewords()
        .iter()
        .map(|c| c.fidelity(state))
        .fold(0.0, f64::max);
    if best < 1.0 - FIDELITY_TOLERANCE {
        return Err(QuantumError::DecodeIntegrity { best });
    }
    let rotated = state.apply_all(&[GateSpec::cnot(0, 1), GateSpec::h(0)])?;
    let branches = rotated.measure_branches(&[0, 1])?;
    let outcome = branches
        .iter()
        .max_by(|a, b| a.probability.total_cmp(&b.probability))
        .expect("at least one branch");
    if branches.len() != 1 {
        return Err(QuantumError::DecodeIntegrity { best });
    }
    Ok([outcome.outcome & 0b10 == 0, outcome.outcome & 0b01 == 0])
}
