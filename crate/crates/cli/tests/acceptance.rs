//! One line per acceptance criterion; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use qonline::game::{
    advice_transmit, run_exact, strict_competitive_ratio, wrap_randomized_as_quantum, ChannelKind, OnlineAlgorithm,
};
use qonline::paging::{
    alg_paging_with_advice, belady, brute_force_min_faults, paging_adviser, random_corpus, PagingInstance,
    PagingProblem,
};
use qonline::pneh::{
    alg2_quantum, build_fingerprint_config, class_family, class_index, eq_class, fingerprint_accept_probability,
    Alg2Mode, PnehParams, PnehProblem,
};
use qonline::pnh::{
    adversary_unrestricted, alg1_quantum, alg_advice_1bit, alg_advice_1qubit, alg_blind_guess, alg_guess_count,
    deterministic_strategy, enumerate_family, pnh_adviser, PnhInstance, PnhParams, PnhProblem,
    Strategy as PnhStrategy,
};
use qonline::qcore::{make_epr_pair, superdense_decode, superdense_encode, GateSpec, QuantumRegister};
use qonline::BitString;
use qonline_cli::{run_scenario, Mode, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const R: f64 = 1.0;
const W: f64 = 3.0;
const EXACT: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(
        elapsed <= Duration::from_secs(limit_secs),
        format!("took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64()),
    )
}

fn pnh_problem(k: u32) -> PnhProblem {
    PnhProblem::new(PnhParams::new(k, R, W).unwrap())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut sizes = Vec::new();
    for k in 0..=2 {
        let family = enumerate_family(k);
        let mut patterns: Vec<[bool; 3]> = family.iter().map(|i| i.partial_mods()).collect();
        patterns.sort();
        patterns.dedup();
        ensure(family.len() >= 24 && patterns.len() == 8, format!("k={k}: family misses parity patterns"))?;
        let report = strict_competitive_ratio(&pnh_problem(k), &alg1_quantum(k), &family, None).map_err(|e| e.to_string())?;
        ensure((report.strict_ratio - 2.0).abs() <= EXACT, format!("k={k}: ratio {}", report.strict_ratio))?;
        sizes.push(family.len());
    }
    within(start.elapsed(), 5)?;
    Ok(format!("ratio 2.0 for k=0,1,2 over {sizes:?} instances"))
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for k in 0..=2 {
        let report = strict_competitive_ratio(&pnh_problem(k), &alg_blind_guess(), &enumerate_family(k), None)
            .map_err(|e| e.to_string())?;
        for e in &report.evaluations {
            ensure((e.ratio - 2.75).abs() <= EXACT, format!("k={k} instance {}: {}", e.index, e.ratio))?;
            count += 1;
        }
    }
    Ok(format!("ratio 2.75 on all {count} instances"))
}

fn criterion_3() -> Outcome {
    let strategies = PnhStrategy::corpus();
    ensure(strategies.len() >= 5, "fewer than five strategies")?;
    for k in 0..=2 {
        let params = PnhParams::new(k, R, W).unwrap();
        for &s in &strategies {
            let alg = deterministic_strategy(s, k);
            let inst = adversary_unrestricted(&alg, &params).map_err(|e| e.to_string())?;
            let dist = run_exact(&pnh_problem(k), &alg, &inst, None).map_err(|e| e.to_string())?;
            ensure((dist.expected_cost() / R - 3.0).abs() <= EXACT, format!("{s:?} at k={k}: {}", dist.expected_cost()))?;
        }
    }
    Ok(format!("ratio 3.0 forced on {} strategies for k=0,1,2", strategies.len()))
}

fn criterion_4() -> Outcome {
    let adviser = |i: &PnhInstance| pnh_adviser(i);
    for k in 0..=2 {
        let family = enumerate_family(k);
        let bit = alg_advice_1bit(k, ChannelKind::ClassicalBits).unwrap();
        let a = strict_competitive_ratio(&pnh_problem(k), &bit, &family, Some(&adviser)).map_err(|e| e.to_string())?;
        let b = strict_competitive_ratio(&pnh_problem(k), &alg_advice_1qubit(k), &family, Some(&adviser))
            .map_err(|e| e.to_string())?;
        ensure(a.strict_ratio == 1.0 && b.strict_ratio == 1.0, format!("k={k}: {} / {}", a.strict_ratio, b.strict_ratio))?;
        for e in a.evaluations.iter().chain(&b.evaluations) {
            ensure(e.advice.map(|t| t.advice_units()) == Some(1), "advice is not a single unit")?;
        }
    }
    Ok("one advice bit and one advice qubit both give ratio 1.0".into())
}

fn same_under_emulation<A: OnlineAlgorithm<PnhProblem>>(k: u32, alg: A) -> Result<usize, String> {
    let wrapped = wrap_randomized_as_quantum(alg.clone());
    ensure(OnlineAlgorithm::<PnhProblem>::resources(&wrapped).random_bits == 0, "wrapper declares random bits")?;
    let family = enumerate_family(k);
    for inst in &family {
        let a = run_exact(&pnh_problem(k), &alg, inst, None).map_err(|e| e.to_string())?;
        let b = run_exact(&pnh_problem(k), &wrapped, inst, None).map_err(|e| e.to_string())?;
        ensure(a.same_branches(&b, 1e-12), format!("{} differs on {}", alg.name(), inst.to_line()))?;
    }
    Ok(family.len())
}

fn criterion_5() -> Outcome {
    let mut n = 0;
    for k in 0..=2 {
        n += same_under_emulation(k, alg_blind_guess())?;
        n += same_under_emulation(k, alg_guess_count(k))?;
    }
    Ok(format!("{n} distribution pairs identical"))
}

/// Probability expression of one table cell.
#[derive(Clone, Copy)]
enum P {
    Zero,
    /// (1-ε)²/2
    OneMinusSqHalf,
    /// (1-ε)ε/2
    MixedHalf,
    /// ε²/2
    EpsSqHalf,
    /// (1-ε)/2
    OneMinusHalf,
    /// ε/2
    EpsHalf,
    Half,
}

impl P {
    fn at(self, e: f64) -> f64 {
        match self {
            P::Zero => 0.0,
            P::OneMinusSqHalf => (1.0 - e) * (1.0 - e) / 2.0,
            P::MixedHalf => (1.0 - e) * e / 2.0,
            P::EpsSqHalf => e * e / 2.0,
            P::OneMinusHalf => (1.0 - e) / 2.0,
            P::EpsHalf => e / 2.0,
            P::Half => 0.5,
        }
    }
}

/// Rows are the answers `y1 y2 y3`, columns the EQ pattern of the three
/// blocks, both in binary order. Cost `true` means `r`, `false` means `w`;
/// zero cells carry no cost.
///
/// The bottom-left pair is printed as ((1-ε)/2)² at the source; every column
/// must sum to one, which forces (1-ε)²/2.
#[rustfmt::skip]
const TABLE: [[(P, bool); 8]; 8] = {
    use P::*;
    const Z: (P, bool) = (Zero, false);
    [
        [(OneMinusSqHalf, true), (OneMinusSqHalf, false), Z, Z, Z, Z, Z, Z],
        [(MixedHalf, false), (MixedHalf, false), (OneMinusHalf, false), (OneMinusHalf, true), Z, Z, Z, Z],
        [(EpsSqHalf, false), (EpsSqHalf, false), (EpsHalf, false), (EpsHalf, false), (EpsHalf, false), (EpsHalf, false), (Half, true), (Half, false)],
        [(MixedHalf, false), (MixedHalf, false), Z, Z, (OneMinusHalf, false), (OneMinusHalf, true), Z, Z],
        [(MixedHalf, false), (MixedHalf, false), Z, Z, (OneMinusHalf, true), (OneMinusHalf, false), Z, Z],
        [(EpsSqHalf, false), (EpsSqHalf, false), (EpsHalf, false), (EpsHalf, false), (EpsHalf, false), (EpsHalf, false), (Half, false), (Half, true)],
        [(MixedHalf, false), (MixedHalf, false), (OneMinusHalf, true), (OneMinusHalf, false), Z, Z, Z, Z],
        [(OneMinusSqHalf, false), (OneMinusSqHalf, true), Z, Z, Z, Z, Z, Z],
    ]
};

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let eps = 0.25;
    for col in 0..8 {
        let sum: f64 = TABLE.iter().map(|row| row[col].0.at(eps)).sum();
        ensure((sum - 1.0).abs() <= EXACT, format!("column {col:03b} sums to {sum}"))?;
    }
    let problem = PnehProblem::new(PnehParams::new(R, W).unwrap());
    let alg = alg2_quantum(Alg2Mode::Idealized { epsilon: eps }).map_err(|e| e.to_string())?;
    let mut cells = 0;
    let mut class_costs = [0.0; 8];
    for inst in class_family(3, 2, 41).map_err(|e| e.to_string())? {
        let col = class_index(inst.eq_values()) as usize;
        let dist = run_exact(&problem, &alg, &inst, None).map_err(|e| e.to_string())?;
        let mut got = [(0.0, None); 8];
        for (y, p, cost) in dist.marginal(|o| inst.layout().guardian_answers(o).unwrap()) {
            got[class_index(y) as usize] = (p, Some(cost));
        }
        for row in 0..8 {
            let (expr, right) = TABLE[row][col];
            let want = expr.at(eps);
            let (p, cost) = got[row];
            ensure((p - want).abs() <= EXACT, format!("cell y={row:03b} eq={col:03b}: {p} vs {want}"))?;
            if want > 0.0 {
                let want_cost = if right { R } else { W };
                ensure(cost == Some(want_cost), format!("cell y={row:03b} eq={col:03b}: cost {cost:?}"))?;
            }
            cells += 1;
        }
        class_costs[col] = dist.expected_cost();
    }
    let expected = [2.4375, 2.4375, 2.25, 2.25, 2.25, 2.25, 2.0, 2.0];
    for c in 0..8 {
        ensure((class_costs[c] - expected[c]).abs() <= EXACT, format!("class {:?}: {}", eq_class(c as u8), class_costs[c]))?;
    }
    within(start.elapsed(), 5)?;
    Ok(format!("{cells} cells checked over 16 instances; class costs 2.4375 / 2.25 / 2.0"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let config = Arc::new(build_fingerprint_config(12, 0.25, 128, 2024).map_err(|e| e.to_string())?);
    ensure(config.t <= 128, "t above 128")?;
    let verdict = config.verify().map_err(|e| e.to_string())?;
    ensure(config.q() - 1 == 4095, "wrong number of differences")?;
    ensure(verdict.passed && verdict.max_accept <= 0.25, format!("max accept {}", verdict.max_accept))?;
    // independent recomputation of the bound
    let worst = (1..config.q()).map(|d| config.accept_probability(d)).fold(0.0, f64::max);
    ensure((worst - verdict.max_accept).abs() <= 1e-12, "verification disagrees with recomputation")?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..16 {
        let half: Vec<bool> = (0..12).map(|_| rng.gen()).collect();
        let block: Vec<bool> = half.iter().chain(&half).copied().collect();
        let p = fingerprint_accept_probability(&config, &block).map_err(|e| e.to_string())?;
        ensure((p - 1.0).abs() <= EXACT, format!("equal halves accepted with {p}"))?;
    }
    within(start.elapsed(), 60)?;
    Ok(format!("t=128 verified, max accept {:.4} over 4095 differences", verdict.max_accept))
}

fn criterion_8() -> Outcome {
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let state = make_epr_pair().apply_all(&superdense_encode([a, b])).map_err(|e| e.to_string())?;
        ensure(superdense_decode(&state).map_err(|e| e.to_string())? == [a, b], format!("pair {a}{b}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sent = 0;
    for b in 0..=64usize {
        for _ in 0..8 {
            let bits: BitString = (0..b).map(|_| rng.gen::<bool>()).collect();
            let (received, transcript) = advice_transmit(ChannelKind::SharedEpr, &bits).map_err(|e| e.to_string())?;
            ensure(received == bits, format!("{b} bits corrupted"))?;
            ensure(transcript.adviser_qubits == b.div_ceil(2), format!("{b} bits sent as {} qubits", transcript.adviser_qubits))?;
            sent += 1;
        }
    }
    Ok(format!("4 pairs round-trip; {sent} strings of 0..=64 bits lossless with ⌈b/2⌉ qubits"))
}

fn criterion_9() -> Outcome {
    let corpus = random_corpus(200, 8, 4, 24, 909);
    let adviser = |i: &PagingInstance| paging_adviser(i);
    let mut brute = 0;
    for inst in &corpus {
        ensure(inst.num_pages() <= 8 && inst.cache_size() <= 4 && inst.len() <= 24, "corpus out of bounds")?;
        let opt = belady(inst).fault_count;
        if inst.len() <= 14 {
            ensure(brute_force_min_faults(inst).map_err(|e| e.to_string())? == opt, format!("belady not optimal on {inst}"))?;
            brute += 1;
        }
        let alg = alg_paging_with_advice(ChannelKind::SharedEpr, inst.cache_size());
        let dist = run_exact(&PagingProblem, &alg, inst, Some(&adviser)).map_err(|e| e.to_string())?;
        ensure(dist.expected_cost() == opt as f64, format!("advice algorithm off on {inst}"))?;
        let units = dist.advice.map(|t| t.adviser_qubits);
        ensure(units == Some(inst.len().div_ceil(2)), format!("transcript {units:?} for n={}", inst.len()))?;
    }
    Ok(format!("200 instances optimal ({brute} against brute force), ⌈n/2⌉ qubits each"))
}

fn gate() -> impl Strategy<Value = GateSpec> {
    let pair = (0..3usize, 0..3usize).prop_filter("distinct", |(a, b)| a != b);
    prop_oneof![
        (0..3usize).prop_map(GateSpec::h),
        (0..3usize).prop_map(GateSpec::x),
        (0..3usize).prop_map(GateSpec::z),
        (-7.0f64..7.0, 0..3usize).prop_map(|(t, q)| GateSpec::rot(t, q)),
        pair.clone().prop_map(|(a, b)| GateSpec::cnot(a, b)),
        (-7.0f64..7.0, pair).prop_map(|(t, (a, b))| GateSpec::crot(t, a, b)),
    ]
}

fn criterion_10() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&(gate(), prop::collection::vec(gate(), 0..30)), |(g, circuit)| {
            let m = g.matrix();
            let n = m.len();
            for i in 0..n {
                for j in 0..n {
                    let v: Complex64 = (0..n).map(|k| m[i][k] * m[j][k].conj()).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12);
                }
            }
            let state = QuantumRegister::new(3).unwrap().apply_all(&circuit).unwrap();
            prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
            let total: f64 = state.measure_branches(&[0, 2]).unwrap().iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            Ok(())
        })
        .map_err(|e| format!("property failed: {e}"))?;

    // branch completeness across the randomized and quantum algorithms
    for inst in enumerate_family(1).iter().step_by(5) {
        let p = pnh_problem(1);
        for total in [
            run_exact(&p, &alg1_quantum(1), inst, None).map(|d| d.total_probability()),
            run_exact(&p, &alg_blind_guess(), inst, None).map(|d| d.total_probability()),
            run_exact(&p, &alg_guess_count(1), inst, None).map(|d| d.total_probability()),
        ] {
            let total = total.map_err(|e| e.to_string())?;
            ensure((total - 1.0).abs() <= EXACT, format!("branch mass {total}"))?;
        }
    }

    // byte-identical reports: repeat runs and sequential vs parallel
    for (scenario, mode) in [
        ("pnh-alg1", Mode::MonteCarlo { trials: 300 }),
        ("pneh-table1", Mode::Exact),
        ("paging-epr", Mode::Exact),
    ] {
        let mut config = RunConfig::new(scenario);
        config.mode = mode;
        config.seed = 17;
        let a = run_scenario(&config).map_err(|e| e.to_string())?.to_json();
        let b = run_scenario(&config).map_err(|e| e.to_string())?.to_json();
        config.parallel = false;
        let c = run_scenario(&config).map_err(|e| e.to_string())?.to_json();
        ensure(a == b && b == c, format!("{scenario} reports differ"))?;
    }
    Ok("unitarity, normalization, branch completeness, deterministic reports".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("PNH quantum algorithm strict ratio (r+w)/(2r)", criterion_1),
        ("blind guessing ratio (r+7w)/(8r) on every instance", criterion_2),
        ("adversary forces w against deterministic strategies", criterion_3),
        ("one advice bit or qubit is optimal", criterion_4),
        ("coin emulation preserves outcome distributions", criterion_5),
        ("PNEH probability/cost table, idealized ε = 0.25", criterion_6),
        ("fingerprint one-sided error at L = 12", criterion_7),
        ("superdense advice transport", criterion_8),
        ("paging with ⌈n/2⌉ advice qubits", criterion_9),
        ("property suites", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
