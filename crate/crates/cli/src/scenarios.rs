//! Named, reproducible experiments. Each scenario runs one family through
//! the game engine and checks its result against a closed-form value.

use std::path::PathBuf;
use std::sync::Arc;

use qonline::game::{
    advice_transmit, evaluate_family, run_exact, wrap_randomized_as_quantum, Adviser, ChannelKind,
    CompetitiveReport, EvalMode, EvalOptions, OnlineAlgorithm, OnlineProblem,
};
use qonline::paging::{
    alg_paging_with_advice, belady, brute_force_min_faults, paging_adviser, random_corpus, PagingInstance,
    PagingProblem,
};
use qonline::par;
use qonline::pneh::{
    alg2_quantum, build_fingerprint_config, class_family, class_index, fingerprint_accept_probability,
    pneh_expected_cost_closed_form, Alg2Mode, PnehInstance, PnehParams, PnehProblem,
};
use qonline::pnh::{
    adversary_unrestricted, alg1_quantum, alg_advice_1bit, alg_advice_1qubit, alg_blind_guess,
    alg_guess_count, deterministic_strategy, enumerate_family, pnh_adviser, PnhInstance, PnhParams,
    PnhProblem, Strategy,
};
use qonline::qcore::{make_epr_pair, superdense_decode, superdense_encode};
use qonline::BitString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{read_file, CliError, Result};
use crate::params::Params;
use crate::report::{digest, AlgorithmRecord, InstanceRecord, ModeRecord, Num, Report, SCHEMA_VERSION};

/// Predicate tolerance in exact mode.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Predicate tolerance on ratios in Monte-Carlo mode.
pub const MC_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub id: &'static str,
    pub summary: &'static str,
    /// The value the acceptance predicate compares against.
    pub formula: &'static str,
    pub exact_only: bool,
    defaults: &'static [(&'static str, &'static str)],
}

const PNH_DEFAULTS: &[(&str, &str)] = &[("k", "1"), ("r", "1"), ("w", "3")];

pub const CATALOG: &[Scenario] = &[
    Scenario {
        id: "pnh-alg1",
        summary: "PNH, pure quantum algorithm with one qubit and no advice",
        formula: "(r+w)/(2r)",
        exact_only: false,
        defaults: PNH_DEFAULTS,
    },
    Scenario {
        id: "pnh-blind-guess",
        summary: "PNH, three independent fair coins at the guardians",
        formula: "(r+7w)/(8r)",
        exact_only: false,
        defaults: PNH_DEFAULTS,
    },
    Scenario {
        id: "pnh-adversary",
        summary: "PNH, constructive adversary against deterministic strategies without advice",
        formula: "w/r",
        exact_only: true,
        defaults: PNH_DEFAULTS,
    },
    Scenario {
        id: "pnh-advice1",
        summary: "PNH, deterministic algorithm with one advice bit",
        formula: "1",
        exact_only: false,
        defaults: &[("k", "1"), ("r", "1"), ("w", "3"), ("channel", "classical-bits")],
    },
    Scenario {
        id: "pnh-advice-qubit",
        summary: "PNH, pure quantum algorithm with one advice qubit",
        formula: "1",
        exact_only: false,
        defaults: PNH_DEFAULTS,
    },
    Scenario {
        id: "pnh-emulation",
        summary: "PNH, randomized baselines with every coin replaced by a measured qubit",
        formula: "identical outcome distributions",
        exact_only: true,
        defaults: PNH_DEFAULTS,
    },
    Scenario {
        id: "pneh-table1",
        summary: "PNEH, guessing algorithm with an exact one-sided error ε, per EQ class",
        formula: "(r(1-ε)²/2 + w((1-ε²)/2+ε))/r for classes 000/001",
        exact_only: false,
        defaults: &[("epsilon", "0.25"), ("r", "1"), ("w", "3"), ("half", "3"), ("per_class", "2")],
    },
    Scenario {
        id: "pneh-fingerprint",
        summary: "PNEH, streaming fingerprint with an exhaustively verified coefficient set",
        formula: "max accept over unequal halves ≤ ε",
        exact_only: true,
        defaults: &[("L", "12"), ("epsilon", "0.25"), ("t", "128"), ("r", "1"), ("w", "3"), ("per_class", "1")],
    },
    Scenario {
        id: "superdense",
        summary: "advice over shared EPR pairs, two bits per adviser qubit",
        formula: "⌈b/2⌉ adviser qubits",
        exact_only: true,
        defaults: &[("max_bits", "64"), ("per_length", "4")],
    },
    Scenario {
        id: "paging-epr",
        summary: "paging with one keep-bit per request, delivered over shared EPR pairs",
        formula: "Belady-optimal faults with ⌈n/2⌉ advice qubits",
        exact_only: false,
        defaults: &[
            ("count", "200"),
            ("max_pages", "8"),
            ("max_cache", "4"),
            ("max_len", "24"),
            ("brute_force_max", "14"),
            ("channel", "shared-epr"),
        ],
    },
];

pub fn find_scenario(id: &str) -> Result<&'static Scenario> {
    CATALOG.iter().find(|s| s.id == id).ok_or_else(|| {
        let ids: Vec<&str> = CATALOG.iter().map(|s| s.id).collect();
        CliError::Usage(format!("unknown scenario '{id}' (known: {})", ids.join(", ")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { trials: usize },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    pub params: Vec<String>,
    pub mode: Mode,
    pub seed: u64,
    pub instances: Option<PathBuf>,
    /// Fan instance families out over threads.
    pub parallel: bool,
}

impl RunConfig {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            params: Vec::new(),
            mode: Mode::Exact,
            seed: 0,
            instances: None,
            parallel: true,
        }
    }

    pub fn with_params(mut self, params: &[&str]) -> Self {
        self.params = params.iter().map(|s| s.to_string()).collect();
        self
    }

    fn eval_options(&self) -> EvalOptions {
        let mode = match self.mode {
            Mode::Exact => EvalMode::Exact,
            Mode::MonteCarlo { trials } => EvalMode::MonteCarlo {
                trials,
                seed: self.seed,
            },
        };
        EvalOptions {
            mode,
            parallel: self.parallel,
        }
    }

    fn tolerance(&self) -> f64 {
        match self.mode {
            Mode::Exact => EXACT_TOLERANCE,
            Mode::MonteCarlo { .. } => MC_TOLERANCE,
        }
    }
}

/// Runs a scenario. The report's `passed` flag is its acceptance predicate;
/// the timestamp is left unset.
pub fn run_scenario(config: &RunConfig) -> Result<Report> {
    let scenario = find_scenario(&config.scenario)?;
    if scenario.exact_only && config.mode != Mode::Exact {
        return Err(CliError::Usage(format!("{} runs in exact mode only", scenario.id)));
    }
    if let Mode::MonteCarlo { trials: 0 } = config.mode {
        return Err(CliError::Usage("Monte-Carlo mode needs --trials ≥ 1".into()));
    }
    let params = Params::resolve(scenario.defaults, &config.params)?;
    let mut report = Report {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        scenario: scenario.id.to_string(),
        formula: scenario.formula,
        params: params.as_map().clone(),
        mode: match config.mode {
            Mode::Exact => ModeRecord {
                kind: "exact",
                trials: None,
                tolerance: Num(EXACT_TOLERANCE),
            },
            Mode::MonteCarlo { trials } => ModeRecord {
                kind: "mc",
                trials: Some(trials),
                tolerance: Num(MC_TOLERANCE),
            },
        },
        seed: config.seed,
        algorithms: Vec::new(),
        instances: Vec::new(),
        aggregate: None,
        details: serde_json::Value::Null,
        checks: Vec::new(),
        passed: true,
        generated_unix: None,
    };
    match scenario.id {
        "pnh-alg1" => pnh_ratio(config, &params, &mut report, Pnh::Alg1)?,
        "pnh-blind-guess" => pnh_ratio(config, &params, &mut report, Pnh::BlindGuess)?,
        "pnh-advice1" => pnh_ratio(config, &params, &mut report, Pnh::AdviceBit(params.get("channel")?))?,
        "pnh-advice-qubit" => pnh_ratio(config, &params, &mut report, Pnh::AdviceQubit)?,
        "pnh-adversary" => pnh_adversary(&params, &mut report)?,
        "pnh-emulation" => pnh_emulation(config, &params, &mut report)?,
        "pneh-table1" => pneh_table(config, &params, &mut report)?,
        "pneh-fingerprint" => pneh_fingerprint(config, &params, &mut report)?,
        "superdense" => superdense(config, &params, &mut report)?,
        "paging-epr" => paging(config, &params, &mut report)?,
        other => unreachable!("catalog entry {other} has no runner"),
    }
    Ok(report)
}

fn algorithm_record<P: OnlineProblem, A: OnlineAlgorithm<P>>(alg: &A) -> AlgorithmRecord {
    AlgorithmRecord {
        name: alg.name(),
        kind: alg.kind(),
        resources: alg.resources(),
    }
}

/// Evaluates a family and appends one record per instance.
fn evaluate<P, A>(
    config: &RunConfig,
    report: &mut Report,
    problem: &P,
    alg: &A,
    family: &[P::Instance],
    adviser: Option<&Adviser<P::Instance>>,
    describe: impl Fn(&P::Instance) -> (String, Option<String>),
) -> Result<CompetitiveReport>
where
    P: OnlineProblem + Sync,
    P::Instance: Sync,
    A: OnlineAlgorithm<P> + Sync,
{
    let result = evaluate_family(problem, alg, family, adviser, config.eval_options())?;
    let offset = report.instances.len();
    for (e, inst) in result.evaluations.iter().zip(family) {
        let (text, label) = describe(inst);
        report.instances.push(InstanceRecord {
            index: offset + e.index,
            label,
            digest: digest(&text),
            expected_cost: Num(e.expected_cost),
            opt_cost: Num(e.opt_cost),
            ratio: Num(e.ratio),
            branch_count: e.branch_count,
            advice: e.advice,
        });
    }
    report.algorithms.push(algorithm_record::<P, A>(alg));
    Ok(result)
}

fn instance_lines(config: &RunConfig) -> Result<Option<Vec<String>>> {
    let Some(path) = &config.instances else {
        return Ok(None);
    };
    let text = read_file(path)?;
    Ok(Some(
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect(),
    ))
}

fn pnh_setup(config: &RunConfig, params: &Params) -> Result<(PnhParams, Vec<PnhInstance>)> {
    let pnh = PnhParams::new(params.get("k")?, params.get("r")?, params.get("w")?)?;
    let family = match instance_lines(config)? {
        Some(lines) => lines
            .iter()
            .map(|l| PnhInstance::parse(l, pnh.k))
            .collect::<qonline::Result<Vec<_>>>()?,
        None => enumerate_family(pnh.k),
    };
    if family.is_empty() {
        return Err(qonline::Error::EmptyFamily.into());
    }
    Ok((pnh, family))
}

fn pnh_describe(inst: &PnhInstance) -> (String, Option<String>) {
    (inst.to_line(), None)
}

#[derive(Debug, Clone, Copy)]
enum Pnh {
    Alg1,
    BlindGuess,
    AdviceBit(ChannelKind),
    AdviceQubit,
}

fn pnh_ratio(config: &RunConfig, params: &Params, report: &mut Report, which: Pnh) -> Result<()> {
    let (pnh, family) = pnh_setup(config, params)?;
    let problem = PnhProblem::new(pnh);
    let (r, w) = (pnh.r, pnh.w);
    let adviser = |i: &PnhInstance| pnh_adviser(i);
    let (result, expected) = match which {
        Pnh::Alg1 => (
            evaluate(config, report, &problem, &alg1_quantum(pnh.k), &family, None, pnh_describe)?,
            (r + w) / (2.0 * r),
        ),
        Pnh::BlindGuess => (
            evaluate(config, report, &problem, &alg_blind_guess(), &family, None, pnh_describe)?,
            (r + 7.0 * w) / (8.0 * r),
        ),
        Pnh::AdviceBit(channel) => {
            let alg = alg_advice_1bit(pnh.k, channel)?;
            (evaluate(config, report, &problem, &alg, &family, Some(&adviser), pnh_describe)?, 1.0)
        }
        Pnh::AdviceQubit => (
            evaluate(config, report, &problem, &alg_advice_1qubit(pnh.k), &family, Some(&adviser), pnh_describe)?,
            1.0,
        ),
    };
    report.set_aggregate(&result, Some(expected));
    let tol = config.tolerance();
    report.check(
        "strict ratio matches formula",
        (result.strict_ratio - expected).abs() <= tol,
        format!("{} vs {}", Num(result.strict_ratio).rounded(), Num(expected).rounded()),
    );
    if matches!(which, Pnh::BlindGuess) || config.mode == Mode::Exact {
        let off = result.evaluations.iter().filter(|e| (e.ratio - expected).abs() > tol).count();
        report.check(
            "every instance attains the formula",
            off == 0,
            format!("{off} of {} instances differ", result.evaluations.len()),
        );
    }
    Ok(())
}

fn pnh_adversary(params: &Params, report: &mut Report) -> Result<()> {
    let pnh = PnhParams::new(params.get("k")?, params.get("r")?, params.get("w")?)?;
    let problem = PnhProblem::new(pnh);
    let expected = pnh.w / pnh.r;
    let mut evaluations = Vec::new();
    for (index, strategy) in Strategy::corpus().into_iter().enumerate() {
        let alg = deterministic_strategy(strategy, pnh.k);
        let inst = adversary_unrestricted(&alg, &pnh)?;
        let dist = run_exact(&problem, &alg, &inst, None)?;
        let cost = dist.expected_cost();
        report.instances.push(InstanceRecord {
            index,
            label: Some(OnlineAlgorithm::<PnhProblem>::name(&alg)),
            digest: digest(&inst.to_line()),
            expected_cost: Num(cost),
            opt_cost: Num(pnh.r),
            ratio: Num(cost / pnh.r),
            branch_count: dist.len(),
            advice: None,
        });
        report.algorithms.push(algorithm_record::<PnhProblem, _>(&alg));
        evaluations.push(qonline::game::InstanceEvaluation {
            index,
            expected_cost: cost,
            opt_cost: pnh.r,
            ratio: cost / pnh.r,
            branch_count: dist.len(),
            advice: None,
        });
    }
    let result = CompetitiveReport::from_evaluations(evaluations)?;
    report.set_aggregate(&result, Some(expected));
    let forced = result.evaluations.iter().all(|e| (e.ratio - expected).abs() <= EXACT_TOLERANCE);
    report.check(
        "adversary forces cost w on every strategy",
        forced,
        format!("{} strategies", result.evaluations.len()),
    );
    Ok(())
}

fn pnh_emulation(config: &RunConfig, params: &Params, report: &mut Report) -> Result<()> {
    let (pnh, family) = pnh_setup(config, params)?;
    let problem = PnhProblem::new(pnh);

    fn compare<A>(problem: &PnhProblem, family: &[PnhInstance], alg: A) -> Result<(usize, bool)>
    where
        A: OnlineAlgorithm<PnhProblem> + Sync,
    {
        let wrapped = wrap_randomized_as_quantum(alg.clone());
        let same = par::map(family, |_, inst| -> qonline::Result<bool> {
            let original = run_exact(problem, &alg, inst, None)?;
            let emulated = run_exact(problem, &wrapped, inst, None)?;
            Ok(original.same_branches(&emulated, 1e-12) && emulated.branches.iter().all(|b| b.stats.random_bits == 0))
        });
        let same = same.into_iter().collect::<qonline::Result<Vec<_>>>()?;
        Ok((same.iter().filter(|&&s| !s).count(), same.len() == family.len()))
    }

    for (name, (differ, complete)) in [
        ("blind guess", compare(&problem, &family, alg_blind_guess())?),
        ("guess and count", compare(&problem, &family, alg_guess_count(pnh.k))?),
    ] {
        report.check(
            format!("{name}: emulated distribution equals original"),
            differ == 0 && complete,
            format!("{differ} of {} instances differ", family.len()),
        );
    }
    let wrapped = wrap_randomized_as_quantum(alg_blind_guess());
    let result = evaluate(config, report, &problem, &wrapped, &family, None, pnh_describe)?;
    let wrapped_count = wrap_randomized_as_quantum(alg_guess_count(pnh.k));
    let count = evaluate(config, report, &problem, &wrapped_count, &family, None, pnh_describe)?;
    let all: Vec<_> = result
        .evaluations
        .into_iter()
        .chain(count.evaluations.into_iter().map(|mut e| {
            e.index += family.len();
            e
        }))
        .collect();
    report.set_aggregate(&CompetitiveReport::from_evaluations(all)?, None);
    Ok(())
}

fn pneh_describe(inst: &PnehInstance) -> (String, Option<String>) {
    let [a, b, c] = inst.eq_values().map(u8::from);
    (inst.to_line(), Some(format!("eq {a}{b}{c}")))
}

fn pneh_family(config: &RunConfig, half: usize, per_class: usize) -> Result<Vec<PnehInstance>> {
    match instance_lines(config)? {
        Some(lines) => Ok(lines
            .iter()
            .map(|l| PnehInstance::parse(l))
            .collect::<qonline::Result<Vec<_>>>()?),
        None => Ok(class_family(half, per_class, config.seed)?),
    }
}

fn pneh_table(config: &RunConfig, params: &Params, report: &mut Report) -> Result<()> {
    let epsilon: f64 = params.get("epsilon")?;
    let pneh = PnehParams::new(params.get("r")?, params.get("w")?)?;
    let family = pneh_family(config, params.get("half")?, params.get("per_class")?)?;
    let problem = PnehProblem::new(pneh);
    let alg = alg2_quantum(Alg2Mode::Idealized { epsilon })?;
    let result = evaluate(config, report, &problem, &alg, &family, None, pneh_describe)?;
    let tol = config.tolerance() * pneh.r;

    let mut classes = Vec::new();
    for class in 0..8u8 {
        let members: Vec<_> = result
            .evaluations
            .iter()
            .zip(&family)
            .filter(|(_, inst)| class_index(inst.eq_values()) == class)
            .collect();
        let Some((_, sample)) = members.first() else {
            continue;
        };
        let closed = pneh_expected_cost_closed_form(sample.eq_values(), pneh.r, pneh.w, epsilon);
        let worst = members.iter().map(|(e, _)| (e.expected_cost - closed).abs()).fold(0.0, f64::max);
        report.check(
            format!("class {class:03b}: expected cost matches closed form"),
            worst <= tol,
            format!("closed form {}, max deviation {:.3e}", Num(closed).rounded(), worst),
        );
        // Exact distribution over the guardians' answers for one member.
        let cells = if config.mode == Mode::Exact {
            let dist = run_exact(&problem, &alg, sample, None)?;
            let mut cells = vec![json!(null); 8];
            for (y, p, cost) in dist.marginal(|out| sample.layout().guardian_answers(out).expect("full output")) {
                cells[class_index(y) as usize] = json!({"y": format!("{:03b}", class_index(y)), "p": Num(p), "cost": Num(cost)});
            }
            cells.retain(|c| !c.is_null());
            json!(cells)
        } else {
            serde_json::Value::Null
        };
        classes.push(json!({
            "eq": format!("{class:03b}"),
            "instances": members.len(),
            "closed_form_cost": Num(closed),
            "closed_form_ratio": Num(closed / pneh.r),
            "cells": cells,
        }));
    }
    let headline = pneh_expected_cost_closed_form([false; 3], pneh.r, pneh.w, epsilon) / pneh.r;
    let max_ratio = (0..8u8)
        .map(|c| pneh_expected_cost_closed_form(qonline::pneh::eq_class(c), pneh.r, pneh.w, epsilon) / pneh.r)
        .fold(0.0, f64::max);
    report.details = json!({
        "classes": classes,
        "headline_ratio": Num(headline),
        "max_class_ratio": Num(max_ratio),
    });
    report.set_aggregate(&result, Some(max_ratio));
    Ok(())
}

fn pneh_fingerprint(config: &RunConfig, params: &Params, report: &mut Report) -> Result<()> {
    let l: u32 = params.get("L")?;
    let epsilon: f64 = params.get("epsilon")?;
    let t: usize = params.get("t")?;
    let fingerprint = Arc::new(build_fingerprint_config(l, epsilon, t, config.seed)?);
    let verdict = fingerprint.verify()?;
    report.check(
        "coefficient set verified over every nonzero difference",
        verdict.passed,
        format!("max accept {} at D = {}", Num(verdict.max_accept).rounded(), verdict.worst_d),
    );

    let pneh = PnehParams::new(params.get("r")?, params.get("w")?)?;
    let family = pneh_family(config, l as usize, params.get("per_class")?)?;
    let mut equal_worst: f64 = 0.0;
    for inst in &family {
        for i in 0..2 {
            let block = inst.block(i);
            if inst.eq_values()[i] {
                let p = fingerprint_accept_probability(&fingerprint, &block)?;
                equal_worst = equal_worst.max((p - 1.0).abs());
            }
        }
    }
    report.check(
        "equal halves always accepted",
        equal_worst <= EXACT_TOLERANCE,
        format!("max deviation {equal_worst:.3e}"),
    );

    let problem = PnehProblem::new(pneh);
    let alg = alg2_quantum(Alg2Mode::Fingerprint(Arc::clone(&fingerprint)))?;
    let result = evaluate(config, report, &problem, &alg, &family, None, pneh_describe)?;
    let above = result
        .evaluations
        .iter()
        .zip(&family)
        .filter(|(e, inst)| {
            e.expected_cost > pneh_expected_cost_closed_form(inst.eq_values(), pneh.r, pneh.w, epsilon) + EXACT_TOLERANCE
        })
        .count();
    report.check(
        "expected cost never exceeds the exact-ε closed form",
        above == 0,
        format!("{above} of {} instances above", family.len()),
    );
    report.set_aggregate(&result, None);
    report.details = json!({
        "config": &*fingerprint,
        "verification": verdict,
        "qubits": fingerprint.width() + 1,
    });
    Ok(())
}

fn superdense(config: &RunConfig, params: &Params, report: &mut Report) -> Result<()> {
    let mut pairs_ok = true;
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let state = make_epr_pair().apply_all(&superdense_encode([a, b])).map_err(qonline::Error::from)?;
        pairs_ok &= superdense_decode(&state).map_err(qonline::Error::from)? == [a, b];
    }
    report.check("all four bit pairs round-trip", pairs_ok, "");

    let max_bits: usize = params.get("max_bits")?;
    let per_length: usize = params.get("per_length")?;
    let (mut lossy, mut wrong_count, mut total) = (0, 0, 0);
    let mut lengths = Vec::new();
    for b in 0..=max_bits {
        for j in 0..per_length {
            let mut rng = ChaCha8Rng::seed_from_u64(par::derive_seed(config.seed, b as u64, j as u64));
            let bits: BitString = (0..b).map(|_| rng.gen::<bool>()).collect();
            let (received, transcript) = advice_transmit(ChannelKind::SharedEpr, &bits)?;
            total += 1;
            lossy += usize::from(received != bits);
            wrong_count += usize::from(transcript.adviser_qubits != b.div_ceil(2));
            if j == 0 {
                lengths.push(json!({"bits": b, "adviser_qubits": transcript.adviser_qubits}));
            }
        }
    }
    report.check("random strings transmitted losslessly", lossy == 0, format!("{lossy} of {total} corrupted"));
    report.check("adviser sends ⌈b/2⌉ qubits", wrong_count == 0, format!("{wrong_count} of {total} off"));
    report.details = json!({ "lengths": lengths });
    Ok(())
}

fn paging(config: &RunConfig, params: &Params, report: &mut Report) -> Result<()> {
    let channel: ChannelKind = params.get("channel")?;
    let family = match &config.instances {
        Some(path) => read_file(path)?
            .split("\n\n")
            .filter(|block| block.lines().any(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')))
            .map(str::parse::<PagingInstance>)
            .collect::<qonline::Result<Vec<_>>>()?,
        None => random_corpus(
            params.get("count")?,
            params.get("max_pages")?,
            params.get("max_cache")?,
            params.get("max_len")?,
            config.seed,
        ),
    };
    if family.is_empty() {
        return Err(qonline::Error::EmptyFamily.into());
    }
    let adviser = |i: &PagingInstance| paging_adviser(i);
    // The cache size is part of the online algorithm, so evaluate per size.
    let mut sizes: Vec<usize> = family.iter().map(|i| i.cache_size()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut order = Vec::new();
    for size in sizes {
        let members: Vec<PagingInstance> = family.iter().filter(|i| i.cache_size() == size).cloned().collect();
        order.extend(family.iter().enumerate().filter(|(_, i)| i.cache_size() == size).map(|(j, _)| j));
        let alg = alg_paging_with_advice(channel, size);
        evaluate(config, report, &PagingProblem, &alg, &members, Some(&adviser), |i| {
            (i.to_string(), Some(format!("n={} cache={}", i.len(), i.cache_size())))
        })?;
    }
    // Restore input order in the report.
    let mut records: Vec<_> = report.instances.drain(..).zip(order).collect();
    records.sort_by_key(|(_, j)| *j);
    report.instances = records
        .into_iter()
        .map(|(mut rec, j)| {
            rec.index = j;
            rec
        })
        .collect();
    // One record per cache size; they differ only in that parameter.
    report.algorithms.truncate(1);

    let tol = config.tolerance();
    let off = report.instances.iter().filter(|r| (r.ratio.0 - 1.0).abs() > tol).count();
    report.check("faults equal Belady on every instance", off == 0, format!("{off} of {} differ", family.len()));

    let brute_max: usize = params.get("brute_force_max")?;
    let small: Vec<&PagingInstance> = family.iter().filter(|i| i.len() <= brute_max).collect();
    let brute = par::map(&small, |_, i| brute_force_min_faults(i).map(|f| f == belady(i).fault_count));
    let brute = brute.into_iter().collect::<qonline::Result<Vec<_>>>()?;
    let disagree = brute.iter().filter(|&&ok| !ok).count();
    report.check(
        format!("Belady equals brute-force optimum for n ≤ {brute_max}"),
        disagree == 0,
        format!("{disagree} of {} disagree", small.len()),
    );

    let units_off = report
        .instances
        .iter()
        .zip(&family)
        .filter(|(r, i)| {
            let expected = match channel {
                ChannelKind::SharedEpr => i.len().div_ceil(2),
                _ => i.len(),
            };
            r.advice.map(|a| a.advice_units()) != Some(expected)
        })
        .count();
    report.check(
        match channel {
            ChannelKind::SharedEpr => "adviser sends ⌈n/2⌉ qubits",
            _ => "adviser sends n units",
        },
        units_off == 0,
        format!("{units_off} of {} off", family.len()),
    );
    let worst = report
        .instances
        .iter()
        .max_by(|a, b| a.ratio.0.total_cmp(&b.ratio.0))
        .map(|r| (r.index, r.ratio.0))
        .expect("non-empty family");
    report.aggregate = Some(crate::report::Aggregate {
        strict_ratio: Num(worst.1),
        witness: worst.0,
        expected_ratio: Some(Num(1.0)),
    });
    Ok(())
}
