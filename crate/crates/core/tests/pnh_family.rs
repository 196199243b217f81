use qonline::game::{
    run_exact, run_sampled, strict_competitive_ratio, wrap_randomized_as_quantum, ChannelKind,
    OnlineAlgorithm, OutcomeDistribution,
};
use qonline::pnh::{
    adversary_unrestricted, alg1_quantum, alg_advice_1bit, alg_advice_1qubit, alg_blind_guess,
    alg_guess_count, deterministic_strategy, enumerate_family, fooling_pair_search, partial_mod,
    pnh_adviser, random_family, shuffled, FiniteReader, PnhInstance, PnhParams, PnhProblem, Strategy,
};
use qonline::Error;

const R: f64 = 1.0;
const W: f64 = 3.0;

fn problem(k: u32) -> PnhProblem {
    PnhProblem::new(PnhParams::new(k, R, W).unwrap())
}

/// Exact z computed straight from block contents.
fn oracle_z(inst: &PnhInstance, k: u32) -> [bool; 3] {
    let v: Vec<bool> = (0..3)
        .map(|i| {
            let ones = inst.block(i).iter().filter(|&&b| b).count();
            assert_eq!(ones % (1 << k), 0);
            (ones >> k) % 2 == 1
        })
        .collect();
    [v[0] ^ v[1] ^ v[2], v[1] ^ v[2], v[2]]
}

fn total_one(dist: &OutcomeDistribution<bool>) {
    assert!((dist.total_probability() - 1.0).abs() < 1e-9);
}

#[test]
fn z_matches_independent_count() {
    for k in 0..=2 {
        for inst in enumerate_family(k).iter().step_by(7).chain(&random_family(k, 30, 9)) {
            assert_eq!(inst.z(), oracle_z(inst, k));
        }
    }
}

#[test]
fn quantum_algorithm_is_right_half_the_time() {
    for k in 0..=2 {
        let fam = enumerate_family(k);
        let report = strict_competitive_ratio(&problem(k), &alg1_quantum(k), &fam, None).unwrap();
        for e in &report.evaluations {
            assert!((e.expected_cost - (R + W) / 2.0).abs() < 1e-9);
            assert_eq!(e.branch_count, 2);
        }
        assert!((report.strict_ratio - (R + W) / (2.0 * R)).abs() < 1e-9);
    }
}

#[test]
fn quantum_algorithm_outputs_track_z() {
    let k = 1;
    for inst in random_family(k, 20, 4) {
        let dist = run_exact(&problem(k), &alg1_quantum(k), &inst, None).unwrap();
        total_one(&dist);
        let z = inst.z();
        for b in &dist.branches {
            let y = inst.layout().guardian_answers(&b.outputs).unwrap();
            // y_1 is a guess; the rest follow exactly
            assert_eq!(y[0] ^ y[1], z[0] ^ z[1]);
            assert_eq!(y[1] ^ y[2], z[1] ^ z[2]);
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn blind_guess_costs_one_in_eight() {
    for k in 0..=2 {
        let fam = enumerate_family(k);
        let report = strict_competitive_ratio(&problem(k), &alg_blind_guess(), &fam, None).unwrap();
        for e in &report.evaluations {
            assert!((e.ratio - (R + 7.0 * W) / (8.0 * R)).abs() < 1e-9);
            assert_eq!(e.branch_count, 8);
        }
    }
}

#[test]
fn guess_count_matches_quantum_cost() {
    let k = 1;
    let fam = enumerate_family(k);
    let report = strict_competitive_ratio(&problem(k), &alg_guess_count(k), &fam, None).unwrap();
    assert!((report.strict_ratio - 2.0).abs() < 1e-9);
}

#[test]
fn one_bit_or_qubit_of_advice_is_optimal() {
    let adviser = |i: &PnhInstance| pnh_adviser(i);
    for k in 0..=2 {
        let fam = enumerate_family(k);
        for channel in [ChannelKind::ClassicalBits, ChannelKind::PrivateQubits] {
            let alg = alg_advice_1bit(k, channel).unwrap();
            let report = strict_competitive_ratio(&problem(k), &alg, &fam, Some(&adviser)).unwrap();
            assert_eq!(report.strict_ratio, 1.0);
        }
        let report = strict_competitive_ratio(&problem(k), &alg_advice_1qubit(k), &fam, Some(&adviser)).unwrap();
        assert_eq!(report.strict_ratio, 1.0);
    }
}

#[test]
fn advice_is_required_when_declared() {
    let inst = &enumerate_family(0)[0];
    let alg = alg_advice_1bit(0, ChannelKind::ClassicalBits).unwrap();
    assert!(matches!(run_exact(&problem(0), &alg, inst, None), Err(Error::Configuration(_))));
    let adviser = |i: &PnhInstance| pnh_adviser(i);
    assert!(matches!(
        run_exact(&problem(0), &alg1_quantum(0), inst, Some(&adviser)),
        Err(Error::Configuration(_))
    ));
}

#[test]
fn adversary_beats_every_deterministic_strategy() {
    for k in 0..=2 {
        let params = PnhParams::new(k, R, W).unwrap();
        for s in Strategy::corpus() {
            let alg = deterministic_strategy(s, k);
            let inst = adversary_unrestricted(&alg, &params).unwrap();
            assert_eq!(inst.block_lengths(), [3 << k; 3]);
            let dist = run_exact(&problem(k), &alg, &inst, None).unwrap();
            assert_eq!(dist.len(), 1);
            let y = inst.layout().guardian_answers(&dist.branches[0].outputs).unwrap();
            let z = oracle_z(&inst, k);
            assert!(y.iter().zip(&z).filter(|(a, b)| a != b).count() >= 2, "{s:?}");
            assert_eq!(dist.expected_cost(), W);
        }
    }
}

#[test]
fn emulated_coins_give_identical_distributions() {
    for k in 0..=1 {
        for inst in enumerate_family(k).iter().step_by(11) {
            let p = problem(k);
            let blind = run_exact(&p, &alg_blind_guess(), inst, None).unwrap();
            let wrapped = wrap_randomized_as_quantum(alg_blind_guess());
            assert_eq!(OnlineAlgorithm::<PnhProblem>::resources(&wrapped).random_bits, 0);
            let emulated = run_exact(&p, &wrapped, inst, None).unwrap();
            assert!(blind.same_branches(&emulated, 1e-12));
            assert!(emulated.branches.iter().all(|b| b.stats.random_bits == 0));

            let count = run_exact(&p, &alg_guess_count(k), inst, None).unwrap();
            let emulated = run_exact(&p, &wrap_randomized_as_quantum(alg_guess_count(k)), inst, None).unwrap();
            assert!(count.same_branches(&emulated, 1e-12));
        }
    }
}

#[test]
fn sampled_runs_are_reproducible() {
    let k = 1;
    let inst = &random_family(k, 1, 2)[0];
    let a = run_sampled(&problem(k), &alg1_quantum(k), inst, None, 99).unwrap();
    let b = run_sampled(&problem(k), &alg1_quantum(k), inst, None, 99).unwrap();
    assert_eq!(a.outputs, b.outputs);
    let mean: f64 = (0..2000)
        .map(|s| run_sampled(&problem(k), &alg1_quantum(k), inst, None, s).unwrap().cost)
        .sum::<f64>()
        / 2000.0;
    assert!((mean - 2.0).abs() < 0.15);
}

#[test]
fn shuffling_keeps_partial_mods() {
    for inst in enumerate_family(1).iter().step_by(13) {
        assert_eq!(shuffled(inst, 5).partial_mods(), inst.partial_mods());
    }
}

/// Whether any two valid blocks of length `len` collide in `reader` with
/// different values, by listing every block.
fn brute_force_fooled(reader: &FiniteReader, k: u32, len: usize) -> bool {
    let mut seen: [std::collections::HashSet<usize>; 2] = Default::default();
    for x in 0u32..1 << len {
        let block: Vec<bool> = (0..len).map(|i| x >> i & 1 == 1).collect();
        if let Ok(v) = partial_mod(&block, k) {
            seen[usize::from(v)].insert(reader.run(&block));
        }
    }
    !seen[0].is_disjoint(&seen[1])
}

#[test]
fn fooling_search_agrees_with_brute_force() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let mut readers: Vec<FiniteReader> = (1..=6).map(FiniteReader::ones_counter).collect();
    for _ in 0..40 {
        let states = rng.gen_range(1..=5);
        readers.push(FiniteReader {
            start: 0,
            transitions: (0..states).map(|_| [rng.gen_range(0..states), rng.gen_range(0..states)]).collect(),
        });
    }
    for (k, len) in [(0u32, 6usize), (1, 6), (1, 8), (1, 10), (2, 12)] {
        for reader in &readers {
            let found = fooling_pair_search(reader, k, len).unwrap();
            assert_eq!(found.is_some(), brute_force_fooled(reader, k, len), "{reader:?} k={k} len={len}");
            if let Some((a, b)) = found {
                assert_eq!((a.len(), b.len()), (len, len));
                assert_eq!(reader.run(&a), reader.run(&b));
                assert_ne!(partial_mod(&a, k).unwrap(), partial_mod(&b, k).unwrap());
            }
        }
    }
}
