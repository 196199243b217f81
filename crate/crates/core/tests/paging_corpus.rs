use qonline::game::{advice_transmit, run_exact, ChannelKind};
use qonline::paging::{
    alg_paging_with_advice, belady, brute_force_min_faults, paging_adviser, random_corpus, PagingInstance,
    PagingProblem, PagingRun,
};

fn faults_with(channel: ChannelKind, inst: &PagingInstance) -> (f64, usize) {
    let adviser = |i: &PagingInstance| paging_adviser(i);
    let alg = alg_paging_with_advice(channel, inst.cache_size());
    let dist = run_exact(&PagingProblem, &alg, inst, Some(&adviser)).unwrap();
    assert_eq!(dist.len(), 1);
    PagingRun::replay(inst, &dist.branches[0].outputs).unwrap();
    (dist.expected_cost(), dist.advice.unwrap().advice_units())
}

#[test]
fn advice_algorithm_is_optimal_on_corpus() {
    for inst in random_corpus(200, 8, 4, 24, 2024) {
        let opt = belady(&inst).fault_count as f64;
        let n = inst.len();
        let (classical, bits) = faults_with(ChannelKind::ClassicalBits, &inst);
        let (private, qubits) = faults_with(ChannelKind::PrivateQubits, &inst);
        let (epr, pairs) = faults_with(ChannelKind::SharedEpr, &inst);
        assert_eq!(classical, opt, "{inst}");
        assert_eq!((private, epr), (opt, opt));
        assert_eq!((bits, qubits, pairs), (n, n, n.div_ceil(2)));
    }
}

#[test]
fn belady_matches_brute_force() {
    for inst in random_corpus(80, 6, 3, 14, 7) {
        assert_eq!(belady(&inst).fault_count, brute_force_min_faults(&inst).unwrap(), "{inst}");
    }
}

#[test]
fn epr_transport_is_lossless_for_advice() {
    for inst in random_corpus(50, 8, 4, 24, 3) {
        let bits = paging_adviser(&inst);
        let (received, transcript) = advice_transmit(ChannelKind::SharedEpr, &bits).unwrap();
        assert_eq!(received, bits);
        assert_eq!(transcript.adviser_qubits, inst.len().div_ceil(2));
    }
}

#[test]
fn no_evictions_when_everything_fits() {
    let inst = PagingInstance::new(6, 4, vec![1, 2, 3, 1, 4, 2, 3]).unwrap();
    let (faults, _) = faults_with(ChannelKind::ClassicalBits, &inst);
    assert_eq!(faults, 4.0);
    assert_eq!(belady(&inst).eviction_count, 0);
}
