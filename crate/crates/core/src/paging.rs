//! Paging with a two-level memory: Belady's offline rule, a brute-force
//! optimum for small inputs, and an online algorithm that matches Belady
//! given one keep-bit of advice per request.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::game::{AdviceMessage, AlgorithmKind, Chance, ChannelKind, OnlineAlgorithm, OnlineProblem, Resources};

pub type Page = u32;

/// Largest instance [`brute_force_min_faults`] accepts.
pub const BRUTE_FORCE_MAX_REQUESTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PagingInstance {
    num_pages: u32,
    cache_size: usize,
    requests: Vec<Page>,
}

impl PagingInstance {
    pub fn new(num_pages: u32, cache_size: usize, requests: Vec<Page>) -> Result<Self> {
        if cache_size == 0 || cache_size >= num_pages as usize {
            return Err(Error::Validation(format!(
                "cache size {cache_size} must be positive and below N = {num_pages}"
            )));
        }
        if requests.is_empty() {
            return Err(Error::Validation("at least one request is required".into()));
        }
        if let Some(bad) = requests.iter().find(|&&p| p == 0 || p > num_pages) {
            return Err(Error::Validation(format!("page {bad} is outside 1..={num_pages}")));
        }
        Ok(Self {
            num_pages,
            cache_size,
            requests,
        })
    }

    pub fn num_pages(&self) -> u32 {
        self.num_pages
    }

    pub fn cache_size(&self) -> usize {
        self.cache_size
    }

    pub fn requests(&self) -> &[Page] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn distinct_pages(&self) -> usize {
        self.requests.iter().collect::<BTreeSet<_>>().len()
    }

    /// For each step, the index of the next request to the same page.
    pub fn next_uses(&self) -> Vec<Option<usize>> {
        let mut next = vec![None; self.requests.len()];
        let mut seen: HashMap<Page, usize> = HashMap::new();
        for (i, &p) in self.requests.iter().enumerate().rev() {
            next[i] = seen.insert(p, i);
        }
        next
    }
}

/// `N cache_size` on the first line, requests on the second.
impl FromStr for PagingInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Validation("missing 'N cache_size' line".into()))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let [n, k] = nums[..] else {
            return Err(Error::Validation(format!("header '{header}' should be 'N cache_size'")));
        };
        let parse = |t: &str| t.parse::<u64>().map_err(|e| Error::Validation(format!("'{t}': {e}")));
        let num_pages = u32::try_from(parse(n)?).map_err(|e| Error::Validation(e.to_string()))?;
        let cache_size = parse(k)? as usize;
        let requests = lines
            .flat_map(|l| l.split(|c: char| c.is_whitespace() || c == ','))
            .filter(|t| !t.is_empty())
            .map(|t| parse(t).and_then(|p| u32::try_from(p).map_err(|e| Error::Validation(e.to_string()))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_pages, cache_size, requests)
    }
}

impl fmt::Display for PagingInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.num_pages, self.cache_size)?;
        let reqs: Vec<String> = self.requests.iter().map(|p| p.to_string()).collect();
        writeln!(f, "{}", reqs.join(" "))
    }
}

/// What happened at one request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PagingAnswer {
    Hit,
    /// The page was loaded, evicting `evicted` if the cache was full.
    Fault { evicted: Option<Page> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PagingRun {
    pub answers: Vec<PagingAnswer>,
    pub fault_count: usize,
    pub eviction_count: usize,
    pub final_cache: BTreeSet<Page>,
}

impl PagingRun {
    /// Replays `answers` and checks they describe a legal schedule.
    pub fn replay(instance: &PagingInstance, answers: &[PagingAnswer]) -> Result<Self> {
        if answers.len() != instance.len() {
            return Err(Error::Validation(format!(
                "{} answers for {} requests",
                answers.len(),
                instance.len()
            )));
        }
        let mut cache = BTreeSet::new();
        let (mut faults, mut evictions) = (0, 0);
        for (i, (&page, answer)) in instance.requests.iter().zip(answers).enumerate() {
            match (cache.contains(&page), answer) {
                (true, PagingAnswer::Hit) => {}
                (false, PagingAnswer::Fault { evicted }) => {
                    faults += 1;
                    let full = cache.len() == instance.cache_size;
                    match (full, evicted) {
                        (true, Some(victim)) if cache.remove(victim) => evictions += 1,
                        (false, None) => {}
                        _ => {
                            return Err(Error::Validation(format!(
                                "step {i}: eviction {evicted:?} is illegal for cache {cache:?}"
                            )))
                        }
                    }
                    cache.insert(page);
                }
                (present, _) => {
                    return Err(Error::Validation(format!(
                        "step {i}: page {page} is {}in cache but answer is {answer:?}",
                        if present { "" } else { "not " }
                    )))
                }
            }
        }
        Ok(Self {
            answers: answers.to_vec(),
            fault_count: faults,
            eviction_count: evictions,
            final_cache: cache,
        })
    }
}

/// Runs a demand-paging policy: `choose(cache, step)` picks the victim when
/// the cache is full.
fn simulate(instance: &PagingInstance, mut choose: impl FnMut(&BTreeSet<Page>, usize) -> Page) -> Vec<PagingAnswer> {
    let mut cache = BTreeSet::new();
    instance
        .requests
        .iter()
        .enumerate()
        .map(|(i, &page)| {
            if cache.contains(&page) {
                return PagingAnswer::Hit;
            }
            let evicted = (cache.len() == instance.cache_size).then(|| {
                let victim = choose(&cache, i);
                cache.remove(&victim);
                victim
            });
            cache.insert(page);
            PagingAnswer::Fault { evicted }
        })
        .collect()
}

/// Evicts the page whose next use is farthest away; pages never used again
/// count as infinitely far, ties go to the smallest id.
pub fn belady(instance: &PagingInstance) -> PagingRun {
    let reqs = &instance.requests;
    let answers = simulate(instance, |cache, i| {
        let next_use = |p: Page| reqs[i + 1..].iter().position(|&q| q == p).unwrap_or(usize::MAX);
        *cache
            .iter()
            .max_by(|&&a, &&b| next_use(a).cmp(&next_use(b)).then(b.cmp(&a)))
            .expect("full cache is non-empty")
    });
    PagingRun::replay(instance, &answers).expect("belady produces a legal schedule")
}

/// Bit `i` is 1 iff, under [`belady`], the page requested at step `i` stays
/// cached until its next request.
pub fn paging_advice_bits(instance: &PagingInstance) -> BitString {
    let run = belady(instance);
    let next = instance.next_uses();
    // evicted_at[i] = page evicted at step i
    let evicted_at: Vec<Option<Page>> = run
        .answers
        .iter()
        .map(|a| match a {
            PagingAnswer::Fault { evicted } => *evicted,
            PagingAnswer::Hit => None,
        })
        .collect();
    instance
        .requests
        .iter()
        .enumerate()
        .map(|(i, &page)| match next[i] {
            Some(j) => !evicted_at[i + 1..j].contains(&Some(page)),
            None => false,
        })
        .collect()
}

/// Minimum faults over every eviction schedule, by memoized search over
/// `(step, cache set)`.
pub fn brute_force_min_faults(instance: &PagingInstance) -> Result<usize> {
    if instance.len() > BRUTE_FORCE_MAX_REQUESTS || instance.num_pages > 32 {
        return Err(Error::Capacity(format!(
            "brute force is limited to {BRUTE_FORCE_MAX_REQUESTS} requests over at most 32 pages"
        )));
    }
    fn go(inst: &PagingInstance, step: usize, cache: u32, memo: &mut HashMap<(usize, u32), usize>) -> usize {
        if step == inst.requests.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(step, cache)) {
            return v;
        }
        let bit = 1u32 << (inst.requests[step] - 1);
        let best = if cache & bit != 0 {
            go(inst, step + 1, cache, memo)
        } else if (cache.count_ones() as usize) < inst.cache_size {
            1 + go(inst, step + 1, cache | bit, memo)
        } else {
            (0..32)
                .filter(|v| cache >> v & 1 == 1)
                .map(|v| 1 + go(inst, step + 1, (cache & !(1 << v)) | bit, memo))
                .min()
                .expect("full cache is non-empty")
        };
        memo.insert((step, cache), best);
        best
    }
    Ok(go(instance, 0, 0, &mut HashMap::new()))
}

/// Seeded instances with `N ≤ max_pages`, cache `≤ max_cache`, `n ≤ max_len`.
pub fn random_corpus(count: usize, max_pages: u32, max_cache: usize, max_len: usize, seed: u64) -> Vec<PagingInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let num_pages = rng.gen_range(2..=max_pages.max(2));
            let cache_size = rng.gen_range(1..=max_cache.min(num_pages as usize - 1).max(1));
            let len = rng.gen_range(1..=max_len.max(1));
            let requests = (0..len).map(|_| rng.gen_range(1..=num_pages)).collect();
            PagingInstance::new(num_pages, cache_size, requests).expect("valid by construction")
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct PagingProblem;

impl OnlineProblem for PagingProblem {
    type Instance = PagingInstance;
    type Request = Page;
    type Answer = PagingAnswer;

    fn validate(&self, _instance: &PagingInstance) -> Result<()> {
        Ok(())
    }

    fn len(&self, instance: &PagingInstance) -> usize {
        instance.len()
    }

    fn request(&self, instance: &PagingInstance, index: usize) -> Page {
        instance.requests[index]
    }

    /// Fault count.
    fn cost(&self, instance: &PagingInstance, output: &[PagingAnswer]) -> Result<f64> {
        Ok(PagingRun::replay(instance, output)?.fault_count as f64)
    }

    fn opt_cost(&self, instance: &PagingInstance) -> Result<f64> {
        Ok(belady(instance).fault_count as f64)
    }
}

/// The adviser for [`AdvisedPaging`].
pub fn paging_adviser(instance: &PagingInstance) -> BitString {
    paging_advice_bits(instance)
}

/// Keeps a flag per cached page, the advice bit of its latest request, and
/// on a full-cache fault evicts the smallest unflagged page (the smallest
/// page overall if every page is flagged).
#[derive(Debug, Clone)]
pub struct AdvisedPaging {
    channel: ChannelKind,
    cache_size: usize,
    advice: Option<Vec<bool>>,
    step: usize,
    /// page -> keep flag
    cache: std::collections::BTreeMap<Page, bool>,
}

pub fn alg_paging_with_advice(channel: ChannelKind, cache_size: usize) -> AdvisedPaging {
    AdvisedPaging {
        channel,
        cache_size,
        advice: None,
        step: 0,
        cache: Default::default(),
    }
}

impl OnlineAlgorithm<PagingProblem> for AdvisedPaging {
    fn name(&self) -> String {
        format!("paging-keep-bit-{}", self.channel)
    }

    fn kind(&self) -> AlgorithmKind {
        match self.channel {
            ChannelKind::ClassicalBits => AlgorithmKind::Deterministic,
            _ => AlgorithmKind::Quantum,
        }
    }

    fn resources(&self) -> Resources {
        Resources {
            classical_bits: 0,
            qubits: usize::from(self.channel == ChannelKind::PrivateQubits),
            random_bits: 0,
            advice: Some(self.channel),
        }
    }

    fn receive_advice(&mut self, advice: AdviceMessage, chance: &mut Chance<'_>) -> Result<()> {
        self.advice = Some(advice.into_bits(chance)?.into());
        Ok(())
    }

    fn step(&mut self, page: &Page, _chance: &mut Chance<'_>) -> Result<PagingAnswer> {
        let advice = self
            .advice
            .as_ref()
            .ok_or_else(|| Error::Protocol("no advice received".into()))?;
        let keep = *advice.get(self.step).ok_or_else(|| {
            Error::Protocol(format!("advice has {} bits but request {} arrived", advice.len(), self.step + 1))
        })?;
        self.step += 1;
        if let Some(flag) = self.cache.get_mut(page) {
            *flag = keep;
            return Ok(PagingAnswer::Hit);
        }
        let evicted = (self.cache.len() == self.cache_size).then(|| {
            let victim = self
                .cache
                .iter()
                .find(|(_, &flag)| !flag)
                .or_else(|| self.cache.iter().next())
                .map(|(&p, _)| p)
                .expect("full cache is non-empty");
            self.cache.remove(&victim);
            victim
        });
        self.cache.insert(*page, keep);
        Ok(PagingAnswer::Fault { evicted })
    }

    fn finish(&mut self) -> Result<()> {
        let len = self.advice.as_ref().map_or(0, Vec::len);
        if len != self.step {
            return Err(Error::Protocol(format!("advice has {len} bits for {} requests", self.step)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::run_exact;

    fn inst(n: u32, k: usize, reqs: &[Page]) -> PagingInstance {
        PagingInstance::new(n, k, reqs.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(PagingInstance::new(3, 3, vec![1]).is_err());
        assert!(PagingInstance::new(3, 2, vec![]).is_err());
        assert!(PagingInstance::new(3, 2, vec![4]).is_err());
        assert!(PagingInstance::new(3, 2, vec![0]).is_err());
        let parsed: PagingInstance = "3 2\n1 2 3 1 2\n".parse().unwrap();
        assert_eq!(parsed, inst(3, 2, &[1, 2, 3, 1, 2]));
        assert_eq!(parsed.to_string().parse::<PagingInstance>().unwrap(), parsed);
    }

    #[test]
    fn belady_examples() {
        let i = inst(3, 2, &[1, 2, 3, 1, 2]);
        let run = belady(&i);
        assert_eq!(run.fault_count, 4);
        assert_eq!(brute_force_min_faults(&i).unwrap(), 4);
        assert_eq!(belady(&inst(3, 2, &[1, 1, 1, 1])).fault_count, 1);
        let few = inst(5, 3, &[1, 2, 1, 3, 2, 1]);
        assert_eq!(belady(&few).fault_count, few.distinct_pages());
        assert_eq!(belady(&few).eviction_count, 0);
    }

    #[test]
    fn advice_examples() {
        assert_eq!(paging_advice_bits(&inst(2, 1, &[1, 1])).to_string(), "10");
        assert_eq!(paging_advice_bits(&inst(2, 1, &[1])).to_string(), "0");
        // Belady at step 3 evicts 2 (used after 1), so page 2's first request
        // does not survive; page 1 does.
        assert_eq!(paging_advice_bits(&inst(3, 2, &[1, 2, 3, 1, 2])).to_string(), "10000");
    }

    #[test]
    fn advised_algorithm_matches_belady() {
        for channel in [ChannelKind::ClassicalBits, ChannelKind::PrivateQubits, ChannelKind::SharedEpr] {
            let i = inst(3, 2, &[1, 2, 3, 1, 2]);
            let adviser = |x: &PagingInstance| paging_adviser(x);
            let dist = run_exact(&PagingProblem, &alg_paging_with_advice(channel, 2), &i, Some(&adviser)).unwrap();
            assert_eq!(dist.len(), 1);
            assert_eq!(dist.expected_cost(), 4.0);
            let transcript = dist.advice.unwrap();
            let expected_units = if channel == ChannelKind::SharedEpr { 3 } else { 5 };
            assert_eq!(transcript.advice_units(), expected_units);
        }
    }

    #[test]
    fn short_advice_is_a_protocol_error() {
        let i = inst(3, 2, &[1, 2, 3]);
        let adviser = |_: &PagingInstance| BitString::from(vec![true]);
        let err = run_exact(&PagingProblem, &alg_paging_with_advice(ChannelKind::ClassicalBits, 2), &i, Some(&adviser));
        assert!(matches!(err, Err(Error::Protocol(_))));
        let long = |_: &PagingInstance| BitString::from(vec![false; 4]);
        let err = run_exact(&PagingProblem, &alg_paging_with_advice(ChannelKind::ClassicalBits, 2), &i, Some(&long));
        assert!(matches!(err, Err(Error::Protocol(_))));
    }

    #[test]
    fn illegal_schedules_are_rejected() {
        let i = inst(3, 1, &[1, 2]);
        let bad = [PagingAnswer::Fault { evicted: None }, PagingAnswer::Fault { evicted: None }];
        assert!(PagingRun::replay(&i, &bad).is_err());
        let hit = [PagingAnswer::Hit, PagingAnswer::Hit];
        assert!(PagingRun::replay(&i, &hit).is_err());
    }
}
