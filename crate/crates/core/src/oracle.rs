//! Exhaustive optimal codes for small instances.
//!
//! A code with decoding error `eps` has a dominant set `D` of correctly
//! decoded symbols with `P(D^c) <= eps`. An optimal code gives every member
//! its own leaf and sends all non-members to one place: either a leaf of
//! their own or a member's leaf (any other routing is dominated). For each
//! admissible `D` the search therefore needs the cheapest prefix code on
//! `|D|` items plus one optional escape item carrying `P(D^c)`, where the
//! escape may share a leaf with one member.
//!
//! That minimum is computed exactly by dynamic programming over
//! (context, item subset). A node either is a leaf, or passes all of its
//! items to a single child, or splits them among at least two children.
//! Unary steps can cycle through contexts, so they are resolved per subset
//! by fixed-point relaxation; splits only refer to smaller subsets.
//! Nothing bounds word lengths, so the result is the optimum over all
//! prefix codes.

use rand::Rng;

use crate::bounds::{achievability_bound, converse_bound};
use crate::cost_model::{random_regular_table, CostFunction, CostTable, Symbol};
use crate::error::{Error, Result};
use crate::numeric::{log_base, CompensatedSum};
use crate::sfe_coder::{
    average_cost_rate, build_code_for, build_dominant_set, error_probability, DominantSet,
    DominantStrategy, Ordering,
};
use crate::smooth_entropy::FEASIBILITY_TOL;
use crate::source_model::{Distribution, IidSource};

/// Largest support the oracle accepts.
pub const ORACLE_MAX_SUPPORT: usize = 8;

/// Slack on each inequality of the sandwich check.
pub const SANDWICH_TOL: f64 = 1e-9;

/// Where non-members are sent by an optimal code.
#[derive(Debug, Clone, PartialEq)]
pub enum EscapeRoute {
    /// The dominant set is the whole support.
    None,
    /// A leaf used only by non-members.
    OwnWord(Vec<Symbol>),
    /// The codeword of this member.
    SharedWith(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimal_cost_rate: f64,
    /// Sorted support indices.
    pub optimal_dominant: Vec<usize>,
    /// `(member, codeword)` in member order.
    pub optimal_words: Vec<(usize, Vec<Symbol>)>,
    pub escape: EscapeRoute,
    /// Error probability of the optimal code.
    pub error: f64,
    pub max_word_cost: f64,
    pub nodes_explored: u64,
}

/// `(log_K(1/p_min) + log_K 2) / alpha + 3 c_max`, above the per-word cost
/// of the constructed codes.
pub fn default_cost_budget(d: &Distribution, cf: &CostFunction) -> f64 {
    let p_min = d.probs().iter().copied().fold(1.0, f64::min);
    let k = cf.k();
    (-log_base(p_min, k) + log_base(2.0, k)) / cf.alpha() + 3.0 * cf.c_max()
}

struct TreeDp<'a> {
    table: &'a CostTable,
    k: usize,
    contexts: usize,
    items: usize,
    /// Bit of the escape item, if present.
    escape_bit: Option<u32>,
    weight: Vec<f64>,
    next: Vec<Vec<usize>>,
    /// Cost of placing `mask` below a non-root node in a context.
    f: Vec<Vec<f64>>,
    /// Cheapest split of `mask` over at least two children.
    split: Vec<Vec<f64>>,
    /// `prefix[c][a][mask]`: cheapest assignment of `mask` to children `0..=a`.
    prefix: Vec<Vec<Vec<f64>>>,
    nodes: u64,
}

impl<'a> TreeDp<'a> {
    fn new(table: &'a CostTable, weights: &[f64], has_escape: bool) -> Self {
        let items = weights.len();
        let size = 1usize << items;
        let mut weight = vec![0.0; size];
        for (mask, w) in weight.iter_mut().enumerate().skip(1) {
            *w = (0..items)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| weights[i])
                .collect::<CompensatedSum>()
                .value();
        }
        let contexts = table.num_contexts();
        let k = table.k();
        let next = (0..contexts)
            .map(|c| {
                (1..=k as Symbol)
                    .map(|y| table.next_context(c, y))
                    .collect()
            })
            .collect();
        Self {
            table,
            k,
            contexts,
            items,
            escape_bit: has_escape.then_some(items as u32 - 1),
            weight,
            next,
            f: vec![vec![0.0; size]; contexts],
            split: vec![vec![f64::INFINITY; size]; contexts],
            prefix: vec![vec![vec![0.0; size]; k]; contexts],
            nodes: 0,
        }
    }

    fn is_leaf(&self, mask: usize) -> bool {
        match mask.count_ones() {
            1 => true,
            2 => self.escape_bit.is_some_and(|b| mask >> b & 1 == 1),
            _ => false,
        }
    }

    #[inline]
    fn cost(&self, c: usize, a: usize) -> f64 {
        self.table.row(c)[a]
    }

    /// Cost of sending `mask` through child `a` of a node in context `c`.
    #[inline]
    fn child(&self, c: usize, a: usize, mask: usize) -> f64 {
        if mask == 0 {
            0.0
        } else {
            self.weight[mask] * self.cost(c, a) + self.f[self.next[c][a]][mask]
        }
    }

    fn solve(&mut self) -> f64 {
        let size = 1usize << self.items;
        let mut parts = vec![vec![f64::INFINITY; self.k]; self.contexts];
        for mask in 1..size {
            for (c, part) in parts.iter_mut().enumerate() {
                for (a, slot) in part.iter_mut().enumerate().skip(1) {
                    let mut best = f64::INFINITY;
                    let mut t = (mask - 1) & mask;
                    while t > 0 {
                        self.nodes += 1;
                        let v = self.prefix[c][a - 1][mask ^ t] + self.child(c, a, t);
                        if v < best {
                            best = v;
                        }
                        t = (t - 1) & mask;
                    }
                    *slot = best;
                }
                self.split[c][mask] = part[1..].iter().copied().fold(f64::INFINITY, f64::min);
            }
            if self.is_leaf(mask) {
                for c in 0..self.contexts {
                    self.f[c][mask] = 0.0;
                }
            } else {
                for c in 0..self.contexts {
                    self.f[c][mask] = self.split[c][mask];
                }
                // Unary chains: costs are positive, so relaxation settles
                // after at most one pass per context.
                for _ in 0..=self.contexts {
                    let mut changed = false;
                    for c in 0..self.contexts {
                        for a in 0..self.k {
                            let v = self.child(c, a, mask);
                            if v < self.f[c][mask] {
                                self.f[c][mask] = v;
                                changed = true;
                            }
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
            for (c, part) in parts.iter().enumerate() {
                self.prefix[c][0][mask] = self.child(c, 0, mask);
                for (a, &split_a) in part.iter().enumerate().skip(1) {
                    self.prefix[c][a][mask] = self.prefix[c][a - 1][mask]
                        .min(self.child(c, a, mask))
                        .min(split_a);
                }
            }
        }
        // Words are non-empty, so the root never is a leaf.
        self.prefix[0][self.k - 1][size - 1]
    }

    /// Assigns words to the items of `mask` placed below `word`.
    fn place(&self, c: usize, mask: usize, word: &mut Vec<Symbol>, out: &mut [Vec<Symbol>]) {
        if self.is_leaf(mask) {
            for (i, slot) in out.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *slot = word.clone();
                }
            }
            return;
        }
        let target = self.f[c][mask];
        if target != self.split[c][mask] {
            for a in 0..self.k {
                if self.child(c, a, mask) == target {
                    self.descend(c, a, mask, word, out);
                    return;
                }
            }
            unreachable!("unary step reproduces the stored value");
        }
        for a in (1..self.k).rev() {
            let mut t = (mask - 1) & mask;
            while t > 0 {
                if self.prefix[c][a - 1][mask ^ t] + self.child(c, a, t) == target {
                    self.descend(c, a, t, word, out);
                    self.distribute(c, a - 1, mask ^ t, word, out);
                    return;
                }
                t = (t - 1) & mask;
            }
        }
        unreachable!("split reproduces the stored value");
    }

    /// Spreads `mask` over children `0..=a` of a node in context `c`.
    fn distribute(
        &self,
        c: usize,
        a: usize,
        mask: usize,
        word: &mut Vec<Symbol>,
        out: &mut [Vec<Symbol>],
    ) {
        if mask == 0 {
            return;
        }
        let target = self.prefix[c][a][mask];
        if a == 0 {
            self.descend(c, 0, mask, word, out);
            return;
        }
        if self.prefix[c][a - 1][mask] == target {
            self.distribute(c, a - 1, mask, word, out);
            return;
        }
        if self.child(c, a, mask) == target {
            self.descend(c, a, mask, word, out);
            return;
        }
        let mut t = (mask - 1) & mask;
        while t > 0 {
            if self.prefix[c][a - 1][mask ^ t] + self.child(c, a, t) == target {
                self.descend(c, a, t, word, out);
                self.distribute(c, a - 1, mask ^ t, word, out);
                return;
            }
            t = (t - 1) & mask;
        }
        unreachable!("prefix value reproduces the stored value");
    }

    fn descend(
        &self,
        c: usize,
        a: usize,
        mask: usize,
        word: &mut Vec<Symbol>,
        out: &mut [Vec<Symbol>],
    ) {
        word.push(a as Symbol + 1);
        self.place(self.next[c][a], mask, word, out);
        word.pop();
    }

    fn words(&self) -> Vec<Vec<Symbol>> {
        let mut out = vec![Vec::new(); self.items];
        let full = (1usize << self.items) - 1;
        self.distribute(0, self.k - 1, full, &mut Vec::new(), &mut out);
        out
    }
}

/// Cheapest prefix code for the block distribution `d` with error at most
/// `epsilon`, as an average cost per source symbol of an `n`-block.
pub fn optimal_code_exhaustive(
    d: &Distribution,
    cf: &CostFunction,
    epsilon: f64,
    n: usize,
) -> Result<OracleResult> {
    if d.len() > ORACLE_MAX_SUPPORT {
        return Err(Error::Infeasible(format!(
            "support of {} exceeds the oracle limit {ORACLE_MAX_SUPPORT}",
            d.len()
        )));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    let mut best: Option<(f64, DominantSet, Vec<Vec<Symbol>>)> = None;
    let mut nodes = 0;
    for subset in 1u32..(1 << d.len()) {
        let members: Vec<usize> = (0..d.len()).filter(|&i| subset >> i & 1 == 1).collect();
        let ds = DominantSet::from_members(d, &members)?;
        if ds.complement_mass() > epsilon + FEASIBILITY_TOL {
            continue;
        }
        let has_escape = ds.complement_mass() > 0.0;
        let mut weights: Vec<f64> = members.iter().map(|&i| d.prob(i)).collect();
        if has_escape {
            weights.push(ds.complement_mass());
        }
        let mut dp = TreeDp::new(cf.table(), &weights, has_escape);
        let value = dp.solve();
        nodes += dp.nodes;
        // Ties keep the earliest subset in this enumeration order.
        if best.as_ref().is_none_or(|(v, _, _)| value < *v - 1e-12) {
            best = Some((value, ds, dp.words()));
        }
    }
    let (value, ds, words) = best.expect("the full support is always admissible");
    let m = ds.len();
    let optimal_words: Vec<(usize, Vec<Symbol>)> = ds
        .members()
        .iter()
        .copied()
        .zip(words.iter().cloned())
        .collect();
    let escape = if m == words.len() {
        EscapeRoute::None
    } else {
        let esc = &words[m];
        match optimal_words.iter().find(|(_, w)| w == esc) {
            Some(&(member, _)) => EscapeRoute::SharedWith(member),
            None => EscapeRoute::OwnWord(esc.clone()),
        }
    };
    let mut max_word_cost: f64 = 0.0;
    for w in &words {
        max_word_cost = max_word_cost.max(cf.cost_of_word(w)?);
    }
    Ok(OracleResult {
        optimal_cost_rate: value / n as f64,
        optimal_dominant: ds.members().to_vec(),
        optimal_words,
        escape,
        error: ds.complement_mass(),
        max_word_cost,
        nodes_explored: nodes,
    })
}

/// The four rates of the sandwich check.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    /// Converse at the error the optimal code actually attains.
    pub converse: f64,
    pub oracle: f64,
    pub sfe: f64,
    pub achievability: f64,
    pub oracle_error: f64,
    pub sfe_error: f64,
    pub holds: bool,
}

/// `converse <= optimum <= constructed code <= achievability` on one
/// instance. The constructed code uses the `G`-optimal dominant set.
pub fn check_sandwich(
    d: &Distribution,
    cf: &CostFunction,
    epsilon: f64,
    gamma: f64,
    n: usize,
) -> Result<SandwichReport> {
    let opt = optimal_code_exhaustive(d, cf, epsilon, n)?;
    let converse = converse_bound(d, cf, opt.error.min(epsilon), n)?;
    let ds = build_dominant_set(d, epsilon, DominantStrategy::GOptimal)?;
    let cb = build_code_for(d, cf, ds, Ordering::Canonical)?;
    let sfe = average_cost_rate(&cb, d, n)?;
    let achievability = achievability_bound(d, cf, epsilon, n, gamma)?;
    let oracle = opt.optimal_cost_rate;
    Ok(SandwichReport {
        holds: converse <= oracle + SANDWICH_TOL
            && oracle <= sfe + SANDWICH_TOL
            && sfe <= achievability + SANDWICH_TOL,
        converse,
        oracle,
        sfe,
        achievability,
        oracle_error: opt.error,
        sfe_error: error_probability(&cb),
    })
}

/// A seeded small instance for the sandwich check.
#[derive(Debug, Clone)]
pub struct SandwichInstance {
    pub distribution: Distribution,
    pub cost: CostFunction,
    pub epsilon: f64,
    pub n: usize,
}

/// Support of at most six blocks, K in {2, 3}, context depth 0 or 1 and
/// epsilon in {0, 0.1, 0.3}. A third of the instances are pairs of iid
/// binary letters.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> Result<SandwichInstance> {
    let k = rng.gen_range(2..=3);
    let depth = rng.gen_range(0..=1);
    let alpha = rng.gen_range(0.5..1.5);
    let cost = random_regular_table(rng, k, depth, alpha)?.solve_default()?;
    let epsilon = [0.0, 0.1, 0.3][rng.gen_range(0..3)];
    let weights = |rng: &mut R, m: usize| -> Vec<f64> {
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
        let t: f64 = w.iter().sum();
        w.into_iter().map(|x| x / t).collect()
    };
    let (distribution, n) = if rng.gen_bool(1.0 / 3.0) {
        let letter = Distribution::from_probs(&weights(rng, 2), k)?;
        (IidSource::new(letter).block_distribution(2, 6)?, 2)
    } else {
        let m = rng.gen_range(1..=6);
        (Distribution::from_probs(&weights(rng, m), k)?, 1)
    };
    Ok(SandwichInstance {
        distribution,
        cost,
        epsilon,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::CostTable;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    fn unit(k: usize) -> CostFunction {
        CostFunction::uniform(k).unwrap()
    }

    /// K-ary Huffman average length, padded with zero-weight leaves.
    fn huffman_average(probs: &[f64], k: usize) -> f64 {
        if probs.len() == 1 {
            return 1.0;
        }
        // integer weights keep the heap ordering exact
        let scale = 1e12;
        let mut heap: BinaryHeap<Reverse<u64>> = probs
            .iter()
            .map(|&p| Reverse((p * scale).round() as u64))
            .collect();
        while !(heap.len() - 1).is_multiple_of(k - 1) {
            heap.push(Reverse(0));
        }
        let mut total = 0u64;
        while heap.len() > 1 {
            let merged: u64 = (0..k).map(|_| heap.pop().unwrap().0).sum();
            total += merged;
            heap.push(Reverse(merged));
        }
        total as f64 / scale
    }

    fn prefix_free(words: &[Vec<Symbol>]) -> bool {
        let mut w: Vec<&Vec<Symbol>> = words.iter().collect();
        w.sort();
        w.dedup();
        w.windows(2).all(|p| !p[1].starts_with(p[0]))
    }

    #[test]
    fn uniform_four_needs_two_symbols_each() {
        let u4 = Distribution::uniform(4, 2).unwrap();
        let r = optimal_code_exhaustive(&u4, &unit(2), 0.0, 1).unwrap();
        assert!((r.optimal_cost_rate - 2.0).abs() < 1e-12);
        assert_eq!(r.escape, EscapeRoute::None);
        assert!(r.optimal_words.iter().all(|(_, w)| w.len() == 2));
        let r = optimal_code_exhaustive(&u4, &unit(2), 0.25, 1).unwrap();
        assert!((r.optimal_cost_rate - 1.5).abs() < 1e-12);
        assert_eq!(r.error, 0.25);
    }

    #[test]
    fn point_mass_uses_one_symbol() {
        let d = Distribution::from_probs(&[1.0], 2).unwrap();
        let r = optimal_code_exhaustive(&d, &unit(2), 0.0, 1).unwrap();
        assert_eq!(r.optimal_cost_rate, 1.0);
        assert_eq!(r.optimal_words[0].1.len(), 1);
    }

    #[test]
    fn three_symbol_golden_value() {
        let d = Distribution::from_probs(&[0.5, 0.3, 0.2], 2).unwrap();
        let r = optimal_code_exhaustive(&d, &unit(2), 0.2, 1).unwrap();
        // {0.5, 0.3} with the 0.2 mass escaping: one symbol each
        assert!((r.optimal_cost_rate - 1.0).abs() < 1e-12);
        assert_eq!(r.optimal_dominant, vec![0, 1]);
        assert!(matches!(r.escape, EscapeRoute::SharedWith(_)));
    }

    #[test]
    fn chains_can_pay_under_context_costs() {
        // Symbol 2 is dear at the root, everything is cheap after a 1.
        let table =
            CostTable::from_rows(2, 1, vec![vec![0.1, 10.0], vec![0.1, 0.1], vec![1.0, 1.0]])
                .unwrap();
        let mut dp = TreeDp::new(&table, &[0.5, 0.5], false);
        // {11, 12} costs 0.2 against 5.05 for {1, 2}
        assert!((dp.solve() - 0.2).abs() < 1e-12);
        assert_eq!(dp.words(), vec![vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn sandwich_examples() {
        let u4 = Distribution::uniform(4, 2).unwrap();
        let r = check_sandwich(&u4, &unit(2), 0.0, 0.01, 1).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.converse - 2.0).abs() < 1e-12 && (r.achievability - 5.01).abs() < 1e-12);
        let point = Distribution::from_probs(&[1.0], 2).unwrap();
        let r = check_sandwich(&point, &unit(2), 0.0, 0.01, 1).unwrap();
        assert!(r.holds);
        assert_eq!((r.converse, r.oracle), (0.0, 1.0));
        assert!((r.achievability - 3.01).abs() < 1e-12);
    }

    #[test]
    fn budget_covers_oracle_words() {
        let d = Distribution::from_probs(&[0.4, 0.3, 0.2, 0.1], 2).unwrap();
        let cf = CostFunction::golden();
        let r = optimal_code_exhaustive(&d, &cf, 0.0, 1).unwrap();
        assert!(r.max_word_cost <= default_cost_budget(&d, &cf));
        assert!(r.nodes_explored > 0);
    }

    #[test]
    fn rejects_large_support() {
        let d = Distribution::uniform(9, 2).unwrap();
        assert!(matches!(
            optimal_code_exhaustive(&d, &unit(2), 0.0, 1),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn seeded_sandwich_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let inst = random_instance(&mut rng).unwrap();
            assert!(inst.distribution.len() <= 6);
            let r =
                check_sandwich(&inst.distribution, &inst.cost, inst.epsilon, 0.01, inst.n).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    /// Cheapest code over words of length at most four, by enumeration.
    struct Enumeration {
        words: Vec<Vec<Symbol>>,
        cost: Vec<f64>,
        probs: Vec<f64>,
        escape: f64,
        best: f64,
    }

    impl Enumeration {
        fn new(cf: &CostFunction, probs: &[f64], escape: f64) -> Self {
            let words: Vec<Vec<Symbol>> = (1..=4)
                .flat_map(|l| crate::cost_model::all_words(2, l))
                .collect();
            let cost = words.iter().map(|w| cf.cost_of_word(w).unwrap()).collect();
            Self {
                words,
                cost,
                probs: probs.to_vec(),
                escape,
                best: f64::INFINITY,
            }
        }

        fn compatible(&self, a: usize, b: usize) -> bool {
            let (a, b) = (&self.words[a], &self.words[b]);
            !a.starts_with(b) && !b.starts_with(a)
        }

        fn run(mut self) -> f64 {
            let mut pick = Vec::new();
            self.extend(&mut pick);
            self.best
        }

        fn extend(&mut self, pick: &mut Vec<usize>) {
            if pick.len() == self.probs.len() {
                let base: f64 = pick
                    .iter()
                    .zip(&self.probs)
                    .map(|(&w, p)| p * self.cost[w])
                    .sum();
                let mut esc = pick
                    .iter()
                    .map(|&w| self.cost[w])
                    .fold(f64::INFINITY, f64::min);
                for w in 0..self.words.len() {
                    if pick.iter().all(|&j| self.compatible(w, j)) {
                        esc = esc.min(self.cost[w]);
                    }
                }
                let total = if self.escape > 0.0 {
                    base + self.escape * esc
                } else {
                    base
                };
                self.best = self.best.min(total);
                return;
            }
            for w in 0..self.words.len() {
                if pick.iter().all(|&j| self.compatible(w, j)) {
                    pick.push(w);
                    self.extend(pick);
                    pick.pop();
                }
            }
        }
    }

    #[test]
    fn dp_matches_enumeration_under_context_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..12 {
            let cf = random_regular_table(&mut rng, 2, 1, 1.0)
                .unwrap()
                .solve_default()
                .unwrap();
            let m = 1 + trial % 3;
            let raw: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.05..1.0)).collect();
            let t: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / t).collect();
            let escape = if trial % 2 == 0 { w[m] } else { 0.0 };
            let members = &w[..m];
            let mut weights = members.to_vec();
            if escape > 0.0 {
                weights.push(escape);
            }
            let mut dp = TreeDp::new(cf.table(), &weights, escape > 0.0);
            let v = dp.solve();
            let e = Enumeration::new(&cf, members, escape).run();
            assert!(
                v <= e + 1e-12,
                "trial {trial}: dp {v} above enumeration {e}"
            );
            if dp.words().iter().all(|w| w.len() <= 4) {
                assert!((v - e).abs() < 1e-12, "trial {trial}: dp {v} vs {e}");
            }
        }
    }

    fn arb_probs(max: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1u32..30, 1..=max).prop_map(|w| {
            let t: u32 = w.iter().sum();
            w.iter().map(|&x| x as f64 / t as f64).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_huffman_without_errors(probs in arb_probs(7), k in 2usize..=3) {
            let d = Distribution::from_probs(&probs, k).unwrap();
            let r = optimal_code_exhaustive(&d, &unit(k), 0.0, 1).unwrap();
            prop_assert!((r.optimal_cost_rate - huffman_average(d.probs(), k)).abs() < 1e-9);
            let words: Vec<_> = r.optimal_words.iter().map(|(_, w)| w.clone()).collect();
            prop_assert!(prefix_free(&words));
        }

        #[test]
        fn invariant_under_relabeling(probs in arb_probs(6), seed in any::<u64>(), eps in 0.0f64..0.4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cf = random_regular_table(&mut rng, 2, 1, 1.0).unwrap().solve_default().unwrap();
            let d = Distribution::from_probs(&probs, 2).unwrap();
            let mut rev = d.probs().to_vec();
            rev.reverse();
            let dr = Distribution::from_probs(&rev, 2).unwrap();
            let a = optimal_code_exhaustive(&d, &cf, eps, 1).unwrap();
            let b = optimal_code_exhaustive(&dr, &cf, eps, 1).unwrap();
            prop_assert!((a.optimal_cost_rate - b.optimal_cost_rate).abs() < 1e-9);
        }

        #[test]
        fn nonincreasing_in_epsilon(probs in arb_probs(6), e1 in 0.0f64..0.6, e2 in 0.0f64..0.6) {
            let d = Distribution::from_probs(&probs, 2).unwrap();
            let cf = CostFunction::golden();
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a = optimal_code_exhaustive(&d, &cf, lo, 1).unwrap();
            let b = optimal_code_exhaustive(&d, &cf, hi, 1).unwrap();
            prop_assert!(b.optimal_cost_rate <= a.optimal_cost_rate + 1e-12);
            prop_assert!(a.error <= lo + 1e-12);
        }
    }
}
