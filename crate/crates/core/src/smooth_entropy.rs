//! Smooth entropies of a finite distribution.
//!
//! For `delta` in `[0, 1)` both quantities minimize over subsets `A` of the
//! support with `P(A) >= 1 - delta`:
//!
//! * `H_[delta] = min sum_{z in A} P(z) log_K 1/P(z)`
//! * `G_[delta] = min sum_{z in A} P(z) log_K P(A)/P(z)`, which equals the
//!   `H` objective plus `P(A) log_K P(A)`.
//!
//! The minimizing set is a covering-knapsack optimum, not a probability-sorted
//! prefix, so two exact solvers are provided (exhaustive enumeration and a
//! branch-and-bound over classes of equal-probability symbols) together with
//! a greedy upper bound.
//!
//! Ties between optimal sets are resolved identically by every exact solver:
//! among sets whose recomputed objective is within [`TIE_TOL`] of the
//! optimum, the lexicographically smallest sorted index list wins.

use crate::cost_model::CostFunction;
use crate::error::{Error, Result};
use crate::numeric::{entropy_term, log_base, mass_log_mass, CompensatedSum};
use crate::source_model::{Distribution, IidSource, DEFAULT_MAX_SUPPORT};

/// Largest support handled by exhaustive enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 22;

/// Slack on the mass constraint `P(A) >= 1 - delta`.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Objective values closer than this are treated as ties.
pub const TIE_TOL: f64 = 1e-12;

/// Node limit for the type-class search.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Normalized-set smooth entropy `G_[delta]`.
    G,
    /// Plain smooth entropy `H_[delta]`.
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    BruteForce,
    TypeClassBnb,
    Greedy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::BruteForce => "brute_force",
            Method::TypeClassBnb => "type_class_bnb",
            Method::Greedy => "greedy",
        }
    }
}

/// Which exact solver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodHint {
    /// Enumeration up to [`BRUTE_FORCE_LIMIT`] symbols, type classes beyond.
    #[default]
    Auto,
    BruteForce,
    TypeClassBnb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothEntropyResult {
    pub quantity: Quantity,
    pub delta: f64,
    pub value: f64,
    /// Sorted support indices of the minimizing set.
    pub achieving_set: Vec<usize>,
    pub set_mass: f64,
    pub method: Method,
}

/// The mass constraint shared by every solver.
#[inline]
pub fn meets_mass(mass: f64, delta: f64) -> bool {
    mass >= 1.0 - delta - FEASIBILITY_TOL
}

/// Objective of `set` (sorted support indices), summed in index order.
pub fn objective(d: &Distribution, set: &[usize], quantity: Quantity) -> f64 {
    let (h, m) = sums_of(d, set);
    match quantity {
        Quantity::H => h,
        Quantity::G => h + mass_log_mass(m, d.base()),
    }
}

fn sums_of(d: &Distribution, set: &[usize]) -> (f64, f64) {
    let mut h = CompensatedSum::new();
    let mut m = CompensatedSum::new();
    for &i in set {
        h.add(entropy_term(d.prob(i), d.base()));
        m.add(d.prob(i));
    }
    (h.value(), m.value())
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("delta {delta} outside [0, 1)")))
    }
}

pub fn h_delta_exact(
    d: &Distribution,
    delta: f64,
    hint: MethodHint,
) -> Result<SmoothEntropyResult> {
    smooth_entropy_exact(d, delta, Quantity::H, hint)
}

pub fn g_delta_exact(
    d: &Distribution,
    delta: f64,
    hint: MethodHint,
) -> Result<SmoothEntropyResult> {
    smooth_entropy_exact(d, delta, Quantity::G, hint)
}

/// Exact `G_[delta]` or `H_[delta]`.
pub fn smooth_entropy_exact(
    d: &Distribution,
    delta: f64,
    quantity: Quantity,
    hint: MethodHint,
) -> Result<SmoothEntropyResult> {
    smooth_entropy_exact_with_budget(d, delta, quantity, hint, DEFAULT_NODE_BUDGET)
}

pub fn smooth_entropy_exact_with_budget(
    d: &Distribution,
    delta: f64,
    quantity: Quantity,
    hint: MethodHint,
    node_budget: u64,
) -> Result<SmoothEntropyResult> {
    check_delta(delta)?;
    let use_brute = match hint {
        MethodHint::Auto => d.len() <= BRUTE_FORCE_LIMIT,
        MethodHint::BruteForce => {
            if d.len() > BRUTE_FORCE_LIMIT {
                return Err(Error::ExactnessUnavailable(format!(
                    "support of {} exceeds the enumeration limit {BRUTE_FORCE_LIMIT}",
                    d.len()
                )));
            }
            true
        }
        MethodHint::TypeClassBnb => false,
    };
    let (set, method) = if use_brute {
        (brute_force(d, delta, quantity), Method::BruteForce)
    } else {
        (
            TypeClassSearch::new(d, delta, quantity, node_budget).run()?,
            Method::TypeClassBnb,
        )
    };
    Ok(finish(d, delta, quantity, set, method))
}

fn finish(
    d: &Distribution,
    delta: f64,
    quantity: Quantity,
    set: Vec<usize>,
    method: Method,
) -> SmoothEntropyResult {
    SmoothEntropyResult {
        quantity,
        delta,
        value: objective(d, &set, quantity),
        set_mass: d.mass_of(&set),
        achieving_set: set,
        method,
    }
}

/// Lexicographically smallest set among `candidates` whose objective is
/// within [`TIE_TOL`] of the best.
fn select_canonical(
    d: &Distribution,
    quantity: Quantity,
    candidates: Vec<Vec<usize>>,
) -> Option<Vec<usize>> {
    let scored: Vec<(f64, Vec<usize>)> = candidates
        .into_iter()
        .map(|s| (objective(d, &s, quantity), s))
        .collect();
    let best = scored.iter().map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
    scored
        .into_iter()
        .filter(|(v, _)| *v <= best + TIE_TOL)
        .map(|(_, s)| s)
        .min()
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

struct Enumerator<'a, F: FnMut(&[usize], f64)> {
    probs: &'a [f64],
    base: usize,
    suffix_mass: Vec<f64>,
    need: f64,
    quantity: Quantity,
    stack: Vec<usize>,
    visit: F,
}

impl<F: FnMut(&[usize], f64)> Enumerator<'_, F> {
    fn walk(&mut self, i: usize, h: CompensatedSum, m: CompensatedSum) {
        if m.value() + self.suffix_mass[i] < self.need {
            return;
        }
        if i == self.probs.len() {
            let value = match self.quantity {
                Quantity::H => h.value(),
                Quantity::G => h.value() + mass_log_mass(m.value(), self.base),
            };
            (self.visit)(&self.stack, value);
            return;
        }
        let p = self.probs[i];
        self.stack.push(i);
        self.walk(i + 1, h.with(entropy_term(p, self.base)), m.with(p));
        self.stack.pop();
        self.walk(i + 1, h, m);
    }
}

fn enumerate_feasible<F: FnMut(&[usize], f64)>(
    d: &Distribution,
    delta: f64,
    quantity: Quantity,
    visit: F,
) {
    let probs = d.probs();
    let mut suffix_mass = vec![0.0; probs.len() + 1];
    for i in (0..probs.len()).rev() {
        suffix_mass[i] = suffix_mass[i + 1] + probs[i];
    }
    // A small allowance keeps rounding in the suffix sums from pruning sets
    // that pass `meets_mass`; the leaf re-checks exactly.
    let need = 1.0 - delta - FEASIBILITY_TOL - 1e-12;
    let mut e = Enumerator {
        probs,
        base: d.base(),
        suffix_mass,
        need,
        quantity,
        stack: Vec::new(),
        visit,
    };
    e.walk(0, CompensatedSum::new(), CompensatedSum::new());
}

fn brute_force(d: &Distribution, delta: f64, quantity: Quantity) -> Vec<usize> {
    let mut best = f64::INFINITY;
    enumerate_feasible(d, delta, quantity, |set, value| {
        if meets_mass(d.mass_of(set), delta) && value < best {
            best = value;
        }
    });
    let mut chosen: Option<Vec<usize>> = None;
    enumerate_feasible(d, delta, quantity, |set, value| {
        if value <= best + TIE_TOL
            && meets_mass(d.mass_of(set), delta)
            && chosen.as_deref().is_none_or(|c| set < c)
        {
            chosen = Some(set.to_vec());
        }
    });
    chosen.expect("the full support is always feasible")
}

// ---------------------------------------------------------------------------
// Branch and bound over equal-probability classes

#[derive(Debug, Clone)]
struct ProbClass {
    p: f64,
    /// Per-unit-mass cost `log_K 1/p`.
    rate: f64,
    unit_h: f64,
    members: Vec<usize>,
}

/// Groups support indices by exactly equal probability, largest first.
fn probability_classes(d: &Distribution) -> Vec<ProbClass> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d.prob(b).total_cmp(&d.prob(a)).then(a.cmp(&b)));
    let mut classes: Vec<ProbClass> = Vec::new();
    for i in order {
        let p = d.prob(i);
        match classes.last_mut() {
            Some(c) if c.p == p => c.members.push(i),
            _ => classes.push(ProbClass {
                p,
                rate: -log_base(p, d.base()),
                unit_h: entropy_term(p, d.base()),
                members: vec![i],
            }),
        }
    }
    classes
}

struct TypeClassSearch {
    classes: Vec<ProbClass>,
    base: usize,
    quantity: Quantity,
    need: f64,
    delta: f64,
    suffix_mass: Vec<f64>,
    counts: Vec<usize>,
    nodes: u64,
    budget: u64,
    best: f64,
    /// Collection threshold in the second pass; `None` during the first.
    threshold: Option<f64>,
    candidates: Vec<Vec<usize>>,
    distribution: Distribution,
}

impl TypeClassSearch {
    fn new(d: &Distribution, delta: f64, quantity: Quantity, budget: u64) -> Self {
        let classes = probability_classes(d);
        let mut suffix_mass = vec![0.0; classes.len() + 1];
        for j in (0..classes.len()).rev() {
            suffix_mass[j] = suffix_mass[j + 1] + classes[j].p * classes[j].members.len() as f64;
        }
        Self {
            counts: vec![0; classes.len()],
            classes,
            base: d.base(),
            quantity,
            need: 1.0 - delta - FEASIBILITY_TOL,
            delta,
            suffix_mass,
            nodes: 0,
            budget,
            best: f64::INFINITY,
            threshold: None,
            candidates: Vec::new(),
            distribution: d.clone(),
        }
    }

    fn run(mut self) -> Result<Vec<usize>> {
        self.descend(0, CompensatedSum::new(), CompensatedSum::new())?;
        if !self.best.is_finite() {
            // Rounding between class sums and index-order sums left nothing;
            // the full support is always feasible.
            return Ok((0..self.distribution.len()).collect());
        }
        self.threshold = Some(self.best + 2.0 * TIE_TOL);
        self.descend(0, CompensatedSum::new(), CompensatedSum::new())?;
        let d = &self.distribution;
        let delta = self.delta;
        let feasible: Vec<Vec<usize>> = std::mem::take(&mut self.candidates)
            .into_iter()
            .filter(|s| meets_mass(d.mass_of(s), delta))
            .collect();
        let fallback = (0..d.len()).collect();
        Ok(select_canonical(d, self.quantity, feasible).unwrap_or(fallback))
    }

    fn limit(&self) -> f64 {
        self.threshold.unwrap_or(self.best + TIE_TOL)
    }

    fn complete(&mut self, h: f64, m: f64) {
        let value = match self.quantity {
            Quantity::H => h,
            Quantity::G => h + mass_log_mass(m, self.base),
        };
        match self.threshold {
            None => {
                if value < self.best {
                    self.best = value;
                }
            }
            Some(t) => {
                if value <= t {
                    let mut set: Vec<usize> = self
                        .classes
                        .iter()
                        .zip(&self.counts)
                        .flat_map(|(c, &k)| c.members[..k].iter().copied())
                        .collect();
                    set.sort_unstable();
                    self.candidates.push(set);
                }
            }
        }
    }

    fn descend(&mut self, j: usize, h: CompensatedSum, m: CompensatedSum) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ExactnessUnavailable(format!(
                "type-class search exceeded {} nodes",
                self.budget
            )));
        }
        // Both objectives strictly increase when symbols are added, so a
        // feasible node is a leaf.
        if m.value() >= self.need {
            self.complete(h.value(), m.value());
            return Ok(());
        }
        if j == self.classes.len() || m.value() + self.suffix_mass[j] < self.need {
            return Ok(());
        }
        let p = self.classes[j].p;
        let unit_h = self.classes[j].unit_h;
        let size = self.classes[j].members.len();
        let missing = self.need - m.value();
        let to_cover = ((missing / p).ceil().max(0.0) as usize).min(size);
        for k in (0..=to_cover).rev() {
            let mk = m.with(k as f64 * p);
            if mk.value() + self.suffix_mass[j + 1] < self.need {
                break;
            }
            let hk = h.with(k as f64 * unit_h);
            let bound = self.lower_bound(j + 1, hk.value(), mk.value());
            if bound > self.limit() {
                if self.quantity == Quantity::H && mk.value() < self.need {
                    // Below the cover count the H bound grows as k drops.
                    break;
                }
                continue;
            }
            self.counts[j] = k;
            self.descend(j + 1, hk, mk)?;
            self.counts[j] = 0;
        }
        Ok(())
    }

    /// Fractional fill cost of `amount` mass from classes `from..`.
    fn fill_cost(&self, from: usize, amount: f64) -> f64 {
        let mut left = amount;
        let mut cost = 0.0;
        for c in &self.classes[from..] {
            if left <= 0.0 {
                break;
            }
            let cap = c.p * c.members.len() as f64;
            let take = cap.min(left);
            cost += take * c.rate;
            left -= take;
        }
        cost
    }

    /// Lower bound on the objective of every completion of a node whose
    /// classes `..from` are fixed with partial sums `h`, `m`.
    fn lower_bound(&self, from: usize, h: f64, m: f64) -> f64 {
        if m >= self.need {
            return match self.quantity {
                Quantity::H => h,
                Quantity::G => h + mass_log_mass(m, self.base),
            };
        }
        match self.quantity {
            Quantity::H => h + self.fill_cost(from, self.need - m),
            Quantity::G => self.g_bound(from, h, m),
        }
    }

    /// `min_M [h + fill(M - m) + M log M]` over masses a minimal completion
    /// can reach. The fill cost is convex piecewise linear and `M log M` is
    /// convex, so the minimum sits at a segment end or a clamped stationary
    /// point.
    fn g_bound(&self, from: usize, h: f64, m: f64) -> f64 {
        // A set none of whose members can be dropped has mass below
        // need + (largest probability).
        let p_max = self.classes.first().map_or(0.0, |c| c.p);
        let lo = self.need;
        let hi = (m + self.suffix_mass[from]).min(self.need + p_max);
        if hi < lo {
            return f64::INFINITY;
        }
        let ln_k = (self.base as f64).ln();
        let eval = |mass: f64, base_cost: f64| base_cost + mass_log_mass(mass, self.base);
        let mut best = f64::INFINITY;
        let mut seg_start = m;
        let mut cost_at_start = h;
        for c in &self.classes[from..] {
            let cap = c.p * c.members.len() as f64;
            let seg_end = seg_start + cap;
            let a = seg_start.max(lo);
            let b = seg_end.min(hi);
            if a <= b {
                let cost_at = |x: f64| cost_at_start + (x - seg_start) * c.rate;
                best = best.min(eval(a, cost_at(a))).min(eval(b, cost_at(b)));
                // d/dM [rate * M + M log_K M] = rate + log_K M + 1/ln K
                let stationary = (-c.rate * ln_k - 1.0).exp();
                if stationary > a && stationary < b {
                    best = best.min(eval(stationary, cost_at(stationary)));
                }
            }
            if seg_end >= hi {
                break;
            }
            cost_at_start += cap * c.rate;
            seg_start = seg_end;
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Greedy upper bound

pub fn h_delta_greedy(d: &Distribution, delta: f64) -> Result<SmoothEntropyResult> {
    smooth_entropy_greedy(d, delta, Quantity::H)
}

pub fn g_delta_greedy(d: &Distribution, delta: f64) -> Result<SmoothEntropyResult> {
    smooth_entropy_greedy(d, delta, Quantity::G)
}

/// Best of the shortest feasible probability-sorted prefix and the set
/// obtained by swapping that prefix's last symbol for the next one.
/// Longer prefixes are never better: both objectives grow with the set.
pub fn smooth_entropy_greedy(
    d: &Distribution,
    delta: f64,
    quantity: Quantity,
) -> Result<SmoothEntropyResult> {
    check_delta(delta)?;
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d.prob(b).total_cmp(&d.prob(a)).then(a.cmp(&b)));
    let mut mass = CompensatedSum::new();
    let mut len = order.len();
    for (i, &idx) in order.iter().enumerate() {
        mass.add(d.prob(idx));
        if meets_mass(mass.value(), delta) {
            len = i + 1;
            break;
        }
    }
    let mut prefix: Vec<usize> = order[..len].to_vec();
    prefix.sort_unstable();
    let mut candidates = vec![prefix];
    if len < order.len() {
        let mut swapped: Vec<usize> = order[..len - 1].to_vec();
        swapped.push(order[len]);
        swapped.sort_unstable();
        if meets_mass(d.mass_of(&swapped), delta) {
            candidates.push(swapped);
        }
    }
    let set = select_canonical(d, quantity, candidates).expect("at least one candidate");
    Ok(finish(d, delta, quantity, set, Method::Greedy))
}

// ---------------------------------------------------------------------------
// Finite-n sequences

/// Smooth entropies of one block length.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRecord {
    pub n: usize,
    /// `H_[delta](X^n)` in base-K units.
    pub h: f64,
    /// `G_[delta](X^n)` in base-K units.
    pub g: f64,
    /// `H / n`.
    pub h_rate: f64,
    /// `G / n`.
    pub g_rate: f64,
    /// `H / (alpha_c n)`.
    pub h_cost_rate: f64,
    /// `G / (alpha_c n)`.
    pub g_cost_rate: f64,
}

fn check_source_base(s: &IidSource, k: usize) -> Result<()> {
    if s.single_letter().base() != k {
        return Err(Error::InvalidInput(format!(
            "source uses logarithm base {} but the code alphabet has K={k}",
            s.single_letter().base()
        )));
    }
    Ok(())
}

/// Exact `H_[delta](X^n)` for one block length.
pub fn block_h_delta(s: &IidSource, delta: f64, n: usize) -> Result<f64> {
    let block = s.block_distribution(n, DEFAULT_MAX_SUPPORT)?;
    Ok(h_delta_exact(&block, delta, MethodHint::Auto)?.value)
}

/// Exact smooth-entropy rates for `n = 1..=n_max`.
pub fn rate_sequence(
    s: &IidSource,
    cf: &CostFunction,
    delta: f64,
    n_max: usize,
) -> Result<Vec<RateRecord>> {
    check_delta(delta)?;
    check_source_base(s, cf.k())?;
    (1..=n_max)
        .map(|n| {
            let block = s.block_distribution(n, DEFAULT_MAX_SUPPORT)?;
            let h = h_delta_exact(&block, delta, MethodHint::Auto)?.value;
            let g = g_delta_exact(&block, delta, MethodHint::Auto)?.value;
            let nf = n as f64;
            Ok(RateRecord {
                n,
                h,
                g,
                h_rate: h / nf,
                g_rate: g / nf,
                h_cost_rate: h / (cf.alpha() * nf),
                g_cost_rate: g / (cf.alpha() * nf),
            })
        })
        .collect()
}

/// Finite-n `(1/n) H_[delta](X^n)` next to the iid limit `(1 - delta) H(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixReport {
    pub delta: f64,
    pub entropy: f64,
    pub target: f64,
    /// `(n, H_[delta](X^n) / n)`.
    pub sequence: Vec<(usize, f64)>,
}

pub fn appendix_report(s: &IidSource, delta: f64, n_max: usize) -> Result<AppendixReport> {
    check_delta(delta)?;
    let entropy = s.entropy();
    let sequence = (1..=n_max)
        .map(|n| Ok((n, block_h_delta(s, delta, n)? / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AppendixReport {
        delta,
        entropy,
        target: (1.0 - delta) * entropy,
        sequence,
    })
}
