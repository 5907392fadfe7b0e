//! Shannon-Fano-Elias coding with symbol costs.
//!
//! Every word `y` owns the interval `[beta(y), gamma(y))` of width
//! `q(y) = K^(-alpha c(y))`, with children of a word splitting its interval
//! in symbol order. Members of a dominant set are laid out on `[0, 1)` by
//! their conditional probabilities. Member `i` has cumulative point `P_i`,
//! midpoint `Q_i = P_i + p_i / 2` and next point `P_{i+1}`, and is encoded
//! by the shortest word whose interval holds `Q_i` but neither `P_i` nor
//! `P_{i+1}`.
//!
//! Full codewords are `1 . inner`, symbol `2` alone is the escape word for
//! non-members, and the escape decodes to the first member. Inner words are
//! laid out in the subtree below the flag, so their costs are conditioned on
//! the flag symbol. Under memoryless costs this is the same as coding from
//! the root.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cost_model::{parse_digits, CostFunction, Symbol};
use crate::error::{Error, Result};
use crate::numeric::{log_base, CompensatedSum};
use crate::smooth_entropy::{g_delta_exact, MethodHint, FEASIBILITY_TOL};
use crate::source_model::Distribution;

/// Symbol prepended to every member's inner word.
pub const FLAG_SYMBOL: Symbol = 1;
/// Symbol used alone as the word for non-members.
pub const ESCAPE_SYMBOL: Symbol = 2;

/// Interval width below which the descent gives up.
pub const MIN_INTERVAL_WIDTH: f64 = 4.0 * f64::EPSILON;

/// Relative slack allowed on invariants that hold strictly in exact
/// arithmetic.
const CHECK_TOL: f64 = 1e-12;

/// Relative gap allowed between an interval's width and its word's q-weight.
/// The two are computed along different float paths, and a table is only
/// regular up to its regularity tolerance.
const WIDTH_TOL: f64 = 1e-9;

/// Symbols decoded without error.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantSet {
    members: Vec<usize>,
    mass: f64,
    complement_mass: f64,
}

impl DominantSet {
    /// Validates `members` as support indices of `d`.
    pub fn from_members(d: &Distribution, members: &[usize]) -> Result<Self> {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= d.len()) {
            return Err(Error::InvalidInput(format!(
                "member {bad} outside support of size {}",
                d.len()
            )));
        }
        let mass = d.mass_of(&members);
        let mut complement = CompensatedSum::new();
        let mut it = members.iter().peekable();
        for i in 0..d.len() {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                complement.add(d.prob(i));
            }
        }
        let complement_mass = complement.value();
        if (complement_mass - (1.0 - mass)).abs() > 1e-12 {
            return Err(Error::InvariantViolation(format!(
                "complement mass {complement_mass} disagrees with 1 - {mass}"
            )));
        }
        Ok(Self {
            members,
            mass,
            complement_mass,
        })
    }

    /// Sorted support indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.members.binary_search(&idx).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Error probability of any code with this dominant set.
    pub fn complement_mass(&self) -> f64 {
        self.complement_mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DominantStrategy {
    /// Drop the least likely symbols, later ones first among equals, while
    /// the dropped mass stays within epsilon.
    #[default]
    GreedyDrop,
    /// The set achieving `G_[epsilon]` exactly.
    GOptimal,
}

pub fn build_dominant_set(
    d: &Distribution,
    epsilon: f64,
    strategy: DominantStrategy,
) -> Result<DominantSet> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    match strategy {
        DominantStrategy::GreedyDrop => {
            let mut order: Vec<usize> = (0..d.len()).collect();
            order.sort_by(|&a, &b| d.prob(a).total_cmp(&d.prob(b)).then(b.cmp(&a)));
            let mut dropped = CompensatedSum::new();
            let mut keep = vec![true; d.len()];
            for &i in order.iter().take(d.len() - 1) {
                let next = dropped.with(d.prob(i));
                if next.value() > epsilon + FEASIBILITY_TOL {
                    break;
                }
                dropped = next;
                keep[i] = false;
            }
            let members: Vec<usize> = (0..d.len()).filter(|&i| keep[i]).collect();
            DominantSet::from_members(d, &members)
        }
        DominantStrategy::GOptimal => {
            let r = g_delta_exact(d, epsilon, MethodHint::Auto)?;
            DominantSet::from_members(d, &r.achieving_set)
        }
    }
}

/// Splits `[beta, gamma)` among the children of a node and returns the
/// interval of child `symbol`. The last child ends exactly at `gamma`.
fn child_interval(beta: f64, gamma: f64, weights: &[f64], symbol: Symbol) -> (f64, f64) {
    let width = gamma - beta;
    let mut lo = beta;
    for (i, &w) in weights.iter().enumerate() {
        let hi = if i + 1 == weights.len() {
            gamma
        } else {
            lo + width * w
        };
        if i + 1 == symbol as usize {
            return (lo, hi);
        }
        lo = hi;
    }
    unreachable!("symbol checked against the alphabet")
}

fn check_word(cf: &CostFunction, word: &[Symbol]) -> Result<()> {
    match word.iter().find(|&&y| y == 0 || y as usize > cf.k()) {
        Some(bad) => Err(Error::InvalidInput(format!(
            "code symbol {bad} outside 1..={}",
            cf.k()
        ))),
        None => Ok(()),
    }
}

/// `[beta(word), gamma(word))` with the empty word owning `[0, 1)`.
pub fn interval_of_word(cf: &CostFunction, word: &[Symbol]) -> Result<(f64, f64)> {
    interval_of_word_after(cf, &[], word)
}

/// Interval of `word` inside the subtree below `prefix`, rescaled so that
/// `prefix` itself owns `[0, 1)`.
pub fn interval_of_word_after(
    cf: &CostFunction,
    prefix: &[Symbol],
    word: &[Symbol],
) -> Result<(f64, f64)> {
    check_word(cf, prefix)?;
    check_word(cf, word)?;
    let mut history = prefix.to_vec();
    let (mut beta, mut gamma) = (0.0, 1.0);
    for &y in word {
        (beta, gamma) = child_interval(beta, gamma, &cf.symbol_weights(&history), y);
        history.push(y);
    }
    Ok((beta, gamma))
}

#[inline]
fn holds(beta: f64, gamma: f64, x: f64) -> bool {
    beta <= x && x < gamma
}

/// A word found by [`assign_codeword`] with its interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub word: Vec<Symbol>,
    pub beta: f64,
    pub gamma: f64,
}

/// Shortest word whose interval holds `q` and excludes `p` and `p_next`.
pub fn assign_codeword(cf: &CostFunction, p: f64, q: f64, p_next: f64) -> Result<Assignment> {
    assign_codeword_after(cf, &[], p, q, p_next)
}

/// [`assign_codeword`] within the subtree below `prefix`.
///
/// Words at one depth partition `[0, 1)`, so the descent through the
/// intervals holding `q` visits the only candidate of each length, and the
/// first one clear of both endpoints is the shortest.
pub fn assign_codeword_after(
    cf: &CostFunction,
    prefix: &[Symbol],
    p: f64,
    q: f64,
    p_next: f64,
) -> Result<Assignment> {
    check_word(cf, prefix)?;
    if !(0.0 <= p && p < q && q < p_next && p_next <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "need 0 <= P < Q < P' <= 1, got ({p}, {q}, {p_next})"
        )));
    }
    let mut history = prefix.to_vec();
    let mut word = Vec::new();
    let (mut beta, mut gamma) = (0.0, 1.0);
    loop {
        if !word.is_empty() && !holds(beta, gamma, p) && !holds(beta, gamma, p_next) {
            return Ok(Assignment { word, beta, gamma });
        }
        if gamma - beta < MIN_INTERVAL_WIDTH {
            return Err(Error::PrecisionExhausted {
                depth: word.len(),
                width: gamma - beta,
            });
        }
        let weights = cf.symbol_weights(&history);
        let mut chosen = None;
        for y in 1..=cf.k() as Symbol {
            let (lo, hi) = child_interval(beta, gamma, &weights, y);
            if holds(lo, hi, q) {
                chosen = Some((y, lo, hi));
                break;
            }
        }
        let (y, lo, hi) = chosen
            .ok_or_else(|| Error::InvariantViolation(format!("no child interval holds {q}")))?;
        word.push(y);
        history.push(y);
        (beta, gamma) = (lo, hi);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ordering {
    /// Ascending support index.
    #[default]
    Canonical,
    /// Most likely first, ties by support index.
    ProbabilityDescending,
}

/// Placement of one member on the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalAssignment {
    pub member: usize,
    pub cond_prob: f64,
    pub p: f64,
    pub q: f64,
    pub p_next: f64,
    pub inner: Vec<Symbol>,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub struct Codebook {
    dominant: DominantSet,
    ordering: Ordering,
    assignments: Vec<IntervalAssignment>,
    words: Vec<Vec<Symbol>>,
    per_word_cost: Vec<f64>,
    escape_word: Vec<Symbol>,
    escape_cost: f64,
    representative: usize,
    cost_function: CostFunction,
    support_len: usize,
    position: HashMap<usize, usize>,
    decoder: HashMap<Vec<Symbol>, usize>,
}

/// Greedy-drop dominant set for `epsilon`, canonical member order.
pub fn build_code(d: &Distribution, cf: &CostFunction, epsilon: f64) -> Result<Codebook> {
    let dominant = build_dominant_set(d, epsilon, DominantStrategy::GreedyDrop)?;
    build_code_for(d, cf, dominant, Ordering::Canonical)
}

/// Code over an explicit dominant set.
pub fn build_code_for(
    d: &Distribution,
    cf: &CostFunction,
    dominant: DominantSet,
    ordering: Ordering,
) -> Result<Codebook> {
    if cf.k() < 2 {
        return Err(Error::InvalidInput(
            "the flag/escape scheme needs K >= 2".into(),
        ));
    }
    if let Some(&bad) = dominant.members.iter().find(|&&i| i >= d.len()) {
        return Err(Error::InvalidInput(format!(
            "member {bad} outside support of size {}",
            d.len()
        )));
    }
    let mut order = dominant.members.clone();
    if ordering == Ordering::ProbabilityDescending {
        order.sort_by(|&a, &b| d.prob(b).total_cmp(&d.prob(a)).then(a.cmp(&b)));
    }
    let mass = dominant.mass;
    let mut cumulative = CompensatedSum::new();
    let mut assignments = Vec::with_capacity(order.len());
    for (i, &member) in order.iter().enumerate() {
        let cond_prob = d.prob(member) / mass;
        let p = cumulative.value();
        let q = p + cond_prob / 2.0;
        cumulative.add(cond_prob);
        let p_next = if i + 1 == order.len() {
            1.0
        } else {
            cumulative.value().min(1.0)
        };
        let a = assign_codeword_after(cf, &[FLAG_SYMBOL], p, q, p_next)?;
        assignments.push(IntervalAssignment {
            member,
            cond_prob,
            p,
            q,
            p_next,
            inner: a.word,
            beta: a.beta,
            gamma: a.gamma,
        });
    }
    assemble(d.len(), cf, dominant, ordering, assignments)
}

fn assemble(
    support_len: usize,
    cf: &CostFunction,
    dominant: DominantSet,
    ordering: Ordering,
    assignments: Vec<IntervalAssignment>,
) -> Result<Codebook> {
    let mut words = Vec::with_capacity(assignments.len());
    let mut per_word_cost = Vec::with_capacity(assignments.len());
    let mut position = HashMap::new();
    let mut decoder = HashMap::new();
    for (i, a) in assignments.iter().enumerate() {
        let mut full = vec![FLAG_SYMBOL];
        full.extend_from_slice(&a.inner);
        per_word_cost.push(cf.cost_of_word(&full)?);
        position.insert(a.member, i);
        decoder.insert(full.clone(), a.member);
        words.push(full);
    }
    let escape_word = vec![ESCAPE_SYMBOL];
    let representative = assignments[0].member;
    decoder.insert(escape_word.clone(), representative);
    let cb = Codebook {
        escape_cost: cf.cost_of_word(&escape_word)?,
        escape_word,
        representative,
        dominant,
        ordering,
        assignments,
        words,
        per_word_cost,
        cost_function: cf.clone(),
        support_len,
        position,
        decoder,
    };
    cb.validate()?;
    Ok(cb)
}

impl Codebook {
    pub fn dominant(&self) -> &DominantSet {
        &self.dominant
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    /// Member placements in coding order.
    pub fn assignments(&self) -> &[IntervalAssignment] {
        &self.assignments
    }

    /// Members in coding order.
    pub fn members_in_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.iter().map(|a| a.member)
    }

    /// Full codewords (flag included) in coding order.
    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    /// Full codeword of a dominant member.
    pub fn word_of(&self, member: usize) -> Option<&[Symbol]> {
        self.position
            .get(&member)
            .map(|&i| self.words[i].as_slice())
    }

    /// Cost of every full codeword, in coding order.
    pub fn per_word_cost(&self) -> &[f64] {
        &self.per_word_cost
    }

    pub fn cost_of_member(&self, member: usize) -> Option<f64> {
        self.position.get(&member).map(|&i| self.per_word_cost[i])
    }

    pub fn escape_word(&self) -> &[Symbol] {
        &self.escape_word
    }

    pub fn escape_cost(&self) -> f64 {
        self.escape_cost
    }

    pub fn representative(&self) -> usize {
        self.representative
    }

    pub fn cost_function(&self) -> &CostFunction {
        &self.cost_function
    }

    pub fn support_len(&self) -> usize {
        self.support_len
    }

    pub fn encode(&self, x: usize) -> Result<&[Symbol]> {
        if x >= self.support_len {
            return Err(Error::UnknownSymbol(x.to_string()));
        }
        Ok(self.word_of(x).unwrap_or(&self.escape_word))
    }

    pub fn decode(&self, word: &[Symbol]) -> Result<usize> {
        self.decoder
            .get(word)
            .copied()
            .ok_or_else(|| Error::InvalidCodeword(word.iter().map(|y| y.to_string()).collect()))
    }

    /// Cost of encoding `x`.
    pub fn cost_of(&self, x: usize) -> Result<f64> {
        if x >= self.support_len {
            return Err(Error::UnknownSymbol(x.to_string()));
        }
        Ok(self.cost_of_member(x).unwrap_or(self.escape_cost))
    }

    /// `sum_x q(inner word of x)`, measured below the flag.
    pub fn kraft_sum(&self) -> Result<f64> {
        let cf = &self.cost_function;
        let mut acc = CompensatedSum::new();
        for a in &self.assignments {
            acc.add(cf.q_weight_after(&[FLAG_SYMBOL], &a.inner)?);
        }
        Ok(acc.value())
    }

    /// Rechecks every structural guarantee of the construction.
    pub fn validate(&self) -> Result<()> {
        let cf = &self.cost_function;
        let fail = |msg: String| Err(Error::InvariantViolation(msg));

        let mut all: Vec<&[Symbol]> = self.words.iter().map(Vec::as_slice).collect();
        all.push(&self.escape_word);
        all.sort();
        for pair in all.windows(2) {
            if pair[1].starts_with(pair[0]) {
                return fail(format!("{:?} is a prefix of {:?}", pair[0], pair[1]));
            }
        }

        let mut spans: Vec<(f64, f64)> = Vec::with_capacity(self.assignments.len());
        let floor = (-cf.alpha() * cf.c_max() * (cf.k() as f64).ln()).exp();
        for a in &self.assignments {
            if !holds(a.beta, a.gamma, a.q)
                || holds(a.beta, a.gamma, a.p)
                || holds(a.beta, a.gamma, a.p_next)
            {
                return fail(format!("interval of member {} misplaced", a.member));
            }
            if !(a.p < a.beta && a.gamma <= a.p_next) {
                return fail(format!(
                    "interval of member {} leaves (P_i, P_i+1]",
                    a.member
                ));
            }
            let q_inner = cf.q_weight_after(&[FLAG_SYMBOL], &a.inner)?;
            if ((a.gamma - a.beta) - q_inner).abs() > WIDTH_TOL * q_inner {
                return fail(format!(
                    "interval width {} of member {} differs from q = {q_inner}",
                    a.gamma - a.beta,
                    a.member
                ));
            }
            let guarantee = a.cond_prob / 2.0 * floor;
            if q_inner * (1.0 + CHECK_TOL) <= guarantee {
                return fail(format!(
                    "member {} has q = {q_inner}, not above {guarantee}",
                    a.member
                ));
            }
            spans.push((a.beta, a.gamma));
        }
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in spans.windows(2) {
            if pair[0].1 > pair[1].0 {
                return fail(format!("intervals {:?} and {:?} overlap", pair[0], pair[1]));
            }
        }

        let kraft = self.kraft_sum()?;
        if kraft > 1.0 + CHECK_TOL {
            return fail(format!("Kraft sum {kraft} exceeds one"));
        }

        for a in &self.assignments {
            let w = self.encode(a.member)?;
            if self.decode(w)? != a.member {
                return fail(format!("member {} does not round-trip", a.member));
            }
        }
        Ok(())
    }
}

/// `(1/n) sum_x P(x) cost(encode(x))`.
pub fn average_cost_rate(cb: &Codebook, d: &Distribution, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    if d.len() != cb.support_len {
        return Err(Error::InvalidInput(format!(
            "codebook covers {} symbols, distribution has {}",
            cb.support_len,
            d.len()
        )));
    }
    let mut acc = CompensatedSum::new();
    for x in 0..d.len() {
        acc.add(d.prob(x) * cb.cost_of(x)?);
    }
    Ok(acc.value() / n as f64)
}

/// Probability that decoding returns a different symbol.
pub fn error_probability(cb: &Codebook) -> f64 {
    cb.dominant.complement_mass
}

/// Rebuilds the code for `cf2` on the same dominant set and member order.
pub fn transcode(cb: &Codebook, cf2: &CostFunction) -> Result<Codebook> {
    if cf2.k() != cb.cost_function.k() {
        return Err(Error::InvalidInput(format!(
            "cannot transcode from K={} to K={}",
            cb.cost_function.k(),
            cf2.k()
        )));
    }
    let mut assignments = Vec::with_capacity(cb.assignments.len());
    for a in &cb.assignments {
        let w = assign_codeword_after(cf2, &[FLAG_SYMBOL], a.p, a.q, a.p_next)?;
        assignments.push(IntervalAssignment {
            inner: w.word,
            beta: w.beta,
            gamma: w.gamma,
            ..a.clone()
        });
    }
    assemble(
        cb.support_len,
        cf2,
        cb.dominant.clone(),
        cb.ordering,
        assignments,
    )
}

/// Checks `alpha' c'(full) <= log_K 1/p + log_K 2 + 2 alpha' c'_max + alpha' c'(flag)`
/// for every member, `p` being the conditional probability.
pub fn transcode_guarantee(cb: &Codebook) -> Result<bool> {
    let cf = &cb.cost_function;
    let k = cf.k();
    let a = cf.alpha();
    let flag = cf.cost_of_word(&[FLAG_SYMBOL])?;
    Ok(cb.assignments.iter().zip(&cb.per_word_cost).all(|(m, &c)| {
        let bound = -log_base(m.cond_prob, k) + log_base(2.0, k) + 2.0 * a * cf.c_max() + a * flag;
        a * c <= bound + CHECK_TOL
    }))
}

fn digits(word: &[Symbol]) -> String {
    word.iter().map(|y| char::from(b'0' + y)).collect()
}

/// Codebook dump: header line then one `<label> <digits> <cost>` line per
/// member in coding order.
pub fn write_codebook(cb: &Codebook, d: &Distribution) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "escape {} representative {} alpha {:?}",
        digits(&cb.escape_word),
        d.label(cb.representative),
        cb.cost_function.alpha()
    );
    for (a, (w, c)) in cb
        .assignments
        .iter()
        .zip(cb.words.iter().zip(&cb.per_word_cost))
    {
        let _ = writeln!(out, "{} {} {:?}", d.label(a.member), digits(w), c);
    }
    out
}

/// Parsed codebook dump.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebookDump {
    pub escape: Vec<Symbol>,
    pub representative: String,
    pub alpha: f64,
    pub entries: Vec<(String, Vec<Symbol>, f64)>,
}

pub fn parse_codebook(text: &str, k: usize) -> Result<CodebookDump> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[0] != "escape" || h[2] != "representative" || h[4] != "alpha" {
        return Err(Error::parse(
            hline,
            "expected `escape <digits> representative <label> alpha <float>`",
        ));
    }
    let escape = parse_digits(h[1], k).map_err(|m| Error::parse(hline, m))?;
    let alpha = h[5]
        .parse::<f64>()
        .map_err(|_| Error::parse(hline, format!("bad alpha `{}`", h[5])))?;
    let mut entries = Vec::new();
    for (line, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(line, "expected `<label> <digits> <cost>`"));
        }
        let word = parse_digits(f[1], k).map_err(|m| Error::parse(line, m))?;
        let cost = f[2]
            .parse::<f64>()
            .map_err(|_| Error::parse(line, format!("bad cost `{}`", f[2])))?;
        entries.push((f[0].to_string(), word, cost));
    }
    Ok(CodebookDump {
        escape,
        representative: h[3].to_string(),
        alpha,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::{all_words, random_regular_table, CostTable};
    use crate::source_model::IidSource;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit() -> CostFunction {
        CostFunction::uniform(2).unwrap()
    }

    #[test]
    fn intervals_under_uniform_and_golden_costs() {
        let cf = unit();
        assert_eq!(interval_of_word(&cf, &[1]).unwrap(), (0.0, 0.5));
        assert_eq!(interval_of_word(&cf, &[2]).unwrap(), (0.5, 1.0));
        assert_eq!(interval_of_word(&cf, &[1, 2]).unwrap(), (0.25, 0.5));
        let t = (5f64.sqrt() - 1.0) / 2.0;
        let (b, g) = interval_of_word(&CostFunction::golden(), &[2]).unwrap();
        assert!((b - t).abs() < 1e-9 && g == 1.0);
        assert!((g - b - t * t).abs() < 1e-9);
    }

    #[test]
    fn descent_examples() {
        let cf = unit();
        let a = assign_codeword(&cf, 0.0, 0.25, 0.5).unwrap();
        assert_eq!(a.word, vec![1, 2]);
        assert_eq!((a.beta, a.gamma), (0.25, 0.5));
        let a = assign_codeword(&cf, 0.5, 0.75, 1.0).unwrap();
        assert_eq!(a.word, vec![2, 2]);
        // [0.5, 1) already excludes 0 and, being half-open, 1
        let a = assign_codeword(&cf, 0.0, 0.5, 1.0).unwrap();
        assert_eq!(a.word, vec![2]);
        assert!(assign_codeword(&cf, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let cf = unit();
        let r = assign_codeword(&cf, 0.0, 1e-30, 2e-30);
        assert!(matches!(r, Err(Error::PrecisionExhausted { .. })), "{r:?}");
    }

    #[test]
    fn dominant_set_examples() {
        let d = Distribution::uniform(4, 2).unwrap();
        let full = build_dominant_set(&d, 0.0, DominantStrategy::GreedyDrop).unwrap();
        assert_eq!(full.members(), &[0, 1, 2, 3]);
        assert_eq!(full.complement_mass(), 0.0);
        let ds = build_dominant_set(&d, 0.25, DominantStrategy::GreedyDrop).unwrap();
        assert_eq!(ds.members(), &[0, 1, 2]);
        assert_eq!(ds.mass(), 0.75);
        let d = Distribution::from_probs(&[0.5, 0.3, 0.2], 2).unwrap();
        let ds = build_dominant_set(&d, 0.25, DominantStrategy::GreedyDrop).unwrap();
        assert_eq!(ds.members(), &[0, 1]);
        let go = build_dominant_set(&d, 0.25, DominantStrategy::GOptimal).unwrap();
        assert!(go.complement_mass() <= 0.25 + 1e-12);
        assert!(build_dominant_set(&d, 1.0, DominantStrategy::GreedyDrop).is_err());
    }

    #[test]
    fn two_member_code() {
        let d = Distribution::from_probs(&[0.5, 0.5], 2).unwrap();
        let cb = build_code(&d, &unit(), 0.0).unwrap();
        let inner: Vec<_> = cb.assignments().iter().map(|a| a.inner.clone()).collect();
        assert_eq!(inner, vec![vec![1, 2], vec![2, 2]]);
        assert_eq!(cb.words(), &[vec![1, 1, 2], vec![1, 2, 2]]);
        assert_eq!(cb.escape_word(), &[2]);
        assert_eq!(average_cost_rate(&cb, &d, 1).unwrap(), 3.0);
        assert_eq!(error_probability(&cb), 0.0);
    }

    #[test]
    fn point_mass_code() {
        let d = Distribution::from_probs(&[1.0], 2).unwrap();
        let cb = build_code(&d, &unit(), 0.0).unwrap();
        assert_eq!(cb.assignments()[0].inner, vec![2]);
        assert_eq!(cb.words(), &[vec![1, 2]]);
        assert_eq!(cb.representative(), 0);
        assert_eq!(cb.decode(&[2]).unwrap(), 0);
    }

    #[test]
    fn uniform_four_code() {
        let d = Distribution::uniform(4, 2).unwrap();
        let cb = build_code(&d, &unit(), 0.0).unwrap();
        assert!(cb.assignments().iter().all(|a| a.inner.len() <= 4));
        let avg_inner: f64 = cb
            .assignments()
            .iter()
            .map(|a| a.cond_prob * a.inner.len() as f64)
            .sum();
        assert!(avg_inner <= 5.0);
        let cb = build_code(&d, &unit(), 0.25).unwrap();
        assert_eq!(error_probability(&cb), 0.25);
        assert_eq!(cb.encode(3).unwrap(), &[2]);
        assert_eq!(cb.decode(cb.encode(3).unwrap()).unwrap(), 0);
    }

    #[test]
    fn decode_rejects_non_codewords() {
        let d = Distribution::from_probs(&[0.5, 0.5], 2).unwrap();
        let cb = build_code(&d, &unit(), 0.0).unwrap();
        assert!(matches!(
            cb.decode(&[2, 1, 1]),
            Err(Error::InvalidCodeword(_))
        ));
        assert!(matches!(cb.encode(7), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn transcoding_keeps_the_dominant_set() {
        let s = IidSource::bernoulli(0.3, 2).unwrap();
        let d = s.block_distribution(4, 1 << 10).unwrap();
        let cb = build_code(&d, &unit(), 0.1).unwrap();
        let same = transcode(&cb, &unit()).unwrap();
        assert_eq!(same.words(), cb.words());
        let g = transcode(&cb, &CostFunction::golden()).unwrap();
        assert_eq!(g.dominant(), cb.dominant());
        assert_eq!(error_probability(&g), error_probability(&cb));
        assert!(transcode_guarantee(&g).unwrap());
        let two = Distribution::from_probs(&[0.5, 0.5], 2).unwrap();
        let g2 = transcode(
            &build_code(&two, &unit(), 0.0).unwrap(),
            &CostFunction::golden(),
        )
        .unwrap();
        assert!(transcode_guarantee(&g2).unwrap());
        assert!(transcode(&cb, &CostFunction::uniform(3).unwrap()).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let d = Distribution::new(vec![("a", 0.6), ("b", 0.4)], 2).unwrap();
        let cb = build_code(&d, &CostFunction::golden(), 0.0).unwrap();
        let text = write_codebook(&cb, &d);
        let dump = parse_codebook(&text, 2).unwrap();
        assert_eq!(dump.escape, vec![2]);
        assert_eq!(dump.representative, "a");
        assert_eq!(dump.alpha, CostFunction::golden().alpha());
        assert_eq!(dump.entries.len(), 2);
        assert_eq!(dump.entries[1].1, cb.words()[1]);
        assert!(matches!(
            parse_codebook("escape x", 2),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_codebook("escape 2 representative a alpha 1\na 13 1.0\n", 2),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    /// Shortest word of length at most `max_len` found by trying all words.
    fn exhaustive_shortest(
        cf: &CostFunction,
        prefix: &[Symbol],
        p: f64,
        q: f64,
        p_next: f64,
        max_len: usize,
    ) -> Option<Vec<Symbol>> {
        (1..=max_len).find_map(|len| {
            all_words(cf.k(), len).into_iter().find(|w| {
                let (b, g) = interval_of_word_after(cf, prefix, w).unwrap();
                holds(b, g, q) && !holds(b, g, p) && !holds(b, g, p_next)
            })
        })
    }

    fn arb_cost() -> impl Strategy<Value = CostFunction> {
        (2usize..=3, 0usize..=1, any::<u64>()).prop_map(|(k, depth, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_regular_table(&mut rng, k, depth, 0.8)
                .and_then(CostTable::solve_default)
                .unwrap()
        })
    }

    fn arb_dist() -> impl Strategy<Value = Distribution> {
        proptest::collection::vec(1u32..50, 1..=8).prop_map(|w| {
            let t: u32 = w.iter().sum();
            Distribution::from_probs(
                &w.iter().map(|&x| x as f64 / t as f64).collect::<Vec<_>>(),
                2,
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn descent_is_shortest(cf in arb_cost(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (p, p_next) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(p_next - p > 0.02);
            let q = p + (p_next - p) / 2.0;
            let got = assign_codeword_after(&cf, &[FLAG_SYMBOL], p, q, p_next).unwrap();
            if let Some(best) = exhaustive_shortest(&cf, &[FLAG_SYMBOL], p, q, p_next, 8) {
                prop_assert_eq!(got.word.len(), best.len());
                prop_assert_eq!(got.word, best);
            } else {
                prop_assert!(got.word.len() > 8);
            }
        }

        #[test]
        fn codes_validate(cf in arb_cost(), d in arb_dist(), eps in 0.0f64..0.5) {
            for strategy in [DominantStrategy::GreedyDrop, DominantStrategy::GOptimal] {
                for ordering in [Ordering::Canonical, Ordering::ProbabilityDescending] {
                    let ds = build_dominant_set(&d, eps, strategy).unwrap();
                    prop_assert!(ds.complement_mass() <= eps + 1e-12);
                    let cb = build_code_for(&d, &cf, ds, ordering).unwrap();
                    prop_assert!(cb.kraft_sum().unwrap() <= 1.0 + 1e-12);
                    for x in 0..d.len() {
                        let y = cb.decode(cb.encode(x).unwrap()).unwrap();
                        prop_assert_eq!(y == x, cb.dominant().contains(x));
                    }
                    let t = transcode(&cb, &CostFunction::golden());
                    if cf.k() == 2 {
                        let t = t.unwrap();
                        prop_assert_eq!(t.dominant(), cb.dominant());
                        prop_assert!(transcode_guarantee(&t).unwrap());
                    } else {
                        prop_assert!(t.is_err());
                    }
                }
            }
        }
    }
}
