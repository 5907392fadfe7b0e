//! Regular cost functions over a code alphabet `{1, ..., K}`.
//!
//! A cost table assigns every code symbol a positive cost that may depend on
//! the last `depth` symbols already emitted. The table is *regular* when the
//! capacity equation `sum_y K^(-alpha * c(y | ctx)) = 1` has the same root
//! `alpha` for every context; that common root is the cost capacity, and the
//! weights `q(y) = K^(-alpha * c(y))` then sum to one over every word length.
//!
//! [`CostTable`] holds an unchecked table; [`CostTable::solve`] validates
//! regularity and produces an immutable [`CostFunction`] with the capacity
//! cached.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log_base, CompensatedSum};

/// A code symbol in `1..=K`.
pub type Symbol = u8;

/// Largest supported code alphabet (text formats write one digit per symbol).
pub const MAX_ALPHABET: usize = 9;

/// Default tolerance on `|f(alpha)|` for the capacity root.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-9;

/// Default allowed spread between per-context roots.
pub const DEFAULT_REGULARITY_TOL: f64 = 1e-7;

/// Context-dependent per-symbol cost table.
#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    k: usize,
    depth: usize,
    /// One row of `k` costs per context, contexts ordered by length then
    /// lexicographically.
    rows: Vec<Vec<f64>>,
}

fn context_count(k: usize, depth: usize) -> usize {
    (0..=depth).map(|j| k.pow(j as u32)).sum()
}

impl CostTable {
    /// Builds a table from rows in canonical context order (see [`CostTable::context`]).
    pub fn from_rows(k: usize, depth: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&k) {
            return Err(Error::InvalidInput(format!(
                "alphabet size K={k} outside 2..={MAX_ALPHABET}"
            )));
        }
        if depth > 8 {
            return Err(Error::InvalidInput(format!(
                "context depth {depth} too large"
            )));
        }
        let expected = context_count(k, depth);
        if rows.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} context rows, got {}",
                rows.len()
            )));
        }
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidInput(format!(
                    "context row {idx} has {} entries, expected {k}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                return Err(Error::InvalidInput(format!(
                    "cost {bad} is not a positive finite number"
                )));
            }
        }
        Ok(Self { k, depth, rows })
    }

    /// Memoryless (additive) costs: `costs[y-1]` is the cost of symbol `y`.
    pub fn memoryless(costs: &[f64]) -> Result<Self> {
        Self::from_rows(costs.len(), 0, vec![costs.to_vec()])
    }

    /// Every symbol costs one: costs reduce to codeword lengths.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::memoryless(&vec![1.0; k])
    }

    /// Builds a table from `(context, symbol, cost)` entries, requiring every
    /// context of length `0..=depth` to define all `k` symbols exactly once.
    pub fn from_entries(
        k: usize,
        depth: usize,
        entries: &[(Vec<Symbol>, Symbol, f64)],
    ) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&k) {
            return Err(Error::InvalidInput(format!(
                "alphabet size K={k} outside 2..={MAX_ALPHABET}"
            )));
        }
        let n = context_count(k, depth);
        let mut rows: Vec<Vec<Option<f64>>> = vec![vec![None; k]; n];
        for (ctx, sym, cost) in entries {
            if ctx.len() > depth {
                return Err(Error::InvalidInput(format!(
                    "context of length {} exceeds depth {depth}",
                    ctx.len()
                )));
            }
            check_symbols(k, ctx)?;
            check_symbols(k, &[*sym])?;
            let idx = context_index(k, ctx);
            let slot = &mut rows[idx][*sym as usize - 1];
            if slot.is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate cost for symbol {sym} in context {}",
                    context_label(ctx)
                )));
            }
            *slot = Some(*cost);
        }
        let mut full = Vec::with_capacity(n);
        for (idx, row) in rows.into_iter().enumerate() {
            let mut r = Vec::with_capacity(k);
            for (y, c) in row.into_iter().enumerate() {
                match c {
                    Some(c) => r.push(c),
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "missing cost for symbol {} in context {}",
                            y + 1,
                            context_label(&context_of_index(k, idx))
                        )))
                    }
                }
            }
            full.push(r);
        }
        Self::from_rows(k, depth, full)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_contexts(&self) -> usize {
        self.rows.len()
    }

    /// The symbol string of context number `idx`.
    pub fn context(&self, idx: usize) -> Vec<Symbol> {
        context_of_index(self.k, idx)
    }

    pub fn row(&self, idx: usize) -> &[f64] {
        &self.rows[idx]
    }

    /// Context index reached from context `idx` after emitting `symbol`.
    pub fn next_context(&self, idx: usize, symbol: Symbol) -> usize {
        let mut history = self.context(idx);
        history.push(symbol);
        self.row_after(&history)
    }

    pub fn c_min(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn c_max(&self) -> f64 {
        self.rows.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Index of the context row that applies after `history` has been emitted.
    #[inline]
    fn row_after(&self, history: &[Symbol]) -> usize {
        let keep = history.len().min(self.depth);
        context_index(self.k, &history[history.len() - keep..])
    }

    /// Cost of `symbol` given all previously emitted symbols.
    pub fn symbol_cost(&self, history: &[Symbol], symbol: Symbol) -> Result<f64> {
        check_symbols(self.k, &[symbol])?;
        check_symbols(self.k, history)?;
        Ok(self.rows[self.row_after(history)][symbol as usize - 1])
    }

    /// Sum of context-conditional symbol costs along `word`.
    pub fn cost_of_word(&self, word: &[Symbol]) -> Result<f64> {
        if word.is_empty() {
            return Err(Error::InvalidInput("cost of the empty word".into()));
        }
        self.cost_of_word_after(&[], word)
    }

    /// Cost of `word` when it is emitted right after `prefix`
    /// (`c(prefix . word) - c(prefix)`). Empty `word` costs zero.
    pub fn cost_of_word_after(&self, prefix: &[Symbol], word: &[Symbol]) -> Result<f64> {
        check_symbols(self.k, prefix)?;
        check_symbols(self.k, word)?;
        let mut full = Vec::with_capacity(prefix.len() + word.len());
        full.extend_from_slice(prefix);
        let mut acc = CompensatedSum::new();
        for &y in word {
            acc.add(self.rows[self.row_after(&full)][y as usize - 1]);
            full.push(y);
        }
        Ok(acc.value())
    }

    /// Root of `sum_y K^(-alpha * c(y | ctx)) - 1` for one context row.
    pub fn context_root(&self, idx: usize) -> f64 {
        solve_row(self.k, &self.rows[idx])
    }

    /// Solves every context root and reports whether they agree within `tol`.
    pub fn validate_regularity(&self, tol: f64) -> RegularityReport {
        let roots: Vec<ContextRoot> = (0..self.rows.len())
            .map(|idx| ContextRoot {
                context: self.context(idx),
                root: self.context_root(idx),
            })
            .collect();
        let min_root = roots.iter().map(|r| r.root).fold(f64::INFINITY, f64::min);
        let max_root = roots
            .iter()
            .map(|r| r.root)
            .fold(f64::NEG_INFINITY, f64::max);
        RegularityReport {
            regular: max_root - min_root <= tol,
            min_root,
            max_root,
            roots,
        }
    }

    /// Solves for the cost capacity with the default tolerances.
    pub fn solve_default(self) -> Result<CostFunction> {
        self.solve(DEFAULT_SOLVER_TOL, DEFAULT_REGULARITY_TOL)
    }

    /// Solves for the cost capacity. The root of the empty context is
    /// returned; the table is rejected when any other context's root lies
    /// more than `regularity_tol` away.
    pub fn solve(self, solver_tol: f64, regularity_tol: f64) -> Result<CostFunction> {
        if !(solver_tol > 0.0 && regularity_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        let report = self.validate_regularity(regularity_tol);
        let alpha = report.roots[0].root;
        let residual = capacity_residual(self.k, &self.rows[0], alpha);
        if residual.abs() > solver_tol {
            return Err(Error::InvalidInput(format!(
                "capacity root did not converge (residual {residual:e})"
            )));
        }
        if !report.regular {
            return Err(Error::NonRegularCost {
                min_root: report.min_root,
                max_root: report.max_root,
            });
        }
        let c_min = self.c_min();
        let c_max = self.c_max();
        Ok(CostFunction {
            table: self,
            alpha,
            c_min,
            c_max,
        })
    }
}

impl fmt::Display for CostTable {
    /// Writes the plain-text cost file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K {} depth {}", self.k, self.depth)?;
        for (idx, row) in self.rows.iter().enumerate() {
            let ctx = context_label(&self.context(idx));
            for (y, c) in row.iter().enumerate() {
                writeln!(f, "{ctx} {} {c:?}", y + 1)?;
            }
        }
        Ok(())
    }
}

/// Root of the capacity equation for one context.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextRoot {
    pub context: Vec<Symbol>,
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub roots: Vec<ContextRoot>,
    pub min_root: f64,
    pub max_root: f64,
    pub regular: bool,
}

/// A regular cost table with its solved cost capacity.
///
/// Immutable once built, so it can be shared freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunction {
    table: CostTable,
    alpha: f64,
    c_min: f64,
    c_max: f64,
}

impl CostFunction {
    /// Uniform costs over `k` symbols (capacity exactly one).
    pub fn uniform(k: usize) -> Result<Self> {
        CostTable::uniform(k)?.solve_default()
    }

    /// Two symbols costing 1 and 2; capacity `-log2((sqrt 5 - 1) / 2)`.
    pub fn golden() -> Self {
        CostTable::memoryless(&[1.0, 2.0])
            .and_then(CostTable::solve_default)
            .expect("golden-ratio costs are regular")
    }

    pub fn table(&self) -> &CostTable {
        &self.table
    }

    pub fn k(&self) -> usize {
        self.table.k
    }

    pub fn depth(&self) -> usize {
        self.table.depth
    }

    /// Cost capacity `alpha_c`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_min(&self) -> f64 {
        self.c_min
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn cost_of_word(&self, word: &[Symbol]) -> Result<f64> {
        self.table.cost_of_word(word)
    }

    pub fn cost_of_word_after(&self, prefix: &[Symbol], word: &[Symbol]) -> Result<f64> {
        self.table.cost_of_word_after(prefix, word)
    }

    pub fn symbol_cost(&self, history: &[Symbol], symbol: Symbol) -> Result<f64> {
        self.table.symbol_cost(history, symbol)
    }

    /// `K^(-alpha_c * c(word))`.
    pub fn q_weight(&self, word: &[Symbol]) -> Result<f64> {
        let c = self.cost_of_word(word)?;
        Ok(self.weight_of_cost(c))
    }

    /// `K^(-alpha_c * c(word | prefix))`; one for the empty word.
    pub fn q_weight_after(&self, prefix: &[Symbol], word: &[Symbol]) -> Result<f64> {
        let c = self.cost_of_word_after(prefix, word)?;
        Ok(self.weight_of_cost(c))
    }

    #[inline]
    pub fn weight_of_cost(&self, cost: f64) -> f64 {
        (self.k() as f64).powf(-self.alpha * cost)
    }

    /// Per-symbol weights `K^(-alpha * c(y | history))` for `y = 1..=K`.
    pub(crate) fn symbol_weights(&self, history: &[Symbol]) -> Vec<f64> {
        let row = &self.table.rows[self.table.row_after(history)];
        row.iter().map(|&c| self.weight_of_cost(c)).collect()
    }
}

/// `sum_y K^(-alpha * c_y) - 1`.
pub fn capacity_residual(k: usize, row: &[f64], alpha: f64) -> f64 {
    let kf = k as f64;
    compensated_sum(row.iter().map(|&c| kf.powf(-alpha * c))) - 1.0
}

/// Bisection for the capacity root of one row. The residual is strictly
/// decreasing in `alpha`, positive near zero and negative at `2 / c_min`.
fn solve_row(k: usize, row: &[f64]) -> f64 {
    let c_min = row.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lo = 1e-12;
    let mut hi = 2.0 / c_min;
    for _ in 0..4096 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = capacity_residual(k, row, mid);
        if f == 0.0 {
            return mid;
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (capacity_residual(k, row, lo), capacity_residual(k, row, hi));
    if flo.abs() <= fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Draws a random regular table: each context row is `-log_K(w) / alpha`
/// for a random probability vector `w`, so every row shares the root `alpha`.
pub fn random_regular_table<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    depth: usize,
    alpha: f64,
) -> Result<CostTable> {
    let rows = (0..context_count(k, depth))
        .map(|_| {
            let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.iter()
                .map(|x| -log_base(x / total, k) / alpha)
                .collect::<Vec<f64>>()
        })
        .collect();
    CostTable::from_rows(k, depth, rows)
}

/// Parses the plain-text cost format:
///
/// ```text
/// K 2 depth 1
/// - 1 1.0
/// - 2 1.0
/// 1 1 1.0
/// ...
/// ```
///
/// `-` is the empty context. Blank lines and `#` comments are ignored.
pub fn parse_cost_table(text: &str) -> Result<CostTable> {
    let mut header: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 4 || fields[0] != "K" || fields[2] != "depth" {
                    return Err(Error::parse(
                        lineno,
                        "expected header `K <int> depth <int>`",
                    ));
                }
                let k = fields[1]
                    .parse::<usize>()
                    .map_err(|_| Error::parse(lineno, "K must be an integer"))?;
                let depth = fields[3]
                    .parse::<usize>()
                    .map_err(|_| Error::parse(lineno, "depth must be an integer"))?;
                if !(2..=MAX_ALPHABET).contains(&k) {
                    return Err(Error::parse(
                        lineno,
                        format!("K={k} outside 2..={MAX_ALPHABET}"),
                    ));
                }
                header = Some((k, depth));
            }
            Some((k, _)) => {
                if fields.len() != 3 {
                    return Err(Error::parse(
                        lineno,
                        "expected `<context|-> <symbol> <cost>`",
                    ));
                }
                let ctx = parse_digits(fields[0], k).map_err(|m| Error::parse(lineno, m))?;
                let sym = parse_digits(fields[1], k).map_err(|m| Error::parse(lineno, m))?;
                if sym.len() != 1 {
                    return Err(Error::parse(lineno, "symbol must be a single digit"));
                }
                let cost = fields[2]
                    .parse::<f64>()
                    .map_err(|_| Error::parse(lineno, "cost must be a number"))?;
                entries.push((ctx, sym[0], cost, lineno));
            }
        }
    }
    let last_line = text.lines().count().max(1);
    let (k, depth) = header.ok_or_else(|| Error::parse(last_line, "missing header"))?;
    // Report per-line problems before the completeness check.
    for (ctx, _, cost, lineno) in &entries {
        if ctx.len() > depth {
            return Err(Error::parse(*lineno, "context longer than declared depth"));
        }
        if !(cost.is_finite() && *cost > 0.0) {
            return Err(Error::parse(*lineno, "cost must be positive and finite"));
        }
    }
    let plain: Vec<(Vec<Symbol>, Symbol, f64)> =
        entries.into_iter().map(|(c, s, v, _)| (c, s, v)).collect();
    CostTable::from_entries(k, depth, &plain).map_err(|e| match e {
        Error::InvalidInput(m) => Error::parse(last_line, m),
        other => other,
    })
}

/// Parses a digit string over `1..=k`; `-` denotes the empty string.
pub fn parse_digits(s: &str, k: usize) -> std::result::Result<Vec<Symbol>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|ch| match ch.to_digit(10) {
            Some(d) if d >= 1 && (d as usize) <= k => Ok(d as Symbol),
            _ => Err(format!("`{s}` is not a string over 1..={k}")),
        })
        .collect()
}

/// Digit string for a word; `-` for the empty word.
pub fn context_label(word: &[Symbol]) -> String {
    if word.is_empty() {
        "-".to_string()
    } else {
        word.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

fn check_symbols(k: usize, word: &[Symbol]) -> Result<()> {
    match word.iter().find(|&&y| y == 0 || y as usize > k) {
        Some(bad) => Err(Error::InvalidInput(format!(
            "code symbol {bad} outside 1..={k}"
        ))),
        None => Ok(()),
    }
}

fn context_index(k: usize, ctx: &[Symbol]) -> usize {
    let offset = context_count(k, ctx.len()) - k.pow(ctx.len() as u32);
    let within = ctx
        .iter()
        .fold(0usize, |acc, &y| acc * k + (y as usize - 1));
    offset + within
}

fn context_of_index(k: usize, idx: usize) -> Vec<Symbol> {
    let mut len = 0;
    let mut offset = 0;
    while idx >= offset + k.pow(len as u32) {
        offset += k.pow(len as u32);
        len += 1;
    }
    let mut within = idx - offset;
    let mut ctx = vec![0; len];
    for slot in ctx.iter_mut().rev() {
        *slot = (within % k) as Symbol + 1;
        within /= k;
    }
    ctx
}

/// All words of length `len` over `1..=k`, in lexicographic order.
pub fn all_words(k: usize, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=k as Symbol).map(move |y| {
                    let mut v = w.clone();
                    v.push(y);
                    v
                })
            })
            .collect();
    }
    out
}
