//! One extraction step: from a seed set `U` in window `V[i, i+t)`, find a
//! transitive `k`-block `X ⊆ U` and a seed set `U'` of `r` common
//! out-neighbours of `X` inside one of the following `W - 1` windows.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::ordering::Ordering;
use crate::params::{LemmaParams, Mode};
use crate::tournament::{Tournament, Vertex};

/// Greedy transitive extraction: repeatedly take the vertex of largest
/// out-degree inside the pool (first on ties) and shrink the pool to its
/// out-neighbours. The result is in dominance order.
///
/// Always succeeds when `|U| >= 2^(m-1)`; returns `None` only if the pool
/// runs dry before `m` vertices are collected.
pub fn find_transitive(t: &Tournament, u: &[Vertex], m: usize) -> Option<Vec<Vertex>> {
    let mut chain = transitive_chain(t, u, m);
    (chain.len() >= m).then(|| {
        chain.truncate(m);
        chain
    })
}

/// The chain built by the greedy of [`find_transitive`], run until the pool is
/// empty or `limit` vertices are collected.
pub fn transitive_chain(t: &Tournament, u: &[Vertex], limit: usize) -> Vec<Vertex> {
    let mut pool: Vec<Vertex> = u.to_vec();
    let mut out = Vec::new();
    while out.len() < limit {
        let mut best: Option<(Vertex, usize)> = None;
        for &v in &pool {
            let d = pool.iter().filter(|&&w| w != v && t.beats(v, w)).count();
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((v, d));
            }
        }
        let Some((v, _)) = best else { break };
        out.push(v);
        pool.retain(|&w| w != v && t.beats(v, w));
    }
    out
}

/// `true` iff every vertex of `xs` beats every later one.
pub fn is_transitive_in_order(t: &Tournament, xs: &[Vertex]) -> bool {
    xs.iter()
        .enumerate()
        .all(|(a, &x)| xs[a + 1..].iter().all(|&y| x != y && t.beats(x, y)))
}

/// How [`find_dominating_subset`] walks the `k`-subsets of `X'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetSearch {
    /// All `C(|X'|, k)` subsets in lexicographic order; first qualifying wins.
    Lexicographic,
    /// Grow the subset one vertex at a time, keeping the largest common
    /// out-neighbourhood. May miss qualifying subsets.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dominating {
    /// The chosen block, in the order it appears in `X'`.
    pub block: Vec<Vertex>,
    /// Members of `B` beaten by every vertex of `block`, in `B` order.
    pub common: Vec<Vertex>,
}

/// Finds `k` vertices of the transitive list `xprime` with at least
/// `threshold` common out-neighbours in `b`.
pub fn find_dominating_subset(
    t: &Tournament,
    xprime: &[Vertex],
    k: usize,
    b: &[Vertex],
    threshold: usize,
    search: SubsetSearch,
) -> Result<Option<Dominating>> {
    if k == 0 || xprime.len() < k {
        return Err(Error::Precondition(format!(
            "need 1 <= k <= |X'|, got k={k}, |X'|={}",
            xprime.len()
        )));
    }
    let rows: Vec<BitSet> = xprime
        .iter()
        .map(|&x| {
            let mut s = BitSet::new(b.len());
            for (j, &y) in b.iter().enumerate() {
                if t.beats(x, y) {
                    s.insert(j);
                }
            }
            s
        })
        .collect();
    let picked = match search {
        SubsetSearch::Lexicographic => lexicographic(&rows, k, threshold),
        SubsetSearch::Greedy => greedy(&rows, k, threshold),
    };
    Ok(picked.map(|(idx, common)| Dominating {
        block: idx.iter().map(|&a| xprime[a]).collect(),
        common: common.iter().map(|j| b[j]).collect(),
    }))
}

fn lexicographic(rows: &[BitSet], k: usize, threshold: usize) -> Option<(Vec<usize>, BitSet)> {
    let m = rows.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut common = rows[idx[0]].clone();
        for &a in &idx[1..] {
            common.intersect_with(&rows[a]);
        }
        if common.count() >= threshold {
            return Some((idx, common));
        }
        // advance to the next combination
        let mut p = k;
        loop {
            if p == 0 {
                return None;
            }
            p -= 1;
            if idx[p] < m - k + p {
                break;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn greedy(rows: &[BitSet], k: usize, threshold: usize) -> Option<(Vec<usize>, BitSet)> {
    let mut common = BitSet::full(rows[0].len());
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for _ in 0..k {
        let (a, _) = (0..rows.len())
            .filter(|a| !chosen.contains(a))
            .map(|a| (a, common.intersection_count(&rows[a])))
            .fold(None, |best: Option<(usize, usize)>, (a, c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((a, c)),
            })?;
        common.intersect_with(&rows[a]);
        chosen.push(a);
    }
    chosen.sort_unstable();
    (common.count() >= threshold).then_some((chosen, common))
}

/// Picks the first target window holding at least `r` members of `common`
/// and returns its start together with the `r` lowest-positioned members.
pub fn pigeonhole_interval(
    common: &[Vertex],
    ord: &Ordering,
    i: usize,
    params: &LemmaParams,
) -> Result<(usize, Vec<Vertex>)> {
    let (t, r) = (params.t, params.r);
    if common.len() < params.common_threshold() {
        return Err(Error::Precondition(format!(
            "pigeonhole needs at least (W-1)r = {} candidates, got {}",
            params.common_threshold(),
            common.len()
        )));
    }
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); params.windows];
    for &u in common {
        let p = ord.position(u);
        if p < i + t || p >= i + params.span() {
            return Err(Error::Precondition(format!(
                "vertex {u} at position {p} lies outside V[{}, {})",
                i + t,
                i + params.span()
            )));
        }
        slots[(p - i) / t].push(p);
    }
    for (s, positions) in slots.iter_mut().enumerate().skip(1) {
        if positions.len() >= r {
            positions.sort_unstable();
            let chosen = positions[..r].iter().map(|&p| ord.vertex_at(p)).collect();
            return Ok((i + s * t, chosen));
        }
    }
    Err(Error::Contract(format!(
        "no target window after {i} holds {r} of {} candidates",
        common.len()
    )))
}

/// The stage at which an extraction step gave up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    WindowRepair,
    Transitive,
    DominatingSubset,
    Pigeonhole,
    FinalBlock,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::WindowRepair => "window-repair",
            Stage::Transitive => "transitive",
            Stage::DominatingSubset => "dominating-subset",
            Stage::Pigeonhole => "pigeonhole",
            Stage::FinalBlock => "final-block",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub stage: Stage,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepWitness {
    /// Transitive block in dominance order.
    pub block: Vec<Vertex>,
    /// Start position `i'` of the chosen target window.
    pub next_start: usize,
    /// `U'`: `r` common out-neighbours of `block` inside `V[i', i'+t)`.
    pub next_seed: Vec<Vertex>,
    /// Transitive superset the block was chosen from.
    pub transitive_pool: Vec<Vertex>,
    /// Size of the block's common out-neighbourhood within `B`.
    pub common_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Witness(StepWitness),
    Failed(FailureReport),
}

/// Runs one extraction step on window `i` with seed set `seed`.
///
/// Vertices in `pinned` are removed from the target span before counting.
/// In guaranteed mode any stage failure is returned as [`Error::Contract`].
pub fn extract_step(
    t: &Tournament,
    ord: &Ordering,
    i: usize,
    seed: &[Vertex],
    params: &LemmaParams,
    pinned: &HashSet<Vertex>,
    mode: Mode,
) -> Result<StepOutcome> {
    let LemmaParams { k, r, .. } = *params;
    if i + params.span() > ord.len() {
        return Err(Error::Precondition(format!(
            "window start {i} needs i + W*t <= n = {}",
            ord.len()
        )));
    }
    if seed.len() != r {
        return Err(Error::Precondition(format!("seed set has {} vertices, expected r={r}", seed.len())));
    }
    if let Some(&u) = seed
        .iter()
        .find(|&&u| !(i..i + params.t).contains(&ord.position(u)))
    {
        return Err(Error::Precondition(format!("seed vertex {u} is outside V[{i}, {})", i + params.t)));
    }

    let fail = |stage: Stage, detail: String| -> Result<StepOutcome> {
        match mode {
            Mode::Heuristic => Ok(StepOutcome::Failed(FailureReport { stage, detail })),
            Mode::Guaranteed => Err(Error::Contract(format!(
                "guaranteed-mode step at window {i} failed at stage {stage}: {detail}"
            ))),
        }
    };

    // Heuristic mode settles for the longest greedy chain of at least k vertices.
    let pool = transitive_chain(t, seed, 3 * k);
    let needed = match mode {
        Mode::Guaranteed => 3 * k,
        Mode::Heuristic => k,
    };
    if pool.len() < needed {
        return fail(
            Stage::Transitive,
            format!("greedy found a transitive {}-set among {r} seeds, need {needed}", pool.len()),
        );
    }

    let b: Vec<Vertex> = ord
        .window(i + params.t, i + params.span())
        .iter()
        .copied()
        .filter(|v| !pinned.contains(v))
        .collect();
    let search = if k >= 6 && mode == Mode::Heuristic {
        SubsetSearch::Greedy
    } else {
        SubsetSearch::Lexicographic
    };
    let threshold = params.common_threshold();
    let mut found = find_dominating_subset(t, &pool, k, &b, threshold, search)?;
    if found.is_none() && mode == Mode::Heuristic {
        found = any_transitive_dominating(t, seed, k, &b, threshold);
    }
    let Some(dom) = found else {
        return fail(
            Stage::DominatingSubset,
            format!("no {k}-subset of {} has {threshold} common out-neighbours", pool.len()),
        );
    };

    let (next_start, next_seed) = match pigeonhole_interval(&dom.common, ord, i, params) {
        Ok(x) => x,
        Err(Error::Contract(msg)) => return fail(Stage::Pigeonhole, msg),
        Err(e) => return Err(e),
    };
    Ok(StepOutcome::Witness(StepWitness {
        block: dom.block,
        next_start,
        next_seed,
        transitive_pool: pool,
        common_count: dom.common.len(),
    }))
}

/// Largest seed-set size for which heuristic mode retries over every
/// transitive `k`-subset of the seed set, not just those of the greedy chain.
const WIDE_SEARCH_LIMIT: u128 = 20_000;

/// First transitive `k`-subset of `seed` (in lexicographic index order) with at
/// least `threshold` common out-neighbours in `b`, returned in dominance order.
fn any_transitive_dominating(
    t: &Tournament,
    seed: &[Vertex],
    k: usize,
    b: &[Vertex],
    threshold: usize,
) -> Option<Dominating> {
    if seed.len() < k || binomial(seed.len() as u64, k as u64) > WIDE_SEARCH_LIMIT {
        return None;
    }
    let rows: Vec<BitSet> = seed
        .iter()
        .map(|&x| {
            let mut s = BitSet::new(b.len());
            for (j, &y) in b.iter().enumerate() {
                if t.beats(x, y) {
                    s.insert(j);
                }
            }
            s
        })
        .collect();
    let m = seed.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut block: Vec<Vertex> = idx.iter().map(|&a| seed[a]).collect();
        // A set is transitive iff its in-set out-degrees are k-1, k-2, ..., 0.
        let wins = |v: Vertex| block.iter().filter(|&&w| w != v && t.beats(v, w)).count();
        let mut keyed: Vec<(usize, Vertex)> = block.iter().map(|&v| (wins(v), v)).collect();
        keyed.sort_unstable_by_key(|&(d, _)| std::cmp::Reverse(d));
        if keyed.iter().enumerate().all(|(p, &(d, _))| d == k - 1 - p) {
            let mut common = rows[idx[0]].clone();
            for &a in &idx[1..] {
                common.intersect_with(&rows[a]);
            }
            if common.count() >= threshold {
                block = keyed.into_iter().map(|(_, v)| v).collect();
                return Some(Dominating {
                    block,
                    common: common.iter().map(|j| b[j]).collect(),
                });
            }
        }
        let mut p = k;
        loop {
            if p == 0 {
                return None;
            }
            p -= 1;
            if idx[p] < m - k + p {
                break;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// One line of an audit: a named property and whether it held.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl AuditLine {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        AuditLine {
            name: name.to_owned(),
            pass,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for AuditLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Re-derives the three properties of an extraction step from raw
/// orientation queries and positions in `ord`.
pub fn audit_witness(
    t: &Tournament,
    ord: &Ordering,
    i: usize,
    seed: &[Vertex],
    params: &LemmaParams,
    w: &StepWitness,
) -> Vec<AuditLine> {
    let seed_set: HashSet<Vertex> = seed.iter().copied().collect();
    let inside = w.block.iter().filter(|v| seed_set.contains(v)).count();
    let size_ok = w.block.len() == params.k && inside == w.block.len();
    let size = AuditLine::new(
        "block-size",
        size_ok,
        format!("|X| = {} (k = {}), {inside} of them in U", w.block.len(), params.k),
    );

    let mut bad_pairs = 0;
    let mut pairs = 0;
    for a in 0..w.block.len() {
        for b in a + 1..w.block.len() {
            pairs += 1;
            if w.block[a] == w.block[b] || !t.beats(w.block[a], w.block[b]) {
                bad_pairs += 1;
            }
        }
    }
    let transitive = AuditLine::new(
        "transitive",
        bad_pairs == 0,
        format!("{} of {pairs} ordered pairs forward", pairs - bad_pairs),
    );

    let offset = w.next_start.wrapping_sub(i);
    let start_ok = w.next_start > i
        && offset.is_multiple_of(params.t)
        && (1..params.windows).contains(&(offset / params.t));
    let in_window = w
        .next_seed
        .iter()
        .filter(|&&u| (w.next_start..w.next_start + params.t).contains(&ord.position(u)))
        .count();
    let dominated = w
        .next_seed
        .iter()
        .filter(|&&u| w.block.iter().all(|&x| x != u && t.beats(x, u)))
        .count();
    let distinct = w.next_seed.iter().collect::<HashSet<_>>().len();
    let r = params.r;
    let common_ok = start_ok
        && w.next_seed.len() == r
        && distinct == r
        && in_window == r
        && dominated == r;
    let common = AuditLine::new(
        "common-out-neighbourhood",
        common_ok,
        format!(
            "i' = {} (offset {offset}, valid: {start_ok}); |U'| = {} distinct {distinct} (r = {r}); \
             {in_window} in window; {dominated} dominated by X",
            w.next_start,
            w.next_seed.len()
        ),
    );
    vec![size, transitive, common]
}

/// Falling-factorial binomial `x (x-1) ... (x-k+1) / k!` for real `x`.
pub fn binomial_real(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// Exact `C(n, k)` for moderate arguments.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub guaranteed: bool,
    /// `r >= 2^(3k-1)`: a transitive `3k`-set exists inside every seed set.
    pub extractable: bool,
    /// Lower bound on the mean in-degree from `X'` over `B`.
    pub mean_in_degree: f64,
    /// `t * C(mean_in_degree, k)`.
    pub lhs: f64,
    /// `r * C(3k, k)`.
    pub rhs: f64,
    /// `lhs / rhs`; at least 1 when the counting inequality is satisfied.
    pub margin: f64,
}

/// Checks whether the counting argument forces every extraction step to
/// succeed for these parameters.
///
/// Each of the `3k` vertices of `X'` has more than `(W-2)t/2` out-neighbours
/// in `B`, so the in-degrees from `X'` over `B` average at least
/// `mu = 3k (W-2) / (2 (W-1))`. By convexity `|B| C(mu, k)` lower-bounds the
/// number of (vertex, `k`-subset) incidences, while a failure would cap it
/// below `(W-1) r C(3k, k)`.
pub fn certify_params(params: &LemmaParams) -> Certification {
    let LemmaParams { k, r, t, windows } = *params;
    let extractable = u32::try_from(3 * k - 1)
        .ok()
        .and_then(|s| 1usize.checked_shl(s))
        .is_some_and(|need| r >= need);
    let mu = (3 * k * (windows - 2)) as f64 / (2 * (windows - 1)) as f64;
    let lhs = t as f64 * binomial_real(mu, k);
    let rhs = r as f64 * binomial(3 * k as u64, k as u64) as f64;
    Certification {
        guaranteed: extractable && lhs >= rhs,
        extractable,
        mean_in_degree: mu,
        lhs,
        rhs,
        margin: lhs / rhs,
    }
}
