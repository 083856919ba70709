//! Ground truth for small instances: a direct checker for path powers,
//! exhaustive longest-power search, and exact `ℓ(n, k)` over all tournaments.
//!
//! Lengths count edges: a sequence of `m` vertices has length `m - 1`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tournament::{gen_random, pair_count, Tournament, Vertex};

/// Positions `(a, b)` with `a < b <= a + k` whose edge points backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub a: usize,
    pub b: usize,
}

/// Checks that `seq` is a `k`-th power of a directed path in `t`. Returns the
/// list of violating position pairs (empty means pass). Repeated or
/// out-of-range vertices are a structural error.
pub fn verify_path_power(t: &Tournament, seq: &[Vertex], k: usize) -> Result<Vec<Violation>> {
    let mut seen = vec![false; t.n()];
    for &v in seq {
        if v >= t.n() {
            return Err(Error::Precondition(format!("vertex {v} out of range for n={}", t.n())));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Precondition(format!("vertex {v} repeated in sequence")));
        }
    }
    let mut violations = Vec::new();
    for a in 0..seq.len() {
        for b in a + 1..seq.len().min(a + k + 1) {
            if !t.beats(seq[a], seq[b]) {
                violations.push(Violation { a, b });
            }
        }
    }
    Ok(violations)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Edge count of `witness`.
    pub length: usize,
    pub witness: Vec<Vertex>,
    /// Whether the search covered every candidate, making `length` maximal.
    pub exhaustive: bool,
}

/// Default node budget for [`longest_path_power`].
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Largest `n` the bitmask searches accept.
pub const MAX_SEARCH_N: usize = 64;

fn out_masks(t: &Tournament) -> Vec<u64> {
    (0..t.n())
        .map(|v| {
            (0..t.n())
                .filter(|&w| w != v && t.beats(v, w))
                .fold(0u64, |m, w| m | 1 << w)
        })
        .collect()
}

struct Memo<'a> {
    out: &'a [u64],
    k: usize,
    n: usize,
    nodes: u64,
    budget: u64,
    /// Longest extension (in vertices) from a (used set, ordered suffix) state.
    table: HashMap<(u64, Vec<u8>), u32>,
    path: Vec<Vertex>,
    best: Vec<Vertex>,
}

impl Memo<'_> {
    fn candidates(&self, used: u64, suffix: &[u8]) -> u64 {
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        suffix
            .iter()
            .fold(all & !used, |m, &s| m & self.out[s as usize])
    }

    fn next_suffix(&self, suffix: &[u8], w: usize) -> Vec<u8> {
        let keep = suffix.len().min(self.k.saturating_sub(1));
        let mut s = suffix[suffix.len() - keep..].to_vec();
        if self.k > 0 {
            s.push(w as u8);
        }
        s
    }

    /// `None` when the budget ran out.
    fn extend(&mut self, used: u64, suffix: Vec<u8>) -> Option<u32> {
        let key = (used, suffix);
        if let Some(&v) = self.table.get(&key) {
            return Some(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if self.path.len() > self.best.len() {
            self.best = self.path.clone();
        }
        let (used, suffix) = key;
        let mut cand = self.candidates(used, &suffix);
        let mut best = 0;
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let next = self.next_suffix(&suffix, w);
            self.path.push(w);
            let sub = self.extend(used | 1 << w, next);
            self.path.pop();
            best = best.max(1 + sub?);
        }
        self.table.insert((used, suffix), best);
        Some(best)
    }

    fn reconstruct(&self, start: usize) -> Vec<Vertex> {
        let mut seq = vec![start];
        let mut used = 1u64 << start;
        let mut suffix = self.next_suffix(&[], start);
        let mut remaining = self.table[&(used, suffix.clone())];
        while remaining > 0 {
            let mut cand = self.candidates(used, &suffix);
            let mut advanced = false;
            while cand != 0 {
                let w = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                let next = self.next_suffix(&suffix, w);
                if self.table.get(&(used | 1 << w, next.clone())) == Some(&(remaining - 1)) {
                    seq.push(w);
                    used |= 1 << w;
                    suffix = next;
                    remaining -= 1;
                    advanced = true;
                    break;
                }
            }
            assert!(advanced, "memo table inconsistent");
        }
        seq
    }
}

/// Longest `k`-th power of a directed path in `t`, by depth-first extension
/// with memoization on (used set, ordered last-`k` suffix).
///
/// Each node visit not answered by the memo table costs one unit of `budget`.
/// If the budget runs out the best sequence seen so far is returned with
/// `exhaustive = false`.
pub fn longest_path_power(t: &Tournament, k: usize, budget: u64) -> Result<SearchResult> {
    let n = t.n();
    if n > MAX_SEARCH_N {
        return Err(Error::Precondition(format!(
            "exhaustive search supports n <= {MAX_SEARCH_N}, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let out = out_masks(t);
    let mut memo = Memo {
        out: &out,
        k,
        n,
        nodes: 0,
        budget,
        table: HashMap::new(),
        path: Vec::new(),
        best: Vec::new(),
    };
    let mut best: Option<(u32, usize)> = None;
    for s in 0..n {
        let suffix = memo.next_suffix(&[], s);
        memo.path.push(s);
        let got = memo.extend(1 << s, suffix);
        memo.path.pop();
        match got {
            Some(ext) => {
                if best.is_none_or(|(b, _)| ext > b) {
                    best = Some((ext, s));
                }
            }
            None => {
                let witness = memo.best.clone();
                return Ok(SearchResult {
                    length: witness.len().saturating_sub(1),
                    witness,
                    exhaustive: false,
                });
            }
        }
    }
    let (ext, start) = best.expect("n >= 1");
    let witness = memo.reconstruct(start);
    debug_assert_eq!(witness.len(), ext as usize + 1);
    Ok(SearchResult {
        length: ext as usize,
        witness,
        exhaustive: true,
    })
}

/// Plain enumeration of every valid sequence, without memoization. Shares
/// nothing with [`longest_path_power`] beyond orientation queries; exists to
/// cross-check it.
pub fn longest_path_power_brute(t: &Tournament, k: usize) -> SearchResult {
    fn dfs(t: &Tournament, k: usize, seq: &mut Vec<Vertex>, used: &mut [bool], best: &mut Vec<Vertex>) {
        if seq.len() > best.len() {
            *best = seq.clone();
        }
        for w in 0..t.n() {
            if used[w] {
                continue;
            }
            let from = seq.len().saturating_sub(k);
            if seq[from..].iter().all(|&s| t.beats(s, w)) {
                used[w] = true;
                seq.push(w);
                dfs(t, k, seq, used, best);
                seq.pop();
                used[w] = false;
            }
        }
    }
    let mut best = Vec::new();
    let mut used = vec![false; t.n()];
    dfs(t, k, &mut Vec::new(), &mut used, &mut best);
    SearchResult {
        length: best.len().saturating_sub(1),
        witness: best,
        exhaustive: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EllScope {
    /// Every labelled tournament on `n` vertices.
    All,
    /// `count` random tournaments with seeds `seed, seed + 1, ...`.
    Sampled { count: u64, seed: u64 },
}

/// Largest `n` accepted by [`EllScope::All`].
pub const MAX_EXHAUSTIVE_N: usize = 6;

#[derive(Clone, Debug)]
pub struct EllResult {
    pub n: usize,
    pub k: usize,
    /// Exact `ℓ(n, k)` for [`EllScope::All`], else an upper bound.
    pub value: usize,
    /// True iff `value` is exact: every tournament was searched to completion.
    pub exhaustive: bool,
    /// A tournament whose longest `k`-th power has length `value`.
    pub witness: Tournament,
    pub witness_path: Vec<Vertex>,
    pub tournaments: u64,
}

/// Minimum over tournaments of the longest `k`-th power of a path.
///
/// Ties are broken toward the first tournament in enumeration order (orientation
/// code for `All`, seed for `Sampled`).
pub fn ell_exact(n: usize, k: usize, scope: EllScope) -> Result<EllResult> {
    if n == 0 || k == 0 {
        return Err(Error::Precondition("n and k must be at least 1".into()));
    }
    let pairs = pair_count(n);
    let (count, build): (u64, Box<dyn Fn(u64) -> Tournament + Sync>) = match scope {
        EllScope::All => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(Error::Precondition(format!(
                    "exhaustive enumeration for n={n} would need 2^{pairs} tournaments; limit is n <= {MAX_EXHAUSTIVE_N}"
                )));
            }
            (1u64 << pairs, Box::new(move |code| Tournament::from_code(n, code)))
        }
        EllScope::Sampled { count, seed } => {
            if n > MAX_SEARCH_N {
                return Err(Error::Precondition(format!("sampled search supports n <= {MAX_SEARCH_N}")));
            }
            (count, Box::new(move |i| gen_random(n, seed.wrapping_add(i))))
        }
    };
    if count == 0 {
        return Err(Error::Precondition("no tournaments to search".into()));
    }
    let (best, every_exhaustive) = (0..count)
        .into_par_iter()
        .map(|idx| {
            let t = build(idx);
            let r = longest_path_power(&t, k, DEFAULT_BUDGET)?;
            Ok::<_, Error>(((r.length, idx, r.witness), r.exhaustive))
        })
        .try_reduce_with(|(a, ea), (b, eb)| {
            let min = if (b.0, b.1) < (a.0, a.1) { b } else { a };
            Ok((min, ea && eb))
        })
        .expect("count > 0")?;
    let exhaustive = every_exhaustive && scope == EllScope::All;
    let (value, idx, witness_path) = best;
    Ok(EllResult {
        n,
        k,
        value,
        exhaustive,
        witness: build(idx),
        witness_path,
        tournaments: count,
    })
}
