//! Vertex orderings, forward-edge accounting and single-vertex relocation search.
//!
//! An edge is *forward* under an ordering when it points from the earlier to
//! the later position. The proof machinery only needs orderings that cannot be
//! improved by relocating one vertex, so that is what [`local_search`] produces.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::params::LemmaParams;
use crate::tournament::{Tournament, Vertex};

/// A permutation of `0..n` together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    perm: Vec<Vertex>,
    pos: Vec<usize>,
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Ordering {
            perm: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn reversed(n: usize) -> Self {
        Self::from_perm((0..n).rev().collect()).expect("reversal is a permutation")
    }

    pub fn shuffled(n: usize, seed: u64) -> Self {
        let mut perm: Vec<Vertex> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::from_perm(perm).expect("shuffle is a permutation")
    }

    pub fn from_perm(perm: Vec<Vertex>) -> Result<Self> {
        let n = perm.len();
        let mut pos = vec![usize::MAX; n];
        for (p, &v) in perm.iter().enumerate() {
            if v >= n {
                return Err(Error::Precondition(format!("vertex {v} out of range for n={n}")));
            }
            if pos[v] != usize::MAX {
                return Err(Error::Precondition(format!("vertex {v} appears twice")));
            }
            pos[v] = p;
        }
        Ok(Ordering { perm, pos })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    #[inline]
    pub fn vertex_at(&self, p: usize) -> Vertex {
        self.perm[p]
    }

    #[inline]
    pub fn position(&self, v: Vertex) -> usize {
        self.pos[v]
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.perm
    }

    /// `V[start, end)`: the vertices occupying positions `start..end`.
    pub fn window(&self, start: usize, end: usize) -> &[Vertex] {
        &self.perm[start..end]
    }

    /// Moves the vertex at position `from` to position `to`, shifting the
    /// vertices in between by one toward `from`.
    pub fn relocate(&mut self, from: usize, to: usize) {
        if from < to {
            self.perm[from..=to].rotate_left(1);
        } else if to < from {
            self.perm[to..=from].rotate_right(1);
        }
        let (lo, hi) = (from.min(to), from.max(to));
        for p in lo..=hi {
            self.pos[self.perm[p]] = p;
        }
    }

    /// FNV-1a over the little-endian `u64` encoding of the permutation.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for &v in &self.perm {
            for b in (v as u64).to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }

    pub fn to_ord(&self) -> String {
        let body: Vec<String> = self.perm.iter().map(|v| v.to_string()).collect();
        format!("ORD 1\nn={}\n{}\n", self.len(), body.join(" "))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim_end) != Some("ORD 1") {
            return Err(parse_err(1, 1, "expected header \"ORD 1\""));
        }
        let nline = lines.next().ok_or_else(|| parse_err(2, 1, "missing n= line"))?;
        let n: usize = nline
            .trim_end()
            .strip_prefix("n=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(2, 1, "expected n=<decimal>"))?;
        let body = lines.next().unwrap_or("");
        let mut perm = Vec::with_capacity(n);
        let mut col = 1;
        for tok in body.split(' ') {
            if !tok.is_empty() {
                let v = tok
                    .parse()
                    .map_err(|_| parse_err(3, col, format!("bad vertex {tok:?}")))?;
                perm.push(v);
            }
            col += tok.len() + 1;
        }
        if perm.len() != n {
            return Err(parse_err(3, 1, format!("expected {n} vertices, found {}", perm.len())));
        }
        Ordering::from_perm(perm).map_err(|e| parse_err(3, 1, e.to_string()))
    }
}

pub fn read_ordering(path: impl AsRef<Path>) -> Result<Ordering> {
    Ordering::parse(&fs::read_to_string(path)?)
}

pub fn write_ordering(ord: &Ordering, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, ord.to_ord())?;
    Ok(())
}

/// Number of position pairs `p < q` whose edge points from `perm[p]` to `perm[q]`.
pub fn forward_edge_count(t: &Tournament, ord: &Ordering) -> u64 {
    let perm = ord.as_slice();
    (0..perm.len())
        .map(|p| t.count_beaten(perm[p], &perm[p + 1..]) as u64)
        .sum()
}

/// Change in forward-edge count if the vertex `v` moves to position `target`.
/// Costs one orientation query per vertex strictly between the two slots.
pub fn relocation_gain(t: &Tournament, ord: &Ordering, v: Vertex, target: usize) -> i64 {
    let p = ord.position(v);
    let perm = ord.as_slice();
    if target > p {
        let span = &perm[p + 1..=target];
        span.len() as i64 - 2 * t.count_beaten(v, span) as i64
    } else if target < p {
        let span = &perm[target..p];
        2 * t.count_beaten(v, span) as i64 - span.len() as i64
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchPolicy {
    ToConvergence,
    MaxPasses(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub passes: usize,
    pub moves: usize,
    /// Total forward edges gained.
    pub gain: u64,
    pub converged: bool,
}

/// First improving relocation for the vertex at `p`, scanning targets by
/// increasing distance (right before left at equal distance).
fn first_improving_target(t: &Tournament, perm: &[Vertex], p: usize) -> Option<(usize, i64)> {
    let v = perm[p];
    let n = perm.len();
    let (mut right, mut left) = (0i64, 0i64);
    for d in 1..n.max(1) {
        let mut any = false;
        if p + d < n {
            any = true;
            right += if t.beats(v, perm[p + d]) { -1 } else { 1 };
            if right > 0 {
                return Some((p + d, right));
            }
        }
        if d <= p {
            any = true;
            left += if t.beats(v, perm[p - d]) { 1 } else { -1 };
            if left > 0 {
                return Some((p - d, left));
            }
        }
        if !any {
            break;
        }
    }
    None
}

/// Single-vertex relocation hill climbing. Positions are visited left to right
/// and the first strictly improving move for each is accepted; zero-gain moves
/// are never taken, so every accepted move raises the forward-edge count.
pub fn local_search(t: &Tournament, ord: &mut Ordering, policy: SearchPolicy) -> SearchStats {
    let n = ord.len();
    let mut stats = SearchStats::default();
    loop {
        if let SearchPolicy::MaxPasses(m) = policy {
            if stats.passes >= m {
                break;
            }
        }
        stats.passes += 1;
        let mut moved = false;
        for p in 0..n {
            if let Some((target, gain)) = first_improving_target(t, ord.as_slice(), p) {
                ord.relocate(p, target);
                stats.moves += 1;
                stats.gain += gain as u64;
                moved = true;
            }
        }
        if !moved {
            stats.converged = true;
            break;
        }
    }
    stats
}

/// Some relocation with positive gain, if any exists. Exhaustive over all
/// `n * n` (vertex, target) pairs using running sums.
pub fn find_improving_move(t: &Tournament, ord: &Ordering) -> Option<(Vertex, usize, i64)> {
    let perm = ord.as_slice();
    (0..perm.len()).find_map(|p| {
        let mut best: Option<(usize, i64)> = None;
        for (target, gain) in gains_from(t, perm, p) {
            if gain > 0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((target, gain));
            }
        }
        best.map(|(target, gain)| (perm[p], target, gain))
    })
}

fn gains_from<'a>(
    t: &'a Tournament,
    perm: &'a [Vertex],
    p: usize,
) -> impl Iterator<Item = (usize, i64)> + 'a {
    let v = perm[p];
    let right = (p + 1..perm.len()).scan(0i64, move |acc, q| {
        *acc += if t.beats(v, perm[q]) { -1 } else { 1 };
        Some((q, *acc))
    });
    let left = (0..p).rev().scan(0i64, move |acc, q| {
        *acc += if t.beats(v, perm[q]) { 1 } else { -1 };
        Some((q, *acc))
    });
    right.chain(left)
}

/// Window-vertex out-degrees into the target span `B = V[i+t, i+W t)`.
fn window_degrees(t: &Tournament, ord: &Ordering, i: usize, params: &LemmaParams) -> Vec<usize> {
    use rayon::prelude::*;
    let b = ord.window(i + params.t, i + params.span());
    ord.window(i, i + params.t)
        .par_iter()
        .map(|&v| t.count_beaten(v, b))
        .collect()
}

fn check_range(n: usize, i: usize, params: &LemmaParams) -> Result<()> {
    if i + params.span() > n {
        return Err(Error::Precondition(format!(
            "window start {i} out of range: need i + W*t = {} <= n = {n}",
            i + params.span()
        )));
    }
    Ok(())
}

/// Vertices of `V[i, i+t)` with fewer than `params.degree_threshold()`
/// out-neighbours in `V[i+t, i+W t)`, in position order.
pub fn check_window_degree(
    t: &Tournament,
    ord: &Ordering,
    i: usize,
    params: &LemmaParams,
) -> Result<Vec<Vertex>> {
    check_range(ord.len(), i, params)?;
    let theta = params.degree_threshold();
    let degs = window_degrees(t, ord, i, params);
    Ok(ord
        .window(i, i + params.t)
        .iter()
        .zip(degs)
        .filter(|&(_, d)| d < theta)
        .map(|(&v, _)| v)
        .collect())
}

/// Result of one [`repair_window`] call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Repair {
    pub moved: Option<Vertex>,
    pub gain: i64,
}

/// Moves the first violating vertex of window `i` to the last position of its
/// target span. Errors if any violating vertex is pinned.
pub fn repair_window(
    t: &Tournament,
    ord: &mut Ordering,
    i: usize,
    params: &LemmaParams,
    pinned: &HashSet<Vertex>,
) -> Result<Repair> {
    let violators = check_window_degree(t, ord, i, params)?;
    if let Some(v) = violators.iter().find(|v| pinned.contains(v)) {
        return Err(Error::Contract(format!(
            "pinned vertex {v} violates the degree threshold in window {i}"
        )));
    }
    let Some(&v) = violators.first() else {
        return Ok(Repair { moved: None, gain: 0 });
    };
    let target = i + params.span() - 1;
    let gain = relocation_gain(t, ord, v, target);
    if gain <= 0 {
        return Err(Error::Contract(format!(
            "relocating violator {v} gained {gain} forward edges"
        )));
    }
    ord.relocate(ord.position(v), target);
    Ok(Repair { moved: Some(v), gain })
}

/// Summary of a [`clean_window`] run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CleanStats {
    pub repairs: u64,
    pub gain: u64,
}

/// Repeats [`repair_window`] on window `i` until no vertex violates the degree
/// threshold. Degrees are maintained incrementally, so each repair after the
/// first scan costs `O(W t)` queries. `budget` caps the number of repairs.
pub fn clean_window(
    t: &Tournament,
    ord: &mut Ordering,
    i: usize,
    params: &LemmaParams,
    pinned: &HashSet<Vertex>,
    budget: u64,
) -> Result<CleanStats> {
    check_range(ord.len(), i, params)?;
    let theta = params.degree_threshold();
    let width = params.t;
    let end = i + params.span();
    let mut degs = window_degrees(t, ord, i, params);
    let mut stats = CleanStats::default();
    while let Some(off) = degs.iter().position(|&d| d < theta) {
        let v = ord.vertex_at(i + off);
        if pinned.contains(&v) {
            return Err(Error::Contract(format!(
                "pinned vertex {v} violates the degree threshold in window {i}"
            )));
        }
        if stats.repairs >= budget {
            return Err(Error::Contract(format!(
                "repair budget of {budget} exhausted in window {i}"
            )));
        }
        let gain = relocation_gain(t, ord, v, end - 1);
        if gain <= 0 {
            return Err(Error::Contract(format!(
                "relocating violator {v} gained {gain} forward edges"
            )));
        }
        let entered = ord.vertex_at(i + width);
        ord.relocate(i + off, end - 1);
        degs.remove(off);
        for (o, d) in degs.iter_mut().enumerate() {
            let w = ord.vertex_at(i + o);
            *d = *d + t.beats(w, v) as usize - t.beats(w, entered) as usize;
        }
        degs.push(t.count_beaten(entered, ord.window(i + width, end)));
        stats.repairs += 1;
        stats.gain += gain as u64;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{gen_random, gen_transitive, three_cycle};

    fn brute_forward(t: &Tournament, ord: &Ordering) -> u64 {
        let perm = ord.as_slice();
        let mut c = 0;
        for p in 0..perm.len() {
            for q in p + 1..perm.len() {
                c += t.beats(perm[p], perm[q]) as u64;
            }
        }
        c
    }

    #[test]
    fn forward_counts() {
        let t = gen_transitive(6);
        assert_eq!(forward_edge_count(&t, &Ordering::identity(6)), 15);
        assert_eq!(forward_edge_count(&t, &Ordering::reversed(6)), 0);
        // Rotations of the cycle keep two edges forward, reversed rotations one.
        let c = three_cycle();
        for (perm, want) in [
            ([0, 1, 2], 2),
            ([1, 2, 0], 2),
            ([2, 0, 1], 2),
            ([0, 2, 1], 1),
            ([2, 1, 0], 1),
            ([1, 0, 2], 1),
        ] {
            let ord = Ordering::from_perm(perm.to_vec()).unwrap();
            assert_eq!(forward_edge_count(&c, &ord), want, "{perm:?}");
        }
    }

    #[test]
    fn relocation_examples() {
        let t = gen_transitive(4);
        let ord = Ordering::identity(4);
        assert_eq!(relocation_gain(&t, &ord, 0, 3), -3);
        for v in 0..4 {
            assert_eq!(relocation_gain(&t, &ord, v, v), 0);
            for q in 0..4 {
                assert!(relocation_gain(&t, &ord, v, q) <= 0);
            }
        }
    }

    #[test]
    fn relocation_gain_matches_recount() {
        use rand::Rng;
        let t = gen_random(30, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ord = Ordering::shuffled(30, 3);
        for _ in 0..100 {
            let v = rng.gen_range(0..30);
            let q = rng.gen_range(0..30);
            let before = brute_forward(&t, &ord) as i64;
            let gain = relocation_gain(&t, &ord, v, q);
            ord.relocate(ord.position(v), q);
            assert_eq!(ord.vertex_at(q), v);
            assert_eq!(brute_forward(&t, &ord) as i64 - before, gain);
        }
    }

    #[test]
    fn local_search_on_transitive() {
        let t = gen_transitive(20);
        let mut ord = Ordering::identity(20);
        let stats = local_search(&t, &mut ord, SearchPolicy::ToConvergence);
        assert_eq!(ord, Ordering::identity(20));
        assert_eq!(stats.moves, 0);
        assert_eq!(forward_edge_count(&t, &ord), 190);

        let mut ord = Ordering::reversed(20);
        local_search(&t, &mut ord, SearchPolicy::ToConvergence);
        assert_eq!(forward_edge_count(&t, &ord), 190);
    }

    #[test]
    fn local_search_converges_on_random() {
        let t = gen_random(200, 5);
        let mut ord = Ordering::identity(200);
        let start = forward_edge_count(&t, &ord);
        let stats = local_search(&t, &mut ord, SearchPolicy::ToConvergence);
        assert!(stats.converged);
        assert_eq!(forward_edge_count(&t, &ord), start + stats.gain);
        assert_eq!(find_improving_move(&t, &ord), None);
        for p in 0..199 {
            assert!(t.beats(ord.vertex_at(p), ord.vertex_at(p + 1)));
        }
    }

    #[test]
    fn max_passes_never_decreases() {
        let t = gen_random(120, 9);
        let mut ord = Ordering::shuffled(120, 1);
        let mut last = forward_edge_count(&t, &ord);
        for _ in 0..5 {
            let s = local_search(&t, &mut ord, SearchPolicy::MaxPasses(1));
            assert!(s.passes <= 1);
            let now = forward_edge_count(&t, &ord);
            assert!(now >= last);
            assert_eq!(now - last, s.gain);
            last = now;
        }
    }

    #[test]
    fn window_degree_examples() {
        let p = LemmaParams::new(1, 1, 4, 100).unwrap();
        let t = gen_transitive(1000);
        assert!(check_window_degree(&t, &Ordering::identity(1000), 0, &p)
            .unwrap()
            .is_empty());
        let rev = Ordering::reversed(1000);
        assert_eq!(check_window_degree(&t, &rev, 0, &p).unwrap().len(), 4);
        assert!(check_window_degree(&t, &rev, 601, &p).is_err());
    }

    #[test]
    fn window_clean_after_convergence() {
        let p = LemmaParams::new(1, 1, 4, 100).unwrap();
        let t = gen_random(500, 9);
        let mut ord = Ordering::identity(500);
        local_search(&t, &mut ord, SearchPolicy::ToConvergence);
        for i in [0, 50, 100] {
            assert!(check_window_degree(&t, &ord, i, &p).unwrap().is_empty());
        }
    }

    #[test]
    fn repair_examples() {
        let p = LemmaParams::new(1, 1, 4, 100).unwrap();
        let none = HashSet::new();

        let t = gen_transitive(500);
        let mut ord = Ordering::identity(500);
        let r = repair_window(&t, &mut ord, 0, &p, &none).unwrap();
        assert_eq!(r, Repair { moved: None, gain: 0 });
        assert_eq!(ord, Ordering::identity(500));

        let mut ord = Ordering::reversed(500);
        let before = forward_edge_count(&t, &ord);
        let r = repair_window(&t, &mut ord, 0, &p, &none).unwrap();
        assert_eq!(r.moved, Some(499));
        assert_eq!(ord.position(499), 399);
        assert_eq!(forward_edge_count(&t, &ord), before + r.gain as u64);
        assert!(r.gain > 0);

        let mut ord = Ordering::reversed(500);
        let pinned: HashSet<Vertex> = [499].into_iter().collect();
        assert!(matches!(
            repair_window(&t, &mut ord, 0, &p, &pinned),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn repair_to_fixpoint_terminates() {
        let p = LemmaParams::new(1, 1, 4, 100).unwrap();
        let t = gen_random(500, 9);
        let none = HashSet::new();
        let mut ord = Ordering::reversed(500);
        let mut count = forward_edge_count(&t, &ord);
        let mut iterations = 0u64;
        loop {
            let r = repair_window(&t, &mut ord, 0, &p, &none).unwrap();
            if r.moved.is_none() {
                break;
            }
            iterations += 1;
            let now = forward_edge_count(&t, &ord);
            assert!(now > count);
            count = now;
            assert!(iterations <= 500 * 499 / 2);
        }
        assert!(check_window_degree(&t, &ord, 0, &p).unwrap().is_empty());
    }

    #[test]
    fn clean_window_agrees_with_repeated_repair() {
        let p = LemmaParams::new(2, 4, 16, 10).unwrap();
        let t = gen_random(400, 21);
        let none = HashSet::new();
        let mut a = Ordering::shuffled(400, 2);
        let mut b = a.clone();
        let stats = clean_window(&t, &mut a, 32, &p, &none, u64::MAX).unwrap();
        let mut gain = 0;
        let mut repairs = 0;
        while let Repair { moved: Some(_), gain: g } = repair_window(&t, &mut b, 32, &p, &none).unwrap() {
            gain += g as u64;
            repairs += 1;
        }
        assert_eq!(a, b);
        assert_eq!((stats.repairs, stats.gain), (repairs, gain));
        assert!(check_window_degree(&t, &a, 32, &p).unwrap().is_empty());
    }

    #[test]
    fn ord_round_trip_and_errors() {
        let ord = Ordering::shuffled(17, 4);
        assert_eq!(Ordering::parse(&ord.to_ord()).unwrap(), ord);
        assert!(Ordering::parse("ORD 1\nn=3\n0 1 1\n").is_err());
        assert!(Ordering::parse("ORD 1\nn=3\n0 1\n").is_err());
        assert!(Ordering::parse("ORD 2\nn=1\n0\n").is_err());
        assert_ne!(ord.digest(), Ordering::identity(17).digest());
    }
}
