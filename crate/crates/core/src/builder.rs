//! Chains extraction steps into disjoint transitive blocks `X_0, ..., X_j`
//! with every edge from `X_m` to `X_{m+1}` pointing forward. Concatenating the
//! blocks gives a `k`-th power of a directed path with `(j+1) k` vertices.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::{
    certify_params, extract_step, find_transitive, is_transitive_in_order, AuditLine,
    FailureReport, Stage, StepOutcome,
};
use crate::oracle::verify_path_power;
use crate::ordering::{clean_window, forward_edge_count, local_search, Ordering, SearchPolicy};
use crate::params::{LemmaParams, Mode};
use crate::tournament::{pair_count, Tournament, Vertex};

/// How the vertex ordering is prepared before and during a build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Local search to convergence up front; every window is then clean.
    Converge,
    /// Identity ordering; each visited window is repaired on demand.
    Lazy,
    /// A bounded number of local-search passes, then on-demand repair.
    Passes(usize),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Converge => f.write_str("converge"),
            Strategy::Lazy => f.write_str("lazy"),
            Strategy::Passes(m) => write!(f, "passes={m}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "converge" => Ok(Strategy::Converge),
            "lazy" => Ok(Strategy::Lazy),
            _ => s
                .strip_prefix("passes=")
                .and_then(|m| m.parse().ok())
                .map(Strategy::Passes)
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "unknown strategy {s:?} (expected converge, lazy or passes=<m>)"
                    ))
                }),
        }
    }
}

/// `r`, `t` and `W` as stored in certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowParams {
    pub r: usize,
    pub t: usize,
    #[serde(rename = "W")]
    pub windows: usize,
}

/// Largest `n` for which certificates record the absolute forward-edge count.
pub const FORWARD_COUNT_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPowerCertificate {
    pub n: usize,
    pub k: usize,
    pub params: WindowParams,
    pub mode: Mode,
    /// `i_0, ..., i_j`.
    pub window_starts: Vec<usize>,
    /// `X_0, ..., X_j`, each in dominance order.
    pub blocks: Vec<Vec<Vertex>>,
    /// Concatenation of `blocks`.
    pub sequence: Vec<Vertex>,
    pub ordering_digest: u64,
    /// Edge count of `sequence`.
    pub length: usize,
    pub paper_bound: usize,
    pub satisfied: bool,
    /// Seed set `U_m` each block was drawn from.
    pub seed_sets: Vec<Vec<Vertex>>,
    pub strategy: String,
    pub tournament: String,
    /// Forward edges of the final ordering; omitted above [`FORWARD_COUNT_LIMIT`].
    pub forward_edges: Option<u64>,
    /// Forward edges gained by local search and repairs.
    pub forward_gain: u64,
    pub repairs: u64,
}

impl PathPowerCertificate {
    pub fn step_params(&self) -> Result<LemmaParams> {
        LemmaParams::new(self.k, self.params.r, self.params.t, self.params.windows)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBound {
    pub length: usize,
    pub paper_bound: usize,
    pub satisfied: bool,
}

/// Target length for a build: `ceil(n / 2^(6k+7))` for the certified default parameters,
/// otherwise `k (floor((n - W t) / ((W-1) t)) + 1) - 1`.
pub fn length_target(n: usize, params: &LemmaParams) -> usize {
    if params.is_default_instance() {
        let denom = 1u128.checked_shl(6 * params.k as u32 + 7).unwrap_or(u128::MAX);
        (n as u128).div_ceil(denom) as usize
    } else {
        let steps = n.saturating_sub(params.span()) / params.target_span();
        params.k * (steps + 1) - 1
    }
}

pub fn certificate_length_bound(cert: &PathPowerCertificate) -> Result<LengthBound> {
    let params = cert.step_params()?;
    let length = (cert.blocks.len() * cert.k).saturating_sub(1);
    let paper_bound = length_target(cert.n, &params);
    Ok(LengthBound {
        length,
        paper_bound,
        satisfied: length >= paper_bound,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub ordering_passes: usize,
    pub repairs: u64,
    pub forward_gain: u64,
    /// Seed vertices replaced after a repair moved them out of their window.
    pub refills: u64,
    /// Times a thinned-out target window was skipped for the next one.
    pub window_advances: u64,
}

/// Up to `want` vertices of `V[i, i+width)`, in position order, that are
/// unpinned, not already in `have` and beaten by every vertex of `prev`.
#[allow(clippy::too_many_arguments)]
fn common_in_window(
    t: &Tournament,
    ord: &Ordering,
    i: usize,
    width: usize,
    prev: &[Vertex],
    pinned: &HashSet<Vertex>,
    have: &[Vertex],
    want: usize,
) -> Vec<Vertex> {
    ord.window(i, i + width)
        .iter()
        .copied()
        .filter(|v| !have.contains(v) && !pinned.contains(v))
        .filter(|&v| prev.iter().all(|&x| t.beats(x, v)))
        .take(want)
        .collect()
}

#[derive(Clone, Debug)]
pub enum BuildResult {
    Success(Box<PathPowerCertificate>),
    Failed { step: usize, report: FailureReport },
}

#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub result: BuildResult,
    pub ordering: Ordering,
    pub stats: BuildStats,
}

impl BuildOutcome {
    pub fn certificate(&self) -> Option<&PathPowerCertificate> {
        match &self.result {
            BuildResult::Success(c) => Some(c),
            BuildResult::Failed { .. } => None,
        }
    }
}

/// Runs the block-chaining construction on `t`.
///
/// Starting from window `0` with seed set `V[0, r)`, each step cleans the
/// current window, extracts a block and picks the next window and seed set.
/// The loop stops at the first window start beyond `n - W t`; the last block
/// is a transitive `k`-set inside the final seed set.
pub fn build_path_power(
    t: &Tournament,
    params: &LemmaParams,
    mode: Mode,
    strategy: Strategy,
) -> Result<BuildOutcome> {
    build_from(t, params, mode, strategy, Ordering::identity(t.n()))
}

/// [`build_path_power`] with an explicit starting ordering.
pub fn build_from(
    t: &Tournament,
    params: &LemmaParams,
    mode: Mode,
    strategy: Strategy,
    mut ord: Ordering,
) -> Result<BuildOutcome> {
    params.validate()?;
    let n = t.n();
    let LemmaParams { k, r, t: width, .. } = *params;
    if ord.len() != n {
        return Err(Error::Precondition(format!("ordering has {} vertices, n = {n}", ord.len())));
    }
    if n < params.span() {
        return Err(Error::Precondition(format!(
            "need n >= W*t = {}, got n = {n}",
            params.span()
        )));
    }
    if mode == Mode::Guaranteed && !certify_params(params).guaranteed {
        return Err(Error::Precondition(format!(
            "parameters k={k} r={r} t={width} W={} are not certified for guaranteed mode",
            params.windows
        )));
    }

    let mut stats = BuildStats::default();
    match strategy {
        Strategy::Converge => {
            let s = local_search(t, &mut ord, SearchPolicy::ToConvergence);
            stats.ordering_passes = s.passes;
            stats.forward_gain = s.gain;
        }
        Strategy::Passes(m) => {
            let s = local_search(t, &mut ord, SearchPolicy::MaxPasses(m));
            stats.ordering_passes = s.passes;
            stats.forward_gain = s.gain;
        }
        Strategy::Lazy => {}
    }

    let last_start = n - params.span();
    let mut repair_budget = pair_count(n);
    let mut pinned: HashSet<Vertex> = HashSet::new();
    let mut blocks: Vec<Vec<Vertex>> = Vec::new();
    let mut starts: Vec<usize> = Vec::new();
    let mut seed_sets: Vec<Vec<Vertex>> = Vec::new();
    let mut i = 0;
    let mut seed: Vec<Vertex> = Vec::new();

    let failed = |step: usize, stage: Stage, detail: String, ord: Ordering, stats: BuildStats| {
        Ok(BuildOutcome {
            result: BuildResult::Failed {
                step,
                report: FailureReport { stage, detail },
            },
            ordering: ord,
            stats,
        })
    };

    while i <= last_start {
        let step = blocks.len();
        let cleaned = clean_window(t, &mut ord, i, params, &pinned, repair_budget)?;
        if strategy == Strategy::Converge && cleaned.repairs > 0 {
            return Err(Error::Contract(format!(
                "converged ordering needed {} repairs at window {i}",
                cleaned.repairs
            )));
        }
        repair_budget -= cleaned.repairs;
        stats.repairs += cleaned.repairs;
        stats.forward_gain += cleaned.gain;

        if step == 0 {
            seed = ord.window(0, r).to_vec();
        } else {
            let before = seed.len();
            seed.retain(|&v| (i..i + width).contains(&ord.position(v)));
            let lost = before - seed.len();
            let refill = common_in_window(t, &ord, i, width, &blocks[step - 1], &pinned, &seed, r - seed.len());
            stats.refills += refill.len().min(lost) as u64;
            seed.extend(refill);
            if seed.len() < r {
                // Repairs thinned this window out; a later target window may still work.
                if i + width - starts[step - 1] <= params.target_span() {
                    i += width;
                    seed.clear();
                    stats.window_advances += 1;
                    continue;
                }
                let detail = format!(
                    "window {i} holds only {} common out-neighbours of the previous block after repair",
                    seed.len()
                );
                if mode == Mode::Guaranteed {
                    return Err(Error::Contract(detail));
                }
                return failed(step, Stage::WindowRepair, detail, ord, stats);
            }
        }
        if seed.iter().any(|v| pinned.contains(v)) {
            return Err(Error::Contract(format!("seed set at window {i} contains a pinned vertex")));
        }

        let witness = match extract_step(t, &ord, i, &seed, params, &pinned, mode)? {
            StepOutcome::Witness(w) => w,
            StepOutcome::Failed(report) => {
                return failed(step, report.stage, report.detail, ord, stats);
            }
        };
        pinned.extend(witness.block.iter().copied());
        blocks.push(witness.block);
        starts.push(i);
        seed_sets.push(std::mem::take(&mut seed));
        i = witness.next_start;
        seed = witness.next_seed;
    }

    // The final window is never repaired. Its seed set is complete unless the
    // loop above advanced past the window chosen by the last step.
    let step = blocks.len();
    while seed.len() < r {
        let prev_start = *starts.last().expect("at least one step ran");
        let more = common_in_window(t, &ord, i, width, &blocks[step - 1], &pinned, &seed, r - seed.len());
        seed.extend(more);
        if seed.len() < r {
            if i + width - prev_start > params.target_span() {
                let detail = format!("final window {i} holds only {} seeds", seed.len());
                if mode == Mode::Guaranteed {
                    return Err(Error::Contract(detail));
                }
                return failed(step, Stage::WindowRepair, detail, ord, stats);
            }
            i += width;
            seed.clear();
            stats.window_advances += 1;
        }
    }
    let Some(last) = find_transitive(t, &seed, k) else {
        let detail = format!("no transitive {k}-set among the final {} seeds", seed.len());
        if mode == Mode::Guaranteed {
            return Err(Error::Contract(detail));
        }
        return failed(step, Stage::FinalBlock, detail, ord, stats);
    };
    blocks.push(last);
    starts.push(i);
    seed_sets.push(seed);

    // i_j > n - W t and i_j <= (W-1) j t, hence j > n / (W t) - 1.
    let j = blocks.len() - 1;
    let final_start = *starts.last().expect("at least one block");
    if final_start <= last_start || final_start > params.target_span() * j {
        return Err(Error::Contract(format!(
            "stop accounting broken: i_j = {final_start}, j = {j}, n - W t = {last_start}"
        )));
    }
    if ((j + 1) * params.span()) as u128 <= n as u128 {
        return Err(Error::Contract(format!("j = {j} does not exceed n/(W t) - 1")));
    }

    let sequence: Vec<Vertex> = blocks.iter().flatten().copied().collect();
    let length = sequence.len() - 1;
    let paper_bound = length_target(n, params);
    let cert = PathPowerCertificate {
        n,
        k,
        params: WindowParams {
            r,
            t: width,
            windows: params.windows,
        },
        mode,
        window_starts: starts,
        blocks,
        sequence,
        ordering_digest: ord.digest(),
        length,
        paper_bound,
        satisfied: length >= paper_bound,
        seed_sets,
        strategy: strategy.to_string(),
        tournament: t.descriptor(),
        forward_edges: (n <= FORWARD_COUNT_LIMIT).then(|| forward_edge_count(t, &ord)),
        forward_gain: stats.forward_gain,
        repairs: stats.repairs,
    };
    if mode == Mode::Guaranteed && !cert.satisfied {
        return Err(Error::Contract(format!(
            "guaranteed build reached length {length} below the bound {paper_bound}"
        )));
    }
    Ok(BuildOutcome {
        result: BuildResult::Success(Box::new(cert)),
        ordering: ord,
        stats,
    })
}

/// Independent audit of a certificate from raw orientation queries.
///
/// With `ord`, also checks the ordering digest and that each seed set lies in
/// its window. The final ordering fixes every block's position, since repairs
/// only ever move vertices at or after the window being repaired.
pub fn audit_certificate(
    t: &Tournament,
    cert: &PathPowerCertificate,
    ord: Option<&Ordering>,
) -> Result<Vec<AuditLine>> {
    let params = cert.step_params()?;
    let k = cert.k;
    let mut lines = Vec::new();

    lines.push(AuditLine::new(
        "tournament-size",
        t.n() == cert.n,
        format!("certificate n = {}, tournament n = {}", cert.n, t.n()),
    ));
    if t.n() != cert.n {
        return Ok(lines);
    }
    let in_range = cert.blocks.iter().flatten().all(|&v| v < t.n())
        && cert.seed_sets.iter().flatten().all(|&v| v < t.n());
    lines.push(AuditLine::new("vertex-range", in_range, "all ids below n"));
    if !in_range {
        return Ok(lines);
    }

    let blocks = &cert.blocks;
    let j1 = blocks.len();
    let sizes_ok = j1 > 0 && blocks.iter().all(|b| b.len() == k);
    lines.push(AuditLine::new(
        "block-size",
        sizes_ok,
        format!("{j1} blocks, {} of size k = {k}", blocks.iter().filter(|b| b.len() == k).count()),
    ));

    let flat: Vec<Vertex> = blocks.iter().flatten().copied().collect();
    let distinct = flat.iter().collect::<HashSet<_>>().len();
    lines.push(AuditLine::new(
        "disjoint",
        distinct == flat.len(),
        format!("{distinct} distinct of {} block vertices", flat.len()),
    ));

    let transitive = blocks.iter().filter(|b| is_transitive_in_order(t, b)).count();
    lines.push(AuditLine::new(
        "transitive",
        transitive == j1,
        format!("{transitive} of {j1} blocks transitive in stored order"),
    ));

    let forward_links = blocks
        .windows(2)
        .filter(|w| w[0].iter().all(|&x| w[1].iter().all(|&y| x != y && t.beats(x, y))))
        .count();
    lines.push(AuditLine::new(
        "inter-block-forward",
        forward_links + 1 == j1.max(1),
        format!("{forward_links} of {} consecutive pairs fully forward", j1.saturating_sub(1)),
    ));

    let seq_ok = cert.sequence == flat;
    let len_ok = cert.length + 1 == flat.len() && cert.length == (j1 * k).saturating_sub(1);
    lines.push(AuditLine::new(
        "sequence",
        seq_ok && len_ok,
        format!(
            "sequence matches blocks: {seq_ok}; length {} for (j+1)k = {} vertices",
            cert.length,
            j1 * k
        ),
    ));

    let violations = verify_path_power(t, &cert.sequence, k);
    let (pp_ok, pp_detail) = match &violations {
        Ok(v) if v.is_empty() => (true, "all pairs within distance k forward".to_owned()),
        Ok(v) => (false, format!("{} backward pairs, first at {:?}", v.len(), v[0])),
        Err(e) => (false, e.to_string()),
    };
    lines.push(AuditLine::new("path-power", pp_ok, pp_detail));

    let st = &cert.window_starts;
    let steps_ok = st.len() == j1
        && st.first() == Some(&0)
        && st.windows(2).all(|w| {
            w[1] > w[0] && (w[1] - w[0]) % params.t == 0 && (w[1] - w[0]) / params.t < params.windows
        });
    let last_start = cert.n.checked_sub(params.span());
    let stop_ok = match (st.split_last(), last_start) {
        (Some((last, rest)), Some(ls)) => *last > ls && rest.iter().all(|&s| s <= ls),
        _ => false,
    };
    lines.push(AuditLine::new(
        "window-starts",
        steps_ok && stop_ok,
        format!("increments in {{t..(W-1)t}}: {steps_ok}; stop rule i_j > n - W t: {stop_ok}"),
    ));

    let seeds = &cert.seed_sets;
    let seeds_sized = seeds.len() == j1 && seeds.iter().all(|s| s.len() == params.r);
    let blocks_in_seeds = seeds.len() == j1
        && blocks
            .iter()
            .zip(seeds)
            .all(|(b, s)| b.iter().all(|v| s.contains(v)));
    let seeds_dominated = seeds.len() == j1
        && (1..j1).all(|m| {
            seeds[m]
                .iter()
                .all(|&u| blocks[m - 1].iter().all(|&x| x != u && t.beats(x, u)))
        });
    lines.push(AuditLine::new(
        "seed-sets",
        seeds_sized && blocks_in_seeds && seeds_dominated,
        format!(
            "|U_m| = r: {seeds_sized}; X_m within U_m: {blocks_in_seeds}; \
             U_m+1 in common out-neighbourhood of X_m: {seeds_dominated}"
        ),
    ));

    let bound = certificate_length_bound(cert)?;
    let bound_ok = bound.paper_bound == cert.paper_bound
        && bound.satisfied == cert.satisfied
        && (cert.mode == Mode::Heuristic || bound.satisfied);
    lines.push(AuditLine::new(
        "length-bound",
        bound_ok,
        format!(
            "length {} vs bound {} (satisfied: {})",
            bound.length, bound.paper_bound, bound.satisfied
        ),
    ));

    if let Some(ord) = ord {
        let digest_ok = ord.len() == cert.n && ord.digest() == cert.ordering_digest;
        lines.push(AuditLine::new(
            "ordering-digest",
            digest_ok,
            format!("{:#018x} vs {:#018x}", ord.digest(), cert.ordering_digest),
        ));
        if digest_ok && st.len() == seeds.len() {
            let placed = st
                .iter()
                .zip(seeds)
                .all(|(&i, s)| s.iter().all(|&u| (i..i + params.t).contains(&ord.position(u))));
            lines.push(AuditLine::new(
                "window-membership",
                placed,
                "every U_m inside V[i_m, i_m + t)",
            ));
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{gen_implicit, gen_random, gen_transitive};

    #[test]
    fn strategy_parse() {
        assert_eq!("lazy".parse::<Strategy>().unwrap(), Strategy::Lazy);
        assert_eq!("passes=3".parse::<Strategy>().unwrap(), Strategy::Passes(3));
        assert_eq!(Strategy::Passes(3).to_string(), "passes=3");
        assert!("passes=x".parse::<Strategy>().is_err());
    }

    #[test]
    fn length_arithmetic() {
        let p = LemmaParams::default_for(2).unwrap();
        assert_eq!(length_target(1 << 20, &p), 2);
        let p = LemmaParams::new(2, 8, 64, 100).unwrap();
        // floor((50000 - 6400) / 6336) = 6
        assert_eq!(length_target(50_000, &p), 2 * 7 - 1);
    }

    #[test]
    fn transitive_build() {
        let n = 1 << 16;
        let p = LemmaParams::new(2, 8, 64, 100).unwrap();
        let t = gen_transitive(n);
        let out = build_path_power(&t, &p, Mode::Heuristic, Strategy::Lazy).unwrap();
        let cert = out.certificate().expect("transitive build succeeds");
        assert_eq!(cert.blocks[0], vec![0, 1]);
        assert_eq!(cert.window_starts[1], 64);
        assert_eq!(cert.blocks[1], vec![64, 65]);
        assert_eq!(out.stats.repairs, 0);
        let lines = audit_certificate(&t, cert, Some(&out.ordering)).unwrap();
        assert!(lines.iter().all(|l| l.pass), "{lines:#?}");
        let j = cert.blocks.len() - 1;
        assert_eq!(cert.length, (j + 1) * 2 - 1);
        assert!(cert.satisfied);
    }

    #[test]
    fn heuristic_build_on_random() {
        let p = LemmaParams::new(2, 4, 16, 10).unwrap();
        let t = gen_random(2000, 3);
        let out = build_path_power(&t, &p, Mode::Heuristic, Strategy::Lazy).unwrap();
        if let Some(cert) = out.certificate() {
            let lines = audit_certificate(&t, cert, Some(&out.ordering)).unwrap();
            assert!(lines.iter().all(|l| l.pass), "{lines:#?}");
            assert!(cert.forward_edges.is_some());
        }
    }

    #[test]
    fn converge_build_needs_no_repairs() {
        let p = LemmaParams::new(2, 4, 16, 10).unwrap();
        let t = gen_random(600, 8);
        let out = build_path_power(&t, &p, Mode::Heuristic, Strategy::Converge).unwrap();
        assert_eq!(out.stats.repairs, 0);
        if let Some(cert) = out.certificate() {
            assert!(audit_certificate(&t, cert, Some(&out.ordering)).unwrap().iter().all(|l| l.pass));
        }
    }

    #[test]
    fn preconditions() {
        let p = LemmaParams::new(2, 4, 16, 10).unwrap();
        let t = gen_random(100, 3);
        assert!(matches!(
            build_path_power(&t, &p, Mode::Heuristic, Strategy::Lazy),
            Err(Error::Precondition(_))
        ));
        let t = gen_implicit(5000, 1);
        let err = build_path_power(&t, &p, Mode::Guaranteed, Strategy::Lazy).unwrap_err();
        assert!(err.to_string().contains("not certified"), "{err}");
    }

    #[test]
    fn audit_rejects_tampered_certificate() {
        let p = LemmaParams::new(2, 4, 16, 10).unwrap();
        let t = gen_random(1200, 5);
        let out = build_path_power(&t, &p, Mode::Heuristic, Strategy::Converge).unwrap();
        let mut cert = out.certificate().expect("build succeeds").clone();
        cert.blocks[1].swap(0, 1);
        cert.sequence = cert.blocks.concat();
        let lines = audit_certificate(&t, &cert, Some(&out.ordering)).unwrap();
        assert!(lines.iter().any(|l| !l.pass));
    }

    #[test]
    fn certificate_json_fields() {
        let p = LemmaParams::new(1, 2, 4, 3).unwrap();
        let t = gen_transitive(40);
        let out = build_path_power(&t, &p, Mode::Heuristic, Strategy::Lazy).unwrap();
        let cert = out.certificate().unwrap();
        let v: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        for field in [
            "n", "k", "params", "mode", "window_starts", "blocks", "sequence",
            "ordering_digest", "length", "paper_bound", "satisfied",
        ] {
            assert!(v.get(field).is_some(), "missing {field}");
        }
        assert_eq!(v["params"], serde_json::json!({"r": 2, "t": 4, "W": 3}));
        assert_eq!(v["mode"], "heuristic");
        assert_eq!(PathPowerCertificate::from_json(&cert.to_json().unwrap()).unwrap(), *cert);
    }
}
