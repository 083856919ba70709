//! Tournament representations, deterministic generators and the TRN text format.
//!
//! A tournament on `n` vertices orients every unordered pair exactly once.
//! Two backings exist: an explicit packed upper triangle (one bit per pair,
//! row-major) and an implicit rule that recomputes a pair's orientation on
//! demand. The implicit form lets very large instances cost O(1) memory.
//!
//! # TRN format
//!
//! ```text
//! TRN 1
//! n=<decimal>
//! <n-1 rows; row i has n-1-i characters; char j is '1' iff i -> i+1+j>
//! ```
//!
//! Implicit tournaments are stored as a short descriptor:
//!
//! ```text
//! TRN-IMPLICIT 1
//! n=<decimal>
//! rule=splitmix64|transitive
//! seed=<decimal>
//! ```

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{parse_err, Error, Result};

pub type Vertex = usize;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `x` (including the initial gamma step).
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixed word for the unordered pair `{u, v}` under the `splitmix64` rule.
/// The lower-indexed vertex wins iff the lowest bit is 1.
#[inline]
pub fn splitmix_pair(seed: u64, u: Vertex, v: Vertex) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let x = seed ^ (a as u64).wrapping_mul(GOLDEN_GAMMA).wrapping_add(b as u64);
    splitmix64(x)
}

/// An orientation rule evaluated on demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Pair orientation from the low bit of [`splitmix_pair`].
    SplitMix64 { seed: u64 },
    /// `u -> v` iff `u < v`.
    Transitive,
}

impl Rule {
    #[inline]
    fn low_wins(&self, lo: Vertex, hi: Vertex) -> bool {
        match *self {
            Rule::SplitMix64 { seed } => splitmix_pair(seed, lo, hi) & 1 == 1,
            Rule::Transitive => true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::SplitMix64 { .. } => "splitmix64",
            Rule::Transitive => "transitive",
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            Rule::SplitMix64 { seed } => seed,
            Rule::Transitive => 0,
        }
    }
}

#[derive(Clone, Debug)]
enum Backing {
    Explicit(Vec<u64>),
    Implicit(Rule),
}

/// A directed edge `from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
}

#[derive(Clone, Debug)]
pub struct Tournament {
    n: usize,
    backing: Backing,
}

#[inline]
fn pair_index(n: usize, lo: usize, hi: usize) -> usize {
    lo * (2 * n - lo - 1) / 2 + (hi - lo - 1)
}

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

impl Tournament {
    /// Builds an explicit tournament from a predicate `lo_wins(lo, hi)` for `lo < hi`.
    pub fn from_fn(n: usize, mut lo_wins: impl FnMut(Vertex, Vertex) -> bool) -> Self {
        assert!(n >= 1, "a tournament needs at least one vertex");
        let pairs = pair_count(n) as usize;
        let mut bits = vec![0u64; pairs.div_ceil(64)];
        let mut idx = 0;
        for lo in 0..n {
            for hi in lo + 1..n {
                if lo_wins(lo, hi) {
                    bits[idx / 64] |= 1 << (idx % 64);
                }
                idx += 1;
            }
        }
        Tournament {
            n,
            backing: Backing::Explicit(bits),
        }
    }

    /// Explicit tournament whose packed pair bits are the low bits of `code`
    /// in row-major upper-triangle order. Used to enumerate all small tournaments.
    pub fn from_code(n: usize, code: u64) -> Self {
        assert!(pair_count(n) <= 64);
        Tournament {
            n,
            backing: Backing::Explicit(vec![code]),
        }
    }

    pub fn implicit(n: usize, rule: Rule) -> Self {
        assert!(n >= 1, "a tournament needs at least one vertex");
        Tournament {
            n,
            backing: Backing::Implicit(rule),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> Option<Rule> {
        match self.backing {
            Backing::Implicit(r) => Some(r),
            Backing::Explicit(_) => None,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.backing, Backing::Explicit(_))
    }

    /// `true` iff `u -> v`. Callers guarantee `u != v` and both in range.
    #[inline]
    pub fn beats(&self, u: Vertex, v: Vertex) -> bool {
        debug_assert!(u != v && u < self.n && v < self.n, "bad pair ({u}, {v})");
        let (lo, hi, flip) = if u < v { (u, v, false) } else { (v, u, true) };
        let low_wins = match &self.backing {
            Backing::Explicit(bits) => {
                let idx = pair_index(self.n, lo, hi);
                bits[idx / 64] >> (idx % 64) & 1 == 1
            }
            Backing::Implicit(rule) => rule.low_wins(lo, hi),
        };
        low_wins ^ flip
    }

    /// Checked orientation query.
    pub fn orient(&self, u: Vertex, v: Vertex) -> Result<Arc> {
        if u == v {
            return Err(Error::Precondition(format!("orient({u}, {u}): no self-loops")));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::Precondition(format!(
                "orient({u}, {v}): vertex out of range for n={}",
                self.n
            )));
        }
        Ok(if self.beats(u, v) {
            Arc { from: u, to: v }
        } else {
            Arc { from: v, to: u }
        })
    }

    /// Number of `w` in `targets` with `v -> w`. `targets` must not contain `v`.
    pub fn count_beaten(&self, v: Vertex, targets: &[Vertex]) -> usize {
        match &self.backing {
            Backing::Implicit(Rule::SplitMix64 { seed }) => {
                let seed = *seed;
                targets
                    .iter()
                    .map(|&w| {
                        let low = splitmix_pair(seed, v, w) & 1;
                        // v wins iff (v is the lower index) == (low bit set)
                        (low ^ (v > w) as u64) as usize
                    })
                    .sum()
            }
            Backing::Implicit(Rule::Transitive) => targets.iter().filter(|&&w| v < w).count(),
            Backing::Explicit(_) => targets.iter().filter(|&&w| self.beats(v, w)).count(),
        }
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        (0..self.n).filter(|&w| w != v && self.beats(v, w)).count()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.beats(u, v) {
                    deg[u] += 1;
                } else {
                    deg[v] += 1;
                }
            }
        }
        deg
    }

    /// Explicit copy of this tournament.
    pub fn materialize(&self) -> Tournament {
        match self.backing {
            Backing::Explicit(_) => self.clone(),
            Backing::Implicit(_) => Tournament::from_fn(self.n, |u, v| self.beats(u, v)),
        }
    }

    /// Pair-for-pair equality, independent of backing.
    pub fn same_orientation(&self, other: &Tournament) -> bool {
        self.n == other.n
            && (0..self.n).all(|u| (u + 1..self.n).all(|v| self.beats(u, v) == other.beats(u, v)))
    }

    /// Short human-readable description, also accepted by [`Tournament::from_descriptor`]
    /// when the backing is implicit.
    pub fn descriptor(&self) -> String {
        match self.backing {
            Backing::Implicit(Rule::SplitMix64 { seed }) => {
                format!("splitmix64:{seed}:{}", self.n)
            }
            Backing::Implicit(Rule::Transitive) => format!("transitive:{}", self.n),
            Backing::Explicit(_) => format!("explicit:{}", self.n),
        }
    }

    /// Parses `splitmix64:<seed>:<n>` or `transitive:<n>`.
    pub fn from_descriptor(s: &str) -> Result<Tournament> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| -> Result<u64> {
            x.parse::<u64>()
                .map_err(|_| Error::Precondition(format!("bad number {x:?} in descriptor {s:?}")))
        };
        let t = match parts.as_slice() {
            ["splitmix64", seed, n] => {
                Tournament::implicit(num(n)? as usize, Rule::SplitMix64 { seed: num(seed)? })
            }
            ["transitive", n] => Tournament::implicit(num(n)? as usize, Rule::Transitive),
            _ => {
                return Err(Error::Precondition(format!(
                    "unknown tournament descriptor {s:?}"
                )))
            }
        };
        if t.n == 0 {
            return Err(Error::Precondition("descriptor with n=0".into()));
        }
        Ok(t)
    }

    pub fn to_trn(&self) -> String {
        let mut out = String::with_capacity(pair_count(self.n) as usize + self.n + 16);
        out.push_str("TRN 1\n");
        out.push_str(&format!("n={}\n", self.n));
        for i in 0..self.n.saturating_sub(1) {
            for j in i + 1..self.n {
                out.push(if self.beats(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    pub fn to_implicit_descriptor_file(&self) -> Option<String> {
        let rule = self.rule()?;
        Some(format!(
            "TRN-IMPLICIT 1\nn={}\nrule={}\nseed={}\n",
            self.n,
            rule.name(),
            rule.seed()
        ))
    }

    /// Parses either a TRN body or an implicit descriptor file.
    pub fn parse(text: &str) -> Result<Tournament> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, 1, "empty file"))?;
        match header.trim_end() {
            "TRN 1" => parse_explicit(lines),
            "TRN-IMPLICIT 1" => parse_implicit(lines),
            _ => Err(parse_err(1, 1, format!("unknown header {header:?}"))),
        }
    }
}

fn parse_n(line: Option<&str>, lineno: usize) -> Result<usize> {
    let line = line.ok_or_else(|| parse_err(lineno, 1, "missing n= line"))?;
    let rest = line
        .trim_end()
        .strip_prefix("n=")
        .ok_or_else(|| parse_err(lineno, 1, "expected n=<decimal>"))?;
    let n: usize = rest
        .parse()
        .map_err(|_| parse_err(lineno, 3, format!("bad vertex count {rest:?}")))?;
    if n == 0 {
        return Err(parse_err(lineno, 3, "n must be at least 1"));
    }
    Ok(n)
}

fn parse_explicit<'a>(mut lines: impl Iterator<Item = &'a str>) -> Result<Tournament> {
    let n = parse_n(lines.next(), 2)?;
    let mut rows: Vec<&[u8]> = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n - 1 {
        let lineno = i + 3;
        let row = lines
            .next()
            .ok_or_else(|| parse_err(lineno, 1, format!("truncated: expected {} rows", n - 1)))?
            .trim_end_matches('\r')
            .as_bytes();
        let want = n - 1 - i;
        if let Some(col) = row.iter().position(|&c| c != b'0' && c != b'1') {
            return Err(parse_err(
                lineno,
                col + 1,
                format!("unexpected character {:?}", row[col] as char),
            ));
        }
        if row.len() != want {
            return Err(parse_err(
                lineno,
                row.len().min(want) + 1,
                format!("row {i} has {} characters, expected {want}", row.len()),
            ));
        }
        rows.push(row);
    }
    for (k, extra) in lines.enumerate() {
        if !extra.trim().is_empty() {
            return Err(parse_err(n + 2 + k, 1, "trailing data after last row"));
        }
    }
    Ok(Tournament::from_fn(n, |i, j| rows[i][j - i - 1] == b'1'))
}

fn parse_implicit<'a>(mut lines: impl Iterator<Item = &'a str>) -> Result<Tournament> {
    let n = parse_n(lines.next(), 2)?;
    let mut field = |lineno: usize, key: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(lineno, 1, format!("missing {key}= line")))?;
        line.trim_end()
            .strip_prefix(&format!("{key}="))
            .map(str::to_owned)
            .ok_or_else(|| parse_err(lineno, 1, format!("expected {key}=")))
    };
    let rule = field(3, "rule")?;
    let seed_text = field(4, "seed")?;
    let seed: u64 = seed_text
        .parse()
        .map_err(|_| parse_err(4, 6, format!("bad seed {seed_text:?}")))?;
    let rule = match rule.as_str() {
        "splitmix64" => Rule::SplitMix64 { seed },
        "transitive" => Rule::Transitive,
        other => return Err(parse_err(3, 6, format!("unknown rule {other:?}"))),
    };
    Ok(Tournament::implicit(n, rule))
}

/// Transitive tournament: `u -> v` iff `u < v`. Implicitly backed.
pub fn gen_transitive(n: usize) -> Tournament {
    Tournament::implicit(n, Rule::Transitive)
}

/// Implicit random tournament under the `splitmix64` rule.
pub fn gen_implicit(n: usize, seed: u64) -> Tournament {
    Tournament::implicit(n, Rule::SplitMix64 { seed })
}

/// Explicit random tournament; agrees pair-for-pair with `gen_implicit(n, seed)`.
pub fn gen_random(n: usize, seed: u64) -> Tournament {
    gen_implicit(n, seed).materialize()
}

/// Directed 3-cycle `0 -> 1 -> 2 -> 0`.
pub fn three_cycle() -> Tournament {
    Tournament::from_fn(3, |u, v| !(u == 0 && v == 2))
}

pub fn read_tournament(path: impl AsRef<Path>) -> Result<Tournament> {
    Tournament::parse(&fs::read_to_string(path)?)
}

/// Writes TRN for explicit tournaments and the descriptor file for implicit ones.
pub fn write_tournament(t: &Tournament, path: impl AsRef<Path>) -> Result<()> {
    let text = t.to_implicit_descriptor_file().unwrap_or_else(|| t.to_trn());
    fs::File::create(path)?.write_all(text.as_bytes())?;
    Ok(())
}

/// Writes the explicit TRN form regardless of backing.
pub fn write_trn(t: &Tournament, path: impl AsRef<Path>) -> Result<()> {
    fs::File::create(path)?.write_all(t.to_trn().as_bytes())?;
    Ok(())
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}
