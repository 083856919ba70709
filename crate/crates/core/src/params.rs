use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one extraction step.
///
/// `k` is the block size, `r` the seed-set size, `t` the window width and
/// `windows` the number of consecutive width-`t` windows the step looks at
/// (the source window plus `windows - 1` target windows).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LemmaParams {
    pub k: usize,
    pub r: usize,
    pub t: usize,
    #[serde(rename = "W")]
    pub windows: usize,
}

impl LemmaParams {
    pub fn new(k: usize, r: usize, t: usize, windows: usize) -> Result<Self> {
        let p = LemmaParams { k, r, t, windows };
        p.validate()?;
        Ok(p)
    }

    /// `r = 2^(3k)`, `t = 2^(6k)`, 100 windows.
    pub fn default_for(k: usize) -> Result<Self> {
        if k == 0 || 6 * k >= 63 {
            return Err(Error::Precondition(format!(
                "default parameters need 1 <= k <= 10, got k={k}"
            )));
        }
        LemmaParams::new(k, 1 << (3 * k), 1 << (6 * k), 100)
    }

    pub fn is_default_instance(&self) -> bool {
        LemmaParams::default_for(self.k).is_ok_and(|p| p == *self)
    }

    pub fn validate(&self) -> Result<()> {
        let LemmaParams { k, r, t, windows } = *self;
        if k < 1 || r < k || t < r || windows < 3 {
            return Err(Error::Precondition(format!(
                "need k >= 1, r >= k, t >= r, W >= 3; got k={k} r={r} t={t} W={windows}"
            )));
        }
        Ok(())
    }

    /// Positions spanned by the source window and all target windows.
    pub fn span(&self) -> usize {
        self.windows * self.t
    }

    /// Size of `B`, the union of the target windows.
    pub fn target_span(&self) -> usize {
        (self.windows - 1) * self.t
    }

    /// Out-degree into `B` below which relocating a window vertex to the end
    /// of `B` strictly gains forward edges: `ceil(((W-2)t + 1) / 2)`.
    pub fn degree_threshold(&self) -> usize {
        ((self.windows - 2) * self.t + 1).div_ceil(2)
    }

    /// Common out-neighbours a block must have inside `B`: `(W-1) r`.
    pub fn common_threshold(&self) -> usize {
        (self.windows - 1) * self.r
    }
}

/// Whether extraction failures are tolerated (and reported) or treated as bugs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Parameters certified by the counting inequality; every step must succeed.
    Guaranteed,
    /// Any parameters; failed steps end the build with a report.
    Heuristic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Guaranteed => "guaranteed",
            Mode::Heuristic => "heuristic",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "guaranteed" => Ok(Mode::Guaranteed),
            "heuristic" => Ok(Mode::Heuristic),
            _ => Err(Error::Precondition(format!(
                "unknown mode {s:?} (expected guaranteed or heuristic)"
            ))),
        }
    }
}
