//! Finite proxies for the closure criterion: twist differences that are
//! `o(|log l|)` along a sequence of shrinking cuffs.

use crate::error::{Error, Result};
use crate::generate::{chain_graph, chain_interior};
use crate::pants_surface::{CuffId, PantsSurface};
use crate::spectrum::{dls_estimate, CurveFamily};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The tail statistic decreases towards zero over the realized range.
    Consistent,
    /// The tail statistic stays above `floor`.
    Inconsistent { floor: f64 },
    /// No cuff is thin enough for the statistic to say anything.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub verdict: Verdict,
    /// `(s, T(s))` with `T(s)` the largest `|Δt| / |log l₀|` over cuffs with
    /// `|log l₀| ≥ s`.
    pub tail: Vec<(f64, f64)>,
    /// Largest `|log(l_X / l_X₀)|` over all cuffs.
    pub sup_log_length_ratio: f64,
    /// Smallest and largest `|log l₀|` over interior cuffs.
    pub log_range: (f64, f64),
}

/// Evaluates the tail statistic on the grid `s = window, 2·window, …` up to
/// the largest `|log l₀|`. The verdict is consistent when the statistic is
/// nonincreasing and ends at most half its first value (or vanishes).
pub fn closure_criterion(x0: &PantsSurface, x: &PantsSurface, window: f64) -> Result<ClosureReport> {
    if !x0.same_graph(x) {
        return Err(Error::GraphMismatch);
    }
    if !(window > 0.0) || !window.is_finite() {
        return Err(Error::InvalidArgument(format!("window {window} must be positive")));
    }
    let g = x0.graph();
    let sup_log_length_ratio = x0
        .lengths()
        .iter()
        .zip(x.lengths())
        .map(|(a, b)| (b.ln() - a.ln()).abs())
        .fold(0.0, f64::max);
    let cuffs: Vec<(f64, f64)> = g
        .interior_cuffs()
        .map(|c| {
            let log_l = x0.length(c).ln().abs();
            (log_l, (x.twist(c) - x0.twist(c)).abs())
        })
        .collect();
    let lo = cuffs.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let hi = cuffs.iter().map(|c| c.0).fold(0.0, f64::max);
    let log_range = (if cuffs.is_empty() { 0.0 } else { lo }, hi);

    let mut tail = Vec::new();
    let mut k = 1.0;
    while k * window <= hi {
        let s = k * window;
        let t = cuffs
            .iter()
            .filter(|c| c.0 >= s * (1.0 - 1e-12))
            .map(|c| c.1 / c.0)
            .fold(0.0, f64::max);
        tail.push((s, t));
        k += 1.0;
    }

    let verdict = if tail.len() < 2 {
        Verdict::Vacuous
    } else if tail.iter().all(|p| p.1 == 0.0) {
        Verdict::Consistent
    } else {
        let first = tail[0].1;
        let last = tail[tail.len() - 1].1;
        let decreasing = tail.windows(2).all(|w| w[1].1 <= w[0].1);
        if decreasing && last <= 0.5 * first {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent {
                floor: tail.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
            }
        }
    };
    Ok(ClosureReport {
        verdict,
        tail,
        sup_log_length_ratio,
        log_range,
    })
}

/// The surface with the lengths of `x` and twist offsets from `x0` cut to
/// `sgn(Δt)·min{|Δt|, i}`.
pub fn approx_sequence(x0: &PantsSurface, x: &PantsSurface, i: f64) -> Result<PantsSurface> {
    if !x0.same_graph(x) {
        return Err(Error::GraphMismatch);
    }
    if !(i >= 0.0) {
        return Err(Error::InvalidArgument(format!("truncation level {i} must be nonnegative")));
    }
    let twists = x0
        .twists()
        .iter()
        .zip(x.twists())
        .map(|(&t0, &t)| {
            let d = t - t0;
            if d.abs() <= i {
                t
            } else {
                t0 + d.signum() * i
            }
        })
        .collect();
    x.with_twists(twists)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub i: f64,
    pub dls: f64,
    pub argmax: Option<String>,
}

/// `dls_estimate(X_i, X)` along `i_grid`.
pub fn convergence_study(x0: &PantsSurface, x: &PantsSurface, i_grid: &[f64], fam: &CurveFamily) -> Result<Vec<StudyRow>> {
    if i_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("i grid must be increasing".into()));
    }
    i_grid
        .par_iter()
        .map(|&i| {
            let xi = approx_sequence(x0, x, i)?;
            let r = dls_estimate(&xi, x, fam)?;
            Ok(StudyRow {
                i,
                dls: r.dls,
                argmax: r.argmax,
            })
        })
        .collect()
}

/// Closed-form length and twist-offset rules along a sequence of cuffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FnGenerator {
    /// `l_n = e^{−n}`, `Δt_n = √|log l_n|`.
    Sqrt,
    /// `l_n = e^{−n}`, `Δt_n = |log l_n| / 2`.
    Half,
    /// `l_n = e^{−n}`, `Δt_n = c·|log l_n|`.
    Linear(f64),
    /// `l_n = e^{−n}`, `Δt_n = |log l_n| / log(1 + n)`.
    LogLog,
    /// `l_n = e^{−n}`, `Δt_n = c`.
    Const(f64),
    /// `l_n = e^{−n}`, `Δt_n = c·|log l_n|` for `n ≤ head` and
    /// `√|log l_n|` beyond.
    Mixed { c: f64, head: usize },
    /// `l_n = 1`, `Δt_n = c·n`; nothing is thin.
    Flat(f64),
}

impl FnGenerator {
    pub const NAMES: [&'static str; 7] = ["sqrt", "half", "linear", "loglog", "const", "mixed", "flat"];

    /// Generator by name; `c` defaults to 1.
    pub fn from_name(name: &str, c: Option<f64>) -> Result<Self> {
        let c = c.unwrap_or(1.0);
        Ok(match name {
            "sqrt" => FnGenerator::Sqrt,
            "half" => FnGenerator::Half,
            "linear" => FnGenerator::Linear(c),
            "loglog" => FnGenerator::LogLog,
            "const" => FnGenerator::Const(c),
            "mixed" => FnGenerator::Mixed { c, head: 5 },
            "flat" => FnGenerator::Flat(c),
            other => return Err(Error::UnknownGenerator(other.to_string())),
        })
    }

    /// Length of the `n`-th cuff, `n ≥ 1`.
    pub fn length(&self, n: usize) -> f64 {
        match self {
            FnGenerator::Flat(_) => 1.0,
            _ => (-(n as f64)).exp(),
        }
    }

    /// Twist offset of the `n`-th cuff.
    pub fn offset(&self, n: usize) -> f64 {
        let log_l = self.length(n).ln().abs();
        match *self {
            FnGenerator::Sqrt => log_l.sqrt(),
            FnGenerator::Half => 0.5 * log_l,
            FnGenerator::Linear(c) => c * log_l,
            FnGenerator::LogLog => log_l / (1.0 + n as f64).ln(),
            FnGenerator::Const(c) => c,
            FnGenerator::Mixed { c, head } if n <= head => c * log_l,
            FnGenerator::Mixed { .. } => log_l.sqrt(),
            FnGenerator::Flat(c) => c * n as f64,
        }
    }

    /// Base surface `X₀` and deformed surface `X` on a chain of `depth + 1`
    /// pants whose interior cuffs carry the sequence; boundary cuffs have
    /// length 1 and `X₀` has zero twists.
    pub fn realize(&self, depth: usize) -> Result<(PantsSurface, PantsSurface)> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let graph = Arc::new(chain_graph(depth + 1)?);
        let mut lengths = vec![1.0; graph.num_cuffs()];
        let mut offsets = vec![0.0; graph.num_cuffs()];
        for (k, c) in chain_interior(depth + 1).into_iter().enumerate() {
            lengths[c.0] = self.length(k + 1);
            offsets[c.0] = self.offset(k + 1);
        }
        let x0 = PantsSurface::build_base(graph, lengths, 1.0)?;
        let x = x0.with_twists(offsets)?;
        Ok((x0, x))
    }
}

/// Interior cuffs of a realized generator in sequence order.
pub fn generator_cuffs(depth: usize) -> Vec<CuffId> {
    chain_interior(depth + 1)
}
