//! Twist deformations along cuffs and the behaviour of geodesic lengths
//! under them.

use crate::curves::{apply_full_twists, beta_curve, crossing_cosine, geodesic_length, CurveWord};
use crate::error::{Error, Result};
use crate::pants_surface::{CuffId, PantsSurface};
use serde::Serialize;

/// The surface with twists `t_X + t·t_n`, lengths unchanged.
pub fn twist_path(x: &PantsSurface, t_n: &[f64], t: f64) -> Result<PantsSurface> {
    if t_n.len() != x.graph().num_cuffs() {
        return Err(Error::IndexMismatch(format!(
            "{} cuffs but {} twist directions",
            x.graph().num_cuffs(),
            t_n.len()
        )));
    }
    let twists = x
        .twists()
        .iter()
        .zip(t_n)
        .map(|(&a, &b)| if b == 0.0 { a } else { a + t * b })
        .collect();
    x.with_twists(twists)
}

/// Rate of change of the length of `w` under a unit left twist on `cuff`:
/// the sum of `cos φ` over the crossings.
pub fn length_derivative(x: &PantsSurface, w: &CurveWord, cuff: CuffId) -> Result<f64> {
    let n = w.crossings(cuff);
    if n == 0 {
        return Err(Error::NoCrossing {
            cuff: x.graph().cuff_label(cuff),
        });
    }
    (0..n).map(|occ| crossing_cosine(x, w, cuff, occ)).sum()
}

/// Number of full twists after which every crossing of a twisted β curve
/// meets the cuff at `cos φ ≥ eps0`.
pub fn k_full_twists(l: f64, eps0: f64) -> Result<i64> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidArgument(format!("cuff length {l} must be positive")));
    }
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidArgument(format!("eps0 = {eps0} must lie in (0, 1)")));
    }
    let k = (((1.0 + eps0) / (1.0 - eps0)).ln() / l).floor() + 2.0;
    if k >= i64::MAX as f64 {
        return Err(Error::InvalidArgument(format!(
            "full twist count overflows for l = {l}, eps0 = {eps0}"
        )));
    }
    Ok(k as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub min_second_difference: f64,
    pub lengths: Vec<f64>,
}

/// Lengths of `w` while twisting `cuff` by each grid offset, and whether
/// their second differences stay above `-1e-9`.
pub fn convexity_check(x: &PantsSurface, w: &CurveWord, cuff: CuffId, t_grid: &[f64]) -> Result<ConvexityReport> {
    if w.crossings(cuff) == 0 {
        return Err(Error::NoCrossing {
            cuff: x.graph().cuff_label(cuff),
        });
    }
    if t_grid.len() < 3 || t_grid.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidArgument(
            "twist grid must be strictly increasing with at least 3 points".into(),
        ));
    }
    let base = x.twist(cuff);
    let lengths = t_grid
        .iter()
        .map(|&t| geodesic_length(&x.with_twist(cuff, base + t)?, w))
        .collect::<Result<Vec<_>>>()?;
    // three-point second difference, equal to f₊ − 2f + f₋ on uniform grids
    let min = (1..t_grid.len() - 1)
        .map(|i| {
            let (h1, h2) = (t_grid[i] - t_grid[i - 1], t_grid[i + 1] - t_grid[i]);
            let scale = 0.5 * (h1 + h2);
            (h1 * lengths[i + 1] - (h1 + h2) * lengths[i] + h2 * lengths[i - 1]) / scale
        })
        .fold(f64::INFINITY, f64::min);
    Ok(ConvexityReport {
        convex: min >= -1e-9,
        min_second_difference: min,
        lengths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MvtReport {
    /// `t_Y − t_X` on the cuff.
    pub twist_difference: f64,
    /// Signed number of full twists used for the witness curve.
    pub k: i64,
    pub length_x: f64,
    pub length_y: f64,
    /// `|t_n| / max{1, |log l|}`.
    pub lhs: f64,
    /// `|log(l_Y / l_X)|` for the witness curve.
    pub rhs: f64,
    /// `l_X (r − 1) / (log r · max{1, |log l|})` with `r = l_Y / l_X`; the
    /// constant for which `lhs ≤ (C / ε₀) rhs` is the mean value step.
    pub constant: f64,
    /// `l_Y − l_X ≥ ε₀ |t_n|`.
    pub mvt_step_holds: bool,
    pub holds: bool,
}

/// Compares a twist difference on `cuff` with the length change of the β
/// curve twisted `k` times in the direction of the difference.
pub fn mvt_twist_bound(x: &PantsSurface, y: &PantsSurface, cuff: CuffId, eps0: f64, k: i64) -> Result<MvtReport> {
    if !x.same_graph(y) {
        return Err(Error::GraphMismatch);
    }
    let g = x.graph();
    if !g.is_interior(cuff) {
        return Err(Error::BoundaryCuff {
            cuff: g.cuff_label(cuff),
        });
    }
    for c in 0..g.num_cuffs() {
        let same_twist = c == cuff.0 || x.twists()[c] == y.twists()[c];
        if x.lengths()[c] != y.lengths()[c] || !same_twist {
            return Err(Error::InvalidArgument(format!(
                "surfaces differ away from the twist on cuff {}",
                g.cuff_label(cuff)
            )));
        }
    }
    let l = x.length(cuff);
    let scale = l.ln().abs().max(1.0);
    let t_n = y.twist(cuff) - x.twist(cuff);
    let k = if t_n < 0.0 { -k.abs() } else { k.abs() };
    let witness = apply_full_twists(g, &beta_curve(g, cuff)?, cuff, k)?;
    let lx = geodesic_length(x, &witness)?;
    let ly = geodesic_length(y, &witness)?;
    let rhs = (ly.ln() - lx.ln()).abs();
    let lhs = t_n.abs() / scale;
    let constant = if rhs > 0.0 {
        let r = ly / lx;
        lx * (r - 1.0) / (r.ln() * scale)
    } else {
        lx / scale
    };
    let step = ly - lx >= eps0 * t_n.abs() * (1.0 - 1e-12);
    Ok(MvtReport {
        twist_difference: t_n,
        k,
        length_x: lx,
        length_y: ly,
        lhs,
        rhs,
        constant,
        mvt_step_holds: step,
        holds: lhs <= constant / eps0 * rhs * (1.0 + 1e-12),
    })
}
