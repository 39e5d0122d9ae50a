//! The normalized Fenchel-Nielsen map relative to a base surface, and the
//! sampling harness that measures its local distortion.

use crate::curves::{beta_curve, geodesic_length};
use crate::error::{Error, Result};
use crate::pants_surface::{CuffId, FnCoordinates, PantsGraph, PantsSurface};
use crate::spectrum::{dls_estimate, CurveFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `max{1, |log l|}`.
pub fn twist_scale(l: f64) -> f64 {
    l.ln().abs().max(1.0)
}

/// Normalized coordinates: per cuff a log length ratio `λ`, and for interior
/// cuffs a twist difference `τ` scaled by `max{1, |log l₀|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FnVector {
    pub lambda: Vec<f64>,
    pub tau: Vec<Option<f64>>,
}

impl FnVector {
    pub fn zero(g: &PantsGraph) -> Self {
        FnVector {
            lambda: vec![0.0; g.num_cuffs()],
            tau: (0..g.num_cuffs())
                .map(|c| g.is_interior(CuffId(c)).then_some(0.0))
                .collect(),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = f64> + '_ {
        self.lambda
            .iter()
            .copied()
            .chain(self.tau.iter().flatten().copied())
    }

    pub fn sup_norm(&self) -> f64 {
        self.components().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Sup distance; both vectors must have the same shape.
    pub fn distance(&self, other: &FnVector) -> f64 {
        let l = self
            .lambda
            .iter()
            .zip(&other.lambda)
            .map(|(a, b)| (a - b).abs());
        let t = self
            .tau
            .iter()
            .zip(&other.tau)
            .filter_map(|(a, b)| Some((a.as_ref()? - b.as_ref()?).abs()));
        l.chain(t).fold(0.0, f64::max)
    }

    fn check_shape(&self, g: &PantsGraph) -> Result<()> {
        if self.lambda.len() != g.num_cuffs() || self.tau.len() != g.num_cuffs() {
            return Err(Error::IndexMismatch(format!(
                "{} cuffs but vector has {} length and {} twist entries",
                g.num_cuffs(),
                self.lambda.len(),
                self.tau.len()
            )));
        }
        for (c, t) in self.tau.iter().enumerate() {
            if t.is_some() != g.is_interior(CuffId(c)) {
                return Err(Error::IndexMismatch(format!(
                    "cuff {}: twist entry must be present exactly for interior cuffs",
                    g.cuff_label(CuffId(c))
                )));
            }
        }
        if self.components().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(())
    }

    pub fn to_spec(&self, g: &PantsGraph) -> FnVectorSpec {
        FnVectorSpec {
            cuffs: (0..g.num_cuffs())
                .map(|c| FnEntrySpec {
                    id: g.cuff_label(CuffId(c)),
                    lambda: self.lambda[c],
                    tau: self.tau[c],
                })
                .collect(),
        }
    }
}

/// JSON form of an [`FnVector`], keyed by cuff id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnVectorSpec {
    pub cuffs: Vec<FnEntrySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FnEntrySpec {
    pub id: i64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl FnVectorSpec {
    /// Resolves ids against `g`; every cuff must appear exactly once.
    pub fn to_vector(&self, g: &PantsGraph) -> Result<FnVector> {
        let n = g.num_cuffs();
        let mut lambda = vec![None; n];
        let mut tau = vec![None; n];
        for e in &self.cuffs {
            let c = g
                .cuff_index(e.id)
                .ok_or_else(|| Error::IndexMismatch(format!("unknown cuff id {}", e.id)))?;
            if lambda[c.0].replace(e.lambda).is_some() {
                return Err(Error::IndexMismatch(format!("cuff {} listed twice", e.id)));
            }
            tau[c.0] = match (g.is_interior(c), e.tau) {
                (true, t) => Some(t.unwrap_or(0.0)),
                (false, None) => None,
                (false, Some(_)) => {
                    return Err(Error::IndexMismatch(format!(
                        "cuff {} is a boundary cuff and takes no twist",
                        e.id
                    )))
                }
            };
        }
        let lambda = lambda
            .into_iter()
            .enumerate()
            .map(|(c, l)| {
                l.ok_or_else(|| {
                    Error::IndexMismatch(format!("cuff {} missing", g.cuff_label(CuffId(c))))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let v = FnVector { lambda, tau };
        v.check_shape(g)?;
        Ok(v)
    }
}

/// Normalized coordinates of `x` relative to the base surface `x0`.
pub fn fn_forward(x0: &PantsSurface, x: &PantsSurface) -> Result<FnVector> {
    if !x0.same_graph(x) {
        return Err(Error::GraphMismatch);
    }
    let g = x0.graph();
    let lambda = x0
        .lengths()
        .iter()
        .zip(x.lengths())
        .map(|(&l0, &l)| (l / l0).ln())
        .collect();
    let tau = (0..g.num_cuffs())
        .map(|c| {
            g.is_interior(CuffId(c)).then(|| {
                (x.twists()[c] - x0.twists()[c]) / twist_scale(x0.lengths()[c])
            })
        })
        .collect();
    Ok(FnVector { lambda, tau })
}

/// The surface whose normalized coordinates relative to `x0` are `v`.
pub fn fn_inverse(x0: &PantsSurface, v: &FnVector) -> Result<PantsSurface> {
    let g = x0.graph();
    v.check_shape(g)?;
    let lengths = x0
        .lengths()
        .iter()
        .zip(&v.lambda)
        .map(|(&l0, &lam)| l0 * lam.exp())
        .collect();
    let twists = (0..g.num_cuffs())
        .map(|c| match v.tau[c] {
            Some(t) => x0.twists()[c] + t * twist_scale(x0.lengths()[c]),
            None => 0.0,
        })
        .collect();
    PantsSurface::new(x0.graph_arc().clone(), FnCoordinates { lengths, twists }, x0.m0())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwistDecomposition {
    pub k: i64,
    pub t_tilde: f64,
}

/// Writes `t = k·l + t̃` with `0 ≤ t̃ < l`.
pub fn twist_decompose(t: f64, l: f64) -> Result<TwistDecomposition> {
    if !(l > 0.0) || !t.is_finite() || !l.is_finite() {
        return Err(Error::InvalidArgument(format!("cannot decompose twist {t} by length {l}")));
    }
    let q = (t / l).floor();
    if q.abs() >= i64::MAX as f64 {
        return Err(Error::InvalidArgument(format!("twist {t} is too many periods of {l}")));
    }
    let mut k = q as i64;
    let mut rest = t - k as f64 * l;
    if rest < 0.0 {
        k -= 1;
        rest += l;
    } else if rest >= l {
        k += 1;
        rest -= l;
    }
    Ok(TwistDecomposition {
        k,
        t_tilde: rest.clamp(0.0, l.next_down()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub sample: usize,
    pub distance: f64,
    pub dls: f64,
    pub ratio: f64,
    pub argmax: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub family: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub distortion: f64,
    pub rows: Vec<ProbeRow>,
    /// Samples whose surfaces could not be built or compared.
    pub degenerate: Vec<(usize, String)>,
}

impl ProbeReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `dls_estimate(F⁻¹(a), F⁻¹(b)) / ‖a − b‖_∞` together with the estimate.
pub fn probe_pair(x0: &PantsSurface, a: &FnVector, b: &FnVector, fam: &CurveFamily) -> Result<(f64, f64, Option<String>)> {
    let dist = a.distance(b);
    if dist < 1e-9 {
        return Err(Error::InvalidArgument("sample points coincide".into()));
    }
    let xa = fn_inverse(x0, a)?;
    let xb = fn_inverse(x0, b)?;
    let report = dls_estimate(&xa, &xb, fam)?;
    Ok((report.dls / dist, report.dls, report.argmax))
}

fn sample_ball<R: Rng>(center: &FnVector, radius: f64, rng: &mut R) -> FnVector {
    let mut draw = |c: f64| c + rng.gen_range(-radius..=radius);
    FnVector {
        lambda: center.lambda.iter().map(|&c| draw(c)).collect(),
        tau: center.tau.iter().map(|t| t.map(&mut draw)).collect(),
    }
}

/// Samples pairs uniformly in the sup-ball around `center` and records the
/// ratio of the spectrum estimate to the coordinate distance. Sample `i`
/// draws from its own stream of the seeded generator, so results do not
/// depend on scheduling.
pub fn bilipschitz_probe(
    x0: &PantsSurface,
    center: &FnVector,
    radius: f64,
    samples: usize,
    fam: &CurveFamily,
    seed: u64,
) -> Result<ProbeReport> {
    if !(radius > 0.0 && radius <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} must lie in (0, 0.5]"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    center.check_shape(x0.graph())?;
    fam.validate(x0)?;

    let outcomes: Vec<(usize, Result<(f64, f64, f64, Option<String>)>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            loop {
                let a = sample_ball(center, radius, &mut rng);
                let b = sample_ball(center, radius, &mut rng);
                let dist = a.distance(&b);
                if dist < 1e-9 {
                    continue;
                }
                let r = probe_pair(x0, &a, &b, fam).map(|(r, d, arg)| (dist, d, r, arg));
                return (i, r);
            }
        })
        .collect();

    let mut rows = Vec::new();
    let mut degenerate = Vec::new();
    for (i, r) in outcomes {
        match r {
            Ok((distance, dls, ratio, argmax)) => rows.push(ProbeRow {
                sample: i,
                distance,
                dls,
                ratio,
                argmax,
            }),
            Err(e) => degenerate.push((i, e.to_string())),
        }
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ProbeReport {
        radius,
        samples,
        seed,
        family: fam.description().to_string(),
        min_ratio,
        max_ratio,
        distortion: max_ratio / min_ratio,
        rows,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseRow {
    pub length: f64,
    pub twist_offset: f64,
    /// `|log(l_β(Y) / l_β(X))|`.
    pub response: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistResponse {
    pub rows: Vec<ResponseRow>,
    /// Least-squares slope of `log response` against `log |log l|`, when at
    /// least two responses are positive.
    pub slope: Option<f64>,
}

/// Cuff lengths `10⁻¹, …, 10⁻⁸`.
pub fn default_length_sweep() -> Vec<f64> {
    (1..=8).map(|e| 10f64.powi(-e)).collect()
}

/// For each length `l` in `lengths`, sets the cuff of `x0` to `l` and adds a
/// twist of `tau` (times `max{1, |log l|}` when `normalized`), then measures
/// the change of the β curve of the cuff.
pub fn twist_response(x0: &PantsSurface, cuff: CuffId, tau: f64, lengths: &[f64], normalized: bool) -> Result<TwistResponse> {
    let g = x0.graph();
    let beta = beta_curve(g, cuff)?;
    let rows = lengths
        .iter()
        .map(|&l| {
            let mut ls = x0.lengths().to_vec();
            ls[cuff.0] = l;
            let x = x0.with_lengths(ls)?;
            let offset = if normalized { tau * twist_scale(l) } else { tau };
            let y = x.with_twist(cuff, x.twist(cuff) + offset)?;
            let lx = geodesic_length(&x, &beta)?;
            let ly = geodesic_length(&y, &beta)?;
            Ok(ResponseRow {
                length: l,
                twist_offset: offset,
                response: (ly.ln() - lx.ln()).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.response > 0.0)
        .map(|r| (r.length.ln().abs().ln(), r.response.ln()))
        .collect();
    Ok(TwistResponse {
        slope: fit_slope(&pts),
        rows,
    })
}

/// Response to a fixed raw twist over [`default_length_sweep`].
pub fn unnormalized_twist_response(x0: &PantsSurface, cuff: CuffId, tau_raw: f64) -> Result<TwistResponse> {
    twist_response(x0, cuff, tau_raw, &default_length_sweep(), false)
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pants_surface::{Cuff, CuffEnds, SlotRef};
    use crate::spectrum::default_family;
    use std::sync::Arc;

    fn torus(l: f64, t: f64) -> PantsSurface {
        let cuffs = vec![
            Cuff {
                label: 0,
                ends: CuffEnds::Interior(SlotRef::new(0, 0), SlotRef::new(0, 1)),
            },
            Cuff {
                label: 1,
                ends: CuffEnds::Boundary(SlotRef::new(0, 2)),
            },
        ];
        let g = Arc::new(PantsGraph::new(vec![0], cuffs).unwrap());
        PantsSurface::build_base_with_twists(g, vec![l, 1.0], vec![t, 0.0], 2.0).unwrap()
    }

    #[test]
    fn forward_examples() {
        let x0 = torus(1.0, 0.2);
        let v = fn_forward(&x0, &x0).unwrap();
        assert_eq!(v.sup_norm(), 0.0);
        assert_eq!(v.tau, vec![Some(0.0), None]);

        let x = x0.with_lengths(vec![std::f64::consts::E, std::f64::consts::E]).unwrap();
        let v = fn_forward(&x0, &x).unwrap();
        assert!((v.lambda[0] - 1.0).abs() < 1e-15 && (v.lambda[1] - 1.0).abs() < 1e-15);
        assert_eq!(v.tau[0], Some(0.0));

        let x0 = torus((-10f64).exp(), 0.0);
        let x = x0.with_twist(CuffId(0), 5.0).unwrap();
        assert!((fn_forward(&x0, &x).unwrap().tau[0].unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let x0 = torus(1e-6, 0.0);
        let mut v = FnVector::zero(x0.graph());
        assert_eq!(fn_inverse(&x0, &v).unwrap(), x0);
        v.tau[0] = Some(1.0);
        let x = fn_inverse(&x0, &v).unwrap();
        assert!((x.twist(CuffId(0)) - 13.815_510_557_964_274).abs() < 1e-12);
        v.tau[1] = Some(1.0);
        assert!(matches!(fn_inverse(&x0, &v), Err(Error::IndexMismatch(_))));
    }

    #[test]
    fn decompose_examples() {
        let d = twist_decompose(7.3, 2.0).unwrap();
        assert_eq!(d.k, 3);
        assert!((d.t_tilde - 1.3).abs() < 1e-12);
        assert_eq!(twist_decompose(-0.5, 2.0).unwrap(), TwistDecomposition { k: -1, t_tilde: 1.5 });
        assert_eq!(twist_decompose(0.0, 0.7).unwrap(), TwistDecomposition { k: 0, t_tilde: 0.0 });
        let d = twist_decompose(-1e-18, 1.0).unwrap();
        assert!(d.t_tilde < 1.0 && d.t_tilde >= 0.0);
    }

    #[test]
    fn probe_rejects_large_radius() {
        let x0 = torus(0.5, 0.0);
        let fam = default_family(&x0, &[1]);
        let c = FnVector::zero(x0.graph());
        assert!(bilipschitz_probe(&x0, &c, 0.6, 10, &fam, 1).is_err());
        assert!(bilipschitz_probe(&x0, &c, 0.25, 1, &fam, 1).is_err());
        let a = c.clone();
        assert!(probe_pair(&x0, &a, &c, &fam).is_err());
    }

    #[test]
    fn probe_is_deterministic() {
        let x0 = torus(0.5, 0.1);
        let fam = default_family(&x0, &[1, 3]);
        let c = FnVector::zero(x0.graph());
        let a = bilipschitz_probe(&x0, &c, 0.25, 16, &fam, 7).unwrap();
        let b = bilipschitz_probe(&x0, &c, 0.25, 16, &fam, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.min_ratio > 0.0 && a.distortion.is_finite());
        assert_eq!(a.rows.len(), 16);
    }

    #[test]
    fn zero_twist_gives_zero_response() {
        let x0 = torus(0.5, 0.0);
        let r = unnormalized_twist_response(&x0, CuffId(0), 0.0).unwrap();
        assert!(r.rows.iter().all(|row| row.response == 0.0));
        assert_eq!(r.slope, None);
        assert!(matches!(
            unnormalized_twist_response(&x0, CuffId(1), 1.0),
            Err(Error::BoundaryCuff { cuff: 1 })
        ));
    }

    #[test]
    fn vector_spec_round_trip() {
        let x0 = torus(0.5, 0.0);
        let v = FnVector {
            lambda: vec![0.25, -0.125],
            tau: vec![Some(0.5), None],
        };
        let spec = v.to_spec(x0.graph());
        let text = serde_json::to_string(&spec).unwrap();
        let back: FnVectorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_vector(x0.graph()).unwrap(), v);
    }
}
