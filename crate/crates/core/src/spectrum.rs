//! Length-spectrum comparison of two marked surfaces over a finite family of
//! curves.

use crate::curves::{apply_full_twists, beta_curve, geodesic_length, CurveWord};
use crate::error::{Error, Result};
use crate::pants_surface::{CuffId, PantsSurface};
use crate::twist_flow::k_full_twists;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub label: String,
    pub word: CurveWord,
}

/// Finite stand-in for the set of all simple closed curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    members: Vec<FamilyMember>,
    description: String,
}

impl CurveFamily {
    pub fn new(members: Vec<FamilyMember>, description: impl Into<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty curve family".into()));
        }
        Ok(CurveFamily {
            members,
            description: description.into(),
        })
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Adds members whose labels are not already present.
    pub fn extend(&mut self, more: impl IntoIterator<Item = FamilyMember>) {
        for m in more {
            if !self.members.iter().any(|x| x.label == m.label) {
                self.members.push(m);
            }
        }
    }

    pub fn validate(&self, s: &PantsSurface) -> Result<()> {
        for m in &self.members {
            m.word
                .validate(s)
                .map_err(|e| Error::BadPath(format!("{}: {e}", m.label)))?;
        }
        Ok(())
    }
}

/// Every cuff, every β curve and its images under `±k` full twists for `k`
/// in `k_grid`.
pub fn default_family(s: &PantsSurface, k_grid: &[i64]) -> CurveFamily {
    let g = s.graph();
    let mut ks: Vec<i64> = k_grid
        .iter()
        .flat_map(|&k| [k, -k])
        .filter(|&k| k != 0)
        .collect();
    ks.sort_unstable();
    ks.dedup();

    let mut members: Vec<FamilyMember> = (0..g.num_cuffs())
        .map(|i| FamilyMember {
            label: format!("cuff:{}", g.cuff_label(CuffId(i))),
            word: CurveWord::Peripheral(CuffId(i)),
        })
        .collect();
    for c in g.interior_cuffs() {
        let beta = beta_curve(g, c).expect("interior cuff");
        let label = g.cuff_label(c);
        for &k in &ks {
            members.push(FamilyMember {
                label: format!("beta:{label}:k={k}"),
                word: apply_full_twists(g, &beta, c, k).expect("β crosses its cuff"),
            });
        }
        members.push(FamilyMember {
            label: format!("beta:{label}"),
            word: beta,
        });
    }
    let desc = format!("cuffs + beta + full twists k in {:?}", k_grid);
    CurveFamily::new(members, desc).expect("a surface has at least one cuff")
}

/// [`default_family`] plus, on each interior cuff, the β curve twisted
/// `±k_full_twists(l, eps0)` times for the cuff length `l` of `s`.
pub fn witness_family(s: &PantsSurface, k_grid: &[i64], eps0: f64) -> Result<CurveFamily> {
    let mut fam = default_family(s, k_grid);
    let g = s.graph();
    let mut extra = Vec::new();
    for c in g.interior_cuffs() {
        let k = k_full_twists(s.length(c), eps0)?;
        let beta = beta_curve(g, c)?;
        let label = g.cuff_label(c);
        for k in [k, -k] {
            extra.push(FamilyMember {
                label: format!("beta:{label}:k={k}"),
                word: apply_full_twists(g, &beta, c, k)?,
            });
        }
    }
    fam.extend(extra);
    fam.description = format!("{} + witnesses at eps0 = {eps0}", fam.description);
    Ok(fam)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub label: String,
    #[serde(rename = "lX")]
    pub lx: f64,
    #[serde(rename = "lY")]
    pub ly: f64,
    pub abslogratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCurve {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub rows: Vec<CurveRow>,
    pub skipped: Vec<SkippedCurve>,
    /// Half the largest `|log(l_Y / l_X)|`; a lower bound for the metric.
    pub dls: f64,
    pub argmax: Option<String>,
    pub family_size: usize,
    pub family_description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub dls: f64,
    pub argmax: Option<String>,
    pub family_size: usize,
    pub family: String,
    pub skipped: Vec<SkippedCurve>,
}

impl SpectrumReport {
    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            dls: self.dls,
            argmax: self.argmax.clone(),
            family_size: self.family_size,
            family: self.family_description.clone(),
            skipped: self.skipped.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.rows {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_same_graph(x: &PantsSurface, y: &PantsSurface) -> Result<()> {
    if x.same_graph(y) {
        Ok(())
    } else {
        Err(Error::GraphMismatch)
    }
}

/// Compares the two length spectra on `fam`. Curves whose holonomy is not
/// hyperbolic on either surface are skipped and listed in the report.
pub fn dls_estimate(x: &PantsSurface, y: &PantsSurface, fam: &CurveFamily) -> Result<SpectrumReport> {
    check_same_graph(x, y)?;
    fam.validate(x)?;
    let results: Vec<std::result::Result<CurveRow, SkippedCurve>> = fam
        .members
        .par_iter()
        .map(|m| {
            let pair = geodesic_length(x, &m.word).and_then(|lx| Ok((lx, geodesic_length(y, &m.word)?)));
            match pair {
                Ok((lx, ly)) => Ok(CurveRow {
                    label: m.label.clone(),
                    lx,
                    ly,
                    abslogratio: (ly.ln() - lx.ln()).abs(),
                }),
                Err(e) => Err(SkippedCurve {
                    label: m.label.clone(),
                    reason: e.to_string(),
                }),
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(s) => skipped.push(s),
        }
    }
    // no curve is named when nothing changes
    let mut best: Option<&CurveRow> = None;
    for row in rows.iter().filter(|r| r.abslogratio > 0.0) {
        if best.is_none_or(|b| row.abslogratio > b.abslogratio) {
            best = Some(row);
        }
    }
    Ok(SpectrumReport {
        dls: 0.5 * best.map_or(0.0, |b| b.abslogratio),
        argmax: best.map(|b| b.label.clone()),
        family_size: fam.len(),
        family_description: fam.description.clone(),
        rows,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WolpertResult {
    pub holds: bool,
    /// The family ratio `l_Y / l_X` farthest from 1 in log scale.
    pub worst_ratio: f64,
    pub worst_label: Option<String>,
}

/// Checks `l_X / K ≤ l_Y ≤ K l_X` on every family member.
pub fn wolpert_check(x: &PantsSurface, y: &PantsSurface, k: f64, fam: &CurveFamily) -> Result<WolpertResult> {
    if !(k >= 1.0) {
        return Err(Error::InvalidArgument(format!("K = {k} must be at least 1")));
    }
    let report = dls_estimate(x, y, fam)?;
    let bound = k.ln();
    let worst = report
        .rows
        .iter()
        .max_by(|a, b| a.abslogratio.total_cmp(&b.abslogratio));
    Ok(WolpertResult {
        holds: report.rows.iter().all(|r| r.abslogratio <= bound),
        worst_ratio: worst.map_or(1.0, |r| r.ly / r.lx),
        worst_label: worst.map(|r| r.label.clone()),
    })
}
