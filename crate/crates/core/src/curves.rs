//! Closed curves as cyclic words on the pants graph.

use crate::error::{Error, Result};
use crate::pants_surface::{CuffEnds, CuffId, PantsGraph, PantsId, PantsSurface, SlotRef, Step};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A closed curve, either a cuff itself or a cyclic word of alternating
/// [`Step::Traverse`] and [`Step::Cross`] steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurveWord {
    Peripheral(CuffId),
    Steps(Vec<Step>),
}

impl CurveWord {
    pub fn steps(&self) -> &[Step] {
        match self {
            CurveWord::Peripheral(_) => &[],
            CurveWord::Steps(s) => s,
        }
    }

    /// Number of crossings with each cuff.
    pub fn intersection(&self, num_cuffs: usize) -> Vec<usize> {
        let mut out = vec![0; num_cuffs];
        for step in self.steps() {
            if let Step::Cross { cuff, .. } = step {
                out[cuff.0] += 1;
            }
        }
        out
    }

    pub fn crossings(&self, cuff: CuffId) -> usize {
        self.steps()
            .iter()
            .filter(|s| matches!(s, Step::Cross { cuff: c, .. } if *c == cuff))
            .count()
    }

    /// Index into `steps()` of the `occurrence`-th crossing of `cuff`.
    pub fn crossing_position(&self, cuff: CuffId, occurrence: usize) -> Option<usize> {
        self.steps()
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Step::Cross { cuff: c, .. } if *c == cuff))
            .nth(occurrence)
            .map(|(i, _)| i)
    }

    /// Cyclic rotation so that `steps()[start]` comes first.
    pub fn rotated(&self, start: usize) -> CurveWord {
        match self {
            CurveWord::Peripheral(c) => CurveWord::Peripheral(*c),
            CurveWord::Steps(s) if s.is_empty() => self.clone(),
            CurveWord::Steps(s) => {
                let k = start % s.len();
                CurveWord::Steps(s[k..].iter().chain(&s[..k]).copied().collect())
            }
        }
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> CurveWord {
        match self {
            CurveWord::Peripheral(c) => CurveWord::Peripheral(*c),
            CurveWord::Steps(s) => CurveWord::Steps(
                s.iter()
                    .rev()
                    .map(|step| match *step {
                        Step::Traverse {
                            pants,
                            slot_in,
                            slot_out,
                        } if slot_in == slot_out => Step::TraverseReversed { pants, slot: slot_in },
                        Step::Traverse {
                            pants,
                            slot_in,
                            slot_out,
                        } => Step::Traverse {
                            pants,
                            slot_in: slot_out,
                            slot_out: slot_in,
                        },
                        Step::TraverseReversed { pants, slot } => Step::Traverse {
                            pants,
                            slot_in: slot,
                            slot_out: slot,
                        },
                        cross => cross,
                    })
                    .collect(),
            ),
        }
    }

    pub fn validate(&self, s: &PantsSurface) -> Result<()> {
        match self {
            CurveWord::Peripheral(c) if c.0 < s.graph().num_cuffs() => Ok(()),
            CurveWord::Peripheral(c) => Err(Error::BadPath(format!("no cuff #{}", c.0))),
            CurveWord::Steps(steps) if steps.is_empty() => {
                Err(Error::BadPath("empty word".into()))
            }
            CurveWord::Steps(steps) => s.validate_path(steps),
        }
    }

    pub fn to_spec(&self, g: &PantsGraph) -> CurveSpec {
        match self {
            CurveWord::Peripheral(c) => CurveSpec::Peripheral {
                peripheral: g.cuff_label(*c),
            },
            CurveWord::Steps(steps) => CurveSpec::Steps {
                steps: steps
                    .iter()
                    .map(|step| match *step {
                        Step::Cross { cuff, winding } => StepSpec::Cross {
                            cross: g.cuff_label(cuff),
                            winding,
                        },
                        Step::Traverse {
                            pants,
                            slot_in,
                            slot_out,
                        } => StepSpec::Traverse {
                            traverse: [g.pants_label(pants), slot_in as i64, slot_out as i64],
                        },
                        Step::TraverseReversed { pants, slot } => StepSpec::TraverseReversed {
                            traverse_reversed: [g.pants_label(pants), slot as i64],
                        },
                    })
                    .collect(),
            },
        }
    }
}

/// Length of the closed geodesic freely homotopic to `w`.
pub fn geodesic_length(s: &PantsSurface, w: &CurveWord) -> Result<f64> {
    match w {
        CurveWord::Peripheral(c) => {
            w.validate(s)?;
            Ok(s.length(*c))
        }
        CurveWord::Steps(steps) => {
            w.validate(s)?;
            s.cuff_crossing_holonomy(steps)?.translation_length()
        }
    }
}

/// The curve dual to an interior cuff: built from the self-perpendiculars of
/// the adjacent pants when they differ, from the seam when the cuff is glued
/// to the same pants on both sides.
pub fn beta_curve(g: &PantsGraph, cuff: CuffId) -> Result<CurveWord> {
    let c = g.cuff(cuff);
    let CuffEnds::Interior(a, b) = c.ends else {
        return Err(Error::BoundaryCuff { cuff: c.label });
    };
    let cross = Step::Cross { cuff, winding: 0 };
    if a.pants != b.pants {
        Ok(CurveWord::Steps(vec![
            Step::Traverse {
                pants: a.pants,
                slot_in: a.slot,
                slot_out: a.slot,
            },
            cross,
            Step::Traverse {
                pants: b.pants,
                slot_in: b.slot,
                slot_out: b.slot,
            },
            cross,
        ]))
    } else {
        Ok(CurveWord::Steps(vec![
            Step::Traverse {
                pants: a.pants,
                slot_in: a.slot,
                slot_out: b.slot,
            },
            cross,
        ]))
    }
}

/// Image of `w` under `k` full left twists along `cuff`.
pub fn apply_full_twists(g: &PantsGraph, w: &CurveWord, cuff: CuffId, k: i64) -> Result<CurveWord> {
    if w.crossings(cuff) == 0 {
        return Err(Error::NoCrossing {
            cuff: g.cuff_label(cuff),
        });
    }
    let steps = w
        .steps()
        .iter()
        .map(|step| match *step {
            Step::Cross { cuff: c, winding } if c == cuff => Step::Cross {
                cuff: c,
                winding: winding + k,
            },
            other => other,
        })
        .collect();
    Ok(CurveWord::Steps(steps))
}

/// Cosine of the angle at which the geodesic of `w` crosses `cuff` at the
/// given crossing. The angle is measured from the cuff direction that keeps
/// the pants preceding the crossing on the left, so it is also the rate of
/// change of the length under a left twist at that crossing.
pub fn crossing_cosine(s: &PantsSurface, w: &CurveWord, cuff: CuffId, occurrence: usize) -> Result<f64> {
    w.validate(s)?;
    let label = s.graph().cuff_label(cuff);
    let pos = w
        .crossing_position(cuff, occurrence)
        .ok_or(if w.crossings(cuff) == 0 {
            Error::NoCrossing { cuff: label }
        } else {
            Error::InvalidArgument(format!(
                "cuff {label} is crossed {} times, no occurrence {occurrence}",
                w.crossings(cuff)
            ))
        })?;
    let h = s.cuff_crossing_holonomy(w.rotated(pos).steps())?;
    let cos = h.axis_cosine()?;
    if !(cos.abs() < 1.0) {
        return Err(Error::NonTransverse {
            cuff: label,
            occurrence,
        });
    }
    Ok(cos)
}

/// Crossing angle in `(0, π)`; see [`crossing_cosine`].
pub fn crossing_angle(s: &PantsSurface, w: &CurveWord, cuff: CuffId, occurrence: usize) -> Result<f64> {
    crossing_cosine(s, w, cuff, occurrence).map(f64::acos)
}

/// Closed curve that runs along a path of pants and back, turning around
/// along self-perpendiculars at both ends. `path` lists the pants crossed and
/// the cuffs between them; `windings` has one entry per crossing.
pub fn out_and_back(g: &PantsGraph, start: PantsId, cuffs: &[CuffId], windings: &[i64]) -> Result<CurveWord> {
    if cuffs.is_empty() {
        return Err(Error::BadPath("path crosses no cuff".into()));
    }
    if windings.len() != 2 * cuffs.len() {
        return Err(Error::IndexMismatch(format!(
            "{} crossings but {} windings",
            2 * cuffs.len(),
            windings.len()
        )));
    }
    // (pants, entry slot, exit slot) along the way out
    let mut legs: Vec<(PantsId, usize, usize)> = Vec::new();
    let mut here = start;
    let mut entry: Option<usize> = None;
    for &c in cuffs {
        let (a, b) = match g.cuff(c).ends {
            CuffEnds::Interior(a, b) => (a, b),
            CuffEnds::Boundary(_) => {
                return Err(Error::BoundaryCuff {
                    cuff: g.cuff_label(c),
                })
            }
        };
        let (exit, next) = if a.pants == here && Some(a.slot) != entry {
            (a, b)
        } else if b.pants == here && Some(b.slot) != entry {
            (b, a)
        } else {
            return Err(Error::BadPath(format!(
                "cuff {} does not leave pants {}",
                g.cuff_label(c),
                g.pants_label(here)
            )));
        };
        legs.push((here, entry.unwrap_or(exit.slot), exit.slot));
        here = next.pants;
        entry = Some(next.slot);
    }
    let last_in = entry.expect("at least one cuff");

    let mut steps = Vec::with_capacity(4 * cuffs.len());
    let mut wind = windings.iter().copied();
    for (i, &(p, slot_in, slot_out)) in legs.iter().enumerate() {
        let slot_in = if i == 0 { slot_out } else { slot_in };
        steps.push(Step::Traverse {
            pants: p,
            slot_in,
            slot_out,
        });
        steps.push(Step::Cross {
            cuff: cuffs[i],
            winding: wind.next().unwrap(),
        });
    }
    steps.push(Step::Traverse {
        pants: here,
        slot_in: last_in,
        slot_out: last_in,
    });
    for (i, &(p, slot_in, slot_out)) in legs.iter().enumerate().rev() {
        steps.push(Step::Cross {
            cuff: cuffs[i],
            winding: wind.next().unwrap(),
        });
        if i > 0 {
            steps.push(Step::Traverse {
                pants: p,
                slot_in: slot_out,
                slot_out: slot_in,
            });
        }
    }
    Ok(CurveWord::Steps(steps))
}

/// Random [`out_and_back`] curve along a non-backtracking walk of at most
/// `max_cuffs` interior cuffs, with windings in `-max_winding..=max_winding`.
pub fn random_out_and_back<R: Rng + ?Sized>(
    g: &PantsGraph,
    rng: &mut R,
    max_cuffs: usize,
    max_winding: i64,
) -> Result<CurveWord> {
    let interior: Vec<CuffId> = g.interior_cuffs().collect();
    if interior.is_empty() {
        return Err(Error::BadGraph("no interior cuff".into()));
    }
    let first = interior[rng.gen_range(0..interior.len())];
    let CuffEnds::Interior(a, b) = g.cuff(first).ends else {
        unreachable!()
    };
    let (from, mut at) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    let mut cuffs = vec![first];
    let want = rng.gen_range(1..=max_cuffs.max(1));
    while cuffs.len() < want {
        let options: Vec<CuffId> = (0..3)
            .filter(|&s| s != at.slot)
            .map(|s| g.cuff_at(SlotRef { pants: at.pants, slot: s }))
            .filter(|&c| g.is_interior(c))
            .collect();
        if options.is_empty() {
            break;
        }
        let c = options[rng.gen_range(0..options.len())];
        let exit_slot = (0..3)
            .find(|&s| s != at.slot && g.cuff_at(SlotRef { pants: at.pants, slot: s }) == c)
            .unwrap();
        at = g
            .other_end(c, SlotRef { pants: at.pants, slot: exit_slot })
            .unwrap();
        cuffs.push(c);
    }
    let windings: Vec<i64> = (0..2 * cuffs.len())
        .map(|_| rng.gen_range(-max_winding..=max_winding))
        .collect();
    out_and_back(g, from.pants, &cuffs, &windings)
}

/// Curve spec file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSpec {
    Steps { steps: Vec<StepSpec> },
    Peripheral { peripheral: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSpec {
    Cross {
        cross: i64,
        #[serde(default)]
        winding: i64,
    },
    Traverse {
        traverse: [i64; 3],
    },
    TraverseReversed {
        traverse_reversed: [i64; 2],
    },
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Resolves ids against `g`.
    pub fn to_word(&self, g: &PantsGraph) -> Result<CurveWord> {
        let cuff = |id: i64| {
            g.cuff_index(id)
                .ok_or_else(|| Error::BadPath(format!("unknown cuff id {id}")))
        };
        let pants = |id: i64| {
            g.pants_index(id)
                .ok_or_else(|| Error::BadPath(format!("unknown pants id {id}")))
        };
        let slot = |p: i64, s: i64| {
            if (0..3).contains(&s) {
                Ok(s as usize)
            } else {
                Err(Error::BadPath(format!("pants {p}: slot {s} out of range")))
            }
        };
        match self {
            CurveSpec::Peripheral { peripheral } => Ok(CurveWord::Peripheral(cuff(*peripheral)?)),
            CurveSpec::Steps { steps } => steps
                .iter()
                .map(|s| match *s {
                    StepSpec::Cross { cross, winding } => Ok(Step::Cross {
                        cuff: cuff(cross)?,
                        winding,
                    }),
                    StepSpec::Traverse {
                        traverse: [p, si, so],
                    } => Ok(Step::Traverse {
                        pants: pants(p)?,
                        slot_in: slot(p, si)?,
                        slot_out: slot(p, so)?,
                    }),
                    StepSpec::TraverseReversed {
                        traverse_reversed: [p, s],
                    } => Ok(Step::TraverseReversed {
                        pants: pants(p)?,
                        slot: slot(p, s)?,
                    }),
                })
                .collect::<Result<Vec<_>>>()
                .map(CurveWord::Steps),
        }
    }
}
