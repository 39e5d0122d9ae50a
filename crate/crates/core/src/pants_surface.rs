//! Marked surfaces glued from pairs of pants.
//!
//! Each pair of pants is cut by its three seams into two right-angled
//! hexagons. The hexagon `H₊` is the one whose counterclockwise boundary
//! visits the cuffs in slot order `0, 1, 2`. On the cuff in slot `i` we put a
//! coordinate that increases in the direction keeping the pants on the left,
//! with origin at the foot of the seam towards slot `i + 1 (mod 3)`; the foot
//! of the seam towards slot `i − 1` then sits half a cuff away.
//!
//! Holonomy is computed with moving frames (see [`crate::hyp_core`]). A
//! canonical frame sits at every slot origin pointing along the cuff
//! coordinate. Traversing a pants from slot `i` to slot `j` is the isometry
//! relating the two canonical frames inside the lifted `H₊`; for `i = j` the
//! path follows the self-perpendicular arc that crosses the opposite seam.
//!
//! Crossing a cuff of length `l` and twist `t` with winding `w` moves
//! `t + w·l` along the cuff and turns around. The twist is the position of the
//! far origin in the near cuff coordinate, so a positive twist shifts the far
//! side to the left as seen from either side: left twists are positive.

use crate::error::{Error, Result};
use crate::hyp_core::{alternate_side, pentagon_side, Isometry};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PantsId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuffId(pub usize);

/// One of the three boundary slots of a pants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotRef {
    pub pants: PantsId,
    pub slot: usize,
}

impl SlotRef {
    pub fn new(pants: usize, slot: usize) -> Self {
        SlotRef {
            pants: PantsId(pants),
            slot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CuffEnds {
    Interior(SlotRef, SlotRef),
    Boundary(SlotRef),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cuff {
    /// External id, as used in spec files and reports.
    pub label: i64,
    pub ends: CuffEnds,
}

impl Cuff {
    pub fn is_interior(&self) -> bool {
        matches!(self.ends, CuffEnds::Interior(..))
    }
}

/// Combinatorics of a pants decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsGraph {
    pants_labels: Vec<i64>,
    cuffs: Vec<Cuff>,
    slot_cuff: Vec<[CuffId; 3]>,
}

impl PantsGraph {
    /// Validates that every slot carries exactly one cuff end and that the
    /// graph is connected.
    pub fn new(pants_labels: Vec<i64>, cuffs: Vec<Cuff>) -> Result<Self> {
        let n = pants_labels.len();
        if n == 0 {
            return Err(Error::BadGraph("no pants".into()));
        }
        let mut seen = HashSet::new();
        for &p in &pants_labels {
            if !seen.insert(p) {
                return Err(Error::BadGraph(format!("duplicate pants id {p}")));
            }
        }
        let mut seen = HashSet::new();
        for c in &cuffs {
            if !seen.insert(c.label) {
                return Err(Error::BadGraph(format!("duplicate cuff id {}", c.label)));
            }
        }

        let mut slot_cuff: Vec<[Option<CuffId>; 3]> = vec![[None; 3]; n];
        for (ci, cuff) in cuffs.iter().enumerate() {
            let ends: Vec<SlotRef> = match cuff.ends {
                CuffEnds::Interior(a, b) => vec![a, b],
                CuffEnds::Boundary(a) => vec![a],
            };
            for end in ends {
                if end.pants.0 >= n || end.slot >= 3 {
                    return Err(Error::BadGraph(format!(
                        "cuff {} attaches to missing slot ({}, {})",
                        cuff.label,
                        label_or_index(&pants_labels, end.pants.0),
                        end.slot
                    )));
                }
                let cell = &mut slot_cuff[end.pants.0][end.slot];
                if let Some(other) = cell {
                    return Err(Error::BadGraph(format!(
                        "slot ({}, {}) used by cuffs {} and {}",
                        pants_labels[end.pants.0], end.slot, cuffs[other.0].label, cuff.label
                    )));
                }
                *cell = Some(CuffId(ci));
            }
        }
        let mut full = Vec::with_capacity(n);
        for (p, slots) in slot_cuff.iter().enumerate() {
            let mut row = [CuffId(0); 3];
            for (s, c) in slots.iter().enumerate() {
                row[s] = c.ok_or_else(|| {
                    Error::BadGraph(format!("slot ({}, {s}) has no cuff", pants_labels[p]))
                })?;
            }
            full.push(row);
        }

        let graph = PantsGraph {
            pants_labels,
            cuffs,
            slot_cuff: full,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.num_pants();
        let mut reached = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        reached[0] = true;
        while let Some(p) = queue.pop_front() {
            for c in self.slot_cuff[p] {
                if let CuffEnds::Interior(a, b) = self.cuffs[c.0].ends {
                    for q in [a.pants.0, b.pants.0] {
                        if !reached[q] {
                            reached[q] = true;
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        match reached.iter().position(|r| !r) {
            Some(p) => Err(Error::BadGraph(format!(
                "pants {} is not connected to pants {}",
                self.pants_labels[p], self.pants_labels[0]
            ))),
            None => Ok(()),
        }
    }

    pub fn num_pants(&self) -> usize {
        self.pants_labels.len()
    }

    pub fn num_cuffs(&self) -> usize {
        self.cuffs.len()
    }

    pub fn cuffs(&self) -> &[Cuff] {
        &self.cuffs
    }

    pub fn cuff(&self, c: CuffId) -> &Cuff {
        &self.cuffs[c.0]
    }

    pub fn cuff_label(&self, c: CuffId) -> i64 {
        self.cuffs[c.0].label
    }

    pub fn pants_label(&self, p: PantsId) -> i64 {
        self.pants_labels[p.0]
    }

    pub fn pants_labels(&self) -> &[i64] {
        &self.pants_labels
    }

    pub fn cuff_at(&self, slot: SlotRef) -> CuffId {
        self.slot_cuff[slot.pants.0][slot.slot]
    }

    pub fn cuff_index(&self, label: i64) -> Option<CuffId> {
        self.cuffs.iter().position(|c| c.label == label).map(CuffId)
    }

    pub fn pants_index(&self, label: i64) -> Option<PantsId> {
        self.pants_labels.iter().position(|&p| p == label).map(PantsId)
    }

    pub fn is_interior(&self, c: CuffId) -> bool {
        self.cuffs[c.0].is_interior()
    }

    pub fn interior_cuffs(&self) -> impl Iterator<Item = CuffId> + '_ {
        self.cuffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_interior())
            .map(|(i, _)| CuffId(i))
    }

    /// The end of `cuff` opposite `from`; `None` for boundary cuffs or when
    /// `from` is not an end of `cuff`.
    pub fn other_end(&self, cuff: CuffId, from: SlotRef) -> Option<SlotRef> {
        match self.cuffs[cuff.0].ends {
            CuffEnds::Interior(a, b) if a == from => Some(b),
            CuffEnds::Interior(a, b) if b == from => Some(a),
            _ => None,
        }
    }

    /// Returns a copy with cuffs reordered: new cuff `i` is old cuff `perm[i]`.
    pub fn permute_cuffs(&self, perm: &[usize]) -> Result<PantsGraph> {
        if perm.len() != self.num_cuffs() {
            return Err(Error::IndexMismatch("permutation length".into()));
        }
        let cuffs = perm.iter().map(|&i| self.cuffs[i].clone()).collect();
        PantsGraph::new(self.pants_labels.clone(), cuffs)
    }
}

fn label_or_index(labels: &[i64], i: usize) -> String {
    labels
        .get(i)
        .map(|l| l.to_string())
        .unwrap_or_else(|| format!("#{i}"))
}

/// Fenchel-Nielsen coordinates, indexed by cuff. Twists of boundary cuffs are
/// always zero and carry no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct FnCoordinates {
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

/// A step of a closed path on the pants graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// Cross an interior cuff, winding `winding` extra full turns along it.
    Cross { cuff: CuffId, winding: i64 },
    /// Pass through a pants from one slot to another (or back to the same).
    Traverse {
        pants: PantsId,
        slot_in: usize,
        slot_out: usize,
    },
    /// The self-traversal of `slot` run the other way round. Its holonomy is
    /// the inverse of `Traverse { pants, slot, slot }`.
    TraverseReversed { pants: PantsId, slot: usize },
}

impl Step {
    /// `(pants, slot_in, slot_out)` of a traversal.
    pub fn traversal(&self) -> Option<(PantsId, usize, usize)> {
        match *self {
            Step::Traverse {
                pants,
                slot_in,
                slot_out,
            } => Some((pants, slot_in, slot_out)),
            Step::TraverseReversed { pants, slot } => Some((pants, slot, slot)),
            Step::Cross { .. } => None,
        }
    }
}

/// Cached per-pants geometry: common perpendiculars between slots and the
/// frame-to-frame isometries between slot origins.
#[derive(Debug, Clone)]
struct PantsBlocks {
    perp: [[f64; 3]; 3],
    traverse: [[Isometry; 3]; 3],
}

impl PantsBlocks {
    fn new(lengths: [f64; 3]) -> Result<Self> {
        let half = lengths.map(|l| 0.5 * l);
        let mut perp = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let k = 3 - i - j;
                    perp[i][j] = alternate_side(half[k], half[i], half[j]);
                }
            }
        }
        // self-perpendicular of slot i, split by the seam between i+1 and i+2
        // into two right-angled pentagons; `foot[i]` is the offset of its feet
        // from the origin of slot i.
        let mut foot = [0.0; 3];
        for i in 0..3 {
            let j = (i + 1) % 3;
            let half_perp = pentagon_side(half[j], perp[i][j])?;
            perp[i][i] = 2.0 * half_perp;
            foot[i] = (half[j].cosh() / half_perp.sinh()).asinh();
        }

        let turn = Isometry::rotation(FRAC_PI_2);
        let fwd = Isometry::translation;
        let mut traverse = [[Isometry::IDENTITY; 3]; 3];
        for i in 0..3 {
            let next = (i + 1) % 3;
            let prev = (i + 2) % 3;
            traverse[i][next] = turn * fwd(perp[i][next]) * turn * fwd(half[next]);
            traverse[i][prev] = fwd(-half[i]) * turn * fwd(perp[i][prev]) * turn;
            traverse[i][i] =
                fwd(-foot[i]) * turn * fwd(perp[i][i]) * turn * fwd(-foot[i]);
        }
        Ok(PantsBlocks { perp, traverse })
    }
}

/// A marked hyperbolic surface: pants graph plus Fenchel-Nielsen data.
#[derive(Debug, Clone)]
pub struct PantsSurface {
    graph: Arc<PantsGraph>,
    fn_coords: FnCoordinates,
    m0: f64,
    blocks: Vec<PantsBlocks>,
}

impl PartialEq for PantsSurface {
    fn eq(&self, other: &Self) -> bool {
        self.same_graph(other) && self.fn_coords == other.fn_coords && self.m0 == other.m0
    }
}

impl PantsSurface {
    /// Assembles a surface from arbitrary (positive, finite) FN data.
    pub fn new(graph: Arc<PantsGraph>, fn_coords: FnCoordinates, m0: f64) -> Result<Self> {
        let n = graph.num_cuffs();
        if fn_coords.lengths.len() != n || fn_coords.twists.len() != n {
            return Err(Error::IndexMismatch(format!(
                "{} cuffs but {} lengths and {} twists",
                n,
                fn_coords.lengths.len(),
                fn_coords.twists.len()
            )));
        }
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::InvalidArgument(format!("M0 = {m0} must be positive")));
        }
        for (i, (&l, &t)) in fn_coords.lengths.iter().zip(&fn_coords.twists).enumerate() {
            let label = graph.cuffs[i].label;
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::LengthOutOfRange {
                    cuff: label,
                    length: l,
                    max: f64::INFINITY,
                });
            }
            if !t.is_finite() {
                return Err(Error::InvalidArgument(format!("cuff {label}: twist {t}")));
            }
            if t != 0.0 && !graph.cuffs[i].is_interior() {
                return Err(Error::InvalidArgument(format!(
                    "cuff {label}: boundary cuffs carry no twist"
                )));
            }
        }
        let blocks = (0..graph.num_pants())
            .map(|p| {
                let ls = graph.slot_cuff[p].map(|c| fn_coords.lengths[c.0]);
                PantsBlocks::new(ls)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PantsSurface {
            graph,
            fn_coords,
            m0,
            blocks,
        })
    }

    /// Base surface with all lengths in `(0, M0]` and twists zero.
    pub fn build_base(graph: Arc<PantsGraph>, lengths: Vec<f64>, m0: f64) -> Result<Self> {
        let n = graph.num_cuffs();
        Self::build_base_with_twists(graph, lengths, vec![0.0; n], m0)
    }

    /// Base surface with given twists reduced into `[0, l)`.
    pub fn build_base_with_twists(
        graph: Arc<PantsGraph>,
        lengths: Vec<f64>,
        twists: Vec<f64>,
        m0: f64,
    ) -> Result<Self> {
        if lengths.len() != graph.num_cuffs() {
            return Err(Error::IndexMismatch(format!(
                "{} cuffs but {} lengths",
                graph.num_cuffs(),
                lengths.len()
            )));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !(l > 0.0 && l <= m0) {
                return Err(Error::LengthOutOfRange {
                    cuff: graph.cuffs[i].label,
                    length: l,
                    max: m0,
                });
            }
        }
        let twists = twists
            .iter()
            .zip(&lengths)
            .map(|(&t, &l)| normalize_twist(t, l))
            .collect();
        Self::new(graph, FnCoordinates { lengths, twists }, m0)
    }

    pub fn graph(&self) -> &PantsGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<PantsGraph> {
        &self.graph
    }

    pub fn same_graph(&self, other: &PantsSurface) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph
    }

    pub fn fn_coords(&self) -> &FnCoordinates {
        &self.fn_coords
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn length(&self, c: CuffId) -> f64 {
        self.fn_coords.lengths[c.0]
    }

    pub fn twist(&self, c: CuffId) -> f64 {
        self.fn_coords.twists[c.0]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.fn_coords.lengths
    }

    pub fn twists(&self) -> &[f64] {
        &self.fn_coords.twists
    }

    /// Same lengths, new twists.
    pub fn with_twists(&self, twists: Vec<f64>) -> Result<Self> {
        if twists.len() != self.graph.num_cuffs() {
            return Err(Error::IndexMismatch("twist vector length".into()));
        }
        for (i, &t) in twists.iter().enumerate() {
            if !t.is_finite() || (t != 0.0 && !self.graph.cuffs[i].is_interior()) {
                return Err(Error::InvalidArgument(format!(
                    "cuff {}: invalid twist {t}",
                    self.graph.cuffs[i].label
                )));
            }
        }
        let mut out = self.clone();
        out.fn_coords.twists = twists;
        Ok(out)
    }

    /// Same surface with the twist on one cuff replaced.
    pub fn with_twist(&self, c: CuffId, twist: f64) -> Result<Self> {
        let mut twists = self.fn_coords.twists.clone();
        twists[c.0] = twist;
        self.with_twists(twists)
    }

    /// Same twists, new lengths (blocks are rebuilt).
    pub fn with_lengths(&self, lengths: Vec<f64>) -> Result<Self> {
        Self::new(
            self.graph.clone(),
            FnCoordinates {
                lengths,
                twists: self.fn_coords.twists.clone(),
            },
            self.m0,
        )
    }

    /// Reduces every twist into `[0, l)`; the result differs from `self` by
    /// full twists.
    pub fn normalize_twists(&self) -> Self {
        let twists = self
            .fn_coords
            .twists
            .iter()
            .zip(&self.fn_coords.lengths)
            .map(|(&t, &l)| normalize_twist(t, l))
            .collect();
        let mut out = self.clone();
        out.fn_coords.twists = twists;
        out
    }

    fn check_slot(&self, pants: PantsId, slot: usize) -> Result<()> {
        if pants.0 >= self.graph.num_pants() || slot >= 3 {
            return Err(Error::BadPath(format!(
                "no slot ({}, {slot})",
                label_or_index(&self.graph.pants_labels, pants.0)
            )));
        }
        Ok(())
    }

    /// Length of the common perpendicular between two boundary geodesics of a
    /// pants; `slot_a == slot_b` gives the self-perpendicular.
    pub fn perp_length(&self, pants: PantsId, slot_a: usize, slot_b: usize) -> Result<f64> {
        self.check_slot(pants, slot_a)?;
        self.check_slot(pants, slot_b)?;
        Ok(self.blocks[pants.0].perp[slot_a][slot_b])
    }

    /// Isometry between the canonical frames of two slot origins of a pants.
    pub fn traverse_block(&self, pants: PantsId, slot_in: usize, slot_out: usize) -> Result<Isometry> {
        self.check_slot(pants, slot_in)?;
        self.check_slot(pants, slot_out)?;
        Ok(self.blocks[pants.0].traverse[slot_in][slot_out])
    }

    /// Isometry for crossing an interior cuff.
    pub fn cross_block(&self, cuff: CuffId, winding: i64) -> Isometry {
        let shift = self.twist(cuff) + winding as f64 * self.length(cuff);
        Isometry::translation(shift) * Isometry::rotation(PI)
    }

    /// Checks that `path` is a closed alternating loop on the pants graph that
    /// only crosses interior cuffs.
    pub fn validate_path(&self, path: &[Step]) -> Result<()> {
        let n = path.len();
        if n == 0 {
            return Ok(());
        }
        if !n.is_multiple_of(2) {
            return Err(Error::BadPath(format!("odd number of steps ({n})")));
        }
        for i in 0..n {
            let (cur, next) = (path[i], path[(i + 1) % n]);
            match (cur.traversal(), next) {
                (Some((pants, slot_in, slot_out)), Step::Cross { cuff, .. }) => {
                    self.check_slot(pants, slot_in)?;
                    self.check_slot(pants, slot_out)?;
                    if cuff.0 >= self.graph.num_cuffs() {
                        return Err(Error::BadPath(format!("step {}: no cuff #{}", i + 1, cuff.0)));
                    }
                    let exit = SlotRef { pants, slot: slot_out };
                    if self.graph.cuff_at(exit) != cuff {
                        return Err(Error::BadPath(format!(
                            "step {i}: slot ({}, {slot_out}) is not on cuff {}",
                            self.graph.pants_label(pants),
                            self.graph.cuff_label(cuff)
                        )));
                    }
                    let Some(entry) = self.graph.other_end(cuff, exit) else {
                        return Err(Error::BadPath(format!(
                            "step {}: cuff {} is a boundary cuff",
                            i + 1,
                            self.graph.cuff_label(cuff)
                        )));
                    };
                    match path[(i + 2) % n].traversal() {
                        Some((p2, s2, _)) if p2 == entry.pants && s2 == entry.slot => {}
                        _ => {
                            return Err(Error::BadPath(format!(
                                "step {}: crossing cuff {} must continue from slot ({}, {})",
                                (i + 2) % n,
                                self.graph.cuff_label(cuff),
                                self.graph.pants_label(entry.pants),
                                entry.slot
                            )))
                        }
                    }
                }
                (None, next) if next.traversal().is_some() => {}
                _ => {
                    return Err(Error::BadPath(format!(
                        "steps {i} and {} do not alternate",
                        (i + 1) % n
                    )))
                }
            }
        }
        Ok(())
    }

    /// Holonomy of a closed path, read from the frame where the path starts.
    pub fn cuff_crossing_holonomy(&self, path: &[Step]) -> Result<Isometry> {
        self.validate_path(path)?;
        Ok(self.holonomy_unchecked(path))
    }

    pub(crate) fn holonomy_unchecked(&self, path: &[Step]) -> Isometry {
        path.iter().fold(Isometry::IDENTITY, |acc, step| {
            let block = match *step {
                Step::Cross { cuff, winding } => self.cross_block(cuff, winding),
                Step::Traverse {
                    pants,
                    slot_in,
                    slot_out,
                } => self.blocks[pants.0].traverse[slot_in][slot_out],
                Step::TraverseReversed { pants, slot } => self.blocks[pants.0].traverse[slot][slot].inverse(),
            };
            acc * block
        })
    }

    pub fn to_spec(&self) -> SurfaceSpec {
        let g = &self.graph;
        SurfaceSpec {
            m0: self.m0,
            pants: g.pants_labels.iter().map(|&id| PantsSpec { id }).collect(),
            cuffs: g
                .cuffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let end = |s: SlotRef| [g.pants_labels[s.pants.0], s.slot as i64];
                    let (ends, twist) = match c.ends {
                        CuffEnds::Interior(a, b) => (vec![end(a), end(b)], Some(self.fn_coords.twists[i])),
                        CuffEnds::Boundary(a) => (vec![end(a)], None),
                    };
                    CuffSpec {
                        id: c.label,
                        ends,
                        length: Some(self.fn_coords.lengths[i]),
                        twist,
                    }
                })
                .collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        SurfaceSpec::from_json(&text)?.build()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_spec().to_json()?)?;
        Ok(())
    }
}

/// Reduces `t` into `[0, l)`.
pub fn normalize_twist(t: f64, l: f64) -> f64 {
    let r = t.rem_euclid(l);
    if r >= l {
        0.0
    } else {
        r
    }
}

/// Surface spec file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(rename = "M0")]
    pub m0: f64,
    pub pants: Vec<PantsSpec>,
    pub cuffs: Vec<CuffSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PantsSpec {
    pub id: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuffSpec {
    pub id: i64,
    pub ends: Vec<[i64; 2]>,
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<f64>,
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn graph(&self) -> Result<PantsGraph> {
        let labels: Vec<i64> = self.pants.iter().map(|p| p.id).collect();
        let index: HashMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let slot = |cuff: i64, [p, s]: [i64; 2]| -> Result<SlotRef> {
            let pants = *index.get(&p).ok_or_else(|| {
                Error::BadGraph(format!("cuff {cuff}: unknown pants id {p}"))
            })?;
            if !(0..3).contains(&s) {
                return Err(Error::BadGraph(format!("cuff {cuff}: slot {s} not in 0..3")));
            }
            Ok(SlotRef::new(pants, s as usize))
        };
        let cuffs = self
            .cuffs
            .iter()
            .map(|c| {
                let ends = match c.ends.as_slice() {
                    [a] => CuffEnds::Boundary(slot(c.id, *a)?),
                    [a, b] => CuffEnds::Interior(slot(c.id, *a)?, slot(c.id, *b)?),
                    _ => {
                        return Err(Error::BadGraph(format!(
                            "cuff {}: expected one or two ends, got {}",
                            c.id,
                            c.ends.len()
                        )))
                    }
                };
                Ok(Cuff { label: c.id, ends })
            })
            .collect::<Result<Vec<_>>>()?;
        PantsGraph::new(labels, cuffs)
    }

    fn coordinates(&self) -> Result<FnCoordinates> {
        let mut lengths = Vec::with_capacity(self.cuffs.len());
        let mut twists = Vec::with_capacity(self.cuffs.len());
        for c in &self.cuffs {
            let l = c.length.ok_or_else(|| {
                Error::InvalidArgument(format!("cuff {}: missing length", c.id))
            })?;
            if c.ends.len() == 1 && c.twist.is_some_and(|t| t != 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "cuff {}: boundary cuffs carry no twist",
                    c.id
                )));
            }
            lengths.push(l);
            twists.push(if c.ends.len() == 2 { c.twist.unwrap_or(0.0) } else { 0.0 });
        }
        Ok(FnCoordinates { lengths, twists })
    }

    /// Surface exactly as written.
    pub fn build(&self) -> Result<PantsSurface> {
        let graph = Arc::new(self.graph()?);
        let coords = self.coordinates()?;
        PantsSurface::new(graph, coords, self.m0)
    }

    /// Base surface: lengths must lie in `(0, M0]`, twists are reduced into
    /// `[0, l)`.
    pub fn build_base(&self) -> Result<PantsSurface> {
        let graph = Arc::new(self.graph()?);
        let coords = self.coordinates()?;
        PantsSurface::build_base_with_twists(graph, coords.lengths, coords.twists, self.m0)
    }
}
