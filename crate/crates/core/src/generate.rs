//! Pants graphs and seeded surfaces used by the experiments.

use crate::error::{Error, Result};
use crate::pants_surface::{Cuff, CuffEnds, CuffId, PantsGraph, PantsSurface, SlotRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A row of `n` pants. Slot 0 of each pants faces left, slot 1 right and
/// slot 2 is a boundary leg. Cuffs are numbered from the left end: the left
/// boundary first, then for each pants its leg followed by its right cuff.
/// That gives `2n + 1` cuffs of which `n − 1` are interior.
pub fn chain_graph(n: usize) -> Result<PantsGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("a chain needs at least one pants".into()));
    }
    let mut cuffs = vec![Cuff {
        label: 0,
        ends: CuffEnds::Boundary(SlotRef::new(0, 0)),
    }];
    for p in 0..n {
        cuffs.push(Cuff {
            label: cuffs.len() as i64,
            ends: CuffEnds::Boundary(SlotRef::new(p, 2)),
        });
        let right = SlotRef::new(p, 1);
        let ends = if p + 1 < n {
            CuffEnds::Interior(right, SlotRef::new(p + 1, 0))
        } else {
            CuffEnds::Boundary(right)
        };
        cuffs.push(Cuff {
            label: cuffs.len() as i64,
            ends,
        });
    }
    PantsGraph::new((0..n as i64).collect(), cuffs)
}

/// Interior cuffs of [`chain_graph`] from left to right.
pub fn chain_interior(n: usize) -> Vec<CuffId> {
    (0..n.saturating_sub(1)).map(|p| CuffId(2 * p + 2)).collect()
}

/// Full binary tree of pants of the given depth (`2^{d+1} − 1` pants). Slot 0
/// faces the parent, slots 1 and 2 the children.
pub fn tree_graph(depth: usize) -> Result<PantsGraph> {
    if depth > 16 {
        return Err(Error::InvalidArgument(format!("tree depth {depth} is too large")));
    }
    let n = (1usize << (depth + 1)) - 1;
    let mut cuffs = vec![Cuff {
        label: 0,
        ends: CuffEnds::Boundary(SlotRef::new(0, 0)),
    }];
    for p in 0..n {
        for side in 1..=2 {
            let child = 2 * p + side;
            let here = SlotRef::new(p, side);
            let ends = if child < n {
                CuffEnds::Interior(here, SlotRef::new(child, 0))
            } else {
                CuffEnds::Boundary(here)
            };
            cuffs.push(Cuff {
                label: cuffs.len() as i64,
                ends,
            });
        }
    }
    PantsGraph::new((0..n as i64).collect(), cuffs)
}

/// Two pants glued slot to slot: a closed surface of genus two.
pub fn genus_two_graph() -> PantsGraph {
    let cuffs = (0..3)
        .map(|s| Cuff {
            label: s as i64,
            ends: CuffEnds::Interior(SlotRef::new(0, s), SlotRef::new(1, s)),
        })
        .collect();
    PantsGraph::new(vec![0, 1], cuffs).expect("valid graph")
}

/// One pants with slots 0 and 1 glued; slot 2 is the boundary.
pub fn one_holed_torus_graph() -> PantsGraph {
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
    PantsGraph::new(vec![0], cuffs).expect("valid graph")
}

/// Graph topology by name: `chain`, `tree`, `genus2` or `torus`. `size` is
/// the number of pants for chains and the depth for trees.
pub fn graph_by_name(name: &str, size: usize) -> Result<PantsGraph> {
    match name {
        "chain" => chain_graph(size),
        "tree" => tree_graph(size),
        "genus2" => Ok(genus_two_graph()),
        "torus" => Ok(one_holed_torus_graph()),
        other => Err(Error::UnknownGenerator(other.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthRule {
    Constant(f64),
    /// `exp` of a uniform draw in `[ln min, ln max]`.
    LogUniform { min: f64, max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwistRule {
    Constant(f64),
    /// Uniform in `[0, l)`.
    Uniform,
}

/// A surface on `graph` with seeded lengths and twists.
pub fn seeded_surface(
    graph: PantsGraph,
    lengths: LengthRule,
    twists: TwistRule,
    m0: f64,
    seed: u64,
) -> Result<PantsSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.num_cuffs();
    let ls: Vec<f64> = match lengths {
        LengthRule::Constant(l) => vec![l; n],
        LengthRule::LogUniform { min, max } => {
            if !(min > 0.0 && min <= max) {
                return Err(Error::InvalidArgument(format!(
                    "log-uniform range [{min}, {max}] is invalid"
                )));
            }
            let (a, b) = (min.ln(), max.ln());
            (0..n)
                .map(|_| if a == b { min } else { rng.gen_range(a..=b).exp().clamp(min, max) })
                .collect()
        }
    };
    let ts: Vec<f64> = (0..n)
        .map(|c| {
            if !graph.is_interior(CuffId(c)) {
                return 0.0;
            }
            match twists {
                TwistRule::Constant(t) => t,
                TwistRule::Uniform => rng.gen_range(0.0..ls[c]),
            }
        })
        .collect();
    PantsSurface::build_base_with_twists(Arc::new(graph), ls, ts, m0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_counts() {
        let g = chain_graph(4).unwrap();
        assert_eq!(g.num_cuffs(), 9);
        assert_eq!(g.interior_cuffs().collect::<Vec<_>>(), chain_interior(4));
        let g = chain_graph(1).unwrap();
        assert_eq!(g.num_cuffs(), 3);
        assert_eq!(g.interior_cuffs().count(), 0);
        assert!(chain_graph(0).is_err());
    }

    #[test]
    fn tree_counts() {
        for d in 0..5 {
            let g = tree_graph(d).unwrap();
            let n = (1 << (d + 1)) - 1;
            assert_eq!(g.num_pants(), n);
            assert_eq!(g.interior_cuffs().count(), n - 1);
            assert_eq!(g.num_cuffs(), n - 1 + 1 + (1 << (d + 1)));
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(graph_by_name("sphere", 1), Err(Error::UnknownGenerator(_))));
        assert_eq!(graph_by_name("torus", 0).unwrap().num_pants(), 1);
    }

    #[test]
    fn seeded_is_deterministic() {
        let rule = LengthRule::LogUniform { min: 1e-6, max: 1.0 };
        let a = seeded_surface(chain_graph(5).unwrap(), rule, TwistRule::Uniform, 1.0, 3).unwrap();
        let b = seeded_surface(chain_graph(5).unwrap(), rule, TwistRule::Uniform, 1.0, 3).unwrap();
        let c = seeded_surface(chain_graph(5).unwrap(), rule, TwistRule::Uniform, 1.0, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.lengths().iter().all(|&l| (1e-6..=1.0).contains(&l)));
    }
}
