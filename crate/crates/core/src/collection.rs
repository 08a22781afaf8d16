//! Candidate-model collections over a shared ambient family.
//!
//! A collection fixes one maximal family (the grid's upper orders) and
//! expresses every candidate as an active subset of its coordinates, so all
//! parameter vectors live in the same ambient space and models can be
//! compared, nested, and selected against each other.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::family::ModelFamily;
use crate::spec::{ModelSpec, ParamBox};
use crate::Result;

/// Exhaustive mode refuses collections larger than `2^20` candidates.
const MAX_OPTIONAL_EXHAUSTIVE: usize = 20;

/// Order bounds defining the ambient family of a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "grid", rename_all = "snake_case"))]
pub enum FamilyGrid {
    /// AR orders `0..=max_p`.
    Ar {
        /// Largest mean order.
        max_p: usize,
    },
    /// ARCH orders `0..=max_q`.
    Arch {
        /// Largest shock order.
        max_q: usize,
    },
    /// GARCH order pairs `(p, q)` with `p <= max_p`, `q <= max_q`.
    Garch {
        /// Largest variance-lag order.
        max_p: usize,
        /// Largest shock order.
        max_q: usize,
    },
    /// TARCH orders `0..=max_q`.
    Tarch {
        /// Largest lag order.
        max_q: usize,
    },
    /// ARMA-GARCH order tuples bounded coordinatewise.
    ArmaGarch {
        /// Largest AR order of the mean.
        max_p: usize,
        /// Largest MA order of the mean.
        max_q: usize,
        /// Largest variance-lag order of the error block.
        max_big_p: usize,
        /// Largest shock order of the error block.
        max_big_q: usize,
    },
}

impl FamilyGrid {
    /// The maximal family all candidates embed into.
    pub fn ambient(&self) -> ModelFamily {
        match *self {
            FamilyGrid::Ar { max_p } => ModelFamily::Ar { p: max_p },
            FamilyGrid::Arch { max_q } => ModelFamily::Arch { q: max_q },
            FamilyGrid::Garch { max_p, max_q } => ModelFamily::Garch { p: max_p, q: max_q },
            FamilyGrid::Tarch { max_q } => ModelFamily::Tarch { q: max_q },
            FamilyGrid::ArmaGarch { max_p, max_q, max_big_p, max_big_q } => {
                ModelFamily::ArmaGarch { p: max_p, q: max_q, big_p: max_big_p, big_q: max_big_q }
            }
        }
    }
}

/// How candidates are enumerated from a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CollectionMode {
    /// One candidate per order tuple, activating all lags up to each order
    /// (nested chains along each order coordinate).
    Hierarchical,
    /// One candidate per subset of optional coordinates; mandatory
    /// coordinates are always active.
    Exhaustive,
}

/// Builds the candidate collection for `grid` in the given `mode`, with all
/// candidates sharing `bounds` over the ambient coordinates.
///
/// Candidates that would leave a variance-lag (`b`) coefficient active with
/// no shock (`a`) coefficient active are skipped in both modes: such a
/// recursion never sees the data and its parameters are unidentifiable
/// (the same rule [`ModelFamily::validate`] applies to whole families).
/// The result never contains duplicate active sets, and its enumeration
/// order is deterministic.
///
/// # Errors
///
/// Invalid ambient family or bounds, and exhaustive mode with more than 20
/// optional coordinates (combinatorial explosion guard).
pub fn build_collection(
    grid: FamilyGrid,
    mode: CollectionMode,
    bounds: &ParamBox,
) -> Result<Vec<ModelSpec>> {
    let ambient = grid.ambient();
    ambient.validate()?;
    let actives = match mode {
        CollectionMode::Hierarchical => hierarchical_actives(grid),
        CollectionMode::Exhaustive => exhaustive_actives(&ambient)?,
    };
    let mut specs = Vec::with_capacity(actives.len());
    for active in actives {
        specs.push(ModelSpec::new(ambient, active, bounds.clone())?);
    }
    Ok(specs)
}

fn hierarchical_actives(grid: FamilyGrid) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    match grid {
        FamilyGrid::Ar { max_p } => {
            // sigma2 lives at index max_p in the ambient layout.
            for k in 0..=max_p {
                let mut active: Vec<usize> = (0..k).collect();
                active.push(max_p);
                out.push(active);
            }
        }
        FamilyGrid::Arch { max_q } => {
            for k in 0..=max_q {
                out.push((0..=k).collect());
            }
        }
        FamilyGrid::Garch { max_p, max_q } => {
            for p in 0..=max_p {
                for q in 0..=max_q {
                    if p >= 1 && q == 0 {
                        continue;
                    }
                    let mut active = alloc::vec![0];
                    active.extend(1..=q);
                    active.extend(max_q + 1..=max_q + p);
                    out.push(active);
                }
            }
        }
        FamilyGrid::Tarch { max_q } => {
            // Lag k activates both its a+ (index k) and a- (index max_q + k).
            for k in 0..=max_q {
                let mut active = alloc::vec![0];
                active.extend(1..=k);
                active.extend(max_q + 1..=max_q + k);
                active.sort_unstable();
                out.push(active);
            }
        }
        FamilyGrid::ArmaGarch { max_p, max_q, max_big_p, max_big_q } => {
            let omega = max_p + max_q;
            for p in 0..=max_p {
                for q in 0..=max_q {
                    for big_p in 0..=max_big_p {
                        for big_q in 0..=max_big_q {
                            if big_p >= 1 && big_q == 0 {
                                continue;
                            }
                            let mut active: Vec<usize> = (0..p).collect();
                            active.extend(max_p..max_p + q);
                            active.push(omega);
                            active.extend(omega + 1..=omega + big_q);
                            active.extend(omega + max_big_q + 1..=omega + max_big_q + big_p);
                            out.push(active);
                        }
                    }
                }
            }
        }
    }
    out
}

fn exhaustive_actives(ambient: &ModelFamily) -> Result<Vec<Vec<usize>>> {
    let d = ambient.dim();
    let mandatory = ambient.mandatory_index();
    let optional: Vec<usize> = (0..d).filter(|&i| i != mandatory).collect();
    if optional.len() > MAX_OPTIONAL_EXHAUSTIVE {
        return Err(Error::InvalidSpec {
            reason: format!(
                "exhaustive enumeration of {} optional coordinates exceeds the limit of {}",
                optional.len(),
                MAX_OPTIONAL_EXHAUSTIVE
            ),
        });
    }
    let (shock_range, persist_range) = match *ambient {
        ModelFamily::Garch { p, q } => (1..q + 1, q + 1..q + 1 + p),
        ModelFamily::ArmaGarch { p, q, big_p, big_q } => {
            let w = p + q;
            (w + 1..w + 1 + big_q, w + 1 + big_q..w + 1 + big_q + big_p)
        }
        _ => (0..0, 0..0),
    };
    let mut out = Vec::with_capacity(1 << optional.len());
    for mask in 0_u32..(1 << optional.len()) {
        let mut active = alloc::vec![mandatory];
        for (bit, &idx) in optional.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                active.push(idx);
            }
        }
        active.sort_unstable();
        let has_shock = active.iter().any(|i| shock_range.contains(i));
        let has_persist = active.iter().any(|i| persist_range.contains(i));
        if has_persist && !has_shock {
            continue;
        }
        out.push(active);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn actives(specs: &[ModelSpec]) -> Vec<Vec<usize>> {
        specs.iter().map(|s| s.active().to_vec()).collect()
    }

    #[test]
    fn hierarchical_ar_emits_one_spec_per_order() {
        let grid = FamilyGrid::Ar { max_p: 2 };
        let specs =
            build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(actives(&specs), vec![vec![2], vec![0, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn hierarchical_ar_chain_is_nested() {
        let grid = FamilyGrid::Ar { max_p: 3 };
        let specs =
            build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(specs.len(), 4);
        for w in specs.windows(2) {
            assert!(w[1].is_strict_superset_of(&w[0]));
        }
    }

    #[test]
    fn hierarchical_garch_skips_unidentifiable_order_pairs() {
        // (p, q) = (1, 0) would activate b1 with no shock coefficient, so
        // the 1x1 grid yields 3 candidates, not 4.
        let grid = FamilyGrid::Garch { max_p: 1, max_q: 1 };
        let specs =
            build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(actives(&specs), vec![vec![0], vec![0, 1], vec![0, 1, 2]]);

        let grid = FamilyGrid::Garch { max_p: 2, max_q: 2 };
        let specs =
            build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(specs.len(), 7);
    }

    #[test]
    fn hierarchical_tarch_activates_slope_pairs() {
        let grid = FamilyGrid::Tarch { max_q: 2 };
        let specs =
            build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
                .unwrap();
        // Ambient layout: (omega, a+1, a+2, a-1, a-2).
        assert_eq!(actives(&specs), vec![vec![0], vec![0, 1, 3], vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn exhaustive_ar_enumerates_lag_subsets() {
        let grid = FamilyGrid::Ar { max_p: 2 };
        let specs =
            build_collection(grid, CollectionMode::Exhaustive, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(
            actives(&specs),
            vec![vec![2], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
    }

    #[test]
    fn exhaustive_garch_filters_persistence_without_shocks() {
        // Optional coordinates {a1, a2, b1, b2}: 16 subsets, minus the 3
        // with some b active and no a active.
        let grid = FamilyGrid::Garch { max_p: 2, max_q: 2 };
        let specs =
            build_collection(grid, CollectionMode::Exhaustive, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(specs.len(), 13);
        for s in &specs {
            let has_a = s.active().iter().any(|&i| (1..=2).contains(&i));
            let has_b = s.active().iter().any(|&i| (3..=4).contains(&i));
            assert!(!has_b || has_a, "unidentifiable candidate {:?}", s.active());
        }
    }

    #[test]
    fn exhaustive_mode_refuses_combinatorial_explosions() {
        let grid = FamilyGrid::Ar { max_p: 21 };
        let err =
            build_collection(grid, CollectionMode::Exhaustive, &grid.ambient().default_box());
        assert!(matches!(err, Err(Error::InvalidSpec { .. })));
    }

    #[test]
    fn collections_contain_no_duplicate_active_sets() {
        for (grid, mode) in [
            (FamilyGrid::ArmaGarch { max_p: 1, max_q: 1, max_big_p: 1, max_big_q: 1 },
             CollectionMode::Hierarchical),
            (FamilyGrid::Garch { max_p: 2, max_q: 2 }, CollectionMode::Exhaustive),
            (FamilyGrid::Tarch { max_q: 2 }, CollectionMode::Exhaustive),
        ] {
            let specs =
                build_collection(grid, mode, &grid.ambient().default_box()).unwrap();
            let mut seen = actives(&specs);
            seen.sort();
            let before = seen.len();
            seen.dedup();
            assert_eq!(seen.len(), before, "{grid:?} {mode:?} produced duplicates");
        }
    }

    #[test]
    fn arma_garch_hierarchical_counts_valid_tuples() {
        // 2 (p) x 2 (q) x 3 valid (P, Q) pairs.
        let grid = FamilyGrid::ArmaGarch { max_p: 1, max_q: 1, max_big_p: 1, max_big_q: 1 };
        let specs =
            build_collection(grid, CollectionMode::Hierarchical, &grid.ambient().default_box())
                .unwrap();
        assert_eq!(specs.len(), 12);
        // Every candidate contains omega (ambient index 2).
        assert!(specs.iter().all(|s| s.is_active(2)));
    }
}
