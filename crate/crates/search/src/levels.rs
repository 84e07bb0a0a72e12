//! Level-wise isomorph-free enumeration of structure-free multisets.
//!
//! All the constant searches share one shape: a downward-closed family of
//! multisets (no zero-sum, no short zero-sum, fewer than k disjoint
//! zero-sums, ...) is explored level by level. Level `s+1` is produced by
//! extending every level-`s` orbit representative by every group element,
//! filtering, canonicalizing and deduplicating. Downward closure makes this
//! complete: any structure-free multiset of size `s+1` minus one element is
//! a structure-free multiset of size `s`, whose orbit representative is in
//! the previous level.
//!
//! An empty level at size `v` is therefore a proof that every multiset of
//! size `v` contains the structure, with the previous level holding every
//! extremal orbit.
//!
//! Work is sharded across a rayon pool in chunks; each chunk keeps its own
//! packing memo. Results merge into ordered maps, so the outcome is
//! deterministic and independent of the worker count.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use zslab_core::engine::{self, PackingEngine, ZerosumQuery};
use zslab_core::multiset::GroupMultiset;
use zslab_core::symmetry::{canonical_form, CanonicalForm};
use zslab_core::GroupSpec;

use crate::SearchError;

/// Budgets for the exhaustive searches. Exceeding one is an explicit error,
/// never silent truncation.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub max_order: u64,
    pub max_size: u64,
    pub node_limit: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_order: 4096,
            max_size: 40,
            node_limit: 1_000_000_000,
        }
    }
}

/// The structure whose absence defines the searched family. Every variant
/// is downward closed: sub-multisets of structure-free multisets are
/// structure-free.
#[derive(Clone, Debug)]
pub enum Structure {
    /// Any non-empty zero-sum sub-multiset.
    AnyZerosum,
    /// A zero-sum of length at most `k`.
    ZerosumLeq { k: u64 },
    /// `k` pairwise disjoint zero-sums.
    KDisjoint { k: u8 },
    /// A zero-sum of length at most `short` or of length at least `long`.
    ZerosumLeqOrGeq { short: u64, long: u64 },
    /// Any sub-multiset matching the query.
    QueryMatch { query: ZerosumQuery },
}

impl Structure {
    /// True when `a` does NOT contain the structure.
    fn survives(&self, a: &GroupMultiset, packing: &mut Option<PackingEngine>) -> Result<bool, SearchError> {
        Ok(match self {
            Structure::AnyZerosum => engine::is_zerosum_free(a)?,
            Structure::ZerosumLeq { k } => !engine::has_zerosum_leq(a, *k)?,
            Structure::KDisjoint { k } => {
                let eng = match packing {
                    Some(e) => e,
                    None => packing.insert(PackingEngine::new(a.spec(), *k)?),
                };
                !eng.has_k_disjoint(a, *k)?
            }
            Structure::ZerosumLeqOrGeq { short, long } => {
                !engine::has_zerosum_leq(a, *short)?
                    && engine::max_zerosum_length(a)?.is_none_or(|m| m < *long)
            }
            Structure::QueryMatch { query } => engine::find_zerosum(a, query)?.is_none(),
        })
    }
}

/// Outcome of a level search.
pub struct LevelOutcome {
    /// `levels[s]` holds the orbit representatives of size `s`.
    pub levels: Vec<Vec<CanonicalForm>>,
    /// An empty level was reached: the family is exhausted and
    /// `max_free_size() + 1` is certified.
    pub complete: bool,
    pub node_count: u64,
}

impl LevelOutcome {
    /// Size of the largest structure-free multiset found.
    pub fn max_free_size(&self) -> u64 {
        (self.levels.len() as u64).saturating_sub(if self.complete { 2 } else { 1 })
    }

    pub fn extremal(&self) -> &[CanonicalForm] {
        let last = if self.complete {
            self.levels.len() - 2
        } else {
            self.levels.len() - 1
        };
        &self.levels[last]
    }
}

/// How candidates are identified with each other.
enum Dedup {
    /// Full GL(r, p) canonicalization.
    Gl,
    /// No symmetry: the multiset itself is its representative.
    Raw,
}

/// Enumerate all structure-free multisets over the group, level by level,
/// up to linear equivalence when the group is elementary abelian (raw
/// deduplication otherwise).
///
/// `stop_at = Some(n)` stops after producing level `n` even if non-empty;
/// `distinct_only` restricts the family to sets of distinct elements.
pub fn enumerate_structure_free(
    spec: &GroupSpec,
    structure: &Structure,
    distinct_only: bool,
    stop_at: Option<u64>,
    budget: &SearchBudget,
) -> Result<LevelOutcome, SearchError> {
    if spec.order() > budget.max_order {
        return Err(SearchError::Budget(format!(
            "group order {} exceeds budget {}",
            spec.order(),
            budget.max_order
        )));
    }
    let dedup = if spec.order() <= 4096 && spec.elementary_abelian().is_some() {
        Dedup::Gl
    } else {
        Dedup::Raw
    };
    let nodes = AtomicU64::new(0);
    let mut levels: Vec<Vec<CanonicalForm>> = vec![vec![canonicalize(
        &GroupMultiset::empty(spec),
        &dedup,
    )?]];
    let mut complete = false;

    loop {
        let size = levels.len() as u64;
        if stop_at.is_some_and(|n| size > n) {
            break;
        }
        if size > budget.max_size {
            return Err(SearchError::Budget(format!(
                "level {size} exceeds size budget {}",
                budget.max_size
            )));
        }
        let parents = levels.last().unwrap();
        let chunk_maps: Vec<BTreeMap<Vec<u8>, CanonicalForm>> = parents
            .par_chunks(16)
            .map(|chunk| {
                let mut local: BTreeMap<Vec<u8>, CanonicalForm> = BTreeMap::new();
                let mut packing = None;
                for parent in chunk {
                    for x in 0..spec.order() {
                        if distinct_only && parent.representative.count_index(x) > 0 {
                            continue;
                        }
                        let mut cand = parent.representative.clone();
                        cand.insert_index(x, 1);
                        nodes.fetch_add(1, Ordering::Relaxed);
                        if !structure.survives(&cand, &mut packing)? {
                            continue;
                        }
                        let form = canonicalize(&cand, &dedup)?;
                        local.entry(form.representative.canonical_bytes()).or_insert(form);
                    }
                }
                Ok(local)
            })
            .collect::<Result<_, SearchError>>()?;

        let mut merged: BTreeMap<Vec<u8>, CanonicalForm> = BTreeMap::new();
        for m in chunk_maps {
            merged.extend(m);
        }
        let next: Vec<CanonicalForm> = merged.into_values().collect();
        let node_count = nodes.load(Ordering::Relaxed);
        if node_count > budget.node_limit {
            return Err(SearchError::Budget(format!(
                "node count {node_count} exceeds budget {}",
                budget.node_limit
            )));
        }
        let empty = next.is_empty();
        levels.push(next);
        if empty {
            complete = true;
            break;
        }
    }
    Ok(LevelOutcome {
        levels,
        complete,
        node_count: nodes.load(Ordering::Relaxed),
    })
}

fn canonicalize(a: &GroupMultiset, dedup: &Dedup) -> Result<CanonicalForm, SearchError> {
    Ok(match dedup {
        Dedup::Gl => canonical_form(a)?,
        Dedup::Raw => CanonicalForm {
            representative: a.clone(),
            stabilizer_size: 1,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zerosum_free_over_z3_square() {
        // Davenport-style search over Z_3^2: free sizes go up to 4
        let spec = GroupSpec::elementary(3, 2).unwrap();
        let out = enumerate_structure_free(
            &spec,
            &Structure::AnyZerosum,
            false,
            None,
            &SearchBudget::default(),
        )
        .unwrap();
        assert!(out.complete);
        assert_eq!(out.max_free_size(), 4);
        for form in out.extremal() {
            assert!(engine::is_zerosum_free(&form.representative).unwrap());
        }
    }

    #[test]
    fn distinct_only_searches_stay_distinct() {
        let spec = GroupSpec::elementary(3, 2).unwrap();
        let out = enumerate_structure_free(
            &spec,
            &Structure::AnyZerosum,
            true,
            None,
            &SearchBudget::default(),
        )
        .unwrap();
        assert!(out.complete);
        for level in &out.levels {
            for form in level {
                assert!(form
                    .representative
                    .support()
                    .iter()
                    .all(|&(_, c)| c == 1));
            }
        }
    }

    #[test]
    fn raw_dedup_for_cyclic_groups() {
        // Z_9 is not elementary abelian; the search still works, without
        // symmetry reduction
        let spec = GroupSpec::new(vec![9]).unwrap();
        let out = enumerate_structure_free(
            &spec,
            &Structure::AnyZerosum,
            false,
            None,
            &SearchBudget::default(),
        )
        .unwrap();
        assert!(out.complete);
        assert_eq!(out.max_free_size(), 8);
    }

    #[test]
    fn stop_at_cuts_early() {
        let spec = GroupSpec::elementary(3, 2).unwrap();
        let out = enumerate_structure_free(
            &spec,
            &Structure::AnyZerosum,
            false,
            Some(2),
            &SearchBudget::default(),
        )
        .unwrap();
        assert!(!out.complete);
        assert_eq!(out.levels.len(), 3);
    }

    #[test]
    fn budget_violations_error() {
        let spec = GroupSpec::elementary(3, 2).unwrap();
        let tight = SearchBudget { node_limit: 3, ..Default::default() };
        assert!(matches!(
            enumerate_structure_free(&spec, &Structure::AnyZerosum, false, None, &tight),
            Err(SearchError::Budget(_))
        ));
    }
}
