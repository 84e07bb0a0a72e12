//! Classification results over `Z_3^3` as executable checks: structure of
//! small distinct sets without short zero-sums, the unique 14-point
//! multiset, and the complete family of size-(3k+5) multisets without k
//! disjoint zero-sums.

use zslab_core::engine::{self, PackingEngine};
use zslab_core::multiset::GroupMultiset;
use zslab_core::symmetry::{canonical_form, orbit_dedupe, CanonicalForm};
use zslab_core::GroupSpec;

use crate::levels::{enumerate_structure_free, LevelOutcome, SearchBudget, Structure};
use crate::SearchError;

/// Distinct-element sets over `Z_3^3` without a zero-sum of length <= 3,
/// enumerated by size until they die out.
pub fn good_distinct_levels(budget: &SearchBudget) -> Result<LevelOutcome, SearchError> {
    let spec = GroupSpec::z3_cube();
    enumerate_structure_free(&spec, &Structure::ZerosumLeq { k: 3 }, true, None, budget)
}

/// All orbits of distinct-element sets of the given size with no zero-sum
/// of length <= 3.
pub fn classify_distinct_sets(
    size: u64,
    budget: &SearchBudget,
) -> Result<Vec<CanonicalForm>, SearchError> {
    let out = good_distinct_levels(budget)?;
    Ok(out
        .levels
        .get(size as usize)
        .cloned()
        .unwrap_or_default())
}

#[derive(Clone, Debug)]
pub struct FivePointReport {
    pub sets_checked: u64,
    pub violators: Vec<GroupMultiset>,
}

/// Exhaustively confirm that every 5-element distinct set of `Z_3^3` has a
/// zero-sum of length <= 3 or three elements with `x + y = z`.
pub fn check_five_point_lemma() -> Result<FivePointReport, SearchError> {
    let spec = GroupSpec::z3_cube();
    let n = spec.order();
    let mut sets_checked = 0u64;
    let mut violators = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    for e in d + 1..n {
                        let sel = [a, b, c, d, e];
                        sets_checked += 1;
                        if !five_set_ok(&spec, &sel) {
                            violators.push(
                                GroupMultiset::from_index_counts(&spec, &sel.map(|i| (i, 1u32)))
                                    .expect("indices in range"),
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(FivePointReport { sets_checked, violators })
}

fn five_set_ok(spec: &GroupSpec, sel: &[u64; 5]) -> bool {
    // a zero-sum of length <= 3 among distinct elements: the zero element,
    // an antipodal pair, or an affine line
    for (i, &x) in sel.iter().enumerate() {
        if x == 0 {
            return true;
        }
        for &y in &sel[i + 1..] {
            if spec.add_indices(x, y) == 0 {
                return true;
            }
        }
    }
    for (i, &x) in sel.iter().enumerate() {
        for (j, &y) in sel.iter().enumerate().skip(i + 1) {
            let xy = spec.add_indices(x, y);
            for &z in &sel[j + 1..] {
                if spec.add_indices(xy, z) == 0 {
                    return true;
                }
            }
        }
    }
    // x + y = z with distinct indices
    for (i, &x) in sel.iter().enumerate() {
        for (j, &y) in sel.iter().enumerate() {
            if i == j {
                continue;
            }
            let s = spec.add_indices(x, y);
            if sel.contains(&s) && s != x && s != y {
                return true;
            }
        }
    }
    false
}

/// All orbits of 14-element multisets over `Z_3^3` with no zero-sum of
/// length <= 3 and none of length >= `long_bound` (12 in the classification;
/// a larger bound relaxes the constraint).
///
/// No zero-sum of length <= 3 forces every multiplicity <= 2 (three copies
/// of one element sum to zero) and the support to be a distinct set without
/// short zero-sums, so the supports come from the classified good sets of
/// sizes 7 and 8 and only the multiplicity patterns remain to check.
pub fn classify_14_point(
    long_bound: u64,
    budget: &SearchBudget,
) -> Result<Vec<CanonicalForm>, SearchError> {
    let good = good_distinct_levels(budget)?;
    let mut candidates: Vec<GroupMultiset> = Vec::new();
    // 7 support points, all doubled
    for form in good.levels.get(7).map_or(&[][..], |v| v) {
        let support = form.representative.support();
        let doubled: Vec<(u64, u32)> = support.iter().map(|&(i, _)| (i, 2)).collect();
        candidates.push(
            GroupMultiset::from_index_counts(form.representative.spec(), &doubled)
                .expect("valid support"),
        );
    }
    // 8 support points, six doubled and two single
    for form in good.levels.get(8).map_or(&[][..], |v| v) {
        let support = form.representative.support();
        for a in 0..support.len() {
            for b in a + 1..support.len() {
                let counts: Vec<(u64, u32)> = support
                    .iter()
                    .enumerate()
                    .map(|(s, &(i, _))| (i, if s == a || s == b { 1 } else { 2 }))
                    .collect();
                candidates.push(
                    GroupMultiset::from_index_counts(form.representative.spec(), &counts)
                        .expect("valid support"),
                );
            }
        }
    }
    let mut survivors = Vec::new();
    for a in candidates {
        debug_assert!(!engine::has_zerosum_leq(&a, 3)?);
        if engine::max_zerosum_length(&a)?.is_none_or(|l| l < long_bound) {
            survivors.push(a);
        }
    }
    let buckets = orbit_dedupe(survivors)?;
    Ok(buckets.into_iter().map(|b| b.form).collect())
}

/// The unique 14-point orbit representative.
pub fn fourteen_point_multiset(budget: &SearchBudget) -> Result<GroupMultiset, SearchError> {
    let forms = classify_14_point(12, budget)?;
    forms
        .first()
        .map(|f| f.representative.clone())
        .ok_or_else(|| SearchError::Internal("14-point classification came back empty".into()))
}

/// The 7-point bases of the size-(3k+5) family: distinct sets without a
/// zero-sum of length <= 3 whose doubling has no zero-sum of length >= 12.
pub fn valid_bases(budget: &SearchBudget) -> Result<Vec<CanonicalForm>, SearchError> {
    let good = good_distinct_levels(budget)?;
    let mut out = Vec::new();
    for form in good.levels.get(7).map_or(&[][..], |v| v) {
        let support = form.representative.support();
        let doubled: Vec<(u64, u32)> = support.iter().map(|&(i, _)| (i, 2)).collect();
        let c = GroupMultiset::from_index_counts(form.representative.spec(), &doubled)
            .expect("valid support");
        if engine::max_zerosum_length(&c)?.is_none_or(|l| l < 12) {
            out.push(form.clone());
        }
    }
    Ok(out)
}

/// A base set of 7 distinct points together with per-point exponents:
/// the assembled multiset takes point `b_i` with multiplicity
/// `2 + 3 * kappas[i]`.
#[derive(Clone, Debug)]
pub struct FamilyRecipe {
    base: GroupMultiset,
    kappas: [u64; 7],
}

impl FamilyRecipe {
    pub fn new(base: GroupMultiset, kappas: [u64; 7]) -> Result<Self, SearchError> {
        if base.support_size() != 7 || base.len() != 7 {
            return Err(SearchError::Internal(format!(
                "recipe base must be 7 distinct points, got {base:?}"
            )));
        }
        if engine::has_zerosum_leq(&base, 3)? {
            return Err(SearchError::Internal(
                "recipe base has a zero-sum of length <= 3".into(),
            ));
        }
        Ok(FamilyRecipe { base, kappas })
    }

    pub fn base(&self) -> &GroupMultiset {
        &self.base
    }

    pub fn kappas(&self) -> &[u64; 7] {
        &self.kappas
    }

    pub fn k(&self) -> u64 {
        3 + self.kappas.iter().sum::<u64>()
    }

    pub fn assemble(&self) -> GroupMultiset {
        let mut out = GroupMultiset::empty(self.base.spec());
        for (slot, (idx, _)) in self.base.support().into_iter().enumerate() {
            out.insert_index(idx, 2 + 3 * self.kappas[slot] as u32);
        }
        out
    }
}

/// All recipes for the given k >= 3 whose assembled multisets have size
/// 3k+5 and no k disjoint zero-sums. Each assembled multiset is re-verified
/// by the packing engine before the recipe is emitted.
pub fn build_3k5_family(k: u64, budget: &SearchBudget) -> Result<Vec<FamilyRecipe>, SearchError> {
    if k < 3 {
        return Err(SearchError::Internal(format!("family needs k >= 3, got {k}")));
    }
    let spec = GroupSpec::z3_cube();
    let bases = valid_bases(budget)?;
    let mut engine = PackingEngine::new(&spec, k.min(u8::MAX as u64) as u8)?;
    let mut out = Vec::new();
    for base in &bases {
        for kappas in compositions7(k - 3) {
            let recipe = FamilyRecipe::new(base.representative.clone(), kappas)?;
            let assembled = recipe.assemble();
            debug_assert_eq!(assembled.len(), 3 * k + 5);
            if !engine.has_k_disjoint(&assembled, k as u8)? {
                out.push(recipe);
            }
        }
    }
    Ok(out)
}

/// Ordered 7-tuples of non-negative integers summing to `total`.
fn compositions7(total: u64) -> Vec<[u64; 7]> {
    let mut out = Vec::new();
    let mut cur = [0u64; 7];
    fn rec(slot: usize, left: u64, cur: &mut [u64; 7], out: &mut Vec<[u64; 7]>) {
        if slot == 6 {
            cur[6] = left;
            out.push(*cur);
            return;
        }
        for v in 0..=left {
            cur[slot] = v;
            rec(slot + 1, left - v, cur, out);
        }
    }
    rec(0, total, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct CompletenessReport {
    pub k: u64,
    pub found_orbits: usize,
    pub recipe_orbits: usize,
    pub matches: bool,
    pub node_count: u64,
}

/// Exhaustive check that every multiset of size 3k+5 without k disjoint
/// zero-sums is an assembled recipe up to linear equivalence. This is the
/// expensive direction; the search space grows quickly with k.
pub fn verify_3k5_completeness(
    k: u64,
    budget: &SearchBudget,
) -> Result<CompletenessReport, SearchError> {
    if !(3..=255).contains(&k) {
        return Err(SearchError::Internal(format!("completeness needs 3 <= k <= 255, got {k}")));
    }
    let spec = GroupSpec::z3_cube();
    let size = 3 * k + 5;
    let out = enumerate_structure_free(
        &spec,
        &Structure::KDisjoint { k: k as u8 },
        false,
        Some(size),
        budget,
    )?;
    let found = out.levels.get(size as usize).cloned().unwrap_or_default();
    let mut found_keys: Vec<Vec<u8>> = found
        .iter()
        .map(|f| f.representative.canonical_bytes())
        .collect();
    found_keys.sort();

    let recipes = build_3k5_family(k, budget)?;
    let mut recipe_keys: Vec<Vec<u8>> = recipes
        .iter()
        .map(|r| {
            canonical_form(&r.assemble()).map(|f| f.representative.canonical_bytes())
        })
        .collect::<Result<_, _>>()?;
    recipe_keys.sort();
    recipe_keys.dedup();

    Ok(CompletenessReport {
        k,
        found_orbits: found_keys.len(),
        recipe_orbits: recipe_keys.len(),
        matches: found_keys == recipe_keys,
        node_count: out.node_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions7(0).len(), 1);
        assert_eq!(compositions7(1).len(), 7);
        // C(2+6, 6) = 28
        assert_eq!(compositions7(2).len(), 28);
    }

    #[test]
    fn five_point_lemma_holds() {
        let report = check_five_point_lemma().unwrap();
        // C(27, 5)
        assert_eq!(report.sets_checked, 80730);
        assert!(report.violators.is_empty());
    }

    #[test]
    fn good_set_sizes_peak_at_eight() {
        let out = good_distinct_levels(&SearchBudget::default()).unwrap();
        assert!(out.complete);
        assert_eq!(out.max_free_size(), 8);
        // exactly one orbit of 8-point sets, none of 9
        assert_eq!(out.levels[8].len(), 1);
        assert_eq!(out.levels.get(9).map(|v| v.len()), Some(0));
    }
}
