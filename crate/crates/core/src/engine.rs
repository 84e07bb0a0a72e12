//! Zero-sum detection primitives.
//!
//! Everything here reduces to two kernels:
//!
//! - an exact-length dynamic program over the group (`dp[j][g]` = some
//!   selection of exactly `j` elements sums to `g`), used for shortest and
//!   longest zero-sums, targeted searches and bounded representability;
//! - a memoized depth-first packing search that extracts *minimal* zero-sum
//!   parts containing a pivot element. Any maximum packing refines to one
//!   with minimal parts, so the restriction loses nothing and cuts the
//!   branching by orders of magnitude.
//!
//! Absence of a zero-sum is a value, not an error; size guards are errors.

use std::collections::HashMap;

use crate::group::{GroupElement, GroupSpec};
use crate::multiset::{GroupMultiset, ZerosumCertificate};
use crate::CoreError;

/// Largest group order the dense DP kernels accept.
const DP_ORDER_LIMIT: u64 = 65536;

/// Guard for the exact packing search.
const PACKING_SIZE_LIMIT: u64 = 40;

/// Guard for full zero-sum subset enumeration.
const ALL_SUBSETS_LIMIT: u64 = 16;

/// What to look for: a sub-multiset with the given sum, length within the
/// given bounds, optionally using each element at most once.
#[derive(Clone, Debug, Default)]
pub struct ZerosumQuery {
    /// Required sum; `None` means the group identity.
    pub target: Option<GroupElement>,
    pub min_len: Option<u64>,
    pub max_len: Option<u64>,
    /// Restrict selections to multiplicity <= 1.
    pub distinct_only: bool,
}

impl ZerosumQuery {
    pub fn with_max_len(max_len: u64) -> Self {
        ZerosumQuery { max_len: Some(max_len), ..Default::default() }
    }

    fn validate(&self) -> Result<(), CoreError> {
        if let (Some(lo), Some(hi)) = (self.min_len, self.max_len) {
            if lo > hi {
                return Err(CoreError::InvalidArgument(format!(
                    "min_len {lo} > max_len {hi}"
                )));
            }
        }
        Ok(())
    }
}

/// A family of pairwise disjoint zero-sum sub-multisets.
#[derive(Clone, Debug)]
pub struct PackingResult {
    pub count: u64,
    pub parts: Vec<ZerosumCertificate>,
}

/// Exact-length reachability table: `table[j][g]` is true when some
/// sub-multiset of exactly `j` elements sums to the element with index `g`.
struct LengthTable {
    picks: usize,
    rows: Vec<Vec<bool>>,
}

fn dense_counts_checked(a: &GroupMultiset) -> Result<Vec<u32>, CoreError> {
    let order = a.spec().order();
    if order > DP_ORDER_LIMIT {
        return Err(CoreError::SizeGuard {
            what: "dense zero-sum kernel",
            limit: DP_ORDER_LIMIT,
            got: order,
        });
    }
    Ok(a.dense_counts())
}

/// Builds the exact-length table for selections out of `support[from..]`,
/// capping each multiplicity at `per_elem_cap` (u32::MAX = no cap).
fn length_table(
    spec: &GroupSpec,
    support: &[(u64, u32)],
    from: usize,
    max_picks: usize,
    per_elem_cap: u32,
) -> LengthTable {
    let order = spec.order() as usize;
    let mut rows = vec![vec![false; order]; max_picks + 1];
    rows[0][0] = true;
    for &(idx, mult) in &support[from..] {
        let cap = (mult.min(per_elem_cap)) as usize;
        // walk picks downward so each element is bounded independently
        for j in (0..max_picks).rev() {
            for g in 0..order {
                if !rows[j][g] {
                    continue;
                }
                let mut shifted = g as u64;
                for t in 1..=cap {
                    if j + t > max_picks {
                        break;
                    }
                    shifted = spec.add_indices(shifted, idx);
                    rows[j + t][shifted as usize] = true;
                }
            }
        }
    }
    LengthTable { picks: max_picks, rows }
}

impl LengthTable {
    fn reachable(&self, picks: usize, g: u64) -> bool {
        picks <= self.picks && self.rows[picks][g as usize]
    }
}

/// Shortest non-empty zero-sum sub-multiset length, if any.
pub fn min_zerosum_length(a: &GroupMultiset) -> Result<Option<u64>, CoreError> {
    let _ = dense_counts_checked(a)?;
    let support = a.support();
    let n = a.len() as usize;
    let table = length_table(a.spec(), &support, 0, n, u32::MAX);
    for j in 1..=n {
        if table.reachable(j, 0) {
            return Ok(Some(j as u64));
        }
    }
    Ok(None)
}

/// Longest zero-sum sub-multiset length, if any. Computed via complements:
/// removing a selection of `j` elements with sum equal to `sum(a)` leaves a
/// zero-sum of length `len - j`.
pub fn max_zerosum_length(a: &GroupMultiset) -> Result<Option<u64>, CoreError> {
    let _ = dense_counts_checked(a)?;
    let support = a.support();
    let n = a.len() as usize;
    let total = a.sum().index();
    let table = length_table(a.spec(), &support, 0, n, u32::MAX);
    for j in 0..n {
        if table.reachable(j, total) {
            return Ok(Some((n - j) as u64));
        }
    }
    Ok(None)
}

/// True when the multiset has a non-empty zero-sum of length at most `k`.
pub fn has_zerosum_leq(a: &GroupMultiset, k: u64) -> Result<bool, CoreError> {
    let _ = dense_counts_checked(a)?;
    let support = a.support();
    let k = (k.min(a.len())) as usize;
    let table = length_table(a.spec(), &support, 0, k, u32::MAX);
    Ok((1..=k).any(|j| table.reachable(j, 0)))
}

pub fn is_zerosum_free(a: &GroupMultiset) -> Result<bool, CoreError> {
    Ok(min_zerosum_length(a)?.is_none())
}

/// Find a sub-multiset matching the query. Among matches the shortest length
/// wins, and among equally short ones the lexicographically least sorted
/// index sequence, so output is deterministic.
pub fn find_zerosum(
    a: &GroupMultiset,
    q: &ZerosumQuery,
) -> Result<Option<ZerosumCertificate>, CoreError> {
    q.validate()?;
    let _ = dense_counts_checked(a)?;
    if let Some(t) = &q.target {
        if t.spec() != a.spec() {
            return Err(CoreError::SpecMismatch);
        }
    }
    let spec = a.spec().clone();
    let target_idx = q.target.as_ref().map_or(0, |t| t.index());
    let support = a.support();
    let cap = if q.distinct_only { 1 } else { u32::MAX };
    let lo = q.min_len.unwrap_or(1).max(1) as usize;
    let hi = q.max_len.unwrap_or(a.len()).min(a.len()) as usize;
    if lo > hi {
        return Ok(None);
    }
    let table = length_table(&spec, &support, 0, hi, cap);
    let Some(len) = (lo..=hi).find(|&j| table.reachable(j, target_idx)) else {
        return Ok(None);
    };

    // Greedy lexicographic reconstruction: commit as many copies of the
    // smallest support index as keep the suffix feasible.
    let mut suffix: Vec<LengthTable> = Vec::with_capacity(support.len() + 1);
    for s in 0..=support.len() {
        suffix.push(length_table(&spec, &support, s, len, cap));
    }
    let mut picks = vec![0u32; support.len()];
    let mut remaining = len;
    let mut need = target_idx;
    for s in 0..support.len() {
        if remaining == 0 {
            break;
        }
        let (idx, mult) = support[s];
        let max_t = (mult.min(cap) as usize).min(remaining);
        let neg = spec.neg_index(idx);
        // lex-min sorted sequence = maximize copies of the smallest index
        let mut chosen = None;
        let mut after = need;
        for t in 0..=max_t {
            if suffix[s + 1].reachable(remaining - t, after) {
                chosen = Some((t, after));
            }
            after = spec.add_indices(after, neg);
        }
        let (t, next_need) = chosen.expect("suffix feasibility must not dead-end");
        picks[s] = t as u32;
        remaining -= t;
        need = next_need;
    }
    debug_assert_eq!(remaining, 0);
    let mut sel = GroupMultiset::empty(&spec);
    for (s, &(idx, _)) in support.iter().enumerate() {
        sel.insert_index(idx, picks[s]);
    }
    Ok(Some(ZerosumCertificate::new(sel, a, q.target.as_ref())?))
}

/// All group elements expressible as a sum of at most `max_picks` elements
/// of `a` (respecting multiplicity), the identity included. Computed by
/// bounded dynamic programming, never by subset enumeration.
pub fn representable_sums(
    a: &GroupMultiset,
    max_picks: u64,
) -> Result<Vec<GroupElement>, CoreError> {
    let _ = dense_counts_checked(a)?;
    let support = a.support();
    let picks = max_picks.min(a.len()) as usize;
    let table = length_table(a.spec(), &support, 0, picks, u32::MAX);
    let mut out = Vec::new();
    for g in 0..a.spec().order() {
        if (0..=picks).any(|j| table.reachable(j, g)) {
            out.push(a.spec().element_from_index(g)?);
        }
    }
    Ok(out)
}

/// Every non-empty zero-sum sub-multiset, one entry per distinct selection.
pub fn all_zerosum_subsets(a: &GroupMultiset) -> Result<Vec<GroupMultiset>, CoreError> {
    if a.len() > ALL_SUBSETS_LIMIT {
        return Err(CoreError::SizeGuard {
            what: "all_zerosum_subsets",
            limit: ALL_SUBSETS_LIMIT,
            got: a.len(),
        });
    }
    let mut out = Vec::new();
    for sub in a.sub_multisets()? {
        if !sub.is_empty() && sub.sum().is_identity() {
            out.push(sub);
        }
    }
    Ok(out)
}

/// Reusable packing engine: computes the maximum number of pairwise disjoint
/// non-empty zero-sum sub-multisets, optionally capped (the cap turns it
/// into a cheap decision procedure). Results are memoized per engine, so a
/// long search run shares work between related multisets. A single engine
/// must be driven with one cap only.
pub struct PackingEngine {
    spec: GroupSpec,
    cap: u8,
    memo: HashMap<Vec<u8>, u8>,
    node_count: u64,
}

impl PackingEngine {
    pub fn new(spec: &GroupSpec, cap: u8) -> Result<Self, CoreError> {
        if spec.order() > DP_ORDER_LIMIT {
            return Err(CoreError::SizeGuard {
                what: "packing engine",
                limit: DP_ORDER_LIMIT,
                got: spec.order(),
            });
        }
        Ok(PackingEngine {
            spec: spec.clone(),
            cap,
            memo: HashMap::new(),
            node_count: 0,
        })
    }

    pub fn node_count(&self) -> u64 {
        self.node_count
    }

    /// Maximum packing size of `a`, capped at the engine cap.
    pub fn max_packing(&mut self, a: &GroupMultiset) -> Result<u8, CoreError> {
        if a.spec() != &self.spec {
            return Err(CoreError::SpecMismatch);
        }
        let mut counts = a.dense_counts();
        Ok(self.search(&mut counts))
    }

    /// True when `a` contains at least `k` pairwise disjoint zero-sums.
    /// Requires `k <= cap`.
    pub fn has_k_disjoint(&mut self, a: &GroupMultiset, k: u8) -> Result<bool, CoreError> {
        assert!(k <= self.cap, "decision threshold exceeds engine cap");
        // cheap yes: repeatedly peel the shortest zero-sum
        if self.greedy_packing(a, k)? >= k {
            return Ok(true);
        }
        Ok(self.max_packing(a)? >= k)
    }

    /// Lower bound on the packing number by repeatedly extracting some
    /// shortest-first zero-sum; sound but not optimal. Probes short lengths
    /// first, which keeps the tables tiny on the hot path.
    fn greedy_packing(&self, a: &GroupMultiset, stop_at: u8) -> Result<u8, CoreError> {
        let mut counts = a.dense_counts();
        let mut count = 0u8;
        while count < stop_at {
            let len: u64 = counts.iter().map(|&c| c as u64).sum();
            let picked = any_zerosum_selection(&self.spec, &counts, 4.min(len))
                .or_else(|| any_zerosum_selection(&self.spec, &counts, len));
            let Some(picks) = picked else { break };
            for (i, p) in picks.iter().enumerate() {
                counts[i] -= p;
            }
            count += 1;
        }
        Ok(count)
    }

    fn search(&mut self, counts: &mut Vec<u32>) -> u8 {
        if self.cap == 0 {
            return 0;
        }
        let Some(pivot) = counts.iter().position(|&c| c > 0) else {
            return 0;
        };
        let key = memo_key(counts);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        self.node_count += 1;

        // Branch 1: no part uses the pivot element at all.
        let saved = counts[pivot];
        counts[pivot] = 0;
        let mut best = self.search(counts);
        counts[pivot] = saved;

        // Branch 2: some part is a minimal zero-sum containing the pivot.
        if best < self.cap {
            let mut parts = minimal_zerosums_with_pivot(&self.spec, counts, pivot);
            parts.sort_by_key(|p| p.iter().sum::<u32>());
            for part in parts {
                subtract(counts, &part);
                let v = 1 + self.search(counts).min(self.cap - 1);
                add_back(counts, &part);
                if v > best {
                    best = v;
                    if best == self.cap {
                        break;
                    }
                }
            }
        }
        self.memo.insert(key, best);
        best
    }

    /// Reconstruct a maximum packing by peeling parts that preserve the
    /// memoized optimum.
    fn extract(&mut self, counts: &mut Vec<u32>) -> Vec<Vec<u32>> {
        let mut parts = Vec::new();
        loop {
            let m = self.search(counts);
            if m == 0 {
                return parts;
            }
            let pivot = counts.iter().position(|&c| c > 0).unwrap();
            let saved = counts[pivot];
            counts[pivot] = 0;
            let without = self.search(counts);
            if without == m {
                continue; // pivot dropped for good
            }
            counts[pivot] = saved;
            let candidates = minimal_zerosums_with_pivot(&self.spec, counts, pivot);
            let mut advanced = false;
            for part in candidates {
                subtract(counts, &part);
                let v = 1 + self.search(counts).min(self.cap - 1);
                if v == m {
                    parts.push(part);
                    advanced = true;
                    break;
                }
                add_back(counts, &part);
            }
            assert!(advanced, "packing extraction failed to make progress");
        }
    }
}

/// Some non-empty selection of at most `max_len` elements summing to the
/// identity, found by one bounded-knapsack pass with parent pointers.
/// Returns per-index pick counts. Cheaper than the lexicographic search
/// when any witness will do.
fn any_zerosum_selection(spec: &GroupSpec, counts: &[u32], max_len: u64) -> Option<Vec<u32>> {
    let order = counts.len();
    let max_len = max_len as usize;
    let support: Vec<(usize, u32)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, c))
        .collect();
    // parent[j][g] = (slot, copies); the origin carries a sentinel
    let mut parent: Vec<Vec<Option<(u32, u32)>>> = vec![vec![None; order]; max_len + 1];
    parent[0][0] = Some((u32::MAX, 0));
    for (slot, &(idx, mult)) in support.iter().enumerate() {
        let cap = mult as usize;
        for j in (0..max_len).rev() {
            for g in 0..order {
                if parent[j][g].is_none() {
                    continue;
                }
                let mut shifted = g as u64;
                for t in 1..=cap {
                    if j + t > max_len {
                        break;
                    }
                    shifted = spec.add_indices(shifted, idx as u64);
                    if parent[j + t][shifted as usize].is_none() {
                        parent[j + t][shifted as usize] = Some((slot as u32, t as u32));
                    }
                }
            }
        }
    }
    let found = (1..=max_len).find(|&j| parent[j][0].is_some())?;
    let mut picks = vec![0u32; order];
    let (mut j, mut g) = (found, 0usize);
    loop {
        let (slot, copies) = parent[j][g].expect("parent chain is complete");
        if slot == u32::MAX {
            break;
        }
        let (idx, _) = support[slot as usize];
        picks[idx] += copies;
        let mut back = g as u64;
        for _ in 0..copies {
            back = spec.add_indices(back, spec.neg_index(idx as u64));
        }
        j -= copies as usize;
        g = back as usize;
    }
    Some(picks)
}

fn memo_key(counts: &[u32]) -> Vec<u8> {
    debug_assert!(counts.iter().all(|&c| c <= u8::MAX as u32));
    counts.iter().map(|&c| c as u8).collect()
}

fn subtract(counts: &mut [u32], part: &[u32]) {
    for (c, p) in counts.iter_mut().zip(part) {
        *c -= p;
    }
}

fn add_back(counts: &mut [u32], part: &[u32]) {
    for (c, p) in counts.iter_mut().zip(part) {
        *c += p;
    }
}

/// Enumerate the minimal non-empty zero-sum sub-multisets of `counts` that
/// use the pivot element at least once. Minimal means no proper non-empty
/// zero-sum sub-multiset.
fn minimal_zerosums_with_pivot(spec: &GroupSpec, counts: &[u32], pivot: usize) -> Vec<Vec<u32>> {
    let order = spec.order() as usize;
    let support: Vec<(usize, u32)> = counts
        .iter()
        .enumerate()
        .skip(pivot)
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let mut out = Vec::new();
    let mut sel = vec![0u32; order];
    // reach = sums of non-empty sub-multisets of the current selection
    let reach = vec![false; order];
    dfs_minimal(spec, &support, 0, &mut sel, 0, &reach, true, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs_minimal(
    spec: &GroupSpec,
    support: &[(usize, u32)],
    pos: usize,
    sel: &mut Vec<u32>,
    sum: u64,
    reach: &[bool],
    empty: bool,
    out: &mut Vec<Vec<u32>>,
) {
    if !empty && sum == 0 {
        if is_minimal_zerosum(spec, sel) {
            out.push(sel.clone());
        }
        return; // any extension would contain this zero-sum properly
    }
    if reach[0] {
        return; // an internal proper zero-sum rules out minimality
    }
    if pos == support.len() {
        return;
    }
    let (idx, avail) = support[pos];
    let must_use = pos == 0; // pivot participation is mandatory

    if !must_use {
        dfs_minimal(spec, support, pos + 1, sel, sum, reach, empty, out);
    }
    let mut shifted_sum = sum;
    for t in 1..=avail {
        shifted_sum = spec.add_indices(shifted_sum, idx as u64);
        let new_reach = updated_reach(spec, reach, idx as u64, t);
        sel[idx] = t;
        dfs_minimal(spec, support, pos + 1, sel, shifted_sum, &new_reach, false, out);
        sel[idx] = 0;
    }
}

fn updated_reach(spec: &GroupSpec, reach: &[bool], idx: u64, t: u32) -> Vec<bool> {
    let mut out = reach.to_vec();
    let mut k_idx = 0u64;
    for _ in 1..=t {
        k_idx = spec.add_indices(k_idx, idx);
        out[k_idx as usize] = true;
        for (g, &r) in reach.iter().enumerate() {
            if r {
                out[spec.add_indices(g as u64, k_idx) as usize] = true;
            }
        }
    }
    out
}

fn is_minimal_zerosum(spec: &GroupSpec, sel: &[u32]) -> bool {
    let support: Vec<(u64, u32)> = sel
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i as u64, c))
        .collect();
    let len: u64 = support.iter().map(|&(_, c)| c as u64).sum();
    if len <= 1 {
        return true;
    }
    let table = length_table(spec, &support, 0, len as usize - 1, u32::MAX);
    !(1..len as usize).any(|j| table.reachable(j, 0))
}

/// Exact maximum family of pairwise disjoint zero-sum sub-multisets, with
/// witnesses.
pub fn max_disjoint_zerosums(a: &GroupMultiset) -> Result<PackingResult, CoreError> {
    if a.len() > PACKING_SIZE_LIMIT {
        return Err(CoreError::SizeGuard {
            what: "max_disjoint_zerosums",
            limit: PACKING_SIZE_LIMIT,
            got: a.len(),
        });
    }
    let mut engine = PackingEngine::new(a.spec(), u8::MAX)?;
    let mut counts = a.dense_counts();
    let count = engine.search(&mut counts) as u64;
    let mut counts = a.dense_counts();
    let raw_parts = engine.extract(&mut counts);
    assert_eq!(raw_parts.len() as u64, count);
    let mut parts = Vec::with_capacity(raw_parts.len());
    for raw in raw_parts {
        let mut sel = GroupMultiset::empty(a.spec());
        for (i, &c) in raw.iter().enumerate() {
            sel.insert_index(i as u64, c);
        }
        parts.push(ZerosumCertificate::new(sel, a, None)?);
    }
    Ok(PackingResult { count, parts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3cube_set(items: &[([u64; 3], u32)]) -> GroupMultiset {
        let spec = GroupSpec::z3_cube();
        let items: Vec<(&[u64], u32)> = items.iter().map(|(c, m)| (&c[..], *m)).collect();
        GroupMultiset::from_coords(&spec, &items).unwrap()
    }

    #[test]
    fn identity_element_is_a_singleton_zerosum() {
        let a = z3cube_set(&[([0, 0, 0], 1)]);
        let cert = find_zerosum(&a, &ZerosumQuery::default()).unwrap().unwrap();
        assert_eq!(cert.len(), 1);
        assert!(cert.verify(&a, None));
    }

    #[test]
    fn doubled_basis_is_zerosum_free() {
        let a = z3cube_set(&[([0, 0, 1], 2), ([0, 1, 0], 2), ([1, 0, 0], 2)]);
        assert!(find_zerosum(&a, &ZerosumQuery::default()).unwrap().is_none());
        assert_eq!(min_zerosum_length(&a).unwrap(), None);
        assert_eq!(max_zerosum_length(&a).unwrap(), None);
    }

    #[test]
    fn min_length_examples() {
        let a = z3cube_set(&[([1, 1, 1], 3)]);
        assert_eq!(min_zerosum_length(&a).unwrap(), Some(3));

        let b = z3cube_set(&[([1, 2, 0], 1), ([2, 1, 0], 1)]);
        assert_eq!(min_zerosum_length(&b).unwrap(), Some(2));
    }

    #[test]
    fn max_length_whole_set() {
        let a = z3cube_set(&[([1, 0, 0], 1), ([2, 0, 0], 1), ([0, 1, 0], 3)]);
        assert!(a.sum().is_identity());
        assert_eq!(max_zerosum_length(&a).unwrap(), Some(a.len()));
    }

    #[test]
    fn packing_of_two_antipodal_pairs() {
        let a = z3cube_set(&[
            ([1, 0, 0], 1),
            ([2, 0, 0], 1),
            ([0, 1, 0], 1),
            ([0, 2, 0], 1),
        ]);
        let packing = max_disjoint_zerosums(&a).unwrap();
        assert_eq!(packing.count, 2);
        assert_eq!(packing.parts.len(), 2);
        for p in &packing.parts {
            assert!(p.verify(&a, None));
        }
        // parts are disjoint: their union is still a sub-multiset
        let union = packing.parts[0]
            .sub()
            .union(packing.parts[1].sub())
            .unwrap();
        assert!(union.is_sub_multiset_of(&a));
    }

    #[test]
    fn packing_of_empty_set() {
        let spec = GroupSpec::z3_cube();
        let empty = GroupMultiset::empty(&spec);
        assert_eq!(max_disjoint_zerosums(&empty).unwrap().count, 0);
    }

    #[test]
    fn representable_sums_bounds() {
        let spec = GroupSpec::z3_cube();
        let a = z3cube_set(&[([1, 0, 0], 2)]);
        let zero_picks = representable_sums(&a, 0).unwrap();
        assert_eq!(zero_picks, vec![spec.identity()]);

        let two_picks = representable_sums(&a, 2).unwrap();
        let got: Vec<_> = two_picks.iter().map(|e| e.coords().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 0, 0], vec![1, 0, 0], vec![2, 0, 0]]);
    }

    #[test]
    fn all_zerosum_subsets_basics() {
        let a = z3cube_set(&[([1, 2, 0], 1), ([2, 1, 0], 1)]);
        assert_eq!(all_zerosum_subsets(&a).unwrap().len(), 1);

        let free = z3cube_set(&[([0, 0, 1], 2), ([0, 1, 0], 2), ([1, 0, 0], 2)]);
        assert!(all_zerosum_subsets(&free).unwrap().is_empty());
    }

    #[test]
    fn find_zerosum_deterministic_tie_break() {
        // two disjoint short zero-sums; the lexicographically least sorted
        // index sequence must win
        let a = z3cube_set(&[
            ([0, 0, 1], 1),
            ([0, 0, 2], 1),
            ([0, 1, 0], 1),
            ([0, 2, 0], 1),
        ]);
        let cert = find_zerosum(&a, &ZerosumQuery::default()).unwrap().unwrap();
        let support = cert.sub().support();
        assert_eq!(support, vec![(1, 1), (2, 1)]); // (0,0,1) and (0,0,2)
    }

    #[test]
    fn distinct_only_query() {
        // 3 copies of x form a zero-sum, but not with distinct selections
        let a = z3cube_set(&[([1, 1, 1], 3)]);
        let q = ZerosumQuery { distinct_only: true, ..Default::default() };
        assert!(find_zerosum(&a, &q).unwrap().is_none());
    }

    #[test]
    fn length_window_query() {
        let a = z3cube_set(&[([0, 0, 0], 1), ([1, 1, 1], 3)]);
        // shortest is the identity singleton; forbid it via min_len
        let q = ZerosumQuery { min_len: Some(2), ..Default::default() };
        let cert = find_zerosum(&a, &q).unwrap().unwrap();
        assert_eq!(cert.len(), 3);
        let bad = ZerosumQuery { min_len: Some(4), max_len: Some(2), ..Default::default() };
        assert!(find_zerosum(&a, &bad).is_err());
    }

    #[test]
    fn minimal_zerosum_enumeration_is_sound() {
        // pivot = (0,0,1); minimal zero-sums containing it
        let a = z3cube_set(&[
            ([0, 0, 1], 2),
            ([0, 0, 2], 1),
            ([0, 1, 0], 1),
            ([0, 2, 2], 1),
        ]);
        let counts = a.dense_counts();
        let spec = a.spec().clone();
        let pivot = counts.iter().position(|&c| c > 0).unwrap();
        let parts = minimal_zerosums_with_pivot(&spec, &counts, pivot);
        for part in &parts {
            assert!(part[pivot] > 0);
            assert!(is_minimal_zerosum(&spec, part));
            let mut sum = 0u64;
            for (i, &c) in part.iter().enumerate() {
                for _ in 0..c {
                    sum = spec.add_indices(sum, i as u64);
                }
            }
            assert_eq!(sum, 0);
        }
        // {(0,0,1),(0,0,2)} and {(0,0,1),(0,1,0),(0,2,2)} are both minimal
        assert!(parts.len() >= 2);
    }
}
