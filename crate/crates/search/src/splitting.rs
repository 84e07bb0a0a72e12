//! Constructive zero-sum extraction for `Z_3 + Z_3 + Z_3d`, gcd(d, 3) = 1.
//!
//! Through the isomorphism `Z_3 + Z_3 + Z_3d = Z_3^3 + Z_d`, a sequence
//! splits into a projection onto the cube plus a residue label per
//! occurrence. Disjoint zero-sum parts of the projection carry label sums
//! in `Z_d`; once some sub-family of label sums vanishes mod d, the union
//! of those parts is a zero-sum of the original group. The extractor
//! greedily peels parts of length <= 3 (guaranteed to exist above 16
//! remaining points), watches the reachable label sums, and falls back to
//! full zero-sum enumeration on the small remainder when the greedy phase
//! stalls. A complete dynamic program over the whole group stands behind
//! both phases, so "no certificate" genuinely means the input contradicts
//! the theorem.

use std::collections::HashMap;

use zslab_core::engine::{self, ZerosumQuery};
use zslab_core::multiset::{GroupMultiset, ZerosumCertificate};
use zslab_core::GroupSpec;

use crate::SearchError;

/// A sequence over `Z_3 + Z_3 + Z_3d` split through the isomorphism with
/// `Z_3^3 + Z_d`: the cube projection plus a label mod d per occurrence.
#[derive(Clone, Debug)]
pub struct SplitSequence {
    d: u64,
    source_spec: GroupSpec,
    cube: GroupSpec,
    /// (cube element index, label) per occurrence, sorted.
    occurrences: Vec<(u64, u64)>,
}

impl SplitSequence {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn occurrences(&self) -> &[(u64, u64)] {
        &self.occurrences
    }

    /// The projected multiset over the cube.
    pub fn projected(&self) -> GroupMultiset {
        let mut out = GroupMultiset::empty(&self.cube);
        for &(idx, _) in &self.occurrences {
            out.insert_index(idx, 1);
        }
        out
    }
}

/// Check the group shape and extract d.
fn split_parameters(spec: &GroupSpec) -> Result<u64, SearchError> {
    let f = spec.factors();
    if f.len() != 3 || f[0] != 3 || f[1] != 3 || f[2] % 3 != 0 {
        return Err(SearchError::Internal(format!(
            "splitting needs invariant factors 3,3,3d; got {spec}"
        )));
    }
    let d = f[2] / 3;
    if d % 3 == 0 {
        return Err(SearchError::Internal(format!(
            "splitting needs gcd(d, 3) = 1; got d = {d}"
        )));
    }
    Ok(d)
}

/// Split a sequence through the isomorphism. Round-trips exactly with
/// [`unsplit`].
pub fn split(seq: &GroupMultiset) -> Result<SplitSequence, SearchError> {
    let d = split_parameters(seq.spec())?;
    let cube = GroupSpec::z3_cube();
    let mut occurrences = Vec::with_capacity(seq.len() as usize);
    for (idx, mult) in seq.support() {
        let e = seq.spec().element_from_index(idx)?;
        let c = e.coords();
        let proj = cube.index_of_coords(&[c[0], c[1], c[2] % 3]);
        let label = c[2] % d;
        for _ in 0..mult {
            occurrences.push((proj, label));
        }
    }
    occurrences.sort_unstable();
    Ok(SplitSequence {
        d,
        source_spec: seq.spec().clone(),
        cube,
        occurrences,
    })
}

/// Reassemble the original sequence from projection plus labels.
pub fn unsplit(ss: &SplitSequence) -> Result<GroupMultiset, SearchError> {
    let mut out = GroupMultiset::empty(&ss.source_spec);
    for &(proj, label) in &ss.occurrences {
        let e = ss.cube.element_from_index(proj)?;
        let c = e.coords();
        let z = crt_lift(c[2], label, ss.d);
        let idx = ss.source_spec.index_of_coords(&[c[0], c[1], z]);
        out.insert_index(idx, 1);
    }
    Ok(out)
}

/// The unique z mod 3d with z = e (mod 3) and z = label (mod d).
fn crt_lift(e: u64, label: u64, d: u64) -> u64 {
    // d mod 3 is 1 or 2, self-inverse either way
    let d_inv = d % 3;
    let t = ((3 + e % 3) - label % 3) % 3 * d_inv % 3;
    label + d * t
}

/// Counters describing which phases the extraction went through.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExtractionStats {
    /// Parts of length <= 3 peeled from the projection.
    pub short_parts: u64,
    /// Parts found by full enumeration on the stalled remainder.
    pub enumerated_parts: u64,
    pub used_enumeration: bool,
    /// The complete whole-group dynamic program had to decide the instance.
    pub used_dp_backstop: bool,
}

/// Reachable label sums with reconstruction pointers.
struct LabelDp {
    d: u64,
    /// parent[r] = (part index, previous residue) once residue r is the
    /// label sum of some non-empty sub-family of collected parts.
    parent: Vec<Option<(usize, Option<u64>)>>,
}

impl LabelDp {
    fn new(d: u64) -> Self {
        LabelDp { d, parent: vec![None; d as usize] }
    }

    fn add_part(&mut self, part_idx: usize, sigma: u64) {
        let s = sigma % self.d;
        let old: Vec<u64> = (0..self.d).filter(|&r| self.parent[r as usize].is_some()).collect();
        if self.parent[s as usize].is_none() {
            self.parent[s as usize] = Some((part_idx, None));
        }
        for r in old {
            let nr = ((r + s) % self.d) as usize;
            if self.parent[nr].is_none() {
                self.parent[nr] = Some((part_idx, Some(r)));
            }
        }
    }

    fn zero_reachable(&self) -> bool {
        self.parent[0].is_some()
    }

    /// Part indices of a sub-family with label sum 0 mod d.
    fn extract_zero_family(&self) -> Vec<usize> {
        let mut parts = Vec::new();
        let mut at = 0u64;
        loop {
            let (pi, prev) = self.parent[at as usize].expect("walk stays on reached residues");
            parts.push(pi);
            match prev {
                None => break,
                Some(r) => at = r,
            }
        }
        parts
    }
}

/// Find a non-empty zero-sum sub-multiset of a sequence of at least 3d+4
/// elements over `Z_3 + Z_3 + Z_3d`. Failure to find one is a theorem
/// violation and comes back as a hard error carrying the input.
pub fn find_zerosum_3d(
    seq: &GroupMultiset,
) -> Result<(ZerosumCertificate, ExtractionStats), SearchError> {
    let d = split_parameters(seq.spec())?;
    if seq.len() < 3 * d + 4 {
        return Err(SearchError::Internal(format!(
            "sequence of length {} is below the guaranteed threshold {}",
            seq.len(),
            3 * d + 4
        )));
    }
    let mut stats = ExtractionStats::default();
    let ss = split(seq)?;
    let cube = ss.cube.clone();

    // remaining occurrences; parts collect disjoint projection zero-sums
    let mut remaining: Vec<(u64, u64)> = ss.occurrences.clone();
    let mut parts: Vec<Vec<(u64, u64)>> = Vec::new();
    let mut dp = LabelDp::new(d);

    loop {
        if dp.zero_reachable() {
            let family = dp.extract_zero_family();
            let cert = certificate_from_parts(seq, &ss, &family, &parts)?;
            return Ok((cert, stats));
        }
        // greedy phase: peel a zero-sum of length <= 3 from the projection,
        // distinct elements preferred
        let proj = projected_multiset(&cube, &remaining);
        let short = {
            let distinct = ZerosumQuery {
                max_len: Some(3),
                distinct_only: true,
                ..Default::default()
            };
            match engine::find_zerosum(&proj, &distinct)? {
                Some(c) => Some(c),
                None => engine::find_zerosum(&proj, &ZerosumQuery::with_max_len(3))?,
            }
        };
        if let Some(cert) = short {
            let occ = take_occurrences(&mut remaining, cert.sub());
            let sigma = occ.iter().map(|&(_, l)| l).sum::<u64>() % d;
            parts.push(occ);
            dp.add_part(parts.len() - 1, sigma);
            stats.short_parts += 1;
            continue;
        }

        // stalled: the remainder has no short zero-sum, which caps it at 16
        // points; enumerate its zero-sum subsets outright
        stats.used_enumeration = true;
        if remaining.len() <= 20 {
            let subsets = zero_sum_subsets_of(&cube, &remaining);
            if let Some(best) = pick_part(&subsets, &remaining, &dp, d) {
                let occ: Vec<(u64, u64)> = best.iter().map(|&i| remaining[i]).collect();
                let mut keep = vec![true; remaining.len()];
                for &i in &best {
                    keep[i] = false;
                }
                remaining = remaining
                    .iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(&o, _)| o)
                    .collect();
                let sigma = occ.iter().map(|&(_, l)| l).sum::<u64>() % d;
                parts.push(occ);
                dp.add_part(parts.len() - 1, sigma);
                stats.enumerated_parts += 1;
                continue;
            }
        }
        break;
    }

    // complete decision: reachability over the whole group
    stats.used_dp_backstop = true;
    if let Some(cert) = whole_group_dp(seq)? {
        return Ok((cert, stats));
    }
    Err(SearchError::TheoremViolation {
        len: seq.len(),
        dump: format!("{seq:?}"),
    })
}

fn projected_multiset(cube: &GroupSpec, occurrences: &[(u64, u64)]) -> GroupMultiset {
    let mut out = GroupMultiset::empty(cube);
    for &(idx, _) in occurrences {
        out.insert_index(idx, 1);
    }
    out
}

/// Remove, per selected cube element, the first matching occurrences.
fn take_occurrences(remaining: &mut Vec<(u64, u64)>, selection: &GroupMultiset) -> Vec<(u64, u64)> {
    let mut taken = Vec::new();
    for (idx, mult) in selection.support() {
        let mut left = mult;
        remaining.retain(|&(o_idx, o_label)| {
            if left > 0 && o_idx == idx {
                taken.push((o_idx, o_label));
                left -= 1;
                false
            } else {
                true
            }
        });
        assert_eq!(left, 0, "selection exceeded remaining occurrences");
    }
    taken
}

/// All non-empty occurrence subsets with projection sum zero. Only called
/// on stalled remainders, which short-zero-sum absence keeps small.
fn zero_sum_subsets_of(cube: &GroupSpec, occurrences: &[(u64, u64)]) -> Vec<Vec<usize>> {
    let n = occurrences.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let mut sum = 0u64;
        for (i, &(idx, _)) in occurrences.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = cube.add_indices(sum, idx);
            }
        }
        if sum == 0 {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Choose the next stalled-phase part: one whose label sum immediately
/// completes a vanishing family if possible, otherwise the smallest subset.
fn pick_part(
    subsets: &[Vec<usize>],
    remaining: &[(u64, u64)],
    dp: &LabelDp,
    d: u64,
) -> Option<Vec<usize>> {
    if subsets.is_empty() {
        return None;
    }
    let completes = |s: &Vec<usize>| {
        let sigma = s.iter().map(|&i| remaining[i].1).sum::<u64>() % d;
        sigma == 0 || dp.parent[((d - sigma) % d) as usize].is_some()
    };
    let mut ordered: Vec<&Vec<usize>> = subsets.iter().collect();
    ordered.sort_by_key(|s| (s.len(), s.to_vec()));
    ordered
        .iter()
        .find(|s| completes(s))
        .or(ordered.first())
        .map(|s| (*s).clone())
}

fn certificate_from_parts(
    seq: &GroupMultiset,
    ss: &SplitSequence,
    family: &[usize],
    parts: &[Vec<(u64, u64)>],
) -> Result<ZerosumCertificate, SearchError> {
    let mut sub = GroupMultiset::empty(seq.spec());
    for &pi in family {
        for &(proj, label) in &parts[pi] {
            let e = ss.cube.element_from_index(proj)?;
            let c = e.coords();
            let z = crt_lift(c[2], label, ss.d);
            sub.insert_index(seq.spec().index_of_coords(&[c[0], c[1], z]), 1);
        }
    }
    Ok(ZerosumCertificate::new(sub, seq, None)?)
}

/// Complete reachability: some non-empty sub-multiset sums to zero iff the
/// identity is reachable processing occurrences one at a time.
fn whole_group_dp(seq: &GroupMultiset) -> Result<Option<ZerosumCertificate>, SearchError> {
    let spec = seq.spec().clone();
    let order = spec.order();
    if order > (1 << 26) {
        return Err(SearchError::Budget(format!(
            "whole-group reachability needs order <= 2^26, got {order}"
        )));
    }
    let mut occurrences: Vec<u64> = Vec::with_capacity(seq.len() as usize);
    for (idx, mult) in seq.support() {
        for _ in 0..mult {
            occurrences.push(idx);
        }
    }
    // parent[g] = (occurrence position, previous sum) when g is reachable
    let mut parent: HashMap<u64, (usize, Option<u64>)> = HashMap::new();
    for (pos, &x) in occurrences.iter().enumerate() {
        if parent.contains_key(&0) {
            break;
        }
        let snapshot: Vec<u64> = parent.keys().copied().collect();
        parent.entry(x).or_insert((pos, None));
        for g in snapshot {
            let ng = spec.add_indices(g, x);
            parent.entry(ng).or_insert((pos, Some(g)));
        }
    }
    if !parent.contains_key(&0) {
        return Ok(None);
    }
    let mut sub = GroupMultiset::empty(&spec);
    let mut at = 0u64;
    loop {
        let (pos, prev) = parent[&at];
        sub.insert_index(occurrences[pos], 1);
        match prev {
            None => break,
            Some(g) => at = g,
        }
    }
    Ok(Some(ZerosumCertificate::new(sub, seq, None)?))
}

/// The standard extremal sequence of length 3d+3: two copies of each
/// `Z_3` generator and 3d-1 copies of the last generator. Verified
/// zero-sum free by the exact kernel (feasible up to d of roughly 100).
pub fn zerosum_free_witness_3d(d: u64) -> Result<GroupMultiset, SearchError> {
    if d % 3 == 0 {
        return Err(SearchError::Internal(format!(
            "witness needs gcd(d, 3) = 1; got d = {d}"
        )));
    }
    let spec = GroupSpec::new(vec![3, 3, 3 * d])?;
    let witness = GroupMultiset::from_coords(
        &spec,
        &[
            (&[1, 0, 0], 2),
            (&[0, 1, 0], 2),
            (&[0, 0, 1], (3 * d - 1) as u32),
        ],
    )?;
    debug_assert_eq!(witness.len(), 3 * d + 3);
    let verifiable = spec.order() <= 65536 && (3 * d + 3) * spec.order() * (3 * d) <= 1_000_000_000;
    if verifiable && !engine::is_zerosum_free(&witness)? {
        return Err(SearchError::Internal(
            "extremal witness unexpectedly contains a zero-sum".into(),
        ));
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_example_d5() {
        let spec = GroupSpec::new(vec![3, 3, 15]).unwrap();
        let mut seq = GroupMultiset::empty(&spec);
        seq.insert(&spec.element(&[1, 2, 7]).unwrap(), 1);
        let ss = split(&seq).unwrap();
        assert_eq!(ss.d(), 5);
        // 7 mod 3 = 1, 7 mod 5 = 2
        let cube = GroupSpec::z3_cube();
        let proj = cube.index_of_coords(&[1, 2, 1]);
        assert_eq!(ss.occurrences(), &[(proj, 2)]);
        assert_eq!(unsplit(&ss).unwrap(), seq);
    }

    #[test]
    fn split_rejects_bad_groups() {
        let spec = GroupSpec::new(vec![3, 3, 27]).unwrap(); // d = 9 shares the factor 3
        let seq = GroupMultiset::empty(&spec);
        assert!(split(&seq).is_err());
        let spec2 = GroupSpec::new(vec![3, 9]).unwrap();
        assert!(split(&GroupMultiset::empty(&spec2)).is_err());
    }

    #[test]
    fn crt_round_trip() {
        for d in [1u64, 2, 5, 7, 11] {
            for z in 0..3 * d {
                assert_eq!(crt_lift(z % 3, z % d, d), z);
            }
        }
    }

    #[test]
    fn zero_element_gives_singleton() {
        let spec = GroupSpec::new(vec![3, 3, 15]).unwrap();
        let mut seq = GroupMultiset::empty(&spec);
        seq.insert_index(0, 1);
        for i in 1..19 {
            seq.insert_index(i, 1);
        }
        let (cert, _) = find_zerosum_3d(&seq).unwrap();
        assert!(cert.verify(&seq, None));
    }

    #[test]
    fn witness_is_zero_sum_free_and_tight() {
        for d in [1u64, 2, 5, 7, 11] {
            let w = zerosum_free_witness_3d(d).unwrap();
            assert_eq!(w.len(), 3 * d + 3);
            assert!(engine::is_zerosum_free(&w).unwrap());
        }
    }

    #[test]
    fn witness_extensions_yield_certificates_d5() {
        let w = zerosum_free_witness_3d(5).unwrap();
        let spec = w.spec().clone();
        for idx in 0..spec.order() {
            let mut seq = w.clone();
            seq.insert_index(idx, 1);
            let (cert, _) = find_zerosum_3d(&seq).unwrap();
            assert!(cert.verify(&seq, None), "extension by index {idx}");
        }
    }

    #[test]
    fn d1_cube_sequences_resolve() {
        // d = 1: plain Z_3^3 with 7 elements always has a zero-sum
        let spec = GroupSpec::new(vec![3, 3, 3]).unwrap();
        let mut seq = GroupMultiset::empty(&spec);
        for (i, idx) in [1u64, 4, 9, 14, 22, 25, 7].iter().enumerate() {
            seq.insert_index(*idx, 1 + (i as u32 % 2));
        }
        while seq.len() < 7 {
            seq.insert_index(2, 1);
        }
        let (cert, _) = find_zerosum_3d(&seq).unwrap();
        assert!(cert.verify(&seq, None));
    }
}
