//! Multisets over a finite abelian group, plus zero-sum certificates.
//!
//! Multiplicities are stored densely (one slot per group element) for small
//! groups and sparsely otherwise. All search kernels index elements by their
//! mixed-radix index.

use std::collections::BTreeMap;
use std::fmt;

use crate::group::{GroupElement, GroupSpec};
use crate::CoreError;

/// Group order up to which multiplicities are kept in a dense array.
const DENSE_LIMIT: u64 = 4096;

/// Guard for the direct sub-multiset enumerator.
const SUB_ENUM_LIMIT: u64 = 24;

#[derive(Clone, PartialEq, Eq)]
enum Storage {
    Dense(Vec<u32>),
    Sparse(BTreeMap<u64, u32>),
}

/// A multiset of group elements: element index -> multiplicity.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupMultiset {
    spec: GroupSpec,
    counts: Storage,
    len: u64,
}

impl GroupMultiset {
    pub fn empty(spec: &GroupSpec) -> Self {
        let counts = if spec.order() <= DENSE_LIMIT {
            Storage::Dense(vec![0; spec.order() as usize])
        } else {
            Storage::Sparse(BTreeMap::new())
        };
        GroupMultiset { spec: spec.clone(), counts, len: 0 }
    }

    pub fn from_elements<'a, I>(spec: &GroupSpec, elems: I) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut out = Self::empty(spec);
        for e in elems {
            if e.spec() != spec {
                return Err(CoreError::SpecMismatch);
            }
            out.insert_index(e.index(), 1);
        }
        Ok(out)
    }

    /// Convenience constructor from raw coordinate tuples with multiplicities.
    pub fn from_coords(spec: &GroupSpec, items: &[(&[u64], u32)]) -> Result<Self, CoreError> {
        let mut out = Self::empty(spec);
        for (coords, mult) in items {
            let e = spec.element(coords)?;
            out.insert_index(e.index(), *mult);
        }
        Ok(out)
    }

    pub fn from_index_counts(spec: &GroupSpec, items: &[(u64, u32)]) -> Result<Self, CoreError> {
        let mut out = Self::empty(spec);
        for &(idx, mult) in items {
            if idx >= spec.order() {
                return Err(CoreError::BadElement(format!("index {idx} out of range")));
            }
            out.insert_index(idx, mult);
        }
        Ok(out)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Total size, counting multiplicities.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_index(&self, idx: u64) -> u32 {
        match &self.counts {
            Storage::Dense(v) => v[idx as usize],
            Storage::Sparse(m) => m.get(&idx).copied().unwrap_or(0),
        }
    }

    pub fn count(&self, e: &GroupElement) -> u32 {
        self.count_index(e.index())
    }

    pub fn insert_index(&mut self, idx: u64, mult: u32) {
        if mult == 0 {
            return;
        }
        match &mut self.counts {
            Storage::Dense(v) => v[idx as usize] += mult,
            Storage::Sparse(m) => *m.entry(idx).or_insert(0) += mult,
        }
        self.len += mult as u64;
    }

    pub fn insert(&mut self, e: &GroupElement, mult: u32) {
        self.insert_index(e.index(), mult);
    }

    /// Remove up to `mult` copies; errors if fewer are present.
    pub fn remove_index(&mut self, idx: u64, mult: u32) -> Result<(), CoreError> {
        if mult == 0 {
            return Ok(());
        }
        match &mut self.counts {
            Storage::Dense(v) => {
                let c = &mut v[idx as usize];
                if *c < mult {
                    return Err(CoreError::NotASubMultiset);
                }
                *c -= mult;
            }
            Storage::Sparse(m) => {
                let c = m.get_mut(&idx).ok_or(CoreError::NotASubMultiset)?;
                if *c < mult {
                    return Err(CoreError::NotASubMultiset);
                }
                *c -= mult;
                if *c == 0 {
                    m.remove(&idx);
                }
            }
        }
        self.len -= mult as u64;
        Ok(())
    }

    /// Iterate over `(element index, multiplicity)` pairs of the support,
    /// in increasing index order.
    pub fn support(&self) -> Vec<(u64, u32)> {
        match &self.counts {
            Storage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i as u64, c))
                .collect(),
            Storage::Sparse(m) => m.iter().map(|(&i, &c)| (i, c)).collect(),
        }
    }

    pub fn support_size(&self) -> usize {
        match &self.counts {
            Storage::Dense(v) => v.iter().filter(|&&c| c > 0).count(),
            Storage::Sparse(m) => m.len(),
        }
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.support()
            .into_iter()
            .map(|(i, _)| self.spec.element_from_index(i).unwrap())
            .collect()
    }

    /// Dense multiplicity vector, regardless of internal storage. Only
    /// sensible for small groups.
    pub fn dense_counts(&self) -> Vec<u32> {
        match &self.counts {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(m) => {
                let mut v = vec![0u32; self.spec.order() as usize];
                for (&i, &c) in m {
                    v[i as usize] = c;
                }
                v
            }
        }
    }

    /// Compact byte encoding of the support, usable as a memo or dedupe key.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.support_size() * 6);
        for (i, c) in self.support() {
            out.extend_from_slice(&(i as u32).to_le_bytes());
            out.extend_from_slice(&(c).to_le_bytes());
        }
        out
    }

    /// Sum of all elements, counting multiplicity. The empty sum is the
    /// identity.
    pub fn sum(&self) -> GroupElement {
        let mut idx = 0u64;
        for (i, c) in self.support() {
            let term = self
                .spec
                .element_from_index(i)
                .unwrap()
                .scalar_mul(c as u64)
                .index();
            idx = self.spec.add_indices(idx, term);
        }
        self.spec.element_from_index(idx).unwrap()
    }

    /// Pointwise `self[x] <= other[x]`.
    pub fn is_sub_multiset_of(&self, other: &GroupMultiset) -> bool {
        if self.spec != other.spec {
            return false;
        }
        self.support()
            .into_iter()
            .all(|(i, c)| other.count_index(i) >= c)
    }

    /// Multiset union (pointwise sum of multiplicities).
    pub fn union(&self, other: &GroupMultiset) -> Result<GroupMultiset, CoreError> {
        if self.spec != other.spec {
            return Err(CoreError::SpecMismatch);
        }
        let mut out = self.clone();
        for (i, c) in other.support() {
            out.insert_index(i, c);
        }
        Ok(out)
    }

    /// Multiset difference; errors unless `other` is a sub-multiset.
    pub fn difference(&self, other: &GroupMultiset) -> Result<GroupMultiset, CoreError> {
        if self.spec != other.spec {
            return Err(CoreError::SpecMismatch);
        }
        let mut out = self.clone();
        for (i, c) in other.support() {
            out.remove_index(i, c)?;
        }
        Ok(out)
    }

    /// Enumerate every sub-multiset exactly once (including the empty and
    /// the full one) by mixed-radix counting over the support.
    pub fn sub_multisets(&self) -> Result<SubMultisets<'_>, CoreError> {
        if self.len > SUB_ENUM_LIMIT {
            return Err(CoreError::SizeGuard {
                what: "sub_multisets",
                limit: SUB_ENUM_LIMIT,
                got: self.len,
            });
        }
        Ok(SubMultisets {
            parent: self,
            support: self.support(),
            picks: None,
            done: false,
        })
    }
}

impl fmt::Debug for GroupMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .support()
            .iter()
            .map(|&(i, c)| {
                let e = self.spec.element_from_index(i).unwrap();
                if c == 1 {
                    format!("{e}")
                } else {
                    format!("{e}x{c}")
                }
            })
            .collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Iterator over all sub-multisets of a parent multiset.
pub struct SubMultisets<'a> {
    parent: &'a GroupMultiset,
    support: Vec<(u64, u32)>,
    picks: Option<Vec<u32>>,
    done: bool,
}

impl Iterator for SubMultisets<'_> {
    type Item = GroupMultiset;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match &mut self.picks {
            None => {
                self.picks = Some(vec![0; self.support.len()]);
            }
            Some(picks) => {
                // mixed-radix increment with per-digit limit = multiplicity
                let mut pos = 0;
                loop {
                    if pos == picks.len() {
                        self.done = true;
                        return None;
                    }
                    if picks[pos] < self.support[pos].1 {
                        picks[pos] += 1;
                        break;
                    }
                    picks[pos] = 0;
                    pos += 1;
                }
            }
        }
        let picks = self.picks.as_ref().unwrap();
        let mut out = GroupMultiset::empty(&self.parent.spec);
        for (slot, &(idx, _)) in self.support.iter().enumerate() {
            out.insert_index(idx, picks[slot]);
        }
        Some(out)
    }
}

/// A non-empty sub-multiset whose element sum is the identity: the checkable
/// witness behind every existence claim in the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZerosumCertificate {
    sub: GroupMultiset,
}

impl ZerosumCertificate {
    /// Validate and build a certificate for `sum(sub) = target` within
    /// `parent`. `target = None` means the identity.
    pub fn new(
        sub: GroupMultiset,
        parent: &GroupMultiset,
        target: Option<&GroupElement>,
    ) -> Result<Self, CoreError> {
        if sub.is_empty() {
            return Err(CoreError::BadCertificate("empty selection".into()));
        }
        if !sub.is_sub_multiset_of(parent) {
            return Err(CoreError::NotASubMultiset);
        }
        let want_identity = target.is_none();
        let s = sub.sum();
        let ok = match target {
            None => s.is_identity(),
            Some(t) => &s == t,
        };
        if !ok {
            return Err(CoreError::BadCertificate(format!(
                "selection sums to {s}, wanted {}",
                if want_identity { "identity".to_string() } else { format!("{}", target.unwrap()) }
            )));
        }
        Ok(ZerosumCertificate { sub })
    }

    pub fn sub(&self) -> &GroupMultiset {
        &self.sub
    }

    pub fn len(&self) -> u64 {
        self.sub.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Re-check every invariant against a parent multiset.
    pub fn verify(&self, parent: &GroupMultiset, target: Option<&GroupElement>) -> bool {
        ZerosumCertificate::new(self.sub.clone(), parent, target).is_ok()
    }
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
    fn empty_sum_is_identity() {
        let spec = GroupSpec::z3_cube();
        assert!(GroupMultiset::empty(&spec).sum().is_identity());
    }

    #[test]
    fn sum_counts_multiplicity() {
        let a = z3cube_set(&[([0, 0, 1], 2), ([0, 1, 0], 2), ([1, 0, 0], 2)]);
        assert_eq!(a.sum().coords(), &[2, 2, 2]);
        assert_eq!(a.len(), 6);
        assert_eq!(a.support_size(), 3);
    }

    #[test]
    fn sub_multiset_enumeration_counts() {
        let spec = GroupSpec::z3_cube();
        let x = spec.element(&[1, 0, 0]).unwrap();
        let y = spec.element(&[0, 1, 0]).unwrap();

        let mut a = GroupMultiset::empty(&spec);
        a.insert(&x, 2);
        assert_eq!(a.sub_multisets().unwrap().count(), 3);

        let mut b = GroupMultiset::empty(&spec);
        b.insert(&x, 1);
        b.insert(&y, 1);
        assert_eq!(b.sub_multisets().unwrap().count(), 4);

        // 3 doubled + 4 single elements: prod (m_i + 1) = 3^3 * 2^4 = 432
        let c = z3cube_set(&[
            ([0, 0, 1], 2),
            ([0, 1, 0], 2),
            ([1, 0, 0], 2),
            ([1, 1, 0], 1),
            ([1, 0, 1], 1),
            ([0, 1, 1], 1),
            ([1, 1, 1], 1),
        ]);
        assert_eq!(c.len(), 10);
        assert_eq!(c.sub_multisets().unwrap().count(), 432);
    }

    #[test]
    fn sub_multisets_guard() {
        let spec = GroupSpec::z3_cube();
        let mut a = GroupMultiset::empty(&spec);
        a.insert_index(1, 25);
        assert!(matches!(
            a.sub_multisets(),
            Err(CoreError::SizeGuard { .. })
        ));
    }

    #[test]
    fn sparse_storage_for_large_groups() {
        let spec = GroupSpec::new(vec![3, 3, 3 * 2048]).unwrap();
        let mut a = GroupMultiset::empty(&spec);
        let e = spec.element(&[1, 2, 6000]).unwrap();
        a.insert(&e, 3);
        assert_eq!(a.count(&e), 3);
        assert_eq!(a.len(), 3);
        assert_eq!(a.sum(), e.scalar_mul(3));
        a.remove_index(e.index(), 1).unwrap();
        assert_eq!(a.count(&e), 2);
        assert!(a.remove_index(e.index(), 5).is_err());
    }

    #[test]
    fn certificate_checks() {
        let spec = GroupSpec::z3_cube();
        let parent = z3cube_set(&[([1, 1, 1], 3), ([0, 0, 1], 1)]);
        let good = z3cube_set(&[([1, 1, 1], 3)]);
        assert!(ZerosumCertificate::new(good.clone(), &parent, None).is_ok());

        // wrong sum
        let bad = z3cube_set(&[([1, 1, 1], 2)]);
        assert!(ZerosumCertificate::new(bad, &parent, None).is_err());

        // not a sub-multiset
        let too_many = z3cube_set(&[([1, 1, 1], 3), ([1, 1, 1], 1)]);
        assert!(ZerosumCertificate::new(too_many, &parent, None).is_err());

        // empty
        assert!(ZerosumCertificate::new(GroupMultiset::empty(&spec), &parent, None).is_err());

        // explicit target
        let t = spec.element(&[0, 0, 1]).unwrap();
        let sel = z3cube_set(&[([0, 0, 1], 1)]);
        assert!(ZerosumCertificate::new(sel, &parent, Some(&t)).is_ok());
    }

    #[test]
    fn union_difference_round_trip() {
        let a = z3cube_set(&[([1, 0, 0], 2), ([0, 1, 0], 1)]);
        let b = z3cube_set(&[([1, 0, 0], 1), ([2, 2, 2], 4)]);
        let u = a.union(&b).unwrap();
        assert_eq!(u.len(), 8);
        assert_eq!(u.difference(&b).unwrap(), a);
        assert!(a.difference(&b).is_err());
    }
}
