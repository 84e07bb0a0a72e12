//! Finite abelian groups in invariant-factor form.
//!
//! A group is described by its invariant factors `d_1 | d_2 | ... | d_r`;
//! elements are coordinate vectors with `coords[i]` reduced mod `d_i`.
//! Elements are also addressable by a single mixed-radix index in
//! `[0, order)`, which is what the dense multiset storage and the search
//! kernels work with.

use std::fmt;
use std::sync::Arc;

use crate::CoreError;

/// Largest group order we accept. Indices must fit comfortably in `u32`
/// based arrays downstream.
pub const MAX_ORDER: u64 = 1 << 32;

#[derive(Debug)]
struct SpecInner {
    factors: Vec<u64>,
    order: u64,
    /// weights[i] = product of factors after position i, so that
    /// index = sum coords[i] * weights[i].
    weights: Vec<u64>,
}

/// Invariant-factor description of a finite abelian group.
///
/// Cheap to clone; all copies share the underlying data.
#[derive(Clone)]
pub struct GroupSpec(Arc<SpecInner>);

impl GroupSpec {
    /// Build a spec from invariant factors `d_1 | d_2 | ... | d_r`.
    pub fn new(factors: Vec<u64>) -> Result<Self, CoreError> {
        if factors.is_empty() {
            return Err(CoreError::InvalidSpec("no invariant factors".into()));
        }
        let mut order: u64 = 1;
        for (i, &d) in factors.iter().enumerate() {
            if d < 1 {
                return Err(CoreError::InvalidSpec(format!("factor {d} < 1")));
            }
            if i + 1 < factors.len() && factors[i + 1] % d != 0 {
                return Err(CoreError::InvalidSpec(format!(
                    "factor {} does not divide {}",
                    d,
                    factors[i + 1]
                )));
            }
            order = order
                .checked_mul(d)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| CoreError::InvalidSpec("order exceeds 2^32".into()))?;
        }
        let mut weights = vec![1u64; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            weights[i] = weights[i + 1] * factors[i + 1];
        }
        Ok(GroupSpec(Arc::new(SpecInner { factors, order, weights })))
    }

    /// The group `Z_p^r` written in invariant-factor form.
    pub fn elementary(p: u64, r: usize) -> Result<Self, CoreError> {
        Self::new(vec![p; r])
    }

    /// `Z_3 + Z_3 + Z_3`, the group most of the search modules live in.
    pub fn z3_cube() -> Self {
        Self::elementary(3, 3).expect("3^3 is a valid spec")
    }

    pub fn factors(&self) -> &[u64] {
        &self.0.factors
    }

    pub fn rank(&self) -> usize {
        self.0.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// The exponent of the group, i.e. the largest invariant factor.
    pub fn exponent(&self) -> u64 {
        *self.0.factors.last().unwrap()
    }

    /// The classical lower bound `M(G) = sum (d_i - 1) + 1` for the
    /// Davenport constant.
    pub fn m_constant(&self) -> u64 {
        self.0.factors.iter().map(|d| d - 1).sum::<u64>() + 1
    }

    /// Some(p, r) if the group is `Z_p^r` for a prime p.
    pub fn elementary_abelian(&self) -> Option<(u64, usize)> {
        let p = self.0.factors[0];
        if !is_prime(p) || self.0.factors.iter().any(|&d| d != p) {
            return None;
        }
        Some((p, self.rank()))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            spec: self.clone(),
            coords: vec![0; self.rank()],
        }
    }

    /// Build an element, reducing each coordinate mod its factor.
    pub fn element(&self, coords: &[u64]) -> Result<GroupElement, CoreError> {
        if coords.len() != self.rank() {
            return Err(CoreError::BadElement(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        let coords = coords
            .iter()
            .zip(self.factors())
            .map(|(&c, &d)| c % d)
            .collect();
        Ok(GroupElement { spec: self.clone(), coords })
    }

    /// Element with the given mixed-radix index.
    pub fn element_from_index(&self, index: u64) -> Result<GroupElement, CoreError> {
        if index >= self.order() {
            return Err(CoreError::BadElement(format!(
                "index {index} out of range for group of order {}",
                self.order()
            )));
        }
        let mut coords = vec![0u64; self.rank()];
        let mut rem = index;
        for i in (0..self.rank()).rev() {
            coords[i] = rem % self.0.factors[i];
            rem /= self.0.factors[i];
        }
        Ok(GroupElement { spec: self.clone(), coords })
    }

    /// Mixed-radix index of an element given by raw coordinates.
    pub fn index_of_coords(&self, coords: &[u64]) -> u64 {
        coords
            .iter()
            .zip(&self.0.weights)
            .map(|(&c, &w)| c * w)
            .sum()
    }

    /// Index arithmetic: sum of the elements with indices `a` and `b`.
    pub fn add_indices(&self, a: u64, b: u64) -> u64 {
        let mut out = 0;
        for (&d, &w) in self.0.factors.iter().zip(&self.0.weights) {
            let ca = (a / w) % d;
            let cb = (b / w) % d;
            out += ((ca + cb) % d) * w;
        }
        out
    }

    /// Index arithmetic: negation of the element with index `a`.
    pub fn neg_index(&self, a: u64) -> u64 {
        let mut out = 0;
        for (&d, &w) in self.0.factors.iter().zip(&self.0.weights) {
            let ca = (a / w) % d;
            out += ((d - ca) % d) * w;
        }
        out
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_from_index(i).unwrap())
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.factors == other.0.factors
    }
}

impl Eq for GroupSpec {}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({:?})", self.0.factors)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.factors.iter().map(|d| d.to_string()).collect();
        write!(f, "Z[{}]", parts.join(","))
    }
}

/// An element of a finite abelian group, with canonical residues
/// `0 <= coords[i] < d_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    spec: GroupSpec,
    coords: Vec<u64>,
}

impl std::hash::Hash for GroupSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.factors.hash(state);
    }
}

impl GroupElement {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn index(&self) -> u64 {
        self.spec.index_of_coords(&self.coords)
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Componentwise modular addition.
    pub fn add(&self, other: &GroupElement) -> Result<GroupElement, CoreError> {
        if self.spec != other.spec {
            return Err(CoreError::SpecMismatch);
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(self.spec.factors())
            .map(|((&a, &b), &d)| (a + b) % d)
            .collect();
        Ok(GroupElement { spec: self.spec.clone(), coords })
    }

    pub fn neg(&self) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .zip(self.spec.factors())
            .map(|(&a, &d)| (d - a) % d)
            .collect();
        GroupElement { spec: self.spec.clone(), coords }
    }

    /// `k`-fold sum of the element.
    pub fn scalar_mul(&self, k: u64) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .zip(self.spec.factors())
            .map(|(&a, &d)| (a % d * (k % d)) % d)
            .collect();
        GroupElement { spec: self.spec.clone(), coords }
    }

    /// Order of the element in the group.
    pub fn element_order(&self) -> u64 {
        self.coords
            .iter()
            .zip(self.spec.factors())
            .map(|(&a, &d)| if a == 0 { 1 } else { d / gcd(a, d) })
            .fold(1, lcm)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(GroupSpec::new(vec![]).is_err());
        assert!(GroupSpec::new(vec![0]).is_err());
        assert!(GroupSpec::new(vec![2, 3]).is_err()); // 2 does not divide 3
        assert!(GroupSpec::new(vec![3, 3, 15]).is_ok());
        assert!(GroupSpec::new(vec![1 << 20, 1 << 20]).is_err()); // order 2^40
    }

    #[test]
    fn basic_arithmetic_z3_cube() {
        let g = GroupSpec::z3_cube();
        let a = g.element(&[1, 2, 1]).unwrap();
        let b = g.element(&[2, 1, 2]).unwrap();
        assert!(a.add(&b).unwrap().is_identity());
        let id = g.identity();
        let c = g.element(&[1, 1, 2]).unwrap();
        assert_eq!(id.add(&c).unwrap(), c);
    }

    #[test]
    fn arithmetic_mixed_factors() {
        let g = GroupSpec::new(vec![3, 3, 15]).unwrap();
        let a = g.element(&[2, 2, 14]).unwrap();
        let b = g.element(&[1, 1, 1]).unwrap();
        assert!(a.add(&b).unwrap().is_identity());
    }

    #[test]
    fn index_round_trip() {
        let g = GroupSpec::new(vec![2, 4, 8]).unwrap();
        for i in 0..g.order() {
            let e = g.element_from_index(i).unwrap();
            assert_eq!(e.index(), i);
        }
        // index = ((c0*d1)+c1)*d2+c2 pattern
        let e = g.element(&[1, 3, 5]).unwrap();
        assert_eq!(e.index(), (1 * 4 + 3) * 8 + 5);
    }

    #[test]
    fn index_ops_match_element_ops() {
        let g = GroupSpec::new(vec![3, 3, 15]).unwrap();
        for a in [0u64, 7, 44, 134] {
            for b in [1u64, 12, 99] {
                let ea = g.element_from_index(a).unwrap();
                let eb = g.element_from_index(b).unwrap();
                assert_eq!(g.add_indices(a, b), ea.add(&eb).unwrap().index());
            }
            assert_eq!(
                g.neg_index(a),
                g.element_from_index(a).unwrap().neg().index()
            );
        }
    }

    #[test]
    fn spec_mismatch_rejected() {
        let g = GroupSpec::z3_cube();
        let h = GroupSpec::new(vec![3, 3]).unwrap();
        let a = g.identity();
        let b = h.identity();
        assert!(matches!(a.add(&b), Err(CoreError::SpecMismatch)));
    }

    #[test]
    fn element_order_and_exponent() {
        let g = GroupSpec::new(vec![3, 3, 15]).unwrap();
        assert_eq!(g.exponent(), 15);
        assert_eq!(g.m_constant(), 3 + 3 + 15 - 3 + 1);
        assert_eq!(g.element(&[0, 0, 5]).unwrap().element_order(), 3);
        assert_eq!(g.element(&[1, 0, 0]).unwrap().element_order(), 3);
        assert_eq!(g.element(&[0, 1, 1]).unwrap().element_order(), 15);
    }

    #[test]
    fn elementary_detection() {
        assert_eq!(GroupSpec::z3_cube().elementary_abelian(), Some((3, 3)));
        assert_eq!(
            GroupSpec::new(vec![2, 2]).unwrap().elementary_abelian(),
            Some((2, 2))
        );
        assert_eq!(GroupSpec::new(vec![9]).unwrap().elementary_abelian(), None);
        assert_eq!(
            GroupSpec::new(vec![3, 15]).unwrap().elementary_abelian(),
            None
        );
    }
}
