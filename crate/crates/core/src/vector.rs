//! Vectors with exact coordinates and the dominance relations between them.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Outcome of comparing `x` against `y` coordinate-wise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dominance {
    Equal,
    /// `x^j > y^j` for every `j`.
    StronglyDominates,
    /// `x ⪰ y`, `x ≠ y`, and at least one coordinate is tied.
    DominatesNotStrongly,
    IsStronglyDominated,
    IsDominatedNotStrongly,
    /// Each side is larger in some coordinate.
    Incomparable,
}

impl Dominance {
    /// The relation seen from the other argument.
    pub fn mirror(self) -> Dominance {
        use Dominance::*;
        match self {
            Equal => Equal,
            StronglyDominates => IsStronglyDominated,
            DominatesNotStrongly => IsDominatedNotStrongly,
            IsStronglyDominated => StronglyDominates,
            IsDominatedNotStrongly => DominatesNotStrongly,
            Incomparable => Incomparable,
        }
    }

    /// `x ⪰ y`
    pub fn weakly_dominates(self) -> bool {
        matches!(
            self,
            Dominance::Equal | Dominance::StronglyDominates | Dominance::DominatesNotStrongly
        )
    }

    /// `x ≻ y`
    pub fn dominates(self) -> bool {
        matches!(
            self,
            Dominance::StronglyDominates | Dominance::DominatesNotStrongly
        )
    }

    /// `x ≫ y`
    pub fn strongly_dominates(self) -> bool {
        self == Dominance::StronglyDominates
    }

    /// `y ≻ x`
    pub fn is_dominated(self) -> bool {
        self.mirror().dominates()
    }

    pub fn is_incomparable(self) -> bool {
        self == Dominance::Incomparable
    }
}

/// A point of `Q^k`, `k ≥ 1`.
///
/// The derived `Ord` is the lexicographic order; it is only used to put sets
/// into a canonical order and has nothing to do with dominance.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector(Vec<Rational>);

impl Vector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Vector(coords))
    }

    /// Convenience constructor for integer vectors; panics on empty input.
    pub fn from_ints(coords: &[i64]) -> Self {
        Vector::new(coords.iter().map(|&c| Rational::from_integer(c)).collect())
            .expect("non-empty coordinates")
    }

    /// Parses whitespace- or comma-separated decimal strings; panics on bad input.
    pub fn parse(s: &str) -> Self {
        let coords = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().expect("decimal coordinate"))
            .collect();
        Vector::new(coords).expect("non-empty coordinates")
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional vector");
        Vector(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn get(&self, j: usize) -> &Rational {
        &self.0[j]
    }

    pub fn set(&mut self, j: usize, value: Rational) {
        self.0[j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    /// `self ≫ 0`
    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(Rational::is_positive)
    }

    /// `self ⪰ 0`
    pub fn is_nonnegative(&self) -> bool {
        !self.0.iter().any(Rational::is_negative)
    }

    pub fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Full dominance relation between `self` and `other`.
    pub fn compare(&self, other: &Vector) -> Result<Dominance> {
        self.check_dim(other)?;
        Ok(self.relation(other))
    }

    /// [`compare`](Self::compare) without the dimension check.
    pub(crate) fn relation(&self, other: &Vector) -> Dominance {
        debug_assert_eq!(self.dim(), other.dim());
        let (mut greater, mut less) = (0usize, 0usize);
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Greater => greater += 1,
                Ordering::Less => less += 1,
                Ordering::Equal => {}
            }
            if greater > 0 && less > 0 {
                return Dominance::Incomparable;
            }
        }
        let k = self.dim();
        match (greater, less) {
            (0, 0) => Dominance::Equal,
            (g, 0) if g == k => Dominance::StronglyDominates,
            (_, 0) => Dominance::DominatesNotStrongly,
            (0, l) if l == k => Dominance::IsStronglyDominated,
            _ => Dominance::IsDominatedNotStrongly,
        }
    }

    /// `self ⪰ other`
    pub fn weakly_dominates(&self, other: &Vector) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// `self ≻ other`
    pub fn dominates(&self, other: &Vector) -> bool {
        self.weakly_dominates(other) && self != other
    }

    /// `self ≫ other`
    pub fn strongly_dominates(&self, other: &Vector) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a > b)
    }

    pub fn incomparable(&self, other: &Vector) -> bool {
        self.relation(other) == Dominance::Incomparable
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Coordinate-wise midpoint.
    pub fn midpoint(&self, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a + b).half())
                .collect(),
        )
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A finite multiset of vectors sharing one dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorSet {
    dim: usize,
    members: Vec<Vector>,
}

impl VectorSet {
    pub fn new(dim: usize, members: Vec<Vector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(bad) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(VectorSet { dim, members })
    }

    /// Builds a set whose dimension is taken from the first member.
    pub fn from_vectors(members: Vec<Vector>) -> Result<Self> {
        let dim = members.first().map(Vector::dim).ok_or(Error::EmptySet)?;
        VectorSet::new(dim, members)
    }

    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0);
        VectorSet {
            dim,
            members: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Vector] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Vector> {
        self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vector> {
        self.members.iter()
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.members.contains(v)
    }

    pub fn push(&mut self, v: Vector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: v.dim(),
            });
        }
        self.members.push(v);
        Ok(())
    }

    /// Members in lexicographic order, duplicates kept.
    pub fn sorted(&self) -> Vec<Vector> {
        let mut v = self.members.clone();
        v.sort();
        v
    }

    /// Multiset equality, ignoring order.
    pub fn same_members(&self, other: &VectorSet) -> bool {
        self.dim == other.dim && self.sorted() == other.sorted()
    }

    /// Index of the first member that is not strictly positive.
    pub fn first_non_positive(&self) -> Option<usize> {
        self.members.iter().position(|m| !m.is_strictly_positive())
    }

    pub(crate) fn from_parts_unchecked(dim: usize, members: Vec<Vector>) -> Self {
        debug_assert!(members.iter().all(|m| m.dim() == dim));
        VectorSet { dim, members }
    }
}

impl fmt::Debug for VectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a VectorSet {
    type Item = &'a Vector;
    type IntoIter = std::slice::Iter<'a, Vector>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[i64]) -> Vector {
        Vector::from_ints(c)
    }

    #[test]
    fn compare_examples() {
        assert_eq!(v(&[3, 1]).compare(&v(&[1, 3])), Ok(Dominance::Incomparable));
        assert_eq!(v(&[2, 2]).compare(&v(&[2, 2])), Ok(Dominance::Equal));
        assert_eq!(
            v(&[3, 2]).compare(&v(&[3, 1])),
            Ok(Dominance::DominatesNotStrongly)
        );
        assert_eq!(
            v(&[3, 2]).compare(&v(&[1, 1])),
            Ok(Dominance::StronglyDominates)
        );
        assert_eq!(
            v(&[1, 1]).compare(&v(&[3, 1])),
            Ok(Dominance::IsDominatedNotStrongly)
        );
        assert_eq!(
            v(&[7]).compare(&v(&[8])),
            Ok(Dominance::IsStronglyDominated)
        );
    }

    #[test]
    fn compare_rejects_mixed_dimensions() {
        assert_eq!(
            v(&[1, 2]).compare(&v(&[1, 2, 3])),
            Err(Error::Dimension {
                expected: 2,
                found: 3
            })
        );
        assert_eq!(Vector::new(vec![]), Err(Error::ZeroDimension));
    }

    #[test]
    fn predicates_match_relation() {
        let x = v(&[3, 2]);
        let y = v(&[3, 1]);
        assert!(x.weakly_dominates(&y) && x.dominates(&y) && !x.strongly_dominates(&y));
        assert!(x.weakly_dominates(&x) && !x.dominates(&x));
    }

    #[test]
    fn display() {
        assert_eq!(Vector::parse("1 2.5, 1/3").to_string(), "(1,2.5,1/3)");
    }

    fn small_vec(k: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(0i64..6, k).prop_map(|c| Vector::from_ints(&c))
    }

    fn pair() -> impl Strategy<Value = (Vector, Vector, Vector)> {
        (1usize..6).prop_flat_map(|k| (small_vec(k), small_vec(k), small_vec(k)))
    }

    proptest! {
        #[test]
        fn compare_is_mirrored((x, y, _) in pair()) {
            prop_assert_eq!(x.relation(&y), y.relation(&x).mirror());
        }

        #[test]
        fn compare_invariant_under_translation((x, y, c) in pair()) {
            let shift = c.add(&Vector::parse(&vec!["1/3"; c.dim()].join(" ")));
            prop_assert_eq!(x.add(&shift).relation(&y.add(&shift)), x.relation(&y));
        }

        #[test]
        fn strong_implies_dominates_implies_weak((x, y, _) in pair()) {
            let r = x.relation(&y);
            if r.strongly_dominates() { prop_assert!(r.dominates()); }
            if r.dominates() { prop_assert!(r.weakly_dominates()); }
            prop_assert_eq!(r.weakly_dominates(), x.weakly_dominates(&y));
            prop_assert_eq!(r.dominates(), x.dominates(&y));
            prop_assert_eq!(r.strongly_dominates(), x.strongly_dominates(&y));
        }
    }
}
