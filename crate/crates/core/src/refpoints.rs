//! Reference points (local upper bounds) of a vector set.
//!
//! For a finite `S ⊂ Q^k` with strictly positive members, `T(S)` is the
//! smallest set of points such that a new strictly positive vector `v` outside
//! `MAX(S)` becomes maximal in `S ∪ {v}` exactly when it strongly dominates
//! some `t ∈ T(S)`.
//!
//! Three independent constructions are provided:
//!
//! * [`reference_points`]: the minimal elements of the grid points
//!   `Ω_S = D_S^1 × … × D_S^k` that no member of `S` strongly dominates,
//!   where `D_S^j` is `{0}` plus the `j`-th coordinates of `S`;
//! * [`reference_points_2d`]: the staircase between consecutive maxima when
//!   `k = 2`;
//! * [`reference_points_vmax_oracle`]: the minimal coordinate-wise maxima of
//!   all one-coordinate projections of `MAX(S)`, one coordinate chosen per
//!   maximal vector (exponential, test use only).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::pareto::{max_set_fast, min_set, unique_sorted};
use crate::rational::Rational;
use crate::vector::{Vector, VectorSet};

/// Grid nodes [`reference_points`] may visit before giving up.
pub const DEFAULT_GRID_BUDGET: u128 = 10_000_000;

/// Tuples [`reference_points_vmax_oracle`] may enumerate before giving up.
pub const DEFAULT_VMAX_BUDGET: u128 = 1_000_000;

/// The per-dimension value lists `D_S^j`, each sorted ascending, starting
/// with zero and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridDomain {
    values: Vec<Vec<Rational>>,
}

impl GridDomain {
    pub fn from_set(s: &VectorSet) -> Self {
        let values = (0..s.dim())
            .map(|j| {
                let mut col: Vec<Rational> = std::iter::once(Rational::zero())
                    .chain(s.iter().map(|v| v.get(j).clone()))
                    .collect();
                col.sort();
                col.dedup();
                col
            })
            .collect();
        GridDomain { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self, j: usize) -> &[Rational] {
        &self.values[j]
    }

    /// Number of grid points, saturating.
    pub fn size(&self) -> u128 {
        self.values
            .iter()
            .fold(1u128, |acc, col| acc.saturating_mul(col.len() as u128))
    }

    /// Largest grid value of dimension `j` strictly below `a`.
    pub fn dec(&self, j: usize, a: &Rational) -> Result<Rational> {
        if j >= self.dim() {
            return Err(Error::DimensionIndex {
                index: j,
                dim: self.dim(),
            });
        }
        if !a.is_positive() {
            return Err(Error::Domain(a.to_string()));
        }
        let col = &self.values[j];
        let below = col.partition_point(|x| x < a);
        Ok(col[below - 1].clone())
    }
}

/// `dec_{S,j}(a) = max{x ∈ D_S^j : x < a}`; `j` is zero-based.
pub fn dec(s: &VectorSet, j: usize, a: &Rational) -> Result<Rational> {
    GridDomain::from_set(s).dec(j, a)
}

/// `T(S)` in lexicographic order, together with the distinct members of
/// `MAX(S)` it was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferencePointSet {
    dim: usize,
    points: Vec<Vector>,
    source_max: Vec<Vector>,
}

impl ReferencePointSet {
    fn new(dim: usize, mut points: Vec<Vector>, source_max: Vec<Vector>) -> Self {
        points.sort();
        points.dedup();
        ReferencePointSet {
            dim,
            points,
            source_max,
        }
    }

    /// `T(∅) = {0}`: the grid of the empty set is the origin alone and
    /// nothing strongly dominates it. Only the weakly Pareto mechanism needs
    /// this; the public constructors reject empty input.
    pub(crate) fn of_empty_set(dim: usize) -> Self {
        ReferencePointSet::new(dim, vec![Vector::zero(dim)], Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, t: &Vector) -> bool {
        self.points.binary_search(t).is_ok()
    }

    /// The distinct members of `MAX(S)`, sorted.
    pub fn source_max(&self) -> &[Vector] {
        &self.source_max
    }

    pub fn to_set(&self) -> VectorSet {
        VectorSet::from_parts_unchecked(self.dim, self.points.clone())
    }

    /// Reference points weakly dominated by `bid`, in canonical order.
    pub fn payable_by(&self, bid: &Vector) -> Vec<Vector> {
        self.points
            .iter()
            .filter(|t| bid.weakly_dominates(t))
            .cloned()
            .collect()
    }
}

fn validate(s: &VectorSet) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(index) = s.first_non_positive() {
        return Err(Error::NotStrictlyPositive { index });
    }
    Ok(())
}

fn distinct_maxima(s: &VectorSet) -> Vec<Vector> {
    unique_sorted(max_set_fast(s).members())
}

/// `T(S)` by the grid characterization with the default budget.
pub fn reference_points(s: &VectorSet) -> Result<ReferencePointSet> {
    reference_points_with_budget(s, DEFAULT_GRID_BUDGET)
}

/// Dispatches to the staircase for `k = 2` and to the grid otherwise.
pub fn reference_points_fast(s: &VectorSet) -> Result<ReferencePointSet> {
    if s.dim() == 2 {
        reference_points_2d(s)
    } else {
        reference_points(s)
    }
}

/// `T(S) = MIN{t ∈ Ω_S : no s ∈ S strongly dominates t}`.
///
/// The strong-dominance filter runs against the distinct maxima of `S`
/// only, which accepts exactly the same grid points. The grid is walked one
/// dimension at a time while tracking which maxima still strongly dominate
/// the prefix, so that branches which can only produce non-minimal points
/// are cut.
pub fn reference_points_with_budget(s: &VectorSet, budget: u128) -> Result<ReferencePointSet> {
    validate(s)?;
    let domain = GridDomain::from_set(s);
    let basis = distinct_maxima(s);
    let mut walk = GridWalk {
        domain: &domain,
        basis: &basis,
        budget,
        visited: 0,
        prefix: Vec::with_capacity(s.dim()),
        found: Vec::new(),
    };
    walk.descend(0, (0..basis.len()).collect())?;
    let points = walk.found;
    Ok(ReferencePointSet::new(s.dim(), points, basis))
}

struct GridWalk<'a> {
    domain: &'a GridDomain,
    basis: &'a [Vector],
    budget: u128,
    visited: u128,
    /// index into `domain.values(j)` for each fixed dimension
    prefix: Vec<usize>,
    found: Vec<Vector>,
}

impl GridWalk<'_> {
    fn point(&self, idx: &[usize]) -> Vector {
        let coords = idx
            .iter()
            .enumerate()
            .map(|(j, &i)| self.domain.values(j)[i].clone())
            .collect();
        Vector::new(coords).expect("k >= 1")
    }

    /// No basis member strongly dominates the grid point `idx`.
    fn accepted(&self, idx: &[usize]) -> bool {
        !self.basis.iter().any(|s| {
            idx.iter()
                .enumerate()
                .all(|(j, &i)| s.get(j) > &self.domain.values(j)[i])
        })
    }

    /// The accepted grid points form an up-set of the grid, so an accepted
    /// point is minimal iff lowering any single positive coordinate to the
    /// previous grid value leaves the accepted region.
    fn is_minimal(&self, idx: &[usize]) -> bool {
        let mut probe = idx.to_vec();
        for j in 0..idx.len() {
            if idx[j] == 0 {
                continue;
            }
            probe[j] -= 1;
            let still_accepted = self.accepted(&probe);
            probe[j] += 1;
            if still_accepted {
                return false;
            }
        }
        true
    }

    fn descend(&mut self, d: usize, active: Vec<usize>) -> Result<()> {
        let k = self.domain.dim();
        let column_len = self.domain.values(d).len();
        for i in 0..column_len {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::Budget {
                    needed: self.domain.size(),
                    budget: self.budget,
                });
            }
            let x = &self.domain.values(d)[i];
            let still: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&s| self.basis[s].get(d) > x)
                .collect();
            let cleared = still.is_empty();
            self.prefix.push(i);
            if d + 1 == k {
                if cleared && self.is_minimal(&self.prefix) {
                    let t = self.point(&self.prefix);
                    self.found.push(t);
                }
            } else {
                self.descend(d + 1, still)?;
            }
            self.prefix.pop();
            // once nothing strongly dominates the prefix, raising this
            // coordinate further only yields non-minimal points
            if cleared {
                break;
            }
        }
        Ok(())
    }
}

/// Which members the strong-dominance filter is evaluated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterBasis {
    AllMembers,
    MaximaOnly,
}

/// Every grid point of `Ω_S` that no member of the chosen basis strongly
/// dominates, unpruned, in lexicographic order.
pub fn accepted_grid_points(
    s: &VectorSet,
    basis: FilterBasis,
    budget: u128,
) -> Result<Vec<Vector>> {
    validate(s)?;
    let domain = GridDomain::from_set(s);
    if domain.size() > budget {
        return Err(Error::Budget {
            needed: domain.size(),
            budget,
        });
    }
    let filter: Vec<Vector> = match basis {
        FilterBasis::AllMembers => s.members().to_vec(),
        FilterBasis::MaximaOnly => distinct_maxima(s),
    };
    let k = s.dim();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let t = Vector::new((0..k).map(|j| domain.values(j)[idx[j]].clone()).collect())?;
        if !filter.iter().any(|f| f.strongly_dominates(&t)) {
            out.push(t);
        }
        // odometer, last dimension fastest
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < domain.values(j).len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Staircase construction for `k = 2`: with the maxima sorted by increasing
/// first coordinate, `T = {(0, s_1^2), (s_1^1, s_2^2), …, (s_r^1, 0)}`.
pub fn reference_points_2d(s: &VectorSet) -> Result<ReferencePointSet> {
    if s.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: s.dim(),
        });
    }
    validate(s)?;
    // distinct maxima of a planar set, sorted lexicographically, have
    // strictly increasing x and strictly decreasing y
    let maxima = distinct_maxima(s);
    let zero = Rational::zero();
    let mut points = Vec::with_capacity(maxima.len() + 1);
    points.push(Vector::new(vec![zero.clone(), maxima[0].get(1).clone()])?);
    for pair in maxima.windows(2) {
        points.push(Vector::new(vec![
            pair[0].get(0).clone(),
            pair[1].get(1).clone(),
        ])?);
    }
    let last = maxima.last().expect("non-empty");
    points.push(Vector::new(vec![last.get(0).clone(), zero])?);
    Ok(ReferencePointSet::new(2, points, maxima))
}

/// `T(S)` as the minimal elements of `VMAX{s(j_s) : s ∈ MAX(S)}` over all
/// choices `(j_s)`, where `s(j)` keeps coordinate `j` of `s` and zeroes the
/// rest. Enumerates `k^|MAX(S)|` tuples.
pub fn reference_points_vmax_oracle(s: &VectorSet) -> Result<ReferencePointSet> {
    reference_points_vmax_oracle_with_budget(s, DEFAULT_VMAX_BUDGET)
}

pub fn reference_points_vmax_oracle_with_budget(
    s: &VectorSet,
    budget: u128,
) -> Result<ReferencePointSet> {
    validate(s)?;
    let k = s.dim();
    let maxima = distinct_maxima(s);
    let tuples = (k as u128)
        .checked_pow(maxima.len() as u32)
        .unwrap_or(u128::MAX);
    if tuples > budget {
        return Err(Error::Budget {
            needed: tuples,
            budget,
        });
    }
    let mut choice = vec![0usize; maxima.len()];
    let mut candidates: BTreeSet<Vector> = BTreeSet::new();
    loop {
        let mut top = Vector::zero(k);
        for (m, &j) in maxima.iter().zip(&choice) {
            if m.get(j) > top.get(j) {
                top.set(j, m.get(j).clone());
            }
        }
        candidates.insert(top);
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                let all = VectorSet::from_parts_unchecked(k, candidates.into_iter().collect());
                let points = min_set(&all).into_members();
                return Ok(ReferencePointSet::new(k, points, maxima));
            }
            choice[pos] += 1;
            if choice[pos] < k {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Whether adding `v` to the set `T` was computed from would make `v`
/// maximal: true iff `v` strongly dominates some reference point. Meant for
/// strictly positive `v` outside `MAX(S)`.
pub fn is_maximal_if_added(v: &Vector, t: &ReferencePointSet) -> Result<bool> {
    if v.dim() != t.dim() {
        return Err(Error::Dimension {
            expected: t.dim(),
            found: v.dim(),
        });
    }
    Ok(t.points().iter().any(|p| v.strongly_dominates(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::max_set;
    use proptest::prelude::*;

    fn set(rows: &[&[i64]]) -> VectorSet {
        VectorSet::from_vectors(rows.iter().map(|r| Vector::from_ints(r)).collect()).unwrap()
    }

    fn sorted(rows: &[&[i64]]) -> Vec<Vector> {
        let mut v: Vec<Vector> = rows.iter().map(|r| Vector::from_ints(r)).collect();
        v.sort();
        v
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    const K3: &[&[i64]] = &[&[2, 2, 2], &[1, 3, 3], &[3, 1, 1]];
    const K3_T: &[&[i64]] = &[
        &[3, 0, 0],
        &[2, 1, 0],
        &[2, 0, 1],
        &[1, 2, 0],
        &[1, 0, 2],
        &[0, 3, 0],
        &[0, 0, 3],
    ];
    const FIG1: &[&[i64]] = &[&[1, 5], &[3, 4], &[4, 2], &[6, 1]];
    const FIG1_T: &[&[i64]] = &[&[0, 5], &[1, 4], &[3, 2], &[4, 1], &[6, 0]];
    const FIG3: &[&[i64]] = &[&[1, 7], &[3, 5], &[5, 3], &[7, 1]];
    const FIG3_T: &[&[i64]] = &[&[0, 7], &[1, 5], &[3, 3], &[5, 1], &[7, 0]];

    #[test]
    fn three_dimensional_example() {
        let s = set(K3);
        assert_eq!(reference_points(&s).unwrap().points(), sorted(K3_T));
        assert_eq!(
            reference_points_vmax_oracle(&s).unwrap().points(),
            sorted(K3_T)
        );
    }

    #[test]
    fn planar_examples_all_methods() {
        for (s, t) in [
            (FIG1, FIG1_T),
            (FIG3, FIG3_T),
            (
                &[&[1, 2][..], &[2, 1]][..],
                &[&[0, 2][..], &[1, 1], &[2, 0]][..],
            ),
        ] {
            let s = set(s);
            let want = sorted(t);
            assert_eq!(reference_points(&s).unwrap().points(), want);
            assert_eq!(reference_points_2d(&s).unwrap().points(), want);
            assert_eq!(reference_points_vmax_oracle(&s).unwrap().points(), want);
        }
    }

    #[test]
    fn singletons() {
        let s = set(&[&[4, 9]]);
        assert_eq!(
            reference_points(&s).unwrap().points(),
            sorted(&[&[0, 9], &[4, 0]])
        );
        assert_eq!(
            reference_points_2d(&s).unwrap().points(),
            sorted(&[&[0, 9], &[4, 0]])
        );
        let s3 = set(&[&[2, 5, 7]]);
        let want = sorted(&[&[2, 0, 0], &[0, 5, 0], &[0, 0, 7]]);
        assert_eq!(reference_points_vmax_oracle(&s3).unwrap().points(), want);
        assert_eq!(reference_points(&s3).unwrap().points(), want);
    }

    #[test]
    fn scalar_reference_point_is_the_maximum() {
        let s = set(&[&[3], &[8], &[5]]);
        assert_eq!(reference_points(&s).unwrap().points(), sorted(&[&[8]]));
    }

    #[test]
    fn dominated_members_do_not_change_the_result() {
        let with = set(&[
            &[1, 5],
            &[3, 4],
            &[4, 2],
            &[6, 1],
            &[2, 2],
            &[1, 1],
            &[3, 4],
        ]);
        assert_eq!(reference_points(&with).unwrap().points(), sorted(FIG1_T));
        assert_eq!(reference_points_2d(&with).unwrap().points(), sorted(FIG1_T));
    }

    #[test]
    fn error_paths() {
        assert_eq!(
            reference_points(&VectorSet::empty(2)).unwrap_err(),
            Error::EmptySet
        );
        assert_eq!(
            reference_points(&set(&[&[1, 2], &[0, 3]])).unwrap_err(),
            Error::NotStrictlyPositive { index: 1 }
        );
        assert_eq!(
            reference_points_2d(&set(K3)).unwrap_err(),
            Error::Dimension {
                expected: 2,
                found: 3
            }
        );
        let wide: Vec<Vector> = (1..=12)
            .map(|i| Vector::from_ints(&[i, 13 - i, i % 5 + 1]))
            .collect();
        let wide = VectorSet::from_vectors(wide).unwrap();
        assert!(matches!(
            reference_points_vmax_oracle_with_budget(&wide, 1000),
            Err(Error::Budget { .. })
        ));
        assert!(matches!(
            reference_points_with_budget(&wide, 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn dec_examples() {
        let s = set(&[&[1, 5], &[3, 4]]);
        assert_eq!(dec(&s, 0, &q("3")).unwrap(), q("1"));
        assert_eq!(dec(&s, 0, &q("0.5")).unwrap(), q("0"));
        assert_eq!(dec(&set(FIG1), 1, &q("4.5")).unwrap(), q("4"));
        assert_eq!(dec(&s, 0, &q("0")), Err(Error::Domain("0".into())));
        assert_eq!(dec(&s, 0, &q("-1")), Err(Error::Domain("-1".into())));
        assert_eq!(
            dec(&s, 2, &q("1")),
            Err(Error::DimensionIndex { index: 2, dim: 2 })
        );
    }

    #[test]
    fn grid_domain_is_sorted_with_zero() {
        let d = GridDomain::from_set(&set(FIG1));
        assert_eq!(d.values(1), &[q("0"), q("1"), q("2"), q("4"), q("5")]);
        assert_eq!(d.size(), 25);
    }

    #[test]
    fn membership_examples() {
        let s = set(FIG3);
        let t = reference_points(&s).unwrap();
        assert!(is_maximal_if_added(&Vector::from_ints(&[6, 6]), &t).unwrap());
        assert!(!is_maximal_if_added(&Vector::from_ints(&[1, 1]), &t).unwrap());
        assert!(is_maximal_if_added(&Vector::from_ints(&[1, 1, 1]), &t).is_err());
    }

    fn positive_set(max_k: usize, max_n: usize, range: i64) -> impl Strategy<Value = VectorSet> {
        (1..=max_k).prop_flat_map(move |k| {
            prop::collection::vec(
                prop::collection::vec(1..=range, k).prop_map(|c| Vector::from_ints(&c)),
                1..max_n,
            )
            .prop_map(|m| VectorSet::from_vectors(m).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn grid_matches_unpruned_definition(s in positive_set(4, 7, 6)) {
            let all = accepted_grid_points(&s, FilterBasis::AllMembers, 1 << 20).unwrap();
            let via_max = accepted_grid_points(&s, FilterBasis::MaximaOnly, 1 << 20).unwrap();
            prop_assert_eq!(&all, &via_max);
            let set = VectorSet::from_parts_unchecked(s.dim(), all);
            let mut want = min_set(&set).into_members();
            want.sort();
            let got = reference_points(&s).unwrap();
            prop_assert_eq!(got.points(), &want[..]);
        }

        #[test]
        fn structural_properties(s in positive_set(4, 8, 7)) {
            let t = reference_points(&s).unwrap();
            let maxima = max_set(&s);
            for p in t.points() {
                // coordinates come from S or are zero
                for j in 0..s.dim() {
                    let c = p.get(j);
                    prop_assert!(c.is_zero() || s.iter().any(|m| m.get(j) == c));
                }
                prop_assert!(!s.iter().any(|m| m.strongly_dominates(p)));
                for o in t.points() {
                    prop_assert!(p == o || p.incomparable(o));
                }
            }
            for m in maxima.iter() {
                prop_assert!(t.points().iter().any(|p| m.weakly_dominates(p)));
            }
        }

        #[test]
        fn oracles_agree(s in positive_set(4, 7, 9)) {
            let grid = reference_points(&s).unwrap();
            if s.dim() == 2 {
                prop_assert_eq!(&reference_points_2d(&s).unwrap(), &grid);
            }
            if let Ok(v) = reference_points_vmax_oracle_with_budget(&s, 200_000) {
                prop_assert_eq!(v.points(), grid.points());
            }
        }

        #[test]
        fn membership_matches_recomputation(s in positive_set(3, 8, 6), raw in prop::collection::vec(1i64..=7, 3)) {
            let v = Vector::from_ints(&raw[..s.dim()]);
            let maxima = max_set(&s);
            prop_assume!(!maxima.contains(&v));
            let t = reference_points(&s).unwrap();
            let mut with = s.clone();
            with.push(v.clone()).unwrap();
            prop_assert_eq!(is_maximal_if_added(&v, &t).unwrap(), max_set(&with).contains(&v));
        }
    }
}
