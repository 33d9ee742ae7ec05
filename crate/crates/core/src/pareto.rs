//! MAX, MIN and WMAX of finite vector multisets.
//!
//! [`max_set`] is the quadratic pairwise definition and serves as the oracle
//! for [`max_set_fast`], which uses a sort-and-sweep for `k = 2`, a sweep
//! over a two-dimensional staircase for `k = 3`, and a divide-and-conquer
//! on the leading coordinate with a recursive dominance filter for `k ≥ 4`.
//!
//! Duplicates of a maximal vector are all kept. Outputs preserve the input
//! order of the surviving members.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::rational::{Keyed, Rational};
use crate::vector::{Vector, VectorSet};

/// Below this many points the recursive paths fall back to pairwise checks.
const NAIVE_CUTOFF: usize = 24;

/// Members of `s` not dominated by any other member (pairwise definition).
pub fn max_set(s: &VectorSet) -> VectorSet {
    select(s, &maxima_indices_naive(s.members()))
}

/// Same set as [`max_set`], computed in `O(n log n)` for `k ≤ 3`.
pub fn max_set_fast(s: &VectorSet) -> VectorSet {
    select(s, &maxima_indices(s.members()))
}

/// Members of `s` that dominate no other member.
pub fn min_set(s: &VectorSet) -> VectorSet {
    let m = s.members();
    let keep: Vec<usize> = (0..m.len())
        .filter(|&i| !m.iter().any(|o| m[i].dominates(o)))
        .collect();
    select(s, &keep)
}

/// Members of `s` not strongly dominated by any member.
pub fn wmax_set(s: &VectorSet) -> VectorSet {
    let m = s.members();
    let keep: Vec<usize> = (0..m.len())
        .filter(|&i| !m.iter().any(|o| o.strongly_dominates(&m[i])))
        .collect();
    select(s, &keep)
}

fn select(s: &VectorSet, idx: &[usize]) -> VectorSet {
    let members = idx.iter().map(|&i| s.members()[i].clone()).collect();
    VectorSet::from_parts_unchecked(s.dim(), members)
}

/// Sorted, duplicate-free copy of `vs`.
pub fn unique_sorted(vs: &[Vector]) -> Vec<Vector> {
    let mut out = vs.to_vec();
    out.sort();
    out.dedup();
    out
}

/// Indices of the maximal points, ascending, by the pairwise definition.
pub fn maxima_indices_naive(points: &[Vector]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|o| o.dominates(&points[i])))
        .collect()
}

/// Indices of the maximal points, ascending.
pub fn maxima_indices(points: &[Vector]) -> Vec<usize> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let k = first.dim();
    debug_assert!(points.iter().all(|p| p.dim() == k));
    let idx: Vec<usize> = (0..points.len()).collect();
    let mut out = match k {
        1 => top_of_dim(points, idx, 0),
        2 => sweep_2d(points, idx, 0),
        3 => sweep_3d(points, idx),
        _ => divide_and_conquer(points, idx, 0),
    };
    out.sort_unstable();
    out
}

/// General-dimension path, exposed so tests can run it for every `k`.
pub fn maxima_indices_divide_and_conquer(points: &[Vector]) -> Vec<usize> {
    let mut out = divide_and_conquer(points, (0..points.len()).collect(), 0);
    out.sort_unstable();
    out
}

fn top_of_dim(p: &[Vector], idx: Vec<usize>, d: usize) -> Vec<usize> {
    let Some(best) = idx.iter().map(|&i| p[i].get(d)).max() else {
        return idx;
    };
    let best = best.clone();
    idx.into_iter().filter(|&i| *p[i].get(d) == best).collect()
}

/// Maxima on dimensions `d` and `d + 1`; all points must agree on the
/// dimensions before `d` and `d + 1` must be the last one.
fn sweep_2d(p: &[Vector], idx: Vec<usize>, d: usize) -> Vec<usize> {
    // plain float keys keep the sort in cache; exact values are read on ties only
    let mut keys: Vec<(f64, f64, usize)> = idx
        .into_iter()
        .map(|i| (p[i].get(d).to_f64(), p[i].get(d + 1).to_f64(), i))
        .collect();
    let exact = |f: Option<Ordering>, a: usize, b: usize, j: usize| match f {
        _ if a == b => Ordering::Equal,
        Some(Ordering::Equal) | None => p[a].get(d + j).cmp(p[b].get(d + j)),
        Some(decided) => decided,
    };
    let cmp_x =
        |a: &(f64, f64, usize), b: &(f64, f64, usize)| exact(a.0.partial_cmp(&b.0), a.2, b.2, 0);
    let cmp_y =
        |a: &(f64, f64, usize), b: &(f64, f64, usize)| exact(a.1.partial_cmp(&b.1), a.2, b.2, 1);
    keys.sort_unstable_by(|a, b| cmp_x(b, a).then_with(|| cmp_y(b, a)));
    let mut out = Vec::new();
    // largest second coordinate over strictly larger first coordinates
    let mut best: Option<&(f64, f64, usize)> = None;
    let mut g = 0;
    while g < keys.len() {
        let head = &keys[g];
        let mut h = g;
        while h < keys.len() && cmp_x(&keys[h], head).is_eq() {
            let k = &keys[h];
            if cmp_y(k, head).is_eq() && best.is_none_or(|b| cmp_y(k, b).is_gt()) {
                out.push(k.2);
            }
            h += 1;
        }
        if best.is_none_or(|b| cmp_y(head, b).is_gt()) {
            best = Some(head);
        }
        g = h;
    }
    out
}

/// Two-dimensional staircase of `(y, z)` maxima keyed by `y`; `z` decreases
/// as `y` increases.
struct Staircase<'a> {
    steps: BTreeMap<&'a Rational, &'a Rational>,
}

impl<'a> Staircase<'a> {
    fn new() -> Self {
        Staircase {
            steps: BTreeMap::new(),
        }
    }

    /// Some stored point has `y' ≥ y` and `z' ≥ z`.
    fn covers(&self, y: &Rational, z: &Rational) -> bool {
        self.steps
            .range::<&Rational, _>(y..)
            .next()
            .is_some_and(|(_, &top)| top >= z)
    }

    fn insert(&mut self, y: &'a Rational, z: &'a Rational) {
        if self.covers(y, z) {
            return;
        }
        let dominated: Vec<&Rational> = self
            .steps
            .range::<&Rational, _>(..=y)
            .rev()
            .take_while(|(_, &sz)| sz <= z)
            .map(|(&sy, _)| sy)
            .collect();
        for key in dominated {
            self.steps.remove(key);
        }
        self.steps.insert(y, z);
    }
}

fn sweep_3d(p: &[Vector], mut idx: Vec<usize>) -> Vec<usize> {
    let mut keyed: Vec<(Keyed, usize)> =
        idx.iter().map(|&i| (Keyed::new(p[i].get(0)), i)).collect();
    keyed.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    idx = keyed.into_iter().map(|(_, i)| i).collect();
    let mut stairs = Staircase::new();
    let mut out = Vec::new();
    let mut g = 0;
    while g < idx.len() {
        let x = p[idx[g]].get(0);
        let mut h = g;
        while h < idx.len() && p[idx[h]].get(0) == x {
            h += 1;
        }
        let group = &idx[g..h];
        // within a tie on x, dominance is decided by (y, z) alone
        for i in sweep_2d(p, group.to_vec(), 1) {
            if !stairs.covers(p[i].get(1), p[i].get(2)) {
                out.push(i);
            }
        }
        for &i in group {
            stairs.insert(p[i].get(1), p[i].get(2));
        }
        g = h;
    }
    out
}

/// Median of the distinct values of dimension `d`, chosen so that both
/// `≤ m` and `> m` are non-empty. `None` when all values coincide.
fn split_value(p: &[Vector], idx: impl Iterator<Item = usize>, d: usize) -> Option<&Rational> {
    let mut vals: Vec<&Rational> = idx.map(|i| p[i].get(d)).collect();
    vals.sort_unstable();
    vals.dedup();
    if vals.len() < 2 {
        None
    } else {
        Some(vals[(vals.len() - 1) / 2])
    }
}

fn partition(p: &[Vector], idx: Vec<usize>, d: usize, m: &Rational) -> (Vec<usize>, Vec<usize>) {
    idx.into_iter().partition(|&i| p[i].get(d) > m)
}

/// Maxima of `idx`; all points agree on the dimensions before `d`.
fn divide_and_conquer(p: &[Vector], idx: Vec<usize>, d: usize) -> Vec<usize> {
    if idx.len() <= 1 {
        return idx;
    }
    let k = p[idx[0]].dim();
    if d + 1 == k {
        return top_of_dim(p, idx, d);
    }
    if d + 2 == k {
        return sweep_2d(p, idx, d);
    }
    if idx.len() <= NAIVE_CUTOFF {
        return idx
            .iter()
            .copied()
            .filter(|&i| !idx.iter().any(|&o| p[o].dominates(&p[i])))
            .collect();
    }
    let Some(m) = split_value(p, idx.iter().copied(), d) else {
        return divide_and_conquer(p, idx, d + 1);
    };
    let (hi, lo) = partition(p, idx, d, m);
    let mut top = divide_and_conquer(p, hi, d);
    let bottom = divide_and_conquer(p, lo, d);
    // every point of `top` beats every point of `bottom` on dimension d
    let survivors = filter_dominated(p, bottom, &top, d + 1);
    top.extend(survivors);
    top
}

/// Removes from `cands` every point weakly dominated on dimensions `d..k`
/// by some point of `by`. Callers guarantee that each point of `by` is
/// already at least as large on the earlier dimensions and strictly larger
/// on at least one of them.
fn filter_dominated(p: &[Vector], cands: Vec<usize>, by: &[usize], d: usize) -> Vec<usize> {
    if cands.is_empty() || by.is_empty() {
        return cands;
    }
    let k = p[cands[0]].dim();
    if d == k {
        return Vec::new();
    }
    if d + 1 == k {
        let top = by.iter().map(|&b| p[b].get(d)).max().expect("non-empty");
        return cands.into_iter().filter(|&a| p[a].get(d) > top).collect();
    }
    if d + 2 == k {
        let mut sorted: Vec<usize> = by.to_vec();
        sorted.sort_unstable_by(|&a, &b| p[b].get(d).cmp(p[a].get(d)));
        let mut prefix_max: Vec<&Rational> = Vec::with_capacity(sorted.len());
        for &b in &sorted {
            let z = p[b].get(d + 1);
            let next = match prefix_max.last() {
                Some(&m) if m >= z => m,
                _ => z,
            };
            prefix_max.push(next);
        }
        return cands
            .into_iter()
            .filter(|&a| {
                let n = sorted.partition_point(|&b| p[b].get(d) >= p[a].get(d));
                n == 0 || prefix_max[n - 1] < p[a].get(d + 1)
            })
            .collect();
    }
    if cands.len() * by.len() <= NAIVE_CUTOFF * NAIVE_CUTOFF {
        return cands
            .into_iter()
            .filter(|&a| {
                !by.iter()
                    .any(|&b| (d..k).all(|j| p[b].get(j) >= p[a].get(j)))
            })
            .collect();
    }
    let Some(m) = split_value(p, cands.iter().chain(by).copied(), d) else {
        return filter_dominated(p, cands, by, d + 1);
    };
    let (cands_hi, cands_lo) = partition(p, cands, d, m);
    let (by_hi, by_lo) = partition(p, by.to_vec(), d, m);
    let mut kept = filter_dominated(p, cands_hi, &by_hi, d);
    let lo = filter_dominated(p, cands_lo, &by_lo, d);
    // by_hi already exceeds every low candidate on dimension d
    kept.extend(filter_dominated(p, lo, &by_hi, d + 1));
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(rows: &[&[i64]]) -> VectorSet {
        VectorSet::from_vectors(rows.iter().map(|r| Vector::from_ints(r)).collect()).unwrap()
    }

    fn figure5() -> VectorSet {
        set(&[
            &[1, 1],
            &[2, 1],
            &[4, 1],
            &[5, 1],
            &[6, 1],
            &[1, 2],
            &[3, 2],
            &[2, 3],
        ])
    }

    #[test]
    fn max_of_pairwise_incomparable_set_is_itself() {
        let s = set(&[&[1, 5], &[3, 4], &[4, 2], &[6, 1]]);
        assert!(max_set(&s).same_members(&s));
        assert!(max_set_fast(&s).same_members(&s));
    }

    #[test]
    fn max_of_figure5_bids() {
        let want = set(&[&[2, 3], &[3, 2], &[6, 1]]);
        assert!(max_set(&figure5()).same_members(&want));
        assert!(max_set_fast(&figure5()).same_members(&want));
    }

    #[test]
    fn max_of_singleton() {
        let s = set(&[&[7, 7, 7]]);
        assert_eq!(max_set(&s), s);
        assert_eq!(max_set_fast(&s), s);
    }

    #[test]
    fn max_keeps_duplicates() {
        let s = set(&[&[2, 2], &[2, 2], &[1, 1]]);
        assert_eq!(max_set(&s), set(&[&[2, 2], &[2, 2]]));
        assert_eq!(max_set_fast(&s), set(&[&[2, 2], &[2, 2]]));
    }

    #[test]
    fn staircase_input_is_its_own_maxima() {
        let n = 500;
        let rows: Vec<Vector> = (0..n).map(|i| Vector::from_ints(&[i, n - i])).collect();
        let s = VectorSet::from_vectors(rows).unwrap();
        assert_eq!(max_set_fast(&s).len(), n as usize);
    }

    #[test]
    fn scalar_case_keeps_every_copy_of_the_maximum() {
        let s = set(&[&[3], &[5], &[5], &[1]]);
        assert_eq!(max_set_fast(&s), set(&[&[5], &[5]]));
        assert_eq!(min_set(&s), set(&[&[1]]));
    }

    #[test]
    fn min_examples() {
        let s = set(&[&[1, 2], &[2, 1], &[2, 2]]);
        assert_eq!(min_set(&s), set(&[&[1, 2], &[2, 1]]));
        let t = set(&[
            &[3, 0, 0],
            &[2, 1, 0],
            &[2, 0, 1],
            &[1, 2, 0],
            &[1, 0, 2],
            &[0, 3, 0],
            &[0, 0, 3],
        ]);
        assert_eq!(min_set(&t), t);
        let single = set(&[&[4, 4]]);
        assert_eq!(min_set(&single), single);
    }

    #[test]
    fn wmax_examples() {
        let want = set(&[&[4, 1], &[5, 1], &[6, 1], &[3, 2], &[2, 3]]);
        assert!(wmax_set(&figure5()).same_members(&want));
        assert_eq!(wmax_set(&set(&[&[1, 1], &[2, 2]])), set(&[&[2, 2]]));
        let flat = set(&[&[1, 3], &[2, 3], &[3, 3]]);
        assert_eq!(wmax_set(&flat), flat);
    }

    fn points(max_k: usize, max_n: usize, range: i64) -> impl Strategy<Value = Vec<Vector>> {
        (1..=max_k).prop_flat_map(move |k| {
            prop::collection::vec(
                prop::collection::vec(1..=range, k).prop_map(|c| Vector::from_ints(&c)),
                0..max_n,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn fast_matches_naive(pts in points(5, 120, 8)) {
            prop_assert_eq!(maxima_indices(&pts), maxima_indices_naive(&pts));
        }

        #[test]
        fn divide_and_conquer_matches_naive(pts in points(6, 150, 5)) {
            prop_assert_eq!(maxima_indices_divide_and_conquer(&pts), maxima_indices_naive(&pts));
        }

        #[test]
        fn operator_laws(pts in points(4, 40, 6)) {
            prop_assume!(!pts.is_empty());
            let s = VectorSet::from_vectors(pts).unwrap();
            let mx = max_set(&s);
            let wm = wmax_set(&s);
            prop_assert!(mx.iter().all(|v| wm.contains(v)));
            prop_assert!(wm.iter().all(|v| s.contains(v)));
            prop_assert_eq!(max_set(&mx), mx.clone());
            let mn = min_set(&s);
            prop_assert_eq!(min_set(&mn), mn);
            for a in mx.iter() {
                for b in mx.iter() {
                    let r = a.relation(b);
                    prop_assert!(r == crate::vector::Dominance::Equal || r.is_incomparable());
                }
            }
        }
    }
}
