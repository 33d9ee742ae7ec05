//! Incentive experiments: brute-force deviation search, replays of the
//! impossibility constructions for Pareto mechanisms, the δ-separation
//! constructions, and adversarial valuations against alternative payment
//! rules.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mechanism::{
    run_for_agent, AgentId, Instance, MechanismKind, PaymentPolicy, ReferenceCache,
};
use crate::rational::Rational;
use crate::refpoints::reference_points_fast;
use crate::vector::{Dominance, Vector, VectorSet};

/// Default cap on deviations tried per agent.
pub const DEFAULT_DEVIATION_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UtilityComparison {
    /// `u ⪰ u′`
    TruthWeaklyBetter,
    /// `u ~ u′`
    MutuallyIncomparable,
    /// `u′ ≻ u`: lying pays off.
    DeviationBetter,
}

impl UtilityComparison {
    pub fn classify(truthful: &Vector, deviation: &Vector) -> Result<Self> {
        Ok(match truthful.compare(deviation)? {
            Dominance::Incomparable => UtilityComparison::MutuallyIncomparable,
            d if d.weakly_dominates() => UtilityComparison::TruthWeaklyBetter,
            _ => UtilityComparison::DeviationBetter,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    pub agent: AgentId,
    /// Also the truthful bid.
    pub valuation: Vector,
    pub truthful_utility: Vector,
    pub deviation_bid: Vector,
    pub deviation_utility: Vector,
    pub verdict: UtilityComparison,
}

impl DeviationReport {
    fn new(
        agent: AgentId,
        valuation: Vector,
        truthful_utility: Vector,
        deviation_bid: Vector,
        deviation_utility: Vector,
    ) -> Result<Self> {
        let verdict = UtilityComparison::classify(&truthful_utility, &deviation_utility)?;
        Ok(DeviationReport {
            agent,
            valuation,
            truthful_utility,
            deviation_bid,
            deviation_utility,
            verdict,
        })
    }

    pub fn is_violation(&self) -> bool {
        self.verdict == UtilityComparison::DeviationBetter
    }
}

/// Bids an agent may try instead of its valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deviations {
    /// [`deviation_grid`] of the valuations, at most `budget` points.
    Grid { budget: usize },
    /// The same list for every agent.
    Explicit(Vec<Vector>),
}

impl Default for Deviations {
    fn default() -> Self {
        Deviations::Grid {
            budget: DEFAULT_DEVIATION_BUDGET,
        }
    }
}

/// Candidate values per dimension: every observed value, the midpoints of
/// adjacent values (zero included as the lowest), and the maximum plus one.
pub fn deviation_axes(vectors: &[Vector], dim: usize) -> Vec<Vec<Rational>> {
    (0..dim)
        .map(|j| {
            let mut observed: Vec<Rational> = vectors.iter().map(|v| v.get(j).clone()).collect();
            observed.sort();
            observed.dedup();
            let mut axis = Vec::with_capacity(2 * observed.len() + 1);
            let mut prev = Rational::zero();
            for x in &observed {
                axis.push((&prev + x).half());
                axis.push(x.clone());
                prev = x.clone();
            }
            axis.push(&prev + &Rational::one());
            axis.retain(Rational::is_positive);
            axis.dedup();
            axis
        })
        .collect()
}

fn largest_root(budget: usize, k: usize) -> usize {
    let mut m = 1usize;
    while (m + 1).checked_pow(k as u32).is_some_and(|p| p <= budget) {
        m += 1;
    }
    m
}

fn thin(axis: &[Rational], m: usize) -> Vec<Rational> {
    if axis.len() <= m {
        return axis.to_vec();
    }
    if m == 1 {
        return vec![axis[axis.len() - 1].clone()];
    }
    let last = axis.len() - 1;
    let mut picked: Vec<usize> = (0..m).map(|i| (i * last + (m - 1) / 2) / (m - 1)).collect();
    picked.dedup();
    picked.into_iter().map(|i| axis[i].clone()).collect()
}

/// Cartesian product of [`deviation_axes`], thinned evenly per dimension
/// so that at most `budget` points remain.
pub fn deviation_grid(vectors: &[Vector], dim: usize, budget: usize) -> Vec<Vector> {
    let mut axes = deviation_axes(vectors, dim);
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
    if total.is_none_or(|t| t > budget) {
        let m = largest_root(budget.max(1), dim);
        axes = axes.iter().map(|a| thin(a, m)).collect();
    }
    let mut out = vec![Vec::new()];
    for axis in &axes {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Rational>| {
                axis.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|c| Vector::new(c).expect("dim >= 1"))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchSummary {
    pub evaluated: usize,
    pub incomparable: usize,
    pub violations: Vec<DeviationReport>,
}

fn utility(outcome: &crate::mechanism::AgentOutcome, v: &Vector) -> Vector {
    if outcome.winner {
        v.sub(&outcome.payment)
    } else {
        Vector::zero(v.dim())
    }
}

fn search(
    instance: &Instance,
    kind: MechanismKind,
    policy: PaymentPolicy,
    deviations: &Deviations,
    keep: impl Fn(&DeviationReport) -> bool + Sync,
) -> Result<(Vec<DeviationReport>, usize, usize)> {
    let truthful = instance.truthful()?;
    let valuations = truthful.bids();
    let candidates = match deviations {
        Deviations::Grid { budget } => deviation_grid(&valuations, instance.dim(), *budget),
        Deviations::Explicit(list) => list.clone(),
    };
    let cache = ReferenceCache::new();
    let mut kept = Vec::new();
    let mut evaluated = 0;
    let mut incomparable = 0;
    for (i, (v, agent)) in valuations.iter().zip(truthful.agents()).enumerate() {
        let id = agent.id;
        let honest = run_for_agent(&truthful, i, kind, policy, &cache)?;
        let u = utility(&honest, v);
        let reports = candidates
            .par_iter()
            .map(|b| {
                let lied = truthful.with_bid(i, b.clone())?;
                let out = run_for_agent(&lied, i, kind, policy, &cache)?;
                DeviationReport::new(id, v.clone(), u.clone(), b.clone(), utility(&out, v))
            })
            .collect::<Result<Vec<_>>>()?;
        evaluated += reports.len();
        incomparable += reports
            .iter()
            .filter(|r| r.verdict == UtilityComparison::MutuallyIncomparable)
            .count();
        kept.extend(reports.into_iter().filter(|r| keep(r)));
    }
    Ok((kept, evaluated, incomparable))
}

/// Every agent in turn bids each deviation while the others stay truthful.
/// Returns one report per (agent, deviation) pair, agents in order.
pub fn verify_equilibria_truthfulness(
    instance: &Instance,
    kind: MechanismKind,
    policy: PaymentPolicy,
    deviations: &Deviations,
) -> Result<Vec<DeviationReport>> {
    Ok(search(instance, kind, policy, deviations, |_| true)?.0)
}

/// Like [`verify_equilibria_truthfulness`] but keeps only violations.
pub fn search_violations(
    instance: &Instance,
    kind: MechanismKind,
    policy: PaymentPolicy,
    deviations: &Deviations,
) -> Result<SearchSummary> {
    let (violations, evaluated, incomparable) = search(
        instance,
        kind,
        policy,
        deviations,
        DeviationReport::is_violation,
    )?;
    Ok(SearchSummary {
        evaluated,
        incomparable,
        violations,
    })
}

// ---------------------------------------------------------------------------
// Impossibility replays on b1 = (3,1), b2 = (1,3), b3 = (2,2).

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplayCase {
    /// `p3 ∈ [1,2]²` with both coordinates above 1.
    Region,
    /// `p3 ⪯ (1,2)`
    LowFirst,
    /// `p3 ⪯ (2,1)`
    LowSecond,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub case: ReplayCase,
    pub payment: Vector,
    pub report: DeviationReport,
    /// Whether the three valuations of the replay have distinct values.
    pub dv_holds: bool,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn replay_others() -> [Vector; 2] {
    [Vector::from_ints(&[3, 1]), Vector::from_ints(&[1, 3])]
}

fn wins(others: &[Vector], bid: &Vector) -> bool {
    !others.iter().any(|s| s.weakly_dominates(bid))
}

fn replay(payment: &Vector) -> Result<Replay> {
    let two = Vector::from_ints(&[2, 2]);
    if payment.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: payment.dim(),
        });
    }
    if !two.weakly_dominates(payment) || !payment.is_nonnegative() {
        return Err(Error::Precondition(format!(
            "payment {payment} must lie in [0,2]² to respect individual rationality at (2,2)"
        )));
    }
    let others = replay_others();
    let one = Rational::one();
    let (case, valuation, deviation, deviation_payment) =
        if payment.get(0) > &one && payment.get(1) > &one {
            // bid halfway towards (1,1); any admissible charge is at most that bid
            let dev = Vector::new(vec![
                (&one + payment.get(0)).half(),
                (&one + payment.get(1)).half(),
            ])?;
            (ReplayCase::Region, two.clone(), dev.clone(), dev)
        } else if payment.get(0) <= &one {
            let v = Vector::new(vec![one.clone(), q(5, 2)])?;
            (ReplayCase::LowFirst, v, two.clone(), payment.clone())
        } else {
            let v = Vector::new(vec![q(5, 2), one.clone()])?;
            (ReplayCase::LowSecond, v, two.clone(), payment.clone())
        };
    assert!(wins(&others, &deviation), "the deviation must stay maximal");
    let truthful_utility = if wins(&others, &valuation) {
        valuation.sub(payment)
    } else {
        Vector::zero(2)
    };
    let deviation_utility = valuation.sub(&deviation_payment);
    let mut rows: Vec<(AgentId, Vector)> = others
        .iter()
        .enumerate()
        .map(|(i, v)| (AgentId(i + 1), v.clone()))
        .collect();
    rows.push((AgentId(3), valuation.clone()));
    let dv_holds = crate::mechanism::check_dv(&rows).holds;
    let report = DeviationReport::new(
        AgentId(3),
        valuation,
        truthful_utility,
        deviation,
        deviation_utility,
    )?;
    Ok(Replay {
        case,
        payment: payment.clone(),
        report,
        dv_holds,
    })
}

/// Agent 3 of the fixed three-agent instance is charged `payment` for the
/// bid (2,2). Builds a valuation and a lie that beats telling the truth.
pub fn replay_impossibility_truthful(payment: &Vector) -> Result<Replay> {
    replay(payment)
}

/// The same construction with agents 1 and 2 reporting their valuations.
/// For the two boundary payments the resulting valuations share a
/// coordinate with another agent.
pub fn replay_impossibility_dv(payment: &Vector) -> Result<Replay> {
    replay(payment)
}

/// Payments used by default for the two boundary cases: (1,2) and (2,1).
pub fn boundary_payments() -> [Vector; 2] {
    [Vector::from_ints(&[1, 2]), Vector::from_ints(&[2, 1])]
}

/// The three-agent instance with truthful valuations (3,1), (1,3), (2,2).
pub fn replay_instance() -> Instance {
    let rows = vec![
        Vector::from_ints(&[3, 1]),
        Vector::from_ints(&[1, 3]),
        Vector::from_ints(&[2, 2]),
    ];
    Instance::new(2, rows.clone(), Some(rows)).expect("valid instance")
}

// ---------------------------------------------------------------------------
// δ-separation

fn check_same_dim(p: &Vector, t: &VectorSet) -> Result<()> {
    if p.dim() != t.dim() {
        return Err(Error::Dimension {
            expected: t.dim(),
            found: p.dim(),
        });
    }
    Ok(())
}

/// Per dimension `j`, the least gap `t^l − p^l` over the `t` whose first
/// coordinate exceeding `p` is `l = j`.
fn gaps_incomparable(p: &Vector, t: &VectorSet) -> Vec<Option<Rational>> {
    let mut eps: Vec<Option<Rational>> = vec![None; p.dim()];
    for s in t {
        let l = (0..p.dim())
            .find(|&j| s.get(j) > p.get(j))
            .expect("incomparable vectors exceed p somewhere");
        let gap = s.get(l) - p.get(l);
        if eps[l].as_ref().is_none_or(|e| &gap < e) {
            eps[l] = Some(gap);
        }
    }
    eps
}

fn gaps_dominating(p: &Vector, t: &VectorSet) -> Vec<Option<Rational>> {
    (0..p.dim())
        .map(|j| {
            t.iter()
                .map(|s| s.get(j) - p.get(j))
                .filter(Rational::is_positive)
                .min()
        })
        .collect()
}

fn halve_min(a: &[Option<Rational>], b: &[Option<Rational>]) -> Vector {
    let coords = a
        .iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => x.min(y).half(),
            (Some(e), None) | (None, Some(e)) => e.half(),
            (None, None) => Rational::one().half(),
        })
        .collect();
    Vector::new(coords).expect("dim >= 1")
}

/// `δ ≫ 0` such that `p + δ` stays incomparable to every member of `t`,
/// given that `p` is incomparable to all of them.
pub fn separation_delta_incomparable(p: &Vector, t: &VectorSet) -> Result<Vector> {
    check_same_dim(p, t)?;
    if let Some(s) = t.iter().find(|s| !p.incomparable(s)) {
        return Err(Error::Precondition(format!(
            "{p} is not incomparable to {s}"
        )));
    }
    let delta = halve_min(&gaps_incomparable(p, t), &vec![None; p.dim()]);
    let moved = p.add(&delta);
    assert!(t.iter().all(|s| moved.incomparable(s)));
    Ok(delta)
}

/// `δ ≫ 0` such that every member of `t1 ∪ t2` is incomparable to or
/// dominates `p + δ`, given `t1` incomparable to `p` and `t2` dominating it.
pub fn separation_delta_bipartition(p: &Vector, t1: &VectorSet, t2: &VectorSet) -> Result<Vector> {
    check_same_dim(p, t1)?;
    check_same_dim(p, t2)?;
    if let Some(s) = t1.iter().find(|s| !p.incomparable(s)) {
        return Err(Error::Precondition(format!(
            "{p} is not incomparable to {s}"
        )));
    }
    if let Some(s) = t2.iter().find(|s| !s.dominates(p)) {
        return Err(Error::Precondition(format!("{s} does not dominate {p}")));
    }
    let delta = halve_min(&gaps_incomparable(p, t1), &gaps_dominating(p, t2));
    let moved = p.add(&delta);
    assert!(t1
        .iter()
        .chain(t2.iter())
        .all(|s| s.incomparable(&moved) || s.dominates(&moved)));
    Ok(delta)
}

// ---------------------------------------------------------------------------
// Adversarial valuations

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotCovered {
    /// The payment is itself a reference point of the others.
    ReferencePoint,
    /// The payment dominates some reference point without strongly
    /// dominating any; only a limiting argument applies.
    WeakOvercharge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Adversarial {
    /// The payment is incomparable to every reference point.
    Incomparable {
        delta: Vector,
        report: DeviationReport,
    },
    /// Some reference point dominates the payment.
    Undercharge {
        delta: Vector,
        report: DeviationReport,
    },
    /// The payment strongly dominates the reference point `dominated`.
    /// Settled against a concrete rule by [`resolve_overcharge`].
    Overcharge {
        bid: Vector,
        payment: Vector,
        dominated: Vector,
        midpoint: Vector,
    },
    NotCovered(NotCovered),
}

/// For a payment `payment` that some rule charges a winning bid `bid`,
/// builds a valuation under which lying is strictly profitable, whenever
/// the payment is not one M could have charged.
///
/// In the first two cases the valuation is `payment + δ`; the agent loses
/// under M when truthful (checked by running M) and gains `δ ≫ 0` by
/// bidding `bid` and paying `payment`.
pub fn adversarial_valuation(
    bid: &Vector,
    payment: &Vector,
    others: &VectorSet,
) -> Result<Adversarial> {
    check_same_dim(bid, others)?;
    check_same_dim(payment, others)?;
    if !crate::mechanism::dedup(others.members()).removed.is_empty() {
        return Err(Error::Precondition(
            "the other bids must be pairwise distinct".into(),
        ));
    }
    if let Some(s) = others.iter().find(|s| s.weakly_dominates(bid)) {
        return Err(Error::Precondition(format!(
            "{bid} is not maximal: {s} weakly dominates it"
        )));
    }
    if !bid.weakly_dominates(payment) {
        return Err(Error::Precondition(format!(
            "{bid} does not weakly dominate {payment}"
        )));
    }
    let t = reference_points_fast(others)?;
    if t.contains(payment) {
        return Ok(Adversarial::NotCovered(NotCovered::ReferencePoint));
    }
    let (above, beside): (Vec<Vector>, Vec<Vector>) = t
        .points()
        .iter()
        .filter(|s| s.dominates(payment) || s.incomparable(payment))
        .cloned()
        .partition(|s| s.dominates(payment));
    let covered = above.len() + beside.len() == t.len();
    if covered {
        let dim = others.dim();
        let delta = if above.is_empty() {
            separation_delta_incomparable(payment, &VectorSet::new(dim, beside)?)?
        } else {
            separation_delta_bipartition(
                payment,
                &VectorSet::new(dim, beside)?,
                &VectorSet::new(dim, above.clone())?,
            )?
        };
        let v = payment.add(&delta);
        let report = hypothetical_lie(others, bid, payment, v)?;
        return Ok(if above.is_empty() {
            Adversarial::Incomparable { delta, report }
        } else {
            Adversarial::Undercharge { delta, report }
        });
    }
    if let Some(lower) = t.points().iter().find(|s| payment.strongly_dominates(s)) {
        return Ok(Adversarial::Overcharge {
            bid: bid.clone(),
            payment: payment.clone(),
            dominated: lower.clone(),
            midpoint: payment.midpoint(lower),
        });
    }
    Ok(Adversarial::NotCovered(NotCovered::WeakOvercharge))
}

/// Truthful utility from an actual run of M with valuation `v` appended to
/// `others`; the lie `bid` is charged `payment` by the rule under test.
fn hypothetical_lie(
    others: &VectorSet,
    bid: &Vector,
    payment: &Vector,
    v: Vector,
) -> Result<DeviationReport> {
    let mut bids = others.members().to_vec();
    bids.push(v.clone());
    let me = bids.len() - 1;
    let instance = Instance::new(others.dim(), bids, None)?;
    let cache = ReferenceCache::new();
    let honest = run_for_agent(
        &instance,
        me,
        MechanismKind::Pareto,
        PaymentPolicy::LexMin,
        &cache,
    )?;
    let truthful_utility = utility(&honest, &v);
    let lying = instance.with_bid(me, bid.clone())?;
    let out = run_for_agent(
        &lying,
        me,
        MechanismKind::Pareto,
        PaymentPolicy::LexMin,
        &cache,
    )?;
    assert!(out.winner, "the lie is a maximal bid");
    let deviation_utility = v.sub(payment);
    DeviationReport::new(
        AgentId(me + 1),
        v,
        truthful_utility,
        bid.clone(),
        deviation_utility,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OverchargeResolution {
    /// An agent profits from lying against `rule`.
    Profitable(DeviationReport),
    /// `rule` charges a bid more than the bid itself.
    IndividualRationality { bid: Vector, payment: Vector },
}

/// Settles an [`Adversarial::Overcharge`] against the payment rule that
/// produced it. `rule` maps agent i's bid to its payment, with the other
/// bids held fixed, and must return the overcharged payment at the
/// original bid.
pub fn resolve_overcharge(
    case: &Adversarial,
    rule: impl Fn(&Vector) -> Vector,
) -> Result<OverchargeResolution> {
    let Adversarial::Overcharge {
        bid,
        payment,
        midpoint,
        ..
    } = case
    else {
        return Err(Error::Precondition("not an overcharge case".into()));
    };
    let agent = AgentId(0);
    let charged = |b: &Vector| -> Result<std::result::Result<Vector, OverchargeResolution>> {
        let p = rule(b);
        b.check_dim(&p)?;
        Ok(if b.weakly_dominates(&p) {
            Ok(p)
        } else {
            Err(OverchargeResolution::IndividualRationality {
                bid: b.clone(),
                payment: p,
            })
        })
    };
    let lie = |v: &Vector, pay_truth: &Vector, dev: &Vector, pay_dev: &Vector| {
        DeviationReport::new(
            agent,
            v.clone(),
            v.sub(pay_truth),
            dev.clone(),
            v.sub(pay_dev),
        )
        .map(OverchargeResolution::Profitable)
    };
    let again = match charged(payment)? {
        Ok(p) => p,
        Err(e) => return Ok(e),
    };
    if &again != payment {
        // valuation = bid, lie = the payment itself, which is charged less
        return lie(bid, payment, payment, &again);
    }
    let at_mid = match charged(midpoint)? {
        Ok(p) => p,
        Err(e) => return Ok(e),
    };
    match at_mid.compare(payment)? {
        d if d.is_dominated() => lie(bid, payment, midpoint, &at_mid),
        d if d.dominates() => lie(midpoint, &at_mid, bid, payment),
        // equal or incomparable payments cannot lie below the midpoint
        _ => Ok(OverchargeResolution::IndividualRationality {
            bid: midpoint.clone(),
            payment: at_mid,
        }),
    }
}
