//! The Pareto mechanism M and the weakly Pareto mechanism M′.
//!
//! Both start by discarding every group of agents that reported the very
//! same vector. M then selects the agents whose bid is in `MAX(B)` and
//! charges each winner a reference point of the other bids that its own bid
//! weakly dominates. M′ computes, for every remaining agent, the reference
//! points of `MAX(B)` without its own bid; agents that weakly dominate at
//! least one of them win and pay one of those points.
//!
//! Payments are vectors. A winner's utility is `v_i − p_i`; everybody else
//! gets the zero vector.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pareto::{maxima_indices, unique_sorted};
use crate::refpoints::{reference_points, reference_points_fast, GridDomain, ReferencePointSet};
use crate::vector::{Vector, VectorSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: AgentId,
    pub bid: Vector,
    pub valuation: Option<Vector>,
}

/// Agents with their reported bids and, for experiments, their private
/// valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    dim: usize,
    agents: Vec<Agent>,
}

impl Instance {
    /// Agents are numbered `1..=n` in input order.
    pub fn new(dim: usize, bids: Vec<Vector>, valuations: Option<Vec<Vector>>) -> Result<Self> {
        if let Some(v) = &valuations {
            if v.len() != bids.len() {
                let missing = v.len().min(bids.len()) + 1;
                return Err(Error::MissingValuation(AgentId(missing)));
            }
        }
        let mut vals = valuations.map(|v| v.into_iter());
        let agents = bids
            .into_iter()
            .enumerate()
            .map(|(i, bid)| Agent {
                id: AgentId(i + 1),
                bid,
                valuation: vals.as_mut().and_then(Iterator::next),
            })
            .collect();
        Instance::from_agents(dim, agents)
    }

    pub fn from_agents(dim: usize, agents: Vec<Agent>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut seen = std::collections::HashSet::new();
        for (index, a) in agents.iter().enumerate() {
            if !seen.insert(a.id) {
                return Err(Error::DuplicateAgent(a.id));
            }
            for v in std::iter::once(&a.bid).chain(a.valuation.as_ref()) {
                if v.dim() != dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        found: v.dim(),
                    });
                }
                if !v.is_strictly_positive() {
                    return Err(Error::NotStrictlyPositive { index });
                }
            }
        }
        Ok(Instance { dim, agents })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn bids(&self) -> Vec<Vector> {
        self.agents.iter().map(|a| a.bid.clone()).collect()
    }

    pub fn has_valuations(&self) -> bool {
        !self.agents.is_empty() && self.agents.iter().all(|a| a.valuation.is_some())
    }

    pub fn valuation(&self, index: usize) -> Result<&Vector> {
        let a = &self.agents[index];
        a.valuation.as_ref().ok_or(Error::MissingValuation(a.id))
    }

    /// Copy in which agent `index` reports `bid` instead.
    pub fn with_bid(&self, index: usize, bid: Vector) -> Result<Instance> {
        if bid.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: bid.dim(),
            });
        }
        if !bid.is_strictly_positive() {
            return Err(Error::NotStrictlyPositive { index });
        }
        let mut out = self.clone();
        out.agents[index].bid = bid;
        Ok(out)
    }

    /// Copy in which every agent reports its valuation.
    pub fn truthful(&self) -> Result<Instance> {
        let mut out = self.clone();
        for a in &mut out.agents {
            a.bid = a.valuation.clone().ok_or(Error::MissingValuation(a.id))?;
        }
        Ok(out)
    }

    /// Distinct-values report over the valuations, or over the bids when no
    /// valuations are present.
    pub fn dv_report(&self) -> DvReport {
        let rows: Vec<(AgentId, Vector)> = self
            .agents
            .iter()
            .map(|a| (a.id, a.valuation.clone().unwrap_or_else(|| a.bid.clone())))
            .collect();
        check_dv(&rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    /// M: winners are the maximal bids.
    Pareto,
    /// M′: winners are the weakly maximal bids.
    WeaklyPareto,
}

impl FromStr for MechanismKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "m" => Ok(MechanismKind::Pareto),
            "m-prime" => Ok(MechanismKind::WeaklyPareto),
            other => Err(format!(
                "unknown mechanism {other:?} (expected m or m-prime)"
            )),
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MechanismKind::Pareto => "m",
            MechanismKind::WeaklyPareto => "m-prime",
        })
    }
}

/// Which element of the candidate payment set a winner is charged.
/// Candidates are kept in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PaymentPolicy {
    #[default]
    LexMin,
    LexMax,
    /// Position in the sorted candidates, clamped to the last one.
    Index(usize),
}

impl PaymentPolicy {
    pub fn choose<'a>(&self, candidates: &'a [Vector]) -> Option<&'a Vector> {
        match *self {
            PaymentPolicy::LexMin => candidates.first(),
            PaymentPolicy::LexMax => candidates.last(),
            PaymentPolicy::Index(i) => candidates.get(i.min(candidates.len().checked_sub(1)?)),
        }
    }
}

impl FromStr for PaymentPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lex-min" => Ok(PaymentPolicy::LexMin),
            "lex-max" => Ok(PaymentPolicy::LexMax),
            _ => s
                .strip_prefix("index:")
                .and_then(|n| n.parse().ok())
                .map(PaymentPolicy::Index)
                .ok_or_else(|| {
                    format!("unknown payment policy {s:?} (lex-min, lex-max or index:N)")
                }),
        }
    }
}

impl fmt::Display for PaymentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaymentPolicy::LexMin => f.write_str("lex-min"),
            PaymentPolicy::LexMax => f.write_str("lex-max"),
            PaymentPolicy::Index(i) => write!(f, "index:{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentOutcome {
    pub id: AgentId,
    pub bid: Vector,
    pub removed_as_duplicate: bool,
    pub winner: bool,
    /// `PAY(i)` in lexicographic order; empty for losers.
    pub pay_candidates: Vec<Vector>,
    /// Zero for losers and removed agents.
    pub payment: Vector,
    /// `v_i − p_i` for winners, zero otherwise; `None` without valuations.
    pub utility: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismOutcome {
    pub kind: MechanismKind,
    pub policy: PaymentPolicy,
    pub dim: usize,
    pub agents: Vec<AgentOutcome>,
}

impl MechanismOutcome {
    pub fn winners(&self) -> impl Iterator<Item = &AgentOutcome> {
        self.agents.iter().filter(|a| a.winner)
    }

    pub fn winning_bids(&self) -> Vec<Vector> {
        self.winners().map(|a| a.bid.clone()).collect()
    }

    pub fn agent(&self, id: AgentId) -> Option<&AgentOutcome> {
        self.agents.iter().find(|a| a.id == id)
    }
}

/// Positions of the bids that survive duplicate removal and of those that
/// do not, both ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dedup {
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
}

/// Drops every bid that occurs more than once, all copies included.
pub fn dedup(bids: &[Vector]) -> Dedup {
    let mut count: HashMap<&Vector, usize> = HashMap::new();
    for b in bids {
        *count.entry(b).or_default() += 1;
    }
    let (kept, removed) = (0..bids.len()).partition(|&i| count[&bids[i]] == 1);
    Dedup { kept, removed }
}

/// Memoized reference point sets, keyed by the sorted distinct input.
#[derive(Default)]
pub struct ReferenceCache {
    map: Mutex<HashMap<Vec<Vector>, Arc<ReferencePointSet>>>,
}

impl ReferenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `T` of the given vectors; `{0}` for an empty input.
    pub fn get(&self, dim: usize, vectors: &[Vector]) -> Result<Arc<ReferencePointSet>> {
        let key = unique_sorted(vectors);
        if let Some(hit) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let computed = if key.is_empty() {
            ReferencePointSet::of_empty_set(dim)
        } else {
            reference_points_fast(&VectorSet::new(dim, key.clone())?)?
        };
        let computed = Arc::new(computed);
        self.map
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&computed));
        Ok(computed)
    }
}

/// The bids that survive duplicate removal, with their maxima.
#[derive(Debug, Clone)]
pub struct Market {
    dim: usize,
    /// instance position of each surviving bid
    agents: Vec<usize>,
    bids: Vec<Vector>,
    /// positions into `bids`, ascending
    maxima: Vec<usize>,
}

impl Market {
    /// Fails when fewer than two distinct bids remain.
    pub fn from_instance(instance: &Instance) -> Result<Market> {
        let market = Market::build(instance);
        match market.bids.len() {
            0 => Err(Error::EmptyMarket),
            1 => Err(Error::SingleAgent),
            _ => Ok(market),
        }
    }

    fn build(instance: &Instance) -> Market {
        let all = instance.bids();
        let Dedup { kept, .. } = dedup(&all);
        let bids: Vec<Vector> = kept.iter().map(|&i| all[i].clone()).collect();
        let maxima = maxima_indices(&bids);
        Market {
            dim: instance.dim(),
            agents: kept,
            bids,
            maxima,
        }
    }

    pub fn bids(&self) -> &[Vector] {
        &self.bids
    }

    /// Instance positions of the surviving agents.
    pub fn agents(&self) -> &[usize] {
        &self.agents
    }

    pub fn maxima(&self) -> &[usize] {
        &self.maxima
    }

    pub fn position_of_agent(&self, agent: usize) -> Option<usize> {
        self.agents.binary_search(&agent).ok()
    }

    pub fn is_maximal(&self, pos: usize) -> bool {
        self.maxima.binary_search(&pos).is_ok()
    }

    /// `B \ {b_pos}`.
    pub fn others(&self, pos: usize) -> Vec<Vector> {
        self.bids
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pos)
            .map(|(_, b)| b.clone())
            .collect()
    }

    /// `MAX(B) \ {b_pos}`.
    pub fn other_maxima(&self, pos: usize) -> Vec<Vector> {
        self.maxima
            .iter()
            .filter(|&&i| i != pos)
            .map(|&i| self.bids[i].clone())
            .collect()
    }

    /// Reference points `PAY(pos)` is drawn from under `kind`.
    pub fn payment_basis(
        &self,
        pos: usize,
        kind: MechanismKind,
        cache: &ReferenceCache,
    ) -> Result<Arc<ReferencePointSet>> {
        match kind {
            MechanismKind::Pareto => cache.get(self.dim, &self.others(pos)),
            MechanismKind::WeaklyPareto => cache.get(self.dim, &self.other_maxima(pos)),
        }
    }

    /// `PAY(pos)`, empty for agents that do not win.
    pub fn pay_candidates(
        &self,
        pos: usize,
        kind: MechanismKind,
        cache: &ReferenceCache,
    ) -> Result<Vec<Vector>> {
        if kind == MechanismKind::Pareto && !self.is_maximal(pos) {
            return Ok(Vec::new());
        }
        Ok(self
            .payment_basis(pos, kind, cache)?
            .payable_by(&self.bids[pos]))
    }

    /// The point `r = (dec_{B,1}(b^1), …, dec_{B,k}(b^k))` for the bid at
    /// `pos`, and a reference point `w ⪯ r` of the other bids. `None` if no
    /// such `w` exists or `r` is not dominated by the bid.
    pub fn dec_witness(&self, pos: usize) -> Result<Option<DecWitness>> {
        let all = VectorSet::new(self.dim, self.bids.clone())?;
        let domain = GridDomain::from_set(&all);
        let bid = &self.bids[pos];
        let r = Vector::new(
            (0..self.dim)
                .map(|j| domain.dec(j, bid.get(j)))
                .collect::<Result<_>>()?,
        )?;
        if !bid.dominates(&r) {
            return Ok(None);
        }
        let others = VectorSet::new(self.dim, self.others(pos))?;
        let t = reference_points(&others)?;
        Ok(t.points()
            .iter()
            .find(|w| r.weakly_dominates(w))
            .map(|w| DecWitness {
                r: r.clone(),
                w: w.clone(),
            }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecWitness {
    pub r: Vector,
    pub w: Vector,
}

fn utility_of(agent: &Agent, winner: bool, payment: &Vector) -> Option<Vector> {
    agent.valuation.as_ref().map(|v| {
        if winner {
            v.sub(payment)
        } else {
            Vector::zero(v.dim())
        }
    })
}

fn outcome_at(
    instance: &Instance,
    market: &Market,
    agent: usize,
    kind: MechanismKind,
    policy: PaymentPolicy,
    cache: &ReferenceCache,
) -> Result<AgentOutcome> {
    let a = &instance.agents()[agent];
    let zero = Vector::zero(instance.dim());
    let Some(pos) = market.position_of_agent(agent) else {
        return Ok(AgentOutcome {
            id: a.id,
            bid: a.bid.clone(),
            removed_as_duplicate: true,
            winner: false,
            pay_candidates: Vec::new(),
            payment: zero.clone(),
            utility: a.valuation.as_ref().map(|_| zero),
        });
    };
    let pay_candidates = market.pay_candidates(pos, kind, cache)?;
    let payment = policy.choose(&pay_candidates).cloned();
    if kind == MechanismKind::Pareto && market.is_maximal(pos) {
        assert!(
            payment.is_some(),
            "a maximal bid always weakly dominates a reference point of the others"
        );
    }
    let winner = payment.is_some();
    let payment = payment.unwrap_or(zero);
    Ok(AgentOutcome {
        id: a.id,
        bid: a.bid.clone(),
        removed_as_duplicate: false,
        winner,
        utility: utility_of(a, winner, &payment),
        pay_candidates,
        payment,
    })
}

/// Runs M or M′ on every agent. Per-agent payment sets are computed in
/// parallel; the result does not depend on scheduling.
pub fn run_mechanism(
    instance: &Instance,
    kind: MechanismKind,
    policy: PaymentPolicy,
) -> Result<MechanismOutcome> {
    let market = Market::from_instance(instance)?;
    let cache = ReferenceCache::new();
    let agents = (0..instance.len())
        .into_par_iter()
        .map(|i| outcome_at(instance, &market, i, kind, policy, &cache))
        .collect::<Result<Vec<_>>>()?;
    Ok(MechanismOutcome {
        kind,
        policy,
        dim: instance.dim(),
        agents,
    })
}

/// The Pareto mechanism M.
pub fn run_mechanism_m(instance: &Instance, policy: PaymentPolicy) -> Result<MechanismOutcome> {
    run_mechanism(instance, MechanismKind::Pareto, policy)
}

/// The weakly Pareto mechanism M′.
pub fn run_mechanism_m_prime(
    instance: &Instance,
    policy: PaymentPolicy,
) -> Result<MechanismOutcome> {
    run_mechanism(instance, MechanismKind::WeaklyPareto, policy)
}

/// The outcome of a single agent, identical to its entry in
/// [`run_mechanism`] but computing only that agent's payment set.
///
/// An agent removed as a duplicate gets its (empty) outcome even when too
/// few bids remain for the mechanism as a whole to run.
pub fn run_for_agent(
    instance: &Instance,
    agent: usize,
    kind: MechanismKind,
    policy: PaymentPolicy,
    cache: &ReferenceCache,
) -> Result<AgentOutcome> {
    let market = Market::build(instance);
    if market.position_of_agent(agent).is_some() {
        match market.bids.len() {
            0 => return Err(Error::EmptyMarket),
            1 => return Err(Error::SingleAgent),
            _ => {}
        }
    }
    outcome_at(instance, &market, agent, kind, policy, cache)
}

/// `v_i − p_i` for winners, zero for everyone else.
pub fn utilities(
    outcome: &MechanismOutcome,
    valuations: &[(AgentId, Vector)],
) -> Result<Vec<Vector>> {
    let by_id: HashMap<AgentId, &Vector> = valuations.iter().map(|(id, v)| (*id, v)).collect();
    outcome
        .agents
        .iter()
        .map(|a| {
            let v = by_id.get(&a.id).ok_or(Error::MissingValuation(a.id))?;
            v.check_dim(&a.payment)?;
            Ok(if a.winner {
                v.sub(&a.payment)
            } else {
                Vector::zero(outcome.dim)
            })
        })
        .collect()
}

/// Coordinate-level ties between distinct agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvReport {
    pub holds: bool,
    /// `(a, b, j)`: agents `a < b` share their value in zero-based dimension `j`.
    pub violations: Vec<(AgentId, AgentId, usize)>,
}

pub fn check_dv(rows: &[(AgentId, Vector)]) -> DvReport {
    let k = rows.first().map_or(0, |(_, v)| v.dim());
    let mut violations = Vec::new();
    for j in 0..k {
        let mut column: Vec<(&_, AgentId)> = rows.iter().map(|(id, v)| (v.get(j), *id)).collect();
        column.sort();
        let mut start = 0;
        while start < column.len() {
            let mut end = start + 1;
            while end < column.len() && column[end].0 == column[start].0 {
                end += 1;
            }
            for a in start..end {
                for b in a + 1..end {
                    let (x, y) = (column[a].1, column[b].1);
                    violations.push((x.min(y), x.max(y), j));
                }
            }
            start = end;
        }
    }
    violations.sort();
    DvReport {
        holds: violations.is_empty(),
        violations,
    }
}
