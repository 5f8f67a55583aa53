//! Longitudinal modularity: observed intra-community interactions minus a
//! temporal null-model expectation, minus a switch penalty.
//!
//! Two null models are supported. The joint-membership expectation scales
//! with the community's existence duration `|T_C|` and expects near-stationary
//! membership; the mean-membership expectation scales with the geometric mean
//! of the two nodes' membership durations and tolerates change. Both reduce
//! to the static configuration model when one community spans the full
//! horizon with every node a member throughout, which pins the score to zero.
//!
//! [`q_score`] is the production scorer; [`q_score_naive`] recomputes the
//! same quantity by a literal triple loop over communities and ordered node
//! pairs with no shared caches, and serves as the test oracle.

use std::collections::{BTreeMap, HashSet};
use std::str::FromStr;

use thiserror::Error;

use crate::community::{
    CommunityError, CommunityId, DynamicCommunityStructure, MoveTarget, Violation,
};
use crate::engine::Engine;
use crate::linkstream::{ActiveTimeNode, LinkStream, NodeId};

/// Null-model flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Expectation {
    /// Joint membership: community-duration based, stationarity-favoring.
    Jm,
    /// Mean membership: per-node-duration based, change-permissive.
    Mm,
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "JM" => Ok(Expectation::Jm),
            "MM" => Ok(Expectation::Mm),
            other => Err(format!("unknown expectation `{other}` (use JM or MM)")),
        }
    }
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Expectation::Jm => "JM",
            Expectation::Mm => "MM",
        })
    }
}

/// Scoring parameters: null model and switch-penalty weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityConfig {
    pub expectation: Expectation,
    pub omega: f64,
}

impl QualityConfig {
    pub fn new(expectation: Expectation, omega: f64) -> Result<Self, QualityError> {
        if !(omega >= 0.0) {
            return Err(QualityError::NegativeOmega(omega));
        }
        Ok(QualityConfig { expectation, omega })
    }
}

/// Score decomposition; `total = observed - expected - switch_penalty`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityBreakdown {
    pub observed_fraction: f64,
    pub expected_fraction: f64,
    pub switch_penalty: f64,
    pub total: f64,
}

#[derive(Debug, Error)]
pub enum QualityError {
    #[error("stream has no interactions; the score is undefined")]
    EmptyStream,
    #[error("omega must be nonnegative, got {0}")]
    NegativeOmega(f64),
    #[error("structure violates invariants: {0:?}")]
    InvalidStructure(Vec<Violation>),
    #[error("structure is not in trimmed canonical form")]
    NotCanonical,
    #[error("instance too large for the naive scorer")]
    InstanceTooLarge,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error(transparent)]
    Community(#[from] CommunityError),
}

/// Joint-membership expectation for the ordered pair `(u, v)` in `c`.
pub fn expectation_jm(
    stream: &LinkStream,
    c: &crate::community::Community,
    u: NodeId,
    v: NodeId,
) -> Result<f64, QualityError> {
    check_node(stream, u)?;
    check_node(stream, v)?;
    let du = c.node_duration(u);
    let dv = c.node_duration(v);
    if du == 0 || dv == 0 {
        return Ok(0.0);
    }
    let two_m = 2.0 * stream.total_interactions() as f64;
    let tc = c.existence_duration() as f64;
    Ok(stream.degree(u) as f64 * stream.degree(v) as f64 / two_m * tc
        / stream.horizon_len() as f64)
}

/// Mean-membership expectation for the ordered pair `(u, v)` in `c`.
pub fn expectation_mm(
    stream: &LinkStream,
    c: &crate::community::Community,
    u: NodeId,
    v: NodeId,
) -> Result<f64, QualityError> {
    check_node(stream, u)?;
    check_node(stream, v)?;
    let du = c.node_duration(u) as f64;
    let dv = c.node_duration(v) as f64;
    let two_m = 2.0 * stream.total_interactions() as f64;
    Ok(stream.degree(u) as f64 * stream.degree(v) as f64 / two_m * (du * dv).sqrt()
        / stream.horizon_len() as f64)
}

fn check_node(stream: &LinkStream, u: NodeId) -> Result<(), QualityError> {
    if u.index() < stream.num_nodes() {
        Ok(())
    } else {
        Err(QualityError::UnknownNode(format!("#{}", u.0)))
    }
}

fn check_scoreable(s: &DynamicCommunityStructure) -> Result<(), QualityError> {
    if s.stream().total_interactions() == 0 {
        return Err(QualityError::EmptyStream);
    }
    let violations = s.validate();
    if !violations.is_empty() {
        return Err(QualityError::InvalidStructure(violations));
    }
    Ok(())
}

/// Longitudinal modularity of a structure, using factored per-community sums.
///
/// Accepts non-canonical (untrimmed) structures and scores them as stored.
pub fn q_score(
    s: &DynamicCommunityStructure,
    config: &QualityConfig,
) -> Result<QualityBreakdown, QualityError> {
    if config.omega < 0.0 {
        return Err(QualityError::NegativeOmega(config.omega));
    }
    check_scoreable(s)?;
    let stream = s.stream();
    let two_m = 2.0 * stream.total_interactions() as f64;
    let horizon = stream.horizon_len() as f64;

    let mut l_int: BTreeMap<CommunityId, u64> = BTreeMap::new();
    for (u, v, t) in stream.edges() {
        let cu = s.community_of(u, t);
        if cu.is_some() && cu == s.community_of(v, t) {
            *l_int.entry(cu.unwrap()).or_insert(0) += 1;
        }
    }

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in s.communities() {
        observed += 2.0 * *l_int.get(&c.id).unwrap_or(&0) as f64;
        // Sum over ordered member pairs (including u = v) factors into a
        // square of per-node sums for both null models.
        match config.expectation {
            Expectation::Jm => {
                let k: f64 = c
                    .members()
                    .map(|(u, _)| stream.degree(u) as f64)
                    .sum();
                let tc = c.existence_duration() as f64;
                expected += k * k / two_m * tc / horizon;
            }
            Expectation::Mm => {
                let sum: f64 = c
                    .members()
                    .map(|(u, _)| stream.degree(u) as f64 * (c.node_duration(u) as f64).sqrt())
                    .sum();
                expected += sum * sum / (two_m * horizon);
            }
        }
    }
    let observed_fraction = observed / two_m;
    let expected_fraction = expected / two_m;
    let switch_penalty = config.omega * s.sum_csc() as f64 / two_m;
    Ok(QualityBreakdown {
        observed_fraction,
        expected_fraction,
        switch_penalty,
        total: observed_fraction - expected_fraction - switch_penalty,
    })
}

/// Independent oracle: the same contract as [`q_score`], computed by a direct
/// triple loop over communities and ordered node pairs on expanded tick sets.
pub fn q_score_naive(
    s: &DynamicCommunityStructure,
    config: &QualityConfig,
) -> Result<QualityBreakdown, QualityError> {
    if config.omega < 0.0 {
        return Err(QualityError::NegativeOmega(config.omega));
    }
    check_scoreable(s)?;
    let stream = s.stream();
    if stream.num_active() > 10_000 {
        return Err(QualityError::InstanceTooLarge);
    }
    let two_m = 2.0 * stream.total_interactions() as f64;
    let horizon = stream.horizon_len() as f64;

    let mut pair_ticks: BTreeMap<(NodeId, NodeId), Vec<i64>> = BTreeMap::new();
    for (u, v, t) in stream.edges() {
        pair_ticks.entry((u, v)).or_default().push(t);
        pair_ticks.entry((v, u)).or_default().push(t);
    }

    let nodes: Vec<NodeId> = (0..stream.num_nodes() as u32).map(NodeId).collect();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in s.communities() {
        // Expand every run into an explicit tick set.
        let mut ticks: BTreeMap<NodeId, HashSet<i64>> = BTreeMap::new();
        for (u, runs) in c.members() {
            let set = ticks.entry(u).or_default();
            for r in runs {
                set.extend(r.first..=r.last);
            }
        }
        let mut community_ticks: HashSet<i64> = HashSet::new();
        for set in ticks.values() {
            community_ticks.extend(set.iter().copied());
        }
        let tc = community_ticks.len() as f64;
        for &u in &nodes {
            for &v in &nodes {
                let du = ticks.get(&u).map(HashSet::len).unwrap_or(0) as f64;
                let dv = ticks.get(&v).map(HashSet::len).unwrap_or(0) as f64;
                if u != v {
                    if let (Some(su), Some(sv)) = (ticks.get(&u), ticks.get(&v)) {
                        if let Some(ts) = pair_ticks.get(&(u, v)) {
                            observed += ts
                                .iter()
                                .filter(|t| su.contains(t) && sv.contains(t))
                                .count() as f64;
                        }
                    }
                }
                let kk = stream.degree(u) as f64 * stream.degree(v) as f64 / two_m;
                expected += match config.expectation {
                    Expectation::Jm => {
                        if du > 0.0 && dv > 0.0 {
                            kk * tc / horizon
                        } else {
                            0.0
                        }
                    }
                    Expectation::Mm => kk * (du * dv).sqrt() / horizon,
                };
            }
        }
    }

    // Switch counts, recomputed from scratch per node.
    let mut sum_eta = 0u64;
    for &u in &nodes {
        let mut visits: Vec<CommunityId> = Vec::new();
        for (cid, run) in s.membership_runs(u) {
            let active_inside = stream
                .activity(u)
                .iter()
                .any(|&t| run.contains(t));
            if !active_inside {
                continue;
            }
            if visits.last() != Some(&cid) {
                visits.push(cid);
            }
        }
        sum_eta += (visits.len() as u64).saturating_sub(1);
    }

    let observed_fraction = observed / two_m;
    let expected_fraction = expected / two_m;
    let switch_penalty = config.omega * sum_eta as f64 / two_m;
    Ok(QualityBreakdown {
        observed_fraction,
        expected_fraction,
        switch_penalty,
        total: observed_fraction - expected_fraction - switch_penalty,
    })
}

/// Exact change in total score from moving `moved` out of `source`, computed
/// by re-evaluating only the source and target communities.
///
/// Requires the structure to be in trimmed canonical form (the form produced
/// by assignment-based constructors and by the optimizer).
pub fn delta_move(
    s: &DynamicCommunityStructure,
    moved: &[ActiveTimeNode],
    source: CommunityId,
    target: MoveTarget,
    config: &QualityConfig,
) -> Result<f64, QualityError> {
    if config.omega < 0.0 {
        return Err(QualityError::NegativeOmega(config.omega));
    }
    check_scoreable(s)?;
    if let MoveTarget::Existing(t) = target {
        if t == source {
            return Err(QualityError::Community(CommunityError::SameCommunity));
        }
        if s.community(t).is_none() {
            return Err(QualityError::Community(CommunityError::UnknownCommunity(t)));
        }
    }
    if s.community(source).is_none() {
        return Err(QualityError::Community(CommunityError::UnknownCommunity(
            source,
        )));
    }
    if moved.is_empty() {
        return Ok(0.0);
    }
    let (mut engine, ids) = Engine::from_structure(s, config)?;
    let from = ids[&source];
    let mut atns = Vec::with_capacity(moved.len());
    for &atn in moved {
        let id = s
            .stream()
            .atn_id(atn)
            .map_err(|_| {
                QualityError::Community(CommunityError::NotActive {
                    node: s.stream().node_name(atn.node).to_string(),
                    tick: atn.tick,
                })
            })?;
        if engine.assignment()[id as usize] != from {
            return Err(QualityError::Community(CommunityError::NotInSource {
                node: s.stream().node_name(atn.node).to_string(),
                tick: atn.tick,
            }));
        }
        atns.push(id);
    }
    atns.sort_unstable();
    atns.dedup();
    let to = match target {
        MoveTarget::Existing(t) => ids[&t],
        MoveTarget::New => engine.alloc_community(),
    };
    Ok(engine.eval_move(&atns, from, to))
}
