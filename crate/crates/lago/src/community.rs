//! Dynamic community structures over active time nodes.
//!
//! A community is a set of node-time pairs, stored per node as disjoint
//! closed tick intervals (runs). Communities are mutually exclusive and every
//! active time node is affiliated; inactive ticks may be unaffiliated.
//!
//! Structures built from an assignment of active time nodes are canonical:
//! every run starts and ends on an active tick assigned to that community,
//! and consecutive same-community stretches of a node's activity form a
//! single run spanning the inactive ticks in between. Structures loaded from
//! files may be non-canonical (untrimmed) until [`DynamicCommunityStructure::trim`]
//! is applied.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linkstream::{ActiveTimeNode, LinkStream, NodeId};
use crate::quality::Expectation;

/// Identifier of one community within a structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommunityId(pub u32);

/// One membership run: the closed tick interval `[first, last]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Run {
    pub first: i64,
    pub last: i64,
}

impl Run {
    pub fn len(&self) -> i64 {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        self.last < self.first
    }

    pub fn contains(&self, tick: i64) -> bool {
        self.first <= tick && tick <= self.last
    }
}

/// A community: per-node membership runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Community {
    pub id: CommunityId,
    members: BTreeMap<NodeId, Vec<Run>>,
}

impl Community {
    fn new(id: CommunityId) -> Self {
        Community {
            id,
            members: BTreeMap::new(),
        }
    }

    pub fn members(&self) -> impl Iterator<Item = (NodeId, &[Run])> {
        self.members.iter().map(|(&u, r)| (u, r.as_slice()))
    }

    pub fn num_members(&self) -> usize {
        self.members.len()
    }

    pub fn runs(&self, u: NodeId) -> &[Run] {
        self.members.get(&u).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `|T_{u in C}|` in ticks.
    pub fn node_duration(&self, u: NodeId) -> i64 {
        self.runs(u).iter().map(Run::len).sum()
    }

    /// `|T_C|`: size of the union of all members' runs, in ticks.
    pub fn existence_duration(&self) -> i64 {
        let mut intervals: Vec<(i64, i64)> = self
            .members
            .values()
            .flatten()
            .map(|r| (r.first, r.last))
            .collect();
        union_len(&mut intervals)
    }

    pub fn covers(&self, u: NodeId, tick: i64) -> bool {
        let runs = self.runs(u);
        match runs.binary_search_by(|r| r.first.cmp(&tick)) {
            Ok(_) => true,
            Err(0) => false,
            Err(i) => runs[i - 1].contains(tick),
        }
    }
}

/// Length of the union of closed integer intervals; sorts its scratch input.
pub(crate) fn union_len(intervals: &mut Vec<(i64, i64)>) -> i64 {
    intervals.sort_unstable();
    let mut total = 0;
    let mut cur: Option<(i64, i64)> = None;
    for &(a, b) in intervals.iter() {
        match cur {
            None => cur = Some((a, b)),
            Some((ca, cb)) => {
                if a > cb + 1 {
                    total += cb - ca + 1;
                    cur = Some((a, b));
                } else if b > cb {
                    cur = Some((ca, b));
                }
            }
        }
    }
    if let Some((ca, cb)) = cur {
        total += cb - ca + 1;
    }
    total
}

/// Invariant violations reported by [`DynamicCommunityStructure::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A community with no membership runs at all.
    EmptyCommunity { community: CommunityId },
    /// The same node-time pair belongs to two communities.
    MutualExclusivity {
        node: NodeId,
        tick: i64,
        first: CommunityId,
        second: CommunityId,
    },
    /// An active time node covered by no community.
    UnassignedActiveTimeNode { node: NodeId, tick: i64 },
    /// A run extends beyond the stream horizon.
    OutOfHorizon {
        community: CommunityId,
        node: NodeId,
        run: Run,
    },
    /// A run with `last < first`.
    InvalidRun {
        community: CommunityId,
        node: NodeId,
        run: Run,
    },
}

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown community id {}", (.0).0)]
    UnknownCommunity(CommunityId),
    #[error("moved time node ({node}, {tick}) is not in the source community")]
    NotInSource { node: String, tick: i64 },
    #[error("source and target community are the same")]
    SameCommunity,
    #[error("({node}, {tick}) is not an active time node of the stream")]
    NotActive { node: String, tick: i64 },
    #[error("malformed community file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Target of a move: an existing community or a freshly created one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveTarget {
    Existing(CommunityId),
    New,
}

/// A mutually exclusive assignment of node-time pairs to communities over one
/// link stream.
#[derive(Clone, Debug)]
pub struct DynamicCommunityStructure {
    stream: Arc<LinkStream>,
    comms: BTreeMap<CommunityId, Community>,
}

impl PartialEq for DynamicCommunityStructure {
    fn eq(&self, other: &Self) -> bool {
        self.comms == other.comms && Arc::ptr_eq(&self.stream, &other.stream)
    }
}

/// Scoring metadata carried by community JSON files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FileMeta {
    pub expectation: Expectation,
    pub omega: f64,
}

impl Default for FileMeta {
    fn default() -> Self {
        FileMeta {
            expectation: Expectation::Mm,
            omega: 1.0,
        }
    }
}

impl DynamicCommunityStructure {
    /// One community per active time node, each a degenerate run `[t, t]`.
    pub fn singleton(stream: &Arc<LinkStream>) -> Self {
        let ids: Vec<u32> = (0..stream.num_active() as u32).collect();
        Self::from_assignment_raw(stream, &ids)
    }

    /// Canonical structure from a per-active-time-node community assignment,
    /// in stream order of active time nodes.
    pub fn from_assignment(stream: &Arc<LinkStream>, assignment: &[CommunityId]) -> Self {
        let raw: Vec<u32> = assignment.iter().map(|c| c.0).collect();
        Self::from_assignment_raw(stream, &raw)
    }

    pub(crate) fn from_assignment_raw(stream: &Arc<LinkStream>, assignment: &[u32]) -> Self {
        assert_eq!(assignment.len(), stream.num_active());
        let mut comms: BTreeMap<CommunityId, Community> = BTreeMap::new();
        let offs = stream.atn_offsets();
        for u in 0..stream.num_nodes() as u32 {
            let acts = stream.node_activity_raw(u);
            let base = offs[u as usize] as usize;
            let mut pos = 0;
            while pos < acts.len() {
                let cid = assignment[base + pos];
                let start = pos;
                while pos + 1 < acts.len() && assignment[base + pos + 1] == cid {
                    pos += 1;
                }
                let run = Run {
                    first: acts[start],
                    last: acts[pos],
                };
                comms
                    .entry(CommunityId(cid))
                    .or_insert_with(|| Community::new(CommunityId(cid)))
                    .members
                    .entry(NodeId(u))
                    .or_default()
                    .push(run);
                pos += 1;
            }
        }
        DynamicCommunityStructure {
            stream: Arc::clone(stream),
            comms,
        }
    }

    /// Builds a structure from explicit (possibly untrimmed) runs.
    pub fn from_runs(
        stream: &Arc<LinkStream>,
        communities: impl IntoIterator<Item = (CommunityId, Vec<(NodeId, Vec<Run>)>)>,
    ) -> Self {
        let mut comms = BTreeMap::new();
        for (cid, members) in communities {
            let mut c = Community::new(cid);
            for (u, mut runs) in members {
                runs.sort_unstable();
                if !runs.is_empty() {
                    c.members.insert(u, runs);
                }
            }
            comms.insert(cid, c);
        }
        DynamicCommunityStructure {
            stream: Arc::clone(stream),
            comms,
        }
    }

    pub fn stream(&self) -> &Arc<LinkStream> {
        &self.stream
    }

    pub fn num_communities(&self) -> usize {
        self.comms.len()
    }

    pub fn communities(&self) -> impl Iterator<Item = &Community> {
        self.comms.values()
    }

    pub fn community(&self, id: CommunityId) -> Option<&Community> {
        self.comms.get(&id)
    }

    /// The community covering `(u, tick)`, if any.
    pub fn community_of(&self, u: NodeId, tick: i64) -> Option<CommunityId> {
        self.comms
            .values()
            .find(|c| c.covers(u, tick))
            .map(|c| c.id)
    }

    /// Per-atn community ids, in stream order; `None` where uncovered.
    pub(crate) fn assignment(&self) -> Vec<Option<u32>> {
        let mut assign = vec![None; self.stream.num_active()];
        for c in self.comms.values() {
            for (&u, runs) in &c.members {
                for r in runs {
                    let acts = self.stream.activity(u);
                    let lo = acts.partition_point(|&t| t < r.first);
                    let hi = acts.partition_point(|&t| t <= r.last);
                    for p in lo..hi {
                        let id = self.stream.atn_offsets()[u.index()] as usize + p;
                        if assign[id].is_none() {
                            assign[id] = Some(c.id.0);
                        }
                    }
                }
            }
        }
        assign
    }

    /// Time-ordered membership runs of node `u` across all communities.
    pub fn membership_runs(&self, u: NodeId) -> Vec<(CommunityId, Run)> {
        let mut seq: Vec<(CommunityId, Run)> = self
            .comms
            .values()
            .flat_map(|c| c.runs(u).iter().map(move |&r| (c.id, r)))
            .collect();
        seq.sort_unstable_by_key(|(_, r)| (r.first, r.last));
        seq
    }

    /// Community switch count `eta_u`: visits in `u`'s run sequence minus one.
    ///
    /// Only runs containing at least one active tick of `u` count as visits,
    /// and adjacent visits to the same community merge into one.
    pub fn csc(&self, u: NodeId) -> u32 {
        let mut visits = 0u32;
        let mut last: Option<CommunityId> = None;
        for (cid, run) in self.membership_runs(u) {
            if !self.run_has_activity(u, run) {
                continue;
            }
            if last != Some(cid) {
                visits += 1;
                last = Some(cid);
            }
        }
        visits.saturating_sub(1)
    }

    /// `sum over u of eta_u`.
    pub fn sum_csc(&self) -> u64 {
        (0..self.stream.num_nodes() as u32)
            .map(|u| self.csc(NodeId(u)) as u64)
            .sum()
    }

    fn run_has_activity(&self, u: NodeId, run: Run) -> bool {
        let acts = self.stream.activity(u);
        let lo = acts.partition_point(|&t| t < run.first);
        lo < acts.len() && acts[lo] <= run.last
    }

    /// Shrinks every run to its first/last active tick and drops runs and
    /// communities left empty. Never decreases longitudinal modularity.
    pub fn trim(&self) -> Self {
        let mut comms = BTreeMap::new();
        for (&cid, c) in &self.comms {
            let mut out = Community::new(cid);
            for (&u, runs) in &c.members {
                let acts = self.stream.activity(u);
                let mut kept = Vec::new();
                for r in runs {
                    let lo = acts.partition_point(|&t| t < r.first);
                    let hi = acts.partition_point(|&t| t <= r.last);
                    if lo < hi {
                        kept.push(Run {
                            first: acts[lo],
                            last: acts[hi - 1],
                        });
                    }
                }
                if !kept.is_empty() {
                    out.members.insert(u, kept);
                }
            }
            if !out.members.is_empty() {
                comms.insert(cid, out);
            }
        }
        DynamicCommunityStructure {
            stream: Arc::clone(&self.stream),
            comms,
        }
    }

    /// Checks the structural invariants; an empty list means the structure is
    /// a valid dynamic community structure (it may still be untrimmed).
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let (t_start, t_end) = self.stream.horizon();
        for (&cid, c) in &self.comms {
            if c.members.is_empty() {
                violations.push(Violation::EmptyCommunity { community: cid });
            }
            for (&u, runs) in &c.members {
                for r in runs {
                    if r.is_empty() {
                        violations.push(Violation::InvalidRun {
                            community: cid,
                            node: u,
                            run: *r,
                        });
                    } else if r.first < t_start || r.last > t_end {
                        violations.push(Violation::OutOfHorizon {
                            community: cid,
                            node: u,
                            run: *r,
                        });
                    }
                }
            }
        }
        // Mutual exclusivity: per node, runs across communities must not
        // overlap in ticks.
        for u in 0..self.stream.num_nodes() as u32 {
            let u = NodeId(u);
            let seq = self.membership_runs(u);
            for w in seq.windows(2) {
                let (ca, ra) = w[0];
                let (cb, rb) = w[1];
                if rb.first <= ra.last {
                    violations.push(Violation::MutualExclusivity {
                        node: u,
                        tick: rb.first,
                        first: ca,
                        second: cb,
                    });
                }
            }
        }
        for (id, a) in self.assignment().iter().enumerate() {
            if a.is_none() {
                let atn = self.stream.atn(id as u32);
                violations.push(Violation::UnassignedActiveTimeNode {
                    node: atn.node,
                    tick: atn.tick,
                });
            }
        }
        violations
    }

    /// Moves a set of active time nodes out of `source` and rebuilds the
    /// canonical structure for the new assignment.
    pub fn apply_move(
        &self,
        moved: &[ActiveTimeNode],
        source: CommunityId,
        target: MoveTarget,
    ) -> Result<Self, CommunityError> {
        if !self.comms.contains_key(&source) {
            return Err(CommunityError::UnknownCommunity(source));
        }
        let target_id = match target {
            MoveTarget::Existing(t) => {
                if t == source {
                    return Err(CommunityError::SameCommunity);
                }
                if !self.comms.contains_key(&t) {
                    return Err(CommunityError::UnknownCommunity(t));
                }
                t.0
            }
            MoveTarget::New => self.comms.keys().last().map(|c| c.0 + 1).unwrap_or(0),
        };
        let mut assign: Vec<u32> = self
            .assignment()
            .into_iter()
            .map(|a| a.expect("apply_move requires a total assignment"))
            .collect();
        for &atn in moved {
            let id = self
                .stream
                .atn_id(atn)
                .map_err(|_| CommunityError::NotActive {
                    node: self.stream.node_name(atn.node).to_string(),
                    tick: atn.tick,
                })? as usize;
            if assign[id] != source.0 {
                return Err(CommunityError::NotInSource {
                    node: self.stream.node_name(atn.node).to_string(),
                    tick: atn.tick,
                });
            }
            assign[id] = target_id;
        }
        Ok(Self::from_assignment_raw(&self.stream, &assign))
    }

    /// Internal interaction counts `L_{uv in C}` per community and unordered
    /// node pair, for pairs with at least one interaction inside.
    pub fn internal_pair_counts(&self) -> BTreeMap<(CommunityId, NodeId, NodeId), u64> {
        let mut counts = BTreeMap::new();
        for (u, v, t) in self.stream.edges() {
            let cu = self.community_of(u, t);
            if cu.is_some() && cu == self.community_of(v, t) {
                *counts.entry((cu.unwrap(), u, v)).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Serializes to the community JSON format.
    pub fn write_json<W: Write>(&self, writer: W, meta: &FileMeta) -> Result<(), CommunityError> {
        let file = CommunityFile {
            expectation: meta.expectation.to_string(),
            omega: meta.omega,
            tick_duration: ratio_to_f64(self.stream.tick_duration()),
            communities: self
                .comms
                .values()
                .map(|c| CommunityRecord {
                    id: c.id.0 as i64,
                    members: c
                        .members
                        .iter()
                        .map(|(&u, runs)| MemberRecord {
                            node: self.stream.node_name(u).to_string(),
                            intervals: runs.iter().map(|r| (r.first, r.last)).collect(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_writer(writer, &file).map_err(|e| CommunityError::Format(e.to_string()))
    }

    /// Reads the community JSON format, resolving node names against `stream`.
    pub fn read_json<R: Read>(
        stream: &Arc<LinkStream>,
        reader: R,
    ) -> Result<(Self, FileMeta), CommunityError> {
        let file: CommunityFile =
            serde_json::from_reader(reader).map_err(|e| CommunityError::Format(e.to_string()))?;
        let expectation = file
            .expectation
            .parse::<Expectation>()
            .map_err(CommunityError::Format)?;
        let mut comms = BTreeMap::new();
        for rec in file.communities {
            if rec.id < 0 || rec.id > u32::MAX as i64 {
                return Err(CommunityError::Format(format!(
                    "community id {} out of range",
                    rec.id
                )));
            }
            let cid = CommunityId(rec.id as u32);
            let mut c = Community::new(cid);
            for member in rec.members {
                let u = stream
                    .node_id(&member.node)
                    .ok_or_else(|| CommunityError::UnknownNode(member.node.clone()))?;
                let mut runs: Vec<Run> = member
                    .intervals
                    .iter()
                    .map(|&(first, last)| Run { first, last })
                    .collect();
                runs.sort_unstable();
                if !runs.is_empty() {
                    c.members.insert(u, runs);
                }
            }
            if comms.insert(cid, c).is_some() {
                return Err(CommunityError::Format(format!(
                    "duplicate community id {}",
                    rec.id
                )));
            }
        }
        Ok((
            DynamicCommunityStructure {
                stream: Arc::clone(stream),
                comms,
            },
            FileMeta {
                expectation,
                omega: file.omega,
            },
        ))
    }
}

fn ratio_to_f64(r: num_rational::Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Serialize, Deserialize)]
struct CommunityFile {
    expectation: String,
    omega: f64,
    tick_duration: f64,
    communities: Vec<CommunityRecord>,
}

#[derive(Serialize, Deserialize)]
struct CommunityRecord {
    id: i64,
    members: Vec<MemberRecord>,
}

#[derive(Serialize, Deserialize)]
struct MemberRecord {
    node: String,
    intervals: Vec<(i64, i64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkstream::ParseOptions;
    use std::io::Cursor;

    fn stream(text: &str) -> Arc<LinkStream> {
        Arc::new(LinkStream::parse_edge_list(Cursor::new(text), &ParseOptions::default()).unwrap())
    }

    fn empty_stream() -> Arc<LinkStream> {
        Arc::new(
            LinkStream::from_edges(
                Vec::<(&str, &str, i64)>::new(),
                None,
                num_rational::Ratio::from(1),
            )
            .unwrap(),
        )
    }

    #[test]
    fn singleton_gives_one_community_per_active_time_node() {
        let s = stream("0 a b\n2 a b\n");
        let c = DynamicCommunityStructure::singleton(&s);
        assert_eq!(c.num_communities(), 4);
        for comm in c.communities() {
            assert_eq!(comm.num_members(), 1);
            let (u, runs) = comm.members().next().unwrap();
            assert_eq!(runs.len(), 1);
            assert_eq!(runs[0].first, runs[0].last);
            assert!(s.is_active(u, runs[0].first));
        }
        // Each node visits two singleton communities: one switch apiece.
        assert_eq!(c.sum_csc(), 2);
        assert!(c.validate().is_empty());
    }

    #[test]
    fn singleton_on_empty_stream_is_empty() {
        let s = empty_stream();
        let c = DynamicCommunityStructure::singleton(&s);
        assert_eq!(c.num_communities(), 0);
    }

    #[test]
    fn csc_counts_transitions_with_merging() {
        let s = stream("0 u x\n1 u x\n2 u x\n");
        let u = s.node_id("u").unwrap();
        let x = s.node_id("x").unwrap();
        let runs_x = vec![(x, vec![Run { first: 0, last: 2 }])];
        // Sequence C: zero switches.
        let c = DynamicCommunityStructure::from_runs(
            &s,
            vec![
                (CommunityId(0), vec![(u, vec![Run { first: 0, last: 2 }])]),
                (CommunityId(1), runs_x.clone()),
            ],
        );
        assert_eq!(c.csc(u), 0);
        // Sequence C, D, C: two switches.
        let c = DynamicCommunityStructure::from_runs(
            &s,
            vec![
                (
                    CommunityId(0),
                    vec![(u, vec![Run { first: 0, last: 0 }, Run { first: 2, last: 2 }])],
                ),
                (CommunityId(1), vec![(u, vec![Run { first: 1, last: 1 }])]),
                (CommunityId(2), runs_x.clone()),
            ],
        );
        assert_eq!(c.csc(u), 2);
        // Sequence C, C separated by inactivity only: merged, zero switches.
        let s2 = stream("0 u x\n5 u x\n");
        let u2 = s2.node_id("u").unwrap();
        let x2 = s2.node_id("x").unwrap();
        let c = DynamicCommunityStructure::from_runs(
            &s2,
            vec![
                (
                    CommunityId(0),
                    vec![(u2, vec![Run { first: 0, last: 0 }, Run { first: 5, last: 5 }])],
                ),
                (CommunityId(1), vec![(x2, vec![Run { first: 0, last: 5 }])]),
            ],
        );
        assert_eq!(c.csc(u2), 0);
    }

    #[test]
    fn trim_snaps_runs_to_active_ticks() {
        let s = stream("2 a b\n4 a b\n");
        let a = s.node_id("a").unwrap();
        let b = s.node_id("b").unwrap();
        let untrimmed = DynamicCommunityStructure::from_runs(
            &s,
            vec![(
                CommunityId(0),
                vec![
                    (a, vec![Run { first: 2, last: 4 }]),
                    (b, vec![Run { first: 2, last: 4 }]),
                ],
            )],
        );
        // Horizon is [2,4]; widen boundaries beyond activity and trim back.
        let inflated = DynamicCommunityStructure::from_runs(
            &s,
            vec![(
                CommunityId(0),
                vec![
                    (a, vec![Run { first: 2, last: 4 }]),
                    (b, vec![Run { first: 3, last: 4 }]),
                ],
            )],
        );
        let trimmed = inflated.trim();
        assert_eq!(
            trimmed.community(CommunityId(0)).unwrap().runs(b),
            &[Run { first: 4, last: 4 }]
        );
        assert_eq!(untrimmed.trim(), untrimmed);
        // Idempotence.
        assert_eq!(trimmed.trim(), trimmed);
    }

    #[test]
    fn trim_drops_runs_without_activity() {
        let s = stream("0 a b\n9 a b\n");
        let a = s.node_id("a").unwrap();
        let b = s.node_id("b").unwrap();
        let c = DynamicCommunityStructure::from_runs(
            &s,
            vec![
                (
                    CommunityId(0),
                    vec![
                        (a, vec![Run { first: 0, last: 0 }, Run { first: 3, last: 5 }]),
                        (b, vec![Run { first: 0, last: 0 }]),
                    ],
                ),
                (
                    CommunityId(1),
                    vec![
                        (a, vec![Run { first: 9, last: 9 }]),
                        (b, vec![Run { first: 9, last: 9 }]),
                    ],
                ),
                (CommunityId(2), vec![(b, vec![Run { first: 3, last: 5 }])]),
            ],
        );
        let t = c.trim();
        assert_eq!(t.community(CommunityId(0)).unwrap().runs(a).len(), 1);
        assert!(t.community(CommunityId(2)).is_none());
        // Assignment of active time nodes is unchanged.
        assert_eq!(c.assignment(), t.assignment());
        // CSC unchanged even though inactive runs were removed.
        assert_eq!(c.csc(a), t.csc(a));
        assert_eq!(c.csc(b), t.csc(b));
    }

    #[test]
    fn validate_flags_overlap_empty_and_unassigned() {
        let s = stream("0 a b\n1 a b\n");
        let a = s.node_id("a").unwrap();
        let b = s.node_id("b").unwrap();
        let c = DynamicCommunityStructure::from_runs(
            &s,
            vec![
                (
                    CommunityId(0),
                    vec![(a, vec![Run { first: 0, last: 1 }])],
                ),
                (
                    CommunityId(1),
                    vec![(a, vec![Run { first: 1, last: 1 }])],
                ),
                (CommunityId(2), vec![(b, vec![])]),
            ],
        );
        let violations = c.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::MutualExclusivity { node, .. } if *node == a)));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::EmptyCommunity { community } if *community == CommunityId(2))));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::UnassignedActiveTimeNode { node, .. } if *node == b)));
        let good = DynamicCommunityStructure::singleton(&s);
        assert!(good.validate().is_empty());
    }

    #[test]
    fn from_assignment_merges_through_inactivity() {
        let s = stream("0 u x\n4 u x\n9 u x\n");
        let u = s.node_id("u").unwrap();
        // u's activity 0,4,9 assigned C,D,C: two runs for C split by D.
        let assign: Vec<CommunityId> = s
            .active()
            .map(|atn| {
                if atn.node == u && atn.tick == 4 {
                    CommunityId(1)
                } else {
                    CommunityId(0)
                }
            })
            .collect();
        let c = DynamicCommunityStructure::from_assignment(&s, &assign);
        assert_eq!(
            c.community(CommunityId(0)).unwrap().runs(u),
            &[Run { first: 0, last: 0 }, Run { first: 9, last: 9 }]
        );
        // x's activity 0,4,9 all in C: one run spanning the gaps.
        let x = s.node_id("x").unwrap();
        assert_eq!(
            c.community(CommunityId(0)).unwrap().runs(x),
            &[Run { first: 0, last: 9 }]
        );
        assert_eq!(c.csc(u), 2);
        assert_eq!(c.csc(x), 0);
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let s = stream("0 a b\n3 a c\n");
        let c = DynamicCommunityStructure::singleton(&s);
        let mut buf = Vec::new();
        c.write_json(&mut buf, &FileMeta::default()).unwrap();
        let (back, meta) = DynamicCommunityStructure::read_json(&s, buf.as_slice()).unwrap();
        assert_eq!(back, c);
        assert_eq!(meta, FileMeta::default());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"expectation\""));
        assert!(text.contains("\"intervals\""));
    }

    #[test]
    fn apply_move_rebuilds_canonical_runs() {
        let s = stream("0 u x\n4 u x\n9 u x\n");
        let u = s.node_id("u").unwrap();
        let assign: Vec<CommunityId> = s
            .active()
            .map(|atn| {
                if atn.node == u && atn.tick == 4 {
                    CommunityId(1)
                } else {
                    CommunityId(0)
                }
            })
            .collect();
        let c = DynamicCommunityStructure::from_assignment(&s, &assign);
        let moved = [ActiveTimeNode { node: u, tick: 4 }];
        let after = c
            .apply_move(&moved, CommunityId(1), MoveTarget::Existing(CommunityId(0)))
            .unwrap();
        assert_eq!(
            after.community(CommunityId(0)).unwrap().runs(u),
            &[Run { first: 0, last: 9 }]
        );
        assert!(after.community(CommunityId(1)).is_none());
        assert!(matches!(
            c.apply_move(&moved, CommunityId(0), MoveTarget::Existing(CommunityId(1))),
            Err(CommunityError::NotInSource { .. })
        ));
        assert!(matches!(
            c.apply_move(&moved, CommunityId(1), MoveTarget::Existing(CommunityId(1))),
            Err(CommunityError::SameCommunity)
        ));
    }
}
