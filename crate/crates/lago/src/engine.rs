//! Incremental scoring state over a per-active-time-node assignment.
//!
//! The engine keeps, per community, the member nodes' membership runs and the
//! internal interaction count, all maintained incrementally under moves.
//! Integer caches (interaction counts, durations, switch counts) are updated
//! in place; floating-point community terms are recomputed from them on every
//! evaluation, so repeated move trials cannot accumulate drift.
//!
//! A move evaluation applies the move, reads the affected community terms,
//! and reverts. The cost is linear in the active time nodes of the source and
//! target communities plus the activity of the moved nodes, which is the
//! inherent cost of evaluating a non-linear (but separable) quality function.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use smallvec::SmallVec;

use crate::community::{union_len, CommunityId, DynamicCommunityStructure};
use crate::linkstream::LinkStream;
use crate::quality::{Expectation, QualityBreakdown, QualityConfig, QualityError};

type Runs = SmallVec<[(i64, i64); 2]>;

#[derive(Clone, Debug, Default)]
struct NodeRuns {
    dur: i64,
    runs: Runs,
}

#[derive(Clone, Debug, Default)]
struct CommState {
    nodes: IndexMap<u32, NodeRuns>,
    l_int: i64,
}

/// Mutable scoring state for one stream and one quality configuration.
pub(crate) struct Engine<'a> {
    st: &'a LinkStream,
    exp: Expectation,
    omega: f64,
    two_m: f64,
    horizon: f64,
    assign: Vec<u32>,
    comms: Vec<Option<CommState>>,
    live: BTreeSet<u32>,
    node_blocks: Vec<u32>,
    sum_eta: i64,
    scratch: Vec<(i64, i64)>,
    /// Count of move evaluations, for logical-work accounting.
    pub evals: u64,
}

impl<'a> Engine<'a> {
    /// Every active time node in its own community; community id == atn id.
    pub fn singleton(st: &'a LinkStream, config: &QualityConfig) -> Result<Self, QualityError> {
        if st.total_interactions() == 0 {
            return Err(QualityError::EmptyStream);
        }
        let n_atn = st.num_active();
        let assign: Vec<u32> = (0..n_atn as u32).collect();
        Ok(Self::from_assign(st, config, assign))
    }

    /// Builds state from a per-atn assignment (dense or sparse ids).
    pub fn from_assign(st: &'a LinkStream, config: &QualityConfig, assign: Vec<u32>) -> Self {
        let max_id = assign.iter().copied().max().map(|m| m as usize + 1).unwrap_or(0);
        let mut comms: Vec<Option<CommState>> = (0..max_id).map(|_| None).collect();
        let mut live = BTreeSet::new();
        let mut node_blocks = vec![0u32; st.num_nodes()];
        let mut sum_eta = 0i64;
        let offs = st.atn_offsets();
        for u in 0..st.num_nodes() {
            let acts = st.node_activity_raw(u as u32);
            let base = offs[u] as usize;
            let mut blocks = 0u32;
            let mut pos = 0;
            while pos < acts.len() {
                let cid = assign[base + pos];
                let start = pos;
                while pos + 1 < acts.len() && assign[base + pos + 1] == cid {
                    pos += 1;
                }
                blocks += 1;
                let run = (acts[start], acts[pos]);
                let slot = comms[cid as usize].get_or_insert_with(CommState::default);
                live.insert(cid);
                let nr = slot.nodes.entry(u as u32).or_default();
                nr.runs.push(run);
                nr.dur += run.1 - run.0 + 1;
                pos += 1;
            }
            node_blocks[u] = blocks;
            if blocks > 0 {
                sum_eta += blocks as i64 - 1;
            }
        }
        for &(u, v, t) in st.edge_triples() {
            let a = st.atn_raw(u, t).expect("edge endpoint active");
            let b = st.atn_raw(v, t).expect("edge endpoint active");
            if assign[a as usize] == assign[b as usize] {
                comms[assign[a as usize] as usize]
                    .as_mut()
                    .expect("endpoint community exists")
                    .l_int += 1;
            }
        }
        Engine {
            st,
            exp: config.expectation,
            omega: config.omega,
            two_m: 2.0 * st.total_interactions() as f64,
            horizon: st.horizon_len() as f64,
            assign,
            comms,
            live,
            node_blocks,
            sum_eta,
            scratch: Vec::new(),
            evals: 0,
        }
    }

    /// Builds state from a canonical structure; returns the mapping from the
    /// structure's community ids to the engine's dense ids.
    ///
    /// Fails with [`QualityError::NotCanonical`] when the stored runs differ
    /// from the canonical runs implied by the structure's assignment.
    pub fn from_structure(
        s: &'a DynamicCommunityStructure,
        config: &QualityConfig,
    ) -> Result<(Self, std::collections::BTreeMap<CommunityId, u32>), QualityError> {
        let st = s.stream().as_ref();
        if st.total_interactions() == 0 {
            return Err(QualityError::EmptyStream);
        }
        let mut ids = std::collections::BTreeMap::new();
        for c in s.communities() {
            let dense = ids.len() as u32;
            ids.insert(c.id, dense);
        }
        let assign: Vec<u32> = s
            .assignment()
            .into_iter()
            .map(|a| {
                a.map(|orig| ids[&CommunityId(orig)])
                    .ok_or(QualityError::NotCanonical)
            })
            .collect::<Result<_, _>>()?;
        let engine = Self::from_assign(st, config, assign);
        // Canonical check: stored runs must match assignment-derived runs.
        for c in s.communities() {
            let dense = ids[&c.id];
            let state = engine.comms[dense as usize]
                .as_ref()
                .ok_or(QualityError::NotCanonical)?;
            if state.nodes.len() != c.num_members() {
                return Err(QualityError::NotCanonical);
            }
            for (u, runs) in c.members() {
                let nr = state.nodes.get(&u.0).ok_or(QualityError::NotCanonical)?;
                let mut derived: Vec<(i64, i64)> = nr.runs.to_vec();
                derived.sort_unstable();
                let stored: Vec<(i64, i64)> = runs.iter().map(|r| (r.first, r.last)).collect();
                if derived != stored {
                    return Err(QualityError::NotCanonical);
                }
            }
        }
        Ok((engine, ids))
    }

    pub fn stream(&self) -> &'a LinkStream {
        self.st
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assign
    }

    pub fn live_communities(&self) -> &BTreeSet<u32> {
        &self.live
    }

    pub fn num_communities(&self) -> usize {
        self.live.len()
    }

    pub fn sum_eta(&self) -> i64 {
        self.sum_eta
    }

    pub fn community_atn_count(&self, cid: u32) -> usize {
        self.comms[cid as usize]
            .as_ref()
            .map(|c| {
                c.nodes
                    .values()
                    .map(|nr| nr.runs.len())
                    .sum::<usize>()
            })
            .unwrap_or(0)
    }

    pub fn internal_edges(&self, cid: u32) -> i64 {
        self.comms[cid as usize].as_ref().map(|c| c.l_int).unwrap_or(0)
    }

    /// Allocates a fresh, empty community id (never reused).
    pub fn alloc_community(&mut self) -> u32 {
        let id = self.comms.len() as u32;
        self.comms.push(Some(CommState::default()));
        id
    }

    fn drop_if_empty(&mut self, cid: u32) {
        if let Some(c) = &self.comms[cid as usize] {
            if c.nodes.is_empty() {
                debug_assert_eq!(c.l_int, 0);
                self.comms[cid as usize] = None;
                self.live.remove(&cid);
            }
        }
    }

    /// Expected-interaction term of one community (not yet divided by `2m`).
    fn expected_term(&mut self, cid: u32) -> f64 {
        let Some(c) = &self.comms[cid as usize] else {
            return 0.0;
        };
        match self.exp {
            Expectation::Mm => {
                let s: f64 = c
                    .nodes
                    .iter()
                    .map(|(&u, nr)| self.st.degree_raw(u) as f64 * (nr.dur as f64).sqrt())
                    .sum();
                s * s / (self.two_m * self.horizon)
            }
            Expectation::Jm => {
                let k: f64 = c
                    .nodes
                    .keys()
                    .map(|&u| self.st.degree_raw(u) as f64)
                    .sum();
                self.scratch.clear();
                for nr in c.nodes.values() {
                    self.scratch.extend(nr.runs.iter().copied());
                }
                let tc = union_len(&mut self.scratch) as f64;
                k * k / self.two_m * (tc / self.horizon)
            }
        }
    }

    /// Contribution of one community to the total score.
    pub fn contribution(&mut self, cid: u32) -> f64 {
        let l_int = match &self.comms[cid as usize] {
            Some(c) => c.l_int,
            None => return 0.0,
        };
        (2.0 * l_int as f64 - self.expected_term(cid)) / self.two_m
    }

    pub fn q_breakdown(&mut self) -> QualityBreakdown {
        let ids: Vec<u32> = self.live.iter().copied().collect();
        let mut observed = 0.0;
        let mut expected = 0.0;
        for cid in ids {
            observed += 2.0 * self.internal_edges(cid) as f64;
            expected += self.expected_term(cid);
        }
        let observed_fraction = observed / self.two_m;
        let expected_fraction = expected / self.two_m;
        let switch_penalty = self.omega * self.sum_eta as f64 / self.two_m;
        QualityBreakdown {
            observed_fraction,
            expected_fraction,
            switch_penalty,
            total: observed_fraction - expected_fraction - switch_penalty,
        }
    }

    /// Score change from moving `atns` (sorted, deduped, all in `from`) to
    /// `to`; the state is left unchanged.
    pub fn eval_move(&mut self, atns: &[u32], from: u32, to: u32) -> f64 {
        self.evals += 1;
        let before = self.contribution(from) + self.contribution(to);
        let eta_before = self.sum_eta;
        self.apply(atns, from, to);
        let after = self.contribution(from) + self.contribution(to);
        let eta_after = self.sum_eta;
        self.apply(atns, to, from);
        (after - before) - self.omega * (eta_after - eta_before) as f64 / self.two_m
    }

    /// Applies a move permanently, pruning the source community if emptied.
    pub fn commit_move(&mut self, atns: &[u32], from: u32, to: u32) {
        self.apply(atns, from, to);
        self.drop_if_empty(from);
    }

    fn apply(&mut self, atns: &[u32], from: u32, to: u32) {
        debug_assert_ne!(from, to);
        debug_assert!(atns.windows(2).all(|w| w[0] < w[1]));
        self.live.insert(to);
        // Internal-edge bookkeeping against the pre-move assignment.
        let mut d_from = 0i64;
        let mut d_to = 0i64;
        for &a in atns {
            debug_assert_eq!(self.assign[a as usize], from);
            for &b in self.st.adjacency(a) {
                if atns.binary_search(&b).is_ok() {
                    if a < b {
                        d_from -= 1;
                        d_to += 1;
                    }
                } else {
                    let cb = self.assign[b as usize];
                    if cb == from {
                        d_from -= 1;
                    } else if cb == to {
                        d_to += 1;
                    }
                }
            }
        }
        if d_from != 0 {
            self.comms[from as usize]
                .as_mut()
                .expect("source community exists")
                .l_int += d_from;
        }
        if d_to != 0 {
            self.comms[to as usize]
                .get_or_insert_with(CommState::default)
                .l_int += d_to;
        }
        for &a in atns {
            self.assign[a as usize] = to;
        }
        // Rescan each affected node once; only runs of `from` and `to` can
        // have changed for it.
        let mut i = 0;
        while i < atns.len() {
            let u = self.st.atn_node_of(atns[i]);
            while i < atns.len() && self.st.atn_node_of(atns[i]) == u {
                i += 1;
            }
            self.rescan_node(u, from, to);
        }
    }

    fn rescan_node(&mut self, u: u32, ca: u32, cb: u32) {
        let acts = self.st.node_activity_raw(u);
        let base = self.st.atn_offsets()[u as usize] as usize;
        let mut runs_a: Runs = Runs::new();
        let mut runs_b: Runs = Runs::new();
        let mut blocks = 0u32;
        let mut pos = 0;
        while pos < acts.len() {
            let cid = self.assign[base + pos];
            let start = pos;
            while pos + 1 < acts.len() && self.assign[base + pos + 1] == cid {
                pos += 1;
            }
            blocks += 1;
            if cid == ca {
                runs_a.push((acts[start], acts[pos]));
            } else if cid == cb {
                runs_b.push((acts[start], acts[pos]));
            }
            pos += 1;
        }
        self.sum_eta += blocks as i64 - self.node_blocks[u as usize] as i64;
        self.node_blocks[u as usize] = blocks;
        self.set_node_runs(ca, u, runs_a);
        self.set_node_runs(cb, u, runs_b);
    }

    fn set_node_runs(&mut self, cid: u32, u: u32, runs: Runs) {
        let state = self.comms[cid as usize]
            .get_or_insert_with(CommState::default);
        if runs.is_empty() {
            state.nodes.shift_remove(&u);
        } else {
            let dur = runs.iter().map(|&(a, b)| b - a + 1).sum();
            state.nodes.insert(u, NodeRuns { dur, runs });
        }
    }

    /// Current structure snapshot with communities renumbered densely in
    /// first-appearance order of active time nodes.
    pub fn snapshot(&self, stream: &std::sync::Arc<LinkStream>) -> DynamicCommunityStructure {
        debug_assert!(std::ptr::eq(stream.as_ref(), self.st));
        let mut renumber: Vec<Option<u32>> = vec![None; self.comms.len()];
        let mut next = 0u32;
        let mut dense = Vec::with_capacity(self.assign.len());
        for &cid in &self.assign {
            let slot = &mut renumber[cid as usize];
            let id = match slot {
                Some(id) => *id,
                None => {
                    let id = next;
                    *slot = Some(id);
                    next += 1;
                    id
                }
            };
            dense.push(id);
        }
        DynamicCommunityStructure::from_assignment_raw(stream, &dense)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkstream::ParseOptions;
    use crate::quality::{q_score, q_score_naive};
    use std::io::Cursor;
    use std::sync::Arc;

    fn stream(text: &str) -> Arc<LinkStream> {
        Arc::new(LinkStream::parse_edge_list(Cursor::new(text), &ParseOptions::default()).unwrap())
    }

    #[test]
    fn singleton_engine_matches_direct_scoring() {
        let s = stream("0 a b\n1 a c\n3 b c\n3 a b\n");
        for exp in [Expectation::Jm, Expectation::Mm] {
            let cfg = QualityConfig::new(exp, 0.7).unwrap();
            let mut engine = Engine::singleton(&s, &cfg).unwrap();
            let structure = DynamicCommunityStructure::singleton(&s);
            let direct = q_score(&structure, &cfg).unwrap();
            let naive = q_score_naive(&structure, &cfg).unwrap();
            let got = engine.q_breakdown();
            assert!((got.total - direct.total).abs() < 1e-12);
            assert!((got.total - naive.total).abs() < 1e-12);
        }
    }

    #[test]
    fn commit_then_reverse_restores_score() {
        let s = stream("0 a b\n1 a b\n2 a b\n");
        let cfg = QualityConfig::new(Expectation::Mm, 1.0).unwrap();
        let mut engine = Engine::singleton(&s, &cfg).unwrap();
        let q0 = engine.q_breakdown().total;
        let from = engine.assignment()[0];
        let to = engine.assignment()[1];
        let delta = engine.eval_move(&[0], from, to);
        assert!((engine.q_breakdown().total - q0).abs() < 1e-15);
        engine.commit_move(&[0], from, to);
        let q1 = engine.q_breakdown().total;
        assert!((q1 - (q0 + delta)).abs() < 1e-12);
        let back = engine.eval_move(&[0], to, from);
        assert!((back + delta).abs() < 1e-12);
    }

    #[test]
    fn from_structure_rejects_non_canonical_runs() {
        use crate::community::{CommunityId, Run};
        let s = stream("0 u x\n5 u x\n");
        let u = s.node_id("u").unwrap();
        let x = s.node_id("x").unwrap();
        // Two same-community runs split across an inactive gap: valid but not
        // the canonical form of its own assignment.
        let split = DynamicCommunityStructure::from_runs(
            &s,
            vec![
                (
                    CommunityId(0),
                    vec![(u, vec![Run { first: 0, last: 0 }, Run { first: 5, last: 5 }])],
                ),
                (CommunityId(1), vec![(x, vec![Run { first: 0, last: 5 }])]),
            ],
        );
        let cfg = QualityConfig::new(Expectation::Mm, 1.0).unwrap();
        assert!(matches!(
            Engine::from_structure(&split, &cfg),
            Err(QualityError::NotCanonical)
        ));
    }
}
