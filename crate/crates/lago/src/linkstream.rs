//! Link streams: sets of instantaneous, undirected, unweighted interactions
//! `(u, v, t)` over a node set and an inclusive range of integer ticks.
//!
//! Timestamps from raw data are normalized onto an integer tick grid whose
//! resolution is either declared by the caller or inferred as the greatest
//! common divisor of the gaps between successive distinct timestamps. All
//! quantities downstream (degrees, expectations, durations) are derived from
//! exact integer ticks.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Dense index of a node within a [`LinkStream`].
///
/// Nodes are interned in lexicographic order of their textual identifiers,
/// so indices are stable for a given node set regardless of input order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A `(node, tick)` pair that participates in at least one interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActiveTimeNode {
    pub node: NodeId,
    pub tick: i64,
}

/// Nearest active ticks of the same node strictly before and after a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemporalNeighbors {
    pub previous: Option<ActiveTimeNode>,
    pub next: Option<ActiveTimeNode>,
}

/// Errors from parsing edge-list text into a [`LinkStream`].
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("input contains no interaction rows")]
    EmptyInput,
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("self-loop at line {line}")]
    SelfLoop { line: usize },
    #[error("timestamp at line {line} is not an integer multiple of the tick duration")]
    NonUniformTimestamp { line: usize },
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from constructing or querying a [`LinkStream`].
#[derive(Debug, Error)]
pub enum StreamError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("({node}, {tick}) is not an active time node")]
    NotActive { node: String, tick: i64 },
    #[error("self-loop on `{node}` at tick {tick}")]
    SelfLoop { node: String, tick: i64 },
    #[error("edge tick {tick} lies outside horizon [{start}, {end}]")]
    EdgeOutsideHorizon { tick: i64, start: i64, end: i64 },
    #[error("horizon end precedes horizon start")]
    EmptyHorizon,
    #[error("tick duration must be positive")]
    NonPositiveTick,
}

/// Column layout of an edge-list row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ColumnOrder {
    /// `t u v [ignored...]` (SocioPatterns-compatible).
    #[default]
    TimeFirst,
    /// `u v t [ignored...]`.
    TimeLast,
}

/// Tick-grid resolution: inferred from the data or declared up front.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TickMode {
    /// GCD of gaps between successive distinct timestamps; ticks are counted
    /// from the smallest observed timestamp.
    #[default]
    Auto,
    /// Fixed duration; every timestamp must be an integer multiple of it.
    Declared(Ratio<i64>),
}

/// Options for [`LinkStream::parse_edge_list`].
#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Field delimiter; `None` splits on any whitespace.
    pub delimiter: Option<char>,
    pub columns: ColumnOrder,
    pub tick: TickMode,
    /// Widened horizon in ticks; must contain every normalized edge tick.
    pub horizon: Option<(i64, i64)>,
}

/// An immutable link stream with degree, activity, and adjacency indices.
#[derive(Clone, Debug)]
pub struct LinkStream {
    names: Vec<String>,
    t_start: i64,
    t_end: i64,
    tick: Ratio<i64>,
    /// Canonical edge set: `(u, v, t)` with `u < v`, sorted.
    edges: Vec<(u32, u32, i64)>,
    degree: Vec<u64>,
    /// Per node: sorted active ticks.
    node_act: Vec<Vec<i64>>,
    /// Active-time-node ids are dense: node `u`'s k-th active tick has id
    /// `atn_off[u] + k`.
    atn_off: Vec<u32>,
    atn_node: Vec<u32>,
    atn_tick: Vec<i64>,
    /// Per active time node: ids of same-tick interaction partners, sorted.
    adj: Vec<Vec<u32>>,
}

impl LinkStream {
    /// Builds a stream from `(u, v, t)` triples given by node name.
    ///
    /// Duplicate rows collapse to one interaction; `(u, v, t)` and `(v, u, t)`
    /// are the same edge. The horizon defaults to the observed tick range.
    pub fn from_edges<S: Into<String>>(
        edges: impl IntoIterator<Item = (S, S, i64)>,
        horizon: Option<(i64, i64)>,
        tick_duration: Ratio<i64>,
    ) -> Result<LinkStream, StreamError> {
        if tick_duration <= Ratio::zero() {
            return Err(StreamError::NonPositiveTick);
        }
        let mut names = BTreeSet::new();
        let raw: Vec<(String, String, i64)> = edges
            .into_iter()
            .map(|(u, v, t)| (u.into(), v.into(), t))
            .collect();
        for (u, v, t) in &raw {
            if u == v {
                return Err(StreamError::SelfLoop {
                    node: u.clone(),
                    tick: *t,
                });
            }
            names.insert(u.clone());
            names.insert(v.clone());
        }
        let names: Vec<String> = names.into_iter().collect();
        let index: BTreeMap<&str, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let mut set = BTreeSet::new();
        for (u, v, t) in &raw {
            let a = index[u.as_str()];
            let b = index[v.as_str()];
            set.insert((a.min(b), a.max(b), *t));
        }
        Self::assemble(names, set.into_iter().collect(), horizon, tick_duration)
    }

    fn assemble(
        names: Vec<String>,
        edges: Vec<(u32, u32, i64)>,
        horizon: Option<(i64, i64)>,
        tick: Ratio<i64>,
    ) -> Result<LinkStream, StreamError> {
        let observed = edges
            .iter()
            .fold(None::<(i64, i64)>, |acc, &(_, _, t)| match acc {
                None => Some((t, t)),
                Some((lo, hi)) => Some((lo.min(t), hi.max(t))),
            });
        let (t_start, t_end) = match (horizon, observed) {
            (Some((lo, hi)), obs) => {
                if hi < lo {
                    return Err(StreamError::EmptyHorizon);
                }
                if let Some((olo, ohi)) = obs {
                    if olo < lo || ohi > hi {
                        let t = if olo < lo { olo } else { ohi };
                        return Err(StreamError::EdgeOutsideHorizon {
                            tick: t,
                            start: lo,
                            end: hi,
                        });
                    }
                }
                (lo, hi)
            }
            (None, Some(obs)) => obs,
            (None, None) => (0, 0),
        };

        let n = names.len();
        let mut degree = vec![0u64; n];
        let mut act: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); n];
        for &(u, v, t) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
            act[u as usize].insert(t);
            act[v as usize].insert(t);
        }
        let node_act: Vec<Vec<i64>> = act.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut atn_off = Vec::with_capacity(n + 1);
        let mut total = 0u32;
        for a in &node_act {
            atn_off.push(total);
            total += a.len() as u32;
        }
        atn_off.push(total);
        let mut atn_node = Vec::with_capacity(total as usize);
        let mut atn_tick = Vec::with_capacity(total as usize);
        for (u, a) in node_act.iter().enumerate() {
            for &t in a {
                atn_node.push(u as u32);
                atn_tick.push(t);
            }
        }
        let mut stream = LinkStream {
            names,
            t_start,
            t_end,
            tick,
            edges,
            degree,
            node_act,
            atn_off,
            atn_node,
            atn_tick,
            adj: vec![Vec::new(); total as usize],
        };
        for i in 0..stream.edges.len() {
            let (u, v, t) = stream.edges[i];
            let a = stream.atn_raw(u, t).expect("endpoint is active");
            let b = stream.atn_raw(v, t).expect("endpoint is active");
            stream.adj[a as usize].push(b);
            stream.adj[b as usize].push(a);
        }
        for l in &mut stream.adj {
            l.sort_unstable();
        }
        Ok(stream)
    }

    /// Parses edge-list text rows into a normalized stream.
    ///
    /// Rows carry at least `(t, u, v)` fields in the configured order; extra
    /// fields are ignored. Lines that are empty or start with `#` are skipped.
    pub fn parse_edge_list<R: BufRead>(
        reader: R,
        options: &ParseOptions,
    ) -> Result<LinkStream, ParseError> {
        let mut rows: Vec<(usize, Ratio<i64>, String, String)> = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = match options.delimiter {
                None => trimmed.split_whitespace().collect(),
                Some(d) => trimmed.split(d).map(str::trim).collect(),
            };
            if fields.len() < 3 {
                return Err(ParseError::MalformedRow {
                    line: lineno,
                    reason: format!("expected at least 3 fields, found {}", fields.len()),
                });
            }
            let (t_str, u_str, v_str) = match options.columns {
                ColumnOrder::TimeFirst => (fields[0], fields[1], fields[2]),
                ColumnOrder::TimeLast => (fields[2], fields[0], fields[1]),
            };
            let ts = parse_timestamp(t_str).ok_or_else(|| ParseError::MalformedRow {
                line: lineno,
                reason: format!("invalid timestamp `{t_str}`"),
            })?;
            if u_str == v_str {
                return Err(ParseError::SelfLoop { line: lineno });
            }
            rows.push((lineno, ts, u_str.to_string(), v_str.to_string()));
        }
        if rows.is_empty() {
            return Err(ParseError::EmptyInput);
        }

        let timestamps: Vec<Ratio<i64>> = rows.iter().map(|r| r.1).collect();
        let (tick, anchor) = match options.tick {
            TickMode::Auto => {
                let tick = infer_tick(&timestamps).expect("rows is non-empty");
                let anchor = *timestamps.iter().min().expect("rows is non-empty");
                (tick, anchor)
            }
            TickMode::Declared(d) => {
                if d <= Ratio::zero() {
                    return Err(StreamError::NonPositiveTick.into());
                }
                (d, Ratio::zero())
            }
        };

        let mut names = BTreeSet::new();
        for (_, _, u, v) in &rows {
            names.insert(u.clone());
            names.insert(v.clone());
        }
        let names: Vec<String> = names.into_iter().collect();
        let index: BTreeMap<&str, u32> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();

        let mut set = BTreeSet::new();
        for (lineno, ts, u, v) in &rows {
            let q = (ts - anchor) / tick;
            if !q.is_integer() {
                return Err(ParseError::NonUniformTimestamp { line: *lineno });
            }
            let a = index[u.as_str()];
            let b = index[v.as_str()];
            set.insert((a.min(b), a.max(b), q.to_integer()));
        }
        Ok(Self::assemble(
            names,
            set.into_iter().collect(),
            options.horizon,
            tick,
        )?)
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.names
    }

    pub fn node_name(&self, u: NodeId) -> &str {
        &self.names[u.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| NodeId(i as u32))
    }

    /// Inclusive tick range `[t_start, t_end]`.
    pub fn horizon(&self) -> (i64, i64) {
        (self.t_start, self.t_end)
    }

    /// `|T| = t_end - t_start + 1`.
    pub fn horizon_len(&self) -> i64 {
        self.t_end - self.t_start + 1
    }

    pub fn tick_duration(&self) -> Ratio<i64> {
        self.tick
    }

    /// Total interaction count `m`.
    pub fn total_interactions(&self) -> u64 {
        self.edges.len() as u64
    }

    /// Degree `k_u`: total interactions node `u` takes part in.
    pub fn degree(&self, u: NodeId) -> u64 {
        self.degree[u.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, i64)> + '_ {
        self.edges
            .iter()
            .map(|&(u, v, t)| (NodeId(u), NodeId(v), t))
    }

    /// Sorted active ticks of node `u`.
    pub fn activity(&self, u: NodeId) -> &[i64] {
        &self.node_act[u.index()]
    }

    /// Number of active time nodes `|A|`.
    pub fn num_active(&self) -> usize {
        self.atn_node.len()
    }

    pub fn active(&self) -> impl Iterator<Item = ActiveTimeNode> + '_ {
        self.atn_node
            .iter()
            .zip(&self.atn_tick)
            .map(|(&u, &t)| ActiveTimeNode {
                node: NodeId(u),
                tick: t,
            })
    }

    pub fn is_active(&self, u: NodeId, tick: i64) -> bool {
        self.node_act[u.index()].binary_search(&tick).is_ok()
    }

    /// `L_{uv,T'}`: number of ticks in `ticks` at which `u` and `v` interact.
    pub fn interactions_between(
        &self,
        u: NodeId,
        v: NodeId,
        ticks: &BTreeSet<i64>,
    ) -> Result<u64, StreamError> {
        self.check_node(u)?;
        self.check_node(v)?;
        let (a, b) = (u.0.min(v.0), u.0.max(v.0));
        Ok(ticks
            .iter()
            .filter(|&&t| self.edges.binary_search(&(a, b, t)).is_ok())
            .count() as u64)
    }

    /// Same node's nearest active ticks strictly before and after `atn.tick`.
    pub fn temporal_neighbors(
        &self,
        atn: ActiveTimeNode,
    ) -> Result<TemporalNeighbors, StreamError> {
        let id = self.atn_id(atn)?;
        let u = self.atn_node[id as usize];
        let lo = self.atn_off[u as usize];
        let hi = self.atn_off[u as usize + 1];
        let previous = (id > lo).then(|| self.atn(id - 1));
        let next = (id + 1 < hi).then(|| self.atn(id + 1));
        Ok(TemporalNeighbors { previous, next })
    }

    /// All `(v, atn.tick)` such that `(atn.node, v, atn.tick)` is an edge.
    pub fn topological_neighbors(
        &self,
        atn: ActiveTimeNode,
    ) -> Result<Vec<ActiveTimeNode>, StreamError> {
        let id = self.atn_id(atn)?;
        Ok(self.adj[id as usize].iter().map(|&b| self.atn(b)).collect())
    }

    fn check_node(&self, u: NodeId) -> Result<(), StreamError> {
        if u.index() < self.names.len() {
            Ok(())
        } else {
            Err(StreamError::UnknownNode(format!("#{}", u.0)))
        }
    }

    // --- dense active-time-node indexing (crate-internal hot paths) ---

    pub(crate) fn atn_raw(&self, u: u32, tick: i64) -> Option<u32> {
        self.node_act[u as usize]
            .binary_search(&tick)
            .ok()
            .map(|p| self.atn_off[u as usize] + p as u32)
    }

    pub(crate) fn atn_id(&self, atn: ActiveTimeNode) -> Result<u32, StreamError> {
        self.check_node(atn.node)?;
        self.atn_raw(atn.node.0, atn.tick)
            .ok_or_else(|| StreamError::NotActive {
                node: self.node_name(atn.node).to_string(),
                tick: atn.tick,
            })
    }

    pub(crate) fn atn(&self, id: u32) -> ActiveTimeNode {
        ActiveTimeNode {
            node: NodeId(self.atn_node[id as usize]),
            tick: self.atn_tick[id as usize],
        }
    }

    pub(crate) fn atn_node_of(&self, id: u32) -> u32 {
        self.atn_node[id as usize]
    }

    pub(crate) fn atn_tick_of(&self, id: u32) -> i64 {
        self.atn_tick[id as usize]
    }

    pub(crate) fn atn_offsets(&self) -> &[u32] {
        &self.atn_off
    }

    pub(crate) fn adjacency(&self, id: u32) -> &[u32] {
        &self.adj[id as usize]
    }

    pub(crate) fn degree_raw(&self, u: u32) -> u64 {
        self.degree[u as usize]
    }

    pub(crate) fn node_activity_raw(&self, u: u32) -> &[i64] {
        &self.node_act[u as usize]
    }

    pub(crate) fn edge_triples(&self) -> &[(u32, u32, i64)] {
        &self.edges
    }
}

/// GCD of the gaps between successive distinct timestamps; 1 when fewer than
/// two distinct timestamps exist.
pub fn infer_tick(timestamps: &[Ratio<i64>]) -> Option<Ratio<i64>> {
    if timestamps.is_empty() {
        return None;
    }
    let mut distinct: Vec<Ratio<i64>> = timestamps.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Some(Ratio::one());
    }
    let mut acc: Option<Ratio<i64>> = None;
    for w in distinct.windows(2) {
        let gap = w[1] - w[0];
        acc = Some(match acc {
            None => gap,
            Some(g) => ratio_gcd(g, gap),
        });
    }
    acc
}

fn ratio_gcd(a: Ratio<i64>, b: Ratio<i64>) -> Ratio<i64> {
    // gcd(p/q, r/s) = gcd(p*s, r*q) / (q*s), reduced by Ratio::new.
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Ratio::new(num.abs(), a.denom() * b.denom())
}

/// Parses a plain integer or decimal timestamp into an exact rational.
fn parse_timestamp(s: &str) -> Option<Ratio<i64>> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    if body.is_empty() {
        return None;
    }
    match body.split_once('.') {
        None => body.parse::<i64>().ok().map(|v| Ratio::from(sign * v)),
        Some((int, frac)) => {
            if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
            let f: i64 = frac.parse().ok()?;
            let scale = 10i64.pow(frac.len() as u32);
            Some(Ratio::new(sign * (int * scale + f), scale))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str, options: &ParseOptions) -> Result<LinkStream, ParseError> {
        LinkStream::parse_edge_list(Cursor::new(text), options)
    }

    #[test]
    fn auto_tick_normalizes_to_gcd_grid() {
        let s = parse("0,a,b\n20,a,c\n", &ParseOptions {
            delimiter: Some(','),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.total_interactions(), 2);
        assert_eq!(s.tick_duration(), Ratio::from(20));
        assert_eq!(s.horizon(), (0, 1));
    }

    #[test]
    fn undirected_duplicates_collapse() {
        let s = parse("5 a b\n5 b a\n", &ParseOptions::default()).unwrap();
        assert_eq!(s.total_interactions(), 1);
        let a = s.node_id("a").unwrap();
        let b = s.node_id("b").unwrap();
        assert_eq!(s.horizon(), (0, 0));
        assert_eq!(
            s.interactions_between(a, b, &BTreeSet::from([0])).unwrap(),
            1
        );
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            parse("", &ParseOptions::default()),
            Err(ParseError::EmptyInput)
        ));
        assert!(matches!(
            parse("# only a comment\n\n", &ParseOptions::default()),
            Err(ParseError::EmptyInput)
        ));
    }

    #[test]
    fn self_loops_and_malformed_rows_are_rejected() {
        assert!(matches!(
            parse("3 a a\n", &ParseOptions::default()),
            Err(ParseError::SelfLoop { line: 1 })
        ));
        assert!(matches!(
            parse("3 a\n", &ParseOptions::default()),
            Err(ParseError::MalformedRow { line: 1, .. })
        ));
        assert!(matches!(
            parse("x a b\n", &ParseOptions::default()),
            Err(ParseError::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn declared_tick_requires_multiples() {
        let opts = ParseOptions {
            tick: TickMode::Declared(Ratio::from(20)),
            ..Default::default()
        };
        let s = parse("100 a b\n120 a c\n", &opts).unwrap();
        assert_eq!(s.horizon(), (5, 6));
        assert!(matches!(
            parse("100 a b\n130 a c\n", &opts),
            Err(ParseError::NonUniformTimestamp { line: 2 })
        ));
    }

    #[test]
    fn infer_tick_matches_gap_gcd() {
        let ts: Vec<Ratio<i64>> = [0, 20, 60].iter().map(|&v| Ratio::from(v)).collect();
        assert_eq!(infer_tick(&ts), Some(Ratio::from(20)));
        let ts: Vec<Ratio<i64>> = [0, 3, 7].iter().map(|&v| Ratio::from(v)).collect();
        assert_eq!(infer_tick(&ts), Some(Ratio::from(1)));
        assert_eq!(infer_tick(&[Ratio::from(5)]), Some(Ratio::from(1)));
        assert_eq!(infer_tick(&[]), None);
    }

    #[test]
    fn fractional_timestamps_stay_exact() {
        let s = parse("0.5 a b\n1.0 a c\n1.5 b c\n", &ParseOptions::default()).unwrap();
        assert_eq!(s.tick_duration(), Ratio::new(1, 2));
        assert_eq!(s.horizon(), (0, 2));
    }

    #[test]
    fn degree_sums_to_twice_interactions() {
        let s = parse("0 a b\n1 a c\n1 b c\n4 a b\n", &ParseOptions::default()).unwrap();
        let total: u64 = (0..s.num_nodes()).map(|i| s.degree(NodeId(i as u32))).sum();
        assert_eq!(total, 2 * s.total_interactions());
    }

    #[test]
    fn interactions_between_counts_requested_ticks() {
        let s = parse("1 a b\n2 a b\n3 a b\n", &ParseOptions::default()).unwrap();
        let a = s.node_id("a").unwrap();
        let b = s.node_id("b").unwrap();
        assert_eq!(
            s.interactions_between(a, b, &BTreeSet::from([2, 3, 9])).unwrap(),
            2
        );
        assert_eq!(
            s.interactions_between(a, b, &BTreeSet::from([4])).unwrap(),
            0
        );
    }

    #[test]
    fn temporal_neighbors_walk_activity() {
        let s = parse("2 u x\n5 u x\n9 u x\n", &ParseOptions::default()).unwrap();
        let u = s.node_id("u").unwrap();
        let at = |tick| ActiveTimeNode { node: u, tick };
        let n = s.temporal_neighbors(at(5)).unwrap();
        assert_eq!(n.previous, Some(at(2)));
        assert_eq!(n.next, Some(at(9)));
        let n = s.temporal_neighbors(at(2)).unwrap();
        assert_eq!(n.previous, None);
        assert_eq!(n.next, Some(at(5)));
        assert!(matches!(
            s.temporal_neighbors(at(3)),
            Err(StreamError::NotActive { .. })
        ));
    }

    #[test]
    fn topological_neighbors_list_same_tick_partners() {
        let s = parse("0 a b\n0 a c\n", &ParseOptions::default()).unwrap();
        let id = |n: &str| s.node_id(n).unwrap();
        let at = |n: &str, tick| ActiveTimeNode { node: id(n), tick };
        let mut nbrs = s.topological_neighbors(at("a", 0)).unwrap();
        nbrs.sort();
        assert_eq!(nbrs, vec![at("b", 0), at("c", 0)]);
        assert_eq!(s.topological_neighbors(at("b", 0)).unwrap(), vec![at("a", 0)]);
    }

    #[test]
    fn horizon_override_widens_but_cannot_cut() {
        let opts = ParseOptions {
            horizon: Some((-2, 10)),
            ..Default::default()
        };
        let s = parse("0 a b\n3 a b\n", &opts).unwrap();
        assert_eq!(s.horizon(), (-2, 10));
        assert_eq!(s.horizon_len(), 13);
        let opts = ParseOptions {
            horizon: Some((1, 10)),
            ..Default::default()
        };
        assert!(parse("0 a b\n3 a b\n", &opts).is_err());
    }

    #[test]
    fn single_instant_defaults_to_unit_tick() {
        let s = parse("7 a b\n7 c d\n", &ParseOptions::default()).unwrap();
        assert_eq!(s.tick_duration(), Ratio::one());
        assert_eq!(s.horizon(), (0, 0));
        assert_eq!(s.num_active(), 4);
    }
}
