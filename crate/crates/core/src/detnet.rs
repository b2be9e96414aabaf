//! The linear deterministic network model.
//!
//! Every node transmits a vector in GF(2)^q and receives
//! `y_j = sum_k S^(q - n_kj) x_k`, where `n_kj` is the integer gain of the
//! link from `k` to `j` and `q` is the largest gain in the network. A cut
//! splits the nodes into a side `omega` holding the source and its complement
//! holding the destination; its value is the rank of the transfer matrix from
//! the transmitters in `omega` to the receivers outside it. Capacity is the
//! smallest cut value.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::gf2::BitMatrix;
use crate::par::{map_range, Exec};
use crate::{Error, Result};

/// Largest number of relay nodes (nodes other than source and destination)
/// accepted by exhaustive cut enumeration.
pub const MAX_ENUM_RELAYS: usize = 22;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetNetwork {
    names: Vec<String>,
    source: NodeId,
    dest: NodeId,
    gains: BTreeMap<(NodeId, NodeId), u32>,
    q: u32,
}

impl DetNetwork {
    /// Builds a network from declared node names and `(from, to, gain)` edges.
    ///
    /// Zero-gain edges are accepted and dropped. Duplicate edges, self-loops
    /// and unknown node names are rejected.
    pub fn new<S: AsRef<str>>(
        nodes: &[S],
        source: &str,
        dest: &str,
        edges: &[(&str, &str, u32)],
    ) -> Result<Self> {
        let mut b = Builder::default();
        for n in nodes {
            b.node(n.as_ref())?;
        }
        b.source = Some(source.to_string());
        b.dest = Some(dest.to_string());
        for &(from, to, n) in edges {
            b.edge(from, to, n)?;
        }
        b.build()
    }

    /// `S -> D` with gain `n`.
    pub fn point_to_point(n: u32) -> Self {
        Self::new(&["S", "D"], "S", "D", &[("S", "D", n)]).expect("valid p2p network")
    }

    /// Source, relay and destination with a direct link.
    pub fn relay(n_sr: u32, n_sd: u32, n_rd: u32) -> Self {
        Self::new(
            &["S", "R", "D"],
            "S",
            "D",
            &[("S", "R", n_sr), ("S", "D", n_sd), ("R", "D", n_rd)],
        )
        .expect("valid relay network")
    }

    /// Two-relay diamond `S -> {A1, A2} -> D`.
    pub fn diamond(n_sa1: u32, n_sa2: u32, n_a1d: u32, n_a2d: u32) -> Self {
        Self::new(
            &["S", "A1", "A2", "D"],
            "S",
            "D",
            &[
                ("S", "A1", n_sa1),
                ("S", "A2", n_sa2),
                ("A1", "D", n_a1d),
                ("A2", "D", n_a2d),
            ],
        )
        .expect("valid diamond network")
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn dest(&self) -> NodeId {
        self.dest
    }

    /// Number of signal levels per node.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn gain(&self, from: NodeId, to: NodeId) -> u32 {
        self.gains.get(&(from, to)).copied().unwrap_or(0)
    }

    /// Positive-gain edges in `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u32)> + '_ {
        self.gains.iter().map(|(&(a, b), &n)| (a, b, n))
    }

    /// Returns a copy with one gain replaced (0 removes the edge).
    pub fn with_gain(&self, from: NodeId, to: NodeId, n: u32) -> Result<Self> {
        if from == to {
            return Err(Error::InvalidNetwork(format!(
                "self-loop at {}",
                self.names[from]
            )));
        }
        let mut gains = self.gains.clone();
        if n == 0 {
            gains.remove(&(from, to));
        } else {
            gains.insert((from, to), n);
        }
        let q = gains.values().copied().max().unwrap_or(1).max(1);
        Ok(Self {
            gains,
            q,
            ..self.clone()
        })
    }

    /// Nodes other than source and destination, in declaration order. Bit `i`
    /// of a cut mask refers to the `i`-th entry.
    pub fn relays(&self) -> Vec<NodeId> {
        (0..self.names.len())
            .filter(|&v| v != self.source && v != self.dest)
            .collect()
    }

    /// The channel transfer block from `from` to `to`: `S^(q - n)`.
    pub fn link_matrix(&self, from: NodeId, to: NodeId) -> BitMatrix {
        let q = self.q as usize;
        BitMatrix::shift(q, q - self.gain(from, to) as usize)
    }

    /// One channel use: the received vector at every node.
    ///
    /// Nodes missing from `transmits` send the zero vector.
    pub fn transfer_step(&self, transmits: &HashMap<NodeId, Vec<bool>>) -> Result<Vec<Vec<bool>>> {
        let q = self.q as usize;
        for (&k, x) in transmits {
            if k >= self.names.len() {
                return Err(Error::Domain(format!("unknown node id {k}")));
            }
            if x.len() != q {
                return Err(Error::Dimension(format!(
                    "node {} transmits {} levels, network has q = {q}",
                    self.names[k],
                    x.len()
                )));
            }
        }
        let mut received = vec![vec![false; q]; self.names.len()];
        for (&(k, j), &n) in &self.gains {
            let Some(x) = transmits.get(&k) else { continue };
            // S^(q-n) keeps the top n levels and moves them down by q-n
            let shift = q - n as usize;
            for level in 0..n as usize {
                received[j][level + shift] ^= x[level];
            }
        }
        Ok(received)
    }

    /// The cut with the given `omega` side.
    pub fn cut(&self, omega: &[NodeId]) -> Result<Cut> {
        let mut inside = vec![false; self.names.len()];
        for &v in omega {
            if v >= self.names.len() {
                return Err(Error::InvalidCut(format!("unknown node id {v}")));
            }
            inside[v] = true;
        }
        if !inside[self.source] {
            return Err(Error::InvalidCut("omega must contain the source".into()));
        }
        if inside[self.dest] {
            return Err(Error::InvalidCut(
                "omega must exclude the destination".into(),
            ));
        }
        let mask = self
            .relays()
            .iter()
            .enumerate()
            .filter(|(_, &v)| inside[v])
            .fold(0u64, |m, (i, _)| m | 1 << i);
        Ok(self.cut_from_membership(&inside, mask))
    }

    /// The cut whose relay membership is given by `mask`.
    pub fn cut_from_mask(&self, mask: u64) -> Result<Cut> {
        let relays = self.relays();
        if relays.len() < 64 && mask >> relays.len() != 0 {
            return Err(Error::InvalidCut(format!(
                "mask {mask:#b} names more than {} relays",
                relays.len()
            )));
        }
        let mut inside = vec![false; self.names.len()];
        inside[self.source] = true;
        for (i, &v) in relays.iter().enumerate() {
            inside[v] = mask >> i & 1 == 1;
        }
        Ok(self.cut_from_membership(&inside, mask))
    }

    fn cut_from_membership(&self, inside: &[bool], mask: u64) -> Cut {
        let (omega, omega_c): (Vec<NodeId>, Vec<NodeId>) =
            (0..self.names.len()).partition(|&v| inside[v]);
        let q = self.q as usize;
        let links: Vec<Vec<Option<BitMatrix>>> = omega_c
            .iter()
            .map(|&j| {
                omega
                    .iter()
                    .map(|&k| (self.gain(k, j) > 0).then(|| self.link_matrix(k, j)))
                    .collect()
            })
            .collect();
        let grid: Vec<Vec<Option<&BitMatrix>>> = links
            .iter()
            .map(|row| row.iter().map(Option::as_ref).collect())
            .collect();
        let matrix =
            BitMatrix::block_assemble(&grid, &vec![q; omega_c.len()], &vec![q; omega.len()])
                .expect("blocks are q x q");
        let value = matrix.rank();
        Cut {
            omega,
            omega_c,
            mask,
            matrix,
            value,
        }
    }

    fn check_enum_limit(&self) -> Result<usize> {
        let relays = self.names.len() - 2;
        if relays > MAX_ENUM_RELAYS {
            return Err(Error::TooLarge {
                relays,
                limit: MAX_ENUM_RELAYS,
            });
        }
        Ok(relays)
    }

    /// Every cut, ordered by relay membership mask.
    pub fn enumerate_cuts(&self) -> Result<Vec<Cut>> {
        self.enumerate_cuts_with(Exec::default())
    }

    pub fn enumerate_cuts_with(&self, exec: Exec) -> Result<Vec<Cut>> {
        let relays = self.check_enum_limit()?;
        Ok(map_range(exec, 1 << relays, |m| {
            self.cut_from_mask(m as u64).expect("mask within range")
        }))
    }

    /// Minimum cut value and the minimizing cut with the smallest mask.
    pub fn min_cut_capacity(&self) -> Result<(usize, Cut)> {
        self.min_cut_capacity_with(Exec::default())
    }

    pub fn min_cut_capacity_with(&self, exec: Exec) -> Result<(usize, Cut)> {
        let relays = self.check_enum_limit()?;
        // keep only the rank per mask so large enumerations stay small in memory
        let values = map_range(exec, 1 << relays, |m| {
            self.cut_from_mask(m as u64)
                .expect("mask within range")
                .value
        });
        let (mask, &value) = values
            .iter()
            .enumerate()
            .min_by_key(|&(m, &v)| (v, m))
            .expect("at least one cut");
        Ok((value, self.cut_from_mask(mask as u64)?))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.names {
            s.push_str(&format!("node {n}\n"));
        }
        s.push_str(&format!("source {}\n", self.names[self.source]));
        s.push_str(&format!("dest {}\n", self.names[self.dest]));
        for (&(a, b), &n) in &self.gains {
            s.push_str(&format!("edge {} {} {n}\n", self.names[a], self.names[b]));
        }
        s
    }
}

/// Parses the line-oriented network description:
///
/// ```text
/// # comment
/// node S
/// node D
/// source S
/// dest D
/// edge S D 4
/// ```
impl FromStr for DetNetwork {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut b = Builder::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["node", id] => {
                    if !is_identifier(id) {
                        return Err(err(format!("invalid node id `{id}`")));
                    }
                    b.node(id).map_err(|e| err(e.to_string()))?;
                }
                ["source", id] => {
                    b.require(id).map_err(|e| err(e.to_string()))?;
                    if b.source.replace(id.to_string()).is_some() {
                        return Err(err("source declared twice".into()));
                    }
                }
                ["dest", id] => {
                    b.require(id).map_err(|e| err(e.to_string()))?;
                    if b.dest.replace(id.to_string()).is_some() {
                        return Err(err("dest declared twice".into()));
                    }
                }
                ["edge", from, to, n] => {
                    let n: u32 = n
                        .parse()
                        .map_err(|_| err(format!("gain `{n}` is not a nonnegative integer")))?;
                    b.edge(from, to, n).map_err(|e| err(e.to_string()))?;
                }
                [kw, ..] if ["node", "source", "dest", "edge"].contains(kw) => {
                    return Err(err(format!("wrong number of fields for `{kw}`")));
                }
                [kw, ..] => return Err(err(format!("unknown directive `{kw}`"))),
                [] => unreachable!(),
            }
        }
        b.build().map_err(|e| match e {
            Error::InvalidNetwork(message) => Error::Parse {
                line: text.lines().count(),
                message,
            },
            other => other,
        })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    source: Option<String>,
    dest: Option<String>,
    gains: BTreeMap<(NodeId, NodeId), u32>,
    seen: std::collections::HashSet<(NodeId, NodeId)>,
}

impl Builder {
    fn node(&mut self, name: &str) -> Result<()> {
        if self.index.contains_key(name) {
            return Err(Error::InvalidNetwork(format!(
                "node `{name}` declared twice"
            )));
        }
        self.index.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        Ok(())
    }

    fn require(&self, name: &str) -> Result<NodeId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidNetwork(format!("undeclared node `{name}`")))
    }

    fn edge(&mut self, from: &str, to: &str, n: u32) -> Result<()> {
        let a = self.require(from)?;
        let b = self.require(to)?;
        if a == b {
            return Err(Error::InvalidNetwork(format!("self-loop at `{from}`")));
        }
        if !self.seen.insert((a, b)) {
            return Err(Error::InvalidNetwork(format!(
                "duplicate edge `{from}` -> `{to}`"
            )));
        }
        if n > 0 {
            self.gains.insert((a, b), n);
        }
        Ok(())
    }

    fn build(self) -> Result<DetNetwork> {
        let source = self
            .source
            .ok_or_else(|| Error::InvalidNetwork("no source declared".into()))?;
        let dest = self
            .dest
            .ok_or_else(|| Error::InvalidNetwork("no dest declared".into()))?;
        let source = *self
            .index
            .get(&source)
            .ok_or_else(|| Error::InvalidNetwork(format!("undeclared node `{source}`")))?;
        let dest = *self
            .index
            .get(&dest)
            .ok_or_else(|| Error::InvalidNetwork(format!("undeclared node `{dest}`")))?;
        if source == dest {
            return Err(Error::InvalidNetwork("source and dest must differ".into()));
        }
        let q = self.gains.values().copied().max().unwrap_or(1).max(1);
        Ok(DetNetwork {
            names: self.names,
            source,
            dest,
            gains: self.gains,
            q,
        })
    }
}

/// A source/destination bipartition with its transfer matrix and rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub omega: Vec<NodeId>,
    pub omega_c: Vec<NodeId>,
    /// Relay membership bitmask, bit `i` for the `i`-th relay.
    pub mask: u64,
    /// Receivers in `omega_c` by rows, transmitters in `omega` by columns,
    /// `q` levels per node, both in declaration order.
    pub matrix: BitMatrix,
    pub value: usize,
}

impl Cut {
    /// Renders the cut as `{S,A1}|{A2,D}`.
    pub fn display<'a>(&'a self, net: &'a DetNetwork) -> impl fmt::Display + 'a {
        CutDisplay { cut: self, net }
    }
}

struct CutDisplay<'a> {
    cut: &'a Cut,
    net: &'a DetNetwork,
}

impl fmt::Display for CutDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ids: &[NodeId]| {
            ids.iter()
                .map(|&v| self.net.name(v))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "{{{}}}|{{{}}}",
            join(&self.cut.omega),
            join(&self.cut.omega_c)
        )
    }
}
