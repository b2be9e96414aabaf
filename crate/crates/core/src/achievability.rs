//! Random linear coding on layered deterministic networks.
//!
//! Over a block of `K` channel uses the source sends an arbitrary vector of
//! `K q` bits and every relay multiplies its stacked `K q` received bits by
//! a uniformly random square matrix. The destination then sees a linear
//! function of the source block; its rank is the number of bits per block
//! the scheme delivers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detnet::{DetNetwork, NodeId};
use crate::gf2::BitMatrix;
use crate::par::{map_range, Exec};
use crate::{Error, Result};

/// Nodes grouped by hop distance from the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSchedule {
    pub layers: Vec<Vec<NodeId>>,
}

impl LayeredSchedule {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }
}

/// Splits the network into layers by longest-path depth from the source.
///
/// Every positive-gain edge has to go from one layer to the next, every node
/// must be reachable from the source, and the destination has to be alone in
/// the deepest layer. On a layered network this coincides with breadth-first
/// depth; using the longest path makes a shortcut show up as the edge that
/// skips layers.
pub fn validate_layered(net: &DetNetwork) -> Result<LayeredSchedule> {
    let n = net.node_count();
    let not_layered = |edge: Option<(NodeId, NodeId)>, reason: String| Error::NotLayered {
        edge: edge.map(|(a, b)| (net.name(a).to_string(), net.name(b).to_string())),
        reason,
    };

    let mut reachable = vec![false; n];
    reachable[net.source()] = true;
    let mut stack = vec![net.source()];
    while let Some(v) = stack.pop() {
        for (from, to, _) in net.edges() {
            if from == v && !reachable[to] {
                reachable[to] = true;
                stack.push(to);
            }
        }
    }
    if !reachable[net.dest()] {
        return Err(not_layered(
            None,
            format!(
                "destination {} is unreachable from the source",
                net.name(net.dest())
            ),
        ));
    }
    if let Some(v) = (0..n).find(|&v| !reachable[v]) {
        return Err(not_layered(
            None,
            format!("node {} is unreachable from the source", net.name(v)),
        ));
    }

    // Kahn's algorithm, relaxing longest-path depths in topological order
    let mut indegree = vec![0usize; n];
    for (_, to, _) in net.edges() {
        indegree[to] += 1;
    }
    let mut depth = vec![0usize; n];
    let mut ready: Vec<NodeId> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut done = vec![false; n];
    while let Some(v) = ready.pop() {
        done[v] = true;
        for (from, to, _) in net.edges() {
            if from == v {
                depth[to] = depth[to].max(depth[v] + 1);
                indegree[to] -= 1;
                if indegree[to] == 0 {
                    ready.push(to);
                }
            }
        }
    }
    if let Some((a, b, _)) = net.edges().find(|&(a, b, _)| !done[a] && !done[b]) {
        return Err(not_layered(
            Some((a, b)),
            format!("edge {} -> {} lies on a cycle", net.name(a), net.name(b)),
        ));
    }

    for (from, to, _) in net.edges() {
        if depth[to] != depth[from] + 1 {
            return Err(not_layered(
                Some((from, to)),
                format!(
                    "edge {} -> {} skips from layer {} to layer {}",
                    net.name(from),
                    net.name(to),
                    depth[from],
                    depth[to]
                ),
            ));
        }
    }
    let last = depth[net.dest()];
    if let Some(v) = (0..n).find(|&v| v != net.dest() && depth[v] >= last) {
        return Err(not_layered(
            None,
            format!("node {} is not before the destination layer", net.name(v)),
        ));
    }
    let mut layers = vec![Vec::new(); last + 1];
    for v in 0..n {
        layers[depth[v]].push(v);
    }
    Ok(LayeredSchedule { layers })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingTrial {
    pub block_length: usize,
    pub seed: u64,
    /// Relay encoders in node-declaration order.
    pub encoders: Vec<(NodeId, BitMatrix)>,
    /// Source block to destination block.
    pub end_to_end: BitMatrix,
    pub achieved_rank: usize,
}

impl CodingTrial {
    pub fn rate(&self) -> f64 {
        self.achieved_rank as f64 / self.block_length as f64
    }
}

/// One random coding trial over `block_length` channel uses.
///
/// Encoders are drawn from a single ChaCha8 stream seeded with `seed`, one
/// `Kq x Kq` matrix per relay in declaration order. The stacked block is
/// use-major: levels of use 0, then use 1, and so on.
pub fn run_trial(
    net: &DetNetwork,
    sched: &LayeredSchedule,
    block_length: usize,
    seed: u64,
) -> Result<CodingTrial> {
    if block_length == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    let q = net.q() as usize;
    let width = block_length * q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut encoders: Vec<(NodeId, BitMatrix)> = net
        .relays()
        .into_iter()
        .map(|v| (v, BitMatrix::random_from(width, width, &mut rng)))
        .collect();

    // transmit[v]: map from the source block to v's transmitted block
    let mut transmit: Vec<Option<BitMatrix>> = vec![None; net.node_count()];
    transmit[net.source()] = Some(BitMatrix::identity(width));
    let mut end_to_end = BitMatrix::zeros(width, width);
    for pair in sched.layers.windows(2) {
        let (senders, receivers) = (&pair[0], &pair[1]);
        for &j in receivers {
            let mut received = BitMatrix::zeros(width, width);
            for &k in senders {
                if net.gain(k, j) == 0 {
                    continue;
                }
                let x = transmit[k].as_ref().expect("earlier layer assigned");
                let channel = net.link_matrix(k, j).block_diagonal_repeat(block_length);
                received.add_assign(&channel.mul(x)?)?;
            }
            if j == net.dest() {
                end_to_end = received;
            } else {
                let enc = &encoders
                    .iter()
                    .find(|(v, _)| *v == j)
                    .expect("relay encoder")
                    .1;
                transmit[j] = Some(enc.mul(&received)?);
            }
        }
    }
    encoders.sort_by_key(|(v, _)| *v);
    let achieved_rank = end_to_end.rank();
    Ok(CodingTrial {
        block_length,
        seed,
        encoders,
        end_to_end,
        achieved_rank,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub best_rate: f64,
    pub mean_rate: f64,
}

/// Best and mean rate over seeds `seed0 .. seed0 + trials`.
pub fn estimate_rate(
    net: &DetNetwork,
    sched: &LayeredSchedule,
    block_length: usize,
    trials: usize,
    seed0: u64,
) -> Result<RateEstimate> {
    estimate_rate_with(Exec::default(), net, sched, block_length, trials, seed0)
}

pub fn estimate_rate_with(
    exec: Exec,
    net: &DetNetwork,
    sched: &LayeredSchedule,
    block_length: usize,
    trials: usize,
    seed0: u64,
) -> Result<RateEstimate> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let ranks = map_range(exec, trials, |i| {
        run_trial(net, sched, block_length, seed0.wrapping_add(i as u64)).map(|t| t.achieved_rank)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let k = block_length as f64;
    Ok(RateEstimate {
        best_rate: *ranks.iter().max().expect("nonempty") as f64 / k,
        mean_rate: ranks.iter().sum::<usize>() as f64 / (k * trials as f64),
    })
}
