//! Treatment assignment: Bernoulli, cluster-based and the two-stage mixed
//! design.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// One realized assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Per-cluster arm: true for the cluster arm. Empty for Bernoulli draws.
    pub w: Vec<bool>,
    /// Per-unit arm, `w_tilde[i] = w[c(i)]`.
    pub w_tilde: Vec<bool>,
    pub z: Vec<bool>,
    pub p: f64,
    pub seed: u64,
}

/// On-disk form: `{"W": [0|1, ...], "z": [0|1, ...], "p": x, "seed": s}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentRecord {
    #[serde(rename = "W")]
    pub w: Vec<u8>,
    pub z: Vec<u8>,
    pub p: f64,
    pub seed: u64,
}

impl Assignment {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn to_record(&self) -> AssignmentRecord {
        AssignmentRecord {
            w: self.w.iter().map(|&b| b as u8).collect(),
            z: self.z.iter().map(|&b| b as u8).collect(),
            p: self.p,
            seed: self.seed,
        }
    }

    /// Rebuilds an assignment, deriving `w_tilde` from the clustering
    /// (absent for Bernoulli records with empty `W`).
    pub fn from_record(record: &AssignmentRecord, clustering: Option<&Clustering>) -> Result<Self> {
        let bit = |v: u8| match v {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::invalid(format!("indicator must be 0 or 1, got {other}"))),
        };
        let w: Vec<bool> = record.w.iter().map(|&v| bit(v)).collect::<Result<_>>()?;
        let z: Vec<bool> = record.z.iter().map(|&v| bit(v)).collect::<Result<_>>()?;
        if !(0.0..=1.0).contains(&record.p) {
            return Err(Error::invalid(format!("p must lie in [0, 1], got {}", record.p)));
        }
        let w_tilde = match clustering {
            _ if w.is_empty() => vec![false; z.len()],
            None => return Err(Error::invalid("an assignment with cluster arms needs its clustering")),
            Some(c) => {
                if c.len() != w.len() || c.n() != z.len() {
                    return Err(Error::LengthMismatch {
                        what: "assignment versus clustering",
                        expected: c.len(),
                        actual: w.len(),
                    });
                }
                (0..z.len()).map(|i| w[c.cluster_of(i)]).collect()
            }
        };
        Ok(Self {
            w,
            w_tilde,
            z,
            p: record.p,
            seed: record.seed,
        })
    }
}

/// Source of the coins consumed by the samplers.
pub trait CoinSource {
    /// Stage-one arm for `cluster`, probability 1/2.
    fn arm(&mut self, cluster: usize) -> bool;
    fn cluster_coin(&mut self, cluster: usize, p: f64) -> bool;
    fn unit_coin(&mut self, unit: usize, p: f64) -> bool;
}

/// Coins from three independent ChaCha streams derived from one seed.
pub struct StreamCoins {
    arms: ChaCha8Rng,
    clusters: ChaCha8Rng,
    units: ChaCha8Rng,
}

impl StreamCoins {
    pub fn new(seed: u64) -> Self {
        Self {
            arms: stream_rng(seed, 0, Stream::Arms),
            clusters: stream_rng(seed, 0, Stream::ClusterCoins),
            units: stream_rng(seed, 0, Stream::UnitCoins),
        }
    }
}

impl CoinSource for StreamCoins {
    fn arm(&mut self, _cluster: usize) -> bool {
        self.arms.random::<bool>()
    }

    fn cluster_coin(&mut self, _cluster: usize, p: f64) -> bool {
        self.clusters.random::<f64>() < p
    }

    fn unit_coin(&mut self, _unit: usize, p: f64) -> bool {
        self.units.random::<f64>() < p
    }
}

pub(crate) fn check_open_probability(p: f64) -> Result<()> {
    crate::bounds::check_probability(p)
}

/// Independent Bernoulli(`p`) treatment for each of `n` units.
pub fn assign_bernoulli(n: usize, p: f64, seed: u64) -> Result<Assignment> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
    }
    let mut coins = StreamCoins::new(seed);
    Ok(Assignment {
        w: Vec::new(),
        w_tilde: vec![false; n],
        z: (0..n).map(|i| coins.unit_coin(i, p)).collect(),
        p,
        seed,
    })
}

/// One Bernoulli(`p`) coin per cluster, shared by its members.
pub fn assign_cluster_based(clustering: &Clustering, p: f64, seed: u64) -> Result<Assignment> {
    check_open_probability(p)?;
    let mut coins = StreamCoins::new(seed);
    let treated: Vec<bool> = (0..clustering.len()).map(|k| coins.cluster_coin(k, p)).collect();
    Ok(Assignment {
        w: vec![true; clustering.len()],
        w_tilde: vec![true; clustering.n()],
        z: (0..clustering.n()).map(|i| treated[clustering.cluster_of(i)]).collect(),
        p,
        seed,
    })
}

/// The two-stage mixed design.
pub fn assign_mixed(clustering: &Clustering, p: f64, seed: u64) -> Result<Assignment> {
    check_open_probability(p)?;
    let mut assignment = assign_mixed_with(clustering, p, &mut StreamCoins::new(seed));
    assignment.seed = seed;
    Ok(assignment)
}

/// Mixed design driven by an arbitrary coin source. All arm coins, then all
/// cluster coins, then all unit coins are requested in index order, whether
/// or not a given coin ends up used.
pub fn assign_mixed_with(clustering: &Clustering, p: f64, coins: &mut impl CoinSource) -> Assignment {
    let m = clustering.len();
    let w: Vec<bool> = (0..m).map(|k| coins.arm(k)).collect();
    let shared: Vec<bool> = (0..m).map(|k| coins.cluster_coin(k, p)).collect();
    let own: Vec<bool> = (0..clustering.n()).map(|i| coins.unit_coin(i, p)).collect();
    let w_tilde: Vec<bool> = (0..clustering.n()).map(|i| w[clustering.cluster_of(i)]).collect();
    let z = (0..clustering.n())
        .map(|i| {
            if w_tilde[i] {
                shared[clustering.cluster_of(i)]
            } else {
                own[i]
            }
        })
        .collect();
    Assignment {
        w,
        w_tilde,
        z,
        p,
        seed: 0,
    }
}
