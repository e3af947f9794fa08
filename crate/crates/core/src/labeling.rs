//! Ground-truth labels: planted two-clusterings, the sign assignment they
//! induce, and random perturbations of it.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, SignedGraph};
use crate::sign::Sign;

/// Bipartition of the nodes. Either side may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoClustering {
    pub side: Vec<bool>,
}

impl TwoClustering {
    pub fn single(node_count: usize) -> TwoClustering {
        TwoClustering {
            side: vec![false; node_count],
        }
    }

    /// Each node picks a side by a fair coin.
    pub fn uniform<R: Rng + ?Sized>(node_count: usize, rng: &mut R) -> TwoClustering {
        TwoClustering {
            side: (0..node_count).map(|_| rng.gen_bool(0.5)).collect(),
        }
    }

    /// Exactly `round(ratio * n)` randomly chosen nodes go to the first
    /// cluster, the rest to the second.
    pub fn with_split<R: Rng + ?Sized>(
        node_count: usize,
        ratio: f64,
        rng: &mut R,
    ) -> Result<TwoClustering> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::InvalidParameter(format!(
                "cluster split {ratio} outside [0, 1]"
            )));
        }
        let first = (ratio * node_count as f64).round() as usize;
        let mut nodes: Vec<usize> = (0..node_count).collect();
        nodes.shuffle(rng);
        let mut side = vec![true; node_count];
        for &v in &nodes[..first] {
            side[v] = false;
        }
        Ok(TwoClustering { side })
    }

    pub fn node_count(&self) -> usize {
        self.side.len()
    }

    /// `+1` when both endpoints share a cluster.
    pub fn edge_sign(&self, u: usize, v: usize) -> Sign {
        Sign::from_agreement(self.side[u] == self.side[v])
    }
}

/// How labels are perturbed away from the consistent assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FlipMode {
    /// Each edge flips independently with probability `p`.
    #[default]
    Iid,
    /// `floor(2p|E|)` edges drawn without replacement get a fresh uniform
    /// sign, so each edge ends up flipped with probability at most `p`.
    #[serde(rename = "fact1")]
    SubsetResign,
}

impl FlipMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FlipMode::Iid => "iid",
            FlipMode::SubsetResign => "fact1",
        }
    }
}

impl std::str::FromStr for FlipMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<FlipMode> {
        match s {
            "iid" => Ok(FlipMode::Iid),
            "fact1" => Ok(FlipMode::SubsetResign),
            other => Err(Error::InvalidParameter(format!("unknown flip mode `{other}`"))),
        }
    }
}

/// Realized edge labels with the record of which ones were flipped away from
/// the base labels.
///
/// Invariant: `realized[e] == base[e]` exactly when `!flipped[e]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelAssignment {
    /// Present when the base labels come from a planted clustering.
    pub clustering: Option<TwoClustering>,
    pub base: Vec<Sign>,
    pub realized: Vec<Sign>,
    pub flipped: Vec<bool>,
    pub p: f64,
    pub mode: Option<FlipMode>,
    /// Edges whose label was re-drawn. Equals the flip count in iid mode.
    pub redrawn: usize,
}

/// Metadata written next to a realized edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub p: f64,
    pub mode: Option<FlipMode>,
    pub seed: Option<u64>,
    pub flipped_count: usize,
}

/// Within-cluster edges positive, between-cluster edges negative.
pub fn consistent_labels(g: &Graph, clustering: &TwoClustering) -> Result<LabelAssignment> {
    if clustering.node_count() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: g.node_count(),
            right: clustering.node_count(),
        });
    }
    let base: Vec<Sign> = g
        .edges()
        .iter()
        .map(|&(u, v)| clustering.edge_sign(u, v))
        .collect();
    let mut labels = LabelAssignment::unperturbed(base);
    labels.clustering = Some(clustering.clone());
    Ok(labels)
}

/// Draws a p-stochastic assignment from the base labels of `base`. Any flips
/// already recorded in `base` are discarded.
pub fn p_stochastic_flip<R: Rng + ?Sized>(
    base: &LabelAssignment,
    p: f64,
    mode: FlipMode,
    rng: &mut R,
) -> Result<LabelAssignment> {
    check_probability(p)?;
    let m = base.base.len();
    let mut realized = base.base.clone();
    let mut flipped = vec![false; m];
    let redrawn = match mode {
        FlipMode::Iid => {
            for e in 0..m {
                if rng.gen_bool(p) {
                    realized[e] = -realized[e];
                    flipped[e] = true;
                }
            }
            flipped.iter().filter(|&&f| f).count()
        }
        FlipMode::SubsetResign => {
            let count = subset_size(p, m);
            for e in index::sample(rng, m, count) {
                let sign = Sign::from_agreement(rng.gen_bool(0.5));
                realized[e] = sign;
                flipped[e] = sign != base.base[e];
            }
            count
        }
    };
    Ok(LabelAssignment {
        clustering: base.clustering.clone(),
        base: base.base.clone(),
        realized,
        flipped,
        p,
        mode: Some(mode),
        redrawn,
    })
}

/// Size of the re-drawn subset in [`FlipMode::SubsetResign`]:
/// `floor(2 p |E|)`.
pub fn subset_size(p: f64, edge_count: usize) -> usize {
    ((2.0 * p * edge_count as f64).floor() as usize).min(edge_count)
}

/// Expected-mistake floor `p * |test|` that no learner can beat on a
/// p-stochastic assignment.
pub fn lower_bound_mistakes(p: f64, test_count: usize) -> f64 {
    p * test_count as f64
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "flip probability {p} outside [0, 1/2)"
        )))
    }
}

impl LabelAssignment {
    /// Labels taken as-is, nothing flipped.
    pub fn unperturbed(base: Vec<Sign>) -> LabelAssignment {
        let m = base.len();
        LabelAssignment {
            clustering: None,
            realized: base.clone(),
            base,
            flipped: vec![false; m],
            p: 0.0,
            mode: None,
            redrawn: 0,
        }
    }

    pub fn flipped_count(&self) -> usize {
        self.flipped.iter().filter(|&&f| f).count()
    }

    pub fn sidecar(&self, seed: Option<u64>) -> LabelSidecar {
        LabelSidecar {
            p: self.p,
            mode: self.mode,
            seed,
            flipped_count: self.flipped_count(),
        }
    }

    /// The graph carrying the realized labels.
    pub fn realize(&self, g: &Graph) -> Result<SignedGraph> {
        SignedGraph::new(g.clone(), self.realized.clone())
    }
}
