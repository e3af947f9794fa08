use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{graph_diameter, SignedGraph};
use crate::sign::Sign;

/// Which class the F-measure treats as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositiveClass {
    /// The rarer class in the truth sequence; `-1` on ties.
    #[default]
    Minority,
    Negative,
    Positive,
}

impl PositiveClass {
    pub fn resolve(self, truth: &[Sign]) -> Sign {
        match self {
            PositiveClass::Negative => Sign::Negative,
            PositiveClass::Positive => Sign::Positive,
            PositiveClass::Minority => {
                let neg = truth.iter().filter(|s| s.is_negative()).count();
                if neg * 2 <= truth.len() {
                    Sign::Negative
                } else {
                    Sign::Positive
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PositiveClass::Minority => "minority",
            PositiveClass::Negative => "negative",
            PositiveClass::Positive => "positive",
        }
    }
}

impl FromStr for PositiveClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<PositiveClass> {
        match s {
            "minority" => Ok(PositiveClass::Minority),
            "negative" | "-1" => Ok(PositiveClass::Negative),
            "positive" | "+1" | "1" => Ok(PositiveClass::Positive),
            _ => Err(Error::InvalidParameter(format!("unknown positive class `{s}`"))),
        }
    }
}

/// Harmonic mean of precision and recall for `positive_class`.
///
/// 0 when precision + recall is 0. When the class occurs in neither sequence
/// there is nothing to get wrong and the result is 1.
pub fn f_measure(predicted: &[Sign], truth: &[Sign], positive_class: Sign) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("F-measure of an empty sequence".into()));
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p == positive_class, t == positive_class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp + fn_ == 0 {
        return Ok(1.0);
    }
    // 2PR / (P + R) simplifies to 2tp / (2tp + fp + fn).
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

/// Summary statistics of a signed graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub negative_fraction: f64,
    /// `|V| / |E|`.
    pub node_edge_ratio: f64,
    /// `2|E| / |V|`.
    pub average_degree: f64,
    pub diameter: Option<usize>,
}

/// Table statistics; the diameter is computed only when asked for, and only
/// for connected graphs.
pub fn stats(g: &SignedGraph, with_diameter: bool) -> GraphStats {
    let n = g.node_count();
    let m = g.edge_count();
    let diameter = if with_diameter {
        graph_diameter(g.graph()).ok()
    } else {
        None
    };
    GraphStats {
        nodes: n,
        edges: m,
        negative_fraction: if m == 0 {
            0.0
        } else {
            g.negative_count() as f64 / m as f64
        },
        node_edge_ratio: if m == 0 { 0.0 } else { n as f64 / m as f64 },
        average_degree: if n == 0 { 0.0 } else { 2.0 * m as f64 / n as f64 },
        diameter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use Sign::{Negative as N, Positive as P};

    #[test]
    fn perfect_prediction() {
        let t = [N, P, P, N, P];
        assert_eq!(f_measure(&t, &t, N).unwrap(), 1.0);
        assert_eq!(f_measure(&t, &t, P).unwrap(), 1.0);
    }

    #[test]
    fn half_recall() {
        let truth = [N, N, P, P];
        let pred = [N, P, P, P];
        assert!((f_measure(&pred, &truth, N).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_positive_predictor_scores_zero() {
        let truth: Vec<Sign> = (0..10).map(|i| if i < 2 { N } else { P }).collect();
        let pred = vec![P; 10];
        assert_eq!(f_measure(&pred, &truth, N).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            f_measure(&[N], &[N, P], N),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(f_measure(&[], &[], N).is_err());
    }

    #[test]
    fn against_precision_recall_definition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let len = rng.gen_range(1..30);
            let draw = |r: &mut rand_chacha::ChaCha8Rng| {
                (0..len)
                    .map(|_| Sign::from_agreement(r.gen_bool(0.5)))
                    .collect::<Vec<_>>()
            };
            let truth = draw(&mut rng);
            let pred = draw(&mut rng);
            let hits = pred.iter().zip(&truth).filter(|(p, t)| **p == N && **t == N).count() as f64;
            let predicted = pred.iter().filter(|p| **p == N).count() as f64;
            let actual = truth.iter().filter(|t| **t == N).count() as f64;
            let f = f_measure(&pred, &truth, N).unwrap();
            if predicted == 0.0 && actual == 0.0 {
                assert_eq!(f, 1.0);
                continue;
            }
            let precision = if predicted > 0.0 { hits / predicted } else { 0.0 };
            let recall = if actual > 0.0 { hits / actual } else { 0.0 };
            let expected = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            assert!((f - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn minority_class() {
        assert_eq!(PositiveClass::Minority.resolve(&[P, P, N]), N);
        assert_eq!(PositiveClass::Minority.resolve(&[N, N, P]), P);
        assert_eq!(PositiveClass::Minority.resolve(&[N, P]), N);
    }

    #[test]
    fn k4_and_path_stats() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let signs = vec![P, N, N, N, N, P];
        let s = stats(&SignedGraph::new(k4, signs).unwrap(), true);
        assert_eq!(s.average_degree, 3.0);
        assert!((s.negative_fraction - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.diameter, Some(1));

        let path = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let s = stats(&SignedGraph::new(path, vec![P; 4]).unwrap(), true);
        assert_eq!(s.diameter, Some(4));
        assert_eq!(s.node_edge_ratio, 1.25);
    }
}
