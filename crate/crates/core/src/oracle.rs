use crate::graph::EdgeId;
use crate::sign::Sign;

/// Source of edge labels. A learner only ever sees the labels it asks for.
pub trait LabelOracle {
    fn reveal(&mut self, edge: EdgeId) -> Sign;

    /// Number of distinct edges revealed so far.
    fn revealed_count(&self) -> usize;
}

/// Oracle over a hidden label vector that counts distinct reveals.
#[derive(Debug, Clone)]
pub struct CountingOracle<'a> {
    labels: &'a [Sign],
    revealed: Vec<bool>,
    distinct: usize,
    calls: usize,
}

impl<'a> CountingOracle<'a> {
    pub fn new(labels: &'a [Sign]) -> CountingOracle<'a> {
        CountingOracle {
            labels,
            revealed: vec![false; labels.len()],
            distinct: 0,
            calls: 0,
        }
    }

    /// Total calls, repeats included.
    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn was_revealed(&self, edge: EdgeId) -> bool {
        self.revealed[edge]
    }
}

impl LabelOracle for CountingOracle<'_> {
    fn reveal(&mut self, edge: EdgeId) -> Sign {
        self.calls += 1;
        if !self.revealed[edge] {
            self.revealed[edge] = true;
            self.distinct += 1;
        }
        self.labels[edge]
    }

    fn revealed_count(&self) -> usize {
        self.distinct
    }
}

impl<O: LabelOracle + ?Sized> LabelOracle for &mut O {
    fn reveal(&mut self, edge: EdgeId) -> Sign {
        (**self).reveal(edge)
    }

    fn revealed_count(&self) -> usize {
        (**self).revealed_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_distinct_reveals() {
        let labels = [Sign::Positive, Sign::Negative];
        let mut oracle = CountingOracle::new(&labels);
        assert_eq!(oracle.reveal(1), Sign::Negative);
        assert_eq!(oracle.reveal(1), Sign::Negative);
        assert_eq!(oracle.revealed_count(), 1);
        assert_eq!(oracle.calls(), 2);
        assert!(!oracle.was_revealed(0));
    }
}
