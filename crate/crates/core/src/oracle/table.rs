//! Dense probability tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::OracleError;

/// Values for a set of variables, keyed by name.
pub type Assignment = BTreeMap<String, usize>;

/// Calls `f` on every configuration of variables with cardinalities `cards`,
/// last variable fastest.
pub fn for_each_config(cards: &[usize], mut f: impl FnMut(&[usize])) {
    let mut config = vec![0; cards.len()];
    if cards.contains(&0) {
        return;
    }
    loop {
        f(&config);
        let mut i = cards.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            config[i] += 1;
            if config[i] < cards[i] {
                break;
            }
            config[i] = 0;
        }
    }
}

/// A dense table over the product space of its variables, laid out with the
/// last variable varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    variables: Vec<String>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl ProbTable {
    pub fn new(
        variables: Vec<String>,
        cards: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, OracleError> {
        if variables.len() != cards.len() || values.len() != cards.iter().product::<usize>() {
            return Err(OracleError::ShapeMismatch);
        }
        Ok(ProbTable {
            variables,
            cards,
            values,
        })
    }

    pub fn zeros(variables: Vec<String>, cards: Vec<usize>) -> Self {
        let size = cards.iter().product();
        ProbTable {
            variables,
            cards,
            values: vec![0.0; size],
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cardinality(&self, name: &str) -> Option<usize> {
        self.position(name).map(|i| self.cards[i])
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Flat offset of a configuration given in variable order.
    pub fn offset(&self, config: &[usize]) -> usize {
        config
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&v, &c)| acc * c + v)
    }

    pub fn at(&self, config: &[usize]) -> f64 {
        self.values[self.offset(config)]
    }

    pub(crate) fn add(&mut self, config: &[usize], p: f64) {
        let i = self.offset(config);
        self.values[i] += p;
    }

    /// Value at an assignment covering every variable of the table; extra
    /// entries are ignored.
    pub fn get(&self, a: &Assignment) -> Result<f64, OracleError> {
        let mut config = Vec::with_capacity(self.variables.len());
        for (v, &c) in self.variables.iter().zip(&self.cards) {
            let value = *a.get(v).ok_or_else(|| OracleError::Unbound(v.clone()))?;
            if value >= c {
                return Err(OracleError::InvalidAssignment(v.clone()));
            }
            config.push(value);
        }
        Ok(self.at(&config))
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sums out every variable not in `keep`; the result lists `keep` in the
    /// order given.
    pub fn marginal(&self, keep: &[String]) -> Result<ProbTable, OracleError> {
        let positions = keep
            .iter()
            .map(|v| {
                self.position(v)
                    .ok_or_else(|| OracleError::UnknownVariable(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cards = positions.iter().map(|&i| self.cards[i]).collect();
        let mut out = ProbTable::zeros(keep.to_vec(), cards);
        let mut projected = vec![0; keep.len()];
        let mut flat = 0;
        for_each_config(&self.cards, |config| {
            for (slot, &i) in projected.iter_mut().zip(&positions) {
                *slot = config[i];
            }
            out.add(&projected, self.values[flat]);
            flat += 1;
        });
        Ok(out)
    }

    /// The assignment for a configuration in variable order.
    pub fn assignment(&self, config: &[usize]) -> Assignment {
        self.variables
            .iter()
            .cloned()
            .zip(config.iter().copied())
            .collect()
    }

    /// One header row, then one row per cell with the probability last.
    pub fn to_csv(&self) -> String {
        let mut out = self.variables.join(",");
        if !self.variables.is_empty() {
            out.push(',');
        }
        out.push_str("p\n");
        let mut flat = 0;
        for_each_config(&self.cards, |config| {
            for v in config {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{}", self.values[flat]);
            flat += 1;
        });
        out
    }
}

/// Largest cell-wise absolute difference between two tables of the same
/// shape.
pub fn compare_tables(a: &ProbTable, b: &ProbTable) -> Result<f64, OracleError> {
    if a.variables != b.variables || a.cards != b.cards {
        return Err(OracleError::ShapeMismatch);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn configs_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_config(&[2, 3], |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[3], vec![1, 0]);
    }

    #[test]
    fn marginal_reorders() {
        let t = ProbTable::new(names(&["A", "B"]), vec![2, 2], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let b = t.marginal(&names(&["B"])).unwrap();
        assert!((b.values()[0] - 0.4).abs() < 1e-15);
        let ba = t.marginal(&names(&["B", "A"])).unwrap();
        assert_eq!(ba.values(), &[0.1, 0.3, 0.2, 0.4]);
        assert!((t.marginal(&[]).unwrap().values()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compare_examples() {
        let u = ProbTable::new(names(&["A"]), vec![2], vec![0.5, 0.5]).unwrap();
        let point = ProbTable::new(names(&["A"]), vec![2], vec![1.0, 0.0]).unwrap();
        assert_eq!(compare_tables(&u, &u).unwrap(), 0.0);
        assert_eq!(compare_tables(&u, &point).unwrap(), 0.5);
        let other = ProbTable::new(names(&["B"]), vec![2], vec![0.5, 0.5]).unwrap();
        assert_eq!(compare_tables(&u, &other), Err(OracleError::ShapeMismatch));
    }

    #[test]
    fn csv_rows() {
        let t = ProbTable::new(names(&["A"]), vec![2], vec![0.25, 0.75]).unwrap();
        assert_eq!(t.to_csv(), "A,p\n0,0.25\n1,0.75\n");
    }
}
