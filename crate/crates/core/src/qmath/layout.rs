use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of named tensor factors with their dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    factors: Vec<(String, usize)>,
}

impl SystemLayout {
    pub fn new<S: Into<String>>(factors: Vec<(S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (l, d) in &factors {
            if *d == 0 {
                return Err(Error::Layout(format!("factor {l} has dimension 0")));
            }
        }
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if factors[i].0 == factors[j].0 {
                    return Err(Error::Layout(format!("duplicate label {}", factors[i].0)));
                }
            }
        }
        Ok(Self { factors })
    }

    /// Single unnamed-by-convention factor `label` of dimension `d`.
    pub fn single<S: Into<String>>(label: S, d: usize) -> Self {
        Self::new(vec![(label.into(), d)]).expect("single factor is always valid")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> Vec<&str> {
        self.factors.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|&(_, d)| d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|&(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::Layout(format!("unknown label {label}")))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].1)
    }

    /// Product of the dimensions of the given labels.
    pub fn dim_of_all(&self, labels: &[&str]) -> Result<usize> {
        let mut d = 1;
        for l in labels {
            d *= self.dim_of(l)?;
        }
        Ok(d)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.factors.iter().any(|(l, _)| l == label)
    }

    /// Concatenation; fails on duplicate labels.
    pub fn join(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        SystemLayout::new(factors)
    }

    /// Layout with the given labels removed.
    pub fn without(&self, labels: &[&str]) -> Result<SystemLayout> {
        for l in labels {
            self.position(l)?;
        }
        let factors = self
            .factors
            .iter()
            .filter(|(l, _)| !labels.contains(&l.as_str()))
            .cloned()
            .collect();
        SystemLayout::new(factors)
    }

    /// Layout restricted to the given labels, in the given order.
    pub fn select(&self, labels: &[&str]) -> Result<SystemLayout> {
        let mut factors = Vec::with_capacity(labels.len());
        for l in labels {
            let p = self.position(l)?;
            factors.push(self.factors[p].clone());
        }
        SystemLayout::new(factors)
    }

    /// Same factor dimensions with every label suffixed by `suffix`.
    pub fn relabel_with_suffix(&self, suffix: &str) -> SystemLayout {
        let factors = self
            .factors
            .iter()
            .map(|(l, d)| (format!("{l}{suffix}"), *d))
            .collect();
        SystemLayout { factors }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(SystemLayout::new(vec![("A", 2), ("A", 3)]).is_err());
        assert!(SystemLayout::new(vec![("A", 0)]).is_err());
    }

    #[test]
    fn total_dim_and_selection() {
        let l = SystemLayout::new(vec![("A", 2), ("B", 3), ("R", 4)]).unwrap();
        assert_eq!(l.total_dim(), 24);
        assert_eq!(l.without(&["B"]).unwrap().total_dim(), 8);
        assert_eq!(l.select(&["R", "A"]).unwrap().dims(), vec![4, 2]);
        assert!(l.without(&["X"]).is_err());
    }
}
