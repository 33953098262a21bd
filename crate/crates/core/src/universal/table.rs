//! Index tables: the sequence `p_n` with the per-step lists `q_1^{(n)}, …,
//! q_{N(n)}^{(n)}`, and the role-swapped variant with one `q_n` and several
//! `p_j^{(n)}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Table prefix indexed by `n = 1, 2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QTable {
    p: Vec<usize>,
    q: Vec<Vec<usize>>,
    /// Usable `n`; every `n` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    allowed: Option<BTreeSet<usize>>,
}

impl QTable {
    pub fn new(p: Vec<usize>, q: Vec<Vec<usize>>) -> Result<Self> {
        let t = QTable { p, q, allowed: None };
        t.validate()?;
        Ok(t)
    }

    /// `p_n = n` for `n ≤ len`, the same `q` list at every step.
    pub fn linear(len: usize, qs: &[usize]) -> Result<Self> {
        QTable::new((1..=len).collect(), vec![qs.to_vec(); len])
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.is_empty() {
            return Err(Error::InvalidArgument("empty table".into()));
        }
        if self.p.len() != self.q.len() {
            return Err(Error::LengthMismatch(self.p.len(), self.q.len()));
        }
        if let Some(n) = self.q.iter().position(Vec::is_empty) {
            return Err(Error::InvalidArgument(format!("N({}) = 0", n + 1)));
        }
        if let Some(a) = &self.allowed {
            if a.iter().any(|&n| n == 0 || n > self.p.len()) {
                return Err(Error::InvalidArgument("allowed index outside the table".into()));
            }
        }
        Ok(())
    }

    /// Restrict the usable indices to `allowed`.
    pub fn restricted(mut self, allowed: impl IntoIterator<Item = usize>) -> Result<Self> {
        self.allowed = Some(allowed.into_iter().collect());
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn p(&self, n: usize) -> usize {
        self.p[n - 1]
    }

    pub fn qs(&self, n: usize) -> &[usize] {
        &self.q[n - 1]
    }

    pub fn count(&self, n: usize) -> usize {
        self.q[n - 1].len()
    }

    pub fn q_max(&self, n: usize) -> usize {
        self.q[n - 1].iter().copied().max().unwrap_or(0)
    }

    pub fn q_min(&self, n: usize) -> usize {
        self.q[n - 1].iter().copied().min().unwrap_or(0)
    }

    pub fn is_allowed(&self, n: usize) -> bool {
        (1..=self.len()).contains(&n) && self.allowed.as_ref().is_none_or(|a| a.contains(&n))
    }

    pub fn allowed(&self) -> Option<&BTreeSet<usize>> {
        self.allowed.as_ref()
    }

    /// Usable indices in increasing order.
    pub fn usable(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.len()).filter(|&n| self.is_allowed(n))
    }

    /// `max_{m ≤ n} p_m` along the prefix.
    pub fn running_max(&self) -> Vec<usize> {
        self.p
            .iter()
            .scan(0, |m, &x| {
                *m = (*m).max(x);
                Some(*m)
            })
            .collect()
    }

    /// The prefix shows growth of `p_n`: the running maximum over the second
    /// half exceeds the one over the first half.
    pub fn growth_witnessed(&self) -> bool {
        let half = self.len() / 2;
        half > 0 && self.p[half..].iter().max() > self.p[..half].iter().max()
    }
}

/// Role-swapped table: one `q_n` and the list `p_1^{(n)}, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSideTable {
    q: Vec<usize>,
    p: Vec<Vec<usize>>,
}

impl QSideTable {
    pub fn new(q: Vec<usize>, p: Vec<Vec<usize>>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidArgument("empty table".into()));
        }
        if q.len() != p.len() {
            return Err(Error::LengthMismatch(q.len(), p.len()));
        }
        if p.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument("empty p list".into()));
        }
        Ok(QSideTable { q, p })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn q(&self, n: usize) -> usize {
        self.q[n - 1]
    }

    pub fn ps(&self, n: usize) -> &[usize] {
        &self.p[n - 1]
    }

    pub fn p_min(&self, n: usize) -> usize {
        self.p[n - 1].iter().copied().min().unwrap_or(0)
    }

    /// `min_j p_j^{(n)}` grows along the prefix.
    pub fn growth_witnessed(&self) -> bool {
        let half = self.len() / 2;
        let mins: Vec<usize> = (1..=self.len()).map(|n| self.p_min(n)).collect();
        half > 0 && mins[half..].iter().max() > mins[..half].iter().max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_table() {
        let t = QTable::linear(10, &[1, 2]).unwrap();
        assert_eq!(t.p(4), 4);
        assert_eq!(t.qs(4), &[1, 2]);
        assert_eq!(t.q_max(4), 2);
        assert!(t.growth_witnessed());
        assert_eq!(t.usable().count(), 10);
        let r = t.restricted([3, 7]).unwrap();
        assert_eq!(r.usable().collect::<Vec<_>>(), vec![3, 7]);
        assert!(!r.is_allowed(4));
    }

    #[test]
    fn invalid_tables() {
        assert!(QTable::new(vec![1, 2], vec![vec![1]]).is_err());
        assert!(QTable::new(vec![1], vec![vec![]]).is_err());
        assert!(QTable::linear(3, &[0]).unwrap().restricted([4]).is_err());
        assert!(QSideTable::new(vec![3], vec![vec![]]).is_err());
    }

    #[test]
    fn qside_minimum() {
        let t = QSideTable::new(vec![3; 4], (1..=4).map(|n| vec![n + 1, n]).collect()).unwrap();
        assert_eq!(t.p_min(2), 2);
        assert!(t.growth_witnessed());
    }
}
