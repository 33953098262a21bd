//! Which systems each step of a simultaneous construction handles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemCount {
    Finite(usize),
    Countable,
}

/// Finite `N`: step `i` handles system `((i − 1) mod N) + 1`.
/// Countable: step `n` handles systems `1..=n`.
pub fn schedule_systems(systems: SystemCount, steps: usize) -> Result<Vec<Vec<usize>>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    match systems {
        SystemCount::Finite(0) => Err(Error::InvalidArgument("need at least one system".into())),
        SystemCount::Finite(n) => Ok((1..=steps).map(|i| vec![(i - 1) % n + 1]).collect()),
        SystemCount::Countable => Ok((1..=steps).map(|i| (1..=i).collect()).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_robin_and_triangle() {
        let s = schedule_systems(SystemCount::Finite(3), 5).unwrap();
        assert_eq!(s, vec![vec![1], vec![2], vec![3], vec![1], vec![2]]);
        let s = schedule_systems(SystemCount::Countable, 3).unwrap();
        assert_eq!(s, vec![vec![1], vec![1, 2], vec![1, 2, 3]]);
        assert!(schedule_systems(SystemCount::Finite(1), 4).unwrap().iter().all(|v| v == &[1]));
        assert!(schedule_systems(SystemCount::Finite(2), 0).is_err());
    }
}
