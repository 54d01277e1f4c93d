use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered node vector `0 ≤ y_1 ≤ … ≤ y_n ≤ 1` (a point of the closed simplex).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NodeSystem(Vec<f64>);

impl NodeSystem {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Validation("a node system needs at least one node".into()));
        }
        if nodes.iter().any(|y| !(0.0..=1.0).contains(y)) {
            return Err(Error::Validation(format!("nodes {nodes:?} must lie in [0, 1]")));
        }
        if nodes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Validation(format!("nodes {nodes:?} must be non-decreasing")));
        }
        Ok(NodeSystem(nodes))
    }

    /// Sorts (and clamps to `[0, 1]`) before validating.
    pub fn from_unsorted(mut nodes: Vec<f64>) -> Result<Self> {
        for y in nodes.iter_mut() {
            if y.is_nan() {
                return Err(Error::Validation("NaN node".into()));
            }
            *y = y.clamp(0.0, 1.0);
        }
        nodes.sort_by(f64::total_cmp);
        Self::new(nodes)
    }

    /// Equally spaced nodes `j / (n + 1)`.
    pub fn equispaced(n: usize) -> Self {
        NodeSystem((1..=n).map(|j| j as f64 / (n + 1) as f64).collect())
    }

    /// Sorted independent uniform draws from `[0, 1]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        v.sort_by(f64::total_cmp);
        NodeSystem(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Membership in the open simplex: `0 < y_1 < … < y_n < 1`.
    pub fn is_strict(&self) -> bool {
        self.0[0] > 0.0 && self.0[self.0.len() - 1] < 1.0 && self.0.windows(2).all(|w| w[0] < w[1])
    }

    /// `y_j` with sentinels `y_0 = 0` and `y_{n+1} = 1`.
    pub fn bound(&self, j: usize) -> f64 {
        match j {
            0 => 0.0,
            j if j == self.0.len() + 1 => 1.0,
            j => self.0[j - 1],
        }
    }

    /// The closed interval `I_j = [y_j, y_{j+1}]`, `j = 0..=n`.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        (self.bound(j), self.bound(j + 1))
    }

    /// Maximum coordinate distance.
    pub fn distance(&self, other: &NodeSystem) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for NodeSystem {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        NodeSystem::new(v)
    }
}

impl From<NodeSystem> for Vec<f64> {
    fn from(n: NodeSystem) -> Self {
        n.0
    }
}
