//! Box-shaped sets of multi-indices `{m : m ⪯ M}` with dense linear storage.

use serde::{Deserialize, Serialize};

/// The box `{m ∈ ℕ^d : m_i ≤ M_i}` stored in row-major order
/// (the last component varies fastest).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiBox {
    order: Vec<usize>,
    strides: Vec<usize>,
}

impl MultiBox {
    pub fn new(order: &[usize]) -> Self {
        assert!(!order.is_empty(), "a box needs at least one dimension");
        let d = order.len();
        let mut strides = vec![1; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (order[i + 1] + 1);
        }
        MultiBox {
            order: order.to_vec(),
            strides,
        }
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.iter().map(|&m| m + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, m: &[usize]) -> bool {
        m.len() == self.dim() && m.iter().zip(&self.order).all(|(a, b)| a <= b)
    }

    #[inline]
    pub fn index(&self, m: &[usize]) -> usize {
        debug_assert!(self.contains(m));
        m.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn multi(&self, mut idx: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim()];
        for (i, s) in self.strides.iter().enumerate() {
            m[i] = idx / s;
            idx %= s;
        }
        m
    }

    /// All members in storage order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|i| self.multi(i))
    }

    /// Storage indices sorted by total degree `|m|`, ties in storage order.
    pub fn graded(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| (degree(&self.multi(i)), i));
        idx
    }

    /// Storage index of `m − l` for `l ⪯ m`.
    pub fn diff_index(&self, m: &[usize], l: &[usize]) -> usize {
        m.iter()
            .zip(l)
            .zip(&self.strides)
            .map(|((a, b), s)| (a - b) * s)
            .sum()
    }

    /// Members of `2M` that are not in this box.
    pub fn far_shell(&self) -> Vec<Vec<usize>> {
        let doubled: Vec<usize> = self.order.iter().map(|m| 2 * m).collect();
        MultiBox::new(&doubled)
            .iter()
            .filter(|m| !self.contains(m))
            .collect()
    }

    /// The unit multi-index `e_i`.
    pub fn unit(&self, i: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim()];
        m[i] = 1;
        m
    }
}

/// `|m| = Σ m_i`.
pub fn degree(m: &[usize]) -> usize {
    m.iter().sum()
}

/// Componentwise order `l ⪯ m`.
pub fn precedes(l: &[usize], m: &[usize]) -> bool {
    l.iter().zip(m).all(|(a, b)| a <= b)
}

/// All `l ⪯ m`, in row-major order of the sub-box.
pub fn sub_box(m: &[usize]) -> MultiBox {
    MultiBox::new(m)
}
