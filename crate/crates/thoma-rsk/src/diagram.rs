//! Young diagrams stored as weakly decreasing row lengths. Column lengths
//! are always derived, never stored.

use serde::{Deserialize, Serialize};

/// A Young diagram; `parts` are the row lengths, strictly positive and
/// weakly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct YoungDiagram {
    parts: Vec<usize>,
}

impl YoungDiagram {
    /// Builds a diagram, panicking on invalid part sequences. Use for
    /// literals; algorithmically produced shapes are valid by construction.
    pub fn new(parts: Vec<usize>) -> Self {
        assert!(
            parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] >= w[1]),
            "row lengths must be positive and weakly decreasing: {parts:?}"
        );
        Self { parts }
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    /// Length of the `i`-th row (1-based); zero beyond the last row.
    pub fn row(&self, i: usize) -> usize {
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Length of the `j`-th column (1-based); zero beyond the first row.
    pub fn col(&self, j: usize) -> usize {
        self.parts.iter().take_while(|&&p| p >= j).count()
    }

    /// The transposed diagram: column lengths become row lengths.
    pub fn transpose(&self) -> Self {
        let cols = self.row(1);
        Self {
            parts: (1..=cols).map(|j| self.col(j)).collect(),
        }
    }

    /// Partial row sum `λ_1 + … + λ_k`.
    pub fn row_prefix_sum(&self, k: usize) -> usize {
        self.parts.iter().take(k).sum()
    }

    /// Diagrams obtained by removing one corner box.
    pub fn shrink(&self) -> Vec<Self> {
        let mut out = Vec::new();
        for r in 0..self.parts.len() {
            let removable = r + 1 == self.parts.len() || self.parts[r] > self.parts[r + 1];
            if removable {
                let mut parts = self.parts.clone();
                parts[r] -= 1;
                if parts[r] == 0 {
                    parts.pop();
                }
                out.push(Self { parts });
            }
        }
        out
    }

    /// Diagrams obtained by adding one box at an addable corner.
    pub fn grow(&self) -> Vec<Self> {
        let mut out = Vec::new();
        for r in 0..=self.parts.len() {
            let addable = r == 0 || self.parts[r - 1] > self.parts.get(r).copied().unwrap_or(0);
            if addable {
                let mut parts = self.parts.clone();
                if r == parts.len() {
                    parts.push(1);
                } else {
                    parts[r] += 1;
                }
                out.push(Self { parts });
            }
        }
        out
    }

    /// Comma-joined part list, e.g. `3,2,1,1`; empty diagram renders as `-`.
    pub fn label(&self) -> String {
        if self.parts.is_empty() {
            "-".to_string()
        } else {
            self.parts
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl std::fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.label())
    }
}

/// All partitions of `n` in reverse-lexicographic order: `(n)` first,
/// `(1,…,1)` last.
pub fn partitions_of(n: usize) -> Vec<YoungDiagram> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if remaining == 0 {
            out.push(YoungDiagram {
                parts: current.clone(),
            });
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            current.push(part);
            rec(remaining - part, part, current, out);
            current.pop();
        }
    }
    rec(n, n.max(1), &mut current, &mut out);
    out
}
