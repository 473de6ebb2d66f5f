//! Insertion tableaux (rows rise, columns fall bottom-to-top) and standard
//! Young tableaux, with validity checks and small-scale enumeration.

use crate::alphabet::{letter_counts, Letter, LetterCounts, LinearOrder};
use crate::diagram::YoungDiagram;
use crate::error::{Error, Result};
use crate::params::ThomaParams;

/// A filling of a Young diagram by letters, increasing (`↗`) along rows and
/// decreasing (`↘`) along columns read bottom to top.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionTableau {
    rows: Vec<Vec<Letter>>,
}

impl InsertionTableau {
    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    /// Wraps explicit rows after checking shape and both letter relations.
    pub fn new(rows: Vec<Vec<Letter>>, order: &LinearOrder) -> Result<Self> {
        let t = Self { rows };
        t.check(order)?;
        Ok(t)
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<Letter>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<Letter>] {
        &self.rows
    }

    pub fn shape(&self) -> YoungDiagram {
        if self.rows.is_empty() {
            return YoungDiagram::empty();
        }
        YoungDiagram::new(self.rows.iter().map(Vec::len).collect())
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Verifies the shape and both relations under `order`.
    pub fn check(&self, order: &LinearOrder) -> Result<()> {
        if self
            .rows
            .windows(2)
            .any(|w| w[0].len() < w[1].len() || w[1].is_empty())
        {
            return Err(Error::InvalidTableau(
                "row lengths must be positive and weakly decreasing".into(),
            ));
        }
        for (r, row) in self.rows.iter().enumerate() {
            for c in 1..row.len() {
                if !order.rises(row[c - 1], row[c]) {
                    return Err(Error::InvalidTableau(format!(
                        "row {r}: {} does not rise to {}",
                        row[c - 1],
                        row[c]
                    )));
                }
            }
        }
        for r in 1..self.rows.len() {
            for c in 0..self.rows[r].len() {
                // Reading the column bottom to top must fall.
                if order.rises(self.rows[r][c], self.rows[r - 1][c]) {
                    return Err(Error::InvalidTableau(format!(
                        "column {c}: {} does not fall to {}",
                        self.rows[r][c],
                        self.rows[r - 1][c]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The type of the tableau: per-letter counts of its entries.
    pub fn type_counts(&self, params: &ThomaParams) -> LetterCounts {
        let flat: Vec<Letter> = self.rows.iter().flatten().copied().collect();
        letter_counts(&flat, params)
    }

    /// ASCII rendering, one row per line.
    pub fn render(&self) -> String {
        let width = self
            .rows
            .iter()
            .flatten()
            .map(|l| l.to_string().len())
            .max()
            .unwrap_or(1);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|l| format!("[{:>width$}]", l.to_string()))
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A standard Young tableau: entries `1..=n`, each once, increasing along
/// rows and down columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardTableau {
    rows: Vec<Vec<usize>>,
}

impl StandardTableau {
    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let t = Self { rows };
        t.check()?;
        Ok(t)
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<usize>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn shape(&self) -> YoungDiagram {
        if self.rows.is_empty() {
            return YoungDiagram::empty();
        }
        YoungDiagram::new(self.rows.iter().map(Vec::len).collect())
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn check(&self) -> Result<()> {
        if self
            .rows
            .windows(2)
            .any(|w| w[0].len() < w[1].len() || w[1].is_empty())
        {
            return Err(Error::InvalidTableau(
                "row lengths must be positive and weakly decreasing".into(),
            ));
        }
        let n = self.size();
        let mut seen = vec![false; n + 1];
        for row in &self.rows {
            for &e in row {
                if e == 0 || e > n || seen[e] {
                    return Err(Error::InvalidTableau(format!(
                        "entries must be 1..={n}, each once (bad {e})"
                    )));
                }
                seen[e] = true;
            }
        }
        for row in &self.rows {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidTableau("rows must increase".into()));
            }
        }
        for r in 1..self.rows.len() {
            for c in 0..self.rows[r].len() {
                if self.rows[r - 1][c] >= self.rows[r][c] {
                    return Err(Error::InvalidTableau("columns must increase".into()));
                }
            }
        }
        Ok(())
    }

    /// Cell coordinates `(row, col)` of each entry, indexed by entry value.
    pub fn cells_by_entry(&self) -> Vec<(usize, usize)> {
        let mut cells = vec![(0, 0); self.size()];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                cells[e - 1] = (r, c);
            }
        }
        cells
    }
}

/// Enumerates every valid insertion-tableau filling of `shape` using letters
/// drawn from `supply` (a multiset given as `(letter, count)` pairs).
/// Fillings are built cell by cell in row-major order.
pub fn fillings_of_shape(
    shape: &YoungDiagram,
    supply: &[(Letter, usize)],
    order: &LinearOrder,
) -> Vec<InsertionTableau> {
    let mut out = Vec::new();
    let parts = shape.parts().to_vec();
    let mut rows: Vec<Vec<Letter>> = parts.iter().map(|&p| Vec::with_capacity(p)).collect();
    let mut remaining: Vec<usize> = supply.iter().map(|&(_, c)| c).collect();

    fn rec(
        parts: &[usize],
        supply: &[(Letter, usize)],
        order: &LinearOrder,
        rows: &mut Vec<Vec<Letter>>,
        remaining: &mut Vec<usize>,
        r: usize,
        c: usize,
        out: &mut Vec<InsertionTableau>,
    ) {
        if r == parts.len() {
            out.push(InsertionTableau::from_rows_unchecked(rows.clone()));
            return;
        }
        let (nr, nc) = if c + 1 < parts[r] { (r, c + 1) } else { (r + 1, 0) };
        for idx in 0..supply.len() {
            if remaining[idx] == 0 {
                continue;
            }
            let letter = supply[idx].0;
            if c > 0 && !order.rises(rows[r][c - 1], letter) {
                continue;
            }
            if r > 0 && order.rises(letter, rows[r - 1][c]) {
                continue;
            }
            remaining[idx] -= 1;
            rows[r].push(letter);
            rec(parts, supply, order, rows, remaining, nr, nc, out);
            rows[r].pop();
            remaining[idx] += 1;
        }
    }

    if parts.is_empty() {
        return vec![InsertionTableau::empty()];
    }
    rec(
        &parts,
        supply,
        order,
        &mut rows,
        &mut remaining,
        0,
        0,
        &mut out,
    );
    out
}

/// Enumerates all standard Young tableaux of `shape` by recursive corner
/// removal; the count equals the diagram dimension.
pub fn standard_tableaux_of_shape(shape: &YoungDiagram) -> Vec<StandardTableau> {
    let n = shape.size();
    if n == 0 {
        return vec![StandardTableau::empty()];
    }
    let mut out = Vec::new();
    let mut grid: Vec<Vec<usize>> = shape.parts().iter().map(|&p| vec![0; p]).collect();

    fn rec(parts: Vec<usize>, entry: usize, grid: &mut Vec<Vec<usize>>, out: &mut Vec<StandardTableau>) {
        if entry == 0 {
            out.push(StandardTableau::from_rows_unchecked(
                grid.iter().map(|row| row.clone()).collect(),
            ));
            return;
        }
        for r in 0..parts.len() {
            let removable = r + 1 == parts.len() || parts[r] > parts[r + 1];
            if removable && parts[r] > 0 {
                let mut next = parts.clone();
                next[r] -= 1;
                if next[r] == 0 {
                    next.pop();
                }
                grid[r][parts[r] - 1] = entry;
                rec(next, entry - 1, grid, out);
            }
        }
    }

    rec(shape.parts().to_vec(), n, &mut grid, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_order() -> LinearOrder {
        LinearOrder::standard(2, 2, false)
    }

    fn paper_tableau() -> Vec<Vec<Letter>> {
        use Letter::{Col, Row};
        vec![
            vec![Row(1), Row(1), Col(1)],
            vec![Row(2), Col(2)],
            vec![Col(1)],
            vec![Col(1)],
        ]
    }

    #[test]
    fn accepts_the_worked_example() {
        let t = InsertionTableau::new(paper_tableau(), &paper_order()).unwrap();
        assert_eq!(t.shape(), YoungDiagram::new(vec![3, 2, 1, 1]));
        let params = ThomaParams::new(&[0.3, 0.2], &[0.3, 0.2], 0.0).unwrap();
        let ty = t.type_counts(&params);
        assert_eq!(ty.rows, vec![2, 1]);
        assert_eq!(ty.cols, vec![3, 1]);
        assert_eq!(ty.cont, 0);
        assert_eq!(ty.total(), 7);
    }

    #[test]
    fn rejects_relation_breaking_swaps() {
        let order = paper_order();
        let swap = |(r1, c1): (usize, usize), (r2, c2): (usize, usize)| {
            let mut rows = paper_tableau();
            let tmp = rows[r1][c1];
            rows[r1][c1] = rows[r2][c2];
            rows[r2][c2] = tmp;
            InsertionTableau::new(rows, &order)
        };
        // Breaks the first row: it starts y1, x1.
        assert!(swap((0, 0), (0, 2)).is_err());
        // Breaks the first row: x2 sits left of x1.
        assert!(swap((0, 0), (1, 0)).is_err());
        // Breaks the first column: y1 above x2 reading bottom to top.
        assert!(swap((2, 0), (1, 0)).is_err());
        // Breaks the second column: y2 below y1 must fall upward.
        assert!(swap((1, 1), (2, 0)).is_err());
    }

    #[test]
    fn single_box_and_empty() {
        let order = LinearOrder::standard(1, 0, false);
        let t = InsertionTableau::new(vec![vec![Letter::Row(1)]], &order).unwrap();
        let params = ThomaParams::new(&[1.0], &[], 0.0).unwrap();
        assert_eq!(t.type_counts(&params).rows, vec![1]);
        assert_eq!(InsertionTableau::empty().type_counts(&params).total(), 0);
    }

    #[test]
    fn standard_tableau_validity() {
        let s = StandardTableau::new(vec![vec![1, 2, 4], vec![3, 7], vec![5], vec![6]]).unwrap();
        assert_eq!(s.shape(), YoungDiagram::new(vec![3, 2, 1, 1]));
        assert!(StandardTableau::new(vec![vec![2, 1]]).is_err());
        assert!(StandardTableau::new(vec![vec![1, 2], vec![2]]).is_err());
        assert!(StandardTableau::new(vec![vec![2, 3], vec![1]]).is_err());
    }

    #[test]
    fn standard_enumeration_matches_known_counts() {
        // dim(2,1) = 2, dim(2,2) = 2, dim(3,2) = 5
        assert_eq!(standard_tableaux_of_shape(&YoungDiagram::new(vec![2, 1])).len(), 2);
        assert_eq!(standard_tableaux_of_shape(&YoungDiagram::new(vec![2, 2])).len(), 2);
        assert_eq!(standard_tableaux_of_shape(&YoungDiagram::new(vec![3, 2])).len(), 5);
        for t in standard_tableaux_of_shape(&YoungDiagram::new(vec![3, 2])) {
            t.check().unwrap();
        }
    }

    #[test]
    fn fillings_respect_supply_and_relations() {
        let order = LinearOrder::standard(0, 1, false);
        // Two equal column letters cannot share a row.
        let shape = YoungDiagram::new(vec![2]);
        let fills = fillings_of_shape(&shape, &[(Letter::Col(1), 2)], &order);
        assert!(fills.is_empty());
        // They stack fine.
        let shape = YoungDiagram::new(vec![1, 1]);
        let fills = fillings_of_shape(&shape, &[(Letter::Col(1), 2)], &order);
        assert_eq!(fills.len(), 1);
        fills[0].check(&order).unwrap();
    }

    #[test]
    fn render_is_row_per_line() {
        let order = paper_order();
        let t = InsertionTableau::new(paper_tableau(), &order).unwrap();
        let text = t.render();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().next().unwrap().contains("x1"));
    }
}
