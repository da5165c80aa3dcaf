//! Vote matrix: the observed bipartite legislator-bill network.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

/// One recorded cell of the vote matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Vote {
    Yea,
    Nay,
    Missing,
}

impl Vote {
    #[inline]
    pub fn is_missing(self) -> bool {
        matches!(self, Vote::Missing)
    }

    /// 1.0 for Yea, 0.0 for Nay. Panics on Missing.
    #[inline]
    pub fn as_binary(self) -> f64 {
        match self {
            Vote::Yea => 1.0,
            Vote::Nay => 0.0,
            Vote::Missing => panic!("Missing vote has no binary value"),
        }
    }
}

/// N x P ternary vote matrix with identifiers and optional ground-truth
/// group labels from simulation.
///
/// Invariants checked at construction: the cell array is exactly
/// `n_legislators x n_bills`, identifier lists match their dimensions, and
/// identifiers contain no duplicates. The "at least one observed cell per
/// row and column" rule is enforced at ingestion (see [`crate::io`]), where
/// violating rows and columns are dropped with a warning.
#[derive(Clone, Debug, PartialEq)]
pub struct VoteMatrix {
    n_legislators: usize,
    n_bills: usize,
    cells: Vec<Vote>,
    legislator_ids: Vec<String>,
    bill_ids: Vec<String>,
    true_labels: Option<Vec<String>>,
}

impl VoteMatrix {
    pub fn new(
        cells: Vec<Vote>,
        legislator_ids: Vec<String>,
        bill_ids: Vec<String>,
        true_labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = legislator_ids.len();
        let p = bill_ids.len();
        if n == 0 || p == 0 {
            return Err(Error::data("vote matrix must have at least one row and column"));
        }
        if cells.len() != n * p {
            return Err(Error::data(format!(
                "cell count {} does not match {n} legislators x {p} bills",
                cells.len()
            )));
        }
        if let Some(labels) = &true_labels {
            if labels.len() != n {
                return Err(Error::data("label count does not match legislator count"));
            }
        }
        for (name, ids) in [("legislator", &legislator_ids), ("bill", &bill_ids)] {
            let mut seen = HashSet::new();
            for id in ids.iter() {
                if !seen.insert(id) {
                    return Err(Error::data(format!("duplicate {name} id: {id}")));
                }
            }
        }
        Ok(VoteMatrix {
            n_legislators: n,
            n_bills: p,
            cells,
            legislator_ids,
            bill_ids,
            true_labels,
        })
    }

    #[inline]
    pub fn n_legislators(&self) -> usize {
        self.n_legislators
    }

    #[inline]
    pub fn n_bills(&self) -> usize {
        self.n_bills
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Vote {
        self.cells[i * self.n_bills + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Vote] {
        &self.cells[i * self.n_bills..(i + 1) * self.n_bills]
    }

    pub fn cells(&self) -> &[Vote] {
        &self.cells
    }

    pub fn legislator_ids(&self) -> &[String] {
        &self.legislator_ids
    }

    pub fn bill_ids(&self) -> &[String] {
        &self.bill_ids
    }

    pub fn true_labels(&self) -> Option<&[String]> {
        self.true_labels.as_deref()
    }

    pub fn set_true_labels(&mut self, labels: Option<Vec<String>>) -> Result<()> {
        if let Some(l) = &labels {
            if l.len() != self.n_legislators {
                return Err(Error::data("label count does not match legislator count"));
            }
        }
        self.true_labels = labels;
        Ok(())
    }

    /// Number of non-Missing cells.
    pub fn n_observed(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_missing()).count()
    }

    /// (Yea, Nay) counts among observed cells of bill `j`.
    pub fn bill_margin(&self, j: usize) -> (usize, usize) {
        let mut yea = 0;
        let mut nay = 0;
        for i in 0..self.n_legislators {
            match self.get(i, j) {
                Vote::Yea => yea += 1,
                Vote::Nay => nay += 1,
                Vote::Missing => {}
            }
        }
        (yea, nay)
    }

    /// Keep the given legislator rows and bill columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<VoteMatrix> {
        let mut cells = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                cells.push(self.get(i, j));
            }
        }
        VoteMatrix::new(
            cells,
            rows.iter().map(|&i| self.legislator_ids[i].clone()).collect(),
            cols.iter().map(|&j| self.bill_ids[j].clone()).collect(),
            self.true_labels
                .as_ref()
                .map(|l| rows.iter().map(|&i| l[i].clone()).collect()),
        )
    }
}
