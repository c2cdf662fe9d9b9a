//! Weighted cell coverage in exact integer arithmetic.

use crate::error::{Error, Result};
use crate::oracle::SetFunction;
use crate::set::{ElementSet, MAX_GROUND};

/// Largest number of distinct cells a coverage function may use.
pub const MAX_CELLS: usize = 128;

/// `f(A)` = total weight of the cells covered by at least one element of `A`.
///
/// Values are exact `u64` sums; the floating-point oracle view is exact too
/// for any total weight below 2⁵³.
#[derive(Clone, Debug)]
pub struct CoverageFunction {
    cell_weight: Vec<u64>,
    element_cells: Vec<u128>,
    unit_weights: bool,
}

impl CoverageFunction {
    /// Builds a coverage function from per-cell weights and, per element, the
    /// list of cells it covers. Elements may cover overlapping or duplicate
    /// cell sets; an empty list is a zero-value element.
    pub fn new(cell_weight: Vec<u64>, element_cells: Vec<Vec<u32>>) -> Result<Self> {
        let n_cells = cell_weight.len();
        if n_cells > MAX_CELLS {
            return Err(Error::InvalidSpec(format!(
                "{n_cells} cells exceeds the supported maximum {MAX_CELLS}"
            )));
        }
        if element_cells.len() > MAX_GROUND {
            return Err(Error::InvalidSpec(format!(
                "{} elements exceeds the supported maximum {MAX_GROUND}",
                element_cells.len()
            )));
        }
        let mut masks = Vec::with_capacity(element_cells.len());
        for (e, cells) in element_cells.iter().enumerate() {
            let mut mask = 0u128;
            for &c in cells {
                if c as usize >= n_cells {
                    return Err(Error::InvalidSpec(format!(
                        "element {e} covers cell {c}, but only {n_cells} cells exist"
                    )));
                }
                mask |= 1u128 << c;
            }
            masks.push(mask);
        }
        let unit_weights = cell_weight.iter().all(|&w| w == 1);
        Ok(CoverageFunction {
            cell_weight,
            element_cells: masks,
            unit_weights,
        })
    }

    /// Coverage with every cell at weight 1.
    pub fn unit(n_cells: usize, element_cells: Vec<Vec<u32>>) -> Result<Self> {
        CoverageFunction::new(vec![1; n_cells], element_cells)
    }

    pub fn n_cells(&self) -> usize {
        self.cell_weight.len()
    }

    pub fn cell_weights(&self) -> &[u64] {
        &self.cell_weight
    }

    /// Cells covered by one element, ascending.
    pub fn cells_of(&self, element: u32) -> Vec<u32> {
        let mut mask = self.element_cells[element as usize];
        let mut out = Vec::new();
        while mask != 0 {
            out.push(mask.trailing_zeros());
            mask &= mask - 1;
        }
        out
    }

    fn covered_mask(&self, a: ElementSet) -> u128 {
        let mut covered = 0u128;
        for id in a.iter() {
            covered |= self.element_cells[id as usize];
        }
        covered
    }

    /// Exact integer value of `f(A)`.
    pub fn eval_exact(&self, a: ElementSet) -> u64 {
        let mut covered = self.covered_mask(a);
        if self.unit_weights {
            return covered.count_ones() as u64;
        }
        let mut total = 0u64;
        while covered != 0 {
            total += self.cell_weight[covered.trailing_zeros() as usize];
            covered &= covered - 1;
        }
        total
    }
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.element_cells.len()
    }

    fn eval(&self, a: ElementSet) -> Result<f64> {
        Ok(self.eval_exact(a) as f64)
    }
}
