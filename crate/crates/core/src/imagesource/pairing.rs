use crate::error::Result;
use crate::image::{split_horizontal, splice_horizontal, Grid};
use crate::raster::ViewPlan;
use crate::scalar::Real;

/// Views generated together: a symmetric pair or a single view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewGroup {
    Pair(usize, usize),
    Single(usize),
}

impl ViewGroup {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            ViewGroup::Pair(a, b) => vec![a, b],
            ViewGroup::Single(a) => vec![a],
        }
    }
}

/// Groups a plan into symmetric pairs (lower index first, in plan order)
/// followed by the remaining cameras as singletons. Every camera appears once.
pub fn pair_symmetric_views<S: Real>(plan: &ViewPlan<S>) -> Vec<ViewGroup> {
    let n = plan.cameras.len();
    let mut used = vec![false; n];
    let mut pairs: Vec<(usize, usize)> = plan
        .symmetric_pairs
        .iter()
        .filter(|&&(a, b)| a < n && b < n && a != b)
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    pairs.sort_unstable();
    let mut groups = Vec::new();
    for (a, b) in pairs {
        if used[a] || used[b] {
            continue;
        }
        used[a] = true;
        used[b] = true;
        groups.push(ViewGroup::Pair(a, b));
    }
    groups.extend((0..n).filter(|&i| !used[i]).map(ViewGroup::Single));
    groups
}

/// Horizontal concatenation of two depth maps into one generation condition.
pub fn splice_condition<T: Clone>(a: &Grid<T>, b: Option<&Grid<T>>) -> Result<Grid<T>> {
    match b {
        Some(b) => splice_horizontal(a, b),
        None => Ok(a.clone()),
    }
}

/// Inverse of [`splice_condition`] for a pair whose first view is `left_width` wide.
pub fn split_condition<T: Clone>(g: &Grid<T>, left_width: usize) -> Result<(Grid<T>, Grid<T>)> {
    split_horizontal(g, left_width)
}
