use super::QuadratureError;
use crate::splines::{BasisSpec, RefinedBasis};

/// Sorted quadrature abscissae shared by all weighted rules.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeVector {
    pub nodes: Vec<f64>,
    /// Refined element containing each node (right-hand element at breakpoints).
    pub element: Vec<usize>,
}

impl NodeVector {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Indices of nodes inside the closed interval `[lo, hi]` (with a small
    /// relative tolerance).
    pub fn indices_in(&self, lo: f64, hi: f64, tol: f64) -> std::ops::Range<usize> {
        let start = self.nodes.partition_point(|&x| x < lo - tol);
        let end = self.nodes.partition_point(|&x| x <= hi + tol);
        start..end
    }
}

/// Number of nodes produced by [`build_nodes`] for a refined partition with
/// `elements` elements.
pub fn expected_node_count(degree: usize, elements: usize, closed: bool) -> usize {
    if closed {
        2 * elements
    } else if elements == 1 {
        degree + 2
    } else {
        2 * degree + 2 * elements - 1
    }
}

/// Node vector on the refined partition: `d + 2` uniform points (endpoints
/// included) on the first and last element, midpoints and breakpoints on
/// every inner element. Closed bases have no end elements, so every element
/// contributes its midpoint and left breakpoint.
pub fn build_nodes(refined: &RefinedBasis) -> Result<NodeVector, QuadratureError> {
    build_nodes_for(&refined.fine)
}

pub(crate) fn build_nodes_for(fine: &BasisSpec) -> Result<NodeVector, QuadratureError> {
    let d = fine.degree();
    let bps = fine.breakpoints();
    let m = fine.num_elements();
    let mut pts = Vec::with_capacity(2 * m + 2 * d + 2);
    let uniform = |lo: f64, hi: f64, out: &mut Vec<f64>| {
        for k in 0..=d + 1 {
            out.push(if k == d + 1 { hi } else { lo + (hi - lo) * k as f64 / (d + 1) as f64 });
        }
    };
    if fine.is_closed() {
        for e in 0..m {
            pts.push(bps[e]);
            pts.push(0.5 * (bps[e] + bps[e + 1]));
        }
    } else {
        uniform(bps[0], bps[1], &mut pts);
        if m > 1 {
            uniform(bps[m - 1], bps[m], &mut pts);
        }
        for e in 1..m.saturating_sub(1) {
            pts.push(0.5 * (bps[e] + bps[e + 1]));
        }
        pts.extend_from_slice(&bps[1..m]);
    }
    pts.sort_by(f64::total_cmp);
    let tol = 1e-12 * fine.length();
    let mut nodes: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match nodes.last() {
            Some(&q) if p - q <= tol => {}
            _ => nodes.push(p),
        }
    }
    if nodes.len() < fine.dim() {
        return Err(QuadratureError::TooFewNodes { nodes: nodes.len(), functions: fine.dim() });
    }
    let element = nodes.iter().map(|&x| fine.element_of(x)).collect();
    Ok(NodeVector { nodes, element })
}
