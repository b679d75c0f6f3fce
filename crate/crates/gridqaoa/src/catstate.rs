//! Schedules that prepare (|w> + |w-bar>)/sqrt(2) on the grid.
//!
//! The ansatz commutes with the global flip X⊗...⊗X, so flip-symmetric cat
//! states are exactly the basis-adjacent family it can reach. Construction:
//! breadth-first from the most central site, one layer per BFS depth. A tree
//! edge (parent q, child k) at depth t gets gamma_qk = pi/4 and a child
//! rotation beta_k = -pi/4 (stored as 3pi/4) when the target bits agree, or
//! +pi/4 when they differ; the pair gate collapses the child's |+> onto the
//! parent's branch bit, both branches picking up the same phase. Total depth
//! equals the root's eccentricity.

use crate::error::{Error, Result};
use crate::instance::{BitString, Grid};
use crate::simulator::{ParamSchedule, StateVector};

const PI: f64 = std::f64::consts::PI;

/// BFS spanning tree of the grid used for cat construction: `layers[t]`
/// holds the (parent, child) edges applied at depth t+1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatPlan {
    pub root: usize,
    pub depth: usize,
    pub layers: Vec<Vec<(usize, usize)>>,
}

fn eccentricity(grid: &Grid, site: usize) -> usize {
    let (r, c) = grid.coords(site);
    r.max(grid.rows() - 1 - r) + c.max(grid.cols() - 1 - c)
}

/// BFS spanning tree rooted at the minimum-eccentricity site (ties broken by
/// lowest index). Depth equals the root's eccentricity, about sqrt(n).
pub fn cat_plan(grid: &Grid) -> CatPlan {
    let root = (0..grid.site_count())
        .min_by_key(|&s| (eccentricity(grid, s), s))
        .expect("grid has at least one site");
    let depth = eccentricity(grid, root);
    let mut dist = vec![usize::MAX; grid.site_count()];
    dist[root] = 0;
    let mut layers = Vec::with_capacity(depth);
    let mut frontier = vec![root];
    while !frontier.is_empty() {
        let mut layer = Vec::new();
        let mut next = Vec::new();
        for &parent in &frontier {
            for child in grid.neighbors(parent) {
                if dist[child] == usize::MAX {
                    dist[child] = dist[parent] + 1;
                    layer.push((parent, child));
                    next.push(child);
                }
            }
        }
        if !layer.is_empty() {
            layers.push(layer);
        }
        frontier = next;
    }
    debug_assert_eq!(layers.len(), depth);
    CatPlan { root, depth, layers }
}

/// Builds the schedule preparing (|w> + |w-bar>)/sqrt(2); depth equals the
/// cat plan's. All angles are 0 except the tree edges' pi/4 phases and the
/// children's +-pi/4 rotations.
pub fn cat_schedule(grid: &Grid, w: &BitString) -> Result<ParamSchedule> {
    if w.len() != grid.site_count() {
        return Err(Error::LengthMismatch { expected: grid.site_count(), got: w.len() });
    }
    let plan = cat_plan(grid);
    let n = grid.site_count();
    let edge_index = |a: usize, b: usize| {
        let e = (a.min(b), a.max(b));
        grid.edges().iter().position(|&x| x == e).expect("tree edge is a grid edge")
    };
    let mut beta = vec![vec![0.0; n]; plan.depth];
    let mut gamma = vec![vec![0.0; grid.edge_count()]; plan.depth];
    for (t, layer) in plan.layers.iter().enumerate() {
        for &(parent, child) in layer {
            gamma[t][edge_index(parent, child)] = PI / 4.0;
            beta[t][child] = if w.bit(parent) == w.bit(child) {
                // correlate: -pi/4, stored mod pi
                3.0 * PI / 4.0
            } else {
                PI / 4.0
            };
        }
    }
    ParamSchedule::new(beta, gamma)
}

/// The target state (|w> + |w-bar>)/sqrt(2).
pub fn cat_target(w: &BitString) -> Result<StateVector> {
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1usize << w.len()];
    let amp = num_complex::Complex64::new(0.5f64.sqrt(), 0.0);
    amps[w.index() as usize] = amp;
    amps[w.flipped().index() as usize] = amp;
    StateVector::from_amplitudes(w.len(), amps)
}
