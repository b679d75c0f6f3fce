//! Assigning problem vertices to grid sites.
//!
//! The pipeline has two stages. [`greedy_segments`] covers a 3-regular graph
//! with vertex-disjoint paths of 2-4 vertices (plus leftover isolated
//! vertices), selecting at least n/2 problem edges. [`zigzag_assignment`]
//! lays those paths consecutively along the boustrophedon site order of the
//! grid, so every selected edge lands on grid-adjacent sites.
//!
//! [`classify_pair`] buckets a mapped edge by grid separation:
//!
//! * `Type1` — one horizontal or one vertical edge apart,
//! * `Type2` — one horizontal and one vertical edge apart,
//! * `Type3` — two horizontal or two vertical edges apart,
//! * `Type0` — anything farther.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Grid, ProblemGraph};

/// Grid-separation class of a site pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    Type0,
    Type1,
    Type2,
    Type3,
}

/// A path of 2-4 problem vertices; consecutive entries are joined by a
/// problem edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    vertices: Vec<usize>,
}

impl Segment {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Output of the greedy pairing: disjoint segments, leftover isolated
/// vertices, and the number of problem edges selected (a lower bound on the
/// Type1 census after zigzag placement).
#[derive(Debug, Clone)]
pub struct SegmentCover {
    pub segments: Vec<Segment>,
    pub isolated: Vec<usize>,
    pub selected_edges: usize,
}

/// Bijection between problem vertices and grid sites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Assignment {
    to_site: Vec<usize>,
    to_vertex: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Assignment {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Assignment::new(v)
    }
}

impl From<Assignment> for Vec<usize> {
    fn from(a: Assignment) -> Self {
        a.to_site
    }
}

impl Assignment {
    /// Builds from the forward map `to_site[vertex] = site`, validating that
    /// it is a permutation of `0..n`.
    pub fn new(to_site: Vec<usize>) -> Result<Self> {
        let n = to_site.len();
        let mut to_vertex = vec![usize::MAX; n];
        for (v, &s) in to_site.iter().enumerate() {
            if s >= n {
                return Err(Error::InvalidAssignment(format!(
                    "site {s} out of range for {n} vertices"
                )));
            }
            if to_vertex[s] != usize::MAX {
                return Err(Error::InvalidAssignment(format!("site {s} assigned twice")));
            }
            to_vertex[s] = v;
        }
        Ok(Assignment { to_site, to_vertex })
    }

    pub fn identity(n: usize) -> Self {
        Assignment { to_site: (0..n).collect(), to_vertex: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.to_site.len()
    }

    pub fn site_of(&self, vertex: usize) -> usize {
        self.to_site[vertex]
    }

    pub fn vertex_at(&self, site: usize) -> usize {
        self.to_vertex[site]
    }

    pub fn to_site(&self) -> &[usize] {
        &self.to_site
    }
}

/// Edge-type census of an embedded instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCensus {
    pub m0: usize,
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
}

impl TypeCensus {
    pub fn total(&self) -> usize {
        self.m0 + self.m1 + self.m2 + self.m3
    }

    /// m' = m2 + m3/2, the weight of the negative-contribution types.
    pub fn m_prime(&self) -> f64 {
        self.m2 as f64 + 0.5 * self.m3 as f64
    }
}

/// Covers a 3-regular graph with disjoint path segments.
///
/// Phase 1 builds a maximal matching, scanning vertices in seeded-random
/// order and pairing each with its lowest-index unmatched neighbor. Phase 2
/// scans the remaining vertices in index order and attaches each to the
/// first matched neighbor that has not already received an attachment.
/// Every attachment extends a pair into a path of 3, then 4 vertices, so
/// segments never exceed 4 vertices and the number of selected edges is at
/// least n/2.
pub fn greedy_segments(graph: &ProblemGraph, seed: u64) -> Result<SegmentCover> {
    if !graph.is_regular(3) {
        return Err(Error::InvalidGraph("greedy pairing requires a 3-regular graph".into()));
    }
    let n = graph.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    const UNMATCHED: usize = usize::MAX;
    let mut partner = vec![UNMATCHED; n];
    for &v in &order {
        if partner[v] != UNMATCHED {
            continue;
        }
        if let Some(&u) = graph.neighbors(v).iter().find(|&&u| partner[u] == UNMATCHED) {
            partner[v] = u;
            partner[u] = v;
        }
    }

    // Phase 2: attach leftover vertices; each matched endpoint accepts at
    // most one attachment and each leftover vertex attaches at most once.
    let mut attached_to = vec![UNMATCHED; n]; // matched vertex -> leftover vertex
    let mut attachment_count = 0usize;
    for v in 0..n {
        if partner[v] != UNMATCHED {
            continue;
        }
        for u in graph.neighbors(v) {
            if partner[u] != UNMATCHED && attached_to[u] == UNMATCHED {
                attached_to[u] = v;
                attachment_count += 1;
                break;
            }
        }
    }

    let mut in_segment = vec![false; n];
    let mut segments = Vec::new();
    let mut matched_pairs = 0usize;
    for a in 0..n {
        let b = partner[a];
        if b == UNMATCHED || b < a {
            continue;
        }
        matched_pairs += 1;
        let mut path = Vec::with_capacity(4);
        if attached_to[a] != UNMATCHED {
            path.push(attached_to[a]);
        }
        path.push(a);
        path.push(b);
        if attached_to[b] != UNMATCHED {
            path.push(attached_to[b]);
        }
        for &v in &path {
            in_segment[v] = true;
        }
        segments.push(Segment { vertices: path });
    }
    let isolated: Vec<usize> = (0..n).filter(|&v| !in_segment[v]).collect();

    Ok(SegmentCover { segments, isolated, selected_edges: matched_pairs + attachment_count })
}

/// Boustrophedon site order: row 0 left to right, row 1 right to left, and
/// so on. Consecutive positions are always grid-adjacent.
fn zigzag_order(grid: &Grid) -> Vec<usize> {
    let mut order = Vec::with_capacity(grid.site_count());
    for r in 0..grid.rows() {
        if r % 2 == 0 {
            for c in 0..grid.cols() {
                order.push(grid.site(r, c));
            }
        } else {
            for c in (0..grid.cols()).rev() {
                order.push(grid.site(r, c));
            }
        }
    }
    order
}

/// Places segments consecutively along the zigzag site order starting at the
/// top-left corner, then fills the remaining sites with isolated vertices.
/// Intra-segment edges always land on grid-adjacent sites.
pub fn zigzag_assignment(
    segments: &[Segment],
    isolated: &[usize],
    grid: &Grid,
) -> Result<Assignment> {
    if grid.cols() < 2 {
        return Err(Error::NarrowGrid { cols: grid.cols() });
    }
    let total: usize = segments.iter().map(Segment::len).sum::<usize>() + isolated.len();
    if total != grid.site_count() {
        return Err(Error::LengthMismatch { expected: grid.site_count(), got: total });
    }
    let order = zigzag_order(grid);
    let mut to_site = vec![usize::MAX; total];
    let mut cursor = 0usize;
    for segment in segments {
        for &v in segment.vertices() {
            to_site[v] = order[cursor];
            cursor += 1;
        }
    }
    for &v in isolated {
        to_site[v] = order[cursor];
        cursor += 1;
    }
    Assignment::new(to_site)
}

/// Classifies the grid separation of two distinct sites.
pub fn classify_pair(grid: &Grid, site_u: usize, site_v: usize) -> Result<EdgeClass> {
    grid.check_site(site_u)?;
    grid.check_site(site_v)?;
    if site_u == site_v {
        return Err(Error::SameQubit { index: site_u });
    }
    let (ru, cu) = grid.coords(site_u);
    let (rv, cv) = grid.coords(site_v);
    let dr = ru.abs_diff(rv);
    let dc = cu.abs_diff(cv);
    Ok(match (dr, dc) {
        (0, 1) | (1, 0) => EdgeClass::Type1,
        (1, 1) => EdgeClass::Type2,
        (0, 2) | (2, 0) => EdgeClass::Type3,
        _ => EdgeClass::Type0,
    })
}

/// Census of problem-edge separations under an assignment.
pub fn type_counts(
    grid: &Grid,
    assignment: &Assignment,
    graph: &ProblemGraph,
) -> Result<TypeCensus> {
    if assignment.n() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: assignment.n() });
    }
    if assignment.n() != grid.site_count() {
        return Err(Error::LengthMismatch { expected: grid.site_count(), got: assignment.n() });
    }
    let mut census = TypeCensus { m0: 0, m1: 0, m2: 0, m3: 0 };
    for &(a, b) in graph.edges() {
        match classify_pair(grid, assignment.site_of(a), assignment.site_of(b))? {
            EdgeClass::Type0 => census.m0 += 1,
            EdgeClass::Type1 => census.m1 += 1,
            EdgeClass::Type2 => census.m2 += 1,
            EdgeClass::Type3 => census.m3 += 1,
        }
    }
    Ok(census)
}

/// Convenience pipeline: greedy segments followed by zigzag placement.
pub fn greedy_embed(graph: &ProblemGraph, grid: &Grid, seed: u64) -> Result<Assignment> {
    let cover = greedy_segments(graph, seed)?;
    zigzag_assignment(&cover.segments, &cover.isolated, grid)
}
