//! Problem instances and the grid hardware graph.
//!
//! A [`ProblemGraph`] is the combinatorial instance (for MaxCut: a simple
//! undirected graph, usually 3-regular). A [`Grid`] is the hardware layout:
//! sites indexed row-major with nearest-neighbor couplings. [`BitString`]
//! fixes the one spin convention used everywhere: bit 0 means z = +1, bit 1
//! means z = -1.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on brute-force enumeration (2^28 strings).
pub const ENUMERATION_BUDGET: usize = 28;

/// An `n`-bit computational basis string. Bit `q` of the index is qubit `q`
/// (little-endian); the spin of bit b is `1 - 2b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    n: usize,
    bits: u64,
}

impl BitString {
    /// Builds a string from a raw basis index; bits above `n` are masked off.
    pub fn new(n: usize, bits: u64) -> Self {
        assert!(n >= 1 && n <= 64, "bit string length {n} out of range");
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        BitString { n, bits: bits & mask }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(n, 0)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The basis index this string labels.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.n);
        (self.bits >> i) & 1 == 1
    }

    /// Spin value of bit `i`: +1 for bit 0, -1 for bit 1.
    pub fn spin(&self, i: usize) -> i32 {
        if self.bit(i) {
            -1
        } else {
            1
        }
    }

    /// Global bit flip.
    pub fn flipped(&self) -> Self {
        Self::new(self.n, !self.bits)
    }

    /// Hamming distance to another string of the same length.
    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(self.n, other.n, "bit string lengths differ");
        (self.bits ^ other.bits).count_ones() as usize
    }
}

impl fmt::Display for BitString {
    /// Renders bit 0 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > 64 {
            return Err(Error::InvalidArgument(format!(
                "bit string length {n} out of range [1, 64]"
            )));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "bit string contains non-binary character {c:?}"
                    )))
                }
            }
        }
        Ok(BitString::new(n, bits))
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are normalized to `(lo, hi)` and stored sorted so serialized
/// instances and derived parameter vectors are reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct ProblemGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for ProblemGraph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        ProblemGraph::new(raw.n, raw.edges)
    }
}

impl From<ProblemGraph> for RawGraph {
    fn from(g: ProblemGraph) -> Self {
        RawGraph { n: g.n, edges: g.edges }
    }
}

impl ProblemGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a},{b}) has an endpoint >= {n}"
                )));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", e.0, e.1)));
            }
            normalized.push(e);
        }
        normalized.sort_unstable();
        Ok(ProblemGraph { n, edges: normalized })
    }

    /// The complete graph on 4 vertices, the unique 3-regular graph there.
    pub fn k4() -> Self {
        ProblemGraph::new(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_regular(&self, degree: usize) -> bool {
        (0..self.n).all(|v| self.degree(v) == degree)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges.binary_search(&e).is_ok()
    }

    /// Number of edges cut by `z`.
    pub fn cut_size(&self, z: &BitString) -> Result<usize> {
        if z.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: z.len() });
        }
        let bits = z.index();
        Ok(self
            .edges
            .iter()
            .filter(|&&(a, b)| ((bits >> a) ^ (bits >> b)) & 1 == 1)
            .count())
    }

    /// MaxCut objective: sum over edges of (1 - z_i z_j)/2.
    pub fn maxcut(&self, z: &BitString) -> Result<f64> {
        Ok(self.cut_size(z)? as f64)
    }

    /// Exact maximum cut by enumeration, with the full set of maximizing
    /// strings (closed under global bit flip).
    pub fn brute_force_maxcut(&self) -> Result<(f64, Vec<BitString>)> {
        if self.n > ENUMERATION_BUDGET {
            return Err(Error::EnumerationBudget { n: self.n, max: ENUMERATION_BUDGET });
        }
        // Fix the top bit to 0; the flip-symmetric half is added back below.
        let half = 1u64 << (self.n - 1);
        let mut best = 0usize;
        let mut arg: Vec<u64> = vec![0];
        for mask in 1..half {
            let mut cut = 0usize;
            for &(a, b) in &self.edges {
                cut += (((mask >> a) ^ (mask >> b)) & 1) as usize;
            }
            if cut > best {
                best = cut;
                arg.clear();
                arg.push(mask);
            } else if cut == best {
                arg.push(mask);
            }
        }
        let mut maximizers: Vec<BitString> = Vec::with_capacity(arg.len() * 2);
        for mask in arg {
            maximizers.push(BitString::new(self.n, mask));
            maximizers.push(BitString::new(self.n, mask).flipped());
        }
        maximizers.sort_unstable();
        Ok((best as f64, maximizers))
    }
}

/// Generates a simple degree-regular graph via the configuration (pairing)
/// model with rejection of self-loops and multi-edges. Deterministic for a
/// fixed seed.
pub fn random_regular_graph(n: usize, degree: usize, seed: u64) -> Result<ProblemGraph> {
    if degree == 0 || n <= degree {
        return Err(Error::InvalidGraph(format!(
            "regular graph needs n > degree >= 1, got n={n}, degree={degree}"
        )));
    }
    if (n * degree) % 2 != 0 {
        return Err(Error::InvalidGraph(format!(
            "n*degree must be even, got n={n}, degree={degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
    const MAX_ATTEMPTS: usize = 10_000;
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(n * degree / 2);
        let mut edges = Vec::with_capacity(n * degree / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b {
                continue 'attempt;
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                continue 'attempt;
            }
            edges.push(e);
        }
        return ProblemGraph::new(n, edges);
    }
    Err(Error::InvalidGraph(format!(
        "configuration model failed to produce a simple graph after {MAX_ATTEMPTS} attempts"
    )))
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    rows: usize,
    cols: usize,
}

/// Rectangular lattice of qubit sites with nearest-neighbor edges.
///
/// Sites are indexed row-major (`site = r*cols + c`). The canonical edge
/// order is all horizontal edges row by row, then all vertical edges row by
/// row; parameter vectors serialize in this order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct Grid {
    rows: usize,
    cols: usize,
    #[serde(skip)]
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGrid> for Grid {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        Grid::new(raw.rows, raw.cols)
    }
}

impl From<Grid> for RawGrid {
    fn from(g: Grid) -> Self {
        RawGrid { rows: g.rows, cols: g.cols }
    }
}

impl Grid {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        let site = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::with_capacity(rows * (cols - 1) + (rows - 1) * cols);
        for r in 0..rows {
            for c in 0..cols - 1 {
                edges.push((site(r, c), site(r, c + 1)));
            }
        }
        for r in 0..rows - 1 {
            for c in 0..cols {
                edges.push((site(r, c), site(r + 1, c)));
            }
        }
        Ok(Grid { rows, cols, edges })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn site_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order (horizontal by row, then vertical by row).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn site(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        debug_assert!(site < self.site_count());
        (site / self.cols, site % self.cols)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.site_count() {
            return Err(Error::InvalidSite { site, count: self.site_count() });
        }
        Ok(())
    }

    /// Grid neighbors of a site, ascending.
    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        let (r, c) = self.coords(site);
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push(site - self.cols);
        }
        if c > 0 {
            out.push(site - 1);
        }
        if c + 1 < self.cols {
            out.push(site + 1);
        }
        if r + 1 < self.rows {
            out.push(site + self.cols);
        }
        out.sort_unstable();
        out
    }

    pub fn site_degree(&self, site: usize) -> usize {
        self.neighbors(site).len()
    }

    /// True when the site is not on the border (degree 4).
    pub fn is_interior(&self, site: usize) -> bool {
        let (r, c) = self.coords(site);
        r > 0 && r + 1 < self.rows && c > 0 && c + 1 < self.cols
    }
}
