//! Diagonal objective functions evaluated classically on measured strings.

use crate::embedding::Assignment;
use crate::error::{Error, Result};
use crate::instance::{BitString, ProblemGraph};

/// A real-valued function of computational basis strings, evaluated
/// classically. Measurement produces a string over qubits (grid sites);
/// objectives decide what that string is worth.
pub trait DiagonalObjective {
    fn num_bits(&self) -> usize;

    /// Value on the basis string labelled by `bits` (little-endian).
    fn value(&self, bits: u64) -> f64;

    /// Short descriptive tag for reports.
    fn tag(&self) -> &str;

    fn evaluate(&self, z: &BitString) -> Result<f64> {
        if z.len() != self.num_bits() {
            return Err(Error::LengthMismatch { expected: self.num_bits(), got: z.len() });
        }
        Ok(self.value(z.index()))
    }
}

/// MaxCut of the problem graph pulled back through an assignment: the
/// measured string lives on grid sites, the objective on problem vertices.
#[derive(Debug, Clone)]
pub struct MaxCutObjective {
    n: usize,
    site_pairs: Vec<(usize, usize)>,
}

impl DiagonalObjective for MaxCutObjective {
    fn num_bits(&self) -> usize {
        self.n
    }

    fn value(&self, bits: u64) -> f64 {
        let mut cut = 0u32;
        for &(a, b) in &self.site_pairs {
            cut += (((bits >> a) ^ (bits >> b)) & 1) as u32;
        }
        f64::from(cut)
    }

    fn tag(&self) -> &str {
        "maxcut"
    }
}

/// Builds the MaxCut objective over qubit strings: problem edge (u, v)
/// compares the bits measured at sites assignment[u] and assignment[v].
pub fn objective_from_graph(
    graph: &ProblemGraph,
    assignment: &Assignment,
) -> Result<MaxCutObjective> {
    if assignment.n() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: assignment.n() });
    }
    let site_pairs = graph
        .edges()
        .iter()
        .map(|&(u, v)| (assignment.site_of(u), assignment.site_of(v)))
        .collect();
    Ok(MaxCutObjective { n: graph.n(), site_pairs })
}

/// Hamming-distance quadratic with target `w`:
/// `-Ham(z,w) * (n - Ham(z,w)) + (n/2)^2`, maximized exactly at w and its
/// global bit flip.
#[derive(Debug, Clone)]
pub struct CQuadObjective {
    w: BitString,
}

pub fn c_quad(w: BitString) -> CQuadObjective {
    CQuadObjective { w }
}

impl CQuadObjective {
    /// The maximum value (n/2)^2, attained at w and w-bar.
    pub fn max_value(&self) -> f64 {
        let half = self.w.len() as f64 / 2.0;
        half * half
    }
}

impl DiagonalObjective for CQuadObjective {
    fn num_bits(&self) -> usize {
        self.w.len()
    }

    fn value(&self, bits: u64) -> f64 {
        let n = self.w.len();
        let ham = (bits ^ self.w.index()).count_ones() as f64;
        let half = n as f64 / 2.0;
        -ham * (n as f64 - ham) + half * half
    }

    fn tag(&self) -> &str {
        "cquad"
    }
}

/// Precomputed table of objective values over all 2^n strings. The drivers
/// wrap their objective in this once per run so repeated expectations cost a
/// single lookup per amplitude.
#[derive(Debug, Clone)]
pub struct TabulatedObjective {
    n: usize,
    values: Vec<f64>,
    tag: String,
}

impl TabulatedObjective {
    pub fn from_objective<O: DiagonalObjective + ?Sized>(objective: &O) -> Result<Self> {
        let n = objective.num_bits();
        if n > 26 {
            return Err(Error::QubitBudget { n, min: 1, max: 26 });
        }
        let values = (0..1u64 << n).map(|bits| objective.value(bits)).collect();
        Ok(TabulatedObjective { n, values, tag: objective.tag().to_string() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl DiagonalObjective for TabulatedObjective {
    fn num_bits(&self) -> usize {
        self.n
    }

    fn value(&self, bits: u64) -> f64 {
        self.values[bits as usize]
    }

    fn tag(&self) -> &str {
        &self.tag
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::random_regular_graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_assignment_matches_plain_maxcut() {
        let g = random_regular_graph(10, 3, 1).unwrap();
        let obj = objective_from_graph(&g, &Assignment::identity(10)).unwrap();
        for bits in (0..1u64 << 10).step_by(37) {
            let z = BitString::new(10, bits);
            assert_eq!(obj.evaluate(&z).unwrap(), g.maxcut(&z).unwrap());
        }
    }

    #[test]
    fn max_is_invariant_under_every_permutation_of_k4() {
        // All 24 assignments of K4 onto 4 sites give the same global max.
        let g = ProblemGraph::k4();
        let perms = {
            let mut out = Vec::new();
            let mut items = [0usize, 1, 2, 3];
            permute(&mut items, 0, &mut out);
            out
        };
        assert_eq!(perms.len(), 24);
        for perm in perms {
            let a = Assignment::new(perm.to_vec()).unwrap();
            let obj = objective_from_graph(&g, &a).unwrap();
            let max = (0..16u64).map(|b| obj.value(b)).fold(f64::MIN, f64::max);
            assert_eq!(max, 4.0);
            // pulled-back value equals maxcut of the relabeled string
            for bits in 0..16u64 {
                let z = BitString::new(4, bits);
                let relabeled = BitString::new(
                    4,
                    (0..4).fold(0u64, |acc, v| {
                        acc | ((u64::from(z.bit(a.site_of(v)))) << v)
                    }),
                );
                assert_eq!(obj.evaluate(&z).unwrap(), g.maxcut(&relabeled).unwrap());
            }
        }
    }

    fn permute(items: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
        if k == 4 {
            out.push(*items);
            return;
        }
        for i in k..4 {
            items.swap(k, i);
            permute(items, k + 1, out);
            items.swap(k, i);
        }
    }

    #[test]
    fn cquad_values() {
        let w = BitString::zeros(4);
        let obj = c_quad(w);
        assert_eq!(obj.evaluate(&w).unwrap(), 4.0); // (n/2)^2
        assert_eq!(obj.evaluate(&w.flipped()).unwrap(), 4.0);
        let z: BitString = "1000".parse().unwrap();
        assert_eq!(obj.evaluate(&z).unwrap(), 1.0); // -1*3 + 4

        let w16 = BitString::zeros(16);
        let obj = c_quad(w16);
        let half: BitString = "1111111100000000".parse().unwrap();
        assert_eq!(obj.evaluate(&half).unwrap(), 0.0); // midpoint
    }

    #[test]
    fn cquad_argmax_is_exactly_w_and_wbar() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [3usize, 8, 12, 16] {
            let w = BitString::new(n, rng.random::<u64>());
            let obj = c_quad(w);
            let max = obj.max_value();
            for z in 0..1u64 << n {
                let v = obj.value(z);
                assert!(v <= max);
                let zb = BitString::new(n, z);
                assert_eq!(v, obj.value(zb.flipped().index()), "flip symmetry");
                if v == max {
                    assert!(zb == w || zb == w.flipped());
                }
            }
        }
    }

    #[test]
    fn objectives_are_integer_valued_for_even_n() {
        let g = random_regular_graph(8, 3, 2).unwrap();
        let obj = objective_from_graph(&g, &Assignment::identity(8)).unwrap();
        let quad = c_quad(BitString::new(8, 0b1011));
        for bits in 0..256u64 {
            assert_eq!(obj.value(bits).fract(), 0.0);
            assert_eq!(quad.value(bits).fract(), 0.0);
        }
    }

    #[test]
    fn tabulated_matches_source() {
        let g = random_regular_graph(8, 3, 3).unwrap();
        let obj = objective_from_graph(&g, &Assignment::identity(8)).unwrap();
        let table = TabulatedObjective::from_objective(&obj).unwrap();
        for bits in 0..256u64 {
            assert_eq!(table.value(bits), obj.value(bits));
        }
        assert_eq!(table.tag(), "maxcut");
    }
}
