//! Dense statevector engine for the grid ansatz.
//!
//! Amplitudes are indexed little-endian: qubit `q` is bit `q` of the basis
//! index. The gate set is exactly what the layered ansatz needs: X rotations
//! `exp(-i beta X)` and diagonal ZZ phases `exp(+i gamma Z_a Z_b)`. A
//! [`ParamSchedule`] holds `p` layers, each with one beta per qubit and one
//! gamma per coupling edge (canonical edge order); a layer applies all ZZ
//! phases first, then all X rotations.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{BitString, Grid};
use crate::objective::DiagonalObjective;

/// Memory budget: 2^26 amplitudes (1 GiB).
pub const MAX_QUBITS: usize = 26;

const PI: f64 = std::f64::consts::PI;

fn reduce_mod_pi(angle: f64) -> Result<f64> {
    if !angle.is_finite() {
        return Err(Error::InvalidArgument(format!("angle {angle} is not finite")));
    }
    Ok(angle.rem_euclid(PI))
}

#[derive(Serialize, Deserialize)]
struct RawSchedule {
    p: usize,
    beta: Vec<Vec<f64>>,
    gamma: Vec<Vec<f64>>,
}

/// Parameters of a level-p layered circuit: per layer, one X-rotation angle
/// per qubit and one ZZ angle per coupling edge. Angles are stored reduced
/// mod pi (a pi shift of any single angle changes the state by a global
/// sign only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct ParamSchedule {
    beta: Vec<Vec<f64>>,
    gamma: Vec<Vec<f64>>,
}

impl TryFrom<RawSchedule> for ParamSchedule {
    type Error = Error;
    fn try_from(raw: RawSchedule) -> Result<Self> {
        if raw.beta.len() != raw.p || raw.gamma.len() != raw.p {
            return Err(Error::ScheduleMismatch(format!(
                "p = {} but {} beta layers and {} gamma layers",
                raw.p,
                raw.beta.len(),
                raw.gamma.len()
            )));
        }
        ParamSchedule::new(raw.beta, raw.gamma)
    }
}

impl From<ParamSchedule> for RawSchedule {
    fn from(s: ParamSchedule) -> Self {
        RawSchedule { p: s.beta.len(), beta: s.beta, gamma: s.gamma }
    }
}

impl ParamSchedule {
    /// Builds a schedule from per-layer angle lists, validating that layers
    /// are rectangular and reducing every angle mod pi.
    pub fn new(beta: Vec<Vec<f64>>, gamma: Vec<Vec<f64>>) -> Result<Self> {
        if beta.len() != gamma.len() {
            return Err(Error::ScheduleMismatch(format!(
                "{} beta layers vs {} gamma layers",
                beta.len(),
                gamma.len()
            )));
        }
        let mut beta = beta;
        let mut gamma = gamma;
        let n_qubits = beta_width(&beta);
        let n_edges = gamma_width(&gamma);
        for layer in &mut beta {
            if layer.len() != n_qubits {
                return Err(Error::ScheduleMismatch("ragged beta layers".into()));
            }
            for angle in layer {
                *angle = reduce_mod_pi(*angle)?;
            }
        }
        for layer in &mut gamma {
            if layer.len() != n_edges {
                return Err(Error::ScheduleMismatch("ragged gamma layers".into()));
            }
            for angle in layer {
                *angle = reduce_mod_pi(*angle)?;
            }
        }
        Ok(ParamSchedule { beta, gamma })
    }

    /// The all-zero schedule (identity circuit) with the given shape.
    pub fn zero(p: usize, n_qubits: usize, n_edges: usize) -> Self {
        ParamSchedule { beta: vec![vec![0.0; n_qubits]; p], gamma: vec![vec![0.0; n_edges]; p] }
    }

    /// Depth-1 schedule reproducing the two-angle state: every edge gets
    /// gamma/2 (the ZZ gate convention absorbs the factor 2 relative to the
    /// objective-phase form) and every qubit gets beta. Both inputs are
    /// interpreted mod pi, the canonical domain of the two-angle pair.
    pub fn two_angle(grid: &Grid, gamma: f64, beta: f64) -> Result<Self> {
        let gamma = reduce_mod_pi(gamma)?;
        ParamSchedule::new(
            vec![vec![beta; grid.site_count()]],
            vec![vec![gamma / 2.0; grid.edge_count()]],
        )
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self, layer: usize) -> &[f64] {
        &self.beta[layer]
    }

    pub fn gamma(&self, layer: usize) -> &[f64] {
        &self.gamma[layer]
    }

    /// Hardware shape `(n_qubits, n_edges)`; `None` for the empty schedule.
    pub fn shape(&self) -> Option<(usize, usize)> {
        self.beta.first().map(|b| (b.len(), self.gamma[0].len()))
    }

    fn check_shape(&self, n_qubits: usize, n_edges: usize) -> Result<()> {
        if let Some((nq, ne)) = self.shape() {
            if nq != n_qubits || ne != n_edges {
                return Err(Error::ScheduleMismatch(format!(
                    "schedule is {nq} qubits x {ne} edges, coupling is {n_qubits} x {n_edges}"
                )));
            }
        }
        Ok(())
    }

    /// Extends with identity (all-zero) layers up to depth `p`.
    pub fn padded_to(&self, p: usize) -> Result<Self> {
        if p < self.p() {
            return Err(Error::DepthTooSmall { needed: self.p(), got: p });
        }
        let (nq, ne) = self.shape().unwrap_or((0, 0));
        let mut beta = self.beta.clone();
        let mut gamma = self.gamma.clone();
        beta.resize(p, vec![0.0; nq]);
        gamma.resize(p, vec![0.0; ne]);
        Ok(ParamSchedule { beta, gamma })
    }

    /// Flattens in canonical order: layer-major, betas then gammas.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in 0..self.p() {
            out.extend_from_slice(&self.beta[layer]);
            out.extend_from_slice(&self.gamma[layer]);
        }
        out
    }

    /// Rebuilds from the canonical flat layout.
    pub fn from_flat(n_qubits: usize, n_edges: usize, p: usize, flat: &[f64]) -> Result<Self> {
        let dim = p * (n_qubits + n_edges);
        if flat.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, got: flat.len() });
        }
        let mut beta = Vec::with_capacity(p);
        let mut gamma = Vec::with_capacity(p);
        for layer in 0..p {
            let base = layer * (n_qubits + n_edges);
            beta.push(flat[base..base + n_qubits].to_vec());
            gamma.push(flat[base + n_qubits..base + n_qubits + n_edges].to_vec());
        }
        ParamSchedule::new(beta, gamma)
    }
}

fn beta_width(beta: &[Vec<f64>]) -> usize {
    beta.first().map_or(0, Vec::len)
}

fn gamma_width(gamma: &[Vec<f64>]) -> usize {
    gamma.first().map_or(0, Vec::len)
}

/// 2^n complex amplitudes over computational basis strings.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition over all strings.
    pub fn plus_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitBudget { n, min: 1, max: MAX_QUBITS });
        }
        let amp = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(StateVector { n, amps: vec![amp; 1 << n] })
    }

    /// The computational basis state |z>.
    pub fn basis_state(z: &BitString) -> Result<Self> {
        let n = z.len();
        if n > MAX_QUBITS {
            return Err(Error::QubitBudget { n, min: 1, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[z.index() as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Builds a state from explicit amplitudes (2^n of them required).
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitBudget { n, min: 1, max: MAX_QUBITS });
        }
        if amps.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self, bits: u64) -> Complex64 {
        self.amps[bits as usize]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n {
            return Err(Error::InvalidQubit { index: qubit, n: self.n });
        }
        Ok(())
    }

    /// Applies `exp(-i beta X)` on one qubit.
    pub fn apply_x_rotation(&mut self, qubit: usize, beta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = beta.sin_cos();
        let stride = 1usize << qubit;
        let block = stride << 1;
        let mut base = 0;
        while base < self.amps.len() {
            for i in base..base + stride {
                let a = self.amps[i];
                let b = self.amps[i + stride];
                self.amps[i] = Complex64::new(c * a.re + s * b.im, c * a.im - s * b.re);
                self.amps[i + stride] = Complex64::new(c * b.re + s * a.im, c * b.im - s * a.re);
            }
            base += block;
        }
        Ok(())
    }

    /// Applies the diagonal phase `exp(+i gamma z_a z_b)` with spins read
    /// from the basis index.
    pub fn apply_zz_phase(&mut self, a: usize, b: usize, gamma: f64) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::SameQubit { index: a });
        }
        let (s, c) = gamma.sin_cos();
        let aligned = Complex64::new(c, s);
        let opposed = Complex64::new(c, -s);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if ((idx >> a) ^ (idx >> b)) & 1 == 0 {
                *amp *= aligned;
            } else {
                *amp *= opposed;
            }
        }
        Ok(())
    }

    /// Applies every edge's ZZ phase in one pass (the phases commute, so
    /// this equals applying them one at a time in any order).
    fn apply_zz_layer(&mut self, edges: &[(usize, usize)], gammas: &[f64]) -> Result<()> {
        if edges.len() != gammas.len() {
            return Err(Error::LengthMismatch { expected: edges.len(), got: gammas.len() });
        }
        for (&(a, b), _) in edges.iter().zip(gammas) {
            self.check_qubit(a)?;
            self.check_qubit(b)?;
            if a == b {
                return Err(Error::SameQubit { index: a });
            }
        }
        let total: f64 = gammas.iter().sum();
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            // phase = sum of +g (spins aligned) or -g (opposed) over edges
            let mut opposed = 0.0;
            for (&(a, b), &g) in edges.iter().zip(gammas) {
                opposed += (((idx >> a) ^ (idx >> b)) & 1) as f64 * g;
            }
            let theta = total - 2.0 * opposed;
            *amp *= Complex64::new(theta.cos(), theta.sin());
        }
        Ok(())
    }

    /// <Z_a Z_b> in this state.
    pub fn zz_expectation(&self, a: usize, b: usize) -> Result<f64> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        let mut sum = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            let sign = 1.0 - 2.0 * (((idx >> a) ^ (idx >> b)) & 1) as f64;
            sum += sign * amp.norm_sqr();
        }
        Ok(sum)
    }

    /// Squared overlap |<self|other>|^2 (global-phase insensitive).
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { expected: self.n, got: other.n });
        }
        let inner: Complex64 =
            self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(inner.norm_sqr())
    }

    /// Debug dump: 2^(n+1) little-endian f64 values, interleaved re/im.
    pub fn write_binary<W: Write>(&self, mut writer: W) -> Result<()> {
        for amp in &self.amps {
            writer.write_all(&amp.re.to_le_bytes())?;
            writer.write_all(&amp.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(n: usize, mut reader: R) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::QubitBudget { n, min: 1, max: MAX_QUBITS });
        }
        let mut amps = Vec::with_capacity(1 << n);
        let mut buf = [0u8; 16];
        for _ in 0..1usize << n {
            reader.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Ok(StateVector { n, amps })
    }
}

/// Runs the layered circuit on an arbitrary coupling (qubit count plus edge
/// list in a fixed order): per layer, all ZZ phases then all X rotations.
pub fn prepare_state_on(
    n_qubits: usize,
    edges: &[(usize, usize)],
    schedule: &ParamSchedule,
) -> Result<StateVector> {
    schedule.check_shape(n_qubits, edges.len())?;
    let mut state = StateVector::plus_state(n_qubits)?;
    for layer in 0..schedule.p() {
        state.apply_zz_layer(edges, schedule.gamma(layer))?;
        for (q, &beta) in schedule.beta(layer).iter().enumerate() {
            if beta != 0.0 {
                state.apply_x_rotation(q, beta)?;
            }
        }
    }
    Ok(state)
}

/// Runs the layered circuit on the grid's canonical edge order.
pub fn prepare_state(grid: &Grid, schedule: &ParamSchedule) -> Result<StateVector> {
    prepare_state_on(grid.site_count(), grid.edges(), schedule)
}

/// Exact expectation of a diagonal objective: sum of |amp(z)|^2 C(z).
pub fn expectation<O: DiagonalObjective + ?Sized>(
    state: &StateVector,
    objective: &O,
) -> Result<f64> {
    if objective.num_bits() != state.n {
        return Err(Error::LengthMismatch { expected: state.n, got: objective.num_bits() });
    }
    let mut sum = 0.0;
    for (idx, amp) in state.amps.iter().enumerate() {
        sum += amp.norm_sqr() * objective.value(idx as u64);
    }
    Ok(sum)
}

/// Exact variance of a diagonal objective in this state.
pub fn variance<O: DiagonalObjective + ?Sized>(state: &StateVector, objective: &O) -> Result<f64> {
    if objective.num_bits() != state.n {
        return Err(Error::LengthMismatch { expected: state.n, got: objective.num_bits() });
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for (idx, amp) in state.amps.iter().enumerate() {
        let p = amp.norm_sqr();
        let v = objective.value(idx as u64);
        mean += p * v;
        second += p * v * v;
    }
    Ok((second - mean * mean).max(0.0))
}

/// Draws `shots` i.i.d. computational-basis samples from |amp|^2.
/// Deterministic stream for a fixed seed.
pub fn measure(state: &StateVector, shots: usize, seed: u64) -> Vec<BitString> {
    let mut cumulative = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for amp in &state.amps {
        acc += amp.norm_sqr();
        cumulative.push(acc);
    }
    if let Some(last) = cumulative.last_mut() {
        *last = 1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..shots)
        .map(|_| {
            let u: f64 = rng.random();
            let idx = cumulative.partition_point(|&c| c <= u);
            BitString::new(state.n, idx as u64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ProblemGraph;
    use crate::objective::{objective_from_graph, DiagonalObjective};
    use crate::embedding::Assignment;
    use rand::Rng;

    fn random_schedule(grid: &Grid, p: usize, seed: u64) -> ParamSchedule {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta = (0..p)
            .map(|_| (0..grid.site_count()).map(|_| rng.random_range(0.0..PI)).collect())
            .collect();
        let gamma = (0..p)
            .map(|_| (0..grid.edge_count()).map(|_| rng.random_range(0.0..PI)).collect())
            .collect();
        ParamSchedule::new(beta, gamma).unwrap()
    }

    #[test]
    fn plus_state_amplitudes() {
        let s = StateVector::plus_state(1).unwrap();
        let v = 0.5f64.sqrt();
        assert!((s.amplitude(0).re - v).abs() < 1e-15);
        assert!((s.amplitude(1).re - v).abs() < 1e-15);

        let s = StateVector::plus_state(2).unwrap();
        for i in 0..4 {
            assert!((s.amplitude(i) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }

        let s = StateVector::plus_state(20).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-10);

        assert!(StateVector::plus_state(0).is_err());
        assert!(StateVector::plus_state(27).is_err());
    }

    #[test]
    fn x_rotation_special_angles() {
        // beta = 0: identity
        let mut s = StateVector::basis_state(&BitString::zeros(1)).unwrap();
        s.apply_x_rotation(0, 0.0).unwrap();
        assert_eq!(s.amplitude(0), Complex64::new(1.0, 0.0));

        // beta = pi/2 on |0>: exp(-i pi X / 2) = -iX, so -i|1>
        let mut s = StateVector::basis_state(&BitString::zeros(1)).unwrap();
        s.apply_x_rotation(0, PI / 2.0).unwrap();
        assert!((s.amplitude(0)).norm() < 1e-15);
        assert!((s.amplitude(1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);

        // beta = pi: global -1
        let mut s = StateVector::plus_state(2).unwrap();
        let before = s.clone();
        s.apply_x_rotation(1, PI).unwrap();
        for i in 0..4 {
            assert!((s.amplitude(i) + before.amplitude(i)).norm() < 1e-12);
        }

        assert!(StateVector::plus_state(2).unwrap().apply_x_rotation(2, 0.1).is_err());
    }

    #[test]
    fn zz_phase_special_cases() {
        let mut s = StateVector::basis_state(&BitString::zeros(2)).unwrap();
        s.apply_zz_phase(0, 1, 0.7).unwrap();
        assert!((s.amplitude(0) - Complex64::new(0.7f64.cos(), 0.7f64.sin())).norm() < 1e-15);

        let z: BitString = "01".parse().unwrap(); // bit 0 = 0, bit 1 = 1 -> opposite spins
        let mut s = StateVector::basis_state(&z).unwrap();
        s.apply_zz_phase(0, 1, 0.7).unwrap();
        assert!(
            (s.amplitude(z.index()) - Complex64::new(0.7f64.cos(), -0.7f64.sin())).norm() < 1e-15
        );

        // gamma = pi: global -1, diagonal expectations unchanged
        let mut s = StateVector::plus_state(3).unwrap();
        s.apply_x_rotation(0, 0.3).unwrap();
        let zz_before = s.zz_expectation(0, 2).unwrap();
        s.apply_zz_phase(0, 2, PI).unwrap();
        assert!((s.zz_expectation(0, 2).unwrap() - zz_before).abs() < 1e-12);

        assert!(StateVector::plus_state(2).unwrap().apply_zz_phase(1, 1, 0.1).is_err());
    }

    #[test]
    fn gates_preserve_norm() {
        let grid = Grid::new(3, 3).unwrap();
        let mut s = StateVector::plus_state(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            if rng.random::<bool>() {
                s.apply_x_rotation(rng.random_range(0..9), rng.random_range(0.0..PI)).unwrap();
            } else {
                let &(a, b) = &grid.edges()[rng.random_range(0..grid.edge_count())];
                s.apply_zz_phase(a, b, rng.random_range(0.0..PI)).unwrap();
            }
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_and_zero_schedules_give_plus_state() {
        let grid = Grid::new(2, 3).unwrap();
        let plus = StateVector::plus_state(6).unwrap();

        let p0 = ParamSchedule::zero(0, 6, 7);
        assert_eq!(prepare_state(&grid, &p0).unwrap(), plus);

        let p4 = ParamSchedule::zero(4, 6, 7);
        let s = prepare_state(&grid, &p4).unwrap();
        assert!((s.fidelity(&plus).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn prepared_states_have_flip_symmetric_amplitudes() {
        // The ansatz commutes with X⊗...⊗X, so amp(z) = amp(z-bar) always.
        let grid = Grid::new(2, 3).unwrap();
        for seed in 0..5u64 {
            let schedule = random_schedule(&grid, 3, seed);
            let s = prepare_state(&grid, &schedule).unwrap();
            let full = (1u64 << 6) - 1;
            for idx in 0..1u64 << 6 {
                let diff = (s.amplitude(idx) - s.amplitude(idx ^ full)).norm();
                assert!(diff < 1e-12);
            }
        }
    }

    #[test]
    fn norm_drift_stays_small_at_160_gates() {
        let grid = Grid::new(4, 4).unwrap();
        let schedule = random_schedule(&grid, 4, 9); // 4 * (24 + 16) = 160 gates
        let s = prepare_state(&grid, &schedule).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zz_gate_order_within_a_layer_is_irrelevant() {
        let grid = Grid::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gammas: Vec<f64> = (0..grid.edge_count()).map(|_| rng.random_range(0.0..PI)).collect();

        let mut a = StateVector::plus_state(6).unwrap();
        a.apply_zz_layer(grid.edges(), &gammas).unwrap();

        let mut order: Vec<usize> = (0..grid.edge_count()).collect();
        use rand::seq::SliceRandom;
        for _ in 0..2 {
            order.shuffle(&mut rng);
            let mut b = StateVector::plus_state(6).unwrap();
            for &e in &order {
                let (x, y) = grid.edges()[e];
                b.apply_zz_phase(x, y, gammas[e]).unwrap();
            }
            for idx in 0..1u64 << 6 {
                assert!((a.amplitude(idx) - b.amplitude(idx)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn schedule_angle_pi_shifts_leave_observables_alone() {
        let grid = Grid::new(2, 2).unwrap();
        let graph = ProblemGraph::k4();
        let obj = objective_from_graph(&graph, &Assignment::identity(4)).unwrap();
        let base = random_schedule(&grid, 2, 5);
        let value = expectation(&prepare_state(&grid, &base).unwrap(), &obj).unwrap();

        let mut flat = base.to_flat();
        for coord in [0usize, 3, 5, 9] {
            let mut shifted = flat.clone();
            shifted[coord] += PI;
            let schedule = ParamSchedule::from_flat(4, 4, 2, &shifted).unwrap();
            let v = expectation(&prepare_state(&grid, &schedule).unwrap(), &obj).unwrap();
            assert!((v - value).abs() < 1e-12, "coord {coord}");
        }
        flat[0] -= PI; // negative shifts reduce correctly too
        let schedule = ParamSchedule::from_flat(4, 4, 2, &flat).unwrap();
        let v = expectation(&prepare_state(&grid, &schedule).unwrap(), &obj).unwrap();
        assert!((v - value).abs() < 1e-12);
    }

    #[test]
    fn expectation_of_maxcut_in_plus_state_is_half_the_edges() {
        let graph = ProblemGraph::k4();
        let obj = objective_from_graph(&graph, &Assignment::identity(4)).unwrap();
        let s = StateVector::plus_state(4).unwrap();
        assert!((expectation(&s, &obj).unwrap() - 3.0).abs() < 1e-12);
        assert!(variance(&s, &obj).unwrap() > 0.0);
    }

    #[test]
    fn expectation_on_basis_state_is_exact_with_zero_variance() {
        let graph = ProblemGraph::k4();
        let obj = objective_from_graph(&graph, &Assignment::identity(4)).unwrap();
        let z: BitString = "0011".parse().unwrap();
        let s = StateVector::basis_state(&z).unwrap();
        assert_eq!(expectation(&s, &obj).unwrap(), 4.0);
        assert_eq!(variance(&s, &obj).unwrap(), 0.0);
    }

    #[test]
    fn two_angle_k4_at_optimal_angles_beats_random_guessing() {
        let grid = Grid::new(2, 2).unwrap();
        let graph = ProblemGraph::k4();
        let obj = objective_from_graph(&graph, &Assignment::identity(4)).unwrap();
        let schedule = ParamSchedule::two_angle(&grid, PI / 3.0, PI / 8.0).unwrap();
        let s = prepare_state(&grid, &schedule).unwrap();
        assert!(expectation(&s, &obj).unwrap() >= 3.0);
    }

    #[test]
    fn measure_is_deterministic_and_respects_the_law() {
        let z: BitString = "0110".parse().unwrap();
        let s = StateVector::basis_state(&z).unwrap();
        let shots = measure(&s, 32, 0);
        assert!(shots.iter().all(|m| *m == z));

        let s = StateVector::plus_state(2).unwrap();
        let shots = measure(&s, 4000, 7);
        assert_eq!(shots, measure(&s, 4000, 7));
        for target in 0..4u64 {
            let freq =
                shots.iter().filter(|m| m.index() == target).count() as f64 / 4000.0;
            assert!((freq - 0.25).abs() < 0.03, "freq({target}) = {freq}");
        }
    }

    #[test]
    fn sample_mean_tracks_exact_expectation() {
        let grid = Grid::new(2, 2).unwrap();
        let graph = ProblemGraph::k4();
        let obj = objective_from_graph(&graph, &Assignment::identity(4)).unwrap();
        let schedule = ParamSchedule::two_angle(&grid, 0.9, 0.4).unwrap();
        let s = prepare_state(&grid, &schedule).unwrap();
        let mu = expectation(&s, &obj).unwrap();
        let sigma = variance(&s, &obj).unwrap().sqrt();
        let shots = 400;
        let mut failures = 0;
        let trials = 1000;
        for t in 0..trials {
            let sample = measure(&s, shots, 100 + t);
            let mean: f64 = sample.iter().map(|z| obj.value(z.index())).sum::<f64>()
                / shots as f64;
            if (mean - mu).abs() > 3.0 * sigma / (shots as f64).sqrt() {
                failures += 1;
            }
        }
        assert!(failures <= 10, "3-sigma band failed {failures}/1000 times");
    }

    #[test]
    fn fidelity_values() {
        let a = StateVector::plus_state(3).unwrap();
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-15);

        let z0 = StateVector::basis_state(&BitString::zeros(3)).unwrap();
        let z1 = StateVector::basis_state(&BitString::new(3, 5)).unwrap();
        assert_eq!(z0.fidelity(&z1).unwrap(), 0.0);
        assert!((a.fidelity(&z0).unwrap() - 0.125).abs() < 1e-15);
        assert!(a.fidelity(&StateVector::plus_state(2).unwrap()).is_err());
    }

    #[test]
    fn binary_dump_round_trips() {
        let grid = Grid::new(2, 2).unwrap();
        let s = prepare_state(&grid, &random_schedule(&grid, 2, 11)).unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 << 4);
        let back = StateVector::read_binary(4, buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn schedule_json_round_trip_and_validation() {
        let grid = Grid::new(1, 2).unwrap();
        let s = ParamSchedule::two_angle(&grid, 1.0, 0.5).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"p":1,"beta":[[0.5,0.5]],"gamma":[[0.5]]}"#);
        let back: ParamSchedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);

        assert!(serde_json::from_str::<ParamSchedule>(
            r#"{"p":2,"beta":[[0.1]],"gamma":[[0.2],[0.3]]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<ParamSchedule>(
            r#"{"p":1,"beta":[[0.1]],"gamma":[[1e999]]}"#
        )
        .is_err());
    }

    #[test]
    fn flat_layout_round_trips() {
        let grid = Grid::new(2, 2).unwrap();
        let schedule = random_schedule(&grid, 3, 13);
        let flat = schedule.to_flat();
        assert_eq!(flat.len(), 3 * (4 + 4));
        let back = ParamSchedule::from_flat(4, 4, 3, &flat).unwrap();
        assert_eq!(back, schedule);
        assert!(ParamSchedule::from_flat(4, 4, 3, &flat[1..]).is_err());
    }

    #[test]
    fn schedule_shape_mismatch_is_rejected() {
        let grid = Grid::new(2, 2).unwrap();
        let schedule = ParamSchedule::zero(1, 5, 4);
        assert!(prepare_state(&grid, &schedule).is_err());
    }
}
