//! Closed-form depth-1 expectations for the two-angle grid ansatz, the
//! optimal angle choice, the worst-case approximation-ratio bound, and an
//! exact numeric lightcone evaluator.
//!
//! For a problem edge mapped to grid sites (i, j), the contribution to the
//! expected objective is 1/2 + (-1/2)<Z_i Z_j>. With both endpoints interior
//! (grid degree 4) the second term depends only on the separation class:
//!
//! * Type0: 0
//! * Type1: (1/2) sin(4b) sin(g) cos^3(g)
//! * Type2: -sin^2(2b) sin^2(g) cos^6(g)
//! * Type3: -(1/2) sin^2(2b) sin^2(g) cos^6(g)
//!
//! [`lightcone_expectation`] computes the same quantity exactly for any site
//! pair, border or interior: only gates on edges incident to i or j fail to
//! cancel between the bra and the ket, so the value can be evaluated on the
//! at-most-10-qubit subsystem {i, j} plus neighbors.

use crate::embedding::EdgeClass;
use crate::error::{Error, Result};
use crate::instance::Grid;
use crate::simulator::StateVector;

/// 27/256, the maximum of sin^2(g) cos^6(g), attained at g = pi/6.
pub const LAMBDA: f64 = 27.0 / 256.0;

const PI: f64 = std::f64::consts::PI;

/// A (gamma, beta) pair for the two-angle ansatz, reduced mod pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    gamma: f64,
    beta: f64,
}

impl AnglePair {
    pub fn new(gamma: f64, beta: f64) -> Self {
        assert!(gamma.is_finite() && beta.is_finite(), "angles must be finite");
        AnglePair { gamma: gamma.rem_euclid(PI), beta: beta.rem_euclid(PI) }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// An edge's contribution (-1/2)<Z_i Z_j>; always within [-1/2, 1/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseExpectation {
    pub value: f64,
}

/// Closed-form contribution for an edge whose endpoints are both interior.
pub fn interior_expectation(case: EdgeClass, angles: AnglePair) -> CaseExpectation {
    let g = angles.gamma();
    let b = angles.beta();
    let value = match case {
        EdgeClass::Type0 => 0.0,
        EdgeClass::Type1 => 0.5 * (4.0 * b).sin() * g.sin() * g.cos().powi(3),
        EdgeClass::Type2 => -(2.0 * b).sin().powi(2) * g.sin().powi(2) * g.cos().powi(6),
        EdgeClass::Type3 => -0.5 * (2.0 * b).sin().powi(2) * g.sin().powi(2) * g.cos().powi(6),
    };
    CaseExpectation { value }
}

/// Expected objective m/2 + m1 F1 + m2 F2 + m3 F3 for an interior census.
pub fn p1_objective_estimate(
    m: usize,
    counts: (usize, usize, usize),
    angles: AnglePair,
) -> Result<f64> {
    let (m1, m2, m3) = counts;
    if m1 + m2 + m3 > m {
        return Err(Error::CountsExceedEdges { m, sum: m1 + m2 + m3 });
    }
    let f1 = interior_expectation(EdgeClass::Type1, angles).value;
    let f2 = interior_expectation(EdgeClass::Type2, angles).value;
    let f3 = interior_expectation(EdgeClass::Type3, angles).value;
    Ok(m as f64 / 2.0 + m1 as f64 * f1 + m2 as f64 * f2 + m3 as f64 * f3)
}

/// Maximizer of m1 F1 + m2 F2 + m3 F3 over the two angles.
///
/// gamma* = pi/6; beta* = (1/4) atan(m1 / (m' sqrt(lambda))) with
/// m' = m2 + m3/2 (beta* = pi/8 when m' = 0), and the maximum equals
/// (1/2) [sqrt(m1^2 lambda + m'^2 lambda^2) - m' lambda].
pub fn optimal_angles(m1: usize, m2: usize, m3: usize) -> Result<(AnglePair, f64)> {
    if m1 == 0 && m2 == 0 && m3 == 0 {
        return Err(Error::AllZeroCounts);
    }
    let m1 = m1 as f64;
    let m_prime = m2 as f64 + 0.5 * m3 as f64;
    let beta = if m_prime == 0.0 {
        PI / 8.0
    } else {
        0.25 * (m1 / (m_prime * LAMBDA.sqrt())).atan()
    };
    let value = 0.5
        * ((m1 * m1 * LAMBDA + m_prime * m_prime * LAMBDA * LAMBDA).sqrt() - m_prime * LAMBDA);
    Ok((AnglePair::new(PI / 6.0, beta), value))
}

/// Worst-case approximation-ratio lower bound:
/// 1/2 + (1/2m) [sqrt(m1^2 lambda + m'^2 lambda^2) - m' lambda].
pub fn ratio_lower_bound(m: usize, m1: f64, m_prime: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::ZeroEdges);
    }
    if m1 < 0.0 || m_prime < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "edge-type weights must be nonnegative, got m1={m1}, m'={m_prime}"
        )));
    }
    let gain =
        (m1 * m1 * LAMBDA + m_prime * m_prime * LAMBDA * LAMBDA).sqrt() - m_prime * LAMBDA;
    Ok(0.5 + gain / (2.0 * m as f64))
}

/// Exact (-1/2)<Z_i Z_j> in the two-angle grid state, for any distinct site
/// pair including border sites.
///
/// Gates commute out of the expectation unless their edge touches i or j, so
/// the value is computed on the restricted system {i, j} ∪ N(i) ∪ N(j) with
/// only those edges applied, and X rotations on i and j alone (rotations on
/// other qubits commute with Z_i Z_j).
pub fn lightcone_expectation(
    grid: &Grid,
    site_i: usize,
    site_j: usize,
    angles: AnglePair,
) -> Result<CaseExpectation> {
    grid.check_site(site_i)?;
    grid.check_site(site_j)?;
    if site_i == site_j {
        return Err(Error::SameQubit { index: site_i });
    }

    let mut sites: Vec<usize> = vec![site_i, site_j];
    sites.extend(grid.neighbors(site_i));
    sites.extend(grid.neighbors(site_j));
    sites.sort_unstable();
    sites.dedup();
    let local = |site: usize| sites.binary_search(&site).expect("site in subsystem");

    let mut state = StateVector::plus_state(sites.len())?;
    for &(a, b) in grid.edges() {
        if a == site_i || a == site_j || b == site_i || b == site_j {
            state.apply_zz_phase(local(a), local(b), angles.gamma() / 2.0)?;
        }
    }
    state.apply_x_rotation(local(site_i), angles.beta())?;
    state.apply_x_rotation(local(site_j), angles.beta())?;

    let value = -0.5 * state.zz_expectation(local(site_i), local(site_j))?;
    Ok(CaseExpectation { value })
}
