//! The pentagon inequality in closed form: the explicit three-dimensional
//! vector realization saturating it, verification of orthonormal
//! representations, and the odd-cycle quantum bounds in both the
//! probability (`beta`) and correlation (`beta'`) conventions.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, fabs, sin, sqrt};

use crate::graph::Graph;
use crate::linalg::{sym_eigen, Mat};

const PI: f64 = core::f64::consts::PI;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KcbsError {
    /// Odd-cycle bounds need an odd `n >= 5`.
    BadCycleLength {
        n: usize,
    },
    /// `correlation_form` needs `n >= 3`.
    CycleTooShort {
        n: usize,
    },
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
}

impl core::fmt::Display for KcbsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KcbsError::BadCycleLength { n } => {
                write!(f, "odd-cycle bound needs odd n >= 5, got {n}")
            }
            KcbsError::CycleTooShort { n } => write!(f, "need n >= 3, got {n}"),
            KcbsError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "representation has {got} vectors, graph has {expected} vertices"
                )
            }
        }
    }
}

impl core::error::Error for KcbsError {}

/// Unit vectors, one per graph vertex, orthogonal across edges, plus the
/// handle (state) vector they are measured against.
#[derive(Clone, Debug)]
pub struct OrthonormalRepresentation {
    pub vectors: Vec<Vec<f64>>,
    pub handle: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The five pentagon vectors in dimension 3, with the handle `(0, 0, 1)`.
///
/// Vertex `i` pairs with vertex `i+1 mod 5` on an edge of the 5-cycle, and
/// the construction makes consecutive vectors orthogonal: each vector tilts
/// out of the plane by the same amount `sqrt(cos(pi/5))` before
/// normalization, with planar parts at the vertices of a regular pentagon.
pub fn kcbs_vectors() -> OrthonormalRepresentation {
    let r = sqrt(cos(PI / 5.0));
    let norm = 1.0 / sqrt(1.0 + cos(PI / 5.0));
    let planar = |angle: f64, sign: f64| -> Vec<f64> {
        vec![norm * cos(angle), norm * sign * sin(angle), norm * r]
    };
    let vectors = vec![
        vec![norm, 0.0, norm * r],
        planar(4.0 * PI / 5.0, 1.0),
        planar(2.0 * PI / 5.0, -1.0),
        planar(2.0 * PI / 5.0, 1.0),
        planar(4.0 * PI / 5.0, -1.0),
    ];
    OrthonormalRepresentation {
        vectors,
        handle: vec![0.0, 0.0, 1.0],
    }
}

/// Result of checking an orthonormal representation against a graph.
#[derive(Clone, Copy, Debug)]
pub struct OrCheck {
    pub valid: bool,
    /// Largest deviation from unit norm or edge orthogonality.
    pub max_violation: f64,
}

/// Verifies unit norms and adjacency orthogonality within `tol`.
pub fn verify_or(
    g: &Graph,
    or: &OrthonormalRepresentation,
    tol: f64,
) -> Result<OrCheck, KcbsError> {
    if or.vectors.len() != g.n() {
        return Err(KcbsError::DimensionMismatch {
            expected: g.n(),
            got: or.vectors.len(),
        });
    }
    let mut worst = 0.0f64;
    for v in &or.vectors {
        worst = worst.max(fabs(dot(v, v) - 1.0));
    }
    for (i, j) in g.edges() {
        worst = worst.max(fabs(dot(&or.vectors[i], &or.vectors[j])));
    }
    Ok(OrCheck {
        valid: worst <= tol,
        max_violation: worst,
    })
}

/// The two value readings of an orthonormal representation.
#[derive(Clone, Copy, Debug)]
pub struct OrValue {
    /// `sum_i |<handle, v_i>|^2` at the given handle.
    pub handle_value: f64,
    /// Largest eigenvalue of `sum_i v_i v_i^T`: the value at the best
    /// possible handle.
    pub operator_norm: f64,
}

/// Evaluates the representation both at its handle and at the optimal
/// handle (the top eigenvector of the frame operator).
pub fn or_value(or: &OrthonormalRepresentation) -> OrValue {
    let handle_value = or
        .vectors
        .iter()
        .map(|v| {
            let c = dot(&or.handle, v);
            c * c
        })
        .sum();
    let d = or.vectors.first().map_or(0, Vec::len);
    let mut frame = Mat::zeros(d);
    for v in &or.vectors {
        for i in 0..d {
            for j in 0..d {
                frame[(i, j)] += v[i] * v[j];
            }
        }
    }
    let operator_norm = sym_eigen(&frame).map_or(0.0, |e| e.max_value());
    OrValue {
        handle_value,
        operator_norm,
    }
}

/// Closed-form quantum bounds for the odd `n`-cycle inequality:
/// `beta = n cos(pi/n) / (1 + cos(pi/n))` for the sum of probabilities, and
/// `beta' = n - 4 beta` for the sum of correlators, returned as
/// `(beta, beta_prime)`.
///
/// Note on `beta'`: substituting the closed form gives
/// `(n/2) (1 - 3 cos(pi/n)) sec^2(pi/2n)`, which is negative for all odd
/// `n >= 5` (for the pentagon, `5 - 4 sqrt(5) ~ -3.944`).
pub fn odd_cycle_quantum_bound(n: usize) -> Result<(f64, f64), KcbsError> {
    if n < 5 || n % 2 == 0 {
        return Err(KcbsError::BadCycleLength { n });
    }
    let c = cos(PI / n as f64);
    let beta = n as f64 * c / (1.0 + c);
    let sec = 1.0 / cos(PI / (2.0 * n as f64));
    let beta_prime = (n as f64 / 2.0) * (1.0 - 3.0 * c) * sec * sec;
    Ok((beta, beta_prime))
}

/// Converts a probability-form value `beta` on the `n`-cycle into the
/// correlation form `sum <A_i A_{i+1}>` with `A_i = 2 P_i - 1`.
///
/// Valid under exclusivity, where `<P_i P_{i+1}> = 0` on every edge; each
/// correlator is then `1 - 2 p_i - 2 p_{i+1}` and the sum telescopes to
/// `n - 4 beta`. For models violating exclusivity the conversion does not
/// apply.
pub fn correlation_form(beta: f64, n: usize) -> Result<f64, KcbsError> {
    if n < 3 {
        return Err(KcbsError::CycleTooShort { n });
    }
    Ok(n as f64 - 4.0 * beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn vectors_are_unit_and_cyclically_orthogonal() {
        let or = kcbs_vectors();
        for v in &or.vectors {
            close(dot(v, v), 1.0, 1e-12);
        }
        for i in 0..5 {
            close(dot(&or.vectors[i], &or.vectors[(i + 1) % 5]), 0.0, 1e-12);
        }
        // non-adjacent pairs are not orthogonal
        assert!(fabs(dot(&or.vectors[0], &or.vectors[2])) > 0.1);
    }

    #[test]
    fn vectors_represent_the_pentagon() {
        let g = Graph::cycle(5).unwrap();
        let check = verify_or(&g, &kcbs_vectors(), 1e-10).unwrap();
        assert!(check.valid, "violation {}", check.max_violation);
    }

    #[test]
    fn degenerate_representation_rejected() {
        let g = Graph::cycle(5).unwrap();
        let or = OrthonormalRepresentation {
            vectors: vec![vec![1.0, 0.0, 0.0]; 5],
            handle: vec![1.0, 0.0, 0.0],
        };
        let check = verify_or(&g, &or, 1e-10).unwrap();
        assert!(!check.valid);
        close(check.max_violation, 1.0, 1e-12);
    }

    #[test]
    fn empty_graph_accepts_any_unit_vectors() {
        let g = Graph::empty(3);
        let or = OrthonormalRepresentation {
            vectors: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            handle: vec![1.0, 0.0, 0.0],
        };
        assert!(verify_or(&g, &or, 1e-10).unwrap().valid);
    }

    #[test]
    fn pentagon_value_is_sqrt5_both_ways() {
        let v = or_value(&kcbs_vectors());
        close(v.handle_value, sqrt(5.0), 1e-9);
        close(v.operator_norm, sqrt(5.0), 1e-9);
    }

    #[test]
    fn single_vector_value() {
        let or = OrthonormalRepresentation {
            vectors: vec![vec![0.6, 0.8]],
            handle: vec![0.6, 0.8],
        };
        let v = or_value(&or);
        close(v.handle_value, 1.0, 1e-12);
        close(v.operator_norm, 1.0, 1e-12);
    }

    #[test]
    fn complete_basis_value() {
        // frame operator of the standard basis is the identity
        let or = OrthonormalRepresentation {
            vectors: vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            handle: vec![sqrt(0.5), 0.5, 0.5],
        };
        let v = or_value(&or);
        close(v.handle_value, 1.0, 1e-12);
        close(v.operator_norm, 1.0, 1e-12);
    }

    #[test]
    fn pentagon_bounds() {
        let (beta, beta_prime) = odd_cycle_quantum_bound(5).unwrap();
        close(beta, sqrt(5.0), 1e-12);
        close(beta_prime, 5.0 - 4.0 * sqrt(5.0), 1e-12);
    }

    #[test]
    fn beta_prime_identity() {
        // the closed form equals n - 4 beta for all odd cycles
        for n in (5..=15).step_by(2) {
            let (beta, beta_prime) = odd_cycle_quantum_bound(n).unwrap();
            close(beta_prime, n as f64 - 4.0 * beta, 1e-9);
        }
    }

    #[test]
    fn beta_over_n_tends_to_half() {
        let (beta, _) = odd_cycle_quantum_bound(10001).unwrap();
        close(beta / 10001.0, 0.5, 1e-7);
    }

    #[test]
    fn rejects_bad_cycle_lengths() {
        assert!(odd_cycle_quantum_bound(3).is_err());
        assert!(odd_cycle_quantum_bound(6).is_err());
        assert!(odd_cycle_quantum_bound(4).is_err());
    }

    #[test]
    fn correlation_form_values() {
        close(correlation_form(2.0, 5).unwrap(), -3.0, 1e-12);
        close(
            correlation_form(sqrt(5.0), 5).unwrap(),
            5.0 - 4.0 * sqrt(5.0),
            1e-12,
        );
        close(correlation_form(0.0, 7).unwrap(), 7.0, 1e-12);
        assert!(correlation_form(1.0, 2).is_err());
    }

    #[test]
    fn kcbs_correlators() {
        // each correlator 1 - 2 p_i - 2 p_{i+1} at the pentagon point equals
        // -(3 cos(pi/5) - 1) sec^2(pi/10) / 2
        let or = kcbs_vectors();
        let p: Vec<f64> = or
            .vectors
            .iter()
            .map(|v| {
                let c = dot(&or.handle, v);
                c * c
            })
            .collect();
        let sec = 1.0 / cos(PI / 10.0);
        let expected = -(3.0 * cos(PI / 5.0) - 1.0) * sec * sec / 2.0;
        for i in 0..5 {
            let corr = 1.0 - 2.0 * p[i] - 2.0 * p[(i + 1) % 5];
            close(corr, expected, 1e-9);
        }
    }
}
