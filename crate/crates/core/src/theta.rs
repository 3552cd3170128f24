//! Quantum-set quantities: the (weighted) Lovász number, membership in the
//! theta body, and linearly constrained optimization over it.
//!
//! The weighted Lovász number is computed from the SDP pair
//!
//! ```text
//!   max <Lambda, T>  s.t.  tr T = 1, T_ij = 0 for i ~ j, T >= 0
//!   min s            s.t.  s I >= S, S_ij = Lambda_ij for i !~ j or i = j
//! ```
//!
//! with `Lambda_ij = sqrt(lambda_i lambda_j)`. The interior-point solver is
//! primal-dual, so a single solve produces both certificates; every result
//! carries them, and [`ThetaCertificate::check`] re-verifies the whole
//! sandwich from scratch.
//!
//! Membership of a probability assignment in the theta body is decided
//! through the moment-matrix characterization: `p` is quantum-attainable
//! exactly when some PSD matrix `M` indexed by `{0} u V` has `M_00 = 1`,
//! `M_ii = M_0i = p_i`, and `M_ij = 0` across edges. The test maximizes the
//! smallest eigenvalue such an `M` can have; a negative optimum yields a
//! separating inequality from the primal side of the same solve.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use crate::classical::{ClassicalError, ProbabilityAssignment, WeightVector};
use crate::graph::Graph;
use crate::linalg::{sym_eigen, Mat};
use crate::sdp::{sdp_solve, BlockMat, SdpError, SdpOptions, SdpProblem, SdpStatus, SparseSym};

#[derive(Clone, Debug)]
pub enum ThetaError {
    Weights(ClassicalError),
    Sdp(SdpError),
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    /// The equality constraints passed to `constrained_theta_max` cannot be
    /// met by any point of `[0, 1]^n`.
    InfeasibleConstraints(String),
}

impl core::fmt::Display for ThetaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ThetaError::Weights(e) => write!(f, "{e}"),
            ThetaError::Sdp(e) => write!(f, "{e}"),
            ThetaError::DimensionMismatch { expected, got } => {
                write!(f, "vector has {got} entries, graph has {expected} vertices")
            }
            ThetaError::InfeasibleConstraints(msg) => {
                write!(f, "infeasible constraint set: {msg}")
            }
        }
    }
}

impl core::error::Error for ThetaError {}

impl From<ClassicalError> for ThetaError {
    fn from(e: ClassicalError) -> Self {
        ThetaError::Weights(e)
    }
}

impl From<SdpError> for ThetaError {
    fn from(e: SdpError) -> Self {
        ThetaError::Sdp(e)
    }
}

/// Primal/dual certificate pair for a (weighted) theta computation, on the
/// full vertex set of the input graph.
#[derive(Clone, Debug)]
pub struct ThetaCertificate {
    /// `<Lambda, T>` at the returned primal matrix.
    pub primal_value: f64,
    /// The dual scalar `s`; an upper bound on the true value at dual
    /// feasibility.
    pub dual_value: f64,
    /// `|primal_value - dual_value|`.
    pub gap: f64,
    /// Primal matrix `T`: PSD, unit trace, zero across edges.
    pub t: Mat,
    /// Dual matrix `S`: agrees with `Lambda` off the edges and on the
    /// diagonal, and `s I - S` is PSD.
    pub s_matrix: Mat,
    pub s_scalar: f64,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub iterations: usize,
    /// False when the solver hit its iteration cap before the targets.
    pub accurate: bool,
}

impl ThetaCertificate {
    /// Re-verifies every certificate invariant from scratch: feasibility of
    /// `T`, feasibility of `(s, S)` including the exact data equalities, and
    /// the primal/dual sandwich. Returns a description of the first failure.
    pub fn check(&self, g: &Graph, weights: &WeightVector, tol: f64) -> Result<(), String> {
        let n = g.n();
        if self.t.n() != n || self.s_matrix.n() != n {
            return Err(format!("certificate dimension {} != graph {n}", self.t.n()));
        }
        if n == 0 {
            return Ok(());
        }
        let w = weights.as_slice();
        let eig_t = sym_eigen(&self.t).ok_or("eigensolve of T failed")?;
        if eig_t.min_value() < -tol {
            return Err(format!("T has eigenvalue {}", eig_t.min_value()));
        }
        if (self.t.trace() - 1.0).abs() > tol {
            return Err(format!("tr T = {}", self.t.trace()));
        }
        let mut slack = Mat::identity(n);
        slack.scale(self.s_scalar);
        slack.add_scaled(&self.s_matrix, -1.0);
        let eig_s = sym_eigen(&slack).ok_or("eigensolve of sI - S failed")?;
        let s_scale = 1.0 + self.s_scalar.abs();
        if eig_s.min_value() < -tol * s_scale {
            return Err(format!("sI - S has eigenvalue {}", eig_s.min_value()));
        }
        for i in 0..n {
            for j in 0..n {
                if g.adjacent(i, j) {
                    if self.t[(i, j)].abs() > tol {
                        return Err(format!("T[{i},{j}] = {} on an edge", self.t[(i, j)]));
                    }
                } else {
                    let lam = sqrt(w[i] * w[j]);
                    if (self.s_matrix[(i, j)] - lam).abs() > tol * (1.0 + lam) {
                        return Err(format!(
                            "S[{i},{j}] = {} but Lambda = {lam}",
                            self.s_matrix[(i, j)]
                        ));
                    }
                }
            }
        }
        if self.gap > tol * (1.0 + self.dual_value.abs()) {
            return Err(format!("gap {} too large", self.gap));
        }
        Ok(())
    }
}

/// Weighted theta value together with its certificate.
#[derive(Clone, Debug)]
pub struct ThetaBound {
    /// Midpoint of the primal and dual optimal values.
    pub value: f64,
    pub certificate: ThetaCertificate,
}

/// Lovász number of a graph: all-ones weighted theta.
pub fn lovasz_theta(g: &Graph, tol: f64) -> Result<ThetaBound, ThetaError> {
    weighted_theta(g, &WeightVector::ones(g.n()), tol)
}

/// Weighted Lovász number, the largest value `sum_i lambda_i p_i` a quantum
/// model can reach.
///
/// Zero-weight vertices make no difference to the optimum (the attainable
/// set is downward closed), so they are removed before the solve and the
/// certificates are re-embedded on the full vertex set afterwards.
pub fn weighted_theta(
    g: &Graph,
    weights: &WeightVector,
    tol: f64,
) -> Result<ThetaBound, ThetaError> {
    let n = g.n();
    if weights.len() != n {
        return Err(ThetaError::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let w = weights.as_slice();
    let kept: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();

    if kept.is_empty() {
        // nothing to optimize; the zero assignment is optimal
        let mut t = Mat::zeros(n);
        if n > 0 {
            for i in 0..n {
                t[(i, i)] = 1.0 / n as f64;
            }
        }
        return Ok(ThetaBound {
            value: 0.0,
            certificate: ThetaCertificate {
                primal_value: 0.0,
                dual_value: 0.0,
                gap: 0.0,
                t,
                s_matrix: Mat::zeros(n),
                s_scalar: 0.0,
                rel_gap: 0.0,
                primal_infeas: 0.0,
                dual_infeas: 0.0,
                iterations: 0,
                accurate: true,
            },
        });
    }

    let sub = g.induced(&kept).expect("kept vertices are a valid subset");
    let ns = sub.n();
    let lam_sub: Vec<f64> = kept.iter().map(|&i| w[i]).collect();

    // primal form: min <-Lambda, T> s.t. tr T = 1, T_ij = 0 on edges
    let mut c = Mat::zeros(ns);
    for i in 0..ns {
        for j in 0..ns {
            c[(i, j)] = -sqrt(lam_sub[i] * lam_sub[j]);
        }
    }
    let mut constraints = Vec::new();
    let mut trace = SparseSym::new();
    for i in 0..ns {
        trace.push(0, i, i, 1.0);
    }
    constraints.push(trace);
    let mut rhs = vec![1.0];
    let sub_edges = sub.edges();
    for &(i, j) in &sub_edges {
        let mut a = SparseSym::new();
        a.push(0, i, j, 1.0);
        constraints.push(a);
        rhs.push(0.0);
    }
    let problem = SdpProblem {
        block_sizes: vec![ns],
        objective: BlockMat { blocks: vec![c] },
        constraints,
        rhs,
    };
    let opts = SdpOptions {
        tol_gap: tol,
        tol_feas: tol.min(1e-9),
        ..SdpOptions::default()
    };
    let sol = sdp_solve(&problem, &opts)?;

    let primal_value = -sol.primal_objective;
    let dual_value = -sol.dual_objective;

    // paper-form dual pieces: s = -y_trace, S = Lambda + sum_e y_e E_e
    let s_scalar = -sol.y[0];
    let mut s_sub = Mat::from_fn(ns, |i, j| sqrt(lam_sub[i] * lam_sub[j]));
    for (k, &(i, j)) in sub_edges.iter().enumerate() {
        s_sub[(i, j)] += sol.y[k + 1];
        s_sub[(j, i)] += sol.y[k + 1];
    }

    // re-embed on the full vertex set; dropped vertices carry zero weight,
    // so zero rows and columns keep both certificates feasible
    let mut t_full = Mat::zeros(n);
    let mut s_full = Mat::zeros(n);
    for (a, &i) in kept.iter().enumerate() {
        for (b, &j) in kept.iter().enumerate() {
            t_full[(i, j)] = sol.x.blocks[0][(a, b)];
            s_full[(i, j)] = s_sub[(a, b)];
        }
    }

    Ok(ThetaBound {
        value: 0.5 * (primal_value + dual_value),
        certificate: ThetaCertificate {
            primal_value,
            dual_value,
            gap: (primal_value - dual_value).abs(),
            t: t_full,
            s_matrix: s_full,
            s_scalar,
            rel_gap: sol.rel_gap,
            primal_infeas: sol.primal_infeas,
            dual_infeas: sol.dual_infeas,
            iterations: sol.iterations,
            accurate: sol.status == SdpStatus::Optimal,
        },
    })
}

/// Outcome of the theta-body membership test.
#[derive(Clone, Debug)]
pub struct ThetaBodyMembership {
    pub inside: bool,
    /// Optimal value of `max { lambda_min(M) : M realizes p }`; `p` is a
    /// member exactly when this is nonnegative (within tolerance).
    pub t_star: f64,
    pub certificate: ThetaBodyCertificate,
    pub rel_gap: f64,
    pub accurate: bool,
}

#[derive(Clone, Debug)]
pub enum ThetaBodyCertificate {
    /// A moment matrix realizing `p` (PSD up to the reported tolerance).
    Moment(Mat),
    /// Inequality `functional . q >= rhs` valid on the whole theta body but
    /// violated by `p` by `margin`.
    Separating {
        functional: Vec<f64>,
        rhs: f64,
        margin: f64,
    },
}

/// Decides whether `p` is attainable by a quantum model of the graph, i.e.
/// lies in the theta body, within `tol`.
///
/// Boundary points at distance below `tol` may be accepted; that is the
/// documented reading of the tolerance.
pub fn theta_body_membership(
    g: &Graph,
    p: &ProbabilityAssignment,
    tol: f64,
) -> Result<ThetaBodyMembership, ThetaError> {
    let n = g.n();
    if p.len() != n {
        return Err(ThetaError::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    if n == 0 {
        return Ok(ThetaBodyMembership {
            inside: true,
            t_star: 0.0,
            certificate: ThetaBodyCertificate::Moment(Mat::zeros(0)),
            rel_gap: 0.0,
            accurate: true,
        });
    }
    let pv = p.as_slice();
    let d = n + 1; // moment matrix indexed by {0} u V

    // fixed part of the moment matrix
    let mut m0 = Mat::zeros(d);
    m0[(0, 0)] = 1.0;
    for i in 0..n {
        m0[(0, i + 1)] = pv[i];
        m0[(i + 1, 0)] = pv[i];
        m0[(i + 1, i + 1)] = pv[i];
    }

    // solver-dual encoding of: max t s.t. M0 + sum_uv m_uv E_uv - t I >= 0,
    // with one free variable per non-adjacent pair
    let mut constraints = Vec::new();
    let mut rhs = Vec::new();
    let mut a_t = SparseSym::new();
    for i in 0..d {
        a_t.push(0, i, i, 1.0);
    }
    constraints.push(a_t);
    rhs.push(1.0);
    for u in 0..n {
        for v in u + 1..n {
            if !g.adjacent(u, v) {
                let mut a = SparseSym::new();
                a.push(0, u + 1, v + 1, -1.0);
                constraints.push(a);
                rhs.push(0.0);
            }
        }
    }
    let problem = SdpProblem {
        block_sizes: vec![d],
        objective: BlockMat { blocks: vec![m0] },
        constraints,
        rhs,
    };
    let opts = SdpOptions {
        tol_gap: (tol * 1e-2).clamp(1e-12, 1e-8),
        tol_feas: 1e-9,
        ..SdpOptions::default()
    };
    let sol = sdp_solve(&problem, &opts)?;

    let t_star = 0.5 * (sol.primal_objective + sol.dual_objective);
    let inside = t_star >= -tol;
    let certificate = if inside {
        // M = S + t I satisfies the data equalities exactly by construction
        let mut moment = sol.s.blocks[0].clone();
        moment.shift_diagonal(sol.y[0]);
        ThetaBodyCertificate::Moment(moment)
    } else {
        // the primal optimum is supported on edges and the first row, so
        // <M0(q), X> >= 0 on the theta body while <M0(p), X> = t* < 0
        let x = &sol.x.blocks[0];
        let functional: Vec<f64> = (0..n)
            .map(|i| x[(i + 1, i + 1)] + 2.0 * x[(0, i + 1)])
            .collect();
        let rhs_val = -x[(0, 0)];
        let at_p: f64 = functional.iter().zip(pv).map(|(a, q)| a * q).sum();
        ThetaBodyCertificate::Separating {
            functional,
            rhs: rhs_val,
            margin: rhs_val - at_p,
        }
    };
    Ok(ThetaBodyMembership {
        inside,
        t_star,
        certificate,
        rel_gap: sol.rel_gap,
        accurate: sol.status == SdpStatus::Optimal,
    })
}

/// Result of maximizing a weighted sum over the theta body intersected with
/// equality constraints on subsets of the probabilities.
#[derive(Clone, Debug)]
pub struct ConstrainedThetaMax {
    pub value: f64,
    /// The maximizing probability assignment (diagonal of the moment
    /// matrix).
    pub probabilities: Vec<f64>,
    pub rel_gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub accurate: bool,
}

/// Maximizes `weights . p` over the theta body subject to
/// `sum_{i in S_k} p_i = target_k` for each `(S_k, target_k)`.
///
/// With no constraints this reduces to [`weighted_theta`] through an
/// entirely different SDP encoding (moment matrix instead of the
/// `Lambda`-form), which the test suite uses as a cross-check. With
/// per-measurement normalization constraints it is the direct route to the
/// normalized quantum value of a Bell functional.
///
/// When a constrained subset is a clique with target 1, every feasible
/// moment matrix is singular: for `u = e_0 - sum_{i in S} e_i`,
/// `u^T M u = 1 - sum_{i in S} p_i = 0` (edges inside the clique vanish),
/// so `M u = 0`. The solve is therefore performed on the reduced face
/// `M = B N B^T` with `B` spanning the complement of those forced null
/// vectors; without the reduction no interior point exists and the duals
/// diverge.
pub fn constrained_theta_max(
    g: &Graph,
    weights: &WeightVector,
    eq_constraints: &[(Vec<usize>, f64)],
    tol: f64,
) -> Result<ConstrainedThetaMax, ThetaError> {
    let n = g.n();
    if weights.len() != n {
        return Err(ThetaError::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    for (subset, target) in eq_constraints {
        if let Some(&v) = subset.iter().find(|&&v| v >= n) {
            return Err(ThetaError::DimensionMismatch {
                expected: n,
                got: v + 1,
            });
        }
        if *target < -1e-12 || *target > subset.len() as f64 + 1e-12 {
            return Err(ThetaError::InfeasibleConstraints(format!(
                "sum over {} probabilities fixed to {target}, outside [0, {}]",
                subset.len(),
                subset.len()
            )));
        }
    }

    let d = n + 1;
    let mut c = Mat::zeros(d);
    for i in 0..n {
        c[(i + 1, i + 1)] = -weights.as_slice()[i];
    }

    // forced null vectors from tight clique constraints
    let is_clique = |subset: &[usize]| -> bool {
        subset
            .iter()
            .enumerate()
            .all(|(k, &i)| subset[k + 1..].iter().all(|&j| g.adjacent(i, j)))
    };
    let mut null_vecs: Vec<Vec<f64>> = Vec::new();
    let mut reduced_away: Vec<bool> = Vec::new();
    for (subset, target) in eq_constraints {
        let forced = (*target - 1.0).abs() <= 1e-14 && is_clique(subset);
        reduced_away.push(forced);
        if forced {
            let mut u = vec![0.0; d];
            u[0] = 1.0;
            for &i in subset {
                u[i + 1] = -1.0;
            }
            null_vecs.push(u);
        }
    }

    let mut constraints = Vec::new();
    let mut rhs = Vec::new();
    // M_00 = 1
    let mut a = SparseSym::new();
    a.push(0, 0, 0, 1.0);
    constraints.push(a);
    rhs.push(1.0);
    // M_0i = M_ii
    for i in 0..n {
        let mut a = SparseSym::new();
        a.push(0, 0, i + 1, 0.5);
        a.push(0, i + 1, i + 1, -1.0);
        constraints.push(a);
        rhs.push(0.0);
    }
    // edges
    for (u, v) in g.edges() {
        let mut a = SparseSym::new();
        a.push(0, u + 1, v + 1, 1.0);
        constraints.push(a);
        rhs.push(0.0);
    }
    // subset sums; those absorbed by the facial reduction become
    // automatic (M u = 0 plus the rows above imply them exactly)
    for ((subset, target), forced) in eq_constraints.iter().zip(&reduced_away) {
        if *forced {
            continue;
        }
        let mut a = SparseSym::new();
        for &i in subset {
            a.push(0, i + 1, i + 1, 1.0);
        }
        constraints.push(a);
        rhs.push(*target);
    }

    let sol;
    let moment: Mat;
    if null_vecs.is_empty() {
        let problem = SdpProblem {
            block_sizes: vec![d],
            objective: BlockMat { blocks: vec![c] },
            constraints,
            rhs,
        };
        let opts = SdpOptions {
            tol_gap: tol,
            tol_feas: tol.min(1e-9),
            ..SdpOptions::default()
        };
        sol = sdp_solve(&problem, &opts)?;
        moment = sol.x.blocks[0].clone();
    } else {
        let basis = complement_basis(d, &null_vecs);
        let r = basis.len();
        // transform objective and constraints onto the face
        let reduce = |m_full: &Mat| -> Mat {
            let mut out = Mat::zeros(r);
            for al in 0..r {
                for be in 0..r {
                    let mut acc = 0.0;
                    for p in 0..d {
                        let bp = basis[al][p];
                        if bp == 0.0 {
                            continue;
                        }
                        let mut inner = 0.0;
                        for q in 0..d {
                            inner += m_full[(p, q)] * basis[be][q];
                        }
                        acc += bp * inner;
                    }
                    out[(al, be)] = acc;
                }
            }
            out.symmetrize();
            out
        };
        let c_red = reduce(&c);
        let mut red_constraints: Vec<SparseSym> = Vec::with_capacity(constraints.len());
        for a in &constraints {
            let mut dense = Mat::zeros(r);
            for e in &a.entries {
                for al in 0..r {
                    for be in 0..r {
                        let t = basis[al][e.row] * basis[be][e.col]
                            + basis[al][e.col] * basis[be][e.row];
                        dense[(al, be)] += e.value * if e.row == e.col { 0.5 * t } else { t };
                    }
                }
            }
            let mut sp = SparseSym::new();
            for al in 0..r {
                for be in al..r {
                    if dense[(al, be)].abs() > 1e-14 {
                        sp.push(0, al, be, dense[(al, be)]);
                    }
                }
            }
            red_constraints.push(sp);
        }
        // drop constraints that became linearly dependent on the face
        let (kept_constraints, kept_rhs) = prune_dependent(&red_constraints, &rhs, r);
        let problem = SdpProblem {
            block_sizes: vec![r],
            objective: BlockMat {
                blocks: vec![c_red],
            },
            constraints: kept_constraints,
            rhs: kept_rhs,
        };
        let opts = SdpOptions {
            tol_gap: tol,
            tol_feas: tol.min(1e-9),
            ..SdpOptions::default()
        };
        sol = sdp_solve(&problem, &opts)?;
        // expand N back to the moment matrix M = B N B^T
        let nmat = &sol.x.blocks[0];
        let mut m_full = Mat::zeros(d);
        for p in 0..d {
            for q in 0..d {
                let mut acc = 0.0;
                for al in 0..r {
                    let bp = basis[al][p];
                    if bp == 0.0 {
                        continue;
                    }
                    for be in 0..r {
                        acc += bp * nmat[(al, be)] * basis[be][q];
                    }
                }
                m_full[(p, q)] = acc;
            }
        }
        m_full.symmetrize();
        moment = m_full;
    }

    if sol.status == SdpStatus::Inaccurate && sol.primal_infeas > 1e-4 {
        return Err(ThetaError::InfeasibleConstraints(String::from(
            "no progress toward primal feasibility; the equality constraints look incompatible with the theta body",
        )));
    }

    // report feasibility against the original, unreduced constraint set
    let probabilities: Vec<f64> = (0..n).map(|i| moment[(i + 1, i + 1)]).collect();
    let mut primal_infeas = sol.primal_infeas;
    for (subset, target) in eq_constraints {
        let s: f64 = subset.iter().map(|&i| probabilities[i]).sum();
        primal_infeas = primal_infeas.max((s - target).abs() / (1.0 + target.abs()));
    }

    Ok(ConstrainedThetaMax {
        value: -0.5 * (sol.primal_objective + sol.dual_objective),
        probabilities,
        rel_gap: sol.rel_gap,
        primal_infeas,
        dual_infeas: sol.dual_infeas,
        accurate: sol.status == SdpStatus::Optimal,
    })
}

/// Orthonormal basis of the orthogonal complement of `span(null_vecs)`,
/// via the eigenvectors of the span's projector (eigenvalue 0 side).
fn complement_basis(d: usize, null_vecs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    // orthonormalize the null vectors
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for v in null_vecs {
        let mut w = v.clone();
        for u in &ortho {
            let c: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= c * ui;
            }
        }
        let norm = sqrt(w.iter().map(|x| x * x).sum::<f64>());
        if norm > 1e-10 {
            for wi in &mut w {
                *wi /= norm;
            }
            ortho.push(w);
        }
    }
    let mut proj = Mat::zeros(d);
    for u in &ortho {
        for i in 0..d {
            for j in 0..d {
                proj[(i, j)] += u[i] * u[j];
            }
        }
    }
    let eig = sym_eigen(&proj).expect("projector eigendecomposition");
    let mut basis = Vec::new();
    for k in 0..d {
        if eig.values[k] < 0.5 {
            basis.push((0..d).map(|i| eig.q[(i, k)]).collect());
        }
    }
    basis
}

/// Greedy maximal linearly independent subset of constraint matrices,
/// judged by incremental Cholesky of their Gram matrix.
fn prune_dependent(constraints: &[SparseSym], rhs: &[f64], r: usize) -> (Vec<SparseSym>, Vec<f64>) {
    let dense: Vec<Mat> = constraints
        .iter()
        .map(|a| {
            let mut m = Mat::zeros(r);
            for e in &a.entries {
                m[(e.row, e.col)] += e.value;
                if e.row != e.col {
                    m[(e.col, e.row)] += e.value;
                }
            }
            m
        })
        .collect();
    let mut kept: Vec<usize> = Vec::new();
    // growing lower-triangular factor of the Gram of the kept set
    let mut l_rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..constraints.len() {
        let gii = dense[i].dot(&dense[i]);
        let cross: Vec<f64> = kept.iter().map(|&j| dense[i].dot(&dense[j])).collect();
        // forward-substitute against the current factor
        let mut w = cross.clone();
        for a in 0..w.len() {
            for b in 0..a {
                let delta = l_rows[a][b] * w[b];
                w[a] -= delta;
            }
            w[a] /= l_rows[a][a];
        }
        let pivot = gii - w.iter().map(|x| x * x).sum::<f64>();
        if pivot > 1e-10 * (1.0 + gii) {
            let mut row = w;
            row.push(sqrt(pivot));
            l_rows.push(row);
            kept.push(i);
        }
    }
    (
        kept.iter().map(|&i| constraints[i].clone()).collect(),
        kept.iter().map(|&i| rhs[i]).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::cos;

    const PI: f64 = core::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn pentagon_theta() {
        let g = Graph::cycle(5).unwrap();
        let r = lovasz_theta(&g, 1e-8).unwrap();
        close(r.value, sqrt(5.0), 1e-7);
        r.certificate
            .check(&g, &WeightVector::ones(5), 1e-7)
            .unwrap();
    }

    #[test]
    fn odd_cycle_closed_form() {
        for n in [5usize, 7, 9, 11] {
            let g = Graph::cycle(n).unwrap();
            let r = lovasz_theta(&g, 1e-8).unwrap();
            let c = cos(PI / n as f64);
            close(r.value, n as f64 * c / (1.0 + c), 1e-6);
        }
    }

    #[test]
    fn complete_and_empty() {
        for n in [2usize, 5] {
            let r = lovasz_theta(&Graph::complete(n), 1e-8).unwrap();
            close(r.value, 1.0, 1e-6);
            let r = lovasz_theta(&Graph::empty(n), 1e-8).unwrap();
            close(r.value, n as f64, 1e-6);
        }
    }

    #[test]
    fn one_hot_weight_gives_one() {
        let g = Graph::cycle(7).unwrap();
        for k in [0usize, 3] {
            let r = weighted_theta(&g, &WeightVector::one_hot(7, k), 1e-8).unwrap();
            close(r.value, 1.0, 1e-7);
            r.certificate
                .check(&g, &WeightVector::one_hot(7, k), 1e-6)
                .unwrap();
        }
    }

    #[test]
    fn weighted_scaling() {
        let g = Graph::cycle(5).unwrap();
        let base = lovasz_theta(&g, 1e-9).unwrap().value;
        for c in [0.25, 3.0, 17.5] {
            let w = WeightVector::new(vec![c; 5]).unwrap();
            let r = weighted_theta(&g, &w, 1e-9).unwrap();
            assert!((r.value - c * base).abs() <= 1e-7 * c * base);
        }
    }

    #[test]
    fn wagner_graph_theta() {
        // the (1,4)-circulant on 8 vertices
        let g = Graph::circulant(8, &[1, 4]).unwrap();
        let r = lovasz_theta(&g, 1e-8).unwrap();
        close(r.value, 2.0 + sqrt(2.0), 1e-6);
        r.certificate
            .check(&g, &WeightVector::ones(8), 1e-7)
            .unwrap();
    }

    #[test]
    fn membership_kcbs_point_accepted() {
        let g = Graph::cycle(5).unwrap();
        let v = 1.0 / sqrt(5.0);
        let p = ProbabilityAssignment::new(vec![v; 5]).unwrap();
        let m = theta_body_membership(&g, &p, 1e-8).unwrap();
        assert!(m.inside, "t* = {}", m.t_star);
    }

    #[test]
    fn membership_uniform_half_rejected() {
        let g = Graph::cycle(5).unwrap();
        let p = ProbabilityAssignment::new(vec![0.5; 5]).unwrap();
        let m = theta_body_membership(&g, &p, 1e-8).unwrap();
        assert!(!m.inside);
        let ThetaBodyCertificate::Separating {
            functional,
            rhs,
            margin,
        } = &m.certificate
        else {
            panic!("expected separation");
        };
        assert!(*margin > 0.0);
        // the inequality must cut off p
        let at_p: f64 = functional.iter().map(|a| a * 0.5).sum();
        assert!(at_p < rhs - 1e-10);
        // spot-check validity on theta-body members: vertices of the
        // classical polytope are quantum-attainable
        for set in [vec![], vec![0], vec![1, 3], vec![2, 4]] {
            let mut q = vec![0.0; 5];
            for &i in &set {
                q[i] = 1.0;
            }
            let at_q: f64 = functional.iter().zip(&q).map(|(a, b)| a * b).sum();
            assert!(at_q >= rhs - 1e-7, "set {set:?}: {at_q} < {rhs}");
        }
    }

    #[test]
    fn membership_one_hot_accepted() {
        let g = Graph::complete(4);
        for k in 0..4 {
            let mut v = vec![0.0; 4];
            v[k] = 1.0;
            let p = ProbabilityAssignment::new(v).unwrap();
            assert!(theta_body_membership(&g, &p, 1e-8).unwrap().inside);
        }
    }

    #[test]
    fn constrained_reduces_to_theta() {
        let g = Graph::cycle(5).unwrap();
        let r = constrained_theta_max(&g, &WeightVector::ones(5), &[], 1e-9).unwrap();
        close(r.value, sqrt(5.0), 1e-6);
    }

    #[test]
    fn constrained_rejects_impossible_targets() {
        let g = Graph::cycle(5).unwrap();
        let bad = [(vec![0usize, 1], 3.0)];
        assert!(matches!(
            constrained_theta_max(&g, &WeightVector::ones(5), &bad, 1e-8),
            Err(ThetaError::InfeasibleConstraints(_))
        ));
    }

    #[test]
    fn corner_property_on_dominated_points() {
        let g = Graph::cycle(5).unwrap();
        let v = 1.0 / sqrt(5.0);
        // dominated by the KCBS point
        let q = ProbabilityAssignment::new(vec![v, v * 0.5, 0.0, v, v * 0.9]).unwrap();
        assert!(theta_body_membership(&g, &q, 1e-8).unwrap().inside);
    }
}
