//! Dense linear programming and the generalized-probabilistic quantities.
//!
//! The solver is a two-phase tableau simplex with Bland's smallest-index
//! rule, which makes every run deterministic and cycle-free. Instances here
//! are small (at most a few hundred variables), so dense tableaus win on
//! simplicity and reproducibility over anything fancier.
//!
//! On top of it sit the fractional packing number `α*(Γ)` of a context
//! hypergraph and the membership test for the polytope it optimizes over,
//! which is exactly the set of probability assignments reachable by
//! generalized probabilistic models.

use alloc::vec;
use alloc::vec::Vec;

use crate::classical::WeightVector;
use crate::graph::ContextHypergraph;

/// Tolerance below which a reduced cost or pivot entry counts as zero.
const PIVOT_EPS: f64 = 1e-9;
/// Phase-1 objective above this value means the instance is infeasible.
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Dense LP in the form
///
/// ```text
///   max / min  c . x
///   subject to A x <= b   (ineqs)
///              E x == f   (eqs)
///              0 <= x_i <= u_i   (upper bound optional per variable)
/// ```
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub ineqs: Vec<(Vec<f64>, f64)>,
    pub eqs: Vec<(Vec<f64>, f64)>,
    pub upper_bounds: Vec<Option<f64>>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<f64>) -> LpProblem {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            ineqs: Vec::new(),
            eqs: Vec::new(),
            upper_bounds: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_ineq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.ineqs.push((coeffs, rhs));
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.eqs.push((coeffs, rhs));
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.upper_bounds.len() != n {
            return Err(LpError::DimensionMismatch {
                expected: n,
                got: self.upper_bounds.len(),
            });
        }
        for (row, _) in self.ineqs.iter().chain(&self.eqs) {
            if row.len() != n {
                return Err(LpError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        let finite = self
            .objective
            .iter()
            .chain(
                self.ineqs
                    .iter()
                    .flat_map(|(r, b)| r.iter().chain(core::iter::once(b))),
            )
            .chain(
                self.eqs
                    .iter()
                    .flat_map(|(r, b)| r.iter().chain(core::iter::once(b))),
            )
            .all(|v| v.is_finite());
        if !finite || self.upper_bounds.iter().flatten().any(|u| !u.is_finite()) {
            return Err(LpError::NonFiniteData);
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LpError {
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    NonFiniteData,
    /// Simplex exceeded its iteration budget; with Bland's rule this
    /// indicates numerical trouble rather than cycling.
    IterationLimit,
}

impl core::fmt::Display for LpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LpError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "constraint row has {got} coefficients, expected {expected}"
                )
            }
            LpError::NonFiniteData => write!(f, "LP data contains NaN or infinity"),
            LpError::IterationLimit => write!(f, "simplex iteration limit exceeded"),
        }
    }
}

impl core::error::Error for LpError {}

/// Optimal solution with primal point and dual certificate.
///
/// The duals are reported for the problem as given: for `Maximize`,
/// `dual_ineq` and `dual_upper` are nonnegative and
/// `A^T dual_ineq + E^T dual_eq + dual_upper >= c` holds componentwise;
/// for `Minimize` all signs flip. In both cases the dual objective equals
/// `value` up to `duality_gap`.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub dual_ineq: Vec<f64>,
    pub dual_eq: Vec<f64>,
    pub dual_upper: Vec<f64>,
    /// `|primal - dual| / (1 + |primal|)`.
    pub duality_gap: f64,
    /// Largest violation of the primal constraints at `x`.
    pub primal_residual: f64,
    /// Largest violation of dual feasibility.
    pub dual_residual: f64,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    /// Unwraps the optimal solution; for callers that know their instance
    /// is feasible and bounded by construction.
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>, // m x (cols + 1), last entry rhs
    obj: Vec<f64>,       // reduced costs, length cols
    basis: Vec<usize>,
    cols: usize,
    art_start: usize, // columns >= art_start are artificial
    /// unit column (slack or artificial) attached to each row
    unit_col: Vec<usize>,
    /// sign applied to each row to make its rhs nonnegative
    row_sign: Vec<f64>,
}

/// Solves the LP. Infeasibility and unboundedness are outcomes, not errors;
/// errors are reserved for malformed input and numerical breakdown.
pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome, LpError> {
    p.validate()?;
    let n = p.num_vars();

    // fold upper bounds into plain <= rows after the user's own rows
    let mut ineqs: Vec<(Vec<f64>, f64)> = p.ineqs.clone();
    let mut ub_row = Vec::new();
    for (i, ub) in p.upper_bounds.iter().enumerate() {
        if let Some(u) = ub {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            ub_row.push(ineqs.len());
            ineqs.push((row, *u));
        }
    }

    // internal sense: maximize
    let flip = p.sense == Sense::Minimize;
    let c: Vec<f64> = if flip {
        p.objective.iter().map(|v| -v).collect()
    } else {
        p.objective.clone()
    };

    let m = ineqs.len() + p.eqs.len();
    let n_slack = ineqs.len();

    // count artificials: every equality row, plus inequality rows whose rhs
    // is negative (their slack column flips sign and cannot start basic)
    let mut needs_art: Vec<bool> = ineqs.iter().map(|&(_, b)| b < 0.0).collect();
    needs_art.extend(core::iter::repeat_n(true, p.eqs.len()));
    let n_art = needs_art.iter().filter(|&&x| x).count();

    let cols = n + n_slack + n_art;
    let mut t = Tableau {
        rows: vec![vec![0.0; cols + 1]; m],
        obj: vec![0.0; cols],
        basis: vec![usize::MAX; m],
        cols,
        art_start: n + n_slack,
        unit_col: vec![usize::MAX; m],
        row_sign: vec![1.0; m],
    };

    let mut next_art = t.art_start;
    for (i, (coeffs, rhs)) in ineqs.iter().chain(&p.eqs).enumerate() {
        let sign = if *rhs < 0.0 { -1.0 } else { 1.0 };
        t.row_sign[i] = sign;
        for (j, &a) in coeffs.iter().enumerate() {
            t.rows[i][j] = sign * a;
        }
        if i < n_slack {
            t.rows[i][n + i] = sign;
        }
        t.rows[i][cols] = sign * rhs;
        if needs_art[i] {
            t.rows[i][next_art] = 1.0;
            t.basis[i] = next_art;
            t.unit_col[i] = next_art;
            next_art += 1;
        } else {
            // slack starts basic
            t.basis[i] = n + i;
            t.unit_col[i] = n + i;
        }
    }

    // phase 1: minimize the sum of artificials
    if n_art > 0 {
        // reduced costs of sum-of-artificials under the artificial basis
        for j in 0..cols {
            let mut r = if j >= t.art_start { 1.0 } else { 0.0 };
            for i in 0..m {
                if t.basis[i] >= t.art_start {
                    r -= t.rows[i][j];
                }
            }
            t.obj[j] = r;
        }
        let all_cols = t.cols;
        simplex(&mut t, all_cols)?;
        let infeas: f64 = (0..m)
            .filter(|&i| t.basis[i] >= t.art_start)
            .map(|i| t.rows[i][cols])
            .sum();
        if infeas > FEAS_EPS {
            return Ok(LpOutcome::Infeasible);
        }
        // try to drive leftover artificials out of the basis
        for i in 0..m {
            if t.basis[i] >= t.art_start {
                if let Some(j) = (0..t.art_start).find(|&j| t.rows[i][j].abs() > PIVOT_EPS) {
                    pivot(&mut t, i, j);
                }
            }
        }
    }

    // phase 2: reduced costs of -c (we minimize the negated objective)
    for j in 0..cols {
        let mut r = if j < n { -c[j] } else { 0.0 };
        for i in 0..m {
            let cb = if t.basis[i] < n { -c[t.basis[i]] } else { 0.0 };
            r -= cb * t.rows[i][j];
        }
        t.obj[j] = r;
    }
    let structural_cols = t.art_start;
    if !simplex(&mut t, structural_cols)? {
        return Ok(LpOutcome::Unbounded);
    }

    // read out primal
    let mut x = vec![0.0; n];
    for i in 0..m {
        if t.basis[i] < n {
            x[t.basis[i]] = t.rows[i][cols];
        }
    }
    let primal_max: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();

    // duals for the internal max form: w_i = sign_i * reduced cost at the
    // row's unit column (slack or artificial, both cost zero in phase 2)
    let w: Vec<f64> = (0..m)
        .map(|i| t.row_sign[i] * t.obj[t.unit_col[i]])
        .collect();

    // split and un-negate for reporting
    let s = if flip { -1.0 } else { 1.0 };
    let mut dual_ineq: Vec<f64> = (0..p.ineqs.len()).map(|i| s * w[i]).collect();
    let mut dual_upper = vec![0.0; n];
    for (k, &row) in ub_row.iter().enumerate() {
        let var = p
            .upper_bounds
            .iter()
            .enumerate()
            .filter(|(_, u)| u.is_some())
            .nth(k)
            .unwrap()
            .0;
        dual_upper[var] = s * w[row];
    }
    let dual_eq: Vec<f64> = (0..p.eqs.len()).map(|i| s * w[ineqs.len() + i]).collect();

    // clip roundoff on the sign-constrained multipliers
    for v in dual_ineq.iter_mut().chain(dual_upper.iter_mut()) {
        if (*v * s) < 0.0 && (*v).abs() < 1e-7 {
            *v = 0.0;
        }
    }

    let value = s * primal_max;
    let sol = certify(p, value, x, dual_ineq, dual_eq, dual_upper);
    Ok(LpOutcome::Optimal(sol))
}

/// Fills in the residuals that make the solution self-certifying.
fn certify(
    p: &LpProblem,
    value: f64,
    x: Vec<f64>,
    dual_ineq: Vec<f64>,
    dual_eq: Vec<f64>,
    dual_upper: Vec<f64>,
) -> LpSolution {
    let n = p.num_vars();
    let mut primal_residual = 0.0f64;
    for (row, b) in &p.ineqs {
        let lhs: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
        primal_residual = primal_residual.max(lhs - b);
    }
    for (row, b) in &p.eqs {
        let lhs: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
        primal_residual = primal_residual.max((lhs - b).abs());
    }
    for j in 0..n {
        primal_residual = primal_residual.max(-x[j]);
        if let Some(u) = p.upper_bounds[j] {
            primal_residual = primal_residual.max(x[j] - u);
        }
    }

    let mut dual_value = 0.0;
    for ((_, b), y) in p.ineqs.iter().zip(&dual_ineq) {
        dual_value += b * y;
    }
    for ((_, f), y) in p.eqs.iter().zip(&dual_eq) {
        dual_value += f * y;
    }
    for (u, y) in p.upper_bounds.iter().zip(&dual_upper) {
        if let Some(u) = u {
            dual_value += u * y;
        }
    }

    // dual feasibility: A^T mu + E^T nu + eta - c has the sign of the sense
    let sgn = if p.sense == Sense::Maximize {
        1.0
    } else {
        -1.0
    };
    let mut dual_residual = 0.0f64;
    for j in 0..n {
        let mut lhs = dual_upper[j];
        for ((row, _), y) in p.ineqs.iter().zip(&dual_ineq) {
            lhs += row[j] * y;
        }
        for ((row, _), y) in p.eqs.iter().zip(&dual_eq) {
            lhs += row[j] * y;
        }
        dual_residual = dual_residual.max(sgn * (p.objective[j] - lhs));
    }
    for y in dual_ineq.iter().chain(&dual_upper) {
        dual_residual = dual_residual.max(-sgn * y);
    }

    let duality_gap = (value - dual_value).abs() / (1.0 + value.abs());
    LpSolution {
        value,
        x,
        dual_ineq,
        dual_eq,
        dual_upper,
        duality_gap,
        primal_residual,
        dual_residual,
    }
}

/// Runs simplex minimizing the current reduced-cost row. Columns at or past
/// `eligible` never enter (used to bar artificials in phase 2). Returns
/// `false` on unboundedness.
fn simplex(t: &mut Tableau, eligible: usize) -> Result<bool, LpError> {
    let m = t.rows.len();
    // Bland's rule terminates; the generous cap only guards against
    // floating-point inconsistencies.
    let max_iter = 50_000 + 200 * (t.cols + m);
    for _ in 0..max_iter {
        // entering: smallest index with negative reduced cost
        let Some(enter) = (0..eligible).find(|&j| t.obj[j] < -PIVOT_EPS) else {
            return Ok(true);
        };
        // leaving: min ratio, ties by smallest basis variable (Bland)
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = t.rows[i][enter];
            if a > PIVOT_EPS {
                let ratio = t.rows[i][t.cols] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-12 || (ratio < best + 1e-12 && t.basis[i] < t.basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Ok(false);
        };
        pivot(t, leave, enter);
    }
    Err(LpError::IterationLimit)
}

fn pivot(t: &mut Tableau, row: usize, col: usize) {
    let m = t.rows.len();
    let piv = t.rows[row][col];
    for v in t.rows[row].iter_mut() {
        *v /= piv;
    }
    for i in 0..m {
        if i != row {
            let factor = t.rows[i][col];
            if factor != 0.0 {
                for j in 0..=t.cols {
                    t.rows[i][j] -= factor * t.rows[row][j];
                }
            }
        }
    }
    let factor = t.obj[col];
    if factor != 0.0 {
        for j in 0..t.cols {
            t.obj[j] -= factor * t.rows[row][j];
        }
    }
    t.basis[row] = col;
}

/// Optimal fractional packing of a context hypergraph.
#[derive(Clone, Debug)]
pub struct FractionalPacking {
    pub value: f64,
    /// An optimal packing: `0 <= w_i <= 1` with every context sum `<= 1`.
    pub packing: Vec<f64>,
    pub duality_gap: f64,
}

/// Weighted fractional packing number
/// `max { lambda . w : 0 <= w_i <= 1, sum_{i in C} w_i <= 1 for all C }`.
///
/// With all-ones weights this is `α*(Γ)`, the largest value any
/// generalized-probabilistic model can assign to the sum of all event
/// probabilities.
pub fn fractional_packing_number(
    h: &ContextHypergraph,
    weights: &WeightVector,
) -> Result<FractionalPacking, LpError> {
    let n = h.n();
    if weights.len() != n {
        return Err(LpError::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let mut p = LpProblem::new(Sense::Maximize, weights.as_slice().to_vec());
    p.upper_bounds = vec![Some(1.0); n];
    for c in h.contexts() {
        let mut row = vec![0.0; n];
        for &i in c {
            row[i] = 1.0;
        }
        p.add_ineq(row, 1.0);
    }
    let sol = lp_solve(&p)?
        .optimal()
        .expect("packing LP is feasible (w = 0) and bounded (w <= 1)");
    Ok(FractionalPacking {
        value: sol.value,
        packing: sol.x,
        duality_gap: sol.duality_gap,
    })
}

/// Outcome of the direct inequality check against the packing polytope.
#[derive(Clone, Debug)]
pub struct FuzzyMembership {
    pub inside: bool,
    /// Largest violation over all bounds and context sums (0 when inside).
    pub max_violation: f64,
    /// A context whose sum exceeds 1, if any.
    pub violated_context: Option<Vec<usize>>,
}

/// Membership of `p` in the polytope of fractional packings, which equals
/// the set of probability assignments attainable in generalized
/// probabilistic models. The polytope is given by its inequalities, so the
/// check is direct: `0 <= p_i <= 1` and every context sum `<= 1`, within
/// `tol`.
pub fn fuzzy_membership(
    h: &ContextHypergraph,
    p: &[f64],
    tol: f64,
) -> Result<FuzzyMembership, LpError> {
    if p.len() != h.n() {
        return Err(LpError::DimensionMismatch {
            expected: h.n(),
            got: p.len(),
        });
    }
    let mut max_violation = 0.0f64;
    for &v in p {
        max_violation = max_violation.max(-v).max(v - 1.0);
    }
    let mut violated_context = None;
    for c in h.contexts() {
        let sum: f64 = c.iter().map(|&i| p[i]).sum();
        if sum - 1.0 > max_violation {
            max_violation = sum - 1.0;
        }
        if sum > 1.0 + tol && violated_context.is_none() {
            violated_context = Some(c.clone());
        }
    }
    Ok(FuzzyMembership {
        inside: max_violation <= tol,
        max_violation,
        violated_context,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn single_variable() {
        // max x s.t. x <= 1
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
        p.add_ineq(vec![1.0], 1.0);
        let sol = lp_solve(&p).unwrap().optimal().unwrap();
        assert_close(sol.value, 1.0, 1e-12);
        assert_close(sol.x[0], 1.0, 1e-12);
        assert!(sol.duality_gap <= 1e-10);
    }

    #[test]
    fn degenerate_optimum() {
        // max x + y s.t. x + y <= 1: the whole edge is optimal
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_ineq(vec![1.0, 1.0], 1.0);
        let sol = lp_solve(&p).unwrap().optimal().unwrap();
        assert_close(sol.value, 1.0, 1e-12);
        // Bland's rule picks the smallest-index vertex
        assert_close(sol.x[0], 1.0, 1e-12);
        assert_close(sol.x[1], 0.0, 1e-12);
    }

    #[test]
    fn pentagon_packing_lp() {
        // the packing LP for C5 written out by hand
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0; 5]);
        p.upper_bounds = vec![Some(1.0); 5];
        for i in 0..5 {
            let mut row = vec![0.0; 5];
            row[i] = 1.0;
            row[(i + 1) % 5] = 1.0;
            p.add_ineq(row, 1.0);
        }
        let sol = lp_solve(&p).unwrap().optimal().unwrap();
        assert_close(sol.value, 2.5, 1e-9);
        assert!(sol.duality_gap <= 1e-8);
        assert!(sol.dual_residual <= 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
        p.add_eq(vec![1.0], 2.0);
        p.add_ineq(vec![1.0], 1.0);
        assert!(matches!(lp_solve(&p).unwrap(), LpOutcome::Infeasible));

        let p = LpProblem::new(Sense::Maximize, vec![1.0]);
        assert!(matches!(lp_solve(&p).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn minimize_with_equality() {
        // min x + 2y s.t. x + y = 1 -> x = 1
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0, 2.0]);
        p.add_eq(vec![1.0, 1.0], 1.0);
        let sol = lp_solve(&p).unwrap().optimal().unwrap();
        assert_close(sol.value, 1.0, 1e-12);
        assert_close(sol.x[0], 1.0, 1e-12);
        assert!(sol.duality_gap <= 1e-10, "gap {}", sol.duality_gap);
    }

    #[test]
    fn negative_rhs_rows() {
        // max -x s.t. -x <= -2  (i.e. x >= 2) -> x = 2
        let mut p = LpProblem::new(Sense::Maximize, vec![-1.0]);
        p.add_ineq(vec![-1.0], -2.0);
        let sol = lp_solve(&p).unwrap().optimal().unwrap();
        assert_close(sol.value, -2.0, 1e-12);
        assert!(sol.duality_gap <= 1e-10);
    }

    #[test]
    fn packing_c5_cliques() {
        let h = Graph::cycle(5).unwrap().clique_hypergraph();
        let fp = fractional_packing_number(&h, &WeightVector::ones(5)).unwrap();
        assert_close(fp.value, 2.5, 1e-9);
        for &w in &fp.packing {
            assert_close(w, 0.5, 1e-9);
        }
    }

    #[test]
    fn packing_even_cycles() {
        for n in [4usize, 6, 8, 10] {
            let h = Graph::cycle(n).unwrap().clique_hypergraph();
            let fp = fractional_packing_number(&h, &WeightVector::ones(n)).unwrap();
            assert_close(fp.value, n as f64 / 2.0, 1e-9);
        }
    }

    #[test]
    fn packing_pair_contexts_of_complete_graph() {
        // contexts are all pairs (not the single clique): w_i = 1/2 is
        // feasible, and summing all (n choose 2) pair constraints caps the
        // objective at n/2
        for n in [3usize, 5, 8] {
            let pairs: Vec<Vec<usize>> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| vec![i, j]))
                .collect();
            let h = ContextHypergraph::new(n, &pairs).unwrap();
            let fp = fractional_packing_number(&h, &WeightVector::ones(n)).unwrap();
            assert_close(fp.value, n as f64 / 2.0, 1e-9);
        }
    }

    #[test]
    fn fuzzy_membership_cases() {
        let h = Graph::cycle(5).unwrap().clique_hypergraph();
        let half = vec![0.5; 5];
        assert!(fuzzy_membership(&h, &half, 1e-9).unwrap().inside);

        let bad = vec![0.6, 0.6, 0.0, 0.0, 0.0];
        let res = fuzzy_membership(&h, &bad, 1e-9).unwrap();
        assert!(!res.inside);
        assert_eq!(res.violated_context, Some(vec![0, 1]));
        assert_close(res.max_violation, 0.2, 1e-12);

        assert!(fuzzy_membership(&h, &vec![0.0; 5], 1e-9).unwrap().inside);
        assert!(fuzzy_membership(&h, &[0.0; 4], 1e-9).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_ineq(vec![1.0], 1.0);
        assert!(matches!(
            lp_solve(&p),
            Err(LpError::DimensionMismatch { .. })
        ));

        let mut p = LpProblem::new(Sense::Maximize, vec![f64::NAN]);
        p.add_ineq(vec![1.0], 1.0);
        assert!(matches!(lp_solve(&p), Err(LpError::NonFiniteData)));
    }
}
