//! Bipartite Bell scenarios as exclusivity graphs.
//!
//! Events `(a, b, x, y)` — outcomes `a, b` under settings `x, y` — become
//! graph vertices; two events are adjacent exactly when they are compatible
//! and mutually exclusive, i.e. share a setting on which their outcomes
//! differ. Over that graph the classical, quantum, and
//! generalized-probabilistic values of any nonnegative Bell functional are
//! the weighted independence number, the weighted Lovász number under
//! per-measurement normalization, and a fractional-packing LP.
//!
//! Negative coefficients are removed first by trading `-p_{ab|xy}` for the
//! complementary events of the same setting pair minus a constant; the
//! constant accumulates in the functional's `offset`, so reported values
//! always refer to the functional as originally given.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::classical::{weighted_independence, ClassicalError, WeightVector};
use crate::graph::Graph;
use crate::linprog::{lp_solve, LpError, LpOutcome, LpProblem, Sense};
use crate::theta::{constrained_theta_max, weighted_theta, ConstrainedThetaMax, ThetaError};

#[derive(Clone, Debug)]
pub enum BellError {
    /// Outcome and setting counts must all be at least 1.
    EmptyScenario,
    LambdaLengthMismatch {
        expected: usize,
        got: usize,
    },
    /// Value computations need nonnegative coefficients; normalize first.
    NegativeCoefficients {
        vertex: usize,
        value: f64,
    },
    UnknownBuiltin {
        name: String,
    },
    /// The PR box only exists in the 2x2x2x2 scenario.
    NotChsh,
    NonFiniteData,
    Classical(ClassicalError),
    Theta(ThetaError),
    Lp(LpError),
    /// The no-signalling LP failed, which indicates malformed input since
    /// the polytope is never empty.
    LpNotOptimal,
}

impl core::fmt::Display for BellError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BellError::EmptyScenario => write!(
                f,
                "scenario needs at least one outcome and one setting per party"
            ),
            BellError::LambdaLengthMismatch { expected, got } => {
                write!(
                    f,
                    "coefficient table has {got} entries, scenario has {expected} events"
                )
            }
            BellError::NegativeCoefficients { vertex, value } => {
                write!(f, "coefficient {vertex} is {value}; call normalize() first")
            }
            BellError::UnknownBuiltin { name } => {
                write!(
                    f,
                    "unknown builtin '{name}'; available: chsh, i3322, kcbs5, ncycle:<n>"
                )
            }
            BellError::NotChsh => write!(f, "the PR box needs the (2,2,2,2) scenario"),
            BellError::NonFiniteData => write!(f, "coefficients contain NaN or infinity"),
            BellError::Classical(e) => write!(f, "{e}"),
            BellError::Theta(e) => write!(f, "{e}"),
            BellError::Lp(e) => write!(f, "{e}"),
            BellError::LpNotOptimal => write!(f, "no-signalling LP did not reach an optimum"),
        }
    }
}

impl core::error::Error for BellError {}

impl From<ClassicalError> for BellError {
    fn from(e: ClassicalError) -> Self {
        BellError::Classical(e)
    }
}

impl From<ThetaError> for BellError {
    fn from(e: ThetaError) -> Self {
        BellError::Theta(e)
    }
}

impl From<LpError> for BellError {
    fn from(e: LpError) -> Self {
        BellError::Lp(e)
    }
}

/// Outcome and setting cardinalities of a two-party scenario.
///
/// Events are indexed `(a, b, x, y)` and flattened row-major with `a`
/// fastest, then `b`, then `x`, then `y`:
/// `index = a + nA (b + nB (x + nX y))`. Every coefficient table and
/// probability box in this module uses that order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BellScenario {
    pub n_a: usize,
    pub n_b: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl BellScenario {
    pub fn new(n_a: usize, n_b: usize, n_x: usize, n_y: usize) -> Result<BellScenario, BellError> {
        if n_a == 0 || n_b == 0 || n_x == 0 || n_y == 0 {
            return Err(BellError::EmptyScenario);
        }
        Ok(BellScenario { n_a, n_b, n_x, n_y })
    }

    pub fn vertex_count(&self) -> usize {
        self.n_a * self.n_b * self.n_x * self.n_y
    }

    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        debug_assert!(a < self.n_a && b < self.n_b && x < self.n_x && y < self.n_y);
        a + self.n_a * (b + self.n_b * (x + self.n_x * y))
    }

    /// Inverse of [`BellScenario::index`].
    pub fn event(&self, mut v: usize) -> (usize, usize, usize, usize) {
        let a = v % self.n_a;
        v /= self.n_a;
        let b = v % self.n_b;
        v /= self.n_b;
        let x = v % self.n_x;
        v /= self.n_x;
        (a, b, x, v)
    }

    /// The exclusivity graph: events are adjacent iff they share a setting
    /// on which the outcomes differ, `(x = x' and a != a') or
    /// (y = y' and b != b')`.
    pub fn exclusivity_graph(&self) -> Graph {
        let n = self.vertex_count();
        let mut edges = Vec::new();
        for u in 0..n {
            let (a, b, x, y) = self.event(u);
            for v in u + 1..n {
                let (a2, b2, x2, y2) = self.event(v);
                if (x == x2 && a != a2) || (y == y2 && b != b2) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges).expect("generated edges are valid")
    }

    /// Vertex groups fixed by the per-measurement normalization
    /// `sum_ab p_ab|xy = 1`, one group per setting pair.
    pub fn normalization_groups(&self) -> Vec<Vec<usize>> {
        let mut groups = Vec::with_capacity(self.n_x * self.n_y);
        for y in 0..self.n_y {
            for x in 0..self.n_x {
                let mut group = Vec::with_capacity(self.n_a * self.n_b);
                for b in 0..self.n_b {
                    for a in 0..self.n_a {
                        group.push(self.index(a, b, x, y));
                    }
                }
                groups.push(group);
            }
        }
        groups
    }

    /// Cliques of the exclusivity graph whose sums are forced to 1 on the
    /// normalized set: `{(a, b, x, y) : b} u {(a', b, x, y') : a' != a, b}`
    /// per `(x, a, y != y')` and the mirrored family for Bob. Their sums
    /// equal `1 + A(a|x,y) - A(a|x,y')` (resp. Bob marginals), so together
    /// with normalization they encode exactly the no-signalling equalities,
    /// which every normalized behavior of the exclusivity structure obeys.
    pub fn nosignalling_cliques(&self) -> Vec<Vec<usize>> {
        let mut cliques = Vec::new();
        for x in 0..self.n_x {
            for a in 0..self.n_a {
                for y in 0..self.n_y {
                    for y2 in 0..self.n_y {
                        if y == y2 {
                            continue;
                        }
                        let mut c = Vec::new();
                        for b in 0..self.n_b {
                            c.push(self.index(a, b, x, y));
                        }
                        for a2 in 0..self.n_a {
                            if a2 == a {
                                continue;
                            }
                            for b in 0..self.n_b {
                                c.push(self.index(a2, b, x, y2));
                            }
                        }
                        cliques.push(c);
                    }
                }
            }
        }
        for y in 0..self.n_y {
            for b in 0..self.n_b {
                for x in 0..self.n_x {
                    for x2 in 0..self.n_x {
                        if x == x2 {
                            continue;
                        }
                        let mut c = Vec::new();
                        for a in 0..self.n_a {
                            c.push(self.index(a, b, x, y));
                        }
                        for b2 in 0..self.n_b {
                            if b2 == b {
                                continue;
                            }
                            for a in 0..self.n_a {
                                c.push(self.index(a, b2, x2, y));
                            }
                        }
                        cliques.push(c);
                    }
                }
            }
        }
        cliques
    }
}

/// A linear functional `sum lambda_abxy p_ab|xy + offset` over behaviors of
/// a scenario. `offset` records constants absorbed while removing negative
/// coefficients, so the value of the original functional on any normalized
/// behavior is recovered exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct BellFunctional {
    pub scenario: BellScenario,
    pub lambda: Vec<f64>,
    pub offset: f64,
}

impl BellFunctional {
    pub fn new(
        scenario: BellScenario,
        lambda: Vec<f64>,
        offset: f64,
    ) -> Result<BellFunctional, BellError> {
        if lambda.len() != scenario.vertex_count() {
            return Err(BellError::LambdaLengthMismatch {
                expected: scenario.vertex_count(),
                got: lambda.len(),
            });
        }
        if !offset.is_finite() || lambda.iter().any(|v| !v.is_finite()) {
            return Err(BellError::NonFiniteData);
        }
        Ok(BellFunctional {
            scenario,
            lambda,
            offset,
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.lambda.iter().all(|&v| v >= 0.0)
    }

    /// Evaluates the functional on a behavior (offset included).
    pub fn value_of(&self, behavior: &[f64]) -> f64 {
        self.lambda
            .iter()
            .zip(behavior)
            .map(|(l, p)| l * p)
            .sum::<f64>()
            + self.offset
    }

    /// Removes negative coefficients via
    /// `-p_ab|xy = -1 + sum_{a'b' != ab} p_a'b'|xy`: each negative entry is
    /// zeroed, its magnitude is added to every other event of the same
    /// setting pair, and the same amount is subtracted from the offset. On
    /// normalized behaviors the value is unchanged.
    pub fn normalize(&self) -> BellFunctional {
        let s = self.scenario;
        let mut lambda = self.lambda.clone();
        let mut offset = self.offset;
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                let block: Vec<usize> = (0..s.n_a)
                    .flat_map(|a| (0..s.n_b).map(move |b| (a, b)))
                    .map(|(a, b)| s.index(a, b, x, y))
                    .collect();
                let negatives: Vec<(usize, f64)> = block
                    .iter()
                    .filter(|&&v| self.lambda[v] < 0.0)
                    .map(|&v| (v, self.lambda[v]))
                    .collect();
                for &(v, c) in &negatives {
                    lambda[v] -= c; // back to zero
                    for &w in &block {
                        if w != v {
                            lambda[w] -= c; // add |c|
                        }
                    }
                    offset += c;
                }
            }
        }
        BellFunctional {
            scenario: s,
            lambda,
            offset,
        }
    }

    fn weights(&self) -> Result<WeightVector, BellError> {
        if let Some((v, &c)) = self.lambda.iter().enumerate().find(|(_, c)| **c < 0.0) {
            return Err(BellError::NegativeCoefficients {
                vertex: v,
                value: c,
            });
        }
        Ok(WeightVector::new(self.lambda.clone())?)
    }
}

/// Classical (local hidden variable) optimum of a normalized functional:
/// the weighted independence number of the exclusivity graph, plus offset.
/// Also returns the optimal deterministic events as a witness.
pub fn classical_value(f: &BellFunctional) -> Result<(f64, Vec<usize>), BellError> {
    let weights = f.weights()?;
    let g = f.scenario.exclusivity_graph();
    let mis = weighted_independence(&g, &weights)?;
    Ok((mis.value + f.offset, mis.vertices))
}

/// No-signalling optimum, an optimal behavior attaining it, and the
/// certifying LP duality gap.
#[derive(Clone, Debug)]
pub struct NoSignallingBound {
    pub value: f64,
    pub behavior: Vec<f64>,
    pub duality_gap: f64,
}

/// No-signalling optimum of a normalized functional, with an optimal
/// behavior: LP over `p >= 0`, clique constraints of the exclusivity
/// graph, and per-measurement normalization.
pub fn nosignalling_value(f: &BellFunctional) -> Result<NoSignallingBound, BellError> {
    let weights = f.weights()?;
    let s = f.scenario;
    let g = s.exclusivity_graph();
    let cliques = g.clique_hypergraph();
    let n = s.vertex_count();

    let mut lp = LpProblem::new(Sense::Maximize, weights.as_slice().to_vec());
    lp.upper_bounds = vec![Some(1.0); n];
    for c in cliques.contexts() {
        let mut row = vec![0.0; n];
        for &i in c {
            row[i] = 1.0;
        }
        lp.add_ineq(row, 1.0);
    }
    for group in s.normalization_groups() {
        let mut row = vec![0.0; n];
        for &i in &group {
            row[i] = 1.0;
        }
        lp.add_eq(row, 1.0);
    }
    match lp_solve(&lp)? {
        LpOutcome::Optimal(sol) => Ok(NoSignallingBound {
            value: sol.value + f.offset,
            behavior: sol.x,
            duality_gap: sol.duality_gap,
        }),
        _ => Err(BellError::LpNotOptimal),
    }
}

/// Normalized quantum value by the direct method: maximize over the theta
/// body intersected with the normalization hyperplanes. This is the
/// authoritative number; the penalty route below reproduces it.
pub fn quantum_value_normalized(
    f: &BellFunctional,
    tol: f64,
) -> Result<(f64, ConstrainedThetaMax), BellError> {
    let weights = f.weights()?;
    let g = f.scenario.exclusivity_graph();
    // normalization groups, plus the clique equalities they imply (the
    // no-signalling family); the latter add nothing to the feasible set but
    // let the solver's facial reduction remove every forced null direction
    let constraints: Vec<(Vec<usize>, f64)> = f
        .scenario
        .normalization_groups()
        .into_iter()
        .chain(f.scenario.nosignalling_cliques())
        .map(|grp| (grp, 1.0))
        .collect();
    let r = constrained_theta_max(&g, &weights, &constraints, tol)?;
    Ok((r.value + f.offset, r))
}

/// One penalty-method solve: value of `theta(lambda + M 1) - M |X x Y|`.
#[derive(Clone, Copy, Debug)]
pub struct PenaltyStep {
    pub penalty: f64,
    pub value: f64,
    pub rel_gap: f64,
}

/// Convergence record of the penalty method.
#[derive(Clone, Debug)]
pub struct PenaltyReport {
    pub steps: Vec<PenaltyStep>,
    /// Value at the largest penalty, offset included.
    pub final_value: f64,
    /// Differences between consecutive adjusted values.
    pub successive_diffs: Vec<f64>,
    /// True when the sequence is non-increasing within solver tolerance.
    pub monotone: bool,
}

pub const DEFAULT_PENALTY_SCHEDULE: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// Upper-bounds the normalized quantum value by unconstrained weighted
/// thetas with an increasing penalty `M` on the coefficients:
/// `theta(lambda + M 1) - M |X x Y|` decreases to the normalized optimum
/// as `M` grows (each unit of penalty can only be recovered by filling the
/// normalization up to its clique bound of 1 per setting pair).
pub fn quantum_value_penalty(
    f: &BellFunctional,
    schedule: &[f64],
    tol: f64,
) -> Result<PenaltyReport, BellError> {
    let weights = f.weights()?;
    let s = f.scenario;
    let g = s.exclusivity_graph();
    let settings = (s.n_x * s.n_y) as f64;

    let mut steps = Vec::with_capacity(schedule.len());
    for &m in schedule {
        let shifted: Vec<f64> = weights.as_slice().iter().map(|&w| w + m).collect();
        let shifted = WeightVector::new(shifted)?;
        let r = weighted_theta(&g, &shifted, tol)?;
        steps.push(PenaltyStep {
            penalty: m,
            value: r.value - m * settings + f.offset,
            rel_gap: r.certificate.rel_gap,
        });
    }
    let successive_diffs: Vec<f64> = steps.windows(2).map(|w| w[1].value - w[0].value).collect();
    // scale-aware slack for "non-increasing": each theta solve is accurate
    // to rel_gap of a value of order M * settings
    let slack = steps
        .iter()
        .map(|s| 1e-6 * (1.0 + s.penalty * settings))
        .fold(0.0f64, f64::max);
    let monotone = successive_diffs.iter().all(|&d| d <= slack);
    let final_value = steps.last().map_or(f.offset, |s| s.value);
    Ok(PenaltyReport {
        steps,
        final_value,
        successive_diffs,
        monotone,
    })
}

/// The extremal no-signalling box of the CHSH scenario:
/// `p_ab|xy = 1/2` when `a xor b = x and y`, else 0.
pub fn pr_box(s: &BellScenario) -> Result<Vec<f64>, BellError> {
    if (s.n_a, s.n_b, s.n_x, s.n_y) != (2, 2, 2, 2) {
        return Err(BellError::NotChsh);
    }
    let mut p = vec![0.0; 16];
    for (a, b, x, y) in iter_events(s) {
        if a ^ b == x & y {
            p[s.index(a, b, x, y)] = 0.5;
        }
    }
    Ok(p)
}

fn iter_events(s: &BellScenario) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    let (na, nb, nx, ny) = (s.n_a, s.n_b, s.n_x, s.n_y);
    (0..ny).flat_map(move |y| {
        (0..nx).flat_map(move |x| (0..nb).flat_map(move |b| (0..na).map(move |a| (a, b, x, y))))
    })
}

/// A named built-in instance.
#[derive(Clone, Debug)]
pub enum Builtin {
    /// A Bell functional over a scenario.
    Scenario(BellFunctional),
    /// A plain weighted graph (cycle inequalities).
    Weighted { graph: Graph, weights: WeightVector },
}

/// Built-in instances: `"chsh"`, `"i3322"`, `"kcbs5"`, `"ncycle:<n>"`.
pub fn builtin(name: &str) -> Result<Builtin, BellError> {
    match name {
        "chsh" => Ok(Builtin::Scenario(chsh_functional())),
        "i3322" => Ok(Builtin::Scenario(i3322_functional())),
        "kcbs5" => builtin("ncycle:5"),
        _ => {
            if let Some(ns) = name.strip_prefix("ncycle:") {
                let n: usize = ns.parse().map_err(|_| BellError::UnknownBuiltin {
                    name: name.to_string(),
                })?;
                let graph = Graph::cycle(n).map_err(|_| BellError::UnknownBuiltin {
                    name: format!("ncycle:{n} (n must be >= 3)"),
                })?;
                Ok(Builtin::Weighted {
                    weights: WeightVector::ones(n),
                    graph,
                })
            } else {
                Err(BellError::UnknownBuiltin {
                    name: name.to_string(),
                })
            }
        }
    }
}

/// CHSH game coefficients: `lambda_abxy = 1` iff `a xor b = x and y`.
pub fn chsh_functional() -> BellFunctional {
    let s = BellScenario::new(2, 2, 2, 2).expect("constants are valid");
    let mut lambda = vec![0.0; 16];
    for (a, b, x, y) in iter_events(&s) {
        if a ^ b == x & y {
            lambda[s.index(a, b, x, y)] = 1.0;
        }
    }
    BellFunctional {
        scenario: s,
        lambda,
        offset: 0.0,
    }
}

/// The 36-entry 0/1 coefficient table of the three-setting inequality,
/// rows indexed by `(x, a)` and columns by `(y, b)`.
const I3322_TABLE: [[f64; 6]; 6] = [
    [1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, 1.0, 1.0, 0.0, 0.0, 1.0],
    [0.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
];

/// The three-setting two-outcome functional in its 0/1 table form. The
/// classical bound in this convention is 6; subtract 6 to compare against
/// the zero-bound convention of the inequality's usual statement.
pub fn i3322_functional() -> BellFunctional {
    let s = BellScenario::new(2, 2, 3, 3).expect("constants are valid");
    let mut lambda = vec![0.0; 36];
    for (a, b, x, y) in iter_events(&s) {
        lambda[s.index(a, b, x, y)] = I3322_TABLE[2 * x + a][2 * y + b];
    }
    BellFunctional {
        scenario: s,
        lambda,
        offset: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::sqrt;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn chsh_graph_shape() {
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let g = s.exclusivity_graph();
        assert_eq!(g.n(), 16);
        assert_eq!(g.edge_count(), 56);
    }

    #[test]
    fn i3322_graph_shape() {
        let s = BellScenario::new(2, 2, 3, 3).unwrap();
        let g = s.exclusivity_graph();
        assert_eq!(g.n(), 36);
        // same-x pairs with a != a', same-y pairs with b != b', minus the
        // double-counted ones: 108 + 108 - 18
        assert_eq!(g.edge_count(), 198);
    }

    #[test]
    fn degenerate_scenario() {
        let s = BellScenario::new(1, 1, 1, 1).unwrap();
        let g = s.exclusivity_graph();
        assert_eq!(g.n(), 1);
        assert_eq!(g.edge_count(), 0);
        assert!(BellScenario::new(0, 2, 2, 2).is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = BellScenario::new(2, 3, 3, 2).unwrap();
        for v in 0..s.vertex_count() {
            let (a, b, x, y) = s.event(v);
            assert_eq!(s.index(a, b, x, y), v);
        }
        // a is fastest
        assert_eq!(s.index(1, 0, 0, 0), 1);
        assert_eq!(s.index(0, 1, 0, 0), 2);
    }

    #[test]
    fn chsh_has_eight_ones() {
        let f = chsh_functional();
        let ones = f.lambda.iter().filter(|&&v| v == 1.0).count();
        assert_eq!(ones, 8);
        assert_eq!(f.lambda.len(), 16);
    }

    #[test]
    fn i3322_has_twenty_ones() {
        let f = i3322_functional();
        let ones = f.lambda.iter().filter(|&&v| v == 1.0).count();
        assert_eq!(ones, 20);
    }

    #[test]
    fn normalize_leaves_nonnegative_untouched() {
        let f = chsh_functional();
        let g = f.normalize();
        assert_eq!(f, g);
        assert_eq!(g.offset, 0.0);
    }

    #[test]
    fn normalize_single_negative_term() {
        // -p_00|00 becomes +1 on the other three events of (x,y) = (0,0)
        // with offset -1
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let mut lambda = vec![0.0; 16];
        lambda[s.index(0, 0, 0, 0)] = -1.0;
        let f = BellFunctional::new(s, lambda, 0.0).unwrap();
        let g = f.normalize();
        assert_eq!(g.offset, -1.0);
        close(g.lambda[s.index(0, 0, 0, 0)], 0.0, 1e-15);
        close(g.lambda[s.index(0, 1, 0, 0)], 1.0, 1e-15);
        close(g.lambda[s.index(1, 0, 0, 0)], 1.0, 1e-15);
        close(g.lambda[s.index(1, 1, 0, 0)], 1.0, 1e-15);
        for x in 0..2 {
            for y in 0..2 {
                if (x, y) != (0, 0) {
                    for a in 0..2 {
                        for b in 0..2 {
                            close(g.lambda[s.index(a, b, x, y)], 0.0, 1e-15);
                        }
                    }
                }
            }
        }
    }

    /// The three-setting inequality written directly in joint
    /// probabilities: correlator products contribute +-1 at (a,b) = (0,0),
    /// and the marginal terms are expanded against complementary outcomes
    /// (the -2<A_0^0> copies at y = 1 and y = 2, -<A_1^0> at y = 1,
    /// -<B_0^0> at x = 1), which costs an offset of -4 and leaves exactly
    /// two negative joint terms.
    fn i3322_joint_form() -> BellFunctional {
        let s = BellScenario::new(2, 2, 3, 3).unwrap();
        let mut l = vec![0.0; 36];
        // correlator part: +p(00|xy) for these setting pairs
        for (x, y) in [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)] {
            l[s.index(0, 0, x, y)] += 1.0;
        }
        // ... and -p(00|12), -p(00|21)
        l[s.index(0, 0, 1, 2)] -= 1.0;
        l[s.index(0, 0, 2, 1)] -= 1.0;
        // -2<A_0^0> = -2 + sum_b p(1b|0,1) + sum_b p(1b|0,2)
        for b in 0..2 {
            l[s.index(1, b, 0, 1)] += 1.0;
            l[s.index(1, b, 0, 2)] += 1.0;
        }
        // -<A_1^0> = -1 + sum_b p(1b|1,1)
        for b in 0..2 {
            l[s.index(1, b, 1, 1)] += 1.0;
        }
        // -<B_0^0> = -1 + sum_a p(a1|1,0)
        for a in 0..2 {
            l[s.index(a, 1, 1, 0)] += 1.0;
        }
        BellFunctional::new(s, l, -4.0).unwrap()
    }

    #[test]
    fn i3322_joint_form_normalizes_to_the_table() {
        let f = i3322_joint_form().normalize();
        let table = i3322_functional();
        assert_eq!(f.scenario, table.scenario);
        for v in 0..36 {
            close(f.lambda[v], table.lambda[v], 1e-12);
        }
        close(f.offset, -6.0, 1e-12);
    }

    #[test]
    fn normalize_agrees_on_random_boxes() {
        // original and normalized functionals agree on normalized behaviors
        // up to the recorded offset; mixtures of deterministic local boxes
        // are no-signalling, hence normalized
        let s = BellScenario::new(2, 2, 3, 3).unwrap();
        let original = i3322_joint_form();
        let normalized = original.normalize();
        let mut seed = 12345u64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            // random mixture of 4 deterministic strategies
            let mut behavior = vec![0.0; 36];
            let mut weights = [0.0; 4];
            let mut total = 0.0;
            for w in &mut weights {
                *w = rng();
                total += *w;
            }
            for &w in &weights {
                let ax = [rng() < 0.5, rng() < 0.5, rng() < 0.5];
                let by = [rng() < 0.5, rng() < 0.5, rng() < 0.5];
                for x in 0..3 {
                    for y in 0..3 {
                        let a = ax[x] as usize;
                        let b = by[y] as usize;
                        behavior[s.index(a, b, x, y)] += w / total;
                    }
                }
            }
            let v0 = original.value_of(&behavior);
            let v1 = normalized.value_of(&behavior);
            close(v0, v1, 1e-10);
        }
    }

    #[test]
    fn chsh_classical_value_is_three() {
        let (v, witness) = classical_value(&chsh_functional()).unwrap();
        close(v, 3.0, 1e-12);
        assert_eq!(witness.len(), 3);
    }

    #[test]
    fn i3322_classical_value_is_six() {
        let (v, _) = classical_value(&i3322_functional()).unwrap();
        close(v, 6.0, 1e-12);
    }

    #[test]
    fn single_event_classical_value() {
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let mut lambda = vec![0.0; 16];
        lambda[s.index(0, 0, 0, 0)] = 1.0;
        let f = BellFunctional::new(s, lambda, 0.0).unwrap();
        let (v, _) = classical_value(&f).unwrap();
        close(v, 1.0, 1e-12);
    }

    #[test]
    fn classical_value_requires_normalization() {
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let mut lambda = vec![0.0; 16];
        lambda[0] = -1.0;
        let f = BellFunctional::new(s, lambda, 0.0).unwrap();
        assert!(matches!(
            classical_value(&f),
            Err(BellError::NegativeCoefficients { vertex: 0, .. })
        ));
    }

    #[test]
    fn chsh_nosignalling_value_is_four() {
        let f = chsh_functional();
        let ns = nosignalling_value(&f).unwrap();
        let (v, behavior) = (ns.value, ns.behavior);
        close(v, 4.0, 1e-8);
        assert!(ns.duality_gap <= 1e-8);
        // the PR box attains it
        let pr = pr_box(&f.scenario).unwrap();
        close(f.value_of(&pr), 4.0, 1e-12);
        // the LP optimum is a no-signalling box: marginals independent of
        // the far setting
        let s = f.scenario;
        for a in 0..2 {
            for x in 0..2 {
                let marg =
                    |y: usize| -> f64 { (0..2).map(|b| behavior[s.index(a, b, x, y)]).sum() };
                close(marg(0), marg(1), 1e-8);
            }
        }
        for b in 0..2 {
            for y in 0..2 {
                let marg =
                    |x: usize| -> f64 { (0..2).map(|a| behavior[s.index(a, b, x, y)]).sum() };
                close(marg(0), marg(1), 1e-8);
            }
        }
    }

    #[test]
    fn all_ones_nosignalling_value_is_settings_count() {
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let f = BellFunctional::new(s, vec![1.0; 16], 0.0).unwrap();
        let v = nosignalling_value(&f).unwrap().value;
        close(v, 4.0, 1e-9);
    }

    #[test]
    fn single_event_nosignalling_value() {
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let mut lambda = vec![0.0; 16];
        lambda[s.index(0, 0, 0, 0)] = 1.0;
        let f = BellFunctional::new(s, lambda, 0.0).unwrap();
        let v = nosignalling_value(&f).unwrap().value;
        close(v, 1.0, 1e-9);
    }

    #[test]
    fn chsh_quantum_value() {
        let f = chsh_functional();
        let (direct, r) = quantum_value_normalized(&f, 1e-8).unwrap();
        close(direct, 2.0 + sqrt(2.0), 1e-6);
        assert!(r.accurate);

        let penalty = quantum_value_penalty(&f, &DEFAULT_PENALTY_SCHEDULE, 1e-9).unwrap();
        close(penalty.final_value, 2.0 + sqrt(2.0), 1e-5);
        assert!(penalty.monotone);
        close(penalty.final_value, direct, 1e-4);
    }

    #[test]
    fn chsh_weighted_theta_equals_quantum_value() {
        // for this functional the unconstrained optimum is already
        // normalized, so plain weighted theta gives the same number
        let f = chsh_functional();
        let g = f.scenario.exclusivity_graph();
        let w = WeightVector::new(f.lambda.clone()).unwrap();
        let r = weighted_theta(&g, &w, 1e-9).unwrap();
        close(r.value, 2.0 + sqrt(2.0), 1e-6);
    }

    #[test]
    fn pr_box_shape() {
        let s = BellScenario::new(2, 2, 2, 2).unwrap();
        let p = pr_box(&s).unwrap();
        for (x, y) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let mut total = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    total += p[s.index(a, b, x, y)];
                }
            }
            close(total, 1.0, 1e-15);
        }
        assert!(pr_box(&BellScenario::new(2, 2, 3, 3).unwrap()).is_err());
    }

    #[test]
    fn builtins_resolve() {
        assert!(matches!(builtin("chsh").unwrap(), Builtin::Scenario(_)));
        assert!(matches!(builtin("i3322").unwrap(), Builtin::Scenario(_)));
        match builtin("kcbs5").unwrap() {
            Builtin::Weighted { graph, weights } => {
                assert_eq!(graph.n(), 5);
                assert_eq!(weights.len(), 5);
            }
            _ => panic!("kcbs5 should be a weighted graph"),
        }
        match builtin("ncycle:7").unwrap() {
            Builtin::Weighted { graph, .. } => assert_eq!(graph.n(), 7),
            _ => panic!(),
        }
        assert!(builtin("nope").is_err());
        assert!(builtin("ncycle:2").is_err());
        assert!(builtin("ncycle:x").is_err());
    }
}
