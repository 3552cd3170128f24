//! Exact classical quantities: (weighted) independence numbers and
//! membership in the 0-1 polytope of independent-set indicators.
//!
//! The independence number is the largest value a noncontextual assignment
//! can give to the sum of all event probabilities; its weighted version
//! covers arbitrary nonnegative objectives. Both are computed exactly by
//! branch-and-bound with a greedy clique-cover bound, which is plenty for
//! graphs up to ~40 vertices. Membership in the classical polytope is decided
//! by LP feasibility over the explicitly enumerated independent sets, so it
//! is restricted to small vertex counts.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::graph::Graph;
use crate::linprog::{lp_solve, LpError, LpProblem, Sense};

/// Nonnegative per-vertex objective weights.
#[derive(Clone, PartialEq, Debug)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<WeightVector, ClassicalError> {
        if let Some((i, &w)) = entries
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(ClassicalError::NegativeWeight { index: i, value: w });
        }
        Ok(WeightVector(entries))
    }

    pub fn ones(n: usize) -> WeightVector {
        WeightVector(vec![1.0; n])
    }

    /// Indicator of a single vertex.
    pub fn one_hot(n: usize, k: usize) -> WeightVector {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        WeightVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-vertex probabilities, each in `[0, 1]`.
#[derive(Clone, PartialEq, Debug)]
pub struct ProbabilityAssignment(Vec<f64>);

impl ProbabilityAssignment {
    pub fn new(entries: Vec<f64>) -> Result<ProbabilityAssignment, ClassicalError> {
        if let Some((i, &p)) = entries
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0 || **p > 1.0)
        {
            return Err(ClassicalError::ProbabilityOutOfRange { index: i, value: p });
        }
        Ok(ProbabilityAssignment(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum ClassicalError {
    NegativeWeight {
        index: usize,
        value: f64,
    },
    ProbabilityOutOfRange {
        index: usize,
        value: f64,
    },
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    /// Membership enumerates every independent set, so it refuses graphs
    /// beyond this many vertices.
    InstanceTooLarge {
        n: usize,
        limit: usize,
    },
    Lp(LpError),
}

impl core::fmt::Display for ClassicalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ClassicalError::NegativeWeight { index, value } => {
                write!(f, "weight {index} is {value}; weights must be nonnegative (normalize the functional first)")
            }
            ClassicalError::ProbabilityOutOfRange { index, value } => {
                write!(f, "probability {index} is {value}, outside [0, 1]")
            }
            ClassicalError::DimensionMismatch { expected, got } => {
                write!(f, "vector has {got} entries, graph has {expected} vertices")
            }
            ClassicalError::InstanceTooLarge { n, limit } => {
                write!(
                    f,
                    "instance too large: {n} vertices exceeds the enumeration limit {limit}"
                )
            }
            ClassicalError::Lp(e) => write!(f, "membership LP failed: {e}"),
        }
    }
}

impl core::error::Error for ClassicalError {}

impl From<LpError> for ClassicalError {
    fn from(e: LpError) -> Self {
        ClassicalError::Lp(e)
    }
}

/// A maximum-weight independent set: the optimum and one witness attaining it.
#[derive(Clone, Debug)]
pub struct IndependentSet {
    pub value: f64,
    pub vertices: Vec<usize>,
}

/// Independence number `α(G)` with a witness set.
pub fn independence_number(g: &Graph) -> IndependentSet {
    weighted_independence(g, &WeightVector::ones(g.n())).expect("all-ones weights are valid")
}

/// Maximum of `sum_{i in S} w_i` over independent sets `S`.
///
/// Branch-and-bound: branch on the highest-degree candidate vertex, bound by
/// a greedy clique cover (each clique contributes at most its best weight).
pub fn weighted_independence(
    g: &Graph,
    weights: &WeightVector,
) -> Result<IndependentSet, ClassicalError> {
    if weights.len() != g.n() {
        return Err(ClassicalError::DimensionMismatch {
            expected: g.n(),
            got: weights.len(),
        });
    }
    let n = g.n();
    let w = weights.as_slice();

    // static branching order: degree descending, index ascending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }

    let mut best = IndependentSet {
        value: 0.0,
        vertices: Vec::new(),
    };
    let mut candidates = BitSet::new(n);
    for v in 0..n {
        candidates.insert(v);
    }
    let mut current = Vec::new();
    branch(g, w, &rank, &candidates, &mut current, 0.0, &mut best);
    // zero-weight vertices picked up along the way add nothing; drop them
    best.vertices.retain(|&v| w[v] > 0.0);
    best.vertices.sort_unstable();
    debug_assert!(is_independent(g, &best.vertices));
    Ok(best)
}

fn branch(
    g: &Graph,
    w: &[f64],
    rank: &[usize],
    candidates: &BitSet,
    current: &mut Vec<usize>,
    current_weight: f64,
    best: &mut IndependentSet,
) {
    if current_weight > best.value + 1e-12 {
        best.value = current_weight;
        best.vertices = current.clone();
    }
    if candidates.is_empty() {
        return;
    }
    if current_weight + clique_cover_bound(g, w, candidates) <= best.value + 1e-12 {
        return;
    }
    // branch vertex: best rank (highest degree first)
    let v = candidates.iter().min_by_key(|&u| rank[u]).unwrap();

    // include v
    let mut with_v = candidates.clone();
    with_v.remove(v);
    with_v.subtract(g.neighbors(v));
    current.push(v);
    branch(g, w, rank, &with_v, current, current_weight + w[v], best);
    current.pop();

    // exclude v
    let mut without_v = candidates.clone();
    without_v.remove(v);
    branch(g, w, rank, &without_v, current, current_weight, best);
}

/// Upper bound on the best weight an independent set can pick up inside
/// `candidates`: cover the candidates greedily by cliques; an independent set
/// takes at most one vertex per clique, so at most the max weight of each.
fn clique_cover_bound(g: &Graph, w: &[f64], candidates: &BitSet) -> f64 {
    let mut remaining = candidates.clone();
    let mut bound = 0.0;
    while let Some(seed) = remaining.first() {
        let mut clique_max = w[seed];
        let mut common = remaining.clone();
        common.intersect_with(g.neighbors(seed));
        remaining.remove(seed);
        while let Some(v) = common.first() {
            clique_max = clique_max.max(w[v]);
            remaining.remove(v);
            common.remove(v);
            common.intersect_with(g.neighbors(v));
        }
        bound += clique_max;
    }
    bound
}

fn is_independent(g: &Graph, vertices: &[usize]) -> bool {
    vertices
        .iter()
        .enumerate()
        .all(|(k, &i)| vertices[k + 1..].iter().all(|&j| !g.adjacent(i, j)))
}

/// Verdict of the classical membership test.
#[derive(Clone, Debug)]
pub struct ClassicalMembership {
    pub inside: bool,
    /// Distance in the infinity norm between `p` and the nearest point of
    /// the polytope representable over the enumerated sets.
    pub distance: f64,
    pub certificate: ClassicalCertificate,
}

#[derive(Clone, Debug)]
pub enum ClassicalCertificate {
    /// Convex combination of independent-set indicators reproducing `p`
    /// (weights paired with the sets).
    Combination(Vec<(f64, Vec<usize>)>),
    /// Inequality `a . q <= rhs` satisfied by every point of the polytope
    /// but violated by `p`.
    Separating { functional: Vec<f64>, rhs: f64 },
}

pub const MEMBERSHIP_ENUMERATION_LIMIT: usize = 24;

/// Decides whether `p` lies within `tol` (infinity norm) of the convex hull
/// of independent-set indicator vectors.
///
/// All independent sets are enumerated, not only the maximal ones, matching
/// the polytope's definition; the vertex count is capped at
/// [`MEMBERSHIP_ENUMERATION_LIMIT`].
pub fn classical_membership(
    g: &Graph,
    p: &ProbabilityAssignment,
    tol: f64,
) -> Result<ClassicalMembership, ClassicalError> {
    let n = g.n();
    if p.len() != n {
        return Err(ClassicalError::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    if n > MEMBERSHIP_ENUMERATION_LIMIT {
        return Err(ClassicalError::InstanceTooLarge {
            n,
            limit: MEMBERSHIP_ENUMERATION_LIMIT,
        });
    }
    let sets = enumerate_independent_sets(g);
    let pv = p.as_slice();

    // min t  s.t.  -t <= (sum_S theta_S sigma_S - p)_i <= t,
    //              sum_S theta_S = 1, theta >= 0, t >= 0
    let num_vars = sets.len() + 1;
    let t_col = sets.len();
    let mut objective = vec![0.0; num_vars];
    objective[t_col] = 1.0;
    let mut lp = LpProblem::new(Sense::Minimize, objective);
    for i in 0..n {
        let mut upper = vec![0.0; num_vars];
        let mut lower = vec![0.0; num_vars];
        for (s, set) in sets.iter().enumerate() {
            if set.contains(i) {
                upper[s] = 1.0;
                lower[s] = -1.0;
            }
        }
        upper[t_col] = -1.0;
        lower[t_col] = -1.0;
        lp.add_ineq(upper, pv[i]);
        lp.add_ineq(lower, -pv[i]);
    }
    lp.add_eq(
        (0..num_vars)
            .map(|j| if j == t_col { 0.0 } else { 1.0 })
            .collect(),
        1.0,
    );

    let sol = lp_solve(&lp)?
        .optimal()
        .expect("membership LP is feasible (any single set, large t) and bounded");
    let distance = sol.value.max(0.0);

    if distance <= tol {
        let mut combination: Vec<(f64, Vec<usize>)> = Vec::new();
        for (s, set) in sets.iter().enumerate() {
            if sol.x[s] > 1e-12 {
                combination.push((sol.x[s], set.to_vec()));
            }
        }
        Ok(ClassicalMembership {
            inside: true,
            distance,
            certificate: ClassicalCertificate::Combination(combination),
        })
    } else {
        // dual separating inequality: a = u - v over the paired rows,
        // rhs = -nu from the convexity row; a . sigma_S <= rhs for all S
        // while a . p = t* + rhs
        let mut functional = vec![0.0; n];
        for i in 0..n {
            functional[i] = sol.dual_ineq[2 * i] - sol.dual_ineq[2 * i + 1];
        }
        let rhs = -sol.dual_eq[0];
        Ok(ClassicalMembership {
            inside: false,
            distance,
            certificate: ClassicalCertificate::Separating { functional, rhs },
        })
    }
}

/// All independent sets of `g`, the empty set included, in a deterministic
/// order. Exponential in general; guarded by the caller's vertex cap.
fn enumerate_independent_sets(g: &Graph) -> Vec<BitSet> {
    let n = g.n();
    let mut out = Vec::new();
    let mut current = BitSet::new(n);
    fn recurse(g: &Graph, v: usize, current: &mut BitSet, out: &mut Vec<BitSet>) {
        if v == g.n() {
            out.push(current.clone());
            return;
        }
        // exclude v
        recurse(g, v + 1, current, out);
        // include v if compatible
        if g.neighbors(v).intersection_count(current) == 0 {
            current.insert(v);
            recurse(g, v + 1, current, out);
            current.remove(v);
        }
    }
    recurse(g, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_alpha_is_two() {
        let g = Graph::cycle(5).unwrap();
        let mis = independence_number(&g);
        assert_eq!(mis.value, 2.0);
        assert_eq!(mis.vertices.len(), 2);
        assert!(is_independent(&g, &mis.vertices));
    }

    #[test]
    fn complete_graph_alpha_is_one() {
        for n in 1..8 {
            assert_eq!(independence_number(&Graph::complete(n)).value, 1.0);
        }
    }

    #[test]
    fn c9_matches_brute_force() {
        let g = Graph::cycle(9).unwrap();
        let mut brute = 0usize;
        for mask in 0u32..(1 << 9) {
            let verts: Vec<usize> = (0..9).filter(|&v| mask >> v & 1 == 1).collect();
            if is_independent(&g, &verts) {
                brute = brute.max(verts.len());
            }
        }
        assert_eq!(brute, 4);
        assert_eq!(independence_number(&g).value, 4.0);
    }

    #[test]
    fn weighted_matches_unweighted_on_ones() {
        for g in [
            Graph::cycle(7).unwrap(),
            Graph::circulant(8, &[1, 4]).unwrap(),
            Graph::complete(5),
        ] {
            let a = independence_number(&g).value;
            let b = weighted_independence(&g, &WeightVector::ones(g.n()))
                .unwrap()
                .value;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn one_hot_weight() {
        let g = Graph::circulant(8, &[1, 4]).unwrap();
        for k in 0..8 {
            let w = WeightVector::one_hot(8, k);
            let r = weighted_independence(&g, &w).unwrap();
            assert_eq!(r.value, 1.0);
            assert_eq!(r.vertices, vec![k]);
        }
    }

    #[test]
    fn rejects_negative_weights() {
        assert!(matches!(
            WeightVector::new(vec![1.0, -0.5]),
            Err(ClassicalError::NegativeWeight { index: 1, .. })
        ));
    }

    #[test]
    fn membership_convex_combination() {
        let g = Graph::cycle(5).unwrap();
        let p = ProbabilityAssignment::new(vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let m = classical_membership(&g, &p, 1e-9).unwrap();
        assert!(m.inside);
        let ClassicalCertificate::Combination(parts) = &m.certificate else {
            panic!("expected a combination");
        };
        // certificate reproduces p
        let mut recon = vec![0.0; 5];
        let mut total = 0.0;
        for (theta, set) in parts {
            total += theta;
            for &i in set {
                recon[i] += theta;
            }
        }
        assert!((total - 1.0).abs() < 1e-9);
        for i in 0..5 {
            assert!((recon[i] - p.as_slice()[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn membership_rejects_uniform_half_on_pentagon() {
        let g = Graph::cycle(5).unwrap();
        let p = ProbabilityAssignment::new(vec![0.5; 5]).unwrap();
        let m = classical_membership(&g, &p, 1e-9).unwrap();
        assert!(!m.inside);
        let ClassicalCertificate::Separating { functional, rhs } = &m.certificate else {
            panic!("expected a separating inequality");
        };
        // the inequality must hold on every independent set and cut off p
        for set in enumerate_independent_sets(&g) {
            let lhs: f64 = set.iter().map(|i| functional[i]).sum();
            assert!(lhs <= rhs + 1e-8);
        }
        let at_p: f64 = functional.iter().map(|a| a * 0.5).sum();
        assert!(at_p > rhs + 1e-10);
    }

    #[test]
    fn membership_zero_vector() {
        let g = Graph::complete(4);
        let p = ProbabilityAssignment::new(vec![0.0; 4]).unwrap();
        assert!(classical_membership(&g, &p, 1e-9).unwrap().inside);
    }

    #[test]
    fn membership_size_guard() {
        let g = Graph::empty(25);
        let p = ProbabilityAssignment::new(vec![0.0; 25]).unwrap();
        assert!(matches!(
            classical_membership(&g, &p, 1e-9),
            Err(ClassicalError::InstanceTooLarge { n: 25, limit: 24 })
        ));
    }

    #[test]
    fn probability_validation() {
        assert!(ProbabilityAssignment::new(vec![0.0, 1.0]).is_ok());
        assert!(ProbabilityAssignment::new(vec![1.1]).is_err());
        assert!(ProbabilityAssignment::new(vec![-0.1]).is_err());
    }
}
