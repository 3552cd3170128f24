//! Report types and rendering. JSON output is deterministic: struct fields
//! serialize in declaration order, values are rounded to 9 significant
//! digits first, and wall-clock times appear only in the human tables.

use serde::Serialize;

/// Rounds to 9 significant digits so printed and serialized values agree
/// and repeated runs are byte-identical.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Number formatting for the human tables: plain decimal at readable
/// magnitudes, scientific elsewhere.
pub fn fmt_value(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() < 1e-4 || x.abs() >= 1e9 {
        format!("{x:.8e}")
    } else {
        format!("{}", sig9(x))
    }
}

/// FNV-1a over the canonical input bytes; names the input in reports.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[derive(Serialize, Clone)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CertificateSummary {
    /// Exact witness: the optimal independent set of events.
    WitnessSet { vertices: Vec<usize> },
    /// Primal/dual SDP pair with its residuals.
    Sdp {
        rel_gap: f64,
        primal_infeasibility: f64,
        dual_infeasibility: f64,
        status: String,
    },
    /// LP optimum with dual certificate quality.
    Lp { duality_gap: f64 },
    /// An optimal fractional packing.
    Packing { duality_gap: f64 },
    /// Feasible moment matrix found (membership accepted).
    Moment { min_eigenvalue_bound: f64 },
    /// Separating inequality found (membership rejected).
    Separation { margin: f64 },
    /// Direct inequality check.
    Inequalities { max_violation: f64 },
}

#[derive(Serialize, Clone)]
pub struct BoundReport {
    pub quantity: String,
    pub value: f64,
    pub certificate: CertificateSummary,
    pub tolerance: f64,
    pub input_digest: String,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl BoundReport {
    pub fn human(&self) -> String {
        format!(
            "{:<12} {:>16} {:>10}  {}",
            self.quantity,
            fmt_value(self.value),
            format!("{:.1}ms", self.wall_time_ms),
            self.certificate.human()
        )
    }
}

impl CertificateSummary {
    pub fn human(&self) -> String {
        match self {
            CertificateSummary::WitnessSet { vertices } => {
                format!("witness set {vertices:?}")
            }
            CertificateSummary::Sdp {
                rel_gap, status, ..
            } => format!("sdp gap {rel_gap:.2e} ({status})"),
            CertificateSummary::Lp { duality_gap } => format!("lp gap {duality_gap:.2e}"),
            CertificateSummary::Packing { duality_gap } => {
                format!("packing, lp gap {duality_gap:.2e}")
            }
            CertificateSummary::Moment {
                min_eigenvalue_bound,
            } => format!("moment matrix, lambda_min >= {min_eigenvalue_bound:.2e}"),
            CertificateSummary::Separation { margin } => {
                format!("separating inequality, margin {margin:.2e}")
            }
            CertificateSummary::Inequalities { max_violation } => {
                format!("max violation {max_violation:.2e}")
            }
        }
    }
}

#[derive(Serialize)]
pub struct MembershipReport {
    pub set: String,
    pub inside: bool,
    pub certificate: CertificateSummary,
    pub tolerance: f64,
    pub input_digest: String,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

#[derive(Serialize)]
pub struct ReproduceRow {
    pub id: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct ReproduceGroup {
    pub name: String,
    pub pass: bool,
    pub rows: Vec<ReproduceRow>,
}
