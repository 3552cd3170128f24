//! Subcommand implementations.

use std::time::Instant;

use ncx_core::bell::{
    self, classical_value, nosignalling_value, quantum_value_normalized, BellError, BellFunctional,
    Builtin,
};
use ncx_core::classical::{
    classical_membership, weighted_independence, ClassicalError, ProbabilityAssignment,
    WeightVector,
};
use ncx_core::graph::{ContextHypergraph, Graph};
use ncx_core::linprog::fractional_packing_number;
use ncx_core::reproduce::{run as run_suite, SuiteOptions};
use ncx_core::theta::{theta_body_membership, weighted_theta, ThetaBodyCertificate};

use crate::formats::{parse_file, GraphFile, HypergraphFile, PointFile, ScenarioFile};
use crate::report::{
    digest, sig9, BoundReport, CertificateSummary, MembershipReport, ReproduceGroup, ReproduceRow,
};
use crate::{BoundsArgs, CliError, InputArgs, MembershipArgs, ReproduceArgs};

/// Parsed input, with weights for the plain-graph quantities and a digest
/// naming the instance in reports.
enum Input {
    Graph {
        graph: Graph,
        weights: WeightVector,
        digest: String,
    },
    Hypergraph {
        hypergraph: ContextHypergraph,
        digest: String,
    },
    Scenario {
        functional: BellFunctional,
        digest: String,
        note: Option<&'static str>,
    },
}

fn load(input: &InputArgs) -> Result<Input, CliError> {
    if let Some(name) = &input.builtin {
        return match bell::builtin(name).map_err(classify_bell)? {
            Builtin::Scenario(functional) => {
                let note = if name == "i3322" {
                    Some(
                        "values use the absolute-table convention; subtract 6 \
                         to compare against the zero-bound form",
                    )
                } else {
                    None
                };
                let digest = digest(format!("builtin:{name}").as_bytes());
                Ok(Input::Scenario {
                    functional,
                    digest,
                    note,
                })
            }
            Builtin::Weighted { graph, weights } => {
                let digest = digest(format!("builtin:{name}").as_bytes());
                Ok(Input::Graph {
                    graph,
                    weights,
                    digest,
                })
            }
        };
    }
    if let Some(path) = &input.graph {
        let file: GraphFile = parse_file(path)?;
        let graph = file.build()?;
        let canonical = format!("graph n={} edges={:?}", graph.n(), graph.edges());
        let weights = WeightVector::ones(graph.n());
        return Ok(Input::Graph {
            graph,
            weights,
            digest: digest(canonical.as_bytes()),
        });
    }
    if let Some(path) = &input.hypergraph {
        let file: HypergraphFile = parse_file(path)?;
        let hypergraph = file.build()?;
        let canonical = format!(
            "hypergraph n={} contexts={:?}",
            hypergraph.n(),
            hypergraph.contexts()
        );
        return Ok(Input::Hypergraph {
            hypergraph,
            digest: digest(canonical.as_bytes()),
        });
    }
    if let Some(path) = &input.scenario {
        let file: ScenarioFile = parse_file(path)?;
        let functional = file.build()?;
        let canonical = format!(
            "scenario {}x{}x{}x{} lambda={:?} offset={}",
            functional.scenario.n_a,
            functional.scenario.n_b,
            functional.scenario.n_x,
            functional.scenario.n_y,
            functional.lambda,
            functional.offset
        );
        return Ok(Input::Scenario {
            functional,
            digest: digest(canonical.as_bytes()),
            note: None,
        });
    }
    Err(CliError::input(
        "no input given; pass --builtin, --graph, --hypergraph, or --scenario",
    ))
}

fn classify_bell(e: BellError) -> CliError {
    match e {
        BellError::Theta(ncx_core::theta::ThetaError::Sdp(se)) => {
            CliError::solver(format!("SDP solver failed: {se}"))
        }
        BellError::Lp(le) | BellError::Classical(ClassicalError::Lp(le)) => {
            CliError::solver(format!("LP solver failed: {le}"))
        }
        BellError::LpNotOptimal => CliError::solver(e.to_string()),
        other => CliError::input(other.to_string()),
    }
}

fn classify_theta(e: ncx_core::theta::ThetaError) -> CliError {
    match e {
        ncx_core::theta::ThetaError::Sdp(se) => {
            CliError::solver(format!("SDP solver failed: {se}"))
        }
        other => CliError::input(other.to_string()),
    }
}

pub fn bounds(args: &BoundsArgs) -> Result<i32, CliError> {
    let input = load(&args.input)?;
    let which: Vec<&str> = match args.which.as_str() {
        "all" => match &input {
            Input::Scenario { .. } => vec!["classical", "qm1", "ns"],
            _ => vec!["alpha", "theta", "alphastar"],
        },
        list => list.split(',').map(str::trim).collect(),
    };

    let mut reports = Vec::new();
    for quantity in which {
        reports.push(compute_bound(&input, quantity, args.tol)?);
    }

    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&reports).expect("serializable")
        );
    } else {
        if let Input::Scenario { note: Some(n), .. } = &input {
            println!("note: {n}");
        }
        for r in &reports {
            println!("{}", r.human());
        }
    }
    Ok(0)
}

fn compute_bound(input: &Input, quantity: &str, tol: f64) -> Result<BoundReport, CliError> {
    let started = Instant::now();
    let (value, certificate, tolerance, input_digest) = match (input, quantity) {
        (
            Input::Graph {
                graph,
                weights,
                digest,
            },
            "alpha",
        ) => {
            let mis = weighted_independence(graph, weights)
                .map_err(|e| CliError::input(e.to_string()))?;
            (
                mis.value,
                CertificateSummary::WitnessSet {
                    vertices: mis.vertices,
                },
                0.0,
                digest.clone(),
            )
        }
        (
            Input::Graph {
                graph,
                weights,
                digest,
            },
            "theta",
        ) => {
            let r = weighted_theta(graph, weights, tol).map_err(classify_theta)?;
            let c = &r.certificate;
            (
                r.value,
                CertificateSummary::Sdp {
                    rel_gap: sig9(c.rel_gap),
                    primal_infeasibility: sig9(c.primal_infeas),
                    dual_infeasibility: sig9(c.dual_infeas),
                    status: if c.accurate { "optimal" } else { "inaccurate" }.into(),
                },
                tol,
                digest.clone(),
            )
        }
        (
            Input::Graph {
                graph,
                weights,
                digest,
            },
            "alphastar",
        ) => {
            let fp = fractional_packing_number(&graph.clique_hypergraph(), weights)
                .map_err(|e| CliError::solver(e.to_string()))?;
            (
                fp.value,
                CertificateSummary::Packing {
                    duality_gap: sig9(fp.duality_gap),
                },
                1e-9,
                digest.clone(),
            )
        }
        (Input::Hypergraph { hypergraph, digest }, "alpha") => {
            let g = hypergraph.adjacency_graph();
            let mis = weighted_independence(&g, &WeightVector::ones(g.n()))
                .map_err(|e| CliError::input(e.to_string()))?;
            (
                mis.value,
                CertificateSummary::WitnessSet {
                    vertices: mis.vertices,
                },
                0.0,
                digest.clone(),
            )
        }
        (Input::Hypergraph { hypergraph, digest }, "theta") => {
            let g = hypergraph.adjacency_graph();
            let r = weighted_theta(&g, &WeightVector::ones(g.n()), tol).map_err(classify_theta)?;
            let c = &r.certificate;
            (
                r.value,
                CertificateSummary::Sdp {
                    rel_gap: sig9(c.rel_gap),
                    primal_infeasibility: sig9(c.primal_infeas),
                    dual_infeasibility: sig9(c.dual_infeas),
                    status: if c.accurate { "optimal" } else { "inaccurate" }.into(),
                },
                tol,
                digest.clone(),
            )
        }
        (Input::Hypergraph { hypergraph, digest }, "alphastar") => {
            let fp = fractional_packing_number(hypergraph, &WeightVector::ones(hypergraph.n()))
                .map_err(|e| CliError::solver(e.to_string()))?;
            (
                fp.value,
                CertificateSummary::Packing {
                    duality_gap: sig9(fp.duality_gap),
                },
                1e-9,
                digest.clone(),
            )
        }
        (
            Input::Scenario {
                functional, digest, ..
            },
            "classical",
        ) => {
            let f = functional.normalize();
            let (value, witness) = classical_value(&f).map_err(classify_bell)?;
            (
                value,
                CertificateSummary::WitnessSet { vertices: witness },
                0.0,
                digest.clone(),
            )
        }
        (
            Input::Scenario {
                functional, digest, ..
            },
            "ns",
        ) => {
            let f = functional.normalize();
            let ns = nosignalling_value(&f).map_err(classify_bell)?;
            (
                ns.value,
                CertificateSummary::Lp {
                    duality_gap: sig9(ns.duality_gap),
                },
                1e-9,
                digest.clone(),
            )
        }
        (
            Input::Scenario {
                functional, digest, ..
            },
            "qm1",
        ) => {
            let f = functional.normalize();
            let (value, r) = quantum_value_normalized(&f, tol).map_err(classify_bell)?;
            (
                value,
                CertificateSummary::Sdp {
                    rel_gap: sig9(r.rel_gap),
                    primal_infeasibility: sig9(r.primal_infeas),
                    dual_infeasibility: sig9(r.dual_infeas),
                    status: if r.accurate { "optimal" } else { "inaccurate" }.into(),
                },
                tol,
                digest.clone(),
            )
        }
        (Input::Scenario { .. }, q @ ("alpha" | "theta" | "alphastar")) => {
            return Err(CliError::input(format!(
                "'{q}' applies to graph or hypergraph inputs; scenario inputs take classical, ns, qm1"
            )));
        }
        (_, q @ ("classical" | "ns" | "qm1")) => {
            return Err(CliError::input(format!(
                "'{q}' applies to scenario inputs; graph and hypergraph inputs take alpha, theta, alphastar"
            )));
        }
        (_, unknown) => {
            return Err(CliError::input(format!(
                "unknown quantity '{unknown}'; available: alpha, theta, alphastar, classical, ns, qm1, all"
            )));
        }
    };
    Ok(BoundReport {
        quantity: quantity.to_string(),
        value: sig9(value),
        certificate,
        tolerance,
        input_digest,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn membership(args: &MembershipArgs) -> Result<i32, CliError> {
    let input = load(&args.input)?;
    let point_file: PointFile = parse_file(&args.point)?;
    let started = Instant::now();
    let tol = args.tol;

    let (inside, certificate, input_digest) = match (&input, args.set.as_str()) {
        (Input::Graph { graph, digest, .. }, "C") => {
            classical_verdict(graph, &point_file.p, tol, digest)?
        }
        (Input::Graph { graph, digest, .. }, "QM") => {
            quantum_verdict(graph, &point_file.p, tol, digest, None)?
        }
        (Input::Graph { graph, digest, .. }, "GPT") => {
            gpt_verdict(&graph.clique_hypergraph(), &point_file.p, tol, digest)?
        }
        (Input::Hypergraph { hypergraph, digest }, "C") => {
            classical_verdict(&hypergraph.adjacency_graph(), &point_file.p, tol, digest)?
        }
        (Input::Hypergraph { hypergraph, digest }, "QM") => quantum_verdict(
            &hypergraph.adjacency_graph(),
            &point_file.p,
            tol,
            digest,
            None,
        )?,
        (Input::Hypergraph { hypergraph, digest }, "GPT") => {
            gpt_verdict(hypergraph, &point_file.p, tol, digest)?
        }
        (Input::Graph { .. } | Input::Hypergraph { .. }, "NS") => {
            return Err(CliError::input(
                "the no-signalling set needs a scenario input (it constrains setting pairs)",
            ));
        }
        (
            Input::Scenario {
                functional, digest, ..
            },
            set @ ("C" | "QM" | "NS" | "GPT"),
        ) => {
            let s = functional.scenario;
            let g = s.exclusivity_graph();
            let normalized = normalization_holds(&s, &point_file.p, tol)?;
            match set {
                "C" => {
                    let (raw, cert, d) = classical_verdict(&g, &point_file.p, tol, digest)?;
                    (raw && normalized, cert, d)
                }
                "QM" => quantum_verdict(&g, &point_file.p, tol, digest, Some(normalized))?,
                "GPT" => gpt_verdict(&g.clique_hypergraph(), &point_file.p, tol, digest)?,
                _ => {
                    // no-signalling: generalized constraints plus normalization
                    let (raw, cert, d) =
                        gpt_verdict(&g.clique_hypergraph(), &point_file.p, tol, digest)?;
                    (raw && normalized, cert, d)
                }
            }
        }
        (_, unknown) => {
            return Err(CliError::input(format!(
                "unknown set '{unknown}'; available: C, QM, GPT, NS"
            )));
        }
    };

    let report = MembershipReport {
        set: args.set.clone(),
        inside,
        certificate,
        tolerance: tol,
        input_digest,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else {
        println!(
            "inside({}): {}  [{}]  ({:.1}ms)",
            report.set,
            report.inside,
            report.certificate.human(),
            report.wall_time_ms
        );
    }
    Ok(0)
}

fn normalization_holds(
    s: &ncx_core::bell::BellScenario,
    p: &[f64],
    tol: f64,
) -> Result<bool, CliError> {
    if p.len() != s.vertex_count() {
        return Err(CliError::input(format!(
            "point has {} entries, scenario has {} events",
            p.len(),
            s.vertex_count()
        )));
    }
    Ok(s.normalization_groups().iter().all(|grp| {
        let sum: f64 = grp.iter().map(|&i| p[i]).sum();
        (sum - 1.0).abs() <= tol
    }))
}

fn classical_verdict(
    g: &Graph,
    p: &[f64],
    tol: f64,
    digest: &str,
) -> Result<(bool, CertificateSummary, String), CliError> {
    let pa = ProbabilityAssignment::new(p.to_vec()).map_err(|e| CliError::input(e.to_string()))?;
    let m = classical_membership(g, &pa, tol).map_err(|e| match e {
        ClassicalError::Lp(le) => CliError::solver(le.to_string()),
        other => CliError::input(other.to_string()),
    })?;
    let cert = match &m.certificate {
        ncx_core::classical::ClassicalCertificate::Combination(_) => CertificateSummary::Moment {
            min_eigenvalue_bound: 0.0,
        },
        ncx_core::classical::ClassicalCertificate::Separating { functional, rhs } => {
            let at_p: f64 = functional.iter().zip(p).map(|(a, q)| a * q).sum();
            CertificateSummary::Separation {
                margin: sig9(at_p - rhs),
            }
        }
    };
    let cert = if m.inside {
        CertificateSummary::Inequalities {
            max_violation: sig9(m.distance),
        }
    } else {
        cert
    };
    Ok((m.inside, cert, digest.to_string()))
}

fn quantum_verdict(
    g: &Graph,
    p: &[f64],
    tol: f64,
    digest: &str,
    normalization: Option<bool>,
) -> Result<(bool, CertificateSummary, String), CliError> {
    let pa = ProbabilityAssignment::new(p.to_vec()).map_err(|e| CliError::input(e.to_string()))?;
    let m = theta_body_membership(g, &pa, tol).map_err(classify_theta)?;
    let inside = m.inside && normalization.unwrap_or(true);
    let cert = match &m.certificate {
        ThetaBodyCertificate::Moment(_) => CertificateSummary::Moment {
            min_eigenvalue_bound: sig9(m.t_star),
        },
        ThetaBodyCertificate::Separating { margin, .. } => CertificateSummary::Separation {
            margin: sig9(*margin),
        },
    };
    Ok((inside, cert, digest.to_string()))
}

fn gpt_verdict(
    h: &ContextHypergraph,
    p: &[f64],
    tol: f64,
    digest: &str,
) -> Result<(bool, CertificateSummary, String), CliError> {
    let m = ncx_core::linprog::fuzzy_membership(h, p, tol)
        .map_err(|e| CliError::input(e.to_string()))?;
    Ok((
        m.inside,
        CertificateSummary::Inequalities {
            max_violation: sig9(m.max_violation),
        },
        digest.to_string(),
    ))
}

pub fn reproduce(args: &ReproduceArgs) -> Result<i32, CliError> {
    let opts = SuiteOptions { sdp_tol: args.tol };
    let criteria = run_suite(&args.only, &opts);
    if criteria.is_empty() {
        return Err(CliError::input(format!(
            "no criterion group matches '{}'",
            args.only
        )));
    }
    let groups: Vec<ReproduceGroup> = criteria
        .iter()
        .map(|c| ReproduceGroup {
            name: c.name.clone(),
            pass: c.pass(),
            rows: c
                .rows
                .iter()
                .map(|r| ReproduceRow {
                    id: r.id.clone(),
                    expected: sig9(r.expected),
                    computed: sig9(r.computed),
                    tolerance: r.tolerance,
                    pass: r.pass,
                })
                .collect(),
        })
        .collect();
    let all_pass = groups.iter().all(|g| g.pass);

    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&groups).expect("serializable")
        );
    } else {
        for g in &groups {
            println!("[{}] {}", if g.pass { "PASS" } else { "FAIL" }, g.name);
            for row in &g.rows {
                let mark = if row.pass { "ok  " } else { "FAIL" };
                println!(
                    "  {mark} {:<55} expected {:<15} computed {:<15} tol {:.1e}",
                    row.id,
                    crate::report::fmt_value(row.expected),
                    crate::report::fmt_value(row.computed),
                    row.tolerance
                );
            }
        }
        println!(
            "{}",
            if all_pass {
                "all reference values reproduced"
            } else {
                "MISMATCHES FOUND"
            }
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}
