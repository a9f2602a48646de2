use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde_json::{json, Value};
use thiserror::Error;

use freeproj::complex::{
    build_bipartite, build_full_complex, enumerate_spaces, ComplexError, ComplexSpec,
};
use freeproj::graph::{parse_edge_list, write_edge_list, GraphError};
use freeproj::groups::{
    aut_transfer, bfs_closure, cayley_graph, kernel_check, psi_report, sample_invertible,
    standard_connection_set, standard_generators, swapped_psi_pairs, verify_exceptional_psi,
    verify_not_bn_pair, CheckReport, GroupError, DEFAULT_CLOSURE_CAP,
};
use freeproj::linalg::{count_contained, count_containing, count_spaces, gl_order, ModuleType};
use freeproj::rigidity::{
    canonicalize, is_isomorphic, reconstruct_full, CanonOptions, Params, RigidityError,
};
use freeproj::spectra::{
    bipartite_gram, closed_spectrum, compare_spectra, expansion_formula, expansion_of,
    float_deviation, gamma2_from_graph, gamma2_recursive, spectrum_from_gamma, SpectraError,
    SpectrumTable, DEFAULT_GAMMA_CAP,
};
use freeproj::{Flavor, Matrix, RingSpec};

use crate::{Command, Common, GroupCheck, Method, Verdict};

const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub struct Outcome {
    pub verdict: Verdict,
    pub result: Value,
    pub text: Vec<String>,
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn complex(spec: RingSpec, common: &Common) -> Result<ComplexSpec, CliError> {
    ComplexSpec::with_cap(spec, common.d, common.cap).map_err(|e| match e {
        ComplexError::DimensionTooSmall(_) => CliError::Config(e.to_string()),
        e => CliError::Complex(e),
    })
}

fn check_colors(m: u32, n: u32, d: u32) -> Result<(), CliError> {
    if !(1 <= m && m < n && n < d) {
        return Err(CliError::Config(format!(
            "need 1 <= m < n <= d - 1, got m = {m}, n = {n}, d = {d}"
        )));
    }
    Ok(())
}

pub fn run(cmd: &Command, common: &Common, spec: RingSpec) -> Result<Outcome, CliError> {
    match cmd {
        Command::Enumerate { n, m, edges } => enumerate(common, spec, *m, *n, edges.as_deref()),
        Command::Spectrum { n, method } => spectrum(common, spec, *n, *method),
        Command::Isocheck { m, n, other } => isocheck(common, spec, *m, *n, *other),
        Command::Reconstruct {
            from,
            input,
            seed,
            emit,
        } => reconstruct(
            common,
            spec,
            *from,
            input.as_deref(),
            *seed,
            emit.as_deref(),
        ),
        Command::Groups { check } => groups(common, spec, *check),
        Command::Conjecture { m, n, primes } => conjecture(common, spec, *m, *n, *primes),
    }
}

fn enumerate(
    common: &Common,
    spec: RingSpec,
    m: Option<u32>,
    n: u32,
    edges: Option<&std::path::Path>,
) -> Result<Outcome, CliError> {
    let d = common.d;
    if n >= d {
        return Err(CliError::Config(format!(
            "need 1 <= n <= d - 1, got n = {n}, d = {d}"
        )));
    }
    let cs = complex(spec, common)?;
    let (q, r) = (spec.q() as u64, spec.r());
    let Some(m) = m else {
        let found = enumerate_spaces(&cs, n)?.len();
        let expected = count_spaces(n, d, q, r);
        let ok = BigUint::from(found) == expected;
        return Ok(Outcome {
            verdict: pass_if(ok),
            result: json!({ "n": n, "count": found, "expected": expected.to_string() }),
            text: vec![format!("{n}-spaces: {found} (expected {expected})")],
        });
    };
    let (lo, hi) = (m.min(n), m.max(n));
    check_colors(lo, hi, d)?;
    let g = build_bipartite(&cs, lo, hi)?;
    let down = count_containing(hi, &ModuleType::free(lo), d, q, r);
    let up = count_contained(lo, &ModuleType::free(hi), q, r);
    let layers: Vec<Value> = [lo, hi]
        .iter()
        .map(|&c| json!({ "color": c, "count": g.layer(c).len(), "expected": count_spaces(c, d, q, r).to_string() }))
        .collect();
    let mut ok = [lo, hi]
        .iter()
        .all(|&c| BigUint::from(g.layer(c).len()) == count_spaces(c, d, q, r));
    ok &= (0..g.vertex_count() as u32).all(|v| {
        let expected = if g.color_of(v) == lo { &down } else { &up };
        BigUint::from(g.graph().degree(v)) == *expected
    });
    if let Some(path) = edges {
        std::fs::write(path, g.edge_list())?;
    }
    let text = vec![
        format!(
            "{lo}-spaces: {} (expected {})",
            g.layer(lo).len(),
            count_spaces(lo, d, q, r)
        ),
        format!(
            "{hi}-spaces: {} (expected {})",
            g.layer(hi).len(),
            count_spaces(hi, d, q, r)
        ),
        format!("edges: {}; degrees {down} and {up}", g.edge_count()),
    ];
    Ok(Outcome {
        verdict: pass_if(ok),
        result: json!({
            "m": lo,
            "n": hi,
            "layers": layers,
            "edges": g.edge_count(),
            "degree": { "lower": down.to_string(), "upper": up.to_string() },
        }),
        text,
    })
}

fn spectra_config(e: SpectraError) -> CliError {
    match e {
        SpectraError::BadParameters { .. } => CliError::Config(e.to_string()),
        e => CliError::Spectra(e),
    }
}

fn signed_eigenvalues(t: &SpectrumTable) -> Vec<String> {
    let mut out = vec![];
    for &(l, mult) in &t.lambda_squared {
        let root = (l as f64).sqrt();
        let shown = if root.fract() == 0.0 {
            format!("{root}")
        } else {
            format!("sqrt({l})")
        };
        out.push(format!("+-{shown} x{mult}"));
    }
    if t.zeros > 0 {
        out.push(format!("0 x{}", t.zeros));
    }
    out
}

fn spectrum(common: &Common, spec: RingSpec, n: u32, method: Method) -> Result<Outcome, CliError> {
    let (d, q, r) = (common.d, spec.q() as u64, spec.r());
    let cs = complex(spec, common)?;
    let mut tables: BTreeMap<&str, SpectrumTable> = BTreeMap::new();
    let mut deviation: f64 = 0.0;
    let want = |m: Method| method == m || method == Method::All;
    if want(Method::Closed) {
        tables.insert(
            "closed",
            closed_spectrum(d, n, q, r).map_err(spectra_config)?,
        );
    }
    if want(Method::Recursive) {
        let cap = DEFAULT_GAMMA_CAP.max(common.cap.min(usize::MAX as u64) as usize);
        let gamma = gamma2_recursive(d, n, q, r, cap).map_err(spectra_config)?;
        let t = spectrum_from_gamma(&gamma, cs.layer_size(n))?;
        deviation = deviation.max(float_deviation(&gamma, &t));
        tables.insert("recursive", t);
    }
    if want(Method::Graph) {
        if n >= d {
            return Err(CliError::Config(format!(
                "need 2 <= n <= d - 1, got n = {n}, d = {d}"
            )));
        }
        let g = build_bipartite(&cs, 1, n)?;
        let gamma = gamma2_from_graph(&g)?;
        let t = spectrum_from_gamma(&gamma, cs.layer_size(n))?;
        deviation = deviation.max(float_deviation(&gamma, &t));
        tables.insert("graph", t);
    }
    let first = tables.values().next().expect("at least one method").clone();
    let agree = tables.values().all(|t| *t == first);
    let formula = expansion_formula(d, n, q);
    let exp = expansion_of(&first);
    let exp_ok = exp.as_ref().is_none_or(|e| e.ratio() == formula);
    let ok = agree && exp_ok && deviation <= FLOAT_TOL;
    let mut text = vec![];
    for (k, t) in &tables {
        text.push(format!("[{k}]"));
        text.extend(t.to_text().lines().map(String::from));
    }
    text.push(format!(
        "eigenvalues: {}",
        signed_eigenvalues(&first).join(", ")
    ));
    if let Some(e) = &exp {
        text.push(format!(
            "expansion: sqrt({}/{}) = {:.6} (formula {formula})",
            e.numerator, e.denominator, e.value
        ));
    }
    text.push(format!(
        "methods agree: {agree}; float deviation {deviation:.1e}"
    ));
    Ok(Outcome {
        verdict: pass_if(ok),
        result: json!({
            "n": n,
            "tables": tables.iter().map(|(k, t)| (k.to_string(), t.to_json())).collect::<serde_json::Map<_, _>>(),
            "agree": agree,
            "spectrum": first.to_json(),
            "expansion": exp.map(|e| json!({
                "squared": format!("{}/{}", e.numerator, e.denominator),
                "value": e.value,
                "formula": formula.to_string(),
            })),
            "float_deviation": deviation,
        }),
        text,
    })
}

fn other_flavor(f: Flavor) -> Flavor {
    match f {
        Flavor::IntegerMod => Flavor::TruncatedPoly,
        Flavor::TruncatedPoly => Flavor::IntegerMod,
    }
}

fn isocheck(
    common: &Common,
    spec: RingSpec,
    m: u32,
    n: u32,
    other: Option<Flavor>,
) -> Result<Outcome, CliError> {
    check_colors(m, n, common.d)?;
    let second = RingSpec::new(
        other.unwrap_or(other_flavor(spec.flavor())),
        spec.p(),
        spec.r(),
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let graphs = [spec, second]
        .iter()
        .map(|&s| build_bipartite(&complex(s, common)?, m, n).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let cmp = compare_spectra(
        &bipartite_gram(&graphs[0])?,
        &bipartite_gram(&graphs[1])?,
        3,
    );
    let plain: Vec<_> = graphs.iter().map(|g| g.graph().uncolored()).collect();
    let labels = [canonicalize(&plain[0])?, canonicalize(&plain[1])?];
    let verified = labels.iter().zip(&plain).all(|(l, g)| l.verify(g));
    let isomorphic = labels[0].certificate == labels[1].certificate;
    let text = vec![
        format!(
            "{} vs {}: X_{{{m},{n}}} in dimension {}",
            spec.label(),
            second.label(),
            common.d
        ),
        format!("isospectral: {}", cmp.isospectral),
        format!(
            "isomorphic: {isomorphic} (fingerprints {:016x} {:016x})",
            labels[0].fingerprint, labels[1].fingerprint
        ),
    ];
    Ok(Outcome {
        verdict: pass_if(verified),
        result: json!({
            "rings": [spec.label(), second.label()],
            "m": m,
            "n": n,
            "isospectral": cmp.isospectral,
            "isomorphic": isomorphic,
            "fingerprints": [format!("{:016x}", labels[0].fingerprint), format!("{:016x}", labels[1].fingerprint)],
            "certificates_verified": verified,
            "comparison": cmp,
        }),
        text,
    })
}

fn reconstruct(
    common: &Common,
    spec: RingSpec,
    from: (u32, u32),
    input: Option<&std::path::Path>,
    seed: u64,
    emit: Option<&std::path::Path>,
) -> Result<Outcome, CliError> {
    let d = common.d;
    let cs = complex(spec, common)?;
    let g = match input {
        Some(path) => parse_edge_list(&std::fs::read_to_string(path)?)?.1,
        None => {
            check_colors(from.0, from.1, d)?;
            build_bipartite(&cs, from.0, from.1)?
                .into_graph()
                .uncolored()
                .shuffled(seed)
                .0
        }
    };
    let rec = reconstruct_full(&g, Params::new(d, spec.q() as u64, spec.r()))?;
    let got = canonicalize(&rec.graph)?;
    let truth = canonicalize(build_full_complex(&cs)?.graph())?;
    let ok = got.certificate == truth.certificate;
    if let Some(path) = emit {
        std::fs::write(path, write_edge_list(&rec.graph, d, &spec.label()))?;
    }
    let sizes: Vec<Value> = rec
        .graph
        .color_set()
        .iter()
        .map(|&c| json!({ "color": c, "count": rec.graph.vertices_of_color(c).len() }))
        .collect();
    let steps: Vec<String> = rec.steps.iter().map(|(s, c)| format!("{s:?}{c}")).collect();
    let text = vec![
        format!(
            "input colors inferred as ({}, {})",
            rec.colors_in.0, rec.colors_in.1
        ),
        format!("steps: {}", steps.join(" ")),
        format!(
            "fingerprint {:016x}, ground truth {:016x}: {}",
            got.fingerprint,
            truth.fingerprint,
            if ok { "match" } else { "MISMATCH" }
        ),
    ];
    Ok(Outcome {
        verdict: pass_if(ok),
        result: json!({
            "colors_in": [rec.colors_in.0, rec.colors_in.1],
            "steps": steps,
            "layers": sizes,
            "vertices": rec.graph.vertex_count(),
            "edges": rec.graph.edge_count(),
            "fingerprint": format!("{:016x}", got.fingerprint),
            "ground_truth": format!("{:016x}", truth.fingerprint),
            "match": ok,
        }),
        text,
    })
}

fn report(name: &str, ok: bool, witness: Value) -> CheckReport {
    CheckReport {
        check: name.into(),
        parameters: Value::Null,
        verdict: if ok {
            freeproj::groups::Verdict::Pass
        } else {
            freeproj::groups::Verdict::Fail
        },
        witness,
    }
}

fn groups(common: &Common, spec: RingSpec, check: GroupCheck) -> Result<Outcome, CliError> {
    let d = common.d;
    let want = |c: GroupCheck| check == c || check == GroupCheck::All;
    let mut reports: Vec<CheckReport> = vec![];
    let ring = freeproj::Ring::new(spec);
    if want(GroupCheck::Orders) {
        let orders = freeproj::groups::group_orders(spec, d);
        let gl = gl_order(d, spec.q() as u64, spec.r());
        let closure = (gl <= BigUint::from(DEFAULT_CLOSURE_CAP))
            .then(|| {
                bfs_closure(
                    &ring,
                    &standard_generators(&ring, d as usize),
                    DEFAULT_CLOSURE_CAP,
                )
            })
            .transpose()?
            .map(|g| g.order());
        let ok = closure.is_none_or(|c| BigUint::from(c) == gl);
        let mut r = report(
            "orders",
            ok,
            json!({ "orders": orders, "bfs_gl_order": closure }),
        );
        r.parameters = json!({ "ring": spec.label(), "d": d });
        reports.push(r);
    }
    if want(GroupCheck::Psi) {
        reports.push(verify_exceptional_psi());
    }
    if want(GroupCheck::PsiControl) {
        let bad = psi_report(&swapped_psi_pairs(), "psi_swapped_targets");
        reports.push(report(
            "psi_control",
            !bad.passed(),
            json!({ "expected_failure": bad }),
        ));
    }
    if want(GroupCheck::NotBn) {
        reports.push(verify_not_bn_pair(spec, 4096));
    }
    if want(GroupCheck::Cayley) {
        reports.push(cayley_check()?);
    }
    if want(GroupCheck::Kernel) {
        let cs = complex(spec, common)?;
        let gl = gl_order(d, spec.q() as u64, spec.r());
        let (matrices, exhaustive) = if gl <= BigUint::from(DEFAULT_CLOSURE_CAP) {
            (
                bfs_closure(
                    &ring,
                    &standard_generators(&ring, d as usize),
                    DEFAULT_CLOSURE_CAP,
                )?
                .elements,
                true,
            )
        } else {
            // random matrices are almost never scalar, so add the scalars explicitly
            let mut m = sample_invertible(&ring, d as usize, 500, 1);
            m.extend(
                ring.units()
                    .map(|u| Matrix::identity(&ring, d as usize).map(|x| ring.mul(x, u))),
            );
            (m, false)
        };
        let k = kernel_check(&cs, &matrices);
        let mut r = report(
            "kernel",
            k.mismatches == 0,
            json!({ "exhaustive": exhaustive, "counts": k }),
        );
        r.parameters = json!({ "ring": spec.label(), "d": d });
        reports.push(r);
    }
    if want(GroupCheck::Transfer) {
        if d < 3 {
            return Err(CliError::Config(
                "the automorphism transfer needs d >= 3".into(),
            ));
        }
        let rep = aut_transfer(&complex(spec, common)?, 1, d - 1, CanonOptions::default())?;
        let mut r = report(
            "transfer",
            rep.agrees(),
            serde_json::to_value(&rep).expect("serializable"),
        );
        r.parameters = json!({ "ring": spec.label(), "d": d, "m": 1, "n": d - 1 });
        reports.push(r);
    }
    let ok = reports
        .iter()
        .all(|r| r.verdict != freeproj::groups::Verdict::Fail);
    let text = reports
        .iter()
        .map(|r| format!("{}: {:?} {}", r.check, r.verdict, r.witness))
        .collect();
    Ok(Outcome {
        verdict: pass_if(ok),
        result: json!({ "checks": reports }),
        text,
    })
}

fn cayley_check() -> Result<CheckReport, CliError> {
    let mut graphs = vec![];
    let mut matches = vec![];
    for (f, s) in [
        (Flavor::IntegerMod, RingSpec::zmod(2, 2)),
        (Flavor::TruncatedPoly, RingSpec::tpoly(2, 2)),
    ] {
        let s = s.map_err(|e| CliError::Config(e.to_string()))?;
        let c = cayley_graph(&standard_connection_set(f))?;
        let x = build_bipartite(&ComplexSpec::new(s, 3)?, 1, 2)?
            .into_graph()
            .uncolored();
        matches.push(is_isomorphic(&c, &x)?.is_some());
        graphs.push(c);
    }
    let distinct = is_isomorphic(&graphs[0], &graphs[1])?.is_none();
    let ok = matches.iter().all(|&m| m) && distinct;
    Ok(report(
        "cayley",
        ok,
        json!({
            "vertices": graphs[0].vertex_count(),
            "degree": graphs[0].degree(0),
            "isomorphic_to_line_plane_graph": matches,
            "mutually_non_isomorphic": distinct,
            "edge_lists": graphs.iter().map(|g| write_edge_list(g, 3, "cayley")).collect::<Vec<_>>(),
        }),
    ))
}

fn conjecture(
    common: &Common,
    spec: RingSpec,
    m: u32,
    n: u32,
    primes: usize,
) -> Result<Outcome, CliError> {
    check_colors(m, n, common.d)?;
    let rings = [
        RingSpec::zmod(spec.p(), spec.r()),
        RingSpec::tpoly(spec.p(), spec.r()),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| CliError::Config(e.to_string()))?;
    let graphs = rings
        .iter()
        .map(|&s| build_bipartite(&complex(s, common)?, m, n).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let cmp = compare_spectra(
        &bipartite_gram(&graphs[0])?,
        &bipartite_gram(&graphs[1])?,
        primes.max(1),
    );
    let text = vec![
        format!(
            "X_{{{m},{n}}}, d = {}: {} vs {}",
            common.d,
            rings[0].label(),
            rings[1].label()
        ),
        format!(
            "float max deviation {:.1e} (tolerance {:.0e})",
            cmp.float_max_deviation, cmp.float_tolerance
        ),
        format!(
            "characteristic polynomials equal mod {:?}: {:?}",
            cmp.primes, cmp.charpoly_equal
        ),
        format!("isospectral: {}", cmp.isospectral),
    ];
    Ok(Outcome {
        verdict: Verdict::Report,
        result: json!({ "rings": rings.iter().map(|s| s.label()).collect::<Vec<_>>(), "m": m, "n": n, "comparison": cmp }),
        text,
    })
}
