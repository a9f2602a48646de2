//! End-to-end acceptance checks. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use freeproj::complex::{build_bipartite, build_full_complex, enumerate_spaces, ComplexSpec};
use freeproj::groups::{
    aut_transfer, cayley_graph, psi_report, standard_connection_set, swapped_psi_pairs,
    verify_exceptional_psi, verify_not_bn_pair,
};
use freeproj::linalg::{
    canonical_form, count_contained, count_containing, count_spaces, ModuleType,
};
use freeproj::rigidity::{canonicalize, is_isomorphic, reconstruct_full, CanonOptions, Params};
use freeproj::spectra::{
    bipartite_gram, closed_spectrum, compare_spectra, expansion, expansion_formula, expansion_of,
    float_deviation, gamma2_from_graph, gamma2_recursive, s_values, spectrum_from_gamma,
    ultrametric_violations, SpectrumTable, DEFAULT_GAMMA_CAP,
};
use freeproj::{Flavor, Ring, RingSpec};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn flavors(p: u32, r: u32) -> [RingSpec; 2] {
    [
        RingSpec::zmod(p, r).unwrap(),
        RingSpec::tpoly(p, r).unwrap(),
    ]
}

const VERTEX_CAP: u64 = 100_000;
const FLOAT_TOL: f64 = 1e-9;

fn counting() -> Outcome {
    let mut layers = 0;
    let mut skipped = vec![];
    for d in 2..=4u32 {
        for q in [2u32, 3] {
            for r in 1..=3u32 {
                for s in flavors(q, r) {
                    let Ok(spec) = ComplexSpec::with_cap(s, d, VERTEX_CAP) else {
                        skipped.push(format!("{s} d={d}"));
                        continue;
                    };
                    for n in 1..d {
                        let got = enumerate_spaces(&spec, n).map_err(|e| e.to_string())?.len();
                        let want = count_spaces(n, d, q as u64, r);
                        ensure(BigUint::from(got) == want, || {
                            format!("{s} d={d} n={n}: {got} vs {want}")
                        })?;
                        layers += 1;
                    }
                }
            }
        }
    }
    let mut types = 0;
    // d = 1 has no proper nonzero free submodules to count
    for d in 2..=3u32 {
        for q in [2u32, 3] {
            for r in 1..=2u32 {
                for s in flavors(q, r) {
                    let ring = Ring::new(s);
                    let spec = ComplexSpec::new(s, d).unwrap();
                    let spaces: Vec<Vec<_>> = (0..d)
                        .map(|n| {
                            if n == 0 {
                                vec![]
                            } else {
                                enumerate_spaces(&spec, n).unwrap()
                            }
                        })
                        .collect();
                    for ty in module_types(d, r) {
                        let v = representative(&ring, d, &ty);
                        ensure(v.module_type() == &ty, || {
                            format!("representative of {ty} has type {}", v.module_type())
                        })?;
                        for n in 1..d {
                            let inside = spaces[n as usize]
                                .iter()
                                .filter(|w| v.contains(&ring, w))
                                .count();
                            let around = spaces[n as usize]
                                .iter()
                                .filter(|w| w.contains(&ring, &v))
                                .count();
                            let (ci, ca) = (
                                count_contained(n, &ty, q as u64, r),
                                count_containing(n, &ty, d, q as u64, r),
                            );
                            ensure(BigUint::from(inside) == ci, || {
                                format!("{s} d={d} {ty} n={n}: inside {inside} vs {ci}")
                            })?;
                            ensure(BigUint::from(around) == ca, || {
                                format!("{s} d={d} {ty} n={n}: around {around} vs {ca}")
                            })?;
                        }
                        types += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{layers} layers, {types} module types; skipped above cap: {}",
        skipped.join(", ")
    ))
}

fn module_types(d: u32, r: u32) -> Vec<ModuleType> {
    let mut out = vec![];
    for m in 0..=d {
        for t in 0..=(d - m) {
            // nondecreasing k in 1..r
            let mut stack = vec![vec![]];
            while let Some(ks) = stack.pop() {
                if ks.len() == t as usize {
                    out.push(ModuleType { m, ks });
                    continue;
                }
                let lo = ks.last().copied().unwrap_or(1);
                for k in lo..r {
                    let mut next = ks.clone();
                    next.push(k);
                    stack.push(next);
                }
            }
        }
    }
    out
}

fn representative(ring: &Ring, d: u32, ty: &ModuleType) -> freeproj::Submodule {
    let d = d as usize;
    let mut rows = vec![];
    for i in 0..ty.m as usize {
        let mut e = vec![0; d];
        e[i] = 1;
        rows.push(e);
    }
    for (j, &k) in ty.ks.iter().enumerate() {
        let mut e = vec![0; d];
        e[ty.m as usize + j] = ring.pi_pow(k);
        rows.push(e);
    }
    canonical_form(ring, d, &rows)
}

fn graph_spectrum(s: RingSpec, d: u32, n: u32) -> Result<(SpectrumTable, f64), String> {
    let spec = ComplexSpec::new(s, d).unwrap();
    let g = build_bipartite(&spec, 1, n).unwrap();
    let gamma = gamma2_from_graph(&g).map_err(|e| e.to_string())?;
    let t = spectrum_from_gamma(&gamma, spec.layer_size(n)).map_err(|e| e.to_string())?;
    let dev = float_deviation(&gamma, &t);
    Ok((t, dev))
}

fn spectrum() -> Outcome {
    let cases = [
        (3, 2, 2, 1),
        (3, 2, 2, 2),
        (3, 2, 2, 3),
        (3, 2, 3, 2),
        (4, 2, 2, 2),
        (4, 3, 2, 2),
    ];
    let mut worst: f64 = 0.0;
    for (d, n, q, r) in cases {
        let closed = closed_spectrum(d, n, q as u64, r).map_err(|e| e.to_string())?;
        let gamma =
            gamma2_recursive(d, n, q as u64, r, DEFAULT_GAMMA_CAP).map_err(|e| e.to_string())?;
        let spec = ComplexSpec::new(RingSpec::zmod(q, r).unwrap(), d).unwrap();
        let rec = spectrum_from_gamma(&gamma, spec.layer_size(n)).map_err(|e| e.to_string())?;
        worst = worst.max(float_deviation(&gamma, &rec));
        ensure(rec == closed, || {
            format!("d={d} n={n} q={q} r={r}: recursive {rec:?} vs closed {closed:?}")
        })?;
        for s in flavors(q, r) {
            let (t, dev) = graph_spectrum(s, d, n)?;
            worst = worst.max(dev);
            ensure(t == closed, || {
                format!("{s} d={d} n={n}: graph {t:?} vs closed {closed:?}")
            })?;
        }
    }
    let t = closed_spectrum(3, 2, 2, 2).unwrap();
    ensure(t.lambda_squared == vec![(36, 1), (8, 6), (4, 21)], || {
        format!("{:?}", t.lambda_squared)
    })?;
    ensure(t.zeros == 0 && t.eigenvalue_count() == 56, || {
        format!("zeros {} total {}", t.zeros, t.eigenvalue_count())
    })?;
    ensure(s_values(3, 2, 2, 2).unwrap() == vec![6, 2, 1], || {
        "s-values".into()
    })?;
    ensure(worst <= FLOAT_TOL, || format!("float deviation {worst:e}"))?;
    Ok(format!(
        "{} parameter sets, max float deviation {worst:.1e}",
        cases.len()
    ))
}

fn expansion_check() -> Outcome {
    let mut checked = 0;
    for d in 3..=6u32 {
        for n in 2..d {
            for q in [2u64, 3, 4, 5] {
                let formula = expansion_formula(d, n, q);
                let per_r: Vec<_> = (1..=3)
                    .map(|r| expansion(d, n, q, r).map(|e| e.ratio()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                ensure(per_r.iter().all(|x| *x == formula), || {
                    format!("d={d} n={n} q={q}: {per_r:?} vs {formula}")
                })?;
                checked += 1;
            }
        }
    }
    // and from certified graph spectra
    for r in 1..=3 {
        for s in flavors(2, r) {
            let (t, _) = graph_spectrum(s, 3, 2)?;
            let e = expansion_of(&t).ok_or("no second eigenvalue")?;
            ensure(e.ratio() == expansion_formula(3, 2, 2), || {
                format!("{s}: {}/{}", e.numerator, e.denominator)
            })?;
        }
    }
    Ok(format!(
        "{checked} (d,n,q) triples identical over r=1..3; graph route agrees at d=3"
    ))
}

fn ultrametric() -> Outcome {
    let mut out = vec![];
    for s in flavors(2, 2) {
        let g = build_bipartite(&ComplexSpec::new(s, 3).unwrap(), 1, 2).unwrap();
        let gamma = gamma2_from_graph(&g).map_err(|e| e.to_string())?;
        ensure(gamma.size() == 28, || format!("{} lines", gamma.size()))?;
        let v = ultrametric_violations(&gamma);
        ensure(v == 0, || format!("{s}: {v} violations"))?;
        out.push(format!("{s}: 0/{}", 28u64.pow(3)));
    }
    Ok(out.join(", "))
}

fn isospectral_non_isomorphic() -> Outcome {
    let mut out = vec![];
    for (p, d) in [(2u32, 3u32), (2, 4), (3, 3)] {
        let graphs: Vec<_> = flavors(p, 2)
            .iter()
            .map(|&s| build_bipartite(&ComplexSpec::new(s, d).unwrap(), 1, 2).unwrap())
            .collect();
        let cmp = compare_spectra(
            &bipartite_gram(&graphs[0]).unwrap(),
            &bipartite_gram(&graphs[1]).unwrap(),
            3,
        );
        ensure(cmp.isospectral && cmp.exact.is_some(), || {
            format!("p={p} d={d}: spectra differ {cmp:?}")
        })?;
        let plain: Vec<_> = graphs.iter().map(|g| g.graph().uncolored()).collect();
        let labels: Vec<_> = plain
            .iter()
            .map(canonicalize)
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (l, g) in labels.iter().zip(&plain) {
            ensure(l.verify(g), || {
                format!("p={p} d={d}: certificate does not verify")
            })?;
        }
        ensure(labels[0].certificate != labels[1].certificate, || {
            format!("p={p} d={d}: certificates coincide")
        })?;
        out.push(format!(
            "p={p} d={d} ({} vertices)",
            plain[0].vertex_count()
        ));
    }
    Ok(out.join(", "))
}

fn cayley() -> Outcome {
    let mut graphs = vec![];
    for (f, s) in [
        (Flavor::IntegerMod, RingSpec::zmod(2, 2).unwrap()),
        (Flavor::TruncatedPoly, RingSpec::tpoly(2, 2).unwrap()),
    ] {
        let c = cayley_graph(&standard_connection_set(f)).map_err(|e| e.to_string())?;
        ensure(
            c.vertex_count() == 56 && (0..56).all(|v| c.degree(v) == 6),
            || format!("{s}: wrong size or degree"),
        )?;
        let sides = (0..56u32).filter(|&v| (v / 4) % 2 == 0).count();
        ensure(
            sides == 28 && c.edges().iter().all(|&(u, v)| (u / 4) % 2 != (v / 4) % 2),
            || "not bipartite".into(),
        )?;
        let x = build_bipartite(&ComplexSpec::new(s, 3).unwrap(), 1, 2)
            .unwrap()
            .into_graph()
            .uncolored();
        let map = is_isomorphic(&c, &x)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{s}: not isomorphic"))?;
        ensure(c.is_isomorphism_to(&x, &map), || "bad isomorphism".into())?;
        graphs.push(c);
    }
    ensure(
        is_isomorphic(&graphs[0], &graphs[1])
            .map_err(|e| e.to_string())?
            .is_none(),
        || "Cayley graphs are isomorphic".into(),
    )?;
    Ok("both realize their line-plane graph, mutually non-isomorphic".into())
}

fn psi() -> Outcome {
    let rep = verify_exceptional_psi();
    ensure(rep.passed(), || rep.witness.to_string())?;
    ensure(rep.witness["bijection_size"] == 86016, || {
        rep.witness.to_string()
    })?;
    let bad = psi_report(&swapped_psi_pairs(), "swapped");
    ensure(!bad.passed(), || "swapped targets were accepted".into())?;
    Ok(format!(
        "bijection of size 86016; swapped targets rejected ({})",
        bad.witness["error"].as_str().unwrap_or("")
    ))
}

fn reconstruction() -> Outcome {
    let mut out = vec![];
    for (d, pairs) in [
        (3u32, vec![(1u32, 2u32)]),
        (4, vec![(1, 2), (1, 3), (2, 3)]),
    ] {
        let spec = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), d).unwrap();
        let truth =
            canonicalize(build_full_complex(&spec).unwrap().graph()).map_err(|e| e.to_string())?;
        for (m, n) in pairs {
            let g = build_bipartite(&spec, m, n)
                .unwrap()
                .into_graph()
                .uncolored();
            let mut perm: Vec<u32> = (0..g.vertex_count() as u32).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64((d * 10 + m * 3 + n) as u64));
            let h = g.relabel(&perm);
            let rec = reconstruct_full(&h, Params::new(d, 2, 2))
                .map_err(|e| format!("d={d} ({m},{n}): {e}"))?;
            let got = canonicalize(&rec.graph).map_err(|e| e.to_string())?;
            ensure(got.certificate == truth.certificate, || {
                format!("d={d} ({m},{n}): fingerprint differs")
            })?;
            out.push(format!("d={d} ({m},{n})"));
        }
    }
    Ok(format!("fingerprints match for {}", out.join(", ")))
}

fn transfer() -> Outcome {
    let mut out = vec![];
    for s in flavors(2, 2) {
        let rep = aut_transfer(
            &ComplexSpec::new(s, 3).unwrap(),
            1,
            2,
            CanonOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        ensure(rep.agrees(), || {
            format!(
                "{s}: generated {} vs brute force {}",
                rep.generated_order, rep.brute_force_order
            )
        })?;
        out.push(format!(
            "{s}: {} (|PGL| center quotient {}, display {}; matching: {})",
            rep.generated_order,
            rep.orders.pgl,
            rep.orders.pgl_display,
            rep.pgl_formula_matching.join("+")
        ));
    }
    Ok(out.join("; "))
}

fn not_building() -> Outcome {
    let mut out = vec![];
    for s in flavors(2, 2) {
        let rep = verify_not_bn_pair(s, 512);
        ensure(rep.passed(), || rep.witness.to_string())?;
        out.push(format!(
            "{s}: entry {} , |BwB| = {}",
            rep.witness["entry_2_1"], rep.witness["double_coset_size"]
        ));
    }
    Ok(out.join("; "))
}

fn conjecture() -> Outcome {
    let graphs: Vec<_> = flavors(2, 2)
        .iter()
        .map(|&s| build_bipartite(&ComplexSpec::new(s, 4).unwrap(), 2, 3).unwrap())
        .collect();
    let cmp = compare_spectra(
        &bipartite_gram(&graphs[0]).unwrap(),
        &bipartite_gram(&graphs[1]).unwrap(),
        4,
    );
    Ok(format!(
        "report only: isospectral = {} (float deviation {:.1e}, char poly equal mod {} primes: {})",
        cmp.isospectral,
        cmp.float_max_deviation,
        cmp.primes.len(),
        cmp.charpoly_equal.iter().all(|&e| e)
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("counting", counting),
        ("spectrum", spectrum),
        ("expansion", expansion_check),
        ("ultrametric", ultrametric),
        ("isospectral, non-isomorphic", isospectral_non_isomorphic),
        ("Cayley realization", cayley),
        ("exceptional isomorphism", psi),
        ("reconstruction", reconstruction),
        ("automorphism transfer", transfer),
        ("not a building", not_building),
        ("conjecture scan", conjecture),
    ];
    std::panic::set_hook(Box::new(|info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| info.payload().downcast_ref::<&str>().map(|s| s.to_string()));
        eprintln!("panic: {}", msg.unwrap_or_default());
    }));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({secs:.1}s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({secs:.1}s) {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
