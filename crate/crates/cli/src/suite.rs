//! The full verification battery: every claim the workbench certifies, run
//! concurrently (capped by PSEUDOTURAN_THREADS) with reports buffered and
//! emitted in canonical order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use anyhow::Result;
use num_rational::Ratio;
use serde_json::json;

use pseudoturan_core::construct::{
    ak_graph, cubic_cayley, cubic_cayley_spec, distance_graph, even_t_construction, kopparty,
    nonsquare_subgraph,
};
use pseudoturan_core::embed::{embed_general, embed_petersen, EmbedParams};
use pseudoturan_core::field::FieldSpec;
use pseudoturan_core::forbid::{
    clique_number, contains_pattern, is_k23_free, is_triangle_free, CliqueNumber, PatternSearch,
};
use pseudoturan_core::graph::{sample_discrepancy, EmbedMode, Graph};
use pseudoturan_core::order::{d2, dhat2, eval_d2, eval_dhat2, exp_upper, OrderingCertificate};
use pseudoturan_core::spectral::{
    cayley_spectrum, jumbled_cert, lambda_nontrivial, spectrum_dense, weil_audit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{FieldDesc, JumbledOut, Report, SpectrumOut};

const CUBIC_PRIMES: [u64; 9] = [5, 7, 11, 13, 17, 19, 23, 29, 31];

struct CriterionResult {
    name: &'static str,
    pass: bool,
    reports: Vec<Report>,
    millis: u128,
}

fn field(q: u64) -> FieldSpec {
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut h = 0;
    let mut rest = q;
    while rest > 1 {
        rest /= p;
        h += 1;
    }
    FieldSpec::new(p, h).unwrap()
}

fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn set_result(rep: &mut Report, ok: bool) {
    rep.result = if ok { "pass" } else { "fail" }.into();
}

fn cubic_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut pass = true;
    for p in CUBIC_PRIMES {
        let g = cubic_cayley(p).unwrap();
        let tri = is_triangle_free(&g);
        let k23 = is_k23_free(&g);
        let lam = lambda_nontrivial(&g).unwrap();
        let bound_ok = lam <= 2.0 * (p as f64).sqrt() + 1.0 + 1e-6;
        let cs = cayley_spectrum(&cubic_cayley_spec(p).unwrap());
        let dn = spectrum_dense(&g).unwrap();
        let spectra_ok = multiset_close(&cs.eigenvalues, &dn.eigenvalues, 1e-8);
        let shape_ok = g.n() as u64 == p * p && g.regular_degree() == Some((p - 1) as usize);
        let ok = tri && k23 && bound_ok && spectra_ok && shape_ok;
        pass &= ok;
        let mut rep = Report::new("cubic-cayley-battery", "cubic-cayley", json!({ "p": p }), &g);
        rep.field = Some(FieldDesc::from(&FieldSpec::new(p, 1).unwrap()));
        rep.checks.triangle_free = Some(tri);
        rep.checks.k23_free = Some(k23);
        rep.spectrum = Some(SpectrumOut::from(&cs));
        rep.jumbled = Some(JumbledOut::from(&jumbled_cert(&g).unwrap()));
        set_result(&mut rep, ok);
        reports.push(rep);
    }
    CriterionResult { name: "cubic-cayley-battery", pass, reports, millis: t.elapsed().as_millis() }
}

fn weil_battery() -> CriterionResult {
    let t = Instant::now();
    let empty = Graph::from_edges(0, &[]).unwrap();
    let mut reports = Vec::new();
    let mut pass = true;
    for p in (5..=199).filter(|&p: &u64| (2..p).all(|d| p % d != 0)) {
        let worst = weil_audit(p).unwrap();
        let bound = 2.0 * (p as f64).sqrt();
        let ok = worst <= bound;
        pass &= ok;
        let mut rep = Report::new(
            "character-sum-bound",
            "exponential-sum",
            json!({ "p": p, "max_modulus": worst, "bound": bound }),
            &empty,
        );
        set_result(&mut rep, ok);
        reports.push(rep);
    }
    CriterionResult { name: "character-sum-bound", pass, reports, millis: t.elapsed().as_millis() }
}

fn kopparty_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut pass = true;

    let g = kopparty(2, 3).unwrap();
    let tri = is_triangle_free(&g);
    let pet = Graph::petersen();
    let found = match contains_pattern(&g, &pet, EmbedMode::Induced, 100_000_000) {
        PatternSearch::Found(e) => e.validate(&pet, &g, EmbedMode::Induced).is_ok(),
        _ => false,
    };
    let ok = g.n() == 512 && tri && found;
    pass &= ok;
    let mut rep = Report::new(
        "kopparty-petersen-induced",
        "kopparty",
        json!({ "p": 2, "h": 3, "induced_petersen": found }),
        &g,
    );
    rep.checks.triangle_free = Some(tri);
    set_result(&mut rep, ok);
    reports.push(rep);

    for (p, h) in [(5u64, 1usize), (7, 1)] {
        let g = kopparty(p, h).unwrap();
        let tri = is_triangle_free(&g);
        pass &= tri;
        let mut rep =
            Report::new("kopparty-triangle-free", "kopparty", json!({ "p": p, "h": h }), &g);
        rep.checks.triangle_free = Some(tri);
        set_result(&mut rep, tri);
        reports.push(rep);
    }
    CriterionResult { name: "kopparty-battery", pass, reports, millis: t.elapsed().as_millis() }
}

fn projective_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut pass = true;
    for q in [5u64, 7, 9, 11, 13, 25] {
        let fs = field(q);
        let sub = nonsquare_subgraph(&ak_graph(2, &fs).unwrap()).unwrap();
        let tri = is_triangle_free(&sub);
        pass &= tri;
        let mut rep =
            Report::new("nonsquare-triangle-free", "nonsquare-ak", json!({ "r": 2, "q": q }), &sub);
        rep.field = Some(FieldDesc::from(&fs));
        rep.checks.triangle_free = Some(tri);
        set_result(&mut rep, tri);
        reports.push(rep);
    }
    for q in [3u64, 5, 7] {
        let fs = field(q);
        let sub = nonsquare_subgraph(&ak_graph(4, &fs).unwrap()).unwrap();
        let cn = clique_number(&sub, 5);
        let ok = cn.at_most(4);
        pass &= ok;
        let mut rep =
            Report::new("nonsquare-clique-free", "nonsquare-ak", json!({ "r": 4, "q": q }), &sub);
        rep.field = Some(FieldDesc::from(&fs));
        rep.checks.clique_cap = Some(match cn {
            CliqueNumber::Exact(k) => k.to_string(),
            CliqueNumber::ExceedsCap(c) => format!(">{c}"),
        });
        set_result(&mut rep, ok);
        reports.push(rep);
    }
    for q in [5u64, 7, 9] {
        let fs = field(q);
        let g = even_t_construction(4, &fs).unwrap();
        let cn = clique_number(&g, 4);
        let ok = cn.at_most(3);
        pass &= ok;
        let mut rep =
            Report::new("even-t-clique-free", "even-t", json!({ "t": 4, "q": q }), &g);
        rep.field = Some(FieldDesc::from(&fs));
        rep.checks.clique_cap = Some(match cn {
            CliqueNumber::Exact(k) => k.to_string(),
            CliqueNumber::ExceedsCap(c) => format!(">{c}"),
        });
        set_result(&mut rep, ok);
        reports.push(rep);
    }
    CriterionResult { name: "projective-battery", pass, reports, millis: t.elapsed().as_millis() }
}

fn fingerprint_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut pass = true;
    for q in [3u64, 5] {
        let fs = field(q);
        let big = ak_graph(3, &fs).unwrap();
        let reference = ak_graph(2, &fs).unwrap();
        let ref_spec = spectrum_dense(&reference).unwrap();
        let mut ref_degs = reference.degrees();
        ref_degs.sort_unstable();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let v = rng.random_range(0..big.n());
            let nb: Vec<usize> = big.neighbors(v).collect();
            let sub = big.induced(&nb).unwrap();
            let mut degs = sub.degrees();
            degs.sort_unstable();
            let spec = spectrum_dense(&sub).unwrap();
            let ok = sub.n() == reference.n()
                && sub.edge_count() == reference.edge_count()
                && degs == ref_degs
                && multiset_close(&spec.eigenvalues, &ref_spec.eigenvalues, 1e-6);
            pass &= ok;
            let mut rep = Report::new(
                "neighborhood-fingerprint",
                "ak",
                json!({ "r": 3, "q": q, "vertex": v }),
                &sub,
            );
            rep.field = Some(FieldDesc::from(&fs));
            rep.spectrum = Some(SpectrumOut::from(&spec));
            set_result(&mut rep, ok);
            reports.push(rep);
        }
    }
    CriterionResult { name: "neighborhood-fingerprint", pass, reports, millis: t.elapsed().as_millis() }
}

fn ordering_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let pet = Graph::petersen();

    let d2_ok = d2(&pet).map(|(d, _)| d == Ratio::new(3, 2)).unwrap_or(false);
    let ref_ok = matches!(eval_dhat2(&pet, &OrderingCertificate::petersen_reference()), Ok(2));
    let dhat_ok = dhat2(&pet).map(|(d, _)| d == Ratio::new(1, 1)).unwrap_or(false);
    let exp_ok = exp_upper(&pet).map(|e| e == Ratio::new(2, 3)).unwrap_or(false);
    let kt_ok = [3usize, 4, 5].iter().all(|&tt| {
        d2(&Graph::complete(tt)).map(|(d, _)| d == Ratio::new(tt as i64 - 2, 1)).unwrap_or(false)
    });

    fn brute_force(f: &Graph) -> u32 {
        fn go(f: &Graph, items: &mut Vec<usize>, k: usize, best: &mut u32) {
            if k == items.len() {
                *best = (*best).min(eval_d2(f, items).unwrap());
                return;
            }
            for i in k..items.len() {
                items.swap(k, i);
                go(f, items, k + 1, best);
                items.swap(k, i);
            }
        }
        let mut best = u32::MAX;
        go(f, &mut (0..f.n()).collect(), 0, &mut best);
        best
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut dp_ok = true;
    for case in 0..100 {
        let m = rng.random_range(3..=7);
        let p = rng.random_range(0.2..0.9);
        let g = Graph::random_gnp(m, p, 6000 + case);
        dp_ok &= d2(&g).map(|(_, c)| c.two_d == brute_force(&g)).unwrap_or(false);
    }
    let pass = d2_ok && ref_ok && dhat_ok && exp_ok && kt_ok && dp_ok;
    let mut rep = Report::new(
        "ordering-parameters",
        "named:petersen",
        json!({
            "d2": "3/2", "d2_ok": d2_ok,
            "reference_certificate_two_d": 2, "reference_ok": ref_ok,
            "refined_minimum": 1, "refined_ok": dhat_ok,
            "exp_upper": "2/3", "exp_ok": exp_ok,
            "complete_graphs_ok": kt_ok,
            "dp_vs_brute_force_cases": 100, "dp_ok": dp_ok,
        }),
        &pet,
    );
    set_result(&mut rep, pass);
    reports.push(rep);
    CriterionResult { name: "ordering-parameters", pass, reports, millis: t.elapsed().as_millis() }
}

fn embedding_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let pet = Graph::petersen();
    let reference = OrderingCertificate::petersen_reference();
    let params = EmbedParams::paper(0.5);
    let mut pipeline_ok = 0;
    let mut general_ok = 0;
    for seed in 1..=10u64 {
        let host = Graph::random_gnp(8000, 0.5, seed);
        if embed_petersen(&host, &params)
            .map(|o| o.embedding.validate(&pet, &host, EmbedMode::Subgraph).is_ok())
            .unwrap_or(false)
        {
            pipeline_ok += 1;
        }
        if embed_general(&host, &pet, &reference, &params)
            .map(|o| o.embedding.validate(&pet, &host, EmbedMode::Subgraph).is_ok())
            .unwrap_or(false)
        {
            general_ok += 1;
        }
    }
    let host = cubic_cayley(13).unwrap();
    let k3 = Graph::complete(3);
    let k3cert = d2(&k3).unwrap().1;
    let impossible_ok =
        embed_general(&host, &k3, &k3cert, &EmbedParams::paper(12.0 / 169.0)).is_err();
    let pass = pipeline_ok >= 9 && general_ok >= 9 && impossible_ok;
    let mut rep = Report::new(
        "embedding-engine",
        "gnp",
        json!({
            "n": 8000, "density": 0.5, "seeds": 10,
            "pipeline_successes": pipeline_ok,
            "general_successes": general_ok,
            "triangle_free_host_rejects_triangle": impossible_ok,
        }),
        &pet,
    );
    set_result(&mut rep, pass);
    reports.push(rep);
    CriterionResult { name: "embedding-engine", pass, reports, millis: t.elapsed().as_millis() }
}

fn mixing_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut pass = true;
    let mut graphs: Vec<(String, serde_json::Value, Graph)> = Vec::new();
    for p in CUBIC_PRIMES {
        graphs.push(("cubic-cayley".into(), json!({ "p": p }), cubic_cayley(p).unwrap()));
    }
    for (p, h) in [(2u64, 3usize), (5, 1), (7, 1)] {
        graphs.push(("kopparty".into(), json!({ "p": p, "h": h }), kopparty(p, h).unwrap()));
    }
    for q in CUBIC_PRIMES {
        graphs.push(("distance".into(), json!({ "q": q }), distance_graph(&field(q)).unwrap()));
    }
    for (name, params, g) in &graphs {
        let d = g.regular_degree().unwrap();
        let lambda = lambda_nontrivial(g).unwrap();
        let disc = sample_discrepancy(g, d as f64 / g.n() as f64, 10_000, 8);
        let ok = disc <= lambda + 1e-6;
        pass &= ok;
        let mut rep = Report::new(
            "mixing-consistency",
            name,
            json!({ "params": params, "sampled_discrepancy": disc, "lambda": lambda }),
            g,
        );
        rep.jumbled = Some(JumbledOut::from(&jumbled_cert(g).unwrap()));
        set_result(&mut rep, ok);
        reports.push(rep);
    }
    CriterionResult { name: "mixing-consistency", pass, reports, millis: t.elapsed().as_millis() }
}

fn distance_battery() -> CriterionResult {
    let t = Instant::now();
    let mut reports = Vec::new();
    let mut pass = true;
    for q in CUBIC_PRIMES {
        let fs = field(q);
        let g = distance_graph(&fs).unwrap();
        let k23 = is_k23_free(&g);
        let tri = is_triangle_free(&g); // recorded, never asserted
        pass &= k23;
        let mut rep = Report::new(
            "distance-graph",
            "distance",
            json!({ "q": q, "triangle_free_observed": tri }),
            &g,
        );
        rep.field = Some(FieldDesc::from(&fs));
        rep.checks.k23_free = Some(k23);
        rep.checks.triangle_free = Some(tri);
        rep.jumbled = Some(JumbledOut::from(&jumbled_cert(&g).unwrap()));
        set_result(&mut rep, k23);
        reports.push(rep);
    }
    CriterionResult { name: "distance-graph", pass, reports, millis: t.elapsed().as_millis() }
}

pub fn run(timings: bool) -> Result<bool> {
    let criteria: Vec<fn() -> CriterionResult> = vec![
        cubic_battery,
        weil_battery,
        kopparty_battery,
        projective_battery,
        fingerprint_battery,
        ordering_battery,
        embedding_battery,
        mixing_battery,
        distance_battery,
    ];
    let workers: usize = std::env::var("PSEUDOTURAN_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .clamp(1, criteria.len());

    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<CriterionResult>> = Vec::new();
    slots.resize_with(criteria.len(), || None);
    let slots = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= criteria.len() {
                    break;
                }
                let result = criteria[i]();
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });

    let mut all_pass = true;
    let results = slots.into_inner().unwrap();
    for result in results.iter_mut() {
        let mut result = result.take().expect("every criterion ran");
        all_pass &= result.pass;
        for rep in result.reports.iter_mut() {
            if timings {
                rep.runtime_ms = Some(result.millis);
            }
            rep.emit();
        }
        eprintln!(
            "criterion {}: {}{}",
            result.name,
            if result.pass { "pass" } else { "FAIL" },
            if timings { format!(" ({} ms)", result.millis) } else { String::new() }
        );
    }
    eprintln!("suite: {}", if all_pass { "all criteria passed" } else { "FAILURES present" });
    Ok(all_pass)
}
