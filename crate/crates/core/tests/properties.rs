//! Cross-module invariants and property tests.

use proptest::prelude::*;
use pseudoturan_core::construct::{ak_graph, cubic_cayley, kopparty, kopparty_spec};
use pseudoturan_core::embed::{embed_petersen, EmbedParams};
use pseudoturan_core::field::FieldSpec;
use pseudoturan_core::forbid::{clique_number, contains_pattern, CliqueNumber, PatternSearch};
use pseudoturan_core::graph::{read_edge_list, write_edge_list, EmbedMode, Graph};
use pseudoturan_core::order::{
    d2, dhat2, eval_d2, eval_dhat2, exp_upper, OrderingCertificate,
};
use pseudoturan_core::spectral::{cayley_spectrum, spectrum_dense};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The 10-vertex pattern is the disjointness graph on 2-subsets of a 5-set:
/// an induced self-size embedding into that oracle construction is an
/// isomorphism.
#[test]
fn petersen_is_the_two_subset_disjointness_graph() {
    let pairs: Vec<(usize, usize)> = (0..5)
        .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
        .collect();
    assert_eq!(pairs.len(), 10);
    let mut edges = Vec::new();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate().skip(i + 1) {
            if a != c && a != d && b != c && b != d {
                edges.push((i, j));
            }
        }
    }
    let kneser = Graph::from_edges(10, &edges).unwrap();
    assert_eq!(kneser.edge_count(), 15);
    let pet = Graph::petersen();
    match contains_pattern(&kneser, &pet, EmbedMode::Induced, 1 << 24) {
        PatternSearch::Found(e) => e.validate(&pet, &kneser, EmbedMode::Induced).unwrap(),
        other => panic!("patterns not isomorphic: {other:?}"),
    }
}

/// Clique number never grows when passing to an induced subgraph: 50 seeded
/// subsets per construction.
#[test]
fn clique_number_monotone_under_induced_subgraphs() {
    let f5 = FieldSpec::new(5, 1).unwrap();
    let hosts = [cubic_cayley(7).unwrap(), ak_graph(2, &f5).unwrap(), kopparty(5, 1).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for host in &hosts {
        let base = match clique_number(host, 8) {
            CliqueNumber::Exact(k) => k,
            CliqueNumber::ExceedsCap(_) => panic!("unexpectedly dense host"),
        };
        for _ in 0..50 {
            let size = rng.random_range(1..=host.n());
            let mut verts: Vec<usize> = (0..host.n()).collect();
            verts.shuffle(&mut rng);
            verts.truncate(size);
            let sub = host.induced(&verts).unwrap();
            match clique_number(&sub, 8) {
                CliqueNumber::Exact(k) => assert!(k <= base),
                CliqueNumber::ExceedsCap(_) => panic!("subgraph denser than host"),
            }
        }
    }
}

/// A pipeline success implies the generic pattern search also succeeds.
#[test]
fn pipeline_success_implies_search_success() {
    let pet = Graph::petersen();
    for seed in [3u64, 4, 5] {
        let host = Graph::random_gnp(900, 0.5, seed);
        let out = embed_petersen(&host, &EmbedParams::paper(0.5)).unwrap();
        out.embedding.validate(&pet, &host, EmbedMode::Subgraph).unwrap();
        assert!(matches!(
            contains_pattern(&host, &pet, EmbedMode::Subgraph, 1 << 30),
            PatternSearch::Found(_)
        ));
    }
}

/// Character-sum and dense spectra agree on a non-prime-field Cayley example.
#[test]
fn kopparty_spectrum_agrees_with_dense() {
    let g = kopparty(2, 2).unwrap();
    let cs = cayley_spectrum(&kopparty_spec(2, 2).unwrap());
    let dn = spectrum_dense(&g).unwrap();
    for (a, b) in cs.eigenvalues.iter().zip(&dn.eigenvalues) {
        assert!((a - b).abs() < 1e-8);
    }
}

/// Dual-route identity: each nontrivial eigenvalue of the cubic Cayley graph
/// is a full exponential sum minus the x=0 term, so the maximum of
/// |lambda + 1| over the nontrivial spectrum equals the audit maximum.
#[test]
fn cubic_spectrum_matches_exponential_sums() {
    use pseudoturan_core::construct::cubic_cayley_spec;
    use pseudoturan_core::spectral::weil_audit;
    for p in [5u64, 13, 31] {
        let s = cayley_spectrum(&cubic_cayley_spec(p).unwrap());
        let shifted_max = s
            .eigenvalues
            .iter()
            .filter(|&&ev| (ev - (p - 1) as f64).abs() > 1e-9)
            .fold(0.0f64, |acc, &ev| acc.max((ev + 1.0).abs()));
        let audit = weil_audit(p).unwrap();
        assert!(
            (shifted_max - audit).abs() < 1e-9,
            "p={p}: spectrum route {shifted_max} vs sum route {audit}"
        );
    }
}

/// The plane-order identity: the r=2 orthogonality graph has exactly q^2
/// vertices (q^2+q+1 points minus the q+1 on the conic).
#[test]
fn ak2_vertex_counts() {
    for q in [3u64, 5, 7, 9] {
        let fs = field_for(q);
        let g = ak_graph(2, &fs).unwrap();
        assert_eq!(g.n() as u64, q * q, "q={q}");
    }
}

fn field_for(q: u64) -> FieldSpec {
    let mut p = 2;
    while q % p != 0 {
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

/// Same agreement for the plane distance graph presented over Z_q^2.
#[test]
fn distance_spectrum_agrees_with_dense() {
    let fs = FieldSpec::new(7, 1).unwrap();
    let g = pseudoturan_core::construct::distance_graph(&fs).unwrap();
    let cs = cayley_spectrum(&pseudoturan_core::construct::distance_graph_spec(&fs).unwrap());
    let dn = spectrum_dense(&g).unwrap();
    for (a, b) in cs.eigenvalues.iter().zip(&dn.eigenvalues) {
        assert!((a - b).abs() < 1e-8);
    }
}

/// Deleting an edge never increases the interval-refined optimum (every
/// charge is a neighbor count), checked exactly on seeded small graphs.
#[test]
fn refined_bound_monotone_under_edge_deletion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..8u64 {
        let m = rng.random_range(5..=7);
        let g = Graph::random_gnp(m, 0.6, 1300 + case);
        let (_, cert) = dhat2(&g).unwrap();
        let base_exp = exp_upper(&g).unwrap();
        for (a, b) in g.edges() {
            let edges: Vec<(usize, usize)> =
                g.edges().into_iter().filter(|&e| e != (a, b)).collect();
            let smaller = Graph::from_edges(m, &edges).unwrap();
            let (_, cert2) = dhat2(&smaller).unwrap();
            assert!(cert2.two_d <= cert.two_d, "case {case} edge ({a},{b})");
            assert!(exp_upper(&smaller).unwrap() <= base_exp);
        }
    }
}

fn arbitrary_graph() -> impl Strategy<Value = Graph> {
    (2usize..24, any::<u64>(), 0.0f64..1.0).prop_map(|(n, seed, p)| Graph::random_gnp(n, p, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Edge-list persistence round-trips adjacency exactly.
    #[test]
    fn edge_list_round_trip(g in arbitrary_graph()) {
        let dir = std::env::temp_dir();
        let path = dir.join(format!("pseudoturan_prop_{}_{}.el", std::process::id(), g.n()));
        write_edge_list(&g, &path).unwrap();
        let back = read_edge_list(&path).unwrap();
        std::fs::remove_file(&path).ok();
        prop_assert_eq!(back, g);
    }

    /// All-singleton interval certificates evaluate exactly like the plain
    /// back-degree bound, on arbitrary graphs and orderings.
    #[test]
    fn singleton_intervals_match_plain_evaluation(
        g in arbitrary_graph(),
        seed in any::<u64>(),
    ) {
        let mut ordering: Vec<usize> = (0..g.n()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ordering.shuffle(&mut rng);
        let two_d = eval_d2(&g, &ordering).unwrap();
        let cert = OrderingCertificate::singleton(ordering, two_d);
        prop_assert_eq!(eval_dhat2(&g, &cert).unwrap(), two_d);
    }

    /// The interval refinement never exceeds the plain optimum.
    #[test]
    fn refined_at_most_plain(n in 3usize..8, seed in any::<u64>(), p in 0.2f64..0.9) {
        let g = Graph::random_gnp(n, p, seed);
        let (dd, _) = d2(&g).unwrap();
        let (dh, cert) = dhat2(&g).unwrap();
        prop_assert!(dh <= dd);
        prop_assert_eq!(eval_dhat2(&g, &cert).unwrap(), cert.two_d);
    }

    /// Constructions and random graphs keep the adjacency invariants.
    #[test]
    fn adjacency_invariants(g in arbitrary_graph()) {
        for u in 0..g.n() {
            prop_assert!(!g.has_edge(u, u));
            for v in 0..g.n() {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
    }
}
