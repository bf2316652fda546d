mod common;

use common::{brute_force_max_modularity, graph_fixtures, random_corpus, record, reference_modularity, rng};
use ethnoname::collab::{
    build_graph, cluster_stats, collab_matrix, detect_communities, entropy, largest_component, louvain, modularity,
    period_evolution, purity, CommunityOptions, Period, StrengthMode, WeightedGraph,
};
use ethnoname::corpus::AuthorLabels;
use ethnoname::names::normalize;
use ethnoname::EthnicityLabel;
use proptest::prelude::*;
use rand::Rng;

fn labels_for(pool: usize, seed: u64) -> AuthorLabels {
    let mut r = rng(seed);
    (0..pool)
        .map(|i| normalize(&format!("author {i}")).unwrap())
        .collect::<Vec<_>>()
        .into_iter()
        .map(|n| (n, EthnicityLabel::ALL[r.random_range(0..13)]))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cs_is_symmetric_and_conserved(seed in any::<u64>(), papers in 0usize..100) {
        let records = random_corpus(&mut rng(seed), papers, 30);
        let labels = labels_for(30, seed ^ 7);
        let period = Period::new(1980, 2010).unwrap();
        let m = collab_matrix(&records, &labels, period, StrengthMode::Fractional);
        for i in 0..13 {
            for j in 0..13 {
                prop_assert_eq!(m.cs[i][j], m.cs[j][i]);
            }
        }
        let multi = records.iter().filter(|r| r.authors.len() >= 2).count();
        prop_assert_eq!(m.multi_author_papers, multi);
        prop_assert!((m.total() - multi as f64).abs() < 1e-9);
        for j in 0..13 {
            let col: f64 = (0..13).map(|i| m.cs[i][j]).sum();
            let ncol: f64 = (0..13).map(|i| m.ncs[i][j]).sum();
            if col > 0.0 {
                prop_assert!((ncol - 1.0).abs() < 1e-12);
            } else {
                prop_assert_eq!(ncol, 0.0);
            }
        }
    }

    #[test]
    fn graph_weight_total_counts_pairs(seed in any::<u64>(), papers in 0usize..80) {
        let records = random_corpus(&mut rng(seed), papers, 25);
        let g = build_graph(&records, &AuthorLabels::new(), None);
        let pairs: usize = records.iter().map(|r| r.authors.len() * (r.authors.len() - 1) / 2).sum();
        prop_assert_eq!(g.total_weight() as usize, pairs);
        for (a, b, w) in g.edges() {
            prop_assert!(a != b && w >= 1);
            prop_assert_eq!(g.weight(a, b), g.weight(b, a));
        }
    }

    #[test]
    fn louvain_never_loses_to_singletons(seed in any::<u64>(), n in 2usize..25) {
        let mut r = rng(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if r.random_bool(0.25) {
                    edges.push((a, b, r.random_range(1..=4) as f64));
                }
            }
        }
        let g = WeightedGraph::from_edges(n, &edges);
        let res = louvain(&g, seed, 1.0, 2);
        let singles: Vec<usize> = (0..n).collect();
        prop_assert!(res.modularity >= modularity(&g, &singles, 1.0) - 1e-12);
        for w in res.pass_modularity.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert_eq!(res.communities.len(), n);
    }

    #[test]
    fn entropy_and_purity_bounds(counts in prop::collection::vec(0usize..50, 13)) {
        prop_assume!(counts.iter().sum::<usize>() > 0);
        let h = entropy(&counts);
        let (p, _) = purity(&counts);
        let present = counts.iter().filter(|&&c| c > 0).count();
        prop_assert!(h >= 0.0 && h <= 13f64.ln() + 1e-12);
        prop_assert!(p >= 1.0 / present as f64 - 1e-12 && p <= 1.0);
        prop_assert_eq!(h == 0.0, p == 1.0);
    }
}

#[test]
fn library_modularity_matches_definition() {
    for f in graph_fixtures() {
        let g = f.weighted();
        let mut r = rng(11);
        for _ in 0..20 {
            let part: Vec<usize> = (0..f.n).map(|_| r.random_range(0..4)).collect();
            let a = modularity(&g, &part, 1.0);
            let b = reference_modularity(&f.dense(), &part);
            assert!((a - b).abs() < 1e-12, "{}", f.name);
        }
    }
}

#[test]
fn brute_force_oracle_on_fixture_graphs() {
    for f in graph_fixtures() {
        let (best, _) = brute_force_max_modularity(&f.dense());
        let got = louvain(&f.weighted(), 42, 1.0, ethnoname::collab::DEFAULT_RESTARTS);
        assert!((got.modularity - best).abs() < 1e-9, "{}: {} vs {}", f.name, got.modularity, best);
    }
}

#[test]
fn detection_is_deterministic_per_seed() {
    let records = random_corpus(&mut rng(3), 150, 60);
    let g = largest_component(&build_graph(&records, &AuthorLabels::new(), None)).unwrap();
    let a = detect_communities(&g, 5, CommunityOptions::default());
    let b = detect_communities(&g, 5, CommunityOptions::default());
    assert_eq!(a, b);
    let mut all: Vec<usize> = a.iter().flatten().copied().collect();
    all.sort();
    assert_eq!(all, (0..g.node_count()).collect::<Vec<_>>());
}

#[test]
fn cluster_report_and_min_size() {
    let names: Vec<_> = (0..13).map(|i| normalize(&format!("n {i}")).unwrap()).collect();
    let mut labels = AuthorLabels::new();
    for (i, n) in names.iter().enumerate() {
        labels.insert(n.clone(), if i < 7 { EthnicityLabel::Eng } else { EthnicityLabel::Ger });
    }
    let clusters = vec![names[..10].to_vec(), names[10..].to_vec()];
    let report = cluster_stats(&clusters, &labels, 10);
    let c0 = &report.clusters[0];
    assert!((c0.purity - 0.7).abs() < 1e-15);
    assert_eq!(c0.purity_label, EthnicityLabel::Eng);
    assert!((c0.entropy - 0.61).abs() < 0.005);
    assert_eq!(report.clusters[1].entropy, 0.0);
    assert_eq!(report.reported().count(), 1);
    // Global: 7 ENG, 6 GER.
    let p: [f64; 2] = [7.0 / 13.0, 6.0 / 13.0];
    let h: f64 = p.iter().map(|x| -x * x.ln()).sum();
    assert!((report.global_entropy - h).abs() < 1e-12);
    let tsv = report.assignments(&labels);
    assert_eq!(tsv.lines().count(), 13);
}

/// ENG authors mostly collaborate among themselves; every VIE author's
/// papers include an ENG coauthor.
#[test]
fn ncs_asymmetry_on_toy_corpus() {
    let mut labels = AuthorLabels::new();
    let mut add = |n: &str, l| {
        labels.insert(normalize(n).unwrap(), l);
        n.to_string()
    };
    let eng: Vec<String> = (0..6).map(|i| add(&format!("eng {i}"), EthnicityLabel::Eng)).collect();
    let vie: Vec<String> = (0..3).map(|i| add(&format!("vie {i}"), EthnicityLabel::Vie)).collect();
    let mut records = Vec::new();
    for i in 0..16 {
        records.push(record(&[eng[i % 6].clone(), eng[(i + 1) % 6].clone()], 2005, ""));
    }
    for i in 0..4 {
        records.push(record(&[vie[i % 3].clone(), eng[i % 6].clone()], 2005, ""));
    }
    assert_eq!(records.len(), 20);
    let ms = period_evolution(&records, &labels, &[Period::new(2001, 2010).unwrap()], StrengthMode::Fractional).unwrap();
    let m = &ms[0];
    use EthnicityLabel::{Eng, Vie};
    assert!(m.ncs(Eng, Vie) > m.ncs(Vie, Eng), "{} vs {}", m.ncs(Eng, Vie), m.ncs(Vie, Eng));
    assert_eq!(m.cs(Eng, Vie), m.cs(Vie, Eng));
}

#[test]
fn year_2000_belongs_to_the_third_default_period() {
    let labels = labels_for(2, 1);
    let recs = [record(&["author 0".into(), "author 1".into()], 2000, "")];
    let ms = period_evolution(&recs, &labels, &ethnoname::collab::default_periods(), StrengthMode::Fractional).unwrap();
    let totals: Vec<f64> = ms.iter().map(|m| m.total()).collect();
    assert_eq!(totals, [0.0, 0.0, 1.0, 0.0]);
}
