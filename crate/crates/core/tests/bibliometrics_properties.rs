mod common;

use common::{random_corpus, record, rng};
use ethnoname::bibliometrics::{
    asian_group, european_group, fit_logistic, output_series, population_series, venue_ratio_series, RatioWindow,
};
use ethnoname::corpus::AuthorLabels;
use ethnoname::names::normalize;
use ethnoname::EthnicityLabel;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeSet;

fn random_labels(seed: u64, pool: usize) -> AuthorLabels {
    let mut r = rng(seed);
    let mut labels = AuthorLabels::new();
    for i in 0..pool {
        // Some authors stay unlabeled and count as OTH.
        if r.random_bool(0.9) {
            let l = EthnicityLabel::ALL[r.random_range(0..13)];
            labels.insert(normalize(&format!("author {i}")).unwrap(), l);
        }
    }
    labels
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn output_is_conserved_per_year(seed in any::<u64>(), papers in 0usize..120) {
        let records = random_corpus(&mut rng(seed), papers, 40);
        let labels = random_labels(seed ^ 1, 40);
        let s = output_series(&records, &labels);
        for (i, &y) in s.years.iter().enumerate() {
            let total: f64 = s.values[i].iter().sum();
            let count = records.iter().filter(|r| r.year == y).count();
            prop_assert!((total - count as f64).abs() < 1e-9);
            prop_assert!(s.values[i].iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn population_totals_and_monotonicity(seed in any::<u64>(), papers in 1usize..120) {
        let records = random_corpus(&mut rng(seed), papers, 60);
        let labels = random_labels(seed ^ 2, 60);
        let s = population_series(&records, &labels);
        let distinct: BTreeSet<_> = records.iter().flat_map(|r| r.authors.iter()).collect();
        let last = s.accumulated.last().unwrap();
        prop_assert_eq!(last.iter().sum::<usize>(), distinct.len());
        for w in s.accumulated.windows(2) {
            for l in 0..13 {
                prop_assert!(w[1][l] >= w[0][l]);
            }
        }
        for (i, row) in s.accumulated.iter().enumerate() {
            for l in 0..13 {
                let sum: usize = s.new[..=i].iter().map(|n| n[l]).sum();
                prop_assert_eq!(row[l], sum);
            }
        }
    }

    #[test]
    fn venue_ratios_ignore_record_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut records = random_corpus(&mut r, 60, 30);
        for rec in records.iter_mut() {
            rec.venue = ["A", "B", "C"][r.random_range(0..3)].to_string();
        }
        let labels = random_labels(seed ^ 3, 30);
        let venues = vec!["A".to_string(), "B".to_string(), "Z".to_string()];
        for window in [RatioWindow::Cumulative, RatioWindow::PerYear] {
            let a = venue_ratio_series(&records, &labels, &asian_group(), &european_group(), &venues, window).unwrap();
            let mut shuffled = records.clone();
            shuffled.shuffle(&mut r);
            let b = venue_ratio_series(&shuffled, &labels, &asian_group(), &european_group(), &venues, window).unwrap();
            prop_assert_eq!(&a, &b);
            for p in &a.points {
                match p.ratio {
                    Some(v) => prop_assert_eq!(v, p.count_a as f64 / p.count_b as f64),
                    None => prop_assert_eq!(p.count_b, 0),
                }
                prop_assert!(p.count_a + p.count_b <= p.size);
            }
        }
    }
}

#[test]
fn chi_eng_variant() {
    let labels: AuthorLabels = [("wei", EthnicityLabel::Chi), ("li", EthnicityLabel::Chi), ("tom", EthnicityLabel::Eng), ("kim", EthnicityLabel::Kor)]
        .into_iter()
        .map(|(n, l)| (normalize(n).unwrap(), l))
        .collect();
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let records = [record(&names(&["wei", "li", "tom", "kim"]), 2003, "SIGIR")];
    let chi: BTreeSet<_> = [EthnicityLabel::Chi].into_iter().collect();
    let eng: BTreeSet<_> = [EthnicityLabel::Eng].into_iter().collect();
    let s = venue_ratio_series(&records, &labels, &chi, &eng, &["SIGIR".into()], RatioWindow::Cumulative).unwrap();
    assert_eq!(s.points[0].ratio, Some(2.0));
    let s = venue_ratio_series(&records, &labels, &asian_group(), &european_group(), &["SIGIR".into()], RatioWindow::Cumulative)
        .unwrap();
    assert_eq!(s.points[0].ratio, Some(3.0));
}

#[test]
fn fitted_curve_shape() {
    let pts: Vec<(f64, f64)> = (0..30)
        .map(|i| (2000.0 + i as f64, 500.0 / (1.0 + 49.0 * (-0.4 * i as f64).exp())))
        .collect();
    let fit = fit_logistic(&pts, None).unwrap();
    assert!((fit.value(fit.t0) - fit.p0).abs() < 1e-9 * fit.p0);
    let mut prev = f64::MIN;
    for i in 0..200 {
        let v = fit.value(1990.0 + i as f64 * 0.5);
        assert!(v > prev && v < fit.pm);
        prev = v;
    }
    assert!((fit.value(fit.inflection_time()) - fit.pm / 2.0).abs() < 1e-9 * fit.pm);
}
