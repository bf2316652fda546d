mod common;

use common::fixture;
use ethnoname::corpus::{
    category_filter, format_publications, label_authors, load_label_map, load_publications, parse_publications,
    AuthorLabels, Grouping,
};
use ethnoname::names::normalize;
use ethnoname::EthnicityLabel;
use std::collections::HashMap;

#[test]
fn category_filter_on_labeled_titles() {
    let text = std::fs::read_to_string(fixture("category_titles.tsv")).unwrap();
    let mut checked = 0;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let (title, expected) = line.split_once('\t').unwrap();
        let expected: bool = expected.parse().unwrap();
        assert_eq!(category_filter(title), expected, "{title}");
        checked += 1;
    }
    assert_eq!(checked, 30);
}

#[test]
fn publication_loader_rejects_bad_lines() {
    let text = [
        r#"{"title":"ok","authors":["Ann Lee","Bo Chen"],"year":2001,"venue":"KDD"}"#,
        r#"{"title":"no authors","authors":[],"year":2001,"venue":"KDD"}"#,
        r#"{"title":"extra","authors":["A B"],"year":2001,"venue":"KDD","pages":3}"#,
        "not json",
        "",
        r#"{"title":"year","authors":["A B"],"year":99999,"venue":"KDD"}"#,
        r#"{"title":"dup","authors":["Ann Lee","ann  lee"],"year":1999,"venue":"SIGIR"}"#,
    ]
    .join("\n");
    let loaded = parse_publications(&text);
    assert_eq!(loaded.items.len(), 2);
    assert_eq!(loaded.rejects.iter().map(|r| r.line).collect::<Vec<_>>(), [2, 3, 4, 6]);
    assert_eq!(loaded.items[1].authors.len(), 1);
    let again = parse_publications(&format_publications(&loaded.items));
    assert_eq!(again.items, loaded.items);
}

#[test]
fn synthetic_corpus_loads_cleanly() {
    let pubs = load_publications(&fixture("publications.jsonl")).unwrap();
    assert!(pubs.rejects.is_empty());
    assert_eq!(pubs.items.len(), 200);
    let labels = load_label_map(&fixture("author_labels.tsv")).unwrap();
    assert!(labels.rejects.is_empty());
    assert_eq!(labels.items.len(), 160);
    let map: AuthorLabels = labels.items.into_iter().collect();
    let authors = label_authors(&pubs.items, &map, &mut HashMap::new());
    assert!(authors.values().all(|l| *l != EthnicityLabel::Oth));
}

#[test]
fn label_authors_uses_cache_and_defaults_to_oth() {
    let text = [
        r#"{"title":"a","authors":["Ann Lee","Bo Chen"],"year":2001,"venue":"KDD"}"#,
        r#"{"title":"b","authors":["Bo Chen","Cy Unknown"],"year":2002,"venue":"KDD"}"#,
    ]
    .join("\n");
    let recs = parse_publications(&text).items;
    let mut map = AuthorLabels::new();
    map.insert(normalize("ann lee").unwrap(), EthnicityLabel::Eng);
    map.insert(normalize("BO CHEN").unwrap(), EthnicityLabel::Chi);
    let mut cache = HashMap::new();
    cache.insert(normalize("Cy Unknown").unwrap(), EthnicityLabel::Ger);
    let labels = label_authors(&recs, &map, &mut cache);
    assert_eq!(labels.len(), 3);
    assert_eq!(labels[&normalize("Ann Lee").unwrap()], EthnicityLabel::Eng);
    assert_eq!(labels[&normalize("Bo Chen").unwrap()], EthnicityLabel::Chi);
    // Cached value wins over the labeler.
    assert_eq!(labels[&normalize("Cy Unknown").unwrap()], EthnicityLabel::Ger);
    assert_eq!(cache.len(), 3);
    let empty = label_authors(&recs, &AuthorLabels::new(), &mut HashMap::new());
    assert!(empty.values().all(|l| *l == EthnicityLabel::Oth));
}

#[test]
fn grouping_maps_nationalities_and_codes() {
    let g = Grouping::default();
    assert_eq!(g.resolve("chinese"), Some(EthnicityLabel::Chi));
    assert_eq!(g.resolve("KOR"), Some(EthnicityLabel::Kor));
    assert_eq!(g.resolve("martian"), None);
}
