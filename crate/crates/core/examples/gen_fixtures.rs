//! Regenerates the synthetic fixtures under `fixtures/`.
//!
//! ```text
//! cargo run --example gen_fixtures -- crates/core/fixtures
//! ```

use ethnoname::corpus::{format_publications, PublicationRecord, RawPublication};
use ethnoname::EthnicityLabel;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

/// Disjoint alphabets, one per class, in class order.
const ALPHABETS: [&str; 12] = [
    "abcde", "fghij", "klmno", "pqrst", "zàáâã", "uvwxy", "äåæçè", "éêëìí", "îïñòó", "ôõöøù", "úûüýÿ", "āăąćč",
];

const TAGS: [&[&str]; 12] = [
    &["British"],
    &["German"],
    &["French"],
    &["Spanish", "Columbian", "Venezuelan"],
    &["Russian"],
    &["Italian"],
    &["Indian"],
    &["Chinese"],
    &["Japanese"],
    &["Korean"],
    &["Vietnamese"],
    &["Egyptian", "Iranian", "Iraqi", "Lebanese", "Syrian", "Tunisian"],
];

const VENUES: [&str; 24] = [
    "SIGIR", "CIKM", "TREC", "CLEF", "KDD", "ICDM", "SDM", "PKDD", "PAKDD", "IJCAI", "AAAI", "ICML", "UAI", "NIPS",
    "AAMAS", "STOC", "SODA", "FOCS", "ICALP", "LICS", "CONCUR", "VLDB", "SIGMOD", "",
];

fn token(rng: &mut ChaCha8Rng, alphabet: &[char]) -> String {
    let len = rng.random_range(3..=8);
    let mut s: String = (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect();
    let first = s.remove(0);
    first.to_uppercase().chain(s.chars()).collect()
}

fn name(rng: &mut ChaCha8Rng, class: usize) -> String {
    let alphabet: Vec<char> = ALPHABETS[class].chars().collect();
    format!("{} {}", token(rng, &alphabet), token(rng, &alphabet))
}

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(20120);

    let mut names = String::from("# synthetic labeled names: name<TAB>nationality\n");
    for class in 0..12 {
        for i in 0..100 {
            let tags = TAGS[class];
            names.push_str(&format!("{}\t{}\n", name(&mut rng, class), tags[i % tags.len()]));
        }
    }
    std::fs::write(dir.join("synthetic_names.tsv"), names)?;

    // Twenty research groups of eight authors; each group is mostly one class.
    let mut authors: Vec<(String, EthnicityLabel)> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for g in 0..20 {
        let home = g % 12;
        let mut members = Vec::new();
        for m in 0..8 {
            let class = if m < 6 { home } else { rng.random_range(0..12) };
            members.push(authors.len());
            authors.push((name(&mut rng, class), EthnicityLabel::CLASSES[class]));
        }
        groups.push(members);
    }

    let mut records = Vec::new();
    for p in 0..200 {
        // Later years get more papers.
        let u: f64 = rng.random();
        let year = 1975 + (35.0 * u.sqrt()).floor() as i64;
        let group = &groups[rng.random_range(0..groups.len())];
        let k = rng.random_range(1..=4usize);
        let mut chosen: Vec<usize> = group.choose_multiple(&mut rng, k).copied().collect();
        if rng.random_bool(0.15) {
            let other = &groups[rng.random_range(0..groups.len())];
            chosen.push(*other.choose(&mut rng).unwrap());
        }
        chosen.dedup();
        let raw = RawPublication {
            title: format!("Synthetic study {p}"),
            authors: chosen.iter().map(|&a| authors[a].0.clone()).collect(),
            year,
            venue: VENUES.choose(&mut rng).unwrap().to_string(),
        };
        records.push(PublicationRecord::from_raw(raw).expect("generated record is valid"));
    }
    std::fs::write(dir.join("publications.jsonl"), format_publications(&records))?;

    let mut labels = String::from("# ground-truth author labels: name<TAB>label\n");
    for (n, l) in &authors {
        labels.push_str(&format!("{n}\t{l}\n"));
    }
    std::fs::write(dir.join("author_labels.tsv"), labels)?;
    Ok(())
}
