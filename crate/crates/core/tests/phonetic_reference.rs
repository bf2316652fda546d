//! Soundex and Double Metaphone against codes frozen from two third-party
//! implementations of each (see fixtures/gen_phonetic_reference.mjs).

mod common;

use common::{check_phonetics, phonetic_rows, DM_ADJUDICATED};
use ethnoname::names::DoubleMetaphone;

#[test]
fn fixture_has_200_distinct_words() {
    let rows = phonetic_rows();
    assert_eq!(rows.len(), 200);
    let mut words: Vec<_> = rows.iter().map(|r| r.word.clone()).collect();
    words.sort();
    words.dedup();
    assert_eq!(words.len(), 200);
}

#[test]
fn soundex_matches_both_references() {
    let out = check_phonetics();
    assert!(out.soundex_mismatches.is_empty(), "{:#?}", out.soundex_mismatches);
}

#[test]
fn double_metaphone_matches_references() {
    let out = check_phonetics();
    assert!(out.dm_mismatches.is_empty(), "{:#?}", out.dm_mismatches);
    assert_eq!(out.unanimous, 200 - DM_ADJUDICATED.len());
}

#[test]
fn untruncated_codes_match_where_the_first_reference_is_authoritative() {
    let disputed_b: Vec<&str> = DM_ADJUDICATED
        .iter()
        .filter(|(_, r)| *r == 'b')
        .map(|(w, _)| *w)
        .collect();
    let enc = DoubleMetaphone::new(64);
    for r in phonetic_rows() {
        if disputed_b.contains(&r.word.as_str()) {
            continue;
        }
        let c = enc.encode(&r.word).unwrap();
        let alt = c.alternate.clone().unwrap_or_else(|| c.primary.clone());
        assert_eq!((c.primary, alt), r.dm_a, "{}", r.word);
    }
}
