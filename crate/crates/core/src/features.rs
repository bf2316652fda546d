//! Sparse feature extraction from full names.
//!
//! Four families feed the classifier, each under its own prefix so they
//! never collide in the vocabulary:
//!
//! | family                   | prefix | example     |
//! |--------------------------|--------|-------------|
//! | character n-grams        | none   | `^mc`, `ov$` |
//! | Soundex code per token   | `SDX:` | `SDX:S530`  |
//! | Double Metaphone n-grams | `DM:`  | `DM:SM`     |
//! | non-ASCII characters     | `NA:`  | `NA:ü`      |

use crate::names::{soundex, DoubleMetaphone, FullName, DEFAULT_METAPHONE_LEN};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use thiserror::Error;

pub const SOUNDEX_PREFIX: &str = "SDX:";
pub const METAPHONE_PREFIX: &str = "DM:";
pub const NON_ASCII_PREFIX: &str = "NA:";
pub const NON_ASCII_ANY: &str = "NA:ANY";

const WORD_START: char = '^';
const WORD_END: char = '$';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("n-gram range {min}..={max} is outside 1..=6")]
    BadRange { min: usize, max: usize },
}

/// Inclusive n-gram length interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramRange {
    pub min: usize,
    pub max: usize,
}

impl NgramRange {
    pub fn new(min: usize, max: usize) -> Result<Self, FeatureError> {
        if min == 0 || max > 6 || min > max {
            return Err(FeatureError::BadRange { min, max });
        }
        Ok(NgramRange { min, max })
    }

    pub fn lengths(&self) -> RangeInclusive<usize> {
        self.min..=self.max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    /// `None` disables the character n-gram family.
    pub char_ngrams: Option<NgramRange>,
    /// `None` disables the Double Metaphone family.
    pub metaphone_ngrams: Option<NgramRange>,
    pub metaphone_max_len: usize,
    pub soundex: bool,
    pub non_ascii: bool,
    pub l2_normalize: bool,
    /// Features seen fewer times than this in the training corpus are dropped.
    pub min_count: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            char_ngrams: Some(NgramRange { min: 1, max: 4 }),
            metaphone_ngrams: Some(NgramRange { min: 1, max: 2 }),
            metaphone_max_len: DEFAULT_METAPHONE_LEN,
            soundex: true,
            non_ascii: true,
            l2_normalize: true,
            min_count: 2,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        for r in [self.char_ngrams, self.metaphone_ngrams].into_iter().flatten() {
            NgramRange::new(r.min, r.max)?;
        }
        Ok(())
    }
}

fn push_ngrams(chars: &[char], range: NgramRange, prefix: &str, out: &mut Vec<String>) {
    for n in range.lengths() {
        if n > chars.len() {
            break;
        }
        for window in chars.windows(n) {
            let mut s = String::with_capacity(prefix.len() + n * 2);
            s.push_str(prefix);
            s.extend(window);
            out.push(s);
        }
    }
}

/// All character n-grams of each token with `^`/`$` boundary markers, one
/// entry per occurrence. Tokens are processed left to right and, within a
/// token, shorter n-grams come first.
pub fn extract_char_ngrams(name: &FullName, range: NgramRange) -> Vec<String> {
    let mut out = Vec::new();
    for token in name.tokens() {
        let mut chars = Vec::with_capacity(token.len() + 2);
        chars.push(WORD_START);
        chars.extend(token.chars());
        chars.push(WORD_END);
        push_ngrams(&chars, range, "", &mut out);
    }
    out
}

/// Soundex code and Double Metaphone n-grams per token. Tokens that cannot
/// be encoded are skipped.
pub fn extract_phonetic_features(
    name: &FullName,
    metaphone_range: Option<NgramRange>,
    metaphone_max_len: usize,
    with_soundex: bool,
) -> Vec<String> {
    let encoder = DoubleMetaphone::new(metaphone_max_len);
    let mut out = Vec::new();
    for token in name.tokens() {
        if with_soundex {
            if let Ok(code) = soundex(token) {
                out.push(format!("{SOUNDEX_PREFIX}{}", code.primary));
            }
        }
        let Some(range) = metaphone_range else {
            continue;
        };
        if let Ok(code) = encoder.encode(token) {
            for c in std::iter::once(&code.primary).chain(code.alternate.as_ref()) {
                let chars: Vec<char> = c.chars().collect();
                push_ngrams(&chars, range, METAPHONE_PREFIX, &mut out);
            }
        }
    }
    out
}

/// One feature per distinct non-ASCII character, in order of first
/// appearance, followed by `NA:ANY` when there is at least one.
pub fn extract_nonascii_features(name: &FullName) -> Vec<String> {
    let mut seen: Vec<char> = Vec::new();
    for c in name.normalized().chars().filter(|c| !c.is_ascii()) {
        if !seen.contains(&c) {
            seen.push(c);
        }
    }
    let mut out: Vec<String> = seen.iter().map(|c| format!("{NON_ASCII_PREFIX}{c}")).collect();
    if !out.is_empty() {
        out.push(NON_ASCII_ANY.to_string());
    }
    out
}

/// Every feature string of `name` under `config`, occurrences preserved.
pub fn extract_all(name: &FullName, config: &FeatureConfig) -> Vec<String> {
    let mut out = match config.char_ngrams {
        Some(r) => extract_char_ngrams(name, r),
        None => Vec::new(),
    };
    out.extend(extract_phonetic_features(
        name,
        config.metaphone_ngrams,
        config.metaphone_max_len,
        config.soundex,
    ));
    if config.non_ascii {
        out.extend(extract_nonascii_features(name));
    }
    out
}

/// Feature-string to dense index map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    index: HashMap<String, usize>,
    features: Vec<String>,
    frozen: bool,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a frozen vocabulary from a training corpus, keeping features
    /// seen at least `config.min_count` times. Indices follow sorted
    /// feature order so the result does not depend on corpus order.
    pub fn build<'a, I>(names: I, config: &FeatureConfig) -> Self
    where
        I: IntoIterator<Item = &'a FullName>,
    {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for name in names {
            for f in extract_all(name, config) {
                *counts.entry(f).or_default() += 1;
            }
        }
        let mut vocab = Vocabulary::new();
        for (f, c) in counts {
            if c >= config.min_count.max(1) {
                vocab.insert(&f);
            }
        }
        vocab.freeze();
        vocab
    }

    pub fn from_features(features: Vec<String>) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            if index.insert(f.clone(), i).is_some() {
                return Err(format!("duplicate feature {f:?}"));
            }
        }
        Ok(Vocabulary {
            index,
            features,
            frozen: true,
        })
    }

    /// Index of `feature`, adding it while the vocabulary is still growable.
    pub fn insert(&mut self, feature: &str) -> Option<usize> {
        if let Some(&i) = self.index.get(feature) {
            return Some(i);
        }
        if self.frozen {
            return None;
        }
        let i = self.features.len();
        self.features.push(feature.to_string());
        self.index.insert(feature.to_string(), i);
        Some(i)
    }

    pub fn get(&self, feature: &str) -> Option<usize> {
        self.index.get(feature).copied()
    }

    pub fn feature(&self, index: usize) -> Option<&str> {
        self.features.get(index).map(String::as_str)
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Sparse non-negative vector, sorted by index, without explicit zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    pub fn from_counts(counts: BTreeMap<usize, f64>) -> Self {
        FeatureVector {
            entries: counts.into_iter().filter(|&(_, v)| v > 0.0).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    fn l2_normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for (_, v) in &mut self.entries {
                *v /= n;
            }
        }
        self
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| dense[i] * v).sum()
    }
}

/// Maps a name's features through a vocabulary. Unknown features are
/// dropped; repeated features accumulate.
pub fn vectorize(name: &FullName, vocab: &Vocabulary, config: &FeatureConfig) -> FeatureVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for f in extract_all(name, config) {
        if let Some(i) = vocab.get(&f) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    let v = FeatureVector::from_counts(counts);
    if config.l2_normalize {
        v.l2_normalized()
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::normalize;

    fn name(s: &str) -> FullName {
        normalize(s).unwrap()
    }

    fn r(a: usize, b: usize) -> NgramRange {
        NgramRange::new(a, b).unwrap()
    }

    #[test]
    fn char_ngrams_with_boundaries() {
        assert_eq!(extract_char_ngrams(&name("li"), r(2, 2)), ["^l", "li", "i$"]);
        assert_eq!(
            extract_char_ngrams(&name("ab cd"), r(1, 1)),
            ["^", "a", "b", "$", "^", "c", "d", "$"]
        );
    }

    #[test]
    fn wider_range_is_superset() {
        let n = name("Kowalski Nowak");
        let narrow = extract_char_ngrams(&n, r(2, 2));
        let wide = extract_char_ngrams(&n, r(2, 3));
        for g in &narrow {
            assert!(wide.contains(g), "{g}");
        }
        assert!(wide.len() > narrow.len());
    }

    #[test]
    fn ngram_range_validation() {
        assert!(NgramRange::new(0, 2).is_err());
        assert!(NgramRange::new(3, 2).is_err());
        assert!(NgramRange::new(1, 7).is_err());
        assert!(NgramRange::new(1, 6).is_ok());
    }

    #[test]
    fn phonetic_features_for_smith() {
        let f = extract_phonetic_features(&name("smith"), Some(r(2, 2)), 4, true);
        for expected in ["SDX:S530", "DM:SM", "DM:M0", "DM:XM", "DM:MT"] {
            assert!(f.contains(&expected.to_string()), "{expected} missing from {f:?}");
        }
    }

    #[test]
    fn unencodable_token_has_no_phonetic_features() {
        let f = extract_phonetic_features(&name("李"), Some(r(1, 2)), 4, true);
        assert!(f.is_empty());
        let all = extract_all(&name("李"), &FeatureConfig::default());
        assert!(all.iter().any(|f| f == "NA:李"));
        assert!(!all.iter().any(|f| f.starts_with(SOUNDEX_PREFIX) || f.starts_with(METAPHONE_PREFIX)));
    }

    #[test]
    fn non_ascii_features() {
        assert_eq!(extract_nonascii_features(&name("müller")), ["NA:ü", "NA:ANY"]);
        assert!(extract_nonascii_features(&name("smith")).is_empty());
        assert_eq!(extract_nonascii_features(&name("gödel gödel")), ["NA:ö", "NA:ANY"]);
    }

    #[test]
    fn frozen_empty_vocab_yields_empty_vector() {
        let mut vocab = Vocabulary::new();
        vocab.freeze();
        let v = vectorize(&name("smith"), &vocab, &FeatureConfig::default());
        assert!(v.is_empty());
        assert_eq!(vocab.insert("zz"), None);
        assert!(vocab.is_empty());
    }

    #[test]
    fn repeated_bigram_is_counted() {
        let config = FeatureConfig {
            char_ngrams: Some(r(2, 2)),
            metaphone_ngrams: None,
            soundex: false,
            non_ascii: false,
            l2_normalize: false,
            min_count: 1,
            ..FeatureConfig::default()
        };
        let n = name("nana");
        let vocab = Vocabulary::build([&n], &config);
        let v = vectorize(&n, &vocab, &config);
        assert_eq!(v.get(vocab.get("na").unwrap()), 2.0);
        assert_eq!(v.get(vocab.get("an").unwrap()), 1.0);
    }

    #[test]
    fn l2_normalization_gives_unit_norm() {
        let n = name("Giuseppe Verdi");
        let config = FeatureConfig {
            min_count: 1,
            ..FeatureConfig::default()
        };
        let vocab = Vocabulary::build([&n], &config);
        let v = vectorize(&n, &vocab, &config);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vocabulary_pruning_and_growth() {
        let a = name("anna");
        let b = name("bob");
        let config = FeatureConfig::default();
        let vocab = Vocabulary::build([&a, &a, &b], &config);
        assert!(vocab.get("^a").is_some());
        assert!(vocab.get("^b").is_none());
        assert!(vocab.is_frozen());

        let mut grow = Vocabulary::new();
        assert_eq!(grow.insert("x"), Some(0));
        assert_eq!(grow.insert("y"), Some(1));
        assert_eq!(grow.insert("x"), Some(0));
        assert_eq!(grow.feature(1), Some("y"));
    }

    #[test]
    fn disabling_a_family_removes_its_prefix() {
        let n = name("Jürgen Schmidt");
        let base = FeatureConfig {
            min_count: 1,
            ..FeatureConfig::default()
        };
        let checks: [(FeatureConfig, fn(&str) -> bool); 4] = [
            (FeatureConfig { soundex: false, ..base.clone() }, |f| f.starts_with(SOUNDEX_PREFIX)),
            (FeatureConfig { metaphone_ngrams: None, ..base.clone() }, |f| f.starts_with(METAPHONE_PREFIX)),
            (FeatureConfig { non_ascii: false, ..base.clone() }, |f| f.starts_with(NON_ASCII_PREFIX)),
            (FeatureConfig { char_ngrams: None, ..base.clone() }, |f| {
                !(f.starts_with(SOUNDEX_PREFIX) || f.starts_with(METAPHONE_PREFIX) || f.starts_with(NON_ASCII_PREFIX))
            }),
        ];
        for (config, family) in checks {
            let feats = extract_all(&n, &config);
            assert!(!feats.is_empty());
            assert!(!feats.iter().any(|f| family(f)), "{config:?}");
        }
    }
}
