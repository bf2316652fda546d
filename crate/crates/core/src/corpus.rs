//! Labeled-name and publication-record ingestion, the category-title
//! filter, nationality grouping and memoized author labeling.

use crate::classifier::{EthnicityLabel, Model};
use crate::names::{normalize, FullName};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("all {count} lines of {path} were rejected")]
    AllLinesRejected { path: PathBuf, count: usize },
    #[error("labeled names must not use OTH")]
    OthLabel,
    #[error("grouping file {path} line {line}: {reason}")]
    BadGrouping {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("publication needs at least one author")]
    NoAuthors,
    #[error("year {0} outside {MIN_YEAR}..={MAX_YEAR}")]
    YearOutOfRange(i64),
}

/// A training or evaluation example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledName {
    pub name: FullName,
    pub label: EthnicityLabel,
}

impl LabeledName {
    pub fn new(name: FullName, label: EthnicityLabel) -> Result<Self, CorpusError> {
        if !label.is_class() {
            return Err(CorpusError::OthLabel);
        }
        Ok(LabeledName { name, label })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublicationRecord {
    pub title: String,
    pub authors: Vec<FullName>,
    pub year: i32,
    pub venue: String,
}

/// Exact on-disk shape of one publication line.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPublication {
    pub title: String,
    pub authors: Vec<String>,
    pub year: i64,
    pub venue: String,
}

impl PublicationRecord {
    /// Validates and normalizes a raw record. Repeated author names within
    /// one record are kept once.
    pub fn from_raw(raw: RawPublication) -> Result<Self, String> {
        if raw.authors.is_empty() {
            return Err(CorpusError::NoAuthors.to_string());
        }
        if raw.year < MIN_YEAR as i64 || raw.year > MAX_YEAR as i64 {
            return Err(CorpusError::YearOutOfRange(raw.year).to_string());
        }
        let mut authors: Vec<FullName> = Vec::with_capacity(raw.authors.len());
        for a in &raw.authors {
            let name = normalize(a).map_err(|e| format!("author {a:?}: {e}"))?;
            if !authors.contains(&name) {
                authors.push(name);
            }
        }
        Ok(PublicationRecord {
            title: raw.title,
            authors,
            year: raw.year as i32,
            venue: raw.venue,
        })
    }

    pub fn to_raw(&self) -> RawPublication {
        RawPublication {
            title: self.title.clone(),
            authors: self.authors.iter().map(|a| a.raw().to_string()).collect(),
            year: self.year as i64,
            venue: self.venue.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub items: Vec<T>,
    pub rejects: Vec<Reject>,
}

/// Writes rejects as `line<TAB>reason` rows.
pub fn format_rejects(rejects: &[Reject]) -> String {
    let mut out = String::from("line\treason\n");
    for r in rejects {
        out.push_str(&format!("{}\t{}\n", r.line, r.reason.replace(['\t', '\n'], " ")));
    }
    out
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|source| CorpusError::FileUnreadable {
        path: path.to_path_buf(),
        source,
    })
}

/// Nationality (or label code) to ethnicity mapping, case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grouping {
    map: BTreeMap<String, EthnicityLabel>,
}

const DEFAULT_GROUPING: &[(&str, EthnicityLabel)] = &[
    ("british", EthnicityLabel::Eng),
    ("german", EthnicityLabel::Ger),
    ("french", EthnicityLabel::Frn),
    ("spanish", EthnicityLabel::Spa),
    ("columbian", EthnicityLabel::Spa),
    ("colombian", EthnicityLabel::Spa),
    ("venezuelan", EthnicityLabel::Spa),
    ("russian", EthnicityLabel::Rus),
    ("italian", EthnicityLabel::Ita),
    ("indian", EthnicityLabel::Ind),
    ("chinese", EthnicityLabel::Chi),
    ("japanese", EthnicityLabel::Jap),
    ("korean", EthnicityLabel::Kor),
    ("vietnamese", EthnicityLabel::Vie),
    ("egyptian", EthnicityLabel::Ara),
    ("iranian", EthnicityLabel::Ara),
    ("iraqi", EthnicityLabel::Ara),
    ("lebanese", EthnicityLabel::Ara),
    ("syrian", EthnicityLabel::Ara),
    ("tunisian", EthnicityLabel::Ara),
];

impl Default for Grouping {
    fn default() -> Self {
        let mut map: BTreeMap<String, EthnicityLabel> = DEFAULT_GROUPING
            .iter()
            .map(|&(t, l)| (t.to_string(), l))
            .collect();
        for l in EthnicityLabel::CLASSES {
            map.insert(l.code().to_ascii_lowercase(), l);
        }
        Grouping { map }
    }
}

impl Grouping {
    pub fn empty() -> Self {
        Grouping { map: BTreeMap::new() }
    }

    pub fn insert(&mut self, tag: &str, label: EthnicityLabel) {
        self.map.insert(tag.trim().to_lowercase(), label);
    }

    pub fn resolve(&self, tag: &str) -> Option<EthnicityLabel> {
        self.map.get(&tag.trim().to_lowercase()).copied()
    }

    /// Adds `tag<TAB>CODE` lines from a file on top of the current entries.
    pub fn extend_from_file(&mut self, path: &Path) -> Result<(), CorpusError> {
        let text = read(path)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| CorpusError::BadGrouping {
                path: path.to_path_buf(),
                line: i + 1,
                reason,
            };
            let (tag, code) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected tag<TAB>label".into()))?;
            let label: EthnicityLabel = code.parse().map_err(|e| bad(format!("{e}")))?;
            if !label.is_class() {
                return Err(bad("OTH cannot be a training label".into()));
            }
            self.insert(tag, label);
        }
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, EthnicityLabel)> {
        self.map.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Parses `name<TAB>tag` lines. Blank lines and `#` comments are skipped.
pub fn parse_labeled_names(text: &str, grouping: &Grouping) -> Loaded<LabeledName> {
    let mut items = Vec::new();
    let mut rejects = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let reject = |reason: String| Reject { line: i + 1, reason };
        let Some((name, tag)) = line.split_once('\t') else {
            rejects.push(reject("missing TAB separator".into()));
            continue;
        };
        let Some(label) = grouping.resolve(tag) else {
            rejects.push(reject(format!("unknown tag {:?}", tag.trim())));
            continue;
        };
        match normalize(name) {
            Ok(name) => items.push(LabeledName { name, label }),
            Err(e) => rejects.push(reject(e.to_string())),
        }
    }
    Loaded { items, rejects }
}

pub fn load_labeled_names(path: &Path, grouping: &Grouping) -> Result<Loaded<LabeledName>, CorpusError> {
    let loaded = parse_labeled_names(&read(path)?, grouping);
    all_rejected_check(path, loaded)
}

fn all_rejected_check<T>(path: &Path, loaded: Loaded<T>) -> Result<Loaded<T>, CorpusError> {
    if loaded.items.is_empty() && !loaded.rejects.is_empty() {
        return Err(CorpusError::AllLinesRejected {
            path: path.to_path_buf(),
            count: loaded.rejects.len(),
        });
    }
    Ok(loaded)
}

/// One JSON object per line with exactly `title`, `authors`, `year`, `venue`.
pub fn parse_publications(text: &str) -> Loaded<PublicationRecord> {
    let mut items = Vec::new();
    let mut rejects = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RawPublication>(line)
            .map_err(|e| e.to_string())
            .and_then(PublicationRecord::from_raw);
        match parsed {
            Ok(r) => items.push(r),
            Err(reason) => rejects.push(Reject { line: i + 1, reason }),
        }
    }
    Loaded { items, rejects }
}

pub fn load_publications(path: &Path) -> Result<Loaded<PublicationRecord>, CorpusError> {
    Ok(parse_publications(&read(path)?))
}

pub fn format_publications(records: &[PublicationRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(&r.to_raw()).expect("plain record serializes"));
        out.push('\n');
    }
    out
}

/// Final tokens that end in "s" without being plurals.
const NON_PLURAL_S: &[&str] = &[
    "as", "is", "its", "was", "has", "his", "hers", "ours", "yours", "theirs", "this", "thus", "us",
    "yes", "always", "perhaps", "whereas", "besides", "news", "series", "species", "means",
    "politics", "physics", "mathematics", "economics", "athletics", "linguistics", "statistics",
    "ethics", "gymnastics", "genetics", "electronics", "robotics", "logistics", "aeronautics",
    "status", "census", "campus", "virus", "bus", "gas", "atlas", "chaos", "paris", "texas",
    "tennis", "analysis", "crisis", "basis", "thesis", "business", "chess", "class", "press",
    "congress", "progress", "address", "access", "success", "wilderness", "christmas", "easter",
];

/// Category-title heuristic for harvesting personal-name pages: keeps
/// titles mentioning "people", containing "s of", or ending in a plural.
pub fn category_filter(title: &str) -> bool {
    let lower = title.to_lowercase();
    if lower.contains("people") || lower.contains("s of") {
        return true;
    }
    let Some(last) = lower.split_whitespace().last() else {
        return false;
    };
    let token: String = last.chars().filter(|c| c.is_alphabetic()).collect();
    token.len() >= 3 && token.ends_with('s') && !NON_PLURAL_S.contains(&token.as_str())
}

/// Anything that can assign a decided label to a name.
pub trait NameLabeler {
    fn label(&self, name: &FullName) -> EthnicityLabel;
}

impl NameLabeler for Model {
    fn label(&self, name: &FullName) -> EthnicityLabel {
        self.predict(name).decided
    }
}

/// Precomputed labels; names not present are OTH.
impl NameLabeler for BTreeMap<FullName, EthnicityLabel> {
    fn label(&self, name: &FullName) -> EthnicityLabel {
        self.get(name).copied().unwrap_or(EthnicityLabel::Oth)
    }
}

pub type AuthorLabels = BTreeMap<FullName, EthnicityLabel>;

/// Label of `name` in `labels`, OTH when absent.
pub fn label_of(labels: &AuthorLabels, name: &FullName) -> EthnicityLabel {
    labels.get(name).copied().unwrap_or(EthnicityLabel::Oth)
}

/// Labels every distinct author once, consulting and filling `cache`.
pub fn label_authors<L: NameLabeler + ?Sized>(
    records: &[PublicationRecord],
    labeler: &L,
    cache: &mut HashMap<FullName, EthnicityLabel>,
) -> AuthorLabels {
    let mut out = AuthorLabels::new();
    for r in records {
        for a in &r.authors {
            if out.contains_key(a) {
                continue;
            }
            let label = *cache.entry(a.clone()).or_insert_with(|| labeler.label(a));
            out.insert(a.clone(), label);
        }
    }
    out
}

/// Reads a `name<TAB>LABEL` file (OTH allowed) as precomputed author labels.
pub fn load_label_map(path: &Path) -> Result<Loaded<(FullName, EthnicityLabel)>, CorpusError> {
    let text = read(path)?;
    let mut items = Vec::new();
    let mut rejects = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = line
            .split_once('\t')
            .ok_or_else(|| "missing TAB separator".to_string())
            .and_then(|(n, l)| {
                let label: EthnicityLabel = l.parse().map_err(|e| format!("{e}"))?;
                Ok((normalize(n).map_err(|e| e.to_string())?, label))
            });
        match parsed {
            Ok(item) => items.push(item),
            Err(reason) => rejects.push(Reject { line: i + 1, reason }),
        }
    }
    all_rejected_check(path, Loaded { items, rejects })
}
