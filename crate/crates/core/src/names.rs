//! Full-name normalization and the two phonetic encoders used as feature
//! sources: classical Soundex and Double Metaphone.
//!
//! A name is handled as one unit. Phonetic codes are computed per
//! whitespace-separated token, after folding non-ASCII letters to their
//! closest ASCII spelling with a fixed table.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("name contains no letters: {0:?}")]
    EmptyName(String),
    #[error("token has no ASCII-mappable letters: {0:?}")]
    NotEncodable(String),
}

/// A personal name as found in the source plus its canonical form.
/// Equality, ordering and hashing use the canonical form only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullName {
    raw: String,
    normalized: String,
}

impl FullName {
    pub fn parse(raw: &str) -> Result<Self, NameError> {
        normalize(raw)
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn normalized(&self) -> &str {
        &self.normalized
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.normalized.split(' ')
    }
}

impl PartialEq for FullName {
    fn eq(&self, other: &Self) -> bool {
        self.normalized == other.normalized
    }
}

impl Eq for FullName {}

impl Hash for FullName {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.normalized.hash(state);
    }
}

impl PartialOrd for FullName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FullName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.normalized.cmp(&other.normalized)
    }
}

impl fmt::Display for FullName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.normalized)
    }
}

/// Lowercases, collapses internal whitespace and trims. Diacritics are kept.
pub fn normalize(raw: &str) -> Result<FullName, NameError> {
    if !raw.chars().any(char::is_alphabetic) {
        return Err(NameError::EmptyName(raw.to_string()));
    }
    let normalized = raw
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ");
    Ok(FullName {
        raw: raw.to_string(),
        normalized,
    })
}

/// Output of a phonetic encoder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhoneticCode {
    pub primary: String,
    pub alternate: Option<String>,
}

impl PhoneticCode {
    fn single(primary: String) -> Self {
        PhoneticCode {
            primary,
            alternate: None,
        }
    }
}

/// ASCII spelling for a lowercase non-ASCII letter, if the table knows it.
pub fn transliterate_char(c: char) -> Option<&'static str> {
    let s = match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' | 'ā' | 'ă' | 'ą' | 'ǎ' => "a",
        'æ' => "ae",
        'ç' | 'ć' | 'ĉ' | 'ċ' | 'č' => "c",
        'ď' | 'đ' | 'ð' => "d",
        'è' | 'é' | 'ê' | 'ë' | 'ē' | 'ĕ' | 'ė' | 'ę' | 'ě' => "e",
        'ĝ' | 'ğ' | 'ġ' | 'ģ' => "g",
        'ĥ' | 'ħ' => "h",
        'ì' | 'í' | 'î' | 'ï' | 'ĩ' | 'ī' | 'ĭ' | 'į' | 'ı' | 'ǐ' => "i",
        'ĵ' => "j",
        'ķ' => "k",
        'ĺ' | 'ļ' | 'ľ' | 'ŀ' | 'ł' => "l",
        'ñ' | 'ń' | 'ņ' | 'ň' => "n",
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' | 'ō' | 'ŏ' | 'ő' | 'ơ' | 'ǒ' => "o",
        'œ' => "oe",
        'ŕ' | 'ŗ' | 'ř' => "r",
        'ß' => "ss",
        'ś' | 'ŝ' | 'ş' | 'š' | 'ș' => "s",
        'ţ' | 'ť' | 'ŧ' | 'ț' => "t",
        'þ' => "th",
        'ù' | 'ú' | 'û' | 'ü' | 'ũ' | 'ū' | 'ŭ' | 'ů' | 'ű' | 'ų' | 'ư' | 'ǔ' => "u",
        'ŵ' => "w",
        'ý' | 'ÿ' | 'ŷ' => "y",
        'ź' | 'ż' | 'ž' => "z",
        // Vietnamese letters with stacked diacritics.
        '\u{1EA0}'..='\u{1EB7}' => "a",
        '\u{1EB8}'..='\u{1EC7}' => "e",
        '\u{1EC8}'..='\u{1ECB}' => "i",
        '\u{1ECC}'..='\u{1EE3}' => "o",
        '\u{1EE4}'..='\u{1EF1}' => "u",
        '\u{1EF2}'..='\u{1EF9}' => "y",
        _ => return None,
    };
    Some(s)
}

/// Uppercase ASCII letters of `token` after transliteration; everything
/// else (digits, punctuation, unknown scripts) is dropped.
pub fn ascii_letters(token: &str) -> String {
    let mut out = String::with_capacity(token.len());
    for c in token.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphabetic() {
            out.push(c.to_ascii_uppercase());
        } else if let Some(t) = transliterate_char(c) {
            out.extend(t.chars().map(|c| c.to_ascii_uppercase()));
        }
    }
    out
}

fn soundex_digit(c: u8) -> u8 {
    match c {
        b'B' | b'F' | b'P' | b'V' => b'1',
        b'C' | b'G' | b'J' | b'K' | b'Q' | b'S' | b'X' | b'Z' => b'2',
        b'D' | b'T' => b'3',
        b'L' => b'4',
        b'M' | b'N' => b'5',
        b'R' => b'6',
        _ => b'0',
    }
}

/// Classical (Knuth) Soundex: first letter plus three digits.
pub fn soundex(token: &str) -> Result<PhoneticCode, NameError> {
    let letters = ascii_letters(token);
    let bytes = letters.as_bytes();
    let Some(&first) = bytes.first() else {
        return Err(NameError::NotEncodable(token.to_string()));
    };
    let mut code = String::with_capacity(4);
    code.push(first as char);
    let mut last = soundex_digit(first);
    for &b in &bytes[1..] {
        if code.len() == 4 {
            break;
        }
        // H and W are transparent: they do not separate equal codes.
        if b == b'H' || b == b'W' {
            continue;
        }
        let digit = soundex_digit(b);
        if digit != b'0' && digit != last {
            code.push(digit as char);
        }
        last = digit;
    }
    while code.len() < 4 {
        code.push('0');
    }
    Ok(PhoneticCode::single(code))
}

pub const DEFAULT_METAPHONE_LEN: usize = 4;

/// Double Metaphone with a bounded code length.
#[derive(Debug, Clone, Copy)]
pub struct DoubleMetaphone {
    max_len: usize,
}

impl Default for DoubleMetaphone {
    fn default() -> Self {
        DoubleMetaphone {
            max_len: DEFAULT_METAPHONE_LEN,
        }
    }
}

/// Double Metaphone of a single token with the default length of 4.
pub fn double_metaphone(token: &str) -> Result<PhoneticCode, NameError> {
    DoubleMetaphone::default().encode(token)
}

impl DoubleMetaphone {
    pub fn new(max_len: usize) -> Self {
        DoubleMetaphone {
            max_len: max_len.max(1),
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn encode(&self, token: &str) -> Result<PhoneticCode, NameError> {
        let letters = ascii_letters(token);
        if letters.is_empty() {
            return Err(NameError::NotEncodable(token.to_string()));
        }
        let (primary, alternate) = DmState::new(letters.as_bytes(), self.max_len).run();
        let alternate = (alternate != primary).then_some(alternate);
        Ok(PhoneticCode { primary, alternate })
    }
}

struct DmState<'a> {
    w: &'a [u8],
    max_len: usize,
    slavo_germanic: bool,
    primary: String,
    alternate: String,
}

const fn is_vowel(c: u8) -> bool {
    matches!(c, b'A' | b'E' | b'I' | b'O' | b'U' | b'Y')
}

impl<'a> DmState<'a> {
    fn new(w: &'a [u8], max_len: usize) -> Self {
        let has = |pat: &[u8]| w.windows(pat.len()).any(|win| win == pat);
        DmState {
            w,
            max_len,
            slavo_germanic: w.contains(&b'W') || w.contains(&b'K') || has(b"CZ") || has(b"WITZ"),
            primary: String::new(),
            alternate: String::new(),
        }
    }

    fn len(&self) -> isize {
        self.w.len() as isize
    }

    fn at(&self, i: isize) -> u8 {
        if i < 0 || i >= self.len() {
            0
        } else {
            self.w[i as usize]
        }
    }

    fn matches(&self, start: isize, pats: &[&str]) -> bool {
        let Some(n) = pats.first().map(|p| p.len() as isize) else {
            return false;
        };
        if start < 0 || start + n > self.len() {
            return false;
        }
        let slice = &self.w[start as usize..(start + n) as usize];
        pats.iter().any(|p| p.as_bytes() == slice)
    }

    fn push_primary(&mut self, s: &str) {
        let room = self.max_len.saturating_sub(self.primary.len());
        self.primary.push_str(&s[..s.len().min(room)]);
    }

    fn push_alternate(&mut self, s: &str) {
        let room = self.max_len.saturating_sub(self.alternate.len());
        self.alternate.push_str(&s[..s.len().min(room)]);
    }

    fn add(&mut self, s: &str) {
        self.push_primary(s);
        self.push_alternate(s);
    }

    /// A blank alternate keeps the alternate code unchanged.
    fn add2(&mut self, main: &str, alt: &str) {
        self.push_primary(main);
        if alt != " " {
            self.push_alternate(alt);
        }
    }

    fn complete(&self) -> bool {
        self.primary.len() >= self.max_len && self.alternate.len() >= self.max_len
    }

    fn run(mut self) -> (String, String) {
        let mut i: isize = if self.matches(0, &["GN", "KN", "PN", "WR", "PS"]) {
            1
        } else {
            0
        };
        while !self.complete() && i < self.len() {
            i = match self.at(i) {
                b'A' | b'E' | b'I' | b'O' | b'U' | b'Y' => {
                    if i == 0 {
                        self.add("A");
                    }
                    i + 1
                }
                b'B' => {
                    self.add("P");
                    if self.at(i + 1) == b'B' { i + 2 } else { i + 1 }
                }
                b'C' => self.handle_c(i),
                b'D' => self.handle_d(i),
                b'F' => {
                    self.add("F");
                    if self.at(i + 1) == b'F' { i + 2 } else { i + 1 }
                }
                b'G' => self.handle_g(i),
                b'H' => self.handle_h(i),
                b'J' => self.handle_j(i),
                b'K' => {
                    self.add("K");
                    if self.at(i + 1) == b'K' { i + 2 } else { i + 1 }
                }
                b'L' => self.handle_l(i),
                b'M' => {
                    self.add("M");
                    if self.condition_m0(i) { i + 2 } else { i + 1 }
                }
                b'N' => {
                    self.add("N");
                    if self.at(i + 1) == b'N' { i + 2 } else { i + 1 }
                }
                b'P' => self.handle_p(i),
                b'Q' => {
                    self.add("K");
                    if self.at(i + 1) == b'Q' { i + 2 } else { i + 1 }
                }
                b'R' => self.handle_r(i),
                b'S' => self.handle_s(i),
                b'T' => self.handle_t(i),
                b'V' => {
                    self.add("F");
                    if self.at(i + 1) == b'V' { i + 2 } else { i + 1 }
                }
                b'W' => self.handle_w(i),
                b'X' => self.handle_x(i),
                b'Z' => self.handle_z(i),
                _ => i + 1,
            };
        }
        (self.primary, self.alternate)
    }

    fn germanic_prefix(&self) -> bool {
        self.matches(0, &["VAN ", "VON "]) || self.matches(0, &["SCH"])
    }

    fn handle_c(&mut self, i: isize) -> isize {
        if self.condition_c0(i) {
            self.add("K");
            i + 2
        } else if i == 0 && self.matches(i, &["CAESAR"]) {
            self.add("S");
            i + 2
        } else if self.matches(i, &["CH"]) {
            self.handle_ch(i)
        } else if self.matches(i, &["CZ"]) && !self.matches(i - 2, &["WICZ"]) {
            self.add2("S", "X");
            i + 2
        } else if self.matches(i + 1, &["CIA"]) {
            self.add("X");
            i + 3
        } else if self.matches(i, &["CC"]) && !(i == 1 && self.at(0) == b'M') {
            self.handle_cc(i)
        } else if self.matches(i, &["CK", "CG", "CQ"]) {
            self.add("K");
            i + 2
        } else if self.matches(i, &["CI", "CE", "CY"]) {
            if self.matches(i, &["CIO", "CIE", "CIA"]) {
                self.add2("S", "X");
            } else {
                self.add("S");
            }
            i + 2
        } else {
            self.add("K");
            if self.matches(i + 1, &[" C", " Q", " G"]) {
                i + 3
            } else if self.matches(i + 1, &["C", "K", "Q"]) && !self.matches(i + 1, &["CE", "CI"]) {
                i + 2
            } else {
                i + 1
            }
        }
    }

    fn condition_c0(&self, i: isize) -> bool {
        if self.matches(i, &["CHIA"]) {
            true
        } else if i <= 1 || is_vowel(self.at(i - 2)) || !self.matches(i - 1, &["ACH"]) {
            false
        } else {
            let c = self.at(i + 2);
            (c != b'I' && c != b'E') || self.matches(i - 2, &["BACHER", "MACHER"])
        }
    }

    fn handle_cc(&mut self, i: isize) -> isize {
        if self.matches(i + 2, &["I", "E", "H"]) && !self.matches(i + 2, &["HU"]) {
            if (i == 1 && self.at(i - 1) == b'A') || self.matches(i - 1, &["UCCEE", "UCCES"]) {
                self.add("KS");
            } else {
                self.add("X");
            }
            i + 3
        } else {
            self.add("K");
            i + 2
        }
    }

    fn handle_ch(&mut self, i: isize) -> isize {
        if i > 0 && self.matches(i, &["CHAE"]) {
            self.add2("K", "X");
        } else if self.condition_ch0(i) || self.condition_ch1(i) {
            self.add("K");
        } else if i > 0 {
            if self.matches(0, &["MC"]) {
                self.add("K");
            } else {
                self.add2("X", "K");
            }
        } else {
            self.add("X");
        }
        i + 2
    }

    fn condition_ch0(&self, i: isize) -> bool {
        i == 0
            && (self.matches(i + 1, &["HARAC", "HARIS"])
                || self.matches(i + 1, &["HOR", "HYM", "HIA", "HEM"]))
            && !self.matches(0, &["CHORE"])
    }

    fn condition_ch1(&self, i: isize) -> bool {
        self.germanic_prefix()
            || self.matches(i - 2, &["ORCHES", "ARCHIT", "ORCHID"])
            || self.matches(i + 2, &["T", "S"])
            || ((self.matches(i - 1, &["A", "O", "U", "E"]) || i == 0)
                && (self.matches(i + 2, &["L", "R", "N", "M", "B", "H", "F", "V", "W", " "])
                    || i + 1 == self.len() - 1))
    }

    fn handle_d(&mut self, i: isize) -> isize {
        if self.matches(i, &["DG"]) {
            if self.matches(i + 2, &["I", "E", "Y"]) {
                self.add("J");
                i + 3
            } else {
                self.add("TK");
                i + 2
            }
        } else if self.matches(i, &["DT", "DD"]) {
            self.add("T");
            i + 2
        } else {
            self.add("T");
            i + 1
        }
    }

    fn handle_g(&mut self, i: isize) -> isize {
        let next = self.at(i + 1);
        if next == b'H' {
            self.handle_gh(i)
        } else if next == b'N' {
            if i == 1 && is_vowel(self.at(0)) && !self.slavo_germanic {
                self.add2("KN", "N");
            } else if !self.matches(i + 2, &["EY"]) && next != b'Y' && !self.slavo_germanic {
                self.add2("N", "KN");
            } else {
                self.add("KN");
            }
            i + 2
        } else if self.matches(i + 1, &["LI"]) && !self.slavo_germanic {
            self.add2("KL", "L");
            i + 2
        } else if i == 0
            && (next == b'Y'
                || self.matches(
                    i + 1,
                    &["ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"],
                ))
        {
            self.add2("K", "J");
            i + 2
        } else if (self.matches(i + 1, &["ER"]) || next == b'Y')
            && !self.matches(0, &["DANGER", "RANGER", "MANGER"])
            && !self.matches(i - 1, &["E", "I"])
            && !self.matches(i - 1, &["RGY", "OGY"])
        {
            self.add2("K", "J");
            i + 2
        } else if self.matches(i + 1, &["E", "I", "Y"]) || self.matches(i - 1, &["AGGI", "OGGI"]) {
            if self.germanic_prefix() || self.matches(i + 1, &["ET"]) {
                self.add("K");
            } else if self.matches(i + 1, &["IER"]) && (i + 4 == self.len() || self.at(i + 4) == b' ') {
                self.add("J");
            } else {
                self.add2("J", "K");
            }
            i + 2
        } else if next == b'G' {
            self.add("K");
            i + 2
        } else {
            self.add("K");
            i + 1
        }
    }

    fn handle_gh(&mut self, i: isize) -> isize {
        if i > 0 && !is_vowel(self.at(i - 1)) {
            self.add("K");
        } else if i == 0 {
            if self.at(i + 2) == b'I' {
                self.add("J");
            } else {
                self.add("K");
            }
        } else if (i > 1 && self.matches(i - 2, &["B", "H", "D"]))
            || (i > 2 && self.matches(i - 3, &["B", "H", "D"]))
            || (i > 3 && self.matches(i - 4, &["B", "H"]))
        {
            // silent, as in "hugh"
        } else if i > 2 && self.at(i - 1) == b'U' && self.matches(i - 3, &["C", "G", "L", "R", "T"]) {
            self.add("F");
        } else if i > 0 && self.at(i - 1) != b'I' {
            self.add("K");
        }
        i + 2
    }

    fn handle_h(&mut self, i: isize) -> isize {
        if (i == 0 || is_vowel(self.at(i - 1))) && is_vowel(self.at(i + 1)) {
            self.add("H");
            i + 2
        } else {
            i + 1
        }
    }

    fn handle_j(&mut self, i: isize) -> isize {
        if self.matches(i, &["JOSE"]) || self.matches(0, &["SAN "]) {
            if (i == 0 && self.at(i + 4) == b' ') || self.len() == 4 || self.matches(0, &["SAN "]) {
                self.add("H");
            } else {
                self.add2("J", "H");
            }
            return i + 1;
        }
        if i == 0 && !self.matches(i, &["JOSE"]) {
            self.add2("J", "A");
        } else if is_vowel(self.at(i - 1))
            && !self.slavo_germanic
            && (self.at(i + 1) == b'A' || self.at(i + 1) == b'O')
        {
            self.add2("J", "H");
        } else if i == self.len() - 1 {
            self.add2("J", " ");
        } else if !self.matches(i + 1, &["L", "T", "K", "S", "N", "M", "B", "Z"])
            && !self.matches(i - 1, &["S", "K", "L"])
        {
            self.add("J");
        }
        if self.at(i + 1) == b'J' {
            i + 2
        } else {
            i + 1
        }
    }

    fn handle_l(&mut self, i: isize) -> isize {
        if self.at(i + 1) == b'L' {
            if self.condition_l0(i) {
                self.push_primary("L");
            } else {
                self.add("L");
            }
            i + 2
        } else {
            self.add("L");
            i + 1
        }
    }

    fn condition_l0(&self, i: isize) -> bool {
        let n = self.len();
        (i == n - 3 && self.matches(i - 1, &["ILLO", "ILLA", "ALLE"]))
            || ((self.matches(n - 2, &["AS", "OS"]) || self.matches(n - 1, &["A", "O"]))
                && self.matches(i - 1, &["ALLE"]))
    }

    fn condition_m0(&self, i: isize) -> bool {
        self.at(i + 1) == b'M'
            || (self.matches(i - 1, &["UMB"])
                && (i + 1 == self.len() - 1 || self.matches(i + 2, &["ER"])))
    }

    fn handle_p(&mut self, i: isize) -> isize {
        if self.at(i + 1) == b'H' {
            self.add("F");
            i + 2
        } else {
            self.add("P");
            if self.matches(i + 1, &["P", "B"]) {
                i + 2
            } else {
                i + 1
            }
        }
    }

    fn handle_r(&mut self, i: isize) -> isize {
        if i == self.len() - 1
            && !self.slavo_germanic
            && self.matches(i - 2, &["IE"])
            && !self.matches(i - 4, &["ME", "MA"])
        {
            self.push_alternate("R");
        } else {
            self.add("R");
        }
        if self.at(i + 1) == b'R' {
            i + 2
        } else {
            i + 1
        }
    }

    fn handle_s(&mut self, i: isize) -> isize {
        if self.matches(i - 1, &["ISL", "YSL"]) {
            i + 1
        } else if i == 0 && self.matches(i, &["SUGAR"]) {
            self.add2("X", "S");
            i + 1
        } else if self.matches(i, &["SH"]) {
            if self.matches(i + 1, &["HEIM", "HOEK", "HOLM", "HOLZ"]) {
                self.add("S");
            } else {
                self.add("X");
            }
            i + 2
        } else if self.matches(i, &["SIO", "SIA"]) || self.matches(i, &["SIAN"]) {
            if self.slavo_germanic {
                self.add("S");
            } else {
                self.add2("S", "X");
            }
            i + 3
        } else if (i == 0 && self.matches(i + 1, &["M", "N", "L", "W"])) || self.matches(i + 1, &["Z"]) {
            self.add2("S", "X");
            if self.matches(i + 1, &["Z"]) {
                i + 2
            } else {
                i + 1
            }
        } else if self.matches(i, &["SC"]) {
            self.handle_sc(i)
        } else {
            if i == self.len() - 1 && self.matches(i - 2, &["AI", "OI"]) {
                self.push_alternate("S");
            } else {
                self.add("S");
            }
            if self.matches(i + 1, &["S", "Z"]) {
                i + 2
            } else {
                i + 1
            }
        }
    }

    fn handle_sc(&mut self, i: isize) -> isize {
        if self.at(i + 2) == b'H' {
            if self.matches(i + 3, &["OO", "ER", "EN", "UY", "ED", "EM"]) {
                if self.matches(i + 3, &["ER", "EN"]) {
                    self.add2("X", "SK");
                } else {
                    self.add("SK");
                }
            } else if i == 0 && !is_vowel(self.at(3)) && self.at(3) != b'W' {
                self.add2("X", "S");
            } else {
                self.add("X");
            }
        } else if self.matches(i + 2, &["I", "E", "Y"]) {
            self.add("S");
        } else {
            self.add("SK");
        }
        i + 3
    }

    fn handle_t(&mut self, i: isize) -> isize {
        if self.matches(i, &["TION"]) || self.matches(i, &["TIA", "TCH"]) {
            self.add("X");
            i + 3
        } else if self.matches(i, &["TH"]) || self.matches(i, &["TTH"]) {
            if self.matches(i + 2, &["OM", "AM"]) || self.germanic_prefix() {
                self.add("T");
            } else {
                self.add2("0", "T");
            }
            i + 2
        } else {
            self.add("T");
            if self.matches(i + 1, &["T", "D"]) {
                i + 2
            } else {
                i + 1
            }
        }
    }

    fn handle_w(&mut self, i: isize) -> isize {
        if self.matches(i, &["WR"]) {
            self.add("R");
            return i + 2;
        }
        if i == 0 && (is_vowel(self.at(i + 1)) || self.matches(i, &["WH"])) {
            if is_vowel(self.at(i + 1)) {
                self.add2("A", "F");
            } else {
                self.add("A");
            }
            i + 1
        } else if (i == self.len() - 1 && is_vowel(self.at(i - 1)))
            || self.matches(i - 1, &["EWSKI", "EWSKY", "OWSKI", "OWSKY"])
            || self.matches(0, &["SCH"])
        {
            self.push_alternate("F");
            i + 1
        } else if self.matches(i, &["WICZ", "WITZ"]) {
            self.add2("TS", "FX");
            i + 4
        } else {
            i + 1
        }
    }

    fn handle_x(&mut self, i: isize) -> isize {
        if i == 0 {
            self.add("S");
            return i + 1;
        }
        let french_final = i == self.len() - 1
            && (self.matches(i - 3, &["IAU", "EAU"]) || self.matches(i - 2, &["AU", "OU"]));
        if !french_final {
            self.add("KS");
        }
        if self.matches(i + 1, &["C", "X"]) {
            i + 2
        } else {
            i + 1
        }
    }

    fn handle_z(&mut self, i: isize) -> isize {
        if self.at(i + 1) == b'H' {
            self.add("J");
            return i + 2;
        }
        if self.matches(i + 1, &["ZO", "ZI", "ZA"])
            || (self.slavo_germanic && i > 0 && self.at(i - 1) != b'T')
        {
            self.add2("S", "TS");
        } else {
            self.add("S");
        }
        if self.at(i + 1) == b'Z' {
            i + 2
        } else {
            i + 1
        }
    }
}
