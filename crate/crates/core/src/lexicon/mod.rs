//! LIWC-style category dictionaries, dictionary-driven segmentation and
//! category hit counting.
//!
//! A `.dic` file has a category block between two `%` lines, one
//! `id<TAB>name` per line with ids forming `1..=K`, followed by entry lines
//! `word<TAB>id[<TAB>id...]`. A trailing `*` on a word makes it a prefix
//! (wildcard) entry. Words are matched case-insensitively.

mod segment;

use std::collections::{HashMap, HashSet};
use std::ops::{Add, AddAssign};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use segment::{is_cjk, segment};

const DEMO_LEXICON: &str = include_str!("../../data/demo.dic");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: u32,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    categories: Vec<Category>,
    /// Exact words → category indices (0-based, sorted, deduplicated).
    exact: HashMap<String, Vec<usize>>,
    /// Wildcard stems (without `*`) → category indices.
    wildcards: HashMap<String, Vec<usize>>,
    /// Exact words and wildcard stems that contain CJK characters.
    cjk_vocabulary: HashSet<String>,
    max_cjk_chars: usize,
}

/// Tokens produced by [`segment`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn total_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn concat(mut self, other: TokenStream) -> TokenStream {
        self.tokens.extend(other.tokens);
        self
    }
}

/// Per-category hit counts over a token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryCounts {
    pub counts: Vec<u64>,
    pub total_tokens: u64,
}

impl CategoryCounts {
    pub fn zeros(k: usize) -> Self {
        Self {
            counts: vec![0; k],
            total_tokens: 0,
        }
    }

    /// Hit proportions `count / total_tokens`; all zeros when there are no tokens.
    pub fn proportions(&self) -> Vec<f64> {
        if self.total_tokens == 0 {
            return vec![0.0; self.counts.len()];
        }
        let total = self.total_tokens as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

impl AddAssign<&CategoryCounts> for CategoryCounts {
    fn add_assign(&mut self, rhs: &CategoryCounts) {
        assert_eq!(self.counts.len(), rhs.counts.len(), "category count mismatch");
        for (a, b) in self.counts.iter_mut().zip(&rhs.counts) {
            *a += b;
        }
        self.total_tokens += rhs.total_tokens;
    }
}

impl Add for CategoryCounts {
    type Output = CategoryCounts;

    fn add(mut self, rhs: CategoryCounts) -> CategoryCounts {
        self += &rhs;
        self
    }
}

impl Lexicon {
    /// The small dictionary bundled with the crate.
    pub fn demo() -> Self {
        Self::parse_str(DEMO_LEXICON, Path::new("<demo.dic>")).expect("bundled demo lexicon is valid")
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    /// Number of categories, K.
    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Exact (non-wildcard) words, sorted.
    pub fn exact_words(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.exact.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    /// Wildcard stems (without the `*`), sorted.
    pub fn wildcard_stems(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.wildcards.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }

    /// All entries as `(word, categories)`, wildcard words carrying their
    /// trailing `*`, sorted by word.
    pub fn entries(&self) -> Vec<(String, &[usize])> {
        let mut v: Vec<(String, &[usize])> = self
            .exact
            .iter()
            .map(|(w, c)| (w.clone(), c.as_slice()))
            .chain(self.wildcards.iter().map(|(w, c)| (format!("{w}*"), c.as_slice())))
            .collect();
        v.sort();
        v
    }

    /// Category indices (0-based) of the entry matching `token`: an exact
    /// entry wins, otherwise the longest matching wildcard stem.
    pub fn lookup(&self, token: &str) -> Option<&[usize]> {
        if let Some(c) = self.exact.get(token) {
            return Some(c);
        }
        if self.wildcards.is_empty() {
            return None;
        }
        let mut ends: Vec<usize> = token.char_indices().map(|(i, _)| i).skip(1).collect();
        ends.push(token.len());
        ends.into_iter()
            .rev()
            .find_map(|end| self.wildcards.get(&token[..end]).map(Vec::as_slice))
    }

    pub(crate) fn in_cjk_vocabulary(&self, word: &str) -> bool {
        self.cjk_vocabulary.contains(word)
    }

    pub(crate) fn max_cjk_chars(&self) -> usize {
        self.max_cjk_chars
    }

    pub fn parse_str(text: &str, source: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: source.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());

        match lines.next() {
            Some((_, l)) if l.trim() == "%" => {}
            Some((n, _)) => return Err(err(n, "expected '%' opening the category block".into())),
            None => return Err(err(0, "empty lexicon file".into())),
        }

        let mut declared: Vec<(u32, String, usize)> = Vec::new();
        let mut closed = false;
        for (n, line) in lines.by_ref() {
            if line.trim() == "%" {
                closed = true;
                break;
            }
            let mut fields = line.split_whitespace();
            let (Some(id), Some(name), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(err(n, format!("expected 'id<TAB>name', got {line:?}")));
            };
            let id: u32 = id
                .parse()
                .map_err(|_| err(n, format!("category id {id:?} is not a positive integer")))?;
            if declared.iter().any(|(d, _, _)| *d == id) {
                return Err(err(n, format!("duplicate category id {id}")));
            }
            if declared.iter().any(|(_, nm, _)| nm == name) {
                return Err(err(n, format!("duplicate category name {name:?}")));
            }
            declared.push((id, name.to_string(), n));
        }
        if !closed {
            return Err(err(0, "category block is not closed by '%'".into()));
        }
        if declared.is_empty() {
            return Err(err(0, "empty category block".into()));
        }
        declared.sort_by_key(|(id, _, _)| *id);
        for (expected, (id, _, n)) in (1u32..).zip(&declared) {
            if *id != expected {
                return Err(err(
                    *n,
                    format!("category ids must be dense 1..K; found {id} where {expected} was expected"),
                ));
            }
        }
        let categories: Vec<Category> = declared
            .into_iter()
            .map(|(id, name, _)| Category { id, name })
            .collect();
        let k = categories.len();

        let mut exact: HashMap<String, Vec<usize>> = HashMap::new();
        let mut wildcards: HashMap<String, Vec<usize>> = HashMap::new();
        for (n, line) in lines {
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("non-blank line has a field").to_lowercase();
            let mut cats = Vec::new();
            for f in fields {
                let id: usize = f
                    .parse()
                    .map_err(|_| err(n, format!("category id {f:?} is not a positive integer")))?;
                if id == 0 || id > k {
                    return Err(err(n, format!("entry {word:?} references undeclared category {id}")));
                }
                cats.push(id - 1);
            }
            if cats.is_empty() {
                return Err(err(n, format!("entry {word:?} lists no categories")));
            }
            let (table, key) = match word.strip_suffix('*') {
                Some(stem) if !stem.is_empty() => (&mut wildcards, stem.to_string()),
                Some(_) => return Err(err(n, "bare '*' is not a valid entry".into())),
                None => (&mut exact, word),
            };
            let slot = table.entry(key).or_default();
            slot.extend(cats);
            slot.sort_unstable();
            slot.dedup();
        }

        let cjk_vocabulary: HashSet<String> = exact
            .keys()
            .chain(wildcards.keys())
            .filter(|w| w.chars().any(is_cjk))
            .cloned()
            .collect();
        let max_cjk_chars = cjk_vocabulary.iter().map(|w| w.chars().count()).max().unwrap_or(1);
        Ok(Self {
            categories,
            exact,
            wildcards,
            cjk_vocabulary,
            max_cjk_chars,
        })
    }

    /// Writes the lexicon back in `.dic` form (entries sorted).
    pub fn to_dic_string(&self) -> String {
        let mut out = String::from("%\n");
        for c in &self.categories {
            out.push_str(&format!("{}\t{}\n", c.id, c.name));
        }
        out.push_str("%\n");
        for (w, cats) in self.entries() {
            out.push_str(&w);
            for c in cats {
                out.push_str(&format!("\t{}", c + 1));
            }
            out.push('\n');
        }
        out
    }
}

/// Reads a `.dic` lexicon file.
pub fn parse_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Lexicon::parse_str(&text, path)
}

/// Tallies, for every token, one hit in each category of its matching entry.
pub fn count_categories(tokens: &TokenStream, lexicon: &Lexicon) -> CategoryCounts {
    let mut counts = CategoryCounts::zeros(lexicon.len());
    for t in &tokens.tokens {
        if let Some(cats) = lexicon.lookup(t) {
            for &c in cats {
                counts.counts[c] += 1;
            }
        }
    }
    counts.total_tokens = tokens.total_count() as u64;
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Lexicon> {
        Lexicon::parse_str(text, Path::new("test.dic"))
    }

    const SMALL: &str = "%\n1\tposemo\n2\tnegemo\n%\nhappy\t1\nsad\t2\nbittersweet\t1\t2\n";

    #[test]
    fn parses_small_lexicon() {
        let lex = parse(SMALL).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.categories()[1].name, "negemo");
        assert_eq!(lex.lookup("bittersweet"), Some(&[0, 1][..]));
    }

    #[test]
    fn undeclared_category_names_the_line() {
        let e = parse("%\n1\ta\n2\tb\n%\nfoo\t1\nbar\t99\n").unwrap_err();
        match e {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 6);
                assert!(message.contains("99"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_category_blocks() {
        assert!(matches!(parse("%\n%\nfoo\t1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("%\n1\ta\n1\tb\n%\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse("%\n1\ta\n3\tb\n%\n").is_err());
        assert!(parse("%\n1\ta\n2\ta\n%\n").is_err());
        assert!(parse("1\ta\n%\n").is_err());
        assert!(parse("%\n1\ta\n").is_err());
        assert!(parse("%\n1\ta\n%\nlonely\n").is_err());
    }

    #[test]
    fn wildcard_precedence_and_longest_stem() {
        let lex = parse("%\n1\ta\n2\tb\n3\tc\n%\nhapp*\t1\nhappy\t2\nhappin*\t3\n").unwrap();
        assert_eq!(lex.lookup("happy"), Some(&[1][..]));
        assert_eq!(lex.lookup("happiness"), Some(&[2][..]));
        assert_eq!(lex.lookup("happ"), Some(&[0][..]));
        assert_eq!(lex.lookup("happen"), Some(&[0][..]));
        assert_eq!(lex.lookup("hap"), None);
    }

    #[test]
    fn counts_multi_category_tokens() {
        let lex = parse(SMALL).unwrap();
        let empty = count_categories(&TokenStream::default(), &lex);
        assert_eq!(empty, CategoryCounts::zeros(2));
        let toks = TokenStream {
            tokens: vec!["bittersweet".into(), "happy".into(), "meh".into()],
        };
        let c = count_categories(&toks, &lex);
        assert_eq!(c.counts, vec![2, 1]);
        assert_eq!(c.total_tokens, 3);
    }

    #[test]
    fn demo_lexicon_round_trips_through_dic_text() {
        let lex = Lexicon::demo();
        let again = parse(&lex.to_dic_string()).unwrap();
        assert_eq!(lex, again);
    }
}
