use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureFamily {
    #[serde(rename = "D")]
    Demographic,
    #[serde(rename = "B")]
    Behavioral,
    #[serde(rename = "L")]
    Linguistic,
}

impl FeatureFamily {
    pub fn letter(self) -> char {
        match self {
            FeatureFamily::Demographic => 'D',
            FeatureFamily::Behavioral => 'B',
            FeatureFamily::Linguistic => 'L',
        }
    }
}

pub const DEMOGRAPHIC_FEATURES: [&str; 3] = ["gender", "age", "living_place"];

/// Canonical behavioral feature list, in registry order.
pub const BEHAVIORAL_FEATURES: [&str; 26] = [
    "followers_count",
    "followees_count",
    "bi_followers_count",
    "followers_to_followees_ratio",
    "bi_follow_ratio",
    "statuses_count",
    "favourites_count",
    "posts_in_window",
    "repost_ratio",
    "original_posts_in_window",
    "mean_post_length",
    "mean_posts_per_day",
    "night_post_ratio",
    "weekend_post_ratio",
    "mention_ratio",
    "link_ratio",
    "hashtag_ratio",
    "emoticon_ratio",
    "mean_comments_received",
    "mean_reposts_received",
    "geo_enabled",
    "allow_all_comment",
    "allow_all_act_msg",
    "nickname_length",
    "description_length",
    "account_age_days",
];

/// Linguistic feature columns are the lexicon category names with this prefix.
pub const LINGUISTIC_PREFIX: &str = "lex_";

/// A subset of the three feature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FeatureSet {
    pub demographic: bool,
    pub behavioral: bool,
    pub linguistic: bool,
}

impl FeatureSet {
    pub const D: FeatureSet = FeatureSet::new(true, false, false);
    pub const B: FeatureSet = FeatureSet::new(false, true, false);
    pub const L: FeatureSet = FeatureSet::new(false, false, true);
    pub const ALL: FeatureSet = FeatureSet::new(true, true, true);

    pub const fn new(demographic: bool, behavioral: bool, linguistic: bool) -> Self {
        Self {
            demographic,
            behavioral,
            linguistic,
        }
    }

    /// `{D}, {B}, {L}, {D+B}, {D+L}, {B+L}, {D+B+L}`.
    pub fn default_combinations() -> Vec<FeatureSet> {
        vec![
            FeatureSet::D,
            FeatureSet::B,
            FeatureSet::L,
            FeatureSet::new(true, true, false),
            FeatureSet::new(true, false, true),
            FeatureSet::new(false, true, true),
            FeatureSet::ALL,
        ]
    }

    pub fn is_empty(&self) -> bool {
        !(self.demographic || self.behavioral || self.linguistic)
    }

    pub fn contains(&self, family: FeatureFamily) -> bool {
        match family {
            FeatureFamily::Demographic => self.demographic,
            FeatureFamily::Behavioral => self.behavioral,
            FeatureFamily::Linguistic => self.linguistic,
        }
    }

    pub fn families(&self) -> impl Iterator<Item = FeatureFamily> + '_ {
        [
            FeatureFamily::Demographic,
            FeatureFamily::Behavioral,
            FeatureFamily::Linguistic,
        ]
        .into_iter()
        .filter(|f| self.contains(*f))
    }

    /// Only demographics: the reference configuration.
    pub fn is_baseline(&self) -> bool {
        *self == FeatureSet::D
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.families().map(|x| x.letter().to_string()).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    /// Accepts letters separated by `+` or `,` (`D+B+L`, `D,B`, `BL`).
    fn from_str(s: &str) -> Result<Self> {
        let mut set = FeatureSet::default();
        for c in s.chars().filter(|c| !matches!(c, '+' | ',' | ' ' | '{' | '}')) {
            match c.to_ascii_uppercase() {
                'D' => set.demographic = true,
                'B' => set.behavioral = true,
                'L' => set.linguistic = true,
                other => {
                    return Err(Error::Config(format!(
                        "unknown feature family {other:?} in {s:?} (expected D, B or L)"
                    )))
                }
            }
        }
        if set.is_empty() {
            return Err(Error::Config(format!("empty feature family set {s:?}")));
        }
        Ok(set)
    }
}

impl Serialize for FeatureSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub family: FeatureFamily,
}

/// Ordered feature catalogue: 3 demographic, 26 behavioral and K linguistic
/// columns, K being the lexicon's category count.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRegistry {
    columns: Vec<FeatureColumn>,
}

impl FeatureRegistry {
    pub fn new(lexicon: Option<&Lexicon>) -> Self {
        let mut columns: Vec<FeatureColumn> = DEMOGRAPHIC_FEATURES
            .iter()
            .map(|n| FeatureColumn {
                name: n.to_string(),
                family: FeatureFamily::Demographic,
            })
            .chain(BEHAVIORAL_FEATURES.iter().map(|n| FeatureColumn {
                name: n.to_string(),
                family: FeatureFamily::Behavioral,
            }))
            .collect();
        if let Some(lex) = lexicon {
            columns.extend(lex.categories().iter().map(|c| FeatureColumn {
                name: format!("{LINGUISTIC_PREFIX}{}", c.name),
                family: FeatureFamily::Linguistic,
            }));
        }
        Self { columns }
    }

    pub fn columns(&self) -> &[FeatureColumn] {
        &self.columns
    }

    pub fn count(&self, family: FeatureFamily) -> usize {
        self.columns.iter().filter(|c| c.family == family).count()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Family of a column name, inferred from the naming scheme.
    pub fn family_of(name: &str) -> Option<FeatureFamily> {
        if DEMOGRAPHIC_FEATURES.contains(&name) {
            Some(FeatureFamily::Demographic)
        } else if BEHAVIORAL_FEATURES.contains(&name) {
            Some(FeatureFamily::Behavioral)
        } else if name.starts_with(LINGUISTIC_PREFIX) {
            Some(FeatureFamily::Linguistic)
        } else {
            None
        }
    }
}
