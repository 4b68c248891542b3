use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// The eight well-being dimensions, in their canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "P.A.")]
    PositiveAffect,
    #[serde(rename = "N.A.")]
    NegativeAffect,
    #[serde(rename = "S.A.")]
    SelfAcceptance,
    #[serde(rename = "P.L.")]
    PurposeInLife,
    #[serde(rename = "E.M.")]
    EnvironmentalMastery,
    #[serde(rename = "P.R.")]
    PositiveRelations,
    #[serde(rename = "P.G.")]
    PersonalGrowth,
    #[serde(rename = "A.I.")]
    Autonomy,
}

impl Dimension {
    pub const ALL: [Dimension; 8] = [
        Dimension::PositiveAffect,
        Dimension::NegativeAffect,
        Dimension::SelfAcceptance,
        Dimension::PurposeInLife,
        Dimension::EnvironmentalMastery,
        Dimension::PositiveRelations,
        Dimension::PersonalGrowth,
        Dimension::Autonomy,
    ];

    pub fn abbreviation(self) -> &'static str {
        match self {
            Dimension::PositiveAffect => "P.A.",
            Dimension::NegativeAffect => "N.A.",
            Dimension::SelfAcceptance => "S.A.",
            Dimension::PurposeInLife => "P.L.",
            Dimension::EnvironmentalMastery => "E.M.",
            Dimension::PositiveRelations => "P.R.",
            Dimension::PersonalGrowth => "P.G.",
            Dimension::Autonomy => "A.I.",
        }
    }

    /// Field name used in record files.
    pub fn field_name(self) -> &'static str {
        match self {
            Dimension::PositiveAffect => "positive_affect",
            Dimension::NegativeAffect => "negative_affect",
            Dimension::SelfAcceptance => "self_acceptance",
            Dimension::PurposeInLife => "purpose_in_life",
            Dimension::EnvironmentalMastery => "environmental_mastery",
            Dimension::PositiveRelations => "positive_relations",
            Dimension::PersonalGrowth => "personal_growth",
            Dimension::Autonomy => "autonomy",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Accepts the abbreviation (`P.A.`, `PA`) or the field name.
    pub fn parse(s: &str) -> Option<Self> {
        let norm: String = s.chars().filter(|c| *c != '.').collect::<String>().to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|d| d.abbreviation().replace('.', "") == norm || d.field_name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbreviation())
    }
}

/// One value per well-being dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerDimension<T> {
    pub positive_affect: T,
    pub negative_affect: T,
    pub self_acceptance: T,
    pub purpose_in_life: T,
    pub environmental_mastery: T,
    pub positive_relations: T,
    pub personal_growth: T,
    pub autonomy: T,
}

impl<T> PerDimension<T> {
    pub fn from_fn(mut f: impl FnMut(Dimension) -> T) -> Self {
        Self {
            positive_affect: f(Dimension::PositiveAffect),
            negative_affect: f(Dimension::NegativeAffect),
            self_acceptance: f(Dimension::SelfAcceptance),
            purpose_in_life: f(Dimension::PurposeInLife),
            environmental_mastery: f(Dimension::EnvironmentalMastery),
            positive_relations: f(Dimension::PositiveRelations),
            personal_growth: f(Dimension::PersonalGrowth),
            autonomy: f(Dimension::Autonomy),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dimension, &T)> {
        Dimension::ALL.into_iter().map(move |d| (d, &self[d]))
    }
}

impl<T> Index<Dimension> for PerDimension<T> {
    type Output = T;

    fn index(&self, d: Dimension) -> &T {
        match d {
            Dimension::PositiveAffect => &self.positive_affect,
            Dimension::NegativeAffect => &self.negative_affect,
            Dimension::SelfAcceptance => &self.self_acceptance,
            Dimension::PurposeInLife => &self.purpose_in_life,
            Dimension::EnvironmentalMastery => &self.environmental_mastery,
            Dimension::PositiveRelations => &self.positive_relations,
            Dimension::PersonalGrowth => &self.personal_growth,
            Dimension::Autonomy => &self.autonomy,
        }
    }
}

impl<T> IndexMut<Dimension> for PerDimension<T> {
    fn index_mut(&mut self, d: Dimension) -> &mut T {
        match d {
            Dimension::PositiveAffect => &mut self.positive_affect,
            Dimension::NegativeAffect => &mut self.negative_affect,
            Dimension::SelfAcceptance => &mut self.self_acceptance,
            Dimension::PurposeInLife => &mut self.purpose_in_life,
            Dimension::EnvironmentalMastery => &mut self.environmental_mastery,
            Dimension::PositiveRelations => &mut self.positive_relations,
            Dimension::PersonalGrowth => &mut self.personal_growth,
            Dimension::Autonomy => &mut self.autonomy,
        }
    }
}

/// Questionnaire scores, one integer per dimension.
pub type SwbLabels = PerDimension<i32>;

/// Inclusive integer score range of one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRange {
    pub min: i32,
    pub max: i32,
}

impl LabelRange {
    pub fn contains(&self, v: i32) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

impl Default for LabelRange {
    /// Demo span; questionnaire ranges are dataset metadata.
    fn default() -> Self {
        LabelRange { min: 10, max: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LivingPlace {
    /// Provincial capitals and municipalities.
    FirstTier,
    OtherCity,
    Rural,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub user_id: String,
    pub gender: Gender,
    pub age: u32,
    pub living_place: LivingPlace,
    pub nickname: String,
    pub description: String,
    pub followers_count: u64,
    pub followees_count: u64,
    pub bi_followers_count: u64,
    pub statuses_count: u64,
    pub favourites_count: u64,
    pub geo_enabled: bool,
    pub allow_all_comment: bool,
    pub allow_all_act_msg: bool,
    /// UTC seconds.
    pub account_created_at: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    /// UTC seconds.
    pub timestamp: i64,
    pub text: String,
    pub is_repost: bool,
    pub mentions_count: u32,
    pub urls_count: u32,
    pub hashtags_count: u32,
    pub comments_received: u64,
    pub reposts_received: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub profile: Profile,
    /// Ascending by timestamp.
    pub posts: Vec<Post>,
    /// UTC seconds.
    pub survey_time: i64,
    pub labels: SwbLabels,
}

impl UserRecord {
    /// Checks every per-record invariant; the error names the violated rule.
    pub fn validate(&self, ranges: &PerDimension<LabelRange>) -> Result<(), String> {
        let p = &self.profile;
        if p.user_id.is_empty() {
            return Err("user_id is empty".into());
        }
        if p.age < 18 {
            return Err(format!("age {} is below 18", p.age));
        }
        if p.bi_followers_count > p.followees_count {
            return Err(format!(
                "bi_followers_count {} exceeds followees_count {}",
                p.bi_followers_count, p.followees_count
            ));
        }
        for (i, post) in self.posts.iter().enumerate() {
            if post.timestamp <= p.account_created_at {
                return Err(format!("post {i} does not come after account_created_at"));
            }
            if i > 0 && post.timestamp < self.posts[i - 1].timestamp {
                return Err(format!("posts are not sorted by timestamp (post {i})"));
            }
            if post.text.is_empty() && !post.is_repost {
                return Err(format!("post {i} has empty text but is not a repost"));
            }
        }
        if let Some(first) = self.posts.first() {
            if self.survey_time < first.timestamp {
                return Err("survey_time precedes the first post".into());
            }
        }
        for (d, &score) in self.labels.iter() {
            let r = ranges[d];
            if !r.contains(score) {
                return Err(format!(
                    "label {d} = {score} outside declared range [{}, {}]",
                    r.min, r.max
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GenderCounts {
    pub male: usize,
    pub female: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LivingPlaceCounts {
    pub first_tier: usize,
    pub other_city: usize,
    pub rural: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub schema_version: u32,
    pub record_count: usize,
    pub label_ranges: PerDimension<LabelRange>,
    pub gender_counts: GenderCounts,
    pub living_place_counts: LivingPlaceCounts,
}

impl DatasetMetadata {
    pub const SCHEMA_VERSION: u32 = 1;

    /// Metadata describing `records`.
    pub fn describe(records: &[UserRecord], label_ranges: PerDimension<LabelRange>) -> Self {
        let mut gender_counts = GenderCounts::default();
        let mut living_place_counts = LivingPlaceCounts::default();
        for r in records {
            match r.profile.gender {
                Gender::Male => gender_counts.male += 1,
                Gender::Female => gender_counts.female += 1,
            }
            match r.profile.living_place {
                LivingPlace::FirstTier => living_place_counts.first_tier += 1,
                LivingPlace::OtherCity => living_place_counts.other_city += 1,
                LivingPlace::Rural => living_place_counts.rural += 1,
            }
        }
        Self {
            schema_version: Self::SCHEMA_VERSION,
            record_count: records.len(),
            label_ranges,
            gender_counts,
            living_place_counts,
        }
    }
}
