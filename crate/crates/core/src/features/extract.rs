use serde::{Deserialize, Serialize};

use crate::data_model::{Gender, LivingPlace, Post, Profile, UserRecord};
use crate::lexicon::{count_categories, segment, CategoryCounts, Lexicon};

pub const SECONDS_PER_DAY: i64 = 86_400;

/// Posting window around each user's survey time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    /// Seconds before the survey time.
    pub before: i64,
    /// Seconds after the survey time.
    pub after: i64,
}

impl Default for WindowSpec {
    /// One week on each side.
    fn default() -> Self {
        Self::days(7, 7)
    }
}

impl WindowSpec {
    pub const fn days(before: i64, after: i64) -> Self {
        Self {
            before: before * SECONDS_PER_DAY,
            after: after * SECONDS_PER_DAY,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.before >= 0 && self.after >= 0
    }

    /// Whether `timestamp` lies in `[survey − before, survey + after]`.
    pub fn contains(&self, survey_time: i64, timestamp: i64) -> bool {
        timestamp >= survey_time - self.before && timestamp <= survey_time + self.after
    }

    pub fn length_days(&self) -> f64 {
        (self.before + self.after) as f64 / SECONDS_PER_DAY as f64
    }

    pub fn posts<'a>(&self, record: &'a UserRecord) -> impl Iterator<Item = &'a Post> + 'a {
        let w = *self;
        let survey = record.survey_time;
        record.posts.iter().filter(move |p| w.contains(survey, p.timestamp))
    }
}

/// Surface markers in a post's text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TextMarkers {
    /// `@name` mentions.
    pub mentions: u32,
    /// Tokens starting with `http`.
    pub urls: u32,
    /// Closed `#topic#` pairs.
    pub hashtags: u32,
    /// Bracketed emoticon codes such as `[哈哈]`.
    pub emoticons: u32,
}

impl TextMarkers {
    pub fn scan(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let mut m = TextMarkers::default();
        let mut i = 0;
        let mut open_hash: Option<usize> = None;
        while i < chars.len() {
            let c = chars[i];
            match c {
                '@' => {
                    if chars.get(i + 1).is_some_and(|n| n.is_alphanumeric() || *n == '_') {
                        m.mentions += 1;
                    }
                }
                '#' => match open_hash {
                    Some(start) if i > start + 1 => {
                        m.hashtags += 1;
                        open_hash = None;
                    }
                    Some(_) => open_hash = Some(i),
                    None => open_hash = Some(i),
                },
                '[' => {
                    if let Some(len) = chars[i + 1..].iter().take(9).position(|&x| x == ']') {
                        let inner = &chars[i + 1..i + 1 + len];
                        if !inner.is_empty() && !inner.iter().any(|x| *x == '[' || x.is_whitespace()) {
                            m.emoticons += 1;
                            i += len + 1;
                        }
                    }
                }
                'h' | 'H' => {
                    let starts_token = i == 0 || !chars[i - 1].is_alphanumeric();
                    let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
                    if starts_token && rest.eq_ignore_ascii_case("http") {
                        m.urls += 1;
                        i += 3;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        m
    }
}

/// `(gender, age, living_place)` with gender male=1/female=0 and living place
/// first-tier=3, other city=2, rural=1.
pub fn extract_demographic(profile: &Profile) -> [f64; 3] {
    let gender = match profile.gender {
        Gender::Male => 1.0,
        Gender::Female => 0.0,
    };
    let place = match profile.living_place {
        LivingPlace::FirstTier => 3.0,
        LivingPlace::OtherCity => 2.0,
        LivingPlace::Rural => 1.0,
    };
    [gender, profile.age as f64, place]
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Hour of day (0..24) of a UTC timestamp.
pub fn utc_hour(ts: i64) -> i64 {
    ts.rem_euclid(SECONDS_PER_DAY) / 3600
}

/// Saturday or Sunday in UTC. 1970-01-01 was a Thursday.
pub fn is_utc_weekend(ts: i64) -> bool {
    let weekday_from_monday = (ts.div_euclid(SECONDS_PER_DAY) + 3).rem_euclid(7);
    weekday_from_monday >= 5
}

/// The 26 behavioral features, in registry order. Window-scoped features use
/// only posts inside `window`; ratios with an empty denominator are 0.
pub fn extract_behavioral(record: &UserRecord, window: &WindowSpec) -> [f64; 26] {
    let p = &record.profile;
    let posts: Vec<&Post> = window.posts(record).collect();
    let n = posts.len() as f64;
    let count = |pred: &dyn Fn(&Post) -> bool| posts.iter().filter(|x| pred(x)).count() as f64;
    let sum = |f: &dyn Fn(&Post) -> f64| posts.iter().map(|x| f(x)).sum::<f64>();

    let reposts = count(&|x| x.is_repost);
    [
        p.followers_count as f64,
        p.followees_count as f64,
        p.bi_followers_count as f64,
        ratio(p.followers_count as f64, p.followees_count as f64),
        ratio(p.bi_followers_count as f64, p.followees_count as f64),
        p.statuses_count as f64,
        p.favourites_count as f64,
        n,
        ratio(reposts, n),
        n - reposts,
        ratio(sum(&|x| x.text.chars().count() as f64), n),
        ratio(n, window.length_days()),
        ratio(count(&|x| utc_hour(x.timestamp) < 6), n),
        ratio(count(&|x| is_utc_weekend(x.timestamp)), n),
        ratio(count(&|x| x.mentions_count > 0), n),
        ratio(count(&|x| x.urls_count > 0), n),
        ratio(count(&|x| x.hashtags_count > 0), n),
        ratio(count(&|x| TextMarkers::scan(&x.text).emoticons > 0), n),
        ratio(sum(&|x| x.comments_received as f64), n),
        ratio(sum(&|x| x.reposts_received as f64), n),
        flag(p.geo_enabled),
        flag(p.allow_all_comment),
        flag(p.allow_all_act_msg),
        p.nickname.chars().count() as f64,
        p.description.chars().count() as f64,
        (record.survey_time - p.account_created_at) as f64 / SECONDS_PER_DAY as f64,
    ]
}

/// Category hit counts over all in-window posts.
pub fn window_category_counts(record: &UserRecord, window: &WindowSpec, lexicon: &Lexicon) -> CategoryCounts {
    let mut total = CategoryCounts::zeros(lexicon.len());
    for post in window.posts(record) {
        total += &count_categories(&segment(&post.text, lexicon), lexicon);
    }
    total
}

/// K category proportions over the in-window token total.
pub fn extract_linguistic(record: &UserRecord, window: &WindowSpec, lexicon: &Lexicon) -> Vec<f64> {
    window_category_counts(record, window, lexicon).proportions()
}
