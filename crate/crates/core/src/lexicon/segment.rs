use super::{Lexicon, TokenStream};

/// Han ideographs and Japanese kana: scripts written without spaces.
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF      // hiragana, katakana
        | 0x3400..=0x4DBF    // CJK extension A
        | 0x4E00..=0x9FFF    // CJK unified ideographs
        | 0xF900..=0xFAFF    // compatibility ideographs
        | 0x20000..=0x2A6DF) // extension B
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Splits `text` into lowercase tokens.
///
/// Runs of CJK characters go through forward maximum matching against the
/// lexicon's CJK vocabulary (falling back to single characters); other
/// alphanumeric runs are whole words. Everything else separates tokens.
pub fn segment(text: &str, lexicon: &Lexicon) -> TokenStream {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut cjk_run: Vec<char> = Vec::new();

    let flush_word = |word: &mut String, tokens: &mut Vec<String>| {
        let t = word.trim_matches('\'');
        if !t.is_empty() {
            tokens.push(t.to_string());
        }
        word.clear();
    };

    for c in lower.chars() {
        if is_cjk(c) {
            flush_word(&mut word, &mut tokens);
            cjk_run.push(c);
        } else {
            if !cjk_run.is_empty() {
                forward_max_match(&cjk_run, lexicon, &mut tokens);
                cjk_run.clear();
            }
            if is_word_char(c) {
                word.push(c);
            } else {
                flush_word(&mut word, &mut tokens);
            }
        }
    }
    flush_word(&mut word, &mut tokens);
    if !cjk_run.is_empty() {
        forward_max_match(&cjk_run, lexicon, &mut tokens);
    }
    TokenStream { tokens }
}

fn forward_max_match(run: &[char], lexicon: &Lexicon, tokens: &mut Vec<String>) {
    let max_len = lexicon.max_cjk_chars().max(1);
    let mut i = 0;
    while i < run.len() {
        let longest = max_len.min(run.len() - i);
        let mut taken = 1;
        for len in (2..=longest).rev() {
            let candidate: String = run[i..i + len].iter().collect();
            if lexicon.in_cjk_vocabulary(&candidate) {
                taken = len;
                break;
            }
        }
        tokens.push(run[i..i + taken].iter().collect());
        i += taken;
    }
}
