//! Bundled word lists: one lowercase word per line, sorted.

use std::sync::OnceLock;

const FIVE_LETTER: &str = include_str!("../data/words5.txt");
const GENERAL: &str = include_str!("../data/words.txt");

fn load(text: &'static str) -> Vec<&'static str> {
    text.lines().map(str::trim).filter(|w| !w.is_empty()).collect()
}

/// Five-letter words used as Wordle secrets and the accepted guess list.
pub fn five_letter() -> &'static [&'static str] {
    static LIST: OnceLock<Vec<&'static str>> = OnceLock::new();
    LIST.get_or_init(|| load(FIVE_LETTER))
}

/// General nouns used by Hangman and DontSayIt.
pub fn general() -> &'static [&'static str] {
    static LIST: OnceLock<Vec<&'static str>> = OnceLock::new();
    LIST.get_or_init(|| load(GENERAL))
}

pub fn is_five_letter_word(word: &str) -> bool {
    five_letter().binary_search(&word).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_are_sorted_lowercase_and_unique() {
        for (list, raw) in [(five_letter(), FIVE_LETTER), (general(), GENERAL)] {
            assert!(raw.ends_with('\n'));
            assert!(list.windows(2).all(|w| w[0] < w[1]));
            assert!(list
                .iter()
                .all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
        }
        assert!(five_letter().iter().all(|w| w.len() == 5));
        assert!(is_five_letter_word("crane"));
        assert!(!is_five_letter_word("zzzzz"));
    }
}
