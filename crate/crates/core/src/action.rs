//! Normalizes free-form agent output to a game action token.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no [bracketed] action token in agent output")]
    NoBracketToken,
}

/// Returns the trimmed content of the last `[...]` group in `text`.
///
/// A group is well-formed when it contains no nested brackets and is not
/// blank. Earlier groups are ignored, so deliberation before the final move
/// does not matter.
pub fn parse_bracketed_action(text: &str) -> Result<String, ParseError> {
    let mut last = None;
    let mut open: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => open = Some(i),
            ']' => {
                if let Some(start) = open.take() {
                    let inner = text[start + 1..i].trim();
                    if !inner.is_empty() {
                        last = Some(inner);
                    }
                }
            }
            _ => {}
        }
    }
    last.map(str::to_owned).ok_or(ParseError::NoBracketToken)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_token() {
        assert_eq!(parse_bracketed_action("I'll take the center: [4]").unwrap(), "4");
    }

    #[test]
    fn last_token_wins() {
        assert_eq!(
            parse_bracketed_action("Maybe [3]... no, final answer [7]").unwrap(),
            "7"
        );
    }

    #[test]
    fn missing_brackets() {
        assert_eq!(
            parse_bracketed_action("no brackets here"),
            Err(ParseError::NoBracketToken)
        );
        assert_eq!(parse_bracketed_action("[  ]"), Err(ParseError::NoBracketToken));
        assert_eq!(parse_bracketed_action("unclosed [4"), Err(ParseError::NoBracketToken));
    }

    #[test]
    fn case_and_inner_spaces_preserved() {
        assert_eq!(parse_bracketed_action("[ Bid 3 5 ]").unwrap(), "Bid 3 5");
        assert_eq!(parse_bracketed_action("[[4]]").unwrap(), "4");
    }

    proptest! {
        #[test]
        fn appended_token_is_recovered(prefix in "[^\\[\\]]{0,40}", token in "[a-zA-Z0-9 ]{0,10}[a-zA-Z0-9]") {
            let text = format!("{prefix} [{token}]");
            prop_assert_eq!(parse_bracketed_action(&text).unwrap(), token.trim());
        }
    }
}
