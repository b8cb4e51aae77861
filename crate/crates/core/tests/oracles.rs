mod support;

fn check(result: support::Check) {
    match result {
        Ok(summary) => println!("{summary}"),
        Err(reason) => panic!("{reason}"),
    }
}

#[test]
fn tictactoe_perfect_play_is_a_draw() {
    check(support::tictactoe_minimax());
}

#[test]
fn nim_first_player_wins_iff_nim_sum_nonzero() {
    check(support::nim_retrograde(7));
}

#[test]
fn connect_four_matches_window_scan() {
    check(support::connect_four_windows(100_000, 7));
}

#[test]
fn kuhn_tree_and_uniform_value() {
    check(support::kuhn_enumeration());
}

#[test]
fn wordle_and_mastermind_match_reference_scoring() {
    check(support::feedback_oracles(10_000, 11));
}
