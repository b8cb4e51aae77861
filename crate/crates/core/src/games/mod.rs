//! The bundled game roster.

pub mod blind_auction;
pub mod connect_four;
pub mod dont_say_it;
pub mod guess_the_number;
pub mod hangman;
pub mod kuhn_poker;
pub mod liars_dice;
pub mod mastermind;
pub mod minesweeper;
pub mod nim;
pub mod pig_dice;
pub mod prisoners_dilemma;
pub mod simple_negotiation;
pub mod snake;
pub mod tictactoe;
pub mod tower_of_hanoi;
pub mod wordle;

use crate::registry::GameSpec;

/// Every bundled game with its default configuration.
pub fn all_specs() -> Vec<GameSpec> {
    vec![
        guess_the_number::spec(),
        hangman::spec(),
        mastermind::spec(),
        wordle::spec(),
        minesweeper::spec(),
        tower_of_hanoi::spec(),
        tictactoe::spec(),
        connect_four::spec(),
        nim::spec(),
        pig_dice::spec(),
        kuhn_poker::spec(),
        dont_say_it::spec(),
        simple_negotiation::spec(),
        prisoners_dilemma::spec(),
        liars_dice::spec(),
        snake::spec(),
        blind_auction::spec(),
    ]
}
