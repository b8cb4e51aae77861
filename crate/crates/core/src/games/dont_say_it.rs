use rand::seq::IndexedRandom;

use crate::game::{ensure_turn, ActionGrammar, Game, GameError, GameRules, LegalActions};
use crate::message::Message;
use crate::outcome::{Ranking, TerminalInfo};
use crate::registry::GameSpec;
use crate::seed::SeedStreams;
use crate::words;

pub const ENV_ID: &str = "DontSayIt-v0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DontSayItConfig {
    pub max_turns: usize,
}

impl Default for DontSayItConfig {
    fn default() -> Self {
        Self { max_turns: 20 }
    }
}

pub fn rules() -> GameRules {
    GameRules {
        env_id: ENV_ID,
        min_players: 2,
        max_players: 2,
        turn_limit: DontSayItConfig::default().max_turns,
        draws_possible: true,
        description: "Each player receives a private secret word. Players take turns talking freely. If your \
                      opponent says your secret word (as a whole word, ignoring case and punctuation) you \
                      win. After 20 turns without that happening the game is a draw.",
        action_format: "free text; everything you write is said aloud",
    }
}

pub fn spec() -> GameSpec {
    spec_with(DontSayItConfig::default())
}

pub fn spec_with(config: DontSayItConfig) -> GameSpec {
    let mut rules = rules();
    rules.turn_limit = config.max_turns;
    GameSpec::new(rules, move |players, seeds| {
        let (g, m) = DontSayIt::with_config(config, players, seeds);
        (Box::new(g), m)
    })
}

/// Whole-word, case-insensitive, punctuation-stripped containment.
pub fn utters(text: &str, word: &str) -> bool {
    let word = word.to_lowercase();
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .any(|w| w.to_lowercase() == word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DontSayIt {
    config: DontSayItConfig,
    secrets: [String; 2],
    turns: usize,
    to_move: usize,
    terminal: Option<TerminalInfo>,
}

impl DontSayIt {
    pub fn new(players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        Self::with_config(DontSayItConfig::default(), players, seeds)
    }

    pub fn with_config(config: DontSayItConfig, _players: usize, seeds: &SeedStreams) -> (Self, Vec<Message>) {
        let mut rng = seeds.stream("secret");
        let picked: Vec<&&str> = words::general().choose_multiple(&mut rng, 2).collect();
        let game = Self::with_secrets(config, [picked[0].to_string(), picked[1].to_string()]);
        let msgs = (0..2)
            .map(|p| {
                Message::private(
                    p,
                    format!(
                        "Your secret word is \"{}\". Get your opponent to say it without saying theirs.",
                        game.secrets[p]
                    ),
                )
            })
            .collect();
        (game, msgs)
    }

    pub fn with_secrets(config: DontSayItConfig, secrets: [String; 2]) -> Self {
        Self {
            config,
            secrets,
            turns: 0,
            to_move: 0,
            terminal: None,
        }
    }

    pub fn secret(&self, player: usize) -> &str {
        &self.secrets[player]
    }
}

impl Game for DontSayIt {
    fn num_players(&self) -> usize {
        2
    }

    fn to_move(&self) -> usize {
        self.to_move
    }

    fn grammar(&self) -> ActionGrammar {
        ActionGrammar::FreeText
    }

    fn legal_actions(&self) -> Result<LegalActions, GameError> {
        if self.terminal.is_some() {
            return Err(GameError::Terminal);
        }
        Ok(LegalActions::Open {
            samples: words::general().iter().map(|w| w.to_string()).collect(),
        })
    }

    fn validate(&self, player: usize, token: &str) -> Result<(), GameError> {
        ensure_turn(self, player)?;
        if token.trim().is_empty() {
            return Err(GameError::illegal(token, "say something"));
        }
        Ok(())
    }

    fn apply(&mut self, player: usize, token: &str) -> Result<Vec<Message>, GameError> {
        self.validate(player, token)?;
        self.turns += 1;
        let opponent = 1 - player;
        let mut msgs = Vec::new();
        if utters(token, &self.secrets[opponent]) {
            self.terminal = Some(TerminalInfo::win(
                opponent,
                format!("Player {player} said \"{}\"", self.secrets[opponent]),
            ));
            msgs.push(Message::broadcast(format!(
                "Player {player} said Player {opponent}'s secret word \"{}\". Player {opponent} wins.",
                self.secrets[opponent]
            )));
        } else if self.turns >= self.config.max_turns {
            self.terminal = Some(TerminalInfo::draw(2, "turn limit reached without a slip"));
            msgs.push(Message::broadcast(format!(
                "{} turns passed without a slip: draw. The words were \"{}\" and \"{}\".",
                self.turns, self.secrets[0], self.secrets[1]
            )));
        } else {
            self.to_move = opponent;
        }
        Ok(msgs)
    }

    fn render(&self, viewer: usize) -> String {
        format!(
            "Your secret word: {}\nOpponent's word: ?\nTurn {}/{}",
            self.secrets[viewer], self.turns, self.config.max_turns
        )
    }

    fn terminal(&self) -> Option<&TerminalInfo> {
        self.terminal.as_ref()
    }

    fn standing(&self) -> Ranking {
        vec![vec![0, 1]]
    }
}
