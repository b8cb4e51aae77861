//! The five-call environment lifecycle: make, reset, get_observation, step, close.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::action::parse_bracketed_action;
use crate::game::{ActionGrammar, Game, GameError, LegalActions};
use crate::message::{Message, Observation, Visibility};
use crate::outcome::{demote_to_last, outcome_rewards, Rewards, TerminalInfo, TerminalKind};
use crate::registry::{registry, GameSpec, Registry};
use crate::seed::SeedStreams;
use crate::wrappers::{LlmObservationWrapper, ObservationWrapper, WrapContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("unknown environment {0}")]
    UnknownEnvId(String),
    #[error("no environment ids given")]
    EmptyEnvList,
    #[error("player count {got} outside {min}..={max}")]
    PlayerCountOutOfRange { min: usize, max: usize, got: usize },
    #[error("environment has not been reset")]
    NotReset,
    #[error("game is over")]
    Terminal,
    #[error("game is not over yet")]
    NotTerminal,
    #[error("wrappers must be applied before reset")]
    AlreadyReset,
    #[error("seat {0} is not at the table")]
    NoSuchSeat(usize),
}

/// Result of one `step`. `info` carries `reason` and `detail` only once done.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepResult {
    pub done: bool,
    pub info: BTreeMap<String, String>,
}

impl StepResult {
    pub fn reason(&self) -> Option<&str> {
        self.info.get("reason").map(String::as_str)
    }
}

#[derive(Debug)]
struct Running {
    game: Box<dyn Game>,
    log: Vec<Message>,
    forced: Option<TerminalInfo>,
    steps: usize,
    players: usize,
}

impl Running {
    fn terminal(&self) -> Option<&TerminalInfo> {
        self.forced.as_ref().or_else(|| self.game.terminal())
    }
}

/// A single-owner environment instance.
#[derive(Debug)]
pub struct Env {
    env_id: String,
    seed: u64,
    spec: Arc<GameSpec>,
    wrappers: Vec<Box<dyn ObservationWrapper>>,
    run: Option<Running>,
}

impl Env {
    /// Picks one id uniformly at random (by `seed`) and builds the bundled game.
    pub fn make(env_ids: &[&str], seed: u64) -> Result<Self, EnvError> {
        Self::make_in(registry(), env_ids, seed)
    }

    pub fn make_in(registry: &Registry, env_ids: &[&str], seed: u64) -> Result<Self, EnvError> {
        if env_ids.is_empty() {
            return Err(EnvError::EmptyEnvList);
        }
        for id in env_ids {
            if registry.get(id).is_none() {
                return Err(EnvError::UnknownEnvId((*id).to_owned()));
            }
        }
        let pick = if env_ids.len() == 1 {
            0
        } else {
            SeedStreams::new(seed)
                .stream("make")
                .random_range(0..env_ids.len())
        };
        let env_id = env_ids[pick];
        let spec = registry.get(env_id).expect("checked above").clone();
        Ok(Self {
            env_id: env_id.to_owned(),
            seed,
            spec,
            wrappers: Vec::new(),
            run: None,
        })
    }

    pub fn env_id(&self) -> &str {
        &self.env_id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn wrap<W: ObservationWrapper + 'static>(mut self, wrapper: W) -> Result<Self, EnvError> {
        if self.run.is_some() {
            return Err(EnvError::AlreadyReset);
        }
        self.wrappers.push(Box::new(wrapper));
        Ok(self)
    }

    pub fn wrap_llm_observation(self) -> Result<Self, EnvError> {
        self.wrap(LlmObservationWrapper)
    }

    pub fn wrapper_names(&self) -> Vec<&'static str> {
        self.wrappers.iter().map(|w| w.name()).collect()
    }

    /// Builds the game state and emits one private rules message per seat,
    /// followed by the game's setup messages.
    pub fn reset(&mut self, num_players: usize) -> Result<(), EnvError> {
        let rules = &self.spec.rules;
        let (game, setup) = self.spec.create(num_players, self.seed).map_err(|e| match e {
            GameError::PlayerCountOutOfRange { min, max, got, .. } => {
                EnvError::PlayerCountOutOfRange { min, max, got }
            }
            _ => unreachable!("create only fails on player count"),
        })?;
        let mut log = Vec::with_capacity(setup.len() + num_players);
        for seat in 0..num_players {
            log.push(Message::private(
                seat,
                format!(
                    "You are Player {seat} in {} ({num_players} player{}).\n{}",
                    rules.env_id,
                    if num_players == 1 { "" } else { "s" },
                    rules.rules_text()
                ),
            ));
        }
        log.extend(setup);
        self.run = Some(Running {
            game,
            log,
            forced: None,
            steps: 0,
            players: num_players,
        });
        Ok(())
    }

    fn running(&self) -> Result<&Running, EnvError> {
        self.run.as_ref().ok_or(EnvError::NotReset)
    }

    fn live(&mut self) -> Result<&mut Running, EnvError> {
        let run = self.run.as_mut().ok_or(EnvError::NotReset)?;
        if run.terminal().is_some() {
            return Err(EnvError::Terminal);
        }
        Ok(run)
    }

    pub fn num_players(&self) -> Result<usize, EnvError> {
        Ok(self.running()?.players)
    }

    pub fn is_done(&self) -> bool {
        self.run.as_ref().is_some_and(|r| r.terminal().is_some())
    }

    pub fn terminal_info(&self) -> Option<&TerminalInfo> {
        self.run.as_ref().and_then(Running::terminal)
    }

    pub fn log(&self) -> &[Message] {
        self.run.as_ref().map(|r| r.log.as_slice()).unwrap_or(&[])
    }

    pub fn game(&self) -> Result<&dyn Game, EnvError> {
        Ok(self.running()?.game.as_ref())
    }

    pub fn steps(&self) -> usize {
        self.run.as_ref().map_or(0, |r| r.steps)
    }

    /// The acting seat and its observation, rendered through the wrapper stack.
    pub fn get_observation(&self) -> Result<(usize, Observation), EnvError> {
        let run = self.running()?;
        if run.terminal().is_some() {
            return Err(EnvError::Terminal);
        }
        let viewer = run.game.to_move();
        Ok((viewer, self.observe(run, viewer)))
    }

    /// Observation for an arbitrary seat, e.g. for final summaries.
    pub fn observation_for(&self, viewer: usize) -> Result<Observation, EnvError> {
        let run = self.running()?;
        if viewer >= run.players {
            return Err(EnvError::NoSuchSeat(viewer));
        }
        Ok(self.observe(run, viewer))
    }

    fn observe(&self, run: &Running, viewer: usize) -> Observation {
        let ctx = WrapContext {
            env_id: &self.env_id,
            game: run.game.as_ref(),
        };
        self.wrappers
            .iter()
            .fold(Observation::new(viewer, &run.log), |obs, w| w.transform(obs, &ctx))
    }

    pub fn legal_actions(&self) -> Result<LegalActions, EnvError> {
        let run = self.running()?;
        if run.terminal().is_some() {
            return Err(EnvError::Terminal);
        }
        run.game.legal_actions().map_err(|_| EnvError::Terminal)
    }

    pub fn render(&self, viewer: usize) -> Result<String, EnvError> {
        let run = self.running()?;
        if viewer >= run.players {
            return Err(EnvError::NoSuchSeat(viewer));
        }
        Ok(run.game.render(viewer))
    }

    /// Applies raw agent output for the acting seat.
    ///
    /// Unparsable or illegal actions end the game with the actor penalized;
    /// they are reported through `info`, not as errors.
    pub fn step(&mut self, action: &str) -> Result<StepResult, EnvError> {
        let run = self.live()?;
        let player = run.game.to_move();
        let utterance = action.trim();
        if !utterance.is_empty() {
            let visibility = run.game.action_visibility(player);
            run.log
                .push(Message::from_player(player, utterance, visibility));
        }
        let token = match run.game.grammar() {
            ActionGrammar::Bracketed => parse_bracketed_action(action).map_err(|e| e.to_string()),
            ActionGrammar::FreeText if utterance.is_empty() => Err("empty utterance".to_owned()),
            ActionGrammar::FreeText => Ok(utterance.to_owned()),
        };
        match token {
            Ok(token) => self.apply_token(player, &token),
            Err(reason) => self.invalidate(player, &reason),
        }
    }

    /// Applies an already-extracted token, bypassing bracket parsing. Used for
    /// replaying recorded trajectories.
    pub fn step_token(&mut self, token: &str) -> Result<StepResult, EnvError> {
        let run = self.live()?;
        let player = run.game.to_move();
        let shown = match run.game.grammar() {
            ActionGrammar::Bracketed => format!("[{token}]"),
            ActionGrammar::FreeText => token.to_owned(),
        };
        if !token.trim().is_empty() {
            let visibility = run.game.action_visibility(player);
            run.log.push(Message::from_player(player, shown, visibility));
        }
        self.apply_token(player, token)
    }

    /// Ends the game with `player` forfeiting, as for an invalid move.
    pub fn forfeit(&mut self, player: usize, reason: &str) -> Result<StepResult, EnvError> {
        let players = self.live()?.players;
        if player >= players {
            return Err(EnvError::NoSuchSeat(player));
        }
        self.invalidate(player, reason)
    }

    fn apply_token(&mut self, player: usize, token: &str) -> Result<StepResult, EnvError> {
        let turn_limit = self.spec.rules.turn_limit;
        let run = self.live()?;
        match run.game.apply(player, token) {
            Ok(messages) => {
                run.log.extend(messages);
                run.steps += 1;
                if run.game.terminal().is_none() && run.steps >= turn_limit {
                    let info = TerminalInfo::new(
                        TerminalKind::TurnLimit,
                        run.game.standing(),
                        format!("turn limit of {turn_limit} steps reached"),
                    );
                    run.log.push(Message::broadcast(format!("Game over: {}.", info.detail)));
                    run.forced = Some(info);
                }
                Ok(Self::result_for(run))
            }
            Err(GameError::IllegalAction { reason, .. }) => self.invalidate(player, &reason),
            Err(other) => self.invalidate(player, &other.to_string()),
        }
    }

    fn invalidate(&mut self, player: usize, reason: &str) -> Result<StepResult, EnvError> {
        let run = self.live()?;
        let ranking = if run.players == 1 {
            vec![vec![0]]
        } else {
            demote_to_last(&run.game.standing(), player)
        };
        let detail = format!("Player {player} made an invalid move: {reason}");
        run.log.push(Message {
            sender: crate::message::Sender::Game,
            content: format!("{detail}. Game over."),
            visibility: Visibility::Broadcast,
        });
        run.forced = Some(TerminalInfo::new(TerminalKind::InvalidMove, ranking, detail));
        Ok(Self::result_for(run))
    }

    fn result_for(run: &Running) -> StepResult {
        match run.terminal() {
            None => StepResult::default(),
            Some(info) => StepResult {
                done: true,
                info: BTreeMap::from([
                    ("reason".to_owned(), info.kind.as_str().to_owned()),
                    ("detail".to_owned(), info.detail.clone()),
                ]),
            },
        }
    }

    pub fn close(&self) -> Result<Rewards, EnvError> {
        let run = self.running()?;
        let info = run.terminal().ok_or(EnvError::NotTerminal)?;
        Ok(outcome_rewards(info, run.players))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ttt() -> Env {
        let mut env = Env::make(&["TicTacToe-v0"], 7).unwrap();
        env.reset(2).unwrap();
        env
    }

    #[test]
    fn make_errors() {
        assert_eq!(
            Env::make(&["NoSuchGame-v0"], 0).unwrap_err(),
            EnvError::UnknownEnvId("NoSuchGame-v0".into())
        );
        assert_eq!(Env::make(&[], 0).unwrap_err(), EnvError::EmptyEnvList);
        assert_eq!(Env::make(&["TicTacToe-v0"], 7).unwrap().env_id(), "TicTacToe-v0");
    }

    #[test]
    fn lifecycle_errors() {
        let mut env = Env::make(&["TicTacToe-v0"], 0).unwrap();
        assert_eq!(env.get_observation().unwrap_err(), EnvError::NotReset);
        assert_eq!(env.step("[4]").unwrap_err(), EnvError::NotReset);
        assert_eq!(
            env.reset(3).unwrap_err(),
            EnvError::PlayerCountOutOfRange { min: 2, max: 2, got: 3 }
        );
        env.reset(2).unwrap();
        assert_eq!(env.close().unwrap_err(), EnvError::NotTerminal);
        let env = env.wrap_llm_observation();
        assert_eq!(env.unwrap_err(), EnvError::AlreadyReset);
    }

    #[test]
    fn first_observation_has_rules() {
        let env = ttt();
        let (player, obs) = env.get_observation().unwrap();
        assert_eq!(player, 0);
        assert!(obs.messages[0].content.contains("TicTacToe-v0"));
        assert_eq!(env.get_observation().unwrap(), (player, obs));
    }

    #[test]
    fn legal_opening_and_invalid_format() {
        let mut env = ttt();
        let r = env.step("[4]").unwrap();
        assert!(!r.done);
        assert!(r.info.is_empty());

        let mut env = ttt();
        let r = env.step("hello!").unwrap();
        assert!(r.done);
        assert_eq!(r.reason(), Some("invalid_move"));
        let rewards = env.close().unwrap();
        assert_eq!(rewards.get(0), Some(-1.0));
        assert_eq!(rewards.get(1), Some(1.0));
        assert_eq!(env.step("[1]").unwrap_err(), EnvError::Terminal);
        assert_eq!(env.close().unwrap(), rewards);
    }

    #[test]
    fn three_in_a_row() {
        let mut env = ttt();
        for mv in ["[0]", "[3]", "[1]", "[4]"] {
            assert!(!env.step(mv).unwrap().done);
        }
        let r = env.step("[2]").unwrap();
        assert!(r.done);
        assert_eq!(r.reason(), Some("win"));
        let rewards = env.close().unwrap();
        assert_eq!((rewards.get(0), rewards.get(1)), (Some(1.0), Some(-1.0)));
    }

    #[test]
    fn forfeit_penalizes_seat() {
        let mut env = ttt();
        env.step("[4]").unwrap();
        let r = env.forfeit(1, "turn clock expired").unwrap();
        assert_eq!(r.reason(), Some("invalid_move"));
        let rewards = env.close().unwrap();
        assert_eq!(rewards.get(1), Some(-1.0));
        assert_eq!(rewards.get(0), Some(1.0));
    }

    #[test]
    fn llm_wrapper_renders_labels_in_order() {
        let mut env = Env::make(&["TicTacToe-v0"], 1)
            .unwrap()
            .wrap_llm_observation()
            .unwrap();
        env.reset(2).unwrap();
        env.step("[4]").unwrap();
        let (viewer, obs) = env.get_observation().unwrap();
        assert_eq!(viewer, 1);
        let text = obs.text();
        let game_at = text.find("[GAME]").unwrap();
        let p0_at = text.find("[Player 0] [4]").unwrap();
        assert!(game_at < p0_at);

        let mut twice = Env::make(&["TicTacToe-v0"], 1)
            .unwrap()
            .wrap_llm_observation()
            .unwrap()
            .wrap_llm_observation()
            .unwrap();
        twice.reset(2).unwrap();
        twice.step("[4]").unwrap();
        assert_eq!(twice.get_observation().unwrap().1.text(), text);
    }
}
