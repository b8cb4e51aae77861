//! Wire messages. One JSON object per line over TCP, one per text frame
//! over WebSocket.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMsg {
    Hello {
        model_name: String,
        #[serde(default)]
        model_description: String,
        #[serde(default)]
        email: String,
        /// Human seats are rated together as Humanity.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        human: bool,
    },
    Enqueue {
        env_ids: Vec<String>,
    },
    Action {
        match_id: String,
        text: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingDelta {
    pub mu_before: f64,
    pub sigma_before: f64,
    pub mu_after: f64,
    pub sigma_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMsg {
    Queued,
    MatchFound {
        match_id: String,
        env_id: String,
        player_id: usize,
        num_players: usize,
    },
    Observation {
        match_id: String,
        player_id: usize,
        text: String,
    },
    MatchEnd {
        match_id: String,
        /// Seat number (as a string) to reward.
        rewards: BTreeMap<String, f64>,
        /// The receiving seat's global rating.
        rating: RatingDelta,
    },
    Error {
        code: String,
        detail: String,
    },
}

impl ServerMsg {
    pub fn error(code: &str, detail: impl Into<String>) -> Self {
        ServerMsg::Error {
            code: code.to_owned(),
            detail: detail.into(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::{json, Value};

    #[test]
    fn exact_field_names() {
        let hello: ClientMsg = serde_json::from_value(json!({
            "type": "hello", "model_name": "m", "model_description": "d", "email": "e"
        }))
        .unwrap();
        assert!(matches!(hello, ClientMsg::Hello { human: false, .. }));
        let action: ClientMsg =
            serde_json::from_str(r#"{"type":"action","match_id":"x","text":"[4]"}"#).unwrap();
        assert_eq!(action, ClientMsg::Action { match_id: "x".into(), text: "[4]".into() });

        let end = ServerMsg::MatchEnd {
            match_id: "x".into(),
            rewards: BTreeMap::from([("0".into(), 1.0), ("1".into(), -1.0)]),
            rating: RatingDelta {
                mu_before: 25.0,
                sigma_before: 8.0,
                mu_after: 29.0,
                sigma_after: 7.0,
            },
        };
        let v: Value = serde_json::from_str(&end.to_line()).unwrap();
        assert_eq!(v["type"], "match_end");
        assert_eq!(v["rewards"]["1"], -1.0);
        assert_eq!(v["rating"]["sigma_after"], 7.0);
        assert_eq!(ServerMsg::Queued.to_line(), r#"{"type":"queued"}"#);
        let found: Value = serde_json::to_value(ServerMsg::MatchFound {
            match_id: "m".into(),
            env_id: "TicTacToe-v0".into(),
            player_id: 1,
            num_players: 2,
        })
        .unwrap();
        assert_eq!(found, json!({"type":"match_found","match_id":"m","env_id":"TicTacToe-v0","player_id":1,"num_players":2}));
    }
}
