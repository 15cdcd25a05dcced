//! Live session: NDJSON input messages in, frame / model / error messages
//! out. Inputs go through the same [`Driver`] as trace replay.
//!
//! Client messages are trace records (`seq` optional) plus
//! `{"type":"debug_picking","on":true}` and `{"type":"get_model"}`.

use serde::{Deserialize, Serialize};

use crate::harness::driver::Driver;
use crate::harness::trace::{Input, TraceRecord};
use crate::interactions::Interaction;
use crate::model::Model;
use crate::picking::PickError;
use crate::renderloop::DrawCmd;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Frame {
        seq: u64,
        state: String,
        display: Vec<DrawCmd>,
        #[serde(skip_serializing_if = "Option::is_none")]
        picking_debug: Option<Vec<DrawCmd>>,
    },
    Model {
        snapshot: Model,
    },
    Error {
        msg: String,
    },
}

impl ServerMessage {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("server message serializes");
        s.push('\n');
        s
    }
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Control {
    DebugPicking { on: bool },
    GetModel,
}

enum ClientMessage {
    Control(Control),
    Input(TraceRecord),
}

fn parse(line: &str) -> Result<ClientMessage, String> {
    let v: serde_json::Value = serde_json::from_str(line).map_err(|e| format!("bad json: {e}"))?;
    let ty = v.get("type").and_then(|t| t.as_str()).unwrap_or_default();
    let msg = if matches!(ty, "debug_picking" | "get_model") {
        serde_json::from_value(v).map(ClientMessage::Control)
    } else {
        serde_json::from_value(v).map(ClientMessage::Input)
    };
    msg.map_err(|e| format!("bad message: {e}"))
}

pub struct Session {
    driver: Driver,
    debug_picking: bool,
    last_sent: Option<Model>,
    last_in_seq: Option<u64>,
}

impl Session {
    pub fn new(interaction: Box<dyn Interaction>) -> Result<Self, PickError> {
        Ok(Session {
            driver: Driver::new(interaction)?,
            debug_picking: false,
            last_sent: None,
            last_in_seq: None,
        })
    }

    pub fn driver(&self) -> &Driver {
        &self.driver
    }

    pub fn model(&self) -> &Model {
        self.driver.interaction().model()
    }

    pub fn debug_picking(&self) -> bool {
        self.debug_picking
    }

    /// The current frame and model, for a client that just connected.
    pub fn hello(&mut self) -> Vec<ServerMessage> {
        let mut out = vec![self.frame()];
        out.extend(self.model_if_changed(true));
        out
    }

    pub fn handle_line(&mut self, line: &str) -> Vec<ServerMessage> {
        self.handle_batch(&[line])
    }

    /// Handles queued lines in order. Every input is dispatched; a frame
    /// is only emitted for the last move of a run of consecutive moves.
    pub fn handle_batch<S: AsRef<str>>(&mut self, lines: &[S]) -> Vec<ServerMessage> {
        let parsed: Vec<Option<Result<ClientMessage, String>>> = lines
            .iter()
            .map(|l| {
                let l = l.as_ref().trim();
                (!l.is_empty()).then(|| parse(l))
            })
            .collect();
        let is_move = |m: &Option<Result<ClientMessage, String>>| {
            matches!(m, Some(Ok(ClientMessage::Input(r))) if matches!(r.input, Input::Move { .. }))
        };

        let mut out = Vec::new();
        for (i, msg) in parsed.iter().enumerate() {
            let Some(msg) = msg else { continue };
            let coalesce = is_move(&parsed[i]) && parsed.get(i + 1).is_some_and(is_move);
            match msg {
                Err(e) => out.push(ServerMessage::Error { msg: e.clone() }),
                Ok(ClientMessage::Control(Control::DebugPicking { on })) => {
                    self.debug_picking = *on;
                    out.push(self.frame());
                }
                Ok(ClientMessage::Control(Control::GetModel)) => {
                    out.extend(self.model_if_changed(true));
                }
                Ok(ClientMessage::Input(rec)) => {
                    if let (Some(seq), Some(last)) = (rec.seq, self.last_in_seq) {
                        if seq <= last {
                            out.push(ServerMessage::Error {
                                msg: format!("seq {seq} does not increase (last {last})"),
                            });
                        }
                    }
                    if rec.seq.is_some() {
                        self.last_in_seq = rec.seq;
                    }
                    match self.driver.feed(&rec.input) {
                        Ok(step) => {
                            if let Some(msg) = step.error {
                                out.push(ServerMessage::Error { msg });
                            }
                        }
                        Err(e) => out.push(ServerMessage::Error { msg: e.to_string() }),
                    }
                    if !coalesce {
                        out.push(self.frame());
                        out.extend(self.model_if_changed(false));
                    }
                }
            }
        }
        out
    }

    fn frame(&self) -> ServerMessage {
        let f = self.driver.frame();
        ServerMessage::Frame {
            seq: f.seq,
            state: self.driver.state().to_string(),
            display: f.display.clone(),
            picking_debug: self.debug_picking.then(|| self.driver.picking_debug()),
        }
    }

    fn model_if_changed(&mut self, force: bool) -> Option<ServerMessage> {
        let m = self.model();
        if !force && self.last_sent.as_ref() == Some(m) {
            return None;
        }
        let snapshot = m.clone();
        self.last_sent = Some(snapshot.clone());
        Some(ServerMessage::Model { snapshot })
    }
}
