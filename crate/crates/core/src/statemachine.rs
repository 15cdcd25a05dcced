//! Finite state machines for interaction dynamics.
//!
//! States hold ordered transitions. A transition fires when its event
//! pattern matches and its guard holds; its action runs first and the
//! state switch only commits if the action succeeds. Events that match
//! nothing are ignored.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::model::ModelError;
use crate::transforms::TransformError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Press,
    Release,
    Move,
    Enter,
    Leave,
    Wheel,
    Resize,
}

/// An input or crossing event, already annotated with the tag of the
/// picking object concerned (the topmost one under the pointer, or the
/// crossed one for Enter/Leave). An empty tag means background.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub p: Point,
    pub button: u8,
    pub tag: String,
    /// Wheel notches (positive = towards the user), or zero.
    pub delta: f64,
}

impl Event {
    pub fn new(kind: EventKind, p: Point, tag: impl Into<String>) -> Self {
        Event {
            kind,
            p,
            button: 1,
            tag: tag.into(),
            delta: 0.0,
        }
    }

    pub fn press(p: Point, tag: impl Into<String>) -> Self {
        Event::new(EventKind::Press, p, tag)
    }

    pub fn release(p: Point, tag: impl Into<String>) -> Self {
        Event::new(EventKind::Release, p, tag)
    }

    pub fn moved(p: Point, tag: impl Into<String>) -> Self {
        Event::new(EventKind::Move, p, tag)
    }

    pub fn enter(p: Point, tag: impl Into<String>) -> Self {
        Event::new(EventKind::Enter, p, tag)
    }

    pub fn leave(p: Point, tag: impl Into<String>) -> Self {
        Event::new(EventKind::Leave, p, tag)
    }

    pub fn with_button(mut self, button: u8) -> Self {
        self.button = button;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TagMatch {
    Any,
    Exact(String),
    Prefix(String),
    /// Only events over no picking object.
    Background,
}

impl TagMatch {
    fn matches(&self, tag: &str) -> bool {
        match self {
            TagMatch::Any => true,
            TagMatch::Exact(t) => t == tag,
            TagMatch::Prefix(p) => tag.starts_with(p.as_str()),
            TagMatch::Background => tag.is_empty(),
        }
    }
}

/// Which events a transition listens to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub kind: EventKind,
    pub tag: TagMatch,
    pub button: Option<u8>,
}

impl Pattern {
    pub fn on(kind: EventKind) -> Self {
        Pattern {
            kind,
            tag: TagMatch::Any,
            button: None,
        }
    }

    pub fn tagged(kind: EventKind, tag: &str) -> Self {
        Pattern {
            kind,
            tag: TagMatch::Exact(tag.to_string()),
            button: None,
        }
    }

    pub fn tag_prefix(kind: EventKind, prefix: &str) -> Self {
        Pattern {
            kind,
            tag: TagMatch::Prefix(prefix.to_string()),
            button: None,
        }
    }

    pub fn button(mut self, button: u8) -> Self {
        self.button = Some(button);
        self
    }

    pub fn matches(&self, e: &Event) -> bool {
        self.kind == e.kind
            && self.button.is_none_or(|b| b == e.button)
            && self.tag.matches(&e.tag)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        match &self.tag {
            TagMatch::Any => Ok(()),
            TagMatch::Exact(t) => write!(f, "({t})"),
            TagMatch::Prefix(p) => write!(f, "({p}*)"),
            TagMatch::Background => write!(f, "(background)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ActionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("machine has no states")]
    Empty,
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("transition `{transition}` in `{state}` targets unknown state `{target}`")]
    UnknownTarget {
        state: String,
        transition: String,
        target: String,
    },
}

type Guard<S> = Box<dyn Fn(&S, &Event) -> bool + Send + Sync>;
type Action<S> = Box<dyn Fn(&mut S, &Event) -> Result<(), ActionError> + Send + Sync>;

pub struct Transition<S> {
    name: String,
    pattern: Pattern,
    guard: Option<Guard<S>>,
    action: Option<Action<S>>,
    target: String,
}

impl<S> Transition<S> {
    pub fn new(name: impl Into<String>, pattern: Pattern, target: impl Into<String>) -> Self {
        Transition {
            name: name.into(),
            pattern,
            guard: None,
            action: None,
            target: target.into(),
        }
    }

    pub fn guard(mut self, g: impl Fn(&S, &Event) -> bool + Send + Sync + 'static) -> Self {
        self.guard = Some(Box::new(g));
        self
    }

    pub fn action(
        mut self,
        a: impl Fn(&mut S, &Event) -> Result<(), ActionError> + Send + Sync + 'static,
    ) -> Self {
        self.action = Some(Box::new(a));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn target(&self) -> &str {
        &self.target
    }
}

struct StateDef<S> {
    name: String,
    transitions: Vec<(Transition<S>, usize)>,
}

/// Record of a fired transition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fired {
    pub transition: String,
    pub from: String,
    pub to: String,
}

pub struct Machine<S> {
    states: Vec<StateDef<S>>,
    initial: usize,
    current: usize,
}

impl<S> fmt::Debug for Machine<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Machine")
            .field("states", &self.state_names())
            .field("current", &self.current())
            .finish()
    }
}

impl<S> Machine<S> {
    pub fn builder() -> MachineBuilder<S> {
        MachineBuilder { states: Vec::new() }
    }

    pub fn current(&self) -> &str {
        &self.states[self.current].name
    }

    pub fn state_names(&self) -> Vec<&str> {
        self.states.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.states.iter().any(|s| s.name == name)
    }

    /// Back to the initial state; the context is left alone.
    pub fn reset(&mut self) {
        self.current = self.initial;
    }

    /// Transitions declared on `state`, in order.
    pub fn transitions(&self, state: &str) -> Vec<&Transition<S>> {
        self.states
            .iter()
            .find(|s| s.name == state)
            .map(|s| s.transitions.iter().map(|(t, _)| t).collect())
            .unwrap_or_default()
    }

    /// Fires the first transition of the current state whose pattern
    /// matches and whose guard holds. Returns `Ok(None)` when nothing
    /// matches. If the action fails the current state is kept.
    pub fn dispatch(&mut self, ctx: &mut S, e: &Event) -> Result<Option<Fired>, ActionError> {
        let state = &self.states[self.current];
        let Some((t, target)) = state.transitions.iter().find(|(t, _)| {
            t.pattern.matches(e) && t.guard.as_ref().is_none_or(|g| g(ctx, e))
        }) else {
            return Ok(None);
        };
        if let Some(action) = &t.action {
            action(ctx, e)?;
        }
        let fired = Fired {
            transition: t.name.clone(),
            from: state.name.clone(),
            to: self.states[*target].name.clone(),
        };
        self.current = *target;
        Ok(Some(fired))
    }
}

pub struct MachineBuilder<S> {
    states: Vec<(String, Vec<Transition<S>>)>,
}

impl<S> MachineBuilder<S> {
    /// Declares a state. The first declared state is the initial one.
    pub fn state(mut self, name: &str, transitions: Vec<Transition<S>>) -> Self {
        self.states.push((name.to_string(), transitions));
        self
    }

    pub fn build(self) -> Result<Machine<S>, MachineError> {
        if self.states.is_empty() {
            return Err(MachineError::Empty);
        }
        let mut index = HashMap::new();
        for (i, (name, _)) in self.states.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(MachineError::DuplicateState(name.clone()));
            }
        }
        let mut states = Vec::with_capacity(self.states.len());
        for (name, transitions) in self.states {
            let mut resolved = Vec::with_capacity(transitions.len());
            for t in transitions {
                let Some(&target) = index.get(&t.target) else {
                    return Err(MachineError::UnknownTarget {
                        state: name,
                        transition: t.name,
                        target: t.target,
                    });
                };
                resolved.push((t, target));
            }
            states.push(StateDef {
                name,
                transitions: resolved,
            });
        }
        Ok(Machine {
            states,
            initial: 0,
            current: 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Default)]
    struct Log {
        entries: Vec<String>,
        allow: bool,
    }

    fn toy() -> Machine<Log> {
        Machine::builder()
            .state(
                "start",
                vec![Transition::new(
                    "press",
                    Pattern::tag_prefix(EventKind::Press, "obj").button(1),
                    "waitHyst",
                )
                .action(|l: &mut Log, _| {
                    l.entries.push("press".into());
                    Ok(())
                })],
            )
            .state(
                "waitHyst",
                vec![
                    Transition::new("guarded", Pattern::on(EventKind::Move), "start")
                        .guard(|l: &Log, _| l.allow),
                    Transition::new("drag", Pattern::tagged(EventKind::Leave, "hyst"), "dragging"),
                    Transition::new("fail", Pattern::on(EventKind::Release), "start")
                        .action(|_, _| Err(ActionError::Other("boom".into()))),
                ],
            )
            .state("dragging", vec![])
            .build()
            .unwrap()
    }

    #[test]
    fn press_then_leave() {
        let mut m = toy();
        let mut log = Log::default();
        let p = Point::new(100.0, 100.0);
        let fired = m.dispatch(&mut log, &Event::press(p, "obj")).unwrap().unwrap();
        assert_eq!(fired.to, "waitHyst");
        assert_eq!(m.current(), "waitHyst");

        // a move inside the circle matches nothing
        assert_eq!(m.dispatch(&mut log, &Event::moved(p, "hyst")).unwrap(), None);
        assert_eq!(m.current(), "waitHyst");

        m.dispatch(&mut log, &Event::leave(p, "hyst")).unwrap();
        assert_eq!(m.current(), "dragging");
        assert_eq!(log.entries, vec!["press"]);
    }

    #[test]
    fn pattern_filters_tag_and_button() {
        let mut m = toy();
        let mut log = Log::default();
        let p = Point::ORIGIN;
        assert_eq!(m.dispatch(&mut log, &Event::press(p, "")).unwrap(), None);
        assert_eq!(
            m.dispatch(&mut log, &Event::press(p, "obj-1").with_button(3)).unwrap(),
            None
        );
        assert_eq!(m.current(), "start");
        assert!(log.entries.is_empty());
    }

    #[test]
    fn guard_blocks_and_allows() {
        let mut m = toy();
        let mut log = Log::default();
        m.dispatch(&mut log, &Event::press(Point::ORIGIN, "obj")).unwrap();
        assert_eq!(m.dispatch(&mut log, &Event::moved(Point::ORIGIN, "")).unwrap(), None);
        log.allow = true;
        assert!(m.dispatch(&mut log, &Event::moved(Point::ORIGIN, "")).unwrap().is_some());
        assert_eq!(m.current(), "start");
    }

    #[test]
    fn failing_action_keeps_state() {
        let mut m = toy();
        let mut log = Log::default();
        m.dispatch(&mut log, &Event::press(Point::ORIGIN, "obj")).unwrap();
        assert!(m.dispatch(&mut log, &Event::release(Point::ORIGIN, "")).is_err());
        assert_eq!(m.current(), "waitHyst");
    }

    #[test]
    fn build_errors() {
        assert_eq!(Machine::<()>::builder().build().unwrap_err(), MachineError::Empty);
        let dup = Machine::<()>::builder().state("a", vec![]).state("a", vec![]).build();
        assert_eq!(dup.unwrap_err(), MachineError::DuplicateState("a".into()));
        let bad = Machine::<()>::builder()
            .state("a", vec![Transition::new("t", Pattern::on(EventKind::Move), "nowhere")])
            .build();
        assert!(matches!(bad.unwrap_err(), MachineError::UnknownTarget { .. }));
    }

    #[test]
    fn first_match_in_declaration_order() {
        let mut m: Machine<Vec<&'static str>> = Machine::builder()
            .state(
                "s",
                vec![
                    Transition::new("one", Pattern::on(EventKind::Move), "a").action(|v: &mut Vec<&str>, _| {
                        v.push("one");
                        Ok(())
                    }),
                    Transition::new("two", Pattern::on(EventKind::Move), "b").action(|v: &mut Vec<&str>, _| {
                        v.push("two");
                        Ok(())
                    }),
                ],
            )
            .state("a", vec![])
            .state("b", vec![])
            .build()
            .unwrap();
        let mut v = Vec::new();
        m.dispatch(&mut v, &Event::moved(Point::ORIGIN, "")).unwrap();
        assert_eq!(v, vec!["one"]);
        assert_eq!(m.current(), "a");
        m.reset();
        assert_eq!(m.current(), "s");
    }
}
