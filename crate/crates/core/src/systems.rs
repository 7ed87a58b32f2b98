//! System frame bases `(S, F)`, selectors `G`, agent strategies, and the
//! evolutions they generate.
//!
//! Text format:
//!
//! ```text
//! sig P/1                      # optional
//! agents a b;
//! actions L R;
//! state s0 = model { domain 0; P = 0 };
//! state s1 = model { domain 0 };
//! F(s0, *, *) = {s0, s1};      # `*` matches any action
//! F(s0, L, R) = {s1};          # later lines override earlier ones
//! F(s1, *, *) = {s0};
//! strategy a: s0 -> L, s1 -> R;
//! strategy b: s0 -> R, s1 -> R;
//! G(s0 L,R) = s1;              # a proper evolution, steps separated by `|`
//! G default;                   # otherwise the first state of F's output
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::formula::parse::parse_sig_header;
use crate::formula::Signature;
use crate::lex::{Cursor, SyntaxError, Tok};
use crate::model::{parse_model_block, ModelError, Structure};
use crate::symbol::Symbol;

pub type StateId = usize;
pub type ActionId = usize;
/// One action per agent, in agent order.
pub type ActionTuple = Vec<ActionId>;
pub type Step = (StateId, ActionTuple);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("F is undefined at state {state} under actions {actions}")]
    NotTotal { state: String, actions: String },
    #[error("F({state}, {actions}) is empty")]
    EmptyTransition { state: String, actions: String },
    #[error("strategy of agent `{agent}` is undefined at state {state}")]
    StrategyMissing { agent: String, state: String },
    #[error("step {step}: G chose {chosen}, which is not in F({state}, {actions})")]
    SelectorViolation {
        step: usize,
        chosen: String,
        state: String,
        actions: String,
    },
    #[error("step {step}: G has no value on the evolution so far")]
    SelectorUndefined { step: usize },
    #[error("perception of agent `{agent}` is undefined at state {state}")]
    Partial { agent: String, state: String },
}

/// `(S, F)` over declared agents and actions.
#[derive(Debug, Clone)]
pub struct SystemFrameBase {
    agents: Vec<Symbol>,
    actions: Vec<Symbol>,
    states: Vec<(Symbol, Structure)>,
    transitions: BTreeMap<Step, BTreeSet<StateId>>,
}

impl SystemFrameBase {
    /// Checks that `transitions` is total and never empty.
    pub fn new(
        agents: Vec<Symbol>,
        actions: Vec<Symbol>,
        states: Vec<(Symbol, Structure)>,
        transitions: BTreeMap<Step, BTreeSet<StateId>>,
    ) -> Result<Self, SystemError> {
        let base = SystemFrameBase {
            agents,
            actions,
            states,
            transitions,
        };
        for s in 0..base.states.len() {
            for a in base.action_tuples() {
                match base.transitions.get(&(s, a.clone())) {
                    None => {
                        return Err(SystemError::NotTotal {
                            state: base.state_name(s).to_string(),
                            actions: base.fmt_actions(&a),
                        })
                    }
                    Some(t) if t.is_empty() => {
                        return Err(SystemError::EmptyTransition {
                            state: base.state_name(s).to_string(),
                            actions: base.fmt_actions(&a),
                        })
                    }
                    Some(t) if t.iter().any(|&u| u >= base.states.len()) => {
                        return Err(SystemError::Unknown {
                            kind: "state",
                            name: format!("{t:?}"),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(base)
    }

    pub fn agents(&self) -> &[Symbol] {
        &self.agents
    }

    pub fn actions(&self) -> &[Symbol] {
        &self.actions
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        self.states[s].0.as_str()
    }

    pub fn structure(&self, s: StateId) -> &Structure {
        &self.states[s].1
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|(n, _)| n.as_str() == name)
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.as_str() == name)
    }

    /// Every action tuple, in lexicographic order.
    pub fn action_tuples(&self) -> Vec<ActionTuple> {
        let mut out = vec![Vec::new()];
        for _ in &self.agents {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..self.actions.len()).map(move |a| {
                        let mut t = t.clone();
                        t.push(a);
                        t
                    })
                })
                .collect();
        }
        out
    }

    /// `F(s, a)`.
    pub fn successors(&self, s: StateId, a: &[ActionId]) -> &BTreeSet<StateId> {
        &self.transitions[&(s, a.to_vec())]
    }

    pub fn fmt_actions(&self, a: &[ActionId]) -> String {
        let names: Vec<&str> = a.iter().map(|&i| self.actions[i].as_str()).collect();
        names.join(",")
    }

    /// All proper evolutions with at most `k + 1` steps.
    pub fn proper_evolutions(&self, k: usize) -> Vec<Evolution> {
        let tuples = self.action_tuples();
        let roots: Vec<Step> = (0..self.states.len())
            .flat_map(|s| tuples.iter().map(move |a| (s, a.clone())))
            .collect();
        let tuples = &tuples;
        roots
            .into_par_iter()
            .flat_map_iter(|root| {
                let mut out = Vec::new();
                let mut frontier = vec![vec![root]];
                for depth in 0..=k {
                    out.extend(frontier.iter().map(|steps| Evolution {
                        steps: steps.clone(),
                        last: None,
                    }));
                    if depth == k {
                        break;
                    }
                    frontier = frontier
                        .iter()
                        .flat_map(|steps| {
                            let (s, a) = steps.last().expect("non-empty");
                            self.successors(*s, a).iter().flat_map(move |&t| {
                                tuples.iter().map(move |b| {
                                    let mut next = steps.clone();
                                    next.push((t, b.clone()));
                                    next
                                })
                            })
                        })
                        .collect();
                }
                out
            })
            .collect()
    }
}

/// A finite sequence of `(state, action tuple)` steps, optionally followed by
/// a final state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Evolution {
    pub steps: Vec<Step>,
    pub last: Option<StateId>,
}

impl Evolution {
    /// The visited states, final state included.
    pub fn states(&self) -> Vec<StateId> {
        self.steps
            .iter()
            .map(|(s, _)| *s)
            .chain(self.last)
            .collect()
    }

    /// Index of the first step `i` whose successor is not in
    /// `F(state_i, actions_i)`.
    pub fn first_violation(&self, base: &SystemFrameBase) -> Option<usize> {
        let states = self.states();
        self.steps
            .iter()
            .enumerate()
            .find(|(i, (s, a))| {
                states
                    .get(i + 1)
                    .is_some_and(|next| !base.successors(*s, a).contains(next))
            })
            .map(|(i, _)| i)
    }

    pub fn is_valid(&self, base: &SystemFrameBase) -> bool {
        self.first_violation(base).is_none()
    }

    pub fn display<'a>(&'a self, base: &'a SystemFrameBase) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Evolution, &'a SystemFrameBase);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let parts: Vec<String> = self
                    .0
                    .steps
                    .iter()
                    .map(|(s, a)| format!("{} {}", self.1.state_name(*s), self.1.fmt_actions(a)))
                    .chain(self.0.last.map(|s| self.1.state_name(s).to_string()))
                    .collect();
                f.write_str(&parts.join(" | "))
            }
        }
        D(self, base)
    }
}

/// `G`: picks the next state from a proper evolution.
pub trait Selector: Send + Sync {
    fn select(&self, base: &SystemFrameBase, history: &[Step]) -> Option<StateId>;
}

/// The first state of `F(state_k, actions_k)` in declaration order.
pub fn default_choice(base: &SystemFrameBase, history: &[Step]) -> Option<StateId> {
    let (s, a) = history.last()?;
    base.successors(*s, a).iter().next().copied()
}

/// A finite table of evolutions, with [`default_choice`] as an optional
/// fallback.
#[derive(Debug, Clone, Default)]
pub struct TableSelector {
    pub table: BTreeMap<Vec<Step>, StateId>,
    pub fallback: bool,
}

impl Selector for TableSelector {
    fn select(&self, base: &SystemFrameBase, history: &[Step]) -> Option<StateId> {
        match self.table.get(history) {
            Some(&s) => Some(s),
            None if self.fallback => default_choice(base, history),
            None => None,
        }
    }
}

/// A selector given by a closure.
pub struct FnSelector<F>(pub F);

impl<F> Selector for FnSelector<F>
where
    F: Fn(&SystemFrameBase, &[Step]) -> Option<StateId> + Send + Sync,
{
    fn select(&self, base: &SystemFrameBase, history: &[Step]) -> Option<StateId> {
        (self.0)(base, history)
    }
}

/// A frame base with a selector and one strategy per agent. Strategies are
/// tables indexed by state.
pub struct System {
    pub base: SystemFrameBase,
    pub selector: Box<dyn Selector>,
    strategies: Vec<Vec<ActionId>>,
}

impl fmt::Debug for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("System")
            .field("base", &self.base)
            .field("strategies", &self.strategies)
            .finish_non_exhaustive()
    }
}

impl System {
    /// `strategies[i][s]` is agent `i`'s action in state `s`.
    pub fn new(
        base: SystemFrameBase,
        selector: Box<dyn Selector>,
        strategies: Vec<Vec<ActionId>>,
    ) -> Result<Self, SystemError> {
        if strategies.len() != base.agents.len() {
            let agent = base
                .agents
                .get(strategies.len())
                .map_or("?".into(), |a| a.to_string());
            return Err(SystemError::StrategyMissing {
                agent,
                state: "any".into(),
            });
        }
        for (i, f) in strategies.iter().enumerate() {
            if f.len() != base.states.len() {
                return Err(SystemError::StrategyMissing {
                    agent: base.agents[i].to_string(),
                    state: base
                        .states
                        .get(f.len())
                        .map_or("?".into(), |s| s.0.to_string()),
                });
            }
            if let Some(&a) = f.iter().find(|&&a| a >= base.actions.len()) {
                return Err(SystemError::Unknown {
                    kind: "action",
                    name: a.to_string(),
                });
            }
        }
        Ok(System {
            base,
            selector,
            strategies,
        })
    }

    pub fn strategy(&self, agent: usize, s: StateId) -> ActionId {
        self.strategies[agent][s]
    }

    /// `(f_i(s))_i`.
    pub fn actions_at(&self, s: StateId) -> ActionTuple {
        self.strategies.iter().map(|f| f[s]).collect()
    }

    /// Replaces agent `i`'s strategy by `s ↦ act(perceive(s))`.
    pub fn with_perception(
        mut self,
        agent: usize,
        perceive: impl Fn(&Structure) -> Option<Structure>,
        act: impl Fn(&Structure) -> Option<ActionId>,
    ) -> Result<Self, SystemError> {
        let mut table = Vec::with_capacity(self.base.states.len());
        for (name, s) in &self.base.states {
            let partial = || SystemError::Partial {
                agent: self.base.agents[agent].to_string(),
                state: name.to_string(),
            };
            let a = act(&perceive(s).ok_or_else(partial)?).ok_or_else(partial)?;
            if a >= self.base.actions.len() {
                return Err(SystemError::Unknown {
                    kind: "action",
                    name: a.to_string(),
                });
            }
            table.push(a);
        }
        self.strategies[agent] = table;
        Ok(self)
    }

    /// The trace of `steps` transitions from `start`. Each choice of `G` is
    /// checked against `F`.
    pub fn run(&self, start: StateId, steps: usize) -> Result<Evolution, SystemError> {
        let mut history: Vec<Step> = Vec::with_capacity(steps);
        let mut current = start;
        for step in 0..steps {
            let a = self.actions_at(current);
            history.push((current, a.clone()));
            let next = self
                .selector
                .select(&self.base, &history)
                .ok_or(SystemError::SelectorUndefined { step })?;
            if !self.base.successors(current, &a).contains(&next) {
                return Err(SystemError::SelectorViolation {
                    step,
                    chosen: self
                        .base
                        .states
                        .get(next)
                        .map_or(next.to_string(), |s| s.0.to_string()),
                    state: self.base.state_name(current).to_string(),
                    actions: self.base.fmt_actions(&a),
                });
            }
            current = next;
        }
        Ok(Evolution {
            steps: history,
            last: Some(current),
        })
    }
}

pub fn run_system(sys: &System, start: StateId, steps: usize) -> Result<Evolution, SystemError> {
    sys.run(start, steps)
}

// ---- text format ----

fn syntax(cur: &Cursor, msg: impl Into<String>) -> SystemError {
    SystemError::Model(ModelError::Syntax(SyntaxError::new(cur.pos(), msg)))
}

fn lift(e: SyntaxError) -> SystemError {
    SystemError::Model(ModelError::Syntax(e))
}

struct Names<'a> {
    states: &'a BTreeMap<String, StateId>,
    actions: &'a [Symbol],
}

impl Names<'_> {
    fn state(&self, cur: &mut Cursor) -> Result<StateId, SystemError> {
        let (name, pos) = cur.ident().map_err(lift)?;
        self.states
            .get(&name)
            .copied()
            .ok_or_else(|| lift(SyntaxError::new(pos, format!("unknown state `{name}`"))))
    }

    fn action(&self, cur: &mut Cursor) -> Result<ActionId, SystemError> {
        let (name, pos) = cur.ident().map_err(lift)?;
        self.actions
            .iter()
            .position(|a| a.as_str() == name)
            .ok_or_else(|| lift(SyntaxError::new(pos, format!("unknown action `{name}`"))))
    }
}

fn names_until_semi(cur: &mut Cursor) -> Result<Vec<Symbol>, SystemError> {
    let mut out = Vec::new();
    while let Tok::Ident(_) = cur.peek() {
        out.push(Symbol::new(&cur.ident().map_err(lift)?.0));
    }
    cur.eat(&Tok::Semi);
    Ok(out)
}

/// Parses a system file.
pub fn parse_system(text: &str) -> Result<System, SystemError> {
    let mut cur = Cursor::new(text).map_err(lift)?;
    let sig = parse_sig_header(&mut cur)
        .map_err(lift)?
        .map(|(s, _)| s)
        .unwrap_or_else(Signature::new);
    let mut agents: Vec<Symbol> = Vec::new();
    let mut actions: Vec<Symbol> = Vec::new();
    let mut states: Vec<(Symbol, Structure)> = Vec::new();
    let mut state_ids: BTreeMap<String, StateId> = BTreeMap::new();
    // (state, pattern with None for `*`) in file order
    let mut rules: Vec<(StateId, Vec<Option<ActionId>>, BTreeSet<StateId>)> = Vec::new();
    let mut strategies: BTreeMap<usize, BTreeMap<StateId, ActionId>> = BTreeMap::new();
    let mut selector = TableSelector::default();
    while !cur.at_eof() {
        if cur.eat(&Tok::Semi) {
            continue;
        }
        let (kw, kw_pos) = cur.ident().map_err(lift)?;
        let names = Names {
            states: &state_ids,
            actions: &actions,
        };
        match kw.as_str() {
            "agents" => agents = names_until_semi(&mut cur)?,
            "actions" => actions = names_until_semi(&mut cur)?,
            "state" => {
                let (name, pos) = cur.ident().map_err(lift)?;
                cur.expect(&Tok::Eq).map_err(lift)?;
                let (s, _) = parse_model_block(&mut cur, &sig)?;
                if state_ids.insert(name.clone(), states.len()).is_some() {
                    return Err(lift(SyntaxError::new(
                        pos,
                        format!("state `{name}` declared twice"),
                    )));
                }
                states.push((Symbol::new(&name), s));
            }
            "F" => {
                cur.expect(&Tok::LParen).map_err(lift)?;
                let s = names.state(&mut cur)?;
                let mut pattern = Vec::new();
                while cur.eat(&Tok::Comma) {
                    if cur.eat(&Tok::Star) {
                        pattern.push(None);
                    } else {
                        pattern.push(Some(names.action(&mut cur)?));
                    }
                }
                if pattern.len() != agents.len() {
                    return Err(syntax(
                        &cur,
                        format!("F needs {} actions, found {}", agents.len(), pattern.len()),
                    ));
                }
                cur.expect(&Tok::RParen).map_err(lift)?;
                cur.expect(&Tok::Eq).map_err(lift)?;
                cur.expect(&Tok::LBrace).map_err(lift)?;
                let mut targets = BTreeSet::new();
                if !cur.eat(&Tok::RBrace) {
                    loop {
                        targets.insert(names.state(&mut cur)?);
                        if cur.eat(&Tok::RBrace) {
                            break;
                        }
                        cur.expect(&Tok::Comma).map_err(lift)?;
                    }
                }
                rules.push((s, pattern, targets));
            }
            "strategy" => {
                let (agent, pos) = cur.ident().map_err(lift)?;
                let i = agents
                    .iter()
                    .position(|a| a.as_str() == agent)
                    .ok_or_else(|| {
                        lift(SyntaxError::new(pos, format!("unknown agent `{agent}`")))
                    })?;
                cur.expect(&Tok::Colon).map_err(lift)?;
                loop {
                    let s = names.state(&mut cur)?;
                    cur.expect(&Tok::Arrow).map_err(lift)?;
                    let a = names.action(&mut cur)?;
                    strategies.entry(i).or_default().insert(s, a);
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            "G" => {
                if cur.is_keyword("default") {
                    cur.bump();
                    selector.fallback = true;
                } else {
                    cur.expect(&Tok::LParen).map_err(lift)?;
                    let mut history = Vec::new();
                    loop {
                        let s = names.state(&mut cur)?;
                        let mut a = vec![names.action(&mut cur)?];
                        while cur.eat(&Tok::Comma) {
                            a.push(names.action(&mut cur)?);
                        }
                        if a.len() != agents.len() {
                            return Err(syntax(
                                &cur,
                                format!("a step needs {} actions", agents.len()),
                            ));
                        }
                        history.push((s, a));
                        if !cur.eat(&Tok::Pipe) {
                            break;
                        }
                    }
                    cur.expect(&Tok::RParen).map_err(lift)?;
                    cur.expect(&Tok::Eq).map_err(lift)?;
                    let target = names.state(&mut cur)?;
                    selector.table.insert(history, target);
                }
            }
            other => {
                return Err(lift(SyntaxError::new(
                    kw_pos,
                    format!("unknown statement `{other}`"),
                )));
            }
        }
        cur.eat(&Tok::Semi);
    }
    let probe = SystemFrameBase {
        agents: agents.clone(),
        actions: actions.clone(),
        states: Vec::new(),
        transitions: BTreeMap::new(),
    };
    let mut transitions = BTreeMap::new();
    for (s, pattern, targets) in rules {
        for a in probe.action_tuples() {
            if pattern
                .iter()
                .zip(&a)
                .all(|(p, x)| p.is_none_or(|p| p == *x))
            {
                transitions.insert((s, a), targets.clone());
            }
        }
    }
    let base = SystemFrameBase::new(agents.clone(), actions, states, transitions)?;
    let mut tables = Vec::new();
    for (i, agent) in agents.iter().enumerate() {
        let f = strategies.remove(&i).unwrap_or_default();
        let mut table = Vec::new();
        for s in 0..base.state_count() {
            table.push(*f.get(&s).ok_or_else(|| SystemError::StrategyMissing {
                agent: agent.to_string(),
                state: base.state_name(s).to_string(),
            })?);
        }
        tables.push(table);
    }
    System::new(base, Box::new(selector), tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOGGLE: &str = "agents a; actions go;\n\
        state s0 = model { domain 0 }; state s1 = model { domain 0 1 };\n\
        F(s0, go) = {s1}; F(s1, go) = {s0};\n\
        strategy a: s0 -> go, s1 -> go;\n\
        G default;\n";

    #[test]
    fn toggle_alternates() {
        let sys = parse_system(TOGGLE).unwrap();
        let ev = run_system(&sys, 0, 10).unwrap();
        let expected: Vec<StateId> = (0..=10).map(|i| i % 2).collect();
        assert_eq!(ev.states(), expected);
        assert!(ev.is_valid(&sys.base));
        assert_eq!(run_system(&sys, 0, 10).unwrap(), ev);
        assert_eq!(ev.display(&sys.base).to_string().split(" | ").count(), 11);
    }

    #[test]
    fn one_state_is_constant() {
        let sys = parse_system(
            "agents a; actions x; state only = model { domain 0 }; F(only, *) = {only}; strategy a: only -> x; G default",
        )
        .unwrap();
        assert_eq!(run_system(&sys, 0, 5).unwrap().states(), vec![0; 6]);
    }

    #[test]
    fn broken_selector_is_reported_with_its_step() {
        let text = TOGGLE.replace("G default;", "G(s0 go | s1 go) = s1; G default;");
        let sys = parse_system(&text).unwrap();
        let err = run_system(&sys, 0, 4).unwrap_err();
        assert!(
            matches!(err, SystemError::SelectorViolation { step: 1, .. }),
            "{err}"
        );
        let no_default = TOGGLE.replace("G default;", "");
        let sys = parse_system(&no_default).unwrap();
        assert!(matches!(
            run_system(&sys, 0, 1),
            Err(SystemError::SelectorUndefined { step: 0 })
        ));
    }

    #[test]
    fn totality_is_checked() {
        let err = parse_system("agents a; actions x y; state s = model { domain 0 }; F(s, x) = {s}; strategy a: s -> x").unwrap_err();
        assert!(matches!(err, SystemError::NotTotal { .. }), "{err}");
        let err = parse_system(
            "agents a; actions x; state s = model { domain 0 }; F(s, x) = {}; strategy a: s -> x",
        )
        .unwrap_err();
        assert!(matches!(err, SystemError::EmptyTransition { .. }), "{err}");
    }

    #[test]
    fn wildcards_and_overrides() {
        let sys = parse_system(
            "agents a b; actions L R;\n\
             state s0 = model { domain 0 }; state s1 = model { domain 0 };\n\
             F(s0, *, *) = {s0, s1}; F(s0, L, R) = {s1}; F(s1, *, *) = {s0};\n\
             strategy a: s0 -> L, s1 -> R; strategy b: s0 -> R, s1 -> R; G default",
        )
        .unwrap();
        assert_eq!(sys.base.successors(0, &[0, 1]), &BTreeSet::from([1]));
        assert_eq!(sys.base.successors(0, &[1, 1]), &BTreeSet::from([0, 1]));
        assert_eq!(sys.actions_at(0), vec![0, 1]);
    }

    /// Hand count for a 2-state, 1-agent, 2-action deterministic base.
    #[test]
    fn evolution_counts() {
        let sys = parse_system(
            "agents a; actions L R;\n\
             state s0 = model { domain 0 }; state s1 = model { domain 0 };\n\
             F(s0, L) = {s0}; F(s0, R) = {s1}; F(s1, *) = {s1};\n\
             strategy a: s0 -> L, s1 -> L; G default",
        )
        .unwrap();
        let k0 = sys.base.proper_evolutions(0);
        assert_eq!(k0.len(), 4);
        // every evolution of j+1 steps: 2 starts, 2 actions per step, F deterministic
        let k2 = sys.base.proper_evolutions(2);
        assert_eq!(k2.len(), 4 + 8 + 16);
        assert!(k2.iter().all(|e| e.is_valid(&sys.base)));
        // s0 is never re-entered from s1
        assert!(k2
            .iter()
            .all(|e| !e.states().windows(2).any(|w| w == [1, 0])));
    }

    #[test]
    fn perception_controls_strategy() {
        let sig_text = "sig P/1 Q/1\nagents a; actions yes no;\n\
             state s0 = model { domain 0; P = 0 }; state s1 = model { domain 0; P = 0; Q = 0 };\n\
             state s2 = model { domain 0 };\n\
             F(s0, *) = {s1}; F(s1, *) = {s2}; F(s2, *) = {s0};\n\
             strategy a: s0 -> yes, s1 -> no, s2 -> no; G default";
        let sys = parse_system(sig_text).unwrap();
        let p = Symbol::new("P");
        let forget_q = |s: &Structure| Some(s.without("Q"));
        let by_p = move |s: &Structure| Some(if s.holds(&p, &[0]) { 0 } else { 1 });
        let sys = sys.with_perception(0, forget_q, by_p).unwrap();
        // s0 and s1 differ only in Q, which the agent cannot see
        assert_eq!(sys.strategy(0, 0), sys.strategy(0, 1));
        assert_eq!(sys.strategy(0, 2), 1);
        let sys = sys.with_perception(0, |s| Some(s.clone()), |_| None);
        assert!(matches!(sys, Err(SystemError::Partial { .. })));
    }

    #[test]
    fn strategies_read_only_the_current_state() {
        let base_text = "agents a; actions L R;\n\
             state s0 = model { domain 0 }; state s1 = model { domain 0 };\n\
             F(s0, *) = {s0, s1}; F(s1, *) = {s0, s1};\n\
             strategy a: s0 -> L, s1 -> R";
        let sys = parse_system(&format!("{base_text}; G default")).unwrap();
        // G looks at the whole history: it moves to s1 after an even number of steps
        let history_g = FnSelector(|_: &SystemFrameBase, h: &[Step]| Some(h.len() % 2));
        let sys = System::new(sys.base, Box::new(history_g), vec![vec![0, 1]]).unwrap();
        let ev = run_system(&sys, 0, 8).unwrap();
        for (s, a) in &ev.steps {
            assert_eq!(a, &sys.actions_at(*s));
        }
        assert!(ev.is_valid(&sys.base));
    }
}
