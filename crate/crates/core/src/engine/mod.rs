//! The pattern-matching machine.
//!
//! Matching proceeds by reducing *matching states*: a stack of matching atoms
//! (pattern, matcher, target) together with the bindings produced so far. A
//! state with an empty stack is a success. States are grouped into nodes and
//! the machine steps every node of its frontier once per round; a stepped
//! node contributes its head's successors (the child) and its remaining
//! states (the tail), and is replaced by the two in that order. Since
//! each round touches every node and a node only ever splits in two, a state
//! created at any point reaches the head of some node after finitely many
//! rounds, even when a matcher produces infinitely many candidates.

mod matching;
mod trace;

use std::cell::RefCell;
use std::collections::VecDeque;
use std::rc::Rc;

pub use matching::{match_function, pdm, ppm, Candidates, MatchResult};
pub use trace::{trace, RULE};

use crate::env::Env;
use crate::error::{Error, Result};
use crate::eval::{delay, eval};
use crate::syntax::{Expr, MatchClause, Name, Pattern};
use crate::value::{Seq, Step, Thunk, Value};

/// The engine's unit of work.
#[derive(Clone)]
pub struct MatchingAtom {
    pub pattern: Rc<Pattern>,
    /// A user matcher, `something`, or a tuple of matchers.
    pub matcher: Value,
    pub target: Thunk,
}

struct AtomCell {
    atom: MatchingAtom,
    len: usize,
    next: AtomStack,
}

/// Persistent stack of atoms; sibling states share their common suffix.
#[derive(Clone, Default)]
pub struct AtomStack(Option<Rc<AtomCell>>);

impl AtomStack {
    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |c| c.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn push(&self, atom: MatchingAtom) -> AtomStack {
        AtomStack(Some(Rc::new(AtomCell {
            atom,
            len: self.len() + 1,
            next: self.clone(),
        })))
    }

    /// Pushes `atoms` so that `atoms[0]` ends up on top.
    pub fn push_all(&self, atoms: Vec<MatchingAtom>) -> AtomStack {
        atoms
            .into_iter()
            .rev()
            .fold(self.clone(), |stack, atom| stack.push(atom))
    }

    pub fn pop(&self) -> Option<(MatchingAtom, AtomStack)> {
        self.0
            .as_ref()
            .map(|cell| (cell.atom.clone(), cell.next.clone()))
    }

    /// Top first.
    pub fn iter(&self) -> impl Iterator<Item = &MatchingAtom> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let cell = cur?;
            cur = cell.next.0.as_deref();
            Some(&cell.atom)
        })
    }
}

struct BindCell {
    name: Name,
    value: Thunk,
    next: Bindings,
}

/// Intermediate results of matching: the bindings made by `something`,
/// in the order they were made.
#[derive(Clone, Default)]
pub struct Bindings(Option<Rc<BindCell>>);

impl Bindings {
    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn push(&self, name: Name, value: Thunk) -> Bindings {
        Bindings(Some(Rc::new(BindCell {
            name,
            value,
            next: self.clone(),
        })))
    }

    /// Bindings in the order they were made.
    pub fn to_vec(&self) -> Vec<(Name, Thunk)> {
        let mut out = Vec::new();
        let mut cur = self.0.as_deref();
        while let Some(cell) = cur {
            out.push((cell.name.clone(), cell.value.clone()));
            cur = cell.next.0.as_deref();
        }
        out.reverse();
        out
    }

    pub fn get(&self, name: &str) -> Option<Thunk> {
        let mut cur = self.0.as_deref();
        while let Some(cell) = cur {
            if &*cell.name == name {
                return Some(cell.value.clone());
            }
            cur = cell.next.0.as_deref();
        }
        None
    }
}

#[derive(Clone)]
pub struct MatchingState {
    pub atoms: AtomStack,
    /// The environment of the enclosing `match-all`.
    pub outer: Env,
    pub bindings: Bindings,
    /// `outer` extended with `bindings`; value patterns are evaluated here.
    env: Env,
}

impl MatchingState {
    pub fn new(atoms: AtomStack, outer: Env) -> Self {
        let env = outer.clone();
        MatchingState {
            atoms,
            outer,
            bindings: Bindings::default(),
            env,
        }
    }

    pub fn initial(pattern: Rc<Pattern>, matcher: Value, target: Thunk, outer: Env) -> Self {
        MatchingState::new(
            AtomStack::default().push(MatchingAtom {
                pattern,
                matcher,
                target,
            }),
            outer,
        )
    }

    pub fn is_success(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `outer ∪ bindings`.
    pub fn env(&self) -> &Env {
        &self.env
    }

    fn with_binding(&self, name: Name, value: Thunk) -> (Env, Bindings) {
        (
            self.env.bind(name.clone(), value.clone()),
            self.bindings.push(name, value),
        )
    }
}

type StateSource = Box<dyn Iterator<Item = Result<MatchingState>>>;

/// An ordered, possibly lazily produced, sequence of matching states.
#[derive(Default)]
pub struct Node {
    buffer: VecDeque<MatchingState>,
    source: Option<StateSource>,
}

impl Node {
    pub fn empty() -> Node {
        Node::default()
    }

    pub fn from_states(states: impl IntoIterator<Item = MatchingState>) -> Node {
        Node {
            buffer: states.into_iter().collect(),
            source: None,
        }
    }

    pub fn lazy(source: impl Iterator<Item = Result<MatchingState>> + 'static) -> Node {
        Node {
            buffer: VecDeque::new(),
            source: Some(Box::new(source)),
        }
    }

    fn pull(&mut self) -> Result<Option<MatchingState>> {
        let Some(source) = self.source.as_mut() else {
            return Ok(None);
        };
        match source.next() {
            Some(state) => state.map(Some),
            None => {
                self.source = None;
                Ok(None)
            }
        }
    }

    pub fn pop_head(&mut self) -> Result<Option<MatchingState>> {
        match self.buffer.pop_front() {
            Some(s) => Ok(Some(s)),
            None => self.pull(),
        }
    }

    /// Produces up to `limit` states into the buffer; returns whether the node
    /// is now fully materialized.
    pub fn materialize(&mut self, limit: usize) -> Result<bool> {
        while self.buffer.len() < limit {
            match self.pull()? {
                Some(s) => self.buffer.push_back(s),
                None => return Ok(true),
            }
        }
        Ok(self.source.is_none())
    }

    pub fn buffered(&self) -> impl Iterator<Item = &MatchingState> {
        self.buffer.iter()
    }
}

/// Outcome of stepping one node: an optional success, the optional child
/// node generated from the head state, and the optional tail node.
pub struct NodeStep {
    pub result: Option<Bindings>,
    pub child: Option<Node>,
    pub tail: Option<Node>,
}

/// Processes the head state of `node`.
pub fn step_node(mut node: Node) -> Result<NodeStep> {
    let Some(state) = node.pop_head()? else {
        return Ok(NodeStep {
            result: None,
            child: None,
            tail: None,
        });
    };
    let Some((atom, rest)) = state.atoms.pop() else {
        return Ok(NodeStep {
            result: Some(state.bindings),
            child: None,
            tail: Some(node),
        });
    };
    let MatchResult { candidates, delta } = match_function(&atom, state.env())?;
    let (env, bindings) = match delta {
        Some((name, value)) => state.with_binding(name, value),
        None => (state.env.clone(), state.bindings.clone()),
    };
    let outer = state.outer;
    let stats = outer.runtime().clone();
    let child = Node::lazy(candidates.map(move |atoms| {
        let atoms = rest.push_all(atoms?);
        let depth = atoms.len();
        if depth > stats.stats.max_stack.get() {
            stats.stats.max_stack.set(depth);
        }
        Ok(MatchingState {
            atoms,
            outer: outer.clone(),
            bindings: bindings.clone(),
            env: env.clone(),
        })
    }));
    Ok(NodeStep {
        result: None,
        child: Some(child),
        tail: Some(node),
    })
}

/// The reduction-tree frontier plus a buffer of found results.
pub struct Machine {
    frontier: Vec<Node>,
    pending: VecDeque<Bindings>,
    rounds: u64,
    failed: bool,
}

impl Machine {
    pub fn new(initial: MatchingState) -> Machine {
        Machine {
            frontier: vec![Node::from_states([initial])],
            pending: VecDeque::new(),
            rounds: 0,
            failed: false,
        }
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn is_exhausted(&self) -> bool {
        self.frontier.is_empty()
    }

    pub fn frontier_mut(&mut self) -> &mut [Node] {
        &mut self.frontier
    }

    /// Steps every node once. Results are returned in node order; each
    /// node is replaced by its child followed by its tail.
    pub fn step(&mut self) -> Result<Vec<Bindings>> {
        let nodes = std::mem::take(&mut self.frontier);
        let mut results = Vec::new();
        let mut next = Vec::with_capacity(nodes.len() * 2);
        for node in nodes {
            let NodeStep {
                result,
                child,
                tail,
            } = step_node(node).inspect_err(|_| self.failed = true)?;
            results.extend(result);
            next.extend(child);
            next.extend(tail);
        }
        self.frontier = next;
        self.rounds += 1;
        Ok(results)
    }

    /// Runs rounds until a result is available or the tree is exhausted.
    pub fn next_result(&mut self) -> Result<Option<Bindings>> {
        loop {
            if let Some(b) = self.pending.pop_front() {
                return Ok(Some(b));
            }
            if self.failed || self.frontier.is_empty() {
                return Ok(None);
            }
            let found = self.step()?;
            self.pending.extend(found);
        }
    }
}

impl Iterator for Machine {
    type Item = Result<Bindings>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_result().transpose()
    }
}

/// All results for the initial state, lazily.
pub fn enumerate(initial: MatchingState) -> Machine {
    Machine::new(initial)
}

fn check_matcher(v: &Value) -> Result<()> {
    match v {
        Value::Matcher(_) | Value::Something | Value::Tuple(_) => Ok(()),
        other => Err(Error::NotAMatcher(other.kind().to_string())),
    }
}

fn results(env: Env, machine: Rc<RefCell<Machine>>, body: Rc<Expr>) -> Seq {
    let rt = env.runtime().clone();
    Seq::generated(&rt, move || {
        let next = machine
            .try_borrow_mut()
            .map_err(|_| Error::DivergentBinding)?
            .next_result()?;
        Ok(match next {
            None => Step::Nil,
            Some(bindings) => {
                let head = Thunk::suspend(env.extend(bindings.to_vec()), body.clone());
                Step::Cons(head, results(env, machine, body))
            }
        })
    })
}

/// `(match-all target matcher [pattern body])`: a lazy collection with one
/// element per match, in enumeration order.
pub fn eval_match_all(
    env: &Env,
    target: &Rc<Expr>,
    matcher: &Rc<Expr>,
    clause: &MatchClause,
) -> Result<Value> {
    let target = delay(env, target);
    let matcher = eval(env, matcher)?;
    check_matcher(&matcher)?;
    let initial = MatchingState::initial(clause.pattern.clone(), matcher, target, env.clone());
    let machine = Rc::new(RefCell::new(Machine::new(initial)));
    Ok(Value::Collection(results(
        env.clone(),
        machine,
        clause.body.clone(),
    )))
}

/// `(match target matcher {clause …})`: the body of the first clause with
/// any match, under that clause's first result.
pub fn eval_match(
    env: &Env,
    target: &Rc<Expr>,
    matcher: &Rc<Expr>,
    clauses: &[MatchClause],
) -> Result<Value> {
    let target = delay(env, target);
    let matcher = eval(env, matcher)?;
    check_matcher(&matcher)?;
    for clause in clauses {
        let initial = MatchingState::initial(
            clause.pattern.clone(),
            matcher.clone(),
            target.clone(),
            env.clone(),
        );
        if let Some(bindings) = Machine::new(initial).next_result()? {
            return eval(&env.extend(bindings.to_vec()), &clause.body);
        }
    }
    Err(Error::NoMatchingClause(target.force()?.show()?))
}
