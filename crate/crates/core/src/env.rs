//! Persistent environments and the per-interpreter runtime they hang off.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Pos, Result};
use crate::syntax::Name;
use crate::value::Thunk;

/// Instrumentation counters, one set per interpreter instance.
#[derive(Debug, Default)]
pub struct Stats {
    /// Suspended expressions evaluated by forcing.
    pub thunk_evals: Cell<u64>,
    /// Lazily produced collection cells that have been computed.
    pub cells_forced: Cell<u64>,
    /// Invocations of the matching function.
    pub match_calls: Cell<u64>,
    /// Deepest matching-atom stack observed in any matching state.
    pub max_stack: Cell<usize>,
}

impl Stats {
    pub(crate) fn bump(counter: &Cell<u64>) {
        counter.set(counter.get() + 1);
    }

    pub fn snapshot(&self) -> StatsSnapshot {
        StatsSnapshot {
            thunk_evals: self.thunk_evals.get(),
            cells_forced: self.cells_forced.get(),
            match_calls: self.match_calls.get(),
            max_stack: self.max_stack.get(),
        }
    }

    pub fn reset(&self) {
        self.thunk_evals.set(0);
        self.cells_forced.set(0);
        self.match_calls.set(0);
        self.max_stack.set(0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StatsSnapshot {
    pub thunk_evals: u64,
    pub cells_forced: u64,
    pub match_calls: u64,
    pub max_stack: usize,
}

/// Top-level definitions plus instrumentation.
///
/// Globals are the one mutable table: `define` inserts into it so that
/// top-level bindings may refer to each other recursively.
#[derive(Default)]
pub struct Runtime {
    globals: RefCell<HashMap<Name, Thunk>>,
    pub stats: Stats,
}

struct Frame {
    name: Name,
    value: Thunk,
    parent: Option<Rc<Frame>>,
}

/// An immutable chain of local bindings over the global table.
#[derive(Clone)]
pub struct Env {
    rt: Rc<Runtime>,
    locals: Option<Rc<Frame>>,
}

impl Env {
    pub fn new(rt: Rc<Runtime>) -> Self {
        Env { rt, locals: None }
    }

    pub fn runtime(&self) -> &Rc<Runtime> {
        &self.rt
    }

    pub fn stats(&self) -> &Stats {
        &self.rt.stats
    }

    /// Returns a new environment with `name` bound; `self` is unchanged.
    pub fn bind(&self, name: Name, value: Thunk) -> Env {
        Env {
            rt: self.rt.clone(),
            locals: Some(Rc::new(Frame {
                name,
                value,
                parent: self.locals.clone(),
            })),
        }
    }

    /// Extends with `bindings` in order, so later entries shadow earlier ones.
    pub fn extend<I>(&self, bindings: I) -> Env
    where
        I: IntoIterator<Item = (Name, Thunk)>,
    {
        bindings
            .into_iter()
            .fold(self.clone(), |env, (name, value)| env.bind(name, value))
    }

    pub fn lookup(&self, name: &str) -> Option<Thunk> {
        let mut frame = self.locals.as_deref();
        while let Some(f) = frame {
            if &*f.name == name {
                return Some(f.value.clone());
            }
            frame = f.parent.as_deref();
        }
        self.rt.globals.borrow().get(name).cloned()
    }

    pub fn get(&self, name: &str, pos: Option<Pos>) -> Result<Thunk> {
        self.lookup(name).ok_or_else(|| Error::UnboundVariable {
            name: name.to_string(),
            pos,
        })
    }

    /// Adds or replaces a top-level definition, visible from every environment
    /// sharing this runtime.
    pub fn define(&self, name: Name, value: Thunk) {
        self.rt.globals.borrow_mut().insert(name, value);
    }

    pub fn is_global_defined(&self, name: &str) -> bool {
        self.rt.globals.borrow().contains_key(name)
    }
}

impl Drop for Frame {
    fn drop(&mut self) {
        let mut next = self.parent.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut frame) => next = frame.parent.take(),
                Err(_) => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    fn int(thunk: Thunk) -> i64 {
        match thunk.force().unwrap() {
            Value::Int(n) => n,
            _ => panic!("not an integer"),
        }
    }

    #[test]
    fn extend_then_lookup() {
        let env = Env::new(Rc::default());
        let env = env.extend([("m".into(), Thunk::ready(Value::Int(2)))]);
        assert_eq!(int(env.lookup("m").unwrap()), 2);
    }

    #[test]
    fn shadowing() {
        let env = Env::new(Rc::default());
        let inner = env
            .extend([("x".into(), Thunk::ready(Value::Int(1)))])
            .extend([("x".into(), Thunk::ready(Value::Int(2)))]);
        assert_eq!(int(inner.lookup("x").unwrap()), 2);
    }

    #[test]
    fn unbound_is_an_error() {
        let env = Env::new(Rc::default());
        let err = env.get("nope", None).err().unwrap();
        assert!(err.is_unbound());
        assert_eq!(err.to_string(), "unbound variable 'nope'");
    }

    #[test]
    fn extension_leaves_parent_untouched() {
        let base = Env::new(Rc::default()).bind("a".into(), Thunk::ready(Value::Int(1)));
        let child = base.bind("a".into(), Thunk::ready(Value::Int(9)));
        let _ = child.bind("b".into(), Thunk::ready(Value::Int(3)));
        assert_eq!(int(base.lookup("a").unwrap()), 1);
        assert!(base.lookup("b").is_none());
    }

    #[test]
    fn long_chains_drop_without_recursion() {
        let mut env = Env::new(Rc::default());
        for i in 0..200_000 {
            env = env.bind("x".into(), Thunk::ready(Value::Int(i)));
        }
        drop(env);
    }
}
