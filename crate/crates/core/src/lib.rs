//! An interpreter for a small lazy language built around `match-all`:
//! non-linear pattern matching with backtracking over collections with no
//! canonical form (multisets, sets, unordered pairs), user-defined matchers,
//! and a fair breadth-first enumeration of all matches.
//!
//! ```
//! let interp = pmatch::Interpreter::new().unwrap();
//! let out = interp
//!     .eval_to_string("(match-all {1 2 3} (multiset integer) [<cons $x _> x])")
//!     .unwrap();
//! assert_eq!(out, "{1 2 3}");
//! ```

pub mod bench;
pub mod builtins;
pub mod engine;
pub mod env;
pub mod error;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod prelude;
pub mod syntax;
pub mod value;

use std::rc::Rc;

pub use env::{Env, Runtime, Stats, StatsSnapshot};
pub use error::{Error, Pos, Result};
pub use parser::{read_expr, read_pattern, read_program};
pub use syntax::{Expr, Form, Name, Pattern};
pub use value::{MatcherLabel, PrintOptions, Seq, Thunk, Value};

/// Binds `name` globally to the lazily evaluated `expr`. A matcher bound this
/// way is labelled with `name` in traces.
pub fn define(env: &Env, name: Name, expr: Rc<Expr>) {
    let (scope, label) = (env.clone(), name.clone());
    let thunk = Thunk::native(move || {
        let v = eval::eval(&scope, &expr)?;
        if let Value::Matcher(m) = &v {
            m.label_if_unset(MatcherLabel::Name(label));
        }
        Ok(v)
    });
    env.define(name, thunk);
}

/// A top-level session: a global environment with builtins and, usually,
/// the prelude.
pub struct Interpreter {
    env: Env,
}

impl Interpreter {
    /// Builtins plus the whole prelude.
    pub fn new() -> Result<Self> {
        let interp = Self::bare();
        prelude::load_prelude(&interp.env)?;
        Ok(interp)
    }

    /// Builtins only.
    pub fn bare() -> Self {
        let env = Env::new(Rc::new(Runtime::default()));
        builtins::install(&env);
        Interpreter { env }
    }

    /// Builtins plus the named prelude sections.
    pub fn with_sections<'a>(sections: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let interp = Self::bare();
        prelude::load_sections(&interp.env, sections)?;
        Ok(interp)
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn stats(&self) -> &Stats {
        self.env.stats()
    }

    /// Runs one top-level form. Definitions yield `None`.
    pub fn run_form(&self, form: Form) -> Result<Option<Value>> {
        match form {
            Form::Define(name, expr) => {
                define(&self.env, name, expr);
                Ok(None)
            }
            Form::Expr(expr) => eval::eval(&self.env, &expr).map(Some),
        }
    }

    /// Runs a program and returns the values of its expression forms.
    pub fn run(&self, source: &str) -> Result<Vec<Value>> {
        let mut values = Vec::new();
        for form in read_program(source)? {
            values.extend(self.run_form(form)?);
        }
        Ok(values)
    }

    /// Evaluates a single expression.
    pub fn eval_str(&self, source: &str) -> Result<Value> {
        eval::eval(&self.env, &read_expr(source)?)
    }

    /// Evaluates a single expression and prints it in full.
    pub fn eval_to_string(&self, source: &str) -> Result<String> {
        self.eval_str(source)?.show()
    }

    /// The initial matching state of a `match-all` expression.
    pub fn initial_state(&self, source: &str) -> Result<engine::MatchingState> {
        let expr = read_expr(source)?;
        let Expr::MatchAll {
            target,
            matcher,
            clause,
        } = &*expr
        else {
            return Err(Error::Runtime(
                "trace expects a match-all expression".into(),
            ));
        };
        let target = eval::delay(&self.env, target);
        let matcher = eval::eval(&self.env, matcher)?;
        Ok(engine::MatchingState::initial(
            clause.pattern.clone(),
            matcher,
            target,
            self.env.clone(),
        ))
    }

    /// Prints the machine's frontier before the first round and after each
    /// of up to `rounds` rounds.
    pub fn trace(&self, source: &str, rounds: usize) -> Result<String> {
        engine::trace(self.initial_state(source)?, rounds)
    }
}
