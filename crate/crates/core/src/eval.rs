//! Big-step, call-by-need evaluation.

use std::rc::Rc;

use crate::engine;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::syntax::Expr;
use crate::value::{Closure, MatcherLabel, MatcherValue, Seq, Thunk, Value};

/// Evaluates `expr` under `env` to weak head normal form.
pub fn eval(env: &Env, expr: &Rc<Expr>) -> Result<Value> {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || {
        eval_loop(env.clone(), expr.clone())
    })
}

/// Wraps an argument without evaluating it. Variables share the existing
/// binding's thunk and literals are built eagerly.
pub fn delay(env: &Env, expr: &Rc<Expr>) -> Thunk {
    match &**expr {
        Expr::Var(x, _) => match env.lookup(x) {
            Some(t) => t,
            // Stays suspended so the error only surfaces if demanded.
            None => Thunk::suspend(env.clone(), expr.clone()),
        },
        Expr::Int(n) => Thunk::ready(Value::Int(*n)),
        Expr::Bool(b) => Thunk::ready(Value::Bool(*b)),
        Expr::Str(s) => Thunk::ready(Value::Str(s.clone())),
        Expr::Something => Thunk::ready(Value::Something),
        Expr::Lambda(lambda) => Thunk::ready(Value::Closure(Rc::new(Closure {
            lambda: lambda.clone(),
            env: env.clone(),
        }))),
        _ => Thunk::suspend(env.clone(), expr.clone()),
    }
}

fn delay_all(env: &Env, exprs: &[Rc<Expr>]) -> Vec<Thunk> {
    exprs.iter().map(|e| delay(env, e)).collect()
}

fn eval_loop(mut env: Env, mut expr: Rc<Expr>) -> Result<Value> {
    loop {
        let value = match &*expr {
            Expr::Var(x, pos) => env.get(x, Some(*pos))?.force()?,
            Expr::Int(n) => Value::Int(*n),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::Something => Value::Something,
            Expr::Lambda(lambda) => Value::Closure(Rc::new(Closure {
                lambda: lambda.clone(),
                env: env.clone(),
            })),
            Expr::Tuple(items) => Value::tuple(delay_all(&env, items)),
            Expr::Collection(items) => Value::Collection(Seq::from_thunks(delay_all(&env, items))),
            Expr::Data(c, items) => Value::Data(c.clone(), delay_all(&env, items).into()),
            Expr::Matcher(clauses) => {
                Value::Matcher(Rc::new(MatcherValue::new(clauses.clone(), env.clone())))
            }
            Expr::If(c, t, e) => {
                let branch = if eval(&env, c)?.as_bool()? { t } else { e };
                expr = branch.clone();
                continue;
            }
            Expr::MatchAll {
                target,
                matcher,
                clause,
            } => engine::eval_match_all(&env, target, matcher, clause)?,
            Expr::Match {
                target,
                matcher,
                clauses,
            } => engine::eval_match(&env, target, matcher, clauses)?,
            Expr::App(head, args, _) => {
                let callee = eval(&env, head)?;
                let args = delay_all(&env, args);
                match callee {
                    Value::Closure(c) => {
                        check_arity(&head.to_string(), c.lambda.params.len(), args.len())?;
                        let body = c.lambda.body.clone();
                        let call_env = c
                            .env
                            .extend(c.lambda.params.iter().cloned().zip(args.iter().cloned()));
                        if let Expr::Matcher(clauses) = &*body {
                            // A matcher constructor such as `(multiset a)`: label the
                            // result with the call so traces can print it.
                            let m = MatcherValue::new(clauses.clone(), call_env);
                            let name = match &**head {
                                Expr::Var(x, _) => x.clone(),
                                other => other.to_string().into(),
                            };
                            m.label_if_unset(MatcherLabel::Applied(name, args));
                            Value::Matcher(Rc::new(m))
                        } else {
                            env = call_env;
                            expr = body;
                            continue;
                        }
                    }
                    Value::Builtin(b) => {
                        check_arity(b.name, b.arity, args.len())?;
                        (b.run)(&env, &args)?
                    }
                    other => return Err(Error::NotApplicable(other.kind().to_string())),
                }
            }
        };
        return Ok(value);
    }
}

fn check_arity(callee: &str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Arity {
            callee: callee.to_string(),
            expected,
            got,
        })
    }
}

/// Applies a function value to already-delayed arguments.
pub fn apply(env: &Env, f: &Value, args: Vec<Thunk>) -> Result<Value> {
    match f {
        Value::Closure(c) => {
            check_arity("lambda", c.lambda.params.len(), args.len())?;
            let call_env = c.env.extend(c.lambda.params.iter().cloned().zip(args));
            eval(&call_env, &c.lambda.body)
        }
        Value::Builtin(b) => {
            check_arity(b.name, b.arity, args.len())?;
            (b.run)(env, &args)
        }
        other => Err(Error::NotApplicable(other.kind().to_string())),
    }
}
