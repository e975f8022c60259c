//! Host-implemented primitives. Collection primitives are lazy: they take
//! their arguments as thunks and only force what each produced cell needs.

use std::rc::Rc;

use crate::env::{Env, Runtime};
use crate::error::{Error, Result};
use crate::eval::apply;
use crate::value::{structural_equal, Builtin, BuiltinFn, Seq, Step, Thunk, Value};

const TABLE: &[(&str, usize, BuiltinFn)] = &[
    ("+", 2, add),
    ("-", 2, sub),
    ("*", 2, mul),
    ("mod", 2, modulo),
    ("eq?", 2, eq),
    ("lt?", 2, lt),
    ("not", 1, not),
    ("and", 2, and),
    ("or", 2, or),
    ("car", 1, car),
    ("cdr", 1, cdr),
    ("empty?", 1, empty),
    ("take", 2, take),
    ("append", 2, append),
    ("repeat", 1, repeat),
    ("map", 2, map),
    ("between", 2, between),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    TABLE.iter().map(|(name, ..)| *name)
}

pub fn install(env: &Env) {
    for &(name, arity, run) in TABLE {
        env.define(
            name.into(),
            Thunk::ready(Value::Builtin(Rc::new(Builtin { name, arity, run }))),
        );
    }
}

fn int(t: &Thunk) -> Result<i64> {
    t.force()?.as_int()
}

fn seq(t: &Thunk) -> Result<Seq> {
    Ok(t.force()?.as_seq()?.clone())
}

fn add(_: &Env, a: &[Thunk]) -> Result<Value> {
    int(&a[0])?
        .checked_add(int(&a[1])?)
        .map(Value::Int)
        .ok_or(Error::Overflow("+"))
}

fn sub(_: &Env, a: &[Thunk]) -> Result<Value> {
    int(&a[0])?
        .checked_sub(int(&a[1])?)
        .map(Value::Int)
        .ok_or(Error::Overflow("-"))
}

fn mul(_: &Env, a: &[Thunk]) -> Result<Value> {
    int(&a[0])?
        .checked_mul(int(&a[1])?)
        .map(Value::Int)
        .ok_or(Error::Overflow("*"))
}

fn modulo(_: &Env, a: &[Thunk]) -> Result<Value> {
    let d = int(&a[1])?;
    if d == 0 {
        return Err(Error::Runtime("mod: division by zero".into()));
    }
    int(&a[0])?
        .checked_rem_euclid(d)
        .map(Value::Int)
        .ok_or(Error::Overflow("mod"))
}

fn eq(_: &Env, a: &[Thunk]) -> Result<Value> {
    structural_equal(&a[0].force()?, &a[1].force()?).map(Value::Bool)
}

fn lt(_: &Env, a: &[Thunk]) -> Result<Value> {
    Ok(Value::Bool(int(&a[0])? < int(&a[1])?))
}

fn not(_: &Env, a: &[Thunk]) -> Result<Value> {
    Ok(Value::Bool(!a[0].force()?.as_bool()?))
}

fn and(_: &Env, a: &[Thunk]) -> Result<Value> {
    if a[0].force()?.as_bool()? {
        Ok(Value::Bool(a[1].force()?.as_bool()?))
    } else {
        Ok(Value::Bool(false))
    }
}

fn or(_: &Env, a: &[Thunk]) -> Result<Value> {
    if a[0].force()?.as_bool()? {
        Ok(Value::Bool(true))
    } else {
        Ok(Value::Bool(a[1].force()?.as_bool()?))
    }
}

fn car(_: &Env, a: &[Thunk]) -> Result<Value> {
    match seq(&a[0])?.uncons()? {
        Some((head, _)) => head.force(),
        None => Err(Error::Runtime("car: empty collection".into())),
    }
}

fn cdr(_: &Env, a: &[Thunk]) -> Result<Value> {
    match seq(&a[0])?.uncons()? {
        Some((_, tail)) => Ok(Value::Collection(tail)),
        None => Err(Error::Runtime("cdr: empty collection".into())),
    }
}

fn empty(_: &Env, a: &[Thunk]) -> Result<Value> {
    Ok(Value::Bool(seq(&a[0])?.is_empty()?))
}

fn take_from(n: i64, xs: Seq) -> Seq {
    if n <= 0 {
        return Seq::nil();
    }
    Seq::lazy(move || {
        Ok(match xs.uncons()? {
            None => Step::Nil,
            Some((h, t)) => Step::Cons(h, take_from(n - 1, t)),
        })
    })
}

fn take(_: &Env, a: &[Thunk]) -> Result<Value> {
    let n = int(&a[0])?;
    let xs = a[1].clone();
    if n <= 0 {
        return Ok(Value::Collection(Seq::nil()));
    }
    Ok(Value::Collection(Seq::lazy_seq(move || {
        Ok(take_from(n, seq(&xs)?))
    })))
}

fn append_onto(xs: Seq, ys: Thunk) -> Seq {
    Seq::lazy(move || match xs.uncons()? {
        None => seq(&ys)?.step(),
        Some((h, t)) => Ok(Step::Cons(h, append_onto(t, ys))),
    })
}

fn append(_: &Env, a: &[Thunk]) -> Result<Value> {
    let (xs, ys) = (a[0].clone(), a[1].clone());
    Ok(Value::Collection(Seq::lazy_seq(move || {
        Ok(append_onto(seq(&xs)?, ys))
    })))
}

fn repeat_from(rt: Rc<Runtime>, x: Thunk) -> Seq {
    Seq::generated(&rt.clone(), move || {
        let tail = repeat_from(rt, x.clone());
        Ok(Step::Cons(x, tail))
    })
}

fn repeat(env: &Env, a: &[Thunk]) -> Result<Value> {
    Ok(Value::Collection(repeat_from(
        env.runtime().clone(),
        a[0].clone(),
    )))
}

fn map_over(env: Env, f: Value, xs: Seq) -> Seq {
    Seq::lazy(move || match xs.uncons()? {
        None => Ok(Step::Nil),
        Some((h, t)) => {
            let (fe, ff) = (env.clone(), f.clone());
            let head = Thunk::native(move || apply(&fe, &ff, vec![h]));
            Ok(Step::Cons(head, map_over(env, f, t)))
        }
    })
}

fn map(env: &Env, a: &[Thunk]) -> Result<Value> {
    let env = env.clone();
    let (f, xs) = (a[0].clone(), a[1].clone());
    Ok(Value::Collection(Seq::lazy_seq(move || {
        Ok(map_over(env, f.force()?, seq(&xs)?))
    })))
}

fn range(rt: Rc<Runtime>, from: i64, to: i64) -> Seq {
    Seq::generated(&rt.clone(), move || {
        if from > to {
            return Ok(Step::Nil);
        }
        let tail = match from.checked_add(1) {
            Some(next) => range(rt, next, to),
            None => Seq::nil(),
        };
        Ok(Step::Cons(Thunk::ready(Value::Int(from)), tail))
    })
}

/// `(between a b)` is the collection `{a a+1 … b}`.
fn between(env: &Env, a: &[Thunk]) -> Result<Value> {
    Ok(Value::Collection(range(
        env.runtime().clone(),
        int(&a[0])?,
        int(&a[1])?,
    )))
}
