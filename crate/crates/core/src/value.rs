//! Runtime values, call-by-need thunks and memoized lazy collections.

use std::cell::RefCell;
use std::fmt::{self, Write as _};
use std::rc::Rc;

use crate::env::{Env, Runtime, Stats};
use crate::error::{Error, Result};
use crate::syntax::{write_str_literal, Expr, Lambda, MatcherClause, Name};

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Rc<str>),
    Tuple(Rc<[Thunk]>),
    Collection(Seq),
    Data(Name, Rc<[Thunk]>),
    Closure(Rc<Closure>),
    Builtin(Rc<Builtin>),
    Matcher(Rc<MatcherValue>),
    Something,
}

pub struct Closure {
    pub lambda: Rc<Lambda>,
    pub env: Env,
}

pub type BuiltinFn = fn(&Env, &[Thunk]) -> Result<Value>;

pub struct Builtin {
    pub name: &'static str,
    pub arity: usize,
    pub run: BuiltinFn,
}

/// A user-defined matcher: its clauses plus the environment they close over.
pub struct MatcherValue {
    pub clauses: Rc<[MatcherClause]>,
    pub env: Env,
    label: RefCell<Option<MatcherLabel>>,
}

/// How a matcher is shown in reduction traces, e.g. `integer` or
/// `(multiset integer)`.
#[derive(Clone)]
pub enum MatcherLabel {
    Name(Name),
    Applied(Name, Vec<Thunk>),
}

impl MatcherValue {
    pub fn new(clauses: Rc<[MatcherClause]>, env: Env) -> Self {
        MatcherValue {
            clauses,
            env,
            label: RefCell::new(None),
        }
    }

    /// Sets the trace label unless one is already present.
    pub fn label_if_unset(&self, label: MatcherLabel) {
        let mut slot = self.label.borrow_mut();
        if slot.is_none() {
            *slot = Some(label);
        }
    }

    pub fn label(&self) -> Option<MatcherLabel> {
        self.label.borrow().clone()
    }
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Bool(_) => "boolean",
            Value::Str(_) => "string",
            Value::Tuple(_) => "tuple",
            Value::Collection(_) => "collection",
            Value::Data(..) => "data",
            Value::Closure(_) => "closure",
            Value::Builtin(_) => "builtin",
            Value::Matcher(_) => "matcher",
            Value::Something => "something",
        }
    }

    pub fn tuple(items: Vec<Thunk>) -> Value {
        Value::Tuple(items.into())
    }

    pub fn as_int(&self) -> Result<i64> {
        match self {
            Value::Int(n) => Ok(*n),
            other => Err(Error::type_error("integer", other.kind())),
        }
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(Error::type_error("boolean", other.kind())),
        }
    }

    pub fn as_seq(&self) -> Result<&Seq> {
        match self {
            Value::Collection(s) => Ok(s),
            other => Err(Error::type_error("collection", other.kind())),
        }
    }

    /// Prints with the default options (no element cap, no matcher labels).
    pub fn show(&self) -> Result<String> {
        self.show_with(&PrintOptions::default())
    }

    pub fn show_with(&self, opts: &PrintOptions) -> Result<String> {
        let mut out = String::new();
        write_value(&mut out, self, opts)?;
        Ok(out)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "Int({n})"),
            Value::Bool(b) => write!(f, "Bool({b})"),
            Value::Str(s) => write!(f, "Str({s:?})"),
            other => write!(f, "<{}>", other.kind()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PrintOptions {
    /// Print at most this many elements of any collection, then `…`.
    pub max_elements: Option<usize>,
    /// Show matchers by their construction label instead of `#<matcher>`.
    pub matcher_labels: bool,
}

struct Fmt<F: Fn(&mut fmt::Formatter<'_>) -> fmt::Result>(F);

impl<F: Fn(&mut fmt::Formatter<'_>) -> fmt::Result> fmt::Display for Fmt<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (self.0)(f)
    }
}

fn write_items(out: &mut String, items: &[Thunk], opts: &PrintOptions) -> Result<()> {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_value(out, &t.force()?, opts)?;
    }
    Ok(())
}

pub(crate) fn write_value(out: &mut String, v: &Value, opts: &PrintOptions) -> Result<()> {
    stacker::maybe_grow(32 * 1024, 1024 * 1024, || write_value_inner(out, v, opts))
}

fn write_value_inner(out: &mut String, v: &Value, opts: &PrintOptions) -> Result<()> {
    match v {
        Value::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Value::Bool(true) => out.push_str("#t"),
        Value::Bool(false) => out.push_str("#f"),
        Value::Str(s) => {
            let _ = write!(out, "{}", Fmt(|f| write_str_literal(f, s)));
        }
        Value::Tuple(items) => {
            out.push('[');
            write_items(out, items, opts)?;
            out.push(']');
        }
        Value::Data(c, items) => {
            out.push('<');
            out.push_str(c);
            if !items.is_empty() {
                out.push(' ');
                write_items(out, items, opts)?;
            }
            out.push('>');
        }
        Value::Collection(seq) => {
            out.push('{');
            let mut cur = seq.clone();
            let mut count = 0usize;
            while let Some((head, tail)) = cur.uncons()? {
                if opts.max_elements.is_some_and(|cap| count >= cap) {
                    out.push_str(" …");
                    break;
                }
                if count > 0 {
                    out.push(' ');
                }
                write_value(out, &head.force()?, opts)?;
                count += 1;
                cur = tail;
            }
            out.push('}');
        }
        Value::Closure(_) => out.push_str("#<closure>"),
        Value::Builtin(b) => {
            let _ = write!(out, "#<builtin {}>", b.name);
        }
        Value::Something => out.push_str("something"),
        Value::Matcher(m) => match (opts.matcher_labels, m.label()) {
            (true, Some(MatcherLabel::Name(name))) => out.push_str(&name),
            (true, Some(MatcherLabel::Applied(head, args))) => {
                out.push('(');
                out.push_str(&head);
                for a in &args {
                    out.push(' ');
                    write_value(out, &a.force()?, opts)?;
                }
                out.push(')');
            }
            _ => out.push_str("#<matcher>"),
        },
    }
    Ok(())
}

/// Deep equality after forcing. Collections compare element-wise in order;
/// two infinite equal collections never finish comparing.
pub fn structural_equal(a: &Value, b: &Value) -> Result<bool> {
    stacker::maybe_grow(32 * 1024, 1024 * 1024, || structural_equal_inner(a, b))
}

fn all_equal(xs: &[Thunk], ys: &[Thunk]) -> Result<bool> {
    if xs.len() != ys.len() {
        return Ok(false);
    }
    for (x, y) in xs.iter().zip(ys.iter()) {
        if !structural_equal(&x.force()?, &y.force()?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn structural_equal_inner(a: &Value, b: &Value) -> Result<bool> {
    match (a, b) {
        (Value::Closure(_) | Value::Builtin(_) | Value::Matcher(_) | Value::Something, _) => {
            Err(Error::Incomparable(a.kind().to_string()))
        }
        (_, Value::Closure(_) | Value::Builtin(_) | Value::Matcher(_) | Value::Something) => {
            Err(Error::Incomparable(b.kind().to_string()))
        }
        (Value::Int(x), Value::Int(y)) => Ok(x == y),
        (Value::Bool(x), Value::Bool(y)) => Ok(x == y),
        (Value::Str(x), Value::Str(y)) => Ok(x == y),
        (Value::Tuple(xs), Value::Tuple(ys)) => all_equal(xs, ys),
        (Value::Data(c, xs), Value::Data(d, ys)) => Ok(c == d && all_equal(xs, ys)?),
        (Value::Collection(xs), Value::Collection(ys)) => {
            let (mut xs, mut ys) = (xs.clone(), ys.clone());
            loop {
                match (xs.uncons()?, ys.uncons()?) {
                    (None, None) => return Ok(true),
                    (Some((x, xt)), Some((y, yt))) => {
                        if !structural_equal(&x.force()?, &y.force()?)? {
                            return Ok(false);
                        }
                        xs = xt;
                        ys = yt;
                    }
                    _ => return Ok(false),
                }
            }
        }
        _ => Ok(false),
    }
}

enum ThunkState {
    Ready(Value),
    Suspended(Env, Rc<Expr>),
    Native(Box<dyn FnOnce() -> Result<Value>>),
    Forcing,
    Failed(Error),
}

/// A possibly-unevaluated value, memoized on first force.
#[derive(Clone)]
pub struct Thunk(Rc<RefCell<ThunkState>>);

impl fmt::Debug for Thunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0.borrow() {
            ThunkState::Ready(v) => write!(f, "Thunk({v:?})"),
            ThunkState::Failed(e) => write!(f, "Thunk(failed: {e})"),
            _ => f.write_str("Thunk(..)"),
        }
    }
}

impl Thunk {
    pub fn ready(v: Value) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Ready(v))))
    }

    pub fn suspend(env: Env, expr: Rc<Expr>) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Suspended(env, expr))))
    }

    pub fn native(f: impl FnOnce() -> Result<Value> + 'static) -> Thunk {
        Thunk(Rc::new(RefCell::new(ThunkState::Native(Box::new(f)))))
    }

    pub fn is_forced(&self) -> bool {
        matches!(&*self.0.borrow(), ThunkState::Ready(_))
    }

    pub fn ptr_eq(&self, other: &Thunk) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    pub fn force(&self) -> Result<Value> {
        {
            let state = self.0.borrow();
            match &*state {
                ThunkState::Ready(v) => return Ok(v.clone()),
                ThunkState::Failed(e) => return Err(e.clone()),
                ThunkState::Forcing => return Err(Error::DivergentBinding),
                _ => {}
            }
        }
        let state = std::mem::replace(&mut *self.0.borrow_mut(), ThunkState::Forcing);
        let result = match state {
            ThunkState::Suspended(env, expr) => {
                Stats::bump(&env.stats().thunk_evals);
                crate::eval::eval(&env, &expr)
            }
            ThunkState::Native(f) => f(),
            _ => unreachable!("checked above"),
        };
        *self.0.borrow_mut() = match &result {
            Ok(v) => ThunkState::Ready(v.clone()),
            Err(e) => ThunkState::Failed(e.clone()),
        };
        result
    }
}

enum SeqCell {
    Nil,
    Cons(Thunk, Seq),
    Delayed(Box<dyn FnOnce() -> Result<SeqCell>>),
    Forcing,
    Failed(Error),
}

/// A memoized lazy cons-stream; every cell is computed at most once.
#[derive(Clone)]
pub struct Seq(Rc<RefCell<SeqCell>>);

/// What forcing one collection cell yields.
pub enum Step {
    Nil,
    Cons(Thunk, Seq),
}

impl From<Step> for SeqCell {
    fn from(step: Step) -> SeqCell {
        match step {
            Step::Nil => SeqCell::Nil,
            Step::Cons(h, t) => SeqCell::Cons(h, t),
        }
    }
}

impl Seq {
    pub fn nil() -> Seq {
        Seq(Rc::new(RefCell::new(SeqCell::Nil)))
    }

    pub fn cons(head: Thunk, tail: Seq) -> Seq {
        Seq(Rc::new(RefCell::new(SeqCell::Cons(head, tail))))
    }

    pub fn from_thunks(
        items: impl IntoIterator<Item = Thunk, IntoIter: DoubleEndedIterator>,
    ) -> Seq {
        items
            .into_iter()
            .rev()
            .fold(Seq::nil(), |tail, head| Seq::cons(head, tail))
    }

    pub fn from_values(items: impl IntoIterator<Item = Value>) -> Seq {
        let thunks: Vec<Thunk> = items.into_iter().map(Thunk::ready).collect();
        Seq::from_thunks(thunks)
    }

    /// A cell computed on first demand.
    pub fn lazy(f: impl FnOnce() -> Result<Step> + 'static) -> Seq {
        Seq(Rc::new(RefCell::new(SeqCell::Delayed(Box::new(
            move || f().map(SeqCell::from),
        )))))
    }

    /// A cell of a stream generator (`repeat`, `between`, `match-all`
    /// results). Computing it increments the runtime's `cells_forced`.
    pub fn generated(rt: &Rc<Runtime>, f: impl FnOnce() -> Result<Step> + 'static) -> Seq {
        let rt = rt.clone();
        Seq::lazy(move || {
            Stats::bump(&rt.stats.cells_forced);
            f()
        })
    }

    /// A cell that becomes whatever `f`'s collection starts with.
    pub fn lazy_seq(f: impl FnOnce() -> Result<Seq> + 'static) -> Seq {
        Seq::lazy(move || f()?.step())
    }

    /// Forces this cell.
    pub fn step(&self) -> Result<Step> {
        Ok(match self.uncons()? {
            None => Step::Nil,
            Some((h, t)) => Step::Cons(h, t),
        })
    }

    pub fn is_forced(&self) -> bool {
        matches!(&*self.0.borrow(), SeqCell::Nil | SeqCell::Cons(..))
    }

    /// Forces this cell and returns its head and tail, or `None` when empty.
    pub fn uncons(&self) -> Result<Option<(Thunk, Seq)>> {
        {
            let cell = self.0.borrow();
            match &*cell {
                SeqCell::Nil => return Ok(None),
                SeqCell::Cons(h, t) => return Ok(Some((h.clone(), t.clone()))),
                SeqCell::Failed(e) => return Err(e.clone()),
                SeqCell::Forcing => return Err(Error::DivergentBinding),
                SeqCell::Delayed(_) => {}
            }
        }
        let SeqCell::Delayed(f) = std::mem::replace(&mut *self.0.borrow_mut(), SeqCell::Forcing)
        else {
            unreachable!("checked above")
        };
        match f() {
            Ok(cell) => {
                let out = match &cell {
                    SeqCell::Cons(h, t) => Some((h.clone(), t.clone())),
                    _ => None,
                };
                *self.0.borrow_mut() = cell;
                Ok(out)
            }
            Err(e) => {
                *self.0.borrow_mut() = SeqCell::Failed(e.clone());
                Err(e)
            }
        }
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.uncons()?.is_none())
    }

    /// Iterates over element thunks, forcing cells as it goes.
    pub fn iter(&self) -> SeqIter {
        SeqIter {
            cur: Some(self.clone()),
        }
    }

    /// Forces the whole spine and collects the element thunks.
    pub fn to_vec(&self) -> Result<Vec<Thunk>> {
        self.iter().collect()
    }
}

pub struct SeqIter {
    cur: Option<Seq>,
}

impl Iterator for SeqIter {
    type Item = Result<Thunk>;

    fn next(&mut self) -> Option<Self::Item> {
        let cur = self.cur.take()?;
        match cur.uncons() {
            Ok(Some((h, t))) => {
                self.cur = Some(t);
                Some(Ok(h))
            }
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    }
}

impl Drop for Seq {
    fn drop(&mut self) {
        // Unlink uniquely-owned spines iteratively so long streams don't
        // overflow the stack on drop.
        let mut next = take_unique_tail(&self.0);
        while let Some(seq) = next {
            next = take_unique_tail(&seq.0);
        }
    }
}

fn take_unique_tail(cell: &Rc<RefCell<SeqCell>>) -> Option<Seq> {
    if Rc::strong_count(cell) != 1 {
        return None;
    }
    let mut slot = cell.try_borrow_mut().ok()?;
    if !matches!(&*slot, SeqCell::Cons(..)) {
        return None;
    }
    match std::mem::replace(&mut *slot, SeqCell::Nil) {
        SeqCell::Cons(_, tail) => Some(tail),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Value {
        Value::Collection(Seq::from_values(xs.iter().map(|&n| Value::Int(n))))
    }

    #[test]
    fn ready_thunk_is_identity() {
        let t = Thunk::ready(Value::Int(5));
        assert_eq!(t.force().unwrap().as_int().unwrap(), 5);
    }

    #[test]
    fn native_thunk_runs_once() {
        let hits = Rc::new(std::cell::Cell::new(0));
        let h = hits.clone();
        let t = Thunk::native(move || {
            h.set(h.get() + 1);
            Ok(Value::Int(3))
        });
        assert_eq!(t.force().unwrap().as_int().unwrap(), 3);
        assert_eq!(t.force().unwrap().as_int().unwrap(), 3);
        assert_eq!(hits.get(), 1);
    }

    #[test]
    fn self_forcing_is_divergent() {
        let slot: Rc<RefCell<Option<Thunk>>> = Rc::default();
        let s = slot.clone();
        let t = Thunk::native(move || s.borrow().as_ref().unwrap().force());
        *slot.borrow_mut() = Some(t.clone());
        assert!(matches!(t.force(), Err(Error::DivergentBinding)));
        // break the cycle
        slot.borrow_mut().take();
    }

    #[test]
    fn equality_is_ordered_for_collections() {
        assert!(structural_equal(&Value::Int(5), &Value::Int(5)).unwrap());
        assert!(!structural_equal(&ints(&[1, 2, 3]), &ints(&[2, 1, 3])).unwrap());
        assert!(structural_equal(&ints(&[1, 2, 3]), &ints(&[1, 2, 3])).unwrap());
        assert!(!structural_equal(&ints(&[1, 2]), &ints(&[1, 2, 3])).unwrap());
    }

    #[test]
    fn equality_is_congruent_over_tuples() {
        let mk = || Value::tuple(vec![Thunk::ready(Value::Int(1)), Thunk::ready(ints(&[2]))]);
        assert!(structural_equal(&mk(), &mk()).unwrap());
    }

    #[test]
    fn something_is_incomparable() {
        let err = structural_equal(&Value::Something, &Value::Int(1)).unwrap_err();
        assert!(err.to_string().starts_with("incomparable value"));
    }

    #[test]
    fn printing() {
        let v = Value::tuple(vec![
            Thunk::ready(ints(&[])),
            Thunk::ready(ints(&[1, 2, 3])),
            Thunk::ready(Value::Data(
                "Pair".into(),
                vec![
                    Thunk::ready(Value::Int(2)),
                    Thunk::ready(Value::Bool(false)),
                ]
                .into(),
            )),
            Thunk::ready(Value::Str("a\"b".into())),
        ]);
        assert_eq!(v.show().unwrap(), r#"[{} {1 2 3} <Pair 2 #f> "a\"b"]"#);
    }

    #[test]
    fn capped_printing() {
        let opts = PrintOptions {
            max_elements: Some(2),
            ..Default::default()
        };
        assert_eq!(ints(&[1, 2, 3]).show_with(&opts).unwrap(), "{1 2 …}");
        assert_eq!(ints(&[1, 2]).show_with(&opts).unwrap(), "{1 2}");
    }

    #[test]
    fn lazy_cells_are_memoized() {
        let rt: Rc<Runtime> = Rc::default();
        let seq = Seq::generated(&rt, || {
            Ok(Step::Cons(Thunk::ready(Value::Int(1)), Seq::nil()))
        });
        assert!(!seq.is_forced());
        seq.uncons().unwrap();
        seq.uncons().unwrap();
        assert_eq!(rt.stats.cells_forced.get(), 1);
    }

    #[test]
    fn long_spines_drop_iteratively() {
        let seq = Seq::from_values((0..500_000).map(Value::Int));
        drop(seq);
    }
}
