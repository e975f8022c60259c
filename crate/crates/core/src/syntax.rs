//! Abstract syntax of the object language and its source-form printer.
//!
//! `Display` on every node prints valid source text; reading that text back
//! yields a tree equal to the original (positions never take part in `==`).

use std::fmt;
use std::rc::Rc;

use crate::error::Pos;

pub type Name = Rc<str>;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(Name, Pos),
    Int(i64),
    Bool(bool),
    Str(Rc<str>),
    Lambda(Rc<Lambda>),
    App(Rc<Expr>, Vec<Rc<Expr>>, Pos),
    Tuple(Vec<Rc<Expr>>),
    Collection(Vec<Rc<Expr>>),
    Data(Name, Vec<Rc<Expr>>),
    MatchAll {
        target: Rc<Expr>,
        matcher: Rc<Expr>,
        clause: MatchClause,
    },
    Match {
        target: Rc<Expr>,
        matcher: Rc<Expr>,
        clauses: Vec<MatchClause>,
    },
    Something,
    Matcher(Rc<[MatcherClause]>),
    If(Rc<Expr>, Rc<Expr>, Rc<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda {
    pub params: Vec<Name>,
    pub body: Rc<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub pattern: Rc<Pattern>,
    pub body: Rc<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Wildcard,
    Var(Name),
    Value(Rc<Expr>),
    Ctor(Name, Vec<Rc<Pattern>>),
    Tuple(Vec<Rc<Pattern>>),
}

/// Pattern over patterns, used on the left of a matcher clause.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimPattern {
    /// `$`: hands the matched sub-pattern to the next matcher.
    Hole,
    /// `,$x`: matches a value pattern and binds its evaluated content.
    ValueBind(Name),
    Ctor(Name, Vec<PrimPattern>),
}

/// Algebraic pattern over target data, used inside a matcher clause.
#[derive(Debug, Clone, PartialEq)]
pub enum DataPattern {
    Var(Name),
    Wildcard,
    /// `{}`: the empty collection.
    Empty,
    /// `{head @tail}`: a non-empty collection.
    Cons(Box<DataPattern>, Box<DataPattern>),
    Ctor(Name, Vec<DataPattern>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataClause {
    pub pattern: DataPattern,
    pub next_targets: Rc<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatcherClause {
    pub pattern: PrimPattern,
    pub next_matchers: Rc<Expr>,
    pub data_clauses: Vec<DataClause>,
}

impl PrimPattern {
    /// Number of `$` holes, i.e. the number of sub-patterns a match yields.
    pub fn holes(&self) -> usize {
        match self {
            PrimPattern::Hole => 1,
            PrimPattern::ValueBind(_) => 0,
            PrimPattern::Ctor(_, args) => args.iter().map(PrimPattern::holes).sum(),
        }
    }
}

impl Pattern {
    /// Nesting depth; a leaf pattern has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Pattern::Ctor(_, args) | Pattern::Tuple(args) => {
                1 + args.iter().map(|p| p.depth()).max().unwrap_or(0)
            }
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    Define(Name, Rc<Expr>),
    Expr(Rc<Expr>),
}

struct Spaced<'a, T>(&'a [T]);

impl<T: fmt::Display> fmt::Display for Spaced<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

pub(crate) fn write_str_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(name, _) => f.write_str(name),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Bool(true) => f.write_str("#t"),
            Expr::Bool(false) => f.write_str("#f"),
            Expr::Str(s) => write_str_literal(f, s),
            Expr::Lambda(lam) => {
                f.write_str("(lambda [")?;
                for (i, p) in lam.params.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "${p}")?;
                }
                write!(f, "] {})", lam.body)
            }
            Expr::App(head, args, _) => {
                write!(f, "({head}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Expr::Tuple(xs) => write!(f, "[{}]", Spaced(xs)),
            Expr::Collection(xs) => write!(f, "{{{}}}", Spaced(xs)),
            Expr::Data(c, xs) if xs.is_empty() => write!(f, "<{c}>"),
            Expr::Data(c, xs) => write!(f, "<{c} {}>", Spaced(xs)),
            Expr::MatchAll {
                target,
                matcher,
                clause,
            } => write!(f, "(match-all {target} {matcher} {clause})"),
            Expr::Match {
                target,
                matcher,
                clauses,
            } => write!(f, "(match {target} {matcher} {{{}}})", Spaced(clauses)),
            Expr::Something => f.write_str("something"),
            Expr::Matcher(clauses) => write!(f, "(matcher {{{}}})", Spaced(clauses)),
            Expr::If(c, t, e) => write!(f, "(if {c} {t} {e})"),
        }
    }
}

impl fmt::Display for MatchClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}]", self.pattern, self.body)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Wildcard => f.write_str("_"),
            Pattern::Var(x) => write!(f, "${x}"),
            Pattern::Value(e) => write!(f, ",{e}"),
            Pattern::Ctor(c, ps) if ps.is_empty() => write!(f, "<{c}>"),
            Pattern::Ctor(c, ps) => write!(f, "<{c} {}>", Spaced(ps)),
            Pattern::Tuple(ps) => write!(f, "[{}]", Spaced(ps)),
        }
    }
}

impl fmt::Display for PrimPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimPattern::Hole => f.write_str("$"),
            PrimPattern::ValueBind(x) => write!(f, ",${x}"),
            PrimPattern::Ctor(c, ps) if ps.is_empty() => write!(f, "<{c}>"),
            PrimPattern::Ctor(c, ps) => write!(f, "<{c} {}>", Spaced(ps)),
        }
    }
}

impl fmt::Display for DataPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataPattern::Var(x) => write!(f, "${x}"),
            DataPattern::Wildcard => f.write_str("_"),
            DataPattern::Empty => f.write_str("{}"),
            DataPattern::Cons(h, t) => write!(f, "{{{h} @{t}}}"),
            DataPattern::Ctor(c, ps) if ps.is_empty() => write!(f, "<{c}>"),
            DataPattern::Ctor(c, ps) => write!(f, "<{c} {}>", Spaced(ps)),
        }
    }
}

impl fmt::Display for DataClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}]", self.pattern, self.next_targets)
    }
}

impl fmt::Display for MatcherClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} {} {{{}}}]",
            self.pattern,
            self.next_matchers,
            Spaced(&self.data_clauses)
        )
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Define(name, e) => write!(f, "(define ${name} {e})"),
            Form::Expr(e) => write!(f, "{e}"),
        }
    }
}
