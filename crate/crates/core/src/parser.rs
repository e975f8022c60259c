//! Recursive-descent parser from tokens to syntax trees.

use std::collections::HashSet;
use std::rc::Rc;

use crate::error::{Error, Pos, Result};
use crate::lexer::{tokenize, Bracket, Token, TokenKind};
use crate::syntax::{
    DataClause, DataPattern, Expr, Form, Lambda, MatchClause, MatcherClause, Name, Pattern,
    PrimPattern,
};

const KEYWORDS: &[&str] = &["define", "lambda", "if", "match-all", "match", "matcher"];

struct Parser<'t> {
    tokens: &'t [Token],
    at: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Parser { tokens, at: 0 }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.at)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn end_pos(&self) -> Pos {
        match self.tokens.last() {
            Some(t) => Pos::new(t.pos.line, t.pos.col + t.lexeme.chars().count() as u32),
            None => Pos::new(1, 1),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'t Token> {
        match self.tokens.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t)
            }
            None => Err(Error::syntax(
                format!("unexpected end of input, expected {what}"),
                self.end_pos(),
            )),
        }
    }

    fn unexpected<T>(&self, tok: &Token, what: &str) -> Result<T> {
        Err(Error::syntax(
            format!("unexpected {}, expected {what}", tok.kind),
            tok.pos,
        ))
    }

    fn expect_open(&mut self, b: Bracket) -> Result<Pos> {
        let what = format!("'{}'", b.open());
        let tok = self.next(&what)?;
        match tok.kind {
            TokenKind::Open(o) if o == b => Ok(tok.pos),
            _ => self.unexpected(tok, &what),
        }
    }

    fn expect_close(&mut self, b: Bracket, form: &str) -> Result<()> {
        let tok = self.next(&format!("'{}'", b.close()))?;
        match &tok.kind {
            TokenKind::Close(c) if *c == b => Ok(()),
            TokenKind::Close(c) => Err(Error::syntax(
                format!(
                    "bracket mismatch: expected '{}', found '{}'",
                    b.close(),
                    c.close()
                ),
                tok.pos,
            )),
            _ if b == Bracket::Paren && !form.is_empty() => Err(Error::syntax(
                format!("too many operands in {form}"),
                tok.pos,
            )),
            _ => self.unexpected(tok, &format!("'{}'", b.close())),
        }
    }

    /// Consumes the closing bracket if it is next.
    fn at_close(&mut self, b: Bracket) -> Result<bool> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Close(c),
                pos,
                ..
            }) => {
                if *c != b {
                    return Err(Error::syntax(
                        format!(
                            "bracket mismatch: expected '{}', found '{}'",
                            b.close(),
                            c.close()
                        ),
                        *pos,
                    ));
                }
                self.at += 1;
                Ok(true)
            }
            Some(_) => Ok(false),
            None => Err(Error::syntax(
                format!("unexpected end of input, expected '{}'", b.close()),
                self.end_pos(),
            )),
        }
    }

    fn operand_count_error<T>(&self, form: &str, expected: &str) -> Result<T> {
        let pos = self.peek().map_or_else(|| self.end_pos(), |t| t.pos);
        Err(Error::syntax(format!("{form} expects {expected}"), pos))
    }

    fn expr_until_close(&mut self, b: Bracket) -> Result<Vec<Rc<Expr>>> {
        let mut out = Vec::new();
        while !self.at_close(b)? {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn binder(&mut self, what: &str) -> Result<Name> {
        let tok = self.next(what)?;
        match &tok.kind {
            TokenKind::Binder(x) => Ok(x.as_str().into()),
            _ => self.unexpected(tok, what),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(&'t str, Pos)> {
        let tok = self.next(what)?;
        match &tok.kind {
            TokenKind::Ident(x) => Ok((x.as_str(), tok.pos)),
            _ => self.unexpected(tok, what),
        }
    }

    fn form(&mut self) -> Result<Form> {
        if let (Some(TokenKind::Open(Bracket::Paren)), Some(TokenKind::Ident(kw))) = (
            self.peek_kind(),
            self.tokens.get(self.at + 1).map(|t| &t.kind),
        ) {
            if kw == "define" {
                self.at += 2;
                let name = self.binder("'$name' after define")?;
                if self.peek().is_none() || matches!(self.peek_kind(), Some(TokenKind::Close(_))) {
                    return self.operand_count_error("define", "a name and one expression");
                }
                let body = self.expr()?;
                self.expect_close(Bracket::Paren, "define")?;
                return Ok(Form::Define(name, body));
            }
        }
        Ok(Form::Expr(self.expr()?))
    }

    fn expr(&mut self) -> Result<Rc<Expr>> {
        let tok = self.next("an expression")?;
        let e = match &tok.kind {
            TokenKind::Int(n) => Expr::Int(*n),
            TokenKind::Str(s) => Expr::Str(s.as_str().into()),
            TokenKind::Bool(b) => Expr::Bool(*b),
            TokenKind::Ident(x) if x == "something" => Expr::Something,
            TokenKind::Ident(x) if KEYWORDS.contains(&x.as_str()) => {
                return Err(Error::syntax(
                    format!("keyword '{x}' used as a variable"),
                    tok.pos,
                ))
            }
            TokenKind::Ident(x) => Expr::Var(x.as_str().into(), tok.pos),
            TokenKind::Open(Bracket::Square) => {
                Expr::Tuple(self.expr_until_close(Bracket::Square)?)
            }
            TokenKind::Open(Bracket::Curly) => {
                Expr::Collection(self.expr_until_close(Bracket::Curly)?)
            }
            TokenKind::Open(Bracket::Angle) => {
                let (name, pos) = self.ident("a data constructor name")?;
                if !name.starts_with(|c: char| c.is_uppercase()) {
                    return Err(Error::syntax(
                        format!("data constructor '{name}' must start with an uppercase letter"),
                        pos,
                    ));
                }
                Expr::Data(name.into(), self.expr_until_close(Bracket::Angle)?)
            }
            TokenKind::Open(Bracket::Paren) => return self.compound(tok.pos),
            TokenKind::Comma => {
                return Err(Error::syntax(
                    "',' is only allowed in pattern position",
                    tok.pos,
                ))
            }
            _ => return self.unexpected(tok, "an expression"),
        };
        Ok(Rc::new(e))
    }

    fn compound(&mut self, open: Pos) -> Result<Rc<Expr>> {
        if let Some(TokenKind::Ident(kw)) = self.peek_kind() {
            let kw = kw.as_str();
            if KEYWORDS.contains(&kw) {
                self.at += 1;
                return self.special(kw);
            }
        }
        if self.at_close(Bracket::Paren)? {
            return Err(Error::syntax("empty application '()'", open));
        }
        let head = self.expr()?;
        let args = self.expr_until_close(Bracket::Paren)?;
        Ok(Rc::new(Expr::App(head, args, open)))
    }

    fn operand(&mut self, form: &str, expected: &str) -> Result<Rc<Expr>> {
        if matches!(self.peek_kind(), Some(TokenKind::Close(_)) | None) {
            return self.operand_count_error(form, expected);
        }
        self.expr()
    }

    fn special(&mut self, kw: &str) -> Result<Rc<Expr>> {
        let e = match kw {
            "define" => {
                let pos = self.tokens[self.at - 1].pos;
                return Err(Error::syntax("define is only allowed at top level", pos));
            }
            "lambda" => {
                self.expect_open(Bracket::Square)?;
                let mut params: Vec<Name> = Vec::new();
                let mut seen = HashSet::new();
                while !self.at_close(Bracket::Square)? {
                    let pos = self.peek().map(|t| t.pos).unwrap_or_default();
                    let p = self.binder("a '$name' parameter")?;
                    if !seen.insert(p.clone()) {
                        return Err(Error::syntax(format!("duplicate parameter '${p}'"), pos));
                    }
                    params.push(p);
                }
                let body = self.operand("lambda", "a parameter list and a body")?;
                self.expect_close(Bracket::Paren, "lambda")?;
                Expr::Lambda(Rc::new(Lambda { params, body }))
            }
            "if" => {
                const EXPECTED: &str = "exactly 3 operands";
                let c = self.operand("if", EXPECTED)?;
                let t = self.operand("if", EXPECTED)?;
                let e = self.operand("if", EXPECTED)?;
                self.expect_close(Bracket::Paren, "if")?;
                Expr::If(c, t, e)
            }
            "match-all" => {
                const EXPECTED: &str = "a target, a matcher and one clause";
                let target = self.operand("match-all", EXPECTED)?;
                let matcher = self.operand("match-all", EXPECTED)?;
                if matches!(self.peek_kind(), Some(TokenKind::Close(_)) | None) {
                    return self.operand_count_error("match-all", EXPECTED);
                }
                let clause = self.match_clause()?;
                self.expect_close(Bracket::Paren, "match-all")?;
                Expr::MatchAll {
                    target,
                    matcher,
                    clause,
                }
            }
            "match" => {
                const EXPECTED: &str = "a target, a matcher and a clause collection";
                let target = self.operand("match", EXPECTED)?;
                let matcher = self.operand("match", EXPECTED)?;
                if matches!(self.peek_kind(), Some(TokenKind::Close(_)) | None) {
                    return self.operand_count_error("match", EXPECTED);
                }
                let open = self.expect_open(Bracket::Curly)?;
                let mut clauses = Vec::new();
                while !self.at_close(Bracket::Curly)? {
                    clauses.push(self.match_clause()?);
                }
                if clauses.is_empty() {
                    return Err(Error::syntax("match needs at least one clause", open));
                }
                self.expect_close(Bracket::Paren, "match")?;
                Expr::Match {
                    target,
                    matcher,
                    clauses,
                }
            }
            "matcher" => {
                self.expect_open(Bracket::Curly)?;
                let mut clauses = Vec::new();
                while !self.at_close(Bracket::Curly)? {
                    clauses.push(self.matcher_clause()?);
                }
                self.expect_close(Bracket::Paren, "matcher")?;
                Expr::Matcher(clauses.into())
            }
            _ => unreachable!("not a keyword: {kw}"),
        };
        Ok(Rc::new(e))
    }

    fn match_clause(&mut self) -> Result<MatchClause> {
        self.expect_open(Bracket::Square)?;
        let pattern = self.pattern()?;
        let body = self.operand("match clause", "a pattern and a body")?;
        self.expect_close(Bracket::Square, "")?;
        Ok(MatchClause { pattern, body })
    }

    fn matcher_clause(&mut self) -> Result<MatcherClause> {
        self.expect_open(Bracket::Square)?;
        let pattern = self.prim_pattern()?;
        let next_matchers = self.expr()?;
        self.expect_open(Bracket::Curly)?;
        let mut data_clauses = Vec::new();
        while !self.at_close(Bracket::Curly)? {
            self.expect_open(Bracket::Square)?;
            let pattern = self.data_pattern()?;
            let next_targets = self.expr()?;
            self.expect_close(Bracket::Square, "")?;
            data_clauses.push(DataClause {
                pattern,
                next_targets,
            });
        }
        self.expect_close(Bracket::Square, "")?;
        Ok(MatcherClause {
            pattern,
            next_matchers,
            data_clauses,
        })
    }

    fn pattern(&mut self) -> Result<Rc<Pattern>> {
        let tok = self.next("a pattern")?;
        let p = match &tok.kind {
            TokenKind::Underscore => Pattern::Wildcard,
            TokenKind::Binder(x) => Pattern::Var(x.as_str().into()),
            TokenKind::Comma => Pattern::Value(self.expr()?),
            TokenKind::Open(Bracket::Angle) => {
                let (name, pos) = self.ident("a pattern constructor name")?;
                if name.starts_with(|c: char| c.is_uppercase()) {
                    return Err(Error::syntax(
                        format!("pattern constructor '{name}' must start with a lowercase letter"),
                        pos,
                    ));
                }
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle)? {
                    args.push(self.pattern()?);
                }
                Pattern::Ctor(name.into(), args)
            }
            TokenKind::Open(Bracket::Square) => {
                let mut items = Vec::new();
                while !self.at_close(Bracket::Square)? {
                    items.push(self.pattern()?);
                }
                Pattern::Tuple(items)
            }
            TokenKind::At => {
                return Err(Error::syntax(
                    "'@' is only allowed in primitive-data patterns",
                    tok.pos,
                ))
            }
            TokenKind::Hole => {
                return Err(Error::syntax(
                    "a bare '$' is only allowed in matcher clauses",
                    tok.pos,
                ))
            }
            _ => return self.unexpected(tok, "a pattern"),
        };
        Ok(Rc::new(p))
    }

    fn prim_pattern(&mut self) -> Result<PrimPattern> {
        let tok = self.next("a primitive-pattern pattern")?;
        match &tok.kind {
            TokenKind::Hole => Ok(PrimPattern::Hole),
            TokenKind::Comma => Ok(PrimPattern::ValueBind(
                self.binder("'$name' after ',' in a primitive-pattern pattern")?,
            )),
            TokenKind::Binder(x) => Err(Error::syntax(
                format!(
                    "'${x}' is not allowed in a primitive-pattern pattern; holes are anonymous"
                ),
                tok.pos,
            )),
            TokenKind::Open(Bracket::Angle) => {
                let (name, _) = self.ident("a pattern constructor name")?;
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle)? {
                    args.push(self.prim_pattern()?);
                }
                Ok(PrimPattern::Ctor(name.into(), args))
            }
            _ => self.unexpected(tok, "a primitive-pattern pattern"),
        }
    }

    fn data_pattern(&mut self) -> Result<DataPattern> {
        let tok = self.next("a primitive-data pattern")?;
        match &tok.kind {
            TokenKind::Binder(x) => Ok(DataPattern::Var(x.as_str().into())),
            TokenKind::Underscore => Ok(DataPattern::Wildcard),
            TokenKind::Open(Bracket::Curly) => {
                if self.at_close(Bracket::Curly)? {
                    return Ok(DataPattern::Empty);
                }
                let head = self.data_pattern()?;
                let at = self.next("'@'")?;
                if at.kind != TokenKind::At {
                    return self.unexpected(at, "'@' before the rest pattern");
                }
                let tail = self.data_pattern()?;
                self.expect_close(Bracket::Curly, "")?;
                Ok(DataPattern::Cons(Box::new(head), Box::new(tail)))
            }
            TokenKind::Open(Bracket::Angle) => {
                let (name, _) = self.ident("a data constructor name")?;
                let mut args = Vec::new();
                while !self.at_close(Bracket::Angle)? {
                    args.push(self.data_pattern()?);
                }
                Ok(DataPattern::Ctor(name.into(), args))
            }
            _ => self.unexpected(tok, "a primitive-data pattern"),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.unexpected(t, "end of input"),
        }
    }
}

/// Parses a whole program: a sequence of `define`s and expressions.
pub fn parse_program(tokens: &[Token]) -> Result<Vec<Form>> {
    let mut p = Parser::new(tokens);
    let mut forms = Vec::new();
    while p.peek().is_some() {
        forms.push(p.form()?);
    }
    Ok(forms)
}

/// Parses exactly one expression.
pub fn parse_expr(tokens: &[Token]) -> Result<Rc<Expr>> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses exactly one pattern.
pub fn parse_pattern(tokens: &[Token]) -> Result<Rc<Pattern>> {
    let mut p = Parser::new(tokens);
    let pat = p.pattern()?;
    p.finish()?;
    Ok(pat)
}

pub fn read_program(source: &str) -> Result<Vec<Form>> {
    parse_program(&tokenize(source)?)
}

pub fn read_expr(source: &str) -> Result<Rc<Expr>> {
    parse_expr(&tokenize(source)?)
}

pub fn read_pattern(source: &str) -> Result<Rc<Pattern>> {
    parse_pattern(&tokenize(source)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(x: &str) -> Rc<Expr> {
        Rc::new(Expr::Var(x.into(), Pos::default()))
    }

    fn pvar(x: &str) -> Rc<Pattern> {
        Rc::new(Pattern::Var(x.into()))
    }

    fn ctor(c: &str, args: Vec<Rc<Pattern>>) -> Rc<Pattern> {
        Rc::new(Pattern::Ctor(c.into(), args))
    }

    fn syntax_message(src: &str) -> String {
        match read_program(src).unwrap_err() {
            Error::Syntax { message, .. } => message,
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_define() {
        assert_eq!(
            read_program("(define $x 1)").unwrap(),
            vec![Form::Define("x".into(), Rc::new(Expr::Int(1)))]
        );
    }

    #[test]
    fn match_all_with_join() {
        let forms =
            read_program("(match-all {1 2 3} (list integer) [<join $xs $ys> [xs ys]])").unwrap();
        let expected = Expr::MatchAll {
            target: Rc::new(Expr::Collection(vec![
                Rc::new(Expr::Int(1)),
                Rc::new(Expr::Int(2)),
                Rc::new(Expr::Int(3)),
            ])),
            matcher: Rc::new(Expr::App(var("list"), vec![var("integer")], Pos::default())),
            clause: MatchClause {
                pattern: ctor("join", vec![pvar("xs"), pvar("ys")]),
                body: Rc::new(Expr::Tuple(vec![var("xs"), var("ys")])),
            },
        };
        assert_eq!(forms, vec![Form::Expr(Rc::new(expected))]);
    }

    #[test]
    fn matcher_with_value_pattern_pattern() {
        let e = read_expr(
            "(matcher {[,$n [] {[$tgt (if (eq? tgt n) {[]} {})]}]
                       [<lt ,$n> [] {[$tgt (if (lt? tgt n) {[]} {})]}]
                       [$ [something] {[$tgt {tgt}]}]})",
        )
        .unwrap();
        let Expr::Matcher(clauses) = &*e else {
            panic!("not a matcher: {e}")
        };
        assert_eq!(clauses.len(), 3);
        assert_eq!(clauses[0].pattern, PrimPattern::ValueBind("n".into()));
        assert_eq!(
            clauses[1].pattern,
            PrimPattern::Ctor("lt".into(), vec![PrimPattern::ValueBind("n".into())])
        );
        assert_eq!(clauses[2].pattern, PrimPattern::Hole);
        assert_eq!(
            clauses[2].data_clauses[0].pattern,
            DataPattern::Var("tgt".into())
        );
    }

    #[test]
    fn patterns() {
        assert_eq!(*read_pattern("_").unwrap(), Pattern::Wildcard);
        assert_eq!(
            read_pattern("<cons $x <cons ,x _>>").unwrap(),
            ctor(
                "cons",
                vec![
                    pvar("x"),
                    ctor(
                        "cons",
                        vec![
                            Rc::new(Pattern::Value(var("x"))),
                            Rc::new(Pattern::Wildcard)
                        ]
                    )
                ]
            )
        );
        assert_eq!(
            *read_pattern("[<nil> <nil>]").unwrap(),
            Pattern::Tuple(vec![ctor("nil", vec![]), ctor("nil", vec![])])
        );
    }

    #[test]
    fn data_pattern_extensions() {
        let e = read_expr(
            "(matcher {[<nil> [] {[{} {[]}] [_ {}]}] [<cons $ $> [a a] {[{$x @$xs} {[x xs]}]}]})",
        )
        .unwrap();
        let Expr::Matcher(clauses) = &*e else {
            panic!()
        };
        assert_eq!(clauses[0].data_clauses[0].pattern, DataPattern::Empty);
        assert_eq!(clauses[0].data_clauses[1].pattern, DataPattern::Wildcard);
        assert_eq!(
            clauses[1].data_clauses[0].pattern,
            DataPattern::Cons(
                Box::new(DataPattern::Var("x".into())),
                Box::new(DataPattern::Var("xs".into()))
            )
        );
    }

    #[test]
    fn rejects_at_in_pattern_position() {
        let msg = syntax_message("(match-all xs m [@$x x])");
        assert!(msg.contains("'@'"), "{msg}");
    }

    #[test]
    fn rejects_named_hole_in_prim_pattern() {
        let msg = syntax_message("(matcher {[$x [] {}]})");
        assert!(msg.contains("holes are anonymous"), "{msg}");
    }

    #[test]
    fn rejects_comma_in_expression() {
        let msg = syntax_message("(f ,x)");
        assert!(msg.contains("','"), "{msg}");
    }

    #[test]
    fn bracket_mismatch_is_positioned() {
        match read_program("(f [1 2)").unwrap_err() {
            Error::Syntax { message, pos } => {
                assert!(message.contains("bracket mismatch"), "{message}");
                assert_eq!((pos.line, pos.col), (1, 8));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn special_form_arity() {
        assert!(syntax_message("(if #t 1)").contains("if expects"));
        assert!(syntax_message("(if #t 1 2 3)").contains("too many operands"));
        assert!(syntax_message("(match 1 integer {})").contains("at least one clause"));
        assert!(syntax_message("(define $x)").contains("define expects"));
        assert!(syntax_message("(lambda [$x $x] x)").contains("duplicate parameter"));
    }

    #[test]
    fn define_only_at_top_level() {
        assert!(syntax_message("(f (define $x 1))").contains("top level"));
    }

    #[test]
    fn unterminated_input() {
        assert!(syntax_message("(f 1").contains("unexpected end of input"));
    }
}
