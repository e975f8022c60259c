use std::fmt;
use std::iter::Peekable;
use std::str::Chars;

use crate::error::{Error, Pos, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    /// `( )`: application and special forms.
    Paren,
    /// `[ ]`: tuples.
    Square,
    /// `{ }`: collections.
    Curly,
    /// `< >`: data and pattern constructors.
    Angle,
}

impl Bracket {
    pub fn open(self) -> char {
        match self {
            Bracket::Paren => '(',
            Bracket::Square => '[',
            Bracket::Curly => '{',
            Bracket::Angle => '<',
        }
    }

    pub fn close(self) -> char {
        match self {
            Bracket::Paren => ')',
            Bracket::Square => ']',
            Bracket::Curly => '}',
            Bracket::Angle => '>',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Open(Bracket),
    Close(Bracket),
    /// A bare `$`, the pattern hole.
    Hole,
    /// `$name`.
    Binder(String),
    Comma,
    Underscore,
    At,
    Int(i64),
    Str(String),
    Bool(bool),
    Ident(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub pos: Pos,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Open(b) => write!(f, "'{}'", b.open()),
            TokenKind::Close(b) => write!(f, "'{}'", b.close()),
            TokenKind::Hole => f.write_str("'$'"),
            TokenKind::Binder(x) => write!(f, "'${x}'"),
            TokenKind::Comma => f.write_str("','"),
            TokenKind::Underscore => f.write_str("'_'"),
            TokenKind::At => f.write_str("'@'"),
            TokenKind::Int(n) => write!(f, "integer {n}"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Bool(b) => write!(f, "boolean {}", if *b { "#t" } else { "#f" }),
            TokenKind::Ident(x) => write!(f, "identifier '{x}'"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || "!?*+-/=_.:%&^~'|".contains(c)
}

struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, out: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }

    fn string(&mut self, start: Pos) -> Result<(TokenKind, String)> {
        let mut lexeme = String::from("\"");
        let mut value = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(Error::syntax("unterminated string", start));
            };
            lexeme.push(c);
            match c {
                '"' => return Ok((TokenKind::Str(value), lexeme)),
                '\\' => {
                    let esc_pos = self.pos();
                    let Some(e) = self.bump() else {
                        return Err(Error::syntax("unterminated string", start));
                    };
                    lexeme.push(e);
                    value.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        '"' => '"',
                        '\\' => '\\',
                        other => {
                            return Err(Error::syntax(
                                format!("unknown escape '\\{other}'"),
                                esc_pos,
                            ))
                        }
                    });
                }
                c => value.push(c),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>> {
        // whitespace and comments
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let pos = self.pos();
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        let simple = |kind: TokenKind| {
            Ok(Some(Token {
                kind,
                lexeme: c.to_string(),
                pos,
            }))
        };
        match c {
            '(' => simple(TokenKind::Open(Bracket::Paren)),
            '[' => simple(TokenKind::Open(Bracket::Square)),
            '{' => simple(TokenKind::Open(Bracket::Curly)),
            '<' => simple(TokenKind::Open(Bracket::Angle)),
            ')' => simple(TokenKind::Close(Bracket::Paren)),
            ']' => simple(TokenKind::Close(Bracket::Square)),
            '}' => simple(TokenKind::Close(Bracket::Curly)),
            '>' => simple(TokenKind::Close(Bracket::Angle)),
            ',' => simple(TokenKind::Comma),
            '@' => simple(TokenKind::At),
            '$' => {
                let mut name = String::new();
                self.eat_while(&mut name, is_ident_char);
                if name.is_empty() {
                    simple(TokenKind::Hole)
                } else {
                    Ok(Some(Token {
                        lexeme: format!("${name}"),
                        kind: TokenKind::Binder(name),
                        pos,
                    }))
                }
            }
            '"' => {
                let (kind, lexeme) = self.string(pos)?;
                Ok(Some(Token { kind, lexeme, pos }))
            }
            '#' => {
                let mut word = String::from("#");
                self.eat_while(&mut word, is_ident_char);
                let kind = match word.as_str() {
                    "#t" => TokenKind::Bool(true),
                    "#f" => TokenKind::Bool(false),
                    _ => return Err(Error::syntax(format!("illegal literal '{word}'"), pos)),
                };
                Ok(Some(Token {
                    kind,
                    lexeme: word,
                    pos,
                }))
            }
            c if is_ident_char(c) => {
                let mut word = c.to_string();
                self.eat_while(&mut word, is_ident_char);
                let numeric = {
                    let digits = word.strip_prefix('-').unwrap_or(&word);
                    !digits.is_empty() && digits.chars().all(|d| d.is_ascii_digit())
                };
                let kind = if numeric {
                    let n = word.parse::<i64>().map_err(|_| {
                        Error::syntax(format!("integer literal out of range '{word}'"), pos)
                    })?;
                    TokenKind::Int(n)
                } else if word == "_" {
                    TokenKind::Underscore
                } else if c.is_ascii_digit() {
                    return Err(Error::syntax(format!("malformed number '{word}'"), pos));
                } else {
                    TokenKind::Ident(word.clone())
                };
                Ok(Some(Token {
                    kind,
                    lexeme: word,
                    pos,
                }))
            }
            other => Err(Error::syntax(format!("illegal character '{other}'"), pos)),
        }
    }
}

/// Splits source text into tokens, dropping whitespace and `;` comments.
/// True when `source` is a prefix of a form: it has unclosed brackets or an
/// unterminated string. Used by the REPL to decide whether to keep reading.
pub fn needs_more_input(source: &str) -> bool {
    match tokenize(source) {
        Ok(tokens) => {
            let mut depth = 0i64;
            for t in &tokens {
                match t.kind {
                    TokenKind::Open(_) => depth += 1,
                    TokenKind::Close(_) => depth -= 1,
                    _ => {}
                }
            }
            depth > 0
        }
        Err(e) => e.is_incomplete_input(),
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut lexer = Lexer {
        chars: source.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn strips_comments() {
        assert_eq!(kinds("; comment\n42"), vec![TokenKind::Int(42)]);
    }

    #[test]
    fn data_constructor() {
        assert_eq!(
            kinds("<Pair 2 5>"),
            vec![
                TokenKind::Open(Bracket::Angle),
                TokenKind::Ident("Pair".into()),
                TokenKind::Int(2),
                TokenKind::Int(5),
                TokenKind::Close(Bracket::Angle),
            ]
        );
    }

    #[test]
    fn value_pattern_prefix() {
        assert_eq!(
            kinds(",(+ p 2)"),
            vec![
                TokenKind::Comma,
                TokenKind::Open(Bracket::Paren),
                TokenKind::Ident("+".into()),
                TokenKind::Ident("p".into()),
                TokenKind::Int(2),
                TokenKind::Close(Bracket::Paren),
            ]
        );
    }

    #[test]
    fn sigils_and_literals() {
        assert_eq!(
            kinds("$ $xs @$t _ #t #f -3 - \"a\\\"b\" member?/m"),
            vec![
                TokenKind::Hole,
                TokenKind::Binder("xs".into()),
                TokenKind::At,
                TokenKind::Binder("t".into()),
                TokenKind::Underscore,
                TokenKind::Bool(true),
                TokenKind::Bool(false),
                TokenKind::Int(-3),
                TokenKind::Ident("-".into()),
                TokenKind::Str("a\"b".into()),
                TokenKind::Ident("member?/m".into()),
            ]
        );
    }

    #[test]
    fn positions_are_tracked() {
        let toks = tokenize("(a\n  b)").unwrap();
        assert_eq!((toks[2].pos.line, toks[2].pos.col), (2, 3));
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = tokenize("\n  \"abc").unwrap_err();
        match err {
            Error::Syntax { message, pos } => {
                assert_eq!(message, "unterminated string");
                assert_eq!((pos.line, pos.col), (2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn illegal_character_reports_position() {
        let err = tokenize("(a \\ b)").unwrap_err();
        match err {
            Error::Syntax { message, pos } => {
                assert!(message.contains("illegal character"));
                assert_eq!((pos.line, pos.col), (1, 4));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
