//! The standard library, written in the object language and loaded at
//! startup. Definitions are lazy, so sections may refer to each other in any
//! order; a reference to a section that was not loaded fails only when used.

use crate::env::Env;
use crate::error::{Error, Result};
use crate::parser::read_program;
use crate::syntax::Form;

pub const INTEGER: &str = r#"
(define $integer
  (matcher {[,$n [] {[$tgt (if (eq? tgt n) {[]} {})]}]
            [<lt ,$n> [] {[$tgt (if (lt? tgt n) {[]} {})]}]
            [$ [something] {[$tgt {tgt}]}]}))
"#;

pub const BOOL: &str = r#"
(define $bool
  (matcher {[,$b [] {[$tgt (if (eq? tgt b) {[]} {})]}]
            [$ [something] {[$tgt {tgt}]}]}))
"#;

pub const UNORDERED_PAIR: &str = r#"
(define $unordered-pair
  (lambda [$a]
    (matcher {[<pair $ $> [a a] {[<Pair $x $y> {[x y] [y x]}]}]
              [$ [something] {[$tgt {tgt}]}]})))
"#;

pub const LIST: &str = r#"
(define $list
  (lambda [$a]
    (matcher
      {[<nil> [] {[{} {[]}] [_ {}]}]
       [<cons $ $> [a (list a)] {[{$x @$xs} {[x xs]}] [_ {}]}]
       [<join $ $> [(list a) (list a)] {[$tgt (splits tgt)]}]
       [,$val []
        {[$tgt (match [val tgt] [(list a) (list a)]
                 {[[<nil> <nil>] {[]}]
                  [[<cons $x $xs> <cons ,x ,xs>] {[]}]
                  [[_ _] {}]})]}]
       [$ [something] {[$tgt {tgt}]}]})))
"#;

pub const MULTISET: &str = r#"
(define $multiset
  (lambda [$a]
    (matcher
      {[<nil> [] {[{} {[]}] [_ {}]}]
       [<cons $ $> [a (multiset a)]
        {[$tgt (match-all tgt (list a)
                 [<join $hs <cons $x $ts>>
                  [x (append hs ts)]])]}]
       [,$val []
        {[$tgt (match [val tgt] [(list a) (multiset a)]
                 {[[<nil> <nil>] {[]}]
                  [[<cons $x $xs> <cons ,x ,xs>] {[]}]
                  [[_ _] {}]})]}]
       [$ [something] {[$tgt {tgt}]}]})))
"#;

pub const SET: &str = r#"
(define $set
  (lambda [$a]
    (matcher
      {[<cons $ $> [a (set a)] {[$tgt (map (lambda [$x] [x tgt]) tgt)]}]
       [$ [something] {[$tgt {tgt}]}]})))
"#;

pub const COLLECTIONS: &str = r#"
; All (prefix, suffix) splits in order of increasing prefix length. The
; prefix is accumulated reversed so each split costs O(1) to produce.
(define $splits (lambda [$xs] (splits-from {} xs)))
(define $splits-from
  (lambda [$rpre $xs]
    (append {[(reverse rpre) xs]}
            (if (empty? xs) {} (splits-from (append {(car xs)} rpre) (cdr xs))))))

(define $reverse (lambda [$xs] (reverse-onto {} xs)))
(define $reverse-onto
  (lambda [$acc $xs]
    (if (empty? xs) acc (reverse-onto (append {(car xs)} acc) (cdr xs)))))

(define $length (lambda [$xs] (if (empty? xs) 0 (+ 1 (length (cdr xs))))))

(define $filter
  (lambda [$pred $xs]
    (if (empty? xs)
        {}
        (if (pred (car xs))
            (append {(car xs)} (filter pred (cdr xs)))
            (filter pred (cdr xs))))))

(define $nats-from (lambda [$n] (append {n} (nats-from (+ n 1)))))
(define $nats (nats-from 1))

(define $member?/m
  (lambda [$m $x $xs]
    (match xs (list m) {[<join _ <cons ,x _>> #t] [_ #f]})))
"#;

pub const PRIMES: &str = r#"
(define $no-divisor-from?
  (lambda [$d $n]
    (if (lt? n (* d d))
        #t
        (if (eq? (mod n d) 0) #f (no-divisor-from? (+ d 1) n)))))
(define $prime? (lambda [$n] (and (lt? 1 n) (no-divisor-from? 2 n))))
(define $primes (filter prime? (nats-from 2)))

(define $twin-primes
  (match-all primes (list integer)
    [<join _ <cons $p <cons ,(+ p 2) _>>> [p (+ p 2)]]))
"#;

/// Named prelude sections in load order.
pub const SECTIONS: &[(&str, &str)] = &[
    ("integer", INTEGER),
    ("bool", BOOL),
    ("unordered-pair", UNORDERED_PAIR),
    ("list", LIST),
    ("multiset", MULTISET),
    ("set", SET),
    ("collections", COLLECTIONS),
    ("primes", PRIMES),
];

pub fn section_names() -> impl Iterator<Item = &'static str> {
    SECTIONS.iter().map(|(name, _)| *name)
}

pub fn section(name: &str) -> Option<&'static str> {
    SECTIONS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
}

fn load_source(env: &Env, name: &str, source: &str) -> Result<()> {
    let wrap = |e: Error| Error::Prelude {
        section: name.to_string(),
        source: Box::new(e),
    };
    for form in read_program(source).map_err(wrap)? {
        match form {
            Form::Define(name, expr) => crate::define(env, name, expr),
            Form::Expr(_) => {
                return Err(wrap(Error::Runtime(
                    "only definitions are allowed in the prelude".into(),
                )))
            }
        }
    }
    Ok(())
}

/// Loads every section into `env`'s global table.
pub fn load_prelude(env: &Env) -> Result<Env> {
    load_sections(env, section_names())
}

/// Loads the named sections. Loading is idempotent.
pub fn load_sections<'a>(env: &Env, names: impl IntoIterator<Item = &'a str>) -> Result<Env> {
    for name in names {
        let source = section(name)
            .ok_or_else(|| Error::Runtime(format!("unknown prelude section '{name}'")))?;
        load_source(env, name, source)?;
    }
    Ok(env.clone())
}
