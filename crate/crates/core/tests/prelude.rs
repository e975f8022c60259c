use pmatch::prelude::{self, section_names};
use pmatch::{Error, Interpreter};

fn eval(src: &str) -> String {
    Interpreter::new().unwrap().eval_to_string(src).unwrap()
}

#[test]
fn join_enumerates_splits_by_prefix_length() {
    assert_eq!(
        eval("(match-all {1 2 3} (list integer) [<join $xs $ys> [xs ys]])"),
        "{[{} {1 2 3}] [{1} {2 3}] [{1 2} {3}] [{1 2 3} {}]}"
    );
}

#[test]
fn twin_primes() {
    assert_eq!(
        eval("(take 6 twin-primes)"),
        "{[3 5] [5 7] [11 13] [17 19] [29 31] [41 43]}"
    );
}

#[test]
fn cons_under_each_collection_matcher() {
    assert_eq!(
        eval("(match-all {1 2 3} (list integer) [<cons $x $rs> [x rs]])"),
        "{[1 {2 3}]}"
    );
    assert_eq!(
        eval("(match-all {1 2 3} (multiset integer) [<cons $x $rs> [x rs]])"),
        "{[1 {2 3}] [2 {1 3}] [3 {1 2}]}"
    );
    assert_eq!(
        eval("(match-all {1 2 3} (set integer) [<cons $x $rs> [x rs]])"),
        "{[1 {1 2 3}] [2 {1 2 3}] [3 {1 2 3}]}"
    );
}

#[test]
fn value_patterns_respect_the_matcher() {
    assert_eq!(
        eval(r#"(match-all {1 2 3} (list integer) [,{2 1 3} "Matched"])"#),
        "{}"
    );
    assert_eq!(
        eval(r#"(match-all {1 2 3} (multiset integer) [,{2 1 3} "Matched"])"#),
        r#"{"Matched"}"#
    );
}

#[test]
fn unordered_pair_tries_both_orders() {
    assert_eq!(
        eval("(match-all <Pair 2 5> (unordered-pair integer) [<pair ,5 $x> x])"),
        "{2}"
    );
    assert_eq!(
        eval("(match-all <Pair 2 5> (unordered-pair integer) [<pair $x $y> [x y]])"),
        "{[2 5] [5 2]}"
    );
}

#[test]
fn non_linear_multiset_query() {
    assert_eq!(
        eval("(match-all {2 8 2} (multiset integer) [<cons $m <cons ,m _>> m])"),
        "{2 2}"
    );
}

#[test]
fn integer_predicate_pattern() {
    assert_eq!(
        eval("(match-all {5 1 7 3} (multiset integer) [<cons <lt ,4> _> 1])"),
        "{1 1}"
    );
    assert_eq!(eval("(match-all 3 integer [<lt ,3> 1])"), "{}");
}

#[test]
fn nil_patterns() {
    assert_eq!(eval("(match-all {} (list integer) [<nil> #t])"), "{#t}");
    assert_eq!(eval("(match-all {1} (list integer) [<nil> #t])"), "{}");
    assert_eq!(eval("(match-all {} (multiset integer) [<nil> #t])"), "{#t}");
    assert_eq!(
        eval("(match-all {1 2} (multiset integer) [<cons $x <cons $y <nil>>> [x y]])"),
        "{[1 2] [2 1]}"
    );
}

#[test]
fn bool_matcher() {
    assert_eq!(eval("(match #t bool {[,#f 0] [,#t 1]})"), "1");
}

#[test]
fn splits_of_small_collections() {
    assert_eq!(
        eval("(splits {1 2 3})"),
        "{[{} {1 2 3}] [{1} {2 3}] [{1 2} {3}] [{1 2 3} {}]}"
    );
    assert_eq!(eval("(splits {})"), "{[{} {}]}");
}

#[test]
fn splits_of_nats_recompose() {
    // Each of the first splits of an infinite stream must glue back into it.
    let i = Interpreter::new().unwrap();
    for k in 0..6 {
        let src = format!(
            "(match (take {n} (splits nats)) (list [something something]) \
             {{[<join _ <cons [$p $s] <nil>>> (take 10 (append p s))]}})",
            n = k + 1
        );
        assert_eq!(i.eval_to_string(&src).unwrap(), "{1 2 3 4 5 6 7 8 9 10}");
        let prefix = format!(
            "(match (take {n} (splits nats)) (list [something something]) \
             {{[<join _ <cons [$p _] <nil>>> p]}})",
            n = k + 1
        );
        let expected: Vec<String> = (1..=k).map(|x| x.to_string()).collect();
        assert_eq!(
            i.eval_to_string(&prefix).unwrap(),
            format!("{{{}}}", expected.join(" "))
        );
    }
}

#[test]
fn primes_prefix() {
    assert_eq!(eval("(take 5 primes)"), "{2 3 5 7 11}");
}

fn sieve(limit: usize) -> Vec<usize> {
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for n in 2..=limit {
        if !composite[n] {
            primes.push(n);
            let mut m = n * n;
            while m <= limit {
                composite[m] = true;
                m += n;
            }
        }
    }
    primes
}

#[test]
fn hundredth_prime_agrees_with_sieve() {
    let oracle = sieve(1000);
    assert_eq!(oracle[99], 541);
    let i = Interpreter::new().unwrap();
    let src = "(take 100 primes)";
    let got = i.eval_to_string(src).unwrap();
    let expected: Vec<String> = oracle[..100].iter().map(|p| p.to_string()).collect();
    assert_eq!(got, format!("{{{}}}", expected.join(" ")));
}

#[test]
fn streams_are_productive() {
    let i = Interpreter::new().unwrap();
    for k in [0, 1, 7, 50] {
        for stream in ["nats", "(repeat 0)", "primes"] {
            let v = i.eval_str(&format!("(take {k} {stream})")).unwrap();
            assert_eq!(v.as_seq().unwrap().to_vec().unwrap().len(), k);
        }
    }
}

#[test]
fn member_by_matcher() {
    assert_eq!(eval("(member?/m integer 2 {1 2 3})"), "#t");
    assert_eq!(eval("(member?/m integer 4 {1 2 3})"), "#f");
    assert_eq!(
        eval("(member?/m (multiset integer) {2 1} {{1 2} {3}})"),
        "#t"
    );
    assert_eq!(eval("(member?/m (list integer) {2 1} {{1 2} {3}})"), "#f");
}

#[test]
fn helpers() {
    assert_eq!(eval("(length {4 5 6})"), "3");
    assert_eq!(eval("(reverse {1 2 3})"), "{3 2 1}");
    assert_eq!(eval("(filter (lambda [$x] (lt? x 3)) {1 5 2 4})"), "{1 2}");
    assert_eq!(eval("(take 3 nats)"), "{1 2 3}");
}

#[test]
fn matcher_captures_its_argument() {
    let i = Interpreter::new().unwrap();
    let m = i.eval_str("(unordered-pair integer)").unwrap();
    let pmatch::Value::Matcher(m) = m else {
        panic!("not a matcher")
    };
    assert_eq!(m.clauses.len(), 2);
    let a = m.env.lookup("a").unwrap().force().unwrap();
    assert!(matches!(a, pmatch::Value::Matcher(_)));
    assert_eq!(
        i.eval_to_string("(multiset integer)").unwrap(),
        "#<matcher>"
    );
}

#[test]
fn every_section_loads_alone_and_twice() {
    for name in section_names() {
        let i = Interpreter::with_sections([name, name]).unwrap();
        assert!(i.env().is_global_defined(match name {
            "collections" => "splits",
            "primes" => "primes",
            other => other,
        }));
    }
}

#[test]
fn loading_is_idempotent() {
    let i = Interpreter::new().unwrap();
    prelude::load_prelude(i.env()).unwrap();
    assert_eq!(
        i.eval_to_string("(take 3 twin-primes)").unwrap(),
        "{[3 5] [5 7] [11 13]}"
    );
}

#[test]
fn unknown_section_is_an_error() {
    assert!(Interpreter::with_sections(["nope"]).is_err());
}

#[test]
fn missing_section_fails_only_when_used() {
    let i = Interpreter::with_sections(["integer"]).unwrap();
    assert_eq!(
        i.eval_to_string("(match-all 3 integer [,3 1])").unwrap(),
        "{1}"
    );
    let err = i.eval_str("(multiset integer)").err().unwrap();
    assert!(matches!(err, Error::UnboundVariable { .. }), "{err}");
}
