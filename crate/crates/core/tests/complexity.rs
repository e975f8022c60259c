use pmatch::bench::{run_in, seq_query};
use pmatch::Interpreter;

/// Matching-function calls for the seq-k query over n zeros, counted by
/// hand from the prelude's matchers:
///
/// * the outer `cons` atom costs 1 call, plus the inner `join` enumeration
///   over the n zeros, which costs 7L + 4 calls on a list of length L;
/// * each of the n candidates then spends 2 calls binding `$x` through
///   `integer` and `something`, 1 + 7(n-1) + 4 calls decomposing the second
///   `cons`, and 1 call on each of its n-1 value patterns, all of which fail.
///
/// The later `,(+ x i)` patterns are never reached, so k does not appear.
fn hand_count(n: u64) -> u64 {
    let inner = |len: u64| 7 * len + 4;
    1 + inner(n) + n * (2 + 1 + inner(n - 1) + (n - 1))
}

#[test]
fn hand_count_closed_form() {
    for n in 4..300 {
        assert_eq!(hand_count(n), 8 * n * n + 6 * n + 5);
    }
}

#[test]
fn call_count_matches_hand_count() {
    let interp = Interpreter::new().unwrap();
    for k in 2..=4 {
        for n in [4, 5, 10, 33] {
            let report = run_in(&interp, k, n as usize, 1).unwrap();
            assert_eq!(report.calls, hand_count(n), "k={k} n={n}");
            assert_eq!(report.results, 0);
        }
    }
}

#[test]
fn call_count_is_deterministic() {
    let interp = Interpreter::new().unwrap();
    let a = run_in(&interp, 3, 20, 2).unwrap();
    let b = pmatch::bench::run(3, 20, 1).unwrap();
    assert_eq!(a.calls, b.calls);
}

#[test]
fn longer_patterns_cost_nothing_extra() {
    let interp = Interpreter::new().unwrap();
    for n in [32, 64, 128] {
        let two = run_in(&interp, 2, n, 1).unwrap().calls;
        let four = run_in(&interp, 4, n, 1).unwrap().calls;
        assert!(four as f64 / two as f64 <= 2.0, "n={n}: {four} / {two}");
    }
}

/// Least-squares slope of log y against log x.
fn exponent(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let cov: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    cov / var
}

#[test]
fn exponent_of_exact_powers() {
    let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&x: &f64| (x, 3.0 * x.powi(2)))
        .collect();
    assert!((exponent(&pts) - 2.0).abs() < 1e-9);
}

#[test]
fn calls_grow_quadratically() {
    let pts: Vec<(f64, f64)> = [32u64, 64, 128, 256]
        .iter()
        .map(|&n| (n as f64, hand_count(n) as f64))
        .collect();
    let e = exponent(&pts);
    assert!((1.8..=2.3).contains(&e), "{e}");
}

#[test]
fn query_shape() {
    assert_eq!(
        seq_query(2, 4),
        "(match-all (take 4 (repeat 0)) (multiset integer) [<cons $x <cons ,(+ x 1) _>> x])"
    );
}
