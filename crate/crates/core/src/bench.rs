//! The seq-k workload: look for k consecutive integers in a multiset of n
//! zeros. There are none, and the non-linear pattern lets the engine find
//! that out after examining O(n²) candidates whatever k is.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::Interpreter;

/// `(match-all (take n (repeat 0)) (multiset integer) [<cons $x <cons ,(+ x 1) … _>> x])`
pub fn seq_query(k: usize, n: usize) -> String {
    let mut pattern = String::from("<cons $x ");
    for i in 1..k {
        pattern.push_str(&format!("<cons ,(+ x {i}) "));
    }
    pattern.push('_');
    pattern.push_str(&">".repeat(k));
    format!("(match-all (take {n} (repeat 0)) (multiset integer) [{pattern} x])")
}

#[derive(Debug, Clone, Copy)]
pub struct Report {
    pub k: usize,
    pub n: usize,
    /// Matching-function invocations for one run; identical across runs.
    pub calls: u64,
    /// Number of results; zero for every k ≥ 2.
    pub results: usize,
    /// Fastest of the timed runs.
    pub best: Duration,
}

impl Report {
    /// `bench k=<k> n=<n> calls=<c> ms=<t>`
    pub fn line(&self) -> String {
        format!(
            "bench k={} n={} calls={} ms={:.3}",
            self.k,
            self.n,
            self.calls,
            self.best.as_secs_f64() * 1000.0
        )
    }
}

fn run_once(interp: &Interpreter, query: &str) -> Result<(u64, usize, Duration)> {
    interp.stats().reset();
    let start = Instant::now();
    let value = interp.eval_str(query)?;
    let results = value.as_seq()?.to_vec()?.len();
    let elapsed = start.elapsed();
    Ok((interp.stats().snapshot().match_calls, results, elapsed))
}

/// Runs the seq-k query `reps` times (at least once) in `interp`.
pub fn run_in(interp: &Interpreter, k: usize, n: usize, reps: usize) -> Result<Report> {
    let query = seq_query(k, n);
    let mut report = Report {
        k,
        n,
        calls: 0,
        results: 0,
        best: Duration::MAX,
    };
    for _ in 0..reps.max(1) {
        let (calls, results, elapsed) = run_once(interp, &query)?;
        report.calls = calls;
        report.results = results;
        report.best = report.best.min(elapsed);
    }
    Ok(report)
}

/// Runs the seq-k query in a fresh interpreter with the full prelude.
pub fn run(k: usize, n: usize, reps: usize) -> Result<Report> {
    run_in(&Interpreter::new()?, k, n, reps)
}
