use std::rc::Rc;

use super::MatchingAtom;
use crate::env::{Env, Stats};
use crate::error::{Error, Result};
use crate::eval::eval;
use crate::syntax::{DataPattern, MatcherClause, Name, Pattern, PrimPattern};
use crate::value::{MatcherValue, PrintOptions, Thunk, Value};

/// Lazily produced atom lists, one per way the atom can be decomposed.
/// Empty means failure; a single empty list means success with nothing left.
pub type Candidates = Box<dyn Iterator<Item = Result<Vec<MatchingAtom>>>>;

pub struct MatchResult {
    pub candidates: Candidates,
    /// A new binding; only `something` produces one.
    pub delta: Option<(Name, Thunk)>,
}

impl MatchResult {
    fn fail() -> Self {
        MatchResult {
            candidates: Box::new(std::iter::empty()),
            delta: None,
        }
    }

    fn one(atoms: Vec<MatchingAtom>, delta: Option<(Name, Thunk)>) -> Self {
        MatchResult {
            candidates: Box::new(std::iter::once(Ok(atoms))),
            delta,
        }
    }
}

fn not_supported(pattern: &Pattern, matcher: &Value) -> Error {
    let opts = PrintOptions {
        matcher_labels: true,
        max_elements: Some(8),
    };
    Error::PatternNotSupported {
        pattern: pattern.to_string(),
        matcher: matcher
            .show_with(&opts)
            .unwrap_or_else(|_| format!("#<{}>", matcher.kind())),
    }
}

/// Decomposes one atom. `env` is the owning state's outer environment
/// extended with its bindings so far.
pub fn match_function(atom: &MatchingAtom, env: &Env) -> Result<MatchResult> {
    Stats::bump(&env.stats().match_calls);
    match &atom.matcher {
        Value::Something => match &*atom.pattern {
            Pattern::Var(x) => Ok(MatchResult::one(
                vec![],
                Some((x.clone(), atom.target.clone())),
            )),
            Pattern::Wildcard => Ok(MatchResult::one(vec![], None)),
            other => Err(not_supported(other, &atom.matcher)),
        },
        Value::Tuple(matchers) => match &*atom.pattern {
            Pattern::Tuple(patterns) if patterns.len() == matchers.len() => {
                let target = atom.target.force()?;
                let Value::Tuple(targets) = &target else {
                    return Err(Error::type_error("tuple target", target.kind()));
                };
                if targets.len() != patterns.len() {
                    return Err(Error::Runtime(format!(
                        "tuple target of arity {} matched against a pattern of arity {}",
                        targets.len(),
                        patterns.len()
                    )));
                }
                let atoms = patterns
                    .iter()
                    .zip(matchers.iter())
                    .zip(targets.iter())
                    .map(|((p, m), t)| {
                        Ok(MatchingAtom {
                            pattern: p.clone(),
                            matcher: m.force()?,
                            target: t.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(MatchResult::one(atoms, None))
            }
            // Variables and wildcards take the whole tuple, as `something` would.
            Pattern::Var(x) => Ok(MatchResult::one(
                vec![],
                Some((x.clone(), atom.target.clone())),
            )),
            Pattern::Wildcard => Ok(MatchResult::one(vec![], None)),
            other => Err(not_supported(other, &atom.matcher)),
        },
        Value::Matcher(m) => user_matcher(atom, m, env),
        other => Err(Error::NotAMatcher(other.kind().to_string())),
    }
}

fn user_matcher(atom: &MatchingAtom, m: &Rc<MatcherValue>, env: &Env) -> Result<MatchResult> {
    for clause in m.clauses.iter() {
        let Some((subpatterns, value_bindings)) = ppm(env, &clause.pattern, &atom.pattern)? else {
            continue;
        };
        for data_clause in &clause.data_clauses {
            let Some(data_bindings) = pdm(&data_clause.pattern, &atom.target)? else {
                continue;
            };
            let matchers = next_matchers(&m.env, clause, subpatterns.len())?;
            let target_env = m.env.extend(value_bindings).extend(data_bindings);
            let next_targets = eval(&target_env, &data_clause.next_targets)?;
            let Value::Collection(next_targets) = next_targets else {
                return Err(Error::type_error(
                    "a collection of next targets",
                    next_targets.kind(),
                ));
            };
            let candidates = next_targets.iter().map(move |target| {
                let target = target?;
                match subpatterns.len() {
                    0 => Ok(vec![]),
                    1 => Ok(vec![MatchingAtom {
                        pattern: subpatterns[0].clone(),
                        matcher: matchers[0].clone(),
                        target,
                    }]),
                    n => {
                        let tuple = target.force()?;
                        match &tuple {
                            Value::Tuple(items) if items.len() == n => Ok(subpatterns
                                .iter()
                                .zip(matchers.iter())
                                .zip(items.iter())
                                .map(|((p, m), t)| MatchingAtom {
                                    pattern: p.clone(),
                                    matcher: m.clone(),
                                    target: t.clone(),
                                })
                                .collect()),
                            other => Err(Error::Runtime(format!(
                                "next target must be a tuple of {n} values, got {}",
                                other.show().unwrap_or_else(|_| other.kind().to_string())
                            ))),
                        }
                    }
                }
            });
            return Ok(MatchResult {
                candidates: Box::new(candidates),
                delta: None,
            });
        }
        // The first applicable clause decides; a total data-pattern miss fails.
        return Ok(MatchResult::fail());
    }
    Err(not_supported(&atom.pattern, &atom.matcher))
}

/// Evaluates a clause's next-matcher expression to one matcher per hole.
fn next_matchers(env: &Env, clause: &MatcherClause, holes: usize) -> Result<Vec<Value>> {
    let v = eval(env, &clause.next_matchers)?;
    match v {
        Value::Tuple(items) if items.len() == holes => items.iter().map(Thunk::force).collect(),
        v if holes == 1 && !matches!(v, Value::Tuple(_)) => Ok(vec![v]),
        v => Err(Error::Runtime(format!(
            "matcher clause {} has {holes} hole(s) but its next matchers are {}",
            clause.pattern,
            v.show().unwrap_or_else(|_| v.kind().to_string()),
        ))),
    }
}

type PpmResult = Option<(Vec<Rc<Pattern>>, Vec<(Name, Thunk)>)>;

/// Matches a primitive-pattern pattern against a pattern, yielding the
/// sub-patterns caught by holes and the values of `,$x` captures.
pub fn ppm(env: &Env, pp: &PrimPattern, pattern: &Rc<Pattern>) -> Result<PpmResult> {
    let mut subpatterns = Vec::new();
    let mut bindings = Vec::new();
    if ppm_into(env, pp, pattern, &mut subpatterns, &mut bindings)? {
        Ok(Some((subpatterns, bindings)))
    } else {
        Ok(None)
    }
}

fn ppm_into(
    env: &Env,
    pp: &PrimPattern,
    pattern: &Rc<Pattern>,
    subpatterns: &mut Vec<Rc<Pattern>>,
    bindings: &mut Vec<(Name, Thunk)>,
) -> Result<bool> {
    match (pp, &**pattern) {
        (PrimPattern::Hole, _) => {
            subpatterns.push(pattern.clone());
            Ok(true)
        }
        (PrimPattern::ValueBind(y), Pattern::Value(e)) => {
            let v = eval(env, e)?;
            bindings.push((y.clone(), Thunk::ready(v)));
            Ok(true)
        }
        (PrimPattern::Ctor(c, pps), Pattern::Ctor(d, ps)) if c == d && pps.len() == ps.len() => {
            for (pp, p) in pps.iter().zip(ps) {
                if !ppm_into(env, pp, p, subpatterns, bindings)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// Matches a primitive-data pattern against a target, forcing only as much
/// of the target as the pattern's shape requires.
pub fn pdm(dp: &DataPattern, target: &Thunk) -> Result<Option<Vec<(Name, Thunk)>>> {
    let mut bindings = Vec::new();
    if pdm_into(dp, target, &mut bindings)? {
        Ok(Some(bindings))
    } else {
        Ok(None)
    }
}

fn pdm_into(dp: &DataPattern, target: &Thunk, bindings: &mut Vec<(Name, Thunk)>) -> Result<bool> {
    match dp {
        DataPattern::Var(z) => {
            bindings.push((z.clone(), target.clone()));
            Ok(true)
        }
        DataPattern::Wildcard => Ok(true),
        DataPattern::Empty => match target.force()? {
            Value::Collection(s) => s.is_empty(),
            _ => Ok(false),
        },
        DataPattern::Cons(head, tail) => match target.force()? {
            Value::Collection(s) => match s.uncons()? {
                Some((h, t)) => Ok(pdm_into(head, &h, bindings)?
                    && pdm_into(tail, &Thunk::ready(Value::Collection(t)), bindings)?),
                None => Ok(false),
            },
            _ => Ok(false),
        },
        DataPattern::Ctor(c, dps) => match target.force()? {
            Value::Data(d, items) if *c == d && dps.len() == items.len() => {
                for (dp, item) in dps.iter().zip(items.iter()) {
                    if !pdm_into(dp, item, bindings)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
    }
}
