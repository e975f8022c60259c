use std::fmt::Write as _;

use super::{Machine, MatchingState};
use crate::error::Result;
use crate::value::{write_value, PrintOptions};

/// Separates rounds in a trace.
pub const RULE: &str = "----";

/// States of one node printed before eliding the rest.
const NODE_STATES_SHOWN: usize = 32;

fn print_options() -> PrintOptions {
    PrintOptions {
        max_elements: Some(16),
        matcher_labels: true,
    }
}

/// `MState {[p m t] …} env {[x v] …}`
pub fn format_state(state: &MatchingState) -> Result<String> {
    let opts = print_options();
    let mut out = String::from("MState {");
    for (i, atom) in state.atoms.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "[{} ", atom.pattern);
        write_value(&mut out, &atom.matcher, &opts)?;
        out.push(' ');
        write_value(&mut out, &atom.target.force()?, &opts)?;
        out.push(']');
    }
    out.push_str("} env {");
    for (i, (name, value)) in state.bindings.to_vec().into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "[{name} ");
        write_value(&mut out, &value.force()?, &opts)?;
        out.push(']');
    }
    out.push('}');
    Ok(out)
}

fn print_frontier(machine: &mut Machine, out: &mut String) -> Result<()> {
    for node in machine.frontier_mut() {
        let complete = node.materialize(NODE_STATES_SHOWN)?;
        for state in node.buffered() {
            out.push_str(&format_state(state)?);
            out.push('\n');
        }
        if !complete {
            out.push_str("…\n");
        }
    }
    Ok(())
}

/// Runs up to `rounds` machine rounds from `initial`, printing the frontier's
/// states before the first round and after each one.
pub fn trace(initial: MatchingState, rounds: usize) -> Result<String> {
    let mut machine = Machine::new(initial);
    let mut out = String::new();
    print_frontier(&mut machine, &mut out)?;
    for _ in 0..rounds {
        if machine.is_exhausted() {
            break;
        }
        machine.step()?;
        out.push_str(RULE);
        out.push('\n');
        print_frontier(&mut machine, &mut out)?;
    }
    Ok(out)
}
