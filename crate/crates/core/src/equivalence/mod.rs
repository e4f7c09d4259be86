//! Differential execution: an interpreter plus randomized comparison of two
//! methods over sampled inputs.
//!
//! A `Consistent` verdict is evidence, not proof. Untested boundary
//! conditions can hide a difference.

mod interp;
mod sample;
mod value;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use interp::{evaluate, Outcome, Program, RuntimeErrorKind, DEFAULT_STEP_BUDGET};
pub use sample::sample_inputs;
pub use value::{java_double_string, Value};

use crate::syntax::{MethodAst, Type};

pub const DEFAULT_SAMPLES: usize = 200;

/// One runtime value per parameter, in declaration order.
pub type InputVector = Vec<Value>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("signatures differ: ({}) -> {} vs ({}) -> {}", list(.left), .left_ret, list(.right), .right_ret)]
    SignatureMismatch {
        left: Vec<Type>,
        left_ret: Type,
        right: Vec<Type>,
        right_ret: Type,
    },
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("unsupported parameter type {0}")]
    UnsupportedType(Type),
}

fn list(types: &[Type]) -> String {
    types.iter().map(Type::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Counterexample {
        input: InputVector,
        outcome_a: Outcome,
        outcome_b: Outcome,
    },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }
}

fn check_signatures(a: &MethodAst, b: &MethodAst) -> Result<(), EquivError> {
    if a.signature() != b.signature() || a.return_type != b.return_type {
        return Err(EquivError::SignatureMismatch {
            left: a.signature(),
            left_ret: a.return_type.clone(),
            right: b.signature(),
            right_ret: b.return_type.clone(),
        });
    }
    Ok(())
}

/// Compares `a` and `b` on `n` inputs sampled with `seed`, stopping at the
/// first disagreement.
pub fn check_equivalent(a: &MethodAst, b: &MethodAst, n: usize, seed: u64) -> Result<Verdict, EquivError> {
    check_signatures(a, b)?;
    let inputs = sample_inputs(&a.signature(), n, seed)?;
    let (pa, pb) = (Program::new(a), Program::new(b));
    for input in inputs {
        let oa = pa.run(&input, DEFAULT_STEP_BUDGET);
        let ob = pb.run(&input, DEFAULT_STEP_BUDGET);
        if oa != ob {
            return Ok(Verdict::Counterexample {
                input,
                outcome_a: oa,
                outcome_b: ob,
            });
        }
    }
    Ok(Verdict::Consistent)
}

/// Reference outcomes of one method on a fixed input sample, so that many
/// candidates can be checked against it without re-running the reference.
#[derive(Debug, Clone)]
pub struct Oracle {
    return_type: Type,
    signature: Vec<Type>,
    inputs: Vec<InputVector>,
    expected: Vec<Outcome>,
    budget: u64,
}

impl Oracle {
    pub fn new(reference: &MethodAst, n: usize, seed: u64) -> Result<Oracle, EquivError> {
        Self::with_budget(reference, n, seed, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(reference: &MethodAst, n: usize, seed: u64, budget: u64) -> Result<Oracle, EquivError> {
        let signature = reference.signature();
        let inputs = sample_inputs(&signature, n, seed)?;
        let program = Program::new(reference);
        let expected = inputs.iter().map(|i| program.run(i, budget)).collect();
        Ok(Oracle {
            return_type: reference.return_type.clone(),
            signature,
            inputs,
            expected,
            budget,
        })
    }

    pub fn inputs(&self) -> &[InputVector] {
        &self.inputs
    }

    /// Checks `candidate` against the cached reference outcomes.
    pub fn check(&self, candidate: &MethodAst) -> Result<Verdict, EquivError> {
        if candidate.signature() != self.signature || candidate.return_type != self.return_type {
            return Err(EquivError::SignatureMismatch {
                left: self.signature.clone(),
                left_ret: self.return_type.clone(),
                right: candidate.signature(),
                right_ret: candidate.return_type.clone(),
            });
        }
        let program = Program::new(candidate);
        for (input, expected) in self.inputs.iter().zip(&self.expected) {
            let got = program.run(input, self.budget);
            if got != *expected {
                return Ok(Verdict::Counterexample {
                    input: input.clone(),
                    outcome_a: expected.clone(),
                    outcome_b: got,
                });
            }
        }
        Ok(Verdict::Consistent)
    }

    pub fn accepts(&self, candidate: &MethodAst) -> bool {
        matches!(self.check(candidate), Ok(Verdict::Consistent))
    }
}

/// Sampling seed for a pair: FNV-1a of the pair id, mixed with `base`.
pub fn seed_for(pair_id: &str, base: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in pair_id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ base.rotate_left(32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_method;

    fn m(src: &str) -> MethodAst {
        parse_method(src).unwrap()
    }

    #[test]
    fn reflexive_and_commutative() {
        let a = m("int f(int x){return x+1;}");
        let b = m("int f(int y){return 1+y;}");
        assert_eq!(check_equivalent(&a, &a, 200, 1).unwrap(), Verdict::Consistent);
        assert_eq!(check_equivalent(&a, &b, 200, 1).unwrap(), Verdict::Consistent);
    }

    #[test]
    fn first_input_distinguishes() {
        let a = m("int f(int x){return x+1;}");
        let b = m("int f(int x){return x+2;}");
        match check_equivalent(&a, &b, 200, 1).unwrap() {
            Verdict::Counterexample {
                input,
                outcome_a,
                outcome_b,
            } => {
                assert_eq!(input, vec![Value::Int(0)]);
                assert_eq!(outcome_a, Outcome::Value { value: Value::Int(1) });
                assert_eq!(outcome_b, Outcome::Value { value: Value::Int(2) });
            }
            v => panic!("expected counterexample, got {v:?}"),
        }
    }

    #[test]
    fn error_behavior_counts() {
        let a = m("boolean f(int a, int b){return b != 0 && a / b > 1;}");
        let b = m("boolean f(int a, int b){return a / b > 1 && b != 0;}");
        assert!(!check_equivalent(&a, &b, 200, 3).unwrap().is_consistent());
    }

    #[test]
    fn budget_exhaustion_on_both_sides_is_equal() {
        let a = m("int f(int x){while (true) { x++; }}");
        let b = m("int f(int x){while (x == x) { x--; } return x;}");
        assert!(check_equivalent(&a, &b, 5, 0).unwrap().is_consistent());
    }

    #[test]
    fn signature_mismatch() {
        let a = m("int f(int x){return x;}");
        let b = m("long f(int x){return x;}");
        let c = m("int f(long x){return 1;}");
        assert!(matches!(check_equivalent(&a, &b, 5, 0), Err(EquivError::SignatureMismatch { .. })));
        assert!(matches!(check_equivalent(&a, &c, 5, 0), Err(EquivError::SignatureMismatch { .. })));
    }

    #[test]
    fn oracle_agrees_with_direct_check() {
        let a = m("int f(int x, int y){return x * 2 - y;}");
        let b = m("int f(int x, int y){return x + x - y;}");
        let c = m("int f(int x, int y){return x - y;}");
        let oracle = Oracle::new(&a, 100, 9).unwrap();
        assert!(oracle.accepts(&b));
        assert!(!oracle.accepts(&c));
        assert_eq!(oracle.check(&c).unwrap(), check_equivalent(&a, &c, 100, 9).unwrap());
    }

    #[test]
    fn seeds_differ_by_pair() {
        assert_ne!(seed_for("p1", 0), seed_for("p2", 0));
        assert_eq!(seed_for("p1", 5), seed_for("p1", 5));
    }
}
