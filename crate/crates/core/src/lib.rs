//! Decomposes the difference between two functionally equivalent MiniJ
//! methods into a sequence of verified behavior-preserving operations and
//! measures how much of the difference the sequence explains.

pub mod catalog;
pub mod decomposer;
pub mod diffmetric;
pub mod equivalence;
pub mod harness;
pub mod synth;
pub mod syntax;

pub use decomposer::{decompose_pair, verify_trace, DecomposeConfig, DecompositionTrace, Stage, Step};
pub use diffmetric::{method_delta, sim, token_delta, DeltaSize, MetricError, SimScore};
pub use equivalence::{check_equivalent, evaluate, sample_inputs, Outcome, Value, Verdict};
pub use harness::{eval_corpus, generate_corpus, EvalConfig, EvalSummary, GenerateConfig, PairRecord};
pub use syntax::{parse_method, print_method, tokenize, MethodAst, NodePath, SyntaxError, Token};
