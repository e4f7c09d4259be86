//! Token-level delta sizes and the Sim score built on them.
//!
//! `Sim(mid, left, right) = 1 - |Δ(mid, right)| / |Δ(left, right)|`, where
//! `|Δ|` counts the tokens added plus deleted between the canonical
//! renderings of two methods.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{method_tokens, MethodAst, Token};

/// Added and deleted token counts between two sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaSize {
    pub added: usize,
    pub deleted: usize,
}

impl DeltaSize {
    pub fn total(&self) -> usize {
        self.added + self.deleted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimScore(pub f64);

impl SimScore {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_full(self) -> bool {
        self.0 == 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("left and right are token-identical but mid differs (|Δ(mid, right)| = {residual})")]
    BaselineZero { residual: usize },
}

/// Length of a longest common subsequence, in O(|a|·|b|) time and
/// O(min(|a|, |b|)) space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let above = row[j + 1];
            row[j + 1] = if x == y {
                diag + 1
            } else {
                above.max(row[j])
            };
            diag = above;
        }
    }
    prefix + suffix + row[short.len()]
}

/// Delta between two token sequences via their longest common subsequence.
pub fn token_delta(a: &[Token], b: &[Token]) -> DeltaSize {
    let common = lcs_len(a, b);
    DeltaSize {
        added: b.len() - common,
        deleted: a.len() - common,
    }
}

/// Delta between the canonical renderings of two methods.
pub fn method_delta(a: &MethodAst, b: &MethodAst) -> DeltaSize {
    token_delta(&method_tokens(a), &method_tokens(b))
}

/// Sim from precomputed delta totals.
pub fn sim_from_totals(residual: usize, baseline: usize) -> Result<SimScore, MetricError> {
    if baseline == 0 {
        return if residual == 0 {
            Ok(SimScore(1.0))
        } else {
            Err(MetricError::BaselineZero { residual })
        };
    }
    Ok(SimScore(1.0 - residual as f64 / baseline as f64))
}

/// Sim of `mid` as an explanation of the change from `left` to `right`.
pub fn sim(mid: &MethodAst, left: &MethodAst, right: &MethodAst) -> Result<SimScore, MetricError> {
    let right_toks = method_tokens(right);
    let residual = token_delta(&method_tokens(mid), &right_toks).total();
    let baseline = token_delta(&method_tokens(left), &right_toks).total();
    sim_from_totals(residual, baseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_method, TokenKind};
    use proptest::prelude::*;

    fn ids(s: &str) -> Vec<Token> {
        s.split_whitespace()
            .map(|w| Token::new(TokenKind::Identifier, w))
            .collect()
    }

    /// Exponential oracle: the longest subsequence of `a` (by enumeration of
    /// all index subsets) that is also a subsequence of `b`.
    fn brute_lcs(a: &[Token], b: &[Token]) -> usize {
        fn is_subseq(sub: &[&Token], b: &[Token]) -> bool {
            let mut it = b.iter();
            sub.iter().all(|x| it.any(|y| y == *x))
        }
        let n = a.len();
        assert!(n <= 20);
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let count = mask.count_ones() as usize;
            if count <= best {
                continue;
            }
            let sub: Vec<&Token> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &a[i]).collect();
            if is_subseq(&sub, b) {
                best = count;
            }
        }
        best
    }

    #[test]
    fn identical_sequences() {
        let a = ids("a b c");
        assert_eq!(token_delta(&a, &a), DeltaSize { added: 0, deleted: 0 });
    }

    #[test]
    fn one_substitution() {
        // brute force: LCS([a b c], [a x c]) = 2
        assert_eq!(brute_lcs(&ids("a b c"), &ids("a x c")), 2);
        let d = token_delta(&ids("a b c"), &ids("a x c"));
        assert_eq!((d.added, d.deleted, d.total()), (1, 1, 2));
    }

    #[test]
    fn empty_baseline() {
        let d = token_delta(&[], &ids("a b"));
        assert_eq!((d.added, d.deleted, d.total()), (2, 0, 2));
    }

    #[test]
    fn kind_participates_in_equality() {
        let a = vec![Token::new(TokenKind::Identifier, "1")];
        let b = vec![Token::new(TokenKind::IntLiteral, "1")];
        assert_eq!(token_delta(&a, &b).total(), 2);
    }

    #[test]
    fn sim_on_token_sequences() {
        // left=[a b c], right=[a x c], mid=[a b x c]
        // brute force: Δ(mid,right) = 4+3-2*3 = 1, Δ(left,right) = 2
        let (l, r, m) = (ids("a b c"), ids("a x c"), ids("a b x c"));
        assert_eq!(brute_lcs(&m, &r), 3);
        let residual = token_delta(&m, &r).total();
        let baseline = token_delta(&l, &r).total();
        assert_eq!((residual, baseline), (1, 2));
        assert_eq!(sim_from_totals(residual, baseline).unwrap(), SimScore(0.5));
    }

    #[test]
    fn sim_endpoints_on_methods() {
        let left = parse_method("int f(int x){return x+1;}").unwrap();
        let right = parse_method("int f(int x){return 1+x;}").unwrap();
        assert_eq!(sim(&right, &left, &right).unwrap(), SimScore(1.0));
        assert_eq!(sim(&left, &left, &right).unwrap(), SimScore(0.0));
    }

    #[test]
    fn degenerate_baseline() {
        let left = parse_method("int f(int x){return x+1;}").unwrap();
        let mid = parse_method("int f(int x){return (x+1);}").unwrap();
        assert_eq!(sim(&left, &left, &left).unwrap(), SimScore(1.0));
        assert_eq!(
            sim(&mid, &left, &left),
            Err(MetricError::BaselineZero { residual: 2 })
        );
    }

    fn small_tokens(max: usize) -> impl Strategy<Value = Vec<Token>> {
        prop::collection::vec(0u8..4, 0..=max).prop_map(|v| {
            v.into_iter()
                .map(|i| Token::new(TokenKind::Identifier, ((b'a' + i) as char).to_string()))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force(a in small_tokens(12), b in small_tokens(12)) {
            prop_assert_eq!(lcs_len(&a, &b), brute_lcs(&a, &b));
        }

        #[test]
        fn total_is_symmetric(a in small_tokens(30), b in small_tokens(30)) {
            prop_assert_eq!(token_delta(&a, &b).total(), token_delta(&b, &a).total());
            prop_assert_eq!(token_delta(&a, &a).total(), 0);
        }
    }
}
