//! Strict and partial span matching.
//!
//! Predicted and gold spans pair up one-to-one: strict mode requires
//! identical offsets, partial mode requires character overlap; both
//! require equal kinds. The pairing is a maximum bipartite matching, so
//! tp is the largest achievable and no span is counted twice. Predictions
//! that could not be grounded back to the text participate as automatic
//! false positives.

use serde::{Deserialize, Serialize};

use crate::corpus::SpanKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    Strict,
    Partial,
}

impl std::fmt::Display for MatchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatchMode::Strict => "strict",
            MatchMode::Partial => "partial",
        })
    }
}

/// Offsets-plus-kind view of a span, the only parts matching inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSpan {
    pub start: usize,
    pub end: usize,
    pub kind: SpanKind,
}

impl MatchSpan {
    pub fn new(start: usize, end: usize, kind: SpanKind) -> Self {
        MatchSpan { start, end, kind }
    }
}

/// Span-level tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl MatchCounts {
    pub fn add(&mut self, other: &MatchCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// Matching outcome: counts plus the matched `(gold index, pred index)`
/// pairs, each side used at most once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanMatchResult {
    pub mode: MatchMode,
    pub counts: MatchCounts,
    pub pairs: Vec<(usize, usize)>,
}

fn compatible(gold: &MatchSpan, pred: &MatchSpan, mode: MatchMode) -> bool {
    if gold.kind != pred.kind {
        return false;
    }
    match mode {
        MatchMode::Strict => gold.start == pred.start && gold.end == pred.end,
        MatchMode::Partial => gold.start.max(pred.start) < gold.end.min(pred.end),
    }
}

/// Matches predictions against gold spans in one text.
///
/// `pred` entries are `None` for outputs that could not be grounded; they
/// count as false positives. tp is maximal over all one-to-one pairings.
pub fn span_match(
    pred: &[Option<MatchSpan>],
    gold: &[MatchSpan],
    mode: MatchMode,
) -> SpanMatchResult {
    // Augmenting-path maximum matching over the compatibility graph.
    let mut pred_of_gold: Vec<Option<usize>> = vec![None; gold.len()];
    let mut gold_of_pred: Vec<Option<usize>> = vec![None; pred.len()];

    fn augment(
        g: usize,
        gold: &[MatchSpan],
        pred: &[Option<MatchSpan>],
        mode: MatchMode,
        visited: &mut [bool],
        pred_of_gold: &mut [Option<usize>],
        gold_of_pred: &mut [Option<usize>],
    ) -> bool {
        for (p, candidate) in pred.iter().enumerate() {
            let Some(candidate) = candidate else { continue };
            if visited[p] || !compatible(&gold[g], candidate, mode) {
                continue;
            }
            visited[p] = true;
            let free = match gold_of_pred[p] {
                None => true,
                Some(owner) => {
                    augment(owner, gold, pred, mode, visited, pred_of_gold, gold_of_pred)
                }
            };
            if free {
                gold_of_pred[p] = Some(g);
                pred_of_gold[g] = Some(p);
                return true;
            }
        }
        false
    }

    for g in 0..gold.len() {
        let mut visited = vec![false; pred.len()];
        augment(
            g,
            gold,
            pred,
            mode,
            &mut visited,
            &mut pred_of_gold,
            &mut gold_of_pred,
        );
    }

    let pairs: Vec<(usize, usize)> = pred_of_gold
        .iter()
        .enumerate()
        .filter_map(|(g, p)| p.map(|p| (g, p)))
        .collect();
    let tp = pairs.len() as u64;
    SpanMatchResult {
        mode,
        counts: MatchCounts {
            tp,
            fp: pred.len() as u64 - tp,
            fn_: gold.len() as u64 - tp,
        },
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ae(start: usize, end: usize) -> MatchSpan {
        MatchSpan::new(start, end, SpanKind::Ae)
    }

    #[test]
    fn strict_requires_exact_offsets() {
        let result = span_match(&[Some(ae(0, 5))], &[ae(0, 5)], MatchMode::Strict);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 1,
                fp: 0,
                fn_: 0
            }
        );
        assert_eq!(result.pairs, vec![(0, 0)]);

        let result = span_match(&[Some(ae(3, 8))], &[ae(0, 5)], MatchMode::Strict);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 0,
                fp: 1,
                fn_: 1
            }
        );
    }

    #[test]
    fn partial_requires_character_overlap() {
        let result = span_match(&[Some(ae(3, 8))], &[ae(0, 5)], MatchMode::Partial);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 1,
                fp: 0,
                fn_: 0
            }
        );

        // Touching spans do not overlap.
        let result = span_match(&[Some(ae(5, 8))], &[ae(0, 5)], MatchMode::Partial);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 0,
                fp: 1,
                fn_: 1
            }
        );
    }

    #[test]
    fn kinds_must_agree() {
        let pred = [Some(MatchSpan::new(0, 5, SpanKind::Drug))];
        let result = span_match(&pred, &[ae(0, 5)], MatchMode::Partial);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 0,
                fp: 1,
                fn_: 1
            }
        );
    }

    #[test]
    fn each_span_matches_at_most_once() {
        // Two identical predictions, one gold: one tp, one fp.
        let result = span_match(
            &[Some(ae(0, 5)), Some(ae(0, 5))],
            &[ae(0, 5), ae(6, 9)],
            MatchMode::Strict,
        );
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 1,
                fp: 1,
                fn_: 1
            }
        );

        // One wide gold span cannot absorb two predictions.
        let result = span_match(
            &[Some(ae(0, 3)), Some(ae(4, 8))],
            &[ae(0, 10)],
            MatchMode::Partial,
        );
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 1,
                fp: 1,
                fn_: 0
            }
        );
    }

    #[test]
    fn matching_is_maximum_not_greedy() {
        // Greedy left-to-right would pair pred0 with gold1 and strand
        // pred1; the maximum matching pairs pred0-gold0 and pred1-gold1.
        let pred = [Some(ae(0, 10)), Some(ae(5, 10))];
        let gold = [ae(0, 6), ae(5, 10)];
        let result = span_match(&pred, &gold, MatchMode::Partial);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 2,
                fp: 0,
                fn_: 0
            }
        );
    }

    #[test]
    fn ungrounded_predictions_are_false_positives() {
        let result = span_match(&[None, Some(ae(0, 5))], &[ae(0, 5)], MatchMode::Strict);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 1,
                fp: 1,
                fn_: 0
            }
        );
    }

    #[test]
    fn empty_sides_score_cleanly() {
        let result = span_match(&[], &[ae(0, 5)], MatchMode::Strict);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 0,
                fp: 0,
                fn_: 1
            }
        );
        let result = span_match(&[Some(ae(0, 5))], &[], MatchMode::Partial);
        assert_eq!(
            result.counts,
            MatchCounts {
                tp: 0,
                fp: 1,
                fn_: 0
            }
        );
        let result = span_match(&[], &[], MatchMode::Strict);
        assert_eq!(result.counts, MatchCounts::default());
    }

    /// Exhaustive maximum matching by recursive search, the independent
    /// oracle the fast implementation is checked against.
    fn brute_force_max(pred: &[Option<MatchSpan>], gold: &[MatchSpan], mode: MatchMode) -> u64 {
        fn search(
            g: usize,
            used: &mut [bool],
            pred: &[Option<MatchSpan>],
            gold: &[MatchSpan],
            mode: MatchMode,
        ) -> u64 {
            if g == gold.len() {
                return 0;
            }
            // Leave gold[g] unmatched.
            let mut best = search(g + 1, used, pred, gold, mode);
            for p in 0..pred.len() {
                let Some(candidate) = pred[p] else { continue };
                if !used[p] && compatible(&gold[g], &candidate, mode) {
                    used[p] = true;
                    best = best.max(1 + search(g + 1, used, pred, gold, mode));
                    used[p] = false;
                }
            }
            best
        }
        let mut used = vec![false; pred.len()];
        search(0, &mut used, pred, gold, mode)
    }

    fn span_strategy() -> impl Strategy<Value = MatchSpan> {
        (0usize..12, 1usize..6, 0usize..3)
            .prop_map(|(start, len, kind)| MatchSpan::new(start, start + len, SpanKind::ALL[kind]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn agrees_with_brute_force_oracle(
            pred in proptest::collection::vec(proptest::option::weighted(0.9, span_strategy()), 0..5),
            gold in proptest::collection::vec(span_strategy(), 0..5),
            strict in any::<bool>(),
        ) {
            let mode = if strict { MatchMode::Strict } else { MatchMode::Partial };
            let result = span_match(&pred, &gold, mode);
            let expected = brute_force_max(&pred, &gold, mode);
            prop_assert_eq!(result.counts.tp, expected);
            prop_assert_eq!(result.counts.fp, pred.len() as u64 - expected);
            prop_assert_eq!(result.counts.fn_, gold.len() as u64 - expected);
            // Pairs are a valid matching: each side used at most once.
            let mut golds: Vec<usize> = result.pairs.iter().map(|(g, _)| *g).collect();
            let mut preds: Vec<usize> = result.pairs.iter().map(|(_, p)| *p).collect();
            golds.dedup();
            preds.sort_unstable();
            preds.dedup();
            prop_assert_eq!(golds.len(), result.pairs.len());
            prop_assert_eq!(preds.len(), result.pairs.len());
        }

        #[test]
        fn strict_never_beats_partial(
            pred in proptest::collection::vec(proptest::option::weighted(0.9, span_strategy()), 0..6),
            gold in proptest::collection::vec(span_strategy(), 0..6),
        ) {
            let strict = span_match(&pred, &gold, MatchMode::Strict);
            let partial = span_match(&pred, &gold, MatchMode::Partial);
            prop_assert!(strict.counts.tp <= partial.counts.tp);
        }

        #[test]
        fn swapping_sides_swaps_fp_and_fn(
            a in proptest::collection::vec(span_strategy(), 0..6),
            b in proptest::collection::vec(span_strategy(), 0..6),
            strict in any::<bool>(),
        ) {
            let mode = if strict { MatchMode::Strict } else { MatchMode::Partial };
            let a_opt: Vec<Option<MatchSpan>> = a.iter().copied().map(Some).collect();
            let b_opt: Vec<Option<MatchSpan>> = b.iter().copied().map(Some).collect();
            let forward = span_match(&a_opt, &b, mode);
            let backward = span_match(&b_opt, &a, mode);
            prop_assert_eq!(forward.counts.tp, backward.counts.tp);
            prop_assert_eq!(forward.counts.fp, backward.counts.fn_);
            prop_assert_eq!(forward.counts.fn_, backward.counts.fp);
        }
    }
}
