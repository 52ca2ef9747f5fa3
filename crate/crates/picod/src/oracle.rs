//! Brute-force exact optima for small instances, and the consistency
//! harness that pins every other algorithm between proven bounds.
//!
//! A length-ℓ linear scheme is determined, for satisfaction purposes, by the
//! row space of its matrix, so the search enumerates each ℓ-dimensional
//! subspace exactly once via canonical reduced-echelon representatives.
//! Columns of degree-0 messages are forced to zero: no request set mentions
//! them, so no projection ever reads them, and any scheme can be zeroed
//! there without changing satisfaction. The enumeration therefore runs over
//! the active columns only and re-embeds candidates afterwards.

use log::debug;
use thiserror::Error;

use crate::bounds::{
    decide_length1, mais_min_over_choices, nesting_number, Budgets, LengthOneOutcome, NestingMode,
};
use crate::construct::{
    degree_descending, grcov_greedy, min_cover_exact, DegreeDescendingOptions,
};
use crate::gf::{FieldOrder, RowMatrix, RrefIter};
use crate::instance::PicodInstance;
use crate::scheme::{satisfies_all, Scheme};

/// Steps granted to the internal lower-bound derivation that picks the
/// first length to try.
const DERIVE_BUDGET: u64 = 100_000;

/// Search controls for [`exact_linear_optimum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Longest scheme to look for before giving up.
    pub max_len: usize,
    /// Maximum number of candidate row spaces to test.
    pub budget: u64,
    /// First length to try. `None` derives a starting point from the
    /// relaxed nesting depth (a proven lower bound, so skipping shorter
    /// lengths is sound); `Some(s)` starts at `s` and is taken on trust —
    /// results then carry `exact = false` unless `s <= 1`.
    pub start_len: Option<usize>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_len: 4,
            budget: 200_000,
            start_len: None,
        }
    }
}

/// A proven-optimal scheme length with its witness.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Minimum length of any linear scheme over the chosen field.
    pub optimum: usize,
    /// A satisfying scheme of that length.
    pub scheme: Scheme,
    /// Candidate row spaces tested.
    pub explored: u64,
    /// True when every shorter length was ruled out, either by exhaustive
    /// enumeration or by the internally derived lower bound.
    pub exact: bool,
    /// The first length the search actually tried.
    pub start_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no linear scheme of length at most {max_len} exists over this field")]
    NoSchemeWithinMaxLen { max_len: usize },
    #[error("oracle budget exhausted after testing {explored} candidate row spaces")]
    BudgetExhausted { explored: u64 },
}

/// Finds the exact minimum linear scheme length over `field` by enumerating
/// row spaces in increasing dimension.
pub fn exact_linear_optimum(
    inst: &PicodInstance,
    field: FieldOrder,
    opts: &OracleOptions,
) -> Result<OracleResult, OracleError> {
    if inst.client_count() == 0 {
        let empty: &[Vec<usize>] = &[];
        let scheme = Scheme::from_supports(field, inst.message_count(), empty)
            .expect("empty scheme is always well-formed");
        return Ok(OracleResult {
            optimum: 0,
            scheme,
            explored: 0,
            exact: true,
            start_len: 0,
        });
    }

    let degrees = inst.degrees();
    let active: Vec<usize> = (1..=inst.message_count())
        .filter(|&v| degrees.degree(v) > 0)
        .collect();
    let dims = active.len();

    let (start, exact) = match opts.start_len {
        Some(s) => (s.max(1), s <= 1),
        None => {
            let derived = nesting_number(inst, NestingMode::Relaxed, DERIVE_BUDGET);
            (derived.length.max(1), true)
        }
    };
    let top = opts.max_len.min(dims);
    if start > top {
        return Err(OracleError::NoSchemeWithinMaxLen {
            max_len: opts.max_len,
        });
    }

    let mut explored: u64 = 0;
    for len in start..=top {
        debug!("oracle: trying length {len} over {dims} active columns");
        for candidate in RrefIter::new(field, dims, len) {
            if explored == opts.budget {
                return Err(OracleError::BudgetExhausted { explored });
            }
            explored += 1;
            let mut full = RowMatrix::zero(field, len, inst.message_count());
            for r in 0..len {
                for (j, &v) in active.iter().enumerate() {
                    let value = candidate.get(r, j);
                    if value != 0 {
                        full.set(r, v - 1, value);
                    }
                }
            }
            if satisfies_all(inst, &full) {
                return Ok(OracleResult {
                    optimum: len,
                    scheme: Scheme::new(full),
                    explored,
                    exact,
                    start_len: start,
                });
            }
        }
    }
    Err(OracleError::NoSchemeWithinMaxLen {
        max_len: opts.max_len,
    })
}

/// Every quantity in the bound chain, computed by its own route.
///
/// The quantities are provably ordered: strict nesting ≤ relaxed nesting
/// ≤ chain minimum ≤ GF(2) linear optimum ≤ exact minimum cover ≤
/// constructed length ≤ maximum degree. Budget-starved entries are `None`
/// and simply drop out of the comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub strict_nesting: usize,
    pub relaxed_nesting: usize,
    pub mais_min: Option<usize>,
    pub linear_optimum: Option<usize>,
    pub min_cover: Option<usize>,
    pub construction_length: usize,
    pub max_degree: usize,
    /// Greedy residual-cover length; reported for context, not part of the
    /// proven chain.
    pub grcov_length: usize,
    /// Whether one transmission suffices, when decidable within budget.
    /// Must equal `min_cover == 1` whenever both are known.
    pub one_transmission: Option<bool>,
    /// Human-readable descriptions of any chain violations (always empty
    /// unless an implementation is wrong).
    pub violations: Vec<String>,
}

impl CrossCheck {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Computes the full chain over GF(2) and records any inequality violations.
pub fn cross_check(inst: &PicodInstance, budgets: &Budgets) -> CrossCheck {
    let field = FieldOrder::BINARY;
    let strict = nesting_number(inst, NestingMode::Strict, budgets.nesting);
    let relaxed = nesting_number(inst, NestingMode::Relaxed, budgets.nesting);
    let mais = mais_min_over_choices(inst, budgets.mais).ok().map(|m| m.value);
    let construction = degree_descending(
        inst,
        &DegreeDescendingOptions {
            field,
            fast_descent: true,
        },
    );
    let construction_length = construction.scheme.length();
    let grcov_length = grcov_greedy(inst, field).length();
    let cover = min_cover_exact(inst, budgets.cover);
    let linear = exact_linear_optimum(
        inst,
        field,
        &OracleOptions {
            max_len: construction_length.max(1),
            budget: budgets.oracle,
            start_len: Some(1),
        },
    )
    .ok();
    let one_transmission = match decide_length1(inst, budgets.length1) {
        Ok(outcome) => Some(matches!(outcome, LengthOneOutcome::Feasible { .. })),
        Err(_) => None,
    };

    let max_degree = inst.degrees().max_degree();
    let mut report = CrossCheck {
        strict_nesting: strict.length,
        relaxed_nesting: relaxed.length,
        mais_min: mais,
        linear_optimum: linear.as_ref().map(|r| r.optimum),
        min_cover: cover.as_ref().map(|c| c.length),
        construction_length,
        max_degree,
        grcov_length,
        one_transmission,
        violations: Vec::new(),
    };

    let chain: Vec<(&str, Option<usize>)> = vec![
        ("strict nesting", Some(report.strict_nesting)),
        ("relaxed nesting", Some(report.relaxed_nesting)),
        ("chain minimum", report.mais_min),
        ("linear optimum", report.linear_optimum),
        ("minimum cover", report.min_cover),
        ("construction length", Some(report.construction_length)),
        ("maximum degree", Some(report.max_degree)),
    ];
    let known: Vec<(&str, usize)> = chain
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
        .collect();
    for pair in known.windows(2) {
        let (lo_name, lo) = pair[0];
        let (hi_name, hi) = pair[1];
        if lo > hi {
            report
                .violations
                .push(format!("{lo_name} = {lo} exceeds {hi_name} = {hi}"));
        }
    }
    if let (Some(one), Some(cover_len)) = (report.one_transmission, report.min_cover) {
        if one != (cover_len == 1) {
            report.violations.push(format!(
                "one-transmission decision ({one}) contradicts minimum cover {cover_len}"
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scheme::verify;

    #[test]
    fn nine_message_example_optimum_is_two() {
        let fx = fixtures::example2();
        let result = exact_linear_optimum(
            &fx.instance,
            FieldOrder::BINARY,
            &OracleOptions {
                max_len: 4,
                budget: 60_000,
                start_len: Some(1),
            },
        )
        .unwrap();
        assert_eq!(result.optimum, 2);
        assert!(result.exact);
        // All 2^9 - 1 one-dimensional row spaces over the 9 active columns
        // must have been ruled out first.
        assert!(result.explored > 511);
        let report = verify(&fx.instance, &result.scheme).unwrap();
        assert!(report.all_satisfied);
    }

    #[test]
    fn overlapping_pairs_admit_single_row() {
        let inst =
            PicodInstance::new(4, vec![vec![1, 2], vec![3, 4], vec![1, 3]]).unwrap();
        let result =
            exact_linear_optimum(&inst, FieldOrder::BINARY, &OracleOptions::default()).unwrap();
        assert_eq!(result.optimum, 1);
        assert!(result.exact);
        assert!(verify(&inst, &result.scheme).unwrap().all_satisfied);
    }

    #[test]
    fn triangle_needs_two_rows_and_short_caps_report_absence() {
        let inst =
            PicodInstance::new(3, vec![vec![1, 2], vec![1, 3], vec![2, 3]]).unwrap();
        let err = exact_linear_optimum(
            &inst,
            FieldOrder::BINARY,
            &OracleOptions {
                max_len: 1,
                budget: 1_000,
                start_len: Some(1),
            },
        )
        .unwrap_err();
        assert_eq!(err, OracleError::NoSchemeWithinMaxLen { max_len: 1 });
        let ok = exact_linear_optimum(
            &inst,
            FieldOrder::BINARY,
            &OracleOptions {
                max_len: 3,
                budget: 10_000,
                start_len: Some(1),
            },
        )
        .unwrap();
        assert_eq!(ok.optimum, 2);
    }

    #[test]
    fn inactive_columns_are_skipped() {
        // One client among 40 messages: only 2 columns are active, so the
        // rank-1 level has just 3 binary candidates.
        let inst = PicodInstance::new(40, vec![vec![1, 40]]).unwrap();
        let result =
            exact_linear_optimum(&inst, FieldOrder::BINARY, &OracleOptions::default()).unwrap();
        assert_eq!(result.optimum, 1);
        assert!(result.explored <= 3);
        assert_eq!(result.scheme.message_count(), 40);
        for support in result.scheme.supports() {
            assert!(support.iter().all(|&v| v == 1 || v == 40));
        }
    }

    #[test]
    fn ternary_field_is_supported() {
        let inst = PicodInstance::new(2, vec![vec![1, 2]]).unwrap();
        let field = FieldOrder::new(3).unwrap();
        let result = exact_linear_optimum(&inst, field, &OracleOptions::default()).unwrap();
        assert_eq!(result.optimum, 1);
        assert!(verify(&inst, &result.scheme).unwrap().all_satisfied);
    }

    #[test]
    fn tiny_budget_aborts_with_count() {
        let fx = fixtures::example1();
        let err = exact_linear_optimum(
            &fx.instance,
            FieldOrder::BINARY,
            &OracleOptions {
                max_len: 4,
                budget: 10,
                start_len: Some(1),
            },
        )
        .unwrap_err();
        assert_eq!(err, OracleError::BudgetExhausted { explored: 10 });
    }

    #[test]
    fn trusted_start_marks_result_inexact() {
        let fx = fixtures::example2();
        let result = exact_linear_optimum(
            &fx.instance,
            FieldOrder::BINARY,
            &OracleOptions {
                max_len: 4,
                budget: 60_000,
                start_len: Some(2),
            },
        )
        .unwrap();
        assert_eq!(result.optimum, 2);
        assert!(!result.exact);
        assert_eq!(result.start_len, 2);
    }

    #[test]
    fn derived_start_skips_ruled_out_lengths() {
        let fx = fixtures::example2();
        let result = exact_linear_optimum(
            &fx.instance,
            FieldOrder::BINARY,
            &OracleOptions {
                max_len: 4,
                budget: 60_000,
                start_len: None,
            },
        )
        .unwrap();
        assert_eq!(result.optimum, 2);
        assert_eq!(result.start_len, 2);
        assert!(result.exact);
        // Skipping the 511 rank-1 candidates is visible in the count.
        assert!(result.explored <= 511 + 43_435);
    }

    #[test]
    fn chain_is_consistent_on_fixtures() {
        let fx = fixtures::example2();
        let report = cross_check(&fx.instance, &Budgets::default());
        assert!(report.consistent(), "violations: {:?}", report.violations);
        assert_eq!(report.strict_nesting, 2);
        assert_eq!(report.relaxed_nesting, 2);
        assert_eq!(report.mais_min, Some(2));
        assert_eq!(report.linear_optimum, Some(2));
        assert_eq!(report.min_cover, Some(2));
        assert_eq!(report.construction_length, 2);
        assert_eq!(report.max_degree, 2);
        assert_eq!(report.one_transmission, Some(false));

        let fx1 = fixtures::example1();
        let report1 = cross_check(&fx1.instance, &Budgets::default());
        assert!(report1.consistent(), "violations: {:?}", report1.violations);
        assert_eq!(report1.strict_nesting, 3);
        assert_eq!(report1.min_cover, Some(3));
        assert_eq!(report1.max_degree, 5);
    }

    #[test]
    fn matching_chain_is_all_ones() {
        let inst = PicodInstance::new(6, vec![vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let report = cross_check(&inst, &Budgets::default());
        assert!(report.consistent(), "violations: {:?}", report.violations);
        assert_eq!(
            (
                report.strict_nesting,
                report.relaxed_nesting,
                report.mais_min,
                report.linear_optimum,
                report.min_cover,
                report.construction_length,
                report.max_degree,
            ),
            (1, 1, Some(1), Some(1), Some(1), 1, 1)
        );
        assert_eq!(report.one_transmission, Some(true));
    }
}
