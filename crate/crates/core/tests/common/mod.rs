//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use privmon::robustness::Trace;
use privmon::stl::{Formula, Interval};
use privmon::word::Width;
use proptest::prelude::*;
use rand::Rng;

/// Timing and value scale of generated inputs.
#[derive(Debug, Clone, Copy)]
pub struct Scale {
    pub max_gap: i64,
    pub max_abs: i64,
    pub max_bound: i64,
}

pub const SMALL: Scale = Scale {
    max_gap: 3,
    max_abs: 5,
    max_bound: 8,
};

pub fn random_interval<R: Rng + ?Sized>(rng: &mut R, s: Scale) -> Interval {
    let lower = if rng.gen_bool(0.4) {
        0
    } else {
        rng.gen_range(0..s.max_bound)
    };
    if rng.gen_bool(0.25) {
        Interval::unbounded(lower).unwrap()
    } else {
        Interval::bounded(lower, lower + rng.gen_range(1..=s.max_bound)).unwrap()
    }
}

/// Random formula with at most `budget` nodes, every operator reachable.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, budget: usize, s: Scale) -> Formula {
    assert!(budget >= 1);
    let leaf = |rng: &mut R| match rng.gen_range(0..9) {
        0 => Formula::True,
        k if k % 2 == 1 => Formula::ge(rng.gen_range(-s.max_abs..=s.max_abs)),
        _ => Formula::le(rng.gen_range(-s.max_abs..=s.max_abs)),
    };
    if budget == 1 || rng.gen_bool(0.2) {
        return leaf(rng);
    }
    let unary = budget == 2 || rng.gen_bool(0.4);
    if unary {
        let a = random_tree(rng, budget - 1, s);
        match rng.gen_range(0..3) {
            0 => a.not(),
            1 => Formula::always(random_interval(rng, s), a),
            _ => Formula::eventually(random_interval(rng, s), a),
        }
    } else {
        let left = rng.gen_range(1..budget - 1);
        let a = random_tree(rng, left, s);
        let b = random_tree(rng, budget - 1 - left, s);
        match rng.gen_range(0..5) {
            0 => a.and(b),
            1 => a.or(b),
            2 => a.implies(b),
            3 => a.iff(b),
            _ => a.until(random_interval(rng, s), b),
        }
    }
}

pub fn random_small_trace<R: Rng + ?Sized>(rng: &mut R, len: usize, s: Scale, w: Width) -> Trace {
    let mut t = 0;
    let mut times = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 {
            t += rng.gen_range(1..=s.max_gap);
        }
        times.push(t);
        values.push(rng.gen_range(-s.max_abs..=s.max_abs));
    }
    Trace::new(times, values, w).unwrap()
}

pub fn interval_strategy() -> impl Strategy<Value = Interval> {
    (0i64..6, prop::option::of(1i64..8)).prop_map(|(l, len)| match len {
        Some(d) => Interval::bounded(l, l + d).unwrap(),
        None => Interval::unbounded(l).unwrap(),
    })
}

pub fn formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        (-5i64..=5).prop_map(Formula::ge),
        (-5i64..=5).prop_map(Formula::le),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.iff(b)),
            (inner.clone(), interval_strategy(), inner.clone()).prop_map(|(a, i, b)| a.until(i, b)),
            (interval_strategy(), inner.clone()).prop_map(|(i, a)| Formula::always(i, a)),
            (interval_strategy(), inner).prop_map(|(i, a)| Formula::eventually(i, a)),
        ]
    })
}

/// Formulas without negation or `<=` atoms, so robustness is monotone in the
/// signal values.
pub fn positive_formula_strategy() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![Just(Formula::True), (-5i64..=5).prop_map(Formula::ge)];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), interval_strategy(), inner.clone()).prop_map(|(a, i, b)| a.until(i, b)),
            (interval_strategy(), inner.clone()).prop_map(|(i, a)| Formula::always(i, a)),
            (interval_strategy(), inner).prop_map(|(i, a)| Formula::eventually(i, a)),
        ]
    })
}

pub fn trace_strategy(w: Width) -> impl Strategy<Value = Trace> {
    prop::collection::vec((1i64..=3, -6i64..=6), 1..=7).prop_map(move |samples| {
        let mut t = 0;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (k, (gap, x)) in samples.into_iter().enumerate() {
            if k > 0 {
                t += gap;
            }
            times.push(t);
            values.push(x);
        }
        Trace::new(times, values, w).unwrap()
    })
}
