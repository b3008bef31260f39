//! Seeded random traces and template formulas for benchmarking and testing.

use rand::Rng;

use crate::robustness::Trace;
use crate::stl::{Formula, Interval};
use crate::word::Width;

/// Largest timestamp gap; gaps are uniform over `[1, MAX_GAP]`.
pub const MAX_GAP: i64 = 1_999_999;
/// Largest value step; steps are uniform over `[-MAX_STEP, MAX_STEP]`.
pub const MAX_STEP: i64 = 2_000_000;

/// Formula shapes with placeholders for intervals `I, J, K, L` and atoms
/// `p, q, r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Template {
    /// `G_I F_J p`
    AlwaysEventually,
    /// `(!p) U_I (G_J q)`
    NotUntilAlways,
    /// `(G_I p) -> (F_J q)`
    AlwaysImpliesEventually,
    /// `G_I (p && q)`
    AlwaysAnd,
    /// `(G_I (p || q)) U_J r`
    AlwaysOrUntil,
    /// `(G_I F_J p) -> (G_K F_L q)`
    RecurrenceImplies,
    /// `F_I (p U_J (q -> r))`
    EventuallyUntilImplies,
    /// `F_I G_J !p`
    EventuallyAlwaysNot,
}

impl Template {
    pub const ALL: [Template; 8] = [
        Template::AlwaysEventually,
        Template::NotUntilAlways,
        Template::AlwaysImpliesEventually,
        Template::AlwaysAnd,
        Template::AlwaysOrUntil,
        Template::RecurrenceImplies,
        Template::EventuallyUntilImplies,
        Template::EventuallyAlwaysNot,
    ];

    pub fn of_depth(depth: usize) -> &'static [Template] {
        match depth {
            3 => &Self::ALL[..4],
            4 => &Self::ALL[4..],
            _ => &[],
        }
    }

    pub fn depth(self) -> usize {
        if Self::ALL[..4].contains(&self) {
            3
        } else {
            4
        }
    }

    pub fn intervals(self) -> usize {
        match self {
            Template::AlwaysAnd => 1,
            Template::RecurrenceImplies => 4,
            _ => 2,
        }
    }

    pub fn atoms(self) -> usize {
        match self {
            Template::AlwaysEventually | Template::EventuallyAlwaysNot => 1,
            Template::AlwaysOrUntil | Template::EventuallyUntilImplies => 3,
            _ => 2,
        }
    }

    /// Fill the placeholders; extra entries are ignored.
    pub fn instantiate(self, iv: &[Interval], atoms: &[Formula]) -> Formula {
        assert!(iv.len() >= self.intervals() && atoms.len() >= self.atoms());
        let p = || atoms[0].clone();
        let q = || atoms[1].clone();
        let r = || atoms[2].clone();
        match self {
            Template::AlwaysEventually => Formula::always(iv[0], Formula::eventually(iv[1], p())),
            Template::NotUntilAlways => p().not().until(iv[0], Formula::always(iv[1], q())),
            Template::AlwaysImpliesEventually => {
                Formula::always(iv[0], p()).implies(Formula::eventually(iv[1], q()))
            }
            Template::AlwaysAnd => Formula::always(iv[0], p().and(q())),
            Template::AlwaysOrUntil => Formula::always(iv[0], p().or(q())).until(iv[1], r()),
            Template::RecurrenceImplies => Formula::always(iv[0], Formula::eventually(iv[1], p()))
                .implies(Formula::always(iv[2], Formula::eventually(iv[3], q()))),
            Template::EventuallyUntilImplies => {
                Formula::eventually(iv[0], p().until(iv[1], q().implies(r())))
            }
            Template::EventuallyAlwaysNot => {
                Formula::eventually(iv[0], Formula::always(iv[1], p().not()))
            }
        }
    }
}

/// Formula node capacity that fits every template of `depth`.
pub fn capacity_for_depth(depth: usize) -> usize {
    Template::of_depth(depth)
        .iter()
        .map(|t| {
            t.instantiate(
                &[Interval::unbounded(0).unwrap(); 4],
                &[Formula::True, Formula::True, Formula::True],
            )
            .node_count()
        })
        .max()
        .unwrap_or(1)
}

/// Interval and atom choices for the template placeholders.
#[derive(Debug, Clone)]
pub struct Pools {
    pub intervals: Vec<Interval>,
    pub atoms: Vec<Formula>,
}

impl Pools {
    /// The large-scale pools matching the trace distribution.
    pub fn standard() -> Self {
        let b = |l, u| Interval::bounded(l, u).unwrap();
        Pools {
            intervals: vec![
                Interval::unbounded(0).unwrap(),
                b(1_000_000, 2_000_000),
                b(0, 3_000_000),
                b(5_000_000, 20_000_000),
                b(600_000_000, 700_000_000),
                b(30_000_000, 31_000_000),
            ],
            atoms: vec![
                Formula::ge(5_000_000),
                Formula::ge(0),
                Formula::ge(-3_000_000),
            ],
        }
    }

    /// Pools for unit-step traces over small values.
    pub fn small() -> Self {
        let b = |l, u| Interval::bounded(l, u).unwrap();
        Pools {
            intervals: vec![Interval::unbounded(0).unwrap(), b(1, 3), b(0, 2)],
            atoms: vec![Formula::ge(1), Formula::ge(0), Formula::ge(-1)],
        }
    }

    pub fn random_formula<R: Rng + ?Sized>(&self, rng: &mut R, template: Template) -> Formula {
        let iv: Vec<Interval> = (0..template.intervals())
            .map(|_| self.intervals[rng.gen_range(0..self.intervals.len())])
            .collect();
        let atoms: Vec<Formula> = (0..template.atoms())
            .map(|_| self.atoms[rng.gen_range(0..self.atoms.len())].clone())
            .collect();
        template.instantiate(&iv, &atoms)
    }

    /// Every instantiation of `template` over the pools.
    pub fn all_instances(&self, template: Template) -> Vec<Formula> {
        let (ni, na) = (template.intervals(), template.atoms());
        let total_i = self.intervals.len().pow(ni as u32);
        let total_a = self.atoms.len().pow(na as u32);
        let digits = |mut k: usize, base: usize, count: usize| -> Vec<usize> {
            (0..count)
                .map(|_| {
                    let d = k % base;
                    k /= base;
                    d
                })
                .collect()
        };
        let mut out = Vec::with_capacity(total_i * total_a);
        for ki in 0..total_i {
            let iv: Vec<Interval> = digits(ki, self.intervals.len(), ni)
                .into_iter()
                .map(|d| self.intervals[d])
                .collect();
            for ka in 0..total_a {
                let atoms: Vec<Formula> = digits(ka, self.atoms.len(), na)
                    .into_iter()
                    .map(|d| self.atoms[d].clone())
                    .collect();
                out.push(template.instantiate(&iv, &atoms));
            }
        }
        out
    }
}

/// Random template of `depth` (3 or 4), instantiated from `pools`.
pub fn random_formula<R: Rng + ?Sized>(
    rng: &mut R,
    depth: usize,
    pools: &Pools,
) -> Option<(Template, Formula)> {
    let choices = Template::of_depth(depth);
    if choices.is_empty() {
        return None;
    }
    let t = choices[rng.gen_range(0..choices.len())];
    Some((t, pools.random_formula(rng, t)))
}

/// Random-walk trace: uniform timestamp gaps and value steps, starting value
/// uniform over one step range. Values are clamped to the width's range.
pub fn random_trace<R: Rng + ?Sized>(rng: &mut R, len: usize, width: Width) -> Trace {
    let mut times = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    let (mut t, mut x) = (0i64, rng.gen_range(-MAX_STEP..=MAX_STEP));
    for i in 0..len {
        if i > 0 {
            t += rng.gen_range(1..=MAX_GAP);
            x += rng.gen_range(-MAX_STEP..=MAX_STEP);
        }
        times.push(t.min(width.pinf()));
        values.push(x.clamp(width.ninf(), width.pinf()));
    }
    Trace::new(times, values, width).expect("generated trace exceeds the word width")
}

/// Every trace of length `1..=max_len` with unit timestamps over `values`.
pub fn all_small_traces(values: &[i64], max_len: usize, width: Width) -> Vec<Trace> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<i64>> = vec![vec![]];
    for len in 1..=max_len {
        frontier = frontier
            .iter()
            .flat_map(|prefix| {
                values
                    .iter()
                    .map(move |&v| prefix.iter().copied().chain([v]).collect())
            })
            .collect();
        for xs in &frontier {
            out.push(Trace::new((0..len as i64).collect(), xs.clone(), width).unwrap());
        }
    }
    out
}
