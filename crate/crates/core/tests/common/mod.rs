//! Random instance generators and brute-force oracles shared by the integration tests.
//!
//! The oracles only use the matroid rank function and plain enumeration; they do not call
//! into the analysis code they are used to check.

#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use uncontentious::dist::SubsetDistribution;
use uncontentious::matroid::{Matroid, WeightedMatroid};
use uncontentious::rational::{int, ratio, Rational};
use uncontentious::rng::Rng as StdRng;
use uncontentious::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Uniform,
    Partition,
    Graphic,
    Explicit,
    Linear,
}

pub const FAMILIES: [FamilyKind; 5] = [
    FamilyKind::Uniform,
    FamilyKind::Partition,
    FamilyKind::Graphic,
    FamilyKind::Explicit,
    FamilyKind::Linear,
];

fn random_partition(rng: &mut StdRng, n: usize) -> Matroid {
    let blocks_count = rng.random_range(1..=3.min(n.max(1)));
    let mut blocks = vec![Vec::new(); blocks_count];
    for e in 0..n {
        // an occasional element outside every block acts as a loop
        if rng.random_bool(0.9) {
            blocks[rng.random_range(0..blocks_count)].push(e);
        }
    }
    let caps: Vec<usize> = blocks.iter().map(|b| rng.random_range(0..=b.len())).collect();
    Matroid::partition(n, &blocks, &caps).expect("valid partition")
}

fn random_graphic(rng: &mut StdRng, n: usize) -> Matroid {
    let vertices = rng.random_range(2..=4);
    let edges: Vec<(usize, usize)> = (0..n)
        .map(|_| (rng.random_range(0..vertices), rng.random_range(0..vertices)))
        .collect();
    Matroid::graphic(vertices, &edges).expect("valid graph")
}

fn random_linear(rng: &mut StdRng, n: usize) -> Matroid {
    let dim = rng.random_range(1..=3);
    let columns = (0..n)
        .map(|_| (0..dim).map(|_| int(rng.random_range(-1..=2))).collect())
        .collect();
    Matroid::linear(columns).expect("valid columns")
}

pub fn random_matroid(rng: &mut StdRng, kind: FamilyKind, n: usize) -> Matroid {
    match kind {
        FamilyKind::Uniform => Matroid::uniform(n, rng.random_range(0..=n)),
        FamilyKind::Partition => random_partition(rng, n),
        FamilyKind::Graphic => random_graphic(rng, n),
        FamilyKind::Linear => random_linear(rng, n),
        FamilyKind::Explicit => {
            // list the independent sets of another random matroid
            let source = if rng.random_bool(0.5) {
                random_graphic(rng, n)
            } else {
                random_partition(rng, n)
            };
            let sets: Vec<Subset> = Subset::all(n).filter(|&s| source.is_independent(s)).collect();
            Matroid::explicit(n, &sets).expect("independent sets of a matroid")
        }
    }
}

/// Distinct random support sets with integer masses, normalized.
pub fn random_distribution(rng: &mut StdRng, n: usize, max_support: usize) -> SubsetDistribution {
    let mut all: Vec<Subset> = Subset::all(n).collect();
    all.shuffle(rng);
    let size = rng.random_range(1..=max_support.min(all.len()));
    let masses: Vec<i64> = (0..size).map(|_| rng.random_range(1..=12)).collect();
    let total: i64 = masses.iter().sum();
    let pairs: Vec<(Subset, Rational)> = all[..size]
        .iter()
        .zip(&masses)
        .map(|(s, &w)| (*s, ratio(w, total)))
        .collect();
    SubsetDistribution::explicit(n, &pairs).expect("normalized")
}

pub fn random_probability(rng: &mut StdRng, den: i64) -> Rational {
    ratio(rng.random_range(0..=den), den)
}

/// `max_F E|R∩F| / E rank(R∩F)` by direct enumeration; `None` stands for `+inf`.
/// Subsets with both expectations zero are skipped; all-zero marginals give 1.
pub fn oracle_alpha(m: &Matroid, d: &SubsetDistribution) -> Option<Rational> {
    let mut best = Rational::one();
    for f in Subset::all(m.n()) {
        let mut size = Rational::zero();
        let mut rank = Rational::zero();
        for (r, p) in d.support() {
            let meet = r.intersection(f);
            size += p * int(meet.len() as i64);
            rank += p * int(m.rank(meet) as i64);
        }
        if size.is_zero() {
            continue;
        }
        if rank.is_zero() {
            return None;
        }
        let value = size / rank;
        if value > best {
            best = value;
        }
    }
    Some(best)
}

/// Whether `x(S) <= scale * rank(S)` for every `S` and `0 <= x_i <= scale`.
pub fn oracle_in_scaled_polytope(m: &Matroid, x: &[Rational], scale: &Rational) -> bool {
    if x.iter().any(|v| v < &Rational::zero() || v > scale) {
        return false;
    }
    Subset::all(m.n()).all(|s| {
        let total: Rational = s.iter().map(|i| &x[i]).sum();
        total <= scale * int(m.rank(s) as i64)
    })
}

/// Improving set of a sample: scan elements from heaviest to lightest (lower index first among
/// ties), growing a greedy basis of the sample; an unsampled element improves when it is not
/// spanned by the heavier sampled elements kept so far.
pub fn oracle_improving_set(wm: &WeightedMatroid, sample: Subset) -> Subset {
    let n = wm.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| wm.weight(b).cmp(wm.weight(a)).then(a.cmp(&b)));
    let m = wm.matroid();
    let mut heavier = Subset::EMPTY;
    let mut improving = Subset::EMPTY;
    for &e in &order {
        if wm.weight(e).is_zero() {
            continue;
        }
        if sample.contains(e) {
            heavier = heavier.with(e);
        } else if m.rank(heavier.with(e)) > m.rank(heavier) {
            improving = improving.with(e);
        }
    }
    improving
}

/// Law of the improving set when every element is sampled independently with probability `p`.
pub fn oracle_improving_distribution(wm: &WeightedMatroid, p: &Rational) -> SubsetDistribution {
    let n = wm.n();
    let q = Rational::one() - p;
    let mut pairs = Vec::new();
    for s in Subset::all(n) {
        let mut mass = Rational::one();
        for i in 0..n {
            mass *= if s.contains(i) { p.clone() } else { q.clone() };
        }
        if !mass.is_zero() {
            pairs.push((oracle_improving_set(wm, s), mass));
        }
    }
    SubsetDistribution::explicit(n, &pairs).expect("probabilities sum to one")
}

/// `E[w(opt(R))]` with the greedy optimum recomputed from scratch.
pub fn oracle_expected_weighted_rank(wm: &WeightedMatroid, d: &SubsetDistribution) -> Rational {
    d.support()
        .iter()
        .map(|(r, p)| {
            let best = r
                .subsets()
                .filter(|&s| wm.matroid().is_independent(s))
                .map(|s| s.iter().map(|i| wm.weight(i).clone()).sum::<Rational>())
                .max()
                .unwrap_or_else(Rational::zero);
            p * best
        })
        .sum()
}
