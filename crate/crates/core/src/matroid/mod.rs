//! Matroids over small ground sets, described by their rank oracle.
//!
//! Every family answers `rank` exactly; subsets are bitmasks over `0..n`. Explicit families
//! are tabulated at construction, the others evaluate the rank on demand.

mod weighted;

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::{Subset, MAX_ELEMENTS};

pub use weighted::WeightedMatroid;

/// Cap for operations that enumerate every subset of the ground set.
pub const EXHAUSTIVE_CAP: usize = 20;
/// Cap for the pairwise axiom check and explicit-family tabulation.
pub const AXIOM_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS, "ground sets are capped at {MAX_ELEMENTS} elements");
        GroundSet { n, labels: None }
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        assert!(labels.len() <= MAX_ELEMENTS);
        GroundSet {
            n: labels.len(),
            labels: Some(labels),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Uniform {
        k: usize,
    },
    /// Elements outside every block behave as loops.
    Partition {
        blocks: Vec<Subset>,
        capacities: Vec<usize>,
    },
    /// Element `i` is edge `edges[i]`; self-loops are matroid loops.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    Explicit {
        independent: Vec<Subset>,
        rank_table: Vec<u8>,
    },
    /// Element `i` is column `columns[i]`.
    Linear {
        columns: Vec<Vec<Rational>>,
    },
    /// `base / contracted \ deleted`, element `i` standing for `base` element `elements[i]`.
    Minor {
        base: Box<Matroid>,
        elements: Vec<usize>,
        contracted: Subset,
        contracted_rank: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matroid {
    ground: GroundSet,
    family: Family,
}

impl Matroid {
    pub fn uniform(n: usize, k: usize) -> Self {
        Matroid {
            ground: GroundSet::new(n),
            family: Family::Uniform { k },
        }
    }

    /// Every subset independent.
    pub fn free(n: usize) -> Self {
        Self::uniform(n, n)
    }

    pub fn partition(n: usize, blocks: &[Vec<usize>], capacities: &[usize]) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::InvalidMatroid(format!(
                "{} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            )));
        }
        let mut seen = Subset::EMPTY;
        let mut masks = Vec::with_capacity(blocks.len());
        for block in blocks {
            let mut mask = Subset::EMPTY;
            for &e in block {
                check_element(e, n)?;
                if seen.contains(e) {
                    return Err(Error::InvalidMatroid(format!(
                        "element {e} appears in two blocks"
                    )));
                }
                seen = seen.with(e);
                mask = mask.with(e);
            }
            masks.push(mask);
        }
        Ok(Matroid {
            ground: GroundSet::new(n),
            family: Family::Partition {
                blocks: masks,
                capacities: capacities.to_vec(),
            },
        })
    }

    pub fn graphic(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidMatroid(format!(
                    "edge ({u},{v}) references a vertex outside 0..{vertices}"
                )));
            }
        }
        if edges.len() > MAX_ELEMENTS {
            return Err(Error::GroundSetTooLarge {
                n: edges.len(),
                cap: MAX_ELEMENTS,
                operation: "graphic matroid",
            });
        }
        Ok(Matroid {
            ground: GroundSet::new(edges.len()),
            family: Family::Graphic {
                vertices,
                edges: edges.to_vec(),
            },
        })
    }

    /// Builds a matroid from its independent sets and validates the rank axioms.
    ///
    /// The rank of `S` is the size of the largest listed set inside `S`, so a family that
    /// is not downward closed shows up as an axiom violation.
    pub fn explicit(n: usize, independent: &[Subset]) -> Result<Self> {
        if n > AXIOM_CAP {
            return Err(Error::GroundSetTooLarge {
                n,
                cap: AXIOM_CAP,
                operation: "explicit matroid",
            });
        }
        let full = Subset::full(n);
        let mut listed = vec![false; 1 << n];
        for s in independent {
            if !s.is_subset_of(full) {
                return Err(Error::ElementOutOfRange {
                    element: s.span_len() - 1,
                    n,
                });
            }
            listed[s.bits() as usize] = true;
        }
        let mut table = vec![0u8; 1 << n];
        for bits in 0..1usize << n {
            let s = Subset::from_bits(bits as u64);
            table[bits] = if listed[bits] {
                s.len() as u8
            } else {
                s.iter()
                    .map(|i| table[s.without(i).bits() as usize])
                    .max()
                    .unwrap_or(0)
            };
        }
        let mut sets: Vec<Subset> = independent.to_vec();
        sets.sort();
        sets.dedup();
        let m = Matroid {
            ground: GroundSet::new(n),
            family: Family::Explicit {
                independent: sets,
                rank_table: table,
            },
        };
        let check = m.check_axioms()?;
        if let Some(bad) = check.counterexample {
            return Err(Error::InvalidMatroid(format!(
                "rank axiom '{}' fails on {} and {}",
                bad.axiom, bad.first, bad.second
            )));
        }
        Ok(m)
    }

    pub fn linear(columns: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(first) = columns.first() {
            if columns.iter().any(|c| c.len() != first.len()) {
                return Err(Error::InvalidMatroid(
                    "linear matroid columns have different lengths".into(),
                ));
            }
        }
        if columns.len() > MAX_ELEMENTS {
            return Err(Error::GroundSetTooLarge {
                n: columns.len(),
                cap: MAX_ELEMENTS,
                operation: "linear matroid",
            });
        }
        Ok(Matroid {
            ground: GroundSet::new(columns.len()),
            family: Family::Linear { columns },
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.ground.len() {
            return Err(Error::InvalidMatroid(format!(
                "{} labels for {} elements",
                labels.len(),
                self.ground.len()
            )));
        }
        self.ground = GroundSet::with_labels(labels);
        Ok(self)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn full(&self) -> Subset {
        self.ground.full()
    }

    /// Range-checked rank.
    pub fn checked_rank(&self, s: Subset) -> Result<usize> {
        self.check_subset(s)?;
        Ok(self.rank(s))
    }

    pub fn check_subset(&self, s: Subset) -> Result<()> {
        if !s.is_subset_of(self.full()) {
            return Err(Error::ElementOutOfRange {
                element: s.span_len() - 1,
                n: self.n(),
            });
        }
        Ok(())
    }

    /// Size of a largest independent subset of `s`. `s` must lie inside the ground set.
    pub fn rank(&self, s: Subset) -> usize {
        debug_assert!(s.is_subset_of(self.full()), "{s} outside ground set");
        match &self.family {
            Family::Uniform { k } => s.len().min(*k),
            Family::Partition { blocks, capacities } => blocks
                .iter()
                .zip(capacities)
                .map(|(b, &c)| b.intersection(s).len().min(c))
                .sum(),
            Family::Graphic { vertices, edges } => graphic_rank(*vertices, edges, s),
            Family::Explicit { rank_table, .. } => rank_table[s.bits() as usize] as usize,
            Family::Linear { columns } => linear_rank(columns, s),
            Family::Minor {
                base,
                elements,
                contracted,
                contracted_rank,
            } => {
                let lifted: Subset = s.iter().map(|i| elements[i]).collect();
                base.rank(lifted.union(*contracted)) - contracted_rank
            }
        }
    }

    pub fn is_independent(&self, s: Subset) -> bool {
        self.rank(s) == s.len()
    }

    pub fn is_loop(&self, i: usize) -> bool {
        self.rank(Subset::singleton(i)) == 0
    }

    pub fn loops(&self) -> Subset {
        (0..self.n()).filter(|&i| self.is_loop(i)).collect()
    }

    /// Closure of `s`: every element whose addition leaves the rank unchanged.
    pub fn span(&self, s: Subset) -> Subset {
        let r = self.rank(s);
        (0..self.n())
            .filter(|&i| s.contains(i) || self.rank(s.with(i)) == r)
            .collect::<Subset>()
            .union(s)
    }

    /// Whether `i` lies in the closure of `s`.
    pub fn spans(&self, s: Subset, i: usize) -> bool {
        s.contains(i) || self.rank(s.with(i)) == self.rank(s)
    }

    /// `M / contract \ delete`, relabelled so the surviving elements keep their relative order.
    pub fn minor(&self, delete: Subset, contract: Subset) -> Result<Matroid> {
        self.check_subset(delete)?;
        self.check_subset(contract)?;
        let overlap = delete.intersection(contract);
        if !overlap.is_empty() {
            return Err(Error::OverlappingMinor(overlap.to_string()));
        }
        let kept = self.full().difference(delete.union(contract));
        let elements: Vec<usize> = kept.iter().collect();
        let ground = match &self.ground.labels {
            Some(l) => GroundSet::with_labels(elements.iter().map(|&i| l[i].clone()).collect()),
            None => GroundSet::new(elements.len()),
        };
        Ok(Matroid {
            ground,
            family: Family::Minor {
                base: Box::new(self.clone()),
                contracted_rank: self.rank(contract),
                elements,
                contracted: contract,
            },
        })
    }

    pub fn restrict(&self, keep: Subset) -> Result<Matroid> {
        self.minor(self.full().difference(keep), Subset::EMPTY)
    }

    /// All independent sets, in increasing bitmask order.
    pub fn independent_sets(&self) -> Result<Vec<Subset>> {
        self.require_exhaustive(EXHAUSTIVE_CAP, "independent set enumeration")?;
        Ok(Subset::all(self.n())
            .filter(|&s| self.is_independent(s))
            .collect())
    }

    /// Maximal independent subsets of `s` (bases of the restriction to `s`).
    pub fn bases_within(&self, s: Subset) -> Vec<Subset> {
        let r = self.rank(s);
        s.subsets()
            .filter(|t| t.len() == r && self.is_independent(*t))
            .collect()
    }

    pub(crate) fn require_exhaustive(&self, cap: usize, operation: &'static str) -> Result<()> {
        if self.n() > cap {
            return Err(Error::GroundSetTooLarge {
                n: self.n(),
                cap,
                operation,
            });
        }
        Ok(())
    }

    /// Membership of `x` in the matroid polytope `{x in [0,1]^E : x(S) <= rank(S)}`.
    ///
    /// On failure the report names either an out-of-box coordinate or the subset with the
    /// largest excess `x(S) - rank(S)` (smallest bitmask among ties).
    pub fn in_polytope(&self, x: &[Rational]) -> Result<PolytopeCheck> {
        self.in_scaled_polytope(x, &Rational::one())
    }

    /// Membership of `x` in `scale * P(M)`.
    pub fn in_scaled_polytope(&self, x: &[Rational], scale: &Rational) -> Result<PolytopeCheck> {
        if x.len() != self.n() {
            return Err(Error::MismatchedGroundSets(x.len(), self.n()));
        }
        self.require_exhaustive(EXHAUSTIVE_CAP, "polytope membership")?;
        for (i, xi) in x.iter().enumerate() {
            if xi.is_negative() || xi > scale {
                return Ok(PolytopeCheck {
                    inside: false,
                    violation: Some(PolytopeViolation::OutOfBox {
                        element: i,
                        value: xi.clone(),
                    }),
                });
            }
        }
        let mut worst: Option<(Subset, Rational)> = None;
        for s in Subset::all(self.n()) {
            let load: Rational = s.iter().map(|i| &x[i]).sum();
            let excess = load - scale * Rational::from_integer(self.rank(s).into());
            if excess.is_positive() && worst.as_ref().is_none_or(|(_, w)| excess > *w) {
                worst = Some((s, excess));
            }
        }
        Ok(match worst {
            None => PolytopeCheck {
                inside: true,
                violation: None,
            },
            Some((set, excess)) => PolytopeCheck {
                inside: false,
                violation: Some(PolytopeViolation::Rank { set, excess }),
            },
        })
    }

    /// Exhaustive check of the rank axioms: `r(empty) = 0`, unit increase, submodularity.
    ///
    /// Submodularity is checked in its local form `r(S+i) + r(S+j) >= r(S+i+j) + r(S)`,
    /// which is equivalent to the global inequality.
    pub fn check_axioms(&self) -> Result<AxiomCheck> {
        self.require_exhaustive(AXIOM_CAP, "axiom check")?;
        let n = self.n();
        let table: Vec<usize> = Subset::all(n).map(|s| self.rank(s)).collect();
        let r = |s: Subset| table[s.bits() as usize];
        let fail = |axiom, first, second| {
            Ok(AxiomCheck {
                counterexample: Some(AxiomViolation {
                    axiom,
                    first,
                    second,
                }),
            })
        };
        if r(Subset::EMPTY) != 0 {
            return fail("normalization", Subset::EMPTY, Subset::EMPTY);
        }
        for s in Subset::all(n) {
            for i in 0..n {
                if s.contains(i) {
                    continue;
                }
                let si = s.with(i);
                if r(si) < r(s) || r(si) > r(s) + 1 {
                    return fail("unit increase", s, si);
                }
                for j in i + 1..n {
                    if s.contains(j) {
                        continue;
                    }
                    let sj = s.with(j);
                    if r(si) + r(sj) < r(si.with(j)) + r(s) {
                        return fail("submodularity", si, sj);
                    }
                }
            }
        }
        Ok(AxiomCheck {
            counterexample: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeCheck {
    pub inside: bool,
    pub violation: Option<PolytopeViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeViolation {
    OutOfBox { element: usize, value: Rational },
    Rank { set: Subset, excess: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub counterexample: Option<AxiomViolation>,
}

impl AxiomCheck {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub first: Subset,
    pub second: Subset,
}

/// Memoized rank oracle for routines that revisit the same subsets many times.
pub struct RankCache<'a> {
    matroid: &'a Matroid,
    dense: Vec<u8>,
    sparse: HashMap<Subset, usize>,
}

const DENSE_CACHE_CAP: usize = 22;
const UNKNOWN: u8 = u8::MAX;

impl<'a> RankCache<'a> {
    pub fn new(matroid: &'a Matroid) -> Self {
        let dense = if matroid.n() <= DENSE_CACHE_CAP {
            vec![UNKNOWN; 1 << matroid.n()]
        } else {
            Vec::new()
        };
        RankCache {
            matroid,
            dense,
            sparse: HashMap::new(),
        }
    }

    pub fn matroid(&self) -> &'a Matroid {
        self.matroid
    }

    pub fn rank(&mut self, s: Subset) -> usize {
        if self.dense.is_empty() {
            let m = self.matroid;
            return *self.sparse.entry(s).or_insert_with(|| m.rank(s));
        }
        let slot = &mut self.dense[s.bits() as usize];
        if *slot == UNKNOWN {
            *slot = self.matroid.rank(s) as u8;
        }
        *slot as usize
    }
}

fn check_element(e: usize, n: usize) -> Result<()> {
    if e >= n {
        return Err(Error::ElementOutOfRange { element: e, n });
    }
    Ok(())
}

fn graphic_rank(vertices: usize, edges: &[(usize, usize)], s: Subset) -> usize {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut rank = 0;
    for e in s.iter() {
        let (u, v) = edges[e];
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            rank += 1;
        }
    }
    rank
}

/// Rank of the selected columns by exact Gaussian elimination.
fn linear_rank(columns: &[Vec<Rational>], s: Subset) -> usize {
    let mut rows: Vec<Vec<Rational>> = s.iter().map(|i| columns[i].clone()).collect();
    let dim = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &lead;
            let (top, bottom) = rows.split_at_mut(r);
            for (target, source) in bottom[0][col..dim].iter_mut().zip(&top[rank][col..dim]) {
                *target -= &factor * source;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn set(items: &[usize]) -> Subset {
        items.iter().collect()
    }

    fn triangle() -> Matroid {
        Matroid::graphic(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matroid::uniform(3, 2).rank(set(&[0, 1, 2])), 2);
        assert_eq!(triangle().rank(Subset::EMPTY), 0);
        assert_eq!(triangle().rank(set(&[0, 1, 2])), 2);
        assert!(Matroid::uniform(3, 2).checked_rank(set(&[3])).is_err());
    }

    #[test]
    fn partition_and_linear_ranks() {
        let p = Matroid::partition(5, &[vec![0, 1, 2], vec![3]], &[2, 1]).unwrap();
        assert_eq!(p.rank(set(&[0, 1, 2, 3])), 3);
        // element 4 belongs to no block
        assert!(p.is_loop(4));
        let l = Matroid::linear(vec![
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![int(1), int(1)],
            vec![ratio(1, 2), ratio(1, 2)],
            vec![int(0), int(0)],
        ])
        .unwrap();
        assert_eq!(l.rank(set(&[0, 1, 2])), 2);
        assert_eq!(l.rank(set(&[2, 3])), 1);
        assert!(l.is_loop(4));
        assert!(p.check_axioms().unwrap().holds());
        assert!(l.check_axioms().unwrap().holds());
        assert!(Matroid::partition(3, &[vec![0, 1], vec![1]], &[1, 1]).is_err());
    }

    #[test]
    fn span_examples() {
        assert_eq!(Matroid::uniform(3, 1).span(set(&[0])), set(&[0, 1, 2]));
        assert_eq!(Matroid::uniform(3, 1).span(Subset::EMPTY), Subset::EMPTY);
        assert_eq!(triangle().span(set(&[0, 1])), set(&[0, 1, 2]));
    }

    #[test]
    fn minor_examples() {
        let u = Matroid::uniform(4, 2);
        let same = u.minor(Subset::EMPTY, Subset::EMPTY).unwrap();
        assert!(Subset::all(4).all(|s| same.rank(s) == u.rank(s)));
        let c = u.minor(Subset::EMPTY, set(&[0])).unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.rank(set(&[0])), 1);
        assert_eq!(c.rank(set(&[0, 1])), 1);
        let d = triangle().minor(set(&[0]), Subset::EMPTY).unwrap();
        assert_eq!(d.rank(d.full()), 2);
        assert!(d.is_independent(d.full()));
        assert!(matches!(
            u.minor(set(&[1]), set(&[1, 2])),
            Err(Error::OverlappingMinor(_))
        ));
    }

    #[test]
    fn polytope_examples() {
        let u = Matroid::uniform(2, 1);
        let check = u.in_polytope(&[ratio(3, 5), ratio(3, 5)]).unwrap();
        assert!(!check.inside);
        assert_eq!(
            check.violation,
            Some(PolytopeViolation::Rank {
                set: set(&[0, 1]),
                excess: ratio(1, 5)
            })
        );
        assert!(u.in_polytope(&[ratio(1, 2), ratio(1, 2)]).unwrap().inside);
        let t = triangle();
        assert!(t.in_polytope(&[int(1), int(1), int(0)]).unwrap().inside);
        assert!(!t.in_polytope(&[int(1), int(1), int(1)]).unwrap().inside);
        assert!(matches!(
            u.in_polytope(&[ratio(-1, 2), int(0)]).unwrap().violation,
            Some(PolytopeViolation::OutOfBox { element: 0, .. })
        ));
    }

    #[test]
    fn explicit_family_validation() {
        // 0 is a coloop, 1 and 2 are parallel
        let ok = Matroid::explicit(
            3,
            &[Subset::EMPTY, set(&[0]), set(&[1]), set(&[2]), set(&[0, 1]), set(&[0, 2])],
        );
        let ok = ok.unwrap();
        assert_eq!(ok.rank(set(&[1, 2])), 1);
        assert_eq!(ok.rank(set(&[0, 1, 2])), 2);
        let no_augment = Matroid::explicit(3, &[Subset::EMPTY, set(&[0]), set(&[1]), set(&[0, 1]), set(&[2])]);
        assert!(matches!(no_augment, Err(Error::InvalidMatroid(_))));
        let not_closed = Matroid::explicit(2, &[Subset::EMPTY, set(&[0, 1])]);
        assert!(matches!(not_closed, Err(Error::InvalidMatroid(_))));
        // downward closed but violates exchange
        let no_exchange = Matroid::explicit(
            4,
            &[Subset::EMPTY, set(&[0]), set(&[1]), set(&[2]), set(&[3]), set(&[0, 1]), set(&[2, 3])],
        );
        assert!(no_exchange.is_err());
    }

    #[test]
    fn axioms_hold_for_standard_families() {
        for n in 0..=8 {
            for k in 0..=n {
                assert!(Matroid::uniform(n, k).check_axioms().unwrap().holds());
            }
        }
        let k4 = Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(k4.check_axioms().unwrap().holds());
        assert!(Matroid::uniform(17, 3).check_axioms().is_err());
    }

    #[test]
    fn rank_cache_matches_oracle() {
        let k4 = Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut cache = RankCache::new(&k4);
        for s in Subset::all(6) {
            assert_eq!(cache.rank(s), k4.rank(s));
            assert_eq!(cache.rank(s), k4.rank(s));
        }
    }
}
