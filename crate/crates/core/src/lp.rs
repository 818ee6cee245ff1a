//! Dense two-phase tableau simplex over exact rationals, with Bland's rule.
//!
//! Variables are non-negative with optional upper bounds. Every optimal solve is certified
//! before it is returned: primal feasibility, dual feasibility, complementary slackness and
//! equal objectives are all checked exactly.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest accepted number of variables and of rows.
pub const SIZE_CAP: usize = 5_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    upper: Vec<Option<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<Rational>,
    /// One multiplier per constraint, in insertion order, signed for the original sense:
    /// the objective changes by `duals[r]` per unit increase of `rhs[r]`.
    pub duals: Vec<Rational>,
    /// Multipliers of the upper bounds (zero for unbounded variables).
    pub bound_duals: Vec<Rational>,
    pub objective: Rational,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: Vec::new(),
            constraints: Vec::new(),
            upper: Vec::new(),
        }
    }

    /// Adds a variable with the given objective coefficient and returns its index.
    pub fn add_variable(&mut self, cost: Rational) -> usize {
        self.objective.push(cost);
        self.upper.push(None);
        self.objective.len() - 1
    }

    pub fn add_variables(&mut self, count: usize) -> std::ops::Range<usize> {
        let start = self.objective.len();
        for _ in 0..count {
            self.add_variable(Rational::zero());
        }
        start..self.objective.len()
    }

    pub fn set_cost(&mut self, var: usize, cost: Rational) {
        self.objective[var] = cost;
    }

    pub fn set_upper(&mut self, var: usize, bound: Rational) {
        self.upper[var] = Some(bound);
    }

    /// Adds a constraint and returns its row index. Repeated variables are summed.
    pub fn add_constraint(
        &mut self,
        coefficients: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    /// Appends `coefficient * x_var` to an existing row.
    pub fn extend_row(&mut self, row: usize, var: usize, coefficient: Rational) -> Result<()> {
        let c = self.constraints.get_mut(row).ok_or_else(|| {
            Error::LpDimension(format!("row {row} does not exist"))
        })?;
        c.coefficients.push((var, coefficient));
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_variables();
        let rows = self.constraints.len() + self.upper.iter().flatten().count();
        if n > SIZE_CAP || rows > SIZE_CAP {
            return Err(Error::CapExceeded(format!(
                "linear program with {n} variables and {rows} rows (cap {SIZE_CAP})"
            )));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if let Some((v, _)) = c.coefficients.iter().find(|(v, _)| *v >= n) {
                return Err(Error::LpDimension(format!(
                    "row {r} references variable {v} but only {n} exist"
                )));
            }
        }
        if let Some(u) = self.upper.iter().flatten().find(|u| u.is_negative()) {
            return Err(Error::LpDimension(format!("negative upper bound {u}")));
        }
        Ok(())
    }

    /// Evaluates `lhs` of row `r` at `x`.
    fn row_value(&self, r: usize, x: &[Rational]) -> Rational {
        self.constraints[r]
            .coefficients
            .iter()
            .map(|(v, a)| a * &x[*v])
            .sum()
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term_list = |terms: &mut dyn Iterator<Item = (usize, &Rational)>| {
            let parts: Vec<String> = terms
                .filter(|(_, a)| !a.is_zero())
                .map(|(v, a)| format!("{a} x{v}"))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        let sense = match self.sense {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        };
        writeln!(f, "{sense} {}", term_list(&mut self.objective.iter().enumerate()))?;
        writeln!(f, "subject to")?;
        for c in &self.constraints {
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let lhs = term_list(&mut c.coefficients.iter().map(|(v, a)| (*v, a)));
            writeln!(f, "  {lhs} {rel} {}", c.rhs)?;
        }
        for (v, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                writeln!(f, "  x{v} <= {u}")?;
            }
        }
        Ok(())
    }
}

/// Tableau row kinds after sign normalization.
struct Row {
    coefficients: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
    /// +1 or -1: the factor applied to the original row.
    sign: Rational,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs `d_j`, with `-objective` in the last slot.
    costs: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
    artificial_start: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let lead = self.rows[pr][pc].clone();
        if !lead.is_one() {
            for v in self.rows[pr].iter_mut() {
                if !v.is_zero() {
                    *v /= &lead;
                }
            }
        }
        let nonzero: Vec<usize> = (0..=self.width)
            .filter(|&j| !self.rows[pr][j].is_zero())
            .collect();
        let pivot_row = std::mem::take(&mut self.rows[pr]);
        for row in self.rows.iter_mut().chain(std::iter::once(&mut self.costs)) {
            if row.is_empty() || row[pc].is_zero() {
                continue;
            }
            let factor = row[pc].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        }
        self.rows[pr] = pivot_row;
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Sets the reduced-cost row for maximizing `cost . x` from the current basis.
    fn price(&mut self, cost: &[Rational]) {
        let mut d: Vec<Rational> = cost.to_vec();
        d.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    d[j] -= &cost[b] * v;
                }
            }
        }
        self.costs = d;
    }

    /// Runs Bland's rule to optimality. Returns false when unbounded.
    fn optimize(&mut self, allow_artificial: bool) -> bool {
        let limit = if allow_artificial {
            self.width
        } else {
            self.artificial_start
        };
        loop {
            let Some(pc) = (0..limit).find(|&j| self.costs[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][pc];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((pr, _)) = leave else {
                return false;
            };
            self.pivot(pr, pc);
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_variables();

    let mut rows: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| {
            let mut dense: Vec<(usize, Rational)> = Vec::new();
            for (v, a) in &c.coefficients {
                match dense.iter_mut().find(|(u, _)| u == v) {
                    Some((_, acc)) => *acc += a,
                    None => dense.push((*v, a.clone())),
                }
            }
            Row {
                coefficients: dense,
                relation: c.relation,
                rhs: c.rhs.clone(),
                sign: Rational::one(),
            }
        })
        .collect();
    let bounded: Vec<usize> = (0..n).filter(|&v| lp.upper[v].is_some()).collect();
    for &v in &bounded {
        rows.push(Row {
            coefficients: vec![(v, Rational::one())],
            relation: Relation::Le,
            rhs: lp.upper[v].clone().unwrap(),
            sign: Rational::one(),
        });
    }
    for row in rows.iter_mut() {
        if row.rhs.is_negative() {
            row.sign = -Rational::one();
            row.rhs = -row.rhs.clone();
            for (_, a) in row.coefficients.iter_mut() {
                *a = -a.clone();
            }
            row.relation = match row.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    // columns: structural | slack or surplus | artificial
    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let artificial_start = n + slack_count;
    let artificial_count = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let width = artificial_start + artificial_count;
    let mut table = vec![vec![Rational::zero(); width + 1]; m];
    let mut basis = vec![0; m];
    let mut initial = vec![0; m];
    let (mut next_slack, mut next_art) = (n, artificial_start);
    for (r, row) in rows.iter().enumerate() {
        for (v, a) in &row.coefficients {
            table[r][*v] = a.clone();
        }
        table[r][width] = row.rhs.clone();
        match row.relation {
            Relation::Le => {
                table[r][next_slack] = Rational::one();
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                table[r][next_slack] = -Rational::one();
                next_slack += 1;
                table[r][next_art] = Rational::one();
                basis[r] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                table[r][next_art] = Rational::one();
                basis[r] = next_art;
                next_art += 1;
            }
        }
        initial[r] = basis[r];
    }
    let mut tab = Tableau {
        rows: table,
        costs: Vec::new(),
        basis,
        width,
        artificial_start,
        pivots: 0,
    };

    if artificial_count > 0 {
        let mut phase_one = vec![Rational::zero(); width];
        for c in phase_one.iter_mut().skip(artificial_start) {
            *c = -Rational::one();
        }
        tab.price(&phase_one);
        tab.optimize(true);
        let infeasibility: Rational = (0..m)
            .filter(|&r| tab.basis[r] >= artificial_start)
            .map(|r| tab.rhs(r).clone())
            .sum();
        if infeasibility.is_positive() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: vec![Rational::zero(); n],
                duals: vec![Rational::zero(); lp.constraints.len()],
                bound_duals: vec![Rational::zero(); n],
                objective: Rational::zero(),
                pivots: tab.pivots,
            });
        }
        // drive zero-level artificials out of the basis where a real column allows it
        for r in 0..m {
            if tab.basis[r] < artificial_start {
                continue;
            }
            if let Some(pc) = (0..artificial_start).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, pc);
            }
        }
    }

    let flip = lp.sense == Sense::Minimize;
    let mut cost = vec![Rational::zero(); width];
    for (v, c) in lp.objective.iter().enumerate() {
        cost[v] = if flip { -c.clone() } else { c.clone() };
    }
    tab.price(&cost);
    if !tab.optimize(false) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![Rational::zero(); n],
            duals: vec![Rational::zero(); lp.constraints.len()],
            bound_duals: vec![Rational::zero(); n],
            objective: Rational::zero(),
            pivots: tab.pivots,
        });
    }

    let mut values = vec![Rational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            values[b] = tab.rhs(r).clone();
        }
    }
    let mut multipliers: Vec<Rational> = (0..m)
        .map(|r| {
            let col = initial[r];
            let y: Rational = (0..m)
                .filter(|&k| !cost[tab.basis[k]].is_zero())
                .map(|k| &cost[tab.basis[k]] * &tab.rows[k][col])
                .sum();
            let y = y * &rows[r].sign;
            if flip {
                -y
            } else {
                y
            }
        })
        .collect();
    let bound_tail = multipliers.split_off(lp.constraints.len());
    let mut bound_duals = vec![Rational::zero(); n];
    for (&v, y) in bounded.iter().zip(bound_tail) {
        bound_duals[v] = y;
    }
    let objective: Rational = lp
        .objective
        .iter()
        .zip(&values)
        .map(|(c, x)| c * x)
        .sum();
    let solution = LpSolution {
        status: LpStatus::Optimal,
        values,
        duals: multipliers,
        bound_duals,
        objective,
        pivots: tab.pivots,
    };
    solution.certify(lp)?;
    Ok(solution)
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Exact optimality certificate: primal and dual feasibility, complementary slackness,
    /// and equal primal and dual objectives.
    #[allow(clippy::needless_range_loop)]
    pub fn certify(&self, lp: &LinearProgram) -> Result<()> {
        let fail = |what: String| Err(Error::LpDimension(format!("certificate failed: {what}")));
        let n = lp.num_variables();
        // the dual of a max problem has y >= 0 on <= rows; signs flip for min
        let sign = if lp.sense == Sense::Maximize {
            Rational::one()
        } else {
            -Rational::one()
        };
        for (v, x) in self.values.iter().enumerate() {
            if x.is_negative() {
                return fail(format!("x{v} = {x} < 0"));
            }
            if let Some(u) = &lp.upper[v] {
                if x > u {
                    return fail(format!("x{v} = {x} exceeds {u}"));
                }
            }
        }
        let mut reduced: Vec<Rational> = lp.objective.clone();
        for (r, c) in lp.constraints.iter().enumerate() {
            let lhs = lp.row_value(r, &self.values);
            let slack = &c.rhs - &lhs;
            let ok = match c.relation {
                Relation::Le => !slack.is_negative(),
                Relation::Ge => !slack.is_positive(),
                Relation::Eq => slack.is_zero(),
            };
            if !ok {
                return fail(format!("row {r} violated by {slack}"));
            }
            let y = &self.duals[r] * &sign;
            let sign_ok = match c.relation {
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return fail(format!("dual {r} has the wrong sign"));
            }
            if !y.is_zero() && !slack.is_zero() {
                return fail(format!("row {r} slack {slack} with dual {y}"));
            }
            for (v, a) in &c.coefficients {
                reduced[*v] -= &self.duals[r] * a;
            }
        }
        for v in 0..n {
            let z = &self.bound_duals[v] * &sign;
            if z.is_negative() {
                return fail(format!("bound dual {v} has the wrong sign"));
            }
            if !z.is_zero() && lp.upper[v].as_ref() != Some(&self.values[v]) {
                return fail(format!("bound on x{v} not tight but priced"));
            }
            reduced[v] -= &self.bound_duals[v];
            let d = &reduced[v] * &sign;
            if d.is_positive() {
                return fail(format!("reduced cost of x{v} is {d}"));
            }
            if !d.is_zero() && !self.values[v].is_zero() {
                return fail(format!("x{v} basic with reduced cost {d}"));
            }
        }
        let dual_objective: Rational = lp
            .constraints
            .iter()
            .zip(&self.duals)
            .map(|(c, y)| &c.rhs * y)
            .chain(
                lp.upper
                    .iter()
                    .zip(&self.bound_duals)
                    .filter_map(|(u, z)| u.as_ref().map(|u| u * z)),
            )
            .sum();
        if dual_objective != self.objective {
            return fail(format!(
                "primal {} differs from dual {dual_objective}",
                self.objective
            ));
        }
        Ok(())
    }
}
