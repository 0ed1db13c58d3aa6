//! Dense two-phase simplex with Bland's rule.
//!
//! Problem sizes in this crate are small (a few thousand rows at most), so the
//! solver favours determinism over speed: a full tableau, the smallest-index
//! entering rule and smallest-basic-index tie breaking on the ratio test. The
//! same input always yields the same vertex.

use crate::LpError;

/// Minimum magnitude of an entry accepted as a pivot.
pub const PIVOT_TOL: f64 = 1e-10;
/// Constraint violation allowed in a returned solution, scaled by `max(1, |bound|)`.
pub const FEAS_TOL: f64 = 1e-7;

const MAX_PIVOTS: usize = 1_000_000;

/// `minimize c·x` subject to `row·x >= bound` and `row·x = bound` constraints.
///
/// Variables are free unless flagged nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    geq_rows: Vec<(Vec<f64>, f64)>,
    eq_rows: Vec<(Vec<f64>, f64)>,
    nonneg: Vec<bool>,
}

impl LinearProgram {
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            geq_rows: Vec::new(),
            eq_rows: Vec::new(),
            nonneg: vec![false; n],
        }
    }

    /// Maximization expressed as minimization of the negated objective.
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::minimize(objective.into_iter().map(|c| -c).collect())
    }

    pub fn set_nonneg(&mut self, var: usize) -> &mut Self {
        self.nonneg[var] = true;
        self
    }

    pub fn all_nonneg(mut self) -> Self {
        self.nonneg.iter_mut().for_each(|f| *f = true);
        self
    }

    pub fn add_geq(&mut self, row: Vec<f64>, bound: f64) -> &mut Self {
        self.geq_rows.push((row, bound));
        self
    }

    pub fn add_leq(&mut self, row: Vec<f64>, bound: f64) -> &mut Self {
        self.geq_rows
            .push((row.into_iter().map(|a| -a).collect(), -bound));
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, bound: f64) -> &mut Self {
        self.eq_rows.push((row, bound));
        self
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn geq_rows(&self) -> &[(Vec<f64>, f64)] {
        &self.geq_rows
    }

    pub fn eq_rows(&self) -> &[(Vec<f64>, f64)] {
        &self.eq_rows
    }

    pub fn is_nonneg(&self, var: usize) -> bool {
        self.nonneg[var]
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.geq_rows.len() + self.eq_rows.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFiniteInput);
        }
        for (k, (row, b)) in self.geq_rows.iter().chain(&self.eq_rows).enumerate() {
            if row.len() != n {
                return Err(LpError::DimensionMismatch {
                    row: k,
                    expected: n,
                    actual: row.len(),
                });
            }
            if !b.is_finite() || row.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFiniteInput);
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint (or sign restriction) at `x`,
    /// each scaled by `max(1, |bound|)`.
    pub fn max_violation(&self, x: &[f64]) -> (usize, f64) {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        let mut worst = (0, 0.0);
        let mut note = |k: usize, v: f64| {
            if v > worst.1 {
                worst = (k, v);
            }
        };
        for (k, (row, b)) in self.geq_rows.iter().enumerate() {
            note(k, (b - dot(row)) / b.abs().max(1.0));
        }
        for (k, (row, b)) in self.eq_rows.iter().enumerate() {
            note(
                self.geq_rows.len() + k,
                (dot(row) - b).abs() / b.abs().max(1.0),
            );
        }
        for (j, &nn) in self.nonneg.iter().enumerate() {
            if nn {
                note(self.num_rows() + j, -x[j]);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub x: Option<Vec<f64>>,
    /// Present iff `status == Optimal`.
    pub objective_value: Option<f64>,
    /// Simplex pivots over both phases.
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            x: None,
            objective_value: None,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    rows: usize,
    width: usize,
    cells: Vec<f64>,
    /// Reduced costs; the last entry holds the negated objective value.
    cost_row: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.cells[r * self.width + self.width - 1]
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.cells[r * w + c];
        for v in &mut self.cells[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + c];
            if f != 0.0 {
                let row = &mut self.cells[i * w..(i + 1) * w];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
                if row[w - 1] < 0.0 && row[w - 1] > -PIVOT_TOL {
                    row[w - 1] = 0.0;
                }
            }
        }
        let f = self.cost_row[c];
        if f != 0.0 {
            for (v, pv) in self.cost_row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost_row[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.cost_row = cost.to_vec();
        self.cost_row.push(0.0);
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for (v, a) in self
                    .cost_row
                    .iter_mut()
                    .zip(&self.cells[r * w..(r + 1) * w])
                {
                    *v -= cb * a;
                }
            }
        }
    }

    fn run(&mut self, enterable: usize) -> Result<PhaseEnd, LpError> {
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
            let Some(col) = (0..enterable).find(|&j| self.cost_row[j] < -PIVOT_TOL) else {
                return Ok(PhaseEnd::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, col);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                        if (tie && self.basis[r] < self.basis[br]) || (!tie && ratio < best) {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Ok(PhaseEnd::Unbounded),
            }
        }
    }
}

/// Solves `lp`. Optimal points are re-verified against every constraint.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let nv = lp.num_vars();

    // Structural columns: x_j or the split x_j = x⁺ - x⁻.
    let mut plus = Vec::with_capacity(nv);
    let mut minus = Vec::with_capacity(nv);
    let mut structural = 0;
    for j in 0..nv {
        plus.push(structural);
        structural += 1;
        if lp.nonneg[j] {
            minus.push(None);
        } else {
            minus.push(Some(structural));
            structural += 1;
        }
    }
    let n_geq = lp.geq_rows.len();
    let rows = lp.num_rows();
    let surplus0 = structural;

    // Decide per row whether the surplus can start basic or an artificial is needed.
    let mut negate = vec![false; rows];
    let mut needs_art = vec![false; rows];
    for (r, (_, b)) in lp.geq_rows.iter().chain(&lp.eq_rows).enumerate() {
        if r < n_geq {
            negate[r] = *b <= 0.0;
            needs_art[r] = *b > 0.0;
        } else {
            negate[r] = *b < 0.0;
            needs_art[r] = true;
        }
    }
    let art0 = surplus0 + n_geq;
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let ncols = art0 + n_art;
    let width = ncols + 1;

    let mut cells = vec![0.0; rows * width];
    let mut basis = vec![0; rows];
    let mut next_art = art0;
    for (r, (row, b)) in lp.geq_rows.iter().chain(&lp.eq_rows).enumerate() {
        let sign = if negate[r] { -1.0 } else { 1.0 };
        let cell = &mut cells[r * width..(r + 1) * width];
        for j in 0..nv {
            cell[plus[j]] = sign * row[j];
            if let Some(m) = minus[j] {
                cell[m] = -sign * row[j];
            }
        }
        if r < n_geq {
            cell[surplus0 + r] = -sign;
            basis[r] = surplus0 + r;
        }
        if needs_art[r] {
            cell[next_art] = 1.0;
            basis[r] = next_art;
            next_art += 1;
        }
        cell[width - 1] = sign * b;
    }

    let mut t = Tableau {
        rows,
        width,
        cells,
        cost_row: Vec::new(),
        basis,
        pivots: 0,
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        phase1[art0..].iter_mut().for_each(|c| *c = 1.0);
        t.price(&phase1);
        // Phase 1 is bounded below by zero.
        t.run(ncols)?;
        let infeasibility = -t.cost_row[width - 1];
        let scale = lp
            .geq_rows
            .iter()
            .chain(&lp.eq_rows)
            .map(|(_, b)| b.abs())
            .fold(1.0, f64::max);
        if infeasibility > FEAS_TOL * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, t.pivots));
        }
        for r in 0..rows {
            if t.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&c| t.at(r, c).abs() > PIVOT_TOL) {
                    t.pivot(r, c);
                }
                // Otherwise the row is redundant; its artificial stays basic at zero.
            }
        }
    }

    let mut phase2 = vec![0.0; ncols];
    for j in 0..nv {
        phase2[plus[j]] = lp.objective[j];
        if let Some(m) = minus[j] {
            phase2[m] = -lp.objective[j];
        }
    }
    t.price(&phase2);
    if let PhaseEnd::Unbounded = t.run(art0)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, t.pivots));
    }

    let mut col_value = vec![0.0; ncols];
    for r in 0..rows {
        col_value[t.basis[r]] = t.rhs(r);
    }
    let x: Vec<f64> = (0..nv)
        .map(|j| col_value[plus[j]] - minus[j].map_or(0.0, |m| col_value[m]))
        .collect();
    let (row, violation) = lp.max_violation(&x);
    if violation > FEAS_TOL {
        return Err(LpError::Numerical { row, violation });
    }
    let objective_value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x: Some(x),
        objective_value: Some(objective_value),
        iterations: t.pivots,
    })
}

/// Solves an LP whose `>=` rows are generated on demand.
///
/// `lp` holds an initial subset of rows whose relaxation must be bounded.
/// After each solve `separate` is handed the current point and returns the
/// violated `>=` rows it wants added; an empty answer means the point is
/// feasible for the full system. Returns the final solution and the LP with
/// every generated row appended.
pub fn solve_with_row_generation<F>(
    mut lp: LinearProgram,
    mut separate: F,
) -> Result<(LpSolution, LinearProgram), LpError>
where
    F: FnMut(&[f64]) -> Vec<(Vec<f64>, f64)>,
{
    let mut iterations = 0;
    loop {
        let mut sol = solve_lp(&lp)?;
        iterations += sol.iterations;
        sol.iterations = iterations;
        let Some(x) = sol.x.as_ref() else {
            return Ok((sol, lp));
        };
        let cuts = separate(x);
        if cuts.is_empty() {
            return Ok((sol, lp));
        }
        for (row, b) in cuts {
            lp.add_geq(row, b);
        }
    }
}
