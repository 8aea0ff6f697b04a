//! Exact checks on finite state spaces.
//!
//! These build dense transition matrices and compare them against their
//! stationary vectors: invariance `fᵀP = fᵀ`, detailed balance
//! `f_i P_ij = f_j P_ji`, total-variation curves `‖Pⁿ(z,·) − f‖`, and the
//! linchpin composition `P[(x,y),(x',y')] = f_{X|Y}(x'|y') K[y,y']`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Finite validators refuse state spaces larger than this.
pub const MAX_STATES: usize = 10_000;

const STOCHASTIC_TOL: f64 = 1e-12;

/// An enumerated chain: labels, stationary probabilities, transition matrix.
#[derive(Clone, Debug)]
pub struct FiniteChainSpec {
    labels: Vec<String>,
    stationary: DVector<f64>,
    transition: DMatrix<f64>,
}

impl FiniteChainSpec {
    pub fn new(labels: Vec<String>, stationary: DVector<f64>, transition: DMatrix<f64>) -> Result<Self> {
        let m = stationary.len();
        if m == 0 {
            return Err(Error::domain("a finite chain needs at least one state"));
        }
        if m > MAX_STATES {
            return Err(Error::Size(format!("{m} states exceeds the cap of {MAX_STATES}")));
        }
        if labels.len() != m || transition.shape() != (m, m) {
            return Err(Error::domain("labels, stationary vector and matrix sizes disagree"));
        }
        if stationary.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::domain("stationary vector has a negative or non-finite entry"));
        }
        if (stationary.sum() - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::domain(format!("stationary vector sums to {}", stationary.sum())));
        }
        for i in 0..m {
            let row = transition.row(i);
            if row.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                return Err(Error::domain(format!("transition row {i} has a negative entry")));
            }
            if (row.sum() - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::domain(format!("transition row {i} sums to {}", row.sum())));
            }
        }
        Ok(Self {
            labels,
            stationary,
            transition,
        })
    }

    /// Labels `s0, s1, …`.
    pub fn unlabeled(stationary: DVector<f64>, transition: DMatrix<f64>) -> Result<Self> {
        let labels = (0..stationary.len()).map(|i| format!("s{i}")).collect();
        Self::new(labels, stationary, transition)
    }

    pub fn num_states(&self) -> usize {
        self.stationary.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.stationary
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    /// `‖fᵀP − fᵀ‖∞`.
    pub fn check_invariance(&self) -> f64 {
        let moved = self.transition.tr_mul(&self.stationary);
        (moved - &self.stationary).amax()
    }

    /// `max_{i,j} |f_i P_ij − f_j P_ji|`.
    pub fn check_detailed_balance(&self) -> f64 {
        let m = self.num_states();
        let f = &self.stationary;
        let p = &self.transition;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..i {
                worst = worst.max((f[i] * p[(i, j)] - f[j] * p[(j, i)]).abs());
            }
        }
        worst
    }

    /// Row `start` of `Pⁿ` for `n = 1..=n_max`.
    pub fn distributions(&self, start: usize, n_max: usize) -> Result<Vec<DVector<f64>>> {
        if start >= self.num_states() {
            return Err(Error::domain(format!("start state {start} out of range")));
        }
        if n_max == 0 {
            return Err(Error::domain("n_max must be at least 1"));
        }
        let mut v = DVector::zeros(self.num_states());
        v[start] = 1.0;
        let mut out = Vec::with_capacity(n_max);
        for _ in 0..n_max {
            v = self.transition.tr_mul(&v);
            out.push(v.clone());
        }
        Ok(out)
    }

    /// `½ Σ |Pⁿ(start,·) − f|` for `n = 1..=n_max`.
    pub fn tv_curve(&self, start: usize, n_max: usize) -> Result<Vec<f64>> {
        Ok(self
            .distributions(start, n_max)?
            .iter()
            .map(|d| 0.5 * (d - &self.stationary).abs().sum())
            .collect())
    }
}

/// Stationary vector of a row-stochastic matrix by power iteration from the
/// uniform distribution; used when only `P` is known.
pub fn stationary_by_power(p: &DMatrix<f64>, iterations: usize) -> DVector<f64> {
    let m = p.nrows();
    let mut v = DVector::from_element(m, 1.0 / m as f64);
    for _ in 0..iterations {
        v = p.tr_mul(&v);
    }
    let s = v.sum();
    v / s
}

/// Index layout of joint states `(x, y)`: `index = y · nx + x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JointLayout {
    pub nx: usize,
    pub ny: usize,
}

impl JointLayout {
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.nx + x
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A finite joint target split into `f_{X|Y}` (an `nx × ny` table whose
/// columns sum to one) and `f_Y`.
#[derive(Clone, Debug)]
pub struct FiniteJointTarget {
    conditional: DMatrix<f64>,
    marginal: DVector<f64>,
}

impl FiniteJointTarget {
    pub fn new(conditional: DMatrix<f64>, marginal: DVector<f64>) -> Result<Self> {
        let (nx, ny) = conditional.shape();
        if nx == 0 || ny == 0 || marginal.len() != ny {
            return Err(Error::domain("conditional table must be nx x ny with ny = len(f_Y)"));
        }
        if nx * ny > MAX_STATES {
            return Err(Error::Size(format!("{} joint states exceeds the cap of {MAX_STATES}", nx * ny)));
        }
        for j in 0..ny {
            let col = conditional.column(j);
            if col.iter().any(|&v| v < 0.0) || (col.sum() - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::domain(format!("conditional column {j} is not a probability vector")));
            }
        }
        if marginal.iter().any(|&v| v < 0.0) || (marginal.sum() - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::domain("marginal is not a probability vector"));
        }
        Ok(Self { conditional, marginal })
    }

    /// From an `nx × ny` table of log unnormalized joint weights.
    pub fn from_log_table(ln_joint: &DMatrix<f64>) -> Result<Self> {
        let (nx, ny) = ln_joint.shape();
        let mut conditional = DMatrix::zeros(nx, ny);
        let mut ln_marginal = Vec::with_capacity(ny);
        for j in 0..ny {
            let col: Vec<f64> = ln_joint.column(j).iter().copied().collect();
            let lse = crate::linalg::log_sum_exp(&col);
            if !lse.is_finite() {
                return Err(Error::domain(format!("column {j} of the joint table has no mass")));
            }
            let mut s = 0.0;
            for i in 0..nx {
                let v = (col[i] - lse).exp();
                conditional[(i, j)] = v;
                s += v;
            }
            for i in 0..nx {
                conditional[(i, j)] /= s;
            }
            ln_marginal.push(lse);
        }
        let total = crate::linalg::log_sum_exp(&ln_marginal);
        let mut marginal = DVector::from_iterator(ny, ln_marginal.iter().map(|v| (v - total).exp()));
        let s = marginal.sum();
        marginal /= s;
        Self::new(conditional, marginal)
    }

    pub fn layout(&self) -> JointLayout {
        JointLayout {
            nx: self.conditional.nrows(),
            ny: self.conditional.ncols(),
        }
    }

    pub fn conditional(&self) -> &DMatrix<f64> {
        &self.conditional
    }

    pub fn marginal(&self) -> &DVector<f64> {
        &self.marginal
    }

    /// Log of the marginal weights, suitable for [`crate::kernels::FiniteMh`].
    pub fn ln_marginal(&self) -> Vec<f64> {
        self.marginal.iter().map(|v| v.ln()).collect()
    }

    /// `f(x, y) = f_{X|Y}(x|y) f_Y(y)` in layout order.
    pub fn joint(&self) -> DVector<f64> {
        let layout = self.layout();
        DVector::from_fn(layout.len(), |idx, _| {
            let (x, y) = layout.coords(idx);
            self.conditional[(x, y)] * self.marginal[y]
        })
    }

    pub fn marginal_spec(&self, kernel: &DMatrix<f64>) -> Result<FiniteChainSpec> {
        let labels = (0..self.marginal.len()).map(|y| format!("y{y}")).collect();
        FiniteChainSpec::new(labels, self.marginal.clone(), kernel.clone())
    }
}

/// The composed linchpin kernel on the joint space:
/// `P[(x,y),(x',y')] = f_{X|Y}(x'|y') · K[y,y']`.
pub fn joint_transition_matrix(target: &FiniteJointTarget, marginal_kernel: &DMatrix<f64>) -> Result<FiniteChainSpec> {
    let layout = target.layout();
    if marginal_kernel.shape() != (layout.ny, layout.ny) {
        return Err(Error::domain("marginal kernel must be ny x ny"));
    }
    for i in 0..layout.ny {
        let row = marginal_kernel.row(i);
        if row.iter().any(|&v| v < 0.0) || (row.sum() - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::domain(format!("marginal kernel row {i} is not a probability vector")));
        }
    }
    let c = target.conditional();
    let m = layout.len();
    let mut p = DMatrix::zeros(m, m);
    for from in 0..m {
        let (_, y) = layout.coords(from);
        for to in 0..m {
            let (x2, y2) = layout.coords(to);
            p[(from, to)] = c[(x2, y2)] * marginal_kernel[(y, y2)];
        }
    }
    let labels = (0..m)
        .map(|idx| {
            let (x, y) = layout.coords(idx);
            format!("x{x}y{y}")
        })
        .collect();
    FiniteChainSpec::new(labels, target.joint(), p)
}

/// Result of comparing joint and marginal convergence.
#[derive(Clone, Debug)]
pub struct SameRateReport {
    /// `max |TV_joint(n; x, y) − TV_marginal(n; y)|` over `n`, `x`, `y`.
    pub max_discrepancy: f64,
    /// `max |TV_joint(n; x, y) − TV_joint(n; x', y)|` over `n`, `x`, `x'`, `y`.
    pub max_start_x_dependence: f64,
    /// `TV_marginal(n; y)` for each start `y`.
    pub marginal_curves: Vec<Vec<f64>>,
}

/// Check that the joint linchpin chain converges at exactly the marginal rate
/// from every matched start `(x, y) ↔ y`, and that the start `x` is irrelevant.
pub fn same_rate_check(
    joint: &FiniteChainSpec,
    layout: JointLayout,
    marginal: &FiniteChainSpec,
    n_max: usize,
) -> Result<SameRateReport> {
    if joint.num_states() != layout.len() || marginal.num_states() != layout.ny {
        return Err(Error::domain("joint and marginal chains do not share a layout"));
    }
    // The joint kernel must collapse onto the marginal kernel when x' is summed out.
    for from in 0..layout.len() {
        let (_, y) = layout.coords(from);
        for y2 in 0..layout.ny {
            let s: f64 = (0..layout.nx).map(|x2| joint.transition()[(from, layout.index(x2, y2))]).sum();
            if (s - marginal.transition()[(y, y2)]).abs() > 1e-12 {
                return Err(Error::domain("joint kernel is not the linchpin composition of the marginal kernel"));
            }
        }
    }
    for y in 0..layout.ny {
        let s: f64 = (0..layout.nx).map(|x| joint.stationary()[layout.index(x, y)]).sum();
        if (s - marginal.stationary()[y]).abs() > 1e-12 {
            return Err(Error::domain("joint stationary vector does not marginalize to f_Y"));
        }
    }

    let mut max_discrepancy: f64 = 0.0;
    let mut max_dep: f64 = 0.0;
    let mut marginal_curves = Vec::with_capacity(layout.ny);
    for y in 0..layout.ny {
        let tv_y = marginal.tv_curve(y, n_max)?;
        let mut first: Option<Vec<f64>> = None;
        for x in 0..layout.nx {
            let tv_xy = joint.tv_curve(layout.index(x, y), n_max)?;
            for (a, b) in tv_xy.iter().zip(&tv_y) {
                max_discrepancy = max_discrepancy.max((a - b).abs());
            }
            match &first {
                None => first = Some(tv_xy),
                Some(f0) => {
                    for (a, b) in tv_xy.iter().zip(f0) {
                        max_dep = max_dep.max((a - b).abs());
                    }
                }
            }
        }
        marginal_curves.push(tv_y);
    }
    Ok(SameRateReport {
        max_discrepancy,
        max_start_x_dependence: max_dep,
        marginal_curves,
    })
}

/// `max |P[(x,y),·] − P[(x',y),·]|`: rows sharing a `y` must coincide.
pub fn x_independence(joint: &FiniteChainSpec, layout: JointLayout) -> f64 {
    let p = joint.transition();
    let mut worst: f64 = 0.0;
    for y in 0..layout.ny {
        let base = layout.index(0, y);
        for x in 1..layout.nx {
            let r = layout.index(x, y);
            worst = worst.max((p.row(r) - p.row(base)).amax());
        }
    }
    worst
}

/// Add a probability circulation `a → b → c → a` to `p`, keeping `f`
/// invariant but breaking detailed balance. Uses half the largest feasible
/// flow, `½ min_i f_i P_ii` over the cycle.
pub fn add_circulation(p: &DMatrix<f64>, f: &DVector<f64>, cycle: [usize; 3]) -> Result<DMatrix<f64>> {
    let m = p.nrows();
    if cycle.iter().any(|&i| i >= m) || cycle[0] == cycle[1] || cycle[1] == cycle[2] || cycle[0] == cycle[2] {
        return Err(Error::domain("cycle must name three distinct states"));
    }
    let flow = 0.5 * cycle.iter().map(|&i| f[i] * p[(i, i)]).fold(f64::INFINITY, f64::min);
    if flow <= 0.0 {
        return Err(Error::domain("cycle states need positive holding probability"));
    }
    let mut q = p.clone();
    for k in 0..3 {
        let a = cycle[k];
        let b = cycle[(k + 1) % 3];
        q[(a, b)] += flow / f[a];
        q[(a, a)] -= flow / f[a];
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_uniform_is_balanced() {
        let p = DMatrix::from_row_slice(3, 3, &[0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5]);
        let s = FiniteChainSpec::unlabeled(DVector::from_element(3, 1.0 / 3.0), p).unwrap();
        assert_eq!(s.check_detailed_balance(), 0.0);
        assert!(s.check_invariance() < 1e-15);
    }

    #[test]
    fn three_cycle_is_not_reversible() {
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let s = FiniteChainSpec::unlabeled(DVector::from_element(3, 1.0 / 3.0), p).unwrap();
        assert!(s.check_detailed_balance() > 0.1);
        assert!(s.check_invariance() < 1e-15);
    }

    #[test]
    fn rejects_malformed_specs() {
        let p = DMatrix::from_row_slice(2, 2, &[0.5, 0.6, 0.5, 0.5]);
        assert!(FiniteChainSpec::unlabeled(DVector::from_element(2, 0.5), p).is_err());
        let p = DMatrix::identity(2, 2);
        assert!(FiniteChainSpec::unlabeled(DVector::from_vec(vec![0.5, 0.6]), p).is_err());
    }

    #[test]
    fn iid_kernel_has_zero_tv() {
        let f = DVector::from_vec(vec![0.2, 0.3, 0.5]);
        let p = DMatrix::from_fn(3, 3, |_, j| f[j]);
        let s = FiniteChainSpec::unlabeled(f, p).unwrap();
        for start in 0..3 {
            assert!(s.tv_curve(start, 10).unwrap().iter().all(|&t| t < 1e-15));
        }
    }

    #[test]
    fn two_state_tv_matches_eigen_decomposition() {
        // P = [[1-a, a], [b, 1-b]], a = b = 0.3: second eigenvalue 1 - a - b = 0.4
        let p = DMatrix::from_row_slice(2, 2, &[0.7, 0.3, 0.3, 0.7]);
        let s = FiniteChainSpec::unlabeled(DVector::from_vec(vec![0.5, 0.5]), p).unwrap();
        let tv = s.tv_curve(0, 30).unwrap();
        for (k, t) in tv.iter().enumerate() {
            let n = (k + 1) as i32;
            assert!((t - 0.5 * 0.4f64.powi(n)).abs() < 1e-15);
        }
        assert!(s.tv_curve(0, 0).is_err());
    }

    #[test]
    fn circulation_breaks_balance_but_keeps_invariance() {
        let f = DVector::from_vec(vec![0.2, 0.3, 0.5]);
        let p = DMatrix::from_fn(3, 3, |_, j| f[j]);
        let q = add_circulation(&p, &f, [0, 1, 2]).unwrap();
        let s = FiniteChainSpec::unlabeled(f, q).unwrap();
        assert!(s.check_invariance() < 1e-15);
        assert!(s.check_detailed_balance() > 0.01);
    }

    #[test]
    fn single_x_joint_equals_marginal() {
        let f = DVector::from_vec(vec![0.2, 0.8]);
        let k = DMatrix::from_row_slice(2, 2, &[0.1, 0.9, 0.225, 0.775]);
        let t = FiniteJointTarget::new(DMatrix::from_element(1, 2, 1.0), f).unwrap();
        let joint = joint_transition_matrix(&t, &k).unwrap();
        assert_eq!(joint.transition(), &k);
    }

    #[test]
    fn y_free_conditional_gives_product_stationary() {
        let fx = [0.1, 0.6, 0.3];
        let fy = DVector::from_vec(vec![0.25, 0.75]);
        let c = DMatrix::from_fn(3, 2, |i, _| fx[i]);
        let t = FiniteJointTarget::new(c, fy.clone()).unwrap();
        let k = DMatrix::from_fn(2, 2, |_, j| fy[j]);
        let joint = joint_transition_matrix(&t, &k).unwrap();
        let layout = t.layout();
        for idx in 0..layout.len() {
            let (x, y) = layout.coords(idx);
            assert!((joint.stationary()[idx] - fx[x] * fy[y]).abs() < 1e-16);
        }
        assert!(joint.check_invariance() < 1e-15);
    }

    #[test]
    fn mismatched_construction_is_rejected() {
        let fy = DVector::from_vec(vec![0.5, 0.5]);
        let c = DMatrix::from_element(2, 2, 0.5);
        let t = FiniteJointTarget::new(c, fy.clone()).unwrap();
        let k1 = DMatrix::from_element(2, 2, 0.5);
        let k2 = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.1, 0.9]);
        let joint = joint_transition_matrix(&t, &k1).unwrap();
        let other = t.marginal_spec(&k2).unwrap();
        assert!(same_rate_check(&joint, t.layout(), &other, 5).is_err());
        let ok = t.marginal_spec(&k1).unwrap();
        assert!(same_rate_check(&joint, t.layout(), &ok, 5).is_ok());
    }

    #[test]
    fn power_iteration_finds_stationary() {
        let p = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, 0.3, 0.7]);
        let v = stationary_by_power(&p, 500);
        assert!((v[0] - 0.75).abs() < 1e-12);
    }
}
