use std::fmt::Write as _;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt, TerminationReason};
use nalgebra::{DMatrix, DVector, Dyn, Owned};

use crate::error::{Error, Result};
use crate::units;

/// Relative finite-difference step of the numerical Jacobian.
const FD_STEP: f64 = 1e-6;
const XTOL: f64 = 1e-9;
const FTOL: f64 = 1e-14;
/// Residual evaluations per parameter before giving up.
const PATIENCE: usize = 200;
/// Relative singular value below which the normal matrix counts as singular.
const RANK_TOL: f64 = 1e-8;

/// How a fitted value is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Angular frequency, stored in rad/s and reported in GHz (ω/2π).
    Frequency,
    /// Power, stored in W and reported in pW.
    Power,
    Dimensionless,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<&'static str>,
    pub kinds: Vec<ParamKind>,
    pub values: Vec<f64>,
    /// One standard error per value; infinite along directions the data do
    /// not constrain.
    pub standard_errors: Vec<f64>,
    pub residual_norm: f64,
    /// Residual evaluations used by the optimiser.
    pub iterations: usize,
    pub converged: bool,
    /// The normal matrix was numerically singular at the solution.
    pub degenerate: bool,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.values[i])
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.standard_errors[i])
    }

    fn display(&self, i: usize) -> (String, f64, f64) {
        match self.kinds[i] {
            ParamKind::Frequency => (
                format!("{}_ghz", self.names[i]),
                units::rad_to_ghz(self.values[i]),
                units::rad_to_ghz(self.standard_errors[i]),
            ),
            ParamKind::Power => (
                format!("{}_pw", self.names[i]),
                units::w_to_pw(self.values[i]),
                units::w_to_pw(self.standard_errors[i]),
            ),
            ParamKind::Dimensionless => (self.names[i].to_string(), self.values[i], self.standard_errors[i]),
        }
    }

    /// Flat `key = value` report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for i in 0..self.values.len() {
            let (name, value, err) = self.display(i);
            let _ = writeln!(out, "{name} = {value:.12e}");
            let _ = writeln!(out, "{name}_stderr = {err:.12e}");
        }
        let _ = writeln!(out, "residual_norm = {:.12e}", self.residual_norm);
        let _ = writeln!(out, "iterations = {}", self.iterations);
        let _ = writeln!(out, "converged = {}", self.converged);
        let _ = writeln!(out, "degenerate = {}", self.degenerate);
        out
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut cols = Vec::new();
        for i in 0..self.values.len() {
            let (name, _, _) = self.display(i);
            cols.push(name.clone());
            cols.push(format!("{name}_stderr"));
        }
        cols.extend(["residual_norm", "iterations", "converged", "degenerate"].map(String::from));
        cols
    }

    /// Numbers of one CSV row, booleans as 0/1, in [`csv_header`] order.
    pub fn csv_values(&self) -> Vec<f64> {
        let mut row = Vec::new();
        for i in 0..self.values.len() {
            let (_, v, e) = self.display(i);
            row.push(v);
            row.push(e);
        }
        row.push(self.residual_norm);
        row.push(self.iterations as f64);
        row.push(f64::from(u8::from(self.converged)));
        row.push(f64::from(u8::from(self.degenerate)));
        row
    }
}

/// Description of one fit parameter in the optimiser's working units.
pub(crate) struct Param {
    pub name: &'static str,
    pub kind: ParamKind,
    pub initial: f64,
    /// Magnitude below which the finite-difference step stops shrinking.
    pub scale: f64,
    /// Working units per stored unit (e.g. 1e-9/2π for rad/s fitted in GHz).
    pub to_working: f64,
}

struct Problem<'a, F> {
    model: &'a F,
    x: DVector<f64>,
    scales: Vec<f64>,
}

impl<F> Problem<'_, F>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec((self.model)(x.as_slice()))
    }

    fn jacobian_at(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.eval(x).len();
        let n = x.len();
        let mut j = DMatrix::zeros(m, n);
        for k in 0..n {
            let h = FD_STEP * x[k].abs().max(self.scales[k]);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let d = (self.eval(&xp) - self.eval(&xm)) / (2.0 * h);
            j.set_column(k, &d);
        }
        j
    }
}

impl<F> LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_, F>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.x.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.x.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(self.eval(&self.x))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        Some(self.jacobian_at(&self.x))
    }
}

/// Minimises ‖r(x)‖² with `residuals` taking working-unit parameters.
pub(crate) fn least_squares<F>(params: &[Param], residuals: F) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let x0 = DVector::from_iterator(params.len(), params.iter().map(|p| p.initial * p.to_working));
    let problem = Problem {
        model: &residuals,
        x: x0,
        scales: params.iter().map(|p| p.scale * p.to_working).collect(),
    };
    let (problem, report) = LevenbergMarquardt::new()
        .with_xtol(XTOL)
        .with_ftol(FTOL)
        .with_gtol(0.0)
        .with_patience(PATIENCE)
        .minimize(problem);

    let x = problem.x.clone();
    let r = problem.eval(&x);
    let residual_norm = r.norm();
    let converged = report.termination.was_successful()
        || matches!(report.termination, TerminationReason::NoImprovementPossible(_));
    let back = |x: &DVector<f64>| -> Vec<f64> { x.iter().zip(params).map(|(v, p)| v / p.to_working).collect() };
    if !converged || !residual_norm.is_finite() {
        return Err(Error::FitNotConverged {
            iterations: report.number_of_evaluations,
            residual_norm,
            best: back(&x),
        });
    }

    let (errors, degenerate) = standard_errors(&problem.jacobian_at(&x), &r);
    Ok(FitResult {
        names: params.iter().map(|p| p.name).collect(),
        kinds: params.iter().map(|p| p.kind).collect(),
        values: back(&x),
        standard_errors: errors.iter().zip(params).map(|(e, p)| e / p.to_working).collect(),
        residual_norm,
        iterations: report.number_of_evaluations,
        converged,
        degenerate,
    })
}

/// √diag(s²(JᵀJ)⁻¹) with s² = ‖r‖²/(m − n). Parameters touching a singular
/// direction get an infinite error.
fn standard_errors(j: &DMatrix<f64>, r: &DVector<f64>) -> (Vec<f64>, bool) {
    let (m, n) = j.shape();
    let dof = m.saturating_sub(n).max(1) as f64;
    let s2 = r.norm_squared() / dof;
    // A column of zeros scales by one and shows up as a zero singular value.
    let norms: Vec<f64> = j
        .column_iter()
        .map(|c| if c.norm() > 0.0 { c.norm() } else { 1.0 })
        .collect();
    let mut scaled = j.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col /= norms[k];
    }
    let svd = scaled.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let mut variance = vec![0.0; n];
    let mut unconstrained = vec![false; n];
    let mut degenerate = false;
    for (i, &sigma) in svd.singular_values.iter().enumerate() {
        let row = v_t.row(i);
        if sigma <= RANK_TOL * sigma_max {
            degenerate = true;
            for k in 0..n {
                if row[k].abs() > 1e-6 {
                    unconstrained[k] = true;
                }
            }
        } else {
            for k in 0..n {
                variance[k] += (row[k] / sigma).powi(2);
            }
        }
    }
    let errs = (0..n)
        .map(|k| {
            if unconstrained[k] {
                f64::INFINITY
            } else {
                (s2 * variance[k]).sqrt() / norms[k]
            }
        })
        .collect();
    (errs, degenerate)
}
