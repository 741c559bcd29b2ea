//! Least-squares curve fitting in f64 on top of `levenberg-marquardt`.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Evaluation budget of one fit, in residual evaluations per parameter.
pub const EVALUATIONS_PER_PARAMETER: usize = 400;

pub(crate) trait Model {
    fn n_params(&self) -> usize;
    fn value(&self, x: f64, p: &[f64]) -> f64;
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]);
}

pub(crate) struct FitOutcome {
    pub params: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Sum of squared residuals over (n − p).
    pub reduced_residual: f64,
    pub evaluations: usize,
}

struct Problem<'a, M> {
    model: &'a M,
    x: &'a [f64],
    y: &'a [f64],
    p: DVector<f64>,
}

impl<M: Model> LeastSquaresProblem<f64, Dyn, Dyn> for Problem<'_, M> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, p: &DVector<f64>) {
        self.p.copy_from(p);
    }

    fn params(&self) -> DVector<f64> {
        self.p.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let p = self.p.as_slice();
        let r = DVector::from_iterator(
            self.x.len(),
            self.x.iter().zip(self.y).map(|(&x, &y)| self.model.value(x, p) - y),
        );
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        jacobian(self.model, self.x, self.p.as_slice())
    }
}

fn jacobian<M: Model>(model: &M, x: &[f64], p: &[f64]) -> Option<DMatrix<f64>> {
    let n = model.n_params();
    let mut j = DMatrix::zeros(x.len(), n);
    let mut g = vec![0.0; n];
    for (row, &xi) in x.iter().enumerate() {
        model.gradient(xi, p, &mut g);
        for (col, &v) in g.iter().enumerate() {
            if !v.is_finite() {
                return None;
            }
            j[(row, col)] = v;
        }
    }
    Some(j)
}

/// Minimise Σ (model(x) − y)² from `p0`; uncertainties from the residual covariance.
pub(crate) fn least_squares<M: Model>(model: &M, x: &[f64], y: &[f64], p0: &[f64]) -> Result<FitOutcome> {
    let n = model.n_params();
    debug_assert_eq!(p0.len(), n);
    if x.len() <= n {
        return Err(Error::InvalidTrace(format!(
            "{} samples cannot constrain {n} parameters",
            x.len()
        )));
    }
    let problem = Problem {
        model,
        x,
        y,
        p: DVector::from_column_slice(p0),
    };
    let (problem, report) = LevenbergMarquardt::new()
        .with_ftol(1e-14)
        .with_xtol(1e-14)
        .with_gtol(1e-14)
        .with_patience(EVALUATIONS_PER_PARAMETER)
        .minimize(problem);
    let dof = (x.len() - n) as f64;
    let ssr = 2.0 * report.objective_function;
    let reduced = ssr / dof;
    let tolerated = matches!(
        report.termination,
        levenberg_marquardt::TerminationReason::NoImprovementPossible(_)
    );
    if !(report.termination.was_successful() || tolerated) {
        return Err(Error::NonConvergence {
            iterations: report.number_of_evaluations,
            residual: reduced,
            reason: format!("{:?}", report.termination),
        });
    }
    let p = problem.p.as_slice().to_vec();
    let j = jacobian(model, x, &p).ok_or_else(|| Error::NonConvergence {
        iterations: report.number_of_evaluations,
        residual: reduced,
        reason: "non-finite Jacobian at the solution".into(),
    })?;
    let jtj = j.transpose() * &j;
    let cov = jtj.try_inverse().ok_or_else(|| Error::NonConvergence {
        iterations: report.number_of_evaluations,
        residual: reduced,
        reason: "singular normal matrix; parameters not identifiable".into(),
    })?;
    let std_errors = (0..n).map(|i| (cov[(i, i)] * reduced).max(0.0).sqrt()).collect();
    Ok(FitOutcome {
        params: p,
        std_errors,
        reduced_residual: reduced,
        evaluations: report.number_of_evaluations,
    })
}

/// y = offset + A / (1 + ((x − x0)/(w/2))²); p = [A, x0, w, offset].
pub(crate) struct Lorentzian;

impl Model for Lorentzian {
    fn n_params(&self) -> usize {
        4
    }
    fn value(&self, x: f64, p: &[f64]) -> f64 {
        let u = 2.0 * (x - p[1]) / p[2];
        p[3] + p[0] / (1.0 + u * u)
    }
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let u = 2.0 * (x - p[1]) / p[2];
        let d = 1.0 / (1.0 + u * u);
        let dd = p[0] * d * d * 2.0 * u;
        out[0] = d;
        out[1] = dd * 2.0 / p[2];
        out[2] = dd * u / p[2];
        out[3] = 1.0;
    }
}

/// y = offset + A exp(−(x − μ)²/(2σ²)); p = [A, μ, σ, offset].
pub(crate) struct Gaussian;

impl Model for Gaussian {
    fn n_params(&self) -> usize {
        4
    }
    fn value(&self, x: f64, p: &[f64]) -> f64 {
        let u = (x - p[1]) / p[2];
        p[3] + p[0] * (-0.5 * u * u).exp()
    }
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let u = (x - p[1]) / p[2];
        let e = (-0.5 * u * u).exp();
        out[0] = e;
        out[1] = p[0] * e * u / p[2];
        out[2] = p[0] * e * u * u / p[2];
        out[3] = 1.0;
    }
}

/// y = A exp(−(t − t0)/τ) + B; p = [A, τ, B].
pub(crate) struct Exponential {
    pub t0: f64,
}

impl Model for Exponential {
    fn n_params(&self) -> usize {
        3
    }
    fn value(&self, t: f64, p: &[f64]) -> f64 {
        p[0] * (-(t - self.t0) / p[1]).exp() + p[2]
    }
    fn gradient(&self, t: f64, p: &[f64], out: &mut [f64]) {
        let s = t - self.t0;
        let e = (-s / p[1]).exp();
        out[0] = e;
        out[1] = p[0] * e * s / (p[1] * p[1]);
        out[2] = 1.0;
    }
}

/// Sum of Gaussian peaks on a common offset; p = [A₁, μ₁, σ₁, …, offset].
pub(crate) struct GaussianSum {
    pub peaks: usize,
}

impl Model for GaussianSum {
    fn n_params(&self) -> usize {
        3 * self.peaks + 1
    }
    fn value(&self, x: f64, p: &[f64]) -> f64 {
        p[3 * self.peaks]
            + (0..self.peaks)
                .map(|k| Gaussian.value(x, &[p[3 * k], p[3 * k + 1], p[3 * k + 2], 0.0]))
                .sum::<f64>()
    }
    fn gradient(&self, x: f64, p: &[f64], out: &mut [f64]) {
        let mut g = [0.0; 4];
        for k in 0..self.peaks {
            Gaussian.gradient(x, &[p[3 * k], p[3 * k + 1], p[3 * k + 2], 0.0], &mut g);
            out[3 * k..3 * k + 3].copy_from_slice(&g[..3]);
        }
        out[3 * self.peaks] = 1.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_gradient<M: Model>(m: &M, x: f64, p: &[f64]) {
        let mut g = vec![0.0; m.n_params()];
        m.gradient(x, p, &mut g);
        for i in 0..p.len() {
            let h = 1e-6 * p[i].abs().max(1.0);
            let mut hi = p.to_vec();
            let mut lo = p.to_vec();
            hi[i] += h;
            lo[i] -= h;
            let fd = (m.value(x, &hi) - m.value(x, &lo)) / (2.0 * h);
            assert!(
                (fd - g[i]).abs() < 1e-6 * (1.0 + fd.abs()),
                "param {i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        check_gradient(&Lorentzian, 0.3, &[2.0, 0.1, 0.5, 0.2]);
        check_gradient(&Gaussian, -0.4, &[1.5, 0.2, 0.7, 0.1]);
        check_gradient(&Exponential { t0: 1.0 }, 2.5, &[100.0, 1.7, 3.0]);
        check_gradient(&GaussianSum { peaks: 2 }, 0.5, &[1.0, 0.0, 0.4, 0.5, 1.0, 0.3, 0.05]);
    }

    #[test]
    fn recovers_noiseless_lorentzian() {
        let truth = [3.0, 0.25, 0.3, 0.5];
        let x: Vec<f64> = (0..200).map(|i| -2.0 + i as f64 * 0.02).collect();
        let y: Vec<f64> = x.iter().map(|&x| Lorentzian.value(x, &truth)).collect();
        let fit = least_squares(&Lorentzian, &x, &y, &[2.5, 0.2, 0.4, 0.4]).unwrap();
        for (a, b) in fit.params.iter().zip(truth) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}
