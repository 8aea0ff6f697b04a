//! The Rosenbrock ("banana") density
//! `f(x, y) ∝ exp{−(1/20)[100(x − y²)² + (1 − y)²]}`.
//!
//! `Y ~ N(1, 10)` and `X | Y = y ~ N(y², 1/10)`, so `Y` is a linchpin and the
//! joint can be drawn exactly.

use nalgebra::DMatrix;

use crate::dist::{Normal, RandomStream, Univariate};
use crate::error::{Error, Result};
use crate::finite::FiniteJointTarget;
use crate::kernels::{ExactDraw, TargetDensity};
use crate::sampler::ConditionalSampler;

pub const MARGINAL_MEAN: f64 = 1.0;
pub const MARGINAL_VAR: f64 = 10.0;
pub const CONDITIONAL_VAR: f64 = 0.1;

/// Which coupling term appears in the exponent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RosenbrockForm {
    /// `100(x − y²)²`: consistent with `X | Y ~ N(y², 1/10)`.
    #[default]
    Banana,
    /// `100(x − y)²`: a Gaussian with `X | Y ~ N(y, 1/10)`, same `Y` marginal.
    Linear,
}

impl RosenbrockForm {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "banana" => Some(Self::Banana),
            "linear" => Some(Self::Linear),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Banana => "banana",
            Self::Linear => "linear",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RosenbrockTarget {
    pub form: RosenbrockForm,
}

impl RosenbrockTarget {
    pub fn new(form: RosenbrockForm) -> Self {
        Self { form }
    }

    /// Mean of `X | Y = y`.
    pub fn coupling(&self, y: f64) -> f64 {
        match self.form {
            RosenbrockForm::Banana => y * y,
            RosenbrockForm::Linear => y,
        }
    }

    /// Unnormalized log density.
    pub fn ln_f(&self, x: f64, y: f64) -> f64 {
        let c = x - self.coupling(y);
        -(100.0 * c * c + (1.0 - y) * (1.0 - y)) / 20.0
    }

    pub fn marginal(&self) -> Normal {
        Normal::new(MARGINAL_MEAN, MARGINAL_VAR).expect("constant parameters")
    }

    pub fn exact_draw(&self, rng: &mut RandomStream) -> (f64, f64) {
        let y = self.marginal().sample(rng);
        let x = self.conditional().draw(&vec![y], rng);
        (x, y)
    }

    pub fn conditional(&self) -> RosenbrockConditional {
        RosenbrockConditional { target: *self }
    }

    /// `f_Y` as a one-dimensional target.
    pub fn marginal_target(&self) -> RosenbrockMarginal {
        RosenbrockMarginal(self.marginal())
    }

    /// The joint `(x, y)` as a two-dimensional target.
    pub fn joint_target(&self) -> RosenbrockJoint {
        RosenbrockJoint(*self)
    }

    /// Exact iid kernel on `Y`.
    pub fn exact_marginal_kernel(&self) -> ExactDraw<impl Fn(&mut RandomStream) -> Vec<f64> + Send + Sync> {
        let m = self.marginal();
        ExactDraw::new("rosenbrock-y", move |rng: &mut RandomStream| vec![m.sample(rng)])
    }

    /// Midpoint discretization on an `nx × ny` grid over the given box,
    /// with conditional and marginal masses renormalized.
    pub fn grid(&self, nx: usize, ny: usize, x_box: (f64, f64), y_box: (f64, f64)) -> Result<RosenbrockGrid> {
        if nx == 0 || ny == 0 || x_box.0 >= x_box.1 || y_box.0 >= y_box.1 {
            return Err(Error::domain("grid needs positive counts and non-empty boxes"));
        }
        let mid = |b: (f64, f64), n: usize, i: usize| b.0 + (b.1 - b.0) * (i as f64 + 0.5) / n as f64;
        let xs: Vec<f64> = (0..nx).map(|i| mid(x_box, nx, i)).collect();
        let ys: Vec<f64> = (0..ny).map(|j| mid(y_box, ny, j)).collect();
        let ln_table = DMatrix::from_fn(nx, ny, |i, j| self.ln_f(xs[i], ys[j]));
        Ok(RosenbrockGrid {
            xs,
            ys,
            target: FiniteJointTarget::from_log_table(&ln_table)?,
        })
    }

    /// The 6 × 5 grid used by the validators: x ∈ [−0.5, 5.5], y ∈ [−2.5, 2.5],
    /// so every `y²` lands on an x midpoint.
    pub fn validation_grid(&self) -> Result<RosenbrockGrid> {
        self.grid(6, 5, (-0.5, 5.5), (-2.5, 2.5))
    }
}

#[derive(Clone, Debug)]
pub struct RosenbrockGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub target: FiniteJointTarget,
}

/// `X | Y = y ~ N(g(y), 1/10)` with `Y` held as a length-one vector.
#[derive(Clone, Copy, Debug)]
pub struct RosenbrockConditional {
    target: RosenbrockTarget,
}

impl ConditionalSampler for RosenbrockConditional {
    type X = f64;
    type Y = Vec<f64>;

    fn draw(&self, y: &Vec<f64>, rng: &mut RandomStream) -> f64 {
        self.target.coupling(y[0]) + CONDITIONAL_VAR.sqrt() * rng.standard_normal()
    }

    fn ln_density(&self, x: &f64, y: &Vec<f64>) -> f64 {
        Normal::new(self.target.coupling(y[0]), CONDITIONAL_VAR)
            .expect("constant variance")
            .ln_pdf(*x)
    }

    fn check_y(&self, y: &Vec<f64>) -> Result<()> {
        if y.len() != 1 {
            return Err(Error::domain("the Rosenbrock linchpin is one-dimensional"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RosenbrockMarginal(Normal);

impl TargetDensity for RosenbrockMarginal {
    fn dim(&self) -> usize {
        1
    }
    fn ln_f(&self, y: &[f64]) -> f64 {
        self.0.ln_pdf(y[0])
    }
}

/// State order `(x, y)`.
#[derive(Clone, Copy, Debug)]
pub struct RosenbrockJoint(RosenbrockTarget);

impl TargetDensity for RosenbrockJoint {
    fn dim(&self) -> usize {
        2
    }
    fn ln_f(&self, z: &[f64]) -> f64 {
        self.0.ln_f(z[0], z[1])
    }
}
