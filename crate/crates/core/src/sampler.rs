//! The linchpin variable sampler.
//!
//! Given a kernel `k_Y` that leaves the marginal `f_Y` invariant and an exact
//! sampler for `f_{X|Y}`, one step moves `(x, y) → (x', y')` by drawing
//! `y' ~ k_Y(· | y)` and then `x' ~ f_{X|Y}(· | y')`. The composed kernel
//! `f_{X|Y}(x' | y') k_Y(y' | y)` leaves the joint `f(x, y)` invariant, is
//! reversible exactly when `k_Y` is, and converges at the rate of `k_Y`.

use std::marker::PhantomData;
use std::time::Instant;

use crate::chain::{ChainOutput, Flatten};
use crate::dist::RandomStream;
use crate::error::{Error, Result};
use crate::kernels::{KernelInfo, TransitionKernel};

/// Exact draws from `X | Y = y` with the matching log density.
pub trait ConditionalSampler: Send + Sync {
    type X: Clone + Send;
    type Y;

    fn draw(&self, y: &Self::Y, rng: &mut RandomStream) -> Self::X;

    /// Normalized log density of `x` given `y`.
    fn ln_density(&self, x: &Self::X, y: &Self::Y) -> f64;

    /// Reject linchpin values this conditional cannot condition on.
    fn check_y(&self, _y: &Self::Y) -> Result<()> {
        Ok(())
    }
}

/// A conditional given by a deterministic map `x = g(y)` (a point mass).
pub struct PointMass<Y, X, F> {
    map: F,
    _types: PhantomData<fn(&Y) -> X>,
}

impl<Y, X, F: Fn(&Y) -> X> PointMass<Y, X, F> {
    pub fn new(map: F) -> Self {
        Self {
            map,
            _types: PhantomData,
        }
    }
}

impl<Y, X, F> ConditionalSampler for PointMass<Y, X, F>
where
    X: Clone + Send + PartialEq,
    F: Fn(&Y) -> X + Send + Sync,
{
    type X = X;
    type Y = Y;

    fn draw(&self, y: &Y, _rng: &mut RandomStream) -> X {
        (self.map)(y)
    }

    fn ln_density(&self, x: &X, y: &Y) -> f64 {
        if *x == (self.map)(y) {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Marginal kernel on `Y` composed with an exact `X | Y` sampler.
pub struct LinchpinSampler<K, C> {
    kernel: K,
    conditional: C,
}

impl<K, C> LinchpinSampler<K, C>
where
    K: TransitionKernel,
    C: ConditionalSampler<Y = K::State>,
{
    pub fn new(kernel: K, conditional: C) -> Self {
        Self { kernel, conditional }
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn conditional(&self) -> &C {
        &self.conditional
    }

    /// Advance `y` with the marginal kernel, then redraw `x` given the new `y`.
    /// The incoming `x` is never read.
    pub fn linchpin_step(&self, state: &mut (C::X, K::State), rng: &mut RandomStream) -> Result<bool> {
        let accepted = self.kernel.step(&mut state.1, rng)?;
        state.0 = self.conditional.draw(&state.1, rng);
        Ok(accepted)
    }

    /// `n` linchpin steps from `init`, recording `(x, y)` after each step.
    pub fn run_chain(
        &self,
        init: (C::X, K::State),
        n: usize,
        names: Vec<String>,
        rng: &mut RandomStream,
    ) -> Result<ChainOutput>
    where
        C::X: Flatten,
        K::State: Flatten,
    {
        self.conditional.check_y(&init.1)?;
        let mut out = crate::chain::run_chain(self, init, n, names, rng)?;
        out.conditional_draws = n;
        Ok(out)
    }

    /// Run the `Y` chain alone for `n` steps, keep every `thin`-th state
    /// (steps `1, 1 + thin, …`), then draw one `X` for each kept `Y`.
    /// Exactly `⌈n / thin⌉` conditional draws are made.
    pub fn run_marginal_then_fill(
        &self,
        init_y: K::State,
        n: usize,
        thin: usize,
        names: Vec<String>,
        rng: &mut RandomStream,
    ) -> Result<ChainOutput>
    where
        C::X: Flatten,
        K::State: Flatten,
    {
        if thin == 0 {
            return Err(Error::domain("thin must be at least 1"));
        }
        if n == 0 {
            return Err(Error::domain("chain length must be at least 1"));
        }
        self.conditional.check_y(&init_y)?;
        let start = Instant::now();
        let mut y = init_y;
        let mut kept = Vec::with_capacity(n.div_ceil(thin));
        for i in 0..n {
            let accepted = self.kernel.step(&mut y, rng)?;
            if i % thin == 0 {
                kept.push((i + 1, y.clone(), accepted));
            }
        }
        let mut out = ChainOutput::new(names, rng.seed(), format!("{}+deferred-fill", self.info()));
        let mut row = Vec::new();
        for (iter, y, accepted) in &kept {
            let x = self.conditional.draw(y, rng);
            row.clear();
            x.flatten_into(&mut row);
            y.flatten_into(&mut row);
            out.push_row(*iter, &row, *accepted)?;
        }
        out.conditional_draws = kept.len();
        out.duration = start.elapsed();
        Ok(out)
    }
}

impl<K, C> TransitionKernel for LinchpinSampler<K, C>
where
    K: TransitionKernel,
    C: ConditionalSampler<Y = K::State>,
{
    type State = (C::X, K::State);

    fn step(&self, state: &mut Self::State, rng: &mut RandomStream) -> Result<bool> {
        self.linchpin_step(state, rng)
    }

    fn info(&self) -> KernelInfo {
        let inner = self.kernel.info();
        KernelInfo {
            name: format!("linchpin[{}]", inner.name),
            scale: inner.scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::ExactDraw;

    #[test]
    fn point_mass_conditional_is_followed_exactly() {
        let kernel = ExactDraw::new("normal", |rng: &mut RandomStream| rng.standard_normal());
        let sampler = LinchpinSampler::new(kernel, PointMass::new(|y: &f64| 3.0 * y + 1.0));
        let mut rng = RandomStream::new(0);
        let mut state = (0.0, 0.0);
        for _ in 0..100 {
            sampler.linchpin_step(&mut state, &mut rng).unwrap();
            assert_eq!(state.0, 3.0 * state.1 + 1.0);
        }
    }

    #[test]
    fn identical_inputs_identical_outputs() {
        let kernel = ExactDraw::new("normal", |rng: &mut RandomStream| rng.standard_normal());
        let sampler = LinchpinSampler::new(kernel, PointMass::new(|y: &f64| y * y));
        let mut a = RandomStream::new(12);
        let mut b = RandomStream::new(12);
        let mut s1 = (5.0, 1.0);
        let mut s2 = (-7.0, 1.0);
        sampler.linchpin_step(&mut s1, &mut a).unwrap();
        sampler.linchpin_step(&mut s2, &mut b).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn deferred_fill_counts_conditional_draws() {
        let kernel = ExactDraw::new("normal", |rng: &mut RandomStream| rng.standard_normal());
        let sampler = LinchpinSampler::new(kernel, PointMass::new(|y: &f64| y * y));
        let mut rng = RandomStream::new(1);
        let names = vec!["x".to_string(), "y".to_string()];
        let out = sampler.run_marginal_then_fill(0.0, 100_000, 10, names.clone(), &mut rng).unwrap();
        assert_eq!(out.conditional_draws, 10_000);
        assert_eq!(out.len(), 10_000);
        let out = sampler.run_marginal_then_fill(0.0, 25, 10, names.clone(), &mut rng).unwrap();
        assert_eq!(out.conditional_draws, 3);
        assert!(sampler.run_marginal_then_fill(0.0, 25, 0, names, &mut rng).is_err());
    }
}
