//! Targets with a linchpin structure: log densities, exact conditional
//! samplers, synthetic data and the closed forms the samplers rely on.

pub mod gaussian;
pub mod linear;
pub mod rosenbrock;
pub mod spike_slab;
pub mod table;
pub mod var;

pub use gaussian::{gaussian_experiment, GaussianExperiment, GaussianSplitTarget};
pub use linear::{synth_linear, LinearModel, LinearModelData, LinearModelHyper};
pub use rosenbrock::{RosenbrockForm, RosenbrockTarget};
pub use spike_slab::{spike_slab_enumerate, synth_spike_slab, SpikeSlabData, SpikeSlabHyper, SpikeSlabModel};
pub use table::Table;
pub use var::{synth_var, VarData, VarHyper, VarModel, VarParams};
