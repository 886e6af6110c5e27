//! Exact enumeration, saddle-point asymptotics and random generation of
//! graphs and multigraphs whose vertex degrees all lie in a prescribed set.
//!
//! The crate is organised bottom-up:
//!
//! * [`degree_set`] : allowed-degree sets and their EGFs;
//! * [`series_dp`] : exact big-integer coefficient tables;
//! * [`analytic`] : saddle point, asymptotic counts, marked-multigraph sums;
//! * [`graph`] : multigraph model, compensation factor, classification;
//! * [`samplers`] : exact recursive sampler, Boltzmann sampler, rejection.

pub mod analytic;
pub mod degree_set;
pub mod graph;
pub mod numeric;
pub mod samplers;
pub mod series_dp;

pub use analytic::{
    acceptance_probability, feasibility, marked_weight_exact, mg_asymptotic, sg_asymptotic,
    solve_phi, solve_saddle, AnalyticError, AsymptoticCount, Feasibility, Regime, SaddleData,
};
pub use degree_set::{DegreeSet, DegreeSetError, Extent};
pub use graph::{GraphClass, GraphError, Multigraph};
pub use series_dp::{
    mg_total_weight, mixed_coefficient, power_coefficient, power_row, CoefficientTable,
    LogWeight, Provenance, WeightValue,
};
pub use samplers::{
    boltzmann_sample, boltzmann_tune, pair_half_edges, stream_rng, BoltzmannSampler,
    SampleReport, SamplerError, SamplerState,
};
