//! Experiment orchestration: configuration, seeding, Monte Carlo, tables and self-checks.

pub mod config;
pub mod csvio;
pub mod curves;
pub mod montecarlo;
pub mod seed;
pub mod validate;

pub use config::{parse_grid, parse_key_values, AmplificationRule, ExperimentConfig, ModulationKind};
pub use curves::{
    run_ber_curve, run_outage_curve, run_power_allocation_sweep, BerCurve, BerPoint, OutageEstimate, OutageRow,
    SweepCurve,
};
pub use montecarlo::{simulate_point, PointSimulation, StoppingRule, TrialSetup};
pub use validate::{run_validation_suite, ValidationReport};
