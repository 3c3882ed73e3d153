//! Storage parameters, validity rules and model builders.

mod build;
mod params;

pub use build::{
    build, build_bir, build_bo, build_bof, build_bor, build_tir, build_to, build_tor, pvar, relax, rows_per_period,
    BuildError, BuildOptions, InitialState, ReserveProfile, TirEnergyRows,
};
pub use params::{validate_params, Family, StorageParams, Violation};
