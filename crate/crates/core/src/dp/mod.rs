//! Dynamic program over a branch decomposition, with optional restriction to
//! simple configurations.

pub mod cluster;
pub mod config;
pub mod contract;
pub mod params;
pub mod partition;
pub mod reduce;
pub mod regions;
pub mod simple;
pub mod solve;

pub use cluster::{ClusterInfo, ClusterTable};
pub use config::{compatible_triple, demand_consistent, Configuration};
pub use contract::{contract_alpha, ClusterContraction, ContractionLayers};
pub use params::DpParameters;
pub use partition::{bell, Partition};
pub use reduce::{unit_length_reduce, UnitInstance};
pub use regions::{build_regions, ClusterRegions, RegionCover};
pub use simple::{
    enumerate_simple_configs, find_witness, is_simple_with, scale_range, SimpleFilter, Witness, WitnessPart,
};
pub use solve::{dp_solve, AllConfigs, Back, ConfigFilter, DpError, DpOptions, DpTable, Entry};
