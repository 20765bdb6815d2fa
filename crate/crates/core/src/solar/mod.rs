//! Partially shaded PV arrays: row currents, bypass power, baselines and the
//! discrete swarm that moves cells within their columns.

mod array;
mod power;
mod search;

pub use array::{
    Arrangement, IrradianceMatrix, PvParams, DEFAULT_MODULE_CURRENT, DEFAULT_MODULE_VOLTAGE,
};
pub use power::{
    arrangement_power, baseline_tct, brute_force_best, max_power, row_currents, CurvePoint,
    PowerCurve, BRUTE_FORCE_LIMIT,
};
pub use search::{
    arrangement_distance, local_search_discrete, random_column_swap, run_discrete_swarm,
    swap_with_offset, wave_swap_pass, DiscreteConfig, DiscreteResult,
};
