//! Scaling study harness: random policies sized by one varied term count,
//! timed reasoning runs, CSV output and a growth-ratio check.

mod run;
mod workload;

pub use run::{
    check_scaling, emit_csv, net_time, read_csv, run_benchmark, run_benchmark_with, scaling_bounds, write_csv,
    BenchRecord, CsvError, RunOptions, ScalingCheck, ScalingError, Task, Verdict,
};
pub use workload::{
    data_uri, generate_policies, Counts, GeneratedPolicies, UnknownVariable, Variable, WorkloadGraphs, WorkloadSpec,
    APP_NAME, INPUTS, USER,
};

/// Values used when a grid is requested without explicit values.
pub const DEFAULT_VALUES: [usize; 5] = [10, 100, 400, 700, 1000];
