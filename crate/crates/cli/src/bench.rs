use std::io::Write;
use std::time::Duration;

use dtou_bench::{check_scaling, emit_csv, run_benchmark_with, RunOptions, Task, WorkloadSpec};

use crate::{BenchArgs, Exit, Failure};

pub fn run(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Exit, Failure> {
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        return Err(Failure::Structural(format!("--timeout must be a positive number of seconds, got {}", args.timeout)));
    }
    let spec = WorkloadSpec { repeats: args.repeats, seed: args.seed, ..WorkloadSpec::new(args.variable, args.values.clone()) };
    let opts = RunOptions { timeout: Duration::from_secs_f64(args.timeout), reasoner: args.reasoner.options() };
    writeln!(err, "{}: values {:?}, {} repeats", args.variable, args.values, args.repeats)?;
    let records = run_benchmark_with(&spec, opts);
    emit_csv(&records, &args.out).map_err(|e| Failure::Io(format!("{}: {e}", args.out.display())))?;
    let timeouts = records.iter().filter(|r| r.timeout).count();
    if timeouts > 0 {
        writeln!(err, "warning: {timeouts} rows timed out")?;
    }
    writeln!(out, "wrote {} rows to {}", records.len(), args.out.display())?;
    // only meaningful when the grid holds both ends of the ratio
    for task in Task::REASONING {
        if let Ok(c) = check_scaling(&records, args.variable, task) {
            writeln!(out, "{task}: t({})/t({}) = {:.2}, limit {}, {:?}", c.high, c.low, c.ratio, c.limit, c.verdict)?;
        }
    }
    Ok(Exit::Ok)
}
