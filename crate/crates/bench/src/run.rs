//! Timed runs of the three reasoning tasks and their CSV form.

use std::fmt;
use std::path::Path;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use dtou_core::reasoner::{check_conformance, check_obligations, derive_policies};
use dtou_core::{KnowledgeBase, ReasonerOptions};
use serde::{Deserialize, Serialize};

use crate::workload::{generate_policies, Variable, WorkloadSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Parsing and assembling the policies, with no reasoning.
    Baseline,
    Conformance,
    Obligation,
    Derivation,
}

impl Task {
    pub const REASONING: [Task; 3] = [Task::Conformance, Task::Obligation, Task::Derivation];
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Baseline => "baseline",
            Task::Conformance => "conformance",
            Task::Obligation => "obligation",
            Task::Derivation => "derivation",
        })
    }
}

/// One CSV row: `variable,value,task,repeat,wall_ms,baseline_ms,result_size,timeout`.
///
/// `wall_ms` covers loading plus the task; `baseline_ms` is the loading part
/// of the same run, so `wall_ms - baseline_ms` is the net reasoning time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub variable: Variable,
    pub value: usize,
    pub task: Task,
    pub repeat: usize,
    pub wall_ms: f64,
    pub baseline_ms: f64,
    /// Conflicts, activated obligations or derived terms.
    pub result_size: usize,
    pub timeout: bool,
}

impl BenchRecord {
    pub fn net_ms(&self) -> f64 {
        self.wall_ms - self.baseline_ms
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Per task; a task that overruns is recorded as a timeout row.
    pub timeout: Duration,
    pub reasoner: ReasonerOptions,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { timeout: Duration::from_secs(60), reasoner: ReasonerOptions::default() }
    }
}

pub fn run_benchmark(spec: &WorkloadSpec) -> Vec<BenchRecord> {
    run_benchmark_with(spec, RunOptions::default())
}

/// Runs every `(value, repeat)` of `spec` serially. Each run loads the
/// policies once, then runs the three tasks on the same knowledge base.
pub fn run_benchmark_with(spec: &WorkloadSpec, opts: RunOptions) -> Vec<BenchRecord> {
    let mut records = Vec::new();
    for &value in &spec.values {
        for repeat in 0..spec.repeats {
            records.extend(run_once(spec, value, repeat, opts));
        }
    }
    records
}

enum Stage {
    Loaded(f64),
    Done(Task, f64, usize),
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn run_once(spec: &WorkloadSpec, value: usize, repeat: usize, opts: RunOptions) -> Vec<BenchRecord> {
    let policies = generate_policies(spec, value, spec.seed.wrapping_add(repeat as u64));
    let (tx, rx) = mpsc::channel();
    // the worker is abandoned on timeout; it only holds its own data
    std::thread::spawn(move || {
        let start = Instant::now();
        let g = policies.parse().expect("generated policies parse");
        let kb = KnowledgeBase::assemble(&g.context, &g.app, &g.data).expect("generated policies are valid");
        drop(g);
        if tx.send(Stage::Loaded(ms(start.elapsed()))).is_err() {
            return;
        }
        for task in Task::REASONING {
            let t = Instant::now();
            let size = match task {
                Task::Conformance => check_conformance(&kb, &opts.reasoner).len(),
                Task::Obligation => check_obligations(&kb, &opts.reasoner).len(),
                Task::Derivation => derive_policies(&kb, &opts.reasoner)
                    .map(|d| d.iter().map(|p| p.policy.term_count()).sum())
                    .unwrap_or(0),
                Task::Baseline => unreachable!(),
            };
            if tx.send(Stage::Done(task, ms(t.elapsed()), size)).is_err() {
                return;
            }
        }
    });

    let row = |task, wall_ms, baseline_ms, result_size, timeout| BenchRecord {
        variable: spec.variable,
        value,
        task,
        repeat,
        wall_ms,
        baseline_ms,
        result_size,
        timeout,
    };
    let timeout_ms = ms(opts.timeout);
    let mut out = Vec::new();
    let baseline = match rx.recv_timeout(opts.timeout) {
        Ok(Stage::Loaded(b)) => b,
        _ => {
            out.push(row(Task::Baseline, timeout_ms, timeout_ms, 0, true));
            out.extend(Task::REASONING.map(|t| row(t, timeout_ms, timeout_ms, 0, true)));
            return out;
        }
    };
    out.push(row(Task::Baseline, baseline, baseline, 0, false));
    for task in Task::REASONING {
        match rx.recv_timeout(opts.timeout) {
            Ok(Stage::Done(t, elapsed, size)) if t == task => out.push(row(task, baseline + elapsed, baseline, size, false)),
            _ => out.push(row(task, baseline + timeout_ms, baseline, 0, true)),
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_csv<W: std::io::Write>(records: &[BenchRecord], out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[BenchRecord], path: &Path) -> Result<(), CsvError> {
    write_csv(records, std::fs::File::create(path)?)
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRecord>, CsvError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingCheck {
    pub variable: Variable,
    pub task: Task,
    pub low: usize,
    pub high: usize,
    /// Median net time at `high` over median net time at `low`.
    pub ratio: f64,
    pub limit: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalingError {
    #[error("no completed {task} runs of {variable} at value {value}")]
    Missing { variable: Variable, task: Task, value: usize },
}

/// `(low, high, limit)` for a variable: `t(1000)/t(100) <= 15` in general,
/// `t(400)/t(100) <= 40` for the number of data policies.
pub fn scaling_bounds(variable: Variable) -> (usize, usize, f64) {
    match variable {
        Variable::AppData => (100, 400, 40.0),
        _ => (100, 1000, 15.0),
    }
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 { xs[n / 2] } else { (xs[n / 2 - 1] + xs[n / 2]) / 2.0 })
}

/// Median net reasoning time of `task` at `value`, ignoring timed-out runs.
pub fn net_time(records: &[BenchRecord], variable: Variable, task: Task, value: usize) -> Option<f64> {
    median(
        records
            .iter()
            .filter(|r| r.variable == variable && r.task == task && r.value == value && !r.timeout)
            .map(BenchRecord::net_ms)
            .collect(),
    )
}

pub fn check_scaling(records: &[BenchRecord], variable: Variable, task: Task) -> Result<ScalingCheck, ScalingError> {
    let (low, high, limit) = scaling_bounds(variable);
    let at = |value| net_time(records, variable, task, value).ok_or(ScalingError::Missing { variable, task, value });
    let (t_low, t_high) = (at(low)?, at(high)?);
    // a timed-out high value fails the check outright
    let high_timed_out = records.iter().any(|r| r.variable == variable && r.task == task && r.value == high && r.timeout);
    let ratio = t_high / t_low.max(f64::MIN_POSITIVE);
    let verdict = if ratio <= limit && !high_timed_out { Verdict::Pass } else { Verdict::Fail };
    Ok(ScalingCheck { variable, task, low, high, ratio, limit, verdict })
}
