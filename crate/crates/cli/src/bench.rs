//! Benchmark harness over a parameter grid.

use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use switchmax::instance::{AnyInstance, Arithmetic};
use switchmax::num::Num;
use switchmax::solver::{solve, SolverOptions};

use crate::gen::{gen_random, GenSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchCase {
    pub n: usize,
    pub m: usize,
    pub horizon: usize,
    pub reps: usize,
}

/// Grid syntax: semicolon-separated `n,m,K[,reps]` (reps defaults to 1).
/// An empty string is an empty grid.
pub fn parse_grid(s: &str) -> Result<Vec<BenchCase>, String> {
    let mut out = Vec::new();
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let nums: Vec<usize> = part
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad grid entry {t:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match nums.as_slice() {
            [n, m, k] => out.push(BenchCase { n: *n, m: *m, horizon: *k, reps: 1 }),
            [n, m, k, r] => out.push(BenchCase { n: *n, m: *m, horizon: *k, reps: *r }),
            _ => return Err(format!("grid entry {part:?} is not n,m,K[,reps]")),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum BenchStatus {
    Solved { seconds: f64, value: f64, final_vertices: usize },
    TimedOut { limit: Duration },
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub id: String,
    pub case: BenchCase,
    pub seed: u64,
    pub engine: &'static str,
    pub status: BenchStatus,
}

fn solve_any(inst: AnyInstance, options: &SolverOptions) -> Result<(f64, usize), String> {
    fn go<T: Num>(
        inst: &switchmax::instance::Instance<T>,
        options: &SolverOptions,
    ) -> Result<(f64, usize), String> {
        let r = solve(inst, options).map_err(|e| e.to_string())?;
        Ok((r.value.to_f64(), *r.nk_trace.last().unwrap()))
    }
    match inst {
        AnyInstance::Exact(i) => go(&i, options),
        AnyInstance::Float(i) => go(&i, options),
    }
}

/// Runs every (case, repetition) pair: generate with a derived seed,
/// solve under a wall-clock limit, record the outcome. A timed-out
/// solve's worker thread is abandoned, not killed; outcomes are reported
/// in grid order. Instance seeds are `seed_base + 1_000_003*case_index +
/// rep`, so any single run can be regenerated from the report.
pub fn run_bench(
    cases: &[BenchCase],
    seed_base: u64,
    arithmetic: Arithmetic,
    limit: Duration,
) -> Vec<BenchOutcome> {
    let mut out = Vec::new();
    for (ci, case) in cases.iter().enumerate() {
        for rep in 0..case.reps {
            let seed = seed_base
                .wrapping_add(1_000_003u64.wrapping_mul(ci as u64))
                .wrapping_add(rep as u64);
            let spec =
                GenSpec { n: case.n, m: case.m, horizon: case.horizon, seed, arithmetic };
            let engine = if case.n == 2 { "graham" } else { "lp" };
            let options = SolverOptions {
                rescale: arithmetic == Arithmetic::Float,
                ..SolverOptions::default()
            };
            let status = match gen_random(&spec) {
                Err(e) => BenchStatus::Failed(e.to_string()),
                Ok(inst) => {
                    let (tx, rx) = mpsc::channel();
                    let opts = options.clone();
                    thread::spawn(move || {
                        let start = Instant::now();
                        let r = solve_any(inst, &opts);
                        let _ = tx.send((start.elapsed(), r));
                    });
                    match rx.recv_timeout(limit) {
                        Ok((elapsed, Ok((value, final_vertices)))) => BenchStatus::Solved {
                            seconds: elapsed.as_secs_f64(),
                            value,
                            final_vertices,
                        },
                        Ok((_, Err(e))) => BenchStatus::Failed(e),
                        Err(_) => BenchStatus::TimedOut { limit },
                    }
                }
            };
            out.push(BenchOutcome {
                id: format!("n{}m{}K{}r{}", case.n, case.m, case.horizon, rep),
                case: *case,
                seed,
                engine,
                status,
            });
        }
    }
    out
}

pub fn report_csv(outcomes: &[BenchOutcome]) -> String {
    let mut s = String::from("id,n,m,K,seed,engine,status,seconds,value,final_vertices\n");
    for o in outcomes {
        let (status, secs, value, nk) = match &o.status {
            BenchStatus::Solved { seconds, value, final_vertices } => {
                ("solved", format!("{:.6}", seconds), format!("{}", value), format!("{}", final_vertices))
            }
            BenchStatus::TimedOut { .. } => ("timeout", String::new(), String::new(), String::new()),
            BenchStatus::Failed(_) => ("failed", String::new(), String::new(), String::new()),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            o.id, o.case.n, o.case.m, o.case.horizon, o.seed, o.engine, status, secs, value, nk
        ));
    }
    s
}
