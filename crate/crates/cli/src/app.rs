//! Command-line surface.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime diagnostics
//! (bad instance files, numeric failures, infeasibility).

use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use switchmax::analysis::{
    classify_vertices, nk_csv, trace_nk,
};
use switchmax::hull::HullOptions;
use switchmax::instance::{emit_instance, parse_instance, AnyInstance, Arithmetic, Instance, Objective};
use switchmax::num::{Num, Rational};
use switchmax::reductions::{
    check_k_mortal, export_minlp, jsr_lower_bound, parse_dimacs, sat_to_instance, NormP,
    ReductionArtifact,
};
use switchmax::solver::{brute_force, layers, solve, Engine, SolverOptions};

use crate::bench::{parse_grid, report_csv, run_bench};
use crate::gen::{gen_random, GenSpec};

#[derive(Parser)]
#[command(name = "switchmax", version, about = "Optimal switching sequences for linear systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Auto,
    Graham,
    Lp,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Graham => Engine::Graham,
            EngineArg::Lp => Engine::Lp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    L1,
    L2sq,
    Linf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

impl From<ModeArg> for Arithmetic {
    fn from(m: ModeArg) -> Arithmetic {
        match m {
            ModeArg::Float => Arithmetic::Float,
            ModeArg::Exact => Arithmetic::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Inf,
}

impl From<NormArg> for NormP {
    fn from(p: NormArg) -> NormP {
        match p {
            NormArg::One => NormP::L1,
            NormArg::Two => NormP::L2,
            NormArg::Inf => NormP::LInf,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance: optimal value, switching sequence, final state
    Solve {
        instance: PathBuf,
        /// Override the instance's objective
        #[arg(long, value_enum)]
        objective: Option<ObjectiveArg>,
        /// Normalize each layer (homogeneous objectives only); guards
        /// float overflow at large K
        #[arg(long)]
        rescale: bool,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        /// Write the per-layer vertex counts as CSV
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Exhaustive check over all m^K sequences (small instances)
    BruteForce {
        instance: PathBuf,
        #[arg(long, default_value_t = 1 << 24)]
        cap: u64,
    },
    /// Vertex counts N_k for k = 0..=K
    TraceNk {
        instance: PathBuf,
        #[arg(long = "K")]
        horizon: usize,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify layer-k vertices by outer normal cone (n = 2)
    Classify {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Emit a seeded random instance
    GenRandom {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long = "K")]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Float)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a DIMACS 3-CNF as a switching instance
    GenSat {
        cnf: PathBuf,
        /// Emit the row-stochastic (transposed) variant
        #[arg(long)]
        row_stochastic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether some length-k product of the matrices is zero
    CheckMortal {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Lower bound on the k-step joint spectral radius estimate
    JsrBound {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = NormArg::Two)]
        p: NormArg,
    },
    /// Export the bilinear mixed-integer formulation as AMPL text
    ExportMinlp {
        instance: PathBuf,
        /// Write <prefix>.mod and <prefix>.dat instead of stdout
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Solve a grid of seeded random instances under a time limit
    Bench {
        /// Semicolon-separated n,m,K[,reps]
        grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 600)]
        limit_secs: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Float)]
        mode: ModeArg,
    },
}

type AppResult = Result<(), Box<dyn std::error::Error>>;

fn load(path: &PathBuf) -> Result<AnyInstance, Box<dyn std::error::Error>> {
    let text = fs::read_to_string(path)?;
    Ok(parse_instance(&text)?)
}

fn apply_override<T: Num>(inst: &mut Instance<T>, objective: Option<ObjectiveArg>) {
    if let Some(o) = objective {
        inst.objective = match o {
            ObjectiveArg::L1 => Objective::L1,
            ObjectiveArg::L2sq => Objective::L2Sq,
            ObjectiveArg::Linf => Objective::LInf,
        };
    }
}

fn join_display<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_solve<T: Num>(
    inst: &Instance<T>,
    options: &SolverOptions,
    trace_out: Option<&PathBuf>,
) -> AppResult {
    let r = solve(inst, options)?;
    println!("value: {}", r.value);
    println!("sequence: {}", join_display(&r.sequence));
    println!("xK: {}", join_display(r.final_state.entries()));
    println!("N_K: {}", r.nk_trace.last().unwrap());
    if let Some(path) = trace_out {
        let trace = switchmax::analysis::NkTrace {
            label: "solve".into(),
            counts: r.nk_trace.clone(),
        };
        fs::write(path, nk_csv(&trace))?;
    }
    Ok(())
}

fn cmd_brute<T: Num>(inst: &Instance<T>, options: &SolverOptions) -> AppResult {
    let (value, seq, x_k) = brute_force(inst, options)?;
    println!("value: {}", value);
    println!("sequence: {}", join_display(&seq));
    println!("reachable: {}", x_k.len());
    Ok(())
}

fn cmd_trace<T: Num>(inst: &Instance<T>, horizon: usize, csv: Option<&PathBuf>) -> AppResult {
    let trace = trace_nk("cli", &inst.matrices, &inst.start, horizon, &SolverOptions::default())?;
    let text = nk_csv(&trace);
    match csv {
        Some(path) => fs::write(path, text)?,
        None => print!("{}", text),
    }
    Ok(())
}

fn cmd_classify<T: Num>(inst: &Instance<T>, k: usize) -> AppResult {
    let (all, _) = layers(inst, k, &SolverOptions::default())?;
    let points: Vec<_> = all[k].points.iter().map(|p| p.x.clone()).collect();
    let c = classify_vertices(&points, &HullOptions::default())?;
    println!("k,e0,e1,e2,e3,e4");
    println!(
        "{},{},{},{},{},{}",
        k,
        c.sets[0].len(),
        c.sets[1].len(),
        c.sets[2].len(),
        c.sets[3].len(),
        c.sets[4].len()
    );
    Ok(())
}

pub fn run(cli_args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(cli_args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

fn dispatch(cli: Cli) -> AppResult {
    match cli.cmd {
        Cmd::Solve { instance, objective, rescale, engine, trace_out } => {
            let options = SolverOptions {
                engine: engine.into(),
                rescale,
                ..SolverOptions::default()
            };
            match load(&instance)? {
                AnyInstance::Exact(mut i) => {
                    apply_override(&mut i, objective);
                    cmd_solve(&i, &options, trace_out.as_ref())
                }
                AnyInstance::Float(mut i) => {
                    apply_override(&mut i, objective);
                    cmd_solve(&i, &options, trace_out.as_ref())
                }
            }
        }
        Cmd::BruteForce { instance, cap } => {
            let options = SolverOptions { brute_force_cap: cap, ..SolverOptions::default() };
            match load(&instance)? {
                AnyInstance::Exact(i) => cmd_brute(&i, &options),
                AnyInstance::Float(i) => cmd_brute(&i, &options),
            }
        }
        Cmd::TraceNk { instance, horizon, csv } => match load(&instance)? {
            AnyInstance::Exact(i) => cmd_trace(&i, horizon, csv.as_ref()),
            AnyInstance::Float(i) => cmd_trace(&i, horizon, csv.as_ref()),
        },
        Cmd::Classify { instance, k } => match load(&instance)? {
            AnyInstance::Exact(i) => cmd_classify(&i, k),
            AnyInstance::Float(i) => cmd_classify(&i, k),
        },
        Cmd::GenRandom { n, m, horizon, seed, mode, out } => {
            let spec = GenSpec { n, m, horizon, seed, arithmetic: mode.into() };
            let text = emit_instance(&gen_random(&spec)?);
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{}", text),
            }
            Ok(())
        }
        Cmd::GenSat { cnf, row_stochastic, out } => {
            let formula = parse_dimacs(&fs::read_to_string(&cnf)?)?;
            let art: ReductionArtifact<Rational> = sat_to_instance(&formula, row_stochastic)?;
            eprintln!("threshold: {}", art.threshold);
            let text = emit_instance(&AnyInstance::Exact(art.instance));
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{}", text),
            }
            Ok(())
        }
        Cmd::CheckMortal { instance, k } => {
            let mortal = match load(&instance)? {
                AnyInstance::Exact(i) => check_k_mortal(&i.matrices, k, &SolverOptions::default())?,
                AnyInstance::Float(i) => check_k_mortal(&i.matrices, k, &SolverOptions::default())?,
            };
            println!("mortal: {}", mortal);
            Ok(())
        }
        Cmd::JsrBound { instance, k, p } => {
            let bound = match load(&instance)? {
                AnyInstance::Exact(i) => {
                    jsr_lower_bound(&i.matrices, k, &i.start, p.into(), &SolverOptions::default())?
                }
                AnyInstance::Float(i) => {
                    jsr_lower_bound(&i.matrices, k, &i.start, p.into(), &SolverOptions::default())?
                }
            };
            println!("jsr_lower_bound: {}", bound);
            Ok(())
        }
        Cmd::ExportMinlp { instance, out_prefix } => {
            let export = match load(&instance)? {
                AnyInstance::Exact(i) => export_minlp(&i)?,
                AnyInstance::Float(i) => export_minlp(&i)?,
            };
            match out_prefix {
                Some(prefix) => {
                    fs::write(prefix.with_extension("mod"), &export.model)?;
                    fs::write(prefix.with_extension("dat"), &export.data)?;
                }
                None => {
                    print!("{}", export.model);
                    println!("# --- data ---");
                    print!("{}", export.data);
                }
            }
            Ok(())
        }
        Cmd::Bench { grid, seed, limit_secs, mode } => {
            let cases = parse_grid(&grid).map_err(switchmax::Error::Unsupported)?;
            let outcomes =
                run_bench(&cases, seed, mode.into(), Duration::from_secs(limit_secs));
            print!("{}", report_csv(&outcomes));
            Ok(())
        }
    }
}
