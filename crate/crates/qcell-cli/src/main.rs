use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcell::circuit_ir::GateKind;
use qcell::lsx::{self, Mode};
use qcell::scheduler::{full_multiplier_schedule, product_failures, product_pairs, ScheduleOptions};
use qcell::sim::{assert_equiv, Reference};
use qcell::{decomp, router, tiler, Error};

#[derive(Parser)]
#[command(name = "qcell", about = "Standard-cell layout compiler for tiled quantum multipliers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the tiled layout for n-bit operands and write layout plus mapping JSON.
    Build { n: i64, out: Option<PathBuf> },
    /// Generate the multiplier schedule and print its metrics.
    Schedule {
        n: i64,
        #[arg(long)]
        optimize_toffoli_depth: bool,
        #[arg(long)]
        lower_clifford_t: bool,
        /// Print the ASCII SWAP timeline.
        #[arg(long)]
        timeline: bool,
        /// Write the schedule JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a multiplier width by simulation, or a decomposition by name.
    Verify { target: String },
    /// Compare tiled and greedily routed SWAP costs and write the CSV.
    Compare { n_min: usize, n_max: usize, csv: PathBuf },
    /// Extract and validate the lattice-surgery program of the lowered schedule.
    Ls {
        n: i64,
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with its exit code: 1 for failed checks and I/O, 2 for bad usage.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::InvalidArgument(_) | Error::Mode(_) | Error::UnsupportedGate(_) => 2,
            _ => 1,
        };
        Fail(code, e.to_string())
    }
}

fn write(path: &PathBuf, body: &str) -> Result<(), Fail> {
    std::fs::write(path, body).map_err(|e| Fail(1, format!("cannot write {}: {e}", path.display())))
}

fn width(n: i64) -> Result<usize, Fail> {
    if n < 1 {
        return Err(Fail(2, format!("invalid argument: n must be at least 1, got {n}")));
    }
    Ok(n as usize)
}

fn build(n: i64, out: Option<PathBuf>) -> Result<(), Fail> {
    let layout = tiler::build_multiplier_layout(n)?;
    let n = n as usize;
    let mapping = tiler::initial_mapping(&layout, n)?;
    println!("{} qubits, usage {}", tiler::qubit_count(n as i64)?, layout.usage_ratio());
    if let Some(p) = out {
        let v = serde_json::json!({ "n": n, "layout": layout, "mapping": mapping });
        write(&p, &serde_json::to_string_pretty(&v).expect("json"))?;
    }
    Ok(())
}

fn schedule(n: i64, opts: ScheduleOptions, timeline: bool, out: Option<PathBuf>) -> Result<(), Fail> {
    let ms = full_multiplier_schedule(width(n)?, opts)?;
    for s in ms.step_metrics()? {
        println!("{:<12} swapC={} swapD={}", s.name, s.swap_count, s.swap_depth);
    }
    let m = ms.metrics()?;
    println!(
        "swapC={} swapD={} tcount={} tdepth={} depth={}",
        m.swap_count, m.swap_depth, m.t_count, m.t_depth, m.total_depth
    );
    let r = ms.validate()?;
    println!("validation: {} violations", r.violations.len());
    if timeline {
        print!("{}", ms.ascii_timeline()?);
    }
    if let Some(p) = out {
        write(&p, &ms.to_json())?;
    }
    if !r.is_valid() {
        return Err(Fail(1, "schedule fails validation".into()));
    }
    Ok(())
}

fn verify(target: &str) -> Result<(), Fail> {
    if let Ok(n) = target.parse::<i64>() {
        let ms = full_multiplier_schedule(width(n)?, ScheduleOptions::default())?;
        let pairs = product_pairs(ms.n);
        let bad = product_failures(&ms, &pairs)?;
        println!("{}/{} products correct", pairs.len() - bad.len(), pairs.len());
        let v = ms.validate()?;
        println!("validation: {} violations", v.violations.len());
        if !bad.is_empty() || !v.is_valid() {
            return Err(Fail(1, format!("verification failed for n = {n}")));
        }
        return Ok(());
    }
    let d = decomp::by_name(target).ok_or_else(|| {
        let names: Vec<_> = decomp::catalogue().iter().map(|d| d.name).collect();
        Fail(2, format!("unknown target {target}; expected a width or one of {}", names.join(", ")))
    })?;
    let tol = 1e-10;
    let r = assert_equiv(&d.schedule, d.reference, &d.data, &d.ancillae, tol)?;
    let what = match d.reference {
        Reference::Ccz => "CCZ",
        Reference::Toffoli => "Toffoli",
        Reference::Cs => "CS",
        Reference::And => "AND",
        Reference::Identity => "identity",
    };
    if r.equivalent {
        println!("equivalent to {what}, tol {tol:e}");
        Ok(())
    } else {
        println!("NOT equivalent to {what}: {}", r.detail);
        Err(Fail(1, format!("{target} fails verification")))
    }
}

fn compare(n_min: usize, n_max: usize, csv: PathBuf) -> Result<(), Fail> {
    if n_min < 2 || n_min > n_max {
        return Err(Fail(2, format!("need 2 <= n-min <= n-max, got {n_min} {n_max}")));
    }
    let rows = router::compare(n_min..=n_max)?;
    write(&csv, &router::to_csv(&rows)?)?;
    for r in &rows {
        let (c, d) = r.ratios();
        println!(
            "n={} tiled {}/{} routed {}/{} ratio {c:.2}/{d:.2}",
            r.n, r.tiled_swap_c, r.tiled_swap_d, r.routed_swap_c, r.routed_swap_d
        );
    }
    Ok(())
}

fn ls(n: i64, mode: &str, out: Option<PathBuf>) -> Result<(), Fail> {
    let mode: Mode = mode.parse()?;
    let opts = ScheduleOptions {
        lower_clifford_t: true,
        ..Default::default()
    };
    let ms = full_multiplier_schedule(width(n)?, opts)?;
    let prog = lsx::extract_ls(&ms.schedule, &ms.layout, &ms.mapping0, mode)?;
    let rep = lsx::validate_ls(&prog, mode);
    println!(
        "steps={} patterns={} transversal={} rotations={} cnots={}",
        prog.depth(),
        prog.pattern_count(),
        prog.transversal_count(),
        prog.rotation_count(),
        ms.schedule.count(GateKind::CNOT) + 3 * ms.schedule.count(GateKind::SWAP)
    );
    println!("{rep}");
    if let Some(p) = out {
        write(&p, &prog.to_json())?;
    }
    if !rep.satisfied() {
        return Err(Fail(1, rep.violations.join("; ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Build { n, out } => build(n, out),
        Cmd::Schedule {
            n,
            optimize_toffoli_depth,
            lower_clifford_t,
            timeline,
            out,
        } => schedule(
            n,
            ScheduleOptions {
                optimize_toffoli_depth,
                lower_clifford_t,
            },
            timeline,
            out,
        ),
        Cmd::Verify { target } => verify(&target),
        Cmd::Compare { n_min, n_max, csv } => compare(n_min, n_max, csv),
        Cmd::Ls { n, mode, out } => ls(n, &mode, out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("qcell: {msg}");
            ExitCode::from(code)
        }
    }
}
