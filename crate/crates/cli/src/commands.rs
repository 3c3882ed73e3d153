//! Subcommand implementations.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use tight_storage_core::cases::{reserve_flexibility_report, run_case, CaseError, DataSet, RunOptions, SchedulePoint};
use tight_storage_core::formulations::{build as build_model, relax, BuildError, BuildOptions, InitialState, ReserveProfile, TirEnergyRows};
use tight_storage_core::hull::{certify_hull_with, random_params_batch, replay_derivation, CombinationStatus, HullCertificate, HullError};
use tight_storage_core::poly::PolyError;
use tight_storage_core::solver::{solve_mip_with, Arithmetic, Branching, SolveError, SolveOptions};
use tight_storage_core::{ModelInstance, Rational, StorageParams};

use crate::args::{
    ArithmeticArg, BranchingArg, BuildArgs, CaseArgs, CertifyArgs, FlexArgs, Format, InitialArg, Output, ReplayArgs,
    SolveArgs, TirRowsArg,
};
use crate::{CliError, Verdict};

fn bad(msg: impl Into<String>) -> CliError {
    CliError::BadInput(msg.into())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn read_params(path: &Path) -> Result<StorageParams, CliError> {
    StorageParams::from_json(&read(path)?).map_err(|e| bad(format!("{}: {e}", path.display())))
}

fn parse_rational(what: &str, s: &str) -> Result<Rational, CliError> {
    s.parse().map_err(|_| bad(format!("{what}: `{s}` is not a number")))
}

/// Fails before any work when the output directory does not exist.
fn check_out(out: &Option<PathBuf>) -> Result<(), CliError> {
    if let Some(p) = out {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(bad(format!("output directory {} does not exist", dir.display())));
        }
    }
    Ok(())
}

fn emit(out: &Output, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(p) => std::fs::write(p, text).map_err(|e| bad(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn unsupported(format: Format, command: &str) -> CliError {
    bad(format!("format {format:?} is not available for `{command}`"))
}

fn arithmetic(a: ArithmeticArg) -> Arithmetic {
    match a {
        ArithmeticArg::Exact => Arithmetic::Exact,
        ArithmeticArg::Float => Arithmetic::Float,
    }
}

fn tir_rows(a: TirRowsArg) -> TirEnergyRows {
    match a {
        TirRowsArg::Corrected => TirEnergyRows::Corrected,
        TirRowsArg::Original => TirEnergyRows::Original,
    }
}

fn build_error(e: BuildError) -> CliError {
    match e {
        BuildError::InvalidParams(v) => {
            let lines: Vec<String> = v.iter().map(|v| format!("  {v}")).collect();
            bad(format!("invalid parameters:\n{}", lines.join("\n")))
        }
        other => bad(other.to_string()),
    }
}

fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::NodeLimit(_) | SolveError::PivotLimit => CliError::Limit(e.to_string()),
        other => bad(other.to_string()),
    }
}

fn hull_error(e: HullError) -> CliError {
    match e {
        HullError::Build(b) => build_error(b),
        HullError::Poly(p @ (PolyError::TooLarge { .. } | PolyError::PivotLimit)) => CliError::Limit(p.to_string()),
        other => bad(other.to_string()),
    }
}

pub fn build(a: &BuildArgs) -> Result<Verdict, CliError> {
    check_out(&a.output.out)?;
    let p = read_params(&a.params)?;
    let rp = match (&a.reserve_up, &a.reserve_down) {
        (None, None) => ReserveProfile::none(),
        (up, down) => {
            let up = parse_rational("--reserve-up", up.as_deref().unwrap_or("0"))?;
            let down = parse_rational("--reserve-down", down.as_deref().unwrap_or("0"))?;
            ReserveProfile::constant(up, down, a.horizon)
        }
    };
    let opts = BuildOptions {
        initial_state: match a.initial {
            InitialArg::Fixed => InitialState::Fixed,
            InitialArg::Variable => InitialState::Variable,
        },
        tir_energy_rows: tir_rows(a.tir_rows),
        ..BuildOptions::default()
    };
    let m = build_model(a.family, &p, a.horizon, &rp, &opts).map_err(build_error)?;
    let m = if a.relax { relax(&m) } else { m };
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => m.to_json() + "\n",
        Format::Text => m.to_lp_text(6),
        f => return Err(unsupported(f, "build")),
    };
    emit(&a.output, &text)?;
    Ok(Verdict::Success)
}

pub fn solve(a: &SolveArgs) -> Result<Verdict, CliError> {
    check_out(&a.output.out)?;
    let m = ModelInstance::from_json(&read(&a.model)?).map_err(|e| bad(format!("{}: {e}", a.model.display())))?;
    let opts = SolveOptions {
        arithmetic: arithmetic(a.arithmetic),
        branching: match a.branching {
            BranchingArg::MostFractional => Branching::MostFractional,
            BranchingArg::FirstFractional => Branching::FirstFractional,
        },
        node_limit: a.node_limit.unwrap_or(SolveOptions::default().node_limit),
        ..SolveOptions::default()
    };
    let r = solve_mip_with(&m, &opts).map_err(solve_error)?;
    let objective = r.objective.as_ref().map(|o| format!("{} (exact {o})", o.to_decimal(1)));
    let text = match a.output.format.unwrap_or(Format::Text) {
        Format::Json => r.to_json() + "\n",
        Format::Csv => format!("{}\n{}\n\n{}", tight_storage_core::SolveResult::csv_header(), r.csv_row(), r.assignment_csv()),
        Format::Text => {
            let mut s = format!("model: {}\nstatus: {:?}\n", m.name, r.status);
            let _ = writeln!(s, "objective: {}", objective.unwrap_or_else(|| "none".into()));
            let _ = writeln!(s, "nodes: {}", r.nodes_explored);
            for (v, x) in &r.assignment {
                let _ = writeln!(s, "  {v} = {} ({x})", x.to_decimal(3));
            }
            s
        }
        Format::Md => {
            let mut s = format!("## {}\n\nstatus: {:?}, objective: {}, nodes: {}\n\n", m.name, r.status, objective.unwrap_or_else(|| "none".into()), r.nodes_explored);
            s.push_str("| variable | value |\n|---|---|\n");
            for (v, x) in &r.assignment {
                let _ = writeln!(s, "| {v} | {} |", x.to_decimal(1));
            }
            s
        }
    };
    emit(&a.output, &text)?;
    Ok(if r.is_optimal() { Verdict::Success } else { Verdict::Negative })
}

#[derive(Serialize)]
struct InstanceSummary {
    index: usize,
    equality: bool,
    lp_route_equal: bool,
    vertex_route_equal: bool,
    removed_rows: usize,
    removals_verified: bool,
    /// Parameters and witness are kept only for failing instances.
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<StorageParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<serde_json::Value>,
}

impl InstanceSummary {
    fn new(index: usize, c: &HullCertificate) -> InstanceSummary {
        let ok = c.equality && c.all_removals_verified();
        InstanceSummary {
            index,
            equality: c.equality,
            lp_route_equal: c.lp_route_equal,
            vertex_route_equal: c.vertex_route_equal,
            removed_rows: c.removed_rows.len(),
            removals_verified: c.all_removals_verified(),
            params: (!ok).then(|| c.params.clone()),
            witness: c.witness.as_ref().map(|w| serde_json::to_value(w).expect("witness serializes")),
        }
    }
}

pub fn certify(a: &CertifyArgs) -> Result<Verdict, CliError> {
    check_out(&a.output.out)?;
    let tir = tir_rows(a.tir_rows);
    let validate = !a.no_validate;
    let format = a.output.format.unwrap_or(Format::Text);
    if matches!(format, Format::Csv | Format::Md) {
        return Err(unsupported(format, "certify"));
    }
    let (basic, tight) = a.family.pair().ok_or_else(|| bad(format!("{} has no tight counterpart", a.family)))?;

    if let Some(path) = &a.params {
        let p = read_params(path)?;
        let c = certify_hull_with(&p, a.family, tir, validate).map_err(hull_error)?;
        let text = match format {
            Format::Json => {
                let v = json!({ "seed": null, "certificate": serde_json::to_value(&c).expect("certificate serializes") });
                serde_json::to_string_pretty(&v).expect("json") + "\n"
            }
            _ => format!("seed: none\nparams: {}\n{}", path.display(), c.to_text()),
        };
        emit(&a.output, &text)?;
        return Ok(if c.equality && c.all_removals_verified() { Verdict::Success } else { Verdict::Negative });
    }

    let n = a.random.expect("clap requires --params or --random");
    let seed = a.seed.expect("clap requires --seed with --random");
    let batch = random_params_batch(basic, n, seed);
    let results: Vec<Result<HullCertificate, HullError>> =
        batch.par_iter().map(|p| certify_hull_with(p, a.family, tir, validate)).collect();
    let mut summaries = Vec::with_capacity(n);
    for (i, r) in results.into_iter().enumerate() {
        summaries.push(InstanceSummary::new(i, &r.map_err(hull_error)?));
    }
    let passed = summaries.iter().filter(|s| s.equality && s.removals_verified).count();
    let text = match format {
        Format::Json => {
            let v = json!({
                "seed": seed,
                "family": basic.name(),
                "tight_family": tight.name(),
                "instances": n,
                "passed": passed,
                "results": summaries,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        _ => {
            let mut s = format!("seed: {seed}\nfamily: {basic} vs {tight}\ninstances: {n}\n");
            for r in &summaries {
                let _ = writeln!(
                    s,
                    "#{} equality={} lp_route={} vertex_route={} removed_rows={} verified={}",
                    r.index, r.equality, r.lp_route_equal, r.vertex_route_equal, r.removed_rows, r.removals_verified
                );
            }
            let _ = writeln!(s, "equal: {passed}/{n}");
            s
        }
    };
    emit(&a.output, &text)?;
    Ok(if passed == n { Verdict::Success } else { Verdict::Negative })
}

pub fn replay(a: &ReplayArgs) -> Result<Verdict, CliError> {
    check_out(&a.output.out)?;
    let p = read_params(&a.params)?;
    let t = replay_derivation(&p).map_err(hull_error)?;
    let text = match a.output.format.unwrap_or(Format::Text) {
        Format::Json => t.to_json() + "\n",
        Format::Text => t.to_text(),
        f => return Err(unsupported(f, "replay")),
    };
    emit(&a.output, &text)?;
    let explained = |s: &CombinationStatus| match s {
        CombinationStatus::Unexplained => false,
        CombinationStatus::Dominated { verified, .. } => *verified,
        _ => true,
    };
    let ok = t.equals_tight
        && t.combinations.iter().all(|c| explained(&c.status))
        && t.rewritten_status.iter().all(explained);
    Ok(if ok { Verdict::Success } else { Verdict::Negative })
}

fn case_error(e: CaseError) -> CliError {
    match e {
        CaseError::Solve(s) => solve_error(s),
        CaseError::Build(b) => build_error(b),
        other => bad(other.to_string()),
    }
}

pub fn case(a: &CaseArgs) -> Result<Verdict, CliError> {
    check_out(&a.output.out)?;
    let data = DataSet::load(a.data).map_err(case_error)?;
    let opts = RunOptions {
        arithmetic: arithmetic(a.arithmetic),
        node_limit: a.node_limit.unwrap_or(RunOptions::default().node_limit),
    };
    let r = run_case(a.case, &data, &opts).map_err(case_error)?;
    let text = match a.output.format.unwrap_or(Format::Md) {
        Format::Json => r.to_json() + "\n",
        Format::Csv => r.to_csv(),
        Format::Md => r.to_markdown(),
        Format::Text => r.to_text(),
    };
    emit(&a.output, &text)?;
    Ok(if r.ordering.holds() { Verdict::Success } else { Verdict::Negative })
}

pub fn flex(a: &FlexArgs) -> Result<Verdict, CliError> {
    check_out(&a.output.out)?;
    let p = read_params(&a.params)?;
    let point = SchedulePoint {
        soc_before: parse_rational("--soc", &a.soc)?,
        p_c: parse_rational("--pc", &a.pc)?,
        p_d: parse_rational("--pd", &a.pd)?,
    };
    let r = reserve_flexibility_report(&p, &point).map_err(case_error)?;
    let text = match a.output.format.unwrap_or(Format::Text) {
        Format::Json => r.to_json() + "\n",
        Format::Text => r.to_text(),
        f => return Err(unsupported(f, "flex")),
    };
    emit(&a.output, &text)?;
    Ok(Verdict::Success)
}
