//! Command-line surface: solve families and print their certificates, verify
//! randomness closed forms against brute force, emit sweep data, and run the
//! see-saw oracle. JSON goes to stdout by default; sweeps emit CSV.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 verification failure,
//! 4 unsupported family.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bellsos_core::{
    brute_force_pmax, seesaw_max_violation, solve_family_measurements, sweep_alpha, sweep_p,
    tilted_pmax_closed_form, tilted_randomness_report, violation, werner_pmax_closed_form,
    BellFamily, DichotomicObservable, Error as CoreError, FamilyKind, MeasurementSet, SeesawConfig,
    SweepResult, TwoQubitState,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use output::{fmt_sig12, render_json};

const EXIT_INVALID_ARGS: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bellsos",
    version,
    about = "Bell operators, sum-of-squares certificates of maximal violation, and device-independent randomness for two qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a family: optimal measurements, certificate, and bounds.
    Solve {
        family: FamilyArg,
        /// Weight of the tilted family (requires alpha >= 1).
        #[arg(long)]
        alpha: Option<f64>,
        /// Settings per party for the gisin and chained families.
        #[arg(long)]
        n: Option<usize>,
        /// Write output to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Guessing probability and min-entropy for the tilted family (chsh is
    /// tilted at alpha = 1), optionally on a Werner state.
    Randomness {
        family: FamilyArg,
        #[arg(long)]
        alpha: Option<f64>,
        /// Evaluate on the Werner state with this visibility in [0, 1].
        #[arg(long = "werner-p")]
        werner_p: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a sweep as CSV (header: alpha,p,p_max,r_min_bits,verified).
    Sweep {
        /// Variable to sweep.
        #[arg(long)]
        var: SweepVar,
        /// Fixed tilted weight for visibility sweeps.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// See-saw search for the maximal violation, from random restarts.
    Oracle {
        family: FamilyArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Base seed for the random initializations.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical bound of a family by deterministic-strategy enumeration.
    Lhv {
        family: FamilyArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the shipped families with their canonical bounds.
    Families {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Chsh,
    Tilted,
    Ebi,
    Gisin,
    Chained,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepVar {
    Alpha,
    P,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID_ARGS,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::UnsupportedFamily(_) => EXIT_UNSUPPORTED,
            CoreError::VerificationMismatch { .. } => EXIT_VERIFICATION,
            _ => EXIT_INVALID_ARGS,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            family,
            alpha,
            n,
            out,
        } => cmd_solve(family, alpha, n, out),
        Command::Randomness {
            family,
            alpha,
            werner_p,
            out,
        } => cmd_randomness(family, alpha, werner_p, out),
        Command::Sweep {
            var,
            alpha,
            from,
            to,
            steps,
            out,
            format,
        } => cmd_sweep(var, alpha, from, to, steps, out, format),
        Command::Oracle {
            family,
            alpha,
            n,
            restarts,
            seed,
            out,
        } => cmd_oracle(family, alpha, n, restarts, seed, out),
        Command::Lhv {
            family,
            alpha,
            n,
            out,
        } => cmd_lhv(family, alpha, n, out),
        Command::Families { out } => cmd_families(out),
    }
}

/// Build the requested family instance, rejecting flags that do not apply.
fn build_family(
    arg: FamilyArg,
    alpha: Option<f64>,
    n: Option<usize>,
) -> Result<BellFamily, CliError> {
    match arg {
        FamilyArg::Chsh | FamilyArg::Ebi => {
            if alpha.is_some() {
                return Err(CliError::invalid(
                    "--alpha applies only to the tilted family",
                ));
            }
            if n.is_some() {
                return Err(CliError::invalid(
                    "--n applies only to the gisin and chained families",
                ));
            }
            Ok(match arg {
                FamilyArg::Chsh => BellFamily::chsh(),
                _ => BellFamily::ebi(),
            })
        }
        FamilyArg::Tilted => {
            if n.is_some() {
                return Err(CliError::invalid(
                    "--n applies only to the gisin and chained families",
                ));
            }
            Ok(BellFamily::tilted(alpha.unwrap_or(1.0))?)
        }
        FamilyArg::Gisin | FamilyArg::Chained => {
            if alpha.is_some() {
                return Err(CliError::invalid(
                    "--alpha applies only to the tilted family",
                ));
            }
            let n = n.unwrap_or(3);
            Ok(match arg {
                FamilyArg::Gisin => BellFamily::gisin(n)?,
                _ => BellFamily::chained(n)?,
            })
        }
    }
}

fn parameters_json(kind: &FamilyKind) -> Value {
    match kind {
        FamilyKind::Chsh | FamilyKind::Ebi => json!({}),
        FamilyKind::Tilted { alpha } => json!({ "alpha": alpha }),
        FamilyKind::Gisin { n } | FamilyKind::Chained { n } => json!({ "n": n }),
    }
}

fn bloch_json(observable: &DichotomicObservable) -> Value {
    let r = observable
        .bloch()
        .expect("measurement-set observables carry a Bloch vector");
    json!({ "x": r.x, "y": r.y, "z": r.z })
}

fn measurements_json(ms: &MeasurementSet) -> Value {
    json!({
        "alice": ms.alice().iter().map(bloch_json).collect::<Vec<_>>(),
        "bob": ms.bob().iter().map(bloch_json).collect::<Vec<_>>(),
    })
}

fn emit(text: String, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display()))),
    }
}

fn cmd_solve(
    family: FamilyArg,
    alpha: Option<f64>,
    n: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let family = build_family(family, alpha, n)?;
    let solved = solve_family_measurements(&family)?;
    let cert = &solved.certificate;
    let doc = json!({
        "family": family.kind.id(),
        "parameters": parameters_json(&family.kind),
        "state": "phi_plus",
        "measurements": measurements_json(&solved.measurements),
        "beta": cert.beta,
        "omegas": cert.omegas,
        "residual_norms": cert.residual_norms,
        "identity_gap": cert.identity_gap,
        "saturated": cert.saturated,
        "sum_omega": cert.sum_omega,
        "beta_mismatch": cert.beta_mismatch,
        "violation": solved.violation,
        "lhv_bound": family.lhv_bound,
        "quantum_bound": family.quantum_bound,
    });
    emit(render_json(doc), out)
}

fn cmd_randomness(
    family: FamilyArg,
    alpha: Option<f64>,
    werner_p: Option<f64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let alpha = match family {
        FamilyArg::Chsh => {
            if let Some(a) = alpha {
                if a != 1.0 {
                    return Err(CliError::invalid(
                        "chsh is the tilted family at alpha = 1; use `randomness tilted --alpha ...`",
                    ));
                }
            }
            1.0
        }
        FamilyArg::Tilted => alpha.unwrap_or(1.0),
        _ => {
            return Err(CoreError::UnsupportedFamily(
                "randomness closed forms exist for the tilted family (chsh at alpha = 1) only"
                    .into(),
            )
            .into())
        }
    };

    // Table pipeline, closed form, and independent maximizer must all agree.
    let report = tilted_randomness_report(alpha, werner_p)?;
    let closed = match werner_p {
        None => tilted_pmax_closed_form(alpha)?,
        Some(p) => werner_pmax_closed_form(alpha, p)?,
    };
    let family = BellFamily::tilted(alpha)?;
    let solved = solve_family_measurements(&family)?;
    let state = match werner_p {
        None => TwoQubitState::maximally_entangled(),
        Some(p) => TwoQubitState::werner(p)?,
    };
    let brute = brute_force_pmax(&family.coefficients, &state, &solved.measurements)?;
    if (closed - brute).abs() > bellsos_core::AGREEMENT_TOL {
        return Err(CoreError::VerificationMismatch {
            closed_form: closed,
            brute_force: brute,
        }
        .into());
    }

    let bell_value = violation(&family.coefficients, &solved.measurements, &state)?;
    let params = report.closed_form_params.expect("pipeline sets parameters");
    let mut doc = json!({
        "family": family.kind.id(),
        "parameters": match werner_p {
            None => json!({ "alpha": alpha }),
            Some(p) => json!({ "alpha": alpha, "werner_p": p }),
        },
        "p_max": closed,
        "p_max_brute": brute,
        "r_min_bits": report.r_min_bits,
        "verified": true,
        "argmax": {
            "a": report.argmax.a,
            "b": report.argmax.b,
            "x": report.argmax.x,
            "y": report.argmax.y,
        },
        "closed_form_params": {
            "alpha": params.alpha,
            "u": params.u,
            "p": params.p,
        },
        "violation_abs": bell_value.abs(),
    });
    if werner_p.is_some() {
        doc["violation_note"] = Value::String(
            "violation_abs is |tr(B rho)|; the raw trace is negative because the \
             measurements target |phi+> while the Werner state is built on the singlet"
                .into(),
        );
    }
    emit(render_json(doc), out)
}

fn render_sweep_csv(sweep: &SweepResult) -> String {
    let mut text = String::from("alpha,p,p_max,r_min_bits,verified\n");
    for row in &sweep.rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_sig12(row.alpha),
            fmt_sig12(row.p),
            fmt_sig12(row.p_max),
            fmt_sig12(row.r_min_bits),
            u8::from(row.verified),
        ));
    }
    text
}

fn render_sweep_json(sweep: &SweepResult) -> String {
    let rows: Vec<Value> = sweep
        .rows
        .iter()
        .map(|row| {
            json!({
                "alpha": row.alpha,
                "p": row.p,
                "p_max": row.p_max,
                "r_min_bits": row.r_min_bits,
                "verified": row.verified,
                "below_violation_threshold": row.below_violation_threshold,
            })
        })
        .collect();
    render_json(json!({
        "rows": rows,
        "all_verified": sweep.all_verified,
        "monotone": sweep.monotone,
    }))
}

fn cmd_sweep(
    var: SweepVar,
    alpha: f64,
    from: f64,
    to: f64,
    steps: usize,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let sweep = match var {
        SweepVar::Alpha => sweep_alpha(from, to, steps)?,
        SweepVar::P => sweep_p(alpha, from, to, steps)?,
    };
    let flagged = sweep
        .rows
        .iter()
        .filter(|r| r.below_violation_threshold)
        .count();
    if flagged > 0 {
        eprintln!(
            "warning: {flagged} row(s) lie at visibilities with no quantum violation \
             (p <= lhv_bound / quantum_bound)"
        );
    }
    let text = match format {
        Format::Csv => render_sweep_csv(&sweep),
        Format::Json => render_sweep_json(&sweep),
    };
    emit(text, out)?;
    if !sweep.all_verified {
        return Err(CliError {
            code: EXIT_VERIFICATION,
            message: "at least one sweep row failed closed-form verification".into(),
        });
    }
    Ok(())
}

fn cmd_oracle(
    family: FamilyArg,
    alpha: Option<f64>,
    n: Option<usize>,
    restarts: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let family = build_family(family, alpha, n)?;
    let config = SeesawConfig {
        restarts,
        seed,
        ..SeesawConfig::default()
    };
    let result = seesaw_max_violation(
        &family.coefficients,
        &TwoQubitState::maximally_entangled(),
        &config,
    )?;
    let doc = json!({
        "family": family.kind.id(),
        "parameters": parameters_json(&family.kind),
        "best_violation": result.best_violation,
        "iterations": result.iterations,
        "restarts_used": result.restarts_used,
        "converged": result.converged,
        "seed": result.seed,
        "measurements": measurements_json(&result.measurements),
        "quantum_bound": family.quantum_bound,
    });
    emit(render_json(doc), out)
}

fn cmd_lhv(
    family: FamilyArg,
    alpha: Option<f64>,
    n: Option<usize>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let family = build_family(family, alpha, n)?;
    let doc = json!({
        "family": family.kind.id(),
        "parameters": parameters_json(&family.kind),
        "alice_settings": family.alice_settings(),
        "bob_settings": family.bob_settings(),
        "lhv_bound": family.lhv_bound,
        "quantum_bound": family.quantum_bound,
    });
    emit(render_json(doc), out)
}

fn cmd_families(out: Option<PathBuf>) -> Result<(), CliError> {
    let canonical = [
        BellFamily::chsh(),
        BellFamily::tilted(1.0).map_err(CliError::from)?,
        BellFamily::ebi(),
        BellFamily::gisin(3).map_err(CliError::from)?,
        BellFamily::chained(3).map_err(CliError::from)?,
    ];
    let entries: Vec<Value> = canonical
        .iter()
        .map(|f| {
            json!({
                "id": f.kind.id(),
                "parameters": parameters_json(&f.kind),
                "alice_settings": f.alice_settings(),
                "bob_settings": f.bob_settings(),
                "lhv_bound": f.lhv_bound,
                "quantum_bound": f.quantum_bound,
            })
        })
        .collect();
    emit(render_json(json!({ "families": entries })), out)
}
