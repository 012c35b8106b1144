//! qhist: scenario-driven command line for the histories crate.

mod render;
mod scenario;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use histories::density::{
    density_from_history_vector, space_reduce, time_reduce, von_neumann_entropy, LogBase,
    Subsystem,
};
use histories::engine::DEFAULT_CAP;
use histories::inequality::{
    chsh_evaluate, lg_evaluate, lg_interference_decomposition, ChshMode, ChshReport,
};
use histories::observables::{sample_sequences, two_time_intermediate_state};
use histories::protocol::verify_protocol_equivalence;

use render::{kv_csv, kv_table, sig7, SequenceRows};
use scenario::{build_chsh, build_composite, build_lg, build_spec, load_scenario};

const PROBABILITY_CONTRACT_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn contract(message: String) -> Self {
        Self { code: 3, message }
    }

    pub fn message(&self) -> &str {
        &self.message
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    #[value(name = "fixed-basis")]
    FixedBasis,
    #[value(name = "per-pair")]
    PerPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SubsystemArg {
    A,
    B,
}

#[derive(Parser, Debug)]
#[command(name = "qhist", about = "Quantum history vectors from scenario files")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    /// RNG seed (sampling demos only).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Enumeration cap on the number of histories.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// History vector content: nonzero amplitudes with probabilities.
    Vector { scenario: String },
    /// Probabilities of all outcome sequences.
    Probs { scenario: String },
    /// Decoherence-condition scan over all history pairs.
    Consistency {
        scenario: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Amplitude and probability sum-rule residuals.
    Marginals { scenario: String },
    /// Von Neumann entropy of a reduced history density matrix.
    Entropy {
        scenario: String,
        /// Comma-separated 1-based slots to trace out.
        #[arg(long, value_delimiter = ',', conflicts_with = "subsystem")]
        trace_out: Vec<usize>,
        /// Keep this spatial factor (needs a composite block).
        #[arg(long, value_enum)]
        subsystem: Option<SubsystemArg>,
    },
    /// Compare the cloning protocol against the direct construction.
    ProtocolCheck { scenario: String },
    /// Leggett-Garg report for the scenario's lg block.
    Lg { scenario: String },
    /// Temporal CHSH report for the scenario's chsh block.
    Chsh {
        scenario: String,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Postselected intermediate state of a two-slot scenario.
    Intermediate {
        scenario: String,
        /// Outcome index of the final measurement.
        #[arg(long)]
        beta2: usize,
    },
    /// Run a built-in scenario: xz-example, bell2-chsh or precession-lg.
    Demo {
        name: String,
        /// Draw this many outcome sequences and report frequencies.
        #[arg(long, default_value_t = 0)]
        sample: usize,
    },
}

struct Output {
    json: serde_json::Value,
    table: String,
    csv: String,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Table => out.table,
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&out.json).unwrap();
                    s.push('\n');
                    s
                }
                Format::Csv => out.csv,
            };
            print!("{text}");
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn lib_err(e: histories::HistoryError) -> CliError {
    CliError::validation(e.to_string())
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Vector { scenario } => {
            let sc = load_scenario(scenario)?;
            cmd_vector(&sc, cli.cap, 0, cli.seed)
        }
        Command::Probs { scenario } => {
            let sc = load_scenario(scenario)?;
            cmd_probs(&sc, cli.cap)
        }
        Command::Consistency { scenario, tol } => {
            let sc = load_scenario(scenario)?;
            cmd_consistency(&sc, *tol, cli.cap)
        }
        Command::Marginals { scenario } => {
            let sc = load_scenario(scenario)?;
            cmd_marginals(&sc, cli.cap)
        }
        Command::Entropy {
            scenario,
            trace_out,
            subsystem,
        } => {
            let sc = load_scenario(scenario)?;
            cmd_entropy(&sc, trace_out, *subsystem, cli.cap)
        }
        Command::ProtocolCheck { scenario } => {
            let sc = load_scenario(scenario)?;
            cmd_protocol_check(&sc)
        }
        Command::Lg { scenario } => {
            let sc = load_scenario(scenario)?;
            cmd_lg(&sc)
        }
        Command::Chsh { scenario, mode } => {
            let sc = load_scenario(scenario)?;
            cmd_chsh(&sc, *mode)
        }
        Command::Intermediate { scenario, beta2 } => {
            let sc = load_scenario(scenario)?;
            cmd_intermediate(&sc, *beta2)
        }
        Command::Demo { name, sample } => cmd_demo(name, *sample, cli),
    }
}

fn history_vector(
    sc: &scenario::ScenarioFile,
    cap: usize,
) -> Result<histories::engine::HistoryVector, CliError> {
    let spec = build_spec(sc)?;
    let hv = spec.history_vector_with_cap(cap).map_err(lib_err)?;
    let norm = hv.norm();
    if (norm - 1.0).abs() > PROBABILITY_CONTRACT_TOL {
        return Err(CliError::contract(format!(
            "history vector norm is {norm}, expected 1"
        )));
    }
    Ok(hv)
}

fn cmd_vector(
    sc: &scenario::ScenarioFile,
    cap: usize,
    sample: usize,
    seed: u64,
) -> Result<Output, CliError> {
    let hv = history_vector(sc, cap)?;
    let rows = SequenceRows {
        n_slots: hv.n(),
        rows: hv
            .content()
            .iter()
            .map(|(alpha, z)| ((*alpha).clone(), z.norm_sqr(), z.re, z.im))
            .collect(),
    };
    let mut payload = json!({
        "command": "vector",
        "histories": rows.json_rows(),
        "norm": hv.norm(),
    });
    let mut table = rows.table();
    let mut csv = rows.csv();
    if sample > 0 {
        let draws = sample_sequences(&hv, sample, seed);
        let mut counts = std::collections::BTreeMap::new();
        for d in draws {
            *counts.entry(d).or_insert(0usize) += 1;
        }
        let freq: Vec<_> = counts
            .iter()
            .map(|(alpha, c)| json!({"sequence": alpha, "count": c}))
            .collect();
        payload["samples"] = json!({"total": sample, "seed": seed, "counts": freq});
        table.push_str(&format!("\nsampled {sample} sequences (seed {seed})\n"));
        for (alpha, c) in &counts {
            let seq = alpha
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",");
            table.push_str(&format!("({seq})  {c}\n"));
            csv.push_str(&format!("# sample,({seq}),{c}\n"));
        }
    }
    Ok(Output {
        json: payload,
        table,
        csv,
    })
}

fn cmd_probs(sc: &scenario::ScenarioFile, cap: usize) -> Result<Output, CliError> {
    let hv = history_vector(sc, cap)?;
    let mut total = 0.0;
    let rows: Vec<(Vec<usize>, f64, f64, f64)> = hv
        .all_sequences()
        .map(|alpha| {
            let z = hv.amplitude(&alpha);
            let p = z.norm_sqr();
            total += p;
            (alpha, p, z.re, z.im)
        })
        .collect();
    if (total - 1.0).abs() > PROBABILITY_CONTRACT_TOL {
        return Err(CliError::contract(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    let rows = SequenceRows {
        n_slots: hv.n(),
        rows,
    };
    let mut table = rows.table();
    table.push_str(&format!("total           {}\n", sig7(total)));
    Ok(Output {
        json: json!({
            "command": "probs",
            "sequences": rows.json_rows(),
            "total": total,
        }),
        table,
        csv: rows.csv(),
    })
}

fn cmd_consistency(
    sc: &scenario::ScenarioFile,
    tol: f64,
    cap: usize,
) -> Result<Output, CliError> {
    let spec = build_spec(sc)?;
    let report = spec.is_consistent_set_with_cap(tol, cap).map_err(lib_err)?;
    let witness = report
        .witness
        .as_ref()
        .map(|(a, b)| format!("{a:?} vs {b:?}"))
        .unwrap_or_else(|| "none".into());
    let pairs = [
        ("consistent", report.consistent.to_string()),
        ("max_interference", sig7(report.max_interference)),
        ("tolerance", format!("{tol:e}")),
        ("witness", witness),
    ];
    Ok(Output {
        json: json!({
            "command": "consistency",
            "consistent": report.consistent,
            "max_interference": report.max_interference,
            "tolerance": tol,
            "witness": report.witness,
        }),
        table: kv_table(&pairs.iter().map(|(k, v)| (*k, v.clone())).collect::<Vec<_>>()),
        csv: kv_csv(&pairs.iter().map(|(k, v)| (*k, v.clone())).collect::<Vec<_>>()),
    })
}

fn cmd_marginals(sc: &scenario::ScenarioFile, cap: usize) -> Result<Output, CliError> {
    let spec = build_spec(sc)?;
    let report = spec.marginal_checks_with_cap(cap).map_err(lib_err)?;
    if (report.total_probability - 1.0).abs() > PROBABILITY_CONTRACT_TOL {
        return Err(CliError::contract(format!(
            "probabilities sum to {}, expected 1",
            report.total_probability
        )));
    }
    for (i, r) in report.amplitude_residuals.iter().enumerate() {
        if *r > PROBABILITY_CONTRACT_TOL {
            return Err(CliError::contract(format!(
                "amplitude sum rule fails at slot {}: residual {r}",
                i + 1
            )));
        }
    }
    let mut pairs: Vec<(&str, String)> = vec![
        ("total_probability", sig7(report.total_probability)),
        (
            "last_slot_probability_residual",
            sig7(report.last_slot_probability_residual),
        ),
    ];
    let amp = report
        .amplitude_residuals
        .iter()
        .map(|r| sig7(*r))
        .collect::<Vec<_>>()
        .join(" ");
    let inter = report
        .intermediate_probability_residuals
        .iter()
        .map(|r| sig7(*r))
        .collect::<Vec<_>>()
        .join(" ");
    pairs.push(("amplitude_residuals", amp));
    pairs.push(("intermediate_probability_residuals", inter));
    Ok(Output {
        json: json!({
            "command": "marginals",
            "total_probability": report.total_probability,
            "amplitude_residuals": report.amplitude_residuals,
            "last_slot_probability_residual": report.last_slot_probability_residual,
            "intermediate_probability_residuals": report.intermediate_probability_residuals,
        }),
        table: kv_table(&pairs),
        csv: kv_csv(&pairs),
    })
}

fn cmd_entropy(
    sc: &scenario::ScenarioFile,
    trace_out: &[usize],
    subsystem: Option<SubsystemArg>,
    cap: usize,
) -> Result<Output, CliError> {
    let (rho, reduction) = match subsystem {
        Some(which) => {
            let comp = build_composite(sc)?;
            let keep = match which {
                SubsystemArg::A => Subsystem::A,
                SubsystemArg::B => Subsystem::B,
            };
            let rho = space_reduce(&comp, keep).map_err(lib_err)?;
            (rho, format!("subsystem {which:?}"))
        }
        None => {
            if trace_out.is_empty() {
                return Err(CliError::validation(
                    "entropy needs --trace-out SLOTS or --subsystem A|B".into(),
                ));
            }
            let hv = history_vector(sc, cap)?;
            let keep: Vec<usize> = (1..=hv.n()).filter(|s| !trace_out.contains(s)).collect();
            let rho = density_from_history_vector(&hv).map_err(lib_err)?;
            let rho = time_reduce(&rho, &keep).map_err(lib_err)?;
            (rho, format!("traced out slots {trace_out:?}"))
        }
    };
    let nats = von_neumann_entropy(&rho, LogBase::Natural).map_err(lib_err)?;
    let bits = von_neumann_entropy(&rho, LogBase::Two).map_err(lib_err)?;
    let pairs = [
        ("reduction", reduction.clone()),
        ("entropy_nats", sig7(nats)),
        ("entropy_bits", sig7(bits)),
        ("purity", sig7(rho.purity())),
    ];
    Ok(Output {
        json: json!({
            "command": "entropy",
            "reduction": reduction,
            "entropy_nats": nats,
            "entropy_bits": bits,
            "purity": rho.purity(),
        }),
        table: kv_table(&pairs),
        csv: kv_csv(&pairs),
    })
}

fn cmd_protocol_check(sc: &scenario::ScenarioFile) -> Result<Output, CliError> {
    let spec = build_spec(sc)?;
    let check = verify_protocol_equivalence(&spec, 1e-10).map_err(lib_err)?;
    if !check.equivalent {
        return Err(CliError::contract(format!(
            "protocol deviates from the direct construction by {}",
            check.max_abs_diff
        )));
    }
    let pairs = [
        ("equivalent", check.equivalent.to_string()),
        ("max_abs_diff", sig7(check.max_abs_diff)),
    ];
    Ok(Output {
        json: json!({
            "command": "protocol-check",
            "equivalent": check.equivalent,
            "max_abs_diff": check.max_abs_diff,
        }),
        table: kv_table(&pairs),
        csv: kv_csv(&pairs),
    })
}

fn cmd_lg(sc: &scenario::ScenarioFile) -> Result<Output, CliError> {
    let sched = build_lg(sc)?;
    let report = lg_evaluate(&sched, 1e-10).map_err(lib_err)?;
    let decomp = lg_interference_decomposition(&sched).map_err(lib_err)?;
    if decomp.residual > 1e-9 {
        return Err(CliError::contract(format!(
            "LG decomposition identity fails: residual {}",
            decomp.residual
        )));
    }
    let pairs = [
        ("C12", sig7(report.c12)),
        ("C13", sig7(report.c13)),
        ("C23", sig7(report.c23)),
        ("K", sig7(report.k)),
        ("violated", report.violated.to_string()),
        ("consistent", report.consistent.to_string()),
        ("decomposition_residual", sig7(decomp.residual)),
    ];
    Ok(Output {
        json: json!({
            "command": "lg",
            "c12": report.c12,
            "c13": report.c13,
            "c23": report.c23,
            "k": report.k,
            "violated": report.violated,
            "consistent": report.consistent,
            "interference_first_starred": report.i_first,
            "interference_middle_starred": report.i_middle,
            "decomposition_residual": decomp.residual,
        }),
        table: kv_table(&pairs),
        csv: kv_csv(&pairs),
    })
}

fn chsh_output(report: &ChshReport) -> Output {
    let mode = match report.mode {
        ChshMode::FixedBasis => "fixed-basis",
        ChshMode::PerPair => "per-pair",
    };
    let names = ["E(A1,A2)", "E(A1,B2)", "E(B1,A2)", "E(B1,B2)"];
    let mut pairs: Vec<(&str, String)> = vec![("mode", mode.to_string())];
    for (name, value) in names.iter().zip(report.averages) {
        pairs.push((name, sig7(value)));
    }
    pairs.push(("S", sig7(report.s)));
    pairs.push(("S_after_A1_flip", sig7(report.s_after_a1_flip)));
    pairs.push(("violated", report.violated.to_string()));
    let mut table = kv_table(&pairs);
    let mut csv = kv_csv(&pairs);
    let tables_json = report.tables.as_ref().map(|tables| {
        tables
            .iter()
            .map(|t| {
                json!({
                    "first": t.first,
                    "second": t.second,
                    "probabilities": t.probabilities,
                })
            })
            .collect::<Vec<_>>()
    });
    if let Some(tables) = &report.tables {
        for t in tables {
            table.push_str(&format!("\npair ({}, {})\n", t.first, t.second));
            table.push_str("            +1             -1\n");
            for (sign, row) in ["+1", "-1"].iter().zip(t.probabilities) {
                table.push_str(&format!(
                    "{sign}   {:<14} {}\n",
                    sig7(row[0]),
                    sig7(row[1])
                ));
            }
            for (i, sign1) in ["+1", "-1"].iter().enumerate() {
                for (j, sign2) in ["+1", "-1"].iter().enumerate() {
                    csv.push_str(&format!(
                        "p[{},{}][{sign1},{sign2}],{}\n",
                        t.first, t.second, t.probabilities[i][j]
                    ));
                }
            }
        }
    }
    Output {
        json: json!({
            "command": "chsh",
            "mode": mode,
            "averages": {
                "a1a2": report.averages[0],
                "a1b2": report.averages[1],
                "b1a2": report.averages[2],
                "b1b2": report.averages[3],
            },
            "s": report.s,
            "s_after_a1_flip": report.s_after_a1_flip,
            "violated": report.violated,
            "tables": tables_json,
        }),
        table,
        csv,
    }
}

fn cmd_chsh(sc: &scenario::ScenarioFile, mode: Option<Mode>) -> Result<Output, CliError> {
    let setup = build_chsh(sc)?;
    let mode = match mode {
        Some(Mode::FixedBasis) => ChshMode::FixedBasis,
        Some(Mode::PerPair) => ChshMode::PerPair,
        None => match sc.chsh.as_ref().and_then(|c| c.mode.as_deref()) {
            Some("per-pair") => ChshMode::PerPair,
            Some("fixed-basis") | None => ChshMode::FixedBasis,
            Some(other) => {
                return Err(CliError::validation(format!(
                    "unknown chsh mode {other:?}"
                )))
            }
        },
    };
    let report = chsh_evaluate(&setup, mode, 1e-10).map_err(lib_err)?;
    if let Some(tables) = &report.tables {
        for t in tables {
            let total: f64 = t.probabilities.iter().flatten().sum();
            if (total - 1.0).abs() > PROBABILITY_CONTRACT_TOL {
                return Err(CliError::contract(format!(
                    "pair ({}, {}) probabilities sum to {total}",
                    t.first, t.second
                )));
            }
        }
    }
    Ok(chsh_output(&report))
}

fn cmd_intermediate(sc: &scenario::ScenarioFile, beta2: usize) -> Result<Output, CliError> {
    let spec = build_spec(sc)?;
    let b2 = spec.measurements()[spec.n() - 1]
        .basis()
        .ok_or_else(|| {
            CliError::validation("final measurement must be a rank-1 basis".into())
        })?
        .clone();
    let inter = two_time_intermediate_state(&spec, &b2, beta2).map_err(lib_err)?;
    let entries: Vec<[f64; 2]> = inter
        .state
        .entries()
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    let state_str = inter
        .state
        .entries()
        .iter()
        .map(|z| {
            let sign = if z.im < 0.0 { "-" } else { "+" };
            format!("{} {} {}i", sig7(z.re), sign, sig7(z.im.abs()))
        })
        .collect::<Vec<_>>()
        .join(", ");
    let pairs = [
        ("beta2", beta2.to_string()),
        ("normalization", sig7(inter.normalization)),
        ("state", format!("[{state_str}]")),
    ];
    Ok(Output {
        json: json!({
            "command": "intermediate",
            "beta2": beta2,
            "normalization": inter.normalization,
            "state": entries,
        }),
        table: kv_table(&pairs),
        csv: kv_csv(&pairs),
    })
}

const XZ_EXAMPLE: &str = include_str!("../scenarios/xz-example.json");
const BELL2_CHSH: &str = include_str!("../scenarios/bell2-chsh.json");
const PRECESSION_LG: &str = include_str!("../scenarios/precession-lg.json");

pub fn builtin_scenario(name: &str) -> Option<&'static str> {
    match name {
        "xz-example" => Some(XZ_EXAMPLE),
        "bell2-chsh" => Some(BELL2_CHSH),
        "precession-lg" => Some(PRECESSION_LG),
        _ => None,
    }
}

fn cmd_demo(name: &str, sample: usize, cli: &Cli) -> Result<Output, CliError> {
    let text = builtin_scenario(name).ok_or_else(|| {
        CliError::validation(format!(
            "unknown demo {name:?}; built-ins: xz-example, bell2-chsh, precession-lg"
        ))
    })?;
    let sc = scenario::parse_scenario(text)?;
    match name {
        "xz-example" => cmd_vector(&sc, cli.cap, sample, cli.seed),
        "bell2-chsh" => {
            if sample > 0 {
                return cmd_vector(&sc, cli.cap, sample, cli.seed);
            }
            cmd_chsh(&sc, Some(Mode::PerPair))
        }
        "precession-lg" => {
            if sample > 0 {
                return cmd_vector(&sc, cli.cap, sample, cli.seed);
            }
            cmd_lg(&sc)
        }
        _ => unreachable!(),
    }
}
